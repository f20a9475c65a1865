#include <catch2/catch_amalgamated.hpp>

#include "dropsim/flow.hpp"

using namespace dropsim;

namespace {

Grid planar_box(int n, double L) {
    GridSpec spec;
    spec.nr = spec.nz = n;
    spec.W = spec.H = L;
    spec.planar = true;
    return build_grid(spec);
}

FlowBc closed_walls() {
    FlowBc bc;
    bc.west.vel = bc.east.vel = bc.south.vel = bc.north.vel = VelBc::Wall;
    return bc;
}

}  // namespace

TEST_CASE("fiber potential field") {
    GridSpec spec;
    spec.nr = 8;
    spec.nz = 24;
    spec.W = 5e-3;
    spec.H = 30e-3;
    Grid g = build_grid(spec);
    const double df = 1e-4, zf = 10e-3;
    const auto pot = build_potential(g, 1.0, df, zf);
    CHECK(pot.value(0.5 * df, zf) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(pot.value(df, zf) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(pot.value(0.1 * df, zf) == Catch::Approx(1.0).epsilon(1e-14));  // clamped
    double gr, gz;
    pot.grad(1e-3, zf, gr, gz);
    CHECK(gr < 0.0);  // points toward the fiber
    CHECK(gz == Catch::Approx(0.0).margin(1e-14));
    CHECK(std::abs(gr) == Catch::Approx(df / (2.0 * sq(1e-3))).epsilon(1e-12));
    pot.grad(0.2 * df, zf, gr, gz);
    CHECK(gr == 0.0);  // inside the clamp radius
    const auto off = build_potential(g, 0.0, df, zf);
    for (double x : off.xi) CHECK(x == 0.0);
    CHECK_THROWS_AS(build_potential(g, -1.0, df, zf), ConfigError);
}

TEST_CASE("centripetal force magnitude") {
    GridSpec spec;
    spec.nr = 8;
    spec.nz = 24;
    spec.W = 5e-3;
    spec.H = 30e-3;
    Grid g = build_grid(spec);
    const double df = 1e-4, zf = 15e-3, xi0 = 2.0;
    const auto pot = build_potential(g, xi0, df, zf);
    Field rho(g.ncells(), 680.0), alpha(g.ncells(), 0.0);
    Field fr, fz;
    centripetal_force(g, rho, alpha, pot, fr, fz);
    for (int c = 0; c < g.ncells(); ++c) {
        CHECK(fr[c] == 0.0);
        CHECK(fz[c] == 0.0);
    }
    const int i = 3, j = 12;
    alpha[g.idx(i, j)] = 1.0;
    centripetal_force(g, rho, alpha, pot, fr, fz);
    const double d = std::hypot(g.rc(i), g.zc(j) - zf);
    const double expect = 680.0 * xi0 * df / (2.0 * d * d);
    CHECK(std::hypot(fr[g.idx(i, j)], fz[g.idx(i, j)]) ==
          Catch::Approx(expect).epsilon(1e-12));
    CHECK(fr[g.idx(i, j)] < 0.0);  // pulls toward the axis
}

TEST_CASE("face body forces") {
    Grid g = planar_box(6, 0.006);
    PotentialField nopot;
    Field rho(g.ncells(), 2.0), alpha(g.ncells(), 0.0);
    SECTION("uniform density gives zero") {
        const auto s = body_force_faces(g, rho, alpha, nopot, 9.81);
        for (double v : s.fr) CHECK(v == 0.0);
        for (double v : s.fz) CHECK(v == 0.0);
    }
    SECTION("stratified density matches the formula") {
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) rho[g.idx(i, j)] = (j < 3) ? 1000.0 : 1.0;
        const auto s = body_force_faces(g, rho, alpha, nopot, 9.81);
        const int jf = 3;  // face between the two layers
        const double expect = 9.81 * g.zface(jf) * (1.0 - 1000.0) / g.dz;
        CHECK(s.z(2, jf) == Catch::Approx(expect).epsilon(1e-14));
        CHECK(s.z(2, 1) == 0.0);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 1; i < g.nr; ++i) CHECK(s.r(i, j) == 0.0);
    }
}

TEST_CASE("still fluid is a fixed point") {
    Grid g = planar_box(8, 0.008);
    FlowBc bc = closed_walls();
    const int n = g.ncells();
    Field vr(n, 0.0), vz(n, 0.0), rho(n, 1000.0), mu(n, 1e-3);
    Field p_rgh(n, 0.0), source(n, 0.0);
    FaceField phi(g), s(g);
    const auto mom = momentum_predict(g, bc, vr, vz, rho, mu, phi, 1e-3);
    for (int c = 0; c < n; ++c) {
        CHECK(mom.vr[c] == 0.0);
        CHECK(mom.vz[c] == 0.0);
    }
    const auto ps = pressure_correct(g, bc, vr, vz, p_rgh, phi, mom, s, source);
    CHECK(max_speed(vr, vz) == 0.0);
    CHECK(ps.continuity_residual == 0.0);
    for (int c = 0; c < n; ++c) CHECK(p_rgh[c] == 0.0);
    for (double q : phi.fr) CHECK(q == 0.0);
    for (double q : phi.fz) CHECK(q == 0.0);
}

TEST_CASE("stratified hydrostatic column balances to rest") {
    GridSpec spec;
    spec.nr = 6;
    spec.nz = 16;
    spec.W = 3e-3;
    spec.H = 16e-3;
    Grid g = build_grid(spec);
    FlowBc bc = closed_walls();
    bc.west.vel = VelBc::Symmetry;
    const int n = g.ncells();
    Field rho(n), mu(n, 1e-5), alpha(n, 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) rho[g.idx(i, j)] = (j < 8) ? 1000.0 : 1.0;
    PotentialField nopot;
    const auto s = body_force_faces(g, rho, alpha, nopot, 9.81);
    Field vr(n, 0.0), vz(n, 0.0), p_rgh(n, 0.0), source(n, 0.0);
    FaceField phi(g);
    FlowOptions opt;
    opt.p_tol_rel = 1e-13;
    opt.div_tol = 1e-12;
    const double dt = 1e-3;
    // establish the hydrostatic pressure before the first momentum solve
    {
        const auto rest = rest_momentum(g, rho, dt);
        Field vr0(n, 0.0), vz0(n, 0.0);
        pressure_correct(g, bc, vr0, vz0, p_rgh, phi, rest, s, source, opt);
    }
    for (int it = 0; it < 4; ++it) {
        const auto mom = momentum_predict(g, bc, vr, vz, rho, mu, phi, dt, opt);
        pressure_correct(g, bc, vr, vz, p_rgh, phi, mom, s, source, opt);
    }
    CHECK(max_speed(vr, vz) < 1e-8);
    // the pressure jump across the interface matches the face force
    const int jf = 8, i = 2;
    const double dpdz = (p_rgh[g.idx(i, jf)] - p_rgh[g.idx(i, jf - 1)]) / g.dz;
    CHECK(dpdz == Catch::Approx(s.z(i, jf)).epsilon(1e-8));
}

TEST_CASE("evaporation source drives the exact Stefan outflow") {
    GridSpec spec;
    spec.nr = 8;
    spec.nz = 12;
    spec.W = 1e-3;
    spec.H = 1.5e-3;
    Grid g = build_grid(spec);
    FlowBc bc = closed_walls();
    bc.west.vel = VelBc::Symmetry;
    bc.north.vel = VelBc::InletOutlet;
    bc.north.p = PBc::FixedValue;
    bc.north.pval = 0.0;
    const int n = g.ncells();
    Field vr(n, 0.0), vz(n, 0.0), rho(n, 1.0), mu(n, 1e-5);
    Field p_rgh(n, 0.0), source(n, 0.0);
    FaceField phi(g), s(g);
    const double rho_l = 680.0, rho_g = 1.0, mdot_vol = 5.0;
    const int cell = g.idx(2, 5);
    source[cell] = mdot_vol * (1.0 / rho_l - 1.0 / rho_g);
    FlowOptions opt;
    opt.p_tol_rel = 1e-13;
    opt.div_tol = 1e-13;
    const auto mom = momentum_predict(g, bc, vr, vz, rho, mu, phi, 1e-4, opt);
    const auto ps = pressure_correct(g, bc, vr, vz, p_rgh, phi, mom, s, source, opt);
    double outflow = 0.0;
    for (int i = 0; i < g.nr; ++i) outflow += phi.z(i, g.nz);
    const double mdot = mdot_vol * g.vol(2, 5);
    const double expect = mdot * (1.0 / rho_g - 1.0 / rho_l);
    CHECK(outflow == Catch::Approx(expect).epsilon(1e-10));
    // other boundaries carry no flux
    for (int j = 0; j < g.nz; ++j) {
        CHECK(phi.r(0, j) == 0.0);
        CHECK(phi.r(g.nr, j) == 0.0);
    }
    for (int i = 0; i < g.nr; ++i) CHECK(phi.z(i, 0) == 0.0);
    // and the divergence matches the source cell by cell
    const Field div = divergence(g, phi);
    for (int c = 0; c < n; ++c)
        CHECK(div[c] + source[c] == Catch::Approx(0.0).margin(1e-10 * std::abs(source[cell])));
    CHECK(ps.continuity_residual < 1e-10 * std::abs(source[cell]));
}

TEST_CASE("zero source keeps the flow divergence-free") {
    GridSpec spec;
    spec.nr = 6;
    spec.nz = 10;
    spec.W = 1e-3;
    spec.H = 1.5e-3;
    Grid g = build_grid(spec);
    FlowBc bc = closed_walls();
    bc.west.vel = VelBc::Symmetry;
    bc.south.vel = VelBc::Fixed;
    bc.south.uz = 0.1;
    bc.north.vel = VelBc::InletOutlet;
    bc.north.p = PBc::FixedValue;
    const int n = g.ncells();
    Field vr(n, 0.0), vz(n, 0.0), rho(n, 1.2), mu(n, 1.8e-5);
    Field p_rgh(n, 0.0), source(n, 0.0);
    FaceField phi(g), s(g);
    FlowOptions opt;
    opt.p_tol_rel = 1e-13;
    opt.div_tol = 1e-12;
    for (int it = 0; it < 3; ++it) {
        const auto mom = momentum_predict(g, bc, vr, vz, rho, mu, phi, 1e-4, opt);
        pressure_correct(g, bc, vr, vz, p_rgh, phi, mom, s, source, opt);
    }
    double inflow = 0.0, outflow = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        inflow += phi.z(i, 0);
        outflow += phi.z(i, g.nz);
    }
    double area_bottom = 0.0;
    for (int i = 0; i < g.nr; ++i) area_bottom += g.area_z(i);
    CHECK(inflow == Catch::Approx(0.1 * area_bottom).epsilon(1e-14));
    CHECK(outflow == Catch::Approx(inflow).epsilon(1e-9));
    const Field div = divergence(g, phi);
    for (int c = 0; c < n; ++c) CHECK(div[c] == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("lid-driven cavity matches the Re=100 reference", "[slow]") {
    const int N = 64;
    Grid g = planar_box(N, 1.0);
    FlowBc bc = closed_walls();
    bc.north.ur = 1.0;  // moving lid
    const int n = g.ncells();
    Field vr(n, 0.0), vz(n, 0.0), rho(n, 1.0), mu(n, 0.01);
    Field p_rgh(n, 0.0), source(n, 0.0);
    FaceField phi(g), s(g);
    FlowOptions opt;
    opt.central = 1.0;
    opt.p_tol_rel = 1e-9;
    opt.div_tol = 1e-9;
    opt.n_pcorr = 2;
    const double dt = 0.02;
    double change = 1.0;
    int steps = 0;
    while (steps < 2500 && change > 1e-9) {
        Field vr_old = vr, vz_old = vz;
        const auto mom = momentum_predict(g, bc, vr, vz, rho, mu, phi, dt, opt);
        pressure_correct(g, bc, vr, vz, p_rgh, phi, mom, s, source, opt);
        change = 0.0;
        for (int c = 0; c < n; ++c)
            change = std::max(change, std::max(std::abs(vr[c] - vr_old[c]),
                                               std::abs(vz[c] - vz_old[c])));
        ++steps;
    }
    INFO("steps " << steps << " change " << change);
    CHECK(change <= 1e-6);

    // u along the vertical centerline: average the two center columns and
    // interpolate between cell centers in y
    auto u_at = [&](double y) {
        const double t = y / g.dz - 0.5;
        const int j0 = std::max(0, std::min(N - 2, static_cast<int>(std::floor(t))));
        const double w = t - j0;
        auto uc = [&](int j) {
            return 0.5 * (vr[g.idx(N / 2 - 1, j)] + vr[g.idx(N / 2, j)]);
        };
        return (1.0 - w) * uc(j0) + w * uc(j0 + 1);
    };
    auto v_at = [&](double x) {
        const double t = x / g.dr - 0.5;
        const int i0 = std::max(0, std::min(N - 2, static_cast<int>(std::floor(t))));
        const double w = t - i0;
        auto vc = [&](int i) {
            return 0.5 * (vz[g.idx(i, N / 2 - 1)] + vz[g.idx(i, N / 2)]);
        };
        return (1.0 - w) * vc(i0) + w * vc(i0 + 1);
    };
    // Ghia, Ghia & Shin (1982), Re = 100
    CHECK(u_at(0.5000) == Catch::Approx(-0.20581).margin(0.03));
    CHECK(u_at(0.4531) == Catch::Approx(-0.21090).margin(0.03));
    CHECK(u_at(0.8516) == Catch::Approx(0.23151).margin(0.03));
    CHECK(u_at(0.1719) == Catch::Approx(-0.10150).margin(0.03));
    CHECK(v_at(0.2344) == Catch::Approx(0.17527).margin(0.03));
    CHECK(v_at(0.5000) == Catch::Approx(0.05454).margin(0.03));
    CHECK(v_at(0.8047) == Catch::Approx(-0.24533).margin(0.03));
}
