#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dropsim/scalar_transport.hpp"

using namespace dropsim;

namespace {

Grid planar_grid(int nr, int nz, double W, double H) {
    GridSpec spec;
    spec.nr = nr;
    spec.nz = nz;
    spec.W = W;
    spec.H = H;
    spec.planar = true;
    return build_grid(spec);
}

}  // namespace

TEST_CASE("uniform fields are exact fixed points of transport") {
    Grid g = planar_grid(6, 8, 1.0, 1.0);
    // divergent flux pattern, as behind a Stefan source
    FaceField phi(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) phi.r(i, j) = 0.01 * (i - 2) * (j + 1);
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) phi.z(i, j) = -0.02 * j + 0.005 * i;

    ScalarBcSet bc;
    bc.north = {ScalarBcKind::InletOutlet, 300.0};
    bc.east = {ScalarBcKind::Fixed, 300.0};

    Field T(g.ncells(), 300.0);
    Field rho_cp(g.ncells(), 1200.0), k(g.ncells(), 0.03);
    EnergySources src(g.ncells());
    solve_energy(g, bc, T, phi, rho_cp, k, src, 0.1);
    for (int c = 0; c < g.ncells(); ++c) CHECK(T[c] == Catch::Approx(300.0).epsilon(1e-14));

    ScalarBcSet sbc;
    sbc.north = {ScalarBcKind::InletOutlet, 0.3};
    Field omega(g.ncells(), 0.3);
    Field rho(g.ncells(), 1.2), rho_d(g.ncells(), 2e-5);
    const auto res = solve_species(g, sbc, omega, phi, rho, rho_d, 0.1);
    CHECK(res.bounded);
    for (int c = 0; c < g.ncells(); ++c) CHECK(omega[c] == Catch::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("conduction slab settles on the linear steady profile") {
    Grid g = planar_grid(2, 20, 0.1, 1.0);
    ScalarBcSet bc;
    bc.south = {ScalarBcKind::Fixed, 300.0};
    bc.north = {ScalarBcKind::Fixed, 400.0};
    FaceField phi(g);
    Field T(g.ncells(), 300.0);
    Field rho_cp(g.ncells(), 1000.0), k(g.ncells(), 0.5);
    EnergySources src(g.ncells());
    TransportOptions opt;
    opt.tol_rel = 1e-13;
    // implicit step with a huge dt lands on the steady state directly
    solve_energy(g, bc, T, phi, rho_cp, k, src, 1e12, opt);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double exact = 300.0 + 100.0 * g.zc(j) / 1.0;
            CHECK(T[g.idx(i, j)] == Catch::Approx(exact).margin(1e-6));
        }
}

TEST_CASE("species diffusion follows the self-similar erfc profile") {
    const double D = 1e-3, w0 = 0.4, t_end = 5.0, dt = 0.01;
    Grid g = planar_grid(2, 400, 0.01, 1.0);
    ScalarBcSet bc;
    bc.south = {ScalarBcKind::Fixed, w0};
    FaceField phi(g);
    Field omega(g.ncells(), 0.0);
    Field rho(g.ncells(), 1.0), rho_d(g.ncells(), D);
    double t = 0.0;
    while (t < t_end - 0.5 * dt) {
        const auto res = solve_species(g, bc, omega, phi, rho, rho_d, dt);
        REQUIRE(res.bounded);
        t += dt;
    }
    const double L = std::sqrt(4.0 * D * t_end);
    for (int j = 0; j < g.nz; ++j) {
        const double eta = g.zc(j) / L;
        if (eta > 1.5) break;
        const double exact = w0 * std::erfc(eta);
        CHECK(omega[g.idx(0, j)] == Catch::Approx(exact).margin(0.03 * w0));
    }
}

TEST_CASE("upwind advection keeps a step profile bounded") {
    Grid g = planar_grid(2, 60, 0.01, 1.0);
    ScalarBcSet bc;
    bc.south = {ScalarBcKind::Fixed, 1.0};
    bc.north = {ScalarBcKind::InletOutlet, 0.0};
    const double uz = 0.5;
    FaceField phi(g);
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) phi.z(i, j) = uz * g.area_z(i);
    Field omega(g.ncells(), 0.0);
    for (int j = 0; j < g.nz / 4; ++j)
        for (int i = 0; i < g.nr; ++i) omega[g.idx(i, j)] = 1.0;
    Field rho(g.ncells(), 1.0), rho_d(g.ncells(), 1e-9);
    auto mean_pos = [&] {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < g.nz; ++j) {
            num += omega[g.idx(0, j)] * g.zc(j);
            den += omega[g.idx(0, j)];
        }
        return num / den;
    };
    const double pos0 = mean_pos();
    for (int n = 0; n < 40; ++n) {
        const auto res = solve_species(g, bc, omega, phi, rho, rho_d, 0.01);
        CHECK(res.bounded);
    }
    for (int c = 0; c < g.ncells(); ++c) {
        CHECK(omega[c] >= 0.0);
        CHECK(omega[c] <= 1.0);
    }
    // front moved downstream by roughly uz * t
    CHECK(mean_pos() - pos0 > 0.1);
}

TEST_CASE("energy obeys the discrete max principle with zero sources") {
    Grid g = planar_grid(16, 16, 1.0, 1.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(280.0, 320.0);
    Field T(g.ncells());
    for (auto& v : T) v = u(rng);
    // solid-body-like rotation about the domain center
    FaceField phi(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) phi.r(i, j) = -(g.zc(j) - 0.5) * g.dz;
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) phi.z(i, j) = (g.rc(i) - 0.5) * g.dr;
    ScalarBcSet bc;  // zero gradient all around
    Field rho_cp(g.ncells(), 1.0), k(g.ncells(), 1e-3);
    EnergySources src(g.ncells());
    for (int n = 0; n < 20; ++n) solve_energy(g, bc, T, phi, rho_cp, k, src, 0.05);
    for (int c = 0; c < g.ncells(); ++c) {
        CHECK(T[c] >= 280.0 - 1e-9);
        CHECK(T[c] <= 320.0 + 1e-9);
    }
}

TEST_CASE("energy sources shift a sealed uniform cell exactly") {
    Grid g = planar_grid(4, 4, 1.0, 1.0);
    ScalarBcSet bc;
    FaceField phi(g);
    Field rho_cp(g.ncells(), 2000.0), k(g.ncells(), 0.1);
    const double dt = 0.5;

    EnergySources src(g.ncells());
    for (auto& v : src.evap_sink) v = 4000.0;
    Field T(g.ncells(), 350.0);
    solve_energy(g, bc, T, phi, rho_cp, k, src, dt);
    // uniform field, no diffusion: dT = -sink dt / (rho Cp)
    for (int c = 0; c < g.ncells(); ++c)
        CHECK(T[c] == Catch::Approx(350.0 - 4000.0 * dt / 2000.0).epsilon(1e-12));

    EnergySources heat(g.ncells());
    for (auto& v : heat.pressure_work) v = 1000.0;
    for (auto& v : heat.interdiffusion) v = 1000.0;
    heat.include_interdiffusion = true;
    Field T2(g.ncells(), 350.0);
    solve_energy(g, bc, T2, phi, rho_cp, k, heat, dt);
    for (int c = 0; c < g.ncells(); ++c) CHECK(T2[c] == Catch::Approx(350.0).margin(1e-10));

    heat.include_interdiffusion = false;
    Field T3(g.ncells(), 350.0);
    solve_energy(g, bc, T3, phi, rho_cp, k, heat, dt);
    for (int c = 0; c < g.ncells(); ++c)
        CHECK(T3[c] == Catch::Approx(350.0 + 1000.0 * dt / 2000.0).epsilon(1e-12));
}

TEST_CASE("inlet-outlet backflow drives the field to the ambient value") {
    Grid g = planar_grid(2, 12, 0.1, 1.0);
    ScalarBcSet bc;
    bc.north = {ScalarBcKind::InletOutlet, 350.0};
    bc.south = {ScalarBcKind::InletOutlet, 300.0};
    FaceField phi(g);
    // downward flow: inflow through the north boundary
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) phi.z(i, j) = -0.2 * g.area_z(i);
    Field T(g.ncells(), 300.0);
    Field rho_cp(g.ncells(), 1.0), k(g.ncells(), 1e-12);
    EnergySources src(g.ncells());
    TransportOptions opt;
    opt.tol_rel = 1e-13;
    solve_energy(g, bc, T, phi, rho_cp, k, src, 1e9, opt);
    for (int c = 0; c < g.ncells(); ++c) CHECK(T[c] == Catch::Approx(350.0).margin(1e-6));
}

TEST_CASE("saturation imposition blends by liquid fraction and restores the carrier") {
    Grid g = planar_grid(2, 2, 1.0, 1.0);
    Field alpha(g.ncells());
    alpha[g.idx(0, 0)] = 1.0;
    alpha[g.idx(1, 0)] = 0.4;
    alpha[g.idx(0, 1)] = 1e-9;
    alpha[g.idx(1, 1)] = 0.0;
    Field fuel(g.ncells(), 0.1), carrier(g.ncells(), 0.9);
    Field fuel_sat(g.ncells(), 0.5), carrier_sat(g.ncells(), 0.5);
    std::vector<Field*> omega = {&fuel, &carrier};
    std::vector<const Field*> omega_sat = {&fuel_sat, &carrier_sat};
    impose_saturation(g, alpha, omega, omega_sat, 1);
    CHECK(fuel[g.idx(0, 0)] == Catch::Approx(0.5));
    CHECK(fuel[g.idx(1, 0)] == Catch::Approx(0.4 * 0.5 + 0.6 * 0.1));
    CHECK(fuel[g.idx(0, 1)] == Catch::Approx(0.1));
    CHECK(fuel[g.idx(1, 1)] == Catch::Approx(0.1));
    for (int c = 0; c < g.ncells(); ++c)
        CHECK(fuel[c] + carrier[c] == Catch::Approx(1.0).epsilon(1e-14));
}
