#include <catch2/catch_amalgamated.hpp>

#include "dropsim/evaporation.hpp"

using namespace dropsim;

static Field rasterize_circle(const Grid& g, double rc_, double zc_, double R, int sub = 8) {
    Field alpha(g.ncells(), 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            int in = 0;
            for (int sj = 0; sj < sub; ++sj)
                for (int si = 0; si < sub; ++si) {
                    const double r = g.rface(i) + (si + 0.5) * g.dr / sub;
                    const double z = g.zface(j) + (sj + 0.5) * g.dz / sub;
                    if (sq(r - rc_) + sq(z - zc_) < R * R) ++in;
                }
            alpha[g.idx(i, j)] = static_cast<double>(in) / (sub * sub);
        }
    return alpha;
}

TEST_CASE("interface pairing on a droplet") {
    Grid g = build_grid({.nr = 64, .nz = 96, .W = 4e-3, .H = 6e-3});
    const Field alpha = rasterize_circle(g, 0.0, 3e-3, 1e-3);
    const auto rec = reconstruct(g, alpha);
    const auto pairing = pair_interface_cells(g, alpha, rec);
    REQUIRE(pairing.interface_cell.size() == rec.cells.size());
    int nfar = 0;
    for (size_t k = 0; k < pairing.interface_cell.size(); ++k) {
        const int c = pairing.interface_cell[k];
        const int a = pairing.gas_cell[k];
        if (pairing.far[k]) {
            ++nfar;
            continue;
        }
        CHECK(alpha[a] < kAlphaEps);
        const int ci = c % g.nr, cj = c / g.nr;
        const int ai = a % g.nr, aj = a / g.nr;
        // within the walk range of the interface cell
        CHECK(std::abs(ai - ci) <= 3);
        CHECK(std::abs(aj - cj) <= 3);
        // gas cell lies outside the droplet
        const double d = std::hypot(g.rc(ai), g.zc(aj) - 3e-3);
        CHECK(d > 1e-3);
    }
    CHECK(nfar <= static_cast<int>(pairing.interface_cell.size()) / 10);
}

TEST_CASE("pairing falls back near a wall of liquid") {
    // single interface cell surrounded by liquid except one side
    Grid g = build_grid({.nr = 4, .nz = 4, .W = 1.0, .H = 1.0, .planar = true});
    Field alpha(g.ncells(), 1.0);
    alpha[g.idx(2, 1)] = 0.5;
    alpha[g.idx(3, 1)] = 0.2;  // most gas-like neighbor, still not below eps
    const auto rec = reconstruct(g, alpha);
    const auto pairing = pair_interface_cells(g, alpha, rec);
    for (size_t k = 0; k < pairing.interface_cell.size(); ++k) {
        if (pairing.interface_cell[k] == g.idx(2, 1)) {
            CHECK(pairing.far[k] == 1);
        }
    }
}

TEST_CASE("diffusive flux arithmetic") {
    Grid g = build_grid({.nr = 8, .nz = 8, .W = 1.0, .H = 1.0, .planar = true});
    Field rho(g.ncells(), 1.2), diff(g.ncells(), 1e-5), mr(g.ncells(), 0.8);
    SECTION("uniform composition gives zero flux") {
        Field y(g.ncells(), 0.3), jr, jz;
        diffusive_flux(g, rho, diff, mr, y, jr, jz);
        for (int c = 0; c < g.ncells(); ++c) {
            CHECK(jr[c] == 0.0);
            CHECK(jz[c] == 0.0);
        }
    }
    SECTION("linear profile gives the analytic flux") {
        Field y(g.ncells()), jr, jz;
        const double slope = 2.0;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) y[g.idx(i, j)] = slope * g.zc(j);
        diffusive_flux(g, rho, diff, mr, y, jr, jz);
        for (int c = 0; c < g.ncells(); ++c) {
            CHECK(jz[c] == Catch::Approx(-1.2 * 1e-5 * 0.8 * slope).epsilon(1e-12));
            CHECK(std::abs(jr[c]) < 1e-15);
        }
    }
}

TEST_CASE("convective flux arithmetic") {
    Grid g = build_grid({.nr = 2, .nz = 2, .W = 1.0, .H = 1.0, .planar = true});
    Field rho(4, 1.5), omega(4, 0.2), vr(4, 0.3), vz(4, -0.4), jr, jz;
    convective_flux(g, rho, omega, vr, vz, jr, jz);
    for (int c = 0; c < 4; ++c) {
        CHECK(jr[c] == Catch::Approx(1.5 * 0.2 * 0.3).epsilon(1e-14));
        CHECK(jz[c] == Catch::Approx(1.5 * 0.2 * -0.4).epsilon(1e-14));
    }
}

TEST_CASE("raw rate projects the flux on the interface normal") {
    Grid g = build_grid({.nr = 4, .nz = 4, .W = 1.0, .H = 1.0, .planar = true});
    InterfaceReconstruction rec;
    rec.nr.assign(g.ncells(), 0.0);
    rec.nz.assign(g.ncells(), 0.0);
    const int c = g.idx(1, 1), a = g.idx(1, 2);
    rec.nz[c] = -1.0;  // liquid below, gas above
    rec.cells = {c};
    InterfacePairing pairing;
    pairing.interface_cell = {c};
    pairing.gas_cell = {a};
    pairing.far = {0};
    Field jr(g.ncells(), 0.0), jz(g.ncells(), 0.0), mag(g.ncells(), 0.0);
    mag[c] = 1e4;
    SECTION("vapor leaving the liquid evaporates") {
        jz[a] = 1e-3;  // flux upward, into the gas
        const Field mdot = raw_rate(g, pairing, rec, jr, jz, mag);
        CHECK(mdot[c] == Catch::Approx(10.0).epsilon(1e-12));
        for (int cc = 0; cc < g.ncells(); ++cc)
            if (cc != c) CHECK(mdot[cc] == 0.0);
    }
    SECTION("condensing flux is clamped to zero") {
        jz[a] = -1e-3;
        const Field mdot = raw_rate(g, pairing, rec, jr, jz, mag);
        CHECK(mdot[c] == 0.0);
    }
    SECTION("tangential flux does not evaporate") {
        jr[a] = 5.0;
        const Field mdot = raw_rate(g, pairing, rec, jr, jz, mag);
        CHECK(mdot[c] == 0.0);
    }
}

TEST_CASE("redistribution weight") {
    CHECK(redistribution_weight(0.0) == 0.0);
    CHECK(redistribution_weight(1.0) == 0.0);
    CHECK(redistribution_weight(0.5) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(redistribution_weight(0.9) == Catch::Approx(0.3).epsilon(1e-12));
    CHECK(redistribution_weight(0.1) == Catch::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("redistribution two-cell example") {
    Grid g = build_grid({.nr = 2, .nz = 2, .W = 1.0, .H = 1.0, .planar = true});
    Field alpha = {0.9, 0.1, 0.0, 0.0};
    Field raw = {1.0, 1.0, 0.0, 0.0};
    const auto res = redistribute(g, raw, alpha);
    CHECK(res.k_norm == Catch::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(res.mdot[0] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(res.mdot[1] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(res.mdot[2] == 0.0);
    CHECK(res.total_rate == Catch::Approx(2.0 * g.vol(0, 0)).epsilon(1e-12));
}

TEST_CASE("redistribution conserves the volume integral") {
    Grid g = build_grid({.nr = 16, .nz = 16, .W = 1e-3, .H = 1e-3});
    const Field alpha = rasterize_circle(g, 0.0, 0.5e-3, 0.3e-3);
    Field raw(g.ncells(), 0.0);
    int k = 0;
    for (int c = 0; c < g.ncells(); ++c)
        if (alpha[c] > kAlphaEps && alpha[c] < 1.0 - kAlphaEps) raw[c] = 1.0 + 0.1 * (k++ % 7);
    const auto res = redistribute(g, raw, alpha);
    double before = 0.0, after = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            before += raw[g.idx(i, j)] * g.vol(i, j);
            after += res.mdot[g.idx(i, j)] * g.vol(i, j);
        }
    CHECK(after == Catch::Approx(before).epsilon(1e-12));
    CHECK(res.total_rate == Catch::Approx(before).epsilon(1e-12));
    // linear in the raw rate: scaling raw scales the result, K unchanged
    Field raw2 = raw;
    for (auto& v : raw2) v *= 3.0;
    const auto res2 = redistribute(g, raw2, alpha);
    CHECK(res2.k_norm == Catch::Approx(res.k_norm).epsilon(1e-12));
    CHECK(res2.mdot[res.mdot.size() / 2] ==
          Catch::Approx(3.0 * res.mdot[res.mdot.size() / 2]).margin(1e-18));
}

TEST_CASE("redistribution edge cases") {
    Grid g = build_grid({.nr = 2, .nz = 2, .W = 1.0, .H = 1.0, .planar = true});
    SECTION("no evaporation anywhere") {
        Field alpha = {0.5, 0.5, 0.0, 0.0}, raw(4, 0.0);
        const auto res = redistribute(g, raw, alpha);
        CHECK(res.k_norm == 1.0);
        CHECK(res.total_rate == 0.0);
        for (double v : res.mdot) CHECK(v == 0.0);
    }
    SECTION("rate on pure cells cannot be redistributed") {
        Field alpha = {1.0, 0.0, 0.0, 0.0}, raw = {1.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(redistribute(g, raw, alpha), NumericalError);
    }
}
