#pragma once

#include <functional>
#include <memory>

#include "dropsim/config.hpp"
#include "dropsim/diagnostics.hpp"
#include "dropsim/evaporation.hpp"
#include "dropsim/output.hpp"
#include "dropsim/scalar_transport.hpp"

namespace dropsim {

// Six-step segregated time step: (1) evaporation flux, (2) alpha sources,
// (3) interface advection, (4) properties and interface thermodynamics,
// (5) momentum, temperature and species, (6) iterative pressure correction.

struct Ledgers {
    double initial_liquid_mass = 0.0;  // kg/rad
    double evaporated_mass = 0.0;      // cumulative dt * integral of mdot
    double boundary_liquid_mass = 0.0; // liquid advected out of the domain
    double clipped_mass = 0.0;         // alpha clipping, mass equivalent
    double clipped_volume = 0.0;
    double mass_residual = 0.0;        // relative closure error
    double energy_change = 0.0;        // cumulative sensible-heat change [J/rad]
    double energy_boundary = 0.0;      // cumulative boundary heat inflow [J/rad]
    double energy_sink = 0.0;          // cumulative evaporative sink [J/rad]
    double energy_work = 0.0;          // cumulative pressure work [J/rad]
    double energy_residual = 0.0;
};

struct PropertyFields {
    Field rho, mu, k, rho_cp;       // alpha-blended mixture
    Field rho_l, rho_g;             // phase densities
    Field drho_l_dt, drho_g_dt;     // lagged density rates for the continuity source
    Field t_prev;                   // temperature at the previous property update
    Field diff;                     // fuel diffusion coefficient [m^2/s]
    Field beta;                     // thermal expansion, blended [1/K]
};

struct SimulationState {
    CaseConfig config;
    Grid grid;
    BoundarySpec bc;
    PotentialField pot;
    std::vector<const SpeciesData*> sp;  // fuel, carrier
    FieldSet f;
    PropertyFields prop;
    Field mdot;
    Field source;  // continuity source matching phi, lagged one step
    FaceField phi;
    double t = 0.0;
    double dt = 0.0;
    long nstep = 0;
    Ledgers ledgers;
    std::vector<std::string> trace;  // six entries per step, in order
    // interface sampling kept for the vaporization-velocity diagnostic
    InterfaceReconstruction rec;
    InterfacePairing pairing;

    SimulationState(const CaseConfig& c, const SpeciesDatabase& db)
        : config(c),
          grid(build_grid(c.grid)),
          bc(build_boundaries(c)),
          pot(build_potential(grid, c.mode == ConvectionMode::Microgravity ? 0.0 : c.xi0,
                              grid.fiber_diam, grid.fiber_z)),
          sp({&db.get(c.fuel), &db.get(c.carrier)}),
          f(initialize(c, grid, db)),
          phi(grid) {
        mdot.assign(grid.ncells(), 0.0);
        source.assign(grid.ncells(), 0.0);
    }

    double liquid_mass() const {
        double m = 0.0;
        for (int j = 0; j < grid.nz; ++j)
            for (int i = 0; i < grid.nr; ++i) {
                const int c = grid.idx(i, j);
                if (!grid.solid[c]) m += f.alpha[c] * prop.rho_l[c] * grid.vol(i, j);
            }
        return m;
    }
};

inline double compute_dt(const Grid& g, const FaceField& phi, double co_max,
                         double dt_max) {
    if (co_max <= 0.0 || co_max > 0.5)
        throw ConfigError("compute_dt: co_max must lie in (0, 0.5]");
    double dt = dt_max;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) {
            const double a = g.area_r(i);
            if (a <= 0.0) continue;
            const double u = std::abs(phi.r(i, j)) / a;
            if (u > 0.0) dt = std::min(dt, co_max * g.dr / u);
        }
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double u = std::abs(phi.z(i, j)) / g.area_z(i);
            if (u > 0.0) dt = std::min(dt, co_max * g.dz / u);
        }
    return dt;
}

// Step 4: phase properties per cell, alpha-blended mixture fields, and the
// equilibrium gas composition imposed on liquid and interface cells.
inline void update_properties(SimulationState& st, double dt) {
    const Grid& g = st.grid;
    const int n = g.ncells();
    PropertyFields& pr = st.prop;
    const bool first = pr.rho.empty();
    const Field rho_l_old = pr.rho_l;
    const Field t_old = pr.t_prev;
    pr.rho.assign(n, 0.0);
    pr.mu.assign(n, 0.0);
    pr.k.assign(n, 0.0);
    pr.rho_cp.assign(n, 0.0);
    pr.rho_l.assign(n, 0.0);
    pr.rho_g.assign(n, 0.0);
    pr.drho_l_dt.assign(n, 0.0);
    pr.drho_g_dt.assign(n, 0.0);
    pr.diff.assign(n, 0.0);
    pr.beta.assign(n, 0.0);

    const SpeciesData& fuel = *st.sp[0];
    const double p = st.config.p;
    const bool ideal = st.config.ideal_thermo;

    std::vector<double> w(2), y(2);
    for (int c = 0; c < n; ++c) {
        if (g.solid[c]) continue;
        const double T = st.f.t[c];
        const double a = st.f.alpha[c];
        w[0] = st.f.omega[0][c];
        w[1] = st.f.omega[1][c];
        mass_to_mole(st.sp, w, y);

        const double rho_g = gas_density(T, p, st.sp, y, ideal);
        const double rho_l = liquid_density(fuel, T);
        double mu_g, k_g;
        gas_transport_mixture(st.sp, y, T, mu_g, k_g);
        const double cp_g = gas_cp_mixture(st.sp, w, T);
        const double cp_l = liquid_property(fuel, T, LiquidProperty::Cp);
        const double k_l = liquid_property(fuel, T, LiquidProperty::Conductivity);
        const double mu_l = liquid_property(fuel, T, LiquidProperty::Viscosity);

        pr.rho_l[c] = rho_l;
        pr.rho_g[c] = rho_g;
        pr.rho[c] = blend(rho_l, rho_g, a);
        pr.mu[c] = blend(mu_l, mu_g, a);
        pr.k[c] = blend(k_l, k_g, a);
        pr.rho_cp[c] = blend(rho_l * cp_l, rho_g * cp_g, a);
        pr.diff[c] = binary_diffusion(fuel, *st.sp[1], T, p);

        const double dT = 1.0;
        const double beta_g =
            ideal ? 1.0 / T
                  : -(gas_density(T + dT, p, st.sp, y, false) -
                      gas_density(T - dT, p, st.sp, y, false)) /
                        (2.0 * dT * rho_g);
        const double beta_l =
            -(liquid_density(fuel, T + dT) - liquid_density(fuel, T - dT)) /
            (2.0 * dT * rho_l);
        pr.beta[c] = blend(beta_l, beta_g, a);

        if (!first && dt > 0.0) {
            pr.drho_l_dt[c] = (rho_l - rho_l_old[c]) / dt;
            // gas rate from the temperature change at fixed composition: the
            // composition part is carried by the Stefan-flow source already
            pr.drho_g_dt[c] = -rho_g * beta_g * (T - t_old[c]) / dt;
        }
    }
    pr.t_prev = st.f.t;

    // interface thermodynamics: equilibrium composition on liquid-bearing cells
    if (st.config.evaporation) {
        Field sat(n, 0.0);
        VleOptions vle;
        vle.ideal = ideal;
        for (int c = 0; c < n; ++c) {
            if (g.solid[c] || st.f.alpha[c] <= kAlphaEps) continue;
            const auto eq =
                equilibrium_mole_fraction(st.f.t[c], p, st.sp, {1.0, 0.0}, 1, vle);
            std::vector<double> ws(2);
            mole_to_mass(st.sp, eq.y, ws);
            sat[c] = ws[0];
        }
        Field sat_carrier(n, 0.0);
        for (int c = 0; c < n; ++c) sat_carrier[c] = 1.0 - sat[c];
        std::vector<Field*> omega = {&st.f.omega[0], &st.f.omega[1]};
        const std::vector<const Field*> omega_sat = {&sat, &sat_carrier};
        impose_saturation(g, st.f.alpha, omega, omega_sat, 1);
    }
}

// Step 1: gas-side species flux sampled through the interface pairing,
// converted to a volumetric rate and redistributed over the interface band.
inline void evaporation_flux(SimulationState& st) {
    const Grid& g = st.grid;
    const Field mdot_prev = st.mdot;
    st.mdot.assign(g.ncells(), 0.0);
    st.rec = reconstruct(g, st.f.alpha);
    if (!st.config.evaporation || st.rec.cells.empty()) {
        st.pairing = {};
        return;
    }
    st.pairing = pair_interface_cells(g, st.f.alpha, st.rec);

    const int n = g.ncells();
    Field y_mole(n, 0.0), m_ratio(n, 0.0);
    std::vector<double> w(2), y(2);
    for (int c = 0; c < n; ++c) {
        if (g.solid[c]) continue;
        w[0] = st.f.omega[0][c];
        w[1] = st.f.omega[1][c];
        mass_to_mole(st.sp, w, y);
        y_mole[c] = y[0];
        m_ratio[c] = st.sp[0]->molar_mass / mixture_molar_mass(st.sp, y);
    }
    Field jdr, jdz, jcr, jcz;
    diffusive_flux(g, st.prop.rho_g, st.prop.diff, m_ratio, y_mole, jdr, jdz);
    convective_flux(g, st.prop.rho_g, st.f.omega[0], st.f.vr, st.f.vz, jcr, jcz);
    // Stefan bound: at the interface the carrier flux vanishes, so the total
    // flux cannot exceed j_d / (1 - omega). The sampled diffusive + convective
    // sum is capped there, which breaks the mdot -> blowing-velocity -> j_c
    // feedback at high transfer rates while leaving moderate rates untouched.
    Field jar(n, 0.0), jaz(n, 0.0);
    for (int c = 0; c < n; ++c) {
        const double amp = 1.0 / std::max(1.0 - st.f.omega[0][c], 0.05);
        jar[c] = jdr[c] * amp;
        jaz[c] = jdz[c] * amp;
        jdr[c] += jcr[c];
        jdz[c] += jcz[c];
    }
    const Field ga = alpha_gradient_magnitude(g, st.f.alpha);
    Field raw = raw_rate(g, st.pairing, st.rec, jdr, jdz, ga);
    const Field cap = raw_rate(g, st.pairing, st.rec, jar, jaz, ga);
    for (int c = 0; c < n; ++c) raw[c] = std::min(raw[c], cap[c]);
    st.mdot = redistribute(g, raw, st.f.alpha).mdot;
    // under-relax against the previous rate: damps the feedback between the
    // Stefan-flow source and the convective vapor flux at high rates
    const double lam = st.config.mdot_relax;
    if (lam < 1.0 && !mdot_prev.empty())
        for (int c = 0; c < n; ++c)
            st.mdot[c] = lam * st.mdot[c] + (1.0 - lam) * mdot_prev[c];
}

namespace detail {

// Physical boundary exchange of a transported quantity given the solved
// field: wall conduction, inflow enthalpy minus outflow enthalpy [W/rad].
inline double boundary_exchange(const Grid& g, const ScalarBcSet& bc, const Field& f,
                                const FaceField& phi, const Field& coef,
                                const Field& gamma) {
    double total = 0.0;
    auto side_term = [&](const ScalarSideBc& side, int c, double qf_out, double area,
                         double delta) {
        const double inflow = std::max(-qf_out, 0.0);
        const double outflow = std::max(qf_out, 0.0);
        switch (side.kind) {
            case ScalarBcKind::Fixed:
                total += gamma[c] * area / (0.5 * delta) * (side.value - f[c]);
                total += coef[c] * (inflow * side.value - outflow * f[c]);
                break;
            case ScalarBcKind::InletOutlet:
                total += coef[c] * (inflow * side.value - outflow * f[c]);
                break;
            case ScalarBcKind::ZeroGradient:
                total += coef[c] * (inflow - outflow) * f[c];
                break;
        }
    };
    for (int j = 0; j < g.nz; ++j) {
        if (g.area_r(0) > 0.0 && !g.is_solid(0, j))
            side_term(bc.west, g.idx(0, j), -phi.r(0, j), g.area_r(0), g.dr);
        if (!g.is_solid(g.nr - 1, j))
            side_term(bc.east, g.idx(g.nr - 1, j), phi.r(g.nr, j), g.area_r(g.nr), g.dr);
    }
    for (int i = 0; i < g.nr; ++i) {
        if (!g.is_solid(i, 0))
            side_term(bc.south, g.idx(i, 0), -phi.z(i, 0), g.area_z(i), g.dz);
        if (!g.is_solid(i, g.nz - 1))
            side_term(bc.north, g.idx(i, g.nz - 1), phi.z(i, g.nz), g.area_z(i), g.dz);
    }
    return total;
}

}  // namespace detail

inline void step(SimulationState& st, double dt) {
    const Grid& g = st.grid;
    const int n = g.ncells();
    const CaseConfig& c = st.config;
    st.trace.clear();
    if (st.prop.rho.empty()) update_properties(st, 0.0);

    // (1) evaporation flux
    evaporation_flux(st);
    st.trace.push_back("1:evaporation-flux");

    // (2) liquid evaporation / expansion sources
    {
        SourceLedger sl;
        apply_sources(g, st.f.alpha, st.mdot, st.prop.rho_l, st.prop.drho_l_dt, dt, sl);
        double evap = 0.0;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i)
                evap += st.mdot[g.idx(i, j)] * g.vol(i, j);
        st.ledgers.evaporated_mass += evap * dt;
        st.ledgers.clipped_volume += sl.clipped_volume;
    }
    st.trace.push_back("2:alpha-sources");

    // (3) interface advection
    {
        AdvectLedger al;
        advect(g, st.f.alpha, st.phi, dt, al, kAlphaEps, &st.source, &st.prop.rho_l);
        double rho_l_ref = 0.0;
        int cnt = 0;
        for (int cix = 0; cix < n; ++cix)
            if (!g.solid[cix]) {
                rho_l_ref += st.prop.rho_l[cix];
                ++cnt;
            }
        rho_l_ref /= std::max(cnt, 1);
        st.ledgers.boundary_liquid_mass += al.boundary_liquid_out * rho_l_ref;
        st.ledgers.clipped_mass +=
            (al.clipped_volume + st.ledgers.clipped_volume) * rho_l_ref;
        st.ledgers.clipped_volume = 0.0;
    }
    st.trace.push_back("3:interface-advection");

    // (4) properties and interface thermodynamics
    update_properties(st, dt);
    st.trace.push_back("4:properties-thermo");

    // (5)+(6) outer iterations: momentum predictor, scalars, pressure
    const Field t_old = st.f.t;
    for (int outer = 0; outer < c.flow.n_outer; ++outer) {
        if (outer > 0 && c.properties_per_outer) update_properties(st, dt);
        const MomentumResult mom = momentum_predict(g, st.bc.flow, st.f.vr, st.f.vz,
                                                    st.prop.rho, st.prop.mu, st.phi, dt,
                                                    c.flow);
        if (outer == 0) {
            EnergySources src(n);
            src.include_interdiffusion = c.interdiffusion;
            Field dtdr, dtdz, dpdr, dpdz;
            gradient(g, st.f.t, dtdr, dtdz);
            gradient(g, st.f.p_rgh, dpdr, dpdz);
            for (int cix = 0; cix < n; ++cix) {
                if (g.solid[cix]) continue;
                src.evap_sink[cix] =
                    st.mdot[cix] * heat_of_vaporization(*st.sp[0], st.f.t[cix]);
                // Dp/Dt with the hydrostatic head restored: v.grad(p_rgh) and
                // the -rho g vz contribution of the head itself
                const double dpdt = st.f.vr[cix] * dpdr[cix] + st.f.vz[cix] * dpdz[cix] -
                                    st.prop.rho[cix] * c.gravity * st.f.vz[cix];
                src.pressure_work[cix] = st.prop.beta[cix] * st.f.t[cix] * dpdt;
            }
            // inter-diffusion: j_d,fuel (Cp_fuel - Cp_carrier) . grad T
            if (c.interdiffusion) {
                Field dwdr, dwdz;
                gradient(g, st.f.omega[0], dwdr, dwdz);
                for (int cix = 0; cix < n; ++cix) {
                    if (g.solid[cix]) continue;
                    const double jr = -st.prop.rho_g[cix] * st.prop.diff[cix] * dwdr[cix];
                    const double jz = -st.prop.rho_g[cix] * st.prop.diff[cix] * dwdz[cix];
                    const double cpf = gas_cp(*st.sp[0], st.f.t[cix]);
                    const double cpc = gas_cp(*st.sp[1], st.f.t[cix]);
                    src.interdiffusion[cix] =
                        (cpf - cpc) * (jr * dtdr[cix] + jz * dtdz[cix]);
                }
            }
            solve_energy(g, st.bc.temperature, st.f.t, st.phi, st.prop.rho_cp, st.prop.k,
                         src, dt);
            Field rho_d(n, 0.0);
            for (int cix = 0; cix < n; ++cix)
                rho_d[cix] = st.prop.rho[cix] * st.prop.diff[cix];
            solve_species(g, st.bc.species, st.f.omega[0], st.phi, st.prop.rho, rho_d,
                          dt);
            std::vector<Field*> omega = {&st.f.omega[0], &st.f.omega[1]};
            restore_carrier(g, omega, 1);

            // energy ledger terms
            double de = 0.0, sink = 0.0, wtot = 0.0;
            for (int j = 0; j < g.nz; ++j)
                for (int i = 0; i < g.nr; ++i) {
                    const int cix = g.idx(i, j);
                    if (g.solid[cix]) continue;
                    const double v = g.vol(i, j);
                    de += st.prop.rho_cp[cix] * (st.f.t[cix] - t_old[cix]) * v;
                    sink += src.evap_sink[cix] * v;
                    wtot += src.pressure_work[cix] * v;
                }
            st.ledgers.energy_change += de;
            st.ledgers.energy_sink += sink * dt;
            st.ledgers.energy_work += wtot * dt;
            st.ledgers.energy_boundary +=
                dt * detail::boundary_exchange(g, st.bc.temperature, st.f.t, st.phi,
                                               st.prop.rho_cp, st.prop.k);
            st.trace.push_back("5:momentum-energy-species");
        }

        const FaceField s_faces =
            body_force_faces(g, st.prop.rho, st.f.alpha, st.pot, c.gravity);
        for (int cix = 0; cix < n; ++cix) {
            if (g.solid[cix]) {
                st.source[cix] = 0.0;
                continue;
            }
            const double a = st.f.alpha[cix];
            st.source[cix] =
                st.mdot[cix] * (1.0 / st.prop.rho_l[cix] - 1.0 / st.prop.rho_g[cix]) +
                a * st.prop.drho_l_dt[cix] / st.prop.rho_l[cix] +
                (1.0 - a) * st.prop.drho_g_dt[cix] / st.prop.rho_g[cix];
        }
        pressure_correct(g, st.bc.flow, st.f.vr, st.f.vz, st.f.p_rgh, st.phi, mom,
                         s_faces, st.source, c.flow);
    }
    st.trace.push_back("6:pressure");

    st.t += dt;
    st.dt = dt;
    ++st.nstep;

    // ledger closure
    const double m_now = st.liquid_mass();
    const Ledgers& L = st.ledgers;
    if (L.initial_liquid_mass > 0.0)
        st.ledgers.mass_residual =
            std::abs(m_now - L.initial_liquid_mass + L.evaporated_mass +
                     L.boundary_liquid_mass + L.clipped_mass) /
            L.initial_liquid_mass;
    const double scale = std::max({std::abs(L.energy_change), std::abs(L.energy_boundary),
                                   L.energy_sink, 1e-30});
    st.ledgers.energy_residual =
        std::abs(L.energy_change - L.energy_boundary + L.energy_sink - L.energy_work) /
        scale;
}

inline TimeSeriesRow measure(const SimulationState& st) {
    const Grid& g = st.grid;
    TimeSeriesRow r;
    r.t = st.t;
    r.d_eq = equivalent_diameter(g, st.f.alpha);
    r.dd0_sq = sq(r.d_eq / st.config.d0);
    r.psi = sphericity(g, st.f.alpha);
    r.max_speed = max_speed(st.f.vr, st.f.vz);
    r.liquid_mass = (g.planar ? 1.0 : 2.0 * M_PI) * st.liquid_mass();
    r.mass_ledger_residual = st.ledgers.mass_residual;
    r.energy_ledger_residual = st.ledgers.energy_residual;

    const Field ga = alpha_gradient_magnitude(g, st.f.alpha);
    double wsum = 0.0, tsum = 0.0, lsum = 0.0, ltsum = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (g.solid[c]) continue;
            const double v = g.vol(i, j);
            const double wi = ga[c] * v;
            wsum += wi;
            tsum += wi * st.f.t[c];
            const double wl = st.f.alpha[c] * v;
            lsum += wl;
            ltsum += wl * st.f.t[c];
        }
    r.t_surface_mean = wsum > 0.0 ? tsum / wsum : 0.0;
    r.t_liquid_mean = lsum > 0.0 ? ltsum / lsum : 0.0;

    double vn = 0.0;
    if (!st.pairing.gas_cell.empty()) {
        for (size_t kx = 0; kx < st.pairing.gas_cell.size(); ++kx) {
            const int gc = st.pairing.gas_cell[kx];
            const int ic = st.pairing.interface_cell[kx];
            vn += -(st.f.vr[gc] * st.rec.nr[ic] + st.f.vz[gc] * st.rec.nz[ic]);
        }
        vn /= double(st.pairing.gas_cell.size());
    }
    r.vaporization_velocity = vn;
    return r;
}

struct RunArtifacts {
    std::vector<TimeSeriesRow> series;
    Ledgers ledgers;
    double final_time = 0.0;
    long steps = 0;
    std::string termination;  // "t_end" or "consumed"
};

using Logger = std::function<void(const std::string&)>;

inline RunArtifacts run_case(const CaseConfig& c, const SpeciesDatabase& db,
                             const std::string& out_dir = "", Logger log = {}) {
    SimulationState st(c, db);
    const bool writing = !out_dir.empty();
    if (writing) std::filesystem::create_directories(out_dir);
    std::unique_ptr<CsvWriter> csv;
    if (writing) csv = std::make_unique<CsvWriter>(out_dir + "/series.csv");

    update_properties(st, 0.0);
    st.ledgers.initial_liquid_mass = st.liquid_mass();

    // establish p_rgh so body forces start balanced
    {
        const MomentumResult rest = rest_momentum(st.grid, st.prop.rho, c.dt_max);
        const FaceField s =
            body_force_faces(st.grid, st.prop.rho, st.f.alpha, st.pot, c.gravity);
        Field zero(st.grid.ncells(), 0.0);
        pressure_correct(st.grid, st.bc.flow, st.f.vr, st.f.vz, st.f.p_rgh, st.phi, rest,
                         s, zero, c.flow);
        std::fill(st.f.vr.begin(), st.f.vr.end(), 0.0);
        std::fill(st.f.vz.begin(), st.f.vz.end(), 0.0);
        st.phi = FaceField(st.grid);
    }

    RunArtifacts art;
    int snap = 0;
    auto emit = [&](bool snapshot) {
        const TimeSeriesRow row = measure(st);
        art.series.push_back(row);
        if (writing) {
            csv->append(row);
            if (snapshot) {
                char name[64];
                std::snprintf(name, sizeof name, "/snap_%04d.vtk", snap++);
                write_snapshot(out_dir + name, st.grid, st.f, st.t);
            }
        }
    };
    emit(true);

    art.termination = "t_end";
    double next_write = c.write_every;
    while (st.t < c.t_end - 1e-15) {
        const double dt =
            std::min(compute_dt(st.grid, st.phi, c.co_max, c.dt_max), c.t_end - st.t);
        step(st, dt);
        if (st.t >= next_write - 1e-12) {
            emit(true);
            next_write += c.write_every;
        }
        if (log && c.log_every > 0 && st.nstep % c.log_every == 0) {
            std::ostringstream os;
            os << "step " << st.nstep << " t=" << st.t << " dt=" << st.dt
               << " m_liq=" << st.liquid_mass()
               << " max|v|=" << max_speed(st.f.vr, st.f.vz)
               << " mass_res=" << st.ledgers.mass_residual
               << " energy_res=" << st.ledgers.energy_residual;
            log(os.str());
        }
        if (st.liquid_mass() < 0.01 * st.ledgers.initial_liquid_mass) {
            art.termination = "consumed";
            break;
        }
    }
    if (art.series.empty() || art.series.back().t < st.t - 1e-15) emit(true);

    art.ledgers = st.ledgers;
    art.final_time = st.t;
    art.steps = st.nstep;
    if (writing) {
        nlohmann::json totals = {
            {"initial_liquid_mass", st.ledgers.initial_liquid_mass},
            {"evaporated_mass", st.ledgers.evaporated_mass},
            {"mass_residual", st.ledgers.mass_residual},
            {"energy_residual", st.ledgers.energy_residual},
            {"clipped_mass", st.ledgers.clipped_mass},
            {"termination", art.termination},
            {"steps", art.steps},
            {"final_time", art.final_time}};
        write_summary(out_dir + "/summary.json", c, totals);
    }
    return art;
}

}  // namespace dropsim
