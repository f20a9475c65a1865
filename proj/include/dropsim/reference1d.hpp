#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dropsim/config.hpp"
#include "dropsim/output.hpp"
#include "dropsim/properties.hpp"
#include "dropsim/thermo.hpp"

namespace dropsim {

// Spherically symmetric reference solver: Lagrangian equal-mass liquid shells
// (transient conduction, radii recovered from shell mass and rho_l(T)), a
// stretched gas mesh from the moving surface R(t) out to a fixed far-field
// radius, Stefan outflow from quasi-steady continuity, and the surface
// temperature from the interfacial energy balance with VLE composition. The
// surface balance is iterated against the implicit liquid and gas solves so
// the energy ledger closes on the post-solve temperatures.

struct Reference1dOptions {
    int n_liquid = 50;
    int n_gas = 160;
    double far_factor = 25.0;   // far-field radius in units of R0
    double stretch = 1.03;      // geometric gas cell growth toward the far field
    double dt_init = 1e-6;      // first step, grown geometrically to dt_max
    double dt_growth = 1.05;
    double fixed_ts = 0.0;      // >0: hold the surface temperature (d2-law mode)
    bool constant_properties = false;  // freeze gas rho, D and rho_l (d2-law mode)
};

struct Reference1dResult {
    std::vector<TimeSeriesRow> series;
    double initial_mass = 0.0;
    double evaporated_mass = 0.0;
    double mass_residual = 0.0;
    double energy_residual = 0.0;
    double y_surface = 0.0;     // fuel mole fraction at the surface, final step
    double final_time = 0.0;
    long steps = 0;
    std::string termination;    // "t_end" or "consumed"
};

namespace detail {

// Thomas algorithm on the leading n entries; solution into x.
inline void tridiag(int n, const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& c, const std::vector<double>& d,
                    std::vector<double>& x) {
    std::vector<double> cp(n), dp(n);
    double beta = b[0];
    if (beta == 0.0) throw NumericalError("tridiag: zero pivot");
    cp[0] = c[0] / beta;
    dp[0] = d[0] / beta;
    for (int i = 1; i < n; ++i) {
        beta = b[i] - a[i] * cp[i - 1];
        if (beta == 0.0) throw NumericalError("tridiag: zero pivot");
        cp[i] = c[i] / beta;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
    }
    x.resize(std::max<size_t>(x.size(), n));
    x[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
}

}  // namespace detail

inline Reference1dResult solve_1d(const CaseConfig& c, const SpeciesDatabase& db,
                                  const Reference1dOptions& opt = {}) {
    if (opt.n_liquid < 4 || opt.n_gas < 8)
        throw ConfigError("solve_1d: too few shells");
    if (opt.far_factor < 4.0)
        throw ConfigError("solve_1d: far_factor must be at least 4");

    const std::vector<const SpeciesData*> sp = {&db.get(c.fuel), &db.get(c.carrier)};
    const SpeciesData& fuel = *sp[0];
    const SpeciesData& carrier = *sp[1];
    const double p = c.p;
    const bool ideal = c.ideal_thermo;
    const double fourpi = 4.0 * std::numbers::pi;
    const bool fixed_surface = opt.fixed_ts > 0.0;

    const double r0 = 0.5 * c.d0;
    const double r_far = opt.far_factor * r0;
    const double t_liq0 = fixed_surface ? opt.fixed_ts : c.t_liquid;

    // frozen properties for the d2-law idealization
    double rho_const = 0.0, diff_const = 0.0, rho_l_const = 0.0;
    if (opt.constant_properties) {
        const double t_film = 0.5 * (t_liq0 + c.t_gas);
        const std::vector<double> y_amb = {0.0, 1.0};
        rho_const = gas_density(t_film, p, sp, y_amb, ideal);
        diff_const = binary_diffusion(fuel, carrier, t_film, p);
        rho_l_const = liquid_density(fuel, t_liq0);
    }
    auto rho_liquid = [&](double T) {
        return opt.constant_properties ? rho_l_const : liquid_density(fuel, T);
    };

    // liquid: equal-mass shells
    int nl = opt.n_liquid;
    const double m0 = fourpi / 3.0 * r0 * r0 * r0 * rho_liquid(t_liq0);
    const double m_shell0 = m0 / nl;
    std::vector<double> ml(nl, m_shell0), tl(nl, t_liq0);

    // gas: geometric face distribution, fixed in the normalized coordinate
    const int ng = opt.n_gas;
    std::vector<double> sg(ng + 1);
    {
        double sum = 0.0, w = 1.0;
        std::vector<double> width(ng);
        for (int j = 0; j < ng; ++j) {
            width[j] = w;
            sum += w;
            w *= opt.stretch;
        }
        sg[0] = 0.0;
        for (int j = 0; j < ng; ++j) sg[j + 1] = sg[j] + width[j] / sum;
        sg[ng] = 1.0;
    }
    std::vector<double> tg(ng, c.t_gas), wg(ng, 0.0);

    // liquid face radii from cumulative shell volume; returns R
    std::vector<double> rfl(nl + 1), rcl(nl);
    auto liquid_geometry = [&]() {
        double v = 0.0;
        rfl[0] = 0.0;
        for (int i = 0; i < nl; ++i) {
            v += ml[i] / rho_liquid(tl[i]);
            rfl[i + 1] = std::cbrt(3.0 * v / fourpi);
            rcl[i] = 0.5 * (rfl[i] + rfl[i + 1]);
        }
        return rfl[nl];
    };
    double r_s = liquid_geometry();

    std::vector<double> rfg(ng + 1), rcg(ng), vg(ng);
    auto gas_geometry = [&]() {
        for (int j = 0; j <= ng; ++j) rfg[j] = r_s + (r_far - r_s) * sg[j];
        for (int j = 0; j < ng; ++j) {
            rcg[j] = 0.5 * (rfg[j] + rfg[j + 1]);
            vg[j] = fourpi / 3.0 *
                    (rfg[j + 1] * rfg[j + 1] * rfg[j + 1] - rfg[j] * rfg[j] * rfg[j]);
        }
    };

    std::vector<double> rho_g(ng), diff_g(ng), k_g(ng), cp_g(ng);
    std::vector<double> yv(2), wv(2);
    auto gas_properties = [&]() {
        for (int j = 0; j < ng; ++j) {
            wv[0] = wg[j];
            wv[1] = 1.0 - wg[j];
            mass_to_mole(sp, wv, yv);
            if (opt.constant_properties) {
                rho_g[j] = rho_const;
                diff_g[j] = diff_const;
            } else {
                rho_g[j] = gas_density(tg[j], p, sp, yv, ideal);
                diff_g[j] = binary_diffusion(fuel, carrier, tg[j], p);
            }
            double mu;
            gas_transport_mixture(sp, yv, tg[j], mu, k_g[j]);
            cp_g[j] = gas_cp_mixture(sp, wv, tg[j]);
        }
    };

    double t_s = tl[nl - 1];
    double mdd = 0.0;  // evaporation flux [kg/(m^2 s)]
    double y_s = 0.0, omega_s = 0.0, rho_srf = 0.0;
    double rdot = 0.0;
    double mass = m0;

    VleOptions vle;
    vle.ideal = ideal;

    // surface state at a trial temperature: VLE composition and the Stefan
    // closure for the evaporation flux (carrier flux vanishes at the surface)
    auto surface_state = [&](double ts) {
        const auto eq = equilibrium_mole_fraction(ts, p, sp, {1.0, 0.0}, 1, vle);
        mole_to_mass(sp, eq.y, wv);
        omega_s = wv[0];
        y_s = eq.y[0];
        rho_srf = opt.constant_properties ? rho_const : gas_density(ts, p, sp, eq.y, ideal);
        if (omega_s >= 1.0) {
            mdd = 1e30;  // at or above the boiling point
            return;
        }
        const double rd =
            opt.constant_properties
                ? rho_const * diff_const
                : rho_srf * binary_diffusion(fuel, carrier, ts, p);
        mdd = std::max(0.0, rd * (omega_s - wg[0]) / (rcg[0] - r_s) / (1.0 - omega_s));
    };
    std::vector<double> cpl(opt.n_liquid), kl_c(opt.n_liquid);

    Reference1dResult res;
    res.initial_mass = m0;
    res.termination = "t_end";
    double e_change = 0.0, e_boundary = 0.0, e_sink = 0.0;

    auto record = [&](double t_now) {
        TimeSeriesRow row;
        row.t = t_now;
        row.d_eq = 2.0 * r_s;
        row.dd0_sq = (2.0 * r_s / c.d0) * (2.0 * r_s / c.d0);
        row.t_surface_mean = t_s;
        double e = 0.0;
        for (int i = 0; i < nl; ++i) e += ml[i] * tl[i];
        row.t_liquid_mean = mass > 0.0 ? e / mass : t_s;
        row.vaporization_velocity = rho_srf > 0.0 ? mdd / rho_srf : 0.0;
        row.liquid_mass = mass;
        row.mass_ledger_residual = res.mass_residual;
        row.energy_ledger_residual = res.energy_residual;
        row.psi = 1.0;
        row.max_speed = row.vaporization_velocity;
        res.series.push_back(row);
    };

    double t_now = 0.0, dt = opt.dt_init / opt.dt_growth, next_write = c.write_every;
    gas_geometry();
    gas_properties();
    if (fixed_surface) {
        t_s = opt.fixed_ts;
        surface_state(t_s);
    }
    record(0.0);

    std::vector<double> ta(std::max(nl, ng)), tb(ta), tc(ta), td(ta), tx(ta);
    std::vector<double> fm(ng + 1);

    // implicit radial scalar step on the gas: upwind advection against the
    // relative face mass flow fm (scaled by cap), implicit diffusion
    auto gas_scalar = [&](std::vector<double>& field, double bc_in, double bc_out,
                          const std::vector<double>& inertia_c,
                          const std::vector<double>& diff_c, double cap_scale,
                          const std::vector<double>& cap) {
        for (int j = 0; j < ng; ++j) {
            const double inertia = inertia_c[j] * vg[j] / dt;
            double aw = 0.0, ae = 0.0, bfix = 0.0, rhs = inertia * field[j];
            {
                const double df =
                    j == 0 ? diff_c[0] : 0.5 * (diff_c[j - 1] + diff_c[j]);
                const double dd = j == 0 ? rcg[0] - r_s : rcg[j] - rcg[j - 1];
                const double cond = df * fourpi * rfg[j] * rfg[j] / dd;
                const double capf =
                    cap_scale * (j == 0 ? cap[0] : 0.5 * (cap[j - 1] + cap[j]));
                const double adv_in = std::max(fm[j] * capf, 0.0);
                if (j == 0) {
                    bfix += cond + adv_in;
                    rhs += (cond + adv_in) * bc_in;
                } else {
                    aw = cond + adv_in;
                }
            }
            {
                const double df =
                    j == ng - 1 ? diff_c[ng - 1] : 0.5 * (diff_c[j] + diff_c[j + 1]);
                const double dd =
                    j == ng - 1 ? rfg[ng] - rcg[ng - 1] : rcg[j + 1] - rcg[j];
                // the outer face carries the analytic quasi-steady 1/r tail
                // beyond the truncated domain as a series resistance
                const double cond =
                    j == ng - 1
                        ? fourpi * df /
                              (dd / (rfg[ng] * rfg[ng]) + 1.0 / rfg[ng])
                        : df * fourpi * rfg[j + 1] * rfg[j + 1] / dd;
                const double capf =
                    cap_scale *
                    (j == ng - 1 ? cap[ng - 1] : 0.5 * (cap[j] + cap[j + 1]));
                const double adv_in = std::max(-fm[j + 1] * capf, 0.0);
                if (j == ng - 1) {
                    bfix += cond + adv_in;
                    rhs += (cond + adv_in) * bc_out;
                } else {
                    ae = cond + adv_in;
                }
            }
            ta[j] = -aw;
            tc[j] = -ae;
            tb[j] = inertia + aw + ae + bfix;
            td[j] = rhs;
        }
        detail::tridiag(ng, ta, tb, tc, td, tx);
        for (int j = 0; j < ng; ++j) field[j] = tx[j];
    };

    std::vector<double> unit(ng, 1.0), rho_d(ng), rho_cp(ng);
    std::vector<double> tl0, tg0, wg0;

    while (t_now < c.t_end && res.termination == "t_end") {
        dt = std::min({dt * opt.dt_growth, c.dt_max, c.t_end - t_now});
        const double r_old = r_s;
        gas_geometry();
        gas_properties();
        for (int j = 0; j < ng; ++j) {
            rho_d[j] = rho_g[j] * diff_g[j];
            rho_cp[j] = rho_g[j] * cp_g[j];
        }
        for (int i = 0; i < nl; ++i) {
            cpl[i] = liquid_property(fuel, tl[i], LiquidProperty::Cp);
            kl_c[i] = liquid_property(fuel, tl[i], LiquidProperty::Conductivity);
        }
        tl0 = tl;
        tg0 = tg;
        wg0 = wg;

        // composite surface residual: run the implicit liquid and gas solves
        // with a trial surface temperature, then evaluate the interfacial
        // energy balance on the post-solve fields. The solves carry the full
        // implicit response of the quasi-steady near-surface cells, so a
        // secant on this residual converges where a cell-by-cell Picard
        // iteration stalls.
        auto eval_residual = [&](double ts) {
            surface_state(ts);  // omega_s, y_s, rho_srf; mdd from lagged wg[0]

            if (!fixed_surface) {
                for (int i = 0; i < nl; ++i) {
                    const double inertia = ml[i] * cpl[i] / dt;
                    double aw = 0.0, ae = 0.0, bs = 0.0, rhs = inertia * tl0[i];
                    if (i > 0)
                        aw = 0.5 * (kl_c[i - 1] + kl_c[i]) * fourpi * rfl[i] * rfl[i] /
                             (rcl[i] - rcl[i - 1]);
                    if (i < nl - 1)
                        ae = 0.5 * (kl_c[i] + kl_c[i + 1]) * fourpi * rfl[i + 1] *
                             rfl[i + 1] / (rcl[i + 1] - rcl[i]);
                    if (i == nl - 1) {
                        bs = kl_c[i] * fourpi * r_s * r_s / (r_s - rcl[i]);
                        rhs += bs * ts;
                    }
                    ta[i] = -aw;
                    tc[i] = -ae;
                    tb[i] = inertia + aw + ae + bs;
                    td[i] = rhs;
                }
                detail::tridiag(nl, ta, tb, tc, td, tx);
                for (int i = 0; i < nl; ++i) tl[i] = tx[i];
            }

            // relative face mass flow: quasi-steady Stefan outflow against the
            // mesh faces that track the receding surface
            auto build_fm = [&]() {
                const double flow_c = rho_srf * rdot * r_s * r_s + mdd * r_s * r_s;
                for (int j = 0; j <= ng; ++j) {
                    const double w_face = (1.0 - sg[j]) * rdot;
                    const double rho_f = j == 0    ? rho_srf
                                         : j == ng ? rho_g[ng - 1]
                                                   : 0.5 * (rho_g[j - 1] + rho_g[j]);
                    fm[j] = fourpi * (flow_c - rho_f * w_face * rfg[j] * rfg[j]);
                }
            };
            // inner fixed point: the Stefan flow and the species solution must
            // agree on the evaporation flux before the residual is meaningful
            const double rd = opt.constant_properties
                                  ? rho_const * diff_const
                                  : rho_srf * binary_diffusion(fuel, carrier, ts, p);
            if (omega_s < 1.0) {
                for (int it = 0; it < 30; ++it) {
                    build_fm();
                    wg = wg0;
                    gas_scalar(wg, omega_s, 0.0, rho_g, rho_d, 1.0, unit);
                    for (int j = 0; j < ng; ++j) wg[j] = std::clamp(wg[j], 0.0, 1.0);
                    const double mdd_new = std::max(
                        0.0, rd * (omega_s - wg[0]) / (rcg[0] - r_s) / (1.0 - omega_s));
                    if (std::abs(mdd_new - mdd) < 1e-8 * std::max(mdd_new, 1e-12)) {
                        mdd = mdd_new;
                        break;
                    }
                    mdd = 0.5 * (mdd + mdd_new);
                }
            }
            build_fm();
            tg = tg0;
            gas_scalar(tg, ts, c.t_gas, rho_cp, k_g, 1.0, cp_g);

            return kl_c[nl - 1] * (tl[nl - 1] - ts) / (r_s - rcl[nl - 1]) +
                   k_g[0] * (tg[0] - ts) / (rcg[0] - r_s) -
                   mdd * heat_of_vaporization(fuel, ts);
        };

        if (fixed_surface) {
            t_s = opt.fixed_ts;
            // fixed-point passes for the Stefan-flow / flux consistency
            for (int it = 0; it < 5; ++it) eval_residual(t_s);
        } else {
            const double lo = 200.0, hi = std::max({tl[nl - 1], tg[0], c.t_gas}) + 1.0;
            double a = std::clamp(t_s, lo + 1.0, hi - 1e-3);
            double fa = eval_residual(a);
            double b = a + (fa > 0.0 ? 0.05 : -0.05);
            double fb = eval_residual(b);
            bool ok = false;
            for (int it = 0; it < 40; ++it) {
                if (std::abs(b - a) < 1e-8) {
                    ok = true;
                    break;
                }
                if (fb == fa) break;
                double x = b - fb * (b - a) / (fb - fa);
                if (!(x > lo && x < hi)) break;
                a = b;
                fa = fb;
                b = x;
                fb = eval_residual(b);
            }
            if (ok) {
                t_s = b;
            } else {
                double blo = lo, bhi = hi;
                if (!(eval_residual(blo) > 0.0))
                    throw NumericalError("solve_1d: surface balance has no root");
                for (int it = 0; it < 60 && bhi - blo > 1e-8; ++it) {
                    const double mid = 0.5 * (blo + bhi);
                    (eval_residual(mid) > 0.0 ? blo : bhi) = mid;
                }
                t_s = 0.5 * (blo + bhi);
                eval_residual(t_s);
            }
        }
        for (int j = 0; j < ng; ++j)
            if (!std::isfinite(tg[j]) || tg[j] <= 0.0)
                throw NumericalError("solve_1d: gas temperature diverged");

        const double area_s = fourpi * r_s * r_s;
        if (!fixed_surface) {
            for (int i = 0; i < nl; ++i) e_change += ml[i] * cpl[i] * (tl[i] - tl0[i]);
            e_boundary += k_g[0] * area_s * (tg[0] - t_s) / (rcg[0] - r_s) * dt;
            e_sink += mdd * area_s * heat_of_vaporization(fuel, t_s) * dt;
        }

        // surface recession
        const double dm = std::min(mdd * area_s * dt, mass);
        mass -= dm;
        res.evaporated_mass += dm;
        ml[nl - 1] -= dm;
        if (ml[nl - 1] < 0.0 && nl > 1) {
            ml[nl - 2] += ml[nl - 1];
            ml[nl - 1] = 0.0;
        }
        if (nl > 1 && ml[nl - 1] < 0.05 * m_shell0) {
            const double mo = ml[nl - 1], mi = ml[nl - 2];
            tl[nl - 2] = (mi * tl[nl - 2] + mo * tl[nl - 1]) / (mi + mo);
            ml[nl - 2] = mi + mo;
            ml.pop_back();
            tl.pop_back();
            --nl;
        }
        if (mass < 0.01 * m0) res.termination = "consumed";

        r_s = liquid_geometry();
        rdot = (r_s - r_old) / dt;

        res.mass_residual = std::abs(mass - m0 + res.evaporated_mass) / m0;
        const double scale = std::max({std::abs(e_sink), std::abs(e_change), 1e-12});
        res.energy_residual = std::abs(e_change - e_boundary + e_sink) / scale;

        t_now += dt;
        ++res.steps;
        if (t_now >= next_write - 1e-15 || res.termination != "t_end") {
            record(t_now);
            while (next_write <= t_now + 1e-15) next_write += c.write_every;
        }
        if (res.steps > 5'000'000)
            throw NumericalError("solve_1d: step limit exceeded");
    }

    if (res.series.back().t < t_now) record(t_now);
    res.y_surface = y_s;
    res.final_time = t_now;
    return res;
}

}  // namespace dropsim
