#pragma once

#include "dropsim/linsolve.hpp"

namespace dropsim {

// Temperature and species transport on the one-fluid grid. Convection is the
// non-conservative upwind form rho*Cp*(v . grad T), assembled from inflow
// faces only, so a uniform field is an exact fixed point even with nonzero
// velocity divergence (Stefan flow) and the discrete max principle holds.
// Diffusion is implicit with arithmetic face coefficients.

enum class ScalarBcKind {
    Fixed,         // prescribed value (forced inlet)
    ZeroGradient,  // walls, axis, fiber surface
    InletOutlet,   // zero gradient on outflow, ambient value on backflow
};

struct ScalarSideBc {
    ScalarBcKind kind = ScalarBcKind::ZeroGradient;
    double value = 0.0;
};

struct ScalarBcSet {
    ScalarSideBc west, east, south, north;
};

struct EnergySources {
    Field evap_sink;        // sum mdot_i dh_ev,i [W/m^3], >= 0
    Field pressure_work;    // beta Dp/Dt [W/m^3]
    Field interdiffusion;   // sum j_d,i Cp,i . grad T [W/m^3]
    bool include_interdiffusion = true;

    explicit EnergySources(int n = 0)
        : evap_sink(n, 0.0), pressure_work(n, 0.0), interdiffusion(n, 0.0) {}
};

struct TransportOptions {
    double tol_rel = 1e-10;
    int max_iter = 4000;
};

namespace detail {

// Shared implicit assembly for rho-weighted scalar transport:
//   coef (phi' - phi)/dt + coef v.grad(phi) = div(gamma grad phi) + q
// coef is rho*Cp for energy, rho for species; gamma is k or rho*D.
inline SolveStats scalar_solve(const Grid& g, const ScalarBcSet& bc, Field& f,
                               const FaceField& phi, const Field& coef,
                               const Field& gamma, const Field& q, double dt,
                               const TransportOptions& opt) {
    StencilMatrix A(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (g.solid[c]) {
                A.identity_row(c, f[c]);
                continue;
            }
            const double vol = g.vol(i, j);
            A.ap[c] = coef[c] * vol / dt;
            A.rhs[c] = coef[c] * vol / dt * f[c] + q[c] * vol;
            for (int dir = 0; dir < 4; ++dir) {
                const bool radial = dir < 2;
                const bool plus = (dir == 1 || dir == 3);
                const int ni = i + (radial ? (plus ? 1 : -1) : 0);
                const int nj = j + (radial ? 0 : (plus ? 1 : -1));
                const double area = radial ? g.area_r(plus ? i + 1 : i) : g.area_z(i);
                if (area <= 0.0) continue;
                const double delta = radial ? g.dr : g.dz;
                // flux out of the cell through this face
                const double qf = radial ? (plus ? phi.r(i + 1, j) : -phi.r(i, j))
                                         : (plus ? phi.z(i, j + 1) : -phi.z(i, j));
                const bool in_range = ni >= 0 && ni < g.nr && nj >= 0 && nj < g.nz;
                if (in_range && !g.is_solid(ni, nj)) {
                    const int cn = g.idx(ni, nj);
                    const double inflow = std::max(-qf, 0.0);
                    const double D = 0.5 * (gamma[c] + gamma[cn]) * area / delta;
                    double* anb = radial ? (plus ? &A.ae[c] : &A.aw[c])
                                         : (plus ? &A.an[c] : &A.as[c]);
                    A.ap[c] += coef[c] * inflow + D;
                    *anb += -coef[c] * inflow - D;
                    continue;
                }
                if (in_range) continue;  // fiber surface: adiabatic, no flux
                const ScalarSideBc& side = radial ? (plus ? bc.east : bc.west)
                                                  : (plus ? bc.north : bc.south);
                switch (side.kind) {
                    case ScalarBcKind::Fixed: {
                        const double D = gamma[c] * area / (0.5 * delta);
                        const double inflow = std::max(-qf, 0.0);
                        A.ap[c] += D + coef[c] * inflow;
                        A.rhs[c] += (D + coef[c] * inflow) * side.value;
                        break;
                    }
                    case ScalarBcKind::InletOutlet: {
                        const double inflow = std::max(-qf, 0.0);
                        A.ap[c] += coef[c] * inflow;
                        A.rhs[c] += coef[c] * inflow * side.value;
                        break;
                    }
                    case ScalarBcKind::ZeroGradient:
                        break;
                }
            }
        }
    try {
        return solve_bicgstab(A, f, opt.tol_rel, 0.0, opt.max_iter);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("scalar_solve: ") + e.what());
    }
}

}  // namespace detail

// Energy step. Sources enter explicitly; the evaporative sink cools,
// pressure work heats on compression, the inter-diffusion term is switchable.
inline SolveStats solve_energy(const Grid& g, const ScalarBcSet& bc, Field& T,
                               const FaceField& phi, const Field& rho_cp, const Field& k,
                               const EnergySources& src, double dt,
                               const TransportOptions& opt = {}) {
    Field q(g.ncells(), 0.0);
    for (int c = 0; c < g.ncells(); ++c) {
        q[c] = src.pressure_work[c] - src.evap_sink[c];
        if (src.include_interdiffusion) q[c] -= src.interdiffusion[c];
    }
    return detail::scalar_solve(g, bc, T, phi, rho_cp, k, q, dt, opt);
}

struct SpeciesSolveResult {
    SolveStats stats;
    double max_bound_violation = 0.0;  // worst excursion outside [0, 1] before clipping
    bool bounded = true;               // false when the excursion exceeds 1e-6
};

// Species step: upwind convection, implicit diffusion with rho*D.
// The solution is clipped to [0, 1]; excursions beyond 1e-6 set the flag.
inline SpeciesSolveResult solve_species(const Grid& g, const ScalarBcSet& bc, Field& omega,
                                        const FaceField& phi, const Field& rho,
                                        const Field& rho_d, double dt,
                                        const TransportOptions& opt = {}) {
    SpeciesSolveResult res;
    Field q(g.ncells(), 0.0);
    res.stats = detail::scalar_solve(g, bc, omega, phi, rho, rho_d, q, dt, opt);
    for (int c = 0; c < g.ncells(); ++c) {
        if (omega[c] < 0.0) {
            res.max_bound_violation = std::max(res.max_bound_violation, -omega[c]);
            omega[c] = 0.0;
        } else if (omega[c] > 1.0) {
            res.max_bound_violation = std::max(res.max_bound_violation, omega[c] - 1.0);
            omega[c] = 1.0;
        }
    }
    res.bounded = res.max_bound_violation <= 1e-6;
    return res;
}

// Carrier species takes the deficit so the mass fractions sum to one.
inline void restore_carrier(const Grid& g, std::vector<Field*>& omega, size_t carrier) {
    for (int c = 0; c < g.ncells(); ++c) {
        double rest = 0.0;
        for (size_t s = 0; s < omega.size(); ++s)
            if (s != carrier) rest += (*omega[s])[c];
        (*omega[carrier])[c] = clamp01(1.0 - rest);
    }
}

// Saturation composition assignment: cells with alpha > 1-eps take the
// equilibrium composition outright, interface cells blend by alpha, gas cells
// are untouched. The carrier is restored afterwards.
inline void impose_saturation(const Grid& g, const Field& alpha,
                              std::vector<Field*>& omega,
                              const std::vector<const Field*>& omega_sat, size_t carrier,
                              double eps = kAlphaEps) {
    for (int c = 0; c < g.ncells(); ++c) {
        if (g.solid[c] || alpha[c] <= eps) continue;
        const double w = (alpha[c] > 1.0 - eps) ? 1.0 : alpha[c];
        for (size_t s = 0; s < omega.size(); ++s) {
            if (s == carrier) continue;
            double& om = (*omega[s])[c];
            om = w * (*omega_sat[s])[c] + (1.0 - w) * om;
        }
    }
    restore_carrier(g, omega, carrier);
}

}  // namespace dropsim
