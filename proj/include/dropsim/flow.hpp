#pragma once

#include "dropsim/linsolve.hpp"
#include "dropsim/vof.hpp"

namespace dropsim {

// One-fluid momentum and pressure-velocity coupling on the collocated grid.
// The hydrostatic head is split off (p_rgh = p - rho g.r), so gravity enters
// as -(g.r) grad(rho) and the centripetal surrogate as f_m = rho alpha
// grad(xi). Both forces are evaluated as face-normal values and enter the
// pressure equation through the face fluxes; the cell velocities are updated
// by reconstructing the face corrections, so a balanced force field produces
// exactly zero velocity.

// xi = xi0 * D_f / (2 d), d = distance from the fiber center, clamped at the
// fiber surface d = D_f/2.
struct PotentialField {
    double xi0 = 0.0;
    double fiber_diam = 0.0;
    double fiber_z = 0.0;
    Field xi;  // per cell

    double value(double r, double z) const {
        if (xi0 <= 0.0) return 0.0;
        const double d = std::max(std::hypot(r, z - fiber_z), 0.5 * fiber_diam);
        return xi0 * fiber_diam / (2.0 * d);
    }
    // Analytic gradient, zero inside the clamp radius.
    void grad(double r, double z, double& gr, double& gz) const {
        gr = gz = 0.0;
        if (xi0 <= 0.0) return;
        const double d = std::hypot(r, z - fiber_z);
        if (d <= 0.5 * fiber_diam) return;
        const double m = -xi0 * fiber_diam / (2.0 * d * d);
        gr = m * r / d;
        gz = m * (z - fiber_z) / d;
    }
};

inline PotentialField build_potential(const Grid& g, double xi0, double fiber_diam,
                                      double fiber_z) {
    if (xi0 < 0.0) throw ConfigError("build_potential: xi0 must be non-negative");
    PotentialField pot;
    pot.xi0 = xi0;
    pot.fiber_diam = fiber_diam;
    pot.fiber_z = fiber_z;
    pot.xi.assign(g.ncells(), 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i)
            pot.xi[g.idx(i, j)] = pot.value(g.rc(i), g.zc(j));
    return pot;
}

// f_m = rho alpha grad(xi) at cell centers (diagnostics; the solver itself
// uses the face-normal projection).
inline void centripetal_force(const Grid& g, const Field& rho, const Field& alpha,
                              const PotentialField& pot, Field& fr, Field& fz) {
    fr.assign(g.ncells(), 0.0);
    fz.assign(g.ncells(), 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            double gr, gz;
            pot.grad(g.rc(i), g.zc(j), gr, gz);
            fr[c] = rho[c] * alpha[c] * gr;
            fz[c] = rho[c] * alpha[c] * gz;
        }
}

enum class VelBc {
    Wall,         // no-slip; tangential components may carry a wall velocity
    Fixed,        // prescribed velocity (forced inlet)
    InletOutlet,  // zero gradient, backflow enters with the prescribed value
    Symmetry,     // axis in axisymmetric mode
};

enum class PBc { FixedValue, ZeroGradient };

struct SideBc {
    VelBc vel = VelBc::Wall;
    double ur = 0.0, uz = 0.0;  // wall/inflow velocity
    PBc p = PBc::ZeroGradient;
    double pval = 0.0;
};

struct FlowBc {
    SideBc west, east, south, north;  // west is the axis in axisymmetric mode
};

struct FlowOptions {
    double central = 0.0;    // deferred-correction blend: 0 upwind, 1 central
    int n_outer = 2;         // outer momentum/pressure iterations per step
    int n_pcorr = 3;         // pressure corrections per outer iteration
    double p_tol_rel = 1e-10;
    double div_tol = 1e-8;   // continuity residual, divergence units [1/s]
    int max_solver_iter = 4000;
};

// Face-normal body force s_f [N/m^3]: -(g.r) d(rho)/dn + (rho alpha)_f
// d(xi)/dn, with the xi derivative analytic at the face center. Interior
// faces only; boundary faces carry zero (walls and open boundaries resolve
// the balance through p_rgh).
inline FaceField body_force_faces(const Grid& g, const Field& rho, const Field& alpha,
                                  const PotentialField& pot, double gravity) {
    FaceField s(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 1; i < g.nr; ++i) {
            const int p = g.idx(i - 1, j), n = g.idx(i, j);
            const double gdotr = -gravity * g.zc(j);
            double gr, gz;
            pot.grad(g.rface(i), g.zc(j), gr, gz);
            const double ra = 0.5 * (rho[p] * alpha[p] + rho[n] * alpha[n]);
            s.r(i, j) = -gdotr * (rho[n] - rho[p]) / g.dr + ra * gr;
        }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int p = g.idx(i, j - 1), n = g.idx(i, j);
            const double gdotr = -gravity * g.zface(j);
            double gr, gz;
            pot.grad(g.rc(i), g.zface(j), gr, gz);
            const double ra = 0.5 * (rho[p] * alpha[p] + rho[n] * alpha[n]);
            s.z(i, j) = -gdotr * (rho[n] - rho[p]) / g.dz + ra * gz;
        }
    return s;
}

struct MomentumResult {
    Field vr, vz;    // H/aP: solved velocity minus rau * reconstructed force
    Field rau;       // V / a_P from the shared matrix diagonal [m^3 s/kg]
    SolveStats stats_r, stats_z;
};

// Cell force density [N/m^3] reconstructed from the face-normal values
// s_f - dp/dn, area-weighted over the available faces. Both the momentum
// predictor and the projection use this same operator, so a face-balanced
// force field (s_f = dp/dn everywhere) yields exactly zero velocity.
inline void reconstruct_force(const Grid& g, const FaceField& s, const Field& p_rgh,
                              Field& fr, Field& fz) {
    fr.assign(g.ncells(), 0.0);
    fz.assign(g.ncells(), 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (g.solid[c]) continue;
            double wsum = 0.0, csum = 0.0;
            if (i > 0 && !g.is_solid(i - 1, j)) {
                const double w = g.area_r(i);
                csum += w * (s.r(i, j) - (p_rgh[c] - p_rgh[g.idx(i - 1, j)]) / g.dr);
                wsum += w;
            }
            if (i < g.nr - 1 && !g.is_solid(i + 1, j)) {
                const double w = g.area_r(i + 1);
                csum += w * (s.r(i + 1, j) - (p_rgh[g.idx(i + 1, j)] - p_rgh[c]) / g.dr);
                wsum += w;
            }
            if (wsum > 0.0) fr[c] = csum / wsum;
            wsum = csum = 0.0;
            if (j > 0 && !g.is_solid(i, j - 1)) {
                const double w = g.area_z(i);
                csum += w * (s.z(i, j) - (p_rgh[c] - p_rgh[g.idx(i, j - 1)]) / g.dz);
                wsum += w;
            }
            if (j < g.nz - 1 && !g.is_solid(i, j + 1)) {
                const double w = g.area_z(i);
                csum += w * (s.z(i, j + 1) - (p_rgh[g.idx(i, j + 1)] - p_rgh[c]) / g.dz);
                wsum += w;
            }
            if (wsum > 0.0) fz[c] = csum / wsum;
        }
}

namespace detail {

// Explicit transpose-viscous term div(mu grad(v)^T). The axisymmetric
// -2 mu v_r / r^2 contribution (theta-theta stress, both halves) is handled
// implicitly in the momentum diagonal instead.
inline void transpose_viscous(const Grid& g, const Field& mu, const Field& vr,
                              const Field& vz, Field& tr, Field& tz) {
    Field dvr_dr, dvr_dz, dvz_dr, dvz_dz;
    gradient(g, vr, dvr_dr, dvr_dz);
    gradient(g, vz, dvz_dr, dvz_dz);
    Field wr(g.ncells()), wz(g.ncells());
    for (int c = 0; c < g.ncells(); ++c) {
        wr[c] = mu[c] * dvr_dr[c];
        wz[c] = mu[c] * dvz_dr[c];
    }
    Field dwr_dr, dwr_dz, dwz_dr, dwz_dz;
    gradient(g, wr, dwr_dr, dwr_dz);
    gradient(g, wz, dwz_dr, dwz_dz);
    tr.assign(g.ncells(), 0.0);
    tz.assign(g.ncells(), 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            const double inv_r = g.planar ? 0.0 : 1.0 / g.rc(i);
            tr[c] = dwr_dr[c] + inv_r * wr[c] + dwz_dz[c];
        }
    for (int c = 0; c < g.ncells(); ++c) {
        wr[c] = mu[c] * dvr_dz[c];
        wz[c] = mu[c] * dvz_dz[c];
    }
    gradient(g, wr, dwr_dr, dwr_dz);
    gradient(g, wz, dwz_dr, dwz_dz);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            const double inv_r = g.planar ? 0.0 : 1.0 / g.rc(i);
            tz[c] = dwr_dr[c] + inv_r * wr[c] + dwz_dz[c];
        }
}

}  // namespace detail

// Implicit momentum predictor: Euler time term, upwind convection with
// optional deferred central correction, implicit viscous diffusion. Pressure
// and body forces are deliberately absent; the projection applies them
// through the face fluxes and the reconstruction, which keeps a balanced
// force field at exactly zero velocity.
inline MomentumResult momentum_predict(const Grid& g, const FlowBc& bc, const Field& vr,
                                       const Field& vz, const Field& rho, const Field& mu,
                                       const FaceField& phi, double dt,
                                       const FlowOptions& opt = {}) {
    const int n = g.ncells();
    StencilMatrix A(g);
    Field b_r(n, 0.0), b_z(n, 0.0);
    Field ap_extra_r(n, 0.0);  // axisymmetric 2 mu / r^2 term, vr only

    Field tr, tz;
    detail::transpose_viscous(g, mu, vr, vz, tr, tz);

    auto mu_face = [&](int c1, int c2) { return 0.5 * (mu[c1] + mu[c2]); };
    auto rho_up = [&](double f, int c1, int c2) { return f > 0.0 ? rho[c1] : rho[c2]; };

    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            const double vol = g.vol(i, j);
            if (g.solid[c]) {
                A.identity_row(c, 0.0);
                continue;
            }
            A.ap[c] = rho[c] * vol / dt;
            b_r[c] = rho[c] * vol / dt * vr[c] + tr[c] * vol;
            b_z[c] = rho[c] * vol / dt * vz[c] + tz[c] * vol;
            if (!g.planar) ap_extra_r[c] = 2.0 * mu[c] * vol / sq(g.rc(i));

            // 4 faces: dir 0 west, 1 east, 2 south, 3 north
            for (int dir = 0; dir < 4; ++dir) {
                const bool radial = dir < 2;
                const bool plus = (dir == 1 || dir == 3);
                const int ni = i + (radial ? (plus ? 1 : -1) : 0);
                const int nj = j + (radial ? 0 : (plus ? 1 : -1));
                const double area = radial ? g.area_r(plus ? i + 1 : i)
                                           : g.area_z(i);
                const double delta = radial ? g.dr : g.dz;
                // flux out of the cell through this face
                const double q = radial ? (plus ? phi.r(i + 1, j) : -phi.r(i, j))
                                        : (plus ? phi.z(i, j + 1) : -phi.z(i, j));
                const bool interior = ni >= 0 && ni < g.nr && nj >= 0 && nj < g.nz &&
                                      !g.is_solid(ni, nj);
                if (interior) {
                    const int cn = g.idx(ni, nj);
                    const double F = rho_up(q, c, cn) * q;  // outgoing mass flux
                    const double D = mu_face(c, cn) * area / delta;
                    double* anb = radial ? (plus ? &A.ae[c] : &A.aw[c])
                                         : (plus ? &A.an[c] : &A.as[c]);
                    A.ap[c] += std::max(F, 0.0) + D;
                    *anb += -std::max(-F, 0.0) - D;
                    if (opt.central > 0.0) {
                        // deferred correction toward central differencing
                        const double up_r = F > 0.0 ? vr[c] : vr[cn];
                        const double up_z = F > 0.0 ? vz[c] : vz[cn];
                        const double ce_r = 0.5 * (vr[c] + vr[cn]);
                        const double ce_z = 0.5 * (vz[c] + vz[cn]);
                        b_r[c] += opt.central * F * (up_r - ce_r);
                        b_z[c] += opt.central * F * (up_z - ce_z);
                    }
                    continue;
                }
                const bool solid_nb = ni >= 0 && ni < g.nr && nj >= 0 && nj < g.nz;
                const SideBc& side = solid_nb ? SideBc{}  // fiber surface: no-slip wall
                                    : radial ? (plus ? bc.east : bc.west)
                                             : (plus ? bc.north : bc.south);
                if (area <= 0.0) continue;  // axis face in axisymmetric mode
                switch (side.vel) {
                    case VelBc::Wall: {
                        const double D = mu[c] * area / (0.5 * delta);
                        A.ap[c] += D;
                        b_r[c] += D * side.ur;
                        b_z[c] += D * side.uz;
                        break;
                    }
                    case VelBc::Fixed: {
                        const double F = rho_up(q, c, c) * q;
                        A.ap[c] += std::max(F, 0.0);
                        b_r[c] += std::max(-F, 0.0) * side.ur;
                        b_z[c] += std::max(-F, 0.0) * side.uz;
                        break;
                    }
                    case VelBc::InletOutlet: {
                        const double F = rho[c] * q;
                        A.ap[c] += std::max(F, 0.0);
                        b_r[c] += std::max(-F, 0.0) * side.ur;
                        b_z[c] += std::max(-F, 0.0) * side.uz;
                        break;
                    }
                    case VelBc::Symmetry:
                        break;  // zero normal flux, zero shear
                }
            }
        }

    MomentumResult res;
    res.rau.assign(n, 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (!g.solid[c]) res.rau[c] = g.vol(i, j) / A.ap[c];
        }

    res.vz = vz;
    A.rhs = b_z;
    try {
        res.stats_z = solve_bicgstab(A, res.vz, 1e-10, 0.0, opt.max_solver_iter);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("momentum_predict (z): ") + e.what());
    }

    // vr carries the extra axisymmetric diagonal
    for (int c = 0; c < n; ++c) A.ap[c] += ap_extra_r[c];
    res.vr = vr;
    A.rhs = b_r;
    try {
        res.stats_r = solve_bicgstab(A, res.vr, 1e-10, 0.0, opt.max_solver_iter);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("momentum_predict (r): ") + e.what());
    }
    return res;
}

// Zero-velocity momentum state with rau = dt/rho, used to establish the
// pressure field against the body forces before the first momentum solve.
inline MomentumResult rest_momentum(const Grid& g, const Field& rho, double dt) {
    MomentumResult res;
    const int n = g.ncells();
    res.vr.assign(n, 0.0);
    res.vz.assign(n, 0.0);
    res.rau.assign(n, 0.0);
    for (int c = 0; c < n; ++c)
        if (!g.solid[c]) res.rau[c] = dt / rho[c];
    return res;
}

struct PressureSolve {
    double continuity_residual = 0.0;  // max |div v + sources| [1/s]
    int corrections = 0;
    SolveStats last_stats;
};

// Projection: assemble flux predictor phi* from the momentum velocities plus
// the face body forces, then solve div(rau grad p_rgh) = div(phi*) + S and
// correct faces and cells. S is the continuity source per cell [1/s]:
//   S = alpha/rho_L Drho_L/Dt + (1-alpha)/rho_G Drho_G/Dt + mdot (1/rho_L - 1/rho_G)
// Continuity is div v = -S.
inline PressureSolve pressure_correct(const Grid& g, const FlowBc& bc, Field& vr, Field& vz,
                                      Field& p_rgh, FaceField& phi,
                                      const MomentumResult& mom, const FaceField& s_faces,
                                      const Field& source, const FlowOptions& opt = {}) {
    const int n = g.ncells();
    PressureSolve ps;

    // Face conductance d_f = interp(V/aP) [m^3 s/kg] and predictor fluxes.
    FaceField dface(g), phistar(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) {
            const double area = g.area_r(i);
            if (area <= 0.0) continue;
            const bool w_in = i > 0 && !g.is_solid(i - 1, j);
            const bool e_in = i < g.nr && !g.is_solid(i, j);
            if (w_in && e_in) {
                const int p = g.idx(i - 1, j), q = g.idx(i, j);
                dface.r(i, j) = 0.5 * (mom.rau[p] + mom.rau[q]);
                phistar.r(i, j) = (0.5 * (mom.vr[p] + mom.vr[q]) +
                                   dface.r(i, j) * (s_faces.r(i, j) -
                                                    (p_rgh[q] - p_rgh[p]) / g.dr)) * area;
            } else if (e_in || w_in) {
                if (i > 0 && i < g.nr) continue;  // fiber surface: zero flux
                const int c = e_in ? g.idx(i, j) : g.idx(i - 1, j);
                const SideBc& side = e_in ? bc.west : bc.east;
                if (side.p == PBc::FixedValue) {
                    // open boundary: pressure gradient toward the fixed
                    // boundary value over the half cell
                    dface.r(i, j) = mom.rau[c];
                    const double dpdn = e_in ? (p_rgh[c] - side.pval) / (0.5 * g.dr)
                                             : (side.pval - p_rgh[c]) / (0.5 * g.dr);
                    phistar.r(i, j) = (mom.vr[c] - dface.r(i, j) * dpdn) * area;
                } else {
                    // closed boundary: flux fixed by the velocity condition
                    const double un = (side.vel == VelBc::Fixed) ? side.ur : 0.0;
                    phistar.r(i, j) = un * area;
                }
            }
        }
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double area = g.area_z(i);
            const bool s_in = j > 0 && !g.is_solid(i, j - 1);
            const bool n_in = j < g.nz && !g.is_solid(i, j);
            if (s_in && n_in) {
                const int p = g.idx(i, j - 1), q = g.idx(i, j);
                dface.z(i, j) = 0.5 * (mom.rau[p] + mom.rau[q]);
                phistar.z(i, j) = (0.5 * (mom.vz[p] + mom.vz[q]) +
                                   dface.z(i, j) * (s_faces.z(i, j) -
                                                    (p_rgh[q] - p_rgh[p]) / g.dz)) * area;
            } else if (n_in || s_in) {
                if (j > 0 && j < g.nz) continue;  // fiber surface: zero flux
                const int c = n_in ? g.idx(i, j) : g.idx(i, j - 1);
                const SideBc& side = n_in ? bc.south : bc.north;
                if (side.p == PBc::FixedValue) {
                    dface.z(i, j) = mom.rau[c];
                    const double dpdn = n_in ? (p_rgh[c] - side.pval) / (0.5 * g.dz)
                                             : (side.pval - p_rgh[c]) / (0.5 * g.dz);
                    phistar.z(i, j) = (mom.vz[c] - dface.z(i, j) * dpdn) * area;
                } else {
                    const double un = (side.vel == VelBc::Fixed) ? side.uz : 0.0;
                    phistar.z(i, j) = un * area;
                }
            }
        }

    // Incremental corrections: phi* already carries the current p_rgh, so
    // each pass solves for a pressure increment with zero boundary increment.
    phi = phistar;
    bool any_dirichlet = false;
    for (int corr = 0; corr < std::max(1, opt.n_pcorr); ++corr) {
        StencilMatrix A(g);
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                const int c = g.idx(i, j);
                if (g.solid[c]) {
                    A.identity_row(c, 0.0);
                    continue;
                }
                double rhs = -(phi.r(i + 1, j) - phi.r(i, j) + phi.z(i, j + 1) -
                               phi.z(i, j)) -
                             source[c] * g.vol(i, j);
                // interior couplings
                if (i > 0 && !g.is_solid(i - 1, j)) {
                    const double cf = dface.r(i, j) * g.area_r(i) / g.dr;
                    A.ap[c] += cf;
                    A.aw[c] -= cf;
                }
                if (i < g.nr - 1 && !g.is_solid(i + 1, j)) {
                    const double cf = dface.r(i + 1, j) * g.area_r(i + 1) / g.dr;
                    A.ap[c] += cf;
                    A.ae[c] -= cf;
                }
                if (j > 0 && !g.is_solid(i, j - 1)) {
                    const double cf = dface.z(i, j) * g.area_z(i) / g.dz;
                    A.ap[c] += cf;
                    A.as[c] -= cf;
                }
                if (j < g.nz - 1 && !g.is_solid(i, j + 1)) {
                    const double cf = dface.z(i, j + 1) * g.area_z(i) / g.dz;
                    A.ap[c] += cf;
                    A.an[c] -= cf;
                }
                // boundary closures (Dirichlet p on open sides)
                auto closure = [&](const SideBc& side, double area, double delta,
                                   double d_f) {
                    if (side.p != PBc::FixedValue || area <= 0.0) return;
                    const double cf = d_f * area / (0.5 * delta);
                    A.ap[c] += cf;
                    any_dirichlet = true;
                };
                if (i == 0) closure(bc.west, g.area_r(0), g.dr, dface.r(0, j));
                if (i == g.nr - 1) closure(bc.east, g.area_r(g.nr), g.dr, dface.r(g.nr, j));
                if (j == 0) closure(bc.south, g.area_z(i), g.dz, dface.z(i, 0));
                if (j == g.nz - 1) closure(bc.north, g.area_z(i), g.dz, dface.z(i, g.nz));
                A.rhs[c] += rhs;
            }
        if (!any_dirichlet) {
            // all-Neumann problem: pin the pressure level at the first fluid cell
            for (int c = 0; c < n; ++c)
                if (!g.solid[c]) {
                    A.identity_row(c, 0.0);
                    break;
                }
        }
        Field dp(n, 0.0);
        SolveStats st;
        try {
            st = solve_bicgstab(A, dp, opt.p_tol_rel, 0.0, opt.max_solver_iter);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("pressure_correct: ") + e.what());
        }
        ps.last_stats = st;
        ps.corrections = corr + 1;
        // correct fluxes with the increment
        for (int j = 0; j < g.nz; ++j)
            for (int i = 1; i < g.nr; ++i) {
                if (g.is_solid(i - 1, j) || g.is_solid(i, j)) continue;
                phi.r(i, j) -= dface.r(i, j) * g.area_r(i) *
                               (dp[g.idx(i, j)] - dp[g.idx(i - 1, j)]) / g.dr;
            }
        for (int j = 1; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                if (g.is_solid(i, j - 1) || g.is_solid(i, j)) continue;
                phi.z(i, j) -= dface.z(i, j) * g.area_z(i) *
                               (dp[g.idx(i, j)] - dp[g.idx(i, j - 1)]) / g.dz;
            }
        auto bclosure = [&](const SideBc& side, int i, int j, bool radial, bool plus) {
            if (side.p != PBc::FixedValue) return;
            const int c = g.idx(i, j);
            if (g.solid[c]) return;
            const double area = radial ? g.area_r(plus ? g.nr : 0) : g.area_z(i);
            if (area <= 0.0) return;
            const double delta = radial ? g.dr : g.dz;
            const double d_f = radial ? dface.r(plus ? g.nr : 0, j)
                                      : dface.z(i, plus ? g.nz : 0);
            // boundary increment is zero; outward flux gains d A dp_c / (delta/2)
            const double corr_flux = d_f * area * dp[c] / (0.5 * delta);
            if (radial) {
                if (plus)
                    phi.r(g.nr, j) += corr_flux;
                else
                    phi.r(0, j) -= corr_flux;
            } else {
                if (plus)
                    phi.z(i, g.nz) += corr_flux;
                else
                    phi.z(i, 0) -= corr_flux;
            }
        };
        for (int j = 0; j < g.nz; ++j) {
            bclosure(bc.west, 0, j, true, false);
            bclosure(bc.east, g.nr - 1, j, true, true);
        }
        for (int i = 0; i < g.nr; ++i) {
            bclosure(bc.south, i, 0, false, false);
            bclosure(bc.north, i, g.nz - 1, false, true);
        }
        for (int c = 0; c < n; ++c) p_rgh[c] += dp[c];
        // continuity residual
        double rmax = 0.0;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                const int c = g.idx(i, j);
                if (g.solid[c]) continue;
                const double d = (phi.r(i + 1, j) - phi.r(i, j) + phi.z(i, j + 1) -
                                  phi.z(i, j)) / g.vol(i, j) +
                                 source[c];
                rmax = std::max(rmax, std::abs(d));
            }
        ps.continuity_residual = rmax;
        if (rmax < opt.div_tol) break;
    }

    // Cell velocities: H/aP plus the reconstruction of the face corrections
    // (body force minus pressure normal gradient) with the updated pressure.
    Field fr, fz;
    reconstruct_force(g, s_faces, p_rgh, fr, fz);
    vr = mom.vr;
    vz = mom.vz;
    for (int c = 0; c < n; ++c) {
        if (g.solid[c]) {
            vr[c] = vz[c] = 0.0;
            continue;
        }
        vr[c] += mom.rau[c] * fr[c];
        vz[c] += mom.rau[c] * fz[c];
    }
    return ps;
}

inline double max_speed(const Field& vr, const Field& vz) {
    double m = 0.0;
    for (size_t c = 0; c < vr.size(); ++c) m = std::max(m, std::hypot(vr[c], vz[c]));
    return m;
}

}  // namespace dropsim
