#pragma once

#include <array>
#include <sstream>

#include "dropsim/grid.hpp"

namespace dropsim {

// PLIC interface tracking. Per interface cell the liquid region is the
// half-plane {x : n.x >= c} intersected with the cell, where n = grad(alpha)
// normalized (pointing from gas into liquid). Advection is geometric,
// dimensionally split with the Weymouth-Yue divergence correction, bounded
// for face Courant numbers up to 0.5.

struct Vec2 {
    double r = 0.0, z = 0.0;
};

using Polygon = std::vector<Vec2>;

namespace plic {

// Signed measure of a CCW polygon: area in planar mode, per-radian volume
// (integral of r over the area) in axisymmetric mode.
inline double measure(const Polygon& p, bool planar) {
    double m = 0.0;
    const size_t n = p.size();
    if (n < 3) return 0.0;
    for (size_t k = 0; k < n; ++k) {
        const Vec2& a = p[k];
        const Vec2& b = p[(k + 1) % n];
        if (planar)
            m += 0.5 * (a.r * b.z - b.r * a.z);
        else
            m += (a.r * a.r + a.r * b.r + b.r * b.r) / 6.0 * (b.z - a.z);
    }
    return m;
}

// Keep the part of the polygon with nr*r + nz*z - c >= 0.
inline Polygon clip_halfplane(const Polygon& poly, double nr_, double nz_, double c) {
    Polygon out;
    const size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    auto side = [&](const Vec2& p) { return nr_ * p.r + nz_ * p.z - c; };
    for (size_t k = 0; k < n; ++k) {
        const Vec2& a = poly[k];
        const Vec2& b = poly[(k + 1) % n];
        const double sa = side(a), sb = side(b);
        if (sa >= 0.0) out.push_back(a);
        if ((sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0)) {
            const double t = sa / (sa - sb);
            out.push_back({a.r + t * (b.r - a.r), a.z + t * (b.z - a.z)});
        }
    }
    return out;
}

inline Polygon cell_rect(const Grid& g, int i, int j) {
    return {{g.rface(i), g.zface(j)},
            {g.rface(i + 1), g.zface(j)},
            {g.rface(i + 1), g.zface(j + 1)},
            {g.rface(i), g.zface(j + 1)}};
}

}  // namespace plic

struct InterfaceReconstruction {
    std::vector<int> cells;           // interface cell indices
    Field nr, nz;                     // unit normal per cell (all cells, 0 elsewhere)
    Field plane_c;                    // plane constant per cell
    std::vector<uint8_t> degenerate;  // fallback normal used
};

inline std::vector<int> identify_interface_cells(const Grid& g, const Field& alpha,
                                                 double eps = kAlphaEps) {
    std::vector<int> cells;
    for (int c = 0; c < g.ncells(); ++c)
        if (!g.solid[c] && alpha[c] > eps && alpha[c] < 1.0 - eps) cells.push_back(c);
    return cells;
}

// Youngs normals: alpha averaged to nodes, then differenced back to centers.
inline void youngs_normals(const Grid& g, const Field& alpha, Field& nr_, Field& nz_) {
    const int nr = g.nr, nz = g.nz;
    Field node((nr + 1) * (nz + 1), 0.0);
    auto nid = [&](int i, int j) { return j * (nr + 1) + i; };
    for (int j = 0; j <= nz; ++j)
        for (int i = 0; i <= nr; ++i) {
            double s = 0.0;
            int cnt = 0;
            for (int dj = -1; dj <= 0; ++dj)
                for (int di = -1; di <= 0; ++di) {
                    const int ci = i + di, cj = j + dj;
                    if (ci >= 0 && ci < nr && cj >= 0 && cj < nz) {
                        s += alpha[g.idx(ci, cj)];
                        ++cnt;
                    }
                }
            node[nid(i, j)] = s / cnt;
        }
    nr_.assign(g.ncells(), 0.0);
    nz_.assign(g.ncells(), 0.0);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < nr; ++i) {
            const int c = g.idx(i, j);
            const double sw = node[nid(i, j)], se = node[nid(i + 1, j)];
            const double nw = node[nid(i, j + 1)], ne = node[nid(i + 1, j + 1)];
            nr_[c] = 0.5 * ((se + ne) - (sw + nw)) / g.dr;
            nz_[c] = 0.5 * ((nw + ne) - (sw + se)) / g.dz;
        }
}

// Liquid volume of cell (i,j) cut by the plane n.x >= c.
inline double cut_volume(const Grid& g, int i, int j, double nr_, double nz_, double c) {
    Polygon poly = plic::clip_halfplane(plic::cell_rect(g, i, j), nr_, nz_, c);
    return plic::measure(poly, g.planar);
}

inline InterfaceReconstruction reconstruct(const Grid& g, const Field& alpha,
                                           double eps = kAlphaEps) {
    InterfaceReconstruction rec;
    rec.cells = identify_interface_cells(g, alpha, eps);
    youngs_normals(g, alpha, rec.nr, rec.nz);
    rec.plane_c.assign(g.ncells(), 0.0);
    rec.degenerate.assign(g.ncells(), 0);
    for (int c : rec.cells) {
        const int i = c % g.nr, j = c / g.nr;
        double nr_ = rec.nr[c], nz_ = rec.nz[c];
        double mag = std::hypot(nr_, nz_);
        if (mag < 1e-14) {
            // Degenerate gradient: pick the axis direction of the strongest
            // neighbor alpha contrast.
            double dr_c = 0.0, dz_c = 0.0;
            if (i > 0) dr_c -= alpha[c - 1];
            if (i < g.nr - 1) dr_c += alpha[c + 1];
            if (j > 0) dz_c -= alpha[c - g.nr];
            if (j < g.nz - 1) dz_c += alpha[c + g.nr];
            if (std::abs(dr_c) >= std::abs(dz_c)) {
                nr_ = (dr_c >= 0.0) ? 1.0 : -1.0;
                nz_ = 0.0;
            } else {
                nr_ = 0.0;
                nz_ = (dz_c >= 0.0) ? 1.0 : -1.0;
            }
            mag = 1.0;
            rec.degenerate[c] = 1;
        }
        nr_ /= mag;
        nz_ /= mag;
        rec.nr[c] = nr_;
        rec.nz[c] = nz_;
        // Plane constant by bisection on the cut volume.
        const std::array<Vec2, 4> corners = {{{g.rface(i), g.zface(j)},
                                              {g.rface(i + 1), g.zface(j)},
                                              {g.rface(i + 1), g.zface(j + 1)},
                                              {g.rface(i), g.zface(j + 1)}}};
        double cmin = 1e300, cmax = -1e300;
        for (const auto& p : corners) {
            const double v = nr_ * p.r + nz_ * p.z;
            cmin = std::min(cmin, v);
            cmax = std::max(cmax, v);
        }
        const double vcell = g.vol(i, j);
        const double target = alpha[c] * vcell;
        double lo = cmin, hi = cmax;  // fill(lo) = vcell, fill(hi) = 0
        double best = 0.5 * (lo + hi);
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double v = cut_volume(g, i, j, nr_, nz_, mid);
            best = mid;
            if (std::abs(v - target) < 1e-13 * vcell) break;
            if (v > target)
                lo = mid;
            else
                hi = mid;
            best = 0.5 * (lo + hi);
        }
        rec.plane_c[c] = best;
    }
    return rec;
}

struct AdvectLedger {
    double boundary_liquid_out = 0.0;  // net liquid volume leaving the domain
    double clipped_volume = 0.0;       // net liquid volume removed by clipping to [0,1]
    double wy_correction = 0.0;        // divergence-correction volume (zero if div-free)
};

namespace plic {

// Liquid volume carried through a face by flux Q (volume units, positive in
// the flux direction). The swept region is volume-matched inside the donor.
inline double liquid_flux(const Grid& g, const Field& alpha,
                          const InterfaceReconstruction& rec, int di, int dj, bool radial,
                          bool positive, double vswept, double eps) {
    const int c = g.idx(di, dj);
    const double a = alpha[c];
    if (a <= eps) return 0.0;
    if (a >= 1.0 - eps) return vswept;
    Polygon poly = clip_halfplane(cell_rect(g, di, dj), rec.nr[c], rec.nz[c], rec.plane_c[c]);
    if (radial) {
        if (positive) {
            // region [r1, rface(di+1)]
            const double rf = g.rface(di + 1);
            const double r1 = g.planar ? rf - vswept / g.dz
                                       : std::sqrt(std::max(0.0, rf * rf - 2.0 * vswept / g.dz));
            poly = clip_halfplane(poly, 1.0, 0.0, r1);
        } else {
            const double rf = g.rface(di);
            const double r1 = g.planar ? rf + vswept / g.dz
                                       : std::sqrt(rf * rf + 2.0 * vswept / g.dz);
            poly = clip_halfplane(poly, -1.0, 0.0, -r1);
        }
    } else {
        const double az = g.area_z(di);
        if (positive) {
            const double z1 = g.zface(dj + 1) - vswept / az;
            poly = clip_halfplane(poly, 0.0, 1.0, z1);
        } else {
            const double z1 = g.zface(dj) + vswept / az;
            poly = clip_halfplane(poly, 0.0, -1.0, -z1);
        }
    }
    return std::min(measure(poly, g.planar), vswept);
}

}  // namespace plic

// One geometric advection step. Face fluxes q are volumetric [vol/s]; the
// Courant number |q| dt / V_donor must stay below 0.5. Far boundaries carry
// alpha = 0 (no liquid inflow); outflow takes the donor reconstruction.
// With phase change the fluxes satisfy div q = -S; the divergence correction
// must compensate only the numerical part, so the expected source S (the
// continuity source with div v = -S, units [1/s]) is folded in when given.
// When the liquid density field rho_l is given, volume received from a donor
// cell is rescaled by rho_l(donor)/rho_l(receiver): the parcel takes the
// receiver temperature on arrival, so the transported mass is conserved.
inline void advect(const Grid& g, Field& alpha, const FaceField& q, double dt,
                   AdvectLedger& ledger, double eps = kAlphaEps,
                   const Field* div_source = nullptr, const Field* rho_l = nullptr) {
    // Courant check over faces.
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) {
            const double vs = std::abs(q.r(i, j)) * dt;
            const int di = (q.r(i, j) > 0.0) ? i - 1 : i;
            if (di < 0 || di >= g.nr) continue;
            if (vs > 0.500001 * g.vol(di, j)) {
                std::ostringstream os;
                os << "advect: radial face Courant " << vs / g.vol(di, j) << " at (" << i
                   << "," << j << ") exceeds 0.5; reduce dt";
                throw NumericalError(os.str());
            }
        }
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double vs = std::abs(q.z(i, j)) * dt;
            const int dj = (q.z(i, j) > 0.0) ? j - 1 : j;
            if (dj < 0 || dj >= g.nz) continue;
            if (vs > 0.500001 * g.vol(i, dj)) {
                std::ostringstream os;
                os << "advect: axial face Courant " << vs / g.vol(i, dj) << " at (" << i
                   << "," << j << ") exceeds 0.5; reduce dt";
                throw NumericalError(os.str());
            }
        }

    // Divergence-correction indicator, fixed over both sweeps.
    Field cwy(g.ncells(), 0.0);
    for (int c = 0; c < g.ncells(); ++c) cwy[c] = (alpha[c] >= 0.5) ? 1.0 : 0.0;

    // Incoming volume rescaled to the receiver density; outgoing stays as is.
    auto remap = [&](double lf, int donor, int receiver) {
        if (!rho_l) return lf;
        const double rd = (*rho_l)[donor], rr = (*rho_l)[receiver];
        return (rd > 0.0 && rr > 0.0) ? lf * rd / rr : lf;
    };

    auto clip_cell = [&](int i, int j, double& a) {
        if (a < 0.0) {
            ledger.clipped_volume += a * g.vol(i, j);
            a = 0.0;
        } else if (a > 1.0) {
            ledger.clipped_volume += (a - 1.0) * g.vol(i, j);
            a = 1.0;
        }
    };

    // Radial sweep.
    {
        auto rec = reconstruct(g, alpha, eps);
        Field lflux((g.nr + 1) * g.nz, 0.0);  // signed liquid volume through radial faces
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i <= g.nr; ++i) {
                const double qf = q.r(i, j);
                if (qf == 0.0) continue;
                const bool pos = qf > 0.0;
                const int di = pos ? i - 1 : i;
                if (di < 0 || di >= g.nr) continue;  // boundary inflow: alpha = 0
                const double vs = std::abs(qf) * dt;
                const double lf =
                    plic::liquid_flux(g, alpha, rec, di, j, true, pos, vs, eps);
                lflux[q.ir(i, j)] = pos ? lf : -lf;
            }
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                const int c = g.idx(i, j);
                if (g.solid[c]) continue;
                const double v = g.vol(i, j);
                double fe = lflux[q.ir(i + 1, j)], fw = lflux[q.ir(i, j)];
                if (fe < 0.0) fe = remap(fe, g.idx(i + 1, j), c);
                if (fw > 0.0) fw = remap(fw, g.idx(i - 1, j), c);
                const double net_l = fe - fw;
                double net_q = (q.r(i + 1, j) - q.r(i, j)) * dt;
                if (div_source) net_q += 0.5 * (*div_source)[c] * v * dt;
                double a = alpha[c] + (-net_l + cwy[c] * net_q) / v;
                ledger.wy_correction += cwy[c] * net_q;
                clip_cell(i, j, a);
                alpha[c] = a;
            }
        for (int j = 0; j < g.nz; ++j) {
            ledger.boundary_liquid_out += lflux[q.ir(g.nr, j)] - lflux[q.ir(0, j)];
        }
    }
    // Axial sweep.
    {
        auto rec = reconstruct(g, alpha, eps);
        Field lflux(g.nr * (g.nz + 1), 0.0);
        for (int j = 0; j <= g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                const double qf = q.z(i, j);
                if (qf == 0.0) continue;
                const bool pos = qf > 0.0;
                const int dj = pos ? j - 1 : j;
                if (dj < 0 || dj >= g.nz) continue;
                const double vs = std::abs(qf) * dt;
                const double lf =
                    plic::liquid_flux(g, alpha, rec, i, dj, false, pos, vs, eps);
                lflux[q.iz(i, j)] = pos ? lf : -lf;
            }
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                const int c = g.idx(i, j);
                if (g.solid[c]) continue;
                const double v = g.vol(i, j);
                double fn = lflux[q.iz(i, j + 1)], fs = lflux[q.iz(i, j)];
                if (fn < 0.0) fn = remap(fn, g.idx(i, j + 1), c);
                if (fs > 0.0) fs = remap(fs, g.idx(i, j - 1), c);
                const double net_l = fn - fs;
                double net_q = (q.z(i, j + 1) - q.z(i, j)) * dt;
                if (div_source) net_q += 0.5 * (*div_source)[c] * v * dt;
                // Second sweep closes the divergence correction: over both
                // sweeps the correction sums c * (div(q) + S) * dt, zero when
                // the fluxes carry exactly the expected divergence.
                double a = alpha[c] + (-net_l + cwy[c] * net_q) / v;
                ledger.wy_correction += cwy[c] * net_q;
                clip_cell(i, j, a);
                alpha[c] = a;
            }
        for (int i = 0; i < g.nr; ++i)
            ledger.boundary_liquid_out += lflux[q.iz(i, g.nz)] - lflux[q.iz(i, 0)];
    }
}

struct SourceLedger {
    double evaporated_volume = 0.0;  // liquid volume removed by mdot
    double expansion_volume = 0.0;   // volume change from liquid density variation
    double clipped_volume = 0.0;
};

// Operator-split source step: alpha' = alpha - dt (mdot/rho_L + alpha/rho_L Drho_L/Dt).
inline void apply_sources(const Grid& g, Field& alpha, const Field& mdot,
                          const Field& rho_l, const Field& drho_l_dt, double dt,
                          SourceLedger& ledger) {
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (g.solid[c]) continue;
            const double evap = dt * mdot[c] / rho_l[c];
            const double expand = dt * alpha[c] / rho_l[c] * drho_l_dt[c];
            double a = alpha[c] - evap - expand;
            if (a < -0.01) {
                std::ostringstream os;
                os << "apply_sources: alpha " << a << " at cell (" << i << "," << j
                   << "): mdot redistribution failure";
                throw NumericalError(os.str());
            }
            const double v = g.vol(i, j);
            ledger.evaporated_volume += evap * v;
            ledger.expansion_volume -= expand * v;
            if (a < 0.0) {
                ledger.clipped_volume += -a * v;
                a = 0.0;
            } else if (a > 1.0) {
                ledger.clipped_volume += (a - 1.0) * v;
                a = 1.0;
            }
            alpha[c] = a;
        }
}

inline Field alpha_gradient_magnitude(const Grid& g, const Field& alpha) {
    Field dr, dz;
    gradient(g, alpha, dr, dz);
    Field mag(g.ncells(), 0.0);
    for (int c = 0; c < g.ncells(); ++c) mag[c] = std::hypot(dr[c], dz[c]);
    return mag;
}

inline double liquid_volume(const Grid& g, const Field& alpha) {
    double v = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) v += alpha[g.idx(i, j)] * g.vol(i, j);
    return v;
}

}  // namespace dropsim
