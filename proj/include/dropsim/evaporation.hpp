#pragma once

#include <sstream>

#include "dropsim/vof.hpp"

namespace dropsim {

// Evaporation flux pipeline: species fluxes are evaluated in the gas cells
// adjacent to the interface, sampled through an interface-to-gas pairing
// along the interface normal, turned into a volumetric rate with |grad alpha|
// and finally redistributed over the interface band with the conservative
// K f(alpha) weighting, f = sqrt(alpha (1 - alpha)).

struct InterfacePairing {
    std::vector<int> interface_cell;
    std::vector<int> gas_cell;
    std::vector<uint8_t> far;  // paired beyond the expected band, flagged
};

// For every interface cell walk along -n (gas side) until a cell with
// alpha < eps is found; at most 3 cells away.
inline InterfacePairing pair_interface_cells(const Grid& g, const Field& alpha,
                                             const InterfaceReconstruction& rec,
                                             double eps = kAlphaEps) {
    InterfacePairing pairing;
    const double h = 0.5 * std::min(g.dr, g.dz);
    for (int c : rec.cells) {
        const int i0 = c % g.nr, j0 = c / g.nr;
        const double r0 = g.rc(i0), z0 = g.zc(j0);
        int found = -1;
        int visited = 0;
        int last = c;
        for (int k = 1; k <= 10 && visited < 3; ++k) {
            double r = r0 - k * h * rec.nr[c];
            const double z = z0 - k * h * rec.nz[c];
            if (r < 0.0) r = -r;  // mirror across the axis
            int ci = static_cast<int>(r / g.dr);
            int cj = static_cast<int>(z / g.dz);
            if (ci < 0 || ci >= g.nr || cj < 0 || cj >= g.nz) break;
            const int cc = g.idx(ci, cj);
            if (cc == last) continue;
            last = cc;
            ++visited;
            if (!g.solid[cc] && alpha[cc] < eps) {
                found = cc;
                break;
            }
        }
        if (found < 0) {
            // Fall back to the most gas-like neighbor so the rate stays
            // defined; flag it for the diagnostics counter.
            double amin = 2.0;
            for (const auto& [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
                const int ni = i0 + di, nj = j0 + dj;
                if (ni < 0 || ni >= g.nr || nj < 0 || nj >= g.nz) continue;
                const int nc = g.idx(ni, nj);
                if (!g.solid[nc] && alpha[nc] < amin) {
                    amin = alpha[nc];
                    found = nc;
                }
            }
            if (found < 0) {
                std::ostringstream os;
                os << "pair_interface_cells: unpaired interface cell (" << i0 << "," << j0
                   << ")";
                throw NumericalError(os.str());
            }
            pairing.far.push_back(1);
        } else {
            pairing.far.push_back(0);
        }
        pairing.interface_cell.push_back(c);
        pairing.gas_cell.push_back(found);
    }
    return pairing;
}

// j_d = -rho D (M_i / M_mix) grad(y_i), per cell.
inline void diffusive_flux(const Grid& g, const Field& rho, const Field& diff,
                           const Field& m_ratio, const Field& y_mole, Field& jr,
                           Field& jz) {
    Field dydr, dydz;
    gradient(g, y_mole, dydr, dydz);
    jr.assign(g.ncells(), 0.0);
    jz.assign(g.ncells(), 0.0);
    for (int c = 0; c < g.ncells(); ++c) {
        const double f = -rho[c] * diff[c] * m_ratio[c];
        jr[c] = f * dydr[c];
        jz[c] = f * dydz[c];
    }
}

// j_c = rho omega v, per cell.
inline void convective_flux(const Grid& g, const Field& rho, const Field& omega,
                            const Field& vr, const Field& vz, Field& jr, Field& jz) {
    jr.assign(g.ncells(), 0.0);
    jz.assign(g.ncells(), 0.0);
    for (int c = 0; c < g.ncells(); ++c) {
        jr[c] = rho[c] * omega[c] * vr[c];
        jz[c] = rho[c] * omega[c] * vz[c];
    }
}

// mdot|int = max(0, -(j|adj . n)) |grad alpha|_int. The normal points
// gas->liquid, so an evaporating flux (into the gas) projects negatively on
// n; condensation (positive projection) is clamped to zero.
inline Field raw_rate(const Grid& g, const InterfacePairing& pairing,
                      const InterfaceReconstruction& rec, const Field& jr,
                      const Field& jz, const Field& grad_alpha_mag) {
    Field mdot(g.ncells(), 0.0);
    for (size_t k = 0; k < pairing.interface_cell.size(); ++k) {
        const int c = pairing.interface_cell[k];
        const int a = pairing.gas_cell[k];
        const double proj = -(jr[a] * rec.nr[c] + jz[a] * rec.nz[c]);
        mdot[c] = std::max(0.0, proj) * grad_alpha_mag[c];
    }
    return mdot;
}

inline double redistribution_weight(double alpha) {
    const double v = alpha * (1.0 - alpha);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

struct RedistributeResult {
    Field mdot;
    double k_norm = 1.0;
    double total_rate = 0.0;  // integral of mdot over the domain [kg/s per radian]
};

// mdot_final = K f(alpha) mdot_raw with K chosen so the volume integral is
// preserved exactly.
inline RedistributeResult redistribute(const Grid& g, const Field& mdot_raw,
                                       const Field& alpha) {
    RedistributeResult res;
    res.mdot.assign(g.ncells(), 0.0);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            const double v = g.vol(i, j);
            num += mdot_raw[c] * v;
            den += redistribution_weight(alpha[c]) * mdot_raw[c] * v;
        }
    if (num <= 0.0) return res;  // nothing evaporating
    if (den <= 0.0)
        throw NumericalError("redistribute: f(alpha)-weighted integral vanished with "
                             "nonzero raw rate");
    res.k_norm = num / den;
    res.total_rate = num;
    for (int c = 0; c < g.ncells(); ++c)
        res.mdot[c] = res.k_norm * redistribution_weight(alpha[c]) * mdot_raw[c];
    return res;
}

}  // namespace dropsim
