#pragma once

#include <sstream>

#include "dropsim/properties.hpp"

namespace dropsim {

// Peng-Robinson equation of state (1976 form, zero binary interaction
// parameters unless overridden). Gas branch only: the largest real root of the
// cubic is always selected; the liquid side of the equilibrium enters through
// the vapor-pressure correlation, the pure fugacity coefficient at p0 and the
// Poynting correction.
namespace pr {

struct Mixture {
    double a = 0.0, b = 0.0;          // mixture parameters
    std::vector<double> ai, bi;       // per-species
    std::vector<double> a_cross_sum;  // sum_j y_j a_ij per species
};

inline double kappa(double acentric) {
    return 0.37464 + 1.54226 * acentric - 0.26992 * sq(acentric);
}

inline double a_pure(const SpeciesData& s, double T) {
    const double tr = T / s.t_crit;
    const double alpha = sq(1.0 + kappa(s.acentric) * (1.0 - std::sqrt(tr)));
    return 0.45724 * sq(kGasConstant * s.t_crit) / s.p_crit * alpha;
}

inline double b_pure(const SpeciesData& s) {
    return 0.07780 * kGasConstant * s.t_crit / s.p_crit;
}

inline Mixture mix(const std::vector<const SpeciesData*>& sp, const std::vector<double>& y,
                   double T, double kij = 0.0) {
    const size_t n = sp.size();
    Mixture m;
    m.ai.resize(n);
    m.bi.resize(n);
    m.a_cross_sum.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        m.ai[i] = a_pure(*sp[i], T);
        m.bi[i] = b_pure(*sp[i]);
        m.b += y[i] * m.bi[i];
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            const double aij = std::sqrt(m.ai[i] * m.ai[j]) * (1.0 - kij);
            m.a += y[i] * y[j] * aij;
            m.a_cross_sum[i] += y[j] * aij;
        }
    return m;
}

// Largest real root of Z^3 + c2 Z^2 + c1 Z + c0, polished by Newton.
inline double cubic_max_root(double c2, double c1, double c0) {
    const double p = c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    const double disc = sq(q / 2.0) + p * p * p / 27.0;
    double z;
    if (disc > 0.0) {
        const double sd = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sd);
        const double v = std::cbrt(-q / 2.0 - sd);
        z = u + v - c2 / 3.0;
    } else {
        const double rr = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::clamp(-q / (2.0 * rr), -1.0, 1.0));
        const double mag = 2.0 * std::sqrt(-p / 3.0);
        double zmax = -1e300;
        for (int k = 0; k < 3; ++k)
            zmax = std::max(zmax, mag * std::cos((phi + 2.0 * M_PI * k) / 3.0) - c2 / 3.0);
        z = zmax;
    }
    for (int it = 0; it < 5; ++it) {
        const double f = ((z + c2) * z + c1) * z + c0;
        const double df = (3.0 * z + 2.0 * c2) * z + c1;
        if (df == 0.0) break;
        const double dz = f / df;
        z -= dz;
        if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

}  // namespace pr

// Compressibility factor, gas branch.
inline double pr_compressibility(double T, double p,
                                 const std::vector<const SpeciesData*>& sp,
                                 const std::vector<double>& y, double kij = 0.0) {
    const auto m = pr::mix(sp, y, T, kij);
    const double A = m.a * p / sq(kGasConstant * T);
    const double B = m.b * p / (kGasConstant * T);
    const double z = pr::cubic_max_root(-(1.0 - B), A - 3.0 * B * B - 2.0 * B,
                                        -(A * B - B * B - B * B * B));
    if (!(z > B)) {
        std::ostringstream os;
        os << "pr_compressibility: no gas root above covolume (T=" << T << " K, p=" << p
           << " Pa, Z=" << z << ", B=" << B << ")";
        throw NumericalError(os.str());
    }
    return z;
}

// Mixture fugacity coefficients, gas branch.
inline std::vector<double> pr_fugacity_mixture(double T, double p,
                                               const std::vector<const SpeciesData*>& sp,
                                               const std::vector<double>& y,
                                               double kij = 0.0) {
    const auto m = pr::mix(sp, y, T, kij);
    const double A = m.a * p / sq(kGasConstant * T);
    const double B = m.b * p / (kGasConstant * T);
    const double z = pr::cubic_max_root(-(1.0 - B), A - 3.0 * B * B - 2.0 * B,
                                        -(A * B - B * B - B * B * B));
    if (!(z > B)) throw NumericalError("pr_fugacity_mixture: no gas root above covolume");
    const double sqrt2 = std::sqrt(2.0);
    const double lg = std::log((z + (1.0 + sqrt2) * B) / (z + (1.0 - sqrt2) * B));
    std::vector<double> phi(sp.size());
    for (size_t i = 0; i < sp.size(); ++i) {
        const double bi_b = m.bi[i] / m.b;
        const double ln_phi = bi_b * (z - 1.0) - std::log(z - B) -
                              A / (2.0 * sqrt2 * B) *
                                  (2.0 * m.a_cross_sum[i] / m.a - bi_b) * lg;
        phi[i] = std::exp(ln_phi);
    }
    return phi;
}

inline double pr_fugacity_pure(double T, double p, const SpeciesData& s) {
    std::vector<const SpeciesData*> sp{&s};
    std::vector<double> y{1.0};
    return pr_fugacity_mixture(T, p, sp, y)[0];
}

// exp(v_L (p - p0) / (R T)) with constant liquid molar volume.
inline double poynting(double T, double p, double p0, double v_liq) {
    return std::exp(v_liq * (p - p0) / (kGasConstant * T));
}

struct VleOptions {
    bool ideal = false;       // force phi = phi_hat = Poynting = 1 (Raoult)
    double kij = 0.0;
    double tol = 1e-10;
    int max_iter = 100;
};

struct VleResult {
    std::vector<double> y;     // gas mole fractions, carrier completes to 1
    bool clamped = false;      // fuel fraction hit 1 (above boiling)
    int iterations = 0;
};

// Segregated solve of the equilibrium relation: y appears inside the mixture
// fugacity coefficient, so successive substitution is iterated with optional
// 0.5 damping when the update oscillates. x holds liquid mole fractions of the
// condensable species (zero for the carrier).
inline VleResult equilibrium_mole_fraction(double T, double p,
                                           const std::vector<const SpeciesData*>& sp,
                                           const std::vector<double>& x, size_t carrier,
                                           const VleOptions& opt = {}) {
    const size_t n = sp.size();
    VleResult res;
    res.y.assign(n, 0.0);

    std::vector<double> p0(n, 0.0), pure_term(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (i == carrier || x[i] <= 0.0) continue;
        p0[i] = vapor_pressure(*sp[i], T);
        double term = p0[i] * x[i] / p;
        if (!opt.ideal) {
            const double phi_p = pr_fugacity_pure(T, p0[i], *sp[i]);
            const double v_liq = sp[i]->molar_mass / liquid_density(*sp[i], T);
            term *= phi_p * poynting(T, p, p0[i], v_liq);
        }
        pure_term[i] = term;
    }

    // Raoult value: the ideal-mode answer and the fixed-point starting guess.
    {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (i != carrier) s += pure_term[i];
        if (s > 1.0) {
            for (size_t i = 0; i < n; ++i)
                if (i != carrier) res.y[i] = pure_term[i] / s;
            res.clamped = true;
            s = 1.0;
        } else {
            for (size_t i = 0; i < n; ++i)
                if (i != carrier) res.y[i] = pure_term[i];
        }
        res.y[carrier] = 1.0 - s;
    }
    if (opt.ideal) return res;

    double prev_delta = 0.0;
    for (int it = 0; it < opt.max_iter; ++it) {
        res.iterations = it + 1;
        const auto phi_hat = pr_fugacity_mixture(T, p, sp, res.y, opt.kij);
        double delta_max = 0.0, total = 0.0;
        std::vector<double> ynew(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            if (i == carrier) continue;
            ynew[i] = pure_term[i] / phi_hat[i];
            total += ynew[i];
        }
        res.clamped = false;
        if (total > 1.0) {
            for (size_t i = 0; i < n; ++i)
                if (i != carrier) ynew[i] /= total;
            total = 1.0;
            res.clamped = true;
        }
        ynew[carrier] = 1.0 - total;
        for (size_t i = 0; i < n; ++i)
            delta_max = std::max(delta_max, std::abs(ynew[i] - res.y[i]));
        // Oscillation guard: damp when the update direction flips.
        double relax = 1.0;
        if (it > 0 && delta_max > prev_delta) relax = 0.5;
        for (size_t i = 0; i < n; ++i)
            res.y[i] += relax * (ynew[i] - res.y[i]);
        prev_delta = delta_max;
        if (delta_max < opt.tol) return res;
    }
    std::ostringstream os;
    os << "equilibrium_mole_fraction: no convergence at T=" << T << " K, p=" << p
       << " Pa (last delta=" << prev_delta << ")";
    throw NumericalError(os.str());
}

// rho = p M / (Z R T) with the mixture molar mass from y.
inline double gas_density(double T, double p, const std::vector<const SpeciesData*>& sp,
                          const std::vector<double>& y, bool ideal = false,
                          double kij = 0.0) {
    const double mw = mixture_molar_mass(sp, y);
    const double z = ideal ? 1.0 : pr_compressibility(T, p, sp, y, kij);
    return p * mw / (z * kGasConstant * T);
}

}  // namespace dropsim
