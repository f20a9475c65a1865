#pragma once

#include "dropsim/species.hpp"

namespace dropsim {

// alpha-weighted mixture rule used for every transported property.
inline double blend(double chi_l, double chi_g, double alpha) {
    return chi_l * alpha + chi_g * (1.0 - alpha);
}

inline double mixture_molar_mass(const std::vector<const SpeciesData*>& sp,
                                 const std::vector<double>& y) {
    double m = 0.0;
    for (size_t i = 0; i < sp.size(); ++i) m += y[i] * sp[i]->molar_mass;
    return m;
}

inline void mass_to_mole(const std::vector<const SpeciesData*>& sp,
                         const std::vector<double>& w, std::vector<double>& y) {
    y.resize(sp.size());
    double s = 0.0;
    for (size_t i = 0; i < sp.size(); ++i) {
        y[i] = w[i] / sp[i]->molar_mass;
        s += y[i];
    }
    for (auto& v : y) v /= s;
}

inline void mole_to_mass(const std::vector<const SpeciesData*>& sp,
                         const std::vector<double>& y, std::vector<double>& w) {
    w.resize(sp.size());
    double s = 0.0;
    for (size_t i = 0; i < sp.size(); ++i) {
        w[i] = y[i] * sp[i]->molar_mass;
        s += w[i];
    }
    for (auto& v : w) v /= s;
}

namespace kinetic {

// Neufeld fits of the Lennard-Jones collision integrals.
inline double omega_diffusion(double tstar) {
    return 1.06036 / std::pow(tstar, 0.15610) + 0.19300 / std::exp(0.47635 * tstar) +
           1.03587 / std::exp(1.52996 * tstar) + 1.76474 / std::exp(3.89411 * tstar);
}

inline double omega_viscosity(double tstar) {
    return 1.16145 / std::pow(tstar, 0.14874) + 0.52487 / std::exp(0.77320 * tstar) +
           2.16178 / std::exp(2.43787 * tstar);
}

}  // namespace kinetic

// Chapman-Enskog binary diffusion coefficient [m^2/s].
inline double binary_diffusion(const SpeciesData& a, const SpeciesData& b, double T,
                               double p) {
    const double sigma = 0.5 * (a.lj_sigma + b.lj_sigma);
    const double eps = std::sqrt(a.lj_eps_k * b.lj_eps_k);
    const double mab = 2.0 / (1.0 / (a.molar_mass * 1e3) + 1.0 / (b.molar_mass * 1e3));
    const double omega = kinetic::omega_diffusion(T / eps);
    const double p_bar = p * 1e-5;
    const double d_cm2s =
        0.00266 * std::pow(T, 1.5) / (p_bar * std::sqrt(mab) * sigma * sigma * omega);
    return d_cm2s * 1e-4;
}

// Mixture-averaged diffusion coefficient from binaries and mole fractions.
// D_pairs is the full symmetric matrix indexed [i*n+j]. The pure-species limit
// (y_i -> 1) degenerates to 0/0; it falls back to the binary coefficient with
// the carrier species.
inline double mixture_diffusion(size_t i, const std::vector<double>& y,
                                const std::vector<double>& d_pairs, size_t carrier) {
    const size_t n = y.size();
    const double denom_eps = 1e-12;
    double denom = 0.0;
    for (size_t j = 0; j < n; ++j)
        if (j != i) denom += y[j] / d_pairs[i * n + j];
    if (denom < denom_eps) return d_pairs[i * n + (i == carrier ? (carrier + 1) % n : carrier)];
    return (1.0 - y[i]) / denom;
}

// Chapman-Enskog pure-gas viscosity [Pa s].
inline double gas_viscosity_pure(const SpeciesData& s, double T) {
    const double omega = kinetic::omega_viscosity(T / s.lj_eps_k);
    return 2.6693e-6 * std::sqrt(s.molar_mass * 1e3 * T) / (s.lj_sigma * s.lj_sigma * omega);
}

// Eucken correction on top of the kinetic-theory viscosity [W/(m K)].
inline double gas_conductivity_pure(const SpeciesData& s, double T) {
    const double mu = gas_viscosity_pure(s, T);
    const double r_spec = kGasConstant / s.molar_mass;
    return mu * (gas_cp(s, T) + 1.25 * r_spec);
}

// Wilke mixture viscosity; the same weights are reused for conductivity
// (Mason-Saxena form).
inline void gas_transport_mixture(const std::vector<const SpeciesData*>& sp,
                                  const std::vector<double>& y, double T, double& mu,
                                  double& k) {
    const size_t n = sp.size();
    std::vector<double> mui(n), ki(n);
    for (size_t i = 0; i < n; ++i) {
        mui[i] = gas_viscosity_pure(*sp[i], T);
        ki[i] = gas_conductivity_pure(*sp[i], T);
    }
    mu = 0.0;
    k = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (y[i] <= 0.0) continue;
        double denom = 0.0;
        for (size_t j = 0; j < n; ++j) {
            if (y[j] <= 0.0) continue;
            const double mr = sp[i]->molar_mass / sp[j]->molar_mass;
            const double phi =
                sq(1.0 + std::sqrt(mui[i] / mui[j]) * std::pow(1.0 / mr, 0.25)) /
                std::sqrt(8.0 * (1.0 + mr));
            denom += y[j] * phi;
        }
        mu += y[i] * mui[i] / denom;
        k += y[i] * ki[i] / denom;
    }
}

inline double gas_cp_mixture(const std::vector<const SpeciesData*>& sp,
                             const std::vector<double>& w, double T) {
    double cp = 0.0;
    for (size_t i = 0; i < sp.size(); ++i) cp += w[i] * gas_cp(*sp[i], T);
    return cp;
}

}  // namespace dropsim
