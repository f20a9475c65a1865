#pragma once

#include "dropsim/properties.hpp"
#include "dropsim/vof.hpp"

namespace dropsim {

// Post-processing metrics: equivalent diameter, droplet extents, sphericity,
// and the dimensionless groups used in the shape and convection analyses.

struct DropletMetrics {
    double volume = 0.0;  // liquid volume [m^3/rad]
    double d_eq = 0.0;    // volume-equivalent sphere diameter [m]
    double d_x = 0.0;     // maximal radial extent (full width) [m]
    double d_y = 0.0;     // maximal axial extent [m]
    double psi = 0.0;     // sphericity D_y/D_x
    double eo = 0.0;
    double gr = 0.0;
};

// Diameter of the sphere holding the full 3D liquid volume. Axisymmetric
// volumes are per radian, so the revolution factor is 2 pi.
inline double equivalent_diameter(const Grid& g, const Field& alpha) {
    const double v3d = (g.planar ? 1.0 : 2.0 * M_PI) * liquid_volume(g, alpha);
    if (v3d <= 0.0) return 0.0;
    return std::cbrt(6.0 * v3d / M_PI);
}

namespace detail {

// Position of the alpha = 0.5 crossing between two samples, linear in alpha.
inline double crossing(double x0, double x1, double a0, double a1) {
    return x0 + (0.5 - a0) / (a1 - a0) * (x1 - x0);
}

}  // namespace detail

// Maximal liquid extents from alpha = 0.5 crossings along grid lines.
// d_x is the full width (twice the radial extent on an axisymmetric grid).
inline void droplet_extents(const Grid& g, const Field& alpha, double& d_x, double& d_y) {
    double rmax = 0.0, zmin = std::numeric_limits<double>::max(), zmax = 0.0;
    bool any = false;
    auto a = [&](int i, int j) { return g.is_solid(i, j) ? 1.0 : alpha[g.idx(i, j)]; };
    for (int j = 0; j < g.nz; ++j) {
        for (int i = 0; i < g.nr; ++i) {
            if (g.is_solid(i, j) || a(i, j) < 0.5) continue;
            any = true;
            double r_hi = g.rc(i), z_lo = g.zc(j), z_hi = g.zc(j);
            if (i + 1 < g.nr && a(i + 1, j) < 0.5)
                r_hi = detail::crossing(g.rc(i), g.rc(i + 1), a(i, j), a(i + 1, j));
            else if (i + 1 == g.nr)
                r_hi = g.rc(i) + 0.5 * g.dr;
            if (j + 1 < g.nz && a(i, j + 1) < 0.5)
                z_hi = detail::crossing(g.zc(j), g.zc(j + 1), a(i, j), a(i, j + 1));
            if (j > 0 && a(i, j - 1) < 0.5)
                z_lo = detail::crossing(g.zc(j), g.zc(j - 1), a(i, j), a(i, j - 1));
            rmax = std::max(rmax, r_hi);
            zmax = std::max(zmax, z_hi);
            zmin = std::min(zmin, z_lo);
        }
    }
    if (!any) {
        d_x = d_y = 0.0;
        return;
    }
    d_x = 2.0 * rmax;
    d_y = zmax - zmin;
}

inline double sphericity(const Grid& g, const Field& alpha) {
    double d_x = 0.0, d_y = 0.0;
    droplet_extents(g, alpha, d_x, d_y);
    if (d_x <= 0.0) return 0.0;
    return d_y / d_x;
}

inline double eotvos(double rho_l, double rho_g, double gmag, double d, double sigma_ref) {
    if (sigma_ref <= 0.0) throw ConfigError("eotvos: sigma_ref must be positive");
    return (rho_l - rho_g) * gmag * d * d / sigma_ref;
}

inline double grashof(double rho, double gmag, double d, double beta, double dT,
                      double mu) {
    return rho * rho * gmag * d * d * d * beta * dT / (mu * mu);
}

// Chilton-Colburn wet-bulb predictor: equilibrium between the surface heat
// flux and the vaporization enthalpy flux,
//   T_G - T_s = (D_i/k) (Sc/Pr)^(1/3) (p0(T_s) M_w / (R T_s)) dh_ev(T_s),
// with gas properties at the surface temperature and ambient composition
// (pure carrier). Solved by bisection on (200 K, T_G).
inline double wet_bulb(double t_gas, const SpeciesData& fuel, const SpeciesData& carrier,
                       double p) {
    auto residual = [&](double ts) {
        const double d_i = binary_diffusion(fuel, carrier, ts, p);
        const double mu = gas_viscosity_pure(carrier, ts);
        const double k = gas_conductivity_pure(carrier, ts);
        const double cp = gas_cp(carrier, ts);
        const double rho = p * carrier.molar_mass / (kGasConstant * ts);
        const double sc = mu / (rho * d_i);
        const double pr = mu * cp / k;
        const double rho_is =
            vapor_pressure(fuel, ts) * fuel.molar_mass / (kGasConstant * ts);
        return (t_gas - ts) -
               d_i / k * std::cbrt(sc / pr) * rho_is * heat_of_vaporization(fuel, ts);
    };
    // Above the fuel critical temperature dh_ev vanishes and the residual
    // turns positive again, so bracket the lowest root by an upward scan.
    const int nscan = 400;
    const double step = (t_gas - 200.0) / nscan;
    double lo = 200.0, hi = 0.0;
    if (!(residual(lo) > 0.0))
        throw NumericalError("wet_bulb: no sign change on (200 K, T_G)");
    for (int n = 1; n <= nscan; ++n) {
        const double t = 200.0 + n * step;
        if (residual(t) < 0.0) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (hi == 0.0) throw NumericalError("wet_bulb: no sign change on (200 K, T_G)");
    for (int it = 0; it < 200 && hi - lo > 1e-8; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dropsim
