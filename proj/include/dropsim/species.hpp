#pragma once

#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "dropsim/common.hpp"

namespace dropsim {

// Liquid-phase correlations carried per species. Coefficient meanings:
//   vapor_pressure  [A,B,C]      log10(p/bar) = A - B/(T + C)          (Antoine)
//   liquid_density  [A,B,C,D]    rho = A / B^(1 + (1 - T/C)^D)         (DIPPR-105 form)
//   liquid_cp       [a,b,c]      Cp = a + b T + c T^2                  [J/(kg K)]
//   liquid_k        [a,b,c]      k  = a + b T + c T^2                  [W/(m K)]
//   liquid_mu       [A,B]        mu = exp(A + B/T)                     [Pa s] (Andrade)
//   heat_vap        [A]          dh = A (1 - T/Tc)^0.38                [J/kg] (Watson)
//   gas_cp          [a,b,c]      Cp = a + b T + c T^2                  [J/(kg K)]
// Each correlation carries its validity range [Tmin, Tmax]; evaluation outside
// the range clamps T and bumps a warning counter.
struct Correlation {
    std::vector<double> coeff;
    double tmin = 0.0, tmax = 0.0;
};

struct SpeciesData {
    std::string name;
    double molar_mass = 0.0;   // kg/mol
    double t_crit = 0.0;       // K
    double p_crit = 0.0;       // Pa
    double acentric = 0.0;     // -
    double t_boil = 0.0;       // K at 1 atm, used for validation
    double lj_sigma = 0.0;     // Angstrom
    double lj_eps_k = 0.0;     // K
    double sigma_ref = 0.0;    // N/m, reference surface tension (diagnostics only)
    Correlation vapor_pressure, liquid_density, liquid_cp, liquid_k, liquid_mu,
        heat_vap, gas_cp;
};

enum class LiquidProperty { VaporPressure, Density, Cp, Conductivity, Viscosity, HeatVap };

namespace detail {

inline double poly(const std::vector<double>& c, double t) {
    double v = 0.0, p = 1.0;
    for (double a : c) {
        v += a * p;
        p *= t;
    }
    return v;
}

inline double clamp_range(const Correlation& c, double t, int* warn) {
    if (t < c.tmin) {
        if (warn) ++*warn;
        return c.tmin;
    }
    if (t > c.tmax) {
        if (warn) ++*warn;
        return c.tmax;
    }
    return t;
}

}  // namespace detail

// Antoine vapor pressure [Pa]. Clamped below its range; above the range the
// correlation itself is extrapolated up to Tc so that the VLE solve stays
// monotone near the boiling point.
inline double vapor_pressure(const SpeciesData& s, double T, int* warn = nullptr) {
    const auto& c = s.vapor_pressure;
    double t = T;
    if (t < c.tmin) {
        if (warn) ++*warn;
        t = c.tmin;
    }
    if (t > s.t_crit) {
        if (warn) ++*warn;
        t = s.t_crit;
    }
    return 1e5 * std::pow(10.0, c.coeff[0] - c.coeff[1] / (t + c.coeff[2]));
}

inline double liquid_density(const SpeciesData& s, double T, int* warn = nullptr) {
    const auto& c = s.liquid_density;
    const double t = detail::clamp_range(c, T, warn);
    const double e = 1.0 + std::pow(1.0 - t / c.coeff[2], c.coeff[3]);
    return c.coeff[0] / std::pow(c.coeff[1], e);
}

inline double heat_of_vaporization(const SpeciesData& s, double T, int* warn = nullptr) {
    double t = detail::clamp_range(s.heat_vap, T, warn);
    if (t >= s.t_crit) return 0.0;
    return s.heat_vap.coeff[0] * std::pow(1.0 - t / s.t_crit, 0.38);
}

inline double liquid_property(const SpeciesData& s, double T, LiquidProperty kind,
                              int* warn = nullptr) {
    switch (kind) {
        case LiquidProperty::VaporPressure:
            return vapor_pressure(s, T, warn);
        case LiquidProperty::Density:
            return liquid_density(s, T, warn);
        case LiquidProperty::Cp:
            return detail::poly(s.liquid_cp.coeff, detail::clamp_range(s.liquid_cp, T, warn));
        case LiquidProperty::Conductivity:
            return detail::poly(s.liquid_k.coeff, detail::clamp_range(s.liquid_k, T, warn));
        case LiquidProperty::Viscosity: {
            const double t = detail::clamp_range(s.liquid_mu, T, warn);
            return std::exp(s.liquid_mu.coeff[0] + s.liquid_mu.coeff[1] / t);
        }
        case LiquidProperty::HeatVap:
            return heat_of_vaporization(s, T, warn);
    }
    throw ConfigError("liquid_property: unknown kind");
}

inline double gas_cp(const SpeciesData& s, double T) {
    return detail::poly(s.gas_cp.coeff, detail::clamp_range(s.gas_cp, T, nullptr));
}

class SpeciesDatabase {
  public:
    const SpeciesData& get(const std::string& name) const {
        for (const auto& s : species_)
            if (s.name == name) return s;
        throw ConfigError("species database: unknown species '" + name + "'");
    }
    const std::vector<SpeciesData>& all() const { return species_; }
    size_t size() const { return species_.size(); }
    void add(SpeciesData s) { species_.push_back(std::move(s)); }

  private:
    std::vector<SpeciesData> species_;
};

namespace detail {

inline Correlation parse_correlation(const nlohmann::json& j, const std::string& species,
                                     const std::string& prop, size_t ncoeff) {
    if (!j.contains(prop))
        throw ConfigError("species '" + species + "': missing correlation '" + prop + "'");
    const auto& p = j.at(prop);
    Correlation c;
    if (!p.contains("coeff") || !p.at("coeff").is_array())
        throw ConfigError("species '" + species + "': '" + prop + "' needs a coeff array");
    c.coeff = p.at("coeff").get<std::vector<double>>();
    if (c.coeff.size() != ncoeff) {
        std::ostringstream os;
        os << "species '" << species << "': '" << prop << "' expects " << ncoeff
           << " coefficients, got " << c.coeff.size();
        throw ConfigError(os.str());
    }
    c.tmin = p.value("Tmin", 0.0);
    c.tmax = p.value("Tmax", 1e4);
    return c;
}

inline double require_number(const nlohmann::json& j, const std::string& species,
                             const std::string& field) {
    if (!j.contains(field))
        throw ConfigError("species '" + species + "': missing field '" + field + "'");
    return j.at(field).get<double>();
}

}  // namespace detail

inline SpeciesDatabase load_species_database(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("species database: cannot open '" + path + "'");
    nlohmann::json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw ConfigError("species database: parse error in '" + path + "': " + e.what());
    }
    if (!root.contains("species") || !root.at("species").is_array() ||
        root.at("species").empty())
        throw ConfigError("species database: no species records in '" + path + "'");

    SpeciesDatabase db;
    for (const auto& j : root.at("species")) {
        SpeciesData s;
        s.name = j.value("name", std::string());
        if (s.name.empty()) throw ConfigError("species database: record without a name");
        s.molar_mass = detail::require_number(j, s.name, "molar_mass");
        s.t_crit = detail::require_number(j, s.name, "Tc");
        s.p_crit = detail::require_number(j, s.name, "pc");
        s.acentric = detail::require_number(j, s.name, "acentric");
        s.t_boil = detail::require_number(j, s.name, "Tb");
        s.lj_sigma = detail::require_number(j, s.name, "lj_sigma");
        s.lj_eps_k = detail::require_number(j, s.name, "lj_eps_k");
        s.sigma_ref = j.value("sigma_ref", 0.02);
        s.vapor_pressure = detail::parse_correlation(j, s.name, "vapor_pressure", 3);
        s.liquid_density = detail::parse_correlation(j, s.name, "liquid_density", 4);
        s.liquid_cp = detail::parse_correlation(j, s.name, "liquid_cp", 3);
        s.liquid_k = detail::parse_correlation(j, s.name, "liquid_k", 3);
        s.liquid_mu = detail::parse_correlation(j, s.name, "liquid_mu", 2);
        s.heat_vap = detail::parse_correlation(j, s.name, "heat_vap", 1);
        s.gas_cp = detail::parse_correlation(j, s.name, "gas_cp", 3);

        // Sanity on ingestion: correlations finite at range endpoints.
        for (double t : {s.vapor_pressure.tmin, s.t_boil}) {
            if (!std::isfinite(vapor_pressure(s, t)))
                throw ConfigError("species '" + s.name + "': vapor pressure not finite");
        }
        db.add(std::move(s));
    }
    return db;
}

inline std::string default_database_path() {
#ifdef DROPSIM_DATA_DIR
    return std::string(DROPSIM_DATA_DIR) + "/species.json";
#else
    return "data/species.json";
#endif
}

}  // namespace dropsim
