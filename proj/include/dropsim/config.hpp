#pragma once

#include <fstream>

#include "dropsim/flow.hpp"
#include "dropsim/scalar_transport.hpp"
#include "dropsim/thermo.hpp"

namespace dropsim {

enum class ConvectionMode { Microgravity, Natural, Forced };

inline std::string to_string(ConvectionMode m) {
    switch (m) {
        case ConvectionMode::Microgravity: return "microgravity";
        case ConvectionMode::Natural: return "natural";
        case ConvectionMode::Forced: return "forced";
    }
    return "?";
}

struct CaseConfig {
    std::string name;
    GridSpec grid;
    std::string fuel;
    std::string carrier = "nitrogen";
    double d0 = 0.0;        // initial droplet diameter [m]
    double t_liquid = 0.0;  // initial liquid temperature [K]
    double t_gas = 0.0;     // ambient temperature [K]
    double p = kAtm;        // ambient pressure [Pa]
    ConvectionMode mode = ConvectionMode::Natural;
    double gravity = 9.81;     // magnitude [m/s^2]; zero in microgravity
    double inlet_speed = 0.0;  // forced-convection inlet velocity [m/s]
    double xi0 = 1.0;          // potential-field intensity [m^2/s^2]
    bool ideal_thermo = false;
    bool evaporation = true;
    // numerics
    double co_max = 0.25;
    double dt_max = 1e-4;
    double mdot_relax = 0.5;  // under-relaxation of the evaporation rate
    double t_end = 0.0;
    FlowOptions flow;
    int n_outer = 2;
    bool properties_per_outer = false;
    bool interdiffusion = true;
    // output
    double write_every = 0.01;  // seconds between CSV rows / snapshots
    int log_every = 50;         // steps between progress lines
};

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& path,
                                         const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("config: missing required field '" + path + key + "'");
    return j.at(key);
}

inline double number_at(const nlohmann::json& j, const std::string& path,
                        const std::string& key) {
    const auto& v = require_key(j, path, key);
    if (!v.is_number())
        throw ConfigError("config: field '" + path + key + "' must be a number");
    return v.get<double>();
}

template <typename T>
inline void opt_get(const nlohmann::json& j, const std::string& path,
                    const std::string& key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: field '" + path + key + "' has the wrong type");
    }
}

}  // namespace detail

inline void validate_config(const CaseConfig& c) {
    if (c.fuel.empty()) throw ConfigError("config: missing fuel name");
    if (c.carrier.empty()) throw ConfigError("config: missing carrier name");
    if (c.d0 <= c.grid.fiber_diam)
        throw ConfigError("config: d0 must exceed the fiber diameter");
    if (c.t_liquid <= 0.0 || c.t_gas <= 0.0)
        throw ConfigError("config: temperatures must be positive");
    if (c.p <= 0.0) throw ConfigError("config: pressure must be positive");
    if (c.mode == ConvectionMode::Forced && c.inlet_speed <= 0.0)
        throw ConfigError("config: forced mode requires inlet_speed > 0");
    if (c.xi0 < 0.0) throw ConfigError("config: xi0 must be non-negative");
    if (c.co_max <= 0.0 || c.co_max > 0.5)
        throw ConfigError("config: co_max must lie in (0, 0.5]");
    if (c.mdot_relax <= 0.0 || c.mdot_relax > 1.0)
        throw ConfigError("config: mdot_relax must lie in (0, 1]");
    if (c.grid.nr < 2 || c.grid.nz < 2) throw ConfigError("config: grid too small");
    if (0.5 * c.d0 >= c.grid.W || c.grid.fiber_z - 0.5 * c.d0 <= 0.0 ||
        c.grid.fiber_z + 0.5 * c.d0 >= c.grid.H)
        throw ConfigError("config: droplet overflows the domain");
}

inline CaseConfig config_from_json(const nlohmann::json& j) {
    CaseConfig c;
    detail::opt_get(j, "", "name", c.name);
    c.fuel = detail::require_key(j, "", "fuel").get<std::string>();
    detail::opt_get(j, "", "carrier", c.carrier);
    c.d0 = detail::number_at(j, "", "d0");
    c.t_liquid = detail::number_at(j, "", "t_liquid");
    c.t_gas = detail::number_at(j, "", "t_gas");
    c.p = detail::number_at(j, "", "p");

    // reference geometry defaults: 5 mm radius, 30 mm height, 0.1 mm fiber at 10 mm
    c.grid.W = 5e-3;
    c.grid.H = 30e-3;
    c.grid.fiber_z = 10e-3;
    c.grid.fiber_diam = 1e-4;
    c.grid.nr = 64;
    c.grid.nz = 192;
    if (j.contains("grid")) {
        const auto& jg = j.at("grid");
        detail::opt_get(jg, "grid.", "nr", c.grid.nr);
        detail::opt_get(jg, "grid.", "nz", c.grid.nz);
        detail::opt_get(jg, "grid.", "w", c.grid.W);
        detail::opt_get(jg, "grid.", "h", c.grid.H);
        detail::opt_get(jg, "grid.", "fiber_z", c.grid.fiber_z);
        detail::opt_get(jg, "grid.", "fiber_diam", c.grid.fiber_diam);
    }

    std::string mode = "natural";
    detail::opt_get(j, "", "mode", mode);
    if (mode == "microgravity")
        c.mode = ConvectionMode::Microgravity;
    else if (mode == "natural")
        c.mode = ConvectionMode::Natural;
    else if (mode == "forced")
        c.mode = ConvectionMode::Forced;
    else
        throw ConfigError("config: unknown mode '" + mode + "'");
    if (c.mode == ConvectionMode::Microgravity) c.gravity = 0.0;

    detail::opt_get(j, "", "gravity", c.gravity);
    detail::opt_get(j, "", "inlet_speed", c.inlet_speed);
    detail::opt_get(j, "", "xi0", c.xi0);
    detail::opt_get(j, "", "ideal_thermo", c.ideal_thermo);
    detail::opt_get(j, "", "evaporation", c.evaporation);
    detail::opt_get(j, "", "co_max", c.co_max);
    detail::opt_get(j, "", "dt_max", c.dt_max);
    detail::opt_get(j, "", "mdot_relax", c.mdot_relax);
    detail::opt_get(j, "", "t_end", c.t_end);
    detail::opt_get(j, "", "n_outer", c.n_outer);
    detail::opt_get(j, "", "n_pcorr", c.flow.n_pcorr);
    detail::opt_get(j, "", "central", c.flow.central);
    detail::opt_get(j, "", "properties_per_outer", c.properties_per_outer);
    detail::opt_get(j, "", "interdiffusion", c.interdiffusion);
    detail::opt_get(j, "", "write_every", c.write_every);
    detail::opt_get(j, "", "log_every", c.log_every);
    c.flow.n_outer = c.n_outer;

    validate_config(c);
    return c;
}

inline nlohmann::json config_to_json(const CaseConfig& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["fuel"] = c.fuel;
    j["carrier"] = c.carrier;
    j["d0"] = c.d0;
    j["t_liquid"] = c.t_liquid;
    j["t_gas"] = c.t_gas;
    j["p"] = c.p;
    j["grid"] = {{"nr", c.grid.nr},         {"nz", c.grid.nz},
                 {"w", c.grid.W},           {"h", c.grid.H},
                 {"fiber_z", c.grid.fiber_z}, {"fiber_diam", c.grid.fiber_diam}};
    j["mode"] = to_string(c.mode);
    j["gravity"] = c.gravity;
    j["inlet_speed"] = c.inlet_speed;
    j["xi0"] = c.xi0;
    j["ideal_thermo"] = c.ideal_thermo;
    j["evaporation"] = c.evaporation;
    j["co_max"] = c.co_max;
    j["dt_max"] = c.dt_max;
    j["mdot_relax"] = c.mdot_relax;
    j["t_end"] = c.t_end;
    j["n_outer"] = c.n_outer;
    j["n_pcorr"] = c.flow.n_pcorr;
    j["central"] = c.flow.central;
    j["properties_per_outer"] = c.properties_per_outer;
    j["interdiffusion"] = c.interdiffusion;
    j["write_every"] = c.write_every;
    j["log_every"] = c.log_every;
    return j;
}

inline CaseConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse failure in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// Boundary assembly. The domain maps west -> axis, east -> outerWall,
// south -> inlet, north -> outlet; the fiber surface is handled cell-wise by
// the solvers (no-slip, zero-gradient scalars).
struct BoundarySpec {
    FlowBc flow;
    ScalarBcSet temperature;
    ScalarBcSet species;  // fuel mass fraction; carrier completes to 1
};

inline BoundarySpec build_boundaries(const CaseConfig& c) {
    BoundarySpec b;
    b.flow.west.vel = VelBc::Symmetry;
    b.flow.east.vel = VelBc::Wall;
    // scalars default to zero gradient on axis and outer wall

    if (c.mode == ConvectionMode::Forced) {
        b.flow.south.vel = VelBc::Fixed;
        b.flow.south.uz = c.inlet_speed;
        b.flow.south.p = PBc::ZeroGradient;
        b.temperature.south = {ScalarBcKind::Fixed, c.t_gas};
        b.species.south = {ScalarBcKind::Fixed, 0.0};
    } else {
        b.flow.south.vel = VelBc::InletOutlet;
        b.flow.south.p = PBc::FixedValue;
        b.flow.south.pval = 0.0;  // p_rgh gauge = ambient
        b.temperature.south = {ScalarBcKind::InletOutlet, c.t_gas};
        b.species.south = {ScalarBcKind::InletOutlet, 0.0};
    }

    b.flow.north.vel = VelBc::InletOutlet;
    b.flow.north.p = PBc::FixedValue;
    b.flow.north.pval = 0.0;
    b.temperature.north = {ScalarBcKind::InletOutlet, c.t_gas};
    b.species.north = {ScalarBcKind::InletOutlet, 0.0};
    return b;
}

struct FieldSet {
    Field alpha;
    Field vr, vz;
    Field t;
    Field p_rgh;
    std::vector<Field> omega;  // one per species, carrier last
};

// Exact-fraction rasterization of the initial sphere: per-cell liquid volume
// fraction from subcell integration with the axisymmetric metric.
inline Field rasterize_sphere(const Grid& g, double cz, double radius) {
    Field alpha(g.ncells(), 0.0);
    const int ns = 8;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            if (g.is_solid(i, j)) continue;
            // quick reject/accept on the cell bounding circle
            const double rc = g.rc(i), zc = g.zc(j);
            const double dcell = std::hypot(rc, zc - cz);
            const double half_diag = 0.5 * std::hypot(g.dr, g.dz);
            if (dcell - half_diag >= radius) continue;
            if (dcell + half_diag <= radius) {
                alpha[g.idx(i, j)] = 1.0;
                continue;
            }
            double vin = 0.0, vtot = 0.0;
            for (int sj = 0; sj < ns; ++sj)
                for (int si = 0; si < ns; ++si) {
                    const double r = (i + (si + 0.5) / ns) * g.dr;
                    const double z = (j + (sj + 0.5) / ns) * g.dz;
                    const double w = g.planar ? 1.0 : r;
                    vtot += w;
                    if (std::hypot(r, z - cz) < radius) vin += w;
                }
            alpha[g.idx(i, j)] = vin / vtot;
        }
    return alpha;
}

// Initial pattern: cold droplet around the fiber, saturated vapor
// confined to the liquid, quiescent hot ambient.
inline FieldSet initialize(const CaseConfig& c, const Grid& g, const SpeciesDatabase& db) {
    FieldSet f;
    f.alpha = rasterize_sphere(g, g.fiber_z, 0.5 * c.d0);
    f.vr.assign(g.ncells(), 0.0);
    f.vz.assign(g.ncells(), 0.0);
    f.p_rgh.assign(g.ncells(), 0.0);

    f.t.assign(g.ncells(), 0.0);
    for (int cix = 0; cix < g.ncells(); ++cix)
        f.t[cix] = blend(c.t_liquid, c.t_gas, f.alpha[cix]);

    const std::vector<const SpeciesData*> sp = {&db.get(c.fuel), &db.get(c.carrier)};
    VleOptions vle;
    vle.ideal = c.ideal_thermo;
    const auto eq = equilibrium_mole_fraction(c.t_liquid, c.p, sp, {1.0, 0.0}, 1, vle);
    std::vector<double> w_sat(2, 0.0);
    mole_to_mass(sp, eq.y, w_sat);

    f.omega.assign(2, Field(g.ncells(), 0.0));
    for (int cix = 0; cix < g.ncells(); ++cix) {
        f.omega[0][cix] = f.alpha[cix] * w_sat[0];
        f.omega[1][cix] = 1.0 - f.omega[0][cix];
    }
    return f;
}

}  // namespace dropsim
