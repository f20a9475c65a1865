#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dropsim/config.hpp"

namespace dropsim {

// Time-series CSV and structured-grid snapshots. All floating-point output is
// %.17g so snapshots round-trip bit-exactly.

struct TimeSeriesRow {
    double t = 0.0;
    double d_eq = 0.0;
    double dd0_sq = 0.0;  // (D/D0)^2
    double t_surface_mean = 0.0;
    double t_liquid_mean = 0.0;
    double vaporization_velocity = 0.0;
    double liquid_mass = 0.0;
    double mass_ledger_residual = 0.0;
    double energy_ledger_residual = 0.0;
    double psi = 0.0;
    double max_speed = 0.0;
};

inline constexpr const char* kCsvHeader =
    "t, D_eq, (D/D₀)², T_surface_mean, T_liquid_mean, vaporization_velocity, "
    "liquid_mass, mass_ledger_residual, energy_ledger_residual, psi, max_speed";

namespace detail {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : path_(path), out_(path) {
        if (!out_) throw IoError("csv: cannot open '" + path + "'");
        out_ << kCsvHeader << "\n";
    }
    void append(const TimeSeriesRow& r) {
        const double v[11] = {r.t,
                              r.d_eq,
                              r.dd0_sq,
                              r.t_surface_mean,
                              r.t_liquid_mean,
                              r.vaporization_velocity,
                              r.liquid_mass,
                              r.mass_ledger_residual,
                              r.energy_ledger_residual,
                              r.psi,
                              r.max_speed};
        for (int i = 0; i < 11; ++i) out_ << (i ? ", " : "") << detail::fmt17(v[i]);
        out_ << "\n";
        out_.flush();
        if (!out_) {
            std::filesystem::remove(path_);
            throw IoError("csv: write failure on '" + path_ + "'");
        }
    }

  private:
    std::string path_;
    std::ofstream out_;
};

inline std::vector<TimeSeriesRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: empty file '" + path + "'");
    std::vector<TimeSeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TimeSeriesRow r;
        double* v[11] = {&r.t,
                         &r.d_eq,
                         &r.dd0_sq,
                         &r.t_surface_mean,
                         &r.t_liquid_mean,
                         &r.vaporization_velocity,
                         &r.liquid_mass,
                         &r.mass_ledger_residual,
                         &r.energy_ledger_residual,
                         &r.psi,
                         &r.max_speed};
        size_t pos = 0;
        for (int i = 0; i < 11; ++i) {
            size_t next = line.find(',', pos);
            *v[i] = std::stod(line.substr(pos, next - pos));
            pos = (next == std::string::npos) ? line.size() : next + 1;
        }
        rows.push_back(r);
    }
    return rows;
}

// Snapshot format: VTK legacy ASCII, STRUCTURED_POINTS with cell data, one
// scalar block per field plus the velocity vector. ParaView-readable; the
// matching reader below restores the fields bit-exactly.
inline void write_snapshot(const std::string& path, const Grid& g, const FieldSet& f,
                           double t) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("snapshot: cannot open '" + tmp + "'");
        out << "# vtk DataFile Version 3.0\n";
        out << "dropsim t=" << detail::fmt17(t) << "\n";
        out << "ASCII\nDATASET STRUCTURED_POINTS\n";
        out << "DIMENSIONS " << g.nr + 1 << " " << g.nz + 1 << " 1\n";
        out << "ORIGIN 0 0 0\n";
        out << "SPACING " << detail::fmt17(g.dr) << " " << detail::fmt17(g.dz) << " 1\n";
        out << "CELL_DATA " << g.ncells() << "\n";
        auto scalars = [&](const char* name, const Field& v) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (int c = 0; c < g.ncells(); ++c) out << detail::fmt17(v[c]) << "\n";
        };
        scalars("alpha", f.alpha);
        scalars("T", f.t);
        scalars("omega_fuel", f.omega.at(0));
        scalars("p_rgh", f.p_rgh);
        out << "VECTORS velocity double\n";
        for (int c = 0; c < g.ncells(); ++c)
            out << detail::fmt17(f.vr[c]) << " " << detail::fmt17(f.vz[c]) << " 0\n";
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw IoError("snapshot: write failure on '" + path + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

inline FieldSet read_snapshot(const std::string& path, const Grid& g, double* t = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("snapshot: cannot open '" + path + "'");
    FieldSet f;
    f.alpha.assign(g.ncells(), 0.0);
    f.t.assign(g.ncells(), 0.0);
    f.p_rgh.assign(g.ncells(), 0.0);
    f.vr.assign(g.ncells(), 0.0);
    f.vz.assign(g.ncells(), 0.0);
    f.omega.assign(1, Field(g.ncells(), 0.0));
    std::string line;
    while (std::getline(in, line)) {
        if (t && line.rfind("dropsim t=", 0) == 0) *t = std::stod(line.substr(10));
        Field* target = nullptr;
        if (line.rfind("SCALARS alpha", 0) == 0) target = &f.alpha;
        if (line.rfind("SCALARS T ", 0) == 0) target = &f.t;
        if (line.rfind("SCALARS omega_fuel", 0) == 0) target = &f.omega[0];
        if (line.rfind("SCALARS p_rgh", 0) == 0) target = &f.p_rgh;
        if (target) {
            std::getline(in, line);  // LOOKUP_TABLE
            for (int c = 0; c < g.ncells(); ++c) in >> (*target)[c];
            continue;
        }
        if (line.rfind("VECTORS velocity", 0) == 0) {
            double dummy;
            for (int c = 0; c < g.ncells(); ++c) in >> f.vr[c] >> f.vz[c] >> dummy;
        }
    }
    if (!in && !in.eof()) throw IoError("snapshot: read failure on '" + path + "'");
    return f;
}

inline void write_summary(const std::string& path, const CaseConfig& c,
                          const nlohmann::json& ledger_totals) {
    nlohmann::json j;
    j["case"] = config_to_json(c);
    j["ledgers"] = ledger_totals;
    std::ofstream out(path);
    if (!out) throw IoError("summary: cannot open '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) {
        std::filesystem::remove(path);
        throw IoError("summary: write failure on '" + path + "'");
    }
}

}  // namespace dropsim
