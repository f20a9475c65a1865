#pragma once

#include <algorithm>
#include <cassert>

#include "dropsim/common.hpp"

namespace dropsim {

// Structured 2D grid. In axisymmetric mode the coordinates are (r, z), cell
// volumes are per-radian (the 2*pi factor is dropped everywhere consistently)
// and the axis r=0 is a zero-area face. In planar mode (x, y) with unit depth,
// used for Cartesian benchmarks.
struct GridSpec {
    int nr = 0, nz = 0;
    double W = 0.0, H = 0.0;      // domain radius / height [m]
    double fiber_z = -1.0;        // fiber center on the axis [m]; <0 disables
    double fiber_diam = 0.0;      // fiber diameter [m]
    bool planar = false;
};

struct Grid {
    int nr = 0, nz = 0;
    double dr = 0.0, dz = 0.0;
    double W = 0.0, H = 0.0;
    double fiber_z = -1.0;
    double fiber_diam = 0.0;
    bool planar = false;
    std::vector<uint8_t> solid;  // 1 = inside the fiber, excluded from solves

    int ncells() const { return nr * nz; }
    int idx(int i, int j) const { return j * nr + i; }

    double rc(int i) const { return (i + 0.5) * dr; }
    double zc(int j) const { return (j + 0.5) * dz; }
    double rface(int i) const { return i * dr; }
    double zface(int j) const { return j * dz; }

    double metric(double r) const { return planar ? 1.0 : r; }
    double vol(int i, int /*j*/) const { return metric(rc(i)) * dr * dz; }
    // Radial face i (i = 0..nr), constant per column of cells.
    double area_r(int i) const { return metric(rface(i)) * dz; }
    // Axial face in column i (same for j = 0..nz).
    double area_z(int i) const { return metric(rc(i)) * dr; }

    bool is_solid(int i, int j) const { return solid[idx(i, j)] != 0; }

    double total_volume() const {
        double v = 0.0;
        for (int j = 0; j < nz; ++j)
            for (int i = 0; i < nr; ++i)
                if (!is_solid(i, j)) v += vol(i, j);
        return v;
    }
};

// Face-normal scalar values (fluxes, velocities): fr has (nr+1)*nz entries,
// fz has nr*(nz+1). Positive fr points in +r, positive fz in +z.
struct FaceField {
    int nr = 0, nz = 0;
    Field fr, fz;

    FaceField() = default;
    FaceField(int nr_, int nz_)
        : nr(nr_), nz(nz_), fr((nr_ + 1) * nz_, 0.0), fz(nr_ * (nz_ + 1), 0.0) {}
    explicit FaceField(const Grid& g) : FaceField(g.nr, g.nz) {}

    int ir(int i, int j) const { return j * (nr + 1) + i; }  // i = 0..nr
    int iz(int i, int j) const { return j * nr + i; }        // j = 0..nz

    double& r(int i, int j) { return fr[ir(i, j)]; }
    double& z(int i, int j) { return fz[iz(i, j)]; }
    double r(int i, int j) const { return fr[ir(i, j)]; }
    double z(int i, int j) const { return fz[iz(i, j)]; }

    void zero() {
        std::fill(fr.begin(), fr.end(), 0.0);
        std::fill(fz.begin(), fz.end(), 0.0);
    }
};

inline Grid build_grid(const GridSpec& spec) {
    if (spec.nr < 2 || spec.nz < 2)
        throw ConfigError("build_grid: nr and nz must be at least 2");
    if (spec.W <= 0.0 || spec.H <= 0.0)
        throw ConfigError("build_grid: domain dimensions must be positive");
    Grid g;
    g.nr = spec.nr;
    g.nz = spec.nz;
    g.W = spec.W;
    g.H = spec.H;
    g.dr = spec.W / spec.nr;
    g.dz = spec.H / spec.nz;
    g.planar = spec.planar;
    g.fiber_z = spec.fiber_z;
    g.fiber_diam = spec.fiber_diam;
    g.solid.assign(g.ncells(), 0);
    if (spec.fiber_z >= 0.0) {
        if (spec.fiber_diam <= 0.0)
            throw ConfigError("build_grid: fiber diameter must be positive");
        if (spec.fiber_z > spec.H)
            throw ConfigError("build_grid: fiber center outside domain");
        const double rf = 0.5 * spec.fiber_diam;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i) {
                const double d2 = sq(g.rc(i)) + sq(g.zc(j) - spec.fiber_z);
                if (d2 < rf * rf) g.solid[g.idx(i, j)] = 1;
            }
    }
    return g;
}

// Cell-centered gradient: central differences in the interior, one-sided at
// domain boundaries and next to solid cells. Exact for linear fields away
// from solids.
inline void gradient(const Grid& g, const Field& f, Field& dfdr, Field& dfdz) {
    dfdr.assign(g.ncells(), 0.0);
    dfdz.assign(g.ncells(), 0.0);
    auto usable = [&](int i, int j) {
        return i >= 0 && i < g.nr && j >= 0 && j < g.nz && !g.is_solid(i, j);
    };
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (g.is_solid(i, j)) continue;
            const bool w = usable(i - 1, j), e = usable(i + 1, j);
            if (w && e)
                dfdr[c] = (f[g.idx(i + 1, j)] - f[g.idx(i - 1, j)]) / (2.0 * g.dr);
            else if (e)
                dfdr[c] = (f[g.idx(i + 1, j)] - f[c]) / g.dr;
            else if (w)
                dfdr[c] = (f[c] - f[g.idx(i - 1, j)]) / g.dr;
            const bool s = usable(i, j - 1), n = usable(i, j + 1);
            if (s && n)
                dfdz[c] = (f[g.idx(i, j + 1)] - f[g.idx(i, j - 1)]) / (2.0 * g.dz);
            else if (n)
                dfdz[c] = (f[g.idx(i, j + 1)] - f[c]) / g.dz;
            else if (s)
                dfdz[c] = (f[c] - f[g.idx(i, j - 1)]) / g.dz;
        }
}

// Gauss divergence of volumetric face fluxes [m^3/s per radian]: sum of
// outgoing fluxes over cell volume.
inline Field divergence(const Grid& g, const FaceField& q) {
    Field div(g.ncells(), 0.0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const int c = g.idx(i, j);
            if (g.is_solid(i, j)) continue;
            const double net = q.r(i + 1, j) - q.r(i, j) + q.z(i, j + 1) - q.z(i, j);
            div[c] = net / g.vol(i, j);
        }
    return div;
}

// Volumetric face fluxes from a face-normal velocity field.
inline FaceField face_fluxes(const Grid& g, const FaceField& vel) {
    FaceField q(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) q.r(i, j) = vel.r(i, j) * g.area_r(i);
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) q.z(i, j) = vel.z(i, j) * g.area_z(i);
    return q;
}

}  // namespace dropsim
