#pragma once

#include <sstream>

#include "dropsim/grid.hpp"

namespace dropsim {

// Five-point stencil system on the structured grid:
//   ap x_P + aw x_W + ae x_E + as x_S + an x_N = rhs
// Boundary closures are folded into ap/rhs during assembly, so missing
// neighbors simply carry zero coefficients.
struct StencilMatrix {
    int nr = 0, nz = 0;
    Field ap, aw, ae, as, an, rhs;

    StencilMatrix() = default;
    StencilMatrix(int nr_, int nz_) { resize(nr_, nz_); }
    explicit StencilMatrix(const Grid& g) { resize(g.nr, g.nz); }

    void resize(int nr_, int nz_) {
        nr = nr_;
        nz = nz_;
        const int n = nr * nz;
        ap.assign(n, 0.0);
        aw.assign(n, 0.0);
        ae.assign(n, 0.0);
        as.assign(n, 0.0);
        an.assign(n, 0.0);
        rhs.assign(n, 0.0);
    }

    int idx(int i, int j) const { return j * nr + i; }

    void identity_row(int c, double value) {
        ap[c] = 1.0;
        aw[c] = ae[c] = as[c] = an[c] = 0.0;
        rhs[c] = value;
    }

    void apply(const Field& x, Field& y) const {
        for (int j = 0; j < nz; ++j)
            for (int i = 0; i < nr; ++i) {
                const int c = idx(i, j);
                double v = ap[c] * x[c];
                if (i > 0) v += aw[c] * x[c - 1];
                if (i < nr - 1) v += ae[c] * x[c + 1];
                if (j > 0) v += as[c] * x[c - nr];
                if (j < nz - 1) v += an[c] * x[c + nr];
                y[c] = v;
            }
    }
};

struct SolveStats {
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
};

namespace detail {

inline double dot(const Field& a, const Field& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Field& a) { return std::sqrt(dot(a, a)); }

// One symmetric Gauss-Seidel sweep as preconditioner: z ~= A^-1 r.
inline void ssor_apply(const StencilMatrix& A, const Field& r, Field& z) {
    const int nr = A.nr, nz = A.nz;
    std::fill(z.begin(), z.end(), 0.0);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < nr; ++i) {
            const int c = A.idx(i, j);
            double v = r[c];
            if (i > 0) v -= A.aw[c] * z[c - 1];
            if (j > 0) v -= A.as[c] * z[c - nr];
            z[c] = v / A.ap[c];
        }
    for (int j = nz - 1; j >= 0; --j)
        for (int i = nr - 1; i >= 0; --i) {
            const int c = A.idx(i, j);
            double v = A.ap[c] * z[c];
            if (i < nr - 1) v -= A.ae[c] * z[c + 1];
            if (j < nz - 1) v -= A.an[c] * z[c + nr];
            z[c] = v / A.ap[c];
        }
}

}  // namespace detail

// Preconditioned BiCGStab. Converges on |r| < max(tol_rel*|r0|, tol_abs).
inline SolveStats solve_bicgstab(const StencilMatrix& A, Field& x, double tol_rel = 1e-9,
                                 double tol_abs = 1e-14, int max_iter = 2000) {
    const size_t n = x.size();
    Field r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), z(n), zs(n), ax(n);
    A.apply(x, ax);
    for (size_t i = 0; i < n; ++i) r[i] = A.rhs[i] - ax[i];
    r0 = r;
    SolveStats st;
    st.initial_residual = detail::norm2(r);
    const double target = std::max(tol_rel * st.initial_residual, tol_abs);
    if (st.initial_residual <= target) {
        st.final_residual = st.initial_residual;
        return st;
    }
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        const double rho_new = detail::dot(r0, r);
        if (std::abs(rho_new) < 1e-300) break;  // breakdown, restart below
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;
        detail::ssor_apply(A, p, z);
        A.apply(z, v);
        alpha = rho / detail::dot(r0, v);
        for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (detail::norm2(s) <= target) {
            for (size_t i = 0; i < n; ++i) x[i] += alpha * z[i];
            st.iterations = it;
            st.final_residual = detail::norm2(s);
            return st;
        }
        detail::ssor_apply(A, s, zs);
        A.apply(zs, t);
        const double tt = detail::dot(t, t);
        omega = (tt > 0.0) ? detail::dot(t, s) / tt : 0.0;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * z[i] + omega * zs[i];
            r[i] = s[i] - omega * t[i];
        }
        st.iterations = it;
        st.final_residual = detail::norm2(r);
        if (st.final_residual <= target) return st;
        if (omega == 0.0) break;
    }
    std::ostringstream os;
    os << "solve_bicgstab: no convergence after " << st.iterations
       << " iterations (residual " << st.final_residual << ", initial "
       << st.initial_residual << ", target " << target << ")";
    throw NumericalError(os.str());
}

// Thomas algorithm for the 1D radial solves: a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i.
inline void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                              std::vector<double>& c, std::vector<double>& d,
                              std::vector<double>& x) {
    const size_t n = b.size();
    x.resize(n);
    for (size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    x[n - 1] = d[n - 1] / b[n - 1];
    for (int i = static_cast<int>(n) - 2; i >= 0; --i)
        x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
}

}  // namespace dropsim
