#ifndef PCSIM_LINEAR_SOLVER_HPP
#define PCSIM_LINEAR_SOLVER_HPP

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "pcsim/errors.hpp"

namespace pcsim {

// SPD operator assembled from finite-volume faces:
//   (A x)_i = diag_i x_i + sum_faces g (x_i - x_j).
// diag holds mass terms and conductances to fixed-value (Dirichlet) neighbors.
struct SpdSystem {
    struct Face {
        int a, b;
        double g;
    };
    int n = 0;
    std::vector<double> diag;
    std::vector<Face> faces;

    void resize(int unknowns) {
        n = unknowns;
        diag.assign(unknowns, 0.0);
        faces.clear();
    }

    // Residual b - A x with long-double accumulation per entry.
    void residual(const std::vector<double>& b, const std::vector<double>& x,
                  std::vector<double>& r) const {
        std::vector<long double> acc(n);
        for (int i = 0; i < n; ++i)
            acc[i] = static_cast<long double>(b[i]) -
                     static_cast<long double>(diag[i]) * static_cast<long double>(x[i]);
        for (const Face& f : faces) {
            const long double flux = static_cast<long double>(f.g) *
                                     (static_cast<long double>(x[f.a]) -
                                      static_cast<long double>(x[f.b]));
            acc[f.a] -= flux;
            acc[f.b] += flux;
        }
        r.resize(n);
        for (int i = 0; i < n; ++i) r[i] = static_cast<double>(acc[i]);
    }
};

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
};

namespace detail {

// Compressed-row view of an SpdSystem, built once per solve so the hot
// matrix-vector product is a race-free gather.
struct CsrView {
    int n = 0;
    std::vector<int> row_ptr, col;
    std::vector<double> val, diag;

    explicit CsrView(const SpdSystem& A) : n(A.n) {
        std::vector<int> count(n + 1, 0);
        for (const SpdSystem::Face& f : A.faces) {
            ++count[f.a + 1];
            ++count[f.b + 1];
        }
        row_ptr.assign(n + 1, 0);
        for (int i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + count[i + 1];
        col.resize(row_ptr[n]);
        val.resize(row_ptr[n]);
        std::vector<int> cursor(row_ptr.begin(), row_ptr.end() - 1);
        diag = A.diag;
        for (const SpdSystem::Face& f : A.faces) {
            diag[f.a] += f.g;
            diag[f.b] += f.g;
            col[cursor[f.a]] = f.b;
            val[cursor[f.a]++] = -f.g;
            col[cursor[f.b]] = f.a;
            val[cursor[f.b]++] = -f.g;
        }
    }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
            y[i] = acc;
        }
    }
};

} // namespace detail

// Jacobi-preconditioned conjugate gradients. x is both the warm start and the
// result. Deterministic: fixed sequential reduction order.
inline CgResult cg_solve(const SpdSystem& A, const std::vector<double>& b,
                         std::vector<double>& x, double tol_rel, int max_iter) {
    const int n = A.n;
    x.resize(n, 0.0);

    double bnorm2 = 0.0;
    for (double v : b) bnorm2 += v * v;
    if (bnorm2 == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0};
    }
    const double stop2 = bnorm2 * tol_rel * tol_rel;

    const detail::CsrView csr(A);
    std::vector<double> invd(n);
    for (int i = 0; i < n; ++i) invd[i] = 1.0 / csr.diag[i];

    std::vector<double> r(n), z(n), p(n), ap(n);
    csr.apply(x, ap);
    for (int i = 0; i < n; ++i) r[i] = b[i] - ap[i];

    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = invd[i] * r[i];
        rz += r[i] * z[i];
    }
    p = z;

    double rnorm2 = 0.0;
    for (double v : r) rnorm2 += v * v;
    int it = 0;
    double best = rnorm2;
    while (rnorm2 > stop2 && it < max_iter) {
        csr.apply(p, ap);
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) break; // loss of positive definiteness in rounding
        const double alpha = rz / pap;
        double rz_new = 0.0;
        rnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            const double ri = r[i] - alpha * ap[i];
            r[i] = ri;
            z[i] = invd[i] * ri;
            rz_new += ri * z[i];
            rnorm2 += ri * ri;
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
        if (rnorm2 < best) best = rnorm2;
        // stagnation at the rounding floor
        if (it > 64 && rnorm2 > 0.25 * best && rnorm2 < bnorm2 * 1e-24) break;
    }
    return {it, std::sqrt(rnorm2 / bnorm2)};
}

// CG followed by iterative refinement with a long-double residual. Pushes the
// backward error toward rounding level, which the terminal-current
// conservation checks rely on.
inline CgResult solve_spd(const SpdSystem& A, const std::vector<double>& b,
                          std::vector<double>& x, double tol_rel, int max_iter,
                          const char* what) {
    CgResult res = cg_solve(A, b, x, tol_rel, max_iter);
    if (res.rel_residual > tol_rel) {
        std::ostringstream os;
        os << what << " solve did not converge: relative residual " << res.rel_residual
           << " after " << res.iterations << " iterations (cap " << max_iter << ")";
        throw SolverError(os.str());
    }
    std::vector<double> r, dx(A.n, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
        A.residual(b, x, r);
        double rnorm2 = 0.0;
        for (double v : r) rnorm2 += v * v;
        if (rnorm2 == 0.0) break;
        std::fill(dx.begin(), dx.end(), 0.0);
        CgResult fix = cg_solve(A, r, dx, 1e-4, max_iter);
        res.iterations += fix.iterations;
        for (int i = 0; i < A.n; ++i) x[i] += dx[i];
    }
    return res;
}

namespace detail {

// Harmonic-mean face coefficient: keeps fluxes continuous across sharp
// property contrasts.
inline double harmonic_mean(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
}

} // namespace detail

// Neumaier compensated summation, used where sums of near-cancelling currents
// must stay at rounding level.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace pcsim

#endif
