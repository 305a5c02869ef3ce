#include "miura/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace miura::oracle {

double square_well_solution(double a, double b, double x) {
    const double cba = std::cosh(b * a);
    if (x < -a) return 1.0 / cba;
    if (x <= a) return std::cosh(b * (x + a)) / cba;
    return (std::cosh(2.0 * a * b) + b * (x - a) * std::sinh(2.0 * a * b)) / cba;
}

double square_well_solution_derivative(double a, double b, double x) {
    const double cba = std::cosh(b * a);
    if (x < -a) return 0.0;
    if (x <= a) return b * std::sinh(b * (x + a)) / cba;
    return b * std::sinh(2.0 * a * b) / cba;
}

double delta_fiber(double lambda, double theta, double x) {
    if (x > 0.0) {
        const double c = (1.0 - theta) * lambda;
        return c / (1.0 + c * x);
    }
    // left-continuous at the jump: the value at 0 is the x -> 0^- limit
    const double c = theta * lambda;
    return -c / (1.0 - c * x);
}

double constant_green(double c, double x, double y) {
    const double s = std::sqrt(c);
    return std::exp(-s * std::abs(x - y)) / (2.0 * s);
}

namespace {

double eval_linear(const GridFn& fn, double x) {
    const Grid& g = fn.grid;
    if (x <= g.a) return fn[0];
    if (x >= g.b) return fn[g.n];
    const double s = (x - g.a) / g.h();
    const int k = std::min(static_cast<int>(s), g.n - 1);
    const double t = s - k;
    return fn[k] * (1.0 - t) + fn[k + 1] * t;
}

struct FdMatrix {
    double h;
    std::vector<double> diag; // interior nodes 1..n-1
    double off;
};

FdMatrix assemble(const Potential& q, double xa, double xb, int n) {
    FdMatrix M;
    M.h = (xb - xa) / n;
    M.off = -1.0 / (M.h * M.h);
    M.diag.assign(static_cast<size_t>(n - 1), 2.0 / (M.h * M.h));
    // q samples at interior nodes: g interpolated, f differenced, atoms as w/h
    for (int i = 1; i < n; ++i) {
        const double x = xa + i * M.h;
        const double fp =
            (eval_linear(q.f, x + M.h) - eval_linear(q.f, x - M.h)) / (2.0 * M.h);
        M.diag[static_cast<size_t>(i - 1)] += eval_linear(q.g, x) + fp;
    }
    for (const Atom& at : q.atoms) {
        if (at.x <= xa || at.x >= xb) continue;
        const int i = static_cast<int>(std::lround((at.x - xa) / M.h));
        if (i >= 1 && i <= n - 1) M.diag[static_cast<size_t>(i - 1)] += at.w / M.h;
    }
    return M;
}

// number of eigenvalues of the tridiagonal below lambda (Sturm sequence);
// an exact zero pivot is perturbed to a tiny negative and counted
int count_below(const FdMatrix& M, double lambda) {
    const double e2 = M.off * M.off;
    int count = 0;
    double d = M.diag[0] - lambda;
    for (size_t i = 0;;) {
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
        if (++i >= M.diag.size()) break;
        d = M.diag[i] - lambda - e2 / d;
    }
    return count;
}

std::vector<double> thomas_solve(const FdMatrix& M, double shift, std::vector<double> rhs) {
    const size_t m = M.diag.size();
    std::vector<double> c(m, M.off), d(m);
    for (size_t i = 0; i < m; ++i) d[i] = M.diag[i] - shift;
    for (size_t i = 1; i < m; ++i) {
        const double w = M.off / d[i - 1];
        d[i] -= w * c[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[m - 1] /= d[m - 1];
    for (size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / d[i];
    return rhs;
}

} // namespace

FdEig fd_lowest_eigenvalue(const Potential& q, double xa, double xb, int n) {
    if (n < 100) throw ValidationError("fd_lowest_eigenvalue: need n >= 100");
    const FdMatrix M = assemble(q, xa, xb, n);
    double lo = M.diag[0], hi = M.diag[0];
    for (double d : M.diag) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 2.0 * std::abs(M.off) + 1.0;
    hi += 2.0 * std::abs(M.off) + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(M, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    FdEig out;
    out.lambda0 = 0.5 * (lo + hi);

    // inverse iteration with a slightly detuned shift
    const double shift = out.lambda0 - 1e-8 * std::max(1.0, std::abs(out.lambda0));
    std::vector<double> v(M.diag.size(), 1.0);
    for (int it = 0; it < 4; ++it) {
        v = thomas_solve(M, shift, std::move(v));
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm * M.h);
        for (double& x : v) x /= norm;
    }
    if (v[v.size() / 2] < 0.0)
        for (double& x : v) x = -x;
    out.ground = std::move(v);
    return out;
}

std::vector<double> fd_solve(const Potential& q, double xa, double xb, int n,
                             const std::vector<double>& f) {
    if (f.size() != static_cast<size_t>(n - 1)) throw ValidationError("fd_solve: rhs size must be n-1");
    const FdMatrix M = assemble(q, xa, xb, n);
    return thomas_solve(M, 0.0, f);
}

std::vector<double> fd_green_column(const Potential& q, double xa, double xb, int n, int j) {
    if (j < 1 || j > n - 1) throw ValidationError("fd_green_column: interior node required");
    const double h = (xb - xa) / n;
    std::vector<double> rhs(static_cast<size_t>(n - 1), 0.0);
    rhs[static_cast<size_t>(j - 1)] = 1.0 / h;
    return fd_solve(q, xa, xb, n, rhs);
}

} // namespace miura::oracle
