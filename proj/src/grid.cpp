#include "miura/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace miura {

Grid::Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw ValidationError("Grid: need finite a < b");
    if (n < 2) throw ValidationError("Grid: need n >= 2");
}

int Grid::node_index(double x, double tol) const {
    const double k = (x - a) / h();
    const double kr = std::round(k);
    if (kr < 0 || kr > n) return -1;
    if (std::abs(x - node(static_cast<int>(kr))) > tol) return -1;
    return static_cast<int>(kr);
}

int Grid::nearest_node(double x) const {
    const double k = std::round((x - a) / h());
    if (k < 0) return 0;
    if (k > n) return n;
    return static_cast<int>(k);
}

bool Grid::operator==(const Grid& other) const {
    return a == other.a && b == other.b && n == other.n;
}

GridFn::GridFn(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != static_cast<size_t>(g.n + 1)) {
        std::ostringstream os;
        os << "GridFn: expected " << g.n + 1 << " values, got " << values.size();
        throw ValidationError(os.str());
    }
    for (double x : values)
        if (!std::isfinite(x)) throw ValidationError("GridFn: non-finite sample");
}

GridFn GridFn::zero(const Grid& g) {
    return GridFn(g, std::vector<double>(static_cast<size_t>(g.n + 1), 0.0));
}

GridFn GridFn::sample(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<size_t>(g.n + 1));
    for (int k = 0; k <= g.n; ++k) v[static_cast<size_t>(k)] = f(g.node(k));
    return GridFn(g, std::move(v));
}

double GridFn::max_abs() const {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
}

double quadrature(const GridFn& fn) {
    const auto& v = fn.values;
    double s = 0.5 * (v.front() + v.back());
    for (size_t k = 1; k + 1 < v.size(); ++k) s += v[k];
    return s * fn.grid.h();
}

GridFn cumulative_quadrature(const GridFn& fn) {
    std::vector<double> out(fn.values.size());
    out[0] = 0.0;
    const double h = fn.grid.h();
    for (size_t k = 1; k < out.size(); ++k)
        out[k] = out[k - 1] + 0.5 * h * (fn.values[k - 1] + fn.values[k]);
    return GridFn(fn.grid, std::move(out));
}

GridFn derivative(const GridFn& fn) {
    const int n = fn.grid.n;
    const double h = fn.grid.h();
    const auto& v = fn.values;
    std::vector<double> d(v.size());
    if (n >= 3) {
        // one-sided 4-point stencils keep the endpoint error below the
        // interior O(h^2) bound
        d[0] = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h);
        d[static_cast<size_t>(n)] = (11.0 * v[static_cast<size_t>(n)] - 18.0 * v[static_cast<size_t>(n - 1)] +
                                     9.0 * v[static_cast<size_t>(n - 2)] - 2.0 * v[static_cast<size_t>(n - 3)]) /
                                    (6.0 * h);
    } else {
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        d[static_cast<size_t>(n)] = (3.0 * v[static_cast<size_t>(n)] - 4.0 * v[static_cast<size_t>(n - 1)] +
                                     v[static_cast<size_t>(n - 2)]) /
                                    (2.0 * h);
    }
    for (int k = 1; k < n; ++k)
        d[static_cast<size_t>(k)] = (v[static_cast<size_t>(k + 1)] - v[static_cast<size_t>(k - 1)]) / (2.0 * h);
    return GridFn(fn.grid, std::move(d));
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int signed_mode(int j, int n) { return j <= n / 2 ? j : j - n; }

namespace detail {

void fft_pow2(std::vector<std::complex<double>>& data, int sign) {
    const int n = static_cast<int>(data.size());
    if (!is_power_of_two(n))
        throw ValidationError("spectral transform: length must be a power of two");

    // Plans are cached per (size, sign). FFTW_UNALIGNED lets the cached plan
    // execute on any caller buffer; planning is serialized, execution is not.
    static std::mutex plan_mutex;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        auto it = plans.find({n, sign});
        if (it == plans.end()) {
            std::vector<std::complex<double>> scratch(static_cast<size_t>(n));
            auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
            plan = fftw_plan_dft_1d(n, p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
            plans.emplace(std::make_pair(n, sign), plan);
        } else {
            plan = it->second;
        }
    }
    auto* d = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, d, d);
}

} // namespace detail

std::vector<std::complex<double>> spectral_transform(const GridFn& fn) {
    const int n = fn.grid.n;
    if (!is_power_of_two(n))
        throw ValidationError("spectral_transform: grid.n must be a power of two");
    std::vector<std::complex<double>> data(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) data[static_cast<size_t>(j)] = fn.values[static_cast<size_t>(j)];
    detail::fft_pow2(data, -1);
    return data;
}

GridFn inverse_spectral_transform(const Grid& g, const std::vector<std::complex<double>>& coeff) {
    const int n = g.n;
    if (static_cast<int>(coeff.size()) != n)
        throw ValidationError("inverse_spectral_transform: coefficient count must equal grid.n");
    if (!is_power_of_two(n))
        throw ValidationError("inverse_spectral_transform: grid.n must be a power of two");
    std::vector<std::complex<double>> data = coeff;
    detail::fft_pow2(data, +1);
    std::vector<double> v(static_cast<size_t>(n + 1));
    for (int j = 0; j < n; ++j) v[static_cast<size_t>(j)] = data[static_cast<size_t>(j)].real() / n;
    v[static_cast<size_t>(n)] = v[0];
    return GridFn(g, std::move(v));
}

} // namespace miura
