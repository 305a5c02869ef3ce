#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "miura/errors.hpp"

namespace miura {

/// Uniform grid on [a, b] with n cells of width h = (b-a)/n.
/// Node k sits at a + k*h for k = 0..n.
struct Grid {
    double a = 0.0;
    double b = 1.0;
    int n = 2;

    Grid() = default;
    Grid(double a_, double b_, int n_);

    double h() const { return (b - a) / n; }
    double node(int k) const { return a + k * h(); }
    int num_nodes() const { return n + 1; }

    /// Index of the node nearest to x, or -1 if it is farther than tol away.
    int node_index(double x, double tol) const;

    /// Nearest node, clamped into range (for snapping internal schedules).
    int nearest_node(double x) const;

    bool operator==(const Grid& other) const;
};

/// Node samples of a real function on a Grid. values.size() == n+1,
/// all entries finite.
struct GridFn {
    Grid grid;
    std::vector<double> values;

    GridFn(const Grid& g, std::vector<double> v);

    static GridFn zero(const Grid& g);
    static GridFn sample(const Grid& g, const std::function<double(double)>& f);

    double operator[](int k) const { return values[static_cast<size_t>(k)]; }
    double& operator[](int k) { return values[static_cast<size_t>(k)]; }
    int size() const { return static_cast<int>(values.size()); }

    double max_abs() const;
};

/// Trapezoid-rule integral over [a, b].
double quadrature(const GridFn& fn);

/// Cumulative trapezoid integral: result[k] = integral from a to node k.
GridFn cumulative_quadrature(const GridFn& fn);

/// Second-order finite difference: centered at interior nodes, one-sided
/// (three-point) at the endpoints.
GridFn derivative(const GridFn& fn);

/// Forward DFT of the n periodic samples (the duplicate right endpoint is
/// dropped). Unnormalized, FFTW layout: index j holds mode exp(2*pi*i*j*x/P).
/// n must be a power of two.
std::vector<std::complex<double>> spectral_transform(const GridFn& fn);

/// Inverse of spectral_transform; returns a GridFn with the duplicate right
/// endpoint restored.
GridFn inverse_spectral_transform(const Grid& g, const std::vector<std::complex<double>>& coeff);

/// Signed integer mode index for slot j of an n-point transform:
/// j for j <= n/2, j-n above.
int signed_mode(int j, int n);

bool is_power_of_two(int n);

namespace detail {
/// In-place complex FFT, FFTW-backed. sign = -1 forward, +1 backward
/// (backward is unnormalized). Thread-safe; plans are cached per size.
void fft_pow2(std::vector<std::complex<double>>& data, int sign);
} // namespace detail

} // namespace miura
