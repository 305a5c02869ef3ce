#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "miura/grid.hpp"

namespace miura {

/// Point mass w * delta(. - x). Locations are node-aligned.
struct Atom {
    double x;
    double w;
};

/// Closed-form tag carried by the named constructions.
struct Label {
    enum class Kind { none, square_well, delta, constant, image_of };
    Kind kind = Kind::none;
    double p1 = 0.0; // square_well: a_half; delta: lambda; constant: c
    double p2 = 0.0; // square_well: b_param
};

/// A rough potential q = f' + g + sum_i w_i delta(. - x_i) sampled on a grid.
/// f carries the part that enters through its distributional derivative,
/// g the locally integrable part.
struct Potential {
    Grid grid;
    GridFn f;
    GridFn g;
    std::vector<Atom> atoms;
    std::vector<int> atom_nodes; // node index per atom, derived on construction
    Label label;

    Potential(const Grid& grid_, GridFn f_, GridFn g_, std::vector<Atom> atoms_, Label label_ = {});
};

/// Antiderivative Q with Q' = q. Node samples are left-continuous: the value
/// at an atom node excludes that atom's jump. Normalized Q(a) = f(a).
struct Antiderivative {
    Grid grid;
    GridFn Q;
    std::vector<Atom> jumps;
    std::vector<int> jump_nodes;

    /// Right-continuous value at node k (includes the jump at k, if any).
    double right_value(int k) const;
};

Potential make_zero(const Grid& grid);
Potential make_constant(double c, const Grid& grid);

/// Square well of height b^2 on (-a_half, a_half), zero outside. The edges
/// are snapped to grid nodes and sampled at half height so that the trapezoid
/// rule integrates the well exactly.
Potential make_square_well(double a_half, double b_param, const Grid& grid);

/// Single point mass lambda * delta(. - location); location must be an
/// interior grid node.
Potential make_delta(double lambda, double location, const Grid& grid);

/// The scaling family w_eps(x) = eps^2 * w(eps x) where w = y''/y for the
/// fixed profile y: y = 1 left of -1, y = x right of +1, quintic Hermite
/// blend in between (strictly positive).
Potential make_w_eps(double eps, const Grid& grid);

/// q plus a shallow well of depth -eps and width 1/eps translated past the
/// support of q (centered at 2a + 2/eps where supp q is in [-a, a]).
Potential make_well_perturbation(const Potential& q, double eps);

/// Pointwise sum (atoms at coinciding nodes are merged).
Potential add(const Potential& p, const Potential& q);
Potential scale(const Potential& q, double c);

Antiderivative antiderivative(const Potential& q);

struct SpecialIntegral {
    double value = 0.0;
    bool exists = false;
    /// (cutoff half-width, pairing value) per tested cutoff.
    std::vector<std::pair<double, double>> trace;
};

/// Limit of (q, chi_s) over plateau cutoffs chi_s (1 on [-s, s], smoothstep
/// to 0 on [s, s+1]); 'exists' reports stabilization of the two largest
/// cutoffs within 1e-6 relative.
SpecialIntegral special_integral(const Potential& q);

/// sup over sampled T (both signs welcome in T_values) of |T^-1 int_0^T Q|.
double cesaro_diagnostic(const Antiderivative& A, const std::vector<double>& T_values);

/// Low/high mode split f' + g = q with g-hat supported on |mode| <= cutoff.
/// q is given by periodic samples (no atoms); power-of-two grid required.
std::pair<GridFn, GridFn> fourier_split(const GridFn& q_samples, int cutoff_width);

/// Quadratic form (L_q phi, phi) = int phi'^2 + (q, phi^2) with the
/// derivative of phi supplied analytically.
double quadratic_form(const Potential& q, const GridFn& phi, const GridFn& phi_prime);

/// Plateau cutoff profile: 1 on |x| <= s, cubic smoothstep down to 0 on
/// s <= |x| <= s+1 (slope bounded by 1.5). Returns (value, derivative).
std::pair<double, double> plateau_cutoff(double x, double s);

/// The w_eps blend profile y and its second derivative at x.
double w_profile_y(double x);
double w_profile_ypp(double x);

} // namespace miura
