#pragma once

#include <optional>

#include "miura/schrodinger.hpp"

namespace miura {

/// B(r) = r' + r^2 on grid data. A declared jump J at a node contributes an
/// atom of weight J; the stored f is the continuous part of r (the step is
/// removed before sampling) so the discrete derivative never double-counts
/// the atom. g receives the one-sided average of r^2 at jump nodes.
Potential forward_miura(const GridFn& r, const std::vector<Atom>& r_jumps = {});

/// r = y'/y computed as (u + Q y)/y (no numerical differentiation of y).
/// Uses the left-continuous Q samples; y must be strictly positive and
/// populated on the whole grid.
GridFn log_derivative(const QuasiSolution& sol, const Antiderivative& A);

enum class FiberClass { E1, E2, undetermined };
enum class TailFlag { finite, infinite, undetermined };
enum class SpectrumClass { E_dot, E_gt, undetermined };

const char* to_string(FiberClass c);
const char* to_string(TailFlag f);
const char* to_string(SpectrumClass c);

/// Finiteness analysis of a one-sided tail of F = int y1^-2: increments over
/// doubling windows must decay by >= 2 (finite) or be nondecreasing
/// (infinite) across three consecutive doublings; anything else stays
/// undetermined rather than guessing.
struct TailResult {
    TailFlag flag = TailFlag::undetermined;
    std::optional<double> limit; // estimated finite limit of |F|
    std::vector<double> increments;
};

struct FiberReport {
    Potential q;
    PrincipalSolution y_plus;  // principal at +inf; generates F
    PrincipalSolution y_minus; // principal at -inf
    GridFn F;                  // F(x) = int_0^x y_plus^-2, F(0) = 0
    TailResult m_plus, m_minus;
    FiberClass fiber_class = FiberClass::undetermined;
    GridFn r_plus, r_minus; // log-derivatives of the two principal solutions
    SpectralReport spectral;
    SpectrumClass lambda0_class = SpectrumClass::undetermined;

    FiberReport(const Potential& q_, PrincipalSolution yp, PrincipalSolution ym, GridFn F_,
                GridFn rp, GridFn rm)
        : q(q_), y_plus(std::move(yp)), y_minus(std::move(ym)), F(std::move(F_)),
          r_plus(std::move(rp)), r_minus(std::move(rm)) {}
};

struct FiberOptions {
    PrincipalOptions principal;
    std::vector<double> L_values; // empty: default schedule within the grid
};

/// Preimage fiber B^-1(q): principal solutions on both sides, F and its
/// tails, the point/interval dichotomy, and the spectral class. Requires a
/// certified nonnegativity probe. Never returns a wrong definite class:
/// inconclusive tails yield 'undetermined'.
FiberReport fiber(const Potential& q, const FiberOptions& opts = {});

/// Log-derivative of theta*y_plus + (1-theta)*y_minus. Endpoints reproduce
/// r_plus (theta=1) and r_minus (theta=0). For an E1 fiber only the
/// endpoints are meaningful and interior theta is rejected.
GridFn fiber_member(const FiberReport& rep, double theta);

struct FiberNorms {
    std::vector<std::pair<double, double>> norm_sq; // (theta, truncated L2 norm^2)
    /// Norm with the off-grid tails restored: beyond a compactly supported q
    /// every member is exactly 1/(x + C) or 0 on each side, so the missing
    /// tail integral equals r(b) - r(a). Absent when q reaches the edges.
    std::vector<std::optional<double>> tail_corrected;
    double special_integral_value = 0.0;
    bool special_integral_exists = false;
};

/// Truncated ||r_theta||^2 per theta next to [q]; members of one fiber share
/// the norm and it equals the special integral up to truncation tails.
FiberNorms fiber_norm_identity(const FiberReport& rep, const std::vector<double>& thetas);

/// ||r||^2 over the grid with jump-aware cell quadrature (the one-sided
/// values of r at atom nodes differ by the atom weight).
double norm_sq_with_jumps(const GridFn& r, const std::vector<Atom>& jumps);

/// sup_x |(Q1 - Q2)(x) - (Q1 - Q2)(a)|: distance between two potentials on
/// one grid through their antiderivatives. Presentations (f, g, atoms) of a
/// distribution are not unique; Q is, up to the constant removed here.
double antiderivative_distance(const Potential& q1, const Potential& q2);

} // namespace miura
