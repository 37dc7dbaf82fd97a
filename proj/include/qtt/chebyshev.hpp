#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qtt/algebra.hpp"
#include "qtt/mps.hpp"

namespace qtt {

enum class NodeKind { Gauss, Lobatto };

// Truncated Chebyshev series sum_k c_k T_k(t) with t the affine image of
// [a, b) on [-1, 1]. Order d means d+1 stored coefficients.
struct ChebyshevExpansion {
  std::vector<double> coeffs;
  Interval interval{-1.0, 1.0};
  NodeKind nodes = NodeKind::Gauss;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Zeros of T_d, descending: cos(pi(2k-1)/(2d)), k = 1..d.
std::vector<double> gauss_nodes(int d);

// Extrema of T_d on [-1,1] (d+1 values), descending: cos(k pi / d), k = 0..d.
std::vector<double> lobatto_nodes(int d);

// Order-d interpolant through the d+1 mapped Gauss nodes. The k = 0
// coefficient carries the 1/2 factor, so evaluate() reproduces f at every
// node to machine precision.
ChebyshevExpansion interpolation_coefficients(const std::function<double(double)>& f,
                                              int d, Interval iv);

// Doubles a trial order until the trailing eighth of the coefficients drops
// below tol * max|c_k|. Empty when no order <= cap converges (expected for
// discontinuous functions).
std::optional<int> estimate_order(const std::function<double(double)>& f, Interval iv,
                                  double tol, int cap = 2048);

double evaluate(const ChebyshevExpansion& e, double x);

// d/dx via c'_{k-1} = c'_{k+1} + 2k c_k, scaled by 2/(b-a).
ChebyshevExpansion differentiate(const ChebyshevExpansion& e);

// Antiderivative with F(a) = constant; right inverse of differentiate.
ChebyshevExpansion integrate(const ChebyshevExpansion& e, double constant = 0.0);

struct EvalStats {
  int steps = 0;
  int peak_chi = 0;  // largest intermediate bond, rescaled argument included
  int trimmed = 0;   // trailing coefficients dropped by the machine-eps guard
};

// Clenshaw recurrence on MPS: y_k = c_k*1 - y_{k+2} + 2*gt.*y_{k+1} with one
// simplification per step, result y_0 - gt.*y_1. g_support must bound the
// values of g; a loose bound stretches [-1,1] and costs accuracy.
MPS clenshaw_evaluate(const ChebyshevExpansion& e, const MPS& g, Interval g_support,
                      const SimplifyStrategy& strategy, EvalStats* stats = nullptr);

// Same series summed term by term from the T_k recurrence. Kept as the
// baseline Clenshaw is compared against; intermediate bonds run higher.
MPS direct_evaluate(const ChebyshevExpansion& e, const MPS& g, Interval g_support,
                    const SimplifyStrategy& strategy, EvalStats* stats = nullptr);

}  // namespace qtt
