#pragma once

#include <vector>

#include "qtt/mps.hpp"

namespace qtt {

// Exact closed-form loaders. All operate on the uniform grid
// x_i = a + i*(b-a)/2^n over the half-open interval [a, b).

// f(x) = x, bond dimension 2.
MPS x_encoding(int n, Interval iv);

// f(x) = value, bond dimension 1. value = 0 gives the canonical zero state.
MPS constant_encoding(int n, double value, Interval iv = {0.0, 1.0});

struct PolynomialSpec {
  std::vector<double> coeffs;  // p(x) = sum_k coeffs[k] x^k
  Interval interval{0.0, 1.0};
};

// Which end carries the coefficient contraction; both encode the same
// polynomial with bond dimension deg+1.
enum class CoeffSide { Left, Right };

// Exact degree-d polynomial, bonds <= d+1. Degree capped at 30 (binomial
// tables in doubles degrade beyond that).
MPS polynomial_encoding(const PolynomialSpec& spec, int n,
                        CoeffSide form = CoeffSide::Left);

// f(x) = prefactor * e^(lambda x), bond dimension 1.
MPS exponential_encoding(int n, Interval iv, double lambda, double prefactor = 1.0);

enum class TrigKind { Sin, Cos };

// f(x) = sin/cos(omega x + phase), bond dimension 2 (planar rotation cores).
MPS trig_encoding(int n, Interval iv, TrigKind kind, double omega, double phase = 0.0);

}  // namespace qtt
