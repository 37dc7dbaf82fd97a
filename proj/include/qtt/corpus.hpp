#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qtt/domain.hpp"

namespace qtt {

enum class Smoothness {
  Analytic,         // exponential interpolation convergence expected
  PiecewiseSmooth,  // algebraic convergence
  Discontinuous,    // Gibbs floor, polynomial methods stall
};

// Named closed-form test function. Univariate entries accept exactly one
// coordinate; multivariate entries accept any m >= 1.
struct CorpusFunction {
  std::string id;
  Smoothness smoothness;
  Interval default_interval;
  bool multivariate = false;
  std::function<double(std::span<const double>)> eval;

  double operator()(std::span<const double> x) const { return eval(x); }
  double operator()(double x) const { return eval(std::span<const double>(&x, 1)); }
};

// Lookup by id; throws on unknown names. Available ids: gaussian,
// oscillatory, abs, step, exp, gaussian-product, gaussian-squeezed,
// abs-sum, step-sum.
const CorpusFunction& corpus_function(const std::string& id);
std::vector<std::string> corpus_ids();

// Grid metadata on the function's default interval: n qubits per dimension,
// m dimensions. Univariate functions require m = 1.
DomainMeta default_domain(const CorpusFunction& f, int n, int m = 1,
                          QubitOrder order = QubitOrder::Serial);

}  // namespace qtt
