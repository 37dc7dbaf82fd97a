#include "qtt/corpus.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtt {

namespace {

// Kink/jump sits on an off-center grid point so the representation is not
// accidentally trivial.
constexpr double kXc = 0.5 + 1.0 / 32.0;
constexpr double kSigma = 1.0 / 3.0;
constexpr double kOscEps = 1e-2;

double sum_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double sum_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double only(std::span<const double> x) {
  if (x.size() != 1)
    throw std::invalid_argument("corpus: univariate function got m != 1");
  return x[0];
}

std::vector<CorpusFunction> make_registry() {
  std::vector<CorpusFunction> r;
  r.push_back({"gaussian", Smoothness::Analytic, {-1.0, 1.0}, false,
               [](std::span<const double> x) {
                 const double t = only(x) / (2.0 * kSigma);
                 return std::exp(-t * t) /
                        (kSigma * std::sqrt(2.0 * std::numbers::pi));
               }});
  r.push_back({"oscillatory", Smoothness::Analytic, {-1.0, 1.0}, false,
               [](std::span<const double> x) {
                 const double v = only(x);
                 return std::cos(1.0 / (v * v + kOscEps));
               }});
  r.push_back({"abs", Smoothness::PiecewiseSmooth, {0.0, 1.0}, false,
               [](std::span<const double> x) { return std::abs(only(x) - kXc); }});
  r.push_back({"step", Smoothness::Discontinuous, {0.0, 1.0}, false,
               [](std::span<const double> x) {
                 return only(x) >= kXc ? 1.0 : 0.0;
               }});
  r.push_back({"exp", Smoothness::Analytic, {0.0, 1.0}, false,
               [](std::span<const double> x) { return std::exp(only(x)); }});
  r.push_back({"gaussian-product", Smoothness::Analytic, {-1.0, 1.0}, true,
               [](std::span<const double> x) { return std::exp(-sum_sq(x)); }});
  r.push_back({"gaussian-squeezed", Smoothness::Analytic, {-1.0, 1.0}, true,
               [](std::span<const double> x) {
                 const double s = sum_of(x);
                 return std::exp(-s * s);
               }});
  r.push_back({"abs-sum", Smoothness::PiecewiseSmooth, {-1.0, 1.0}, true,
               [](std::span<const double> x) { return std::abs(sum_of(x) - kXc); }});
  r.push_back({"step-sum", Smoothness::Discontinuous, {-1.0, 1.0}, true,
               [](std::span<const double> x) {
                 return sum_of(x) >= kXc ? 1.0 : 0.0;
               }});
  return r;
}

const std::vector<CorpusFunction>& registry() {
  static const std::vector<CorpusFunction> r = make_registry();
  return r;
}

}  // namespace

const CorpusFunction& corpus_function(const std::string& id) {
  for (const CorpusFunction& f : registry())
    if (f.id == id) return f;
  throw std::invalid_argument("corpus: unknown function " + id);
}

std::vector<std::string> corpus_ids() {
  std::vector<std::string> ids;
  for (const CorpusFunction& f : registry()) ids.push_back(f.id);
  return ids;
}

DomainMeta default_domain(const CorpusFunction& f, int n, int m,
                          QubitOrder order) {
  if (m < 1) throw std::invalid_argument("default_domain: m must be >= 1");
  if (!f.multivariate && m != 1)
    throw std::invalid_argument("default_domain: " + f.id + " is univariate");
  if (m == 1 && order == QubitOrder::Serial)
    return univariate_domain(n, f.default_interval);
  return multivariate_domain(m, n, f.default_interval, order);
}

}  // namespace qtt
