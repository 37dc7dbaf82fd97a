#include "qtt/chebyshev.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

namespace qtt {

using Mat = Eigen::MatrixXd;
using Core = MPS::Core;

namespace {

constexpr double pi = std::numbers::pi;

void check_order(int d) {
  if (d < 0) throw std::invalid_argument("chebyshev: order must be >= 0");
}

MPS ones_like(const MPS& g) {
  return MPS(std::vector<Core>(g.size(), Core{Mat::Ones(1, 1), Mat::Ones(1, 1)}), g.meta);
}

// Index of the last coefficient above the machine-noise floor. Everything
// beyond it only feeds the instability of the evaluation recurrences.
int guarded_order(const std::vector<double>& c) {
  double maxc = 0.0;
  for (double v : c) maxc = std::max(maxc, std::abs(v));
  const double floor = maxc * std::numeric_limits<double>::epsilon();
  int last = 0;
  for (int k = 0; k < static_cast<int>(c.size()); ++k)
    if (std::abs(c[k]) > floor) last = k;
  return last;
}

int trim_with_warning(const ChebyshevExpansion& e, const char* who) {
  const int keep = guarded_order(e.coeffs);
  const int dropped = e.order() - keep;
  if (dropped > 0)
    std::cerr << who << ": dropping " << dropped
              << " trailing coefficients below machine precision\n";
  return keep;
}

}  // namespace

std::vector<double> gauss_nodes(int d) {
  if (d < 1) throw std::invalid_argument("gauss_nodes: d must be >= 1");
  std::vector<double> r(d);
  for (int k = 1; k <= d; ++k) r[k - 1] = std::cos(pi * (2 * k - 1) / (2 * d));
  return r;
}

std::vector<double> lobatto_nodes(int d) {
  if (d < 1) throw std::invalid_argument("lobatto_nodes: d must be >= 1");
  std::vector<double> r(d + 1);
  for (int k = 0; k <= d; ++k) r[k] = std::cos(pi * k / d);
  return r;
}

ChebyshevExpansion interpolation_coefficients(const std::function<double(double)>& f,
                                              int d, Interval iv) {
  check_order(d);
  if (!(iv.a < iv.b))
    throw std::invalid_argument("interpolation_coefficients: bad interval");
  const int m = d + 1;  // node count
  std::vector<double> fx(m);
  for (int i = 0; i < m; ++i) {
    const double r = std::cos(pi * (2 * i + 1) / (2 * m));
    fx[i] = f(iv.mid() + iv.half() * r);
    if (!std::isfinite(fx[i]))
      throw std::invalid_argument("interpolation_coefficients: f not finite at node");
  }
  ChebyshevExpansion e;
  e.interval = iv;
  e.nodes = NodeKind::Gauss;
  e.coeffs.resize(m);
  for (int k = 0; k < m; ++k) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += fx[i] * std::cos(k * pi * (2 * i + 1) / (2 * m));
    e.coeffs[k] = s * (k == 0 ? 1.0 : 2.0) / m;
  }
  return e;
}

std::optional<int> estimate_order(const std::function<double(double)>& f, Interval iv,
                                  double tol, int cap) {
  if (tol <= 0) throw std::invalid_argument("estimate_order: tol must be > 0");
  if (cap < 8) throw std::invalid_argument("estimate_order: cap must be >= 8");
  for (int trial = 8; trial <= cap; trial *= 2) {
    const auto e = interpolation_coefficients(f, trial, iv);
    double maxc = 0.0;
    for (double c : e.coeffs) maxc = std::max(maxc, std::abs(c));
    if (maxc == 0.0) return 0;
    int last = 0;
    for (int k = 0; k <= trial; ++k)
      if (std::abs(e.coeffs[k]) > tol * maxc) last = k;
    if (trial - last >= std::max(2, trial / 8)) return last;
  }
  return std::nullopt;
}

double evaluate(const ChebyshevExpansion& e, double x) {
  const double t = (2.0 * x - e.interval.a - e.interval.b) / e.interval.length();
  double y1 = 0.0, y2 = 0.0;
  for (int k = e.order(); k >= 0; --k) {
    const double y = e.coeffs[k] - y2 + 2.0 * t * y1;
    y2 = y1;
    y1 = y;
  }
  return y1 - t * y2;
}

ChebyshevExpansion differentiate(const ChebyshevExpansion& e) {
  const int d = e.order();
  ChebyshevExpansion out;
  out.interval = e.interval;
  out.nodes = e.nodes;
  if (d == 0) {
    out.coeffs = {0.0};
    return out;
  }
  std::vector<double> b(d + 2, 0.0);
  for (int k = d; k >= 1; --k) b[k - 1] = b[k + 1] + 2.0 * k * e.coeffs[k];
  b[0] *= 0.5;
  b.resize(d);
  const double scale = 2.0 / e.interval.length();
  for (double& v : b) v *= scale;
  out.coeffs = std::move(b);
  return out;
}

ChebyshevExpansion integrate(const ChebyshevExpansion& e, double constant) {
  const int d = e.order();
  ChebyshevExpansion out;
  out.interval = e.interval;
  out.nodes = e.nodes;
  std::vector<double> big(d + 2, 0.0);
  const auto c = [&](int k) { return k <= d ? e.coeffs[k] : 0.0; };
  big[1] = c(0) - 0.5 * c(2);
  for (int k = 2; k <= d + 1; ++k) big[k] = (c(k - 1) - c(k + 1)) / (2.0 * k);
  const double scale = e.interval.half();
  for (double& v : big) v *= scale;
  // Pin F(a): T_k(-1) = (-1)^k.
  double at_a = 0.0;
  for (int k = 1; k <= d + 1; ++k) at_a += big[k] * (k % 2 ? -1.0 : 1.0);
  big[0] = constant - at_a;
  out.coeffs = std::move(big);
  return out;
}

MPS clenshaw_evaluate(const ChebyshevExpansion& e, const MPS& g, Interval g_support,
                      const SimplifyStrategy& strategy, EvalStats* stats) {
  if (e.coeffs.empty()) throw std::invalid_argument("clenshaw_evaluate: empty expansion");
  const int keep = trim_with_warning(e, "clenshaw_evaluate");
  const int n = g.size();
  const MPS gt = affine_rescale(g, g_support, {-1.0, 1.0}, strategy);
  const MPS one = ones_like(g);

  int peak = gt.max_bond();
  MPS y1 = MPS::zero(n, g.meta);  // y_{k+1}
  MPS y2 = MPS::zero(n, g.meta);  // y_{k+2}
  int steps = 0;
  for (int k = keep; k >= 0; --k) {
    MPS y = detail::fit_terms(
        n, {{e.coeffs[k], &one, nullptr}, {-1.0, &y2, nullptr}, {2.0, &gt, &y1}}, strategy,
        g.meta);
    y2 = std::move(y1);
    y1 = std::move(y);
    peak = std::max(peak, y1.max_bond());
    ++steps;
  }
  MPS out = detail::fit_terms(n, {{1.0, &y1, nullptr}, {-1.0, &gt, &y2}}, strategy, g.meta);
  peak = std::max(peak, out.max_bond());
  if (stats) {
    stats->steps = steps;
    stats->peak_chi = peak;
    stats->trimmed = e.order() - keep;
  }
  return out;
}

MPS direct_evaluate(const ChebyshevExpansion& e, const MPS& g, Interval g_support,
                    const SimplifyStrategy& strategy, EvalStats* stats) {
  if (e.coeffs.empty()) throw std::invalid_argument("direct_evaluate: empty expansion");
  const int keep = trim_with_warning(e, "direct_evaluate");
  const int n = g.size();
  const MPS gt = affine_rescale(g, g_support, {-1.0, 1.0}, strategy);
  const MPS one = ones_like(g);

  int peak = gt.max_bond();
  // T_0, T_1, then the three-term recurrence with one simplification per step.
  MPS t_prev = one;
  MPS t_curr = gt;
  MPS acc = detail::fit_terms(
      n,
      keep >= 1 ? std::vector<detail::FitTerm>{{e.coeffs[0], &one, nullptr},
                                               {e.coeffs[1], &gt, nullptr}}
                : std::vector<detail::FitTerm>{{e.coeffs[0], &one, nullptr}},
      strategy, g.meta);
  int steps = std::min(keep, 1);
  for (int k = 2; k <= keep; ++k) {
    MPS t_next =
        detail::fit_terms(n, {{2.0, &gt, &t_curr}, {-1.0, &t_prev, nullptr}}, strategy, g.meta);
    acc = detail::fit_terms(
        n, {{1.0, &acc, nullptr}, {e.coeffs[k], &t_next, nullptr}}, strategy, g.meta);
    t_prev = std::move(t_curr);
    t_curr = std::move(t_next);
    peak = std::max({peak, t_curr.max_bond(), acc.max_bond()});
    ++steps;
  }
  if (stats) {
    stats->steps = steps;
    stats->peak_chi = peak;
    stats->trimmed = e.order() - keep;
  }
  return acc;
}

}  // namespace qtt
