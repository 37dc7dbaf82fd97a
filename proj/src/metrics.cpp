#include "qtt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace qtt {

namespace {

struct Accum {
  Norm norm;
  double sum = 0.0;
  double mx = 0.0;
  std::uint64_t count = 0;

  void add(double d) {
    d = std::abs(d);
    ++count;
    switch (norm) {
      case Norm::L1: sum += d; break;
      case Norm::L2: sum += d * d; break;
      case Norm::LInf: mx = std::max(mx, d); break;
    }
  }

  // Count-normalized figure: mean |d|, rms d, or max |d|.
  double finish() const {
    if (count == 0) return 0.0;
    switch (norm) {
      case Norm::L1: return sum / static_cast<double>(count);
      case Norm::L2: return std::sqrt(sum / static_cast<double>(count));
      case Norm::LInf: return mx;
    }
    return 0.0;
  }
};

// Depth-first sweep over every grid point of one or two chains. Environments
// are kept per depth so a leaf costs one small matvec, not a full element().
class Walker {
 public:
  Walker(const MPS& a, const MPS* b, const BlackBox* bb, Accum& acc)
      : a_(a), b_(b), bb_(bb), acc_(acc) {
    const int n = a.size();
    ea_.resize(n + 1);
    ea_[0] = Eigen::RowVectorXd::Ones(1);
    for (int k = 0; k < n; ++k) ea_[k + 1].resize(a.chi_right(k));
    if (b_) {
      eb_.resize(n + 1);
      eb_[0] = Eigen::RowVectorXd::Ones(1);
      for (int k = 0; k < n; ++k) eb_[k + 1].resize(b_->chi_right(k));
    }
    if (bb_) bits_.resize(n);
  }

  void run() { rec(0); }

 private:
  void rec(int k) {
    const int n = a_.size();
    if (k == n) {
      const double ref = b_ ? eb_[n](0) : (*bb_)(bits_);
      acc_.add(ea_[n](0) - ref);
      return;
    }
    for (int s = 0; s < 2; ++s) {
      ea_[k + 1].noalias() = ea_[k] * a_.cores[k][s];
      if (b_) eb_[k + 1].noalias() = eb_[k] * b_->cores[k][s];
      if (bb_) bits_[k] = s;
      rec(k + 1);
    }
  }

  const MPS& a_;
  const MPS* b_;
  const BlackBox* bb_;
  Accum& acc_;
  std::vector<Eigen::RowVectorXd> ea_, eb_;
  std::vector<int> bits_;
};

SampleMode resolve_mode(SampleMode mode, int n) {
  if (mode == SampleMode::Auto)
    return n <= 24 ? SampleMode::Exhaustive : SampleMode::Sampled;
  return mode;
}

ErrorEstimate exhaustive_distance(const MPS& approx, const MPS* ref_mps,
                                  const BlackBox* ref_bb, Norm norm) {
  const int n = approx.size();
  if (n > 28)
    throw std::invalid_argument("distance: exhaustive sweep capped at 28 qubits");
  Accum acc{norm};
  Walker(approx, ref_mps, ref_bb, acc).run();
  return ErrorEstimate{acc.finish(), 0.0, acc.count, true};
}

ErrorEstimate sampled_distance(
    const MPS& approx, const std::function<double(std::span<const int>)>& ref,
    Norm norm, const SamplePlan& plan) {
  const int n = approx.size();
  if (plan.batches < 1 || plan.batch_size < 1)
    throw std::invalid_argument("distance: batches and batch_size must be positive");
  const int words = (n + 63) / 64;
  std::vector<double> per_batch(plan.batches);
  std::vector<int> bits(n);
  for (int b = 0; b < plan.batches; ++b) {
    // One generator per batch; a bigger batch_size replays the same prefix.
    std::mt19937_64 gen(plan.seed + 0x9E3779B97F4A7C15ULL *
                                        static_cast<std::uint64_t>(b + 1));
    Accum acc{norm};
    for (int i = 0; i < plan.batch_size; ++i) {
      for (int w = 0; w < words; ++w) {
        std::uint64_t word = gen();
        const int hi = std::min(n, 64 * (w + 1));
        for (int k = 64 * w; k < hi; ++k) {
          bits[k] = static_cast<int>(word & 1);
          word >>= 1;
        }
      }
      acc.add(approx.element(bits) - ref(bits));
    }
    per_batch[b] = acc.finish();
  }
  double mean = 0.0;
  for (double v : per_batch) mean += v;
  mean /= plan.batches;
  double var = 0.0;
  for (double v : per_batch) var += (v - mean) * (v - mean);
  const double sd =
      plan.batches > 1 ? std::sqrt(var / (plan.batches - 1)) : 0.0;
  return ErrorEstimate{
      mean, sd,
      static_cast<std::uint64_t>(plan.batches) *
          static_cast<std::uint64_t>(plan.batch_size),
      false};
}

}  // namespace

ErrorEstimate distance(const MPS& approx, const BlackBox& ref, Norm norm,
                       const SamplePlan& plan) {
  if (approx.size() != ref.bits())
    throw std::invalid_argument("distance: qubit count mismatch");
  if (resolve_mode(plan.mode, approx.size()) == SampleMode::Exhaustive)
    return exhaustive_distance(approx, nullptr, &ref, norm);
  return sampled_distance(
      approx, [&ref](std::span<const int> bits) { return ref(bits); }, norm,
      plan);
}

ErrorEstimate distance(const MPS& approx, const MPS& ref, Norm norm,
                       const SamplePlan& plan) {
  if (approx.size() != ref.size())
    throw std::invalid_argument("distance: qubit count mismatch");
  if (resolve_mode(plan.mode, approx.size()) == SampleMode::Exhaustive)
    return exhaustive_distance(approx, &ref, nullptr, norm);
  return sampled_distance(
      approx, [&ref](std::span<const int> bits) { return ref.element(bits); },
      norm, plan);
}

double l2_distance_exact(const MPS& a, const MPS& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("l2_distance_exact: size mismatch");
  const double aa = inner(a, a);
  const double bb = inner(b, b);
  const double ab = inner(a, b);
  double r = aa - 2.0 * ab + bb;
  if (r < 0.0) {
    const double scale = aa + bb;
    if (r < -100.0 * std::numeric_limits<double>::epsilon() * scale)
      std::fprintf(stderr,
                   "l2_distance_exact: radicand %.3e beyond roundoff of the "
                   "operands, clamping to zero\n",
                   r);
    r = 0.0;
  }
  return std::sqrt(r);
}

ConvergenceFit fit_convergence(std::span<const double> x,
                               std::span<const double> err, FitModel model,
                               double floor) {
  if (x.size() != err.size())
    throw std::invalid_argument("fit_convergence: length mismatch");
  std::vector<double> u, v, xs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(err[i] > floor) || !std::isfinite(err[i]) || !std::isfinite(x[i]))
      continue;
    if (model == FitModel::Algebraic && !(x[i] > 0.0))
      throw std::invalid_argument("fit_convergence: algebraic fit needs x > 0");
    u.push_back(model == FitModel::Exponential ? x[i] : std::log(x[i]));
    v.push_back(std::log(err[i]));
    xs.push_back(x[i]);
  }
  const int m = static_cast<int>(u.size());
  if (m < 4)
    throw std::invalid_argument(
        "fit_convergence: fewer than four points above the floor");
  double ub = 0.0, vb = 0.0;
  for (int i = 0; i < m; ++i) {
    ub += u[i];
    vb += v[i];
  }
  ub /= m;
  vb /= m;
  double suu = 0.0, suv = 0.0;
  for (int i = 0; i < m; ++i) {
    suu += (u[i] - ub) * (u[i] - ub);
    suv += (u[i] - ub) * (v[i] - vb);
  }
  if (suu == 0.0)
    throw std::invalid_argument("fit_convergence: degenerate abscissa");
  const double beta = suv / suu;
  const double intercept = vb - beta * ub;
  double rss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double resid = v[i] - (intercept + beta * u[i]);
    rss += resid * resid;
  }
  ConvergenceFit fit;
  fit.model = model;
  fit.rate = model == FitModel::Exponential ? std::exp(-beta) : -beta;
  fit.log_prefactor = intercept;
  fit.residual_rms = std::sqrt(rss / m);
  fit.points_used = m;
  fit.x_min = *std::min_element(xs.begin(), xs.end());
  fit.x_max = *std::max_element(xs.begin(), xs.end());
  return fit;
}

}  // namespace qtt
