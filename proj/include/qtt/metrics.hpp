#pragma once

#include <cstdint>
#include <span>

#include "qtt/mps.hpp"
#include "qtt/tci.hpp"

namespace qtt {

enum class Norm { L1, L2, LInf };

enum class SampleMode {
  Auto,        // exhaustive up to 24 qubits, sampled beyond
  Exhaustive,  // full grid sweep; guarded at 28 qubits
  Sampled,     // batched uniform sampling
};

// Batched sampling plan. Batch b draws from its own generator seeded from
// (seed, b), and samples are consumed as a prefix of that stream: enlarging
// batch_size keeps the earlier draws, so a per-batch max (LInf) can only
// grow with batch_size.
struct SamplePlan {
  SampleMode mode = SampleMode::Auto;
  int batches = 10;
  int batch_size = 1000;
  std::uint64_t seed = 0;
};

struct ErrorEstimate {
  double value = 0.0;    // exhaustive figure, or mean of the per-batch figures
  double std_dev = 0.0;  // sample std over batches; 0 when exhaustive
  std::uint64_t samples = 0;
  bool exhaustive = false;
};

// Grid-normalized distance between an approximation and a reference:
// L1 = (1/N) sum |diff|, L2 = sqrt((1/N) sum diff^2), LInf = max |diff|.
// Sampled estimates replace the grid average by a batch average and report
// the spread over batches in std_dev.
ErrorEstimate distance(const MPS& approx, const BlackBox& ref, Norm norm,
                       const SamplePlan& plan = {});
ErrorEstimate distance(const MPS& approx, const MPS& ref, Norm norm,
                       const SamplePlan& plan = {});

// Unnormalized ||a - b||_2 from three inner products, without forming the
// difference state. The radicand is clamped at zero (with a stderr note when
// the deficit exceeds roundoff) since cancellation can drive it slightly
// negative when a and b nearly coincide.
double l2_distance_exact(const MPS& a, const MPS& b);

enum class FitModel {
  Exponential,  // err ~ C * rho^{-x}, rate = rho
  Algebraic,    // err ~ C * x^{-nu},  rate = nu
};

struct ConvergenceFit {
  FitModel model;
  double rate;
  double log_prefactor;  // log C
  double residual_rms;   // in log space
  int points_used;
  double x_min, x_max;   // range of the points that entered the fit
};

// Least-squares fit of log err against x (Exponential) or log x (Algebraic).
// Points with err <= floor are treated as converged-to-noise and excluded;
// at least four points must survive. Algebraic fits require positive x.
ConvergenceFit fit_convergence(std::span<const double> x,
                               std::span<const double> err, FitModel model,
                               double floor = 0.0);

}  // namespace qtt
