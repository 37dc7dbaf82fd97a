#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtt/corpus.hpp"
#include "qtt/domain.hpp"
#include "qtt/mps.hpp"

namespace qtt {

// One grid point of an experiment. Deterministic given the seed except for
// runtime_ms. d_or_chi holds the interpolation order for Chebyshev methods
// and the rank cap for cross interpolation.
struct BenchRecord {
  std::string function;
  std::string method;
  int n = 0;
  int d_or_chi = 0;
  double epsilon = 0.0;
  int m = 1;
  std::string order = "serial";
  std::uint64_t seed = 0;
  double error = 0.0;
  double error_std = 0.0;
  int chi_max = 0;
  double runtime_ms = 0.0;
  std::uint64_t eval_count = 0;
  std::vector<std::string> flags;
};

nlohmann::json to_json(const BenchRecord& r);
BenchRecord record_from_json(const nlohmann::json& j);

void write_jsonl(const std::vector<BenchRecord>& records, std::ostream& out);
std::vector<BenchRecord> read_jsonl(std::istream& in);

// Flat CSV with one column per record field; flags joined by ';'.
void write_csv(const std::vector<BenchRecord>& records, std::ostream& out);

std::string order_name(QubitOrder order);
QubitOrder order_from_name(const std::string& name);

// Builds one corpus function with one method and measures it.
//   clenshaw | direct  Chebyshev series on the grid identity, univariate only
//   svd                dense load + successive SVD, total qubits <= 24
//   cross              rank-adaptive cross interpolation (any dimension)
//   analytic           closed-form encoding (available for exp)
// degree < 0 asks for an order estimate; failure flags the record and falls
// back to the estimator cap.
struct LoadJob {
  std::string function;
  std::string method = "clenshaw";
  int n = 10;
  int m = 1;
  QubitOrder order = QubitOrder::Serial;
  int degree = -1;
  int chi_thr = 64;
  double eps = 1e-10;
  std::uint64_t seed = 0;
  int batches = 10;
  int samples_per_batch = 1000;
};

struct LoadResult {
  MPS state;
  BenchRecord record;
};

LoadResult run_load(const LoadJob& job);

// f(g(x)) via the Clenshaw evaluation of an outer 1-D function on an inner
// MPS assembled from exact encodings. The support bound of the inner values
// is mandatory; the outer series lives on it.
struct InnerRecipe {
  std::string kind = "x";  // x | sum | sum-sq | sq-sum
  int m = 1;
  int n = 8;
  Interval interval{-1.0, 1.0};
  QubitOrder order = QubitOrder::Serial;
};

struct ComposeManifest {
  std::string outer = "exp-neg";  // exp-neg | identity | univariate corpus id
  std::optional<int> degree;      // absent = estimate from the tolerance
  InnerRecipe inner;
  std::optional<Interval> support;
  double eps = 1e-10;
  std::uint64_t seed = 0;
  int batches = 10;
  int samples_per_batch = 1000;
};

ComposeManifest manifest_from_json(const nlohmann::json& j);

struct ComposeResult {
  MPS state;
  BenchRecord record;
};

ComposeResult run_compose(const ComposeManifest& manifest);

// Cartesian product of the axes, one record per point per seed. Failures
// become flagged records instead of aborting the sweep.
struct ExperimentSpec {
  std::string function;
  std::string method = "clenshaw";
  std::vector<int> n_values{10};
  std::vector<int> d_values{-1};  // degree or chi_thr, method-dependent
  std::vector<double> eps_values{1e-10};
  std::vector<int> m_values{1};
  std::vector<QubitOrder> orders{QubitOrder::Serial};
  std::vector<std::uint64_t> seeds{0};
  int batches = 10;
  int samples_per_batch = 1000;
};

ExperimentSpec experiment_from_json(const nlohmann::json& j);

std::vector<BenchRecord> run_experiment(const ExperimentSpec& spec);

// Per-group convergence rates: error against d_or_chi within each
// (function, method, order, m, n, epsilon) group holding at least four
// distinct abscissae. Model with the smaller log-space residual wins.
struct FitRow {
  std::string function, method, order;
  int m = 1, n = 0;
  double epsilon = 0.0;
  std::string model;  // "exponential" | "algebraic"
  double rate = 0.0;
  double residual_rms = 0.0;
  int points = 0;
};

std::vector<FitRow> fit_report(const std::vector<BenchRecord>& records);
void write_fit_csv(const std::vector<FitRow>& rows, std::ostream& out);

}  // namespace qtt
