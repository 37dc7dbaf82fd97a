#include "qtt/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qtt/algebra.hpp"
#include "qtt/chebyshev.hpp"
#include "qtt/encodings.hpp"
#include "qtt/metrics.hpp"
#include "qtt/tci.hpp"

namespace qtt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Error against the closed form: exhaustive while the full grid is cheap,
// Monte Carlo batches beyond. Flags record which one happened. err_scale is
// what the method promises: sqrt(eps) for Frobenius-budget truncation,
// the halting tolerance for cross interpolation.
void attach_error(BenchRecord& rec, const MPS& state, const BlackBox& ref,
                  int batches, int samples_per_batch, double err_scale) {
  SamplePlan plan;
  plan.batches = batches;
  plan.batch_size = samples_per_batch;
  plan.seed = rec.seed;
  const ErrorEstimate est = distance(state, ref, Norm::LInf, plan);
  rec.error = est.value;
  rec.error_std = est.std_dev;
  rec.flags.push_back(est.exhaustive ? "exhaustive" : "sampled");
  if (rec.error > std::max(1e-6, 1000.0 * err_scale))
    rec.flags.push_back("non-converged");
}

std::function<double(double)> univariate_eval(const CorpusFunction& f) {
  return [&f](double x) { return f(x); };
}

}  // namespace

std::string order_name(QubitOrder order) {
  return order == QubitOrder::Interleaved ? "interleaved" : "serial";
}

QubitOrder order_from_name(const std::string& name) {
  if (name == "serial") return QubitOrder::Serial;
  if (name == "interleaved") return QubitOrder::Interleaved;
  throw std::invalid_argument("unknown qubit order " + name);
}

nlohmann::json to_json(const BenchRecord& r) {
  return nlohmann::json{{"function", r.function},
                        {"method", r.method},
                        {"n", r.n},
                        {"d_or_chi", r.d_or_chi},
                        {"epsilon", r.epsilon},
                        {"m", r.m},
                        {"order", r.order},
                        {"seed", r.seed},
                        {"error", r.error},
                        {"error_std", r.error_std},
                        {"chi_max", r.chi_max},
                        {"runtime_ms", r.runtime_ms},
                        {"eval_count", r.eval_count},
                        {"flags", r.flags}};
}

BenchRecord record_from_json(const nlohmann::json& j) {
  BenchRecord r;
  r.function = j.at("function").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.n = j.at("n").get<int>();
  r.d_or_chi = j.at("d_or_chi").get<int>();
  r.epsilon = j.at("epsilon").get<double>();
  r.m = j.at("m").get<int>();
  r.order = j.at("order").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.error = j.at("error").get<double>();
  r.error_std = j.at("error_std").get<double>();
  r.chi_max = j.at("chi_max").get<int>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  r.eval_count = j.at("eval_count").get<std::uint64_t>();
  r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

void write_jsonl(const std::vector<BenchRecord>& records, std::ostream& out) {
  for (const BenchRecord& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw std::runtime_error("write_jsonl: write failed");
}

std::vector<BenchRecord> read_jsonl(std::istream& in) {
  std::vector<BenchRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

void write_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << "function,method,n,d_or_chi,epsilon,m,order,seed,error,error_std,"
         "chi_max,runtime_ms,eval_count,flags\n";
  out << std::setprecision(17);
  for (const BenchRecord& r : records) {
    out << r.function << ',' << r.method << ',' << r.n << ',' << r.d_or_chi
        << ',' << r.epsilon << ',' << r.m << ',' << r.order << ',' << r.seed
        << ',' << r.error << ',' << r.error_std << ',' << r.chi_max << ','
        << r.runtime_ms << ',' << r.eval_count << ',';
    for (std::size_t i = 0; i < r.flags.size(); ++i)
      out << (i ? ";" : "") << r.flags[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed");
}

LoadResult run_load(const LoadJob& job) {
  const CorpusFunction& f = corpus_function(job.function);
  const DomainMeta meta = default_domain(f, job.n, job.m, job.order);

  BenchRecord rec;
  rec.function = job.function;
  rec.method = job.method;
  rec.n = job.n;
  rec.m = job.m;
  rec.order = order_name(job.order);
  rec.seed = job.seed;
  rec.epsilon = job.eps;

  MPS state = MPS::zero(meta.total_qubits());
  const auto t0 = Clock::now();
  if (job.method == "clenshaw" || job.method == "direct") {
    if (job.m != 1)
      throw std::invalid_argument(
          "run_load: " + job.method + " is univariate; compose handles m > 1");
    const Interval iv = f.default_interval;
    int d = job.degree;
    if (d < 0) {
      const std::optional<int> est =
          estimate_order(univariate_eval(f), iv, job.eps, 1024);
      if (est) {
        d = *est;
      } else {
        d = 1024;
        rec.flags.push_back("order-estimate-failed");
      }
    }
    const ChebyshevExpansion e =
        interpolation_coefficients(univariate_eval(f), d, iv);
    const MPS g = x_encoding(job.n, iv);
    const SimplifyStrategy strategy = SimplifyStrategy::with_tolerance(job.eps);
    state = job.method == "clenshaw" ? clenshaw_evaluate(e, g, iv, strategy)
                                     : direct_evaluate(e, g, iv, strategy);
    rec.d_or_chi = d;
    rec.eval_count = static_cast<std::uint64_t>(d) + 1;
  } else if (job.method == "svd") {
    const int total = meta.total_qubits();
    if (total > 24)
      throw std::invalid_argument("run_load: svd baseline capped at 24 qubits");
    const std::int64_t size = std::int64_t(1) << total;
    Eigen::VectorXd values(size);
    std::vector<int> bits(total);
    for (std::int64_t i = 0; i < size; ++i) {
      for (int k = 0; k < total; ++k)
        bits[k] = static_cast<int>((i >> (total - 1 - k)) & 1);
      values(i) = f(std::span<const double>(grid_coordinates(meta, bits)));
    }
    state = from_dense(values, job.eps, std::numeric_limits<int>::max(), meta);
    rec.eval_count = static_cast<std::uint64_t>(size);
  } else if (job.method == "cross") {
    const BlackBox bb = black_box_from_function(f.eval, meta);
    CrossOptions opt;
    opt.chi_thr = job.chi_thr;
    opt.halt_tol = job.eps;
    opt.seed = job.seed;
    CrossDiagnostics diag;
    state = cross_interpolate(bb, meta, opt, &diag);
    rec.d_or_chi = job.chi_thr;
    rec.eval_count = diag.eval_count;
    if (diag.halt == HaltReason::Saturated) rec.flags.push_back("saturated");
    if (diag.halt == HaltReason::MaxSweeps) rec.flags.push_back("max-sweeps");
  } else if (job.method == "analytic") {
    if (job.function == "exp")
      state = exponential_encoding(job.n, f.default_interval, 1.0);
    else
      throw std::invalid_argument("run_load: no closed-form encoding for " +
                                  job.function);
  } else {
    throw std::invalid_argument("run_load: unknown method " + job.method);
  }
  rec.runtime_ms = ms_since(t0);
  rec.chi_max = state.max_bond();

  const BlackBox ref = black_box_from_function(f.eval, meta, false);
  const double err_scale =
      job.method == "cross" ? job.eps : std::sqrt(job.eps);
  attach_error(rec, state, ref, job.batches, job.samples_per_batch, err_scale);
  return LoadResult{std::move(state), std::move(rec)};
}

namespace {

MPS build_inner(const InnerRecipe& r) {
  if (r.m < 1) throw std::invalid_argument("compose: inner m must be >= 1");
  if (r.kind == "x") {
    if (r.m != 1) throw std::invalid_argument("compose: inner x needs m = 1");
    return x_encoding(r.n, r.interval);
  }
  const DomainMeta meta =
      r.m == 1 ? univariate_domain(r.n, r.interval)
               : multivariate_domain(r.m, r.n, r.interval, r.order);
  const SimplifyStrategy assemble = SimplifyStrategy::exact();
  const auto spread = [&meta, &assemble, &r](const MPS& factor) {
    if (r.m == 1) {
      MPS single = factor;
      single.meta = meta;
      return single;
    }
    LinearCombination lc;
    for (int i = 0; i < r.m; ++i)
      lc.terms.emplace_back(1.0, embed_factor(factor, i, meta));
    MPS sum = combine(lc, assemble);
    sum.meta = meta;
    return sum;
  };
  if (r.kind == "sum") return spread(x_encoding(r.n, r.interval));
  if (r.kind == "sum-sq")
    return spread(
        polynomial_encoding(PolynomialSpec{{0.0, 0.0, 1.0}, r.interval}, r.n));
  if (r.kind == "sq-sum") {
    const MPS s = spread(x_encoding(r.n, r.interval));
    MPS sq = hadamard(s, s, assemble);
    sq.meta = meta;
    return sq;
  }
  throw std::invalid_argument("compose: unknown inner kind " + r.kind);
}

std::function<double(std::span<const double>)> inner_closed_form(
    const std::string& kind) {
  if (kind == "x")
    return [](std::span<const double> x) { return x[0]; };
  if (kind == "sum")
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    };
  if (kind == "sum-sq")
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s;
    };
  if (kind == "sq-sum")
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return s * s;
    };
  throw std::invalid_argument("compose: unknown inner kind " + kind);
}

std::function<double(double)> outer_function(const std::string& name) {
  if (name == "exp-neg") return [](double t) { return std::exp(-t); };
  if (name == "identity") return [](double t) { return t; };
  const CorpusFunction& f = corpus_function(name);
  if (f.multivariate)
    throw std::invalid_argument("compose: outer must be univariate, got " + name);
  return univariate_eval(f);
}

}  // namespace

ComposeManifest manifest_from_json(const nlohmann::json& j) {
  ComposeManifest man;
  man.outer = j.value("outer", man.outer);
  if (j.contains("degree")) man.degree = j.at("degree").get<int>();
  if (j.contains("inner")) {
    const nlohmann::json& in = j.at("inner");
    man.inner.kind = in.value("kind", man.inner.kind);
    man.inner.m = in.value("m", man.inner.m);
    man.inner.n = in.value("n", man.inner.n);
    if (in.contains("interval")) {
      const auto& iv = in.at("interval");
      man.inner.interval = Interval{iv.at(0).get<double>(), iv.at(1).get<double>()};
    }
    if (in.contains("layout"))
      man.inner.order = order_from_name(in.at("layout").get<std::string>());
  }
  if (j.contains("support")) {
    const auto& sp = j.at("support");
    man.support = Interval{sp.at(0).get<double>(), sp.at(1).get<double>()};
  }
  man.eps = j.value("eps", man.eps);
  man.seed = j.value("seed", man.seed);
  man.batches = j.value("batches", man.batches);
  man.samples_per_batch = j.value("samples", man.samples_per_batch);
  return man;
}

ComposeResult run_compose(const ComposeManifest& manifest) {
  if (!manifest.support)
    throw std::invalid_argument("compose: missing support bound");
  const std::function<double(double)> h = outer_function(manifest.outer);
  const auto g_closed = inner_closed_form(manifest.inner.kind);

  BenchRecord rec;
  rec.function = manifest.outer + "(" + manifest.inner.kind + ")";
  rec.method = "compose";
  rec.n = manifest.inner.n;
  rec.m = manifest.inner.m;
  rec.order = order_name(manifest.inner.order);
  rec.seed = manifest.seed;
  rec.epsilon = manifest.eps;

  const auto t0 = Clock::now();
  const MPS g = build_inner(manifest.inner);
  int d = manifest.degree.value_or(-1);
  if (d < 0) {
    const std::optional<int> est =
        estimate_order(h, *manifest.support, manifest.eps, 512);
    if (est) {
      d = *est;
    } else {
      d = 512;
      rec.flags.push_back("order-estimate-failed");
    }
  }
  const ChebyshevExpansion e = interpolation_coefficients(h, d, *manifest.support);
  MPS state = clenshaw_evaluate(e, g, *manifest.support,
                                SimplifyStrategy::with_tolerance(manifest.eps));
  rec.runtime_ms = ms_since(t0);
  state.meta = g.meta;
  rec.d_or_chi = d;
  rec.eval_count = static_cast<std::uint64_t>(d) + 1;
  rec.chi_max = state.max_bond();

  const BlackBox ref = black_box_from_function(
      [h, g_closed](std::span<const double> x) { return h(g_closed(x)); },
      *g.meta, false);
  attach_error(rec, state, ref, manifest.batches, manifest.samples_per_batch,
               std::sqrt(manifest.eps));
  return ComposeResult{std::move(state), std::move(rec)};
}

ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.function = j.at("function").get<std::string>();
  spec.method = j.value("method", spec.method);
  const auto ints = [&j](const char* key, std::vector<int> dflt) {
    if (!j.contains(key)) return dflt;
    if (j.at(key).is_array()) return j.at(key).get<std::vector<int>>();
    return std::vector<int>{j.at(key).get<int>()};
  };
  spec.n_values = ints("n", spec.n_values);
  spec.d_values = ints("d", spec.d_values);
  spec.m_values = ints("m", spec.m_values);
  if (j.contains("eps")) {
    if (j.at("eps").is_array())
      spec.eps_values = j.at("eps").get<std::vector<double>>();
    else
      spec.eps_values = {j.at("eps").get<double>()};
  }
  if (j.contains("order")) {
    std::vector<std::string> names;
    if (j.at("order").is_array())
      names = j.at("order").get<std::vector<std::string>>();
    else
      names = {j.at("order").get<std::string>()};
    spec.orders.clear();
    for (const std::string& s : names) spec.orders.push_back(order_from_name(s));
  }
  if (j.contains("seeds")) {
    if (j.at("seeds").is_array())
      spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    else
      spec.seeds = {j.at("seeds").get<std::uint64_t>()};
  }
  spec.batches = j.value("batches", spec.batches);
  spec.samples_per_batch = j.value("samples", spec.samples_per_batch);
  return spec;
}

std::vector<BenchRecord> run_experiment(const ExperimentSpec& spec) {
  if (spec.n_values.empty() || spec.d_values.empty() ||
      spec.eps_values.empty() || spec.m_values.empty() || spec.orders.empty() ||
      spec.seeds.empty())
    throw std::invalid_argument("run_experiment: empty axis");
  std::vector<BenchRecord> records;
  for (int n : spec.n_values)
    for (int d : spec.d_values)
      for (double eps : spec.eps_values)
        for (int m : spec.m_values)
          for (QubitOrder order : spec.orders)
            for (std::uint64_t seed : spec.seeds) {
              LoadJob job;
              job.function = spec.function;
              job.method = spec.method;
              job.n = n;
              job.m = m;
              job.order = order;
              job.degree = d;
              job.chi_thr = d > 0 ? d : 64;
              job.eps = eps;
              job.seed = seed;
              job.batches = spec.batches;
              job.samples_per_batch = spec.samples_per_batch;
              try {
                records.push_back(run_load(job).record);
              } catch (const std::exception& ex) {
                BenchRecord failed;
                failed.function = spec.function;
                failed.method = spec.method;
                failed.n = n;
                failed.d_or_chi = d;
                failed.epsilon = eps;
                failed.m = m;
                failed.order = order_name(order);
                failed.seed = seed;
                failed.flags = {"failed", ex.what()};
                records.push_back(std::move(failed));
              }
            }
  return records;
}

std::vector<FitRow> fit_report(const std::vector<BenchRecord>& records) {
  // group key -> abscissa -> errors over seeds
  std::map<std::tuple<std::string, std::string, std::string, int, int, double>,
           std::map<int, std::vector<double>>>
      groups;
  for (const BenchRecord& r : records) {
    bool failed = false;
    for (const std::string& f : r.flags) failed = failed || f == "failed";
    if (failed) continue;
    groups[{r.function, r.method, r.order, r.m, r.n, r.epsilon}][r.d_or_chi]
        .push_back(r.error);
  }
  std::vector<FitRow> rows;
  for (const auto& [key, by_d] : groups) {
    std::vector<double> xs, errs;
    for (const auto& [d, es] : by_d) {
      double mean = 0.0;
      for (double e : es) mean += e;
      xs.push_back(d);
      errs.push_back(mean / es.size());
    }
    if (xs.size() < 4) continue;
    FitRow row;
    std::tie(row.function, row.method, row.order, row.m, row.n, row.epsilon) = key;
    row.points = static_cast<int>(xs.size());
    try {
      const ConvergenceFit expo =
          fit_convergence(xs, errs, FitModel::Exponential);
      const ConvergenceFit alg = fit_convergence(xs, errs, FitModel::Algebraic);
      const bool use_expo = expo.residual_rms <= alg.residual_rms;
      row.model = use_expo ? "exponential" : "algebraic";
      row.rate = use_expo ? expo.rate : alg.rate;
      row.residual_rms = use_expo ? expo.residual_rms : alg.residual_rms;
    } catch (const std::invalid_argument&) {
      continue;  // zero errors or a degenerate axis: nothing to fit
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_fit_csv(const std::vector<FitRow>& rows, std::ostream& out) {
  out << "function,method,order,m,n,epsilon,model,rate,residual_rms,points\n";
  out << std::setprecision(17);
  for (const FitRow& r : rows)
    out << r.function << ',' << r.method << ',' << r.order << ',' << r.m << ','
        << r.n << ',' << r.epsilon << ',' << r.model << ',' << r.rate << ','
        << r.residual_rms << ',' << r.points << '\n';
  if (!out) throw std::runtime_error("write_fit_csv: write failed");
}

}  // namespace qtt
