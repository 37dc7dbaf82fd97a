#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qtt/bench.hpp"
#include "qtt/io.hpp"
#include "qtt/metrics.hpp"
#include "qtt/tci.hpp"

namespace {

nlohmann::json read_json(const std::string& path) {
  if (path == "-") return nlohmann::json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

// "-" routes to stdout, anything else to a fresh file
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  fn(out);
}

void add_layout_option(CLI::App* cmd, std::string& layout) {
  cmd->add_option("--layout,--order", layout, "qubit order: serial|interleaved")
      ->check(CLI::IsMember({"serial", "interleaved"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPS/QTT function loading workbench"};
  app.require_subcommand(1);

  // ---- load ----
  qtt::LoadJob job;
  std::string load_layout = "serial";
  std::string load_out;
  CLI::App* load = app.add_subcommand(
      "load", "build one corpus function as an MPS and measure it");
  load->add_option("-f,--function", job.function, "corpus id")->required();
  load->add_option("--method", job.method, "clenshaw|direct|svd|cross|analytic");
  load->add_option("-n,--qubits", job.n, "qubits per dimension");
  load->add_option("-m,--dims", job.m, "dimensions");
  load->add_option("-d,--degree", job.degree,
                   "interpolation order, negative = estimate");
  load->add_option("--chi-thr", job.chi_thr, "cross-interpolation rank cap");
  load->add_option("--eps", job.eps, "truncation tolerance");
  load->add_option("--seed", job.seed, "rng seed");
  load->add_option("--samples", job.samples_per_batch,
                   "samples per error batch");
  add_layout_option(load, load_layout);
  load->add_option("-o,--out", load_out, "write the state to this file");

  // ---- compose ----
  std::string manifest_path, compose_out;
  CLI::App* compose = app.add_subcommand(
      "compose", "evaluate an outer series on an inner MPS recipe");
  compose->add_option("--manifest", manifest_path, "manifest JSON, - for stdin")
      ->required();
  compose->add_option("-o,--out", compose_out, "write the state to this file");

  // ---- cross ----
  qtt::LoadJob cjob;
  std::string cross_layout = "serial";
  std::string cross_out;
  CLI::App* cross = app.add_subcommand(
      "cross", "rank-adaptive cross interpolation with full diagnostics");
  cross->add_option("-f,--function", cjob.function, "corpus id")->required();
  cross->add_option("-n,--qubits", cjob.n, "qubits per dimension");
  cross->add_option("-m,--dims", cjob.m, "dimensions");
  cross->add_option("--chi-thr", cjob.chi_thr, "rank cap");
  cross->add_option("--eps", cjob.eps, "halting tolerance");
  cross->add_option("--seed", cjob.seed, "rng seed");
  cross->add_option("--samples", cjob.samples_per_batch,
                    "samples per error batch");
  add_layout_option(cross, cross_layout);
  cross->add_option("-o,--out", cross_out, "write the state to this file");

  // ---- bench ----
  std::string spec_path, bench_out = "-";
  CLI::App* bench = app.add_subcommand(
      "bench", "run an experiment grid and emit one JSONL record per point");
  bench->add_option("--spec", spec_path, "experiment JSON, - for stdin")
      ->required();
  bench->add_option("-o,--out", bench_out, "JSONL output path, - for stdout");

  // ---- report ----
  std::string report_in, report_out = "-";
  CLI::App* report = app.add_subcommand(
      "report", "summarize JSONL records as CSV plus fitted convergence rates");
  report->add_option("--in", report_in, "JSONL input path, - for stdin")
      ->required();
  report->add_option("-o,--out", report_out,
                     "CSV output path, - for stdout; rate fits go to "
                     "<out>.fits.csv or follow on stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*load) {
      job.order = qtt::order_from_name(load_layout);
      qtt::LoadResult result = qtt::run_load(job);
      if (!load_out.empty()) qtt::save_mps(result.state, load_out);
      std::cout << qtt::to_json(result.record).dump(2) << '\n';
    } else if (*compose) {
      const qtt::ComposeManifest man =
          qtt::manifest_from_json(read_json(manifest_path));
      qtt::ComposeResult result = qtt::run_compose(man);
      if (!compose_out.empty()) qtt::save_mps(result.state, compose_out);
      std::cout << qtt::to_json(result.record).dump(2) << '\n';
    } else if (*cross) {
      cjob.order = qtt::order_from_name(cross_layout);
      const qtt::CorpusFunction& f = qtt::corpus_function(cjob.function);
      const qtt::DomainMeta meta =
          qtt::default_domain(f, cjob.n, cjob.m, cjob.order);
      const qtt::BlackBox bb = qtt::black_box_from_function(f.eval, meta);
      qtt::CrossOptions opt;
      opt.chi_thr = cjob.chi_thr;
      opt.halt_tol = cjob.eps;
      opt.seed = cjob.seed;
      qtt::CrossDiagnostics diag;
      const qtt::MPS state = qtt::cross_interpolate(bb, meta, opt, &diag);
      if (!cross_out.empty()) qtt::save_mps(state, cross_out);
      qtt::SamplePlan plan;
      plan.seed = cjob.seed;
      plan.batch_size = cjob.samples_per_batch;
      const qtt::BlackBox ref = qtt::black_box_from_function(f.eval, meta, false);
      const qtt::ErrorEstimate err =
          qtt::distance(state, ref, qtt::Norm::LInf, plan);
      nlohmann::json summary = qtt::to_json(diag);
      summary["chi_max"] = state.max_bond();
      summary["error"] = err.value;
      summary["error_std"] = err.std_dev;
      summary["error_mode"] = err.exhaustive ? "exhaustive" : "sampled";
      std::cout << summary.dump(2) << '\n';
    } else if (*bench) {
      const qtt::ExperimentSpec spec =
          qtt::experiment_from_json(read_json(spec_path));
      const std::vector<qtt::BenchRecord> records = qtt::run_experiment(spec);
      with_output(bench_out,
                  [&records](std::ostream& out) { qtt::write_jsonl(records, out); });
    } else if (*report) {
      std::vector<qtt::BenchRecord> records;
      if (report_in == "-") {
        records = qtt::read_jsonl(std::cin);
      } else {
        std::ifstream in(report_in);
        if (!in) throw std::runtime_error("cannot open " + report_in);
        records = qtt::read_jsonl(in);
      }
      const std::vector<qtt::FitRow> fits = qtt::fit_report(records);
      if (report_out == "-") {
        qtt::write_csv(records, std::cout);
        std::cout << '\n';
        qtt::write_fit_csv(fits, std::cout);
      } else {
        with_output(report_out, [&records](std::ostream& out) {
          qtt::write_csv(records, out);
        });
        with_output(report_out + ".fits.csv", [&fits](std::ostream& out) {
          qtt::write_fit_csv(fits, out);
        });
      }
    }
  } catch (const std::exception& ex) {
    std::cerr << "qttbench: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
