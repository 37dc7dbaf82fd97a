#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "qtt/encodings.hpp"
#include "qtt/tci.hpp"

using namespace qtt;

namespace {

struct Rng {
  std::uint64_t s;
  double next() {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return 2.0 * (double(z >> 11) * 0x1.0p-53) - 1.0;
  }
};

// Random chain with every interior bond equal to chi.
MPS planted_mps(int n, int chi, std::uint64_t seed) {
  Rng rng{seed};
  std::vector<MPS::Core> cores(n);
  for (int i = 0; i < n; ++i) {
    const int l = i == 0 ? 1 : chi, r = i == n - 1 ? 1 : chi;
    for (int s = 0; s < 2; ++s) {
      cores[i][s] = Eigen::MatrixXd(l, r);
      for (int a = 0; a < l; ++a)
        for (int b = 0; b < r; ++b) cores[i][s](a, b) = rng.next();
    }
  }
  return MPS(std::move(cores));
}

}  // namespace

TEST_CASE("black box memoizes and counts unique evaluations") {
  int raw_calls = 0;
  BlackBox bb(4, [&raw_calls](std::span<const int> b) {
    ++raw_calls;
    return double(b[0] * 8 + b[1] * 4 + b[2] * 2 + b[3]);
  });
  const std::vector<int> x{1, 0, 1, 1};
  CHECK(bb(x) == 11.0);
  CHECK(bb(x) == 11.0);
  CHECK(bb.eval_count() == 1);
  CHECK(raw_calls == 1);
  CHECK_THROWS(bb(std::vector<int>{0, 1}));
}

TEST_CASE("index map matches both qubit orders") {
  const auto serial = build_index_map(multivariate_domain(2, 3, {0.0, 1.0}, QubitOrder::Serial));
  // bits: dim0 = 101b = 5, dim1 = 011b = 3
  const std::vector<int> sb{1, 0, 1, 0, 1, 1};
  CHECK(serial.grid_index(sb) == std::vector<std::int64_t>{5, 3});

  const auto inter =
      build_index_map(multivariate_domain(2, 3, {0.0, 1.0}, QubitOrder::Interleaved));
  // positions alternate (q0 d0)(q0 d1)(q1 d0)(q1 d1)...
  const std::vector<int> ib{1, 0, 0, 1, 1, 1};
  CHECK(inter.grid_index(ib) == std::vector<std::int64_t>{5, 3});

  const auto meta = multivariate_domain(2, 3, {-1.0, 1.0}, QubitOrder::Serial);
  const auto x = grid_coordinates(meta, sb);
  CHECK(x[0] == doctest::Approx(-1.0 + 5.0 * 0.25));
  CHECK(x[1] == doctest::Approx(-1.0 + 3.0 * 0.25));
}

TEST_CASE("maxvol_square returns a dominant submatrix") {
  Eigen::MatrixXd a(6, 3);
  Rng rng{17};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.next();
  const auto rows = maxvol_square(a, 1e-9);
  REQUIRE(rows.size() == 3);
  Eigen::MatrixXd sub(3, 3);
  for (int t = 0; t < 3; ++t) sub.row(t) = a.row(rows[t]);
  const Eigen::MatrixXd c = a * sub.inverse();
  CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-6);
  // Identity occupies the selected rows.
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 3; ++j)
      CHECK(c(rows[t], j) == doctest::Approx(t == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("maxvol_rect grows the pivot set to the requested size") {
  Eigen::MatrixXd a(8, 2);
  Rng rng{23};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = rng.next();
  const auto piv = maxvol_rect(a, 5, 5, 0.0);
  REQUIRE(piv.rows.size() == 5);
  std::vector<Eigen::Index> sorted = piv.rows;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(piv.last_gain >= 0.0);
  CHECK_THROWS(maxvol_rect(a, 1, 5, 0.0));  // r_min below column count
}

TEST_CASE("skeleton reconstructs a low-rank matrix exactly") {
  Rng rng{31};
  Eigen::MatrixXd u(7, 2), v(2, 6);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 2; ++j) u(i, j) = rng.next();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 6; ++j) v(i, j) = rng.next();
  const Eigen::MatrixXd a = u * v;
  const Eigen::MatrixXd s = skeleton(a, {1, 4}, {0, 3});
  CHECK((s - a).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
  // Singular pivot block: duplicate columns on a rank-one matrix.
  const Eigen::MatrixXd r1 = u.col(0) * v.row(0);
  CHECK_THROWS(skeleton(r1, {0, 1}, {0, 1}));
}

TEST_CASE("cross recovers a rank-one exponential at bond dimension one") {
  const int n = 10;
  const MPS ref = exponential_encoding(n, {0.0, 1.0}, 1.0);
  const BlackBox bb = black_box_from_mps(ref);
  CrossOptions opt;
  opt.chi_thr = 16;
  opt.halt_tol = 1e-12;
  opt.seed = 3;
  CrossDiagnostics diag;
  const MPS out = cross_interpolate(bb, *ref.meta, opt, &diag);
  CHECK(diag.halt == HaltReason::Converged);
  CHECK(out.max_bond() == 1);
  CHECK((out.to_dense() - ref.to_dense()).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("cross recovers a planted rank-three chain exactly") {
  const int n = 8, chi = 3;
  const MPS ref = planted_mps(n, chi, 5);
  const Eigen::VectorXd dense = ref.to_dense();
  const BlackBox bb = black_box_from_mps(ref);
  CrossOptions opt;
  opt.chi_thr = 10;
  opt.halt_tol = 1e-13 * dense.cwiseAbs().maxCoeff();
  opt.seed = 1;
  opt.validate = true;
  CrossDiagnostics diag;
  const MPS out = cross_interpolate(bb, univariate_domain(n, {0.0, 1.0}), opt, &diag);
  CHECK(out.max_bond() == chi);
  CHECK((out.to_dense() - dense).norm() <= 1e-11 * dense.norm());

  // Interpolation property on the final pivot sets: the state reproduces the
  // oracle exactly on every recorded cross.
  for (int k = 1; k < n; ++k) {
    for (const auto& i : diag.final_prefixes[k]) {
      for (const auto& j : diag.final_suffixes[k]) {
        std::vector<int> bits = i;
        bits.insert(bits.end(), j.begin(), j.end());
        CHECK(out.element(bits) == doctest::Approx(bb(bits)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("cross interpolates a univariate step at small rank") {
  const auto meta = univariate_domain(10, {0.0, 1.0});
  const BlackBox bb = black_box_from_function(
      [](std::span<const double> x) { return x[0] >= 0.53125 ? 1.0 : 0.0; }, meta);
  CrossOptions opt;
  opt.chi_thr = 8;
  opt.halt_tol = 1e-12;
  opt.seed = 7;
  CrossDiagnostics diag;
  const MPS out = cross_interpolate(bb, meta, opt, &diag);
  CHECK(out.max_bond() <= 4);
  const Eigen::VectorXd d = out.to_dense();
  double linf = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double x = double(i) / 1024.0;
    linf = std::max(linf, std::abs(d(i) - (x >= 0.53125 ? 1.0 : 0.0)));
  }
  CHECK(linf <= 1e-10);
}

TEST_CASE("cross handles a two-dimensional function") {
  const auto meta = multivariate_domain(2, 5, {-1.0, 1.0}, QubitOrder::Interleaved);
  const BlackBox bb = black_box_from_function(
      [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); }, meta);
  CrossOptions opt;
  opt.chi_thr = 24;  // exact ranks reach 16 on this grid
  opt.halt_tol = 1e-12;
  opt.seed = 11;
  const MPS out = cross_interpolate(bb, meta, opt);
  // Dense check over the full 2^10 grid.
  const IndexMap map = build_index_map(meta);
  double linf = 0.0;
  for (int idx = 0; idx < (1 << 10); ++idx) {
    std::vector<int> bits(10);
    for (int k = 0; k < 10; ++k) bits[k] = (idx >> (9 - k)) & 1;
    const auto x = grid_coordinates(meta, bits);
    linf = std::max(linf, std::abs(out.element(bits) - std::exp(-(x[0] * x[0] + x[1] * x[1]))));
  }
  CHECK(linf <= 1e-10);
}

TEST_CASE("cross saturates at the bond cap on a full-rank target") {
  const int n = 8;
  Rng rng{41};
  const auto meta = univariate_domain(n, {0.0, 1.0});
  // Values decorrelated across the grid: effective rank far above the cap.
  const BlackBox bb(n, [&](std::span<const int> bits) {
    std::uint64_t k = 0;
    for (int b : bits) k = (k << 1) | std::uint64_t(b);
    Rng local{k * 0x9E3779B97F4A7C15ull + 12345};
    return local.next();
  });
  CrossOptions opt;
  opt.chi_thr = 3;
  opt.halt_tol = 1e-12;
  opt.max_sweeps = 30;
  opt.seed = 2;
  CrossDiagnostics diag;
  const MPS out = cross_interpolate(bb, meta, opt, &diag);
  CHECK(out.max_bond() <= 3);
  CHECK(diag.halt == HaltReason::Saturated);
}

TEST_CASE("cross respects the evaluation budget") {
  const int n = 12;
  const auto meta = univariate_domain(n, {-1.0, 1.0});
  const BlackBox bb = black_box_from_function(
      [](std::span<const double> x) {
        return std::exp(-x[0] * x[0] * 4.5) / (1.0 / 3.0 * std::sqrt(2.0 * 3.14159265358979));
      },
      meta);
  CrossOptions opt;
  opt.chi_thr = 20;
  opt.halt_tol = 1e-12;
  opt.seed = 5;
  CrossDiagnostics diag;
  const MPS out = cross_interpolate(bb, meta, opt, &diag);
  // Unique oracle calls: per half sweep each bond reads a fiber of at most
  // 2 * chi * chi' entries, plus the fixed probe set.
  std::uint64_t budget = std::uint64_t(opt.halt_samples);
  const auto chi_of = [&](const std::vector<int>& prof, int k) {
    if (k < 0 || k >= int(prof.size())) return 1;
    return prof[k];
  };
  for (const auto& prof : diag.bond_profile_per_sweep) {
    for (int k = 0; k + 1 <= n - 1; ++k)
      budget += 4ull * std::uint64_t(chi_of(prof, k - 1)) * std::uint64_t(chi_of(prof, k)) + 8;
  }
  budget *= 3;  // growth between recorded profiles
  CHECK(diag.eval_count <= budget);
  CHECK((out.to_dense().size()) == (1 << n));
}

TEST_CASE("cross is deterministic for a fixed seed") {
  const auto meta = univariate_domain(8, {-1.0, 1.0});
  const auto make = [&](std::uint64_t seed) {
    const BlackBox bb = black_box_from_function(
        [](std::span<const double> x) { return std::cos(3.0 * x[0]) + x[0]; }, meta);
    CrossOptions opt;
    opt.chi_thr = 10;
    opt.seed = seed;
    CrossDiagnostics diag;
    const MPS m = cross_interpolate(bb, meta, opt, &diag);
    return std::make_pair(m.to_dense(), diag.sampled_error_per_sweep);
  };
  const auto [d1, e1] = make(9);
  const auto [d2, e2] = make(9);
  CHECK((d1 - d2).norm() == 0.0);
  CHECK(e1 == e2);
}
