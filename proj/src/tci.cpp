#include "qtt/tci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

#include "internal.hpp"

namespace qtt {

using Mat = Eigen::MatrixXd;
using Eigen::Index;

BlackBox::BlackBox(int n_bits, Fn f, bool memoize)
    : n_bits_(n_bits), f_(std::move(f)), memoize_(memoize && n_bits <= 64) {
  if (n_bits < 1) throw std::invalid_argument("BlackBox: need at least one bit");
  if (!f_) throw std::invalid_argument("BlackBox: empty function");
}

double BlackBox::operator()(std::span<const int> bits) const {
  if (static_cast<int>(bits.size()) != n_bits_)
    throw std::invalid_argument("BlackBox: expected " + std::to_string(n_bits_) + " bits, got " +
                                std::to_string(bits.size()));
  if (!memoize_) {
    ++count_;
    return f_(bits);
  }
  std::uint64_t key = 0;
  for (int b : bits) key = (key << 1) | std::uint64_t(b & 1);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  ++count_;
  const double v = f_(bits);
  cache_.emplace(key, v);
  return v;
}

std::vector<std::int64_t> IndexMap::grid_index(std::span<const int> bits) const {
  std::vector<std::int64_t> idx(dims, 0);
  for (size_t p = 0; p < bits.size(); ++p)
    if (bits[p]) idx[dim_of[p]] += weight_of[p];
  return idx;
}

IndexMap build_index_map(const DomainMeta& meta) {
  meta.validate();
  const int m = meta.dims();
  IndexMap map;
  map.dims = m;
  map.dim_of.resize(meta.total_qubits());
  map.weight_of.resize(meta.total_qubits());
  if (meta.order == QubitOrder::Serial) {
    int p = 0;
    for (int d = 0; d < m; ++d)
      for (int k = 0; k < meta.qubits[d]; ++k, ++p) {
        map.dim_of[p] = d;
        map.weight_of[p] = std::int64_t(1) << (meta.qubits[d] - 1 - k);
      }
  } else {
    const int n = meta.qubits[0];
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < m; ++d) {
        map.dim_of[k * m + d] = d;
        map.weight_of[k * m + d] = std::int64_t(1) << (n - 1 - k);
      }
  }
  return map;
}

std::vector<double> grid_coordinates(const DomainMeta& meta, std::span<const int> bits) {
  const IndexMap map = build_index_map(meta);
  const auto idx = map.grid_index(bits);
  std::vector<double> x(meta.dims());
  for (int d = 0; d < meta.dims(); ++d) {
    const double h = meta.intervals[d].length() / double(std::int64_t(1) << meta.qubits[d]);
    x[d] = meta.intervals[d].a + double(idx[d]) * h;
  }
  return x;
}

BlackBox black_box_from_mps(const MPS& m, bool memoize) {
  return BlackBox(m.size(), [m](std::span<const int> bits) { return m.element(bits); },
                  memoize);
}

BlackBox black_box_from_function(std::function<double(std::span<const double>)> f,
                                 const DomainMeta& meta, bool memoize) {
  const IndexMap map = build_index_map(meta);
  std::vector<double> lo(meta.dims()), h(meta.dims());
  for (int d = 0; d < meta.dims(); ++d) {
    lo[d] = meta.intervals[d].a;
    h[d] = meta.intervals[d].length() / double(std::int64_t(1) << meta.qubits[d]);
  }
  return BlackBox(meta.total_qubits(),
                  [f = std::move(f), map, lo, h](std::span<const int> bits) {
                    const auto idx = map.grid_index(bits);
                    std::vector<double> x(lo.size());
                    for (size_t d = 0; d < lo.size(); ++d) x[d] = lo[d] + double(idx[d]) * h[d];
                    return f(x);
                  },
                  memoize);
}

std::vector<Index> maxvol_square(const Mat& a, double tol, int max_iters) {
  const Index p = a.rows(), r = a.cols();
  if (r < 1 || p < r) throw std::invalid_argument("maxvol_square: need rows >= cols >= 1");

  // Row pivots of a partially pivoted elimination seed the iteration.
  Mat b = a;
  std::vector<Index> perm(p);
  for (Index i = 0; i < p; ++i) perm[i] = i;
  for (Index j = 0; j < r; ++j) {
    Index best = j;
    double bv = std::abs(b(j, j));
    for (Index i = j + 1; i < p; ++i)
      if (std::abs(b(i, j)) > bv) {
        bv = std::abs(b(i, j));
        best = i;
      }
    if (bv == 0.0) continue;
    if (best != j) {
      b.row(j).swap(b.row(best));
      std::swap(perm[j], perm[best]);
    }
    for (Index i = j + 1; i < p; ++i) {
      const double f = b(i, j) / b(j, j);
      if (f != 0.0) b.row(i).segment(j, r - j) -= f * b.row(j).segment(j, r - j);
    }
  }
  std::vector<Index> rows(perm.begin(), perm.begin() + r);

  Mat asub(r, r);
  for (int it = 0; it < max_iters; ++it) {
    for (Index t = 0; t < r; ++t) asub.row(t) = a.row(rows[t]);
    const Mat ct = Eigen::PartialPivLU<Mat>(asub.transpose()).solve(a.transpose());
    double best = 1.0 + tol;
    Index bi = -1, bj = -1;
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < r; ++j)
        if (std::abs(ct(j, i)) > best) {
          best = std::abs(ct(j, i));
          bi = i;
          bj = j;
        }
    if (bi < 0) break;
    rows[bj] = bi;
  }
  return rows;
}

RectPivots maxvol_rect(const Mat& a, int r_min, int r_max, double gain_tol) {
  const Index p = a.rows(), r = a.cols();
  if (r_min < r) throw std::invalid_argument("maxvol_rect: r_min below column count");
  if (r_max < r_min) throw std::invalid_argument("maxvol_rect: r_max < r_min");
  r_max = std::min<int>(r_max, int(p));
  r_min = std::min<int>(r_min, int(p));

  RectPivots out;
  out.rows = maxvol_square(a);
  std::vector<char> in_set(p, 0);
  for (Index i : out.rows) in_set[i] = 1;

  while (int(out.rows.size()) < r_max) {
    Mat as(out.rows.size(), r);
    for (size_t t = 0; t < out.rows.size(); ++t) as.row(Index(t)) = a.row(out.rows[t]);
    const Mat x = Eigen::LLT<Mat>(as.transpose() * as).solve(a.transpose());
    double best_gain = -1.0;
    Index bi = -1;
    for (Index i = 0; i < p; ++i) {
      if (in_set[i]) continue;
      const double l = std::max(0.0, a.row(i).dot(x.col(i)));
      const double gain = std::sqrt(1.0 + l) - 1.0;
      if (gain > best_gain) {
        best_gain = gain;
        bi = i;
      }
    }
    if (bi < 0) break;
    if (int(out.rows.size()) >= r_min && best_gain < gain_tol) break;
    out.rows.push_back(bi);
    in_set[bi] = 1;
    out.last_gain = best_gain;
  }
  return out;
}

Mat skeleton(const Mat& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  if (rows.size() != cols.size()) throw std::invalid_argument("skeleton: pivot sets differ in size");
  const Index r = Index(rows.size());
  Mat block(r, r), arows(r, a.cols());
  for (Index t = 0; t < r; ++t) {
    arows.row(t) = a.row(rows[t]);
    for (Index u = 0; u < r; ++u) block(t, u) = a(rows[t], cols[u]);
  }
  Eigen::FullPivLU<Mat> lu(block);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "skeleton: singular pivot block; prefer the QR-stabilized cross routine");
  Mat acols(a.rows(), r);
  for (Index u = 0; u < r; ++u) acols.col(u) = a.col(cols[u]);
  return acols * lu.solve(arows);
}

namespace {

using BitString = std::vector<int>;

std::vector<int> random_bits(std::mt19937_64& gen, int n) {
  std::vector<int> b(n);
  std::uint64_t word = 0;
  int left = 0;
  for (int k = 0; k < n; ++k) {
    if (left == 0) {
      word = gen();
      left = 64;
    }
    b[k] = int(word & 1);
    word >>= 1;
    --left;
  }
  return b;
}

struct CrossState {
  const BlackBox& bb;
  const DomainMeta& meta;
  const CrossOptions& opt;
  int n;
  // prefixes[k]: bit strings of length k indexing bond k's rows; k = 0..n.
  // suffixes[k]: strings of length n - k indexing bond k's columns.
  std::vector<std::vector<BitString>> prefixes, suffixes;
  std::vector<int> scratch;

  CrossState(const BlackBox& b, const DomainMeta& m, const CrossOptions& o)
      : bb(b), meta(m), opt(o), n(m.total_qubits()), prefixes(n + 1), suffixes(n + 1),
        scratch(n) {}

  double eval(const BitString& pre, int s, const BitString& suf) {
    const size_t k = pre.size();
    std::copy(pre.begin(), pre.end(), scratch.begin());
    scratch[k] = s;
    std::copy(suf.begin(), suf.end(), scratch.begin() + k + 1);
    return bb(scratch);
  }

  double eval2(const BitString& pre, int s1, int s2, const BitString& suf) {
    const size_t k = pre.size();
    std::copy(pre.begin(), pre.end(), scratch.begin());
    scratch[k] = s1;
    scratch[k + 1] = s2;
    std::copy(suf.begin(), suf.end(), scratch.begin() + k + 2);
    return bb(scratch);
  }

  // One-site fiber at bond k: rows (prefix, s) with composite alpha*2 + s,
  // columns the current suffixes at bond k.
  Mat fiber(int k) {
    const auto& pre = prefixes[k - 1];
    const auto& suf = suffixes[k];
    Mat f(2 * Index(pre.size()), Index(suf.size()));
    for (size_t a = 0; a < pre.size(); ++a)
      for (int s = 0; s < 2; ++s)
        for (size_t j = 0; j < suf.size(); ++j)
          f(Index(a) * 2 + s, Index(j)) = eval(pre[a], s, suf[j]);
    return f;
  }

  // Two-site window over sites (k, k+1): rows (prefix, s_k), columns
  // (s_{k+1}, suffix at bond k+1). Ranks invisible to today's pivot sets
  // surface here one bond per sweep; this is what makes the sweeps explore.
  Mat window(int k) {
    const auto& pre = prefixes[k - 1];
    const auto& suf = suffixes[k + 1];
    const Index q = Index(suf.size());
    Mat f(2 * Index(pre.size()), 2 * q);
    for (size_t a = 0; a < pre.size(); ++a)
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          for (size_t j = 0; j < suf.size(); ++j)
            f(Index(a) * 2 + s1, s2 * q + Index(j)) = eval2(pre[a], s1, s2, suf[j]);
    return f;
  }

  // Interpolating carrier: thin-QR column basis mapped through the pivot
  // pseudo-inverse, pivot rows overwritten by exact unit rows so the chain
  // reproduces pivot values identically.
  Mat carrier(const Mat& q, const std::vector<Index>& rows) {
    Mat qs(Index(rows.size()), q.cols());
    for (size_t t = 0; t < rows.size(); ++t) qs.row(Index(t)) = q.row(rows[t]);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(qs);
    Mat b = q * cod.pseudoInverse();
    for (size_t t = 0; t < rows.size(); ++t) {
      b.row(rows[t]).setZero();
      b(rows[t], Index(t)) = 1.0;
    }
    return b;
  }

  // Thin QR with relative pivot cutoff; returns the basis and effective rank.
  std::pair<Mat, int> column_basis(const Mat& f) {
    Eigen::ColPivHouseholderQR<Mat> qr(f);
    qr.setThreshold(opt.rank_tol);
    const int r_eff = std::max<int>(1, int(qr.rank()));
    Mat q = qr.householderQ() * Mat::Identity(f.rows(), r_eff);
    return {std::move(q), r_eff};
  }

  // Revealed rank, capped to grow by at most one pivot per half sweep.
  // Shrinking below the current set size is always allowed, so confirmed
  // rank deficits unwind on the spot.
  int next_rank(int r_eff, bool grow, int old_size, Index row_count) const {
    const int cap = grow ? old_size + 1 : std::numeric_limits<int>::max();
    return std::min<int>({r_eff, cap, int(row_count), opt.chi_thr});
  }

  std::vector<Index> select_rows(const Mat& q, int r_new) {
    const Mat qr = q.leftCols(r_new);
    return maxvol_square(qr, opt.maxvol_tol);
  }

  // Left-to-right half sweep; rebuilds prefixes and returns the extracted
  // MPS (raw fiber on the last site). Growing sweeps scan two-site windows,
  // the closing pass re-reads the one-site fibers at the settled pivots.
  MPS forward(bool grow) {
    std::vector<MPS::Core> cores(n);
    for (int k = 1; k < n; ++k) {
      const Mat f = grow ? window(k) : fiber(k);
      auto [q, r_eff] = column_basis(f);
      const int r_new = next_rank(r_eff, grow, int(prefixes[k].size()), f.rows());
      const auto rows = select_rows(q, r_new);
      cores[k - 1] = detail::fold_left(carrier(q.leftCols(r_new), rows));
      std::vector<BitString> next;
      next.reserve(rows.size());
      for (Index ri : rows) {
        BitString e = prefixes[k - 1][size_t(ri >> 1)];
        e.push_back(int(ri & 1));
        next.push_back(std::move(e));
      }
      prefixes[k] = std::move(next);
    }
    cores[n - 1] = detail::fold_left(fiber(n));
    return MPS(std::move(cores), meta);
  }

  // Right-to-left half sweep; rebuilds suffixes, raw fiber on site one.
  MPS backward(bool grow) {
    std::vector<MPS::Core> cores(n);
    for (int k = n; k >= 2; --k) {
      const auto& suf = suffixes[k];
      const Index q_cols = Index(suf.size());
      Mat g;
      if (grow) {
        const auto& pre = prefixes[k - 2];
        g.resize(2 * Index(pre.size()), 2 * q_cols);
        for (size_t a = 0; a < pre.size(); ++a)
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
              for (size_t j = 0; j < suf.size(); ++j)
                g(Index(a) * 2 + s1, s2 * q_cols + Index(j)) = eval2(pre[a], s1, s2, suf[j]);
      } else {
        const auto& pre = prefixes[k - 1];
        g.resize(Index(pre.size()), 2 * q_cols);
        for (size_t a = 0; a < pre.size(); ++a)
          for (int s = 0; s < 2; ++s)
            for (size_t j = 0; j < suf.size(); ++j)
              g(Index(a), s * q_cols + Index(j)) = eval(pre[a], s, suf[j]);
      }
      auto [q, r_eff] = column_basis(g.transpose());
      const int r_new = next_rank(r_eff, grow, int(suffixes[k - 1].size()), 2 * q_cols);
      const auto rows = select_rows(q, r_new);
      cores[k - 1] = detail::fold_right(carrier(q.leftCols(r_new), rows).transpose());
      std::vector<BitString> next;
      next.reserve(rows.size());
      for (Index ci : rows) {
        BitString e;
        e.reserve(n - k + 1);
        e.push_back(int(ci / q_cols));
        const auto& tail = suf[size_t(ci % q_cols)];
        e.insert(e.end(), tail.begin(), tail.end());
        next.push_back(std::move(e));
      }
      suffixes[k - 1] = std::move(next);
    }
    {
      const auto& suf = suffixes[1];
      Mat g(1, 2 * Index(suf.size()));
      for (int s = 0; s < 2; ++s)
        for (size_t j = 0; j < suf.size(); ++j)
          g(0, s * Index(suf.size()) + Index(j)) = eval({}, s, suf[j]);
      cores[0] = detail::fold_right(g);
    }
    return MPS(std::move(cores), meta);
  }

  // Seeds every bond with the cross of one full bit string, top-down so
  // nesting survives even when some bonds sit at the cap.
  void insert(const BitString& s) {
    for (int k = 1; k < n; ++k) {
      BitString pre(s.begin(), s.begin() + k);
      auto& set = prefixes[k];
      if (std::find(set.begin(), set.end(), pre) != set.end()) continue;
      if (int(set.size()) >= opt.chi_thr) break;
      set.push_back(std::move(pre));
    }
    for (int k = n - 1; k >= 1; --k) {
      BitString suf(s.begin() + k, s.end());
      auto& set = suffixes[k];
      if (std::find(set.begin(), set.end(), suf) != set.end()) continue;
      if (int(set.size()) >= opt.chi_thr) break;
      set.push_back(std::move(suf));
    }
  }

  void assert_nested() const {
    for (int k = 1; k < n; ++k) {
      for (const auto& e : prefixes[k]) {
        BitString head(e.begin(), e.end() - 1);
        bool found = false;
        for (const auto& p : prefixes[k - 1]) found |= (p == head);
        if (!found) throw std::logic_error("cross: prefix nesting broken at bond " + std::to_string(k));
      }
      for (const auto& e : suffixes[k]) {
        BitString tail(e.begin() + 1, e.end());
        bool found = false;
        for (const auto& sfx : suffixes[k + 1]) found |= (sfx == tail);
        if (!found) throw std::logic_error("cross: suffix nesting broken at bond " + std::to_string(k));
      }
    }
  }
};

}  // namespace

MPS cross_interpolate(const BlackBox& bb, const DomainMeta& meta, const CrossOptions& opt,
                      CrossDiagnostics* diag) {
  meta.validate();
  const int n = meta.total_qubits();
  if (bb.bits() != n) throw std::invalid_argument("cross_interpolate: oracle and domain disagree");
  if (opt.chi_thr < 1 || opt.max_sweeps < 1 || opt.halt_samples < 1)
    throw std::invalid_argument("cross_interpolate: bad options");

  if (n == 1) {
    std::vector<MPS::Core> cores(1);
    const int b0 = 0, b1 = 1;
    cores[0] = {Mat::Constant(1, 1, bb(std::span<const int>(&b0, 1))),
                Mat::Constant(1, 1, bb(std::span<const int>(&b1, 1)))};
    if (diag) {
      diag->halt = HaltReason::Converged;
      diag->eval_count = bb.eval_count();
    }
    return MPS(std::move(cores), meta);
  }

  std::mt19937_64 gen(opt.seed);
  CrossState st(bb, meta, opt);

  // A single pivot string seeds every bond; rejection keeps it off exact
  // zeros of the target so constant-zero fibers cannot trap the sweeps.
  BitString pivot = random_bits(gen, n);
  for (int tries = 0; tries < 128 && bb(pivot) == 0.0; ++tries) pivot = random_bits(gen, n);
  for (int k = 0; k <= n; ++k) {
    st.prefixes[k] = {BitString(pivot.begin(), pivot.begin() + k)};
    st.suffixes[k] = {BitString(pivot.begin() + k, pivot.end())};
  }

  // Halting probes reuse one sample set; the oracle cache keeps re-probing
  // free after the first sweep.
  std::mt19937_64 sample_gen(opt.seed ^ 0x5DEECE66Dull);
  std::vector<BitString> probes(opt.halt_samples);
  for (auto& p : probes) p = random_bits(sample_gen, n);

  const auto sampled_error = [&](const MPS& m) {
    double linf = 0.0;
    size_t worst = 0;
    for (size_t i = 0; i < probes.size(); ++i) {
      const double d = std::abs(m.element(probes[i]) - bb(probes[i]));
      if (d > linf) {
        linf = d;
        worst = i;
      }
    }
    return std::make_pair(linf, worst);
  };

  MPS mps = st.forward(false);
  HaltReason halt = HaltReason::MaxSweeps;
  int sweeps = 0;
  double prev_err = std::numeric_limits<double>::infinity();
  std::vector<int> prev_profile;

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const auto [err, worst] = sampled_error(mps);
    const auto profile = mps.bond_profile();
    if (diag) {
      diag->bond_profile_per_sweep.push_back(profile);
      diag->sampled_error_per_sweep.push_back(err);
    }
    if (err <= opt.halt_tol) {
      halt = HaltReason::Converged;
      break;
    }
    const int peak = profile.empty() ? 1 : *std::max_element(profile.begin(), profile.end());
    if (sweep > 1 && peak >= opt.chi_thr && profile == prev_profile && err > 0.5 * prev_err) {
      halt = HaltReason::Saturated;
      break;
    }
    if (sweep == opt.max_sweeps) break;
    prev_err = err;
    prev_profile = profile;
    // The worst probe becomes a global pivot: its cross feeds the windows
    // exactly where the current state is most wrong.
    st.insert(probes[worst]);
    st.backward(true);
    mps = st.forward(true);
    if (opt.validate) st.assert_nested();
    sweeps = sweep;
  }

  // The returned state is exactly the one the stop rule measured; window
  // rank revelation already shrinks speculative pivots during the sweeps.
  if (opt.final_eps) mps = svd_truncate(mps, *opt.final_eps);
  mps.meta = meta;

  if (diag) {
    diag->halt = halt;
    diag->sweeps = sweeps;
    diag->eval_count = bb.eval_count();
    diag->final_prefixes = st.prefixes;
    diag->final_suffixes = st.suffixes;
  }
  return mps;
}

}  // namespace qtt
