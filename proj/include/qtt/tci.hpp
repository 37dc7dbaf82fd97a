#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qtt/domain.hpp"
#include "qtt/mps.hpp"

namespace qtt {

// Bit-string oracle with memoization. eval_count() reports unique underlying
// evaluations; repeated lookups are free. Keys pack into 64 bits, which caps
// memoized oracles at 64 qubits.
class BlackBox {
 public:
  using Fn = std::function<double(std::span<const int>)>;

  BlackBox(int n_bits, Fn f, bool memoize = true);

  int bits() const { return n_bits_; }
  double operator()(std::span<const int> bits) const;
  std::uint64_t eval_count() const { return count_; }
  void reset() const {
    count_ = 0;
    cache_.clear();
  }

 private:
  int n_bits_;
  Fn f_;
  bool memoize_;
  mutable std::uint64_t count_ = 0;
  mutable std::unordered_map<std::uint64_t, double> cache_;
};

// Maps bit positions to (dimension, grid weight) under meta's qubit order.
struct IndexMap {
  std::vector<int> dim_of;
  std::vector<std::int64_t> weight_of;
  int dims = 0;

  std::vector<std::int64_t> grid_index(std::span<const int> bits) const;
};

IndexMap build_index_map(const DomainMeta& meta);

// Grid coordinates addressed by a full bit string, x_d = a_d + i_d * h_d.
std::vector<double> grid_coordinates(const DomainMeta& meta, std::span<const int> bits);

BlackBox black_box_from_mps(const MPS& m, bool memoize = true);
BlackBox black_box_from_function(std::function<double(std::span<const double>)> f,
                                 const DomainMeta& meta, bool memoize = true);

// Row subset of a (p x r, full column rank, p >= r) whose submatrix is
// dominant: no entry of a * a[rows]^{-1} exceeds 1 + tol at return. Swaps
// pick the largest violation, lowest index on ties.
std::vector<Eigen::Index> maxvol_square(const Eigen::MatrixXd& a, double tol = 1e-2,
                                        int max_iters = 200);

struct RectPivots {
  std::vector<Eigen::Index> rows;
  double last_gain = 0.0;  // volume gain of the final appended row
};

// Grows a maxvol_square seed greedily by projection-volume gain until r_max
// rows, stopping early below gain_tol once r_min is reached.
RectPivots maxvol_rect(const Eigen::MatrixXd& a, int r_min, int r_max, double gain_tol);

// a[:, cols] * a[rows, cols]^{-1} * a[rows, :]. Throws when the pivot block
// is singular; the cross routine's QR path avoids forming it at all.
Eigen::MatrixXd skeleton(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& rows,
                         const std::vector<Eigen::Index>& cols);

enum class HaltReason { Converged, Saturated, MaxSweeps };

struct CrossOptions {
  int chi_thr = 64;
  double halt_tol = 1e-12;
  int max_sweeps = 40;
  std::uint64_t seed = 0;
  int halt_samples = 1 << 10;  // random patterns probed for the stop rule
  double rank_tol = 1e-12;     // relative QR pivot cutoff on fibers
  double maxvol_tol = 1e-2;
  std::optional<double> final_eps;  // closing SVD recompression
  bool validate = false;            // re-assert pivot nesting every sweep
};

struct CrossDiagnostics {
  HaltReason halt = HaltReason::MaxSweeps;
  int sweeps = 0;
  std::uint64_t eval_count = 0;
  std::vector<std::vector<int>> bond_profile_per_sweep;
  std::vector<double> sampled_error_per_sweep;
  // Pivot sets behind the returned state: prefixes[k] extended by
  // suffixes[k] address the cross the interpolation property holds on.
  std::vector<std::vector<std::vector<int>>> final_prefixes, final_suffixes;
};

// Rank-adaptive cross interpolation of bb on meta's grid. Bonds grow by at
// most one per half sweep and only while fibers keep full column rank, so
// exactly low-rank targets are recovered at their true bond dimension.
MPS cross_interpolate(const BlackBox& bb, const DomainMeta& meta, const CrossOptions& opt = {},
                      CrossDiagnostics* diag = nullptr);

}  // namespace qtt
