#pragma once

#include <utility>
#include <vector>

#include "qtt/mps.hpp"

namespace qtt {

struct LinearCombination {
  std::vector<std::pair<double, MPS>> terms;
};

// argmin over bond-capped MPS of |phi - sum_i alpha_i psi_i|, found by
// two-site sweeps. Relative residual <= sqrt(tolerance) when max_bond permits.
MPS combine(const LinearCombination& lc, const SimplifyStrategy& strategy);

// Elementwise product simplified by `strategy`.
MPS hadamard(const MPS& u, const MPS& v, const SimplifyStrategy& strategy);

// Exact elementwise product: per-site Kronecker cores, bond profile is the
// entrywise product of the operand profiles. No truncation.
MPS hadamard_raw(const MPS& u, const MPS& v);

// u (x) v. Serial appends v's cores after u's; Interleaved alternates
// u_1, v_1, u_2, v_2, ... and requires equal lengths. Exact in both cases.
MPS tensor_product(const MPS& u, const MPS& v, QubitOrder order);

// Places a one-dimensional factor on dimension `dim` of the layout described
// by `meta`, padding the other dimensions with identity-carrying cores so the
// result equals 1 (x) ... (x) f (x) ... (x) 1 in meta's qubit order.
MPS embed_factor(const MPS& f, int dim, const DomainMeta& meta);

// Orientation-preserving affine map of values: g in [a,b) lands in [c,d).
// Evaluated as a two-term combine with the identity MPS.
MPS affine_rescale(const MPS& g, Interval from, Interval to,
                   const SimplifyStrategy& strategy);

namespace detail {

// One summand of a fit target: coeff * a, or coeff * (a .* b) when b is set.
// Product factors stay implicit; environments contract three layers instead
// of materializing the Kronecker bond.
struct FitTerm {
  double coeff = 1.0;
  const MPS* a = nullptr;
  const MPS* b = nullptr;
};

struct FitStats {
  int sweeps = 0;
  double target_norm2 = 0.0;  // running estimate of |target|^2
};

MPS fit_terms(int n, const std::vector<FitTerm>& terms, const SimplifyStrategy& strategy,
              std::optional<DomainMeta> meta = {}, FitStats* stats = nullptr);

}  // namespace detail

}  // namespace qtt
