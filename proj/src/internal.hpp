#pragma once

// Shared helpers between the library translation units. Not installed.

#include <Eigen/Dense>

#include "qtt/mps.hpp"

namespace qtt::detail {

// Row-major composite conventions, fixed across the whole library:
//   left unfolding   rows (alpha, s) = alpha * 2 + s, cols beta
//   right unfolding  rows alpha,     cols (s, beta) = s * chi_r + beta
Eigen::MatrixXd unfold_left(const MPS::Core& c);
MPS::Core fold_left(const Eigen::MatrixXd& m);
Eigen::MatrixXd unfold_right(const MPS::Core& c);
MPS::Core fold_right(const Eigen::MatrixXd& m);

// Smallest rank whose discarded squared tail is <= budget. Singular values
// below 100 * eps * sv(0) are always discarded. Returns at least 1.
int select_rank(const Eigen::VectorXd& sv, double budget, int max_bond);

// Thin SVD with a correctness guard: Eigen 3.4.0's BDCSVD can return
// non-finite factors on finite, well-scaled input, so such results are
// recomputed with the slower but dependable JacobiSVD.
struct SvdResult {
  Eigen::MatrixXd u;
  Eigen::VectorXd sv;
  Eigen::MatrixXd v;
};
SvdResult thin_svd(const Eigen::MatrixXd& m);

}  // namespace qtt::detail
