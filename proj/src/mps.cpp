#include "qtt/mps.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "internal.hpp"

namespace qtt {

namespace detail {

using Mat = Eigen::MatrixXd;
using Core = MPS::Core;

// Composite index conventions match the serialized row-major (chi_l, s, chi_r)
// layout: left unfolding rows are (alpha, s) = alpha*2 + s, right unfolding
// columns are (s, beta) = s*chi_r + beta.

Mat unfold_left(const Core& c) {
  const auto r = c[0].rows();
  Mat m(2 * r, c[0].cols());
  m(Eigen::seqN(0, r, 2), Eigen::all) = c[0];
  m(Eigen::seqN(1, r, 2), Eigen::all) = c[1];
  return m;
}

Core fold_left(const Mat& m) {
  const auto r = m.rows() / 2;
  return Core{m(Eigen::seqN(0, r, 2), Eigen::all), m(Eigen::seqN(1, r, 2), Eigen::all)};
}

Mat unfold_right(const Core& c) {
  const auto q = c[0].cols();
  Mat m(c[0].rows(), 2 * q);
  m.leftCols(q) = c[0];
  m.rightCols(q) = c[1];
  return m;
}

Core fold_right(const Mat& m) {
  const auto q = m.cols() / 2;
  return Core{m.leftCols(q), m.rightCols(q)};
}

// Singular values at or below noise_floor * sigma_max count as rank noise and
// are always dropped; on top of that the squared tail up to `budget` goes.
int select_rank(const Eigen::VectorXd& sv, double budget, int max_bond) {
  const int n = static_cast<int>(sv.size());
  constexpr double noise_floor = 100.0 * std::numeric_limits<double>::epsilon();
  const double cutoff = sv.size() ? sv(0) * noise_floor : 0.0;
  int k = n;
  double tail = 0.0;
  while (k > 1) {
    const double s = sv(k - 1);
    if (s <= cutoff) {
      --k;
      continue;
    }
    if (tail + s * s > budget) break;
    tail += s * s;
    --k;
  }
  return std::min(k, max_bond);
}

SvdResult thin_svd(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.matrixU().allFinite() && svd.singularValues().allFinite() &&
      svd.matrixV().allFinite())
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  Eigen::JacobiSVD<Eigen::MatrixXd> jac(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {jac.matrixU(), jac.singularValues(), jac.matrixV()};
}

}  // namespace detail

using detail::fold_left;
using detail::fold_right;
using detail::select_rank;
using detail::unfold_left;
using detail::unfold_right;
using Mat = Eigen::MatrixXd;

MPS from_dense(const Eigen::VectorXd& values, double eps, int max_bond,
               std::optional<DomainMeta> meta) {
  const Eigen::Index len = values.size();
  if (len < 2 || (len & (len - 1)) != 0)
    throw std::invalid_argument("from_dense: length must be a power of two >= 2");
  if (!values.allFinite())
    throw std::invalid_argument("from_dense: values must be finite");
  int n = 0;
  while ((Eigen::Index(1) << n) < len) ++n;
  if (n > 28) throw std::invalid_argument("from_dense: more than 28 qubits");
  if (meta && meta->total_qubits() != n)
    throw std::invalid_argument("from_dense: meta qubit count mismatch");
  if (eps < 0) throw std::invalid_argument("from_dense: eps must be >= 0");

  const double budget = eps * values.squaredNorm() / std::max(1, n - 1);

  std::vector<MPS::Core> cores;
  cores.reserve(n);
  Mat w = values.transpose();  // 1 x 2^n, columns are the remaining bits
  for (int i = 0; i < n; ++i) {
    const auto r = w.rows();
    const auto half = w.cols() / 2;
    Mat m(2 * r, half);
    m(Eigen::seqN(0, r, 2), Eigen::all) = w.leftCols(half);
    m(Eigen::seqN(1, r, 2), Eigen::all) = w.rightCols(half);
    if (i == n - 1) {
      cores.push_back(fold_left(m));
      break;
    }
    const auto svd = detail::thin_svd(m);
    const int k = select_rank(svd.sv, budget, max_bond);
    cores.push_back(fold_left(svd.u.leftCols(k)));
    w = svd.sv.head(k).asDiagonal() * svd.v.leftCols(k).transpose();
  }
  return MPS(std::move(cores), std::move(meta));
}

MPS canonicalize(const MPS& m, int center) {
  const int n = m.size();
  if (center < 0 || center >= n)
    throw std::invalid_argument("canonicalize: center out of range");
  std::vector<MPS::Core> c = m.cores;
  for (int i = 0; i < center; ++i) {
    Mat a = unfold_left(c[i]);
    const auto k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ() * Mat::Identity(a.rows(), k);
    Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    c[i] = fold_left(q);
    for (auto& slice : c[i + 1]) slice = r * slice;
  }
  for (int i = n - 1; i > center; --i) {
    Mat a = unfold_right(c[i]).transpose();
    const auto k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ() * Mat::Identity(a.rows(), k);
    Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    c[i] = fold_right(q.transpose());
    for (auto& slice : c[i - 1]) slice = slice * r.transpose();
  }
  return MPS(std::move(c), m.meta);
}

MPS svd_truncate(const MPS& m, double eps, int max_bond) {
  const int n = m.size();
  if (eps < 0) throw std::invalid_argument("svd_truncate: eps must be >= 0");
  MPS w = canonicalize(m, 0);
  double nrm2 = 0.0;
  for (const auto& slice : w.cores[0]) nrm2 += slice.squaredNorm();
  if (nrm2 == 0.0) return MPS::zero(n, m.meta);
  const double budget = eps * nrm2 / std::max(1, n - 1);

  for (int i = 0; i + 1 < n; ++i) {
    Mat a = unfold_left(w.cores[i]);
    const auto svd = detail::thin_svd(a);
    const int k = select_rank(svd.sv, budget, max_bond);
    w.cores[i] = fold_left(svd.u.leftCols(k));
    Mat carry = svd.sv.head(k).asDiagonal() * svd.v.leftCols(k).transpose();
    for (auto& slice : w.cores[i + 1]) slice = carry * slice;
  }
  return w;
}

}  // namespace qtt
