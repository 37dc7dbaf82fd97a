#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtt/domain.hpp"
#include "qtt/strategy.hpp"

namespace qtt {

// Matrix product state over qubits (physical dimension fixed at 2).
// Core i is a rank-3 tensor [chi_left, 2, chi_right] stored as one matrix
// per physical index value; boundary bonds are 1. Bit 0 is the most
// significant grid bit.
//
// The scalar type is a template parameter so complex states fit the same
// container; the algorithms in this library operate on real doubles.
template <typename T>
class BasicMps {
 public:
  using Scalar = T;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Core = std::array<Mat, 2>;

  std::vector<Core> cores;
  std::optional<DomainMeta> meta;

  BasicMps() = default;

  explicit BasicMps(std::vector<Core> c, std::optional<DomainMeta> m = {})
      : cores(std::move(c)), meta(std::move(m)) {
    validate();
  }

  // Canonical zero state: chi = 1, all cores zero.
  static BasicMps zero(int n, std::optional<DomainMeta> m = {}) {
    if (n < 1) throw std::invalid_argument("BasicMps::zero: n must be >= 1");
    std::vector<Core> c(n, Core{Mat::Zero(1, 1), Mat::Zero(1, 1)});
    return BasicMps(std::move(c), std::move(m));
  }

  int size() const { return static_cast<int>(cores.size()); }

  int chi_left(int i) const { return static_cast<int>(cores[i][0].rows()); }
  int chi_right(int i) const { return static_cast<int>(cores[i][0].cols()); }

  // Interior bond dimensions, size() - 1 entries.
  std::vector<int> bond_profile() const {
    std::vector<int> p;
    for (int i = 0; i + 1 < size(); ++i) p.push_back(chi_right(i));
    return p;
  }

  int max_bond() const {
    int m = 1;
    for (int i = 0; i + 1 < size(); ++i) m = std::max(m, chi_right(i));
    return m;
  }

  void validate() const {
    if (cores.empty()) throw std::invalid_argument("BasicMps: no cores");
    if (chi_left(0) != 1 || chi_right(size() - 1) != 1)
      throw std::invalid_argument("BasicMps: boundary bonds must be 1");
    for (int i = 0; i < size(); ++i) {
      if (cores[i][0].rows() != cores[i][1].rows() ||
          cores[i][0].cols() != cores[i][1].cols())
        throw std::invalid_argument("BasicMps: mismatched physical slices at site " +
                                    std::to_string(i));
      if (i + 1 < size() && chi_right(i) != chi_left(i + 1))
        throw std::invalid_argument("BasicMps: broken bond between sites " +
                                    std::to_string(i) + " and " + std::to_string(i + 1));
    }
    if (meta && meta->total_qubits() != size())
      throw std::invalid_argument("BasicMps: meta qubit count != core count");
  }

  T element(std::span<const int> bits) const {
    if (static_cast<int>(bits.size()) != size())
      throw std::invalid_argument("element: bit string length != qubit count");
    Eigen::Matrix<T, 1, Eigen::Dynamic> v = Eigen::Matrix<T, 1, Eigen::Dynamic>::Ones(1);
    for (int i = 0; i < size(); ++i) {
      int s = bits[i];
      if (s != 0 && s != 1) throw std::invalid_argument("element: bits must be 0/1");
      v = v * cores[i][s];
    }
    return v(0);
  }

  T element(std::initializer_list<int> bits) const {
    return element(std::span<const int>(bits.begin(), bits.size()));
  }

  // Full 2^n vector, bit 0 most significant. Guarded at 28 qubits.
  Eigen::Vector<T, Eigen::Dynamic> to_dense() const {
    if (size() > 28) throw std::invalid_argument("to_dense: more than 28 qubits");
    Mat acc = Mat::Ones(1, 1);
    for (int i = 0; i < size(); ++i) {
      const Mat& a0 = cores[i][0];
      const Mat& a1 = cores[i][1];
      Mat next(acc.rows() * 2, a0.cols());
      for (Eigen::Index r = 0; r < acc.rows(); ++r) {
        next.row(2 * r) = acc.row(r) * a0;
        next.row(2 * r + 1) = acc.row(r) * a1;
      }
      acc = std::move(next);
    }
    return acc.col(0);
  }
};

using MPS = BasicMps<double>;

namespace detail {
template <typename T>
T conj_if_complex(const T& x) {
  if constexpr (std::is_same_v<T, std::complex<double>> ||
                std::is_same_v<T, std::complex<float>>)
    return std::conj(x);
  else
    return x;
}
}  // namespace detail

// <u, v> by zipping the chain left to right; O(n chi^3).
template <typename T>
T inner(const BasicMps<T>& u, const BasicMps<T>& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("inner: size mismatch");
  using Mat = typename BasicMps<T>::Mat;
  Mat env = Mat::Ones(1, 1);
  for (int i = 0; i < u.size(); ++i) {
    Mat next = Mat::Zero(u.chi_right(i), v.chi_right(i));
    for (int s = 0; s < 2; ++s)
      next += u.cores[i][s].adjoint() * env * v.cores[i][s];
    env = std::move(next);
  }
  return detail::conj_if_complex(env(0, 0));
}

// L2 norm. Named after the norm it returns, not its square.
template <typename T>
double norm2(const BasicMps<T>& m) {
  double n2 = std::real(std::complex<double>(inner(m, m)));
  return n2 > 0 ? std::sqrt(n2) : 0.0;
}

// --- mps-core operations on real states (implemented in src/mps.cpp) ---

// Successive-SVD load of a dense vector (length 2^n). eps is the relative
// squared-Frobenius budget spread over the n-1 splits.
MPS from_dense(const Eigen::VectorXd& values, double eps = 0.0,
               int max_bond = std::numeric_limits<int>::max(),
               std::optional<DomainMeta> meta = {});

// Mixed-canonical copy: sites < center left-isometric, sites > center
// right-isometric. Represents the same vector exactly.
MPS canonicalize(const MPS& m, int center);

// One-shot SVD compression sweep (right-canonicalize, then split left to
// right discarding per-bond tails of eps*|m|^2/(n-1)).
MPS svd_truncate(const MPS& m, double eps,
                 int max_bond = std::numeric_limits<int>::max());

// Two-site variational simplification, seeded by svd_truncate.
MPS truncate(const MPS& m, const SimplifyStrategy& strategy);

}  // namespace qtt
