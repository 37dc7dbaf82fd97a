#include "qtt/encodings.hpp"

#include <cmath>

namespace qtt {

using Mat = Eigen::MatrixXd;
using Core = MPS::Core;

namespace {

void check_n(int n) {
  if (n < 1) throw std::invalid_argument("encoding: n must be >= 1");
}

void check_interval(Interval iv) {
  if (!(iv.a < iv.b)) throw std::invalid_argument("encoding: interval must satisfy a < b");
}

}  // namespace

MPS x_encoding(int n, Interval iv) {
  check_n(n);
  check_interval(iv);
  const auto meta = univariate_domain(n, iv);
  const double len = iv.length();
  // Running partial sum in a two-dimensional bond: (1, a + sum w_k s_k).
  const auto w = [&](int k) { return len * std::ldexp(1.0, -k); };  // k is 1-based
  if (n == 1) {
    Core c{Mat::Constant(1, 1, iv.a), Mat::Constant(1, 1, iv.a + w(1))};
    return MPS({c}, meta);
  }
  std::vector<Core> cores;
  cores.reserve(n);
  Core first;
  for (int s = 0; s < 2; ++s) {
    first[s] = Mat(1, 2);
    first[s] << 1.0, iv.a + w(1) * s;
  }
  cores.push_back(std::move(first));
  for (int k = 2; k < n; ++k) {
    Core mid;
    for (int s = 0; s < 2; ++s) {
      mid[s] = Mat(2, 2);
      mid[s] << 1.0, w(k) * s, 0.0, 1.0;
    }
    cores.push_back(std::move(mid));
  }
  Core last;
  for (int s = 0; s < 2; ++s) {
    last[s] = Mat(2, 1);
    last[s] << w(n) * s, 1.0;
  }
  cores.push_back(std::move(last));
  return MPS(std::move(cores), meta);
}

MPS constant_encoding(int n, double value, Interval iv) {
  check_n(n);
  check_interval(iv);
  const auto meta = univariate_domain(n, iv);
  if (value == 0.0) return MPS::zero(n, meta);
  std::vector<Core> cores(n, Core{Mat::Ones(1, 1), Mat::Ones(1, 1)});
  for (auto& slice : cores[0]) slice *= value;
  return MPS(std::move(cores), meta);
}

MPS polynomial_encoding(const PolynomialSpec& spec, int n, CoeffSide form) {
  check_n(n);
  check_interval(spec.interval);
  if (spec.coeffs.empty())
    throw std::invalid_argument("polynomial_encoding: empty coefficient list");
  const int d = static_cast<int>(spec.coeffs.size()) - 1;
  if (d > 30)
    throw std::invalid_argument("polynomial_encoding: degree capped at 30");
  const auto meta = univariate_domain(n, spec.interval);

  // Binomial table, exact in doubles up to d = 30.
  std::vector<std::vector<double>> binom(d + 1, std::vector<double>(d + 1, 0.0));
  for (int i = 0; i <= d; ++i) {
    binom[i][0] = 1.0;
    for (int j = 1; j <= i; ++j)
      binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0.0);
  }

  // Re-expand p(a + L t) in t over the unit grid: q_j = sum_{i>=j} p_i C(i,j) a^(i-j) L^j.
  const double a = spec.interval.a, len = spec.interval.length();
  std::vector<double> q(d + 1, 0.0);
  for (int j = 0; j <= d; ++j) {
    double lj = std::pow(len, j);
    for (int i = j; i <= d; ++i)
      q[j] += spec.coeffs[i] * binom[i][j] * std::pow(a, i - j) * lj;
  }

  // Site tensor on the unit grid: A[r][k] = (s/2^site)^(k-r) C(k,r) for k >= r.
  const auto site_tensor = [&](int site, int s) {  // site is 1-based
    Mat t = Mat::Zero(d + 1, d + 1);
    const double disp = s * std::ldexp(1.0, -site);
    for (int r = 0; r <= d; ++r)
      for (int k = r; k <= d; ++k) t(r, k) = std::pow(disp, k - r) * binom[k][r];
    return t;
  };

  Eigen::Map<const Eigen::VectorXd> qv(q.data(), d + 1);
  std::vector<Core> cores(n);
  if (form == CoeffSide::Left) {
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < 2; ++s) {
        Mat t = site_tensor(i + 1, s);
        if (i == 0) t = t.row(0).eval();
        if (i == n - 1) t = (t * qv).eval();
        cores[i][s] = std::move(t);
      }
  } else {
    // Mirrored form: same tensors transposed, coefficients on the first core.
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < 2; ++s) {
        Mat t = site_tensor(i + 1, s).transpose();
        if (i == 0) t = (qv.transpose() * t).eval();
        if (i == n - 1) t = t.col(0).eval();
        cores[i][s] = std::move(t);
      }
  }
  return MPS(std::move(cores), meta);
}

MPS exponential_encoding(int n, Interval iv, double lambda, double prefactor) {
  check_n(n);
  check_interval(iv);
  const auto meta = univariate_domain(n, iv);
  std::vector<Core> cores(n);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < 2; ++s)
      cores[i][s] = Mat::Constant(1, 1, std::exp(lambda * s * std::ldexp(iv.length(), -(i + 1))));
  const double boundary = prefactor * std::exp(lambda * iv.a);
  for (auto& slice : cores[0]) slice *= boundary;
  return MPS(std::move(cores), meta);
}

MPS trig_encoding(int n, Interval iv, TrigKind kind, double omega, double phase) {
  check_n(n);
  check_interval(iv);
  const auto meta = univariate_domain(n, iv);
  const double theta0 = omega * iv.a + phase;
  const auto theta = [&](int site, int s) {  // 1-based site
    return omega * s * std::ldexp(iv.length(), -site);
  };
  if (n == 1) {
    Core c;
    for (int s = 0; s < 2; ++s) {
      const double t = theta0 + theta(1, s);
      c[s] = Mat::Constant(1, 1, kind == TrigKind::Cos ? std::cos(t) : std::sin(t));
    }
    return MPS({c}, meta);
  }
  // Row vector (cos T, sin T) advanced by planar rotations, closed by the
  // component the caller asked for.
  std::vector<Core> cores;
  cores.reserve(n);
  Core first;
  for (int s = 0; s < 2; ++s) {
    const double t = theta0 + theta(1, s);
    first[s] = Mat(1, 2);
    first[s] << std::cos(t), std::sin(t);
  }
  cores.push_back(std::move(first));
  for (int k = 2; k < n; ++k) {
    Core mid;
    for (int s = 0; s < 2; ++s) {
      const double t = theta(k, s);
      mid[s] = Mat(2, 2);
      mid[s] << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    }
    cores.push_back(std::move(mid));
  }
  Core last;
  for (int s = 0; s < 2; ++s) {
    const double t = theta(n, s);
    last[s] = Mat(2, 1);
    if (kind == TrigKind::Cos)
      last[s] << std::cos(t), -std::sin(t);
    else
      last[s] << std::sin(t), std::cos(t);
  }
  cores.push_back(std::move(last));
  return MPS(std::move(cores), meta);
}

}  // namespace qtt
