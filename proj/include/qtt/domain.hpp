#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtt {

// Half-open interval [a, b). Grids discretize as x_i = a + i*(b-a)/2^n.
struct Interval {
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
  double mid() const { return 0.5 * (a + b); }
  double half() const { return 0.5 * (b - a); }

  bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

enum class QubitOrder { Serial, Interleaved };

// Grid metadata attached to an MPS: how its qubits map onto one or more
// discretized coordinates.
struct DomainMeta {
  std::vector<int> qubits;          // qubits per dimension
  std::vector<Interval> intervals;  // one [a_j, b_j) per dimension
  QubitOrder order = QubitOrder::Serial;

  int dims() const { return static_cast<int>(qubits.size()); }

  int total_qubits() const {
    int n = 0;
    for (int q : qubits) n += q;
    return n;
  }

  void validate() const {
    if (qubits.empty() || qubits.size() != intervals.size())
      throw std::invalid_argument("DomainMeta: qubits/intervals size mismatch");
    for (int q : qubits)
      if (q < 1) throw std::invalid_argument("DomainMeta: qubits must be >= 1");
    for (const auto& iv : intervals)
      if (!(iv.a < iv.b))
        throw std::invalid_argument("DomainMeta: interval must satisfy a < b");
    if (order == QubitOrder::Interleaved) {
      for (int q : qubits)
        if (q != qubits.front())
          throw std::invalid_argument(
              "DomainMeta: interleaved order requires equal qubits per dimension");
    }
  }
};

inline DomainMeta univariate_domain(int n, Interval iv) {
  DomainMeta meta;
  meta.qubits = {n};
  meta.intervals = {iv};
  meta.order = QubitOrder::Serial;
  meta.validate();
  return meta;
}

inline DomainMeta multivariate_domain(int m, int n_per_dim, Interval iv,
                                      QubitOrder order) {
  DomainMeta meta;
  meta.qubits.assign(m, n_per_dim);
  meta.intervals.assign(m, iv);
  meta.order = order;
  meta.validate();
  return meta;
}

}  // namespace qtt
