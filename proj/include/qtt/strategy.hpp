#pragma once

#include <limits>

namespace qtt {

// Controls every truncation in the library. `tolerance` is a relative
// squared-Frobenius budget: a simplified state u' of u satisfies
// |u - u'| <= sqrt(tolerance) * |u| whenever max_bond permits.
struct SimplifyStrategy {
  double tolerance = 1e-14;
  int max_bond = std::numeric_limits<int>::max();
  int max_sweeps = 4;
  bool normalize = false;

  static SimplifyStrategy exact() { return SimplifyStrategy{0.0}; }

  static SimplifyStrategy with_tolerance(double eps) {
    SimplifyStrategy s;
    s.tolerance = eps;
    return s;
  }

  SimplifyStrategy capped(int bond) const {
    SimplifyStrategy s = *this;
    s.max_bond = bond;
    return s;
  }
};

}  // namespace qtt
