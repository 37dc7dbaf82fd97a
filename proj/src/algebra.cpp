#include "qtt/algebra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "internal.hpp"

namespace qtt {

using Mat = Eigen::MatrixXd;
using Core = MPS::Core;
using Eigen::Index;

namespace {

// X * kron(A, B). A null B means B = [1].
Mat apply_kron_right(const Mat& x, const Mat& a, const Mat* b) {
  if (!b) return x * a;
  const Index ra = a.rows(), ca = a.cols(), rb = b->rows(), cb = b->cols();
  Mat out = Mat::Zero(x.rows(), ca * cb);
  for (Index i = 0; i < ra; ++i) {
    const Mat w = x.middleCols(i * rb, rb) * (*b);
    for (Index k = 0; k < ca; ++k)
      if (a(i, k) != 0.0) out.middleCols(k * cb, cb) += a(i, k) * w;
  }
  return out;
}

// kron(A, B) * X.
Mat apply_kron_left(const Mat& a, const Mat* b, const Mat& x) {
  if (!b) return a * x;
  const Index ra = a.rows(), ca = a.cols(), rb = b->rows(), cb = b->cols();
  Mat out = Mat::Zero(ra * rb, x.cols());
  for (Index i = 0; i < ca; ++i) {
    const Mat v = (*b) * x.middleRows(i * cb, cb);
    for (Index k = 0; k < ra; ++k)
      if (a(k, i) != 0.0) out.middleRows(k * rb, rb) += a(k, i) * v;
  }
  return out;
}

const Mat* slice_or_null(const MPS* m, int site, int s) {
  return m ? &m->cores[site][s] : nullptr;
}

// Left-to-right zip compression of the elementwise product u * v. The
// Kronecker bond chi_u * chi_v is never materialized as cores: the carry
// matrix maps an orthonormal compressed basis into it, and each site is
// truncated on the fly. The right part of the chain is not isometric during
// the pass, so singular values are only estimates; callers run this at a
// slack tolerance and polish afterwards.
MPS zip_product(const MPS& u, const MPS& v, double tol, int max_bond) {
  const int n = u.size();
  std::vector<Core> out(n);
  Mat carry = Mat::Ones(1, 1);
  double s_run = 0.0;
  const double budget_scale = tol / std::max(1, n - 1);
  for (int i = 0; i < n; ++i) {
    const Index chi_z = carry.rows();
    Mat m(2 * chi_z, u.chi_right(i) * v.chi_right(i));
    for (int s = 0; s < 2; ++s)
      m(Eigen::seqN(s, chi_z, 2), Eigen::all) =
          apply_kron_right(carry, u.cores[i][s], &v.cores[i][s]);
    if (i == n - 1) {
      out[i] = detail::fold_left(m);
      break;
    }
    s_run = std::max(s_run, m.squaredNorm());
    const auto svd = detail::thin_svd(m);
    const int k = detail::select_rank(svd.sv, budget_scale * s_run, max_bond);
    out[i] = detail::fold_left(svd.u.leftCols(k));
    carry = svd.sv.head(k).asDiagonal() * svd.v.leftCols(k).transpose();
  }
  return MPS(std::move(out), u.meta ? u.meta : v.meta);
}

// Exact block sum of scaled states: bond dimensions add, coefficients fold
// into the first site.
MPS direct_sum(const std::vector<const MPS*>& parts, const std::vector<double>& coeffs) {
  const int n = parts.front()->size();
  std::vector<Core> cores(n);
  for (int i = 0; i < n; ++i) {
    Index rows = 0, cols = 0;
    for (const MPS* p : parts) {
      rows += p->chi_left(i);
      cols += p->chi_right(i);
    }
    if (i == 0) rows = 1;
    if (i == n - 1) cols = 1;
    for (int s = 0; s < 2; ++s) {
      Mat m = Mat::Zero(rows, cols);
      Index ro = 0, co = 0;
      for (std::size_t t = 0; t < parts.size(); ++t) {
        const Mat& b = parts[t]->cores[i][s];
        m.block(i == 0 ? 0 : ro, i == n - 1 ? 0 : co, b.rows(), b.cols()) +=
            (i == 0 ? coeffs[t] : 1.0) * b;
        ro += b.rows();
        co += b.cols();
      }
      cores[i][s] = std::move(m);
    }
  }
  return MPS(std::move(cores));
}

}  // namespace

namespace detail {

MPS fit_terms(int n, const std::vector<FitTerm>& terms_in, const SimplifyStrategy& strategy,
              std::optional<DomainMeta> meta, FitStats* stats) {
  if (strategy.tolerance < 0)
    throw std::invalid_argument("fit: tolerance must be >= 0");
  std::vector<FitTerm> terms;
  for (const auto& t : terms_in) {
    if (!t.a) throw std::invalid_argument("fit: null term");
    if (t.a->size() != n || (t.b && t.b->size() != n))
      throw std::invalid_argument("fit: term size mismatch");
    if (t.coeff == 0.0) continue;
    if (norm2(*t.a) == 0.0 || (t.b && norm2(*t.b) == 0.0)) continue;
    terms.push_back(t);
  }
  if (terms.empty()) return MPS::zero(n, std::move(meta));

  if (n == 1) {
    Core c{Mat::Zero(1, 1), Mat::Zero(1, 1)};
    for (const auto& t : terms)
      for (int s = 0; s < 2; ++s) {
        double v = t.a->cores[0][s](0, 0);
        if (t.b) v *= t.b->cores[0][s](0, 0);
        c[s](0, 0) += t.coeff * v;
      }
    return MPS({c}, std::move(meta));
  }

  // Seed with the exact sum of the terms so the sweeps only ever compress.
  // Seeding from a thin skeleton instead is a trap: theta at a bond shows
  // the target filtered through phi's environments, so a component missing
  // from the span everywhere stays invisible at every bond and the
  // alternating scheme parks at a stationary point below the target.
  // Products are zip-compressed to keep the concatenated bond affordable;
  // the sub-tolerances are part of the overall error budget.
  const double sub_tol = strategy.tolerance / 16.0;
  std::vector<MPS> zipped;
  zipped.reserve(terms.size());
  std::vector<const MPS*> parts;
  std::vector<double> coeffs;
  for (const auto& t : terms) {
    if (t.b) {
      zipped.push_back(zip_product(*t.a, *t.b, sub_tol, strategy.max_bond));
      parts.push_back(&zipped.back());
    } else {
      parts.push_back(t.a);
    }
    coeffs.push_back(t.coeff);
  }
  // Gauge center at site 0: the first sweep's right environments must be
  // isometric or the theta norms (and with them the budget) are meaningless.
  MPS phi = canonicalize(svd_truncate(direct_sum(parts, coeffs), sub_tol, strategy.max_bond), 0);

  const int nt = static_cast<int>(terms.size());
  std::vector<std::vector<Mat>> lenv(nt, std::vector<Mat>(n + 1)),
      renv(nt, std::vector<Mat>(n + 1));
  for (int t = 0; t < nt; ++t) {
    lenv[t][0] = Mat::Ones(1, 1);
    renv[t][n] = Mat::Ones(1, 1);
    for (int i = n - 1; i >= 1; --i) {
      Mat acc;
      for (int s = 0; s < 2; ++s) {
        Mat r = apply_kron_left(terms[t].a->cores[i][s], slice_or_null(terms[t].b, i, s),
                                renv[t][i + 1] * phi.cores[i][s].transpose());
        acc = (s == 0) ? std::move(r) : acc + r;
      }
      renv[t][i] = std::move(acc);
    }
  }

  const double phi_norm = norm2(phi);
  double s_ref = phi_norm * phi_norm;

  const auto assemble = [&](int i) {
    const Index chi_l = phi.chi_left(i), chi_r = phi.chi_right(i + 1);
    Mat theta = Mat::Zero(2 * chi_l, 2 * chi_r);
    for (int t = 0; t < nt; ++t) {
      const auto& a = *terms[t].a;
      const MPS* b = terms[t].b;
      for (int s1 = 0; s1 < 2; ++s1) {
        const Mat left =
            apply_kron_right(lenv[t][i], a.cores[i][s1], slice_or_null(b, i, s1));
        for (int s2 = 0; s2 < 2; ++s2) {
          const Mat right = apply_kron_left(a.cores[i + 1][s2],
                                            slice_or_null(b, i + 1, s2), renv[t][i + 2]);
          theta(Eigen::seqN(s1, chi_l, 2), Eigen::seqN(s2 * chi_r, chi_r)) +=
              terms[t].coeff * (left * right);
        }
      }
    }
    return theta;
  };

  const auto update_lenv = [&](int i) {
    for (int t = 0; t < nt; ++t) {
      Mat acc;
      for (int s = 0; s < 2; ++s) {
        Mat l = apply_kron_right(phi.cores[i][s].transpose() * lenv[t][i],
                                 terms[t].a->cores[i][s], slice_or_null(terms[t].b, i, s));
        acc = (s == 0) ? std::move(l) : acc + l;
      }
      lenv[t][i + 1] = std::move(acc);
    }
  };

  const auto update_renv = [&](int i) {
    for (int t = 0; t < nt; ++t) {
      Mat acc;
      for (int s = 0; s < 2; ++s) {
        Mat r = apply_kron_left(terms[t].a->cores[i][s], slice_or_null(terms[t].b, i, s),
                                renv[t][i + 1] * phi.cores[i][s].transpose());
        acc = (s == 0) ? std::move(r) : acc + r;
      }
      renv[t][i] = std::move(acc);
    }
  };

  const auto half_sweep = [&](bool left_to_right) {
    const double budget_scale = strategy.tolerance / std::max(1, n - 1);
    double head = 0.0;
    for (int step = 0; step <= n - 2; ++step) {
      const int i = left_to_right ? step : n - 2 - step;
      Mat theta = assemble(i);
      s_ref = std::max(s_ref, theta.squaredNorm());
      const auto svd = detail::thin_svd(theta);
      const int k =
          detail::select_rank(svd.sv, budget_scale * s_ref, strategy.max_bond);
      if (left_to_right) {
        phi.cores[i] = detail::fold_left(svd.u.leftCols(k));
        phi.cores[i + 1] = detail::fold_right(svd.sv.head(k).asDiagonal() *
                                              svd.v.leftCols(k).transpose());
        update_lenv(i);
      } else {
        phi.cores[i + 1] = detail::fold_right(svd.v.leftCols(k).transpose());
        phi.cores[i] = detail::fold_left(svd.u.leftCols(k) *
                                         svd.sv.head(k).asDiagonal());
        update_renv(i + 1);
        if (i == 0) head = svd.sv.head(k).squaredNorm();
      }
    }
    return head;
  };

  // The seed already spans every term, so the sweeps converge in one or two
  // passes; further passes only re-derive the same truncation.
  double prev_s = -1.0, s_now = 0.0;
  int sweeps_done = 0;
  for (int sweep = 0; sweep < std::max(1, strategy.max_sweeps); ++sweep) {
    half_sweep(true);
    s_now = half_sweep(false);
    ++sweeps_done;
    const double gain_floor =
        std::max(0.1 * strategy.tolerance, 1e-15) * std::max(s_now, s_ref);
    if (prev_s >= 0.0 && std::abs(s_now - prev_s) <= gain_floor) break;
    prev_s = s_now;
  }

  if (stats) {
    stats->sweeps = sweeps_done;
    stats->target_norm2 = s_ref;
  }
  if (s_now <= 0.0) return MPS::zero(n, std::move(meta));
  if (strategy.normalize)
    for (auto& slice : phi.cores[0]) slice /= std::sqrt(s_now);
  phi.meta = std::move(meta);
  phi.validate();
  return phi;
}

}  // namespace detail

MPS combine(const LinearCombination& lc, const SimplifyStrategy& strategy) {
  if (lc.terms.empty()) throw std::invalid_argument("combine: empty combination");
  const int n = lc.terms.front().second.size();
  std::vector<detail::FitTerm> terms;
  terms.reserve(lc.terms.size());
  for (const auto& [coeff, state] : lc.terms) terms.push_back({coeff, &state, nullptr});
  return detail::fit_terms(n, terms, strategy, lc.terms.front().second.meta);
}

MPS truncate(const MPS& m, const SimplifyStrategy& strategy) {
  if (strategy.tolerance == 0.0 && m.max_bond() <= strategy.max_bond) {
    MPS r = svd_truncate(m, 0.0, strategy.max_bond);
    if (strategy.normalize) {
      const double nrm = norm2(r);
      if (nrm > 0)
        for (auto& slice : r.cores[0]) slice /= nrm;
    }
    return r;
  }
  return detail::fit_terms(m.size(), {{1.0, &m, nullptr}}, strategy, m.meta);
}

MPS hadamard(const MPS& u, const MPS& v, const SimplifyStrategy& strategy) {
  if (u.size() != v.size()) throw std::invalid_argument("hadamard: size mismatch");
  return detail::fit_terms(u.size(), {{1.0, &u, &v}}, strategy,
                           u.meta ? u.meta : v.meta);
}

MPS hadamard_raw(const MPS& u, const MPS& v) {
  if (u.size() != v.size()) throw std::invalid_argument("hadamard: size mismatch");
  std::vector<Core> cores(u.size());
  for (int i = 0; i < u.size(); ++i)
    for (int s = 0; s < 2; ++s)
      cores[i][s] = Eigen::kroneckerProduct(u.cores[i][s], v.cores[i][s]);
  return MPS(std::move(cores), u.meta ? u.meta : v.meta);
}

MPS tensor_product(const MPS& u, const MPS& v, QubitOrder order) {
  std::vector<Core> cores;
  std::optional<DomainMeta> meta;
  if (order == QubitOrder::Serial) {
    cores = u.cores;
    cores.insert(cores.end(), v.cores.begin(), v.cores.end());
    if (u.meta && v.meta && u.meta->order == QubitOrder::Serial &&
        v.meta->order == QubitOrder::Serial) {
      DomainMeta m = *u.meta;
      m.qubits.insert(m.qubits.end(), v.meta->qubits.begin(), v.meta->qubits.end());
      m.intervals.insert(m.intervals.end(), v.meta->intervals.begin(),
                         v.meta->intervals.end());
      meta = std::move(m);
    }
  } else {
    if (u.size() != v.size())
      throw std::invalid_argument("tensor_product: interleaved order requires equal sizes");
    for (int i = 0; i < u.size(); ++i) {
      const Index cu = v.chi_left(i);
      Core a, b;
      for (int s = 0; s < 2; ++s) {
        a[s] = Eigen::kroneckerProduct(u.cores[i][s], Mat::Identity(cu, cu));
        b[s] = Eigen::kroneckerProduct(Mat::Identity(u.chi_right(i), u.chi_right(i)),
                                       v.cores[i][s]);
      }
      cores.push_back(std::move(a));
      cores.push_back(std::move(b));
    }
    if (u.meta && v.meta && u.meta->dims() == 1 && v.meta->dims() == 1) {
      DomainMeta m;
      m.qubits = {u.meta->qubits[0], v.meta->qubits[0]};
      m.intervals = {u.meta->intervals[0], v.meta->intervals[0]};
      m.order = QubitOrder::Interleaved;
      meta = std::move(m);
    }
  }
  return MPS(std::move(cores), std::move(meta));
}

MPS embed_factor(const MPS& f, int dim, const DomainMeta& meta) {
  meta.validate();
  if (dim < 0 || dim >= meta.dims())
    throw std::invalid_argument("embed_factor: dimension out of range");
  if (f.size() != meta.qubits[dim])
    throw std::invalid_argument("embed_factor: factor size != qubits of dimension");
  const int m = meta.dims();
  std::vector<Core> cores;
  cores.reserve(meta.total_qubits());
  if (meta.order == QubitOrder::Serial) {
    for (int d = 0; d < m; ++d) {
      if (d == dim) {
        cores.insert(cores.end(), f.cores.begin(), f.cores.end());
      } else {
        Core ones{Mat::Ones(1, 1), Mat::Ones(1, 1)};
        cores.insert(cores.end(), meta.qubits[d], ones);
      }
    }
  } else {
    const int n = meta.qubits[0];
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < m; ++d) {
        if (d == dim) {
          cores.push_back(f.cores[k]);
        } else {
          const Index chi = (d < dim) ? f.chi_left(k) : f.chi_right(k);
          cores.push_back(Core{Mat::Identity(chi, chi), Mat::Identity(chi, chi)});
        }
      }
  }
  return MPS(std::move(cores), meta);
}

MPS affine_rescale(const MPS& g, Interval from, Interval to,
                   const SimplifyStrategy& strategy) {
  if (!(from.a < from.b))
    throw std::invalid_argument("affine_rescale: degenerate source interval");
  if (from == to) return g;
  const double scale = to.length() / from.length();
  const double offset = to.a - from.a * scale;
  if (offset == 0.0) {
    MPS r = g;
    for (auto& slice : r.cores[0]) slice *= scale;
    return r;
  }
  MPS ones(std::vector<Core>(g.size(), Core{Mat::Ones(1, 1), Mat::Ones(1, 1)}), g.meta);
  return detail::fit_terms(g.size(), {{scale, &g, nullptr}, {offset, &ones, nullptr}},
                           strategy, g.meta);
}

}  // namespace qtt
