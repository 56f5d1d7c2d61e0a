#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/OrderingMethods>

#include "avsfe/double_double.hpp"
#include "avsfe/error.hpp"

namespace avsfe {

inline double scalar_sqrt(double x) { return std::sqrt(x); }
inline long double scalar_sqrt(long double x) { return std::sqrt(x); }

/// Compressed sparse column storage of the upper triangle (row <= col) of a
/// symmetric matrix, with entries in `Scalar`.
template <class Scalar>
struct UpperCsc {
  int n = 0;
  std::vector<int> col_ptr;
  std::vector<int> row_idx;
  std::vector<Scalar> values;

  std::size_t nnz() const { return values.size(); }
};

/// Coordinate entry used to build UpperCsc; duplicates are summed in the
/// order they were appended.
template <class Scalar>
struct Entry {
  int row;
  int col;
  Scalar value;
};

/// Builds the upper triangle from entries given for the upper triangle only
/// (row <= col). Summation of duplicates follows input order.
template <class Scalar>
UpperCsc<Scalar> build_upper_csc(int n, const std::vector<Entry<Scalar>>& entries) {
  UpperCsc<Scalar> a;
  a.n = n;
  std::vector<int> count(n + 1, 0);
  for (const auto& e : entries) ++count[e.col + 1];
  for (int j = 0; j < n; ++j) count[j + 1] += count[j];
  std::vector<int> pos(count.begin(), count.end() - 1);
  std::vector<int> rows(entries.size());
  std::vector<Scalar> vals(entries.size());
  for (const auto& e : entries) {
    rows[pos[e.col]] = e.row;
    vals[pos[e.col]] = e.value;
    ++pos[e.col];
  }
  // Sort each column by row (stable, so duplicates keep input order) and merge.
  a.col_ptr.assign(n + 1, 0);
  std::vector<int> order;
  for (int j = 0; j < n; ++j) {
    const int b = count[j], e = count[j + 1];
    order.resize(e - b);
    for (int k = 0; k < e - b; ++k) order[k] = b + k;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return rows[x] < rows[y]; });
    int last = -1;
    for (int k : order) {
      if (rows[k] == last) {
        a.values.back() += vals[k];
      } else {
        a.row_idx.push_back(rows[k]);
        a.values.push_back(vals[k]);
        last = rows[k];
      }
    }
    a.col_ptr[j + 1] = static_cast<int>(a.values.size());
  }
  return a;
}

/// Up-looking sparse Cholesky (LL^T) with approximate minimum degree
/// ordering. Factorization and triangular solves run in `Scalar`; the
/// right-hand side and solution are exchanged in double.
template <class Scalar>
class SparseCholesky {
 public:
  /// Throws SolverError naming the first failing pivot (in the original,
  /// unpermuted numbering) when the matrix is not positive definite.
  void compute(const UpperCsc<Scalar>& a) {
    n_ = a.n;
    order(a);
    const UpperCsc<Scalar> c = permute(a);
    symbolic(c);
    numeric(c);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    std::vector<Scalar> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = static_cast<Scalar>(b[perm_[i]]);
    solve_in_place(x);
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i) out[perm_[i]] = static_cast<double>(x[i]);
    return out;
  }

  /// Solve with a right-hand side held in `Scalar`.
  std::vector<Scalar> solve(const std::vector<Scalar>& b) const {
    std::vector<Scalar> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    solve_in_place(x);
    std::vector<Scalar> out(n_);
    for (int i = 0; i < n_; ++i) out[perm_[i]] = x[i];
    return out;
  }

  int rows() const { return n_; }
  std::size_t factor_nnz() const { return lx_.size(); }
  const std::vector<int>& permutation() const { return perm_; }

 private:
  void order(const UpperCsc<Scalar>& a) {
    // AMD on the full symmetric pattern.
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * a.nnz());
    for (int j = 0; j < n_; ++j) {
      for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
        const int i = a.row_idx[p];
        t.emplace_back(i, j, 1.0);
        if (i != j) t.emplace_back(j, i, 1.0);
      }
    }
    Eigen::SparseMatrix<double> pattern(n_, n_);
    pattern.setFromTriplets(t.begin(), t.end());
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
    amd(pattern, p);
    // The ordering's indices map new -> old.
    perm_.assign(n_, 0);
    inv_perm_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      perm_[i] = p.indices()[i];
      inv_perm_[p.indices()[i]] = i;
    }
  }

  UpperCsc<Scalar> permute(const UpperCsc<Scalar>& a) const {
    std::vector<Entry<Scalar>> e;
    e.reserve(a.nnz());
    for (int j = 0; j < n_; ++j) {
      for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
        int r = inv_perm_[a.row_idx[p]], c = inv_perm_[j];
        if (r > c) std::swap(r, c);
        e.push_back({r, c, a.values[p]});
      }
    }
    return build_upper_csc(n_, e);
  }

  // Nonzero pattern of row k of L (excluding the diagonal), written to
  // stack[top..n) in topological order. Mirrors CSparse's cs_ereach.
  int ereach(const UpperCsc<Scalar>& c, int k, std::vector<int>& stack, std::vector<int>& mark) const {
    int top = n_;
    mark[k] = k;
    for (int p = c.col_ptr[k]; p < c.col_ptr[k + 1]; ++p) {
      int i = c.row_idx[p];
      if (i > k) continue;
      int len = 0;
      for (; mark[i] != k; i = parent_[i]) {
        stack[len++] = i;
        mark[i] = k;
      }
      while (len > 0) stack[--top] = stack[--len];
    }
    return top;
  }

  void symbolic(const UpperCsc<Scalar>& c) {
    parent_.assign(n_, -1);
    std::vector<int> ancestor(n_, -1);
    for (int k = 0; k < n_; ++k) {
      for (int p = c.col_ptr[k]; p < c.col_ptr[k + 1]; ++p) {
        for (int i = c.row_idx[p]; i != -1 && i < k;) {
          const int next = ancestor[i];
          ancestor[i] = k;
          if (next == -1) {
            parent_[i] = k;
            break;
          }
          i = next;
        }
      }
    }
    std::vector<int> counts(n_, 1);  // diagonal
    std::vector<int> stack(n_), mark(n_, -1);
    for (int k = 0; k < n_; ++k) {
      const int top = ereach(c, k, stack, mark);
      for (int t = top; t < n_; ++t) ++counts[stack[t]];
    }
    lp_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) lp_[j + 1] = lp_[j] + counts[j];
    li_.assign(lp_[n_], 0);
    lx_.assign(lp_[n_], Scalar(0));
  }

  void numeric(const UpperCsc<Scalar>& c) {
    std::vector<int> next(lp_.begin(), lp_.end() - 1);
    std::vector<int> stack(n_), mark(n_, -1);
    std::vector<Scalar> x(n_, Scalar(0));
    for (int k = 0; k < n_; ++k) {
      const int top = ereach(c, k, stack, mark);
      for (int p = c.col_ptr[k]; p < c.col_ptr[k + 1]; ++p) {
        if (c.row_idx[p] <= k) x[c.row_idx[p]] = c.values[p];
      }
      Scalar d = x[k];
      x[k] = Scalar(0);
      for (int t = top; t < n_; ++t) {
        const int i = stack[t];
        const Scalar lki = x[i] / lx_[lp_[i]];
        x[i] = Scalar(0);
        for (int p = lp_[i] + 1; p < next[i]; ++p) x[li_[p]] -= lx_[p] * lki;
        d -= lki * lki;
        li_[next[i]] = k;
        lx_[next[i]] = lki;
        ++next[i];
      }
      if (!(d > Scalar(0))) {
        throw SolverError("matrix is not positive definite: pivot " + std::to_string(k) +
                          " (dof " + std::to_string(perm_[k]) + ") = " +
                          std::to_string(static_cast<double>(d)));
      }
      li_[next[k]] = k;
      lx_[next[k]] = scalar_sqrt(d);
      ++next[k];
    }
  }

  void solve_in_place(std::vector<Scalar>& x) const {
    for (int j = 0; j < n_; ++j) {
      x[j] /= lx_[lp_[j]];
      for (int p = lp_[j] + 1; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * x[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      for (int p = lp_[j] + 1; p < lp_[j + 1]; ++p) x[j] -= lx_[p] * x[li_[p]];
      x[j] /= lx_[lp_[j]];
    }
  }

  int n_ = 0;
  std::vector<int> perm_;      // new -> old
  std::vector<int> inv_perm_;  // old -> new
  std::vector<int> parent_;
  std::vector<int> lp_, li_;
  std::vector<Scalar> lx_;
};

}  // namespace avsfe
