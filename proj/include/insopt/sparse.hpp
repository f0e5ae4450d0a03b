// Symmetric sparse matrices in upper-triangle CSR form, assembled from
// triplets. Covers what the P1 forms need: symmetric matvec, quadratic
// forms, linear combinations, and submatrix extraction.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace insopt {

struct Triplet {
  int row;
  int col;
  double value;
};

class SparseSymMatrix {
public:
  SparseSymMatrix() = default;

  // Folds (r,c) onto the upper triangle (min,max) and sums duplicates.
  static SparseSymMatrix from_triplets(int n, std::vector<Triplet> entries) {
    if (n < 0) throw std::invalid_argument("SparseSymMatrix: negative dimension");
    for (auto& t : entries) {
      if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
        throw std::invalid_argument("SparseSymMatrix: triplet index out of range");
      if (t.row > t.col) std::swap(t.row, t.col);
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseSymMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t i = 0;
    for (int r = 0; r < n; ++r) {
      while (i < entries.size() && entries[i].row == r) {
        double v = entries[i].value;
        int c = entries[i].col;
        ++i;
        while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
          v += entries[i].value;
          ++i;
        }
        m.col_.push_back(c);
        m.val_.push_back(v);
      }
      m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.col_.size());
    }
    return m;
  }

  int size() const { return n_; }
  std::size_t nnz_upper() const { return val_.size(); }

  // y = A x with the lower triangle implied by symmetry.
  void apply(std::span<const double> x, std::span<double> y) const {
    assert(static_cast<int>(x.size()) == n_ && static_cast<int>(y.size()) == n_);
    std::fill(y.begin(), y.end(), 0.0);
    for (int r = 0; r < n_; ++r) {
      double acc = 0.0;
      const double xr = x[static_cast<std::size_t>(r)];
      for (int k = row_ptr_[r]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
        const int c = col_[static_cast<std::size_t>(k)];
        const double v = val_[static_cast<std::size_t>(k)];
        acc += v * x[static_cast<std::size_t>(c)];
        if (c != r) y[static_cast<std::size_t>(c)] += v * xr;
      }
      y[static_cast<std::size_t>(r)] += acc;
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_));
    apply(x, y);
    return y;
  }

  // x' A x
  double quad(std::span<const double> x) const {
    assert(static_cast<int>(x.size()) == n_);
    double diag = 0.0, off = 0.0;
    for (int r = 0; r < n_; ++r) {
      const double xr = x[static_cast<std::size_t>(r)];
      for (int k = row_ptr_[r]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
        const int c = col_[static_cast<std::size_t>(k)];
        const double v = val_[static_cast<std::size_t>(k)];
        if (c == r)
          diag += v * xr * xr;
        else
          off += v * xr * x[static_cast<std::size_t>(c)];
      }
    }
    return diag + 2.0 * off;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
        if (col_[static_cast<std::size_t>(k)] == r) d[static_cast<std::size_t>(r)] = val_[static_cast<std::size_t>(k)];
    return d;
  }

  // alpha*A + beta*B
  static SparseSymMatrix weighted_sum(double alpha, const SparseSymMatrix& a, double beta,
                                      const SparseSymMatrix& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("weighted_sum: dimension mismatch");
    std::vector<Triplet> t;
    t.reserve(a.val_.size() + b.val_.size());
    a.for_each_upper([&](int r, int c, double v) { t.push_back({r, c, alpha * v}); });
    b.for_each_upper([&](int r, int c, double v) { t.push_back({r, c, beta * v}); });
    return from_triplets(a.n_, std::move(t));
  }

  // Principal submatrix on the kept (sorted, unique) indices.
  SparseSymMatrix restrict_to(const std::vector<int>& keep) const {
    std::vector<int> pos(static_cast<std::size_t>(n_), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (keep[i] < 0 || keep[i] >= n_) throw std::invalid_argument("restrict_to: index out of range");
      pos[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
    }
    std::vector<Triplet> t;
    for_each_upper([&](int r, int c, double v) {
      const int rr = pos[static_cast<std::size_t>(r)];
      const int cc = pos[static_cast<std::size_t>(c)];
      if (rr >= 0 && cc >= 0) t.push_back({rr, cc, v});
    });
    return from_triplets(static_cast<int>(keep.size()), std::move(t));
  }

  template <class F>
  void for_each_upper(F&& f) const {
    for (int r = 0; r < n_; ++r)
      for (int k = row_ptr_[r]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
        f(r, col_[static_cast<std::size_t>(k)], val_[static_cast<std::size_t>(k)]);
  }

  // Debug dump, upper triangle only: one "row col value" line per entry.
  void write_triplets(std::ostream& os) const {
    for_each_upper([&](int r, int c, double v) { os << r << ' ' << c << ' ' << v << '\n'; });
  }

private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (auto& v : x) v *= alpha;
}

}  // namespace insopt
