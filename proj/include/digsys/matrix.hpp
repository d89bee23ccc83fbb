#pragma once
// Exact rational and integer linear algebra: matrix arithmetic, inverse,
// determinants, column Hermite normal form, Smith normal form and integer
// linear-system solving. Everything is computed over Z or Q with no rounding.

#include "digsys/numbers.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace digsys {

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

inline Int vec_inf_norm(const IntVec& v) {
  Int m = 0;
  for (const Int& x : v) m = std::max(m, int_abs(x));
  return m;
}

// Rectangular matrix over Z.
class IntMat {
 public:
  IntMat() : rows_(0), cols_(0) {}
  IntMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  IntMat(std::size_t rows, std::size_t cols, std::vector<Int> entries)
      : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows_ * cols_)
      throw DimensionError("IntMat: entry count does not match shape");
  }

  static IntMat identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  const std::vector<Int>& entries() const { return a_; }

  bool operator==(const IntMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  IntMat mul(const IntMat& b) const {
    if (cols_ != b.rows_) throw DimensionError("IntMat::mul: shape mismatch");
    IntMat r(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Int& aik = at(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          r.at(i, j) += aik * b.at(k, j);
      }
    return r;
  }

  IntVec mul_vec(const IntVec& v) const {
    if (cols_ != v.size())
      throw DimensionError("IntMat::mul_vec: shape mismatch");
    IntVec r(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r[i] += at(i, j) * v[j];
    return r;
  }

  IntMat transpose() const {
    IntMat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  // Fraction-free Bareiss determinant; square matrices only.
  Int det() const {
    if (rows_ != cols_) throw DimensionError("IntMat::det: not square");
    std::size_t n = rows_;
    if (n == 0) return 1;
    IntMat m = *this;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (m.at(k, k) == 0) {
        std::size_t p = k + 1;
        while (p < n && m.at(p, k) == 0) ++p;
        if (p == n) return 0;
        for (std::size_t j = 0; j < n; ++j)
          std::swap(m.at(k, j), m.at(p, j));
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i)
        for (std::size_t j = k + 1; j < n; ++j) {
          Int v = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
          m.at(i, j) = v / prev;  // exact by Bareiss
        }
      prev = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : Int(-m.at(n - 1, n - 1));
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

// Square matrix over Q.
class RatMat {
 public:
  RatMat() : n_(0) {}
  explicit RatMat(std::size_t n) : n_(n), a_(n * n) {}
  RatMat(std::size_t n, std::vector<Rat> entries)
      : n_(n), a_(std::move(entries)) {
    if (a_.size() != n_ * n_)
      throw DimensionError("RatMat: entry count does not match dimension");
  }

  static RatMat identity(std::size_t n) {
    RatMat m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static RatMat from_int(const IntMat& m) {
    if (m.rows() != m.cols())
      throw DimensionError("RatMat::from_int: not square");
    RatMat r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) r.at(i, j) = Rat(m.at(i, j));
    return r;
  }

  static RatMat block_diag(const std::vector<RatMat>& blocks) {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size();
    RatMat r(n);
    std::size_t off = 0;
    for (const auto& b : blocks) {
      for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
          r.at(off + i, off + j) = b.at(i, j);
      off += b.size();
    }
    return r;
  }

  std::size_t size() const { return n_; }

  Rat& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  const std::vector<Rat>& entries() const { return a_; }

  bool operator==(const RatMat& o) const { return n_ == o.n_ && a_ == o.a_; }

  bool is_zero() const {
    for (const Rat& x : a_)
      if (x != 0) return false;
    return true;
  }

  bool is_identity() const { return *this == identity(n_); }

  RatMat mul(const RatMat& b) const {
    if (n_ != b.n_) throw DimensionError("RatMat::mul: dimension mismatch");
    RatMat r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        const Rat& aik = at(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < n_; ++j) r.at(i, j) += aik * b.at(k, j);
      }
    return r;
  }

  RatMat add(const RatMat& b) const {
    if (n_ != b.n_) throw DimensionError("RatMat::add: dimension mismatch");
    RatMat r(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + b.a_[i];
    return r;
  }

  RatMat sub(const RatMat& b) const {
    if (n_ != b.n_) throw DimensionError("RatMat::sub: dimension mismatch");
    RatMat r(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - b.a_[i];
    return r;
  }

  RatMat scalar_mul(const Rat& c) const {
    RatMat r(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * c;
    return r;
  }

  RatVec mul_vec(const RatVec& v) const {
    if (v.size() != n_)
      throw DimensionError("RatMat::mul_vec: dimension mismatch");
    RatVec r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r[i] += at(i, j) * v[j];
    return r;
  }

  // Exact Gauss-Jordan inverse; throws SingularMatrixError when det = 0.
  RatMat inverse() const {
    std::size_t n = n_;
    RatMat m = *this;
    RatMat inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      while (piv < n && m.at(piv, col) == 0) ++piv;
      if (piv == n) throw SingularMatrixError("matrix is singular");
      if (piv != col)
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(m.at(piv, j), m.at(col, j));
          std::swap(inv.at(piv, j), inv.at(col, j));
        }
      Rat d = m.at(col, col);
      for (std::size_t j = 0; j < n; ++j) {
        m.at(col, j) /= d;
        inv.at(col, j) /= d;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (i == col) continue;
        Rat f = m.at(i, col);
        if (f == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          m.at(i, j) -= f * m.at(col, j);
          inv.at(i, j) -= f * inv.at(col, j);
        }
      }
    }
    return inv;
  }

  Rat det() const {
    Int den = denominator_lcm();
    IntMat m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        m.at(i, j) = numerator(at(i, j)) * (den / denominator(at(i, j)));
    return Rat(m.det(), int_pow(den, static_cast<unsigned long>(n_)));
  }

  Int denominator_lcm() const {
    Int l = 1;
    for (const Rat& x : a_) l = int_lcm(l, denominator(x));
    return l == 0 ? Int(1) : l;
  }

  bool is_integer() const {
    for (const Rat& x : a_)
      if (denominator(x) != 1) return false;
    return true;
  }

  IntMat to_int_mat() const {
    if (!is_integer())
      throw InvalidInputError("RatMat::to_int_mat: non-integer entries");
    IntMat r(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r.at(i, j) = numerator(at(i, j));
    return r;
  }

 private:
  std::size_t n_;
  std::vector<Rat> a_;
};

// Column Hermite normal form: input * U = H with U unimodular. H is a
// lower staircase with positive pivots; in every pivot row the entries of
// earlier columns are reduced into [0, pivot). Zero columns trail.
struct HnfResult {
  IntMat H;
  IntMat U;
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
};

inline HnfResult hnf(const IntMat& input) {
  IntMat h = input;
  IntMat u = IntMat::identity(input.cols());
  std::size_t rows = h.rows(), cols = h.cols();

  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows; ++r) std::swap(h.at(r, i), h.at(r, j));
    for (std::size_t r = 0; r < cols; ++r) std::swap(u.at(r, i), u.at(r, j));
  };
  auto col_negate = [&](std::size_t j) {
    for (std::size_t r = 0; r < rows; ++r) h.at(r, j) = -h.at(r, j);
    for (std::size_t r = 0; r < cols; ++r) u.at(r, j) = -u.at(r, j);
  };
  // columns (i, j) <- (x*ci + y*cj, p*ci + q*cj); caller keeps det = +-1
  auto col_combine = [&](std::size_t i, std::size_t j, const Int& x,
                         const Int& y, const Int& p, const Int& q) {
    for (std::size_t r = 0; r < rows; ++r) {
      Int ci = h.at(r, i), cj = h.at(r, j);
      h.at(r, i) = x * ci + y * cj;
      h.at(r, j) = p * ci + q * cj;
    }
    for (std::size_t r = 0; r < cols; ++r) {
      Int ci = u.at(r, i), cj = u.at(r, j);
      u.at(r, i) = x * ci + y * cj;
      u.at(r, j) = p * ci + q * cj;
    }
  };
  auto col_axpy = [&](std::size_t dst, std::size_t src, const Int& f) {
    if (f == 0) return;
    for (std::size_t r = 0; r < rows; ++r) h.at(r, dst) += f * h.at(r, src);
    for (std::size_t r = 0; r < cols; ++r) u.at(r, dst) += f * u.at(r, src);
  };

  std::vector<std::pair<std::size_t, std::size_t>> pivots;
  std::size_t c = 0;
  for (std::size_t r = 0; r < rows && c < cols; ++r) {
    std::size_t j = c;
    while (j < cols && h.at(r, j) == 0) ++j;
    if (j == cols) continue;
    col_swap(c, j);
    for (j = c + 1; j < cols; ++j) {
      if (h.at(r, j) == 0) continue;
      Int a = h.at(r, c), b = h.at(r, j);
      ExtGcd e = ext_gcd(a, b);
      col_combine(c, j, e.x, e.y, -b / e.g, a / e.g);
    }
    if (h.at(r, c) < 0) col_negate(c);
    pivots.emplace_back(r, c);
    ++c;
  }
  // Reduce earlier columns against each pivot column.
  for (const auto& [pr, pc] : pivots) {
    for (std::size_t j = 0; j < pc; ++j) {
      Int q = floor_div(h.at(pr, j), h.at(pr, pc));
      col_axpy(j, pc, -q);
    }
  }
  return {std::move(h), std::move(u), std::move(pivots)};
}

// Smith normal form: U * input * V = S, S diagonal with d1 | d2 | ... and
// nonnegative diagonal entries; U, V unimodular.
struct SnfResult {
  IntMat S;
  IntMat U;
  IntMat V;
};

inline SnfResult snf(const IntMat& input) {
  IntMat s = input;
  std::size_t rows = s.rows(), cols = s.cols();
  IntMat u = IntMat::identity(rows);
  IntMat v = IntMat::identity(cols);

  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols; ++k) std::swap(s.at(i, k), s.at(j, k));
    for (std::size_t k = 0; k < rows; ++k) std::swap(u.at(i, k), u.at(j, k));
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < rows; ++k) std::swap(s.at(k, i), s.at(k, j));
    for (std::size_t k = 0; k < cols; ++k) std::swap(v.at(k, i), v.at(k, j));
  };
  auto row_axpy = [&](std::size_t dst, std::size_t src, const Int& f) {
    if (f == 0) return;
    for (std::size_t k = 0; k < cols; ++k) s.at(dst, k) += f * s.at(src, k);
    for (std::size_t k = 0; k < rows; ++k) u.at(dst, k) += f * u.at(src, k);
  };
  auto col_axpy = [&](std::size_t dst, std::size_t src, const Int& f) {
    if (f == 0) return;
    for (std::size_t k = 0; k < rows; ++k) s.at(k, dst) += f * s.at(k, src);
    for (std::size_t k = 0; k < cols; ++k) v.at(k, dst) += f * v.at(k, src);
  };
  auto row_negate = [&](std::size_t i) {
    for (std::size_t k = 0; k < cols; ++k) s.at(i, k) = -s.at(i, k);
    for (std::size_t k = 0; k < rows; ++k) u.at(i, k) = -u.at(i, k);
  };

  std::size_t t = 0;
  std::size_t lim = std::min(rows, cols);
  while (t < lim) {
    // locate minimal nonzero entry in the trailing submatrix
    bool found = false;
    std::size_t bi = t, bj = t;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j) {
        if (s.at(i, j) == 0) continue;
        if (!found || int_abs(s.at(i, j)) < int_abs(s.at(bi, bj))) {
          bi = i;
          bj = j;
          found = true;
        }
      }
    if (!found) break;
    row_swap(t, bi);
    col_swap(t, bj);

    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (s.at(i, t) == 0) continue;
        Int q = floor_div(s.at(i, t), s.at(t, t));
        row_axpy(i, t, -q);
        if (s.at(i, t) != 0) {
          row_swap(t, i);
          dirty = true;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (s.at(t, j) == 0) continue;
        Int q = floor_div(s.at(t, j), s.at(t, t));
        col_axpy(j, t, -q);
        if (s.at(t, j) != 0) {
          col_swap(t, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      // force divisibility of the remaining block by the pivot
      for (std::size_t i = t + 1; i < rows && !dirty; ++i)
        for (std::size_t j = t + 1; j < cols && !dirty; ++j)
          if (s.at(i, j) % s.at(t, t) != 0) {
            row_axpy(t, i, 1);
            dirty = true;
          }
    }
    if (s.at(t, t) < 0) row_negate(t);
    ++t;
  }
  return {std::move(s), std::move(u), std::move(v)};
}

// Solve B x = v over the integers via column HNF. Returns a particular
// solution or nullopt when no integer solution exists.
inline std::optional<IntVec> solve_integer(const IntMat& b, const IntVec& v) {
  if (v.size() != b.rows())
    throw DimensionError("solve_integer: vector length mismatch");
  HnfResult r = hnf(b);
  IntVec y(b.cols(), Int(0));
  for (const auto& [pr, pc] : r.pivots) {
    Int acc = v[pr];
    for (std::size_t j = 0; j < pc; ++j) acc -= r.H.at(pr, j) * y[j];
    if (acc % r.H.at(pr, pc) != 0) return std::nullopt;
    y[pc] = acc / r.H.at(pr, pc);
  }
  if (r.H.mul_vec(y) != v) return std::nullopt;
  return r.U.mul_vec(y);
}

// For square nonsingular T with h = hnf(T): write x = H y + c where c is the
// canonical box representative of x modulo the column lattice of T
// (componentwise 0 <= c_i < H_ii). Returns (c, y).
inline std::pair<IntVec, IntVec> hnf_box_reduce(const HnfResult& h,
                                                const IntVec& x) {
  std::size_t n = h.H.rows();
  if (h.pivots.size() != n)
    throw InvalidInputError("hnf_box_reduce: matrix is singular");
  IntVec c = x;
  IntVec y(n, Int(0));
  for (std::size_t i = 0; i < n; ++i) {
    Int q = floor_div(c[i], h.H.at(i, i));
    y[i] = q;
    if (q == 0) continue;
    for (std::size_t r = i; r < n; ++r) c[r] -= q * h.H.at(r, i);
  }
  return {std::move(c), std::move(y)};
}

// All canonical representatives of Z^n modulo the column lattice of T
// (H = hnf(T).H, |det T| of them). Throws when the count exceeds the cap.
inline std::vector<IntVec> hnf_box_representatives(const HnfResult& h,
                                                   long long cap) {
  std::size_t n = h.H.rows();
  if (h.pivots.size() != n)
    throw InvalidInputError("hnf_box_representatives: singular matrix");
  Int total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= h.H.at(i, i);
  if (total > cap)
    throw BudgetExceededError("coset representative count " + total.str() +
                              " exceeds budget");
  std::vector<IntVec> reps;
  IntVec cur(n, Int(0));
  while (true) {
    reps.push_back(cur);
    std::size_t i = 0;
    while (i < n) {
      ++cur[i];
      if (cur[i] < h.H.at(i, i)) break;
      cur[i] = 0;
      ++i;
    }
    if (i == n) break;
  }
  return reps;
}

}  // namespace digsys
