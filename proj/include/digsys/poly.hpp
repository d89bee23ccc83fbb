#pragma once
// Integer and rational polynomials (dense, coefficients stored low to high),
// exact ring arithmetic, gcd / squarefree machinery, characteristic
// polynomials and companion matrices.

#include "digsys/matrix.hpp"
#include "digsys/numbers.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace digsys {

class IntPoly {
 public:
  IntPoly() = default;  // zero polynomial
  explicit IntPoly(std::vector<Int> coeffs) : c_(std::move(coeffs)) {
    normalize();
  }
  IntPoly(std::initializer_list<long> coeffs) {
    for (long v : coeffs) c_.emplace_back(v);
    normalize();
  }

  static IntPoly constant(Int v) {
    IntPoly p;
    if (v != 0) p.c_.push_back(std::move(v));
    return p;
  }
  static IntPoly x_power(std::size_t k) {
    IntPoly p;
    p.c_.assign(k + 1, Int(0));
    p.c_[k] = 1;
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Int& lc() const {
    if (c_.empty()) throw InvalidInputError("lc of zero polynomial");
    return c_.back();
  }
  Int coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Int(0); }
  Int constant_term() const { return coeff(0); }
  const std::vector<Int>& coeffs() const { return c_; }

  bool operator==(const IntPoly& o) const { return c_ == o.c_; }

  IntPoly operator-() const {
    IntPoly r = *this;
    for (Int& x : r.c_) x = -x;
    return r;
  }

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<Int> r(std::max(a.c_.size(), b.c_.size()), Int(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return IntPoly(std::move(r));
  }
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    return a + (-b);
  }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return IntPoly();
    std::vector<Int> r(a.c_.size() + b.c_.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        r[i + j] += a.c_[i] * b.c_[j];
    }
    return IntPoly(std::move(r));
  }
  friend IntPoly operator*(const Int& s, const IntPoly& a) {
    if (s == 0) return IntPoly();
    IntPoly r = a;
    for (Int& x : r.c_) x *= s;
    return r;
  }

  IntPoly mul_x_power(std::size_t k) const {
    if (is_zero()) return IntPoly();
    std::vector<Int> r(c_.size() + k, Int(0));
    for (std::size_t i = 0; i < c_.size(); ++i) r[i + k] = c_[i];
    return IntPoly(std::move(r));
  }

  // quotient by x^k; all lower coefficients must vanish
  IntPoly div_x_power(std::size_t k) const {
    for (std::size_t i = 0; i < k && i < c_.size(); ++i)
      if (c_[i] != 0)
        throw NotDivisibleError("div_x_power: nonzero low coefficient");
    if (c_.size() <= k) return IntPoly();
    return IntPoly(std::vector<Int>(c_.begin() + k, c_.end()));
  }

  Int eval_int(const Int& x) const {
    Int acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }
  Rat eval(const Rat& x) const {
    Rat acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + Rat(c_[i]);
    return acc;
  }

  IntPoly derivative() const {
    if (c_.size() <= 1) return IntPoly();
    std::vector<Int> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Int(i);
    return IntPoly(std::move(r));
  }

  Int max_abs_coeff() const {
    Int m = 0;
    for (const Int& x : c_) m = std::max(m, int_abs(x));
    return m;
  }

  // content with sign chosen so that the primitive part has positive lc
  Int content() const {
    if (is_zero()) throw InvalidInputError("content of zero polynomial");
    Int g = 0;
    for (const Int& x : c_) g = int_gcd(g, x);
    return lc() < 0 ? Int(-g) : g;
  }

  std::pair<Int, IntPoly> content_primitive() const {
    Int cont = content();
    IntPoly pp = *this;
    for (Int& x : pp.c_) x /= cont;
    return {cont, pp};
  }

  IntPoly primitive_part() const { return content_primitive().second; }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = c_.size(); i-- > 0;) {
      const Int& a = c_[i];
      if (a == 0) continue;
      bool first = out.empty();
      Int mag = int_abs(a);
      if (a < 0)
        out += first ? "-" : " - ";
      else if (!first)
        out += " + ";
      if (i == 0) {
        out += mag.str();
      } else {
        if (mag != 1) out += mag.str();
        out += "x";
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Int> c_;
};

// Deterministic total order: by degree, then coefficients from the top.
inline int poly_compare(const IntPoly& a, const IntPoly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  for (int i = a.degree(); i >= 0; --i) {
    Int ca = a.coeff(i), cb = b.coeff(i);
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}
inline bool operator<(const IntPoly& a, const IntPoly& b) {
  return poly_compare(a, b) < 0;
}

// Exact division in Z[x]: returns q with a = q*b, or nullopt.
inline std::optional<IntPoly> exact_divide(const IntPoly& a,
                                           const IntPoly& b) {
  if (b.is_zero()) return std::nullopt;
  if (a.is_zero()) return IntPoly();
  if (a.degree() < b.degree()) return std::nullopt;
  std::vector<Int> rem(a.coeffs());
  std::vector<Int> q(a.degree() - b.degree() + 1, Int(0));
  for (int i = static_cast<int>(q.size()) - 1; i >= 0; --i) {
    Int top = rem[i + b.degree()];
    if (top == 0) continue;
    if (top % b.lc() != 0) return std::nullopt;
    Int f = top / b.lc();
    q[i] = f;
    for (int j = 0; j <= b.degree(); ++j) rem[i + j] -= f * b.coeff(j);
  }
  for (const Int& x : rem)
    if (x != 0) return std::nullopt;
  return IntPoly(std::move(q));
}

inline IntPoly exact_divide_or_throw(const IntPoly& a, const IntPoly& b) {
  auto q = exact_divide(a, b);
  if (!q) throw NotDivisibleError("polynomial division is not exact");
  return *q;
}

inline bool poly_divides(const IntPoly& d, const IntPoly& a) {
  return exact_divide(a, d).has_value();
}

// Pseudo-remainder of a by b (b != 0), up to a power of lc(b); sufficient for
// the primitive PRS since primitive parts are taken right after.
inline IntPoly pseudo_rem(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw InvalidInputError("pseudo_rem: zero divisor");
  IntPoly r = a;
  while (!r.is_zero() && r.degree() >= b.degree()) {
    std::size_t shift = r.degree() - b.degree();
    r = b.lc() * r - (r.lc() * b).mul_x_power(shift);
  }
  return r;
}

// gcd over Z (includes the content part); result has positive lc.
inline IntPoly poly_gcd(IntPoly a, IntPoly b) {
  if (a.is_zero() && b.is_zero()) return IntPoly();
  if (a.is_zero()) return b.lc() < 0 ? -b : b;
  if (b.is_zero()) return a.lc() < 0 ? -a : a;
  Int cont = int_gcd(a.content(), b.content());
  IntPoly f = a.primitive_part(), g = b.primitive_part();
  while (!g.is_zero()) {
    IntPoly r = pseudo_rem(f, g);
    f = g;
    g = r.is_zero() ? IntPoly() : r.primitive_part();
  }
  if (f.lc() < 0) f = -f;
  return int_abs(cont) * f;
}

// Yun squarefree decomposition of a primitive polynomial with positive lc:
// returns [(g_i, i)] with input = prod g_i^i, each g_i squarefree, pairwise
// coprime, positive lc.
inline std::vector<std::pair<IntPoly, int>> yun_squarefree(const IntPoly& f) {
  if (f.is_zero() || f.degree() < 1)
    throw InvalidInputError("yun_squarefree: expects degree >= 1");
  std::vector<std::pair<IntPoly, int>> out;
  IntPoly fp = f.derivative();
  IntPoly a0 = poly_gcd(f, fp);
  if (a0.degree() == 0) {
    out.emplace_back(f, 1);
    return out;
  }
  IntPoly b = exact_divide_or_throw(f, a0);
  IntPoly c = exact_divide_or_throw(fp, a0);
  IntPoly d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    IntPoly g = poly_gcd(b, d);
    if (g.degree() > 0) out.emplace_back(g, i);
    b = exact_divide_or_throw(b, g);
    c = exact_divide_or_throw(d, g);
    d = c - b.derivative();
    ++i;
  }
  return out;
}

// x^deg(p) * p(1/x): coefficient reversal. Requires p(0) != 0.
inline IntPoly reciprocal(const IntPoly& p) {
  if (p.is_zero() || p.constant_term() == 0)
    throw InvalidInputError("reciprocal: p(0) must be nonzero");
  std::vector<Int> r(p.coeffs().rbegin(), p.coeffs().rend());
  return IntPoly(std::move(r));
}

// +1 when p* = p, -1 when p* = -p, 0 otherwise.
inline int self_reciprocal_sign(const IntPoly& p) {
  if (p.is_zero() || p.constant_term() == 0) return 0;
  IntPoly r = reciprocal(p);
  if (r == p) return 1;
  if (r == -p) return -1;
  return 0;
}

class RatPoly {
 public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) {
    normalize();
  }
  static RatPoly from_int(const IntPoly& p) {
    std::vector<Rat> c(p.coeffs().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = Rat(p.coeffs()[i]);
    return RatPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Rat coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rat(0); }
  const std::vector<Rat>& coeffs() const { return c_; }
  bool operator==(const RatPoly& o) const { return c_ == o.c_; }

  Rat eval(const Rat& x) const {
    Rat acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  RatMat eval_mat(const RatMat& a) const {
    RatMat acc(a.size());
    RatMat id = RatMat::identity(a.size());
    for (std::size_t i = c_.size(); i-- > 0;)
      acc = acc.mul(a).add(id.scalar_mul(c_[i]));
    return acc;
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rat> c_;
};

// Primitive integer polynomial with positive lc spanning the same rational
// line as p.
inline IntPoly integerize(const RatPoly& p) {
  if (p.is_zero()) return IntPoly();
  Int den = 1;
  for (const Rat& c : p.coeffs()) den = int_lcm(den, denominator(c));
  std::vector<Int> c(p.coeffs().size());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = numerator(p.coeffs()[i]) * (den / denominator(p.coeffs()[i]));
  return IntPoly(std::move(c)).primitive_part();
}

// Monic characteristic polynomial via Faddeev-LeVerrier; exact over Q.
inline RatPoly char_poly(const RatMat& a) {
  std::size_t n = a.size();
  std::vector<Rat> coeffs(n + 1, Rat(0));
  coeffs[n] = 1;
  RatMat m = a;  // M_1 = A
  for (std::size_t k = 1; k <= n; ++k) {
    Rat tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += m.at(i, i);
    Rat ck = -tr / Rat(static_cast<long>(k));
    coeffs[n - k] = ck;
    if (k == n) break;
    RatMat shifted = m.add(RatMat::identity(n).scalar_mul(ck));
    m = a.mul(shifted);
  }
  return RatPoly(std::move(coeffs));
}

inline RatMat eval_poly_at_matrix(const IntPoly& p, const RatMat& a) {
  return RatPoly::from_int(p).eval_mat(a);
}

// Companion matrix of p (degree d >= 1): sub-diagonal ones and last column
// -a_i/a_d. Satisfies a_d * char_poly(C) = p.
inline RatMat companion(const IntPoly& p) {
  if (p.degree() < 1)
    throw InvalidInputError("companion: degree must be >= 1");
  std::size_t d = static_cast<std::size_t>(p.degree());
  RatMat c(d);
  for (std::size_t i = 0; i + 1 < d; ++i) c.at(i + 1, i) = 1;
  for (std::size_t i = 0; i < d; ++i)
    c.at(i, d - 1) = Rat(-p.coeff(i), p.lc());
  return c;
}

inline IntPoly int_poly_pow(const IntPoly& p, unsigned m) {
  IntPoly r = IntPoly::constant(1);
  for (unsigned i = 0; i < m; ++i) r = r * p;
  return r;
}

}  // namespace digsys
