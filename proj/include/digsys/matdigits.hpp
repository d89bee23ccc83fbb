#pragma once
// Digit systems for rational square matrices A acting on Z^n[A]:
//   - membership in Z^n[A] with exact certificates,
//   - primary/Frobenius canonical form A T = T B with integer T,
//   - companion-block digit sets, block sums, coset augmentation,
//   - construction of (A, D) with the finiteness property when no eigenvalue
//     lies inside the unit circle, representation and exact evaluation,
//   - certified non-existence bounds (contracting left eigenvector) and the
//     backward-division orbit demo.

#include "digsys/factor.hpp"
#include "digsys/interval.hpp"
#include "digsys/matrix.hpp"
#include "digsys/numbers.hpp"
#include "digsys/poly.hpp"
#include "digsys/polydigits.hpp"
#include "digsys/roots.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace digsys {

struct RepresentError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// membership in Z^n[A]

struct ModuleElem {
  RatVec value;
  // u_0..u_{k-1} integer vectors with value = sum A^i u_i
  std::optional<std::vector<IntVec>> certificate;
};

struct MembershipResult {
  enum class Status { Member, NotMember, Inconclusive };
  Status status = Status::Inconclusive;
  std::optional<ModuleElem> elem;
  long cap = 0;
};

namespace detail {

inline Int rat_vec_den_lcm(const RatVec& v) {
  Int l = 1;
  for (const Rat& x : v) l = int_lcm(l, denominator(x));
  return l;
}

// true iff den has a prime factor not dividing base
inline bool has_foreign_prime(Int den, const Int& base) {
  while (den > 1) {
    Int g = int_gcd(den, base);
    if (g == 1) return true;
    while (den % g == 0) den /= g;
  }
  return false;
}

inline long default_membership_cap(std::size_t n, const Int& den_a,
                                   const Int& den_v) {
  long e = 0;
  Int t = 1;
  while (t % den_v != 0) {
    t *= den_a;
    ++e;
    if (e > 4096) throw Error("membership: denominator exponent runaway");
  }
  return static_cast<long>(n) + e + 8;
}

}  // namespace detail

// Searches increasing k for an exact integer solution of
// [I | A | ... | A^{k-1}] u = v (denominator-cleared). NotMember is returned
// when den(v) has a prime outside den(A) (then v is provably outside the
// module); otherwise Inconclusive at the cap. cap <= 0 selects the default
// n + denominator-exponent(v) + 8.
inline MembershipResult membership(const RatMat& a, const RatVec& v,
                                   long cap = 0) {
  std::size_t n = a.size();
  if (v.size() != n) throw DimensionError("membership: vector length");
  Int den_a = a.denominator_lcm();
  Int den_v = detail::rat_vec_den_lcm(v);
  MembershipResult out;
  if (detail::has_foreign_prime(den_v, den_a)) {
    out.status = MembershipResult::Status::NotMember;
    return out;
  }
  if (cap <= 0) cap = detail::default_membership_cap(n, den_a, den_v);
  out.cap = cap;
  std::vector<RatMat> powers{RatMat::identity(n)};
  for (long k = 1; k <= cap; ++k) {
    if (static_cast<long>(powers.size()) < k)
      powers.push_back(powers.back().mul(a));
    Int lambda = den_v;
    for (const RatMat& p : powers) lambda = int_lcm(lambda, p.denominator_lcm());
    IntMat m(n, static_cast<std::size_t>(k) * n);
    for (long i = 0; i < k; ++i)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          const Rat& q = powers[static_cast<std::size_t>(i)].at(r, c);
          m.at(r, static_cast<std::size_t>(i) * n + c) =
              numerator(q) * (lambda / denominator(q));
        }
    IntVec rhs(n);
    for (std::size_t r = 0; r < n; ++r)
      rhs[r] = numerator(v[r]) * (lambda / denominator(v[r]));
    if (auto sol = solve_integer(m, rhs)) {
      std::vector<IntVec> cert;
      for (long i = 0; i < k; ++i)
        cert.emplace_back(sol->begin() + static_cast<long>(n) * i,
                          sol->begin() + static_cast<long>(n) * (i + 1));
      out.status = MembershipResult::Status::Member;
      out.elem = ModuleElem{v, std::move(cert)};
      return out;
    }
  }
  out.status = MembershipResult::Status::Inconclusive;
  return out;
}

inline RatVec evaluate_certificate(const RatMat& a,
                                   const std::vector<IntVec>& cert) {
  std::size_t n = a.size();
  RatVec acc(n, Rat(0));
  for (std::size_t i = cert.size(); i-- > 0;) {
    acc = a.mul_vec(acc);
    for (std::size_t r = 0; r < n; ++r) acc[r] += Rat(cert[i][r]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// vector_to_poly: solve R(C) e1 = v on a companion matrix C

struct VectorToPolyResult {
  enum class Status { Found, NotMember, Inconclusive };
  Status status = Status::Inconclusive;
  std::optional<IntPoly> poly;
  long cap = 0;
};

inline VectorToPolyResult vector_to_poly(const RatMat& c, const RatVec& v,
                                         long cap = 0) {
  std::size_t n = c.size();
  if (v.size() != n) throw DimensionError("vector_to_poly: vector length");
  Int den_c = c.denominator_lcm();
  Int den_v = detail::rat_vec_den_lcm(v);
  VectorToPolyResult out;
  if (detail::has_foreign_prime(den_v, den_c)) {
    out.status = VectorToPolyResult::Status::NotMember;
    return out;
  }
  if (cap <= 0) cap = detail::default_membership_cap(n, den_c, den_v);
  out.cap = cap;
  std::vector<RatVec> cols;
  RatVec e1(n, Rat(0));
  e1[0] = 1;
  cols.push_back(e1);
  for (long k = 1; k <= cap; ++k) {
    if (static_cast<long>(cols.size()) < k)
      cols.push_back(c.mul_vec(cols.back()));
    Int lambda = den_v;
    for (const RatVec& col : cols)
      lambda = int_lcm(lambda, detail::rat_vec_den_lcm(col));
    IntMat m(n, static_cast<std::size_t>(k));
    for (long j = 0; j < k; ++j)
      for (std::size_t r = 0; r < n; ++r) {
        const Rat& q = cols[static_cast<std::size_t>(j)][r];
        m.at(r, static_cast<std::size_t>(j)) =
            numerator(q) * (lambda / denominator(q));
      }
    IntVec rhs(n);
    for (std::size_t r = 0; r < n; ++r)
      rhs[r] = numerator(v[r]) * (lambda / denominator(v[r]));
    if (auto sol = solve_integer(m, rhs)) {
      out.status = VectorToPolyResult::Status::Found;
      out.poly = IntPoly(std::move(*sol));
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frobenius (primary cyclic) decomposition

struct FrobeniusBlock {
  IntPoly p;          // irreducible primitive, positive lc
  int multiplicity;   // block is the companion matrix of p^multiplicity
  std::size_t size;   // multiplicity * deg p
};

struct FrobeniusDecomp {
  IntMat T;           // nonsingular integer conjugator: A T = T B
  RatMat T_inv;
  std::vector<FrobeniusBlock> blocks;

  RatMat block_matrix() const {
    std::vector<RatMat> bs;
    for (const auto& b : blocks)
      bs.push_back(companion(int_poly_pow(b.p, static_cast<unsigned>(b.multiplicity))));
    return RatMat::block_diag(bs);
  }
};

namespace detail {

// incremental echelon basis over Q for rank/independence tests
class EchelonBasis {
 public:
  // reduce v against the basis; if independent, add it and return true
  bool insert(RatVec v) {
    for (const auto& [pivot, row] : rows_) {
      if (v[pivot] == 0) continue;
      Rat f = v[pivot] / row[pivot];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= f * row[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) {
        rows_.emplace_back(i, std::move(v));
        return true;
      }
    return false;
  }
  std::size_t rank() const { return rows_.size(); }

 private:
  std::vector<std::pair<std::size_t, RatVec>> rows_;
};

// basis of ker(M) over Q
inline std::vector<RatVec> kernel_basis(const RatMat& m) {
  std::size_t n = m.size();
  std::vector<RatVec> rows(n, RatVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = m.at(i, j);
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t p = rank;
    while (p < n && rows[p][col] == 0) ++p;
    if (p == n) continue;
    std::swap(rows[p], rows[rank]);
    Rat d = rows[rank][col];
    for (std::size_t j = 0; j < n; ++j) rows[rank][j] /= d;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == rank) continue;
      Rat f = rows[i][col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) rows[i][j] -= f * rows[rank][j];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<char> is_pivot(n, 0);
  for (std::size_t c : pivot_col) is_pivot[c] = 1;
  std::vector<RatVec> basis;
  for (std::size_t free_col = 0; free_col < n; ++free_col) {
    if (is_pivot[free_col]) continue;
    RatVec v(n, Rat(0));
    v[free_col] = 1;
    for (std::size_t r = 0; r < pivot_col.size(); ++r)
      v[pivot_col[r]] = -rows[r][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline RatVec rat_vec_lincomb(const std::vector<RatVec>& basis,
                              const std::vector<long>& coeffs) {
  RatVec v(basis.empty() ? 0 : basis.front().size(), Rat(0));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (coeffs[i] == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] += Rat(coeffs[i]) * basis[i][j];
  }
  return v;
}

inline bool is_zero_vec(const RatVec& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace detail

// Exact primary cyclic decomposition. Per irreducible factor P of the
// integerized characteristic polynomial the primary component ker P(A)^e is
// split into A-cyclic subspaces; the Krylov basis of each chain top of
// height h realizes the companion matrix of P^h. Chain tops are searched
// with a fixed-seed randomized pass and a deterministic fallback over basis
// vectors and pairwise sums (sufficient because the invalid vectors form a
// union of two proper subspaces).
inline FrobeniusDecomp frobenius(const RatMat& a, std::uint64_t seed = 0) {
  std::size_t n = a.size();
  IntPoly chi = integerize(char_poly(a));
  FactoredPoly fact = factor(chi);

  FrobeniusDecomp out;
  std::vector<RatVec> columns;                 // columns of T over Q
  std::vector<std::size_t> block_col_start;    // for per-block scaling
  detail::EchelonBasis chosen;                 // spans all chains so far

  for (const auto& [p, mult] : fact.factors) {
    std::size_t d = static_cast<std::size_t>(p.degree());
    std::size_t target_dim = d * static_cast<std::size_t>(mult);
    RatMat pa = eval_poly_at_matrix(p, a);
    // kernel filtration K_t = ker(P(A)^t)
    std::vector<std::vector<RatVec>> kernels{{}};  // K_0 = 0
    std::vector<std::size_t> dims{0};
    RatMat power = RatMat::identity(n);
    int max_height = 0;
    while (dims.back() < target_dim) {
      power = power.mul(pa);
      kernels.push_back(detail::kernel_basis(power));
      dims.push_back(kernels.back().size());
      ++max_height;
      if (max_height > static_cast<int>(n))
        throw Error("frobenius: kernel filtration failed to stabilize");
    }
    std::vector<long> counts(static_cast<std::size_t>(max_height) + 1, 0);
    for (int h = 1; h <= max_height; ++h) {
      std::size_t up = h < max_height ? dims[static_cast<std::size_t>(h) + 1]
                                      : dims[static_cast<std::size_t>(h)];
      long c = static_cast<long>((2 * dims[static_cast<std::size_t>(h)] -
                                  dims[static_cast<std::size_t>(h) - 1] - up) /
                                 d);
      counts[static_cast<std::size_t>(h)] = c;
    }

    detail::EchelonBasis factor_span = chosen;  // copy: spans earlier blocks
    std::mt19937_64 rng(seed ^ 0x5bd1e995u ^
                        static_cast<std::uint64_t>(p.degree() * 1315423911));
    for (int h = max_height; h >= 1; --h) {
      for (long copy = 0; copy < counts[static_cast<std::size_t>(h)]; ++copy) {
        const auto& kh = kernels[static_cast<std::size_t>(h)];
        std::size_t chain_len = d * static_cast<std::size_t>(h);
        auto try_candidate = [&](const RatVec& u) -> bool {
          if (detail::is_zero_vec(u)) return false;
          detail::EchelonBasis trial = factor_span;
          std::vector<RatVec> krylov;
          RatVec cur = u;
          for (std::size_t t = 0; t < chain_len; ++t) {
            if (!trial.insert(cur)) return false;
            krylov.push_back(cur);
            if (t + 1 < chain_len) cur = a.mul_vec(cur);
          }
          factor_span = std::move(trial);
          block_col_start.push_back(columns.size());
          for (auto& col : krylov) columns.push_back(std::move(col));
          out.blocks.push_back(FrobeniusBlock{p, h, chain_len});
          return true;
        };
        bool placed = false;
        std::uniform_int_distribution<long> coeff(-3, 3);
        for (int attempt = 0; attempt < 8 && !placed; ++attempt) {
          std::vector<long> cs(kh.size());
          for (long& x : cs) x = coeff(rng);
          placed = try_candidate(detail::rat_vec_lincomb(kh, cs));
        }
        for (std::size_t i = 0; i < kh.size() && !placed; ++i)
          placed = try_candidate(kh[i]);
        for (std::size_t i = 0; i < kh.size() && !placed; ++i)
          for (std::size_t j = i + 1; j < kh.size() && !placed; ++j) {
            RatVec s = kh[i];
            for (std::size_t t = 0; t < s.size(); ++t) s[t] += kh[j][t];
            placed = try_candidate(s);
          }
        if (!placed)
          throw Error("frobenius: no valid chain top found (internal)");
      }
    }
    chosen = std::move(factor_span);
  }
  block_col_start.push_back(columns.size());
  if (columns.size() != n) throw Error("frobenius: dimension mismatch");

  // integerize T per block (uniform scaling within a block commutes with it)
  IntMat t_int(n, n);
  for (std::size_t b = 0; b + 1 < block_col_start.size(); ++b) {
    Int lam = 1;
    for (std::size_t c = block_col_start[b]; c < block_col_start[b + 1]; ++c)
      for (const Rat& x : columns[c]) lam = int_lcm(lam, denominator(x));
    Int content = 0;
    for (std::size_t c = block_col_start[b]; c < block_col_start[b + 1]; ++c)
      for (const Rat& x : columns[c])
        content = int_gcd(content, numerator(x) * (lam / denominator(x)));
    if (content == 0) content = 1;
    for (std::size_t c = block_col_start[b]; c < block_col_start[b + 1]; ++c)
      for (std::size_t r = 0; r < n; ++r) {
        const Rat& x = columns[c][r];
        t_int.at(r, c) = numerator(x) * (lam / denominator(x)) / content;
      }
  }
  out.T = std::move(t_int);

  RatMat t_rat = RatMat::from_int(out.T);
  out.T_inv = t_rat.inverse();
  if (!(a.mul(t_rat) == t_rat.mul(out.block_matrix())))
    throw Error("frobenius: conjugation identity failed (internal)");
  return out;
}

// ---------------------------------------------------------------------------
// companion-block digit sets and block sums

// D_j = M e_1 where M is the d-fold Minkowski sum of the polynomial digit
// set N (d = deg P^m); valid because 0 is a digit.
inline std::vector<IntVec> companion_system(const IntPoly& p, int mult,
                                            const PolyDigitSystem& polysys) {
  IntPoly pm = int_poly_pow(p, static_cast<unsigned>(mult));
  if (!(polysys.base == pm))
    throw InvalidInputError("companion_system: polynomial system base mismatch");
  if (pm.degree() < 1)
    throw InvalidInputError("companion_system: degree must be >= 1");
  std::size_t d = static_cast<std::size_t>(pm.degree());
  std::set<Int> m(polysys.digits.begin(), polysys.digits.end());
  for (std::size_t i = 1; i < d; ++i) {
    std::set<Int> next;
    for (const Int& x : m)
      for (const Int& y : polysys.digits) next.insert(x + y);
    m = std::move(next);
  }
  std::vector<IntVec> out;
  for (const Int& v : m) {
    IntVec vec(d, Int(0));
    vec[0] = v;
    out.push_back(std::move(vec));
  }
  return out;
}

struct MatrixBlockInfo {
  IntPoly p;
  int multiplicity = 1;
  std::size_t size = 0;
  PolyDigitSystem polysys;             // digit system for p^multiplicity
  std::vector<IntVec> block_digits;    // D_j
};

struct MatrixSystemProvenance {
  IntMat T;
  HnfResult hnf_t;
  std::vector<MatrixBlockInfo> blocks;
  std::vector<IntVec> block_sum_digits;  // D' = D_1 (+) ... (+) D_k
  std::vector<IntVec> coset_digits;      // D'' : Z^n / T Z^n box reps
};

struct MatrixDigitSystem {
  RatMat base;
  std::vector<IntVec> digits;  // sorted lexicographically, contains 0
  std::optional<MatrixSystemProvenance> provenance;

  std::size_t digit_index(const IntVec& d) const {
    auto it = std::lower_bound(digits.begin(), digits.end(), d);
    if (it == digits.end() || *it != d)
      throw Error("digit_index: vector is not a digit of the system");
    return static_cast<std::size_t>(it - digits.begin());
  }
};

inline std::vector<IntVec> normalize_vector_digits(std::vector<IntVec> d,
                                                   std::size_t n) {
  for (const IntVec& v : d)
    if (v.size() != n)
      throw DimensionError("digit vector has wrong dimension");
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  IntVec zero(n, Int(0));
  if (!std::binary_search(d.begin(), d.end(), zero))
    throw InvalidInputError("matrix digit set must contain the zero vector");
  return d;
}

// Cartesian block-sum assembly of digit vectors.
inline std::vector<IntVec> block_sum_digits(
    const std::vector<std::vector<IntVec>>& parts) {
  std::vector<IntVec> acc{IntVec{}};
  for (const auto& part : parts) {
    if (part.empty())
      throw InvalidInputError("block_sum: empty block digit set");
    std::vector<IntVec> next;
    next.reserve(acc.size() * part.size());
    for (const IntVec& head : acc)
      for (const IntVec& tail : part) {
        IntVec v = head;
        v.insert(v.end(), tail.begin(), tail.end());
        next.push_back(std::move(v));
      }
    acc = std::move(next);
  }
  return acc;
}

// Proposition-2 block sum of full systems: base is the block-diagonal of the
// bases, digits the Cartesian assembly. Every input must contain its zero
// vector.
inline MatrixDigitSystem block_sum(const std::vector<MatrixDigitSystem>& parts) {
  if (parts.empty()) throw InvalidInputError("block_sum: no systems");
  std::vector<RatMat> bases;
  std::vector<std::vector<IntVec>> digit_parts;
  std::size_t n = 0;
  for (const auto& s : parts) {
    bases.push_back(s.base);
    IntVec zero(s.base.size(), Int(0));
    if (!std::binary_search(s.digits.begin(), s.digits.end(), zero))
      throw InvalidInputError("block_sum: a system lacks the zero digit");
    digit_parts.push_back(s.digits);
    n += s.base.size();
  }
  MatrixDigitSystem out;
  out.base = RatMat::block_diag(bases);
  out.digits = normalize_vector_digits(block_sum_digits(digit_parts), n);
  return out;
}

// ---------------------------------------------------------------------------
// certificates

struct NonExistenceCert {
  IntPoly factor;     // divides the integerized char poly, inside count >= 1
  long inside = 0;
  ComplexBox lambda;  // certified enclosure of an eigenvalue with |lambda|<1
  std::vector<ComplexBox> left_eigenvector;  // v^T A = lambda v^T enclosures
  unsigned precision_bits = 0;
};

struct MatrixCertificate {
  enum class Kind { Existence, NonExistence, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::optional<MatrixDigitSystem> system;
  std::optional<NonExistenceCert> nonexistence;
  std::optional<Inconclusive> inconclusive;
};

// ---------------------------------------------------------------------------
// exact left-eigenvector data over the number field Q[x]/(F)

namespace detail {

struct RatPolyDiv {
  std::vector<Rat> quot, rem;
};

inline RatPolyDiv ratpoly_divmod(std::vector<Rat> a,
                                 const std::vector<Rat>& b) {
  RatPolyDiv out;
  if (b.empty()) throw Error("ratpoly_divmod: zero divisor");
  if (a.size() >= b.size()) out.quot.assign(a.size() - b.size() + 1, Rat(0));
  while (a.size() >= b.size()) {
    Rat f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    out.quot[shift] = f;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= f * b[j];
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  out.rem = std::move(a);
  return out;
}

// Arithmetic in K = Q[x]/(F), F irreducible over Q.
class NumberField {
 public:
  explicit NumberField(const IntPoly& modulus) {
    for (const Int& c : modulus.coeffs()) mod_.push_back(Rat(c));
    d_ = modulus.degree();
  }
  using Elem = std::vector<Rat>;  // degree < d_

  Elem zero() const { return {}; }
  Elem from_rat(const Rat& q) const {
    return q == 0 ? Elem{} : Elem{q};
  }
  Elem x_elem() const {
    if (d_ == 1) {
      // x = -a0/a1 is rational in a degree-1 field
      return from_rat(Rat(-mod_[0], mod_[1]));
    }
    return Elem{Rat(0), Rat(1)};
  }
  bool is_zero(const Elem& e) const { return e.empty(); }

  Elem add(const Elem& a, const Elem& b) const {
    Elem r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem nb = b;
    for (Rat& x : nb) x = -x;
    return add(a, nb);
  }
  Elem mul(const Elem& a, const Elem& b) const {
    if (a.empty() || b.empty()) return {};
    Elem r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return ratpoly_divmod(std::move(r), mod_).rem;
  }
  Elem inv(const Elem& a) const {
    if (a.empty()) throw Error("NumberField: inverse of zero");
    // extended Euclid over Q[x]
    std::vector<Rat> r0 = mod_, r1 = a;
    Elem t0, t1{Rat(1)};
    while (!r1.empty()) {
      RatPolyDiv qr = ratpoly_divmod(r0, r1);
      r0 = std::move(r1);
      r1 = std::move(qr.rem);
      Elem nt = t0;
      // nt = t0 - q*t1
      if (!qr.quot.empty() && !t1.empty()) {
        Elem prod(qr.quot.size() + t1.size() - 1, Rat(0));
        for (std::size_t i = 0; i < qr.quot.size(); ++i)
          for (std::size_t j = 0; j < t1.size(); ++j)
            prod[i + j] += qr.quot[i] * t1[j];
        if (nt.size() < prod.size()) nt.resize(prod.size(), Rat(0));
        for (std::size_t i = 0; i < prod.size(); ++i) nt[i] -= prod[i];
      }
      trim(nt);
      t0 = std::move(t1);
      t1 = std::move(nt);
    }
    if (r0.size() != 1) throw Error("NumberField: modulus not irreducible?");
    Elem r = t0;
    for (Rat& x : r) x /= r0[0];
    trim(r);
    return ratpoly_divmod(std::move(r), mod_).rem;
  }

 private:
  static void trim(Elem& e) {
    while (!e.empty() && e.back() == 0) e.pop_back();
  }
  std::vector<Rat> mod_;
  int d_ = 0;
};

// Nonzero v with (A^T - x I) v = 0 over K = Q[x]/(F); entries returned as
// coefficient vectors (degree < deg F).
inline std::vector<std::vector<Rat>> left_eigenvector_exact(const RatMat& a,
                                                            const IntPoly& f) {
  NumberField k(f);
  std::size_t n = a.size();
  using E = NumberField::Elem;
  std::vector<std::vector<E>> m(n, std::vector<E>(n));
  E x = k.x_elem();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = k.from_rat(a.at(j, i));  // A^T
      if (i == j) m[i][j] = k.sub(m[i][j], x);
    }
  // Gauss to row echelon over K
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t p = rank;
    while (p < n && k.is_zero(m[p][col])) ++p;
    if (p == n) continue;
    std::swap(m[p], m[rank]);
    E inv = k.inv(m[rank][col]);
    for (std::size_t j = 0; j < n; ++j) m[rank][j] = k.mul(m[rank][j], inv);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == rank || k.is_zero(m[i][col])) continue;
      E f2 = m[i][col];
      for (std::size_t j = 0; j < n; ++j)
        m[i][j] = k.sub(m[i][j], k.mul(f2, m[rank][j]));
    }
    pivot_col.push_back(col);
    ++rank;
  }
  if (rank == n)
    throw Error("left_eigenvector_exact: kernel is trivial (factor does not divide char poly?)");
  std::vector<char> is_pivot(n, 0);
  for (std::size_t c : pivot_col) is_pivot[c] = 1;
  std::size_t free_col = 0;
  while (is_pivot[free_col]) ++free_col;
  std::vector<E> v(n, k.zero());
  v[free_col] = k.from_rat(Rat(1));
  for (std::size_t r = 0; r < pivot_col.size(); ++r)
    v[pivot_col[r]] = k.sub(k.zero(), m[r][free_col]);
  std::vector<std::vector<Rat>> out;
  for (const E& e : v) out.push_back(e);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// non-existence bound: certified violator of |v^T z| < C (1-|lambda|)^-1

struct NonexistenceBound {
  RatInterval bound;  // encloses C / (1 - |lambda|)
  IntVec violator;    // lattice point with |v^T violator| provably above
  IntPoly factor;
  ComplexBox lambda;
  std::vector<ComplexBox> eigenvector;
  unsigned precision_bits = 0;
};

inline NonexistenceBound nonexistence_bound(const RatMat& a,
                                            const std::vector<IntVec>& digits,
                                            unsigned precision_bits = 128,
                                            std::uint64_t seed = 0) {
  std::size_t n = a.size();
  IntPoly chi = integerize(char_poly(a));
  FactoredPoly fact = factor(chi);
  RootClassification rc = classify_factored(fact, precision_bits, seed);
  const FactorClassification* chosen = nullptr;
  for (const auto& fc : rc.per_factor)
    if (fc.inside > 0) {
      chosen = &fc;
      break;
    }
  if (!chosen)
    throw InvalidInputError(
        "nonexistence_bound: no eigenvalue inside the unit circle");
  const IntPoly& f = chosen->factor;
  auto v_exact = detail::left_eigenvector_exact(a, f);

  for (unsigned bits = std::max(64u, precision_bits); bits <= (1u << 22);
       bits *= 2) {
    IsolateOptions opts;
    opts.start_bits = bits;
    opts.seed = seed;
    std::vector<CertifiedRoot> roots = isolate_roots(f, opts);
    std::sort(roots.begin(), roots.end(),
              [](const CertifiedRoot& x, const CertifiedRoot& y) {
                return std::make_pair(x.cre, x.cim) <
                       std::make_pair(y.cre, y.cim);
              });
    const CertifiedRoot* inside = nullptr;
    for (const CertifiedRoot& r : roots)
      if (r.side == -1) {
        inside = &r;
        break;
      }
    if (!inside) continue;
    ComplexBox lambda = inside->enclosure();
    Rat lam_up = lambda.mag_upper(bits);
    if (!(lam_up < 1)) continue;
    Rat lam_lo = std::max(Rat(0), lambda.mag_lower(bits));

    std::vector<ComplexBox> vbox;
    for (const auto& coeffs : v_exact) vbox.push_back(eval_on_box(coeffs, lambda));

    std::size_t best_i = 0;
    Rat best_lo = -1;
    for (std::size_t i = 0; i < n; ++i) {
      Rat lo = vbox[i].mag_lower(bits);
      if (lo > best_lo) {
        best_lo = lo;
        best_i = i;
      }
    }
    if (!(best_lo > 0)) continue;

    Rat c_up = 0, c_lo = 0;
    for (const IntVec& d : digits) {
      ComplexBox dot;
      Rat up_sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d[i] == 0) continue;
        dot = dot + Rat(d[i]) * vbox[i];
        up_sum += Rat(int_abs(d[i])) * vbox[i].mag_upper(bits);
      }
      c_up = std::max(c_up, up_sum);
      c_lo = std::max(c_lo, dot.mag_lower(bits));
    }

    Rat bound_up = c_up / (1 - lam_up);
    Rat bound_lo = c_lo / (1 - lam_lo);
    Int scale = rat_floor(bound_up / best_lo) + 1;
    IntVec violator(n, Int(0));
    violator[best_i] = scale;
    if (!(Rat(scale) * best_lo > bound_up))
      throw Error("nonexistence_bound: certification slipped (internal)");

    NonexistenceBound out;
    out.bound = RatInterval(std::min(bound_lo, bound_up), bound_up);
    out.violator = std::move(violator);
    out.factor = f;
    out.lambda = lambda;
    out.eigenvector = std::move(vbox);
    out.precision_bits = bits;
    return out;
  }
  throw Error("nonexistence_bound: failed to certify at maximal precision");
}

// ---------------------------------------------------------------------------
// the main construction (Theorem 1, constructive direction)

inline MatrixCertificate construct(const RatMat& a, long long budget = 1000000,
                                   unsigned bits = 128,
                                   std::uint64_t seed = 0) {
  IntPoly chi = integerize(char_poly(a));
  FactoredPoly fact = factor(chi);
  RootClassification rc = classify_factored(fact, bits, seed);

  MatrixCertificate cert;
  if (rc.inside > 0) {
    const FactorClassification* chosen = nullptr;
    for (const auto& fc : rc.per_factor)
      if (fc.inside > 0) {
        chosen = &fc;
        break;
      }
    NonExistenceCert ne;
    ne.factor = chosen->factor;
    ne.inside = chosen->inside;
    for (unsigned b = bits; b <= (1u << 22); b *= 2) {
      IsolateOptions opts;
      opts.start_bits = b;
      opts.seed = seed;
      auto roots = isolate_roots(chosen->factor, opts);
      const CertifiedRoot* inside_root = nullptr;
      for (const auto& r : roots)
        if (r.side == -1) {
          inside_root = &r;
          break;
        }
      if (!inside_root) continue;
      ne.lambda = inside_root->enclosure();
      auto v_exact = detail::left_eigenvector_exact(a, chosen->factor);
      for (const auto& coeffs : v_exact)
        ne.left_eigenvector.push_back(eval_on_box(coeffs, ne.lambda));
      ne.precision_bits = b;
      break;
    }
    cert.kind = MatrixCertificate::Kind::NonExistence;
    cert.nonexistence = std::move(ne);
    return cert;
  }

  FrobeniusDecomp fd = frobenius(a, seed);

  MatrixSystemProvenance prov;
  prov.T = fd.T;
  prov.hnf_t = hnf(fd.T);

  std::map<std::pair<std::vector<Int>, int>, PolyDigitSystem> cache;
  for (const FrobeniusBlock& b : fd.blocks) {
    IntPoly pm = int_poly_pow(b.p, static_cast<unsigned>(b.multiplicity));
    auto key = std::make_pair(b.p.coeffs(), b.multiplicity);
    auto it = cache.find(key);
    if (it == cache.end()) {
      auto res = construct_general(pm, budget, bits, seed);
      if (auto* inc = std::get_if<Inconclusive>(&res)) {
        cert.kind = MatrixCertificate::Kind::Inconclusive;
        cert.inconclusive = *inc;
        return cert;
      }
      it = cache.emplace(key, std::get<PolyDigitSystem>(res)).first;
    }
    MatrixBlockInfo info;
    info.p = b.p;
    info.multiplicity = b.multiplicity;
    info.size = b.size;
    info.polysys = it->second;
    info.block_digits = companion_system(b.p, b.multiplicity, it->second);
    prov.blocks.push_back(std::move(info));
  }

  std::vector<std::vector<IntVec>> parts;
  for (const auto& bi : prov.blocks) parts.push_back(bi.block_digits);
  prov.block_sum_digits = block_sum_digits(parts);

  try {
    prov.coset_digits = hnf_box_representatives(prov.hnf_t, budget);
  } catch (const BudgetExceededError&) {
    cert.kind = MatrixCertificate::Kind::Inconclusive;
    cert.inconclusive = Inconclusive{budget, "coset enumeration over budget"};
    return cert;
  }

  if (static_cast<long long>(prov.block_sum_digits.size()) *
          static_cast<long long>(prov.coset_digits.size()) >
      budget) {
    cert.kind = MatrixCertificate::Kind::Inconclusive;
    cert.inconclusive = Inconclusive{budget, "digit set size over budget"};
    return cert;
  }

  std::set<IntVec> digit_set;
  for (const IntVec& dp : prov.block_sum_digits) {
    IntVec td = prov.T.mul_vec(dp);
    for (const IntVec& c : prov.coset_digits) {
      IntVec v = td;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[i];
      digit_set.insert(std::move(v));
    }
  }

  MatrixDigitSystem sys;
  sys.base = a;
  sys.digits.assign(digit_set.begin(), digit_set.end());
  sys.provenance = std::move(prov);
  cert.kind = MatrixCertificate::Kind::Existence;
  cert.system = std::move(sys);
  return cert;
}

// ---------------------------------------------------------------------------
// representation and evaluation

struct MatrixRadixWord {
  std::vector<std::size_t> digit_indices;  // positions 0..k into system.digits
};

inline RatVec evaluate(const MatrixDigitSystem& sys,
                       const MatrixRadixWord& word) {
  std::size_t n = sys.base.size();
  RatVec acc(n, Rat(0));
  for (std::size_t i = word.digit_indices.size(); i-- > 0;) {
    std::size_t idx = word.digit_indices[i];
    if (idx >= sys.digits.size())
      throw InvalidInputError("evaluate: digit index out of range");
    acc = sys.base.mul_vec(acc);
    for (std::size_t r = 0; r < n; ++r) acc[r] += Rat(sys.digits[idx][r]);
  }
  return acc;
}

// Represent a certified module element over a constructed system: split each
// certificate vector u_i = T w_i + c_i, pull the T-part into block
// coordinates, represent per block through the polynomial digit system, then
// merge positions and append the coset digits.
inline MatrixRadixWord represent(const MatrixDigitSystem& sys,
                                 const ModuleElem& z,
                                 long long budget = 1000000) {
  if (!sys.provenance)
    throw RepresentError("represent: system carries no construction provenance");
  if (!z.certificate)
    throw RepresentError("represent: module element carries no certificate");
  const MatrixSystemProvenance& prov = *sys.provenance;
  std::size_t n = sys.base.size();
  const auto& cert = *z.certificate;
  std::size_t k = cert.size();

  std::vector<IntVec> w(k), c(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto [ci, yi] = hnf_box_reduce(prov.hnf_t, cert[i]);
    c[i] = std::move(ci);
    w[i] = prov.hnf_t.U.mul_vec(yi);
  }

  // per-block polynomial S_j = sum_i x^i R_{i,j}
  std::vector<std::vector<Int>> block_words;
  std::size_t offset = 0;
  std::size_t max_len = k;
  for (const MatrixBlockInfo& bi : prov.blocks) {
    std::vector<Int> s_coeffs(k + bi.size, Int(0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t t = 0; t < bi.size; ++t)
        s_coeffs[i + t] += w[i][offset + t];
    IntPoly s(std::move(s_coeffs));
    RepResult r = represent_with_quotient(bi.polysys, s, budget);
    if (auto* fail = std::get_if<RepFailure>(&r))
      throw RepresentError("represent: block representation failed: " +
                           fail->detail);
    auto& rep = std::get<PolyRepresentation>(r);
    max_len = std::max(max_len, rep.word.size());
    block_words.push_back(rep.word);
    offset += bi.size;
  }

  MatrixRadixWord word;
  IntVec zero(n, Int(0));
  for (std::size_t t = 0; t < max_len; ++t) {
    IntVec dprime;
    for (std::size_t b = 0; b < prov.blocks.size(); ++b) {
      IntVec part(prov.blocks[b].size, Int(0));
      if (t < block_words[b].size()) part[0] = block_words[b][t];
      dprime.insert(dprime.end(), part.begin(), part.end());
    }
    IntVec digit = prov.T.mul_vec(dprime);
    if (t < k)
      for (std::size_t i = 0; i < n; ++i) digit[i] += c[t][i];
    word.digit_indices.push_back(sys.digit_index(digit));
  }
  std::size_t zero_idx = sys.digit_index(zero);
  while (word.digit_indices.size() > 1 &&
         word.digit_indices.back() == zero_idx)
    word.digit_indices.pop_back();
  return word;
}

// ---------------------------------------------------------------------------
// orbit demo for Phi(x) = A^{-1}(x - d(x))

struct PhiOrbit {
  enum class Verdict { Periodic, Diverging, Unresolved };
  Verdict verdict = Verdict::Unresolved;
  std::vector<IntVec> states;   // x_0, x_1, ...
  std::vector<IntVec> digits;   // digit chosen at each step
  long cycle_start = -1;        // Periodic: first index of the repeated state
  Int norm_bound;
};

inline PhiOrbit phi_orbit_demo(const RatMat& a,
                               const std::vector<IntVec>& digits,
                               const IntVec& z, long max_steps = 100,
                               Int norm_bound = 0) {
  if (!a.is_integer())
    throw InvalidInputError("phi_orbit_demo: base must be an integer matrix");
  IntMat ai = a.to_int_mat();
  Int det = ai.det();
  if (det == 0) throw InvalidInputError("phi_orbit_demo: singular base");
  if (Int(digits.size()) != int_abs(det))
    throw InvalidInputError(
        "phi_orbit_demo: digit count differs from |det A|");
  for (std::size_t i = 0; i < digits.size(); ++i)
    for (std::size_t j = i + 1; j < digits.size(); ++j) {
      IntVec diff(digits[i].size());
      for (std::size_t t = 0; t < diff.size(); ++t)
        diff[t] = digits[i][t] - digits[j][t];
      if (solve_integer(ai, diff))
        throw InvalidInputError(
            "phi_orbit_demo: digits are not distinct modulo A Z^n");
    }
  PhiOrbit out;
  if (norm_bound <= 0) norm_bound = 2 * vec_inf_norm(z) + 64;
  out.norm_bound = norm_bound;
  std::map<IntVec, long> seen;
  IntVec x = z;
  for (long step = 0; step <= max_steps; ++step) {
    auto it = seen.find(x);
    if (it != seen.end()) {
      out.verdict = PhiOrbit::Verdict::Periodic;
      out.cycle_start = it->second;
      return out;
    }
    seen[x] = step;
    out.states.push_back(x);
    if (vec_inf_norm(x) > norm_bound) {
      out.verdict = PhiOrbit::Verdict::Diverging;
      return out;
    }
    if (step == max_steps) break;
    bool advanced = false;
    for (const IntVec& d : digits) {
      IntVec diff(x.size());
      for (std::size_t t = 0; t < x.size(); ++t) diff[t] = x[t] - d[t];
      if (auto y = solve_integer(ai, diff)) {
        out.digits.push_back(d);
        x = std::move(*y);
        advanced = true;
        break;
      }
    }
    if (!advanced)
      throw InvalidInputError(
          "phi_orbit_demo: digits do not cover all residues mod A Z^n");
  }
  out.verdict = PhiOrbit::Verdict::Unresolved;
  return out;
}

}  // namespace digsys
