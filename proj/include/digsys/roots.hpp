#pragma once
// Exact classification of polynomial roots relative to the unit circle.
//
// Per irreducible factor F:
//   (a) F not self-reciprocal up to sign: F has no root on the unit circle
//       (a unit-modulus root of a real irreducible polynomial forces the
//       conjugate-reciprocal pairing, making F reciprocal). Roots are located
//       by a Durand-Kerner iteration in dyadic fixed point whose output is
//       certified a posteriori in exact rational arithmetic: each approximate
//       root z gets the disk radius deg * |F(z)/F'(z)|, the disks must be
//       pairwise disjoint and each disjoint from the unit circle.
//   (b) F = x - 1 or x + 1: one root on the circle (degree-1 factors are
//       decided exactly by |a0| vs |a1|).
//   (c) F self-reciprocal of even degree: substitute y = x + 1/x; roots on
//       the circle correspond exactly to real roots of the transformed
//       polynomial in (-2, 2), counted by Sturm sequences; remaining roots
//       pair off as (alpha, 1/alpha), one inside and one outside.

#include "digsys/factor.hpp"
#include "digsys/interval.hpp"
#include "digsys/numbers.hpp"
#include "digsys/poly.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace digsys {

// ---------------------------------------------------------------------------
// exact complex rationals (for certification only)

struct QComplex {
  Rat re, im;
  QComplex() : re(0), im(0) {}
  QComplex(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  Rat mag_sq() const { return re * re + im * im; }
};
inline QComplex operator+(const QComplex& a, const QComplex& b) {
  return {a.re + b.re, a.im + b.im};
}
inline QComplex operator-(const QComplex& a, const QComplex& b) {
  return {a.re - b.re, a.im - b.im};
}
inline QComplex operator*(const QComplex& a, const QComplex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline QComplex eval_qcomplex(const IntPoly& f, const QComplex& z) {
  QComplex acc;
  for (std::size_t i = f.coeffs().size(); i-- > 0;)
    acc = acc * z + QComplex(Rat(f.coeffs()[i]), Rat(0));
  return acc;
}

// ---------------------------------------------------------------------------
// certified root disks

struct CertifiedRoot {
  Rat cre, cim;    // exact center
  Rat radius_sq;   // exact bound on the containing-disk radius, squared
  Rat radius_up;   // rational upper bound on the radius itself
  int side = 0;    // -1 inside unit circle, +1 outside, 0 undecided

  ComplexBox enclosure() const {
    return ComplexBox::disk_enclosure(cre, cim, radius_up);
  }
};

namespace detail {

// Dyadic fixed-point complex numbers: value = (re + i*im) / 2^prec.
struct DComplex {
  Int re, im;
};

inline Int fixed_shift_down(const Int& v, long prec) {
  return floor_div(v, Int(1) << prec);
}

inline DComplex dc_mul(const DComplex& a, const DComplex& b, long prec) {
  return {fixed_shift_down(a.re * b.re - a.im * b.im, prec),
          fixed_shift_down(a.re * b.im + a.im * b.re, prec)};
}

inline DComplex dc_sub(const DComplex& a, const DComplex& b) {
  return {a.re - b.re, a.im - b.im};
}

// a / b; b must be nonzero.
inline DComplex dc_div(const DComplex& a, const DComplex& b, long prec) {
  Int den = b.re * b.re + b.im * b.im;
  Int nre = a.re * b.re + a.im * b.im;
  Int nim = a.im * b.re - a.re * b.im;
  return {floor_div(nre << prec, den), floor_div(nim << prec, den)};
}

inline DComplex dc_eval(const IntPoly& f, const DComplex& z, long prec) {
  DComplex acc{0, 0};
  for (std::size_t i = f.coeffs().size(); i-- > 0;) {
    acc = dc_mul(acc, z, prec);
    acc.re += f.coeffs()[i] << prec;
  }
  return acc;
}

inline Int to_fixed(const Rat& q, long prec) {
  return floor_div(numerator(q) << prec, denominator(q));
}

// One Durand-Kerner run at fixed precision. Quality only; correctness comes
// from the exact certification afterwards.
inline std::vector<DComplex> durand_kerner(const IntPoly& f, long prec,
                                           std::uint64_t seed) {
  int d = f.degree();
  std::vector<DComplex> z(static_cast<std::size_t>(d));
  Rat cauchy = Rat(f.max_abs_coeff(), int_abs(f.lc())) + 1;
  DComplex u{to_fixed(Rat(2, 5), prec), to_fixed(Rat(9, 10), prec)};
  u.re += Int((seed % 127) + 1) << (prec > 12 ? prec - 12 : 0);
  DComplex cur{to_fixed(cauchy, prec), Int(1) << (prec - 4)};
  for (int i = 0; i < d; ++i) {
    cur = dc_mul(cur, u, prec);
    z[static_cast<std::size_t>(i)] = cur;
  }
  long rounds = 64 + 16 * d + prec / 4;
  Int stop = Int(1) << (prec * 2 / 5);
  for (long round = 0; round < rounds; ++round) {
    Int max_step = 0;
    for (int i = 0; i < d; ++i) {
      DComplex num = dc_eval(f, z[static_cast<std::size_t>(i)], prec);
      DComplex den{f.lc() << prec, 0};
      bool degenerate = false;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        DComplex diff = dc_sub(z[static_cast<std::size_t>(i)],
                               z[static_cast<std::size_t>(j)]);
        if (diff.re == 0 && diff.im == 0) {
          degenerate = true;
          break;
        }
        den = dc_mul(den, diff, prec);
      }
      if (degenerate || (den.re == 0 && den.im == 0)) {
        z[static_cast<std::size_t>(i)].re += Int(1) << (prec - 8);
        z[static_cast<std::size_t>(i)].im += Int(i + 1) << (prec - 10);
        max_step = stop + 1;
        continue;
      }
      DComplex w = dc_div(num, den, prec);
      z[static_cast<std::size_t>(i)] = dc_sub(z[static_cast<std::size_t>(i)], w);
      max_step = std::max(max_step, int_abs(w.re) + int_abs(w.im));
    }
    if (max_step <= stop) break;
  }
  return z;
}

// Exact certification: disk radius bound deg*|F(z)/F'(z)| per approximation;
// all pairwise disjoint (so each contains exactly one root). When
// need_circle_sep is set, every disk must also be disjoint from the unit
// circle, which decides inside/outside per root.
inline std::optional<std::vector<CertifiedRoot>> certify_roots(
    const IntPoly& f, const std::vector<DComplex>& zs, long prec,
    bool need_circle_sep) {
  int d = f.degree();
  IntPoly fd = f.derivative();
  std::vector<CertifiedRoot> roots;
  roots.reserve(static_cast<std::size_t>(d));
  Rat scale = Rat(1, pow2(static_cast<unsigned long>(prec)));
  for (const DComplex& z : zs) {
    QComplex zq(Rat(z.re) * scale, Rat(z.im) * scale);
    QComplex fz = eval_qcomplex(f, zq);
    QComplex fdz = eval_qcomplex(fd, zq);
    Rat fd_mag = fdz.mag_sq();
    if (fd_mag == 0) return std::nullopt;
    Rat rho_sq = Rat(d) * Rat(d) * fz.mag_sq() / fd_mag;
    CertifiedRoot r;
    r.cre = zq.re;
    r.cim = zq.im;
    r.radius_sq = rho_sq;
    r.radius_up = sqrt_upper(rho_sq, 96);
    roots.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      Rat dist_sq = (QComplex(roots[i].cre, roots[i].cim) -
                     QComplex(roots[j].cre, roots[j].cim))
                        .mag_sq();
      // |zi-zj| > rho_i + rho_j follows from dist^2 > 2(rho_i^2 + rho_j^2)
      if (!(dist_sq > 2 * (roots[i].radius_sq + roots[j].radius_sq)))
        return std::nullopt;
    }
  for (CertifiedRoot& r : roots) {
    Rat s = QComplex(r.cre, r.cim).mag_sq();
    Rat lhs = s + 1 - r.radius_sq;
    // (|z|-1)^2 > rho^2  <=>  lhs > 0 and lhs^2 > 4s
    if (lhs > 0 && lhs * lhs > 4 * s) {
      r.side = s > 1 ? 1 : -1;
    } else {
      r.side = 0;
      if (need_circle_sep) return std::nullopt;
    }
  }
  return roots;
}

}  // namespace detail

struct IsolateOptions {
  unsigned start_bits = 128;
  bool require_circle_separation = false;
  std::uint64_t seed = 0;
};

// Certified disks around all roots of a squarefree polynomial, pairwise
// disjoint, refined until certification succeeds (and, when requested, until
// every disk avoids the unit circle).
inline std::vector<CertifiedRoot> isolate_roots(const IntPoly& f,
                                                const IsolateOptions& opts) {
  if (f.degree() < 1)
    throw InvalidInputError("isolate_roots: degree must be >= 1");
  if (f.degree() == 1) {
    CertifiedRoot r;
    r.cre = Rat(-f.coeff(0), f.coeff(1));
    r.cim = 0;
    r.radius_sq = 0;
    r.radius_up = 0;
    Rat m = rat_abs(r.cre);
    r.side = m < 1 ? -1 : (m > 1 ? 1 : 0);
    if (opts.require_circle_separation && r.side == 0)
      throw Error("isolate_roots: root exactly on the unit circle");
    return {r};
  }
  long bits = std::max<long>(64, opts.start_bits);
  for (; bits <= (1L << 22); bits *= 2) {
    for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
      auto zs = detail::durand_kerner(f, bits, opts.seed + 7919 * attempt);
      auto cert = detail::certify_roots(f, zs, bits,
                                        opts.require_circle_separation);
      if (cert) return *cert;
    }
  }
  throw Error("isolate_roots: failed to certify at maximal precision");
}

// ---------------------------------------------------------------------------
// Sturm sequences (exact, rational)

namespace detail {

inline std::vector<Rat> ratpoly_rem(std::vector<Rat> a,
                                    const std::vector<Rat>& b) {
  auto deg = [](const std::vector<Rat>& p) {
    return static_cast<int>(p.size()) - 1;
  };
  while (deg(a) >= deg(b)) {
    Rat f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= f * b[j];
    while (!a.empty() && a.back() == 0) a.pop_back();
    if (a.empty()) break;
  }
  return a;
}

inline int rat_sign(const Rat& q) { return q == 0 ? 0 : (q < 0 ? -1 : 1); }

}  // namespace detail

// Number of distinct real roots of g in the open interval (a, b);
// requires g(a) != 0 and g(b) != 0.
inline long sturm_count_open(const IntPoly& g, const Rat& a, const Rat& b) {
  if (g.degree() < 1) return 0;
  if (g.eval(a) == 0 || g.eval(b) == 0)
    throw InvalidInputError("sturm_count_open: root at interval endpoint");
  std::vector<std::vector<Rat>> chain;
  chain.push_back(RatPoly::from_int(g).coeffs());
  chain.push_back(RatPoly::from_int(g.derivative()).coeffs());
  while (chain.back().size() > 1) {
    auto r = detail::ratpoly_rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (Rat& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  auto variations = [&](const Rat& t) {
    long v = 0;
    int prev = 0;
    for (const auto& poly : chain) {
      Rat acc = 0;
      for (std::size_t i = poly.size(); i-- > 0;) acc = acc * t + poly[i];
      int s = detail::rat_sign(acc);
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++v;
      prev = s;
    }
    return v;
  };
  return variations(a) - variations(b);
}

// For a self-reciprocal F of even degree 2e (palindromic coefficients),
// returns G of degree e with F(x) = x^e G(x + 1/x).
inline IntPoly dickson_transform(const IntPoly& f) {
  if (self_reciprocal_sign(f) != 1 || f.degree() % 2 != 0)
    throw InvalidInputError("dickson_transform: expects palindrome of even degree");
  std::size_t e = static_cast<std::size_t>(f.degree()) / 2;
  IntPoly g = IntPoly::constant(f.coeff(e));
  IntPoly p_prev{2};     // x^0 + x^0 in the y variable
  IntPoly p_cur{0, 1};   // y
  for (std::size_t j = 1; j <= e; ++j) {
    g = g + f.coeff(e + j) * p_cur;
    IntPoly p_next = IntPoly{0, 1} * p_cur - p_prev;
    p_prev = p_cur;
    p_cur = p_next;
  }
  return g;
}

// ---------------------------------------------------------------------------
// classification

struct FactorClassification {
  IntPoly factor;
  int multiplicity = 1;
  long inside = 0, on_circle = 0, outside = 0;
};

struct RootClassification {
  long inside = 0, on_circle = 0, outside = 0;
  std::vector<FactorClassification> per_factor;
  bool is_expanding = false;
  bool has_inside_root = false;
};

// F irreducible primitive with positive leading coefficient.
inline FactorClassification classify_irreducible(const IntPoly& f,
                                                 unsigned bits = 128,
                                                 std::uint64_t seed = 0) {
  FactorClassification out;
  out.factor = f;
  int d = f.degree();
  if (d < 1) return out;
  if (d == 1) {
    Int a0 = int_abs(f.coeff(0)), a1 = int_abs(f.coeff(1));
    if (a0 < a1)
      out.inside = 1;
    else if (a0 == a1)
      out.on_circle = 1;
    else
      out.outside = 1;
    return out;
  }
  int srs = self_reciprocal_sign(f);
  if (srs != 0) {
    // irreducible anti-reciprocal or odd self-reciprocal polynomials of
    // degree >= 2 would be divisible by x-1 resp. x+1
    if (srs == -1 || d % 2 != 0)
      throw Error("classify_irreducible: impossible reciprocal shape");
    IntPoly g = dickson_transform(f);
    long r = sturm_count_open(g, Rat(-2), Rat(2));
    out.on_circle = 2 * r;
    out.inside = out.outside = (d - out.on_circle) / 2;
    return out;
  }
  IsolateOptions opts;
  opts.start_bits = bits;
  opts.require_circle_separation = true;
  opts.seed = seed;
  for (const CertifiedRoot& r : isolate_roots(f, opts)) {
    if (r.side < 0)
      ++out.inside;
    else
      ++out.outside;
  }
  return out;
}

inline RootClassification classify_factored(const FactoredPoly& fact,
                                            unsigned bits = 128,
                                            std::uint64_t seed = 0) {
  RootClassification out;
  for (const auto& [f, mult] : fact.factors) {
    FactorClassification fc = classify_irreducible(f, bits, seed);
    fc.multiplicity = mult;
    out.inside += mult * fc.inside;
    out.on_circle += mult * fc.on_circle;
    out.outside += mult * fc.outside;
    out.per_factor.push_back(std::move(fc));
  }
  out.is_expanding = out.inside == 0 && out.on_circle == 0;
  out.has_inside_root = out.inside > 0;
  return out;
}

inline RootClassification classify_roots(const IntPoly& p,
                                         unsigned bits = 128,
                                         std::uint64_t seed = 0) {
  if (p.is_zero()) throw InvalidInputError("classify_roots: zero polynomial");
  return classify_factored(factor(p), bits, seed);
}

// ---------------------------------------------------------------------------
// cyclotomic detection

// Smallest m with p | x^m - 1, or nullopt. p must be irreducible primitive.
// Kronecker: p is cyclotomic iff p is monic with every root on the unit
// circle; the order m then satisfies phi(m) = deg p, and phi(m) >= sqrt(m/2)
// bounds the search by 2 deg^2.
inline std::optional<long> is_cyclotomic(const IntPoly& p) {
  int d = p.degree();
  if (d < 1) return std::nullopt;
  if (p.lc() != 1) return std::nullopt;
  if (int_abs(p.coeff(0)) != 1) return std::nullopt;
  long bound = 2L * d * d;
  for (long m = 1; m <= bound; ++m) {
    IntPoly xm1 = IntPoly::x_power(static_cast<std::size_t>(m)) -
                  IntPoly::constant(1);
    if (poly_divides(p, xm1)) return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// root enclosures for arbitrary polynomials (through the factorization)

struct RootEnclosure {
  CertifiedRoot root;
  int multiplicity = 1;
};

inline std::vector<RootEnclosure> root_enclosures(const IntPoly& p,
                                                  unsigned bits = 128,
                                                  std::uint64_t seed = 0) {
  if (p.is_zero() || p.degree() < 1)
    throw InvalidInputError("root_enclosures: degree must be >= 1");
  std::vector<RootEnclosure> out;
  for (const auto& [f, mult] : factor(p).factors) {
    IsolateOptions opts;
    opts.start_bits = bits;
    opts.seed = seed;
    for (const CertifiedRoot& r : isolate_roots(f, opts))
      out.push_back({r, mult});
  }
  return out;
}

// Certified rational lower bound on min |root| over all roots of p.
inline Rat min_root_modulus_lower(const IntPoly& p, unsigned bits = 128,
                                  std::uint64_t seed = 0) {
  bool first = true;
  Rat best = 0;
  for (const RootEnclosure& re : root_enclosures(p, bits, seed)) {
    Rat lb;
    if (re.root.radius_sq == 0 && re.root.cim == 0) {
      lb = rat_abs(re.root.cre);
    } else {
      lb = sqrt_lower(QComplex(re.root.cre, re.root.cim).mag_sq(), bits) -
           re.root.radius_up;
    }
    if (first || lb < best) {
      best = lb;
      first = false;
    }
  }
  return best;
}

}  // namespace digsys
