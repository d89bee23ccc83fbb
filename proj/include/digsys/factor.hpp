#pragma once
// Factorization in Z[x]: Yun squarefree decomposition, Cantor-Zassenhaus
// factorization modulo a small prime, linear multifactor Hensel lifting up to
// the Landau-Mignotte bound, and subset recombination. Non-monic inputs are
// monicized through x -> x/lc and mapped back, which keeps the lifting free
// of leading-coefficient bookkeeping.

#include "digsys/numbers.hpp"
#include "digsys/poly.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace digsys {

struct FactoredPoly {
  Int content = 1;
  std::vector<std::pair<IntPoly, int>> factors;  // irreducible primitive, mult

  IntPoly recompose() const {
    IntPoly r = IntPoly::constant(content);
    for (const auto& [f, m] : factors)
      r = r * int_poly_pow(f, static_cast<unsigned>(m));
    return r;
  }
};

namespace fpx {

// Dense polynomials over F_p with word-sized p.
using Poly = std::vector<std::int64_t>;

inline std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t p) {
  return static_cast<std::int64_t>(static_cast<__int128>(a) * b % p);
}

inline std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a % p;
  if (new_r < 0) new_r += p;
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw Error("fpx::inv_mod: not invertible");
  return t < 0 ? t + p : t;
}

inline void normalize(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int degree(const Poly& f) { return static_cast<int>(f.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b, std::int64_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + b[i]) % p;
  normalize(r);
  return r;
}

inline Poly sub(const Poly& a, const Poly& b, std::int64_t p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = (r[i] - b[i] % p + p) % p;
  normalize(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + mul_mod(a[i], b[j], p)) % p;
  }
  normalize(r);
  return r;
}

inline Poly scale(const Poly& a, std::int64_t s, std::int64_t p) {
  Poly r = a;
  for (auto& x : r) x = mul_mod(x, s % p < 0 ? s % p + p : s % p, p);
  normalize(r);
  return r;
}

inline Poly monic(const Poly& a, std::int64_t p) {
  if (a.empty()) return a;
  return scale(a, inv_mod(a.back(), p), p);
}

inline Poly rem(Poly a, const Poly& b, std::int64_t p) {
  if (b.empty()) throw Error("fpx::rem: division by zero");
  std::int64_t inv_lc = inv_mod(b.back(), p);
  while (degree(a) >= degree(b)) {
    std::int64_t f = mul_mod(a.back(), inv_lc, p);
    std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j)
      a[shift + j] = (a[shift + j] - mul_mod(f, b[j], p) % p + p) % p;
    normalize(a);
  }
  return a;
}

inline Poly divide(Poly a, const Poly& b, std::int64_t p) {
  if (b.empty()) throw Error("fpx::divide: division by zero");
  Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  std::int64_t inv_lc = inv_mod(b.back(), p);
  while (degree(a) >= degree(b)) {
    std::int64_t f = mul_mod(a.back(), inv_lc, p);
    std::size_t shift = a.size() - b.size();
    q[shift] = f;
    for (std::size_t j = 0; j < b.size(); ++j)
      a[shift + j] = (a[shift + j] - mul_mod(f, b[j], p) % p + p) % p;
    normalize(a);
  }
  if (!a.empty()) throw Error("fpx::divide: division was not exact");
  normalize(q);
  return q;
}

inline Poly gcd(Poly a, Poly b, std::int64_t p) {
  while (!b.empty()) {
    Poly r = rem(a, b, p);
    a = b;
    b = r;
  }
  return monic(a, p);
}

inline Poly derivative(const Poly& a, std::int64_t p) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i)
    r[i - 1] = mul_mod(a[i], static_cast<std::int64_t>(i % p), p);
  normalize(r);
  return r;
}

inline Poly pow_mod(Poly base, Int e, const Poly& f, std::int64_t p) {
  Poly r = {1};
  base = rem(std::move(base), f, p);
  while (e > 0) {
    if ((e & 1) != 0) r = rem(mul(r, base, p), f, p);
    base = rem(mul(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

// Equal-degree splitting (Cantor-Zassenhaus, p odd): g is a product of
// distinct monic irreducibles all of degree d.
inline void equal_degree_split(const Poly& g, int d, std::int64_t p,
                               std::mt19937_64& rng,
                               std::vector<Poly>& out) {
  if (degree(g) == d) {
    out.push_back(g);
    return;
  }
  Int exponent = (int_pow(Int(p), static_cast<unsigned long>(d)) - 1) / 2;
  std::uniform_int_distribution<std::int64_t> dist(0, p - 1);
  while (true) {
    Poly r(static_cast<std::size_t>(degree(g)), 0);
    for (auto& x : r) x = dist(rng);
    normalize(r);
    if (degree(r) < 1) continue;
    Poly s = pow_mod(r, exponent, g, p);
    s = sub(s, Poly{1}, p);
    Poly w = gcd(g, s, p);
    if (degree(w) > 0 && degree(w) < degree(g)) {
      equal_degree_split(w, d, p, rng, out);
      equal_degree_split(divide(g, w, p), d, p, rng, out);
      return;
    }
  }
}

// Full factorization of a monic squarefree f over F_p into monic
// irreducibles (distinct-degree then equal-degree stages).
inline std::vector<Poly> factor_squarefree(Poly f, std::int64_t p,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Poly> out;
  Poly h = {0, 1};  // x
  int d = 0;
  while (degree(f) > 0 && 2 * (d + 1) <= degree(f)) {
    ++d;
    h = pow_mod(h, Int(p), f, p);
    Poly hx = sub(h, Poly{0, 1}, p);
    Poly g = gcd(f, hx, p);
    if (degree(g) > 0) {
      equal_degree_split(g, d, p, rng, out);
      f = divide(f, g, p);
      h = rem(h, f, p);
    }
  }
  if (degree(f) > 0) out.push_back(monic(f, p));
  return out;
}

}  // namespace fpx

namespace detail {

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline IntPoly mod_reduce(const IntPoly& f, const Int& m) {
  std::vector<Int> c(f.coeffs());
  for (Int& x : c) x = mod_floor(x, m);
  return IntPoly(std::move(c));
}

inline IntPoly symmetric_mod(const IntPoly& f, const Int& m) {
  std::vector<Int> c(f.coeffs());
  Int half = m / 2;
  for (Int& x : c) {
    x = mod_floor(x, m);
    if (x > half) x -= m;
  }
  return IntPoly(std::move(c));
}

inline fpx::Poly to_fp(const IntPoly& f, std::int64_t p) {
  fpx::Poly r(f.coeffs().size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<std::int64_t>(mod_floor(f.coeffs()[i], Int(p)));
  fpx::normalize(r);
  return r;
}

inline IntPoly from_fp(const fpx::Poly& f) {
  std::vector<Int> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
  return IntPoly(std::move(c));
}

// Lift the factorization g = prod h_i (mod p) of a monic squarefree g to
// modulus p^l; the h_i stay monic with coefficients in [0, p^l).
inline std::vector<IntPoly> hensel_lift(const IntPoly& g,
                                        const std::vector<fpx::Poly>& hbar,
                                        std::int64_t p, unsigned l) {
  std::size_t r = hbar.size();
  // Bezout elements: sum sigma_i * (g/h_i) = 1 in F_p[x].
  fpx::Poly gbar = to_fp(g, p);
  std::vector<fpx::Poly> sigma(r);
  for (std::size_t i = 0; i < r; ++i) {
    fpx::Poly hi = fpx::divide(gbar, hbar[i], p);
    fpx::Poly hi_mod = fpx::rem(hi, hbar[i], p);
    // invert hi_mod modulo hbar[i] by extended Euclid
    fpx::Poly t0, t1 = {1};
    fpx::Poly r0 = hbar[i], r1 = hi_mod;
    while (!r1.empty()) {
      fpx::Poly q = fpx::divide(fpx::sub(r0, fpx::rem(r0, r1, p), p), r1, p);
      fpx::Poly nr = fpx::rem(r0, r1, p);
      r0 = r1;
      r1 = nr;
      fpx::Poly nt = fpx::sub(t0, fpx::mul(q, t1, p), p);
      t0 = t1;
      t1 = nt;
    }
    if (fpx::degree(r0) != 0) throw Error("hensel_lift: factors not coprime");
    sigma[i] = fpx::scale(t0, fpx::inv_mod(r0[0], p), p);
  }

  std::vector<IntPoly> h(r);
  for (std::size_t i = 0; i < r; ++i) h[i] = from_fp(hbar[i]);

  Int pk = p;  // current modulus p^k, k starting at 1
  for (unsigned k = 1; k < l; ++k) {
    Int pk1 = pk * p;
    IntPoly prod = IntPoly::constant(1);
    for (const IntPoly& hi : h) prod = mod_reduce(prod * hi, pk1);
    IntPoly diff = mod_reduce(g - prod, pk1);
    std::vector<Int> ec(diff.coeffs());
    for (Int& x : ec) {
      if (x % pk != 0) throw Error("hensel_lift: defect not divisible");
      x /= pk;
    }
    fpx::Poly e = to_fp(IntPoly(std::move(ec)), p);
    for (std::size_t i = 0; i < r; ++i) {
      fpx::Poly delta = fpx::rem(fpx::mul(sigma[i], e, p), hbar[i], p);
      h[i] = h[i] + pk * from_fp(delta);
    }
    pk = pk1;
  }
  return h;
}

std::vector<IntPoly> factor_squarefree_primitive(const IntPoly& f);

// f monic squarefree over Z, degree >= 2.
inline std::vector<IntPoly> zassenhaus_monic(const IntPoly& f) {
  int n = f.degree();
  // prime with f squarefree mod p
  std::int64_t p = 0;
  for (std::int64_t cand = 3;; cand += 2) {
    if (!is_prime_u64(static_cast<std::uint64_t>(cand))) continue;
    fpx::Poly fbar = to_fp(f, cand);
    if (fpx::degree(fbar) != n) continue;  // cannot happen for monic f
    if (fpx::degree(fpx::gcd(fbar, fpx::derivative(fbar, cand), cand)) == 0) {
      p = cand;
      break;
    }
  }

  std::uint64_t seed =
      0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(p) << 17) ^
      static_cast<std::uint64_t>(n);
  std::vector<fpx::Poly> hbar =
      fpx::factor_squarefree(to_fp(f, p), p, seed);
  if (hbar.size() == 1) return {f};

  // Landau-Mignotte bound for coefficients of monic divisors.
  Int b2 = isqrt_floor(Int(n + 1)) + 1;
  Int bound = b2 * pow2(static_cast<unsigned long>(n)) * f.max_abs_coeff();
  unsigned l = 1;
  Int pl = p;
  while (pl < 2 * bound + 1) {
    pl *= p;
    ++l;
  }

  std::vector<IntPoly> lifted = hensel_lift(f, hbar, p, l);

  std::vector<IntPoly> result;
  std::vector<std::size_t> active(lifted.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
  IntPoly g = f;

  std::size_t s = 1;
  while (2 * s <= active.size()) {
    // enumerate size-s subsets of active in lexicographic order
    std::vector<std::size_t> pick(s);
    for (std::size_t i = 0; i < s; ++i) pick[i] = i;
    bool found = false;
    while (true) {
      IntPoly cand = IntPoly::constant(1);
      for (std::size_t i : pick)
        cand = mod_reduce(cand * lifted[active[i]], pl);
      cand = symmetric_mod(cand, pl);
      auto q = exact_divide(g, cand);
      if (q) {
        result.push_back(cand);
        g = *q;
        std::vector<std::size_t> next_active;
        for (std::size_t i = 0; i < active.size(); ++i)
          if (std::find(pick.begin(), pick.end(), i) == pick.end())
            next_active.push_back(active[i]);
        active = std::move(next_active);
        found = true;
        break;
      }
      // next combination
      std::size_t i = s;
      while (i > 0 && pick[i - 1] == active.size() - s + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < s; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!found) ++s;
  }
  if (g.degree() >= 1) result.push_back(g);
  return result;
}

// f primitive squarefree, lc > 0, degree >= 1.
inline std::vector<IntPoly> factor_squarefree_primitive(const IntPoly& f) {
  if (f.degree() == 1) return {f};
  const Int& b = f.lc();
  if (b == 1) return zassenhaus_monic(f);
  // monicize: g(x) = b^(n-1) f(x/b), factor, map factors through x -> b x
  int n = f.degree();
  std::vector<Int> gc(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i)
    gc[static_cast<std::size_t>(i)] =
        f.coeff(static_cast<std::size_t>(i)) *
        int_pow(b, static_cast<unsigned long>(n - 1 - i));
  gc[static_cast<std::size_t>(n)] = 1;
  IntPoly g(std::move(gc));
  std::vector<IntPoly> gf = zassenhaus_monic(g);
  std::vector<IntPoly> out;
  for (const IntPoly& gk : gf) {
    std::vector<Int> hc(gk.coeffs());
    Int bp = 1;
    for (std::size_t i = 0; i < hc.size(); ++i) {
      hc[i] *= bp;
      bp *= b;
    }
    out.push_back(IntPoly(std::move(hc)).primitive_part());
  }
  return out;
}

}  // namespace detail

// Complete factorization over Z into content times irreducible primitive
// powers, factors sorted in a deterministic order.
inline FactoredPoly factor(const IntPoly& p) {
  if (p.is_zero()) throw InvalidInputError("factor: zero polynomial");
  auto [cont, pp] = p.content_primitive();
  FactoredPoly out;
  out.content = cont;
  if (pp.degree() == 0) return out;
  for (const auto& [g, mult] : yun_squarefree(pp)) {
    for (const IntPoly& irr : detail::factor_squarefree_primitive(g))
      out.factors.emplace_back(irr, mult);
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& a, const auto& b) {
              return poly_compare(a.first, b.first) < 0;
            });
  return out;
}

}  // namespace digsys
