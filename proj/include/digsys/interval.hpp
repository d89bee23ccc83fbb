#pragma once
// Interval arithmetic with exact rational endpoints, and complex boxes built
// from two such intervals. Endpoints are never rounded, so every enclosure
// computed here is rigorous by construction.

#include "digsys/numbers.hpp"

#include <algorithm>
#include <vector>

namespace digsys {

struct RatInterval {
  Rat lo, hi;

  RatInterval() : lo(0), hi(0) {}
  explicit RatInterval(const Rat& point) : lo(point), hi(point) {}
  RatInterval(const Rat& l, const Rat& h) : lo(l), hi(h) {
    if (lo > hi) throw InvalidInputError("RatInterval: lo > hi");
  }

  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  Rat width() const { return hi - lo; }

  // min/max of |t| over t in the interval
  Rat abs_lower() const {
    if (contains_zero()) return Rat(0);
    return std::min(rat_abs(lo), rat_abs(hi));
  }
  Rat abs_upper() const { return std::max(rat_abs(lo), rat_abs(hi)); }
};

inline RatInterval operator-(const RatInterval& a) {
  return RatInterval(-a.hi, -a.lo);
}
inline RatInterval operator+(const RatInterval& a, const RatInterval& b) {
  return RatInterval(a.lo + b.lo, a.hi + b.hi);
}
inline RatInterval operator-(const RatInterval& a, const RatInterval& b) {
  return a + (-b);
}
inline RatInterval operator*(const RatInterval& a, const RatInterval& b) {
  Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return RatInterval(std::min(std::min(p1, p2), std::min(p3, p4)),
                     std::max(std::max(p1, p2), std::max(p3, p4)));
}
inline RatInterval operator*(const Rat& c, const RatInterval& a) {
  return RatInterval(Rat(c)) * a;
}

// Axis-aligned rectangle in the complex plane.
struct ComplexBox {
  RatInterval re, im;

  ComplexBox() = default;
  ComplexBox(const RatInterval& r, const RatInterval& i) : re(r), im(i) {}
  static ComplexBox point(const Rat& r, const Rat& i) {
    return ComplexBox(RatInterval(r), RatInterval(i));
  }
  // Square box around a center with the given half-width.
  static ComplexBox disk_enclosure(const Rat& cre, const Rat& cim,
                                   const Rat& radius) {
    return ComplexBox(RatInterval(cre - radius, cre + radius),
                      RatInterval(cim - radius, cim + radius));
  }

  bool contains_zero() const {
    return re.contains_zero() && im.contains_zero();
  }

  // Rigorous bounds for |z|^2 over the box.
  RatInterval mag_sq() const {
    Rat rlo = re.abs_lower(), rhi = re.abs_upper();
    Rat ilo = im.abs_lower(), ihi = im.abs_upper();
    return RatInterval(rlo * rlo + ilo * ilo, rhi * rhi + ihi * ihi);
  }
  Rat mag_upper(unsigned bits = 64) const {
    return sqrt_upper(mag_sq().hi, bits);
  }
  Rat mag_lower(unsigned bits = 64) const {
    return sqrt_lower(mag_sq().lo, bits);
  }
};

inline ComplexBox operator+(const ComplexBox& a, const ComplexBox& b) {
  return ComplexBox(a.re + b.re, a.im + b.im);
}
inline ComplexBox operator-(const ComplexBox& a, const ComplexBox& b) {
  return ComplexBox(a.re - b.re, a.im - b.im);
}
inline ComplexBox operator*(const ComplexBox& a, const ComplexBox& b) {
  return ComplexBox(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
inline ComplexBox operator*(const Rat& c, const ComplexBox& a) {
  return ComplexBox(c * a.re, c * a.im);
}

// Horner evaluation of a polynomial (coefficients low to high) on a box.
inline ComplexBox eval_on_box(const std::vector<Rat>& coeffs,
                              const ComplexBox& z) {
  ComplexBox acc;  // zero
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    acc = acc * z + ComplexBox::point(coeffs[i], Rat(0));
  }
  return acc;
}

}  // namespace digsys
