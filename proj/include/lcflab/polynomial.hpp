#pragma once

#include <vector>

#include "lcflab/rational.hpp"

namespace lcf::exact {

// Dense univariate polynomial with exact rational coefficients,
// c[0] + c[1] x + ... + c[d] x^d, leading coefficient nonzero.
struct RationalPoly {
  std::vector<Rational> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  Rational leading() const { return c.back(); }
  void normalize();  // drop trailing zeros
  RationalPoly monic() const;
};

RationalPoly derivative(const RationalPoly& p);
// q, r with p = q*d + r, deg r < deg d. Exact.
std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& p,
                                             const RationalPoly& d);
RationalPoly poly_gcd(RationalPoly a, RationalPoly b);
RationalPoly squarefree_part(const RationalPoly& p);

// Number of distinct real roots on (-inf, +inf) by exact Sturm-chain
// sign-variation counting. Operates on the square-free part.
int sturm_real_root_count(const RationalPoly& p);

}  // namespace lcf::exact
