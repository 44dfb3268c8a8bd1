#include "lcflab/polynomial.hpp"

#include <sstream>
#include <stdexcept>

namespace lcf::exact {

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

Rational rational_from_string(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(Int(s));
  const Int num(s.substr(0, slash));
  const Int den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
  return Rational(num, den);
}

void RationalPoly::normalize() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

RationalPoly RationalPoly::monic() const {
  if (is_zero()) return *this;
  RationalPoly m = *this;
  const Rational lead = c.back();
  for (auto& x : m.c) x /= lead;
  return m;
}

RationalPoly derivative(const RationalPoly& p) {
  RationalPoly d;
  for (int i = 1; i <= p.degree(); ++i) d.c.push_back(p.c[i] * i);
  d.normalize();
  return d;
}

std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& p,
                                             const RationalPoly& d) {
  if (d.is_zero()) throw std::invalid_argument("divmod: division by zero polynomial");
  RationalPoly r = p, q;
  q.c.assign(std::max(0, p.degree() - d.degree() + 1), Rational(0));
  while (!r.is_zero() && r.degree() >= d.degree()) {
    const Rational coef = r.leading() / d.leading();
    const int shift = r.degree() - d.degree();
    q.c[shift] = coef;
    for (int i = 0; i <= d.degree(); ++i) r.c[i + shift] -= coef * d.c[i];
    r.normalize();
  }
  q.normalize();
  return {q, r};
}

RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
  a.normalize();
  b.normalize();
  while (!b.is_zero()) {
    RationalPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

RationalPoly squarefree_part(const RationalPoly& p) {
  if (p.degree() <= 1) return p;
  const RationalPoly g = poly_gcd(p, derivative(p));
  if (g.degree() == 0) return p;
  RationalPoly q = divmod(p, g).first;
  q.normalize();
  return q;
}

namespace {

int sign_at_infinity(const RationalPoly& p, bool positive) {
  if (p.is_zero()) return 0;
  int s = p.leading() > 0 ? 1 : -1;
  if (!positive && p.degree() % 2 == 1) s = -s;
  return s;
}

int variations(const std::vector<RationalPoly>& chain, bool positive) {
  int prev = 0, var = 0;
  for (const auto& p : chain) {
    const int s = sign_at_infinity(p, positive);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++var;
    prev = s;
  }
  return var;
}

}  // namespace

int sturm_real_root_count(const RationalPoly& p) {
  RationalPoly sf = squarefree_part(p);
  sf.normalize();
  if (sf.is_zero()) throw std::invalid_argument("sturm_real_root_count: zero polynomial");
  if (sf.degree() == 0) return 0;

  std::vector<RationalPoly> chain{sf, derivative(sf)};
  while (!chain.back().is_zero() && chain.back().degree() > 0) {
    RationalPoly r = divmod(chain[chain.size() - 2], chain.back()).second;
    for (auto& x : r.c) x = -x;
    r.normalize();
    if (r.is_zero()) break;
    chain.push_back(std::move(r));
  }
  return variations(chain, false) - variations(chain, true);
}

}  // namespace lcf::exact
