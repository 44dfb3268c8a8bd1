#include "lcflab/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lcflab/metric_field.hpp"  // Rng

namespace lcf::exact {

using nlohmann::json;

const char* rule_name(RejectRule rule) {
  switch (rule) {
    case RejectRule::L3Quadratic: return "l3_quadratic";
    case RejectRule::DominantMultiplicity: return "dominant_multiplicity";
    case RejectRule::LBound: return "l_bound";
    case RejectRule::CubicRootCount: return "cubic_root_count";
    case RejectRule::ResidualNonzero: return "residual_nonzero";
  }
  return "?";
}

namespace {

void check_partition(const std::vector<int>& m, int n, const char* op) {
  int sum = 0;
  for (int mk : m) {
    if (mk < 1) throw std::invalid_argument(std::string(op) + ": multiplicities must be >= 1");
    sum += mk;
  }
  if (sum != n)
    throw std::invalid_argument(std::string(op) + ": multiplicity sum mismatch");
}

void check_u(const std::vector<Rational>& u, const char* op) {
  for (size_t k = 0; k < u.size(); ++k) {
    if (u[k] == 0) throw std::invalid_argument(std::string(op) + ": u_k must be nonzero");
    for (size_t j = k + 1; j < u.size(); ++j)
      if (u[k] == u[j])
        throw std::invalid_argument(std::string(op) + ": u values must be distinct");
  }
}

json rationals_to_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

}  // namespace

std::vector<Rational> to_u(const std::vector<Rational>& r,
                           const std::vector<int>& m, int n) {
  check_partition(m, n, "to_u");
  if (r.size() != m.size())
    throw std::invalid_argument("to_u: r and m length mismatch");
  Rational s = 0;
  for (size_t k = 0; k < r.size(); ++k) s += Rational(m[k]) * r[k];
  std::vector<Rational> u(r.size());
  for (size_t k = 0; k < r.size(); ++k) u[k] = 2 * r[k] - s / (n - 1);
  return u;
}

std::vector<Rational> residual_system(const std::vector<Rational>& u,
                                      const std::vector<int>& m, int n) {
  check_partition(m, n, "residual_system");
  if (u.size() != m.size() || u.size() < 2)
    throw std::invalid_argument("residual_system: need l >= 2 matching u and m");
  check_u(u, "residual_system");
  const size_t l = u.size();
  std::vector<Rational> res(l);
  for (size_t k = 0; k < l; ++k) {
    Rational sum = 0;
    for (size_t j = 0; j < l; ++j)
      if (j != k) sum += Rational(m[j]) / (u[k] - u[j]);
    res[k] = Rational(n - m[k]) - 2 * u[k] * sum;
  }
  return res;
}

bool IdentityReport::all_zero() const {
  if (A != 0 || B != 0 || D != 0) return false;
  for (const auto& c : C)
    if (c != 0) return false;
  return true;
}

IdentityReport check_identities(const std::vector<Rational>& u,
                                const std::vector<int>& m, int n) {
  check_partition(m, n, "check_identities");
  if (u.size() != m.size() || u.size() < 2)
    throw std::invalid_argument("check_identities: need l >= 2 matching u and m");
  check_u(u, "check_identities");
  const size_t l = u.size();
  IdentityReport rep;
  rep.A = 0;
  rep.B = 0;
  Rational mu = 0;   // sum m_k u_k
  Rational d1 = 0;   // sum (n-2m_k) m_k u_k^2
  for (size_t k = 0; k < l; ++k) {
    rep.A += Rational((n - m[k]) * m[k]) * u[k];
    rep.B += Rational((n - m[k]) * m[k]) / u[k];
    mu += Rational(m[k]) * u[k];
    d1 += Rational(n - 2 * m[k]) * Rational(m[k]) * u[k] * u[k];
  }
  rep.D = d1 + mu * mu;
  rep.C.resize(l);
  for (size_t k = 0; k < l; ++k) {
    Rational sum = 0;
    for (size_t j = 0; j < l; ++j)
      if (j != k) sum += Rational(m[j]) * u[j] / (u[j] - u[k]);
    rep.C[k] = Rational(n - m[k]) - 2 * sum;
  }
  return rep;
}

Certificate exclude_l3(int n, const std::array<int, 3>& m) {
  std::vector<int> mv(m.begin(), m.end());
  check_partition(mv, n, "exclude_l3");
  if (n < 4) throw std::invalid_argument("exclude_l3: n must be >= 4");

  Certificate cert;
  cert.candidate.n = n;
  cert.candidate.l = 3;
  cert.candidate.m = mv;
  cert.admitted = false;
  cert.rule = RejectRule::L3Quadratic;

  json labelings = json::array();
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const Int m1 = m[a], m2 = m[b], m3 = m[c];
    const Int P = (n - m2) * m2 * (n - m3) * m3;
    const Int Q = 4 * m1 * m2 * m3 * (n - m1) + 4 * m2 * m2 * m3 * m3;
    if (P <= 0 || Q <= 0)
      throw std::logic_error("exclude_l3: positivity certificate failed");
    labelings.push_back({{"odd_class", a},
                         {"P", to_string(Rational(P))},
                         {"Q", to_string(Rational(Q))}});
  }
  cert.witness = {{"rule", "l3_quadratic"}, {"n", n}, {"m", mv},
                  {"labelings", labelings}};
  return cert;
}

std::optional<Certificate> lemma33_filters(int n, int l,
                                           const std::vector<int>& m) {
  check_partition(m, n, "lemma33_filters");
  if (static_cast<int>(m.size()) != l)
    throw std::invalid_argument("lemma33_filters: l does not match partition length");
  if (l < 3) return std::nullopt;

  if (l == 3) return exclude_l3(n, {m[0], m[1], m[2]});

  auto reject = [&](RejectRule rule, json witness) {
    Certificate cert;
    cert.candidate.n = n;
    cert.candidate.l = l;
    cert.candidate.m = m;
    cert.admitted = false;
    cert.rule = rule;
    cert.witness = std::move(witness);
    return cert;
  };

  const int l_cap = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  if (l > l_cap)
    return reject(RejectRule::LBound,
                  {{"rule", "l_bound"}, {"n", n}, {"l", l}, {"l_cap", l_cap},
                   {"reason", "l must be 1, 2 or at most the cap"}});
  if (l >= 4 && n < 7)
    return reject(RejectRule::LBound,
                  {{"rule", "l_bound"}, {"n", n}, {"l", l}, {"min_n_for_l4", 7},
                   {"reason", "l >= 4 requires n >= 7"}});

  int dominant = 0;
  for (int mk : m)
    if (2 * mk > n) ++dominant;
  if (dominant != 1)
    return reject(RejectRule::DominantMultiplicity,
                  {{"rule", "dominant_multiplicity"}, {"n", n}, {"m", m},
                   {"dominant_count", dominant},
                   {"reason", "exactly one multiplicity above n/2 is required"}});
  return std::nullopt;
}

RationalPoly simple_triple_cubic(int n) {
  if (n < 4) throw std::invalid_argument("simple_triple_cubic: n must be >= 4");
  const Rational a = Rational(3 * (n - 3), n - 1);
  RationalPoly p;
  p.c = {Rational(1), a, a, Rational(1)};  // 1 + a x + a x^2 + x^3

  // Re-derive the elementary symmetric values of the ratios x_i = u_i/u_4
  // from the constraint chain: e1 from the u-sum, e3 from u_4^3 = -u1 u2 u3,
  // e2 from the reciprocal sum divided by e3.
  const Rational e1 = -a;
  const Rational e3 = Rational(-1);
  const Rational recip_sum = -a;  // sum 1/x_i = e2/e3
  const Rational e2 = recip_sum * e3;
  if (p.c[2] != -e1 || p.c[1] != e2 || p.c[0] != -e3)
    throw std::logic_error("simple_triple_cubic: symmetric-function re-derivation mismatch");
  return p;
}

SpectrumCandidate product_spectrum(ProductKind kind, int n, int m,
                                   const Rational& K) {
  SpectrumCandidate cand;
  cand.n = n;
  cand.l = 2;
  if (kind == ProductKind::FormTimesLine) {
    if (n < 3) throw std::invalid_argument("product_spectrum: form_times_line needs n >= 3");
    cand.m = {n - 1, 1};
    cand.r = {Rational(n - 2) * K, Rational(0)};
  } else {
    if (m < 2 || m > n - 2)
      throw std::invalid_argument("product_spectrum: opposite_forms needs 2 <= m <= n-2");
    cand.m = {m, n - m};
    cand.r = {Rational(m - 1) * K, -Rational(n - m - 1) * K};
  }
  Rational s = 0;
  for (size_t k = 0; k < cand.r.size(); ++k) s += Rational(cand.m[k]) * cand.r[k];
  cand.s = s;
  cand.u = to_u(cand.r, cand.m, n);
  return cand;
}

std::vector<std::vector<int>> partitions_into(int n, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // parts non-increasing, descending lex emission order
  auto rec = [&](auto&& self, int rest, int parts, int maxpart) -> void {
    if (parts == 1) {
      if (rest >= 1 && rest <= maxpart) {
        cur.push_back(rest);
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (int first = std::min(maxpart, rest - (parts - 1)); first >= (rest + parts - 1) / parts; --first) {
      cur.push_back(first);
      self(self, rest - first, parts - 1, first);
      cur.pop_back();
    }
  };
  if (l >= 1 && l <= n) rec(rec, n, l, n);
  return out;
}

namespace {

json candidate_to_json(const SpectrumCandidate& c) {
  json j;
  j["n"] = c.n;
  j["l"] = c.l;
  j["m"] = c.m;
  if (!c.r.empty()) j["r"] = rationals_to_json(c.r);
  if (!c.u.empty()) j["u"] = rationals_to_json(c.u);
  if (c.s) j["s"] = to_string(*c.s);
  return j;
}

json poly_coeffs_json(const RationalPoly& p) {
  json a = json::array();
  for (const auto& c : p.c) a.push_back(to_string(c));
  return a;
}

}  // namespace

ClassificationReport classify(int n, int l_max) {
  if (n < 4) throw std::invalid_argument("classify: n must be >= 4");
  const int lcap = (l_max < 0) ? n : std::min(l_max, n);

  ClassificationReport rep;
  rep.n = n;
  for (int l = 1; l <= lcap; ++l) {
    for (const auto& m : partitions_into(n, l)) {
      ++rep.enumerated_shapes;
      if (l == 1) {
        AdmittedFamily fam;
        fam.l = 1;
        fam.m = m;
        fam.family = "einstein";
        fam.witness.n = n;
        fam.witness.l = 1;
        fam.witness.m = m;
        fam.witness.r = {Rational(n - 1)};  // unit space form
        fam.witness.s = Rational(n) * Rational(n - 1);
        rep.admitted.push_back(std::move(fam));
        continue;
      }
      if (l == 2) {
        AdmittedFamily fam;
        fam.l = 2;
        fam.m = m;
        if (m[1] == 1) {
          fam.family = "form_times_line";
          fam.witness = product_spectrum(ProductKind::FormTimesLine, n, n - 1, 1);
        } else {
          fam.family = "opposite_forms";
          fam.witness = product_spectrum(ProductKind::OppositeForms, n, m[0], 1);
        }
        // witness check, not criterion: the exact spectrum satisfies the
        // l >= 3 constraint system as well
        for (const auto& rres : residual_system(fam.witness.u, fam.witness.m, n))
          if (rres != 0)
            throw std::logic_error("classify: product witness failed the residual system");
        rep.admitted.push_back(std::move(fam));
        continue;
      }
      if (auto cert = lemma33_filters(n, l, m)) {
        rep.rejected.push_back(std::move(*cert));
        continue;
      }
      const bool simple_triple =
          (l == 4 && m[1] == 1 && m[2] == 1 && m[3] == 1);
      if (simple_triple) {
        const RationalPoly cubic = simple_triple_cubic(n);
        const int roots = sturm_real_root_count(cubic);
        if (roots == 1) {
          Certificate cert;
          cert.candidate.n = n;
          cert.candidate.l = l;
          cert.candidate.m = m;
          cert.admitted = false;
          cert.rule = RejectRule::CubicRootCount;
          cert.witness = {{"rule", "cubic_root_count"}, {"n", n}, {"m", m},
                          {"coefficients_ascending", poly_coeffs_json(cubic)},
                          {"real_root_count", roots},
                          {"required_real_roots", 3}};
          rep.rejected.push_back(std::move(cert));
          continue;
        }
      }
      rep.undecided.push_back(
          UndecidedShape{l, m, "beyond the exact exclusion chain"});
    }
  }

  std::ostringstream os;
  os << "n=" << n << ": " << rep.admitted.size() << " admitted families, "
     << rep.rejected.size() << " rejected shapes, " << rep.undecided.size()
     << " undecided";
  if (rep.undecided.empty() && n <= 8)
    os << "; admitted exactly the Einstein, form x line and opposite-form families";
  rep.summary = os.str();
  return rep;
}

json certificate_to_json(const Certificate& cert) {
  json j;
  j["l"] = cert.candidate.l;
  j["m"] = cert.candidate.m;
  j["verdict"] = cert.admitted ? "admitted" : "rejected";
  if (cert.rule) j["rule"] = rule_name(*cert.rule);
  j["witness"] = cert.witness;
  return j;
}

json classification_report_to_json(const ClassificationReport& rep) {
  json j;
  j["n"] = rep.n;
  json adm = json::array();
  for (const auto& fam : rep.admitted)
    adm.push_back({{"l", fam.l}, {"m", fam.m}, {"family", fam.family},
                   {"witness", candidate_to_json(fam.witness)}});
  j["admitted"] = std::move(adm);
  json rej = json::array();
  for (const auto& cert : rep.rejected) rej.push_back(certificate_to_json(cert));
  j["rejected"] = std::move(rej);
  json und = json::array();
  for (const auto& u : rep.undecided)
    und.push_back({{"l", u.l}, {"m", u.m}, {"note", u.note}});
  j["undecided"] = std::move(und);
  j["enumerated_shapes"] = rep.enumerated_shapes;
  j["summary"] = rep.summary;
  return j;
}

bool recheck_certificate(const Certificate& cert) {
  if (cert.admitted || !cert.rule) return false;
  const json& w = cert.witness;
  switch (*cert.rule) {
    case RejectRule::L3Quadratic: {
      const int n = w.at("n").get<int>();
      const auto m = w.at("m").get<std::vector<int>>();
      if (m.size() != 3) return false;
      for (const auto& lab : w.at("labelings")) {
        const int a = lab.at("odd_class").get<int>();
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        const Int P = Int(n - m[b]) * m[b] * Int(n - m[c]) * m[c];
        const Int Q = Int(4) * m[a] * m[b] * m[c] * Int(n - m[a]) +
                      Int(4) * m[b] * m[b] * m[c] * m[c];
        if (to_string(Rational(P)) != lab.at("P").get<std::string>()) return false;
        if (to_string(Rational(Q)) != lab.at("Q").get<std::string>()) return false;
        if (P <= 0 || Q <= 0) return false;
      }
      return true;
    }
    case RejectRule::DominantMultiplicity: {
      const int n = w.at("n").get<int>();
      const auto m = w.at("m").get<std::vector<int>>();
      int dominant = 0;
      for (int mk : m)
        if (2 * mk > n) ++dominant;
      return dominant == w.at("dominant_count").get<int>() && dominant != 1;
    }
    case RejectRule::LBound: {
      const int n = w.at("n").get<int>();
      const int l = w.at("l").get<int>();
      if (w.contains("l_cap")) {
        const int cap = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
        return cap == w.at("l_cap").get<int>() && l > cap;
      }
      return l >= 4 && n < 7;
    }
    case RejectRule::CubicRootCount: {
      const int n = w.at("n").get<int>();
      RationalPoly p;
      for (const auto& cs : w.at("coefficients_ascending"))
        p.c.push_back(rational_from_string(cs.get<std::string>()));
      const RationalPoly expected = simple_triple_cubic(n);
      if (p.c != expected.c) return false;
      return sturm_real_root_count(p) == w.at("real_root_count").get<int>() &&
             w.at("real_root_count").get<int>() != 3;
    }
    case RejectRule::ResidualNonzero: {
      const int n = w.at("n").get<int>();
      const auto m = w.at("m").get<std::vector<int>>();
      std::vector<Rational> u;
      for (const auto& us : w.at("u"))
        u.push_back(rational_from_string(us.get<std::string>()));
      const auto res = residual_system(u, m, n);
      for (const auto& x : res)
        if (x != 0) return true;
      return false;
    }
  }
  return false;
}

// ---- numeric exploration ----------------------------------------------

namespace {

Eigen::VectorXd numeric_residual(const Eigen::VectorXd& u,
                                 const std::vector<int>& m, int n) {
  const int l = static_cast<int>(u.size());
  Eigen::VectorXd f(l + 1);
  for (int k = 0; k < l; ++k) {
    double sum = 0.0;
    for (int j = 0; j < l; ++j)
      if (j != k) sum += double(m[j]) / (u(k) - u(j));
    f(k) = double(n - m[k]) - 2.0 * u(k) * sum;
  }
  f(l) = u.squaredNorm() - 1.0;
  return f;
}

bool degenerate(const Eigen::VectorXd& u, double tol) {
  const int l = static_cast<int>(u.size());
  for (int k = 0; k < l; ++k) {
    if (std::abs(u(k)) < tol) return true;
    for (int j = k + 1; j < l; ++j)
      if (std::abs(u(k) - u(j)) < tol) return true;
  }
  return false;
}

// continued-fraction rational reconstruction with a denominator bound
std::optional<Rational> reconstruct(double x, long max_den) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const double fa = std::floor(v);
    if (std::abs(fa) > 1e15) return std::nullopt;
    const long a = static_cast<long>(fa);
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = v - fa;
    if (frac < 1e-12) break;
    v = 1.0 / frac;
  }
  if (q1 == 0) return std::nullopt;
  if (std::abs(double(p1) / double(q1) - x) > 1e-8) return std::nullopt;
  return Rational(Int(p1), Int(q1));
}

}  // namespace

std::vector<NumericCandidate> search_candidates(int n,
                                                const std::vector<int>& m,
                                                int trials,
                                                std::uint64_t seed) {
  check_partition(m, n, "search_candidates");
  const int l = static_cast<int>(m.size());
  std::vector<NumericCandidate> out;
  Rng rng(seed);

  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd u(l);
    for (int k = 0; k < l; ++k) u(k) = 2.0 * rng.uniform01() - 1.0;
    if (degenerate(u, 1e-3)) continue;
    u.normalize();

    double lambda = 1e-3;
    bool dead = false;
    for (int it = 0; it < 120 && !dead; ++it) {
      const Eigen::VectorXd f = numeric_residual(u, m, n);
      if (f.norm() < 1e-13) break;
      Eigen::MatrixXd J(l + 1, l);
      const double hh = 1e-7;
      for (int c = 0; c < l; ++c) {
        Eigen::VectorXd up = u, um = u;
        up(c) += hh;
        um(c) -= hh;
        if (degenerate(up, 1e-10) || degenerate(um, 1e-10)) { dead = true; break; }
        J.col(c) = (numeric_residual(up, m, n) - numeric_residual(um, m, n)) / (2.0 * hh);
      }
      if (dead) break;
      const Eigen::MatrixXd A = J.transpose() * J +
                                lambda * Eigen::MatrixXd::Identity(l, l);
      const Eigen::VectorXd delta = A.ldlt().solve(-J.transpose() * f);
      Eigen::VectorXd next = u + delta;
      if (degenerate(next, 1e-9)) { dead = true; break; }
      if (numeric_residual(next, m, n).norm() < f.norm()) {
        u = next;
        lambda = std::max(lambda * 0.5, 1e-12);
      } else {
        lambda *= 10.0;
        if (lambda > 1e8) break;
      }
    }
    if (dead || degenerate(u, 1e-6)) continue;

    Eigen::VectorXd f = numeric_residual(u, m, n);
    f.conservativeResize(l);  // drop the normalization row
    if (f.lpNorm<Eigen::Infinity>() >= 1e-10) continue;

    // canonicalize scale and sign
    u.normalize();
    if (u(0) < 0.0) u = -u;
    bool dup = false;
    for (const auto& c : out)
      if ((c.u - u).lpNorm<Eigen::Infinity>() < 1e-6) dup = true;
    if (dup) continue;

    NumericCandidate cand;
    cand.u = u;
    cand.residual = f.lpNorm<Eigen::Infinity>();
    std::vector<Rational> ru(l);
    bool ok = true;
    for (int k = 0; k < l && ok; ++k) {
      const auto q = reconstruct(u(k) / u(0), 1000);
      if (q) ru[k] = *q; else ok = false;
    }
    if (ok) {
      try {
        const auto res = residual_system(ru, m, n);
        cand.exact_verified =
            std::all_of(res.begin(), res.end(), [](const Rational& x) { return x == 0; });
        cand.rational_u = std::move(ru);
      } catch (const std::invalid_argument&) {
        cand.exact_verified = false;
      }
    }
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace lcf::exact
