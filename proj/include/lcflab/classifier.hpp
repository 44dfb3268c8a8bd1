#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lcflab/polynomial.hpp"
#include "lcflab/rational.hpp"

// Exact rational-arithmetic engine for the classification of locally
// conformal flat metrics with constant Ricci eigenvalues: the u-transform,
// the multiplicity constraint system, its consequence identities, the
// three-eigenvalue and simple-triple exclusions, and the per-dimension
// classification with machine-checkable certificates.

namespace lcf::exact {

struct SpectrumCandidate {
  int n = 0;                  // manifold dimension
  int l = 0;                  // number of distinct eigenvalues
  std::vector<int> m;         // multiplicities, sum = n
  std::vector<Rational> u;    // shifted eigenvalues u_k = 2 r_k - s/(n-1)
  std::vector<Rational> r;    // Ricci eigenvalues
  std::optional<Rational> s;  // scalar curvature
};

enum class RejectRule {
  L3Quadratic,
  DominantMultiplicity,
  LBound,
  CubicRootCount,
  ResidualNonzero,
};
const char* rule_name(RejectRule rule);

// Exact record of why a candidate shape was admitted or rejected. Every
// rejected certificate is re-checkable from its witness values alone.
struct Certificate {
  SpectrumCandidate candidate;
  bool admitted = false;
  std::optional<RejectRule> rule;
  nlohmann::json witness;
};

// u_k = 2 r_k - s/(n-1) with s = sum m_k r_k. Exact.
std::vector<Rational> to_u(const std::vector<Rational>& r,
                           const std::vector<int>& m, int n);

// k-th entry: (n - m_k) - 2 u_k sum_{j != k} m_j/(u_k - u_j). All-zero
// means the candidate satisfies the constant-Ricci constraint system.
std::vector<Rational> residual_system(const std::vector<Rational>& u,
                                      const std::vector<int>& m, int n);

struct IdentityReport {
  Rational A;               // sum (n-m_k) m_k u_k
  Rational B;               // sum (n-m_k) m_k / u_k
  std::vector<Rational> C;  // (n-m_k) - 2 sum_{j!=k} m_j u_j/(u_j-u_k)
  Rational D;               // sum (n-2m_k) m_k u_k^2 + (sum m_k u_k)^2
  bool all_zero() const;
};
IdentityReport check_identities(const std::vector<Rational>& u,
                                const std::vector<int>& m, int n);

// Three distinct eigenvalues are impossible: for each labeling of the
// odd-sign class, P = (n-m2)m2(n-m3)m3 and Q = 4 m1 m2 m3 (n-m1) + 4 m2^2 m3^2
// are strictly positive, so P (x2-x3)^2 + Q x2 x3 cannot vanish when
// x2 x3 > 0. Always returns a rejection certificate.
Certificate exclude_l3(int n, const std::array<int, 3>& m);

// Counting filters for l >= 3: l = 3 exclusion, the l-range bounds, the
// l >= 4 => n >= 7 bound, and the single-dominant-multiplicity condition.
// nullopt means the shape passes and is forwarded.
std::optional<Certificate> lemma33_filters(int n, int l,
                                           const std::vector<int>& m);

// x^3 + 3(n-3)/(n-1) x^2 + 3(n-3)/(n-1) x + 1, whose roots would be the
// ratios x_i = u_i/u_4 of a (n-3,1,1,1) solution. The elementary symmetric
// values are re-derived from the constraint chain and asserted to match.
RationalPoly simple_triple_cubic(int n);

enum class ProductKind { FormTimesLine, OppositeForms };

// Exact Ricci spectrum of the two admitted product families.
//   FormTimesLine: r = ((n-2)K, 0), m = (n-1, 1)
//   OppositeForms: r = ((m-1)K, -(n-m-1)K), m = (m, n-m)
SpectrumCandidate product_spectrum(ProductKind kind, int n, int m,
                                   const Rational& K);

struct AdmittedFamily {
  int l = 0;
  std::vector<int> m;
  std::string family;  // einstein | form_times_line | opposite_forms
  SpectrumCandidate witness;
};

struct UndecidedShape {
  int l = 0;
  std::vector<int> m;
  std::string note;
};

struct ClassificationReport {
  int n = 0;
  std::vector<AdmittedFamily> admitted;
  std::vector<Certificate> rejected;
  std::vector<UndecidedShape> undecided;
  int enumerated_shapes = 0;
  std::string summary;
};

// Enumerates every multiplicity partition of n into l parts for
// l = 1..min(l_max, n) and decides each shape. For 4 <= n <= 8 the
// undecided list is empty. l_max < 0 means no cap.
ClassificationReport classify(int n, int l_max = -1);

nlohmann::json certificate_to_json(const Certificate& cert);
nlohmann::json classification_report_to_json(const ClassificationReport& rep);

// Re-derives the verdict of a rejected certificate from its witness
// values alone, with no access to the pipeline that produced it.
bool recheck_certificate(const Certificate& cert);

// Partitions of n into exactly l positive non-increasing parts, emitted
// in descending lexicographic order.
std::vector<std::vector<int>> partitions_into(int n, int l);

// ---- numeric exploration (no exactness claims) -------------------------

struct NumericCandidate {
  Eigen::VectorXd u;           // normalized numeric near-solution
  double residual = 0.0;
  std::vector<Rational> rational_u;  // reconstruction attempt, may be empty
  bool exact_verified = false;
  std::string flag = "numeric candidate - no exactness claim";
};

// Damped Gauss-Newton on the residual system from seeded random starts.
// Reports near-solutions (residual < 1e-10) with a rational
// reconstruction attempt; decides nothing.
std::vector<NumericCandidate> search_candidates(int n,
                                                const std::vector<int>& m,
                                                int trials,
                                                std::uint64_t seed);

}  // namespace lcf::exact
