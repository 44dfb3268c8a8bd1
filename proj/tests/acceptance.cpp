// Acceptance gate: one line per criterion, nonzero exit if any fails.
//
// The exact criteria (classifier, exclusions, witnesses) admit no
// tolerance; the geometric criteria pin the tolerances and runtimes
// stated in each line.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcflab/classifier.hpp"
#include "lcflab/cli.hpp"
#include "lcflab/metric_field.hpp"
#include "lcflab/polynomial.hpp"
#include "lcflab/tensor.hpp"

using namespace lcf;
using namespace lcf::exact;
using nlohmann::json;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
            << what << " (" << detail << ")\n";
  if (!ok) ++failures;
}

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  ss << std::ifstream(path, std::ios::binary).rdbuf();
  return ss.str();
}

// ---- 1: classification reproduction for n = 4..8 -----------------------

void criterion1() {
  bool ok = true;
  std::ostringstream detail;
  for (int n = 4; n <= 8; ++n) {
    Timer t;
    const ClassificationReport rep = classify(n);
    const double sec = t.seconds();

    // the exact admitted set: Einstein, form x line, opposite forms
    std::vector<std::vector<int>> expect = {{n}, {n - 1, 1}};
    for (int m = n - 2; m >= (n + 1) / 2; --m) expect.push_back({m, n - m});
    std::vector<std::vector<int>> got;
    for (const auto& fam : rep.admitted) got.push_back(fam.m);
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());

    bool families_ok = got == expect;
    for (const auto& fam : rep.admitted) {
      if (fam.m == std::vector<int>{n})
        families_ok = families_ok && fam.family == "einstein";
      else if (fam.m == std::vector<int>{n - 1, 1})
        families_ok = families_ok && fam.family == "form_times_line";
      else
        families_ok = families_ok && fam.family == "opposite_forms";
    }

    bool certified = true;
    for (const auto& cert : rep.rejected)
      certified = certified && !cert.admitted && cert.rule.has_value() &&
                  recheck_certificate(cert);

    const bool dim_ok =
        families_ok && rep.undecided.empty() && certified &&
        static_cast<int>(rep.admitted.size() + rep.rejected.size()) ==
            rep.enumerated_shapes &&
        sec < 1.0;
    ok = ok && dim_ok;
    detail << "n=" << n << (dim_ok ? " ok " : " FAIL ");
  }
  report(1, "classify 4..8 reproduces the exact admitted families", ok,
         detail.str());
}

// ---- 2: l = 3 exclusion for n = 4..30 ----------------------------------

void criterion2() {
  Timer t;
  bool ok = true;
  int shapes = 0;
  for (int n = 4; n <= 30; ++n)
    for (const auto& m : partitions_into(n, 3)) {
      const Certificate cert = exclude_l3(n, {m[0], m[1], m[2]});
      ok = ok && !cert.admitted && cert.rule == RejectRule::L3Quadratic &&
           recheck_certificate(cert);
      ++shapes;
    }
  const double sec = t.seconds();
  ok = ok && sec < 1.0;
  std::ostringstream d;
  d << shapes << " partitions, " << sec << " s";
  report(2, "three distinct eigenvalues excluded with P,Q > 0 certificates",
         ok, d.str());
}

// ---- 3: cubic exclusion for n = 4..200 ---------------------------------

void criterion3() {
  bool ok = true;
  for (int n = 4; n <= 200; ++n)
    ok = ok && sturm_real_root_count(simple_triple_cubic(n)) == 1;

  const RationalPoly p7 = simple_triple_cubic(7);
  ok = ok && p7.degree() == 3 && p7.c[0] == 1 && p7.c[1] == 2 &&
       p7.c[2] == 2 && p7.c[3] == 1;
  report(3, "simple-triple cubic has exactly one distinct real root, 4..200",
         ok, "n=7 poly x^3+2x^2+2x+1 confirmed");
}

// ---- 4: exact product witnesses ----------------------------------------

void criterion4() {
  bool ok = true;
  int count = 0;
  const Rational ks[] = {Rational(1), Rational(2), Rational(1, 3)};
  for (int n = 4; n <= 8; ++n)
    for (const Rational& K : ks) {
      std::vector<SpectrumCandidate> cands;
      cands.push_back(product_spectrum(ProductKind::FormTimesLine, n, 0, K));
      for (int m = 2; m <= n - 2; ++m)
        cands.push_back(product_spectrum(ProductKind::OppositeForms, n, m, K));
      for (const auto& cand : cands) {
        const auto res = residual_system(cand.u, cand.m, n);
        const bool zero = std::all_of(res.begin(), res.end(),
                                      [](const Rational& x) { return x == 0; });
        ok = ok && zero && check_identities(cand.u, cand.m, n).all_zero();
        ++count;
      }
    }
  std::ostringstream d;
  d << count << " exact witnesses";
  report(4, "product spectra satisfy the full constraint system exactly", ok,
         d.str());
}

// ---- 5: oracle equivalence of FD curvature and the synthesis -----------

void criterion5() {
  Timer t;
  bool ok = true;
  double worst_r = 0.0, worst_w = 0.0;
  const MetricField conformal[] = {
      MetricField::SpaceForm(4, 1.0),
      MetricField::SpaceForm(4, -1.0),
      MetricField::ConformalQuadratic(4, {1.0, 0, 0, 0}),
      MetricField::ConformalGaussian(4, 1.0),
  };
  for (const auto& field : conformal) {
    Rng rng(1234);
    for (int i = 0; i < 20; ++i) {
      const Vector p = rng.ball(4, 0.4);
      const Riemann4 R = riemann_at(field, p);
      const PointMetric g = field.point_metric_at(p);
      auto [ric, s] = ricci_contract(R, g);
      const Riemann4 synth = lcf_curvature_from_ricci(ric, s, g);
      worst_r = std::max(worst_r, (R - synth).max_abs());
      worst_w = std::max(worst_w, weyl_tensor(R, g).max_abs());
    }
  }
  ok = ok && worst_r < 1e-4 && worst_w < 1e-4;

  const MetricField s2xs2 = MetricField::Product(
      {MetricField::SpaceForm(2, 1.0), MetricField::SpaceForm(2, 1.0)});
  Rng rng(55);
  const Vector q = rng.ball(4, 0.3);
  const double weyl_prod =
      weyl_tensor(riemann_at(s2xs2, q), s2xs2.point_metric_at(q)).max_abs();
  ok = ok && weyl_prod > 0.1;

  const double sec = t.seconds();
  ok = ok && sec < 10.0;
  std::ostringstream d;
  d << "max |R - synth| = " << worst_r << ", max |W| = " << worst_w
    << ", S2xS2 |W| = " << weyl_prod << ", " << sec << " s";
  report(5, "FD curvature of conformal metrics equals its Weyl-free synthesis",
         ok, d.str());
}

// ---- 6: Codazzi condition ----------------------------------------------

void criterion6() {
  Timer t;
  bool ok = true;
  double worst = 0.0;
  const MetricField conformal[] = {
      MetricField::SpaceForm(4, 1.0),
      MetricField::SpaceForm(4, -1.0),
      MetricField::ConformalQuadratic(4, {1.0, 0, 0, 0}),
      MetricField::ConformalGaussian(4, 1.0),
  };
  for (const auto& field : conformal) {
    Rng rng(777);
    for (int i = 0; i < 5; ++i)
      worst = std::max(worst, codazzi_residual(field, rng.ball(4, 0.4)));
  }
  ok = ok && worst < 1e-4;

  Vector designated(4);
  designated << 0.2, 0.2, 0.0, 0.0;
  const double broken =
      codazzi_residual(MetricField::Perturbation(4, 0.1), designated);
  ok = ok && broken > 1e-3;

  const double sec = t.seconds();
  ok = ok && sec < 10.0;
  std::ostringstream d;
  d << "conformal max = " << worst << ", perturbation = " << broken << ", "
    << sec << " s";
  report(6, "Codazzi residual < 1e-4 conformal, > 1e-3 at perturbation point",
         ok, d.str());
}

// ---- 7: C-space scans --------------------------------------------------

void criterion7() {
  Timer t;
  bool ok = true;
  ScanConfig cfg;
  cfg.count = 20;
  cfg.steps = 100;
  cfg.h = 0.01;
  cfg.seed = 9001;

  const MetricField symmetric[] = {
      MetricField::SpaceForm(4, 1.0),
      MetricField::SpaceForm(4, -1.0),
      MetricField::Product(
          {MetricField::SpaceForm(2, 1.0), MetricField::SpaceForm(2, -1.0)}),
  };
  double worst_const = 0.0;
  for (const auto& field : symmetric) {
    const ScanReport rep = cspace_scan(field, cfg);
    worst_const = std::max(worst_const, rep.deviation);
    ok = ok && rep.constant_verdict;
  }
  ok = ok && worst_const < 1e-5;

  const MetricField conf = MetricField::ConformalQuadratic(4, {1.0, 0, 0, 0});
  const ScanReport moving = cspace_scan(conf, cfg);
  ok = ok && moving.deviation > 1e-2 && !moving.constant_verdict;

  ScanConfig rcfg;
  rcfg.count = 20;
  rcfg.seed = 9002;
  const ScanReport ricci = ricci_constancy_scan(conf, rcfg);
  ok = ok && !ricci.constant_verdict;

  const double sec = t.seconds();
  ok = ok && sec < 30.0;
  std::ostringstream d;
  d << "symmetric dev = " << worst_const << ", conformal dev = "
    << moving.deviation << ", ricci verdict non-constant, " << sec << " s";
  report(7, "Jacobi eigenvalues constant on symmetric spaces, moving on the "
            "conformal metric", ok, d.str());
}

// ---- 8: tensor algebra suite -------------------------------------------

void criterion8() {
  Timer t;
  bool ok = true;
  double worst = 0.0;
  for (int n = 4; n <= 8; ++n) {
    Rng rng(1000 + n);
    for (int trial = 0; trial < 100; ++trial) {
      Matrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.uniform01() - 1.0;
      const RicciTensor ric{0.5 * (A + A.transpose().eval())};
      const PointMetric g = identity_metric(n);
      const double s = ric.ric.trace();
      const Riemann4 R = lcf_curvature_from_ricci(ric, s, g);
      const double scale = std::max(1.0, R.max_abs());

      // roundtrip
      auto [ric2, s2] = ricci_contract(R, g);
      worst = std::max(worst,
                       (ric2.ric - ric.ric).cwiseAbs().maxCoeff() / scale);
      worst = std::max(worst, std::abs(s2 - s) / scale);
      // Weyl split
      worst = std::max(worst, weyl_tensor(R, g).max_abs() / scale);
      // Jacobi trace
      const Vector x = rng.unit_sphere_g(g.g);
      const SymOperator jac = jacobi_operator(R, x, g);
      worst = std::max(worst,
                       std::abs(jac.mat.trace() - x.dot(ric.ric * x)) / scale);
      // algebraic symmetries
      worst = std::max(worst, R.max_symmetry_violation());
    }
  }
  ok = worst < 1e-9;
  const double sec = t.seconds();
  ok = ok && sec < 5.0;
  std::ostringstream d;
  d << "worst relative error = " << worst << ", " << sec << " s";
  report(8, "tensor algebra identities < 1e-9 on 100 seeded inputs per dim",
         ok, d.str());
}

// ---- 9: determinism of CLI reports -------------------------------------

void criterion9() {
  const std::string cli = LCFLAB_CLI_PATH;
  const std::string data = LCFLAB_DATA_DIR;
  bool ok = true;
  std::ostringstream d;

  struct Cmd {
    std::string label;
    std::string args;
  };
  const Cmd cmds[] = {
      {"classify", "classify --dim 6"},
      {"calibrate", "calibrate --seed 5"},
      {"cspace-scan",
       "cspace-scan --spec " + data + "/s2xh2.json --seed 42 --geodesics 3 "
       "--steps 20"},
      {"ricci-scan",
       "ricci-scan --spec " + data + "/conformal_gaussian.json --seed 7 "
       "--points 5"},
      {"check-metric",
       "check-metric --spec " + data + "/space_form4.json --seed 3 "
       "--points 5"},
  };
  for (const auto& cmd : cmds) {
    const std::string a = "/tmp/lcflab_acc_a.json";
    const std::string b = "/tmp/lcflab_acc_b.json";
    const int rc1 = std::system(
        (cli + " " + cmd.args + " --out " + a + " > /dev/null 2>&1").c_str());
    const int rc2 = std::system(
        (cli + " " + cmd.args + " --out " + b + " > /dev/null 2>&1").c_str());
    const bool same = rc1 == 0 && rc2 == 0 && slurp(a) == slurp(b) &&
                      !slurp(a).empty();
    ok = ok && same;
    d << cmd.label << (same ? " ok " : " FAIL ");
    std::remove(a.c_str());
    std::remove(b.c_str());
  }
  report(9, "repeated CLI runs with identical seeds are byte-identical", ok,
         d.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures == 0)
    std::cout << "acceptance: all 9 criteria passed\n";
  else
    std::cout << "acceptance: " << failures << " criteria FAILED\n";
  return failures == 0 ? 0 : 1;
}
