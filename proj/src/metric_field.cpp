#include "lcflab/metric_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace lcf {

using nlohmann::json;

// ---- catalog -----------------------------------------------------------

MetricField MetricField::Flat(int n) {
  MetricField f;
  f.kind_ = MetricKind::Flat;
  f.dim_ = n;
  return f;
}

MetricField MetricField::SpaceForm(int n, double K) {
  MetricField f;
  f.kind_ = MetricKind::SpaceForm;
  f.dim_ = n;
  f.K_ = K;
  return f;
}

MetricField MetricField::Product(std::vector<MetricField> factors) {
  MetricField f;
  f.kind_ = MetricKind::Product;
  f.factors_ = std::move(factors);
  f.dim_ = 0;
  for (const auto& fac : f.factors_) f.dim_ += fac.dim();
  if (f.factors_.empty())
    throw std::invalid_argument("MetricField: empty product");
  return f;
}

MetricField MetricField::ConformalQuadratic(int n, std::vector<double> coeffs) {
  MetricField f;
  f.kind_ = MetricKind::Conformal;
  f.dim_ = n;
  f.profile_ = ConformalProfile::Quadratic;
  coeffs.resize(n, 0.0);
  f.coeffs_ = std::move(coeffs);
  return f;
}

MetricField MetricField::ConformalGaussian(int n, double amplitude) {
  MetricField f;
  f.kind_ = MetricKind::Conformal;
  f.dim_ = n;
  f.profile_ = ConformalProfile::Gaussian;
  f.amplitude_ = amplitude;
  return f;
}

MetricField MetricField::Perturbation(int n, double epsilon) {
  if (n < 2)
    throw std::invalid_argument("MetricField: perturbation needs dim >= 2");
  MetricField f;
  f.kind_ = MetricKind::Perturbation;
  f.dim_ = n;
  f.epsilon_ = epsilon;
  return f;
}

double MetricField::guard_radius() const {
  switch (kind_) {
    case MetricKind::SpaceForm:
      if (K_ < 0.0) return 2.0 / std::sqrt(-K_);
      return 10.0;
    case MetricKind::Product: {
      double r = 10.0;
      for (const auto& fac : factors_) r = std::min(r, fac.guard_radius());
      return r;
    }
    default:
      return 10.0;
  }
}

bool MetricField::inside_guard(const Vector& p, double margin) const {
  if (p.size() != dim_) return false;
  if (kind_ == MetricKind::Product) {
    int off = 0;
    for (const auto& fac : factors_) {
      if (!fac.inside_guard(p.segment(off, fac.dim()), margin)) return false;
      off += fac.dim();
    }
    return true;
  }
  return p.norm() + margin < guard_radius();
}

double MetricField::conformal_f(const Vector& p) const {
  if (profile_ == ConformalProfile::Quadratic) {
    double f = 0.0;
    for (int i = 0; i < dim_; ++i) f += coeffs_[i] * p(i) * p(i);
    return f;
  }
  return amplitude_ * std::exp(-p.squaredNorm());
}

Matrix MetricField::metric_at(const Vector& p) const {
  if (p.size() != dim_)
    throw std::invalid_argument("metric_at: dimension mismatch");
  switch (kind_) {
    case MetricKind::Flat:
      return Matrix::Identity(dim_, dim_);
    case MetricKind::SpaceForm: {
      const double c = 1.0 + 0.25 * K_ * p.squaredNorm();
      if (c <= 0.0)
        throw std::domain_error("metric_at: point outside space-form chart");
      return std::pow(c, -2.0) * Matrix::Identity(dim_, dim_);
    }
    case MetricKind::Product: {
      Matrix g = Matrix::Zero(dim_, dim_);
      int off = 0;
      for (const auto& fac : factors_) {
        g.block(off, off, fac.dim(), fac.dim()) =
            fac.metric_at(p.segment(off, fac.dim()));
        off += fac.dim();
      }
      return g;
    }
    case MetricKind::Conformal:
      return std::exp(2.0 * conformal_f(p)) * Matrix::Identity(dim_, dim_);
    case MetricKind::Perturbation: {
      Matrix g = Matrix::Identity(dim_, dim_);
      g(1, 1) += epsilon_ * p(0) * p(0);
      return g;
    }
  }
  throw std::logic_error("metric_at: unreachable");
}

PointMetric MetricField::point_metric_at(const Vector& p) const {
  return PointMetric{metric_at(p)};
}

std::string MetricField::name() const {
  std::ostringstream os;
  switch (kind_) {
    case MetricKind::Flat:
      os << "flat" << dim_;
      break;
    case MetricKind::SpaceForm:
      os << "space_form(K=" << K_ << ",n=" << dim_ << ")";
      break;
    case MetricKind::Product: {
      os << "product(";
      for (size_t i = 0; i < factors_.size(); ++i)
        os << (i ? " x " : "") << factors_[i].name();
      os << ")";
      break;
    }
    case MetricKind::Conformal:
      if (profile_ == ConformalProfile::Quadratic) {
        os << "conformal_quadratic" << dim_;
      } else {
        os << "conformal_gaussian(a=" << amplitude_ << ",n=" << dim_ << ")";
      }
      break;
    case MetricKind::Perturbation:
      os << "perturbation(eps=" << epsilon_ << ",n=" << dim_ << ")";
      break;
  }
  return os.str();
}

json MetricField::to_json() const {
  json j;
  j["dim"] = dim_;
  switch (kind_) {
    case MetricKind::Flat:
      j["kind"] = "flat";
      j["params"] = json::object();
      break;
    case MetricKind::SpaceForm:
      j["kind"] = "space_form";
      j["params"] = {{"K", K_}};
      break;
    case MetricKind::Product: {
      j["kind"] = "product";
      json facs = json::array();
      for (const auto& fac : factors_) facs.push_back(fac.to_json());
      j["params"] = {{"factors", facs}};
      break;
    }
    case MetricKind::Conformal:
      j["kind"] = "conformal";
      if (profile_ == ConformalProfile::Quadratic) {
        j["params"] = {{"profile", "quadratic"}, {"coefficients", coeffs_}};
      } else {
        j["params"] = {{"profile", "gaussian"}, {"amplitude", amplitude_}};
      }
      break;
    case MetricKind::Perturbation:
      j["kind"] = "perturbation";
      j["params"] = {{"epsilon", epsilon_}};
      break;
  }
  return j;
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::invalid_argument(std::string("metric spec: unknown key \"") +
                                  it.key() + "\" in " + where);
  }
}

}  // namespace

MetricField MetricField::from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "dim", "params"}, "metric spec");
  if (!j.contains("kind"))
    throw std::invalid_argument("metric spec: missing key \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  const json params = j.value("params", json::object());
  if (kind == "product") {
    reject_unknown_keys(params, {"factors"}, "product params");
    std::vector<MetricField> facs;
    for (const auto& fj : params.at("factors")) facs.push_back(from_json(fj));
    auto f = Product(std::move(facs));
    if (j.contains("dim") && j.at("dim").get<int>() != f.dim())
      throw std::invalid_argument("metric spec: product dims do not sum to \"dim\"");
    return f;
  }
  if (!j.contains("dim"))
    throw std::invalid_argument("metric spec: missing key \"dim\"");
  const int n = j.at("dim").get<int>();
  if (n < 1) throw std::invalid_argument("metric spec: dim must be >= 1");
  if (kind == "flat") {
    reject_unknown_keys(params, {}, "flat params");
    return Flat(n);
  }
  if (kind == "space_form") {
    reject_unknown_keys(params, {"K"}, "space_form params");
    return SpaceForm(n, params.at("K").get<double>());
  }
  if (kind == "conformal") {
    reject_unknown_keys(params, {"profile", "coefficients", "amplitude"},
                        "conformal params");
    const std::string prof = params.at("profile").get<std::string>();
    if (prof == "quadratic")
      return ConformalQuadratic(n, params.at("coefficients").get<std::vector<double>>());
    if (prof == "gaussian")
      return ConformalGaussian(n, params.at("amplitude").get<double>());
    throw std::invalid_argument("metric spec: unknown conformal profile \"" + prof + "\"");
  }
  if (kind == "perturbation") {
    reject_unknown_keys(params, {"epsilon"}, "perturbation params");
    return Perturbation(n, params.at("epsilon").get<double>());
  }
  throw std::invalid_argument("metric spec: unknown kind \"" + kind + "\"");
}

// ---- finite differences ------------------------------------------------

namespace {

// 4th-order central difference along axis i.
template <typename F>
auto d1(F&& f, const Vector& p, int i, double h) {
  Vector pa = p, pb = p, pc = p, pd = p;
  pa(i) -= 2 * h;
  pb(i) -= h;
  pc(i) += h;
  pd(i) += 2 * h;
  return ((f(pa) - 8.0 * f(pb) + 8.0 * f(pc) - f(pd)) * (1.0 / (12.0 * h))).eval();
}

double step(double base, const Vector& p) { return base * (1.0 + p.norm()); }

void check_guard(const MetricField& field, const Vector& p, double margin,
                 const char* op) {
  if (!field.inside_guard(p, margin))
    throw std::domain_error(std::string(op) + ": point outside domain guard");
}

std::pair<Matrix, double> ricci_and_scalar(const MetricField& field,
                                           const Vector& p, const FdConfig& fd) {
  const Riemann4 R = riemann_at(field, p, fd);
  const PointMetric g = field.point_metric_at(p);
  auto [ric, s] = ricci_contract(R, g);
  return {ric.ric, s};
}

}  // namespace

Tensor3 christoffel(const MetricField& field, const Vector& p,
                    const FdConfig& fd) {
  const int n = field.dim();
  const double h = step(fd.h_metric, p);
  check_guard(field, p, 2 * h, "christoffel");
  const Matrix g = field.metric_at(p);
  const Matrix ginv = g.inverse();
  std::vector<Matrix> dg(n);
  auto ev = [&](const Vector& q) { return field.metric_at(q); };
  for (int i = 0; i < n; ++i) dg[i] = d1(ev, p, i, h);

  Tensor3 gamma(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m)
          acc += ginv(k, m) * (dg[i](j, m) + dg[j](i, m) - dg[m](i, j));
        gamma[k](i, j) = 0.5 * acc;
        gamma[k](j, i) = gamma[k](i, j);
      }
  return gamma;
}

Riemann4 riemann_at(const MetricField& field, const Vector& p,
                    const FdConfig& fd) {
  const int n = field.dim();
  const double h = step(fd.h_gamma, p);
  check_guard(field, p, 2 * h + 2 * step(fd.h_metric, p), "riemann_at");
  const Tensor3 gamma = christoffel(field, p, fd);

  // dgamma[i][l](j,k) = d_i Gamma^l_jk
  std::vector<Tensor3> dgamma(n);
  for (int i = 0; i < n; ++i) {
    auto ev = [&](const Vector& q) {
      const Tensor3 G = christoffel(field, q, fd);
      Matrix flat(n, n * n);
      for (int l = 0; l < n; ++l) flat.block(0, l * n, n, n) = G[l];
      return flat;
    };
    const Matrix flat = d1(ev, p, i, h);
    dgamma[i].resize(n);
    for (int l = 0; l < n; ++l) dgamma[i][l] = flat.block(0, l * n, n, n);
  }

  const Matrix g = field.metric_at(p);
  Riemann4 R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
          // R^m_ijk before lowering
          double up = dgamma[i][m](j, k) - dgamma[j][m](i, k);
          for (int a = 0; a < n; ++a)
            up += gamma[m](i, a) * gamma[a](j, k) -
                  gamma[m](j, a) * gamma[a](i, k);
          for (int l = 0; l < n; ++l) R(i, j, k, l) += g(m, l) * up;
        }
      }
  return R;
}

Tensor3 nabla_ricci(const MetricField& field, const Vector& p,
                    const FdConfig& fd) {
  const int n = field.dim();
  const double h = step(fd.h_ricci, p);
  check_guard(field, p, 2 * h + 0.01, "nabla_ricci");
  const Tensor3 gamma = christoffel(field, p, fd);
  const Matrix ric = ricci_and_scalar(field, p, fd).first;

  auto ev = [&](const Vector& q) { return ricci_and_scalar(field, q, fd).first; };
  Tensor3 nr(n, Matrix::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    Matrix d = d1(ev, p, i, h);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = d(j, k);
        for (int m = 0; m < n; ++m)
          acc -= gamma[m](i, j) * ric(m, k) + gamma[m](i, k) * ric(j, m);
        nr[i](j, k) = acc;
      }
    nr[i] = 0.5 * (nr[i] + nr[i].transpose().eval());
  }
  return nr;
}

double codazzi_residual(const MetricField& field, const Vector& p,
                        const FdConfig& fd) {
  const int n = field.dim();
  const double h = step(fd.h_ricci, p);
  const Tensor3 nr = nabla_ricci(field, p, fd);
  const Matrix g = field.metric_at(p);

  auto ev = [&](const Vector& q) {
    return Eigen::Matrix<double, 1, 1>{ricci_and_scalar(field, q, fd).second};
  };
  Vector ds(n);
  for (int i = 0; i < n; ++i) ds(i) = d1(ev, p, i, h)(0);

  const double c = 1.0 / (2.0 * (n - 1));
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = nr[i](j, k) - nr[j](i, k) -
                         c * (ds(i) * g(j, k) - ds(j) * g(i, k));
        res = std::max(res, std::abs(v));
      }
  return res;
}

// ---- geodesics ---------------------------------------------------------

GeodesicPath integrate_geodesic(const MetricField& field,
                                const GeodesicState& state0, double h,
                                int steps, const FdConfig& fd) {
  const int n = field.dim();
  auto accel = [&](const Vector& x, const Vector& v) {
    const Tensor3 gamma = christoffel(field, x, fd);
    Vector a = Vector::Zero(n);
    for (int k = 0; k < n; ++k) a(k) = -v.dot(gamma[k] * v);
    return a;
  };
  auto speed = [&](const GeodesicState& st) {
    return std::sqrt(st.velocity.dot(field.metric_at(st.position) * st.velocity));
  };

  GeodesicPath path;
  path.states.push_back(state0);
  const double s0 = speed(state0);
  GeodesicState st = state0;
  for (int i = 0; i < steps; ++i) {
    const Vector k1x = st.velocity, k1v = accel(st.position, st.velocity);
    const Vector k2x = st.velocity + 0.5 * h * k1v,
                 k2v = accel(st.position + 0.5 * h * k1x, st.velocity + 0.5 * h * k1v);
    const Vector k3x = st.velocity + 0.5 * h * k2v,
                 k3v = accel(st.position + 0.5 * h * k2x, st.velocity + 0.5 * h * k2v);
    const Vector k4x = st.velocity + h * k3v,
                 k4v = accel(st.position + h * k3x, st.velocity + h * k3v);
    GeodesicState next;
    next.position = st.position + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    next.velocity = st.velocity + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    next.t = st.t + h;
    if (!field.inside_guard(next.position, 0.05)) {
      path.exited_guard = true;
      break;
    }
    path.speed_drift =
        std::max(path.speed_drift, std::abs(speed(next) - s0) / s0);
    if (path.speed_drift > 1e-3)
      throw std::runtime_error("integrate_geodesic: step too large (speed drift > 1e-3)");
    path.states.push_back(next);
    st = next;
  }
  return path;
}

// ---- RNG ---------------------------------------------------------------

std::uint64_t Rng::next() {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform01() { return double(next() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
  double u1 = uniform01(), u2 = uniform01();
  while (u1 <= 1e-300) u1 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

Vector Rng::ball(int n, double radius) {
  for (;;) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = 2.0 * uniform01() - 1.0;
    if (v.squaredNorm() <= 1.0) return radius * v;
  }
}

Vector Rng::unit_sphere_g(const Matrix& g) {
  const int n = static_cast<int>(g.rows());
  Vector w(n);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < n; ++i) w(i) = gaussian();
    norm2 = w.dot(g * w);
  } while (norm2 <= 1e-12);
  return w / std::sqrt(norm2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  Rng r(seed ^ (0x517cc1b727220a95ULL * (index + 1)));
  return r.next();
}

// ---- scans -------------------------------------------------------------

namespace {

int thread_budget() {
  const char* env = std::getenv("LCFLAB_THREADS");
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (env) {
    const int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  return cap;
}

// Runs job(i) for i in [0,count) across at most thread_budget() threads.
template <typename Job>
void parallel_for(int count, Job&& job) {
  const int nt = std::min(thread_budget(), count);
  if (nt <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < nt; ++w)
    workers.emplace_back([&, w] {
      for (int i = w; i < count; i += nt) job(i);
    });
  for (auto& t : workers) t.join();
}

std::vector<double> sorted_eigs(const Spectrum& sp) {
  std::vector<double> v(sp.eigenvalues.data(),
                        sp.eigenvalues.data() + sp.eigenvalues.size());
  return v;
}

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

ScanReport cspace_scan(const MetricField& field, const ScanConfig& cfg,
                       const FdConfig& fd) {
  ScanReport rep;
  rep.metric_name = field.name();
  rep.seed = cfg.seed;
  rep.h = cfg.h;
  rep.steps = cfg.steps;
  rep.tol = cfg.tol;

  struct Slot {
    std::vector<ScanSample> samples;
    double deviation = 0.0;
    double drift = 0.0;
  };
  std::vector<Slot> slots(cfg.count);

  parallel_for(cfg.count, [&](int gi) {
    Rng rng(mix_seed(cfg.seed, gi));
    GeodesicState st0;
    st0.position = rng.ball(field.dim(), cfg.ball_radius);
    st0.velocity = rng.unit_sphere_g(field.metric_at(st0.position));
    const GeodesicPath path = integrate_geodesic(field, st0, cfg.h, cfg.steps, fd);

    Slot& slot = slots[gi];
    slot.drift = path.speed_drift;
    std::vector<double> ref;
    for (const GeodesicState& st : path.states) {
      const Riemann4 R = riemann_at(field, st.position, fd);
      const PointMetric g = field.point_metric_at(st.position);
      const Spectrum sp = sym_eigen(jacobi_operator(R, st.velocity, g), g);
      std::vector<double> eigs = sorted_eigs(sp);
      if (ref.empty())
        ref = eigs;
      else
        slot.deviation = std::max(slot.deviation, inf_dist(eigs, ref));
      slot.samples.push_back(ScanSample{st.t, gi, std::move(eigs)});
    }
  });

  for (const auto& slot : slots) {
    rep.deviation = std::max(rep.deviation, slot.deviation);
    rep.max_speed_drift = std::max(rep.max_speed_drift, slot.drift);
    rep.samples.insert(rep.samples.end(), slot.samples.begin(),
                       slot.samples.end());
  }
  rep.constant_verdict = rep.deviation < cfg.tol;
  return rep;
}

ScanReport ricci_constancy_scan(const MetricField& field, const ScanConfig& cfg,
                                const FdConfig& fd) {
  ScanReport rep;
  rep.metric_name = field.name();
  rep.seed = cfg.seed;
  rep.tol = cfg.tol;

  std::vector<ScanSample> samples(cfg.count);
  parallel_for(cfg.count, [&](int pi) {
    Rng rng(mix_seed(cfg.seed, pi));
    const Vector p = rng.ball(field.dim(), cfg.ball_radius);
    const Riemann4 R = riemann_at(field, p, fd);
    const PointMetric g = field.point_metric_at(p);
    auto [ric, s] = ricci_contract(R, g);
    (void)s;
    const Spectrum sp = sym_eigen(ricci_operator(ric, g), g);
    samples[pi] = ScanSample{double(pi), pi, sorted_eigs(sp)};
  });

  for (size_t a = 0; a < samples.size(); ++a)
    for (size_t b = a + 1; b < samples.size(); ++b)
      rep.deviation = std::max(
          rep.deviation, inf_dist(samples[a].eigenvalues, samples[b].eigenvalues));
  rep.samples = std::move(samples);
  rep.constant_verdict = rep.deviation < cfg.tol;
  return rep;
}

json scan_report_to_json(const ScanReport& rep, const MetricField& field) {
  json j;
  j["metric"] = field.to_json();
  j["metric_name"] = rep.metric_name;
  j["seed"] = rep.seed;
  j["h"] = rep.h;
  j["steps"] = rep.steps;
  j["tol"] = rep.tol;
  j["deviation"] = rep.deviation;
  j["verdict"] = rep.constant_verdict ? "constant" : "non-constant";
  j["max_speed_drift"] = rep.max_speed_drift;
  json samples = json::array();
  for (const auto& s : rep.samples)
    samples.push_back({{"series", s.series}, {"t", s.t}, {"eigenvalues", s.eigenvalues}});
  j["samples"] = std::move(samples);
  return j;
}

// ---- frame fields ------------------------------------------------------

Matrix FrameField::frame_at(const Vector& p) const {
  const Matrix g = field->metric_at(p);
  const int n = static_cast<int>(g.rows());
  Matrix E = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) E(i, i) = 1.0 / std::sqrt(g(i, i));
  return E;
}

FrameConnectionReport frame_connection_check(const MetricField& field,
                                             const FrameField& frame,
                                             const Vector& p, double cluster_tol,
                                             const FdConfig& fd) {
  const int n = field.dim();
  const Matrix g = field.metric_at(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(g(i, j)) > 1e-12)
        throw std::invalid_argument(
            "frame_connection_check: catalog frame requires a diagonal chart");

  const Tensor3 gamma = christoffel(field, p, fd);
  const double h = step(fd.h_gamma, p);

  // f_j = 1/sqrt(g_jj) and its coordinate derivatives
  Vector f(n);
  for (int j = 0; j < n; ++j) f(j) = 1.0 / std::sqrt(g(j, j));
  Matrix df(n, n);  // df(i,j) = d_i f_j
  auto ev = [&](const Vector& q) {
    const Matrix gq = field.metric_at(q);
    Vector fq(n);
    for (int j = 0; j < n; ++j) fq(j) = 1.0 / std::sqrt(gq(j, j));
    return fq;
  };
  for (int i = 0; i < n; ++i) df.row(i) = d1(ev, p, i, h).transpose();

  // w(i,j,k) = g(nabla_{E_i} E_j, E_k) for the coordinate-aligned frame
  auto omega = [&](int i, int j, int k) {
    const double d = (j == k) ? df(i, j) : 0.0;
    return std::sqrt(g(k, k)) * f(i) * (d + f(j) * gamma[k](i, j));
  };

  // frame Ricci values, clustered so within-cluster differences are exact 0
  const Riemann4 R = riemann_at(field, p, fd);
  auto [ric, s] = ricci_contract(R, PointMetric{g});
  (void)s;
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = f(i) * f(i) * ric.ric(i, i);

  const double ctol = std::max(cluster_tol, 1e-5);
  std::vector<double> sorted_r = r;
  std::sort(sorted_r.begin(), sorted_r.end());
  for (size_t a = 0; a + 1 < sorted_r.size(); ++a) {
    const double gap = sorted_r[a + 1] - sorted_r[a];
    if (gap > ctol && gap < 10.0 * ctol)
      throw std::runtime_error(
          "frame_connection_check: ambiguous eigenvalue cluster assignment");
  }
  std::vector<double> rc = r;  // cluster representatives
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(r[i] - r[j]) <= ctol) rc[i] = std::min(rc[i], r[j]);

  FrameConnectionReport rep;
  rep.ricci_values = rc;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        if (l == i || l == k) continue;
        if (i != k) {
          const double v = (rc[k] - rc[l]) * omega(i, k, l) -
                           (rc[i] - rc[l]) * omega(k, i, l);
          rep.max_residual_offdiag = std::max(rep.max_residual_offdiag, std::abs(v));
        }
      }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (k != l)
        rep.max_residual_diag = std::max(
            rep.max_residual_diag, std::abs((rc[k] - rc[l]) * omega(k, k, l)));
  return rep;
}

}  // namespace lcf
