#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lcflab/tensor.hpp"

// Coordinate-chart metric fields with finite-difference curvature and the
// numerical scans for the differential conditions (Codazzi, nabla Ric,
// Jacobi-eigenvalue constancy along geodesics, Ricci constancy).
//
// All catalog charts are globally conformally flat or block diagonal:
//   flat          g = identity
//   space_form(K) g = (1 + (K/4)|x|^2)^(-2) identity, guard |x|^2 < 4/|K| for K<0
//   product       block diagonal of factors on coordinate slices
//   conformal(f)  g = e^{2f} identity, f quadratic or gaussian
//   perturbation  g = identity + eps * x_1^2 dx_2^2

namespace lcf {

enum class MetricKind { Flat, SpaceForm, Product, Conformal, Perturbation };
enum class ConformalProfile { Quadratic, Gaussian };

class MetricField {
 public:
  static MetricField Flat(int n);
  static MetricField SpaceForm(int n, double K);
  static MetricField Product(std::vector<MetricField> factors);
  static MetricField ConformalQuadratic(int n, std::vector<double> coeffs);
  static MetricField ConformalGaussian(int n, double amplitude);
  static MetricField Perturbation(int n, double epsilon);

  int dim() const { return dim_; }
  MetricKind kind() const { return kind_; }
  double curvature() const { return K_; }
  double epsilon() const { return epsilon_; }
  const std::vector<MetricField>& factors() const { return factors_; }

  // Largest coordinate-ball radius on which the chart is valid.
  double guard_radius() const;
  bool inside_guard(const Vector& p, double margin = 0.0) const;

  Matrix metric_at(const Vector& p) const;
  PointMetric point_metric_at(const Vector& p) const;

  std::string name() const;
  nlohmann::json to_json() const;
  static MetricField from_json(const nlohmann::json& j);

 private:
  MetricField() = default;
  double conformal_f(const Vector& p) const;

  MetricKind kind_ = MetricKind::Flat;
  int dim_ = 0;
  double K_ = 0.0;                   // space_form
  std::vector<MetricField> factors_; // product
  ConformalProfile profile_ = ConformalProfile::Quadratic;
  std::vector<double> coeffs_;       // conformal quadratic
  double amplitude_ = 0.0;           // conformal gaussian
  double epsilon_ = 0.0;             // perturbation
};

// ---- finite-difference curvature --------------------------------------

// Per-level central-difference steps (5-point 4th-order stencils). The
// outer levels use larger steps so that the noise of the inner level does
// not swamp the derivative.
struct FdConfig {
  double h_metric = 1e-5;  // d(g) inside christoffel
  double h_gamma = 1e-3;   // d(Gamma) inside riemann_at
  double h_ricci = 5e-3;   // d(Ric), d(s) inside nabla_ricci / codazzi
};

using Tensor3 = std::vector<Matrix>;  // [k](i,j)

// Gamma^k_ij, symmetric in (i,j).
Tensor3 christoffel(const MetricField& field, const Vector& p,
                    const FdConfig& fd = {});

Riemann4 riemann_at(const MetricField& field, const Vector& p,
                    const FdConfig& fd = {});

// (nabla_i Ric)_jk, indexed [i](j,k).
Tensor3 nabla_ricci(const MetricField& field, const Vector& p,
                    const FdConfig& fd = {});

// Max over coordinate triples of the Codazzi defect
//   (nabla_i Ric)_jk - (nabla_j Ric)_ik - (d_i s g_jk - d_j s g_ik)/(2(n-1))
double codazzi_residual(const MetricField& field, const Vector& p,
                        const FdConfig& fd = {});

// ---- geodesics and scans ----------------------------------------------

struct GeodesicState {
  Vector position;
  Vector velocity;
  double t = 0.0;
};

struct GeodesicPath {
  std::vector<GeodesicState> states;
  double speed_drift = 0.0;  // relative drift of |v|_g
  bool exited_guard = false;
};

// Classical 4th-order one-step integration of the geodesic equation.
// Exiting the guard truncates the path; drift above 1e-3 is an error.
GeodesicPath integrate_geodesic(const MetricField& field,
                                const GeodesicState& state0, double h,
                                int steps, const FdConfig& fd = {});

struct ScanSample {
  double t = 0.0;                  // arc parameter or point index
  int series = 0;                  // geodesic / point index
  std::vector<double> eigenvalues; // sorted ascending
};

struct ScanReport {
  std::string metric_name;
  std::uint64_t seed = 0;
  double h = 0.0;
  int steps = 0;
  double tol = 0.0;
  std::vector<ScanSample> samples;
  double deviation = 0.0;
  bool constant_verdict = false;
  double max_speed_drift = 0.0;
};

struct ScanConfig {
  int count = 20;       // geodesics or sample points
  int steps = 100;
  double h = 0.01;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  double ball_radius = 0.3;  // start-point / sample ball
};

// Jacobi-operator eigenvalues along seeded random unit-speed geodesics;
// deviation is the max infinity-distance of sorted eigenvalues from t=0.
// Parallel over geodesics (LCFLAB_THREADS caps), deterministic merge.
ScanReport cspace_scan(const MetricField& field, const ScanConfig& cfg,
                       const FdConfig& fd = {});

// Sorted Ricci-operator eigenvalues at seeded sample points; deviation is
// the max pairwise infinity-distance.
ScanReport ricci_constancy_scan(const MetricField& field, const ScanConfig& cfg,
                                const FdConfig& fd = {});

nlohmann::json scan_report_to_json(const ScanReport& report,
                                   const MetricField& field);

// ---- frame fields ------------------------------------------------------

// Coordinate-aligned orthonormal frame E_i = d_i / sqrt(g_ii); valid for
// the diagonal catalog charts.
struct FrameField {
  const MetricField* field = nullptr;
  // E as columns at p.
  Matrix frame_at(const Vector& p) const;
};

struct FrameConnectionReport {
  double max_residual_offdiag = 0.0;  // (r_k-r_l) w_ik^l - (r_i-r_l) w_ki^l
  double max_residual_diag = 0.0;     // (r_k-r_l) w_kk^l
  std::vector<double> ricci_values;   // r_i in frame order
};

// Residuals of the eigenframe connection identities for fields whose
// coordinate frame diagonalizes the Ricci operator. Throws when a cluster
// assignment is ambiguous at cluster_tol.
FrameConnectionReport frame_connection_check(const MetricField& field,
                                             const FrameField& frame,
                                             const Vector& p,
                                             double cluster_tol = 1e-7,
                                             const FdConfig& fd = {});

// ---- deterministic RNG -------------------------------------------------

// splitmix64; hand-rolled so scan output is identical across platforms.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double uniform01();          // [0,1)
  double gaussian();           // Box-Muller
  Vector ball(int n, double radius);       // uniform in euclidean ball
  Vector unit_sphere_g(const Matrix& g);   // uniform on unit g-sphere
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace lcf
