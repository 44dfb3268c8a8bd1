#pragma once

#include <Eigen/Dense>
#include <vector>

// Pointwise multilinear algebra on a single tangent space: curvature
// synthesis from Ricci data, contractions, Weyl tensor, Jacobi operators,
// and a deterministic symmetric eigensolver.
//
// Conventions fixed for the whole library:
//   R(x,y,z,u) = g(R(x,y)z, u),  R(X,Y) = [nabla_X,nabla_Y] - nabla_[X,Y]
//   Ric(y,z)   = sum_a R(e_a,y,z,e_a)  over any g-orthonormal basis
//   sectional K(x,y) = R(x,y,y,x) / (g(x,x)g(y,y) - g(x,y)^2)
// Under this pairing the unit sphere has sectional curvature +1 and the
// conformally flat curvature form contracts back to Ric.

namespace lcf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct PointMetric {
  Matrix g;
  int dim() const { return static_cast<int>(g.rows()); }
};

PointMetric identity_metric(int n);

// Positive definiteness via leading principal minors.
bool is_positive_definite(const Matrix& g, double tol = 0.0);

struct RicciTensor {
  Matrix ric;
  int dim() const { return static_cast<int>(ric.rows()); }
};

// Type-(0,4) curvature tensor, components R(i,j,k,l), 0-based indices.
class Riemann4 {
 public:
  explicit Riemann4(int n) : n_(n), c_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return c_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return c_[idx(i, j, k, l)]; }

  // Max violation of the algebraic identities: antisymmetry in the first
  // and last pairs, pair symmetry, first Bianchi. Relative to max |R|.
  double max_symmetry_violation() const;
  double max_abs() const;
  double frobenius_norm() const;

  Riemann4 operator-(const Riemann4& o) const;
  Riemann4 operator+(const Riemann4& o) const;

 private:
  size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_;
  std::vector<double> c_;
};

// Endomorphism of the tangent space, self-adjoint with respect to g.
struct SymOperator {
  Matrix mat;
  int dim() const { return static_cast<int>(mat.rows()); }
};

struct EigenCluster {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double value() const { return 0.5 * (lo + hi); }
};

struct Spectrum {
  Vector eigenvalues;                 // ascending
  std::vector<EigenCluster> clusters; // multiplicity grouping, intervals
  Matrix eigenvectors;                // columns, g-orthonormal
};

// The unique Weyl-free curvature tensor determined by (Ric, s, g):
//   R(x,y,z,u) = -s/((n-1)(n-2)) (g(y,z)g(x,u) - g(x,z)g(y,u))
//              + 1/(n-2) (Ric(y,z)g(x,u) - Ric(x,z)g(y,u)
//                         + g(y,z)Ric(x,u) - g(x,z)Ric(y,u))
// For n >= 4 this form is equivalent to local conformal flatness; for
// n = 3 the synthesis is still defined but is not an lcf criterion, and
// *lcf_criterion is set to false when the caller asks.
Riemann4 lcf_curvature_from_ricci(const RicciTensor& ric, double s,
                                  const PointMetric& g,
                                  bool* lcf_criterion = nullptr);

// Ric(j,k) = R(i,j,k,l) g^{il}; s = g-trace of Ric. Basis independent.
std::pair<RicciTensor, double> ricci_contract(const Riemann4& R,
                                              const PointMetric& g);

// W = R - (Weyl-free form built from ricci_contract(R)). Totally trace-free.
Riemann4 weyl_tensor(const Riemann4& R, const PointMetric& g);

// Jacobi operator y -> R(y,x)x for unit-normalized x. g-self-adjoint,
// kills x, trace = Ric(x,x).
SymOperator jacobi_operator(const Riemann4& R, const Vector& x,
                            const PointMetric& g);

// Ricci operator rho with g(rho x, y) = Ric(x,y).
SymOperator ricci_operator(const RicciTensor& ric, const PointMetric& g);

// Deterministic cyclic-Jacobi-rotation eigensolver for a g-self-adjoint
// operator. Ascending eigenvalues, g-orthonormal eigenvectors, cluster
// grouping at cluster_tol.
Spectrum sym_eigen(const SymOperator& A, const PointMetric& g,
                   double cluster_tol = 1e-7);

double sectional(const Riemann4& R, const Vector& x, const Vector& y,
                 const PointMetric& g);

}  // namespace lcf
