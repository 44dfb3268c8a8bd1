#include "lcflab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lcf {

PointMetric identity_metric(int n) {
  return PointMetric{Matrix::Identity(n, n)};
}

bool is_positive_definite(const Matrix& g, double tol) {
  if (g.rows() != g.cols()) return false;
  for (int k = 1; k <= g.rows(); ++k) {
    if (g.topLeftCorner(k, k).determinant() <= tol) return false;
  }
  return true;
}

double Riemann4::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double Riemann4::frobenius_norm() const {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return std::sqrt(s);
}

double Riemann4::max_symmetry_violation() const {
  const int n = n_;
  double viol = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = (*this)(i, j, k, l);
          viol = std::max(viol, std::abs(r + (*this)(j, i, k, l)));
          viol = std::max(viol, std::abs(r + (*this)(i, j, l, k)));
          viol = std::max(viol, std::abs(r - (*this)(k, l, i, j)));
          viol = std::max(viol, std::abs(r + (*this)(j, k, i, l) + (*this)(k, i, j, l)));
        }
  const double scale = max_abs();
  return scale > 0.0 ? viol / scale : viol;
}

Riemann4 Riemann4::operator-(const Riemann4& o) const {
  Riemann4 r(n_);
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] - o.c_[i];
  return r;
}

Riemann4 Riemann4::operator+(const Riemann4& o) const {
  Riemann4 r(n_);
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
  return r;
}

Riemann4 lcf_curvature_from_ricci(const RicciTensor& ric, double s,
                                  const PointMetric& g, bool* lcf_criterion) {
  const int n = g.dim();
  if (ric.dim() != n)
    throw std::invalid_argument("lcf_curvature_from_ricci: dimension mismatch");
  if (n < 3)
    throw std::invalid_argument("lcf_curvature_from_ricci: dim must be >= 3");
  if ((ric.ric - ric.ric.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + ric.ric.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("lcf_curvature_from_ricci: Ricci not symmetric");
  const Matrix ginv = g.g.inverse();
  const double trace = (ginv * ric.ric).trace();
  if (std::abs(trace - s) > 1e-6 * (1.0 + std::abs(trace)))
    throw std::invalid_argument(
        "lcf_curvature_from_ricci: s inconsistent with g-trace of Ric");
  if (lcf_criterion) *lcf_criterion = (n >= 4);

  const double cs = -s / (double(n - 1) * double(n - 2));
  const double cr = 1.0 / double(n - 2);
  const Matrix& G = g.g;
  const Matrix& P = ric.ric;
  Riemann4 R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          R(i, j, k, l) =
              cs * (G(j, k) * G(i, l) - G(i, k) * G(j, l)) +
              cr * (P(j, k) * G(i, l) - P(i, k) * G(j, l) +
                    G(j, k) * P(i, l) - G(i, k) * P(j, l));
        }
  return R;
}

std::pair<RicciTensor, double> ricci_contract(const Riemann4& R,
                                              const PointMetric& g) {
  const int n = g.dim();
  if (R.dim() != n)
    throw std::invalid_argument("ricci_contract: dimension mismatch");
  const Matrix ginv = g.g.inverse();
  Matrix ric = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) acc += R(i, j, k, l) * ginv(i, l);
      ric(j, k) = acc;
    }
  ric = 0.5 * (ric + ric.transpose().eval());
  const double s = (ginv * ric).trace();
  return {RicciTensor{ric}, s};
}

Riemann4 weyl_tensor(const Riemann4& R, const PointMetric& g) {
  if (g.dim() < 4)
    throw std::invalid_argument("weyl_tensor: dim must be >= 4");
  auto [ric, s] = ricci_contract(R, g);
  return R - lcf_curvature_from_ricci(ric, s, g);
}

SymOperator jacobi_operator(const Riemann4& R, const Vector& x,
                            const PointMetric& g) {
  const int n = g.dim();
  if (x.size() != n)
    throw std::invalid_argument("jacobi_operator: dimension mismatch");
  const double xnorm2 = x.dot(g.g * x);
  if (xnorm2 <= 0.0)
    throw std::invalid_argument("jacobi_operator: zero vector");
  const Vector u = x / std::sqrt(xnorm2);

  // M(a,b) = R(a,i,j,b) u^i u^j with the (j,b) antisymmetry applied in
  // the construction, so that M u = 0 in structure.
  Matrix M = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += 0.5 * (R(a, i, j, b) - R(a, i, b, j)) * u(i) * u(j);
      M(a, b) = acc;
    }
  M = 0.5 * (M + M.transpose().eval());
  return SymOperator{g.g.llt().solve(M)};
}

SymOperator ricci_operator(const RicciTensor& ric, const PointMetric& g) {
  return SymOperator{g.g.llt().solve(ric.ric)};
}

namespace {

// Cyclic Jacobi rotations on a symmetric matrix; V accumulates rotations.
void jacobi_diagonalize(Matrix& B, Matrix& V) {
  const int n = static_cast<int>(B.rows());
  V = Matrix::Identity(n, n);
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += B(p, q) * B(p, q);
    if (std::sqrt(off) < 1e-13 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(B(p, q)) < 1e-300) continue;
        Eigen::JacobiRotation<double> rot;
        rot.makeJacobi(B(p, p), B(p, q), B(q, q));
        B.applyOnTheLeft(p, q, rot.transpose());
        B.applyOnTheRight(p, q, rot);
        V.applyOnTheRight(p, q, rot);
      }
  }
}

}  // namespace

Spectrum sym_eigen(const SymOperator& A, const PointMetric& g,
                   double cluster_tol) {
  const int n = g.dim();
  if (A.dim() != n) throw std::invalid_argument("sym_eigen: dimension mismatch");

  const Matrix GA = g.g * A.mat;
  const double adj_viol = (GA - GA.transpose()).cwiseAbs().maxCoeff();
  if (adj_viol > 1e-8 * (1.0 + GA.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("sym_eigen: operator not g-self-adjoint");

  // B = L^T A L^{-T} is symmetric when G A is; eigenvectors map back by
  // v = L^{-T} u and come out g-orthonormal.
  const Eigen::LLT<Matrix> llt(g.g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("sym_eigen: metric not positive definite");
  const Matrix L = llt.matrixL();
  Matrix B = L.transpose() * A.mat *
             L.transpose().triangularView<Eigen::Upper>().solve(
                 Matrix::Identity(n, n));
  B = 0.5 * (B + B.transpose().eval());

  Matrix V;
  jacobi_diagonalize(B, V);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return B(a, a) < B(b, b); });

  Spectrum sp;
  sp.eigenvalues.resize(n);
  sp.eigenvectors.resize(n, n);
  const Matrix W = L.transpose().triangularView<Eigen::Upper>().solve(V);
  for (int c = 0; c < n; ++c) {
    sp.eigenvalues(c) = B(order[c], order[c]);
    Vector v = W.col(order[c]);
    // deterministic sign: largest-magnitude entry positive
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    if (v(imax) < 0.0) v = -v;
    sp.eigenvectors.col(c) = v;
  }

  for (int c = 0; c < n;) {
    EigenCluster cl{sp.eigenvalues(c), sp.eigenvalues(c), 1};
    int d = c + 1;
    while (d < n && sp.eigenvalues(d) - cl.hi <= cluster_tol) {
      cl.hi = sp.eigenvalues(d);
      ++cl.count;
      ++d;
    }
    sp.clusters.push_back(cl);
    c = d;
  }
  return sp;
}

double sectional(const Riemann4& R, const Vector& x, const Vector& y,
                 const PointMetric& g) {
  const double gxx = x.dot(g.g * x);
  const double gyy = y.dot(g.g * y);
  const double gxy = x.dot(g.g * y);
  const double denom = gxx * gyy - gxy * gxy;
  if (denom < 1e-12) throw std::invalid_argument("sectional: degenerate plane");
  const int n = g.dim();
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          num += R(i, j, k, l) * x(i) * y(j) * y(k) * x(l);
  return num / denom;
}

}  // namespace lcf
