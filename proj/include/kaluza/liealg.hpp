#ifndef KALUZA_LIEALG_HPP
#define KALUZA_LIEALG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "kaluza/errors.hpp"
#include "kaluza/quat.hpp"
#include "kaluza/smooth.hpp"

namespace kaluza {

/// A finite-dimensional Lie algebra given by its bracket coefficients:
/// [xi_a, xi_b] = c(k, a, b) xi_k. Stored densely; dimensions here never
/// exceed 8.
class StructureConstants {
 public:
  StructureConstants() = default;

  StructureConstants(int dim, std::vector<double> coeffs) : d_(dim), c_(std::move(coeffs)) {
    if (d_ <= 0 || c_.size() != static_cast<size_t>(d_ * d_ * d_))
      throw input_error("StructureConstants: coefficient array must have dim^3 entries");
  }

  static StructureConstants abelian(int dim) {
    return StructureConstants(dim, std::vector<double>(dim * dim * dim, 0.0));
  }

  /// su(2) in the basis {i, j, k} of imaginary quaternions with the
  /// commutator bracket: [i, j] = 2k and cyclic.
  static StructureConstants su2() {
    StructureConstants sc = abelian(3);
    const Quatd basis[3] = {Quatd::basis(1), Quatd::basis(2), Quatd::basis(3)};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Quatd com = commutator(basis[a], basis[b]);
        for (int k = 0; k < 3; ++k) sc.at(k, a, b) = com[k + 1];
      }
    return sc;
  }

  int dim() const { return d_; }
  double operator()(int k, int a, int b) const { return c_[(k * d_ + a) * d_ + b]; }
  double& at(int k, int a, int b) { return c_[(k * d_ + a) * d_ + b]; }

  /// Matrix of ad_zeta = [zeta, -].
  Eigen::MatrixXd ad(const Eigen::VectorXd& zeta) const {
    check_dim(zeta);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d_, d_);
    for (int k = 0; k < d_; ++k)
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) m(k, b) += (*this)(k, a, b) * zeta[a];
    return m;
  }

  double max_antisymmetry_defect() const {
    double worst = 0.0;
    for (int k = 0; k < d_; ++k)
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b)
          worst = std::max(worst, std::abs((*this)(k, a, b) + (*this)(k, b, a)));
    return worst;
  }

  /// Largest violation of sum_e (C^e_ab C^f_ec + C^e_bc C^f_ea + C^e_ca C^f_eb) = 0.
  double max_jacobi_defect() const {
    double worst = 0.0;
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b)
        for (int c = 0; c < d_; ++c)
          for (int f = 0; f < d_; ++f) {
            double s = 0.0;
            for (int e = 0; e < d_; ++e)
              s += (*this)(e, a, b) * (*this)(f, e, c) + (*this)(e, b, c) * (*this)(f, e, a) +
                   (*this)(e, c, a) * (*this)(f, e, b);
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

  void check_dim(const Eigen::VectorXd& v) const {
    if (v.size() != d_) throw input_error("coefficient vector length does not match algebra dimension");
  }

 private:
  int d_ = 0;
  std::vector<double> c_;
};

/// [xi, eta]^k = C^k_ab xi^a eta^b.
inline Eigen::VectorXd bracket(const StructureConstants& sc, const Eigen::VectorXd& xi,
                               const Eigen::VectorXd& eta) {
  sc.check_dim(xi);
  sc.check_dim(eta);
  const int d = sc.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out[k] += sc(k, a, b) * xi[a] * eta[b];
  return out;
}

/// Adjoint of ad_zeta with respect to the inner product beta:
/// beta(ad*_zeta(x1), x2) = beta(x1, ad_zeta(x2)).
inline Eigen::VectorXd ad_star(const StructureConstants& sc, const Eigen::MatrixXd& beta,
                               const Eigen::VectorXd& zeta, const Eigen::VectorXd& xi) {
  sc.check_dim(zeta);
  sc.check_dim(xi);
  Eigen::LDLT<Eigen::MatrixXd> solver(beta);
  if (solver.info() != Eigen::Success || !solver.isPositive())
    throw numeric_error("ad_star: fiber metric is not positive definite");
  return solver.solve(sc.ad(zeta).transpose() * (beta * xi));
}

/// Checks beta(ad_xi(x1), x2) + beta(x1, ad_xi(x2)) = 0 on all basis triples.
inline bool is_ad_invariant(const StructureConstants& sc, const Eigen::MatrixXd& beta,
                            double tol = 1e-12) {
  const int d = sc.dim();
  for (int e = 0; e < d; ++e) {
    Eigen::MatrixXd ad = sc.ad(Eigen::VectorXd::Unit(d, e));
    Eigen::MatrixXd defect = ad.transpose() * beta + beta * ad;
    if (defect.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

/// Fiber metric field x -> beta(x) over a base chart, with an eager
/// positive-definiteness check on caller-supplied sample points.
struct AlgebraMetric {
  int alg_dim = 0;
  SmoothMap components;  // R^m -> R^{d*d}, row-major symmetric
  bool constant = false;
  DerivMode derivative_mode = DerivMode::Analytic;
  double fd_step = 1e-5;
  double tolerance = 1e-12;

  static AlgebraMetric constant_metric(int base_dim, const Eigen::MatrixXd& beta) {
    AlgebraMetric fm;
    fm.alg_dim = static_cast<int>(beta.rows());
    fm.constant = true;
    const int d = fm.alg_dim;
    std::vector<double> flat(d * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) flat[a * d + b] = beta(a, b);
    fm.components = SmoothMap(base_dim, d * d, [flat, d](const auto* /*x*/, auto* y) {
      for (int i = 0; i < d * d; ++i) y[i] = flat[i];
    });
    return fm;
  }

  Eigen::MatrixXd at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd flat = components(x);
    return Eigen::Map<const Eigen::MatrixXd>(flat.data(), alg_dim, alg_dim).transpose();
  }

  Eigen::MatrixXd inverse_at(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd b = at(x);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(b);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw numeric_error("fiber metric is singular or indefinite");
    return ldlt.solve(Eigen::MatrixXd::Identity(alg_dim, alg_dim));
  }

  /// Fail fast on bad data rather than mid-integration.
  void validate(const std::vector<Eigen::VectorXd>& samples) const {
    for (const auto& x : samples) {
      Eigen::MatrixXd b = at(x);
      if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw numeric_error("fiber metric sample is not symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw numeric_error("fiber metric sample is not positive definite");
    }
  }
};

}  // namespace kaluza

#endif
