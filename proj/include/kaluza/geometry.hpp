#ifndef KALUZA_GEOMETRY_HPP
#define KALUZA_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "kaluza/errors.hpp"
#include "kaluza/liealg.hpp"
#include "kaluza/smooth.hpp"

namespace kaluza {

/// Dense rank-3 tensor, t(i,j,k), row-major.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int n1, int n2, int n3) : n1_(n1), n2_(n2), n3_(n3), v_(n1 * n2 * n3, 0.0) {}

  double operator()(int i, int j, int k) const { return v_[(i * n2_ + j) * n3_ + k]; }
  double& operator()(int i, int j, int k) { return v_[(i * n2_ + j) * n3_ + k]; }
  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }
  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  int n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<double> v_;
};

namespace detail {

inline std::string point_str(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(" << x.transpose() << ")";
  return os.str();
}

/// Jacobian of a SmoothMap: analytic via duals, or central differences.
inline void jacobian(const SmoothMap& f, const Eigen::VectorXd& x, DerivMode mode, double h,
                     Eigen::VectorXd& value, Eigen::MatrixXd& jac) {
  if (mode == DerivMode::Analytic) {
    f.jet1(x, value, jac);
    return;
  }
  value = f(x);
  jac.resize(f.out_dim(), f.in_dim());
  Eigen::VectorXd xp = x, xm = x;
  for (int mu = 0; mu < f.in_dim(); ++mu) {
    xp[mu] = x[mu] + h;
    xm[mu] = x[mu] - h;
    jac.col(mu) = (f(xp) - f(xm)) / (2.0 * h);
    xp[mu] = x[mu];
    xm[mu] = x[mu];
  }
}

}  // namespace detail

/// Coordinate chart of the base manifold with its metric.
struct BaseChart {
  int dim = 0;
  SmoothMap metric;  // R^m -> R^{m*m}, row-major symmetric matrix
  DerivMode christoffel_mode = DerivMode::Analytic;
  double fd_step = 1e-5;

  Eigen::MatrixXd metric_at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd flat = metric(x);
    return Eigen::Map<const Eigen::MatrixXd>(flat.data(), dim, dim).transpose();
  }

  Eigen::MatrixXd inverse_metric_at(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd g = metric_at(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    if (!lu.isInvertible())
      throw numeric_error("base metric is singular at " + detail::point_str(x));
    return lu.inverse();
  }
};

/// Lie-algebra valued 1-form A^a_mu on the base chart.
struct GaugePotential {
  int alg_dim = 0;   // d
  int base_dim = 0;  // m
  SmoothMap components;  // R^m -> R^{d*m}, row-major (a, mu)
  DerivMode derivative_mode = DerivMode::Analytic;
  double fd_step = 1e-5;

  Eigen::MatrixXd at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd flat = components(x);
    return Eigen::Map<const Eigen::MatrixXd>(flat.data(), base_dim, alg_dim).transpose();
  }
};

/// Local Kaluza-Klein data (gauge potential, fiber metric, base metric) on a
/// trivializing chart, plus the structure constants of the fiber algebra.
struct KKLocalModel {
  BaseChart base;
  GaugePotential gauge;
  AlgebraMetric fiber;
  StructureConstants algebra;

  int m() const { return base.dim; }
  int d() const { return algebra.dim(); }

  void check_consistent() const {
    if (gauge.alg_dim != d() || gauge.base_dim != m() || fiber.alg_dim != d())
      throw input_error("KKLocalModel: inconsistent dimensions between gauge, fiber and base");
  }
};

/// Christoffel symbols of the base chart metric, Gamma^rho_{mu nu}.
inline Tensor3 christoffel(const BaseChart& base, const Eigen::VectorXd& x) {
  const int m = base.dim;
  Eigen::VectorXd gflat;
  Eigen::MatrixXd dg;  // (m*m) x m
  detail::jacobian(base.metric, x, base.christoffel_mode, base.fd_step, gflat, dg);
  Eigen::MatrixXd ginv = base.inverse_metric_at(x);

  auto dmetric = [&](int mu, int a, int b) { return dg(a * m + b, mu); };
  Tensor3 gamma(m, m, m);
  for (int r = 0; r < m; ++r)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        double s = 0.0;
        for (int l = 0; l < m; ++l)
          s += ginv(r, l) * (dmetric(mu, l, nu) + dmetric(nu, l, mu) - dmetric(l, mu, nu));
        gamma(r, mu, nu) = 0.5 * s;
      }
  return gamma;
}

/// Field strength F^a_{mu nu} = d_mu A^a_nu - d_nu A^a_mu + C^a_{bc} A^b_mu A^c_nu.
inline Tensor3 field_strength(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  Eigen::VectorXd aflat;
  Eigen::MatrixXd da;  // (d*m) x m
  detail::jacobian(model.gauge.components, x, model.gauge.derivative_mode, model.gauge.fd_step,
                   aflat, da);
  auto A = [&](int a, int mu) { return aflat[a * m + mu]; };
  auto dA = [&](int mu, int a, int nu) { return da(a * m + nu, mu); };

  Tensor3 F(d, m, m);
  for (int a = 0; a < d; ++a)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        double s = dA(mu, a, nu) - dA(nu, a, mu);
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c) s += model.algebra(a, b, c) * A(b, mu) * A(c, nu);
        F(a, mu, nu) = s;
      }
  return F;
}

/// B_{a mu d} = d_mu beta_{ad} - beta([A_mu, xi_a], xi_d) - beta(xi_a, [A_mu, xi_d]).
/// Symmetric in (a, d); vanishes for constant ad-invariant fiber metrics.
inline Tensor3 b_coeffs(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  Eigen::VectorXd bflat;
  Eigen::MatrixXd db;  // (d*d) x m
  if (model.fiber.constant) {
    bflat = model.fiber.components(x);
    db = Eigen::MatrixXd::Zero(d * d, m);
  } else {
    detail::jacobian(model.fiber.components, x, model.fiber.derivative_mode, model.fiber.fd_step,
                     bflat, db);
  }
  Eigen::MatrixXd beta = Eigen::Map<const Eigen::MatrixXd>(bflat.data(), d, d).transpose();
  Eigen::MatrixXd A = model.gauge.at(x);

  // adA[mu] = matrix of [A_mu, -]
  std::vector<Eigen::MatrixXd> adA(m);
  for (int mu = 0; mu < m; ++mu) adA[mu] = model.algebra.ad(A.col(mu));

  Tensor3 B(d, m, d);
  for (int mu = 0; mu < m; ++mu) {
    Eigen::MatrixXd brk = adA[mu].transpose() * beta + beta * adA[mu];
    for (int a = 0; a < d; ++a)
      for (int dd = 0; dd < d; ++dd) B(a, mu, dd) = db(a * d + dd, mu) - brk(a, dd);
  }
  return B;
}

/// L_{acd} = beta(xi_a,[xi_c,xi_d]) - beta(xi_c,[xi_d,xi_a]) - beta(xi_d,[xi_a,xi_c]).
inline Tensor3 l_coeffs(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d();
  Eigen::MatrixXd beta = model.fiber.at(x);
  auto pair_bracket = [&](int a, int c, int dd) {
    // beta(xi_a, [xi_c, xi_d])
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += beta(a, k) * model.algebra(k, c, dd);
    return s;
  };
  Tensor3 L(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c)
      for (int dd = 0; dd < d; ++dd)
        L(a, c, dd) = pair_bracket(a, c, dd) - pair_bracket(c, dd, a) - pair_bracket(dd, a, c);
  return L;
}

/// Metric components of the bundle metric in the coordinate/Maurer-Cartan
/// coframe (dx^mu, theta^a): an (m+d) x (m+d) symmetric matrix.
inline Eigen::MatrixXd kk_metric_components(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  Eigen::MatrixXd g = model.base.metric_at(x);
  Eigen::MatrixXd beta = model.fiber.at(x);
  Eigen::MatrixXd A = model.gauge.at(x);  // d x m
  Eigen::MatrixXd out(m + d, m + d);
  out.topLeftCorner(m, m) = g + A.transpose() * beta * A;
  out.topRightCorner(m, d) = A.transpose() * beta;
  out.bottomLeftCorner(d, m) = beta * A;
  out.bottomRightCorner(d, d) = beta;
  return out;
}

/// Levi-Civita connection coefficients of the bundle metric in the adapted
/// frame {E_mu, E_a}. Blocks are stored as output-index-first tensors.
struct FrameConnection {
  Tensor3 base;        // (rho, mu, nu): coefficient of E_rho in nabla_{E_mu} E_nu
  Tensor3 hmixed;      // (rho, mu, a): horizontal part of nabla_{E_mu} E_a (= of nabla_{E_a} E_mu)
  Tensor3 vmixed_mu_a; // (b, mu, a): vertical part of nabla_{E_mu} E_a
  Tensor3 vmixed_a_mu; // (b, a, mu): vertical part of nabla_{E_a} E_mu
  Tensor3 hvert;       // (rho, a, b): horizontal part of nabla_{E_a} E_b
  Tensor3 vvert;       // (c, a, b): vertical part of nabla_{E_a} E_b
};

inline FrameConnection frame_connection(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  Eigen::MatrixXd ginv = model.base.inverse_metric_at(x);
  Eigen::MatrixXd beta = model.fiber.at(x);
  Eigen::MatrixXd binv = model.fiber.inverse_at(x);
  Eigen::MatrixXd A = model.gauge.at(x);
  Tensor3 F = field_strength(model, x);
  Tensor3 B = b_coeffs(model, x);
  Tensor3 L = l_coeffs(model, x);

  Eigen::VectorXd bflat;
  Eigen::MatrixXd db;
  if (model.fiber.constant) {
    db = Eigen::MatrixXd::Zero(d * d, m);
  } else {
    detail::jacobian(model.fiber.components, x, model.fiber.derivative_mode, model.fiber.fd_step,
                     bflat, db);
  }
  auto dbeta = [&](int mu, int a, int dd) { return db(a * d + dd, mu); };

  std::vector<Eigen::MatrixXd> adA(m);
  for (int mu = 0; mu < m; ++mu) adA[mu] = model.algebra.ad(A.col(mu));
  // bracket_pair(mu, a, dd) = beta([A_mu, xi_a], xi_d)
  auto bracket_pair = [&](int mu, int a, int dd) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += adA[mu](k, a) * beta(k, dd);
    return s;
  };

  FrameConnection fc;
  fc.base = christoffel(model.base, x);

  fc.hmixed = Tensor3(m, m, d);
  for (int rho = 0; rho < m; ++rho)
    for (int mu = 0; mu < m; ++mu)
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b)
          for (int al = 0; al < m; ++al) s += beta(a, b) * F(b, al, mu) * ginv(al, rho);
        fc.hmixed(rho, mu, a) = -0.5 * s;
      }

  fc.vmixed_mu_a = Tensor3(d, m, d);
  fc.vmixed_a_mu = Tensor3(d, d, m);
  for (int b = 0; b < d; ++b)
    for (int mu = 0; mu < m; ++mu)
      for (int a = 0; a < d; ++a) {
        double plus = 0.0, minus = 0.0;
        for (int dd = 0; dd < d; ++dd) {
          // beta(xi_a, [A_mu, xi_d])
          double right = (beta.row(a) * adA[mu].col(dd))(0, 0);
          double common = dbeta(mu, a, dd) - right;
          plus += binv(dd, b) * (common + bracket_pair(mu, a, dd));
          minus += binv(dd, b) * (common - bracket_pair(mu, a, dd));
        }
        fc.vmixed_mu_a(b, mu, a) = 0.5 * plus;
        fc.vmixed_a_mu(b, a, mu) = 0.5 * minus;
      }

  fc.hvert = Tensor3(m, d, d);
  for (int rho = 0; rho < m; ++rho)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int mu = 0; mu < m; ++mu) s += ginv(mu, rho) * B(a, mu, b);
        fc.hvert(rho, a, b) = -0.5 * s;
      }

  fc.vvert = Tensor3(d, d, d);
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int dd = 0; dd < d; ++dd) s += binv(dd, c) * L(a, b, dd);
        fc.vvert(c, a, b) = 0.5 * s;
      }

  return fc;
}

/// O'Neill tensor blocks in the adapted frame. T carries the fiber shape,
/// A the integrability failure of the horizontal distribution.
struct ONeillT {
  Tensor3 vert_of_a_mu;  // (b, a, mu): T(E_a, E_mu) = coeff * E_b
  Tensor3 horiz_of_a_b;  // (rho, a, b): T(E_a, E_b) = coeff * E_rho
};

struct ONeillA {
  Tensor3 vert_of_mu_nu;  // (a, mu, nu): A(E_mu, E_nu) = coeff * E_a
  Tensor3 horiz_of_mu_a;  // (rho, mu, a): A(E_mu, E_a) = coeff * E_rho
};

inline ONeillT oneill_T(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  Eigen::MatrixXd binv = model.fiber.inverse_at(x);
  Eigen::MatrixXd ginv = model.base.inverse_metric_at(x);
  Tensor3 B = b_coeffs(model, x);
  ONeillT t;
  t.vert_of_a_mu = Tensor3(d, d, m);
  for (int b = 0; b < d; ++b)
    for (int a = 0; a < d; ++a)
      for (int mu = 0; mu < m; ++mu) {
        double s = 0.0;
        for (int dd = 0; dd < d; ++dd) s += binv(dd, b) * B(a, mu, dd);
        t.vert_of_a_mu(b, a, mu) = 0.5 * s;
      }
  t.horiz_of_a_b = Tensor3(m, d, d);
  for (int rho = 0; rho < m; ++rho)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int mu = 0; mu < m; ++mu) s += ginv(mu, rho) * B(a, mu, b);
        t.horiz_of_a_b(rho, a, b) = -0.5 * s;
      }
  return t;
}

inline ONeillA oneill_A(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  Eigen::MatrixXd beta = model.fiber.at(x);
  Eigen::MatrixXd ginv = model.base.inverse_metric_at(x);
  Tensor3 F = field_strength(model, x);
  ONeillA a;
  a.vert_of_mu_nu = Tensor3(d, m, m);
  for (int k = 0; k < d; ++k)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) a.vert_of_mu_nu(k, mu, nu) = -0.5 * F(k, mu, nu);
  a.horiz_of_mu_a = Tensor3(m, m, d);
  for (int rho = 0; rho < m; ++rho)
    for (int mu = 0; mu < m; ++mu)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int b = 0; b < d; ++b)
          for (int al = 0; al < m; ++al) s += beta(k, b) * F(b, al, mu) * ginv(al, rho);
        a.horiz_of_mu_a(rho, mu, k) = -0.5 * s;
      }
  return a;
}

/// Difference tensor between the vertical part of the Levi-Civita connection
/// and the principal-connection covariant derivative, evaluated on a frame
/// vector D = (h, w) (horizontal components h^mu, vertical components w^a)
/// and a vertical direction xi. Returns vertical frame components.
inline Eigen::VectorXd theta_tensor(const KKLocalModel& model, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& h, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& xi) {
  const int d = model.d(), m = model.m();
  if (h.size() != m || w.size() != d || xi.size() != d)
    throw input_error("theta_tensor: component dimensions do not match the model");
  Eigen::MatrixXd beta = model.fiber.at(x);
  // 1/2 { ad*_xi(w) + ad*_w(xi) }
  Eigen::VectorXd sym =
      0.5 * (ad_star(model.algebra, beta, xi, w) + ad_star(model.algebra, beta, w, xi));
  // + T(xi^*, D^H) with D^H = h^mu E_mu
  ONeillT t = oneill_T(model, x);
  Eigen::VectorXd out = sym;
  for (int b = 0; b < d; ++b) {
    double s = 0.0;
    for (int a = 0; a < d; ++a)
      for (int mu = 0; mu < m; ++mu) s += t.vert_of_a_mu(b, a, mu) * xi[a] * h[mu];
    out[b] += s;
  }
  return out;
}

/// Lorentz force contraction: rho-component beta_{bc} F^c_{alpha mu} g^{alpha rho} u^mu v^b.
inline Eigen::VectorXd lorentz_force_term(const KKLocalModel& model, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const int d = model.d(), m = model.m();
  if (u.size() != m || v.size() != d) throw input_error("lorentz_force_term: bad vector sizes");
  Eigen::MatrixXd beta = model.fiber.at(x);
  Eigen::MatrixXd ginv = model.base.inverse_metric_at(x);
  Tensor3 F = field_strength(model, x);
  Eigen::VectorXd force = Eigen::VectorXd::Zero(m);
  for (int rho = 0; rho < m; ++rho) {
    double s = 0.0;
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int al = 0; al < m; ++al)
          for (int mu = 0; mu < m; ++mu)
            s += beta(b, c) * F(c, al, mu) * ginv(al, rho) * u[mu] * v[b];
    force[rho] = s;
  }
  return force;
}

/// Defect of the torsion identity nabla_{E_mu} E_a - nabla_{E_a} E_mu = [E_mu, E_a]:
/// both sides are vertical with components [A_mu, xi_a]^b. Returns the max abs error.
inline double frame_bracket_defect(const KKLocalModel& model, const Eigen::VectorXd& x) {
  const int d = model.d(), m = model.m();
  FrameConnection fc = frame_connection(model, x);
  Eigen::MatrixXd A = model.gauge.at(x);
  double worst = 0.0;
  for (int mu = 0; mu < m; ++mu) {
    Eigen::MatrixXd adA = model.algebra.ad(A.col(mu));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double lhs = fc.vmixed_mu_a(b, mu, a) - fc.vmixed_a_mu(b, a, mu);
        worst = std::max(worst, std::abs(lhs - adA(b, a)));
      }
  }
  return worst;
}

}  // namespace kaluza

#endif
