#ifndef KALUZA_WONG_HPP
#define KALUZA_WONG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kaluza/geometry.hpp"

namespace kaluza {

/// Curve state: base point x, base velocity u, and the vertical frame
/// velocity v^a (gauge potential paired with u plus fiber angular velocity).
struct WongState {
  double t = 0.0;
  Eigen::VectorXd x, u, v;
};

struct Trajectory {
  std::vector<WongState> samples;
  std::string method;
  double step = 0.0;
  double atol = 0.0, rtol = 0.0;
  int rejected_steps = 0;
};

struct integration_error : numeric_error {
  integration_error(const std::string& what, Trajectory partial_)
      : numeric_error(what), partial(std::move(partial_)) {}
  Trajectory partial;
};

/// Derivative of (x, u, v) for the geodesic flow of the bundle metric,
/// written in the adapted frame:
///   du^rho/dt = -Gamma^rho_{mu nu} u u + beta_{ab} F^b_{alpha mu} g^{alpha rho} u^mu v^a
///               + 1/2 v^a g^{mu rho} B_{a mu b} v^b
///   dv^b/dt   = -(coefficients of nabla along the curve acting on the
///               vertical frame), which reduces to
///               -1/2 v^a v^c beta^{db} L_{acd}
///               - v^a u^nu beta^{db} (d_nu beta_{ad} - beta(xi_a, [A_nu, xi_d])).
/// The second equation keeps the energy g(u,u) + beta(v,v) an exact first
/// integral for every model, including non-constant fiber metrics.
inline void wong_rhs(const KKLocalModel& model, const WongState& s, Eigen::VectorXd& dx,
                     Eigen::VectorXd& du, Eigen::VectorXd& dv) {
  const int m = model.m(), d = model.d();
  FrameConnection fc = frame_connection(model, s.x);

  dx = s.u;
  du = Eigen::VectorXd::Zero(m);
  for (int rho = 0; rho < m; ++rho) {
    double acc = 0.0;
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) acc -= fc.base(rho, mu, nu) * s.u[mu] * s.u[nu];
    for (int mu = 0; mu < m; ++mu)
      for (int a = 0; a < d; ++a) acc -= 2.0 * fc.hmixed(rho, mu, a) * s.u[mu] * s.v[a];
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) acc -= fc.hvert(rho, c, a) * s.v[c] * s.v[a];
    du[rho] = acc;
  }

  dv = Eigen::VectorXd::Zero(d);
  for (int b = 0; b < d; ++b) {
    double acc = 0.0;
    for (int a = 0; a < d; ++a)
      for (int mu = 0; mu < m; ++mu)
        acc -= (fc.vmixed_a_mu(b, a, mu) + fc.vmixed_mu_a(b, mu, a)) * s.v[a] * s.u[mu];
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) acc -= fc.vvert(b, c, a) * s.v[c] * s.v[a];
    dv[b] = acc;
  }
}

/// First integral of the flow: g_{mu nu} u^mu u^nu + beta_{ab} v^a v^b.
inline double conserved_energy(const KKLocalModel& model, const WongState& s) {
  Eigen::MatrixXd g = model.base.metric_at(s.x);
  Eigen::MatrixXd beta = model.fiber.at(s.x);
  return s.u.dot(g * s.u) + s.v.dot(beta * s.v);
}

struct IntegrateOptions {
  std::string method = "rk4";  // "rk4" | "rk45"
  double h = 1e-3;             // fixed step (rk4) / initial step (rk45)
  double atol = 1e-10;
  double rtol = 1e-10;
  int max_steps = 50'000'000;
};

namespace detail {

inline Eigen::VectorXd pack(const WongState& s) {
  Eigen::VectorXd y(s.x.size() + s.u.size() + s.v.size());
  y << s.x, s.u, s.v;
  return y;
}

inline WongState unpack(const KKLocalModel& model, double t, const Eigen::VectorXd& y) {
  WongState s;
  s.t = t;
  s.x = y.segment(0, model.m());
  s.u = y.segment(model.m(), model.m());
  s.v = y.segment(2 * model.m(), model.d());
  return s;
}

inline Eigen::VectorXd rhs_packed(const KKLocalModel& model, double t, const Eigen::VectorXd& y) {
  WongState s = unpack(model, t, y);
  Eigen::VectorXd dx, du, dv;
  wong_rhs(model, s, dx, du, dv);
  Eigen::VectorXd out(y.size());
  out << dx, du, dv;
  return out;
}

}  // namespace detail

/// Integrates the Wong system from state0 to t_end. Fixed-step rk4 is the
/// reference method; rk45 uses Dormand-Prince coefficients with a standard
/// accept/reject controller.
inline Trajectory integrate(const KKLocalModel& model, const WongState& state0, double t_end,
                            const IntegrateOptions& opts = {}) {
  if (t_end <= state0.t) throw input_error("integrate: t_end must exceed the initial time");
  if (opts.h <= 0.0 || opts.atol <= 0.0 || opts.rtol <= 0.0)
    throw input_error("integrate: step and tolerances must be positive");
  model.check_consistent();

  Trajectory traj;
  traj.method = opts.method;
  traj.step = opts.h;
  traj.atol = opts.atol;
  traj.rtol = opts.rtol;
  traj.samples.push_back(state0);

  Eigen::VectorXd y = detail::pack(state0);
  double t = state0.t;

  if (opts.method == "rk4") {
    long n = static_cast<long>(std::ceil((t_end - t) / opts.h - 1e-12));
    double h = (t_end - t) / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      Eigen::VectorXd k1 = detail::rhs_packed(model, t, y);
      Eigen::VectorXd k2 = detail::rhs_packed(model, t + h / 2, y + (h / 2) * k1);
      Eigen::VectorXd k3 = detail::rhs_packed(model, t + h / 2, y + (h / 2) * k2);
      Eigen::VectorXd k4 = detail::rhs_packed(model, t + h, y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = state0.t + (i + 1) * h;
      traj.samples.push_back(detail::unpack(model, t, y));
    }
    return traj;
  }

  if (opts.method != "rk45") throw input_error("integrate: unknown method " + opts.method);

  // Dormand-Prince 5(4)
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double h = std::min(opts.h, t_end - t);
  int steps = 0;
  Eigen::VectorXd k1 = detail::rhs_packed(model, t, y);
  while (t < t_end - 1e-14 * std::max(1.0, std::abs(t_end))) {
    if (++steps > opts.max_steps)
      throw integration_error("integrate: step budget exhausted", traj);
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw integration_error("integrate: adaptive step underflow at t=" + std::to_string(t),
                              traj);
    Eigen::VectorXd k2 = detail::rhs_packed(model, t + c2 * h, y + h * (a21 * k1));
    Eigen::VectorXd k3 = detail::rhs_packed(model, t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Eigen::VectorXd k4 =
        detail::rhs_packed(model, t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXd k5 = detail::rhs_packed(
        model, t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXd k6 = detail::rhs_packed(
        model, t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXd k7 = detail::rhs_packed(model, t + h, y5);
    Eigen::VectorXd err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double scale = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      double tol = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      scale = std::max(scale, std::abs(err[i]) / tol);
    }
    if (scale <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      traj.samples.push_back(detail::unpack(model, t, y));
    } else {
      ++traj.rejected_steps;
    }
    double factor = 0.9 * std::pow(std::max(scale, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return traj;
}

/// Max relative drift of the conserved energy along a trajectory.
inline double energy_drift(const KKLocalModel& model, const Trajectory& traj) {
  double e0 = conserved_energy(model, traj.samples.front());
  double worst = 0.0;
  for (const auto& s : traj.samples)
    worst = std::max(worst, std::abs(conserved_energy(model, s) - e0));
  return worst / std::max(std::abs(e0), 1e-300);
}

struct ChargeReport {
  Eigen::MatrixXd series;  // one row per sample, kappa_a = -beta_{ab} v^b
  double max_drift = 0.0;  // max_a max_t |kappa_a(t) - kappa_a(0)|
};

/// Vertical charges along a trajectory. Componentwise constancy holds when
/// the fiber metric is constant, ad-invariant, and the gauge coupling
/// [A(u), v] vanishes along the curve (abelian models, or aligned data).
inline ChargeReport charges(const KKLocalModel& model, const Trajectory& traj) {
  const int d = model.d();
  ChargeReport rep;
  rep.series.resize(static_cast<Eigen::Index>(traj.samples.size()), d);
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    Eigen::MatrixXd beta = model.fiber.at(s.x);
    rep.series.row(static_cast<Eigen::Index>(i)) = (-beta * s.v).transpose();
  }
  for (Eigen::Index i = 0; i < rep.series.rows(); ++i)
    rep.max_drift =
        std::max(rep.max_drift, (rep.series.row(i) - rep.series.row(0)).cwiseAbs().maxCoeff());
  return rep;
}

/// Signed geodesic curvature of the base curve of a trajectory (surfaces
/// only): kappa_g = g(covariant acceleration, J u) / |u|^3 with J the
/// positive rotation of the oriented chart.
inline std::vector<double> projected_curvature(const KKLocalModel& model, const Trajectory& traj) {
  if (model.m() != 2)
    throw input_error("projected_curvature: only 2-dimensional base charts are supported");
  std::vector<double> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    Eigen::VectorXd dx, du, dv;
    wong_rhs(model, s, dx, du, dv);
    Tensor3 gamma = christoffel(model.base, s.x);
    Eigen::VectorXd cov = du;
    for (int r = 0; r < 2; ++r)
      for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu) cov[r] += gamma(r, mu, nu) * s.u[mu] * s.u[nu];
    Eigen::MatrixXd g = model.base.metric_at(s.x);
    double sg = std::sqrt(g.determinant());
    // J(u)^rho = g^{rho alpha} sqrt(det g) eps_{beta alpha} u^beta  (positive rotation)
    Eigen::MatrixXd ginv = model.base.inverse_metric_at(s.x);
    Eigen::Vector2d lowered(-s.u[1] * sg, s.u[0] * sg);  // eps_{beta alpha} u^beta
    Eigen::VectorXd J = ginv * lowered;
    double speed2 = s.u.dot(g * s.u);
    if (speed2 <= 0.0) {
      out.push_back(0.0);
      continue;
    }
    out.push_back(cov.dot(g * J) / std::pow(speed2, 1.5));
  }
  return out;
}

}  // namespace kaluza

#endif
