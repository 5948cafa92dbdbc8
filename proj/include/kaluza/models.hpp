#ifndef KALUZA_MODELS_HPP
#define KALUZA_MODELS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <type_traits>
#include <vector>

#include "kaluza/geometry.hpp"

namespace kaluza {
namespace models {

using std::cos;
using std::exp;
using std::sin;

inline BaseChart flat_chart(int m) {
  BaseChart b;
  b.dim = m;
  b.metric = SmoothMap(m, m * m, [m](const auto* /*x*/, auto* y) {
    for (int i = 0; i < m * m; ++i) y[i] = (i % (m + 1) == 0) ? 1.0 : 0.0;
  });
  return b;
}

/// Round sphere of radius r in stereographic coordinates:
/// g = (4 r^4 / (r^2 + |x|^2)^2) delta. r = 1 gives the unit sphere, r = 1/2
/// the Riemannian-submersion base of the unit-sphere bundles.
inline BaseChart stereographic_sphere_chart(int m, double radius) {
  BaseChart b;
  b.dim = m;
  double r2 = radius * radius;
  b.metric = SmoothMap(m, m * m, [m, r2](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T s = T(0.0);
    for (int i = 0; i < m; ++i) s += x[i] * x[i];
    T f = 4.0 * r2 * r2 / ((r2 + s) * (r2 + s));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) y[i * m + j] = (i == j) ? f : T(0.0);
  });
  return b;
}

inline GaugePotential constant_potential(int d, int m, const Eigen::MatrixXd& A) {
  GaugePotential g;
  g.alg_dim = d;
  g.base_dim = m;
  std::vector<double> flat(d * m);
  for (int a = 0; a < d; ++a)
    for (int mu = 0; mu < m; ++mu) flat[a * m + mu] = A(a, mu);
  g.components = SmoothMap(m, d * m, [flat](const auto* /*x*/, auto* y) {
    for (size_t i = 0; i < flat.size(); ++i) y[i] = flat[i];
  });
  return g;
}

inline GaugePotential zero_potential(int d, int m) {
  return constant_potential(d, m, Eigen::MatrixXd::Zero(d, m));
}

/// Uniform planar field: A = (B/2)(-y dx + x dy) along the single algebra
/// direction, so F^1_{12} = B.
inline KKLocalModel larmor_model(double B) {
  KKLocalModel model;
  model.base = flat_chart(2);
  model.algebra = StructureConstants::abelian(1);
  model.fiber = AlgebraMetric::constant_metric(2, Eigen::MatrixXd::Identity(1, 1));
  GaugePotential g;
  g.alg_dim = 1;
  g.base_dim = 2;
  g.components = SmoothMap(2, 2, [B](const auto* x, auto* y) {
    y[0] = -0.5 * B * x[1];
    y[1] = 0.5 * B * x[0];
  });
  model.gauge = g;
  return model;
}

/// su(2) model on flat R^2 with constant potential and constant fiber metric.
inline KKLocalModel su2_flat_model(const Eigen::MatrixXd& A, const Eigen::MatrixXd& beta) {
  KKLocalModel model;
  model.base = flat_chart(2);
  model.algebra = StructureConstants::su2();
  model.fiber = AlgebraMetric::constant_metric(2, beta);
  model.gauge = constant_potential(3, 2, A);
  return model;
}

/// Abelian model with fiber metric beta(x) = diag(exp(x1)) on flat R^m.
inline KKLocalModel abelian_growing_fiber_model(int m) {
  KKLocalModel model;
  model.base = flat_chart(m);
  model.algebra = StructureConstants::abelian(1);
  AlgebraMetric fm;
  fm.alg_dim = 1;
  fm.constant = false;
  fm.components = SmoothMap(m, 1, [](const auto* x, auto* y) { y[0] = exp(x[0]); });
  model.fiber = fm;
  model.gauge = zero_potential(1, m);
  return model;
}

/// su(2) model with x-dependent fiber metric diag(exp(x1), 1, 1) on flat R^2.
inline KKLocalModel su2_growing_fiber_model(const Eigen::MatrixXd& A) {
  KKLocalModel model;
  model.base = flat_chart(2);
  model.algebra = StructureConstants::su2();
  AlgebraMetric fm;
  fm.alg_dim = 3;
  fm.constant = false;
  fm.components = SmoothMap(2, 9, [](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    for (int i = 0; i < 9; ++i) y[i] = T(0.0);
    y[0] = exp(x[0]);
    y[4] = T(1.0);
    y[8] = T(1.0);
  });
  model.fiber = fm;
  model.gauge = constant_potential(3, 2, A);
  return model;
}

/// Random smooth abelian (d = 1) model on a 2d chart for property tests.
inline KKLocalModel abelian_random_model(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);

  KKLocalModel model;
  model.algebra = StructureConstants::abelian(1);
  model.fiber = AlgebraMetric::constant_metric(2, Eigen::MatrixXd::Identity(1, 1));

  BaseChart b;
  b.dim = 2;
  double c1 = unif(rng);
  b.metric = SmoothMap(2, 4, [c1](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T off = 0.2 * c1 * sin(x[0] + x[1]);
    y[0] = 1.0 + 0.4 * sin(x[0]) * sin(x[0]);
    y[1] = off;
    y[2] = off;
    y[3] = 1.0 + 0.3 * cos(x[0] + 2.0 * x[1]) * cos(x[0] + 2.0 * x[1]);
  });
  model.base = b;

  double a1 = unif(rng), a2 = unif(rng), p1 = 3.0 * unif(rng);
  GaugePotential g;
  g.alg_dim = 1;
  g.base_dim = 2;
  g.components = SmoothMap(2, 2, [a1, a2, p1](const auto* x, auto* y) {
    y[0] = a1 * sin(x[1] + p1);
    y[1] = a2 * cos(x[0]) + 0.3 * x[0];
  });
  model.gauge = g;
  return model;
}

/// Random smooth su(2) model for property tests: polynomial metric bump,
/// trigonometric potential, constant SPD fiber metric.
inline KKLocalModel su2_random_model(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);

  KKLocalModel model;
  model.algebra = StructureConstants::su2();

  BaseChart b;
  b.dim = 2;
  double c1 = unif(rng), c2 = unif(rng);
  b.metric = SmoothMap(2, 4, [c1, c2](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T off = c2 * sin(x[0]) * cos(x[1]) * 0.3;
    y[0] = 1.0 + 0.5 * sin(c1 + x[0]) * sin(c1 + x[0]);
    y[1] = off;
    y[2] = off;
    y[3] = 1.0 + 0.25 * cos(x[1]) * cos(x[1]);
  });
  model.base = b;

  Eigen::MatrixXd amp(3, 2), phase(3, 2);
  for (int a = 0; a < 3; ++a)
    for (int mu = 0; mu < 2; ++mu) {
      amp(a, mu) = unif(rng);
      phase(a, mu) = unif(rng) * 3.0;
    }
  GaugePotential g;
  g.alg_dim = 3;
  g.base_dim = 2;
  g.components = SmoothMap(2, 6, [amp, phase](const auto* x, auto* y) {
    for (int a = 0; a < 3; ++a)
      for (int mu = 0; mu < 2; ++mu)
        y[a * 2 + mu] = amp(a, mu) * sin(x[0] + phase(a, mu)) * cos(0.5 * x[1]);
  });
  model.gauge = g;

  double e1 = 0.3 * unif(rng), e2 = 0.3 * unif(rng);
  AlgebraMetric fm;
  fm.alg_dim = 3;
  fm.constant = false;
  fm.components = SmoothMap(2, 9, [e1, e2](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T off = e2 * sin(x[0] + x[1]) * 0.2;
    for (int i = 0; i < 9; ++i) y[i] = T(0.0);
    y[0] = 1.0 + 0.5 * sin(e1 + x[0]) * sin(e1 + x[0]);
    y[4] = 2.0 + 0.3 * cos(x[1]);
    y[8] = 1.5;
    y[1] = off;
    y[3] = off;
  });
  model.fiber = fm;
  return model;
}

}  // namespace models
}  // namespace kaluza

#endif
