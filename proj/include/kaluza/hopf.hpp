#ifndef KALUZA_HOPF_HPP
#define KALUZA_HOPF_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "kaluza/geometry.hpp"
#include "kaluza/quat.hpp"
#include "kaluza/wong.hpp"

namespace kaluza {
namespace hopf {

using std::sqrt;

enum class BundleKind { Complex, Quaternionic };
enum class Chart { North, South };

inline std::string chart_name(Chart c) { return c == Chart::North ? "north" : "south"; }

// ---------------------------------------------------------------------------
// Templated ambient kernels (evaluable on duals).
// ---------------------------------------------------------------------------

template <class T>
Quat<T> quat_from(const T* p) {
  return {p[0], p[1], p[2], p[3]};
}

template <class T>
void quat_to(const Quat<T>& q, T* p) {
  p[0] = q.w;
  p[1] = q.x;
  p[2] = q.y;
  p[3] = q.z;
}

/// Bundle projection S^3 -> S^2: q i conj(q), imaginary part in (i, j, k).
template <class T>
void project_c(const T* p, T* out) {
  Quat<T> q = quat_from(p);
  Quat<T> r = q * Quat<T>::basis(1) * q.conj();
  out[0] = r.x;
  out[1] = r.y;
  out[2] = r.z;
}

/// Bundle projection S^7 -> S^4: (|q1|^2 - |q2|^2, 2 q1 conj(q2)) in R x H.
template <class T>
void project_q(const T* p, T* out) {
  Quat<T> q1 = quat_from(p), q2 = quat_from(p + 4);
  out[0] = q1.norm2() - q2.norm2();
  quat_to(2.0 * (q1 * q2.conj()), out + 1);
}

/// Stereographic chart of the unit target sphere S^k in R^{k+1}; the first
/// ambient coordinate is the axis. North covers axis != -1, south axis != 1.
template <class T>
void chart_fwd(Chart c, int k, const T* P, T* x) {
  T denom = c == Chart::North ? 1.0 + P[0] : 1.0 - P[0];
  for (int i = 0; i < k; ++i) x[i] = P[i + 1] / denom;
}

template <class T>
void chart_inv(Chart c, int k, const T* x, T* P) {
  T r2 = T(0.0);
  for (int i = 0; i < k; ++i) r2 += x[i] * x[i];
  T den = 1.0 + r2;
  P[0] = c == Chart::North ? (1.0 - r2) / den : (r2 - 1.0) / den;
  for (int i = 0; i < k; ++i) P[i + 1] = 2.0 * x[i] / den;
}

/// Local sections. Complex north: q(P) = normalize(1 - P i), which conjugates
/// the fiber axis onto P; south composes with a half-turn through j.
/// P enters in sphere coordinates (axis component first along i).
template <class T>
void section_c(Chart c, const T* x, T* out) {
  T P[3];
  chart_inv(c, 2, x, P);
  Quat<T> Pq{T(0.0), P[0], P[1], P[2]};
  if (c == Chart::South) Pq = -Pq;
  Quat<T> w = Quat<T>::one() - Pq * Quat<T>::basis(1);
  w = normalized(w);
  if (c == Chart::South) w = w * Quat<T>::basis(2);
  quat_to(w, out);
}

/// Quaternionic sections: north (t != -1) takes q1 real positive,
/// south (t != 1) takes q2 real positive.
template <class T>
void section_q(Chart c, const T* x, T* out) {
  T tw[5];
  chart_inv(c, 4, x, tw);
  Quat<T> w{tw[1], tw[2], tw[3], tw[4]};
  if (c == Chart::North) {
    T cc = sqrt((1.0 + tw[0]) / 2.0);
    quat_to(Quat<T>{cc, T(0.0), T(0.0), T(0.0)}, out);
    quat_to((1.0 / (2.0 * cc)) * w.conj(), out + 4);
  } else {
    T cc = sqrt((1.0 - tw[0]) / 2.0);
    quat_to((1.0 / (2.0 * cc)) * w, out);
    quat_to(Quat<T>{cc, T(0.0), T(0.0), T(0.0)}, out + 4);
  }
}

/// Fundamental vertical fields of the structure-group action: right
/// quaternion multiplication on S^3, the diagonal right Sp(1) action on S^7.
template <class T>
void vertical_field_c(const T* p, int a, T* out) {
  quat_to(quat_from(p) * Quat<T>::basis(1 + a), out);
}

template <class T>
void vertical_field_q(const T* p, int a, T* out) {
  Quat<T> xi = Quat<T>::basis(1 + a);
  quat_to(quat_from(p) * xi, out);
  quat_to(quat_from(p + 4) * xi, out + 4);
}

// ---------------------------------------------------------------------------
// Runtime bundle object.
// ---------------------------------------------------------------------------

/// Concrete realization of the complex (S^3 -> S^2) or quaternionic
/// (S^7 -> S^4) unit-sphere bundle with the round bi-invariant metric.
struct HopfBundle {
  BundleKind kind;

  static HopfBundle complex_bundle() { return {BundleKind::Complex}; }
  static HopfBundle quaternionic_bundle() { return {BundleKind::Quaternionic}; }

  int ambient_dim() const { return kind == BundleKind::Complex ? 4 : 8; }
  int fiber_dim() const { return kind == BundleKind::Complex ? 1 : 3; }
  int base_dim() const { return kind == BundleKind::Complex ? 2 : 4; }
  int target_dim() const { return base_dim() + 1; }

  void require_unit(const Eigen::VectorXd& p) const {
    if (p.size() != ambient_dim() || std::abs(p.norm() - 1.0) > 1e-9)
      throw input_error("hopf: point is not on the unit sphere");
  }

  /// Frame field D_a(p), a in [0, fiber+base): vertical indices first.
  Eigen::VectorXd frame(const Eigen::VectorXd& p, int a) const {
    require_unit(p);
    const int d = fiber_dim();
    Eigen::VectorXd out(ambient_dim());
    if (kind == BundleKind::Complex) {
      // All frame fields are right translates q * xi_a, xi in {i, j, k}.
      quat_to(quat_from(p.data()) * Quatd::basis(1 + a), out.data());
      return out;
    }
    if (a < d) {
      vertical_field_q(p.data(), a, out.data());
      return out;
    }
    // Horizontal frame: complete (q1, q2) to a quaternionic-unitary basis by
    // a second column (A, B), then take (A w, B w) for w in {1, i, j, k}.
    Quatd A, B;
    second_column(p, A, B);
    Quatd w = Quatd::basis(a - d);
    quat_to(A * w, out.data());
    quat_to(B * w, out.data() + 4);
    return out;
  }

  /// Unit solution (A, B) of conj(q1) A + conj(q2) B = 0, deterministic away
  /// from the poles of whichever slot dominates.
  void second_column(const Eigen::VectorXd& p, Quatd& A, Quatd& B) const {
    Quatd q1 = quat_from(p.data()), q2 = quat_from(p.data() + 4);
    double n1 = value(q1.norm2()), n2 = value(q2.norm2());
    if (n1 >= n2) {
      B = Quatd::one();
      A = (-1.0 / n1) * (q1 * q2.conj());
    } else {
      A = Quatd::one();
      B = (-1.0 / n2) * (q2 * q1.conj());
    }
    double n = std::sqrt(A.norm2() + B.norm2());
    A = (1.0 / n) * A;
    B = (1.0 / n) * B;
  }

  /// Bundle projection onto the unit target sphere.
  Eigen::VectorXd project(const Eigen::VectorXd& p) const {
    require_unit(p);
    Eigen::VectorXd out(target_dim());
    if (kind == BundleKind::Complex)
      project_c(p.data(), out.data());
    else
      project_q(p.data(), out.data());
    return out;
  }

  /// Connection form on a tangent vector, in the vertical frame basis.
  Eigen::VectorXd connection_form(const Eigen::VectorXd& p, const Eigen::VectorXd& X) const {
    require_unit(p);
    if (X.size() != ambient_dim() || std::abs(p.dot(X)) > 1e-10)
      throw input_error("hopf: connection form needs a tangent vector");
    Eigen::VectorXd out(fiber_dim());
    for (int a = 0; a < fiber_dim(); ++a) out[a] = X.dot(frame(p, a));
    return out;
  }

  /// Vertical and horizontal parts of a tangent vector.
  void split(const Eigen::VectorXd& p, const Eigen::VectorXd& X, Eigen::VectorXd& vert,
             Eigen::VectorXd& horiz) const {
    vert = Eigen::VectorXd::Zero(ambient_dim());
    for (int a = 0; a < fiber_dim(); ++a) {
      Eigen::VectorXd Va = frame(p, a);
      vert += X.dot(Va) * Va;
    }
    horiz = X - vert - p.dot(X) * p;
  }

  /// Curvature Omega(X, Y) of the metric connection on horizontal vectors at
  /// p, expressed in the vertical frame basis. Computed as
  /// -omega([X^h, Y^h]) with exact derivatives of the projected constant
  /// extensions of X and Y through the ambient algebra.
  Eigen::VectorXd curvature_on_vectors(const Eigen::VectorXd& p, const Eigen::VectorXd& X,
                                       const Eigen::VectorXd& Y) const {
    require_unit(p);
    const int n = ambient_dim();
    Eigen::VectorXd Xh, Yh, tmp;
    split(p, X, tmp, Xh);
    split(p, Y, tmp, Yh);

    // directional derivative of the projected-extension field of Z along dir
    auto field_derivative = [&](const Eigen::VectorXd& Z, const Eigen::VectorXd& dir) {
      std::vector<D1> pd(n);
      for (int i = 0; i < n; ++i) pd[i] = D1(p[i], dir[i]);
      // horizontal projection of the constant field Z at the dual point
      std::vector<D1> out(n);
      D1 nrm2(0.0);
      for (int i = 0; i < n; ++i) nrm2 += pd[i] * pd[i];
      D1 rad(0.0);
      for (int i = 0; i < n; ++i) rad += Z[i] * pd[i];
      for (int i = 0; i < n; ++i) out[i] = D1(Z[i]) - rad * pd[i] / nrm2;
      for (int a = 0; a < fiber_dim(); ++a) {
        std::vector<D1> Va(n);
        if (kind == BundleKind::Complex)
          vertical_field_c(pd.data(), a, Va.data());
        else
          vertical_field_q(pd.data(), a, Va.data());
        D1 coef(0.0);
        for (int i = 0; i < n; ++i) coef += Z[i] * Va[i];
        for (int i = 0; i < n; ++i) out[i] -= coef * Va[i] / nrm2;
      }
      Eigen::VectorXd deriv(n);
      for (int i = 0; i < n; ++i) deriv[i] = out[i].d;
      return deriv;
    };

    Eigen::VectorXd bracket = field_derivative(Yh, Xh) - field_derivative(Xh, Yh);
    Eigen::VectorXd omega(fiber_dim());
    for (int a = 0; a < fiber_dim(); ++a) omega[a] = bracket.dot(frame(p, a));
    return -omega;
  }

  /// Curvature on horizontal frame fields: a, b are frame indices.
  Eigen::VectorXd curvature_numeric(const Eigen::VectorXd& p, int a, int b) const {
    const int d = fiber_dim();
    if (a < d || b < d || a >= d + base_dim() || b >= d + base_dim())
      throw input_error("hopf: curvature_numeric expects horizontal frame indices");
    return curvature_on_vectors(p, frame(p, a), frame(p, b));
  }

  /// Lorentz endomorphism contraction <V, F>(H): V vertical, H horizontal;
  /// returns the horizontal vector defined by g(<V,F>(H), H2) = <V, Omega>(H, H2).
  Eigen::VectorXd lorentz_endomorphism(const Eigen::VectorXd& p, const Eigen::VectorXd& V,
                                       const Eigen::VectorXd& H) const {
    require_unit(p);
    Eigen::VectorXd vv, vh, hv, hh;
    split(p, V, vv, vh);
    split(p, H, hv, hh);
    if ((V - vv).norm() > 1e-9) throw input_error("hopf: V must be vertical");
    if ((H - hh).norm() > 1e-9) throw input_error("hopf: H must be horizontal");

    Eigen::VectorXd vcomp(fiber_dim());
    for (int a = 0; a < fiber_dim(); ++a) vcomp[a] = V.dot(frame(p, a));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ambient_dim());
    for (int w = 0; w < base_dim(); ++w) {
      Eigen::VectorXd Db = frame(p, fiber_dim() + w);
      Eigen::VectorXd om = curvature_on_vectors(p, H, Db);
      out += vcomp.dot(om) * Db;
    }
    return out;
  }

  /// Fiber coordinate of p over the chart: the group element g with
  /// p = section(chart coords of project(p)) * g.
  Quatd fiber_coordinate(Chart chart, const Eigen::VectorXd& p) const {
    if (kind == BundleKind::Quaternionic) {
      Quatd q = chart == Chart::North ? quat_from(p.data()) : quat_from(p.data() + 4);
      return normalized(q);
    }
    Eigen::VectorXd P = project(p);
    Eigen::VectorXd x(2);
    chart_fwd(chart, 2, P.data(), x.data());
    double s[4];
    section_c(chart, x.data(), s);
    return quat_from(s).conj() * quat_from(p.data());
  }
};

// ---------------------------------------------------------------------------
// Chart-level Kaluza-Klein models.
// ---------------------------------------------------------------------------

/// Section value over a chart point.
inline Eigen::VectorXd section_point(const HopfBundle& bundle, Chart chart,
                                     const Eigen::VectorXd& x) {
  Eigen::VectorXd s(bundle.ambient_dim());
  if (bundle.kind == BundleKind::Complex)
    section_c(chart, x.data(), s.data());
  else
    section_q(chart, x.data(), s.data());
  return s;
}

/// Section value and Jacobian (ambient x base) via dual sweeps.
inline void section_jet(const HopfBundle& bundle, Chart chart, const Eigen::VectorXd& x,
                        Eigen::VectorXd& s, Eigen::MatrixXd& ds) {
  const int m = bundle.base_dim(), n = bundle.ambient_dim();
  s.resize(n);
  ds.resize(n, m);
  std::vector<D1> xd(m), sd(n);
  for (int mu = 0; mu < m; ++mu) {
    for (int i = 0; i < m; ++i) xd[i] = D1(x[i], i == mu ? 1.0 : 0.0);
    if (bundle.kind == BundleKind::Complex)
      section_c(chart, xd.data(), sd.data());
    else
      section_q(chart, xd.data(), sd.data());
    for (int i = 0; i < n; ++i) ds(i, mu) = sd[i].d;
    if (mu == 0)
      for (int i = 0; i < n; ++i) s[i] = sd[i].v;
  }
}

/// The excluded pole of a chart, as a target-sphere point.
inline Eigen::VectorXd chart_pole(const HopfBundle& bundle, Chart chart) {
  Eigen::VectorXd pole = Eigen::VectorXd::Zero(bundle.target_dim());
  pole[0] = chart == Chart::North ? -1.0 : 1.0;
  return pole;
}

/// Local Kaluza-Klein data of the bundle over a stereographic chart of the
/// unit target sphere: base metric = quarter of the unit round metric (the
/// Riemannian-submersion base), constant identity fiber metric, and the
/// gauge potential pulled back through the section.
inline KKLocalModel as_local_model(const HopfBundle& bundle, Chart chart) {
  KKLocalModel model;
  const int m = bundle.base_dim();
  const int d = bundle.fiber_dim();

  model.algebra =
      bundle.kind == BundleKind::Complex ? StructureConstants::abelian(1) : StructureConstants::su2();
  model.fiber = AlgebraMetric::constant_metric(m, Eigen::MatrixXd::Identity(d, d));

  BaseChart base;
  base.dim = m;
  base.metric = SmoothMap(m, m * m, [m](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T r2 = T(0.0);
    for (int i = 0; i < m; ++i) r2 += x[i] * x[i];
    T f = 1.0 / ((1.0 + r2) * (1.0 + r2));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) y[i * m + j] = (i == j) ? f : T(0.0);
  });
  model.base = base;

  GaugePotential gauge;
  gauge.alg_dim = d;
  gauge.base_dim = m;
  BundleKind kind = bundle.kind;
  gauge.components = SmoothMap(m, d * m, [m, d, kind, chart](const auto* x, auto* y) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    const int amb = kind == BundleKind::Complex ? 4 : 8;
    // section value and derivative in each chart direction via one more
    // dual level over the incoming scalars
    std::vector<T> s0(amb);
    if (kind == BundleKind::Complex)
      section_c(chart, x, s0.data());
    else
      section_q(chart, x, s0.data());
    for (int mu = 0; mu < m; ++mu) {
      std::vector<Dual<T>> xd(m), sd(amb);
      for (int i = 0; i < m; ++i) xd[i] = Dual<T>(x[i], T(i == mu ? 1.0 : 0.0));
      if (kind == BundleKind::Complex)
        section_c(chart, xd.data(), sd.data());
      else
        section_q(chart, xd.data(), sd.data());
      for (int a = 0; a < d; ++a) {
        std::vector<T> Va(amb);
        if (kind == BundleKind::Complex)
          vertical_field_c(s0.data(), a, Va.data());
        else
          vertical_field_q(s0.data(), a, Va.data());
        T acc = T(0.0);
        for (int i = 0; i < amb; ++i) acc += sd[i].d * Va[i];
        y[a * m + mu] = acc;
      }
    }
  });
  model.gauge = gauge;
  return model;
}

/// Guard for chart evaluations: throws once the sphere point approaches the
/// excluded pole of the chart.
inline void require_in_chart(const HopfBundle& bundle, Chart chart, const Eigen::VectorXd& P,
                             double margin = 1e-6) {
  if ((P - chart_pole(bundle, chart)).norm() < margin)
    throw numeric_error("hopf: evaluation at the excluded pole of the " + chart_name(chart) +
                        " chart");
}

/// Chart coordinates of a sphere point.
inline Eigen::VectorXd to_chart(const HopfBundle& bundle, Chart chart, const Eigen::VectorXd& P) {
  require_in_chart(bundle, chart, P);
  Eigen::VectorXd x(bundle.base_dim());
  chart_fwd(chart, bundle.base_dim(), P.data(), x.data());
  return x;
}

inline Eigen::VectorXd from_chart(const HopfBundle& bundle, Chart chart,
                                  const Eigen::VectorXd& x) {
  Eigen::VectorXd P(bundle.target_dim());
  chart_inv(chart, bundle.base_dim(), x.data(), P.data());
  return P;
}

/// Wong state in chart coordinates from an ambient point and velocity.
inline WongState ambient_to_chart_state(const HopfBundle& bundle, Chart chart,
                                        const Eigen::VectorXd& p, const Eigen::VectorXd& pdot) {
  bundle.require_unit(p);
  const int n = bundle.ambient_dim(), m = bundle.base_dim(), d = bundle.fiber_dim();
  WongState s;

  // x and u by pushing (p, pdot) through chart o project with duals
  std::vector<D1> pd(n), Pd(bundle.target_dim()), xd(m);
  for (int i = 0; i < n; ++i) pd[i] = D1(p[i], pdot[i]);
  if (bundle.kind == BundleKind::Complex)
    project_c(pd.data(), Pd.data());
  else
    project_q(pd.data(), Pd.data());
  chart_fwd(chart, m, Pd.data(), xd.data());
  s.x.resize(m);
  s.u.resize(m);
  for (int i = 0; i < m; ++i) {
    s.x[i] = xd[i].v;
    s.u[i] = xd[i].d;
  }

  // v^a: frame components of the vertical part in the trivialization frame
  // E_a = p * Ad_{g^-1} xi_a (slotwise for the quaternionic bundle).
  Quatd g = bundle.fiber_coordinate(chart, p);
  s.v.resize(d);
  for (int a = 0; a < d; ++a) {
    Quatd xi = g.conj() * Quatd::basis(1 + a) * g;  // Ad_{g^-1} xi_a
    Eigen::VectorXd Ea(n);
    if (bundle.kind == BundleKind::Complex) {
      quat_to(quat_from(p.data()) * xi, Ea.data());
    } else {
      quat_to(quat_from(p.data()) * xi, Ea.data());
      quat_to(quat_from(p.data() + 4) * xi, Ea.data() + 4);
    }
    s.v[a] = pdot.dot(Ea);
  }
  return s;
}

/// Transfers a chart Wong state to the other chart: coordinates through the
/// sphere, velocity through the transition Jacobian, vertical components
/// through the adjoint action of the transition function.
inline WongState transition_state(const HopfBundle& bundle, Chart from, const WongState& s) {
  Chart to = from == Chart::North ? Chart::South : Chart::North;
  const int m = bundle.base_dim(), d = bundle.fiber_dim();
  WongState out;
  out.t = s.t;

  // transition map and its differential, one dual sweep with u as the seed
  std::vector<D1> xd(m), Pd(bundle.target_dim()), yd(m);
  out.x.resize(m);
  out.u.resize(m);
  for (int i = 0; i < m; ++i) xd[i] = D1(s.x[i], s.u[i]);
  chart_inv(from, m, xd.data(), Pd.data());
  chart_fwd(to, m, Pd.data(), yd.data());
  for (int i = 0; i < m; ++i) {
    out.x[i] = yd[i].v;
    out.u[i] = yd[i].d;
  }

  // transition function g_{to<-from}(x) = section_to(y)^-1 section_from(x)
  const int amb = bundle.ambient_dim();
  std::vector<double> sf(amb), st(amb);
  if (bundle.kind == BundleKind::Complex) {
    section_c(from, s.x.data(), sf.data());
    section_c(to, out.x.data(), st.data());
  } else {
    section_q(from, s.x.data(), sf.data());
    section_q(to, out.x.data(), st.data());
  }
  // The two sections hit the same fiber, so the transition function is
  // trans = s_to(y)^{-1} s_from(x), extracted from the better-conditioned
  // slot in the quaternionic case.
  Quatd gf, gt;
  if (bundle.kind == BundleKind::Complex) {
    gf = quat_from(sf.data());
    gt = quat_from(st.data());
  } else {
    Quatd a1 = quat_from(sf.data()), a2 = quat_from(sf.data() + 4);
    Quatd b1 = quat_from(st.data()), b2 = quat_from(st.data() + 4);
    bool first = value(b1.norm2()) >= value(b2.norm2());
    gf = first ? a1 : a2;
    gt = first ? b1 : b2;
  }
  Quatd trans = normalized(gt.conj() * gf);

  // v'^b = [Ad_trans xi_a]^b v^a: the vertical frame re-expresses through
  // the adjoint rotation of the transition function.
  out.v.resize(d);
  if (d == 1) {
    out.v = s.v;
  } else {
    Eigen::Matrix3d R;
    for (int b = 0; b < 3; ++b) {
      Quatd xi = trans * Quatd::basis(1 + b) * trans.conj();
      R(0, b) = xi.x;
      R(1, b) = xi.y;
      R(2, b) = xi.z;
    }
    out.v = R * s.v;
  }
  return out;
}

struct SphereLeg {
  Chart chart;
  Trajectory traj;
};

struct SphereTrajectory {
  std::vector<SphereLeg> legs;
  int swaps = 0;

  /// Sphere-point samples across all legs.
  std::vector<std::pair<double, Eigen::VectorXd>> sphere_samples(const HopfBundle& b) const {
    std::vector<std::pair<double, Eigen::VectorXd>> out;
    for (const auto& leg : legs)
      for (const auto& s : leg.traj.samples) out.emplace_back(s.t, from_chart(b, leg.chart, s.x));
    return out;
  }
};

/// Integrates the chart Wong system, hopping between the two stereographic
/// charts whenever the base point comes within swap_margin of the current
/// chart's excluded pole.
inline SphereTrajectory integrate_chart_swapped(const HopfBundle& bundle, Chart chart,
                                                WongState s, double t_end,
                                                const IntegrateOptions& opts,
                                                double swap_margin = 0.1) {
  KKLocalModel north = as_local_model(bundle, Chart::North);
  KKLocalModel south = as_local_model(bundle, Chart::South);

  SphereTrajectory out;
  out.legs.push_back({chart, Trajectory{}});
  out.legs.back().traj.method = opts.method;
  out.legs.back().traj.step = opts.h;
  out.legs.back().traj.samples.push_back(s);

  long n = static_cast<long>(std::ceil((t_end - s.t) / opts.h - 1e-12));
  double h = (t_end - s.t) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const KKLocalModel& model = chart == Chart::North ? north : south;
    // one rk4 step
    Eigen::VectorXd y = detail::pack(s);
    Eigen::VectorXd k1 = detail::rhs_packed(model, s.t, y);
    Eigen::VectorXd k2 = detail::rhs_packed(model, s.t + h / 2, y + (h / 2) * k1);
    Eigen::VectorXd k3 = detail::rhs_packed(model, s.t + h / 2, y + (h / 2) * k2);
    Eigen::VectorXd k4 = detail::rhs_packed(model, s.t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s = detail::unpack(model, s.t + h, y);
    out.legs.back().traj.samples.push_back(s);

    Eigen::VectorXd P = from_chart(bundle, chart, s.x);
    if ((P - chart_pole(bundle, chart)).norm() < swap_margin) {
      s = transition_state(bundle, chart, s);
      chart = chart == Chart::North ? Chart::South : Chart::North;
      ++out.swaps;
      out.legs.push_back({chart, Trajectory{}});
      out.legs.back().traj.method = opts.method;
      out.legs.back().traj.step = opts.h;
      out.legs.back().traj.samples.push_back(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Twisted immersions.
// ---------------------------------------------------------------------------

/// Torus family into S^3: (th1, th2) -> cos(alpha) e^{i th1} + sin(alpha) e^{i th2} j.
template <class T>
void clifford_map(double alpha, const T* th, T* out) {
  double ca = std::cos(alpha), sa = std::sin(alpha);
  out[0] = ca * cos(th[0]);
  out[1] = ca * sin(th[0]);
  out[2] = sa * cos(th[1]);
  out[3] = sa * sin(th[1]);
}

/// Stereographic chart of the unit S^3 factor (covers all but one pole).
template <class T>
void s3_from_stereo(const T* z, T* q) {
  T r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
  T den = 1.0 + r2;
  q[0] = (1.0 - r2) / den;
  for (int i = 0; i < 3; ++i) q[i + 1] = 2.0 * z[i] / den;
}

/// S^3 x S^3 family into S^7: (a, b) -> (cos(alpha) a, sin(alpha) b); the
/// factors enter through stereographic coordinates of the unit 3-sphere.
template <class T>
void spherical_map_stereo(double alpha, const T* z, T* out) {
  T a[4], b[4];
  s3_from_stereo(z, a);
  s3_from_stereo(z + 3, b);
  double ca = std::cos(alpha), sa = std::sin(alpha);
  for (int i = 0; i < 4; ++i) {
    out[i] = ca * a[i];
    out[4 + i] = sa * b[i];
  }
}

/// Immersion family evaluator with its domain bookkeeping.
struct TwistedImmersion {
  BundleKind kind;
  double alpha;

  int domain_dim() const { return kind == BundleKind::Complex ? 2 : 6; }
  int ambient_dim() const { return kind == BundleKind::Complex ? 4 : 8; }

  SmoothMap evaluator() const {
    double a = alpha;
    if (kind == BundleKind::Complex)
      return SmoothMap(2, 4, [a](const auto* th, auto* out) { clifford_map(a, th, out); });
    return SmoothMap(6, 8, [a](const auto* z, auto* out) { spherical_map_stereo(a, z, out); });
  }
};

inline TwistedImmersion twisted_map(double alpha, BundleKind kind) { return {kind, alpha}; }

/// Lorentz strength of a map at a domain point, evaluated through the ambient
/// frame pairings:  sum_r <(dPhi U_r)^V, F>((dPhi U_r)^H) for a g-orthonormal
/// domain frame {U_r}. Returns the ambient (horizontal) trace vector.
inline Eigen::VectorXd lorentz_strength_ambient(const HopfBundle& bundle,
                                                const Eigen::VectorXd& p,
                                                const std::vector<Eigen::VectorXd>& frame_images) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(bundle.ambient_dim());
  for (const auto& X : frame_images) {
    Eigen::VectorXd vert, horiz;
    bundle.split(p, X, vert, horiz);
    if (vert.norm() < 1e-15) continue;
    total += bundle.lorentz_endomorphism(p, vert, horiz);
  }
  return total;
}

/// Pointwise Lorentz strength norm of a twisted immersion; constant over the
/// domain for these families, so a few samples pin the profile value.
inline double charge_norm(const TwistedImmersion& im, int samples = 4, unsigned seed = 2024) {
  HopfBundle bundle = im.kind == BundleKind::Complex ? HopfBundle::complex_bundle()
                                                     : HopfBundle::quaternionic_bundle();
  SmoothMap f = im.evaluator();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = im.domain_dim();

  double worst = 0.0;
  for (int trial = 0; trial < samples; ++trial) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = im.kind == BundleKind::Complex ? M_PI * unif(rng) : 0.6 * unif(rng);
    Eigen::VectorXd p;
    Eigen::MatrixXd jac;
    f.jet1(y, p, jac);
    // orthonormal domain frame: flat unit torus / conformal round factors
    std::vector<Eigen::VectorXd> images;
    for (int r = 0; r < n; ++r) {
      double scale = 1.0;
      if (im.kind == BundleKind::Quaternionic) {
        const double r2 = y.segment(r < 3 ? 0 : 3, 3).squaredNorm();
        scale = (1.0 + r2) / 2.0;  // inverse sqrt of 4/(1+r2)^2
      }
      images.push_back(scale * jac.col(r));
    }
    Eigen::VectorXd pn = p / p.norm();
    worst = std::max(worst, lorentz_strength_ambient(bundle, pn, images).norm());
  }
  return worst;
}

struct ChargeProfilePoint {
  double alpha;
  double norm;
};

/// Sweeps the Lorentz strength norm over an alpha grid.
inline std::vector<ChargeProfilePoint> charge_profile(BundleKind kind, double lo, double hi,
                                                      int count) {
  if (count < 2 || lo >= hi) throw input_error("charge_profile: bad alpha grid");
  std::vector<ChargeProfilePoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double a = lo + (hi - lo) * i / (count - 1);
    out.push_back({a, charge_norm(twisted_map(a, kind))});
  }
  return out;
}

/// Locates the interior zero of the profile: scan for the minimum, then
/// bisect on the sign of d(norm^2)/dalpha (the norm itself has no sign).
inline double find_profile_zero(BundleKind kind, double lo, double hi, double tol = 1e-8,
                                int scan = 64) {
  int best = -1;
  double best_norm = 0.0;
  for (int i = 1; i + 1 < scan; ++i) {
    double a = lo + (hi - lo) * i / (scan - 1);
    double nn = charge_norm(twisted_map(a, kind));
    if (best < 0 || nn < best_norm) {
      best = i;
      best_norm = nn;
    }
  }
  double blo = lo + (hi - lo) * (best - 1) / (scan - 1);
  double bhi = lo + (hi - lo) * (best + 1) / (scan - 1);

  auto dsq = [&](double a) {
    double h = 1e-5;
    double np = charge_norm(twisted_map(a + h, kind));
    double nm = charge_norm(twisted_map(a - h, kind));
    return (np * np - nm * nm) / (2.0 * h);
  };
  if (dsq(blo) >= 0.0 || dsq(bhi) <= 0.0)
    throw numeric_error("find_profile_zero: scan minimum is not bracketed");
  while (bhi - blo > tol) {
    double mid = 0.5 * (blo + bhi);
    if (dsq(mid) < 0.0)
      blo = mid;
    else
      bhi = mid;
  }
  return 0.5 * (blo + bhi);
}

}  // namespace hopf
}  // namespace kaluza

#endif
