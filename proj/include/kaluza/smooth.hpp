#ifndef KALUZA_SMOOTH_HPP
#define KALUZA_SMOOTH_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "kaluza/dual.hpp"
#include "kaluza/errors.hpp"

namespace kaluza {

enum class DerivMode { Analytic, FiniteDifference };

/// Type-erased smooth map R^n -> R^m, evaluable on plain doubles and on
/// (nested) dual numbers so built-in models expose exact derivatives.
/// The generic functor must be callable as f(const T* in, T* out).
class SmoothMap {
 public:
  SmoothMap() = default;

  template <class F>
  SmoothMap(int in, int out, F f) : in_(in), out_(out) {
    f0_ = [f](const double* x, double* y) { f(x, y); };
    f1_ = [f](const D1* x, D1* y) { f(x, y); };
    f2_ = [f](const D2* x, D2* y) { f(x, y); };
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  bool valid() const { return static_cast<bool>(f0_); }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(out_);
    f0_(x.data(), y.data());
    return y;
  }

  void eval(const double* x, double* y) const { f0_(x, y); }
  void eval(const D1* x, D1* y) const { f1_(x, y); }
  void eval(const D2* x, D2* y) const { f2_(x, y); }

  /// Value and Jacobian (out x in) by forward-mode sweeps.
  void jet1(const Eigen::VectorXd& x, Eigen::VectorXd& value, Eigen::MatrixXd& jac) const {
    std::vector<D1> xs(in_), ys(out_);
    value.resize(out_);
    jac.resize(out_, in_);
    for (int dir = 0; dir < in_; ++dir) {
      for (int i = 0; i < in_; ++i) xs[i] = D1(x[i], i == dir ? 1.0 : 0.0);
      f1_(xs.data(), ys.data());
      for (int o = 0; o < out_; ++o) jac(o, dir) = ys[o].d;
      if (dir == 0)
        for (int o = 0; o < out_; ++o) value[o] = ys[o].v;
    }
  }

  /// Directional second derivative d^2/ds dt f(x + s e_a + t e_b).
  void hess_dir(const Eigen::VectorXd& x, int a, int b, Eigen::VectorXd& out) const {
    std::vector<D2> xs(in_), ys(out_);
    for (int i = 0; i < in_; ++i) {
      xs[i].v = D1(x[i], i == a ? 1.0 : 0.0);
      xs[i].d = D1(i == b ? 1.0 : 0.0, 0.0);
    }
    f2_(xs.data(), ys.data());
    out.resize(out_);
    for (int o = 0; o < out_; ++o) out[o] = ys[o].d.d;
  }

 private:
  int in_ = 0, out_ = 0;
  std::function<void(const double*, double*)> f0_;
  std::function<void(const D1*, D1*)> f1_;
  std::function<void(const D2*, D2*)> f2_;
};

}  // namespace kaluza

#endif
