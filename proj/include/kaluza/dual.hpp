#ifndef KALUZA_DUAL_HPP
#define KALUZA_DUAL_HPP

#include <cmath>
#include <type_traits>

namespace kaluza {

/// Forward-mode dual number carrying one directional derivative.
/// Nest as Dual<Dual<double>> for second derivatives.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // directional derivative

  Dual() = default;
  Dual(T value) : v(value) {}
  Dual(T value, T deriv) : v(value), d(deriv) {}
  Dual(double value) requires(!std::is_same_v<T, double>) : v(value) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) { d = (d * o.v - v * o.d) / (o.v * o.v); v /= o.v; return *this; }
};

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }

template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return Dual<T>(T(a)) + b; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return Dual<T>(T(a)) - b; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return Dual<T>(T(a)) * b; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(T(a)) / b; }
template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return a + Dual<T>(T(b)); }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return a - Dual<T>(T(b)); }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return a * Dual<T>(T(b)); }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return a / Dual<T>(T(b)); }

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T> Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), a.d * cos(a.v)}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -a.d * sin(a.v)}; }
template <class T> Dual<T> exp(const Dual<T>& a) { T e = exp(a.v); return {e, a.d * e}; }
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }

/// Strips all derivative parts; handy in generic code.
inline double value(double x) { return x; }
template <class T> auto value(const Dual<T>& x) { return value(x.v); }

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

}  // namespace kaluza

#endif
