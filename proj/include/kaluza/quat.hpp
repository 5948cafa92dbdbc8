#ifndef KALUZA_QUAT_HPP
#define KALUZA_QUAT_HPP

#include <array>
#include <cstddef>
#include <type_traits>

#include "kaluza/dual.hpp"

namespace kaluza {

/// Quaternion over an arbitrary scalar (double or Dual) in basis {1, i, j, k}.
template <class T>
struct Quat {
  T w{}, x{}, y{}, z{};

  Quat() = default;
  Quat(T w_, T x_, T y_, T z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat one() { return {T(1), T(0), T(0), T(0)}; }
  static Quat basis(int a) {
    Quat q;
    q[a] = T(1);
    return q;
  }

  T& operator[](int a) { return (&w)[a]; }
  const T& operator[](int a) const { return (&w)[a]; }

  Quat conj() const { return {w, -x, -y, -z}; }
  T norm2() const { return w * w + x * x + y * y + z * z; }
  T norm() const { using kaluza::sqrt; using std::sqrt; return sqrt(norm2()); }

  Quat& operator+=(const Quat& o) { w += o.w; x += o.x; y += o.y; z += o.z; return *this; }
  Quat& operator-=(const Quat& o) { w -= o.w; x -= o.x; y -= o.y; z -= o.z; return *this; }
};

template <class T> Quat<T> operator+(Quat<T> a, const Quat<T>& b) { return a += b; }
template <class T> Quat<T> operator-(Quat<T> a, const Quat<T>& b) { return a -= b; }
template <class T> Quat<T> operator-(const Quat<T>& a) { return {-a.w, -a.x, -a.y, -a.z}; }

template <class T> Quat<T> operator*(const T& s, const Quat<T>& a) {
  return {s * a.w, s * a.x, s * a.y, s * a.z};
}
template <class T>
Quat<T> operator*(double s, const Quat<T>& a) requires(!std::is_same_v<T, double>) {
  return {s * a.w, s * a.x, s * a.y, s * a.z};
}

template <class T>
Quat<T> operator*(const Quat<T>& a, const Quat<T>& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

template <class T>
T dot(const Quat<T>& a, const Quat<T>& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
Quat<T> normalized(const Quat<T>& a) {
  T n = a.norm();
  return {a.w / n, a.x / n, a.y / n, a.z / n};
}

/// Commutator ab - ba.
template <class T>
Quat<T> commutator(const Quat<T>& a, const Quat<T>& b) {
  return a * b - b * a;
}

/// Octonion as a Cayley-Dickson pair of quaternions,
/// basis {1, i, j, k, l, il, jl, kl} with (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
template <class T>
struct Oct {
  Quat<T> p{}, q{};

  Oct() = default;
  Oct(Quat<T> p_, Quat<T> q_) : p(p_), q(q_) {}

  static Oct one() { return {Quat<T>::one(), Quat<T>{}}; }
  static Oct basis(int a) {
    Oct o;
    o[a] = T(1);
    return o;
  }

  T& operator[](int a) { return a < 4 ? p[a] : q[a - 4]; }
  const T& operator[](int a) const { return a < 4 ? p[a] : q[a - 4]; }

  Oct conj() const { return {p.conj(), -q}; }
  T norm2() const { return p.norm2() + q.norm2(); }
  T norm() const { using kaluza::sqrt; using std::sqrt; return sqrt(norm2()); }

  Oct& operator+=(const Oct& o) { p += o.p; q += o.q; return *this; }
  Oct& operator-=(const Oct& o) { p -= o.p; q -= o.q; return *this; }
};

template <class T> Oct<T> operator+(Oct<T> a, const Oct<T>& b) { return a += b; }
template <class T> Oct<T> operator-(Oct<T> a, const Oct<T>& b) { return a -= b; }
template <class T> Oct<T> operator-(const Oct<T>& a) { return {-a.p, -a.q}; }
template <class T> Oct<T> operator*(const T& s, const Oct<T>& a) { return {s * a.p, s * a.q}; }
template <class T>
Oct<T> operator*(double s, const Oct<T>& a) requires(!std::is_same_v<T, double>) {
  return {s * a.p, s * a.q};
}

template <class T>
Oct<T> operator*(const Oct<T>& a, const Oct<T>& b) {
  return {a.p * b.p - b.q.conj() * a.q, b.q * a.p + a.q * b.p.conj()};
}

template <class T>
T dot(const Oct<T>& a, const Oct<T>& b) {
  return dot(a.p, b.p) + dot(a.q, b.q);
}

template <class T>
Oct<T> commutator(const Oct<T>& a, const Oct<T>& b) {
  return a * b - b * a;
}

using Quatd = Quat<double>;
using Octd = Oct<double>;

}  // namespace kaluza

#endif
