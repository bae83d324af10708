#pragma once

// Jacobi elliptic functions and the complete integral K(m) via the
// arithmetic-geometric mean.

#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fbzs {

class EllipticParameter {
public:
    explicit EllipticParameter(double m) : m_(m) {
        if (!(m >= 0.0 && m < 1.0))
            throw std::domain_error("elliptic parameter must satisfy 0 <= m < 1, got " +
                                    std::to_string(m));
    }
    double value() const { return m_; }
    double complement() const { return 1.0 - m_; }

private:
    double m_;
};

struct EllipticValues {
    double x = 0, am = 0, sn = 0, cn = 0, dn = 1;
};

namespace detail {

// AGM ladder: a_i and c_i for i = 0..n.  Thirty rungs is far beyond what
// quadratic convergence needs for m < 1.
template <std::floating_point Real>
struct AgmLadder {
    std::array<Real, 32> a{};
    std::array<Real, 32> c{};
    int n = 0;
};

template <std::floating_point Real>
AgmLadder<Real> agm_ladder(Real m) {
    AgmLadder<Real> L;
    Real a = 1, b = std::sqrt(Real(1) - m);
    L.a[0] = a;
    L.c[0] = std::sqrt(m);
    const Real eps = std::numeric_limits<Real>::epsilon();
    int i = 0;
    while (std::abs(L.c[i]) > eps * a && i < 30) {
        Real an = (a + b) / 2;
        Real cn = (a - b) / 2;
        b = std::sqrt(a * b);
        a = an;
        ++i;
        L.a[i] = a;
        L.c[i] = cn;
    }
    L.n = i;
    return L;
}

} // namespace detail

template <std::floating_point Real>
Real complete_elliptic_K(Real m) {
    if (!(m >= 0 && m < 1)) throw std::domain_error("complete_elliptic_K: m outside [0,1)");
    auto L = detail::agm_ladder(m);
    return std::numbers::pi_v<Real> / (2 * L.a[L.n]);
}

inline double complete_elliptic_K(const EllipticParameter& m) {
    return complete_elliptic_K(m.value());
}

// Amplitude am(x|m), with reduction x = 2nK + r so that am = n*pi + am(r).
template <std::floating_point Real>
Real jacobi_am(Real x, Real m) {
    if (!(m >= 0 && m < 1)) throw std::domain_error("jacobi_am: m outside [0,1)");
    if (!std::isfinite(x)) throw std::domain_error("jacobi_am: non-finite argument");
    auto L = detail::agm_ladder(m);
    const Real K = std::numbers::pi_v<Real> / (2 * L.a[L.n]);
    const Real n = std::round(x / (2 * K));
    const Real r = x - 2 * n * K;
    Real phi = std::ldexp(L.a[L.n] * r, L.n);
    for (int i = L.n; i >= 1; --i) phi = (phi + std::asin(L.c[i] / L.a[i] * std::sin(phi))) / 2;
    return n * std::numbers::pi_v<Real> + phi;
}

inline EllipticValues jacobi_functions(double x, const EllipticParameter& m) {
    EllipticValues v;
    v.x = x;
    v.am = jacobi_am(x, m.value());
    v.sn = std::sin(v.am);
    v.cn = std::cos(v.am);
    // cn^2 + m' sn^2 avoids the cancellation in 1 - m sn^2 near m -> 1.
    v.dn = std::sqrt(v.cn * v.cn + m.complement() * v.sn * v.sn);
    return v;
}

inline double jacobi_dn(double x, const EllipticParameter& m) {
    return jacobi_functions(x, m).dn;
}

} // namespace fbzs
