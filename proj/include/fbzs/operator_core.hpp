#pragma once

// Potential q(x) = A dn(x|m), the focusing Zakharov-Shabat right-hand side
// and the closed-form fundamental matrix at z = 0.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fbzs/elliptic.hpp"

namespace fbzs {

using cplx = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using Mat2r = Eigen::Matrix2d;

class PotentialSpec {
public:
    PotentialSpec(double A, double m) : A_(A), m_(m) {
        if (!(A > 0) || !std::isfinite(A))
            throw std::domain_error("amplitude A must be positive and finite, got " + std::to_string(A));
        period_ = 2.0 * complete_elliptic_K(m_);
    }
    double amplitude() const { return A_; }
    double m() const { return m_.value(); }
    const EllipticParameter& parameter() const { return m_; }
    double period() const { return period_; }
    double quarter_K() const { return period_ / 2; }  // K(m)

    bool integer_amplitude() const { return A_ == std::round(A_); }
    int integer_A() const {
        if (!integer_amplitude()) throw std::domain_error("amplitude is not a positive integer");
        return static_cast<int>(std::lround(A_));
    }

private:
    double A_;
    EllipticParameter m_;
    double period_;
};

struct SpectralPoint {
    cplx z;
    cplx lambda() const { return z * z; }
};

enum class FloquetKind { periodic, antiperiodic, generic };

inline const char* to_string(FloquetKind k) {
    switch (k) {
    case FloquetKind::periodic: return "periodic";
    case FloquetKind::antiperiodic: return "antiperiodic";
    default: return "generic";
    }
}

// nu is the Floquet phase measured in units of 2*pi per period, so nu in Z
// means periodic and nu in Z + 1/2 antiperiodic.
struct FloquetExponent {
    double nu = 0;
    FloquetKind kind = FloquetKind::periodic;

    static FloquetExponent from_nu(double nu, double eps = 1e-12) {
        double frac = nu - std::floor(nu);
        FloquetKind k = FloquetKind::generic;
        if (frac < eps || 1 - frac < eps) k = FloquetKind::periodic;
        else if (std::abs(frac - 0.5) < eps) k = FloquetKind::antiperiodic;
        return {nu, k};
    }
};

inline double potential_eval(const PotentialSpec& spec, double x) {
    return spec.amplitude() * jacobi_dn(x, spec.parameter());
}

inline Vec2c zs_rhs_with_q(double q, cplx z, const Vec2c& phi) {
    const cplx iz(-z.imag(), z.real());
    return Vec2c(-iz * phi(0) + q * phi(1), -q * phi(0) + iz * phi(1));
}

inline Vec2c zs_rhs(const PotentialSpec& spec, cplx z, const Vec2c& phi, double x) {
    return zs_rhs_with_q(potential_eval(spec, x), z, phi);
}

// Columns (cos t, -sin t) and (sin t, cos t) with t = A am(x|m).
inline Mat2r zero_energy_fundamental(const PotentialSpec& spec, double x) {
    const double t = spec.amplitude() * jacobi_am(x, spec.m());
    const double c = std::cos(t), s = std::sin(t);
    Mat2r R;
    R << c, s, -s, c;
    return R;
}

} // namespace fbzs
