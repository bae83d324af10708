#pragma once

// Monodromy matrix, Floquet discriminant and the (Delta, c, s) split
// M = Delta I + c sigma3 - i s sigma2.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "fbzs/ode.hpp"
#include "fbzs/operator_core.hpp"

namespace fbzs {

struct MonodromyData {
    cplx z;
    double x0 = 0;
    Mat2c M = Mat2c::Identity();
    cplx Delta, c, s;
    double est_error = 0;
};

inline const Mat2c& pauli1() {
    static const Mat2c p = (Mat2c() << 0, 1, 1, 0).finished();
    return p;
}
inline const Mat2c& pauli2() {
    static const Mat2c p = (Mat2c() << 0, cplx(0, -1), cplx(0, 1), 0).finished();
    return p;
}
inline const Mat2c& pauli3() {
    static const Mat2c p = (Mat2c() << 1, 0, 0, -1).finished();
    return p;
}

inline Mat2c fundamental_solution(const PotentialSpec& spec, cplx z, double x_from, double x_to,
                                  double tol, IntegratorStats* stats = nullptr) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    IntegratorOptions opt;
    opt.atol = opt.rtol = tol;
    const cplx iz(-z.imag(), z.real());
    auto rhs = [&](double x, const Mat2c& Y) {
        const double q = potential_eval(spec, x);
        Mat2c D;
        D(0, 0) = -iz * Y(0, 0) + q * Y(1, 0);
        D(0, 1) = -iz * Y(0, 1) + q * Y(1, 1);
        D(1, 0) = -q * Y(0, 0) + iz * Y(1, 0);
        D(1, 1) = -q * Y(0, 1) + iz * Y(1, 1);
        return D;
    };
    return integrate_dopri5<Mat2c>(rhs, x_from, x_to, Mat2c::Identity(), opt, stats);
}

namespace detail {

inline void split_dcs(MonodromyData& d) {
    d.Delta = (d.M(0, 0) + d.M(1, 1)) / 2.0;
    d.c = (d.M(0, 0) - d.M(1, 1)) / 2.0;
    d.s = (d.M(1, 0) - d.M(0, 1)) / 2.0;
}

} // namespace detail

// est_error is |det M - 1|; with richardson set it also includes the
// difference to a run at tol/10.
inline MonodromyData monodromy(const PotentialSpec& spec, cplx z, double x0 = 0.0,
                               double tol = 1e-11, bool richardson = false) {
    MonodromyData d;
    d.z = z;
    d.x0 = x0;
    d.M = fundamental_solution(spec, z, x0, x0 + spec.period(), tol);
    d.est_error = std::abs(d.M.determinant() - 1.0);
    if (richardson) {
        Mat2c fine = fundamental_solution(spec, z, x0, x0 + spec.period(), tol / 10);
        d.est_error = std::max(d.est_error, (fine - d.M).cwiseAbs().maxCoeff());
    }
    if (x0 == 0.0) {
        detail::split_dcs(d);
    } else {
        d.Delta = (d.M(0, 0) + d.M(1, 1)) / 2.0;
        d.c = d.s = cplx(std::nan(""), std::nan(""));
    }
    return d;
}

inline cplx discriminant(const PotentialSpec& spec, cplx z, double tol = 1e-11) {
    Mat2c M = fundamental_solution(spec, z, 0.0, spec.period(), tol);
    return (M(0, 0) + M(1, 1)) / 2.0;
}

// m = 0: M = cos(w pi) I - i sin(w pi)/w (z sigma3 - A sigma2), w^2 = z^2 + A^2.
inline MonodromyData closed_form_m0(double A, cplx z) {
    using std::numbers::pi;
    const cplx w2 = z * z + A * A;
    const cplx w = std::sqrt(w2);
    cplx cosw, sinc;  // sinc = sin(w pi)/w
    if (std::abs(w) < 1e-4) {
        // Taylor series in u = (w pi)^2, six terms each.
        const cplx u = w2 * (pi * pi);
        cplx term_c = 1.0, term_s = pi;
        cosw = 0.0;
        sinc = 0.0;
        for (int k = 0; k < 6; ++k) {
            cosw += term_c;
            sinc += term_s;
            term_c *= -u / double((2 * k + 1) * (2 * k + 2));
            term_s *= -u / double((2 * k + 2) * (2 * k + 3));
        }
    } else {
        cosw = std::cos(w * pi);
        sinc = std::sin(w * pi) / w;
    }
    MonodromyData d;
    d.z = z;
    d.x0 = 0;
    const cplx mi(0, -1);
    d.M = cosw * Mat2c::Identity() + mi * sinc * (z * pauli3() - A * pauli2());
    d.Delta = cosw;
    d.c = mi * z * sinc;
    d.s = -A * sinc;
    d.est_error = 0;
    return d;
}

struct SymmetrySample {
    cplx z;
    double det_residual = 0;
    double schwarz_residual = 0;
    double reflection_residual = 0;  // M(-conj z) = conj(M(z))
    double evenness_residual = 0;    // |Delta(-z) - Delta(z)|
    double reality_residual = 0;     // axis-dependent realness pattern, 0 off the axes
    double zero_residual = 0;        // |Delta(0) - (-1)^A| when z = 0 and A integer
};

struct SymmetryReport {
    std::vector<SymmetrySample> samples;
    std::vector<std::string> violations;
    double max_residual = 0;
    bool ok() const { return violations.empty(); }
};

inline SymmetryReport symmetry_report(const PotentialSpec& spec, const std::vector<cplx>& z_samples,
                                      double tol, double integ_tol = 1e-11) {
    SymmetryReport rep;
    const Mat2c& s2 = pauli2();
    for (const cplx& z : z_samples) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("symmetry_report: non-finite sample");
        SymmetrySample r;
        r.z = z;
        MonodromyData d = monodromy(spec, z, 0.0, integ_tol);
        MonodromyData dc = monodromy(spec, std::conj(z), 0.0, integ_tol);
        MonodromyData dn = monodromy(spec, -z, 0.0, integ_tol);
        MonodromyData dr = monodromy(spec, -std::conj(z), 0.0, integ_tol);
        r.det_residual = std::abs(d.M.determinant() - 1.0);
        r.schwarz_residual = (Mat2c(dc.M.conjugate()) - s2 * d.M * s2).cwiseAbs().maxCoeff();
        r.reflection_residual = (dr.M - Mat2c(d.M.conjugate())).cwiseAbs().maxCoeff();
        r.evenness_residual = std::abs(dn.Delta - d.Delta);
        if (z.imag() == 0.0) {
            r.reality_residual = std::max({std::abs(d.Delta.imag()), std::abs(d.s.imag()),
                                           std::abs(d.c.real())});
        } else if (z.real() == 0.0) {
            r.reality_residual = std::max({std::abs(d.Delta.imag()), std::abs(d.s.imag()),
                                           std::abs(d.c.imag())});
        }
        if (z == cplx(0, 0) && spec.integer_amplitude()) {
            const double sign = spec.integer_A() % 2 == 0 ? 1.0 : -1.0;
            r.zero_residual = std::abs(d.Delta - sign);
        }
        const std::pair<const char*, double> checks[] = {
            {"det", r.det_residual},           {"schwarz", r.schwarz_residual},
            {"reflection", r.reflection_residual}, {"evenness", r.evenness_residual},
            {"reality", r.reality_residual},   {"zero", r.zero_residual}};
        for (auto& [name, v] : checks) {
            rep.max_residual = std::max(rep.max_residual, v);
            if (!(v <= tol))
                rep.violations.push_back(std::string(name) + " at z=(" + std::to_string(z.real()) + "," +
                                         std::to_string(z.imag()) + "): " + std::to_string(v));
        }
        rep.samples.push_back(r);
    }
    return rep;
}

} // namespace fbzs
