#pragma once

// Heun-equation view of the spectral problem: singular points, Frobenius
// exponents, Frobenius series and the Perron continued-fraction test.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbzs/tridiag.hpp"

namespace fbzs {

struct SingularPoints {
    double zeta1 = 0;  // in (-1, 0)
    double zeta2 = 0;  // in (-inf, -1)
};

// zeta1 = (m - 2 + 2 sqrt(1-m))/m written as -m/(1 + sqrt(1-m))^2 to avoid
// cancellation at small m.
inline SingularPoints singular_points(const EllipticParameter& m) {
    if (m.value() == 0.0) throw std::domain_error("singular_points: m = 0 degenerates the Heun equation");
    const double r = 1 + std::sqrt(m.complement());
    SingularPoints p;
    p.zeta1 = -m.value() / (r * r);
    p.zeta2 = 1 / p.zeta1;
    return p;
}

struct HeunCoefficients {
    std::complex<double> F, G, H;
};

inline HeunCoefficients heun_polynomials(std::complex<double> zeta, double lambda, double A, double m) {
    const auto z2 = zeta * zeta;
    return {-m * z2 + (2 * m - 4) * zeta - m, -1.5 * m * z2 + (2 * m - 4) * zeta - 0.5 * m,
            0.25 * A * (A + 1) * m * z2 + (lambda + A * A * (1 - m / 2)) * zeta + 0.25 * A * (A - 1) * m};
}

struct ExponentPair {
    double rho1, rho2;
};

struct FrobeniusExponents {
    ExponentPair at0, at1, at2, atInf;
    bool rho1_integer = false;   // rho1 at 0 and infinity
    bool rho2_integer = false;   // rho2 at 0 and infinity
    bool resonant = false;       // exponent difference integer at 0 or infinity
};

inline FrobeniusExponents frobenius_exponent_table(double A) {
    if (!(A > 0)) throw std::domain_error("frobenius_exponent_table: A must be positive");
    FrobeniusExponents e;
    e.at0 = {A / 2, -(A - 1) / 2};
    e.at1 = {0, 0.5};
    e.at2 = {0, -0.5};
    e.atInf = {A / 2, -(A + 1) / 2};
    auto is_int = [](double x) { return x == std::round(x); };
    e.rho1_integer = is_int(e.at0.rho1);
    e.rho2_integer = is_int(e.at0.rho2);
    e.resonant = is_int(e.at0.rho2 - e.at0.rho1) || is_int(e.atInf.rho1 - e.atInf.rho2);
    return e;
}

// Exponent attached to each recurrence family.
inline double family_exponent(const RecurrenceFamily& f) {
    switch (f.tag) {
    case FamilyTag::ToMinus: return f.A / 2;
    case FamilyTag::ToPlus: return -(f.A - 1) / 2;
    case FamilyTag::TinfMinus: return f.A / 2;
    case FamilyTag::TinfPlus: return -(f.A + 1) / 2;
    default: throw std::invalid_argument("family_exponent: not a Heun family");
    }
}

inline bool expansion_at_infinity(const RecurrenceFamily& f) {
    return f.tag == FamilyTag::TinfMinus || f.tag == FamilyTag::TinfPlus;
}

class perron_breakdown : public std::runtime_error {
public:
    perron_breakdown(const std::string& what, long level) : std::runtime_error(what), level_(level) {}
    long level() const { return level_; }

private:
    long level_;
};

// e0/f0 minus the continued fraction d1/(e1 - d2 f1/(e2 - ...)), truncated
// at depth and closed with the minimal Perron ratio zeta1.  Wherever
// d_k = 0 the recurrence splits; the residual is then the product of the
// block residuals, so the roots are the union of the block spectra.
//
// pivot > 0 evaluates the same condition unfolded to row pivot: the ratio
// c_{k-1}/c_k carried forward from the n = 0 relation meets the tail ratio
// c_{k+1}/c_k from the backward sweep.  The roots are unchanged but the
// poles move away from eigenvalues whose eigenvector lives near that row.
inline double perron_residual(const RecurrenceFamily& f, double lambda, long depth, long pivot = 0) {
    if (depth < 1) throw std::invalid_argument("perron_residual: depth must be >= 1");
    if (pivot < 0 || pivot >= depth) throw std::invalid_argument("perron_residual: pivot outside [0, depth)");
    const long double xi = singular_points(f.m).zeta1;
    std::vector<HeunRow> rows(static_cast<std::size_t>(depth) + 2);
    for (long n = 0; n <= depth + 1; ++n) rows[n] = heun_coefficients(f, n);
    auto e = [&](long n) { return static_cast<long double>(rows[n].diag) - lambda; };

    if (pivot == 0) {
        long double result = 1;
        long double r_next = xi;  // c_{n+1}/c_n
        for (long n = depth; n >= 0; --n) {
            const HeunRow& row = rows[n];
            const long double D = e(n) + row.sup * r_next;
            if (n == 0 || row.sub == 0.0) {
                if (row.sup == 0.0) throw perron_breakdown("perron_residual: f_n = 0", n);
                result *= D / row.sup;
                r_next = 0;
                continue;
            }
            if (D == 0.0L) throw perron_breakdown("perron_residual: zero denominator", n);
            r_next = -static_cast<long double>(row.sub) / D;
        }
        return static_cast<double>(result);
    }

    long double r = xi;
    for (long n = depth; n > pivot; --n) {
        const long double D = e(n) + rows[n].sup * r;
        if (D == 0.0L) throw perron_breakdown("perron_residual: zero denominator", n);
        r = -static_cast<long double>(rows[n].sub) / D;
    }
    long double t = 0;  // c_{n-1}/c_n
    for (long n = 0; n < pivot; ++n) {
        const long double D = e(n) + (rows[n].sub == 0.0 ? 0.0L : rows[n].sub * t);
        if (D == 0.0L) throw perron_breakdown("perron_residual: zero denominator in forward sweep", n);
        t = -static_cast<long double>(rows[n].sup) / D;
    }
    const HeunRow& k = rows[pivot];
    if (k.sup == 0.0) throw perron_breakdown("perron_residual: f_n = 0", pivot);
    return static_cast<double>((e(pivot) + k.sup * r + (k.sub == 0.0 ? 0.0L : k.sub * t)) / k.sup);
}

// Row whose diagonal is closest to lambda; the natural pivot for an
// eigenvalue near lambda.
inline long perron_pivot(const RecurrenceFamily& f, double lambda, long depth) {
    long best = 0;
    double dist = std::abs(heun_coefficients(f, 0).diag - lambda);
    for (long n = 1; n < depth / 2; ++n) {
        const double d = std::abs(heun_coefficients(f, n).diag - lambda);
        if (d < dist) {
            dist = d;
            best = n;
        }
    }
    return best;
}

// Roots of perron_residual in [lo, hi]: sign changes on a uniform grid,
// bisected, then rejected if the residual blows up (a pole).
inline std::vector<double> perron_roots(const RecurrenceFamily& f, double lo, double hi, int samples,
                                        long depth, double xtol = 1e-12, long pivot = 0) {
    std::vector<double> roots;
    auto g = [&](double x) { return perron_residual(f, x, depth, pivot); };
    double xa = lo, ga = g(lo);
    for (int i = 1; i <= samples; ++i) {
        const double xb = lo + (hi - lo) * i / samples;
        const double gb = g(xb);
        if (ga == 0.0) {
            roots.push_back(xa);
        } else if ((ga < 0) != (gb < 0) && gb != 0.0) {
            double a = xa, b = xb, fa = ga;
            while (b - a > xtol * (1 + std::abs(a))) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                const double fm = g(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fm < 0) == (fa < 0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            const double x = 0.5 * (a + b);
            if (std::abs(g(x)) < 1e-3 * (1 + std::abs(ga) + std::abs(gb))) roots.push_back(x);
        }
        xa = xb;
        ga = gb;
    }
    if (ga == 0.0) roots.push_back(xa);
    return roots;
}

struct FrobeniusSum {
    std::complex<double> value;
    double tail_estimate = 0;
    double ratio_estimate = 0;
    bool within_radius = true;
};

// zeta^rho sum c_n w^n with w = zeta (expansion at 0) or 1/zeta (at
// infinity), c_0 = 1.  Coefficients are carried as a rescaled pair in long
// double; the log of the scale is tracked separately.
inline FrobeniusSum frobenius_series_sum(const RecurrenceFamily& f, double lambda, std::complex<double> zeta,
                                         long n_max) {
    using ld = long double;
    using cld = std::complex<ld>;
    if (n_max < 1) throw std::invalid_argument("frobenius_series_sum: n_max must be >= 1");
    const double rho = family_exponent(f);
    const bool at_inf = expansion_at_infinity(f);
    FrobeniusSum out;

    if (zeta == 0.0) {
        if (at_inf) throw std::domain_error("frobenius_series_sum: expansion at infinity evaluated at 0");
        if (rho > 0) out.value = 0.0;
        else if (rho == 0) out.value = 1.0;
        else throw std::domain_error("frobenius_series_sum: negative exponent at zeta = 0");
    }
    const cld w = zeta == 0.0 ? cld(0) : (at_inf ? cld(1) / cld(zeta) : cld(zeta));
    const cld logw = w == cld(0) ? cld(0) : std::log(w);

    ld a = 0, b = 1;  // c_{n-1}, c_n in units of exp(L)
    ld L = 0;
    cld sum = 1;
    cld last_term = 1;
    ld ratio = 0;
    for (long n = 0; n < n_max; ++n) {
        const HeunRow row = heun_coefficients(f, n);
        if (row.sup == 0.0) throw perron_breakdown("frobenius_series_sum: f_n = 0", n);
        const ld c = -(static_cast<ld>(row.sub) * a + (static_cast<ld>(row.diag) - lambda) * b) / row.sup;
        if (b != 0) ratio = std::abs(c / b);
        a = b;
        b = c;
        const ld s = std::max(std::abs(a), std::abs(b));
        if (s > 1e100L || (s < 1e-100L && s > 0)) {
            a /= s;
            b /= s;
            L += std::log(s);
        }
        if (w != cld(0) && b != 0) {
            last_term = std::exp(std::log(cld(b)) + L + ld(n + 1) * logw);
            sum += last_term;
        } else {
            last_term = 0;
        }
    }
    out.ratio_estimate = static_cast<double>(ratio);
    if (zeta == 0.0) return out;

    const ld q = ratio * std::abs(w);
    out.within_radius = q < 1;
    out.tail_estimate = out.within_radius ? static_cast<double>(std::abs(last_term) * q / (1 - q))
                                          : std::numeric_limits<double>::infinity();
    const cld pref = std::exp(ld(rho) * std::log(cld(zeta)));
    out.value = std::complex<double>(pref * sum);
    return out;
}

} // namespace fbzs
