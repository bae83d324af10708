#pragma once

// Three-term recurrence operators: the Fourier operator B_nu and the four
// Heun-recurrence families, their truncations and eigenvalues.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbzs/elliptic.hpp"

namespace fbzs {

enum class FamilyTag { Bnu, ToMinus, ToPlus, TinfMinus, TinfPlus };

inline const char* to_string(FamilyTag t) {
    switch (t) {
    case FamilyTag::Bnu: return "Bnu";
    case FamilyTag::ToMinus: return "ToMinus";
    case FamilyTag::ToPlus: return "ToPlus";
    case FamilyTag::TinfMinus: return "TinfMinus";
    default: return "TinfPlus";
    }
}

inline FamilyTag family_from_string(const std::string& s) {
    for (FamilyTag t : {FamilyTag::Bnu, FamilyTag::ToMinus, FamilyTag::ToPlus, FamilyTag::TinfMinus,
                        FamilyTag::TinfPlus})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown recurrence family '" + s + "'");
}

inline constexpr FamilyTag heun_families[] = {FamilyTag::ToMinus, FamilyTag::ToPlus, FamilyTag::TinfMinus,
                                              FamilyTag::TinfPlus};

struct RecurrenceFamily {
    FamilyTag tag;
    double A;
    EllipticParameter m;
    double nu = 0;  // Bnu only

    RecurrenceFamily(FamilyTag t, double A_, double m_, double nu_ = 0) : tag(t), A(A_), m(m_), nu(nu_) {
        if (!(A > 0) || !std::isfinite(A)) throw std::domain_error("amplitude A must be positive");
    }
};

struct FourierCoefficients {
    double alpha, beta, gamma;
};

// alpha_n c_{n-1} + beta_n c_n + gamma_n c_{n+1} = lambda c_n.
inline FourierCoefficients bnu_coefficients(const RecurrenceFamily& f, long n) {
    if (f.tag != FamilyTag::Bnu) throw std::invalid_argument("bnu_coefficients needs the Bnu family");
    const double A = f.A, m = f.m.value(), k = 2.0 * n + 2.0 * f.nu;
    return {-0.25 * m * (A - (k - 2)) * (A + (k - 1)), (1 - m / 2) * (k * k - A * A),
            -0.25 * m * (A - (k + 2)) * (A + (k + 1))};
}

struct HeunRow {
    double sub, diag, sup;  // coefficients of c_{n-1}, c_n, c_{n+1}
};

inline HeunRow heun_coefficients(const RecurrenceFamily& f, long n) {
    if (n < 0) throw std::invalid_argument("heun_coefficients: n must be non-negative");
    const double A = f.A, m = f.m.value(), h = m / 2, g = 1 - m / 2, dn = double(n);
    HeunRow r{};
    switch (f.tag) {
    case FamilyTag::ToMinus:
        r = {h * (dn - 1) * (2 * A + 2 * dn - 1), g * ((A + 2 * dn) * (A + 2 * dn) - A * A),
             h * (dn + 1) * (2 * A + 2 * dn + 1)};
        break;
    case FamilyTag::ToPlus:
        r = {-h * dn * (2 * A - 2 * dn + 1), g * ((2 * dn + 1 - A) * (2 * dn + 1 - A) - A * A),
             -h * (dn + 1) * (2 * A - 2 * dn - 3)};
        break;
    case FamilyTag::TinfMinus:
        r = {-h * (dn - 1) * (2 * A - 2 * dn + 1), g * ((2 * dn - A) * (2 * dn - A) - A * A),
             -h * (dn + 1) * (2 * A - 2 * dn - 1)};
        break;
    case FamilyTag::TinfPlus:
        r = {h * dn * (2 * A + 2 * dn - 1), g * ((2 * dn + 1 + A) * (2 * dn + 1 + A) - A * A),
             h * (dn + 1) * (2 * A + 2 * dn + 3)};
        break;
    default: throw std::invalid_argument("heun_coefficients: Bnu is not a Heun family");
    }
    if (n == 0) r.sub = 0;  // no c_{-1}
    return r;
}

// sub[k] = T(k+1, k), sup[k] = T(k, k+1).  first_index is the recurrence
// index n of row 0 (negative for the centred B_nu truncation).
struct TridiagonalSlice {
    std::vector<double> sub, diag, sup;
    long first_index = 0;
    double e0 = 0, f0 = 0;  // boundary relation (R_0 - lambda) c_0 + f0 c_1 = 0

    std::size_t size() const { return diag.size(); }

    Eigen::MatrixXd dense() const {
        const Eigen::Index n = static_cast<Eigen::Index>(diag.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) T(i, i) = diag[i];
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            T(i + 1, i) = sub[i];
            T(i, i + 1) = sup[i];
        }
        return T;
    }
};

// Heun families: rows n = 0..N-1.  B_nu: rows n = -N..N (size 2N+1).
inline TridiagonalSlice truncate(const RecurrenceFamily& f, long N) {
    if (N < 2) throw std::invalid_argument("truncate: N must be at least 2");
    TridiagonalSlice s;
    if (f.tag == FamilyTag::Bnu) {
        s.first_index = -N;
        for (long n = -N; n <= N; ++n) {
            auto c = bnu_coefficients(f, n);
            s.diag.push_back(c.beta);
            if (n > -N) s.sub.push_back(c.alpha);
            if (n < N) s.sup.push_back(c.gamma);
        }
    } else {
        for (long n = 0; n < N; ++n) {
            auto c = heun_coefficients(f, n);
            s.diag.push_back(c.diag);
            if (n > 0) s.sub.push_back(c.sub);
            if (n < N - 1) s.sup.push_back(c.sup);
        }
        s.e0 = s.diag[0];
        s.f0 = s.sup[0];
    }
    if (f.tag == FamilyTag::Bnu) {
        s.e0 = s.diag[0];
        s.f0 = s.sup[0];
    }
    return s;
}

class negative_product_error : public std::domain_error {
public:
    explicit negative_product_error(std::size_t k)
        : std::domain_error("sub*sup < 0 at index " + std::to_string(k)), k_(k) {}
    std::size_t index() const { return k_; }

private:
    std::size_t k_;
};

class eigen_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Index k in recurrence numbering, i.e. the row of the sub entry.
inline std::optional<long> find_negative_product(const TridiagonalSlice& s) {
    for (std::size_t k = 0; k < s.sub.size(); ++k)
        if (s.sub[k] * s.sup[k] < 0) return s.first_index + static_cast<long>(k) + 1;
    return std::nullopt;
}

struct SymmetrizedSlice {
    TridiagonalSlice slice;     // sub == sup
    std::vector<double> scale;  // D in D^{-1} T D, normalised so scale[0] = 1
};

inline SymmetrizedSlice symmetrize(const TridiagonalSlice& s) {
    if (auto k = find_negative_product(s)) throw negative_product_error(static_cast<std::size_t>(*k));
    SymmetrizedSlice out;
    out.slice = s;
    out.scale.assign(s.size(), 1.0);
    for (std::size_t k = 0; k < s.sub.size(); ++k) {
        const double p = s.sub[k] * s.sup[k];
        const double off = std::sqrt(p);
        out.slice.sub[k] = out.slice.sup[k] = off;
        const double r = (s.sub[k] != 0 && s.sup[k] != 0) ? std::sqrt(std::abs(s.sub[k] / s.sup[k])) : 1.0;
        out.scale[k + 1] = out.scale[k] * r;
    }
    return out;
}

// Implicit QL with Wilkinson-type shift for a symmetric tridiagonal matrix
// (after the EISPACK routine tql1).  d: diagonal, e: off-diagonal with
// e[i] coupling i and i+1.
inline std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return d;
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0, m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw eigen_failure("QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1, c = 1, p = 0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    e[i + 1] = (r = std::hypot(f, g));
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

struct EigenList {
    std::vector<std::complex<double>> values;
    long N_used = 0;
    int converged_count = 0;
};

inline void sort_values(std::vector<std::complex<double>>& v) {
    std::sort(v.begin(), v.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
}

inline std::vector<std::complex<double>> eigenvalues_symmetric(const TridiagonalSlice& s) {
    auto sym = symmetrize(s);
    auto d = symmetric_tridiagonal_eigenvalues(sym.slice.diag, sym.slice.sub);
    return {d.begin(), d.end()};
}

// Balance to |sub| = |sup| by a diagonal similarity, then a dense
// Hessenberg-QR solve.
inline std::vector<std::complex<double>> eigenvalues_general(const TridiagonalSlice& s) {
    TridiagonalSlice b = s;
    for (std::size_t k = 0; k < s.sub.size(); ++k) {
        if (s.sub[k] != 0 && s.sup[k] != 0) {
            const double g = std::sqrt(std::abs(s.sub[k] * s.sup[k]));
            b.sub[k] = std::copysign(g, s.sub[k]);
            b.sup[k] = std::copysign(g, s.sup[k]);
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(b.dense(), false);
    if (es.info() != Eigen::Success) throw eigen_failure("dense eigensolver did not converge");
    std::vector<std::complex<double>> v(es.eigenvalues().begin(), es.eigenvalues().end());
    sort_values(v);
    return v;
}

// Splits at vanishing off-diagonal entries (the matrix is then block
// triangular) and solves each diagonal block on its own, so eigenvalues
// shared between blocks are not degraded by the coupling.
inline EigenList eigenvalues_truncated(const RecurrenceFamily& f, long N) {
    TridiagonalSlice s = truncate(f, N);
    EigenList out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.sub.size(); ++k) {
        const bool cut = k == s.sub.size() || s.sub[k] == 0.0 || s.sup[k] == 0.0;
        if (!cut) continue;
        TridiagonalSlice b;
        b.first_index = s.first_index + static_cast<long>(start);
        b.diag.assign(s.diag.begin() + start, s.diag.begin() + k + 1);
        b.sub.assign(s.sub.begin() + start, s.sub.begin() + k);
        b.sup.assign(s.sup.begin() + start, s.sup.begin() + k);
        std::vector<std::complex<double>> v;
        if (b.size() == 1) v = {b.diag[0]};
        else v = find_negative_product(b) ? eigenvalues_general(b) : eigenvalues_symmetric(b);
        out.values.insert(out.values.end(), v.begin(), v.end());
        start = k + 1;
    }
    sort_values(out.values);
    out.N_used = N;
    return out;
}

class convergence_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::complex<double>> smallest_by_modulus(std::vector<std::complex<double>> v, int k) {
    std::stable_sort(v.begin(), v.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
    v.resize(std::min<std::size_t>(v.size(), static_cast<std::size_t>(k)));
    return v;
}

} // namespace detail

// Doubles N from 32 until the k smallest-modulus eigenvalues move by less
// than tol; pairing is nearest neighbour into the finer spectrum.
inline EigenList converged_eigenvalues(const RecurrenceFamily& f, int k, double tol, long N_max = 4096) {
    if (k < 1) throw std::invalid_argument("converged_eigenvalues: k must be >= 1");
    long N = 32;
    auto prev = detail::smallest_by_modulus(eigenvalues_truncated(f, N).values, k);
    while (2 * N <= N_max) {
        N *= 2;
        auto all = eigenvalues_truncated(f, N).values;
        bool ok = static_cast<int>(prev.size()) == k;
        for (const auto& p : prev) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : all) best = std::min(best, std::abs(p - q));
            if (!(best < tol)) ok = false;
        }
        auto cur = detail::smallest_by_modulus(all, k);
        if (ok) {
            EigenList out;
            out.values = cur;
            sort_values(out.values);
            out.N_used = N;
            out.converged_count = k;
            return out;
        }
        prev = cur;
    }
    throw convergence_failure(std::string("eigenvalues of ") + to_string(f.tag) + " did not settle by N=" +
                              std::to_string(N_max));
}

// Irreducible diagonal dominance of the transpose plus the sign condition
// sign(sub_n sup_{n-1}) = sign(diag_n diag_{n-1}).
inline bool veselic_check(const RecurrenceFamily& f, long N) {
    if (f.tag != FamilyTag::ToPlus) throw std::invalid_argument("veselic_check applies to ToPlus only");
    if (f.A != std::round(f.A)) throw std::domain_error("veselic_check requires integer A");
    auto s = truncate(f, N);
    const std::size_t n = s.size();
    bool strict = false;
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (s.sub[k] == 0 || s.sup[k] == 0) return false;
    for (std::size_t j = 0; j < n; ++j) {
        double off = 0;
        if (j >= 1) off += std::abs(s.sup[j - 1]);
        if (j + 1 < n) off += std::abs(s.sub[j]);
        const double d = std::abs(s.diag[j]);
        if (d < off) return false;
        if (d > off) strict = true;
    }
    if (!strict) return false;
    for (std::size_t j = 1; j < n; ++j) {
        const double a = s.sub[j - 1] * s.sup[j - 1], b = s.diag[j] * s.diag[j - 1];
        if ((a > 0) != (b > 0) || (a < 0) != (b < 0)) return false;
    }
    return true;
}

enum class CoefficientName { alpha, beta, gamma };

inline const char* to_string(CoefficientName c) {
    return c == CoefficientName::alpha ? "alpha" : c == CoefficientName::beta ? "beta" : "gamma";
}

struct ReducibilityIndex {
    CoefficientName which;
    long n;
    bool operator==(const ReducibilityIndex&) const = default;
};

inline std::vector<ReducibilityIndex> reducibility_indices(double A, double nu) {
    std::vector<ReducibilityIndex> out;
    auto add = [&](CoefficientName c, double n) {
        const double r = std::round(n);
        if (std::abs(n - r) > 1e-12) return;
        ReducibilityIndex idx{c, static_cast<long>(r)};
        if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    };
    add(CoefficientName::alpha, A / 2 + 1 - nu);
    add(CoefficientName::alpha, -A / 2 + 0.5 - nu);
    add(CoefficientName::beta, -nu + A / 2);
    add(CoefficientName::beta, -nu - A / 2);
    add(CoefficientName::gamma, A / 2 - 1 - nu);
    add(CoefficientName::gamma, -A / 2 - 0.5 - nu);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.which != b.which ? a.which < b.which : a.n < b.n;
    });
    return out;
}

} // namespace fbzs
