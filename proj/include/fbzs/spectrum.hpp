#pragma once

// Global spectral picture: band edges on the imaginary segment from the
// discriminant and from the Heun operators, band/gap classification,
// Dirichlet eigenvalues, the nu-sweep point cloud, spines for non-integer
// amplitude and the c0 diagnostic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbzs/heun.hpp"
#include "fbzs/monodromy.hpp"
#include "fbzs/tridiag.hpp"

namespace fbzs {

struct ScanOptions {
    int grid = 2000;           // samples per segment
    double xtol = 1e-10;       // bisection tolerance on the axis coordinate
    double integ_tol = 1e-11;  // integrator tolerance for each monodromy
    double touch_tol = 1e-9;   // |Delta| within this of 1 at an extremum counts as a double point
};

class root_polish_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class segmentation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EdgeSource { ode_root, tridiag, both };

inline const char* to_string(EdgeSource s) {
    switch (s) {
    case EdgeSource::ode_root: return "ode_root";
    case EdgeSource::tridiag: return "tridiag";
    default: return "both";
    }
}

struct BandEdge {
    cplx z;
    FloquetKind kind = FloquetKind::periodic;
    EdgeSource source = EdgeSource::ode_root;
    bool closed = false;  // double point: touch of +-1 without a sign change
    double lambda() const { return (z * z).real(); }
};

struct EdgeList {
    std::vector<BandEdge> edges;
    std::vector<std::string> warnings;
};

// m = 0 Floquet points z = +-sqrt(4n^2 - A^2) or +-sqrt((2n+1)^2 - A^2),
// |n| <= n_max, without repeats.
inline std::vector<cplx> m0_floquet_points(double A, FloquetKind kind, int n_max) {
    if (kind == FloquetKind::generic) throw std::invalid_argument("m0_floquet_points: kind must be periodic or antiperiodic");
    if (n_max < 0) throw std::invalid_argument("m0_floquet_points: n_max must be >= 0");
    std::vector<cplx> out;
    auto add = [&](cplx z) {
        for (const cplx& w : out)
            if (std::abs(w - z) < 1e-14) return;
        out.push_back(z);
    };
    for (int n = -n_max; n <= n_max; ++n) {
        const double k = kind == FloquetKind::periodic ? 2.0 * n : 2.0 * n + 1;
        const cplx r = std::sqrt(cplx(k * k - A * A, 0));
        add(r);
        add(-r);
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    return out;
}

namespace detail {

inline double bisect(const std::function<double(double)>& f, double a, double b, double fa, double xtol) {
    for (int it = 0; it < 200 && b - a > xtol; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    if (!(b - a <= xtol)) throw root_polish_error("bisection did not reach the requested tolerance");
    return 0.5 * (a + b);
}

// Maximiser of f on [a, b] by golden section.
inline std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                            double xtol) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct Sample {
    double y, v;
};

// Samples of a real function on [lo, hi] augmented with refined discrete
// extrema, so touches and narrow excursions past +-1 are not stepped over.
inline std::vector<Sample> sample_with_extrema(const std::function<double(double)>& f, double lo, double hi,
                                               int grid, double xtol) {
    std::vector<Sample> s(static_cast<std::size_t>(grid) + 1);
    for (int j = 0; j <= grid; ++j) {
        const double y = lo + (hi - lo) * j / grid;
        s[j] = {y, f(y)};
    }
    std::vector<Sample> extra;
    for (int j = 1; j < grid; ++j) {
        const double l = s[j].v - s[j - 1].v, r = s[j + 1].v - s[j].v;
        if (l == 0 || r == 0 || (l > 0) == (r > 0)) continue;
        const double sign = l > 0 ? 1.0 : -1.0;
        auto [y, v] = golden_max([&](double t) { return sign * f(t); }, s[j - 1].y, s[j + 1].y, xtol);
        extra.push_back({y, sign * v});
    }
    s.insert(s.end(), extra.begin(), extra.end());
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.y < b.y; });
    return s;
}

inline bool is_extremum(const std::vector<Sample>& s, std::size_t j) {
    if (j == 0 || j + 1 >= s.size()) return false;
    return (s[j].v - s[j - 1].v) * (s[j + 1].v - s[j].v) <= 0;
}

struct LevelRoot {
    double y;
    double level;
    bool touch;
};

// Crossings of f = +-1 over the augmented samples, plus touches at
// extrema and at the right end point.
inline std::vector<LevelRoot> level_roots(const std::function<double(double)>& f, std::vector<Sample> s,
                                          double xtol, double touch_tol) {
    std::vector<LevelRoot> out;
    for (double L : {1.0, -1.0}) {
        std::vector<double> g(s.size());
        for (std::size_t j = 0; j < s.size(); ++j) {
            g[j] = s[j].v - L;
            const bool last = j + 1 == s.size();
            if (std::abs(g[j]) <= touch_tol && (is_extremum(s, j) || last) && j > 0) {
                out.push_back({s[j].y, L, true});
                g[j] = 0;
            }
        }
        for (std::size_t j = 1; j < s.size(); ++j) {
            if (j == 1 && g[0] == 0) continue;
            if (g[j - 1] * g[j] < 0) {
                auto h = [&](double y) { return f(y) - L; };
                out.push_back({bisect(h, s[j - 1].y, s[j].y, g[j - 1], xtol), L, false});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const LevelRoot& a, const LevelRoot& b) { return a.y < b.y; });
    return out;
}

inline double parity_sign(int A) { return A % 2 == 0 ? 1.0 : -1.0; }

} // namespace detail

// Real part of Delta on the imaginary axis, Delta(i y).
inline double delta_imag_axis(const PotentialSpec& spec, double y, double tol = 1e-11) {
    return discriminant(spec, cplx(0, y), tol).real();
}

// On the imaginary axis Delta, c and s are real and Delta^2 - 1 = (c - s)(c + s).
// The factors are used instead of Delta -+ 1: near z = 0 they are O(z)
// while Delta -+ 1 is O(z^2) and drowns in rounding for small gaps.
struct EdgeFactors {
    double minus = 0, plus = 0, delta = 0;
};

inline EdgeFactors edge_factors(const PotentialSpec& spec, double y, double tol = 1e-11) {
    auto d = monodromy(spec, cplx(0, y), 0.0, tol);
    return {d.c.real() - d.s.real(), d.c.real() + d.s.real(), d.Delta.real()};
}

// Roots of Delta^2 = 1 on (0, iA], mirrored to the lower half, from sign
// changes of c -+ s.  A common root of both factors is a double point.  z = 0
// is added as a double point for integer A.
inline EdgeList band_edges_ode(const PotentialSpec& spec, const ScanOptions& opt = {}) {
    if (opt.grid < 4) throw std::invalid_argument("band_edges_ode: grid must be >= 4");
    const double A = spec.amplitude();
    const double h = A / opt.grid;
    // Both factors vanish at 0 for integer A; start just off the origin and
    // run one step past iA so an edge at iA itself (m = 0) is bracketed.
    std::vector<double> ys{1e-2 * h};
    for (int j = 1; j <= opt.grid + 1; ++j) ys.push_back(j * h);
    std::vector<EdgeFactors> v;
    for (double y : ys) v.push_back(edge_factors(spec, y, opt.integ_tol));

    struct Root {
        double y;
        int factor;
    };
    std::vector<Root> roots;
    for (int which = 0; which < 2; ++which) {
        auto g = [&](double y) {
            auto e = edge_factors(spec, y, opt.integ_tol);
            return which == 0 ? e.minus : e.plus;
        };
        for (std::size_t j = 1; j < ys.size(); ++j) {
            const double ga = which == 0 ? v[j - 1].minus : v[j - 1].plus;
            const double gb = which == 0 ? v[j].minus : v[j].plus;
            if (ga == 0.0) roots.push_back({ys[j - 1], which});
            else if (ga * gb < 0) roots.push_back({detail::bisect(g, ys[j - 1], ys[j], ga, opt.xtol), which});
        }
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.y < b.y; });

    EdgeList out;
    const double merge = std::max(100 * opt.xtol, 1e-8);
    double prev = -1;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        BandEdge e;
        e.z = cplx(0, roots[k].y);
        if (k + 1 < roots.size() && roots[k + 1].factor != roots[k].factor &&
            roots[k + 1].y - roots[k].y <= merge) {
            e.z = cplx(0, 0.5 * (roots[k].y + roots[k + 1].y));
            e.closed = true;
            ++k;
        }
        if (prev >= 0 && e.z.imag() - prev < h)
            out.warnings.push_back("adjacent edges at y=" + std::to_string(prev) + " and y=" +
                                   std::to_string(e.z.imag()) + " closer than the grid step");
        prev = e.z.imag();
        e.kind = edge_factors(spec, e.z.imag(), opt.integ_tol).delta > 0 ? FloquetKind::periodic
                                                                         : FloquetKind::antiperiodic;
        out.edges.push_back(e);
        e.z = std::conj(e.z);
        out.edges.push_back(e);
    }
    if (spec.integer_amplitude()) {
        BandEdge e;
        e.z = 0;
        e.closed = true;
        e.kind = spec.integer_A() % 2 == 0 ? FloquetKind::periodic : FloquetKind::antiperiodic;
        out.edges.push_back(e);
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const BandEdge& a, const BandEdge& b) {
        return a.z.imag() != b.z.imag() ? a.z.imag() < b.z.imag() : a.z.real() < b.z.real();
    });
    return out;
}

// Kind carried by a Heun family's eigenvalues: the "+" families give
// periodic points for odd A, the "-" families for even A.
inline FloquetKind heun_family_kind(FamilyTag t, int A) {
    const bool plus = t == FamilyTag::ToPlus || t == FamilyTag::TinfPlus;
    if (t == FamilyTag::Bnu) throw std::invalid_argument("heun_family_kind: not a Heun family");
    return (plus == (A % 2 == 1)) ? FloquetKind::periodic : FloquetKind::antiperiodic;
}

// Negative eigenvalues of ToPlus and TinfMinus give the imaginary edges
// z = +-i sqrt(-lambda); zero gives z = 0; positive eigenvalues of any
// family give real double points z = +-sqrt(lambda).
inline EdgeList band_edges_tridiag(const PotentialSpec& spec, double tol = 1e-9, long N_max = 4096) {
    const int A = spec.integer_A();
    EdgeList out;
    auto add = [&](cplx z, FloquetKind kind, bool closed) {
        for (const BandEdge& e : out.edges)
            if (std::abs(e.z - z) < 1e-7 && e.kind == kind) return;
        BandEdge e;
        e.z = z;
        e.kind = kind;
        e.source = EdgeSource::tridiag;
        e.closed = closed;
        out.edges.push_back(e);
    };
    const double zero_tol = 1e-9 * (1 + A * A);
    for (FamilyTag t : heun_families) {
        RecurrenceFamily f(t, A, spec.m());
        auto ev = converged_eigenvalues(f, 4 * A + 8, tol, N_max);
        const FloquetKind kind = heun_family_kind(t, A);
        for (const auto& l : ev.values) {
            if (std::abs(l.imag()) > 1e-8 * (1 + std::abs(l)))
                out.warnings.push_back(std::string("non-real eigenvalue in ") + to_string(t));
            const double lam = l.real();
            if (std::abs(lam) <= zero_tol) {
                add(0.0, kind, true);
            } else if (lam < 0) {
                if (t == FamilyTag::ToPlus || t == FamilyTag::TinfMinus) {
                    add(cplx(0, std::sqrt(-lam)), kind, false);
                    add(cplx(0, -std::sqrt(-lam)), kind, false);
                } else {
                    out.warnings.push_back(std::string("negative eigenvalue in ") + to_string(t));
                }
            } else {
                add(std::sqrt(lam), kind, true);
                add(-std::sqrt(lam), kind, true);
            }
        }
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const BandEdge& a, const BandEdge& b) {
        return a.z.imag() != b.z.imag() ? a.z.imag() < b.z.imag() : a.z.real() < b.z.real();
    });
    return out;
}

inline std::vector<cplx> imaginary_edges(const std::vector<BandEdge>& edges) {
    std::vector<cplx> out;
    for (const BandEdge& e : edges)
        if (e.z.real() == 0.0) out.push_back(e.z);
    return out;
}

inline double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() && b.empty()) return 0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<cplx>& p, const std::vector<cplx>& q) {
        double h = 0;
        for (const cplx& x : p) {
            double d = std::numeric_limits<double>::infinity();
            for (const cplx& y : q) d = std::min(d, std::abs(x - y));
            h = std::max(h, d);
        }
        return h;
    };
    return std::max(directed(a, b), directed(b, a));
}

// Edges of a matched within tol by an edge of b of the same kind become
// "both"; the rest keep their source.
inline std::vector<BandEdge> merge_edges(const std::vector<BandEdge>& a, const std::vector<BandEdge>& b,
                                         double tol) {
    std::vector<BandEdge> out = a;
    std::vector<bool> used(b.size(), false);
    for (BandEdge& e : out)
        for (std::size_t k = 0; k < b.size(); ++k)
            if (!used[k] && b[k].kind == e.kind && std::abs(b[k].z - e.z) <= tol) {
                e.source = EdgeSource::both;
                used[k] = true;
                break;
            }
    for (std::size_t k = 0; k < b.size(); ++k)
        if (!used[k]) out.push_back(b[k]);
    return out;
}

// Segment of the upper imaginary half axis, i*lo .. i*hi.
struct Segment {
    double lo = 0, hi = 0;
    bool closed = false;      // zero-width gap
    bool symmetric = false;   // straddles z = 0; counted once with its mirror image
    cplx z_lo() const { return cplx(0, lo); }
    cplx z_hi() const { return cplx(0, hi); }
};

struct SpectrumReport {
    double A = 0, m = 0;
    std::vector<Segment> bands;  // upper half, ordered by height
    std::vector<Segment> gaps;   // upper half, ordered; closed gaps have lo == hi
    bool real_line_band = true;  // R is always in the spectrum
    int band_count = 0;          // on (-iA, iA), mirror images included
    int open_gap_count = 0;
    int genus = 0;
    bool central_gap_present = false;
    double delta_at_zero = 0;
    std::vector<BandEdge> edges;
    std::vector<std::string> warnings;
};

// Alternating band/gap segmentation of (0, iA) from the midpoint test
// |Delta| <= 1, mirrored to (-iA, 0).  The test is evaluated as
// (c - s)(c + s) <= 0, which resolves gaps where |Delta| - 1 is below rounding.
inline SpectrumReport classify(const PotentialSpec& spec, const std::vector<BandEdge>& edges,
                               double integ_tol = 1e-11) {
    const double A = spec.amplitude();
    SpectrumReport rep;
    rep.A = A;
    rep.m = spec.m();
    rep.edges = edges;

    struct Cut {
        double y;
        bool closed;
    };
    std::vector<Cut> cuts;
    for (const BandEdge& e : edges) {
        if (e.z.real() != 0.0 || e.z.imag() <= 0) continue;
        const double y = e.z.imag();
        bool dup = false;
        for (Cut& c : cuts)
            if (std::abs(c.y - y) < 1e-9 * (1 + A)) {
                c.closed = c.closed && e.closed;
                dup = true;
            }
        if (!dup) cuts.push_back({y, e.closed});
    }
    std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.y < b.y; });

    std::vector<double> bounds{0.0};
    for (const Cut& c : cuts)
        if (c.y < A * (1 - 1e-12)) bounds.push_back(c.y);
    const bool top_is_edge = !cuts.empty() && cuts.back().y >= A * (1 - 1e-12);
    bounds.push_back(A);

    auto closed_at = [&](double y) {
        for (const Cut& c : cuts)
            if (c.y == y) return c.closed;
        return false;
    };

    std::vector<bool> is_band;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const double mid = 0.5 * (bounds[k] + bounds[k + 1]);
        const auto e = edge_factors(spec, mid, integ_tol);
        is_band.push_back(e.minus * e.plus <= 0.0);
    }
    rep.delta_at_zero = discriminant(spec, 0.0, integ_tol).real();
    if (spec.integer_amplitude()) {
        const double expect = detail::parity_sign(spec.integer_A());
        if (std::abs(rep.delta_at_zero - expect) > 1e-6)
            throw segmentation_error("Delta(0) = " + std::to_string(rep.delta_at_zero) + ", expected " +
                                     std::to_string(expect));
    }

    // Simple edges must alternate; closed edges must have bands on both sides.
    for (std::size_t k = 1; k + 1 < bounds.size(); ++k) {
        const bool closed = closed_at(bounds[k]);
        if (!closed && is_band[k - 1] == is_band[k])
            throw segmentation_error("segments on both sides of the simple edge at y=" + std::to_string(bounds[k]) +
                                     " have the same type");
        if (closed && !(is_band[k - 1] && is_band[k]))
            rep.warnings.push_back("closed edge at y=" + std::to_string(bounds[k]) + " not inside a band");
    }
    if (!top_is_edge && is_band.back())
        rep.warnings.push_back("segment below iA classified as band without an edge at iA");

    // Merge consecutive bands across closed edges.
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const bool last = k + 2 == bounds.size();
        if (is_band[k]) {
            if (!rep.bands.empty() && rep.bands.back().hi == bounds[k] && closed_at(bounds[k])) {
                rep.bands.back().hi = bounds[k + 1];
                rep.gaps.push_back({bounds[k], bounds[k], true, false});
            } else {
                rep.bands.push_back({bounds[k], bounds[k + 1], false, k == 0});
            }
        } else if (!last || top_is_edge) {
            rep.gaps.push_back({bounds[k], bounds[k + 1], false, k == 0});
        }
    }
    if (spec.integer_amplitude() && is_band[0]) rep.gaps.insert(rep.gaps.begin(), {0, 0, true, true});

    for (const Segment& b : rep.bands) rep.band_count += b.symmetric ? 1 : 2;
    for (const Segment& g : rep.gaps)
        if (!g.closed) rep.open_gap_count += g.symmetric ? 1 : 2;
    rep.central_gap_present = !is_band[0];
    rep.genus = rep.band_count - 1;
    if (rep.band_count > 0 && rep.open_gap_count != rep.band_count - 1)
        rep.warnings.push_back("open gap count " + std::to_string(rep.open_gap_count) + " is not band count - 1");
    return rep;
}

struct DirichletRecord {
    cplx z;                          // position at the first base point
    std::vector<double> x0_values;
    std::vector<cplx> positions;     // one per base point
    bool movable = false;
    int gap = -1;                    // index into open_gaps_full_axis, -1 for the fixed zero at 0
};

struct DirichletScan {
    std::vector<DirichletRecord> records;
    std::vector<std::string> warnings;
    int movable_count() const {
        return static_cast<int>(std::count_if(records.begin(), records.end(), [](auto& r) { return r.movable; }));
    }
};

// Open gaps of (-iA, iA) as (lo, hi) in Im z, ordered bottom to top.
inline std::vector<std::pair<double, double>> open_gaps_full_axis(const SpectrumReport& rep) {
    std::vector<std::pair<double, double>> out;
    for (const Segment& g : rep.gaps) {
        if (g.closed) continue;
        if (g.symmetric) {
            out.push_back({-g.hi, g.hi});
        } else {
            out.push_back({g.lo, g.hi});
            out.push_back({-g.hi, -g.lo});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// M(z; x0) for each base point from one pass over the period:
// M(z; x0) = Phi(x0) M Phi(x0)^{-1}.
inline std::vector<Mat2c> shifted_monodromies(const PotentialSpec& spec, cplx z, const std::vector<double>& x0_sorted,
                                              double tol) {
    std::vector<Mat2c> Phi;
    Mat2c P = Mat2c::Identity();
    double x = 0;
    for (double x0 : x0_sorted) {
        P = fundamental_solution(spec, z, x, x0, tol) * P;
        x = x0;
        Phi.push_back(P);
    }
    const Mat2c M = fundamental_solution(spec, z, x, spec.period(), tol) * P;
    std::vector<Mat2c> out;
    for (const Mat2c& F : Phi) out.push_back(F * M * F.inverse());
    return out;
}

// Zeros of the 1,2 entry of M(z; x0) on (-iA, iA), matched across base
// points by gap membership.  The entry is real on the imaginary axis.  For
// integer A it vanishes at z = 0 for every x0; that zero is divided out so
// a movable zero passing through the origin still changes sign.
inline DirichletScan dirichlet_scan(const PotentialSpec& spec, std::vector<double> x0_list, const SpectrumReport& rep,
                                    double tol = 1e-10, const ScanOptions& opt = {}) {
    if (x0_list.empty()) throw std::invalid_argument("dirichlet_scan: empty base point list");
    for (double x0 : x0_list)
        if (!(x0 >= 0 && x0 < spec.period())) throw std::domain_error("dirichlet_scan: base point outside [0, period)");
    std::sort(x0_list.begin(), x0_list.end());
    x0_list.erase(std::unique(x0_list.begin(), x0_list.end()), x0_list.end());

    const double A = spec.amplitude();
    const bool fixed_zero = spec.integer_amplitude();
    const std::size_t nx = x0_list.size();
    auto entries = [&](double y) {
        auto Ms = shifted_monodromies(spec, cplx(0, y), x0_list, opt.integ_tol);
        std::vector<double> v(nx);
        for (std::size_t k = 0; k < nx; ++k) v[k] = Ms[k](0, 1).real() / (fixed_zero ? y : 1.0);
        return v;
    };

    // Offset grid so y = 0 is never sampled.
    const int n = 2 * opt.grid;
    std::vector<double> ys(n);
    std::vector<std::vector<double>> vals(n);
    for (int j = 0; j < n; ++j) {
        ys[j] = -A + (j + 0.5) * 2 * A / n;
        vals[j] = entries(ys[j]);
    }

    std::vector<std::vector<double>> zeros(nx);
    for (std::size_t k = 0; k < nx; ++k) {
        const std::vector<double> one{x0_list[k]};
        auto g = [&](double y) {
            return shifted_monodromies(spec, cplx(0, y), one, opt.integ_tol)[0](0, 1).real() / (fixed_zero ? y : 1.0);
        };
        for (int j = 1; j < n; ++j)
            if (vals[j - 1][k] * vals[j][k] < 0) zeros[k].push_back(detail::bisect(g, ys[j - 1], ys[j], vals[j - 1][k], opt.xtol));
    }

    DirichletScan out;
    const auto gaps = open_gaps_full_axis(rep);
    auto gap_of = [&](double y) {
        for (std::size_t g = 0; g < gaps.size(); ++g)
            if (y > gaps[g].first - 1e-9 && y < gaps[g].second + 1e-9) return static_cast<int>(g);
        return -1;
    };
    std::map<int, std::vector<std::vector<double>>> by_gap;  // gap -> per x0 list
    for (std::size_t k = 0; k < nx; ++k)
        for (double y : zeros[k]) {
            const int g = gap_of(y);
            if (g < 0) {
                out.warnings.push_back("zero at y=" + std::to_string(y) + " for x0=" + std::to_string(x0_list[k]) +
                                       " lies outside every open gap");
                continue;
            }
            auto& slot = by_gap[g];
            slot.resize(nx);
            slot[k].push_back(y);
        }

    for (auto& [g, per_x0] : by_gap) {
        std::size_t count = 0;
        for (auto& v : per_x0) count = std::max(count, v.size());
        for (std::size_t r = 0; r < count; ++r) {
            DirichletRecord rec;
            rec.gap = g;
            for (std::size_t k = 0; k < nx; ++k) {
                if (r < per_x0[k].size()) {
                    rec.x0_values.push_back(x0_list[k]);
                    rec.positions.push_back(cplx(0, per_x0[k][r]));
                } else {
                    out.warnings.push_back("gap " + std::to_string(g) + " has no zero for x0=" +
                                           std::to_string(x0_list[k]));
                }
            }
            rec.z = rec.positions.front();
            double spread = 0;
            for (auto& a : rec.positions)
                for (auto& b : rec.positions) spread = std::max(spread, std::abs(a - b));
            rec.movable = spread > 10 * tol;
            out.records.push_back(rec);
        }
    }
    if (fixed_zero) {
        DirichletRecord rec;
        for (std::size_t k = 0; k < nx; ++k) {
            const Mat2c M = shifted_monodromies(spec, 0.0, {x0_list[k]}, opt.integ_tol)[0];
            if (std::abs(M(0, 1)) > std::max(tol, 10 * opt.integ_tol))
                out.warnings.push_back("1,2 entry at z=0 is " + std::to_string(std::abs(M(0, 1))));
            rec.x0_values.push_back(x0_list[k]);
            rec.positions.push_back(0.0);
        }
        rec.z = 0;
        out.records.push_back(rec);
    }
    return out;
}

// On R the monodromy is unitary, so 1 - Delta^2 = |c|^2 + |s|^2 and a real
// periodic/antiperiodic point is a common zero of c and s (M = +-I).  The
// margin sqrt(|c|^2 + |s|^2) is computed from the entries directly and stays
// resolvable where 1 - |Delta| is below rounding.
inline double real_axis_margin(const PotentialSpec& spec, double x, double tol = 1e-11) {
    auto d = monodromy(spec, x, 0.0, tol);
    return std::hypot(std::abs(d.c), std::abs(d.s));
}

struct MarginMinimum {
    double x = 0;
    double margin = 0;
    double delta = 0;
};

// Local minima of the margin on [a, b], refined by golden section.
inline std::vector<MarginMinimum> real_margin_minima(const PotentialSpec& spec, double a, double b,
                                                     const ScanOptions& opt = {}) {
    auto f = [&](double x) { return real_axis_margin(spec, x, opt.integ_tol); };
    std::vector<double> xs(opt.grid + 1), vs(opt.grid + 1);
    for (int j = 0; j <= opt.grid; ++j) {
        xs[j] = a + (b - a) * j / opt.grid;
        vs[j] = f(xs[j]);
    }
    std::vector<MarginMinimum> out;
    for (int j = 0; j <= opt.grid; ++j) {
        const bool left_ok = j == 0 || vs[j] <= vs[j - 1];
        const bool right_ok = j == opt.grid || vs[j] < vs[j + 1];
        if (!(left_ok && right_ok)) continue;
        const double lo = xs[std::max(j - 1, 0)], hi = xs[std::min(j + 1, opt.grid)];
        auto [x, v] = detail::golden_max([&](double t) { return -f(t); }, lo, hi, opt.xtol);
        if (vs[j] <= -v) {
            x = xs[j];
            v = -vs[j];
        }
        out.push_back({x, -v, discriminant(spec, x, opt.integ_tol).real()});
    }
    return out;
}

// Real periodic/antiperiodic points on [a, b]: margin minima below root_tol.
inline std::vector<BandEdge> real_floquet_points(const PotentialSpec& spec, double a, double b,
                                                 double root_tol = 1e-10, const ScanOptions& opt = {}) {
    std::vector<BandEdge> out;
    for (const MarginMinimum& mm : real_margin_minima(spec, a, b, opt)) {
        if (mm.margin > root_tol) continue;
        BandEdge e;
        e.z = mm.x;
        e.kind = mm.delta > 0 ? FloquetKind::periodic : FloquetKind::antiperiodic;
        e.closed = true;
        out.push_back(e);
    }
    return out;
}

// Real points where the 1,2 entry of M(x; x0) vanishes for every base
// point: minima of max_k |M12(x; x0_k)| below accept_tol.
inline std::vector<double> real_immovable_dirichlet(const PotentialSpec& spec, std::vector<double> x0_list, double a,
                                                    double b, double accept_tol = 1e-7, const ScanOptions& opt = {}) {
    std::sort(x0_list.begin(), x0_list.end());
    auto f = [&](double x) {
        double v = 0;
        for (const Mat2c& M : shifted_monodromies(spec, x, x0_list, opt.integ_tol)) v = std::max(v, std::abs(M(0, 1)));
        return v;
    };
    std::vector<double> xs(opt.grid + 1), vs(opt.grid + 1);
    for (int j = 0; j <= opt.grid; ++j) {
        xs[j] = a + (b - a) * j / opt.grid;
        vs[j] = f(xs[j]);
    }
    std::vector<double> out;
    for (int j = 0; j <= opt.grid; ++j) {
        const bool left_ok = j == 0 || vs[j] <= vs[j - 1];
        const bool right_ok = j == opt.grid || vs[j] <= vs[j + 1];
        if (!(left_ok && right_ok)) continue;
        const double lo = xs[std::max(j - 1, 0)], hi = xs[std::min(j + 1, opt.grid)];
        auto [x, v] = detail::golden_max([&](double t) { return -f(t); }, lo, hi, opt.xtol);
        if (vs[j] < -v) {
            x = xs[j];
            v = -vs[j];
        }
        if (-v <= accept_tol && (out.empty() || std::abs(out.back() - x) > 1e-6)) out.push_back(x);
    }
    return out;
}

struct CloudPoint {
    double nu = 0;
    cplx lambda;
    cplx z;
};

struct NuSweep {
    std::vector<CloudPoint> points;
    std::vector<std::pair<double, std::string>> failures;
};

// Eigenvalues of the centred truncation of B_nu mapped to z = +-sqrt(lambda).
// With converged_tol > 0 only eigenvalues reproduced by the 2N truncation
// within that tolerance are kept.
inline NuSweep nu_sweep(const PotentialSpec& spec, const std::vector<double>& nu_grid, long N,
                        double converged_tol = 0) {
    NuSweep out;
    for (double nu : nu_grid) {
        if (!(nu >= 0 && nu < 1)) throw std::domain_error("nu_sweep: nu outside [0, 1)");
        try {
            RecurrenceFamily f(FamilyTag::Bnu, spec.amplitude(), spec.m(), nu);
            auto ev = eigenvalues_general(truncate(f, N));
            std::vector<cplx> fine;
            if (converged_tol > 0) fine = eigenvalues_general(truncate(f, 2 * N));
            for (const cplx& l : ev) {
                if (converged_tol > 0) {
                    double d = std::numeric_limits<double>::infinity();
                    for (const cplx& q : fine) d = std::min(d, std::abs(q - l));
                    if (!(d <= converged_tol * (1 + std::abs(l)))) continue;
                }
                const cplx z = std::sqrt(l);
                out.points.push_back({nu, l, z});
                out.points.push_back({nu, l, -z});
            }
        } catch (const eigen_failure& e) {
            out.failures.push_back({nu, e.what()});
        }
    }
    return out;
}

struct SpineRoot {
    double x = 0;
    double delta = 0;
    double parabolic_x = 0;  // vertex of the three-point fit, confirmation only
    bool spine = false;      // |Delta| < 1 strictly (margin above root_tol): a band leaves the axis here
};

struct SpineReport {
    double window_lo = 0, window_hi = 0;
    int sign_changes = 0;                 // of Delta -+ 1 on the sample grid
    std::vector<BandEdge> floquet_roots;  // expected empty
    double min_margin = 0;                // smallest sqrt(1 - Delta^2) over the window
    double max_abs_delta = 0;
    std::vector<SpineRoot> critical_points;
};

// Non-integer A: real Floquet points on the window and critical points of
// Delta (sign changes of a central difference of Delta).
inline SpineReport spine_check(const PotentialSpec& spec, double a, double b, double root_tol = 1e-10,
                               const ScanOptions& opt = {}) {
    if (spec.integer_amplitude()) throw std::domain_error("spine_check: requires non-integer A");
    if (!(b > a)) throw std::invalid_argument("spine_check: empty window");
    SpineReport rep;
    rep.window_lo = a;
    rep.window_hi = b;
    auto D = [&](double x) { return discriminant(spec, x, opt.integ_tol).real(); };
    auto dD = [&](double x) {
        const double h = 1e-5 * (1 + std::abs(x));
        return (D(x + h) - D(x - h)) / (2 * h);
    };

    rep.min_margin = std::numeric_limits<double>::infinity();
    for (const MarginMinimum& mm : real_margin_minima(spec, a, b, opt)) {
        rep.min_margin = std::min(rep.min_margin, mm.margin);
        if (mm.margin <= root_tol) {
            BandEdge e;
            e.z = mm.x;
            e.kind = mm.delta > 0 ? FloquetKind::periodic : FloquetKind::antiperiodic;
            e.closed = true;
            rep.floquet_roots.push_back(e);
        }
    }
    const double step = (b - a) / opt.grid;
    std::vector<double> xs, ds, ps;
    for (int j = 0; j < opt.grid; ++j) {
        const double x = a + (j + 0.5) * step;
        xs.push_back(x);
        const double v = D(x);
        ds.push_back(v);
        rep.max_abs_delta = std::max(rep.max_abs_delta, std::abs(v));
        ps.push_back(dD(x));
    }
    for (std::size_t j = 1; j < xs.size(); ++j)
        for (double L : {1.0, -1.0})
            if ((ds[j - 1] - L) * (ds[j] - L) < 0) ++rep.sign_changes;
    for (std::size_t j = 1; j < xs.size(); ++j) {
        if (ps[j - 1] * ps[j] >= 0) continue;
        SpineRoot r;
        r.x = detail::bisect(dD, xs[j - 1], xs[j], ps[j - 1], std::max(opt.xtol, 1e-9));
        r.delta = D(r.x);
        const double h = step / 2, fm = D(r.x - h), f0 = r.delta, fp = D(r.x + h);
        const double den = fm - 2 * f0 + fp;
        r.parabolic_x = den != 0 ? r.x + h * (fm - fp) / (2 * den) : r.x;
        r.spine = real_axis_margin(spec, r.x, opt.integ_tol) > root_tol;
        rep.critical_points.push_back(r);
    }
    return rep;
}

struct C0Diagnostic {
    double integral = 0;
    double series = 0;
    double fd = 0;  // c(i h)/h with one Richardson step
    int series_terms = 0;
    int quadrature_points = 0;
};

// (-1)^A times the integral of cos(2A am x) over one period, by the
// trapezoid rule (the integrand is smooth and periodic).
inline double c0_integral(const PotentialSpec& spec, int* points = nullptr) {
    const int A = spec.integer_A();
    const double l = spec.period();
    auto trap = [&](int n) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += std::cos(2.0 * A * jacobi_am(l * k / n, spec.m()));
        return s * l / n;
    };
    int n = 16;
    double prev = trap(n);
    while (n < (1 << 20)) {
        n *= 2;
        const double cur = trap(n);
        if (std::abs(cur - prev) <= 1e-15 * (1 + std::abs(cur))) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    if (points) *points = n;
    return detail::parity_sign(A) * prev;
}

// pi sum_{j>=A} [(2j-1)!]^2 m^j / (4^{2j-1} (j-A)! (j+A)! [(j-1)!]^2), terms
// until below 1e-14 of the sum.
inline double c0_series(int A, double m, int* terms = nullptr) {
    if (A < 1) throw std::domain_error("c0_series: A must be a positive integer");
    if (!(m >= 0 && m < 1)) throw std::domain_error("c0_series: m outside [0, 1)");
    if (m == 0) {
        if (terms) *terms = 0;
        return 0;
    }
    const double j0 = A;
    double t = std::exp(2 * std::lgamma(2 * j0) + j0 * std::log(m) - (2 * j0 - 1) * std::log(4.0) -
                        std::lgamma(1.0) - std::lgamma(2 * j0 + 1) - 2 * std::lgamma(j0));
    double sum = 0;
    int k = 0;
    for (double j = j0; k < 1000000; j += 1, ++k) {
        sum += t;
        if (t < 1e-14 * sum) break;
        t *= (2 * j + 1) * (2 * j + 1) * m / (4 * (j + 1 - A) * (j + 1 + A));
    }
    if (terms) *terms = k + 1;
    return std::numbers::pi * sum;
}

inline C0Diagnostic c0_diagnostic(const PotentialSpec& spec, double h = 0.02) {
    C0Diagnostic d;
    d.integral = c0_integral(spec, &d.quadrature_points);
    d.series = c0_series(spec.integer_A(), spec.m(), &d.series_terms);
    // c(z) = -i c0 z + O(z^3), so c(i h)/h = c0 + O(h^2).
    auto q = [&](double t) { return monodromy(spec, cplx(0, t), 0.0, 1e-13).c.real() / t; };
    d.fd = (4 * q(h / 2) - q(h)) / 3;
    return d;
}

// Second derivative of Delta at z = 0 by a central difference on the real
// axis (Delta is even), one Richardson step.  Diagnostic only; at m = 0 it
// should match -pi sin(A pi)/A.
inline double delta_zz_at_zero(const PotentialSpec& spec, double h = 0.05) {
    const double d0 = discriminant(spec, 0.0, 1e-13).real();
    auto q = [&](double t) { return 2 * (discriminant(spec, t, 1e-13).real() - d0) / (t * t); };
    return (4 * q(h / 2) - q(h)) / 3;
}

} // namespace fbzs
