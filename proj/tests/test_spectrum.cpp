#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fbzs/spectrum.hpp"

using namespace fbzs;
using std::numbers::pi;

namespace {

ScanOptions coarse(int grid = 500) {
    ScanOptions o;
    o.grid = grid;
    return o;
}

std::vector<BandEdge> upper(const std::vector<BandEdge>& e) {
    std::vector<BandEdge> out;
    for (const BandEdge& x : e)
        if (x.z.real() == 0.0 && x.z.imag() > 0) out.push_back(x);
    return out;
}

bool contains(const std::vector<cplx>& v, cplx z, double tol = 1e-12) {
    for (const cplx& w : v)
        if (std::abs(w - z) < tol) return true;
    return false;
}

// y-form of the c0 integral, composite Simpson in y = am(x).
double c0_simpson(int A, double m, int n = 20000) {
    auto f = [&](double y) { return std::cos(2 * A * y) / std::sqrt(1 - m * std::sin(y) * std::sin(y)); };
    const double h = pi / n;
    double s = f(0) + f(pi);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * f(k * h);
    return (A % 2 ? -1 : 1) * s * h / 3;
}

} // namespace

TEST(M0Floquet, Examples) {
    auto p = m0_floquet_points(1, FloquetKind::periodic, 1);
    EXPECT_TRUE(contains(p, std::sqrt(3.0)));
    EXPECT_TRUE(contains(p, -std::sqrt(3.0)));
    EXPECT_TRUE(contains(p, cplx(0, 1)));
    p = m0_floquet_points(1, FloquetKind::antiperiodic, 0);
    EXPECT_TRUE(contains(p, 0.0));
    p = m0_floquet_points(2, FloquetKind::periodic, 0);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_TRUE(contains(p, cplx(0, 2)));
    EXPECT_TRUE(contains(p, cplx(0, -2)));
    EXPECT_THROW(m0_floquet_points(1, FloquetKind::generic, 1), std::invalid_argument);
}

TEST(EdgesOde, CircularCaseMatchesClosedForm) {
    for (int A : {1, 2, 3}) {
        auto e = band_edges_ode(PotentialSpec(A, 0), coarse());
        std::vector<cplx> expect;
        for (FloquetKind k : {FloquetKind::periodic, FloquetKind::antiperiodic})
            for (cplx z : m0_floquet_points(A, k, A + 1))
                if (z.real() == 0.0) expect.push_back(z);
        std::vector<cplx> got;
        for (const BandEdge& x : e.edges) got.push_back(x.z);
        EXPECT_LT(hausdorff_distance(got, expect), 1e-8) << A;
        for (const BandEdge& x : e.edges) {
            const double y = std::abs(x.z.imag());
            EXPECT_EQ(x.closed, y < A - 1e-6) << A << " " << x.z;
        }
    }
}

TEST(EdgesOde, CountsAndLevels) {
    for (int A : {1, 2}) {
        PotentialSpec s(A, 0.5);
        auto e = band_edges_ode(s, coarse());
        auto up = upper(e.edges);
        ASSERT_EQ(up.size(), static_cast<std::size_t>(2 * A));
        int periodic = 0;
        for (const BandEdge& x : up) {
            const cplx D = discriminant(s, x.z);
            const double level = x.kind == FloquetKind::periodic ? 1.0 : -1.0;
            EXPECT_LT(std::abs(D - level), 1e-8) << x.z;
            EXPECT_FALSE(x.closed);
            EXPECT_LT(x.z.imag(), A - 1e-6);
            periodic += x.kind == FloquetKind::periodic;
        }
        EXPECT_EQ(periodic, A);
        EXPECT_EQ(e.edges.size(), 2 * up.size() + 1);  // mirror images and z = 0
    }
}

TEST(EdgesTridiag, AgreesWithOde) {
    for (auto [A, m] : {std::pair{1, 0.5}, {3, 0.3}}) {
        PotentialSpec s(A, m);
        auto ode = band_edges_ode(s, coarse(800));
        auto tri = band_edges_tridiag(s);
        EXPECT_LT(hausdorff_distance(imaginary_edges(ode.edges), imaginary_edges(tri.edges)), 1e-6) << A;
        EXPECT_EQ(upper(tri.edges).size(), static_cast<std::size_t>(2 * A));
        EXPECT_TRUE(contains(imaginary_edges(tri.edges), 0.0));
        for (const BandEdge& x : merge_edges(ode.edges, tri.edges, 1e-6))
            if (x.z.real() == 0.0) EXPECT_EQ(x.source, EdgeSource::both) << x.z;
    }
}

TEST(EdgesTridiag, RealDoublePoints) {
    PotentialSpec s(2, 0.5);
    for (const BandEdge& x : band_edges_tridiag(s).edges) {
        if (x.z.imag() != 0.0 || x.z == 0.0) continue;
        EXPECT_TRUE(x.closed);
        EXPECT_LT(real_axis_margin(s, x.z.real(), 1e-12), 1e-8) << x.z;
    }
}

TEST(EdgesTridiag, RejectsNonInteger) {
    EXPECT_THROW(band_edges_tridiag(PotentialSpec(1.5, 0.5)), std::domain_error);
}

TEST(Classify, Examples) {
    struct Case {
        int A;
        double m;
        int bands, genus;
        bool central;
    };
    for (Case c : {Case{2, 0.5, 4, 3, true}, Case{1, 0.9, 2, 1, true}, Case{1, 0.0, 1, 0, false}}) {
        PotentialSpec s(c.A, c.m);
        auto r = classify(s, band_edges_ode(s, coarse()).edges);
        EXPECT_EQ(r.band_count, c.bands) << c.A << " " << c.m;
        EXPECT_EQ(r.genus, c.genus);
        EXPECT_EQ(r.open_gap_count, c.bands - 1);
        EXPECT_EQ(r.central_gap_present, c.central);
        EXPECT_NEAR(r.delta_at_zero, c.A % 2 ? -1 : 1, 1e-9);
        EXPECT_TRUE(r.warnings.empty());
    }
}

TEST(Classify, AlternationAndClosedGaps) {
    PotentialSpec s(2, 0);
    auto r = classify(s, band_edges_ode(s, coarse()).edges);
    ASSERT_EQ(r.bands.size(), 1u);
    EXPECT_TRUE(r.bands[0].symmetric);
    EXPECT_NEAR(r.bands[0].hi, 2, 1e-8);
    int closed = 0;
    for (const Segment& g : r.gaps) closed += g.closed;
    EXPECT_EQ(closed, 2);  // z = 0 and z = i sqrt(3)

    PotentialSpec t(2, 0.5);
    auto edges = band_edges_ode(t, coarse()).edges;
    auto r2 = classify(t, edges);
    for (std::size_t k = 1; k < r2.bands.size(); ++k) EXPECT_GT(r2.bands[k].lo, r2.bands[k - 1].hi);
}

TEST(Classify, RejectsEdgeInsideBand) {
    PotentialSpec s(1, 0.5);
    auto edges = band_edges_ode(s, coarse()).edges;
    BandEdge bogus;
    bogus.z = cplx(0, 0.5);
    edges.push_back(bogus);
    EXPECT_THROW(classify(s, edges), segmentation_error);
}

TEST(Central, GapAroundOrigin) {
    for (int A : {1, 2, 3}) {
        PotentialSpec s(A, 0.5);
        EXPECT_NEAR(discriminant(s, 0.0).real(), A % 2 ? -1 : 1, 1e-9);
        const auto up = upper(band_edges_ode(s, coarse()).edges);
        ASSERT_FALSE(up.empty());
        const double y0 = up.front().z.imag() / 2;
        for (double sgn : {1.0, -1.0}) {
            auto e = edge_factors(s, sgn * y0, 1e-12);
            EXPECT_GT(e.minus * e.plus, 0) << A;  // |Delta| > 1
        }
    }
}

TEST(Dirichlet, OneMovablePerGap) {
    PotentialSpec s(2, 0.5);
    auto rep = classify(s, band_edges_ode(s, coarse()).edges);
    auto d = dirichlet_scan(s, {0.0, 0.2, 0.4}, rep, 1e-10, coarse(300));
    EXPECT_EQ(d.movable_count(), 3);
    std::vector<int> seen;
    for (const DirichletRecord& r : d.records) {
        if (!r.movable) {
            EXPECT_EQ(r.gap, -1);
            continue;
        }
        seen.push_back(r.gap);
        ASSERT_EQ(r.positions.size(), 3u);
        for (std::size_t k = 1; k < 3; ++k) EXPECT_GT(std::abs(r.positions[k] - r.positions[k - 1]), 1e-6);
        for (std::size_t k = 0; k < 3; ++k) {
            const Mat2c M = shifted_monodromies(s, r.positions[k], {r.x0_values[k]}, 1e-12)[0];
            EXPECT_LT(std::abs(M(0, 1)), 1e-6 * (1 + std::abs(r.positions[k])));
        }
    }
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, (std::vector<int>{0, 1, 2}));
}

TEST(Dirichlet, CircularCaseOnlyAtOrigin) {
    PotentialSpec s(1, 0);
    auto rep = classify(s, band_edges_ode(s, coarse()).edges);
    auto d = dirichlet_scan(s, {0.0}, rep, 1e-10, coarse(300));
    for (const DirichletRecord& r : d.records) {
        EXPECT_FALSE(r.movable);
        for (const cplx& z : r.positions) EXPECT_LT(std::abs(z), 1e-5);
    }
    // Closed form: s(z;0) = -A sin(w pi)/w vanishes on (-i, i) only at z = 0.
    for (int k = 1; k < 100; ++k) {
        const double y = -0.99 + 1.98 * k / 100;
        if (std::abs(y) > 1e-3) EXPECT_GT(std::abs(closed_form_m0(1, cplx(0, y)).s), 1e-6);
    }
}

TEST(Dirichlet, EvenOrderZeroOfS) {
    PotentialSpec s(1, 0.5);
    auto s_of = [&](double y) { return monodromy(s, cplx(0, y), 0.0, 1e-13).s.real(); };
    EXPECT_LT(std::abs(s_of(0)), 1e-11);
    const double a = s_of(0.02), b = s_of(-0.02), c = s_of(0.01);
    EXPECT_GT(a * b, 0);               // no sign change across 0
    EXPECT_NEAR(a / c, 4.0, 0.05);     // quadratic leading term
}

TEST(Dirichlet, SAlternatesAcrossGaps) {
    PotentialSpec s(2, 0.5);
    auto rep = classify(s, band_edges_ode(s, coarse()).edges);
    for (const Segment& g : rep.gaps) {
        if (g.symmetric || g.closed) continue;
        const double sl = monodromy(s, g.z_lo(), 0.0, 1e-12).s.real();
        const double sh = monodromy(s, g.z_hi(), 0.0, 1e-12).s.real();
        EXPECT_LT(sl * sh, 0) << g.lo << " " << g.hi;
    }
}

TEST(Dirichlet, RejectsBadBasePoint) {
    PotentialSpec s(1, 0.5);
    SpectrumReport rep;
    EXPECT_THROW(dirichlet_scan(s, {-0.1}, rep), std::domain_error);
    EXPECT_THROW(dirichlet_scan(s, {}, rep), std::invalid_argument);
}

TEST(RealAxis, ImmovableDirichletAreFloquetPoints) {
    PotentialSpec s(2, 0.5);
    ScanOptions o = coarse(300);
    o.integ_tol = 1e-12;
    auto fl = real_floquet_points(s, 0, 3, 1e-9, o);
    auto im = real_immovable_dirichlet(s, {0.0, 0.2, 0.4}, 0, 3, 1e-7, o);
    ASSERT_EQ(fl.size(), im.size());
    ASSERT_GE(fl.size(), 3u);
    for (std::size_t k = 0; k < fl.size(); ++k) EXPECT_NEAR(fl[k].z.real(), im[k], 1e-6);
    // Kinds alternate away from the origin.
    for (std::size_t k = 1; k < fl.size(); ++k) EXPECT_NE(fl[k].kind, fl[k - 1].kind);
}

TEST(NuSweep, HitsBandEdges) {
    PotentialSpec s(1, 0.5);
    auto edges = upper(band_edges_ode(s, coarse()).edges);
    auto cloud = nu_sweep(s, {0.0, 0.5}, 40, 1e-9);
    EXPECT_TRUE(cloud.failures.empty());
    for (const BandEdge& e : edges) {
        double best = 1e300;
        for (const CloudPoint& p : cloud.points) best = std::min(best, std::abs(p.z - e.z));
        EXPECT_LT(best, 1e-4) << e.z;
    }
}

TEST(NuSweep, CircularCaseOnAxes) {
    PotentialSpec s(1, 0);
    std::vector<double> nus;
    for (int k = 0; k < 10; ++k) nus.push_back(k / 10.0);
    auto cloud = nu_sweep(s, nus, 30, 1e-9);
    ASSERT_FALSE(cloud.points.empty());
    for (const CloudPoint& p : cloud.points) {
        const bool on_real = std::abs(p.z.imag()) < 1e-6;
        const bool on_segment = std::abs(p.z.real()) < 1e-6 && std::abs(p.z.imag()) <= 1 + 1e-6;
        EXPECT_TRUE(on_real || on_segment) << p.z;
    }
}

TEST(NuSweep, MatchesHeunSpectra) {
    PotentialSpec s(2, 0.5);
    std::vector<cplx> heun;
    for (FamilyTag t : heun_families)
        for (cplx l : converged_eigenvalues(RecurrenceFamily(t, 2, 0.5), 16, 1e-10).values) heun.push_back(l);
    for (double nu : {0.0, 0.5}) {
        auto ev = converged_eigenvalues(RecurrenceFamily(FamilyTag::Bnu, 2, 0.5, nu), 8, 1e-10);
        for (cplx l : ev.values) {
            double best = 1e300;
            for (cplx q : heun) best = std::min(best, std::abs(q - l));
            EXPECT_LT(best, 1e-6) << nu << " " << l;
        }
    }
}

TEST(NuSweep, RejectsBadNu) { EXPECT_THROW(nu_sweep(PotentialSpec(1, 0.5), {1.0}, 10), std::domain_error); }

TEST(Spine, NonIntegerAmplitude) {
    ScanOptions o = coarse(150);
    o.integ_tol = 1e-13;
    o.xtol = 1e-12;
    auto r = spine_check(PotentialSpec(2.5, 0.5), 0, 3, 1e-10, o);
    EXPECT_TRUE(r.floquet_roots.empty());
    EXPECT_EQ(r.sign_changes, 0);
    EXPECT_GT(r.min_margin, 1e-9);
    ASSERT_GE(r.critical_points.size(), 2u);
    for (const SpineRoot& c : r.critical_points) {
        EXPECT_TRUE(c.spine);
        EXPECT_NEAR(c.parabolic_x, c.x, 1e-3);
    }
    EXPECT_THROW(spine_check(PotentialSpec(2, 0.5), 0, 6), std::domain_error);
}

TEST(Spine, PulledTowardOrigin) {
    auto r = spine_check(PotentialSpec(3.99, 0.9), 0, 1, 1e-10, coarse(100));
    ASSERT_FALSE(r.critical_points.empty());
    EXPECT_LT(r.critical_points.front().x, 0.3);
    EXPECT_TRUE(r.critical_points.front().spine);
}

TEST(C0, IntegralSeriesAndQuadratureOracle) {
    for (int A : {1, 2})
        for (double m : {0.25, 0.3, 0.5}) {
            auto d = c0_diagnostic(PotentialSpec(A, m));
            EXPECT_NEAR(d.integral, d.series, 1e-8);
            EXPECT_NEAR(d.integral, c0_simpson(A, m), 1e-10);
            EXPECT_GT(d.series, 0);
            EXPECT_NEAR(d.fd, d.series, 1e-5 * (1 + d.series));
        }
}

TEST(C0, LimitAndMonotone) {
    EXPECT_NEAR(c0_diagnostic(PotentialSpec(1, 0)).integral, 0, 1e-14);
    EXPECT_EQ(c0_series(1, 0), 0);
    double prev = 0;
    for (double m : {1e-4, 1e-3, 1e-2, 0.25, 0.5}) {
        const double v = c0_series(2, m);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_LT(c0_series(1, 1e-6), 1e-6);
    EXPECT_THROW(c0_series(0, 0.5), std::domain_error);
}

TEST(DeltaZZ, CircularCaseClosedForm) {
    for (double A : {0.5, 1.0, 2.5, 3.3}) {
        const double expect = -pi * std::sin(A * pi) / A;
        EXPECT_NEAR(delta_zz_at_zero(PotentialSpec(A, 0)), expect, 1e-5) << A;
    }
}

TEST(Geometry, HausdorffAndMerge) {
    EXPECT_EQ(hausdorff_distance({}, {}), 0);
    EXPECT_TRUE(std::isinf(hausdorff_distance({1.0}, {})));
    EXPECT_NEAR(hausdorff_distance({0.0, 1.0}, {0.0, 1.5}), 0.5, 1e-15);
    BandEdge a, b;
    a.z = cplx(0, 1);
    b.z = cplx(0, 1 + 1e-9);
    b.source = EdgeSource::tridiag;
    auto m = merge_edges({a}, {b}, 1e-6);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].source, EdgeSource::both);
}
