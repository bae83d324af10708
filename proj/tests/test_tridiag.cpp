#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fbzs/tridiag.hpp"

using namespace fbzs;
using cd = std::complex<double>;

namespace {

double max_imag(const std::vector<cd>& v) {
    double r = 0;
    for (auto x : v) r = std::max(r, std::abs(x.imag()));
    return r;
}
double max_abs(const std::vector<cd>& v) {
    double r = 0;
    for (auto x : v) r = std::max(r, std::abs(x));
    return r;
}

// Dense eigenvalues by Eigen's self-adjoint solver, independent of the QL code.
std::vector<double> dense_symmetric(const std::vector<double>& d, const std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) T(i, i) = d[i];
    for (int i = 0; i + 1 < n; ++i) T(i, i + 1) = T(i + 1, i) = e[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    std::vector<double> v(es.eigenvalues().begin(), es.eigenvalues().end());
    return v;
}

} // namespace

TEST(Bnu, CoefficientExamples) {
    EXPECT_EQ(bnu_coefficients(RecurrenceFamily(FamilyTag::Bnu, 1, 0.5, 0), 0).alpha, 0.0);
    EXPECT_EQ(bnu_coefficients(RecurrenceFamily(FamilyTag::Bnu, 2, 0.3, 1), 0).beta, 0.0);
    EXPECT_NEAR(bnu_coefficients(RecurrenceFamily(FamilyTag::Bnu, 2, 0.8, 0.5), 1).alpha, -0.8, 1e-15);
}

TEST(Bnu, RejectsHeunFamily) {
    EXPECT_THROW(bnu_coefficients(RecurrenceFamily(FamilyTag::ToPlus, 1, 0.5), 0), std::invalid_argument);
    EXPECT_THROW(heun_coefficients(RecurrenceFamily(FamilyTag::Bnu, 1, 0.5), 0), std::invalid_argument);
}

TEST(Heun, BoundaryRows) {
    auto r = heun_coefficients(RecurrenceFamily(FamilyTag::ToMinus, 1, 0.5), 0);
    EXPECT_EQ(r.diag, 0.0);
    EXPECT_DOUBLE_EQ(r.sup, 0.75);
    r = heun_coefficients(RecurrenceFamily(FamilyTag::TinfPlus, 1, 0.5), 0);
    EXPECT_DOUBLE_EQ(r.diag, 2.25);
    EXPECT_DOUBLE_EQ(r.sup, 1.25);
}

TEST(Heun, ToPlusSignFlipExactlyAtA) {
    for (int A = 1; A <= 6; ++A) {
        RecurrenceFamily f(FamilyTag::ToPlus, A, 0.5);
        for (long n = 1; n < 40; ++n) {
            const double p = heun_coefficients(f, n).sub * heun_coefficients(f, n - 1).sup;
            if (n == A) EXPECT_LT(p, 0) << A;
            else EXPECT_GE(p, 0) << A << " " << n;
        }
    }
}

TEST(Heun, OtherFamiliesHaveNonNegativeProducts) {
    for (FamilyTag t : {FamilyTag::ToMinus, FamilyTag::TinfMinus, FamilyTag::TinfPlus})
        for (int A = 1; A <= 5; ++A) {
            RecurrenceFamily f(t, A, 0.7);
            for (long n = 1; n < 60; ++n)
                EXPECT_GE(heun_coefficients(f, n).sub * heun_coefficients(f, n - 1).sup, 0);
        }
}

TEST(Truncate, ToMinusFirstColumnVanishes) {
    auto s = truncate(RecurrenceFamily(FamilyTag::ToMinus, 1, 0.5), 3);
    auto T = s.dense();
    EXPECT_EQ(T(0, 0), 0.0);
    EXPECT_EQ(T(1, 0), 0.0);
    EXPECT_EQ(T(2, 0), 0.0);
}

TEST(Truncate, CentredBnuKeepsAlphaZero) {
    // A=1, nu=0: alpha_n vanishes at n = -A/2 + 1/2 - nu = 0, i.e. the entry
    // coupling row n=0 to n=-1.
    RecurrenceFamily f(FamilyTag::Bnu, 1, 0.5, 0);
    auto s = truncate(f, 5);
    ASSERT_EQ(s.size(), 11u);
    EXPECT_EQ(s.first_index, -5);
    const std::size_t row0 = 5;
    EXPECT_EQ(s.sub[row0 - 1], 0.0);
    for (std::size_t k = 0; k < s.sub.size(); ++k)
        if (k != row0 - 1) EXPECT_NE(s.sub[k], 0.0);
}

TEST(Truncate, SmallestTinfMinus) {
    RecurrenceFamily f(FamilyTag::TinfMinus, 2, 0.4);
    auto T = truncate(f, 2).dense();
    auto r0 = heun_coefficients(f, 0), r1 = heun_coefficients(f, 1);
    EXPECT_EQ(T(0, 0), r0.diag);
    EXPECT_EQ(T(0, 1), r0.sup);
    EXPECT_EQ(T(1, 0), r1.sub);
    EXPECT_EQ(T(1, 1), r1.diag);
}

TEST(Truncate, RejectsTinySize) {
    EXPECT_THROW(truncate(RecurrenceFamily(FamilyTag::ToMinus, 1, 0.5), 1), std::invalid_argument);
}

TEST(Symmetrize, TinfPlusAgreesWithGeneralSolver) {
    auto s = truncate(RecurrenceFamily(FamilyTag::TinfPlus, 2, 0.5), 50);
    auto sym = eigenvalues_symmetric(s), gen = eigenvalues_general(s);
    ASSERT_EQ(sym.size(), gen.size());
    for (std::size_t i = 0; i < sym.size(); ++i) EXPECT_NEAR(std::abs(sym[i] - gen[i]), 0, 1e-10 * (1 + std::abs(sym[i])));
}

TEST(Symmetrize, ToPlusFailsAtA) {
    auto s = truncate(RecurrenceFamily(FamilyTag::ToPlus, 2, 0.5), 50);
    try {
        symmetrize(s);
        FAIL() << "expected negative product";
    } catch (const negative_product_error& e) {
        EXPECT_EQ(e.index(), 2u);
    }
}

TEST(Symmetrize, DiagonalSliceUnchanged) {
    TridiagonalSlice s;
    s.diag = {1, 2, 3};
    s.sub = {0, 0};
    s.sup = {0, 0};
    auto out = symmetrize(s);
    EXPECT_EQ(out.slice.diag, s.diag);
    EXPECT_EQ(out.slice.sub, s.sub);
    for (double d : out.scale) EXPECT_EQ(d, 1.0);
}

TEST(Symmetrize, SimilarityReproducesSymmetricMatrix) {
    auto s = truncate(RecurrenceFamily(FamilyTag::TinfPlus, 3, 0.6), 12);
    auto sym = symmetrize(s);
    Eigen::VectorXd D = Eigen::Map<Eigen::VectorXd>(sym.scale.data(), sym.scale.size());
    Eigen::MatrixXd S = D.asDiagonal().inverse() * s.dense() * D.asDiagonal();
    EXPECT_LE((S.cwiseAbs() - sym.slice.dense()).cwiseAbs().maxCoeff(), 1e-10 * S.cwiseAbs().maxCoeff());
}

TEST(QL, MatchesDenseSelfAdjointSolver) {
    std::mt19937 gen(11);
    std::normal_distribution<double> g;
    for (int n : {1, 2, 7, 40, 200}) {
        std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
        for (auto& x : d) x = g(gen);
        for (auto& x : e) x = g(gen);
        if (n > 5) e[3] = 0;  // a split point
        auto a = symmetric_tridiagonal_eigenvalues(d, e), b = dense_symmetric(d, e);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * (1 + std::abs(b[i])));
    }
}

TEST(Eigen, ToMinusContainsZero) {
    for (int A = 1; A <= 4; ++A)
        for (double m : {0.2, 0.7}) {
            auto ev = eigenvalues_truncated(RecurrenceFamily(FamilyTag::ToMinus, A, m), 40).values;
            bool zero = std::any_of(ev.begin(), ev.end(), [](cd x) { return x == cd(0); });
            EXPECT_TRUE(zero);
        }
}

TEST(Eigen, TinfPlusNonNegative) {
    for (auto x : eigenvalues_truncated(RecurrenceFamily(FamilyTag::TinfPlus, 1, 0.5), 64).values)
        EXPECT_GE(x.real(), -1e-10);
}

TEST(Eigen, ToPlusRealAndDistinct) {
    auto ev = eigenvalues_truncated(RecurrenceFamily(FamilyTag::ToPlus, 3, 0.5), 64).values;
    ASSERT_EQ(ev.size(), 64u);
    EXPECT_LE(max_imag(ev), 1e-8 * (1 + max_abs(ev)));
    for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_GT(ev[i].real() - ev[i - 1].real(), 1e-6);
}

TEST(Eigen, RealityAcrossFamilies) {
    for (int A = 1; A <= 5; ++A)
        for (double m : {0.1, 0.5, 0.9})
            for (long N : {32, 128})
                for (FamilyTag t : heun_families) {
                    auto ev = eigenvalues_truncated(RecurrenceFamily(t, A, m), N).values;
                    EXPECT_LE(max_imag(ev), 1e-8 * (1 + max_abs(ev))) << to_string(t) << A << " " << m;
                }
}

TEST(Eigen, NonNegativeFamilies) {
    for (int A = 1; A <= 5; ++A)
        for (double m : {0.1, 0.5, 0.9})
            for (FamilyTag t : {FamilyTag::ToMinus, FamilyTag::TinfPlus}) {
                auto ev = eigenvalues_truncated(RecurrenceFamily(t, A, m), 128).values;
                EXPECT_GE(ev.front().real(), -1e-9 * (1 + max_abs(ev)));
            }
}

TEST(Converged, ToMinusStartsAtExactZero) {
    auto r = converged_eigenvalues(RecurrenceFamily(FamilyTag::ToMinus, 1, 0.5), 3, 1e-8);
    ASSERT_EQ(r.values.size(), 3u);
    EXPECT_EQ(r.values[0], cd(0));
    EXPECT_EQ(r.converged_count, 3);
    EXPECT_GE(r.N_used, 64);
}

TEST(Converged, CircularLimitReproducesFloquetSquares) {
    // At m = 0 every eigenvalue is k^2 - A^2 for an integer k whose parity
    // depends on the family.
    for (int A = 1; A <= 3; ++A) {
        std::set<long> ks;
        for (FamilyTag t : heun_families) {
            auto r = converged_eigenvalues(RecurrenceFamily(t, A, 0.0), 4, 1e-10);
            for (auto v : r.values) {
                const double k = std::sqrt(v.real() + A * A);
                EXPECT_NEAR(k, std::round(k), 1e-7) << to_string(t);
                ks.insert(std::lround(k));
            }
        }
        for (long k = 0; k <= 4; ++k) EXPECT_TRUE(ks.count(k)) << "A=" << A << " k=" << k;
    }
}

TEST(Converged, ToPlusContinuousAtSmallM) {
    auto a = converged_eigenvalues(RecurrenceFamily(FamilyTag::ToPlus, 2, 1e-6), 2, 1e-10);
    auto b = converged_eigenvalues(RecurrenceFamily(FamilyTag::ToPlus, 2, 0.0), 2, 1e-10);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(a.values[i] - b.values[i]), 0, 1e-4);
}

TEST(Converged, RejectsBadK) {
    EXPECT_THROW(converged_eigenvalues(RecurrenceFamily(FamilyTag::ToMinus, 1, 0.5), 0, 1e-8), std::invalid_argument);
}

TEST(Veselic, HoldsForIntegerA) {
    for (int A = 1; A <= 5; ++A) EXPECT_TRUE(veselic_check(RecurrenceFamily(FamilyTag::ToPlus, A, 0.5), 100));
    EXPECT_TRUE(veselic_check(RecurrenceFamily(FamilyTag::ToPlus, 1, 0.99), 100));
}

TEST(Veselic, RejectsNonIntegerA) {
    EXPECT_THROW(veselic_check(RecurrenceFamily(FamilyTag::ToPlus, 2.5, 0.5), 100), std::domain_error);
}

TEST(Reducibility, Examples) {
    auto r = reducibility_indices(2, 1);
    auto has = [&](CoefficientName c, long n) {
        return std::find(r.begin(), r.end(), ReducibilityIndex{c, n}) != r.end();
    };
    EXPECT_TRUE(has(CoefficientName::gamma, -1));
    EXPECT_TRUE(has(CoefficientName::beta, 0));
    r = reducibility_indices(3, -1);
    EXPECT_TRUE(has(CoefficientName::alpha, 0));
    EXPECT_TRUE(has(CoefficientName::gamma, -1));
    EXPECT_TRUE(reducibility_indices(2.5, 0).empty());
}

TEST(Reducibility, IndicesAreActualZeros) {
    for (double A : {1.0, 2.0, 3.0})
        for (double nu : {0.0, 0.5, 1.0, -1.0}) {
            RecurrenceFamily f(FamilyTag::Bnu, A, 0.4, nu);
            for (auto idx : reducibility_indices(A, nu)) {
                auto c = bnu_coefficients(f, idx.n);
                const double v = idx.which == CoefficientName::alpha ? c.alpha
                                 : idx.which == CoefficientName::beta ? c.beta
                                                                      : c.gamma;
                EXPECT_EQ(v, 0.0);
            }
        }
}

TEST(Bnu, UpperHalfAtHalfAIsToMinus) {
    for (int A = 1; A <= 3; ++A) {
        RecurrenceFamily b(FamilyTag::Bnu, A, 0.6, A / 2.0), t(FamilyTag::ToMinus, A, 0.6);
        for (long n = 1; n < 20; ++n) {
            auto c = bnu_coefficients(b, n);
            auto h = heun_coefficients(t, n);
            EXPECT_NEAR(c.alpha, h.sub, 1e-12);
            EXPECT_NEAR(c.beta, h.diag, 1e-12);
            EXPECT_NEAR(c.gamma, h.sup, 1e-12);
        }
    }
}

TEST(Bnu, BlockDecompositionAtHalfA) {
    // Rows n <= -1 and n >= 1 decouple from the zero column n = 0.
    for (int A = 1; A <= 3; ++A) {
        const long N = 40;
        RecurrenceFamily f(FamilyTag::Bnu, A, 0.5, A / 2.0);
        auto s = truncate(f, N);
        auto full = eigenvalues_general(s);
        Eigen::MatrixXd T = s.dense();
        Eigen::MatrixXd lower = T.topLeftCorner(N, N), upper = T.bottomRightCorner(N, N);
        std::vector<cd> parts{cd(0)};
        for (auto* B : {&lower, &upper}) {
            Eigen::EigenSolver<Eigen::MatrixXd> es(*B, false);
            for (auto v : es.eigenvalues()) parts.push_back(v);
        }
        sort_values(parts);
        auto small = [](std::vector<cd> v) {
            std::stable_sort(v.begin(), v.end(), [](cd a, cd b) { return std::abs(a) < std::abs(b); });
            v.resize(10);
            return v;
        };
        auto a = small(full), b = small(parts);
        for (int i = 0; i < 10; ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0, 1e-7) << A;
    }
}
