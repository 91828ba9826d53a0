// Copyright 2026 The qrom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qrom/oracle.hpp"
#include "qrom/errors.hpp"
#include "qrom/projection.hpp"
#include "qrom/recon.hpp"

namespace {

using namespace qrom::projection;
using qrom::opqnn::Family;
using qrom::opqnn::Ordering;
using qrom::qsim::Circuit;
using qrom::qsim::StateVector;
using cd = std::complex<double>;

Eigen::MatrixXcd random_complex_symmetric(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
    }
    Eigen::MatrixXcd s = a + a.transpose();
    s += static_cast<double>(2 * n) * Eigen::MatrixXcd::Identity(n, n);
    return s;
}

TEST(HadamardTest, SelfOverlapIsOne) {
    const Preparation zero{Circuit(1), {}};
    EXPECT_NEAR(hadamard_test(zero, zero, Part::real, {}).value, 1.0, 1e-15);
    EXPECT_NEAR(hadamard_test(zero, zero, Part::imaginary, {}).value, 0.0, 1e-15);
}

TEST(HadamardTest, KnownAmplitude) {
    const Preparation zero{Circuit(1), {}};
    Circuit h(1);
    h.add(qrom::qsim::gates::h(0));
    const Preparation plus{h, {}};
    EXPECT_NEAR(hadamard_test(zero, plus, Part::real, {}).value, 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(HadamardTest, ImaginaryPartSign) {
    // L = S|+> = (|0> + i|1>)/sqrt2, R = |1>: <R|L> = i/sqrt2.
    Circuit l(1);
    l.add(qrom::qsim::gates::h(0)).add(qrom::qsim::gates::s(0));
    Circuit r(1);
    r.add(qrom::qsim::gates::x(0));
    const Preparation left{l, {}};
    const Preparation right{r, {}};
    EXPECT_NEAR(hadamard_test(left, right, Part::real, {}).value, 0.0, 1e-15);
    EXPECT_NEAR(hadamard_test(left, right, Part::imaginary, {}).value, 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(HadamardTest, QdctColumnsMatchBilinearInner) {
    const auto model = qrom::opqnn::random_model(Family::qdct, 3, 1, 31);
    const auto a0 = qrom::opqnn::basis_column(model, 0);
    const auto a1 = qrom::opqnn::basis_column(model, 1);
    const auto left = column_preparation(model, 1, false);
    const auto right = column_preparation(model, 0, true);
    const cd want = qrom::qsim::inner_bilinear(a0, a1);
    EXPECT_NEAR(hadamard_test(left, right, Part::real, {}).value, want.real(), 1e-12);
    EXPECT_NEAR(hadamard_test(left, right, Part::imaginary, {}).value, want.imag(), 1e-12);

    const auto canon = qrom::opqnn::structured_model(Family::qdct, 3, 1);
    const auto c0 = qrom::opqnn::basis_column(canon, 0);
    const auto c1 = qrom::opqnn::basis_column(canon, 1);
    EXPECT_NEAR(hadamard_test(column_preparation(canon, 1, false), column_preparation(canon, 0, true), Part::real, {})
                    .value,
                qrom::qsim::inner_bilinear(c0, c1).real(), 1e-12);
}

TEST(HadamardTest, BranchWidthMismatchThrows) {
    EXPECT_THROW((void)hadamard_test({Circuit(1), {}}, {Circuit(2), {}}, Part::real, {}), qrom::DomainError);
}

TEST(EstimateGram, ExactEqualsDirectForAllFamilies) {
    for (auto family : {Family::qft, Family::qdct, Family::ansatz}) {
        for (auto inner : {InnerProduct::sesquilinear, InnerProduct::bilinear}) {
            const auto model = qrom::opqnn::random_model(family, 3, 1, 17);
            EstimatorConfig cfg;
            cfg.inner = inner;
            const auto est = estimate_gram(model, 5, Ordering::natural, cfg);
            const auto dir = direct_gram(model, 5, Ordering::natural, inner);
            EXPECT_LE(qrom::oracle::max_abs_diff(est, dir), 1e-12) << qrom::opqnn::to_string(family);
        }
    }
}

TEST(EstimateGram, TwoAxisExactEqualsDirect) {
    const auto model = qrom::opqnn::random_model(Family::qdct, 2, 2, 4);
    const auto est = estimate_gram(model, 4, Ordering::diagonal, {});
    EXPECT_LE(qrom::oracle::max_abs_diff(est, direct_gram(model, 4, Ordering::diagonal)), 1e-12);
}

TEST(EstimateGram, CanonicalQftAgainstDftOracle) {
    const auto model = qrom::opqnn::structured_model(Family::qft, 3, 1);
    const auto f = qrom::oracle::dft(8);
    const auto ses = estimate_gram(model, 8, Ordering::natural, {});
    EXPECT_LE(qrom::oracle::max_abs_diff(ses, Eigen::MatrixXcd::Identity(8, 8)), 1e-12);
    EstimatorConfig bil;
    bil.inner = InnerProduct::bilinear;
    const auto gb = estimate_gram(model, 8, Ordering::natural, bil);
    const Eigen::MatrixXcd ftf = f.transpose() * f;
    EXPECT_LE(qrom::oracle::max_abs_diff(gb, ftf), 1e-12);
    // F^T F is the index-negation permutation, hence singular on any
    // nested index set that excludes a column's partner.
    EXPECT_NEAR(std::abs(ftf(1, 7)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(ftf(1, 1)), 0.0, 1e-12);
}

TEST(EstimateGram, CanonicalQdctIsDiagonal) {
    const auto model = qrom::opqnn::structured_model(Family::qdct, 3, 1);
    const auto g = estimate_gram(model, 4, Ordering::natural, {});
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) want(i, i) = qrom::oracle::dct2(8).col(i).squaredNorm();
    EXPECT_LE(qrom::oracle::max_abs_diff(g, want), 1e-8);
}

TEST(EstimateGram, SingleEntryAndSymmetry) {
    const auto model = qrom::opqnn::random_model(Family::qdct, 2, 1, 8);
    EstimatorConfig bil;
    bil.inner = InnerProduct::bilinear;
    const auto one = estimate_gram(model, 1, Ordering::natural, bil);
    ASSERT_EQ(one.rows(), 1);
    const auto a0 = qrom::opqnn::basis_column(model, 0);
    EXPECT_LE(std::abs(one(0, 0) - qrom::qsim::inner_bilinear(a0, a0)), 1e-12);
    const auto g = estimate_gram(model, 4, Ordering::natural, bil);
    EXPECT_LE(qrom::oracle::max_abs_diff(g, g.transpose()), 1e-12);
}

TEST(EstimateCross, OrthonormalRealFamilyPicksFirstColumn) {
    const auto model = qrom::opqnn::structured_model(Family::qdct, 3, 1);
    const auto a0 = qrom::opqnn::basis_column(model, 0);
    const auto prep = qrom::recon::amplitude_encode(a0.amplitudes());
    const auto b = estimate_cross(model, prep, 4, Ordering::natural, {});
    EXPECT_NEAR(b(0).real(), a0.norm_squared(), 1e-12);
    for (Eigen::Index i = 1; i < 4; ++i) EXPECT_LE(std::abs(b(i)), 1e-12);
}

TEST(EstimateCross, UniformStateAgainstDftOracle) {
    const auto model = qrom::opqnn::structured_model(Family::qft, 3, 1);
    Circuit uni(3);
    for (int q = 0; q < 3; ++q) uni.add(qrom::qsim::gates::h(q));
    const Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(8, 1.0 / std::sqrt(8.0));
    const auto f = qrom::oracle::dft(8);
    for (auto inner : {InnerProduct::sesquilinear, InnerProduct::bilinear}) {
        EstimatorConfig cfg;
        cfg.inner = inner;
        const auto b = estimate_cross(model, uni, 8, Ordering::natural, cfg);
        const Eigen::VectorXcd want = inner == InnerProduct::bilinear ? Eigen::VectorXcd(f.transpose() * psi)
                                                                       : Eigen::VectorXcd(f.adjoint() * psi);
        EXPECT_LE((b - want).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(EstimateCross, RealFieldGivesDctCoefficients) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    std::vector<cd> v(8);
    double n2 = 0.0;
    for (auto& x : v) {
        x = g(rng);
        n2 += std::norm(x);
    }
    for (auto& x : v) x /= std::sqrt(n2);
    const auto model = qrom::opqnn::structured_model(Family::qdct, 3, 1);
    const auto b = estimate_cross(model, qrom::recon::amplitude_encode(v), 8, Ordering::natural, {});
    const Eigen::Map<const Eigen::VectorXcd> psi(v.data(), 8);
    const Eigen::VectorXcd want = qrom::oracle::dct2(8).cast<cd>().transpose() * psi;
    EXPECT_LE((b - want).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((b - direct_cross(model, StateVector(3, v), 8, Ordering::natural)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DirectCross, SingleColumnEqualsGram) {
    const auto model = qrom::opqnn::random_model(Family::ansatz, 3, 1, 3);
    const auto a0 = qrom::opqnn::basis_column(model, 0);
    const auto b = direct_cross(model, a0, 1, Ordering::natural);
    const auto g = direct_gram(model, 1, Ordering::natural);
    EXPECT_LE(std::abs(b(0) - g(0, 0)), 1e-15);
}

TEST(Sampled, WithinBinomialBounds) {
    const auto model = qrom::opqnn::random_model(Family::qdct, 2, 1, 12);
    const auto dir = direct_gram(model, 3, Ordering::natural);
    int inside = 0;
    int total = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        EstimatorConfig cfg{EstimatorMode::sampled, 100000, seed, InnerProduct::sesquilinear};
        const auto est = estimate_gram(model, 3, Ordering::natural, cfg);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                // Per-part sigma bound sqrt(p0 + p1)/sqrt(shots) <= 1/sqrt(shots).
                const double bound = 4.0 / std::sqrt(100000.0);
                inside += std::abs(est(i, j).real() - dir(i, j).real()) <= bound;
                inside += std::abs(est(i, j).imag() - dir(i, j).imag()) <= bound;
                total += 2;
            }
        }
    }
    EXPECT_GE(inside, static_cast<int>(0.99 * total));
}

TEST(Sampled, DeterministicForSeed) {
    const auto model = qrom::opqnn::random_model(Family::qft, 2, 1, 1);
    EstimatorConfig cfg{EstimatorMode::sampled, 1000, 42, InnerProduct::sesquilinear};
    EXPECT_EQ(estimate_gram(model, 2, Ordering::natural, cfg), estimate_gram(model, 2, Ordering::natural, cfg));
}

TEST(Sampled, NoRetainedShotsThrows) {
    // Left branch ancilla always reads |1>; right branch likewise.
    Circuit c(2);
    c.add(qrom::qsim::gates::x(1));
    const Preparation p{c, {1}};
    EstimatorConfig cfg{EstimatorMode::sampled, 100, 1, InnerProduct::sesquilinear};
    EXPECT_THROW((void)hadamard_test(p, p, Part::real, cfg), qrom::EstimationError);
}

TEST(Tikhonov, IdentitySystems) {
    Eigen::VectorXcd b(3);
    b << cd(1, 2), cd(-3, 0.5), cd(0, -1);
    const auto i3 = Eigen::MatrixXcd::Identity(3, 3);
    EXPECT_LE((tikhonov_solve(i3, b, 0.0).x - b).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((tikhonov_solve(i3, b, 1.0).x - b / 2.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Tikhonov, MatchesGaussJordanOracle) {
    std::mt19937_64 rng(99);
    const auto g = random_complex_symmetric(6, rng);
    const auto bv = qrom::oracle::random_complex(6, rng);
    const Eigen::Map<const Eigen::VectorXcd> b(bv.data(), 6);
    const double lambda = 1e-6;
    const Eigen::MatrixXcd shifted = g + lambda * Eigen::MatrixXcd::Identity(6, 6);
    const Eigen::VectorXcd want = qrom::oracle::gauss_jordan_inverse(shifted) * b;
    const auto got = tikhonov_solve(g, b, lambda);
    EXPECT_LE((got.x - want).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(got.residual, 1e-10 * (1.0 + b.norm()));
}

TEST(Tikhonov, SingularAtZeroLambda) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
    g(0, 0) = 1.0;
    Eigen::VectorXcd b(2);
    b << 1.0, 0.0;
    EXPECT_THROW((void)tikhonov_solve(g, b, 0.0), qrom::SingularSystemError);
    EXPECT_NO_THROW((void)tikhonov_solve(g, b, 1e-6));
    EXPECT_THROW((void)tikhonov_solve(g, b, -1.0), qrom::DomainError);
}

TEST(Tikhonov, RegularizationLimitIsLinear) {
    std::mt19937_64 rng(5);
    const auto g = random_complex_symmetric(5, rng);
    const auto bv = qrom::oracle::random_complex(5, rng);
    const Eigen::Map<const Eigen::VectorXcd> b(bv.data(), 5);
    const auto x0 = tikhonov_solve(g, b, 0.0).x;
    double prev = std::numeric_limits<double>::infinity();
    double ratio = 0.0;
    for (double lambda : {1e-2, 1e-4, 1e-6}) {
        const double gap = (tikhonov_solve(g, b, lambda).x - x0).norm();
        EXPECT_LT(gap, prev);
        ratio = std::max(ratio, gap / lambda);
        prev = gap;
    }
    // ||x(l) - x(0)|| <= C l with C bounded by ||G^-2 b||-scale quantities.
    EXPECT_LT(ratio, 10.0);
}

TEST(Project, CanonicalOrthonormalGivesClassicalCoefficients) {
    std::mt19937_64 rng(2);
    const auto v = qrom::oracle::random_unit(8, rng);
    const auto a = qrom::opqnn::basis_matrix(qrom::opqnn::structured_model(Family::qft, 3, 1), 8, Ordering::natural);
    const auto r = project(a, v, 0.0);
    const Eigen::Map<const Eigen::VectorXcd> psi(v.data(), 8);
    const Eigen::VectorXcd want = qrom::oracle::dft(8).adjoint() * psi;
    EXPECT_LE((r.coefficients.x - want).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
