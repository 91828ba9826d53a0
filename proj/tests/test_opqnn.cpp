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
#include "qrom/opqnn.hpp"

namespace {

using namespace qrom::opqnn;
using qrom::qsim::circuit_unitary;
using cd = std::complex<double>;

Eigen::MatrixXcd normalized_qdct_columns(int n) {
    const auto model = structured_model(Family::qdct, n, 1);
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd out(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto col = basis_column(model, i).normalized();
        for (std::size_t r = 0; r < dim; ++r) out(r, i) = col[r];
    }
    return out;
}

// Max entry error after aligning each column's sign to the reference.
double signed_column_error(const Eigen::MatrixXcd& got, const Eigen::MatrixXd& ref) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < got.cols(); ++k) {
        const Eigen::VectorXcd r = ref.col(k).cast<cd>();
        const double plus = (got.col(k) - r).cwiseAbs().maxCoeff();
        const double minus = (got.col(k) + r).cwiseAbs().maxCoeff();
        worst = std::max(worst, std::min(plus, minus));
    }
    return worst;
}

TEST(ParamCounts, PureFunctionOfFamilyAndWidth) {
    for (int n = 1; n <= 7; ++n) {
        const auto un = static_cast<std::size_t>(n);
        EXPECT_EQ(param_count(Family::qft, n), un * (un - 1) / 2);
        EXPECT_EQ(param_count(Family::qdct, n), (un + 1) * un / 2);
        EXPECT_EQ(param_count(Family::ansatz, n, 1), n == 1 ? 2u : 4 * un);
        EXPECT_EQ(param_count(Family::ansatz, n, 3), 3 * param_count(Family::ansatz, n, 1));
        EXPECT_EQ(param_count(Family::qft, n), param_count(Family::qft, n));
    }
}

TEST(CanonicalParams, TextbookAngles) {
    EXPECT_TRUE(canonical_qft_params(1).empty());
    const auto p2 = canonical_qft_params(2);
    ASSERT_EQ(p2.size(), 1u);
    EXPECT_DOUBLE_EQ(p2[0], std::numbers::pi / 2);
    const auto p3 = canonical_qft_params(3);
    ASSERT_EQ(p3.size(), 3u);
    EXPECT_DOUBLE_EQ(p3[0], std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(p3[1], std::numbers::pi / 4);
    EXPECT_DOUBLE_EQ(p3[2], std::numbers::pi / 2);
}

TEST(QftLayer, SingleQubitIsHadamard) {
    const auto u = circuit_unitary(build_qft_layer(1, {}));
    const double r = 1.0 / std::numbers::sqrt2;
    Eigen::MatrixXcd h(2, 2);
    h << r, r, r, -r;
    EXPECT_LE(qrom::oracle::max_abs_diff(u, h), 1e-15);
}

TEST(QftLayer, CanonicalEqualsDft) {
    for (int n : {1, 2, 3, 6}) {
        const auto u = circuit_unitary(build_qft_layer(n, canonical_qft_params(n)));
        EXPECT_LE(qrom::oracle::max_abs_diff(u, qrom::oracle::dft(std::size_t{1} << n)), 1e-10) << "n=" << n;
    }
}

TEST(QftLayer, ZeroAnglesGiveHadamardsThenReversal) {
    // With no phases the layer is H on every wire followed by the bit reversal:
    // U_ab = (-1)^{rev(a).b} / sqrt(8).
    const std::vector<double> zeros(3, 0.0);
    const auto u = circuit_unitary(build_qft_layer(3, zeros));
    Eigen::MatrixXcd expect(8, 8);
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            const int rev_a = ((a & 1) << 2) | (a & 2) | ((a >> 2) & 1);
            const int parity = __builtin_popcount(static_cast<unsigned>(rev_a & b)) % 2;
            expect(a, b) = (parity ? -1.0 : 1.0) / std::sqrt(8.0);
        }
    }
    EXPECT_LE(qrom::oracle::max_abs_diff(u, expect), 1e-12);
}

TEST(QftLayer, LengthMismatchThrows) {
    const std::vector<double> two(2, 0.0);
    EXPECT_THROW((void)build_qft_layer(3, two), qrom::DomainError);
}

TEST(QftTranspose, IsTransposeOfLayer) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> a(0.0, 6.0);
    std::vector<double> theta(6);
    for (auto& t : theta) t = a(rng);
    const auto u = circuit_unitary(build_qft_layer(4, theta));
    const auto ut = circuit_unitary(build_qft_transpose(4, theta));
    EXPECT_LE(qrom::oracle::max_abs_diff(ut, u.transpose()), 1e-12);
}

TEST(QdctGates, AreUnitary) {
    const std::uint64_t big_n = 8;
    for (const auto& m : {qdct_gates::k(1, big_n), qdct_gates::k(3, big_n), qdct_gates::l(2, big_n),
                          qdct_gates::c(big_n), qdct_gates::b(), qdct_gates::j()}) {
        EXPECT_NO_THROW((void)qrom::qsim::gates::unitary(0, m));
    }
    EXPECT_NEAR(std::arg(qdct_gates::omega(big_n)), std::numbers::pi / 16.0, 1e-15);
}

TEST(QdctLayer, CanonicalMatchesDctTypeTwo) {
    // The type was pinned by comparing against all four orthonormal DCT
    // variants once; only type II matches, so that is the frozen oracle.
    for (int n : {1, 2, 3}) {
        const auto cols = normalized_qdct_columns(n);
        const std::size_t dim = std::size_t{1} << n;
        EXPECT_LE(signed_column_error(cols, qrom::oracle::dct2(dim)), 1e-8) << "n=" << n;
        const Eigen::MatrixXcd gram = cols.adjoint() * cols;
        EXPECT_LE(qrom::oracle::max_abs_diff(gram, Eigen::MatrixXcd::Identity(dim, dim)), 1e-8);
    }
    const auto cols3 = normalized_qdct_columns(3);
    EXPECT_GT(signed_column_error(cols3, qrom::oracle::dct1(8)), 1e-3);
    EXPECT_GT(signed_column_error(cols3, qrom::oracle::dct3(8)), 1e-3);
    EXPECT_GT(signed_column_error(cols3, qrom::oracle::dct4(8)), 1e-3);
}

TEST(QdctLayer, CanonicalColumnNormMatchesOracle) {
    // The orthonormal DCT-II embedding has unit columns, so postselection
    // succeeds with probability 1 on every input.
    const auto model = structured_model(Family::qdct, 3, 1);
    for (std::uint64_t i = 0; i < 8; ++i) {
        const double norm = basis_column(model, i).norm();
        EXPECT_NEAR(norm, qrom::oracle::dct2(8).col(static_cast<Eigen::Index>(i)).norm(), 1e-10);
    }
    const auto a0 = qrom::qsim::run(build_qdct_layer(3, canonical_qdct_params(3)),
                                    qrom::qsim::new_basis_state(4, 0));
    const auto proj = qrom::qsim::project_qubit(a0, 0, 0);
    EXPECT_NEAR(proj.probability, 1.0, 1e-10);
}

TEST(QdctLayer, ArbitraryAnglesFullCircuitUnitary) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> a(0.0, 2.0 * std::numbers::pi);
    std::vector<double> theta(qdct_param_count(3));
    for (auto& t : theta) t = a(rng);
    const auto u = circuit_unitary(build_qdct_layer(3, theta));
    EXPECT_LE(qrom::oracle::max_abs_diff(u.adjoint() * u, Eigen::MatrixXcd::Identity(16, 16)), 1e-12);
}

TEST(Ansatz, ZeroAnglesIsIdentity) {
    const std::vector<double> zeros(ansatz_param_count(4, 1), 0.0);
    const auto u = circuit_unitary(build_ansatz(4, 1, zeros));
    EXPECT_LE(qrom::oracle::max_abs_diff(u, Eigen::MatrixXcd::Identity(16, 16)), 1e-15);
}

TEST(Ansatz, RandomAnglesUnitaryAndDepthScaling) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> a(0.0, 2.0 * std::numbers::pi);
    std::vector<double> theta(ansatz_param_count(4, 1));
    for (auto& t : theta) t = a(rng);
    const auto u = circuit_unitary(build_ansatz(4, 1, theta));
    EXPECT_LE(qrom::oracle::max_abs_diff(u.adjoint() * u, Eigen::MatrixXcd::Identity(16, 16)), 1e-12);
    EXPECT_EQ(ansatz_param_count(4, 2), 2 * ansatz_param_count(4, 1));
    EXPECT_THROW((void)build_ansatz(4, 2, theta), qrom::DomainError);
}

TEST(Ansatz, MatchedDepthIsClosest) {
    EXPECT_EQ(matched_ansatz_depth(6, 4), 1);    // 16 per block
    EXPECT_EQ(matched_ansatz_depth(40, 4), 2);   // 32 vs 48: 32 closer
    EXPECT_EQ(matched_ansatz_depth(41, 4), 3);   // 48 closer than 32
    EXPECT_EQ(matched_ansatz_depth(15, 6), 1);
}

TEST(BasisColumn, QftColumnIsUnitaryColumn) {
    const auto model = structured_model(Family::qft, 3, 1);
    const auto f = qrom::oracle::dft(8);
    for (std::uint64_t i = 0; i < 8; ++i) {
        const auto col = basis_column(model, i);
        EXPECT_NEAR(col.norm(), 1.0, 1e-12);
        for (std::size_t r = 0; r < 8; ++r) {
            EXPECT_LE(std::abs(col[r] - f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i))), 1e-12);
        }
    }
}

TEST(BasisColumn, SixQubitCanonicalColumnOne) {
    const auto col = basis_column(structured_model(Family::qft, 6, 1), 1);
    const auto f = qrom::oracle::dft(64);
    for (Eigen::Index r = 0; r < 64; ++r) EXPECT_LE(std::abs(col[static_cast<std::size_t>(r)] - f(r, 1)), 1e-10);
}

TEST(BasisColumn, NormNeverExceedsOne) {
    for (auto family : {Family::qft, Family::qdct, Family::ansatz}) {
        const auto model = random_model(family, 3, 1, 77);
        for (std::uint64_t i = 0; i < 8; ++i) EXPECT_LE(basis_column(model, i).norm_squared(), 1.0 + 1e-12);
    }
}

TEST(BasisColumn, TwoAxisQftIsKroneckerOfDft) {
    const auto model = structured_model(Family::qft, 2, 2);
    const auto f = qrom::oracle::dft(4);
    for (std::uint64_t r = 0; r < 4; ++r) {
        for (std::uint64_t c = 0; c < 4; ++c) {
            const auto col = basis_column(model, r * 4 + c);
            for (std::size_t x = 0; x < 4; ++x) {
                for (std::size_t y = 0; y < 4; ++y) {
                    const cd expect = f(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(r)) *
                                      f(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(c));
                    EXPECT_LE(std::abs(col[x * 4 + y] - expect), 1e-10);
                }
            }
        }
    }
}

TEST(BasisColumn, FactorizedRouteMatchesWholeRegister) {
    for (auto family : {Family::qft, Family::qdct, Family::ansatz}) {
        const auto model = random_model(family, 2, 2, 5);
        std::vector<std::uint64_t> idx(16);
        for (std::uint64_t i = 0; i < 16; ++i) idx[i] = i;
        const auto fast = basis_columns(model, idx);
        for (std::uint64_t i = 0; i < 16; ++i) {
            const auto slow = basis_column(model, i);
            for (std::size_t k = 0; k < 16; ++k) EXPECT_LE(std::abs(fast[i][k] - slow[k]), 1e-10);
        }
    }
}

TEST(BasisColumn, OutOfRangeThrows) {
    EXPECT_THROW((void)basis_column(structured_model(Family::qft, 2, 1), 4), qrom::DomainError);
}

TEST(Ordering, DiagonalPairs) {
    const auto p = diagonal_pairs(3, 4, 4);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[0], std::make_pair(std::uint64_t{0}, std::uint64_t{0}));
    EXPECT_EQ(p[1], std::make_pair(std::uint64_t{0}, std::uint64_t{1}));
    EXPECT_EQ(p[2], std::make_pair(std::uint64_t{1}, std::uint64_t{0}));
    const auto all = diagonal_pairs(16, 4, 4);
    EXPECT_EQ(all.back(), std::make_pair(std::uint64_t{3}, std::uint64_t{3}));
}

TEST(BasisMatrix, FullCanonicalQftIsDft) {
    const auto model = structured_model(Family::qft, 3, 1);
    EXPECT_LE(qrom::oracle::max_abs_diff(basis_matrix(model, 8, Ordering::natural), qrom::oracle::dft(8)), 1e-12);
    const auto one = basis_matrix(model, 1, Ordering::natural);
    ASSERT_EQ(one.cols(), 1);
    const auto c0 = basis_column(model, 0);
    for (Eigen::Index r = 0; r < 8; ++r) EXPECT_EQ(one(r, 0), c0[static_cast<std::size_t>(r)]);
    EXPECT_THROW((void)basis_matrix(model, 9, Ordering::natural), qrom::DomainError);
}

TEST(BasisMatrix, DiagonalTwoAxisIndices) {
    const RegisterLayout layout{2, 2, 0};
    const auto idx = basis_indices(layout, 3, Ordering::diagonal);
    EXPECT_EQ(idx, (std::vector<std::uint64_t>{0, 1, 4}));
}

TEST(Models, RandomIsSeededAndInRange) {
    const auto a = random_model(Family::qft, 4, 2, 9);
    const auto b = random_model(Family::qft, 4, 2, 9);
    const auto c = random_model(Family::qft, 4, 2, 10);
    EXPECT_EQ(a.params, b.params);
    EXPECT_NE(a.params, c.params);
    for (double p : a.params) {
        EXPECT_GE(p, 0.0);
        EXPECT_LT(p, 2.0 * std::numbers::pi);
    }
    EXPECT_THROW((void)structured_model(Family::ansatz, 4, 1), qrom::DomainError);
    EXPECT_THROW((void)make_model(Family::qft, 4, 1, ParamVector(5)), qrom::DomainError);
}

}  // namespace
