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

/**
 * @file projection.hpp
 * @brief Gram / cross-vector estimation and the regularized normal-equation solve.
 *
 * With A = [a_0 .. a_{m-1}] the (sub-normalized) basis columns, the
 * reduced coefficients solve (G + lambda I) x = b where, in the default
 * sesquilinear convention, G = A^H A and b = A^H psi. The bilinear
 * convention G = A^T A, b = A^T psi is selectable and coincides with the
 * sesquilinear one whenever the columns are real.
 *
 * Hadamard test layout: [control][shared data][left ancillas][right ancillas].
 * The control-|0> branch prepares L, the control-|1> branch prepares R, and
 * P(c=0, anc=0) - P(c=1, anc=0) = Re <R|L>. An S gate on the control before
 * the closing H gives Im <R|L>.
 */
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qrom/opqnn.hpp"
#include "qrom/qsim.hpp"

namespace qrom::projection {

using GramMatrix = Eigen::MatrixXcd;
using CrossVector = Eigen::VectorXcd;

enum class Part : std::uint8_t { real, imaginary };
enum class EstimatorMode : std::uint8_t { exact, sampled };
enum class InnerProduct : std::uint8_t { sesquilinear, bilinear };

[[nodiscard]] const char* to_string(EstimatorMode m) noexcept;
[[nodiscard]] EstimatorMode estimator_mode_from_string(const std::string& s);
[[nodiscard]] const char* to_string(InnerProduct p) noexcept;
[[nodiscard]] InnerProduct inner_product_from_string(const std::string& s);

inline constexpr double kDefaultLambda = 1e-6;

struct EstimatorConfig {
    EstimatorMode mode = EstimatorMode::exact;
    std::uint64_t shots = 100000;
    std::uint64_t seed = 0;
    InnerProduct inner = InnerProduct::sesquilinear;
};

/// A circuit that prepares a (sub-normalized) vector from |0...0> once the
/// listed ancillas are postselected on |0>.
struct Preparation {
    qsim::Circuit circuit;
    std::vector<int> ancillas;

    [[nodiscard]] int data_width() const noexcept {
        return circuit.n_qubits() - static_cast<int>(ancillas.size());
    }
};

struct HadamardEstimate {
    double value = 0.0;
    /// Joint probabilities of (control, all ancillas 0).
    double p0 = 0.0;
    double p1 = 0.0;
    /// Shot standard deviation of `value` (0 in exact mode).
    double sigma = 0.0;
};

/// The combined interference circuit, exposed for inspection and tests.
[[nodiscard]] qsim::Circuit hadamard_circuit(const Preparation& left, const Preparation& right, Part part);

/// Re or Im of <R|L>. `salt` decorrelates sampled runs that share cfg.seed.
[[nodiscard]] HadamardEstimate hadamard_test(const Preparation& left, const Preparation& right, Part part,
                                             const EstimatorConfig& cfg, std::uint64_t salt = 0);

/// Preparation of basis column a_i (or its conjugate) from the model circuit.
[[nodiscard]] Preparation column_preparation(const opqnn::OpqnnModel& model, std::uint64_t index,
                                             bool conjugate);

/// Entry (i, j) = <a_i, a_j> per cfg.inner, from Hadamard tests.
[[nodiscard]] GramMatrix estimate_gram(const opqnn::OpqnnModel& model, std::size_t m, opqnn::Ordering ordering,
                                       const EstimatorConfig& cfg);
/// Entry i = <a_i, psi> per cfg.inner; psi_prep acts on the data register only.
[[nodiscard]] CrossVector estimate_cross(const opqnn::OpqnnModel& model, const qsim::Circuit& psi_prep,
                                         std::size_t m, opqnn::Ordering ordering, const EstimatorConfig& cfg);

/// Same quantities from explicitly extracted columns. dim <= 2^12.
[[nodiscard]] GramMatrix direct_gram(const opqnn::OpqnnModel& model, std::size_t m, opqnn::Ordering ordering,
                                     InnerProduct inner = InnerProduct::sesquilinear);
[[nodiscard]] CrossVector direct_cross(const opqnn::OpqnnModel& model, const qsim::StateVector& psi,
                                       std::size_t m, opqnn::Ordering ordering,
                                       InnerProduct inner = InnerProduct::sesquilinear);

[[nodiscard]] GramMatrix gram_from_columns(const Eigen::MatrixXcd& a, InnerProduct inner);
[[nodiscard]] CrossVector cross_from_columns(const Eigen::MatrixXcd& a, std::span<const qsim::Amplitude> psi,
                                             InnerProduct inner);

struct Coefficients {
    Eigen::VectorXcd x;
    double lambda = 0.0;
    /// ||(G + lambda I) x - b||.
    double residual = 0.0;
};

/// Solves (G + lambda I) x = b by LU with partial pivoting plus one step of
/// iterative refinement. Guarantees residual <= 1e-10 (1 + ||b||).
/// Throws SingularSystemError for a numerically singular system.
[[nodiscard]] Coefficients tikhonov_solve(const GramMatrix& g, const CrossVector& b, double lambda);

struct ProjectionResult {
    GramMatrix gram;
    CrossVector cross;
    Coefficients coefficients;
};

/// Direct-route projection of a unit-norm state onto precomputed columns.
[[nodiscard]] ProjectionResult project(const Eigen::MatrixXcd& a, std::span<const qsim::Amplitude> psi,
                                       double lambda, InnerProduct inner = InnerProduct::sesquilinear);

}  // namespace qrom::projection
