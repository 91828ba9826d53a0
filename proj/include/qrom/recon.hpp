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
 * @file recon.hpp
 * @brief State reconstruction by linear combination of unitaries, SWAP-test
 *        fidelity, and reconstruction metrics.
 *
 * LCU register: [k coefficient qubits][model register]. U_x loads
 * sqrt(|x_i| / s), s = sum |x_i|, with real R_y rotations. The select stage,
 * conditioned on the coefficient register reading i, applies the phase
 * e^{i arg x_i}, prepares |sigma(i)> with X gates, then runs the model
 * circuit. After U_x^dagger the coefficient register and model ancillas are
 * postselected on |0>, leaving (1/s) sum_i x_i a_i with success probability
 * ||sum_i x_i a_i||^2 / s^2.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrom/opqnn.hpp"
#include "qrom/projection.hpp"
#include "qrom/qsim.hpp"

namespace qrom::recon {

/// Binary-tree preparation of v / ||v|| on max(1, ceil(log2 |v|)) qubits,
/// zero padded. Throws DomainError for an empty or zero vector.
[[nodiscard]] qsim::Circuit amplitude_encode(std::span<const qsim::Amplitude> v);

struct LcuPlan {
    int k = 0;
    /// sqrt(|x_i| / s), zero padded to 2^k; unit norm.
    std::vector<double> coefficient_state;
    std::vector<double> phases;
    std::vector<std::uint64_t> indices;
    double l1_norm = 0.0;
};

[[nodiscard]] LcuPlan make_lcu_plan(const Eigen::VectorXcd& x, std::span<const std::uint64_t> indices);
[[nodiscard]] qsim::Circuit lcu_circuit(const opqnn::OpqnnModel& model, const LcuPlan& plan);

struct LcuResult {
    qsim::StateVector state;
    double success_probability = 0.0;
};

/// Throws DegenerateReconstructionError when the success probability is below 1e-14.
[[nodiscard]] LcuResult lcu_reconstruct(const opqnn::OpqnnModel& model, const Eigen::VectorXcd& x,
                                        std::span<const std::uint64_t> indices);
[[nodiscard]] LcuResult lcu_reconstruct(const opqnn::OpqnnModel& model, const Eigen::VectorXcd& x,
                                        opqnn::Ordering ordering = opqnn::Ordering::diagonal);

struct FidelityReport {
    double fidelity = 0.0;
    double p0 = 0.0;
    projection::EstimatorMode mode = projection::EstimatorMode::exact;
    std::uint64_t shots = 0;
};

/// Largest per-state width simulated gate by gate; wider pairs use the
/// amplitude form P(0) = ||psi (x) phi + phi (x) psi||^2 / 4.
inline constexpr int kSwapCircuitMaxQubits = 6;

/// Both inputs must have unit norm to 1e-10 (DomainError otherwise).
[[nodiscard]] FidelityReport swap_test(const qsim::StateVector& psi, const qsim::StateVector& phi,
                                       const projection::EstimatorConfig& cfg = {});

/// 1 - F between psi and the normalized LCU output, exact mode.
[[nodiscard]] double reconstruction_loss(const qsim::StateVector& psi, const opqnn::OpqnnModel& model,
                                         const Eigen::VectorXcd& x,
                                         opqnn::Ordering ordering = opqnn::Ordering::diagonal);

/// A x as a flat vector.
[[nodiscard]] Eigen::VectorXcd combine(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x);

/// |<psi | normalize(A x)>|^2; 0 when A x vanishes.
[[nodiscard]] double direct_fidelity(std::span<const qsim::Amplitude> psi, const Eigen::MatrixXcd& a,
                                     const Eigen::VectorXcd& x);

/// Mean squared pointwise difference. Throws ShapeError on a length mismatch.
[[nodiscard]] double mse(std::span<const double> a, std::span<const double> b);

}  // namespace qrom::recon
