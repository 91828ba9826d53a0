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
 * @file validation.hpp
 * @brief Oracle checks of the circuit building blocks against independent
 *        dense references. Each check reports its worst error and tolerance.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrom::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst observed error (or the failing fraction for statistical checks).
    double worst = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

/// "PASS|FAIL <name> worst=<e> tol=<t> <detail> (<s> s)".
[[nodiscard]] std::string format(const CheckResult& r);

/// Canonical QFT layer unitary vs the DFT matrix, max entry error.
[[nodiscard]] CheckResult check_qft_dft(std::span<const int> widths, double tol = 1e-10);

/// Canonical QDCT postselected normalized columns vs orthonormal DCT-II up to
/// per-column sign, plus orthonormality of those columns.
[[nodiscard]] CheckResult check_qdct_dct(std::span<const int> widths, double tol = 1e-8);

/// Exact Hadamard-test Gram and cross entries vs direct inner products for
/// every family and both inner products, m = 1..max_m.
[[nodiscard]] CheckResult check_estimator_exact(int qubits_per_axis, int axes, std::size_t max_m,
                                                double tol = 1e-12);

/// Sampled Gram entries within `sigmas` binomial standard deviations of the
/// exact values on at least `min_fraction` of entries over `seeds` seeds.
[[nodiscard]] CheckResult check_estimator_sampled(int qubits_per_axis, int axes, std::size_t m, std::uint64_t shots,
                                                  int seeds, double sigmas = 4.0, double min_fraction = 0.99);

/// Normalized LCU output vs normalize(A x) on random (model, x) instances.
[[nodiscard]] CheckResult check_lcu(int instances, std::uint64_t seed, double tol = 1e-10);

/// Exact SWAP-test fidelity vs |<psi|phi>|^2 and F = 2 P(0) - 1 on random pairs.
[[nodiscard]] CheckResult check_swap(int pairs, std::uint64_t seed, double tol = 1e-12);

/// Regularized solve vs a Gauss-Jordan inverse on random complex-symmetric
/// systems of size 1..max_m, plus the residual contract on every solve.
[[nodiscard]] CheckResult check_solver(int systems, std::size_t max_m, std::uint64_t seed, double tol = 1e-10);

/// Central finite differences vs the parameter-shift derivative of a single
/// R_z loss, and eps 1e-4 vs 1e-5 agreement on random circuit losses.
[[nodiscard]] CheckResult check_gradients(double shift_tol = 1e-5, double robust_rel_tol = 1e-3);

struct SuiteOptions {
    int lcu_instances = 20;
    int swap_pairs = 200;
    int solver_systems = 20;
    int sampled_seeds = 3;
    std::uint64_t shots = 100000;
    std::uint64_t seed = 0;
};

/// The suite behind the `validate` command.
[[nodiscard]] std::vector<CheckResult> run_suite(const SuiteOptions& options = {});

}  // namespace qrom::validation
