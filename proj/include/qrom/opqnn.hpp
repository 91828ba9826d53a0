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
 * @file opqnn.hpp
 * @brief Parameterized basis-generating circuits and basis extraction.
 *
 * Three circuit families are provided, each acting on one axis register:
 *
 *  - QFT layer (n qubits): for a = 0..n-1, H on wire a followed by a
 *    controlled phase diag(1, e^{i theta}) on wire a for every lower wire
 *    b > a (control b). Slots are numbered in that order, giving n(n-1)/2
 *    parameters. A bit-reversal swap network closes the layer, so the
 *    canonical angles pi/2^(b-a) reproduce the unitary DFT matrix
 *    F_jk = e^{2 pi i jk/N}/sqrt(N) exactly.
 *
 *  - QDCT layer (n data qubits + 1 ancilla on wire 0): the fixed sequence
 *    ctrl-P, J (open-controlled by all data), B, CNOT fan-out, ctrl-P, C,
 *    open-ctrl L_j, ctrl K_j, then the transposed QFT block on all n+1 wires
 *    (parameterized as above, n(n+1)/2 slots), CNOT fan-out, H. With
 *    canonical angles, postselecting the ancilla on |0> maps |i> to the i-th
 *    orthonormal DCT-II basis vector with unit probability.
 *
 *  - Hardware-efficient ansatz (n qubits): per block, RY on every wire, a
 *    ring of controlled RX (control k, target k+1 mod n, k = n-1..0), RY on
 *    every wire, a second ring (control k, target k-1 mod n, k = n-1,0,..,n-2).
 *    4n parameters per block (2 when n = 1).
 *
 * Multi-axis models apply an independent copy of the family (own parameter
 * block) to each axis register. Global register layout for axes a = 0,1:
 * [anc_0, data_0..., anc_1, data_1...] (ancillas only for QDCT). The data
 * index of basis column i is i = r * 2^n + c with r on axis 0.
 */
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrom/qsim.hpp"

namespace qrom::opqnn {

using ParamVector = std::vector<double>;

enum class Family : std::uint8_t { qft, qdct, ansatz };

enum class Ordering : std::uint8_t { natural, diagonal };

[[nodiscard]] const char* to_string(Family f) noexcept;
[[nodiscard]] Family family_from_string(const std::string& s);
[[nodiscard]] const char* to_string(Ordering o) noexcept;
[[nodiscard]] Ordering ordering_from_string(const std::string& s);

struct RegisterLayout {
    int data_qubits_per_axis = 6;
    int axes = 1;
    int ancilla_per_axis = 0;

    [[nodiscard]] int qubits_per_axis() const noexcept { return data_qubits_per_axis + ancilla_per_axis; }
    [[nodiscard]] int total_qubits() const noexcept { return axes * qubits_per_axis(); }
    [[nodiscard]] int data_qubits() const noexcept { return axes * data_qubits_per_axis; }
    [[nodiscard]] std::uint64_t axis_dim() const noexcept { return std::uint64_t{1} << data_qubits_per_axis; }
    [[nodiscard]] std::uint64_t dim() const noexcept { return std::uint64_t{1} << data_qubits(); }
};

struct OpqnnModel {
    Family family = Family::qft;
    RegisterLayout layout;
    ParamVector params;
    int ansatz_depth = 1;
};

// --- parameter bookkeeping ----------------------------------------------

[[nodiscard]] std::size_t qft_param_count(int n);
[[nodiscard]] std::size_t qdct_param_count(int n);
[[nodiscard]] std::size_t ansatz_param_count(int n, int depth);
/// Parameters of one axis register.
[[nodiscard]] std::size_t param_count(Family family, int n, int depth = 1);
/// Ancilla count per axis register for a family.
[[nodiscard]] int ancilla_count(Family family) noexcept;

/// Ansatz depth >= 1 whose per-axis parameter count is closest to `target`
/// (ties resolved toward the shallower circuit).
[[nodiscard]] int matched_ansatz_depth(std::size_t target, int n);

/// Validated model. Throws DomainError on a parameter-count mismatch.
[[nodiscard]] OpqnnModel make_model(Family family, int data_qubits_per_axis, int axes,
                                    ParamVector params, int ansatz_depth = 1);
/// Canonical (pi-structured) parameters; ansatz has none and is rejected.
[[nodiscard]] OpqnnModel structured_model(Family family, int data_qubits_per_axis, int axes);
/// Angles drawn i.i.d. from Uniform(0, 2 pi) with a seeded generator.
[[nodiscard]] OpqnnModel random_model(Family family, int data_qubits_per_axis, int axes,
                                      std::uint64_t seed, int ansatz_depth = 1);

[[nodiscard]] ParamVector canonical_qft_params(int n);
[[nodiscard]] ParamVector canonical_qdct_params(int n);

// --- fixed gates of the QDCT layer --------------------------------------

namespace qdct_gates {

/// e^{i pi / (2N)}.
[[nodiscard]] qsim::Amplitude omega(std::uint64_t big_n);
[[nodiscard]] std::array<qsim::Amplitude, 4> k(int j, std::uint64_t big_n);
[[nodiscard]] std::array<qsim::Amplitude, 4> l(int j, std::uint64_t big_n);
[[nodiscard]] std::array<qsim::Amplitude, 4> c(std::uint64_t big_n);
[[nodiscard]] std::array<qsim::Amplitude, 4> b();
[[nodiscard]] std::array<qsim::Amplitude, 4> j();

}  // namespace qdct_gates

// --- circuit construction -----------------------------------------------

[[nodiscard]] qsim::Circuit build_qft_layer(int n, std::span<const double> theta);
/// Transpose of the QFT layer: reversed swap network, then the layer gates in
/// reverse order (every gate in the layer is symmetric).
[[nodiscard]] qsim::Circuit build_qft_transpose(int n, std::span<const double> theta);
/// Over n + 1 qubits, qubit 0 the ancilla.
[[nodiscard]] qsim::Circuit build_qdct_layer(int n, std::span<const double> theta);
[[nodiscard]] qsim::Circuit build_ansatz(int n, int depth, std::span<const double> theta);

/// Single-axis circuit of a model (width data + ancilla of one axis).
[[nodiscard]] qsim::Circuit axis_circuit(const OpqnnModel& model, int axis);
/// Whole-register circuit of a model.
[[nodiscard]] qsim::Circuit model_circuit(const OpqnnModel& model);
/// Ancilla positions in the whole register.
[[nodiscard]] std::vector<int> ancilla_qubits(const RegisterLayout& layout);
/// Data positions in the whole register, most significant first.
[[nodiscard]] std::vector<int> data_qubits(const RegisterLayout& layout);

// --- basis extraction ---------------------------------------------------

/// a_i = (<0|_anc (x) I) U_theta |0>_anc |i>, not normalized. Whole-register route.
/// Throws DegenerateBasisError when the postselected vector vanishes.
[[nodiscard]] qsim::StateVector basis_column(const OpqnnModel& model, std::uint64_t index);

/// Per-axis column for axis-local index `index`.
[[nodiscard]] qsim::StateVector axis_basis_column(const OpqnnModel& model, int axis,
                                                  std::uint64_t index);

/// Columns for several global indices via the per-axis Kronecker factorization.
[[nodiscard]] std::vector<qsim::StateVector> basis_columns(const OpqnnModel& model,
                                                           std::span<const std::uint64_t> indices);

/// First m global indices of an enumeration over `axes` registers of
/// side 2^n. Diagonal enumerates (r, c) by r + c, ties by r (two axes);
/// single-axis diagonal equals natural.
[[nodiscard]] std::vector<std::uint64_t> basis_indices(const RegisterLayout& layout, std::size_t m,
                                                       Ordering ordering);

/// (row, col) pairs of the diagonal enumeration on a rows x cols grid.
[[nodiscard]] std::vector<std::pair<std::uint64_t, std::uint64_t>>
diagonal_pairs(std::size_t m, std::uint64_t rows, std::uint64_t cols);

/// dim x m matrix A whose k-th column is basis_column(sigma(k)).
[[nodiscard]] qsim::ComplexMatrix basis_matrix(const OpqnnModel& model, std::size_t m,
                                               Ordering ordering);

}  // namespace qrom::opqnn
