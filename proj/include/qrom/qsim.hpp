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
 * @file qsim.hpp
 * @brief Exact statevector simulation of controlled-gate circuits.
 *
 * Conventions used throughout the library:
 * - qubit 0 is the most significant bit of a basis index, so on an n-qubit
 *   register qubit q carries weight 2^(n-1-q);
 * - a two-target gate matrix is written in the local basis |t0 t1>, with
 *   targets()[0] the more significant local bit;
 * - open controls condition on |0>, closed controls on |1>;
 * - projections never renormalize. Sub-normalized states are ordinary values.
 */
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qrom::qsim {

using Amplitude = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr double kOracleTolerance = 1e-10;
inline constexpr int kMaxUnitaryQubits = 12;
inline constexpr int kMaxStateQubits = 30;

class StateVector {
public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Amplitude> amplitudes);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }

    [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<Amplitude> amplitudes() noexcept { return amps_; }
    [[nodiscard]] const std::vector<Amplitude>& vector() const noexcept { return amps_; }

    Amplitude operator[](std::size_t i) const { return amps_[i]; }
    Amplitude& operator[](std::size_t i) { return amps_[i]; }

    [[nodiscard]] double norm_squared() const noexcept;
    [[nodiscard]] double norm() const noexcept;
    /// True when the squared norm is below 1 by more than the unitarity tolerance.
    [[nodiscard]] bool is_subnormalized() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    /// Returns this / norm(). Throws DomainError for the zero vector.
    [[nodiscard]] StateVector normalized() const;

    StateVector& operator*=(Amplitude s);
    StateVector& operator+=(const StateVector& other);

private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

[[nodiscard]] StateVector operator*(Amplitude s, StateVector v);
[[nodiscard]] StateVector operator+(StateVector a, const StateVector& b);

/// Computational basis state |i> on n qubits.
[[nodiscard]] StateVector new_basis_state(int n_qubits, std::uint64_t index);

enum class Polarity : std::uint8_t { open, closed };

struct Control {
    int qubit;
    Polarity polarity = Polarity::closed;

    friend bool operator==(const Control&, const Control&) = default;
};

/// A 2x2 or 4x4 unitary acting on one or two targets, optionally controlled.
class Gate {
public:
    Gate(std::vector<Amplitude> matrix, std::vector<int> targets,
         std::vector<Control> controls = {});

    [[nodiscard]] std::span<const Amplitude> matrix() const noexcept { return matrix_; }
    [[nodiscard]] const std::vector<int>& targets() const noexcept { return targets_; }
    [[nodiscard]] const std::vector<Control>& controls() const noexcept { return controls_; }
    [[nodiscard]] int max_qubit() const noexcept;

    /// Entrywise complex conjugate of the matrix; controls unchanged.
    [[nodiscard]] Gate conjugated() const;
    [[nodiscard]] Gate adjoint() const;
    [[nodiscard]] Gate with_controls(std::span<const Control> extra) const;
    /// Relabels every qubit q as map[q].
    [[nodiscard]] Gate remapped(std::span<const int> map) const;

private:
    std::vector<Amplitude> matrix_;
    std::vector<int> targets_;
    std::vector<Control> controls_;
};

namespace gates {

[[nodiscard]] Gate h(int q);
[[nodiscard]] Gate x(int q);
[[nodiscard]] Gate s(int q);
/// diag(1, e^{i theta}).
[[nodiscard]] Gate phase(int q, double theta);
/// diag(e^{-i theta/2}, e^{i theta/2}).
[[nodiscard]] Gate rz(int q, double theta);
[[nodiscard]] Gate rx(int q, double theta);
[[nodiscard]] Gate ry(int q, double theta);
[[nodiscard]] Gate cnot(int control, int target);
[[nodiscard]] Gate swap(int a, int b);
/// Arbitrary single-qubit unitary given row-major as {m00, m01, m10, m11}.
[[nodiscard]] Gate unitary(int q, std::array<Amplitude, 4> m, std::vector<Control> controls = {});

}  // namespace gates

/// Ordered gate list on a fixed-width register. Composite blocks expand on append.
class Circuit {
public:
    explicit Circuit(int n_qubits);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<Gate>& gates() const noexcept { return gates_; }
    [[nodiscard]] std::size_t size() const noexcept { return gates_.size(); }
    [[nodiscard]] bool empty() const noexcept { return gates_.empty(); }

    Circuit& add(Gate gate);
    /// Appends a circuit of the same width.
    Circuit& append(const Circuit& other);
    /// Appends `other` with its qubit q placed on qubit map[q] of this circuit.
    Circuit& append(const Circuit& other, std::span<const int> map);

    /// Incrementer block |x> -> |x+1 mod 2^k> on `reg` (reg[0] most significant).
    Circuit& increment(std::span<const int> reg, std::span<const Control> controls = {});
    /// Swap network reversing the bit order of `reg`.
    Circuit& reverse_bits(std::span<const int> reg);

    [[nodiscard]] Circuit adjoint() const;
    [[nodiscard]] Circuit conjugated() const;
    /// Every gate additionally conditioned on `controls`.
    [[nodiscard]] Circuit controlled(std::span<const Control> controls) const;

private:
    int n_qubits_;
    std::vector<Gate> gates_;
};

void apply_in_place(StateVector& state, const Gate& gate);
[[nodiscard]] StateVector apply(StateVector state, const Gate& gate);
void run_in_place(const Circuit& circuit, StateVector& state);
[[nodiscard]] StateVector run(const Circuit& circuit, StateVector initial);

struct Projection {
    StateVector state;
    double probability;
};

/// Zeroes amplitudes inconsistent with `outcome` on `qubit`; no renormalization.
[[nodiscard]] Projection project_qubit(const StateVector& state, int qubit, int outcome);

/// Keeps the component where every listed qubit reads 0 and drops those qubits,
/// returning a vector on the remaining qubits in their original order.
[[nodiscard]] StateVector postselect_zero(const StateVector& state, std::span<const int> qubits);

[[nodiscard]] Amplitude inner_sesquilinear(const StateVector& a, const StateVector& b);
[[nodiscard]] Amplitude inner_bilinear(const StateVector& a, const StateVector& b);
[[nodiscard]] Amplitude inner_sesquilinear(std::span<const Amplitude> a, std::span<const Amplitude> b);
[[nodiscard]] Amplitude inner_bilinear(std::span<const Amplitude> a, std::span<const Amplitude> b);

[[nodiscard]] Circuit conjugate_circuit(const Circuit& circuit);

/// Dense unitary with columns run(circuit, |i>). Throws CapacityError above 12 qubits.
[[nodiscard]] ComplexMatrix circuit_unitary(const Circuit& circuit);

/// Binomial shot frequency for an event of probability p.
[[nodiscard]] double sample_frequency(double p, std::uint64_t shots, std::mt19937_64& rng);

/// Multinomial shot counts over the outcome distribution `probabilities`.
[[nodiscard]] std::vector<std::uint64_t> sample_counts(std::span<const double> probabilities,
                                                       std::uint64_t shots, std::mt19937_64& rng);

}  // namespace qrom::qsim
