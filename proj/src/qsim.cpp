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

#include "qrom/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qrom/errors.hpp"

namespace qrom::qsim {

namespace {

constexpr Amplitude kI{0.0, 1.0};

std::uint64_t bit_of(int n_qubits, int qubit) {
    return std::uint64_t{1} << (n_qubits - 1 - qubit);
}

void check_qubit_count(int n) {
    if (n < 1 || n > kMaxStateQubits) {
        throw DomainError("qubit count " + std::to_string(n) + " outside [1, " +
                          std::to_string(kMaxStateQubits) + "]");
    }
}

bool is_unitary(std::span<const Amplitude> m, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            Amplitude acc{};
            for (std::size_t k = 0; k < dim; ++k) {
                acc += std::conj(m[k * dim + i]) * m[k * dim + j];
            }
            const Amplitude expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(acc - expected) > kUnitarityTolerance) return false;
        }
    }
    return true;
}

}  // namespace

// --- StateVector ---------------------------------------------------------

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{});
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    check_qubit_count(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw DomainError("amplitude count " + std::to_string(amps_.size()) +
                          " does not equal 2^" + std::to_string(n_qubits));
    }
}

double StateVector::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return acc;
}

double StateVector::norm() const noexcept { return std::sqrt(norm_squared()); }

bool StateVector::is_subnormalized() const noexcept {
    return norm_squared() < 1.0 - kUnitarityTolerance;
}

bool StateVector::all_finite() const noexcept {
    return std::all_of(amps_.begin(), amps_.end(), [](const Amplitude& a) {
        return std::isfinite(a.real()) && std::isfinite(a.imag());
    });
}

StateVector StateVector::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw DomainError("cannot normalize the zero vector");
    StateVector out = *this;
    out *= 1.0 / n;
    return out;
}

StateVector& StateVector::operator*=(Amplitude s) {
    for (auto& a : amps_) a *= s;
    return *this;
}

StateVector& StateVector::operator+=(const StateVector& other) {
    if (other.size() != size()) throw DomainError("state dimension mismatch in addition");
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
    return *this;
}

StateVector operator*(Amplitude s, StateVector v) {
    v *= s;
    return v;
}

StateVector operator+(StateVector a, const StateVector& b) {
    a += b;
    return a;
}

StateVector new_basis_state(int n_qubits, std::uint64_t index) {
    check_qubit_count(n_qubits);
    if (index >= (std::uint64_t{1} << n_qubits)) {
        throw DomainError("basis index " + std::to_string(index) + " out of range for " +
                          std::to_string(n_qubits) + " qubits");
    }
    std::vector<Amplitude> amps(std::size_t{1} << n_qubits);
    amps[index] = 1.0;
    return {n_qubits, std::move(amps)};
}

// --- Gate ----------------------------------------------------------------

Gate::Gate(std::vector<Amplitude> matrix, std::vector<int> targets, std::vector<Control> controls)
    : matrix_(std::move(matrix)), targets_(std::move(targets)), controls_(std::move(controls)) {
    if (targets_.empty() || targets_.size() > 2) {
        throw DomainError("gate must have one or two targets");
    }
    const std::size_t dim = std::size_t{1} << targets_.size();
    if (matrix_.size() != dim * dim) throw DomainError("gate matrix size does not match targets");
    if (!is_unitary(matrix_, dim)) throw DomainError("gate matrix is not unitary");

    std::vector<int> used = targets_;
    for (const auto& c : controls_) used.push_back(c.qubit);
    if (std::any_of(used.begin(), used.end(), [](int q) { return q < 0; })) {
        throw DomainError("negative qubit index in gate");
    }
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
        throw DomainError("gate targets and controls must be distinct qubits");
    }
}

int Gate::max_qubit() const noexcept {
    int m = *std::max_element(targets_.begin(), targets_.end());
    for (const auto& c : controls_) m = std::max(m, c.qubit);
    return m;
}

Gate Gate::conjugated() const {
    std::vector<Amplitude> m(matrix_.size());
    std::transform(matrix_.begin(), matrix_.end(), m.begin(),
                   [](Amplitude a) { return std::conj(a); });
    return {std::move(m), targets_, controls_};
}

Gate Gate::adjoint() const {
    const std::size_t dim = std::size_t{1} << targets_.size();
    std::vector<Amplitude> m(matrix_.size());
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) m[i * dim + j] = std::conj(matrix_[j * dim + i]);
    }
    return {std::move(m), targets_, controls_};
}

Gate Gate::with_controls(std::span<const Control> extra) const {
    std::vector<Control> c = controls_;
    c.insert(c.end(), extra.begin(), extra.end());
    return {matrix_, targets_, std::move(c)};
}

Gate Gate::remapped(std::span<const int> map) const {
    auto lookup = [&](int q) {
        if (q >= static_cast<int>(map.size())) throw DomainError("qubit map too short for gate");
        return map[static_cast<std::size_t>(q)];
    };
    std::vector<int> t;
    for (int q : targets_) t.push_back(lookup(q));
    std::vector<Control> c;
    for (const auto& ctl : controls_) c.push_back({lookup(ctl.qubit), ctl.polarity});
    return {matrix_, std::move(t), std::move(c)};
}

namespace gates {

Gate h(int q) {
    const double r = 1.0 / std::numbers::sqrt2;
    return {{r, r, r, -r}, {q}};
}

Gate x(int q) { return {{0.0, 1.0, 1.0, 0.0}, {q}}; }

Gate s(int q) { return {{1.0, 0.0, 0.0, kI}, {q}}; }

Gate phase(int q, double theta) { return {{1.0, 0.0, 0.0, std::exp(kI * theta)}, {q}}; }

Gate rz(int q, double theta) {
    return {{std::exp(-kI * theta / 2.0), 0.0, 0.0, std::exp(kI * theta / 2.0)}, {q}};
}

Gate rx(int q, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {{c, -kI * s, -kI * s, c}, {q}};
}

Gate ry(int q, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {{c, -s, s, c}, {q}};
}

Gate cnot(int control, int target) {
    return {{0.0, 1.0, 1.0, 0.0}, {target}, {{control, Polarity::closed}}};
}

Gate swap(int a, int b) {
    std::vector<Amplitude> m(16);
    m[0] = m[1 * 4 + 2] = m[2 * 4 + 1] = m[15] = 1.0;
    return {std::move(m), {a, b}};
}

Gate unitary(int q, std::array<Amplitude, 4> m, std::vector<Control> controls) {
    return {std::vector<Amplitude>(m.begin(), m.end()), {q}, std::move(controls)};
}

}  // namespace gates

// --- Circuit -------------------------------------------------------------

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) { check_qubit_count(n_qubits); }

Circuit& Circuit::add(Gate gate) {
    if (gate.max_qubit() >= n_qubits_) {
        throw DomainError("gate touches qubit " + std::to_string(gate.max_qubit()) +
                          " on a " + std::to_string(n_qubits_) + "-qubit circuit");
    }
    gates_.push_back(std::move(gate));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.n_qubits_ != n_qubits_) throw DomainError("circuit width mismatch in append");
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
    return *this;
}

Circuit& Circuit::append(const Circuit& other, std::span<const int> map) {
    if (map.size() != static_cast<std::size_t>(other.n_qubits_)) {
        throw DomainError("qubit map length must equal the appended circuit's width");
    }
    for (const auto& g : other.gates_) add(g.remapped(map));
    return *this;
}

Circuit& Circuit::increment(std::span<const int> reg, std::span<const Control> controls) {
    // Bit j flips iff every less significant bit is 1; most significant first so
    // each flip reads the pre-increment lower bits.
    for (std::size_t j = 0; j < reg.size(); ++j) {
        std::vector<Control> c(controls.begin(), controls.end());
        for (std::size_t k = j + 1; k < reg.size(); ++k) c.push_back({reg[k], Polarity::closed});
        add(gates::unitary(reg[j], {0.0, 1.0, 1.0, 0.0}, std::move(c)));
    }
    return *this;
}

Circuit& Circuit::reverse_bits(std::span<const int> reg) {
    for (std::size_t i = 0; i < reg.size() / 2; ++i) add(gates::swap(reg[i], reg[reg.size() - 1 - i]));
    return *this;
}

Circuit Circuit::adjoint() const {
    Circuit out(n_qubits_);
    out.gates_.reserve(gates_.size());
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->adjoint());
    return out;
}

Circuit Circuit::conjugated() const {
    Circuit out(n_qubits_);
    out.gates_.reserve(gates_.size());
    for (const auto& g : gates_) out.gates_.push_back(g.conjugated());
    return out;
}

Circuit Circuit::controlled(std::span<const Control> controls) const {
    Circuit out(n_qubits_);
    for (const auto& g : gates_) out.add(g.with_controls(controls));
    return out;
}

// --- Simulation ----------------------------------------------------------

void apply_in_place(StateVector& state, const Gate& gate) {
    const int n = state.n_qubits();
    if (gate.max_qubit() >= n) throw DomainError("gate does not fit the state's register");

    std::uint64_t ctrl_mask = 0;
    std::uint64_t ctrl_value = 0;
    for (const auto& c : gate.controls()) {
        const auto b = bit_of(n, c.qubit);
        ctrl_mask |= b;
        if (c.polarity == Polarity::closed) ctrl_value |= b;
    }

    auto amps = state.amplitudes();
    const auto m = gate.matrix();
    const std::uint64_t dim = amps.size();

    if (gate.targets().size() == 1) {
        const std::uint64_t tb = bit_of(n, gate.targets()[0]);
        for (std::uint64_t i = 0; i < dim; ++i) {
            if ((i & tb) || (i & ctrl_mask) != ctrl_value) continue;
            const Amplitude a0 = amps[i];
            const Amplitude a1 = amps[i | tb];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[i | tb] = m[2] * a0 + m[3] * a1;
        }
        return;
    }

    const std::uint64_t hi = bit_of(n, gate.targets()[0]);
    const std::uint64_t lo = bit_of(n, gate.targets()[1]);
    const std::array<std::uint64_t, 4> offs{0, lo, hi, hi | lo};
    for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & (hi | lo)) || (i & ctrl_mask) != ctrl_value) continue;
        std::array<Amplitude, 4> in{};
        for (std::size_t k = 0; k < 4; ++k) in[k] = amps[i | offs[k]];
        for (std::size_t r = 0; r < 4; ++r) {
            Amplitude acc{};
            for (std::size_t k = 0; k < 4; ++k) acc += m[r * 4 + k] * in[k];
            amps[i | offs[r]] = acc;
        }
    }
}

StateVector apply(StateVector state, const Gate& gate) {
    apply_in_place(state, gate);
    return state;
}

void run_in_place(const Circuit& circuit, StateVector& state) {
    if (circuit.n_qubits() != state.n_qubits()) {
        throw DomainError("circuit width " + std::to_string(circuit.n_qubits()) +
                          " does not match state width " + std::to_string(state.n_qubits()));
    }
    for (const auto& g : circuit.gates()) apply_in_place(state, g);
}

StateVector run(const Circuit& circuit, StateVector initial) {
    run_in_place(circuit, initial);
    return initial;
}

Projection project_qubit(const StateVector& state, int qubit, int outcome) {
    if (qubit < 0 || qubit >= state.n_qubits()) throw DomainError("projected qubit out of range");
    if (outcome != 0 && outcome != 1) throw DomainError("projection outcome must be 0 or 1");
    const std::uint64_t b = bit_of(state.n_qubits(), qubit);
    StateVector out = state;
    double p = 0.0;
    auto amps = out.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        const bool one = (i & b) != 0;
        if (one != (outcome == 1)) {
            amps[i] = 0.0;
        } else {
            p += std::norm(amps[i]);
        }
    }
    return {std::move(out), p};
}

StateVector postselect_zero(const StateVector& state, std::span<const int> qubits) {
    const int n = state.n_qubits();
    std::vector<bool> drop(static_cast<std::size_t>(n), false);
    for (int q : qubits) {
        if (q < 0 || q >= n) throw DomainError("postselected qubit out of range");
        drop[static_cast<std::size_t>(q)] = true;
    }
    std::vector<int> keep;
    for (int q = 0; q < n; ++q) {
        if (!drop[static_cast<std::size_t>(q)]) keep.push_back(q);
    }
    if (keep.empty()) throw DomainError("postselection would remove every qubit");
    if (keep.size() == static_cast<std::size_t>(n)) return state;

    const int k = static_cast<int>(keep.size());
    std::vector<Amplitude> out(std::size_t{1} << k);
    for (std::uint64_t r = 0; r < out.size(); ++r) {
        std::uint64_t full = 0;
        for (int j = 0; j < k; ++j) {
            if (r & bit_of(k, j)) full |= bit_of(n, keep[static_cast<std::size_t>(j)]);
        }
        out[r] = state[full];
    }
    return {k, std::move(out)};
}

Amplitude inner_sesquilinear(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) throw DomainError("inner product dimension mismatch");
    Amplitude acc{};
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
    return acc;
}

Amplitude inner_bilinear(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) throw DomainError("inner product dimension mismatch");
    Amplitude acc{};
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

Amplitude inner_sesquilinear(const StateVector& a, const StateVector& b) {
    return inner_sesquilinear(a.amplitudes(), b.amplitudes());
}

Amplitude inner_bilinear(const StateVector& a, const StateVector& b) {
    return inner_bilinear(a.amplitudes(), b.amplitudes());
}

Circuit conjugate_circuit(const Circuit& circuit) { return circuit.conjugated(); }

ComplexMatrix circuit_unitary(const Circuit& circuit) {
    const int n = circuit.n_qubits();
    if (n > kMaxUnitaryQubits) {
        throw CapacityError("circuit_unitary limited to " + std::to_string(kMaxUnitaryQubits) +
                            " qubits, got " + std::to_string(n));
    }
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    ComplexMatrix u(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const auto out = run(circuit, new_basis_state(n, static_cast<std::uint64_t>(col)));
        for (Eigen::Index row = 0; row < dim; ++row) u(row, col) = out[static_cast<std::size_t>(row)];
    }
    return u;
}

double sample_frequency(double p, std::uint64_t shots, std::mt19937_64& rng) {
    if (shots == 0) throw DomainError("shot count must be positive");
    std::binomial_distribution<std::uint64_t> dist(shots, std::clamp(p, 0.0, 1.0));
    return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

std::vector<std::uint64_t> sample_counts(std::span<const double> probabilities, std::uint64_t shots,
                                         std::mt19937_64& rng) {
    std::vector<std::uint64_t> counts(probabilities.size(), 0);
    std::uint64_t remaining = shots;
    double mass = 1.0;
    for (std::size_t k = 0; k + 1 < probabilities.size() && remaining > 0; ++k) {
        const double p = std::clamp(probabilities[k], 0.0, 1.0);
        const double cond = mass > 0.0 ? std::clamp(p / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> dist(remaining, cond);
        counts[k] = dist(rng);
        remaining -= counts[k];
        mass -= p;
    }
    if (!probabilities.empty()) counts.back() += remaining;
    return counts;
}

}  // namespace qrom::qsim
