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

#include "qrom/opqnn.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "qrom/errors.hpp"

namespace qrom::opqnn {

using qsim::Amplitude;
using qsim::Circuit;
using qsim::Control;
using qsim::Polarity;
using qsim::StateVector;

namespace {

constexpr Amplitude kI{0.0, 1.0};
constexpr double kDegenerateNorm2 = 1e-30;

void check_axis_qubits(int n) {
    if (n < 1 || n > 12) throw DomainError("qubits per axis must lie in [1, 12], got " + std::to_string(n));
}

void check_length(std::span<const double> theta, std::size_t expected, const char* what) {
    if (theta.size() != expected) {
        throw DomainError(std::string(what) + " expects " + std::to_string(expected) +
                          " parameters, got " + std::to_string(theta.size()));
    }
}

// QFT layer gates on `reg` with slots drawn from theta, in layer order.
std::vector<qsim::Gate> qft_layer_gates(std::span<const int> reg, std::span<const double> theta) {
    std::vector<qsim::Gate> out;
    std::size_t slot = 0;
    for (std::size_t a = 0; a < reg.size(); ++a) {
        out.push_back(qsim::gates::h(reg[a]));
        for (std::size_t b = a + 1; b < reg.size(); ++b) {
            out.push_back(qsim::gates::phase(reg[a], theta[slot++])
                              .with_controls(std::vector<Control>{{reg[b], Polarity::closed}}));
        }
    }
    return out;
}

std::vector<int> iota_vec(int begin, int count) {
    std::vector<int> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = begin + i;
    return v;
}

std::span<const double> axis_params(const OpqnnModel& model, int axis) {
    const std::size_t per_axis =
        param_count(model.family, model.layout.data_qubits_per_axis, model.ansatz_depth);
    return std::span<const double>(model.params).subspan(static_cast<std::size_t>(axis) * per_axis,
                                                         per_axis);
}

void check_model(const OpqnnModel& model) {
    const auto& l = model.layout;
    check_axis_qubits(l.data_qubits_per_axis);
    if (l.axes != 1 && l.axes != 2) throw DomainError("axes must be 1 or 2");
    if (l.ancilla_per_axis != ancilla_count(model.family)) {
        throw DomainError("ancilla count does not match the circuit family");
    }
    const std::size_t expected = static_cast<std::size_t>(l.axes) *
                                 param_count(model.family, l.data_qubits_per_axis, model.ansatz_depth);
    if (model.params.size() != expected) {
        throw DomainError("model expects " + std::to_string(expected) + " parameters, got " +
                          std::to_string(model.params.size()));
    }
    for (double p : model.params) {
        if (!std::isfinite(p)) throw DomainError("non-finite circuit parameter");
    }
}

}  // namespace

const char* to_string(Family f) noexcept {
    switch (f) {
        case Family::qft: return "qft";
        case Family::qdct: return "qdct";
        case Family::ansatz: return "ansatz";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    if (s == "qft") return Family::qft;
    if (s == "qdct") return Family::qdct;
    if (s == "ansatz") return Family::ansatz;
    throw DomainError("unknown circuit family '" + s + "'");
}

const char* to_string(Ordering o) noexcept {
    return o == Ordering::natural ? "natural" : "diagonal";
}

Ordering ordering_from_string(const std::string& s) {
    if (s == "natural") return Ordering::natural;
    if (s == "diagonal") return Ordering::diagonal;
    throw DomainError("unknown ordering '" + s + "'");
}

std::size_t qft_param_count(int n) {
    check_axis_qubits(n);
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

std::size_t qdct_param_count(int n) {
    check_axis_qubits(n);
    return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n) / 2;
}

std::size_t ansatz_param_count(int n, int depth) {
    check_axis_qubits(n);
    if (depth < 1) throw DomainError("ansatz depth must be at least 1");
    const std::size_t per_block = n == 1 ? 2 : 4 * static_cast<std::size_t>(n);
    return per_block * static_cast<std::size_t>(depth);
}

std::size_t param_count(Family family, int n, int depth) {
    switch (family) {
        case Family::qft: return qft_param_count(n);
        case Family::qdct: return qdct_param_count(n);
        case Family::ansatz: return ansatz_param_count(n, depth);
    }
    throw DomainError("unknown family");
}

int ancilla_count(Family family) noexcept { return family == Family::qdct ? 1 : 0; }

int matched_ansatz_depth(std::size_t target, int n) {
    const std::size_t per_block = ansatz_param_count(n, 1);
    int best = 1;
    std::size_t best_gap = static_cast<std::size_t>(-1);
    for (int d = 1; d <= 64; ++d) {
        const std::size_t count = per_block * static_cast<std::size_t>(d);
        const std::size_t gap = count > target ? count - target : target - count;
        if (gap < best_gap) {
            best = d;
            best_gap = gap;
        }
        if (count > target) break;
    }
    return best;
}

OpqnnModel make_model(Family family, int data_qubits_per_axis, int axes, ParamVector params,
                      int ansatz_depth) {
    OpqnnModel m;
    m.family = family;
    m.layout = RegisterLayout{data_qubits_per_axis, axes, ancilla_count(family)};
    m.params = std::move(params);
    m.ansatz_depth = family == Family::ansatz ? ansatz_depth : 1;
    check_model(m);
    return m;
}

OpqnnModel structured_model(Family family, int data_qubits_per_axis, int axes) {
    ParamVector per_axis;
    switch (family) {
        case Family::qft: per_axis = canonical_qft_params(data_qubits_per_axis); break;
        case Family::qdct: per_axis = canonical_qdct_params(data_qubits_per_axis); break;
        case Family::ansatz:
            throw DomainError("the hardware-efficient ansatz has no structured initialization");
    }
    ParamVector all;
    for (int a = 0; a < axes; ++a) all.insert(all.end(), per_axis.begin(), per_axis.end());
    return make_model(family, data_qubits_per_axis, axes, std::move(all));
}

OpqnnModel random_model(Family family, int data_qubits_per_axis, int axes, std::uint64_t seed,
                        int ansatz_depth) {
    const std::size_t count = static_cast<std::size_t>(axes) *
                              param_count(family, data_qubits_per_axis, ansatz_depth);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    ParamVector p(count);
    for (auto& v : p) v = angle(rng);
    return make_model(family, data_qubits_per_axis, axes, std::move(p), ansatz_depth);
}

ParamVector canonical_qft_params(int n) {
    ParamVector p;
    p.reserve(qft_param_count(n));
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) p.push_back(std::numbers::pi / std::ldexp(1.0, b - a));
    }
    return p;
}

ParamVector canonical_qdct_params(int n) {
    check_axis_qubits(n);
    return canonical_qft_params(n + 1);
}

namespace qdct_gates {

Amplitude omega(std::uint64_t big_n) {
    return std::exp(kI * (std::numbers::pi / (2.0 * static_cast<double>(big_n))));
}

std::array<Amplitude, 4> k(int j, std::uint64_t big_n) {
    return {std::pow(std::conj(omega(big_n)), std::ldexp(1.0, j - 1)), 0.0, 0.0, 1.0};
}

std::array<Amplitude, 4> l(int j, std::uint64_t big_n) {
    return {1.0, 0.0, 0.0, std::pow(omega(big_n), std::ldexp(1.0, j - 1))};
}

std::array<Amplitude, 4> c(std::uint64_t big_n) { return {1.0, 0.0, 0.0, std::conj(omega(big_n))}; }

std::array<Amplitude, 4> b() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r, kI * r, r, -kI * r};
}

std::array<Amplitude, 4> j() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r, -kI * r, -kI * r, r};
}

}  // namespace qdct_gates

Circuit build_qft_layer(int n, std::span<const double> theta) {
    check_axis_qubits(n);
    check_length(theta, qft_param_count(n), "QFT layer");
    Circuit c(n);
    const auto reg = iota_vec(0, n);
    for (auto& g : qft_layer_gates(reg, theta)) c.add(std::move(g));
    c.reverse_bits(reg);
    return c;
}

Circuit build_qft_transpose(int n, std::span<const double> theta) {
    check_axis_qubits(n);
    check_length(theta, qft_param_count(n), "transposed QFT block");
    Circuit c(n);
    const auto reg = iota_vec(0, n);
    c.reverse_bits(reg);
    auto layer = qft_layer_gates(reg, theta);
    for (auto it = layer.rbegin(); it != layer.rend(); ++it) c.add(std::move(*it));
    return c;
}

Circuit build_qdct_layer(int n, std::span<const double> theta) {
    check_axis_qubits(n);
    check_length(theta, qdct_param_count(n), "QDCT layer");
    const std::uint64_t big_n = std::uint64_t{1} << n;
    constexpr int anc = 0;
    const auto data = iota_vec(1, n);
    const std::vector<Control> on_anc{{anc, Polarity::closed}};
    const std::vector<Control> off_anc{{anc, Polarity::open}};

    Circuit c(n + 1);
    c.increment(data, on_anc);

    std::vector<Control> data_zero;
    for (int q : data) data_zero.push_back({q, Polarity::open});
    c.add(qsim::gates::unitary(anc, qdct_gates::j(), data_zero));
    c.add(qsim::gates::unitary(anc, qdct_gates::b()));
    for (int q : data) c.add(qsim::gates::cnot(anc, q));

    c.increment(data, on_anc);
    c.add(qsim::gates::unitary(anc, qdct_gates::c(big_n)));
    // data wire 1 carries weight 2^(n-1) and receives L_n / K_n.
    for (int idx = 0; idx < n; ++idx) {
        c.add(qsim::gates::unitary(data[static_cast<std::size_t>(idx)], qdct_gates::l(n - idx, big_n), off_anc));
    }
    for (int idx = 0; idx < n; ++idx) {
        c.add(qsim::gates::unitary(data[static_cast<std::size_t>(idx)], qdct_gates::k(n - idx, big_n), on_anc));
    }

    c.append(build_qft_transpose(n + 1, theta));
    for (int q : data) c.add(qsim::gates::cnot(anc, q));
    c.add(qsim::gates::h(anc));
    return c;
}

Circuit build_ansatz(int n, int depth, std::span<const double> theta) {
    check_length(theta, ansatz_param_count(n, depth), "hardware-efficient ansatz");
    Circuit c(n);
    std::size_t slot = 0;
    auto crx = [&](int control, int target) {
        c.add(qsim::gates::rx(target, theta[slot++])
                  .with_controls(std::vector<Control>{{control, Polarity::closed}}));
    };
    for (int d = 0; d < depth; ++d) {
        for (int q = 0; q < n; ++q) c.add(qsim::gates::ry(q, theta[slot++]));
        if (n > 1) {
            for (int k = n - 1; k >= 0; --k) crx(k, (k + 1) % n);
        }
        for (int q = 0; q < n; ++q) c.add(qsim::gates::ry(q, theta[slot++]));
        if (n > 1) {
            crx(n - 1, n - 2);
            for (int k = 0; k < n - 1; ++k) crx(k, (k - 1 + n) % n);
        }
    }
    return c;
}

Circuit axis_circuit(const OpqnnModel& model, int axis) {
    check_model(model);
    if (axis < 0 || axis >= model.layout.axes) throw DomainError("axis out of range");
    const int n = model.layout.data_qubits_per_axis;
    const auto theta = axis_params(model, axis);
    switch (model.family) {
        case Family::qft: return build_qft_layer(n, theta);
        case Family::qdct: return build_qdct_layer(n, theta);
        case Family::ansatz: return build_ansatz(n, model.ansatz_depth, theta);
    }
    throw DomainError("unknown family");
}

Circuit model_circuit(const OpqnnModel& model) {
    check_model(model);
    const int per = model.layout.qubits_per_axis();
    Circuit c(model.layout.total_qubits());
    for (int a = 0; a < model.layout.axes; ++a) c.append(axis_circuit(model, a), iota_vec(a * per, per));
    return c;
}

std::vector<int> ancilla_qubits(const RegisterLayout& layout) {
    std::vector<int> out;
    for (int a = 0; a < layout.axes; ++a) {
        for (int k = 0; k < layout.ancilla_per_axis; ++k) out.push_back(a * layout.qubits_per_axis() + k);
    }
    return out;
}

std::vector<int> data_qubits(const RegisterLayout& layout) {
    std::vector<int> out;
    for (int a = 0; a < layout.axes; ++a) {
        for (int k = 0; k < layout.data_qubits_per_axis; ++k) {
            out.push_back(a * layout.qubits_per_axis() + layout.ancilla_per_axis + k);
        }
    }
    return out;
}

StateVector basis_column(const OpqnnModel& model, std::uint64_t index) {
    check_model(model);
    const auto& l = model.layout;
    if (index >= l.dim()) throw DomainError("basis index " + std::to_string(index) + " out of range");
    const int total = l.total_qubits();
    const auto data = data_qubits(l);
    std::uint64_t full = 0;
    const int nd = l.data_qubits();
    for (int k = 0; k < nd; ++k) {
        if (index & (std::uint64_t{1} << (nd - 1 - k))) {
            full |= std::uint64_t{1} << (total - 1 - data[static_cast<std::size_t>(k)]);
        }
    }
    auto out = qsim::run(model_circuit(model), qsim::new_basis_state(total, full));
    auto column = qsim::postselect_zero(out, ancilla_qubits(l));
    if (column.norm_squared() <= kDegenerateNorm2) {
        throw DegenerateBasisError("basis column " + std::to_string(index) + " vanishes after postselection");
    }
    return column;
}

StateVector axis_basis_column(const OpqnnModel& model, int axis, std::uint64_t index) {
    const auto& l = model.layout;
    if (index >= l.axis_dim()) throw DomainError("axis index out of range");
    // Ancilla (if any) is the top wire, so |0>_anc|i> has register index i.
    auto out = qsim::run(axis_circuit(model, axis), qsim::new_basis_state(l.qubits_per_axis(), index));
    if (l.ancilla_per_axis > 0) {
        out = qsim::postselect_zero(out, iota_vec(0, l.ancilla_per_axis));
    }
    if (out.norm_squared() <= kDegenerateNorm2) {
        throw DegenerateBasisError("axis " + std::to_string(axis) + " column " + std::to_string(index) +
                                   " vanishes after postselection");
    }
    return out;
}

std::vector<StateVector> basis_columns(const OpqnnModel& model, std::span<const std::uint64_t> indices) {
    check_model(model);
    const auto& l = model.layout;
    std::vector<StateVector> out;
    out.reserve(indices.size());
    if (l.axes == 1) {
        for (auto i : indices) out.push_back(axis_basis_column(model, 0, i));
        return out;
    }
    const std::uint64_t side = l.axis_dim();
    std::map<std::uint64_t, StateVector> rows;
    std::map<std::uint64_t, StateVector> cols;
    for (auto i : indices) {
        if (i >= l.dim()) throw DomainError("basis index out of range");
        const auto r = i / side;
        const auto c = i % side;
        if (!rows.contains(r)) rows.emplace(r, axis_basis_column(model, 0, r));
        if (!cols.contains(c)) cols.emplace(c, axis_basis_column(model, 1, c));
        const auto& ra = rows.at(r);
        const auto& ca = cols.at(c);
        std::vector<Amplitude> v(static_cast<std::size_t>(l.dim()));
        for (std::uint64_t x = 0; x < side; ++x) {
            for (std::uint64_t y = 0; y < side; ++y) v[x * side + y] = ra[x] * ca[y];
        }
        out.emplace_back(l.data_qubits(), std::move(v));
    }
    return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> diagonal_pairs(std::size_t m, std::uint64_t rows,
                                                                    std::uint64_t cols) {
    if (m > rows * cols) throw DomainError("order exceeds the number of index pairs");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    out.reserve(m);
    for (std::uint64_t s = 0; out.size() < m; ++s) {
        for (std::uint64_t r = 0; r <= s && out.size() < m; ++r) {
            const std::uint64_t c = s - r;
            if (r < rows && c < cols) out.emplace_back(r, c);
        }
    }
    return out;
}

std::vector<std::uint64_t> basis_indices(const RegisterLayout& layout, std::size_t m, Ordering ordering) {
    if (m < 1 || m > layout.dim()) {
        throw DomainError("reconstruction order " + std::to_string(m) + " outside [1, " +
                          std::to_string(layout.dim()) + "]");
    }
    std::vector<std::uint64_t> out;
    if (ordering == Ordering::natural || layout.axes == 1) {
        for (std::uint64_t k = 0; k < m; ++k) out.push_back(k);
        return out;
    }
    const std::uint64_t side = layout.axis_dim();
    for (auto [r, c] : diagonal_pairs(m, side, side)) out.push_back(r * side + c);
    return out;
}

qsim::ComplexMatrix basis_matrix(const OpqnnModel& model, std::size_t m, Ordering ordering) {
    const auto idx = basis_indices(model.layout, m, ordering);
    const auto cols = basis_columns(model, idx);
    const auto dim = static_cast<Eigen::Index>(model.layout.dim());
    qsim::ComplexMatrix a(dim, static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        for (Eigen::Index r = 0; r < dim; ++r) a(r, static_cast<Eigen::Index>(k)) = cols[k][static_cast<std::size_t>(r)];
    }
    return a;
}

}  // namespace qrom::opqnn
