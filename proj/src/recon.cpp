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

#include "qrom/recon.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qrom/errors.hpp"

namespace qrom::recon {

using qsim::Amplitude;
using qsim::Circuit;
using qsim::Control;
using qsim::Polarity;
using qsim::StateVector;

namespace {

constexpr double kMinSuccess = 1e-14;
constexpr double kUnitNormTolerance = 1e-10;

int qubits_for(std::size_t len) {
    int k = 1;
    while ((std::size_t{1} << k) < len) ++k;
    return k;
}

std::vector<Control> register_equals(int first, int width, std::uint64_t value) {
    std::vector<Control> c;
    for (int b = 0; b < width; ++b) {
        const bool one = (value >> (width - 1 - b)) & 1U;
        c.push_back({first + b, one ? Polarity::closed : Polarity::open});
    }
    return c;
}

void check_unit(const StateVector& s, const char* name) {
    if (std::abs(s.norm_squared() - 1.0) > kUnitNormTolerance) {
        throw DomainError(std::string("SWAP test input ") + name + " is not normalized (||.||^2 = " +
                          std::to_string(s.norm_squared()) + ")");
    }
}

double swap_p0_circuit(const StateVector& psi, const StateVector& phi) {
    const int n = psi.n_qubits();
    std::vector<Amplitude> joint;
    joint.reserve(psi.size() * phi.size() * 2);
    // |0>|psi>|phi> followed by the |1> half of the control.
    for (std::size_t a = 0; a < psi.size(); ++a) {
        for (std::size_t b = 0; b < phi.size(); ++b) joint.push_back(psi[a] * phi[b]);
    }
    joint.resize(joint.size() * 2, Amplitude{});
    StateVector state(2 * n + 1, std::move(joint));
    Circuit c(2 * n + 1);
    c.add(qsim::gates::h(0));
    const std::vector<Control> on{{0, Polarity::closed}};
    for (int k = 0; k < n; ++k) c.add(qsim::gates::swap(1 + k, 1 + n + k).with_controls(on));
    c.add(qsim::gates::h(0));
    qsim::run_in_place(c, state);
    return qsim::project_qubit(state, 0, 0).probability;
}

double swap_p0_amplitudes(const StateVector& psi, const StateVector& phi) {
    double acc = 0.0;
    for (std::size_t a = 0; a < psi.size(); ++a) {
        for (std::size_t b = 0; b < phi.size(); ++b) acc += std::norm(psi[a] * phi[b] + phi[a] * psi[b]);
    }
    return acc / 4.0;
}

}  // namespace

Circuit amplitude_encode(std::span<const Amplitude> v) {
    if (v.empty()) throw DomainError("cannot encode an empty vector");
    const int k = qubits_for(v.size());
    const std::size_t dim = std::size_t{1} << k;
    std::vector<Amplitude> amps(v.begin(), v.end());
    amps.resize(dim, Amplitude{});
    double total = 0.0;
    for (const auto& a : amps) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw DomainError("non-finite amplitude");
        total += std::norm(a);
    }
    if (!(total > 0.0)) throw DomainError("cannot encode the zero vector");

    // weight[level][p] = squared norm of the subtree under prefix p.
    std::vector<std::vector<double>> weight(static_cast<std::size_t>(k) + 1);
    weight[static_cast<std::size_t>(k)].resize(dim);
    for (std::size_t i = 0; i < dim; ++i) weight[static_cast<std::size_t>(k)][i] = std::norm(amps[i]);
    for (int level = k - 1; level >= 0; --level) {
        auto& w = weight[static_cast<std::size_t>(level)];
        const auto& below = weight[static_cast<std::size_t>(level) + 1];
        w.resize(std::size_t{1} << level);
        for (std::size_t p = 0; p < w.size(); ++p) w[p] = below[2 * p] + below[2 * p + 1];
    }

    Circuit c(k);
    for (int level = 0; level < k; ++level) {
        const auto& below = weight[static_cast<std::size_t>(level) + 1];
        const bool leaf = level == k - 1;
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << level); ++p) {
            if (weight[static_cast<std::size_t>(level)][p] == 0.0) continue;
            const double theta = 2.0 * std::atan2(std::sqrt(below[2 * p + 1]), std::sqrt(below[2 * p]));
            const double cs = std::cos(theta / 2.0);
            const double sn = std::sin(theta / 2.0);
            Amplitude ph0 = 1.0;
            Amplitude ph1 = 1.0;
            if (leaf) {
                if (amps[2 * p] != Amplitude{}) ph0 = amps[2 * p] / std::abs(amps[2 * p]);
                if (amps[2 * p + 1] != Amplitude{}) ph1 = amps[2 * p + 1] / std::abs(amps[2 * p + 1]);
            }
            // diag(ph0, ph1) * R_y(theta).
            const std::array<Amplitude, 4> m{ph0 * cs, -ph0 * sn, ph1 * sn, ph1 * cs};
            c.add(qsim::gates::unitary(level, m, register_equals(0, level, p)));
        }
    }
    return c;
}

LcuPlan make_lcu_plan(const Eigen::VectorXcd& x, std::span<const std::uint64_t> indices) {
    if (x.size() < 1) throw DomainError("LCU needs at least one coefficient");
    if (static_cast<std::size_t>(x.size()) != indices.size()) {
        throw DomainError("coefficient count does not match the basis index count");
    }
    LcuPlan plan;
    plan.indices.assign(indices.begin(), indices.end());
    const auto m = static_cast<std::size_t>(x.size());
    plan.k = 0;
    while ((std::size_t{1} << plan.k) < m) ++plan.k;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x(i).real()) || !std::isfinite(x(i).imag())) throw DomainError("non-finite coefficient");
        plan.l1_norm += std::abs(x(i));
    }
    if (!(plan.l1_norm > 0.0)) throw DegenerateReconstructionError("all LCU coefficients are zero");
    plan.coefficient_state.assign(std::size_t{1} << plan.k, 0.0);
    plan.phases.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto xi = x(static_cast<Eigen::Index>(i));
        plan.coefficient_state[i] = std::sqrt(std::abs(xi) / plan.l1_norm);
        plan.phases[i] = std::arg(xi);
    }
    return plan;
}

Circuit lcu_circuit(const opqnn::OpqnnModel& model, const LcuPlan& plan) {
    const auto& l = model.layout;
    const int k = plan.k;
    const int total = k + l.total_qubits();
    Circuit c(total);

    Circuit load(std::max(k, 1));
    if (k > 0) {
        std::vector<Amplitude> coeff(plan.coefficient_state.begin(), plan.coefficient_state.end());
        load = amplitude_encode(coeff);
        std::vector<int> coef_wires(static_cast<std::size_t>(k));
        for (int q = 0; q < k; ++q) coef_wires[static_cast<std::size_t>(q)] = q;
        c.append(load, coef_wires);
    }

    std::vector<int> model_wires(static_cast<std::size_t>(l.total_qubits()));
    for (int q = 0; q < l.total_qubits(); ++q) model_wires[static_cast<std::size_t>(q)] = k + q;
    const auto data = opqnn::data_qubits(l);
    const int nd = l.data_qubits();
    Circuit u(total);
    u.append(opqnn::model_circuit(model), model_wires);

    for (std::size_t i = 0; i < plan.indices.size(); ++i) {
        if (plan.coefficient_state[i] == 0.0) continue;
        const auto when = register_equals(0, k, i);
        Circuit select(total);
        const Amplitude ph = std::exp(Amplitude(0.0, plan.phases[i]));
        if (plan.phases[i] != 0.0) select.add(qsim::gates::unitary(k + data[0], {ph, 0.0, 0.0, ph}));
        for (int b = 0; b < nd; ++b) {
            if ((plan.indices[i] >> (nd - 1 - b)) & 1U) select.add(qsim::gates::x(k + data[static_cast<std::size_t>(b)]));
        }
        select.append(u);
        c.append(when.empty() ? select : select.controlled(when));
    }

    if (k > 0) {
        std::vector<int> coef_wires(static_cast<std::size_t>(k));
        for (int q = 0; q < k; ++q) coef_wires[static_cast<std::size_t>(q)] = q;
        c.append(load.adjoint(), coef_wires);
    }
    return c;
}

LcuResult lcu_reconstruct(const opqnn::OpqnnModel& model, const Eigen::VectorXcd& x,
                          std::span<const std::uint64_t> indices) {
    const auto plan = make_lcu_plan(x, indices);
    const auto circuit = lcu_circuit(model, plan);
    auto out = qsim::run(circuit, StateVector(circuit.n_qubits()));
    std::vector<int> drop;
    for (int q = 0; q < plan.k; ++q) drop.push_back(q);
    for (int a : opqnn::ancilla_qubits(model.layout)) drop.push_back(plan.k + a);
    auto kept = qsim::postselect_zero(out, drop);
    const double p = kept.norm_squared();
    if (p < kMinSuccess) {
        throw DegenerateReconstructionError("LCU postselection probability " + std::to_string(p) + " below 1e-14");
    }
    return {kept.normalized(), p};
}

LcuResult lcu_reconstruct(const opqnn::OpqnnModel& model, const Eigen::VectorXcd& x, opqnn::Ordering ordering) {
    const auto idx = opqnn::basis_indices(model.layout, static_cast<std::size_t>(x.size()), ordering);
    return lcu_reconstruct(model, x, idx);
}

FidelityReport swap_test(const StateVector& psi, const StateVector& phi, const projection::EstimatorConfig& cfg) {
    if (psi.size() != phi.size()) throw DomainError("SWAP test inputs differ in dimension");
    check_unit(psi, "psi");
    check_unit(phi, "phi");
    FidelityReport r;
    r.mode = cfg.mode;
    r.p0 = psi.n_qubits() <= kSwapCircuitMaxQubits ? swap_p0_circuit(psi, phi) : swap_p0_amplitudes(psi, phi);
    if (cfg.mode == projection::EstimatorMode::sampled) {
        if (cfg.shots < 1) throw DomainError("sampled SWAP test needs at least one shot");
        std::mt19937_64 rng(cfg.seed);
        r.p0 = qsim::sample_frequency(std::clamp(r.p0, 0.0, 1.0), cfg.shots, rng);
        r.shots = cfg.shots;
    }
    r.fidelity = 2.0 * r.p0 - 1.0;
    return r;
}

double reconstruction_loss(const StateVector& psi, const opqnn::OpqnnModel& model, const Eigen::VectorXcd& x,
                           opqnn::Ordering ordering) {
    const auto rec = lcu_reconstruct(model, x, ordering);
    return 1.0 - swap_test(psi, rec.state).fidelity;
}

Eigen::VectorXcd combine(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x) {
    if (a.cols() != x.size()) throw DomainError("coefficient count does not match the basis columns");
    return a * x;
}

double direct_fidelity(std::span<const Amplitude> psi, const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x) {
    const Eigen::VectorXcd rec = combine(a, x);
    if (static_cast<Eigen::Index>(psi.size()) != rec.size()) throw DomainError("state length mismatch");
    const double n2 = rec.squaredNorm();
    if (!(n2 > 0.0)) return 0.0;
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), rec.size());
    return std::norm(v.dot(rec)) / n2;
}

double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw ShapeError("MSE needs equal, nonempty grids (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace qrom::recon
