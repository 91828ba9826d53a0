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

#include "qrom/projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qrom/errors.hpp"
#include "qrom/parallel.hpp"

namespace qrom::projection {

using qsim::Amplitude;
using qsim::Circuit;
using qsim::Control;
using qsim::Polarity;

namespace {

constexpr double kMinRcond = 1e-14;
constexpr std::uint64_t kMaxDirectDim = std::uint64_t{1} << 12;

// Places `prep` into the combined register: data wires after the control,
// ancillas at `anc_offset`.
std::vector<int> placement(const Preparation& prep, int anc_offset) {
    const int w = prep.circuit.n_qubits();
    std::vector<int> map(static_cast<std::size_t>(w), -1);
    for (std::size_t k = 0; k < prep.ancillas.size(); ++k) {
        const int a = prep.ancillas[k];
        if (a < 0 || a >= w) throw DomainError("ancilla index outside the preparation register");
        if (map[static_cast<std::size_t>(a)] != -1) throw DomainError("duplicate ancilla index");
        map[static_cast<std::size_t>(a)] = anc_offset + static_cast<int>(k);
    }
    int next_data = 1;
    for (auto& slot : map) {
        if (slot == -1) slot = next_data++;
    }
    return map;
}

std::mt19937_64 entry_rng(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return std::mt19937_64(seq);
}

Amplitude complex_estimate(const Preparation& left, const Preparation& right, const EstimatorConfig& cfg,
                           std::uint64_t salt) {
    const double re = hadamard_test(left, right, Part::real, cfg, 2 * salt).value;
    const double im = hadamard_test(left, right, Part::imaginary, cfg, 2 * salt + 1).value;
    return {re, im};
}

void check_direct_capacity(const opqnn::OpqnnModel& model) {
    if (model.layout.dim() > kMaxDirectDim) {
        throw CapacityError("direct projection limited to 2^12 amplitudes");
    }
}

}  // namespace

const char* to_string(EstimatorMode m) noexcept { return m == EstimatorMode::exact ? "exact" : "sampled"; }

EstimatorMode estimator_mode_from_string(const std::string& s) {
    if (s == "exact") return EstimatorMode::exact;
    if (s == "sampled") return EstimatorMode::sampled;
    throw DomainError("unknown estimator mode '" + s + "'");
}

const char* to_string(InnerProduct p) noexcept {
    return p == InnerProduct::sesquilinear ? "sesquilinear" : "bilinear";
}

InnerProduct inner_product_from_string(const std::string& s) {
    if (s == "sesquilinear") return InnerProduct::sesquilinear;
    if (s == "bilinear") return InnerProduct::bilinear;
    throw DomainError("unknown inner product '" + s + "'");
}

Circuit hadamard_circuit(const Preparation& left, const Preparation& right, Part part) {
    const int d = left.data_width();
    if (d != right.data_width() || d < 1) {
        throw DomainError("Hadamard-test branches prepare registers of different width");
    }
    const int la = static_cast<int>(left.ancillas.size());
    const int ra = static_cast<int>(right.ancillas.size());
    const int total = 1 + d + la + ra;

    Circuit placed_left(total);
    placed_left.append(left.circuit, placement(left, 1 + d));
    Circuit placed_right(total);
    placed_right.append(right.circuit, placement(right, 1 + d + la));

    const std::vector<Control> when_zero{{0, Polarity::open}};
    const std::vector<Control> when_one{{0, Polarity::closed}};
    Circuit c(total);
    c.add(qsim::gates::h(0));
    c.append(placed_left.controlled(when_zero));
    c.append(placed_right.controlled(when_one));
    if (part == Part::imaginary) c.add(qsim::gates::s(0));
    c.add(qsim::gates::h(0));
    return c;
}

HadamardEstimate hadamard_test(const Preparation& left, const Preparation& right, Part part,
                               const EstimatorConfig& cfg, std::uint64_t salt) {
    const auto circuit = hadamard_circuit(left, right, part);
    const int total = circuit.n_qubits();
    const auto out = qsim::run(circuit, qsim::StateVector(total));

    const std::size_t n_anc = left.ancillas.size() + right.ancillas.size();
    const std::uint64_t anc_mask = (std::uint64_t{1} << n_anc) - 1;
    const std::uint64_t control_bit = std::uint64_t{1} << (total - 1);
    HadamardEstimate est;
    const auto amps = out.amplitudes();
    for (std::uint64_t k = 0; k < amps.size(); ++k) {
        if ((k & anc_mask) != 0) continue;
        ((k & control_bit) ? est.p1 : est.p0) += std::norm(amps[k]);
    }
    est.value = est.p0 - est.p1;
    if (cfg.mode == EstimatorMode::exact) return est;

    if (cfg.shots < 1) throw DomainError("sampled estimation needs at least one shot");
    auto rng = entry_rng(cfg.seed, salt);
    const std::vector<double> probs{est.p0, est.p1, std::max(0.0, 1.0 - est.p0 - est.p1)};
    const auto counts = qsim::sample_counts(probs, cfg.shots, rng);
    if (counts[0] + counts[1] == 0) {
        throw EstimationError("Hadamard test retained no shots with all ancillas in |0>");
    }
    const double shots = static_cast<double>(cfg.shots);
    est.sigma = std::sqrt(std::max(0.0, est.p0 + est.p1 - est.value * est.value) / shots);
    est.value = (static_cast<double>(counts[0]) - static_cast<double>(counts[1])) / shots;
    return est;
}

Preparation column_preparation(const opqnn::OpqnnModel& model, std::uint64_t index, bool conjugate) {
    const auto& l = model.layout;
    if (index >= l.dim()) throw DomainError("basis index out of range");
    const auto data = opqnn::data_qubits(l);
    const int nd = l.data_qubits();
    Circuit c(l.total_qubits());
    for (int k = 0; k < nd; ++k) {
        if (index & (std::uint64_t{1} << (nd - 1 - k))) c.add(qsim::gates::x(data[static_cast<std::size_t>(k)]));
    }
    const auto u = opqnn::model_circuit(model);
    c.append(conjugate ? qsim::conjugate_circuit(u) : u);
    return {std::move(c), opqnn::ancilla_qubits(l)};
}

GramMatrix estimate_gram(const opqnn::OpqnnModel& model, std::size_t m, opqnn::Ordering ordering,
                         const EstimatorConfig& cfg) {
    const auto idx = opqnn::basis_indices(model.layout, m, ordering);
    const bool bilinear = cfg.inner == InnerProduct::bilinear;
    std::vector<Preparation> plain;
    std::vector<Preparation> bra;
    for (auto i : idx) {
        plain.push_back(column_preparation(model, i, false));
        bra.push_back(column_preparation(model, i, bilinear));
    }
    GramMatrix g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    parallel_for(m * m, [&](std::size_t e) {
        const std::size_t i = e / m;
        const std::size_t j = e % m;
        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = complex_estimate(plain[j], bra[i], cfg, e);
    });
    return g;
}

CrossVector estimate_cross(const opqnn::OpqnnModel& model, const Circuit& psi_prep, std::size_t m,
                           opqnn::Ordering ordering, const EstimatorConfig& cfg) {
    if (psi_prep.n_qubits() != model.layout.data_qubits()) {
        throw DomainError("state preparation width does not match the data register");
    }
    const auto idx = opqnn::basis_indices(model.layout, m, ordering);
    const bool bilinear = cfg.inner == InnerProduct::bilinear;
    const Preparation psi{psi_prep, {}};
    std::vector<Preparation> bra;
    for (auto i : idx) bra.push_back(column_preparation(model, i, bilinear));
    CrossVector b(static_cast<Eigen::Index>(m));
    // Offset the salt past the Gram entries so the two never share a stream.
    const std::uint64_t base = std::uint64_t{1} << 40;
    parallel_for(m, [&](std::size_t i) {
        b(static_cast<Eigen::Index>(i)) = complex_estimate(psi, bra[i], cfg, base + i);
    });
    return b;
}

GramMatrix gram_from_columns(const Eigen::MatrixXcd& a, InnerProduct inner) {
    if (inner == InnerProduct::bilinear) return a.transpose() * a;
    return a.adjoint() * a;
}

CrossVector cross_from_columns(const Eigen::MatrixXcd& a, std::span<const Amplitude> psi, InnerProduct inner) {
    if (static_cast<Eigen::Index>(psi.size()) != a.rows()) {
        throw DomainError("state length does not match the basis columns");
    }
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
    if (inner == InnerProduct::bilinear) return a.transpose() * v;
    return a.adjoint() * v;
}

GramMatrix direct_gram(const opqnn::OpqnnModel& model, std::size_t m, opqnn::Ordering ordering,
                       InnerProduct inner) {
    check_direct_capacity(model);
    return gram_from_columns(opqnn::basis_matrix(model, m, ordering), inner);
}

CrossVector direct_cross(const opqnn::OpqnnModel& model, const qsim::StateVector& psi, std::size_t m,
                         opqnn::Ordering ordering, InnerProduct inner) {
    check_direct_capacity(model);
    return cross_from_columns(opqnn::basis_matrix(model, m, ordering), psi.amplitudes(), inner);
}

Coefficients tikhonov_solve(const GramMatrix& g, const CrossVector& b, double lambda) {
    if (g.rows() != g.cols() || g.rows() != b.size() || g.rows() == 0) {
        throw DomainError("Gram matrix and cross vector shapes disagree");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
    if (!g.allFinite() || !b.allFinite()) throw NumericalError("non-finite entry in the normal equations");

    const auto n = g.rows();
    const GramMatrix mat = g + lambda * GramMatrix::Identity(n, n);
    const Eigen::PartialPivLU<GramMatrix> lu(mat);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double pivot_ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
    const double rcond = std::min(lu.rcond(), pivot_ratio);
    if (!(rcond > kMinRcond)) {
        throw SingularSystemError("normal equations are singular at lambda = " + std::to_string(lambda) +
                                  " (rcond " + std::to_string(rcond) + "); use lambda > 0");
    }
    Coefficients out;
    out.lambda = lambda;
    out.x = lu.solve(b);
    out.x += lu.solve(CrossVector(b - mat * out.x));
    out.residual = (mat * out.x - b).norm();
    if (!out.x.allFinite() || out.residual > 1e-10 * (1.0 + b.norm())) {
        throw NumericalError("regularized solve missed its residual bound (" + std::to_string(out.residual) + ")");
    }
    return out;
}

ProjectionResult project(const Eigen::MatrixXcd& a, std::span<const Amplitude> psi, double lambda,
                         InnerProduct inner) {
    ProjectionResult r;
    r.gram = gram_from_columns(a, inner);
    r.cross = cross_from_columns(a, psi, inner);
    r.coefficients = tikhonov_solve(r.gram, r.cross, lambda);
    return r;
}

}  // namespace qrom::projection
