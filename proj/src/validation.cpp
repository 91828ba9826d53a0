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

#include "qrom/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "qrom/opqnn.hpp"
#include "qrom/oracle.hpp"
#include "qrom/projection.hpp"
#include "qrom/recon.hpp"
#include "qrom/train.hpp"

namespace qrom::validation {

namespace {

using cd = std::complex<double>;
using opqnn::Family;
using opqnn::Ordering;
using qsim::StateVector;

constexpr Family kFamilies[] = {Family::qft, Family::qdct, Family::ansatz};

CheckResult timed(std::string name, double tol, const std::function<void(CheckResult&)>& body) {
    CheckResult r;
    r.name = std::move(name);
    r.tolerance = tol;
    // The body may clear `passed` for conditions beyond the worst-error bound.
    r.passed = true;
    const auto start = std::chrono::steady_clock::now();
    body(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.passed = r.passed && r.worst <= tol;
    return r;
}

Eigen::MatrixXcd random_complex_symmetric(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
    }
    Eigen::MatrixXcd s = a + a.transpose();
    s += static_cast<double>(2 * n) * Eigen::MatrixXcd::Identity(n, n);
    return s;
}

Eigen::Map<const Eigen::VectorXcd> as_vector(const std::vector<cd>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// One-column reconstruction of psi by R_z(theta) R_y(0.9) |0>.
double rz_loss(double theta, std::span<const cd> psi) {
    qsim::Circuit c(1);
    c.add(qsim::gates::ry(0, 0.9));
    c.add(qsim::gates::rz(0, theta));
    const auto col = qsim::run(c, StateVector(1));
    Eigen::MatrixXcd a(2, 1);
    a << col.amplitudes()[0], col.amplitudes()[1];
    const auto proj = projection::project(a, psi, projection::kDefaultLambda);
    return 1.0 - recon::direct_fidelity(psi, a, proj.coefficients.x);
}

}  // namespace

std::string format(const CheckResult& r) {
    std::ostringstream out;
    out.precision(3);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " worst=" << std::scientific << r.worst
        << " tol=" << r.tolerance;
    if (!r.detail.empty()) out << ' ' << r.detail;
    out << std::fixed << " (" << r.seconds << " s)";
    return out.str();
}

CheckResult check_qft_dft(std::span<const int> widths, double tol) {
    return timed("qft_equals_dft", tol, [&](CheckResult& r) {
        for (int n : widths) {
            const auto u = qsim::circuit_unitary(opqnn::build_qft_layer(n, opqnn::canonical_qft_params(n)));
            r.worst = std::max(r.worst, oracle::max_abs_diff(u, oracle::dft(std::size_t{1} << n)));
        }
        r.detail = "widths=" + std::to_string(widths.size());
    });
}

CheckResult check_qdct_dct(std::span<const int> widths, double tol) {
    return timed("qdct_equals_dct2", tol, [&](CheckResult& r) {
        for (int n : widths) {
            const auto model = opqnn::structured_model(Family::qdct, n, 1);
            const std::size_t dim = std::size_t{1} << n;
            const Eigen::MatrixXd ref = oracle::dct2(dim);
            Eigen::MatrixXcd cols(dim, dim);
            for (std::size_t i = 0; i < dim; ++i) {
                const auto col = opqnn::basis_column(model, i).normalized();
                for (std::size_t k = 0; k < dim; ++k) cols(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = col[k];
            }
            for (Eigen::Index k = 0; k < cols.cols(); ++k) {
                const Eigen::VectorXcd want = ref.col(k).cast<cd>();
                const double plus = (cols.col(k) - want).cwiseAbs().maxCoeff();
                const double minus = (cols.col(k) + want).cwiseAbs().maxCoeff();
                r.worst = std::max(r.worst, std::min(plus, minus));
            }
            const Eigen::MatrixXcd gram = cols.adjoint() * cols;
            const auto id = Eigen::MatrixXcd::Identity(cols.cols(), cols.cols());
            r.worst = std::max(r.worst, oracle::max_abs_diff(gram, id));
        }
        r.detail = "widths=" + std::to_string(widths.size());
    });
}

CheckResult check_estimator_exact(int qubits_per_axis, int axes, std::size_t max_m, double tol) {
    return timed("hadamard_exact_equals_direct", tol, [&](CheckResult& r) {
        std::mt19937_64 rng(5);
        int entries = 0;
        for (auto family : kFamilies) {
            const auto model = opqnn::random_model(family, qubits_per_axis, axes, 31);
            const std::size_t dim = model.layout.dim();
            const StateVector psi(model.layout.data_qubits(), oracle::random_unit(dim, rng));
            const auto prep = recon::amplitude_encode(psi.amplitudes());
            for (auto inner : {projection::InnerProduct::sesquilinear, projection::InnerProduct::bilinear}) {
                projection::EstimatorConfig cfg;
                cfg.inner = inner;
                // Gram entries of the largest order cover every smaller nested order.
                const auto est = projection::estimate_gram(model, max_m, Ordering::diagonal, cfg);
                const auto dir = projection::direct_gram(model, max_m, Ordering::diagonal, inner);
                r.worst = std::max(r.worst, oracle::max_abs_diff(est, dir));
                const auto b_est = projection::estimate_cross(model, prep, max_m, Ordering::diagonal, cfg);
                const auto b_dir = projection::direct_cross(model, psi, max_m, Ordering::diagonal, inner);
                r.worst = std::max(r.worst, (b_est - b_dir).cwiseAbs().maxCoeff());
                entries += static_cast<int>(est.size() + b_est.size());
            }
        }
        r.detail = "entries=" + std::to_string(entries);
    });
}

CheckResult check_estimator_sampled(int qubits_per_axis, int axes, std::size_t m, std::uint64_t shots, int seeds,
                                    double sigmas, double min_fraction) {
    return timed("hadamard_sampled_within_bounds", 1.0 - min_fraction, [&](CheckResult& r) {
        int inside = 0;
        int total = 0;
        for (auto family : kFamilies) {
            const auto model = opqnn::random_model(family, qubits_per_axis, axes, 7);
            const auto idx = opqnn::basis_indices(model.layout, m, Ordering::diagonal);
            // Exact joint probabilities give the per-part shot deviation.
            Eigen::MatrixXd sigma_re(m, m);
            Eigen::MatrixXd sigma_im(m, m);
            const auto exact = projection::direct_gram(model, m, Ordering::diagonal);
            const projection::EstimatorConfig exact_cfg;
            for (std::size_t i = 0; i < m; ++i) {
                const auto bra = projection::column_preparation(model, idx[i], false);
                for (std::size_t j = 0; j < m; ++j) {
                    const auto ket = projection::column_preparation(model, idx[j], false);
                    for (auto part : {projection::Part::real, projection::Part::imaginary}) {
                        const auto e = projection::hadamard_test(ket, bra, part, exact_cfg);
                        const double s =
                            std::sqrt(std::max(0.0, e.p0 + e.p1 - e.value * e.value) / static_cast<double>(shots));
                        (part == projection::Part::real ? sigma_re : sigma_im)(static_cast<Eigen::Index>(i),
                                                                               static_cast<Eigen::Index>(j)) = s;
                    }
                }
            }
            for (int seed = 0; seed < seeds; ++seed) {
                const projection::EstimatorConfig cfg{projection::EstimatorMode::sampled, shots,
                                                      static_cast<std::uint64_t>(seed),
                                                      projection::InnerProduct::sesquilinear};
                const auto est = projection::estimate_gram(model, m, Ordering::diagonal, cfg);
                for (Eigen::Index i = 0; i < est.rows(); ++i) {
                    for (Eigen::Index j = 0; j < est.cols(); ++j) {
                        const double dre = std::abs(est(i, j).real() - exact(i, j).real());
                        const double dim = std::abs(est(i, j).imag() - exact(i, j).imag());
                        inside += dre <= sigmas * sigma_re(i, j) + 1e-12;
                        inside += dim <= sigmas * sigma_im(i, j) + 1e-12;
                        total += 2;
                    }
                }
            }
        }
        r.worst = 1.0 - static_cast<double>(inside) / static_cast<double>(total);
        std::ostringstream d;
        d << "inside=" << inside << '/' << total << " shots=" << shots << " seeds=" << seeds;
        r.detail = d.str();
    });
}

CheckResult check_lcu(int instances, std::uint64_t seed, double tol) {
    return timed("lcu_equals_normalized_combination", tol, [&](CheckResult& r) {
        std::mt19937_64 rng(seed);
        for (int k = 0; k < instances; ++k) {
            const auto family = kFamilies[static_cast<std::size_t>(k) % 3];
            const int axes = 1 + (k / 3) % 2;
            const int n = axes == 1 ? 3 : 2;
            const auto model = opqnn::random_model(family, n, axes, seed + static_cast<std::uint64_t>(k));
            const std::size_t m = 1 + static_cast<std::size_t>(k) % 8;
            const auto xv = oracle::random_complex(m, rng);
            const auto x = as_vector(xv);
            const auto out = recon::lcu_reconstruct(model, x, Ordering::diagonal);
            const auto a = opqnn::basis_matrix(model, m, Ordering::diagonal);
            Eigen::VectorXcd want = Eigen::VectorXcd::Zero(a.rows());
            for (Eigen::Index c = 0; c < a.cols(); ++c) want += x(c) * a.col(c);
            want /= want.norm();
            for (Eigen::Index i = 0; i < want.size(); ++i) {
                r.worst = std::max(r.worst, std::abs(out.state[static_cast<std::size_t>(i)] - want(i)));
            }
        }
        r.detail = "instances=" + std::to_string(instances);
    });
}

CheckResult check_swap(int pairs, std::uint64_t seed, double tol) {
    return timed("swap_test_fidelity", tol, [&](CheckResult& r) {
        std::mt19937_64 rng(seed);
        for (int k = 0; k < pairs; ++k) {
            const int n = 1 + k % (recon::kSwapCircuitMaxQubits + 2);
            const std::size_t d = std::size_t{1} << n;
            const StateVector a(n, oracle::random_unit(d, rng));
            const StateVector b(n, oracle::random_unit(d, rng));
            cd overlap = 0.0;
            for (std::size_t i = 0; i < d; ++i) overlap += std::conj(a[i]) * b[i];
            const auto rep = recon::swap_test(a, b);
            r.worst = std::max(r.worst, std::abs(rep.fidelity - std::norm(overlap)));
            r.worst = std::max(r.worst, std::abs(rep.fidelity - (2.0 * rep.p0 - 1.0)));
        }
        r.detail = "pairs=" + std::to_string(pairs);
    });
}

CheckResult check_solver(int systems, std::size_t max_m, std::uint64_t seed, double tol) {
    return timed("tikhonov_equals_dense_inverse", tol, [&](CheckResult& r) {
        std::mt19937_64 rng(seed);
        int contract_violations = 0;
        for (int k = 0; k < systems; ++k) {
            const auto n = static_cast<Eigen::Index>(1 + static_cast<std::size_t>(k) % max_m);
            const auto g = random_complex_symmetric(n, rng);
            const auto bv = oracle::random_complex(static_cast<std::size_t>(n), rng);
            const auto b = as_vector(bv);
            const double lambda = k % 2 == 0 ? projection::kDefaultLambda : 0.0;
            const Eigen::MatrixXcd shifted = g + lambda * Eigen::MatrixXcd::Identity(n, n);
            const Eigen::VectorXcd want = oracle::gauss_jordan_inverse(shifted) * b;
            const auto got = projection::tikhonov_solve(g, b, lambda);
            r.worst = std::max(r.worst, (got.x - want).cwiseAbs().maxCoeff());
            const double residual = (shifted * got.x - b).norm();
            if (residual > 1e-10 * (1.0 + b.norm()) || std::abs(residual - got.residual) > 1e-10) {
                ++contract_violations;
            }
        }
        if (contract_violations > 0) {
            r.passed = false;
            r.detail = "residual contract violated on " + std::to_string(contract_violations) + " systems";
            return;
        }
        r.detail = "systems=" + std::to_string(systems);
    });
}

CheckResult check_gradients(double shift_tol, double robust_rel_tol) {
    return timed("finite_difference_gradients", shift_tol, [&](CheckResult& r) {
        const std::vector<cd> psi{cd(0.6, 0.0), cd(0.48, 0.64)};
        for (double theta : {-2.0, -0.4, 0.0, 0.3, 1.1, 2.7}) {
            const train::LossFn loss = [&](std::span<const double> t) { return rz_loss(t[0], psi); };
            const double fd = train::finite_diff_grad(loss, std::vector<double>{theta}, 1e-4)[0];
            const double ps =
                0.5 * (rz_loss(theta + std::numbers::pi / 2, psi) - rz_loss(theta - std::numbers::pi / 2, psi));
            r.worst = std::max(r.worst, std::abs(fd - ps));
        }
        std::mt19937_64 rng(4);
        std::vector<StateVector> states;
        for (int k = 0; k < 3; ++k) states.emplace_back(4, oracle::random_unit(16, rng));
        train::TrainConfig cfg;
        cfg.m = 5;
        double worst_rel = 0.0;
        for (auto family : kFamilies) {
            const auto model = opqnn::random_model(family, 2, 2, 3);
            const train::LossFn loss = [&](std::span<const double> p) {
                auto mdl = model;
                mdl.params.assign(p.begin(), p.end());
                return train::score_reconstruction(mdl, states, cfg).mean_loss();
            };
            const auto g4 = train::finite_diff_grad(loss, model.params, 1e-4);
            const auto g5 = train::finite_diff_grad(loss, model.params, 1e-5);
            double diff = 0.0;
            double norm = 0.0;
            for (std::size_t i = 0; i < g4.size(); ++i) {
                diff += (g4[i] - g5[i]) * (g4[i] - g5[i]);
                norm += g4[i] * g4[i];
            }
            worst_rel = std::max(worst_rel, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300));
        }
        std::ostringstream d;
        d.precision(3);
        d << "eps_relative=" << std::scientific << worst_rel << " rel_tol=" << robust_rel_tol;
        r.detail = d.str();
        r.passed = worst_rel <= robust_rel_tol;
    });
}

std::vector<CheckResult> run_suite(const SuiteOptions& options) {
    const int qft_widths[] = {1, 2, 3, 6};
    const int qdct_widths[] = {1, 2, 3};
    std::vector<CheckResult> out;
    out.push_back(check_qft_dft(qft_widths));
    out.push_back(check_qdct_dct(qdct_widths));
    out.push_back(check_estimator_exact(2, 2, 8));
    out.push_back(check_estimator_sampled(2, 2, 4, options.shots, options.sampled_seeds));
    out.push_back(check_lcu(options.lcu_instances, options.seed + 1));
    out.push_back(check_swap(options.swap_pairs, options.seed + 2));
    out.push_back(check_solver(options.solver_systems, 16, options.seed + 3));
    out.push_back(check_gradients());
    return out;
}

}  // namespace qrom::validation
