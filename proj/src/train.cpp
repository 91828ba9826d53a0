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

#include "qrom/train.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "qrom/data.hpp"
#include "qrom/errors.hpp"
#include "qrom/parallel.hpp"
#include "qrom/recon.hpp"

namespace qrom::train {

namespace {

using Clock = std::chrono::steady_clock;

opqnn::OpqnnModel with_params(const opqnn::OpqnnModel& model, std::span<const double> theta) {
    opqnn::OpqnnModel out = model;
    out.params.assign(theta.begin(), theta.end());
    return out;
}

// Basis columns, or nullopt when the model itself is degenerate at theta.
std::optional<Eigen::MatrixXcd> try_basis(const opqnn::OpqnnModel& model, const TrainConfig& cfg,
                                          std::string* reason) {
    try {
        return opqnn::basis_matrix(model, cfg.m, cfg.ordering);
    } catch (const DegenerateBasisError& e) {
        if (reason) *reason = e.what();
        return std::nullopt;
    }
}

bool recoverable(const std::exception_ptr& e, std::string& reason) {
    try {
        std::rethrow_exception(e);
    } catch (const SingularSystemError& x) {
        reason = x.what();
    } catch (const NumericalError& x) {
        reason = x.what();
    } catch (const DegenerateReconstructionError& x) {
        reason = x.what();
    } catch (const DegenerateBasisError& x) {
        reason = x.what();
    } catch (...) {
        return false;
    }
    return true;
}

// Portable Fisher-Yates so batch order does not depend on the library's shuffle.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (batch_size == 0 || batch_size >= n) return {idx};
    shuffle_indices(idx, rng);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < n; s += batch_size) {
        out.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(s),
                         idx.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + batch_size)));
    }
    return out;
}

void log_failures(const std::vector<SampleFailure>& failures, const char* what) {
    for (const auto& f : failures) spdlog::warn("{}: skipping sample {}: {}", what, f.index, f.reason);
}

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

template <class T>
std::vector<T> gather(std::span<const T> all, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(all[i]);
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw DomainError("epochs must be >= 1");
    if (!(base_lr > 0.0)) throw DomainError("base_lr must be > 0");
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw DomainError("decay_factor must lie in (0, 1]");
    if (decay_period_epochs < 1) throw DomainError("decay_period_epochs must be >= 1");
    if (!(fd_epsilon > 0.0)) throw DomainError("fd_epsilon must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
    if (m < 1) throw DomainError("reconstruction order must be >= 1");
}

std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> theta, double eps) {
    if (!(eps > 0.0)) throw DomainError("finite-difference step must be > 0");
    const std::size_t n = theta.size();
    std::vector<double> values(2 * n);
    parallel_for(2 * n, [&](std::size_t k) {
        std::vector<double> probe(theta.begin(), theta.end());
        probe[k / 2] += (k % 2 == 0) ? eps : -eps;
        values[k] = loss(probe);
    });
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(values[2 * i]) || !std::isfinite(values[2 * i + 1])) {
            throw NumericalError("non-finite loss while differentiating parameter " + std::to_string(i));
        }
        grad[i] = (values[2 * i] - values[2 * i + 1]) / (2.0 * eps);
    }
    return grad;
}

double lr_at(int epoch, const TrainConfig& cfg) {
    if (epoch < 0) throw DomainError("negative epoch");
    const double raw = cfg.base_lr * std::pow(cfg.decay_factor, epoch / cfg.decay_period_epochs);
    // 15 significant digits drop the representation error of repeated decimal
    // factors, so 0.001 decays to exactly 0.0001 and 0.00001.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", raw);
    return std::strtod(buf, nullptr);
}

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad, double lr) {
    const std::size_t n = theta.size();
    if (grad.size() != n || state.first_moment.size() != n || state.second_moment.size() != n) {
        throw ShapeError("Adam state, parameters, and gradient lengths disagree");
    }
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * grad[i];
        state.second_moment[i] = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double mhat = state.first_moment[i] / c1;
        const double vhat = state.second_moment[i] / c2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + state.eps_hat);
    }
}

std::string TrainHistory::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,lr,train_loss," << metric_name << ",wall_ms\n";
    for (const auto& r : epochs) {
        out << r.epoch << ',' << r.lr << ',' << r.train_loss << ',' << r.test_metric << ',' << r.wall_ms << '\n';
    }
    return out.str();
}

void TrainHistory::write_csv(const std::filesystem::path& path) const {
    data::write_file_atomically(path, to_csv());
}

// --- reconstruction -----------------------------------------------------

double SampleScores::mean_loss() const {
    double acc = 0.0;
    std::size_t n = 0;
    for (double f : fidelity) {
        if (std::isnan(f)) continue;
        acc += 1.0 - f;
        ++n;
    }
    if (n == 0) throw DegenerateReconstructionError("every sample failed to reconstruct");
    return acc / static_cast<double>(n);
}

double SampleScores::mean_fidelity() const { return 1.0 - mean_loss(); }

SampleScores score_reconstruction(const opqnn::OpqnnModel& model, std::span<const qsim::StateVector> states,
                                  const TrainConfig& cfg) {
    SampleScores s;
    s.fidelity.assign(states.size(), std::numeric_limits<double>::quiet_NaN());
    std::string reason;
    const auto a = try_basis(model, cfg, &reason);
    if (!a) {
        for (std::size_t i = 0; i < states.size(); ++i) s.failures.push_back({i, reason});
        return s;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto psi = states[i].amplitudes();
        try {
            const auto proj = projection::project(*a, psi, cfg.lambda, cfg.inner);
            s.fidelity[i] = std::min(1.0, recon::direct_fidelity(psi, *a, proj.coefficients.x));
        } catch (...) {
            if (!recoverable(std::current_exception(), reason)) throw;
            s.failures.push_back({i, reason});
        }
    }
    return s;
}

ReconstructionResult train_reconstruction(opqnn::OpqnnModel model, std::span<const qsim::StateVector> train_set,
                                          std::span<const qsim::StateVector> test_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty()) throw DomainError("training set is empty");
    ReconstructionResult out;
    auto& h = out.history;
    h.metric_name = "test_fidelity";
    const auto t0 = Clock::now();

    auto test_fidelity = [&](const opqnn::OpqnnModel& mdl) {
        if (test_set.empty()) return std::numeric_limits<double>::quiet_NaN();
        const auto s = score_reconstruction(mdl, test_set, cfg);
        log_failures(s.failures, "test");
        h.skipped_samples += s.failures.size();
        return s.mean_fidelity();
    };
    auto train_loss = [&](const opqnn::OpqnnModel& mdl) {
        const auto s = score_reconstruction(mdl, train_set, cfg);
        log_failures(s.failures, "train");
        h.skipped_samples += s.failures.size();
        return s.mean_loss();
    };

    h.initial_train_loss = train_loss(model);
    h.initial_test_metric = test_fidelity(model);
    std::vector<double> theta = model.params;
    AdamState adam(theta.size());
    std::mt19937_64 rng(cfg.seed);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRecord r;
        r.epoch = epoch;
        r.lr = lr_at(epoch, cfg);
        r.train_loss = epoch == 0 ? h.initial_train_loss : train_loss(model);
        for (const auto& batch : epoch_batches(train_set.size(), cfg.batch_size, rng)) {
            const auto states = gather(train_set, batch);
            const LossFn loss = [&](std::span<const double> p) {
                const auto s = score_reconstruction(with_params(model, p), states, cfg);
                return s.failures.size() == states.size() ? 1.0 : s.mean_loss();
            };
            const auto grad = finite_diff_grad(loss, theta, cfg.fd_epsilon);
            adam_step(adam, theta, grad, r.lr);
            model.params = theta;
        }
        r.test_metric = test_fidelity(model);
        r.wall_ms = cfg.record_wall_time ? elapsed_ms(t0) : 0.0;
        h.epochs.push_back(r);
    }
    h.final_train_loss = train_loss(model);
    out.model = std::move(model);
    return out;
}

// --- classification -----------------------------------------------------

std::vector<classify::FeatureVector> direct_feature_set(const opqnn::OpqnnModel& model,
                                                        std::span<const qsim::StateVector> states,
                                                        const TrainConfig& cfg, classify::FeatureMode mode) {
    const auto a = opqnn::basis_matrix(model, cfg.m, cfg.ordering);
    const classify::FeatureConfig fcfg{.m = cfg.m, .mode = mode, .lambda = cfg.lambda, .ordering = cfg.ordering,
                                       .estimator = {.inner = cfg.inner}};
    std::vector<classify::FeatureVector> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(classify::direct_features(a, s.amplitudes(), fcfg));
    return out;
}

std::vector<int> predict_all(const classify::FcLayer& fc, std::span<const classify::FeatureVector> features) {
    std::vector<int> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(classify::predict(fc, f));
    return out;
}

namespace {

// Packed layout: [circuit params][W column-major][b].
struct Packed {
    std::size_t circuit = 0;
    std::size_t weights = 0;
    std::size_t bias = 0;
    [[nodiscard]] std::size_t total() const { return circuit + weights + bias; }
};

std::vector<double> pack(std::span<const double> circuit, const classify::FcLayer& fc) {
    std::vector<double> v(circuit.begin(), circuit.end());
    v.insert(v.end(), fc.weights.data(), fc.weights.data() + fc.weights.size());
    v.insert(v.end(), fc.bias.data(), fc.bias.data() + fc.bias.size());
    return v;
}

void unpack(std::span<const double> v, const Packed& p, std::vector<double>& circuit, classify::FcLayer& fc) {
    circuit.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p.circuit));
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(p.circuit), p.weights, fc.weights.data());
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(p.circuit + p.weights), p.bias, fc.bias.data());
}

struct BatchFeatures {
    std::vector<classify::FeatureVector> features;
    std::vector<int> labels;
    std::vector<SampleFailure> failures;
};

BatchFeatures batch_features(const opqnn::OpqnnModel& model, std::span<const qsim::StateVector> states,
                             std::span<const int> labels, const std::vector<std::size_t>& idx,
                             const TrainConfig& cfg, classify::FeatureMode mode) {
    BatchFeatures out;
    std::string reason;
    const auto a = try_basis(model, cfg, &reason);
    if (!a) {
        for (auto i : idx) out.failures.push_back({i, reason});
        return out;
    }
    const classify::FeatureConfig fcfg{.m = cfg.m, .mode = mode, .lambda = cfg.lambda, .ordering = cfg.ordering,
                                       .estimator = {.inner = cfg.inner}};
    for (auto i : idx) {
        try {
            out.features.push_back(classify::direct_features(*a, states[i].amplitudes(), fcfg));
            out.labels.push_back(labels[i]);
        } catch (...) {
            if (!recoverable(std::current_exception(), reason)) throw;
            out.failures.push_back({i, reason});
        }
    }
    return out;
}

double mean_cross_entropy(const classify::FcLayer& fc, const std::vector<classify::FeatureVector>& f,
                          const std::vector<int>& labels) {
    if (f.empty()) throw DegenerateReconstructionError("every sample in the batch failed");
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        acc += classify::cross_entropy(classify::softmax(classify::fc_forward(fc, f[k])), labels[k]);
    }
    return acc / static_cast<double>(f.size());
}

// Features of the listed samples at circuit parameters theta.
using FeatureSource = std::function<BatchFeatures(const std::vector<double>&, const std::vector<std::size_t>&)>;

// Shared loop for fixed and trainable features.
template <class FeatureFn>
ClassifierResult run_classifier(opqnn::OpqnnModel model, classify::FcLayer fc, std::size_t n_train,
                                std::size_t n_test, const TrainConfig& cfg, bool train_circuit,
                                FeatureFn&& train_features_of, FeatureFn&& test_features_of) {
    cfg.validate();
    if (n_train == 0) throw DomainError("training set is empty");
    ClassifierResult out;
    auto& h = out.history;
    h.metric_name = "test_accuracy";
    const auto t0 = Clock::now();

    std::vector<std::size_t> all_train(n_train);
    std::iota(all_train.begin(), all_train.end(), 0);
    std::vector<std::size_t> all_test(n_test);
    std::iota(all_test.begin(), all_test.end(), 0);

    std::vector<double> theta = model.params;
    auto full_loss = [&] {
        auto b = train_features_of(theta, all_train);
        log_failures(b.failures, "train");
        h.skipped_samples += b.failures.size();
        return mean_cross_entropy(fc, b.features, b.labels);
    };
    auto test_accuracy = [&] {
        if (n_test == 0) return std::numeric_limits<double>::quiet_NaN();
        auto b = test_features_of(theta, all_test);
        log_failures(b.failures, "test");
        h.skipped_samples += b.failures.size();
        // Failed test samples count as misclassified.
        std::size_t hits = 0;
        for (std::size_t k = 0; k < b.features.size(); ++k) hits += classify::predict(fc, b.features[k]) == b.labels[k];
        return static_cast<double>(hits) / static_cast<double>(n_test);
    };

    const Packed layout{train_circuit ? theta.size() : 0, static_cast<std::size_t>(fc.weights.size()),
                        static_cast<std::size_t>(fc.bias.size())};
    AdamState adam(layout.total());
    std::mt19937_64 rng(cfg.seed);

    h.initial_train_loss = full_loss();
    h.initial_test_metric = test_accuracy();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRecord r;
        r.epoch = epoch;
        r.lr = lr_at(epoch, cfg);
        r.train_loss = epoch == 0 ? h.initial_train_loss : full_loss();
        for (const auto& batch : epoch_batches(n_train, cfg.batch_size, rng)) {
            const auto center = train_features_of(theta, batch);
            if (center.features.empty()) continue;
            std::vector<double> grad;
            if (train_circuit) {
                const LossFn loss = [&](std::span<const double> p) {
                    const auto b = train_features_of(std::vector<double>(p.begin(), p.end()), batch);
                    return b.features.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : mean_cross_entropy(fc, b.features, b.labels);
                };
                grad = finite_diff_grad(loss, theta, cfg.fd_epsilon);
            }
            Eigen::MatrixXd gw = Eigen::MatrixXd::Zero(fc.weights.rows(), fc.weights.cols());
            Eigen::VectorXd gb = Eigen::VectorXd::Zero(fc.bias.size());
            for (std::size_t k = 0; k < center.features.size(); ++k) {
                const auto g = classify::cross_entropy_gradient(fc, center.features[k], center.labels[k]);
                gw += g.weights;
                gb += g.bias;
            }
            const double inv = 1.0 / static_cast<double>(center.features.size());
            classify::FcLayer gfc{gw * inv, gb * inv};
            const auto gpack = pack(grad, gfc);
            auto params = pack(train_circuit ? std::span<const double>(theta) : std::span<const double>(), fc);
            adam_step(adam, params, gpack, r.lr);
            std::vector<double> new_theta;
            unpack(params, layout, new_theta, fc);
            if (train_circuit) theta = std::move(new_theta);
        }
        r.test_metric = test_accuracy();
        r.wall_ms = cfg.record_wall_time ? elapsed_ms(t0) : 0.0;
        h.epochs.push_back(r);
    }
    h.final_train_loss = full_loss();
    model.params = theta;
    out.model = std::move(model);
    out.fc = std::move(fc);
    return out;
}

}  // namespace

ClassifierResult fit_fc(classify::FcLayer fc, std::span<const classify::FeatureVector> train_features,
                        std::span<const int> train_labels, std::span<const classify::FeatureVector> test_features,
                        std::span<const int> test_labels, const TrainConfig& cfg) {
    if (train_features.size() != train_labels.size() || test_features.size() != test_labels.size()) {
        throw ShapeError("feature and label counts disagree");
    }
    auto fixed = [](std::span<const classify::FeatureVector> f, std::span<const int> l) {
        return [f, l](const std::vector<double>&, const std::vector<std::size_t>& idx) {
            BatchFeatures b;
            for (auto i : idx) {
                b.features.push_back(f[i]);
                b.labels.push_back(l[i]);
            }
            return b;
        };
    };
    FeatureSource tr = fixed(train_features, train_labels);
    FeatureSource te = fixed(test_features, test_labels);
    return run_classifier(opqnn::OpqnnModel{}, std::move(fc), train_features.size(),
                          test_features.size(), cfg, false, std::move(tr), std::move(te));
}

ClassifierResult train_classifier(opqnn::OpqnnModel model, classify::FcLayer fc,
                                  std::span<const classify::LabeledSample> train_set,
                                  std::span<const classify::LabeledSample> test_set, const TrainConfig& cfg,
                                  const ClassifierOptions& options) {
    auto encode_all = [](std::span<const classify::LabeledSample> set, const char* what) {
        std::pair<std::vector<qsim::StateVector>, std::vector<int>> out;
        for (std::size_t i = 0; i < set.size(); ++i) {
            try {
                out.first.push_back(data::encode(set[i].field).state);
                out.second.push_back(set[i].label);
            } catch (const DegenerateFieldError& e) {
                spdlog::warn("{}: skipping sample {}: {}", what, i, e.what());
            }
        }
        return out;
    };
    const auto train = encode_all(train_set, "train");
    const auto test = encode_all(test_set, "test");
    for (int l : train.second) {
        if (l < 0 || l >= fc.classes()) throw DomainError("training label outside the FC head's classes");
    }
    if (static_cast<std::size_t>(fc.features()) != classify::feature_count(cfg.m, options.mode)) {
        throw ShapeError("FC input width does not match m and the feature mode");
    }
    auto dynamic = [&](const std::vector<qsim::StateVector>& states, const std::vector<int>& labels) {
        return [&model, &states, &labels, &cfg, mode = options.mode](const std::vector<double>& theta,
                                                                     const std::vector<std::size_t>& idx) {
            return batch_features(with_params(model, theta), states, labels, idx, cfg, mode);
        };
    };
    FeatureSource tr = dynamic(train.first, train.second);
    FeatureSource te = dynamic(test.first, test.second);
    return run_classifier(model, std::move(fc), train.first.size(), test.first.size(), cfg, !options.freeze_circuit, std::move(tr), std::move(te));
}

}  // namespace qrom::train
