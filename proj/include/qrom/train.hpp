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
 * @file train.hpp
 * @brief Central finite-difference gradients, Adam, and the step-decay
 *        schedule, applied to reconstruction and classification objectives.
 *
 * Reconstruction loss of one sample is 1 - F where F is the fidelity of the
 * unit-norm state with normalize(A x), x from the regularized normal
 * equations. Losses use the direct column route, which agrees with the
 * Hadamard-test and LCU circuits in exact mode.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qrom/classify.hpp"
#include "qrom/opqnn.hpp"
#include "qrom/projection.hpp"
#include "qrom/qsim.hpp"

namespace qrom::train {

struct TrainConfig {
    int epochs = 75;
    double base_lr = 1e-3;
    double decay_factor = 0.1;
    int decay_period_epochs = 25;
    double fd_epsilon = 1e-4;
    double lambda = projection::kDefaultLambda;
    std::size_t m = 8;
    std::uint64_t seed = 0;
    opqnn::Ordering ordering = opqnn::Ordering::diagonal;
    projection::InnerProduct inner = projection::InnerProduct::sesquilinear;
    /// Samples per Adam step; 0 means the whole training set.
    std::size_t batch_size = 0;
    /// Off keeps wall_ms at 0 so histories are bitwise reproducible.
    bool record_wall_time = false;

    /// Throws DomainError when an invariant fails.
    void validate() const;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsHat = 1e-8;

using LossFn = std::function<double(std::span<const double>)>;

/// (loss(theta + eps e_i) - loss(theta - eps e_i)) / (2 eps) per coordinate.
/// The 2 |theta| evaluations run on the worker pool. Throws NumericalError on
/// a non-finite loss and DomainError when eps <= 0.
[[nodiscard]] std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> theta, double eps);

/// base_lr * decay_factor^floor(epoch / decay_period_epochs).
[[nodiscard]] double lr_at(int epoch, const TrainConfig& cfg);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step_count = 0;
    double beta1 = kAdamBeta1;
    double beta2 = kAdamBeta2;
    double eps_hat = kAdamEpsHat;

    AdamState() = default;
    explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// In-place bias-corrected Adam update. Throws ShapeError on a length mismatch.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad, double lr);

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    /// Mean training loss at the parameters the epoch started from.
    double train_loss = 0.0;
    /// Test fidelity (reconstruction) or accuracy (classification) after the epoch.
    double test_metric = 0.0;
    double wall_ms = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    /// Header of the test_metric column: test_fidelity or test_accuracy.
    std::string metric_name = "test_fidelity";
    double initial_train_loss = 0.0;
    double initial_test_metric = 0.0;
    double final_train_loss = 0.0;
    /// Per-sample failures seen at the recorded (unperturbed) evaluations.
    std::size_t skipped_samples = 0;

    /// epoch,lr,train_loss,<metric_name>,wall_ms with round-trip precision.
    [[nodiscard]] std::string to_csv() const;
    void write_csv(const std::filesystem::path& path) const;
};

// --- reconstruction -----------------------------------------------------

struct SampleFailure {
    std::size_t index = 0;
    std::string reason;
};

struct SampleScores {
    /// Fidelity per sample; NaN where the solve failed.
    std::vector<double> fidelity;
    std::vector<SampleFailure> failures;

    /// Mean of 1 - F over the scored samples. Throws DegenerateReconstructionError
    /// when every sample failed.
    [[nodiscard]] double mean_loss() const;
    [[nodiscard]] double mean_fidelity() const;
};

/// Scores every state against the model's first m columns.
[[nodiscard]] SampleScores score_reconstruction(const opqnn::OpqnnModel& model,
                                                std::span<const qsim::StateVector> states, const TrainConfig& cfg);

struct ReconstructionResult {
    opqnn::OpqnnModel model;
    TrainHistory history;
};

/// Full-batch (unless cfg.batch_size) finite-difference Adam on the mean
/// reconstruction loss. States must have unit norm.
[[nodiscard]] ReconstructionResult train_reconstruction(opqnn::OpqnnModel model,
                                                        std::span<const qsim::StateVector> train_set,
                                                        std::span<const qsim::StateVector> test_set,
                                                        const TrainConfig& cfg);

// --- classification -----------------------------------------------------

struct ClassifierOptions {
    classify::FeatureMode mode = classify::FeatureMode::split_complex;
    /// Keeps the circuit parameters fixed; only the FC head trains.
    bool freeze_circuit = false;
};

struct ClassifierResult {
    opqnn::OpqnnModel model;
    classify::FcLayer fc;
    TrainHistory history;
};

/// Fits an FC head on fixed features (the classical baseline path).
[[nodiscard]] ClassifierResult fit_fc(classify::FcLayer fc, std::span<const classify::FeatureVector> train_features,
                                      std::span<const int> train_labels,
                                      std::span<const classify::FeatureVector> test_features,
                                      std::span<const int> test_labels, const TrainConfig& cfg);

/// Joint training: circuit parameters by finite differences of the batch
/// cross-entropy, FC parameters by its exact gradient, one Adam state over
/// both. Degenerate samples are dropped with a warning.
[[nodiscard]] ClassifierResult train_classifier(opqnn::OpqnnModel model, classify::FcLayer fc,
                                                std::span<const classify::LabeledSample> train_set,
                                                std::span<const classify::LabeledSample> test_set,
                                                const TrainConfig& cfg, const ClassifierOptions& options);

/// Features of every state through the direct route.
[[nodiscard]] std::vector<classify::FeatureVector> direct_feature_set(const opqnn::OpqnnModel& model,
                                                                      std::span<const qsim::StateVector> states,
                                                                      const TrainConfig& cfg,
                                                                      classify::FeatureMode mode);

[[nodiscard]] std::vector<int> predict_all(const classify::FcLayer& fc,
                                           std::span<const classify::FeatureVector> features);

}  // namespace qrom::train
