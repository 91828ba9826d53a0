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
 * @file classify.hpp
 * @brief Reduced coefficients as features, a single fully connected softmax
 *        head, and classification reports.
 *
 * logits = W^T f + b with W of shape f x c. Softmax subtracts the largest
 * logit before exponentiating.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrom/data.hpp"
#include "qrom/opqnn.hpp"
#include "qrom/projection.hpp"

namespace qrom::classify {

/// real: Re(x), f = m. split_complex: Re(x) followed by Im(x), f = 2m.
enum class FeatureMode : std::uint8_t { real, split_complex };

[[nodiscard]] const char* to_string(FeatureMode m) noexcept;
[[nodiscard]] FeatureMode feature_mode_from_string(const std::string& s);
/// split_complex for complex-valued bases (qft, ansatz), real for qdct.
[[nodiscard]] FeatureMode default_feature_mode(opqnn::Family family) noexcept;

using FeatureVector = Eigen::VectorXd;

struct FeatureConfig {
    std::size_t m = 8;
    FeatureMode mode = FeatureMode::split_complex;
    double lambda = projection::kDefaultLambda;
    opqnn::Ordering ordering = opqnn::Ordering::diagonal;
    projection::EstimatorConfig estimator;
};

[[nodiscard]] std::size_t feature_count(std::size_t m, FeatureMode mode) noexcept;
[[nodiscard]] FeatureVector realify(const Eigen::VectorXcd& x, FeatureMode mode);

/// Circuit route: Hadamard-test Gram and cross estimates, then the
/// regularized solve. Throws DegenerateFieldError on a zero field.
[[nodiscard]] FeatureVector extract_features(const opqnn::OpqnnModel& model, const data::FlowField& field,
                                             const FeatureConfig& cfg);
/// Same features from precomputed basis columns and a unit-norm state.
[[nodiscard]] FeatureVector direct_features(const Eigen::MatrixXcd& a, std::span<const qsim::Amplitude> psi,
                                            const FeatureConfig& cfg);

struct FcLayer {
    Eigen::MatrixXd weights;  ///< f x c
    Eigen::VectorXd bias;     ///< c

    [[nodiscard]] int features() const noexcept { return static_cast<int>(weights.rows()); }
    [[nodiscard]] int classes() const noexcept { return static_cast<int>(weights.cols()); }
    [[nodiscard]] std::size_t param_count() const noexcept {
        return static_cast<std::size_t>(weights.size() + bias.size());
    }
};

[[nodiscard]] FcLayer zero_fc(int features, int classes);
/// Weights i.i.d. N(0, scale^2), zero bias.
[[nodiscard]] FcLayer random_fc(int features, int classes, std::uint64_t seed, double scale = 0.1);

struct LabeledSample {
    data::FlowField field;
    int label = 0;
};

/// Throws ShapeError on a feature-length mismatch.
[[nodiscard]] Eigen::VectorXd fc_forward(const FcLayer& fc, const FeatureVector& features);
[[nodiscard]] Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
[[nodiscard]] int predict(const FcLayer& fc, const FeatureVector& features);
/// -log(max(p[label], 1e-12)).
[[nodiscard]] double cross_entropy(const Eigen::VectorXd& probabilities, int label);
[[nodiscard]] double accuracy(std::span<const int> predictions, std::span<const int> labels);

struct FcGradient {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

/// Exact gradient of cross_entropy(softmax(fc_forward(f)), label).
[[nodiscard]] FcGradient cross_entropy_gradient(const FcLayer& fc, const FeatureVector& features, int label);

/// |theta| + f c + c.
[[nodiscard]] std::size_t parameter_budget(const opqnn::OpqnnModel& model, const FcLayer& fc);

struct ClassificationReport {
    std::string method;
    int classes = 0;
    std::vector<double> precision;  ///< per class; 0 when the class is never predicted
    std::vector<std::vector<int>> confusion;  ///< [true][predicted]
    double accuracy = 0.0;
    std::size_t circuit_params = 0;
    std::size_t fc_params = 0;
    std::size_t budget = 0;
    double wall_ms = 0.0;

    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] std::string to_json() const;
};

/// Labeled synthetic set: label k is the k-th synthetic kind (cavity, tube,
/// dam, cylinder); each class holds `conditions` x `steps` u-component fields.
[[nodiscard]] std::vector<LabeledSample> synthetic_class_set(int side, int conditions, int steps);

struct LabeledSplit {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> test;
};

/// Per-class comprehensive partition, so both sides hold every class.
[[nodiscard]] LabeledSplit stratified_split(std::span<const LabeledSample> samples, double split_ratio,
                                            std::uint64_t seed);

[[nodiscard]] ClassificationReport make_report(std::string method, std::span<const int> predictions,
                                               std::span<const int> labels, int classes);

}  // namespace qrom::classify
