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

#include "qrom/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qrom/errors.hpp"
#include "qrom/recon.hpp"

namespace qrom::classify {

namespace {

constexpr double kMinProbability = 1e-12;

void check_label(int label, int classes) {
    if (label < 0 || label >= classes) {
        throw DomainError("label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
    }
}

}  // namespace

const char* to_string(FeatureMode m) noexcept { return m == FeatureMode::real ? "real" : "split_complex"; }

FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "real") return FeatureMode::real;
    if (s == "split_complex" || s == "split") return FeatureMode::split_complex;
    throw DomainError("unknown feature mode '" + s + "'");
}

FeatureMode default_feature_mode(opqnn::Family family) noexcept {
    return family == opqnn::Family::qdct ? FeatureMode::real : FeatureMode::split_complex;
}

std::size_t feature_count(std::size_t m, FeatureMode mode) noexcept {
    return mode == FeatureMode::real ? m : 2 * m;
}

FeatureVector realify(const Eigen::VectorXcd& x, FeatureMode mode) {
    if (mode == FeatureMode::real) return x.real();
    FeatureVector f(2 * x.size());
    f << x.real(), x.imag();
    return f;
}

FeatureVector extract_features(const opqnn::OpqnnModel& model, const data::FlowField& field,
                               const FeatureConfig& cfg) {
    const auto sample = data::encode(field);
    if (sample.state.n_qubits() != model.layout.data_qubits()) {
        throw ShapeError("field does not fit the model's data register");
    }
    const auto prep = recon::amplitude_encode(sample.state.amplitudes());
    const auto gram = projection::estimate_gram(model, cfg.m, cfg.ordering, cfg.estimator);
    const auto cross = projection::estimate_cross(model, prep, cfg.m, cfg.ordering, cfg.estimator);
    return realify(projection::tikhonov_solve(gram, cross, cfg.lambda).x, cfg.mode);
}

FeatureVector direct_features(const Eigen::MatrixXcd& a, std::span<const qsim::Amplitude> psi,
                              const FeatureConfig& cfg) {
    return realify(projection::project(a, psi, cfg.lambda, cfg.estimator.inner).coefficients.x, cfg.mode);
}

FcLayer zero_fc(int features, int classes) {
    if (features < 1 || classes < 2) throw DomainError("FC layer needs f >= 1 and at least two classes");
    return {Eigen::MatrixXd::Zero(features, classes), Eigen::VectorXd::Zero(classes)};
}

FcLayer random_fc(int features, int classes, std::uint64_t seed, double scale) {
    auto fc = zero_fc(features, classes);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, scale);
    for (Eigen::Index j = 0; j < fc.weights.cols(); ++j) {
        for (Eigen::Index i = 0; i < fc.weights.rows(); ++i) fc.weights(i, j) = d(rng);
    }
    return fc;
}

Eigen::VectorXd fc_forward(const FcLayer& fc, const FeatureVector& features) {
    if (features.size() != fc.weights.rows() || fc.bias.size() != fc.weights.cols()) {
        throw ShapeError("feature length " + std::to_string(features.size()) + " does not match FC input " +
                         std::to_string(fc.weights.rows()));
    }
    return fc.weights.transpose() * features + fc.bias;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    if (logits.size() == 0) throw ShapeError("softmax of an empty vector");
    const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

int predict(const FcLayer& fc, const FeatureVector& features) {
    Eigen::Index arg = 0;
    fc_forward(fc, features).maxCoeff(&arg);
    return static_cast<int>(arg);
}

double cross_entropy(const Eigen::VectorXd& probabilities, int label) {
    check_label(label, static_cast<int>(probabilities.size()));
    return -std::log(std::max(probabilities(label), kMinProbability));
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size() || labels.empty()) {
        throw ShapeError("accuracy needs equal, nonempty prediction and label lists");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

FcGradient cross_entropy_gradient(const FcLayer& fc, const FeatureVector& features, int label) {
    Eigen::VectorXd delta = softmax(fc_forward(fc, features));
    check_label(label, fc.classes());
    // The clamp only bites below 1e-12, where the true gradient is used anyway.
    delta(label) -= 1.0;
    return {features * delta.transpose(), delta};
}

std::size_t parameter_budget(const opqnn::OpqnnModel& model, const FcLayer& fc) {
    return model.params.size() + fc.param_count();
}

std::vector<LabeledSample> synthetic_class_set(int side, int conditions, int steps) {
    std::vector<LabeledSample> out;
    const data::SynthKind kinds[] = {data::SynthKind::cavity_vortex, data::SynthKind::tube_profile,
                                     data::SynthKind::dam_front, data::SynthKind::cylinder_wake};
    for (int label = 0; label < 4; ++label) {
        for (const auto& p : data::condition_sweep(kinds[label], conditions)) {
            for (auto& f : data::synth_series(kinds[label], side, side, p, steps)) {
                out.push_back({std::move(f), label});
            }
        }
    }
    return out;
}

LabeledSplit stratified_split(std::span<const LabeledSample> samples, double split_ratio, std::uint64_t seed) {
    int classes = 0;
    for (const auto& s : samples) classes = std::max(classes, s.label + 1);
    LabeledSplit out;
    for (int c = 0; c < classes; ++c) {
        std::vector<data::FlowField> fields;
        for (const auto& s : samples) {
            if (s.label == c) fields.push_back(s.field);
        }
        if (fields.empty()) continue;
        const auto split = data::partition(fields, data::Strategy::comprehensive, split_ratio,
                                           seed + static_cast<std::uint64_t>(c));
        for (const auto& f : split.train) out.train.push_back({f, c});
        for (const auto& f : split.test) out.test.push_back({f, c});
    }
    return out;
}

ClassificationReport make_report(std::string method, std::span<const int> predictions, std::span<const int> labels,
                                 int classes) {
    if (classes < 2) throw DomainError("a report needs at least two classes");
    ClassificationReport r;
    r.method = std::move(method);
    r.classes = classes;
    r.accuracy = accuracy(predictions, labels);
    r.confusion.assign(static_cast<std::size_t>(classes), std::vector<int>(static_cast<std::size_t>(classes), 0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        check_label(labels[i], classes);
        check_label(predictions[i], classes);
        ++r.confusion[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predictions[i])];
    }
    for (int p = 0; p < classes; ++p) {
        int predicted = 0;
        for (int t = 0; t < classes; ++t) predicted += r.confusion[t][p];
        r.precision.push_back(predicted ? static_cast<double>(r.confusion[p][p]) / predicted : 0.0);
    }
    return r;
}

std::string ClassificationReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "method,class,precision,accuracy,circuit_params,fc_params,budget,wall_ms\n";
    for (int c = 0; c < classes; ++c) {
        out << method << ',' << c << ',' << precision[static_cast<std::size_t>(c)] << ',' << accuracy << ','
            << circuit_params << ',' << fc_params << ',' << budget << ',' << wall_ms << '\n';
    }
    return out.str();
}

std::string ClassificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["classes"] = classes;
    j["accuracy"] = accuracy;
    j["precision"] = precision;
    j["confusion"] = confusion;
    j["circuit_params"] = circuit_params;
    j["fc_params"] = fc_params;
    j["parameter_budget"] = budget;
    j["wall_ms"] = wall_ms;
    return j.dump(2);
}

}  // namespace qrom::classify
