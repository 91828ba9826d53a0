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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qrom/oracle.hpp"
#include "qrom/errors.hpp"
#include "qrom/recon.hpp"
#include "qrom/train.hpp"

namespace {

using namespace qrom::train;
using qrom::opqnn::Family;
using qrom::qsim::StateVector;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::vector<StateVector> encode_all(const std::vector<qrom::data::FlowField>& fields) {
    std::vector<StateVector> out;
    for (const auto& f : fields) out.push_back(qrom::data::encode(f).state);
    return out;
}

TEST(Schedule, StepDecayValues) {
    const TrainConfig cfg;
    EXPECT_EQ(lr_at(0, cfg), 0.001);
    EXPECT_EQ(lr_at(24, cfg), 0.001);
    EXPECT_EQ(lr_at(25, cfg), 0.0001);
    EXPECT_EQ(lr_at(49, cfg), 0.0001);
    EXPECT_EQ(lr_at(50, cfg), 0.00001);
    EXPECT_EQ(lr_at(74, cfg), 0.00001);
    for (int e = 0; e < 200; ++e) {
        const double want = cfg.base_lr * std::pow(cfg.decay_factor, std::floor(e / 25.0));
        EXPECT_NEAR(lr_at(e, cfg), want, 1e-14 * want);
    }
    EXPECT_THROW((void)lr_at(-1, cfg), qrom::DomainError);
}

TEST(Schedule, ConfigValidation) {
    TrainConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.decay_factor = 1.5;
    EXPECT_THROW(cfg.validate(), qrom::DomainError);
    cfg = {};
    cfg.fd_epsilon = 0.0;
    EXPECT_THROW(cfg.validate(), qrom::DomainError);
    cfg = {};
    cfg.epochs = 0;
    EXPECT_THROW(cfg.validate(), qrom::DomainError);
}

TEST(FiniteDiff, Quadratic) {
    const LossFn loss = [](std::span<const double> t) { return t[0] * t[0]; };
    const std::vector<double> theta{1.0};
    EXPECT_NEAR(finite_diff_grad(loss, theta, 1e-4)[0], 2.0, 1e-6);
}

TEST(FiniteDiff, ConstantIsExactlyZero) {
    const LossFn loss = [](std::span<const double>) { return 0.37; };
    const std::vector<double> theta{0.1, -2.0, 5.0};
    for (double g : finite_diff_grad(loss, theta, 1e-4)) EXPECT_EQ(g, 0.0);
}

TEST(FiniteDiff, Errors) {
    const LossFn bad = [](std::span<const double> t) { return t[0] > 0 ? NAN : 0.0; };
    const std::vector<double> theta{0.0};
    EXPECT_THROW((void)finite_diff_grad(bad, theta, 1e-4), qrom::NumericalError);
    const LossFn ok = [](std::span<const double>) { return 0.0; };
    EXPECT_THROW((void)finite_diff_grad(ok, theta, 0.0), qrom::DomainError);
}

// One-column reconstruction of psi by R_z(theta) R_y(0.9) |0>.
double rz_loss(double theta, std::span<const cd> psi) {
    qrom::qsim::Circuit c(1);
    c.add(qrom::qsim::gates::ry(0, 0.9));
    c.add(qrom::qsim::gates::rz(0, theta));
    const auto col = qrom::qsim::run(c, StateVector(1));
    Eigen::MatrixXcd a(2, 1);
    a << col.amplitudes()[0], col.amplitudes()[1];
    const auto proj = qrom::projection::project(a, psi, qrom::projection::kDefaultLambda,
                                                qrom::projection::InnerProduct::sesquilinear);
    return 1.0 - qrom::recon::direct_fidelity(psi, a, proj.coefficients.x);
}

TEST(FiniteDiff, MatchesParameterShiftOnRz) {
    const std::vector<cd> psi{cd(0.6, 0.0), cd(0.48, 0.64)};
    for (double theta : {-2.0, -0.4, 0.0, 0.3, 1.1, 2.7}) {
        const LossFn loss = [&](std::span<const double> t) { return rz_loss(t[0], psi); };
        const double fd = finite_diff_grad(loss, std::vector<double>{theta}, 1e-4)[0];
        const double shift = 0.5 * (rz_loss(theta + kPi / 2, psi) - rz_loss(theta - kPi / 2, psi));
        EXPECT_NEAR(fd, shift, 1e-5) << "theta = " << theta;
    }
}

TEST(FiniteDiff, StepSizeRobustOnCircuitLosses) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d;
    std::vector<StateVector> states;
    for (int k = 0; k < 3; ++k) {
        std::vector<cd> v(16);
        for (auto& x : v) x = cd(d(rng), 0.0);
        double n = 0.0;
        for (auto& x : v) n += std::norm(x);
        for (auto& x : v) x /= std::sqrt(n);
        states.emplace_back(4, v);
    }
    TrainConfig cfg;
    cfg.m = 5;
    for (auto family : {Family::qft, Family::qdct, Family::ansatz}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto model = qrom::opqnn::random_model(family, 2, 2, seed);
            const LossFn loss = [&](std::span<const double> p) {
                auto mdl = model;
                mdl.params.assign(p.begin(), p.end());
                return score_reconstruction(mdl, states, cfg).mean_loss();
            };
            const auto g4 = finite_diff_grad(loss, model.params, 1e-4);
            const auto g5 = finite_diff_grad(loss, model.params, 1e-5);
            double diff = 0.0;
            double norm = 0.0;
            for (std::size_t i = 0; i < g4.size(); ++i) {
                diff += (g4[i] - g5[i]) * (g4[i] - g5[i]);
                norm += g4[i] * g4[i];
            }
            EXPECT_LE(std::sqrt(diff), 1e-3 * std::sqrt(norm)) << qrom::opqnn::to_string(family) << " " << seed;
        }
    }
}

TEST(Adam, ZeroGradientLeavesParameters) {
    AdamState s(3);
    std::vector<double> theta{1.0, -2.0, 0.5};
    const auto before = theta;
    adam_step(s, theta, std::vector<double>(3, 0.0), 0.01);
    EXPECT_EQ(theta, before);
    EXPECT_EQ(s.step_count, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    AdamState s(4);
    std::vector<double> theta(4, 0.0);
    const std::vector<double> g{3.0, -0.01, 1e3, -7.0};
    adam_step(s, theta, g, 0.05);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(std::abs(theta[i]), 0.05, 1e-6);
        EXPECT_LT(theta[i] * g[i], 0.0);
    }
}

TEST(Adam, ConvergesOnAParabola) {
    AdamState s(1);
    std::vector<double> theta{1.0};
    for (int k = 0; k < 100; ++k) adam_step(s, theta, std::vector<double>{2.0 * theta[0]}, 0.1);
    EXPECT_LT(std::abs(theta[0]), 0.05);
}

TEST(Adam, LengthMismatch) {
    AdamState s(2);
    std::vector<double> theta{1.0};
    EXPECT_THROW(adam_step(s, theta, std::vector<double>{1.0}, 0.1), qrom::ShapeError);
}

// Field in the span of the first m two-dimensional DCT-II functions.
std::vector<StateVector> dct_span_states(int count, std::size_t m) {
    const Eigen::MatrixXd c = qrom::oracle::dct2(4);
    const auto pairs = qrom::opqnn::diagonal_pairs(m, 4, 4);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> d;
    std::vector<StateVector> out;
    for (int k = 0; k < count; ++k) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
        for (auto [p, q] : pairs) v += d(rng) * c.col(static_cast<Eigen::Index>(p)) * c.col(static_cast<Eigen::Index>(q)).transpose();
        v /= v.norm();
        std::vector<cd> amps;
        for (int r = 0; r < 4; ++r) {
            for (int col = 0; col < 4; ++col) amps.emplace_back(v(r, col), 0.0);
        }
        out.emplace_back(4, amps);
    }
    return out;
}

TEST(Reconstruction, CanonicalQdctOnItsOwnSpanStaysOptimal) {
    TrainConfig cfg;
    cfg.m = 5;
    cfg.epochs = 10;
    const auto train = dct_span_states(4, cfg.m);
    const auto test = dct_span_states(2, cfg.m);
    const auto r = train_reconstruction(qrom::opqnn::structured_model(Family::qdct, 2, 2), train, test, cfg);
    EXPECT_LE(r.history.initial_train_loss, 1e-8);
    EXPECT_LE(r.history.final_train_loss, 1e-8);
    for (const auto& e : r.history.epochs) {
        EXPECT_LE(e.train_loss, 1e-8);
        EXPECT_GE(e.test_metric, 1.0 - 1e-8);
    }
}

TEST(Reconstruction, HistoryShapeScheduleAndBounds) {
    TrainConfig cfg;
    cfg.m = 4;
    cfg.epochs = 30;
    cfg.base_lr = 0.01;
    cfg.decay_period_epochs = 10;
    const auto fields = qrom::data::synth_series(qrom::data::SynthKind::cylinder_wake, 4, 4, {}, 6);
    const auto states = encode_all(fields);
    const std::span<const StateVector> all(states);
    const auto r = train_reconstruction(qrom::opqnn::random_model(Family::qft, 2, 2, 3), all.first(4),
                                        all.subspan(4), cfg);
    ASSERT_EQ(r.history.epochs.size(), 30u);
    for (const auto& e : r.history.epochs) {
        EXPECT_EQ(e.lr, lr_at(e.epoch, cfg));
        EXPECT_GE(e.train_loss, -1e-10);
        EXPECT_LE(e.train_loss, 1.0);
        EXPECT_EQ(e.wall_ms, 0.0);
    }
    EXPECT_LT(r.history.final_train_loss, r.history.initial_train_loss);
    const auto csv = r.history.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,lr,train_loss,test_fidelity,wall_ms");
}

TEST(Reconstruction, DeterministicHistories) {
    TrainConfig cfg;
    cfg.m = 6;
    cfg.epochs = 5;
    cfg.batch_size = 2;
    cfg.seed = 17;
    const auto states = encode_all(qrom::data::synth_series(qrom::data::SynthKind::dam_front, 4, 4, {}, 5));
    const std::span<const StateVector> all(states);
    const auto model = qrom::opqnn::random_model(Family::ansatz, 2, 2, 5, 2);
    const auto a = train_reconstruction(model, all.first(4), all.subspan(4), cfg);
    const auto b = train_reconstruction(model, all.first(4), all.subspan(4), cfg);
    EXPECT_EQ(a.history.to_csv(), b.history.to_csv());
    EXPECT_EQ(a.model.params, b.model.params);
}

TEST(Reconstruction, StructuredStartsBelowRandomOnSmoothFields) {
    TrainConfig cfg;
    cfg.m = 6;
    const auto states = encode_all(qrom::data::synth_series(qrom::data::SynthKind::tube_profile, 16, 16, {}, 8));
    for (auto family : {Family::qft, Family::qdct}) {
        const double structured =
            score_reconstruction(qrom::opqnn::structured_model(family, 4, 2), states, cfg).mean_loss();
        double random = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            random += score_reconstruction(qrom::opqnn::random_model(family, 4, 2, seed), states, cfg).mean_loss();
        }
        EXPECT_LE(structured, random / 5.0) << qrom::opqnn::to_string(family);
    }
}

TEST(Reconstruction, AllSamplesFailingIsAnError) {
    // The bilinear Gram of the canonical QFT is a permutation restricted to
    // the nested set, singular at lambda = 0.
    TrainConfig cfg;
    cfg.m = 2;
    cfg.lambda = 0.0;
    cfg.inner = qrom::projection::InnerProduct::bilinear;
    cfg.epochs = 1;
    const auto states = dct_span_states(2, 2);
    const auto scores = score_reconstruction(qrom::opqnn::structured_model(Family::qft, 2, 2), states, cfg);
    EXPECT_EQ(scores.failures.size(), 2u);
    EXPECT_THROW((void)scores.mean_loss(), qrom::DegenerateReconstructionError);
    EXPECT_THROW((void)train_reconstruction(qrom::opqnn::structured_model(Family::qft, 2, 2), states, {}, cfg),
                 qrom::DegenerateReconstructionError);
}

TEST(FcTraining, SeparableToyReachesFullTrainAccuracy) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> d(0.0, 0.3);
    std::vector<qrom::classify::FeatureVector> feats;
    std::vector<int> labels;
    for (int k = 0; k < 40; ++k) {
        const int label = k % 2;
        Eigen::Vector2d f(d(rng) + (label ? 1.0 : -1.0), d(rng));
        feats.emplace_back(f);
        labels.push_back(label);
    }
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.base_lr = 0.05;
    cfg.decay_factor = 1.0;
    const auto r = fit_fc(qrom::classify::random_fc(2, 2, 1), feats, labels, feats, labels, cfg);
    EXPECT_EQ(r.history.epochs.back().test_metric, 1.0);
    EXPECT_EQ(r.history.metric_name, "test_accuracy");
}

TEST(FcTraining, SingleClassLossDecreasesMonotonically) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> d;
    std::vector<qrom::classify::FeatureVector> feats;
    std::vector<int> labels;
    for (int k = 0; k < 12; ++k) {
        feats.emplace_back(Eigen::Vector3d(d(rng), d(rng), d(rng)));
        labels.push_back(0);
    }
    TrainConfig cfg;
    cfg.epochs = 600;
    cfg.base_lr = 0.1;
    cfg.decay_factor = 1.0;
    const auto r = fit_fc(qrom::classify::random_fc(3, 4, 2), feats, labels, {}, {}, cfg);
    for (std::size_t e = 1; e < r.history.epochs.size(); ++e) {
        EXPECT_LT(r.history.epochs[e].train_loss, r.history.epochs[e - 1].train_loss) << e;
    }
    EXPECT_LE(r.history.final_train_loss, 1e-3);
}

TEST(ClassifierTraining, JointTrainingSeparatesSmallGrids) {
    const auto set = qrom::classify::synthetic_class_set(8, 2, 5);
    const auto split = qrom::classify::stratified_split(set, 0.8, 0);
    TrainConfig cfg;
    cfg.m = 3;
    cfg.epochs = 40;
    cfg.batch_size = 4;
    cfg.base_lr = 0.01;
    const ClassifierOptions opt{qrom::classify::FeatureMode::split_complex, false};
    const auto model = qrom::opqnn::structured_model(Family::qft, 3, 2);
    const auto fc = qrom::classify::random_fc(6, 4, 3);
    const auto a = train_classifier(model, fc, split.train, split.test, cfg, opt);
    EXPECT_LT(a.history.final_train_loss, a.history.initial_train_loss);
    EXPECT_NE(a.model.params, model.params);
    EXPECT_GE(a.history.epochs.back().test_metric, 0.75);
    const auto b = train_classifier(model, fc, split.train, split.test, cfg, opt);
    EXPECT_EQ(a.history.to_csv(), b.history.to_csv());
}

TEST(ClassifierTraining, FrozenCircuitAndDegenerateSamples) {
    auto set = qrom::classify::synthetic_class_set(4, 1, 5);
    auto zero = set.front();
    std::fill(zero.field.values.begin(), zero.field.values.end(), 0.0);
    const auto split = qrom::classify::stratified_split(set, 0.8, 1);
    auto train = split.train;
    train.push_back(zero);
    TrainConfig cfg;
    cfg.m = 2;
    cfg.epochs = 3;
    const ClassifierOptions opt{qrom::classify::FeatureMode::real, true};
    const auto model = qrom::opqnn::structured_model(Family::qdct, 2, 2);
    const auto r = train_classifier(model, qrom::classify::random_fc(2, 4, 0), train, split.test, cfg, opt);
    EXPECT_EQ(r.model.params, model.params);
    EXPECT_THROW((void)train_classifier(model, qrom::classify::random_fc(3, 4, 0), train, split.test, cfg, opt),
                 qrom::ShapeError);
}

}  // namespace
