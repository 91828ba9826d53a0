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

// Acceptance run: one PASS/FAIL line per criterion with its tolerance and
// runtime. Exits 1 when any criterion fails; --report-only always exits 0
// once every criterion has run (2 on an unexpected exception).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qrom/baseline.hpp"
#include "qrom/classify.hpp"
#include "qrom/cli.hpp"
#include "qrom/data.hpp"
#include "qrom/opqnn.hpp"
#include "qrom/train.hpp"
#include "qrom/validation.hpp"

namespace {

namespace fs = std::filesystem;
using qrom::opqnn::Family;
using qrom::validation::CheckResult;

struct Outcome {
    bool passed = false;
    std::string detail;
    std::vector<std::string> notes;
};

constexpr qrom::data::SynthKind kKinds[] = {qrom::data::SynthKind::cavity_vortex, qrom::data::SynthKind::tube_profile,
                                            qrom::data::SynthKind::dam_front, qrom::data::SynthKind::cylinder_wake};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string fixed(double v, int digits = 4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

Outcome from_checks(const std::vector<CheckResult>& checks) {
    Outcome o{true, {}, {}};
    for (const auto& c : checks) {
        o.passed = o.passed && c.passed;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += c.name + " worst=" + sci(c.worst) + " tol=" + sci(c.tolerance);
        o.notes.push_back(qrom::validation::format(c));
    }
    return o;
}

struct SplitStates {
    std::vector<qrom::qsim::StateVector> train;
    std::vector<qrom::qsim::StateVector> test;
};

// 16 x 16 u-component series of one kind at its default condition, time-ordered split.
SplitStates synthetic_split(qrom::data::SynthKind kind) {
    const auto fields = qrom::data::synth_series(kind, 16, 16, {}, 10);
    const auto split = qrom::data::partition(fields, qrom::data::Strategy::minimal_class, 0.8, 0);
    SplitStates s;
    for (const auto& f : split.train) s.train.push_back(qrom::data::encode(f).state);
    for (const auto& f : split.test) s.test.push_back(qrom::data::encode(f).state);
    return s;
}

Outcome criterion_1() {
    const int qft_widths[] = {1, 2, 3, 6};
    const int qdct_widths[] = {1, 2, 3};
    return from_checks({qrom::validation::check_qft_dft(qft_widths, 1e-10),
                        qrom::validation::check_qdct_dct(qdct_widths, 1e-8)});
}

Outcome criterion_2() {
    // n = 4 data qubits as one axis and as two axes of two.
    return from_checks({qrom::validation::check_estimator_exact(4, 1, 8, 1e-12),
                        qrom::validation::check_estimator_exact(2, 2, 8, 1e-12),
                        qrom::validation::check_estimator_sampled(4, 1, 8, 100000, 20, 4.0, 0.99)});
}

Outcome criterion_3() {
    return from_checks({qrom::validation::check_lcu(100, 11, 1e-10), qrom::validation::check_swap(1000, 12, 1e-12)});
}

Outcome criterion_4() { return from_checks({qrom::validation::check_solver(100, 16, 13, 1e-10)}); }

Outcome criterion_5() {
    Outcome o{true, {}, {}};
    qrom::train::TrainConfig cfg;
    cfg.lambda = 0.0;
    const auto model = qrom::opqnn::structured_model(Family::qdct, 4, 2);
    double worst_drop = 0.0;
    for (auto kind : kKinds) {
        const auto s = synthetic_split(kind);
        double prev = -1.0;
        std::string curve;
        for (std::size_t m = 2; m <= 18; ++m) {
            cfg.m = m;
            const double f = qrom::train::score_reconstruction(model, s.test, cfg).mean_fidelity();
            worst_drop = std::max(worst_drop, prev - f);
            // Rounding in the exact solve is far below this slack.
            if (f < prev - 1e-12) o.passed = false;
            prev = f;
            if (m == 2 || m == 10 || m == 18) curve += " m" + std::to_string(m) + "=" + fixed(f, 6);
        }
        o.notes.push_back(std::string(qrom::data::to_string(kind)) + curve);
    }
    o.detail = "largest drop between consecutive orders " + sci(std::max(worst_drop, 0.0)) + " (tol 1e-12)";
    return o;
}

Outcome criterion_6() {
    Outcome o{true, {}, {}};
    int cells = 0;
    int failures = 0;
    std::string failing;
    for (auto kind : kKinds) {
        const auto s = synthetic_split(kind);
        for (std::size_t m : {2, 6, 10, 14, 18}) {
            qrom::train::TrainConfig cfg;
            cfg.m = m;
            const auto loss = [&](const qrom::opqnn::OpqnnModel& mdl) {
                return qrom::train::score_reconstruction(mdl, s.train, cfg).mean_loss();
            };
            for (auto fam : {Family::qft, Family::qdct}) {
                const double structured = loss(qrom::opqnn::structured_model(fam, 4, 2));
                const int depth = qrom::opqnn::matched_ansatz_depth(qrom::opqnn::param_count(fam, 4), 4);
                double random = 0.0;
                double ansatz = 0.0;
                for (std::uint64_t seed = 0; seed < 5; ++seed) {
                    random += loss(qrom::opqnn::random_model(fam, 4, 2, seed)) / 5.0;
                    ansatz += loss(qrom::opqnn::random_model(Family::ansatz, 4, 2, seed, depth)) / 5.0;
                }
                ++cells;
                const bool ok = structured <= random && structured <= ansatz;
                if (!ok) {
                    ++failures;
                    o.passed = false;
                    failing += std::string(" ") + qrom::data::to_string(kind) + "/" + qrom::opqnn::to_string(fam) +
                               "/m" + std::to_string(m) + "(structured " + fixed(structured) + " random " +
                               fixed(random) + " ansatz " + fixed(ansatz) + ")";
                }
                o.notes.push_back(std::string(qrom::data::to_string(kind)) + " " + qrom::opqnn::to_string(fam) +
                                  " m=" + std::to_string(m) + " structured=" + fixed(structured) +
                                  " random_mean=" + fixed(random) + " ansatz_mean=" + fixed(ansatz) +
                                  (ok ? "" : "  <-- violates"));
            }
        }
    }
    o.detail = std::to_string(cells - failures) + "/" + std::to_string(cells) + " cells hold";
    if (failures > 0) o.detail += "; failing:" + failing;
    return o;
}

Outcome criterion_7() {
    Outcome o{true, {}, {}};
    qrom::train::TrainConfig cfg;
    cfg.m = 8;
    const double want[] = {0.001, 0.0001, 0.00001};
    bool schedule_ok = true;
    for (int e = 0; e < 75; ++e) schedule_ok = schedule_ok && qrom::train::lr_at(e, cfg) == want[e / 25];
    o.passed = schedule_ok;
    o.detail = std::string("schedule ") + (schedule_ok ? "exact" : "WRONG");
    // Smooth sets: the recirculation cell, the channel profile, and the wake.
    // The dam front is a sharp tanh step and is reported for information.
    int runs = 0;
    int held = 0;
    for (auto kind : kKinds) {
        const bool smooth = kind != qrom::data::SynthKind::dam_front;
        const auto s = synthetic_split(kind);
        for (auto fam : {Family::qft, Family::qdct}) {
            const auto r = qrom::train::train_reconstruction(qrom::opqnn::structured_model(fam, 4, 2), s.train,
                                                             s.test, cfg);
            const double before = r.history.initial_test_metric;
            const double after = r.history.epochs.back().test_metric;
            const bool ok = after >= before;
            if (smooth) {
                ++runs;
                held += ok;
                o.passed = o.passed && ok;
            }
            o.notes.push_back(std::string(qrom::data::to_string(kind)) + " " + qrom::opqnn::to_string(fam) +
                              " test fidelity " + fixed(before, 8) + " -> " + fixed(after, 8) +
                              (smooth ? "" : " (not a smooth set, information only)") +
                              (ok ? "" : "  <-- degraded"));
        }
    }
    o.detail += "; " + std::to_string(held) + "/" + std::to_string(runs) + " smooth-set runs keep test fidelity";
    return o;
}

Outcome criterion_8() {
    Outcome o{true, {}, {}};
    const auto set = qrom::classify::synthetic_class_set(16, 4, 12);
    const auto split = qrom::classify::stratified_split(set, 0.8, 0);
    qrom::train::TrainConfig cfg;
    cfg.m = 6;
    cfg.batch_size = 4;
    const auto mode = qrom::classify::FeatureMode::split_complex;
    const int f = static_cast<int>(qrom::classify::feature_count(cfg.m, mode));
    const auto model = qrom::opqnn::structured_model(Family::qft, 4, 2);
    const auto fc = qrom::classify::random_fc(f, 4, 1, 0.1);
    const auto budget = qrom::classify::parameter_budget(model, fc);
    const auto r = qrom::train::train_classifier(model, fc, split.train, split.test, cfg, {mode, false});
    const double acc = r.history.epochs.back().test_metric;
    o.passed = budget <= 64 && acc >= 0.95;

    // Baseline: the same number of real features from a Chebyshev fit.
    std::vector<int> train_labels;
    std::vector<int> test_labels;
    std::vector<qrom::classify::FeatureVector> train_f;
    std::vector<qrom::classify::FeatureVector> test_f;
    const auto basis = qrom::baseline::cheb_basis(16, 16, static_cast<std::size_t>(f));
    for (const auto& x : split.train) {
        train_f.push_back(qrom::baseline::cheb_fit(x.field, basis).coefficients);
        train_labels.push_back(x.label);
    }
    for (const auto& x : split.test) {
        test_f.push_back(qrom::baseline::cheb_fit(x.field, basis).coefficients);
        test_labels.push_back(x.label);
    }
    const auto base = qrom::train::fit_fc(qrom::classify::random_fc(f, 4, 1, 0.1), train_f, train_labels, test_f,
                                          test_labels, cfg);
    o.detail = "qft accuracy=" + fixed(acc) + " (>= 0.95) budget=" + std::to_string(budget) +
               " (<= 64); chebyshev+fc accuracy=" + fixed(base.history.epochs.back().test_metric) +
               " budget=" + std::to_string(base.fc.param_count());
    o.notes.push_back("train=" + std::to_string(split.train.size()) + " test=" + std::to_string(split.test.size()) +
                      " m=6 split_complex features=" + std::to_string(f) + " batch=4 epochs=75");
    return o;
}

Outcome criterion_9() { return from_checks({qrom::validation::check_gradients(1e-5, 1e-3)}); }

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = qrom::cli::run(args, out, err);
    if (out_text != nullptr) *out_text = out.str() + err.str();
    return code;
}

Outcome criterion_10() {
    Outcome o{true, {}, {}};
    const fs::path dir = fs::temp_directory_path() / "qrom_acceptance_reruns";
    fs::remove_all(dir);
    std::string text;
    const int validate = cli({"validate"}, &text);
    o.passed = validate == qrom::cli::kExitOk;
    o.detail = "validate exit " + std::to_string(validate);
    const std::vector<std::vector<std::string>> runs{
        {"reconstruct", "--kind", "tube", "--family", "qdct", "--m", "8", "--epochs", "5"},
        {"reconstruct", "--kind", "cylinder", "--family", "qft", "--init", "random", "--seed", "4", "--m", "6",
         "--epochs", "3", "--route", "circuit"},
        {"reconstruct", "--kind", "dam", "--family", "chebyshev", "--m", "10"},
        {"sweep", "--kind", "cavity", "--grid", "8", "--families", "qft,qdct,ansatz,chebyshev", "--m-range", "2..10",
         "--m-step", "4", "--seeds", "3", "--epochs", "2"},
        {"classify", "--grid", "8", "--conditions", "2", "--steps", "6", "--m", "4", "--epochs", "5"},
        {"synth", "--kind", "all", "--grid", "8", "--steps", "2"},
    };
    int reproduced = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto args = runs[i];
        const auto out = dir / ("run" + std::to_string(i));
        args.insert(args.end(), {"--out", out.string()});
        const int first = cli(args);
        const int again = cli({"rerun", "--manifest", (out / "manifest.json").string()}, &text);
        const bool ok = first == qrom::cli::kExitOk && again == qrom::cli::kExitOk;
        reproduced += ok;
        o.passed = o.passed && ok;
        const auto summary = text.substr(text.rfind('\n', text.size() - 2) + 1);
        o.notes.push_back(args[0] + " run" + std::to_string(i) + ": " + (ok ? "" : "NOT reproduced, ") +
                          summary.substr(0, summary.find('\n')));
    }
    o.detail += "; " + std::to_string(reproduced) + "/" + std::to_string(runs.size()) +
                " manifests rerun bitwise-identical";
    fs::remove_all(dir);
    return o;
}

struct Criterion {
    int id;
    const char* title;
    double limit_s;  ///< 0 when the criterion states no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    bool report_only = false;
    bool verbose = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--report-only") report_only = true;
        if (a == "--verbose") verbose = true;
    }
    const std::vector<Criterion> criteria{
        {1, "canonical circuits equal DFT / DCT-II", 5.0, criterion_1},
        {2, "Hadamard estimators: exact equality, sampled 4-sigma", 30.0, criterion_2},
        {3, "LCU output and SWAP-test fidelity", 30.0, criterion_3},
        {4, "regularized solver vs dense inverse", 0.0, criterion_4},
        {5, "QDCT fidelity non-decreasing in m", 120.0, criterion_5},
        {6, "structured init has the lowest initial loss", 600.0, criterion_6},
        {7, "step-decay schedule and non-degrading training", 900.0, criterion_7},
        {8, "QFT + FC classification within 64 parameters", 600.0, criterion_8},
        {9, "finite differences vs parameter shift", 0.0, criterion_9},
        {10, "validate passes and manifests rerun bitwise", 0.0, criterion_10},
    };
    int failed = 0;
    try {
        for (const auto& c : criteria) {
            const auto start = std::chrono::steady_clock::now();
            auto o = c.run();
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const bool in_time = c.limit_s <= 0.0 || secs < c.limit_s;
            const bool ok = o.passed && in_time;
            failed += !ok;
            std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": " << c.title << " | " << o.detail
                      << " | " << fixed(secs, 2) << " s";
            if (c.limit_s > 0.0) std::cout << " (limit " << fixed(c.limit_s, 0) << " s)";
            std::cout << '\n';
            if (verbose || !ok) {
                for (const auto& n : o.notes) std::cout << "    " << n << '\n';
            }
            std::cout.flush();
        }
    } catch (const std::exception& e) {
        std::cout << "[ERROR] unexpected exception: " << e.what() << '\n';
        return 2;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria pass\n";
    if (report_only) return 0;
    return failed == 0 ? 0 : 1;
}
