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

#include "qrom/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrom/baseline.hpp"
#include "qrom/classify.hpp"
#include "qrom/data.hpp"
#include "qrom/errors.hpp"
#include "qrom/opqnn.hpp"
#include "qrom/parallel.hpp"
#include "qrom/projection.hpp"
#include "qrom/recon.hpp"
#include "qrom/train.hpp"
#include "qrom/validation.hpp"

namespace qrom::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using opqnn::Family;

/// A flag combination that parsed but makes no sense.
class FlagError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or unusable input data.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A check the command itself performs failed (validate, rerun).
class CheckFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr int kManifestSchemaVersion = 1;
constexpr const char* kManifestName = "manifest.json";

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

/// Sample standard deviation; 0 for a single value.
double std_of(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// --- run session and manifest ---------------------------------------------

/// Collects the outputs of one command and writes its manifest.
class Session {
public:
    Session(std::string command, std::vector<std::string> argv, fs::path out_dir)
        : command_(std::move(command)), argv_(std::move(argv)), out_dir_(std::move(out_dir)), started_(utc_now()) {}

    [[nodiscard]] const fs::path& dir() const noexcept { return out_dir_; }

    void write(const std::string& relative, const std::string& bytes) {
        data::write_file_atomically(out_dir_ / relative, bytes);
        record(relative);
    }
    void record(const std::string& relative) {
        std::lock_guard lock(mutex_);
        outputs_.push_back(relative);
    }

    json flags = json::object();
    json config = json::object();
    std::optional<std::uint64_t> seed;

    void write_manifest() const {
        json m;
        m["schema_version"] = kManifestSchemaVersion;
        m["artifact_version"] = kArtifactVersion;
        m["csv_schema_version"] = kCsvSchemaVersion;
        m["command"] = command_;
        m["argv"] = argv_;
        m["flags"] = flags;
        m["config"] = config;
        if (seed) m["seed"] = *seed;
        m["workers"] = worker_count();
        m["started_utc"] = started_;
        m["finished_utc"] = utc_now();
        auto outputs = outputs_;
        std::sort(outputs.begin(), outputs.end());
        m["outputs"] = outputs;
        data::write_file_atomically(out_dir_ / kManifestName, m.dump(2) + "\n");
    }

private:
    std::string command_;
    std::vector<std::string> argv_;
    fs::path out_dir_;
    std::string started_;
    std::mutex mutex_;
    std::vector<std::string> outputs_;
};

json train_config_json(const train::TrainConfig& c) {
    json j;
    j["epochs"] = c.epochs;
    j["base_lr"] = c.base_lr;
    j["decay_factor"] = c.decay_factor;
    j["decay_period_epochs"] = c.decay_period_epochs;
    j["fd_epsilon"] = c.fd_epsilon;
    j["lambda"] = c.lambda;
    j["m"] = c.m;
    j["seed"] = c.seed;
    j["ordering"] = opqnn::to_string(c.ordering);
    j["inner"] = projection::to_string(c.inner);
    j["batch_size"] = c.batch_size;
    j["record_wall_time"] = c.record_wall_time;
    j["adam"] = {{"beta1", train::kAdamBeta1}, {"beta2", train::kAdamBeta2}, {"eps_hat", train::kAdamEpsHat}};
    return j;
}

json estimator_json(const projection::EstimatorConfig& e) {
    return {{"mode", projection::to_string(e.mode)},
            {"shots", e.shots},
            {"seed", e.seed},
            {"inner", projection::to_string(e.inner)}};
}

/// Every option of the parsed subcommand except help/config/out, as the
/// string that was given (last wins) or its default.
json resolved_flags(const CLI::App& sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || name == "out") continue;
        std::string value = opt->get_default_str();
        if (opt->count() > 0) {
            const auto r = opt->reduced_results();
            if (!r.empty()) value = r.back();
        }
        if (name == "data" && !value.empty()) value = fs::absolute(value).lexically_normal().string();
        j[name] = value;
    }
    return j;
}

// --- data selection -------------------------------------------------------

struct DataFlags {
    std::string data;
    std::string kind;
    int grid = 16;
    int steps = 10;
    int conditions = 1;
    std::string component = "u";
    std::string flow_type;
    std::string condition;
    std::string strategy = "minimal_class";
    double split = data::kDefaultSplitRatio;
};

const std::vector<std::string> kKindNames{"all", "cavity", "tube", "dam", "cylinder", "cavity_vortex", "tube_profile",
                                          "dam_front", "cylinder_wake"};

void add_data_flags(CLI::App* app, DataFlags& f) {
    app->add_option("--data", f.data, "Dataset directory, or a single .ffd / .csv grid");
    app->add_option("--kind", f.kind, "Synthesize this kind instead of loading --data")
        ->check(CLI::IsMember(kKindNames));
    app->add_option("--grid", f.grid, "Synthetic grid side (power of two)")->check(CLI::Range(2, 64));
    app->add_option("--steps", f.steps, "Synthetic time steps per condition")->check(CLI::Range(1, 100000));
    app->add_option("--conditions", f.conditions, "Synthetic conditions per kind")->check(CLI::Range(1, 1000));
    app->add_option("--component", f.component, "Velocity component")->check(CLI::IsMember({"u", "v"}));
    app->add_option("--flow-type", f.flow_type, "Restrict the partition to one flow type");
    app->add_option("--condition", f.condition, "Restrict the partition to one condition");
    app->add_option("--strategy", f.strategy, "Partition strategy")
        ->check(CLI::IsMember({"minimal_class", "comprehensive"}));
    app->add_option("--split", f.split, "Training fraction")->check(CLI::Range(0.0, 1.0));
}

std::vector<data::SynthKind> kinds_of(const std::string& name) {
    if (name == "all") {
        return {data::SynthKind::cavity_vortex, data::SynthKind::tube_profile, data::SynthKind::dam_front,
                data::SynthKind::cylinder_wake};
    }
    return {data::synth_kind_from_string(name)};
}

std::vector<data::FlowField> synthesize(const std::string& kind, int grid, int steps, int conditions,
                                        data::Component component) {
    if (!data::is_power_of_two(grid)) throw FlagError("--grid must be a power of two");
    std::vector<data::FlowField> out;
    for (auto k : kinds_of(kind)) {
        for (const auto& p : data::condition_sweep(k, conditions)) {
            auto series = data::synth_series(k, grid, grid, p, steps, component);
            std::move(series.begin(), series.end(), std::back_inserter(out));
        }
    }
    return out;
}

std::vector<data::FlowField> load_fields(const DataFlags& f) {
    const auto component = data::component_from_string(f.component);
    if (!f.data.empty() && !f.kind.empty()) throw FlagError("--data and --kind are mutually exclusive");
    if (f.data.empty()) {
        if (f.kind.empty()) throw FlagError("one of --data or --kind is required");
        return synthesize(f.kind, f.grid, f.steps, f.conditions, component);
    }
    const fs::path path = f.data;
    if (!fs::exists(path)) throw InputError("data path does not exist: " + path.string());
    std::vector<data::FlowField> fields;
    if (fs::is_directory(path)) {
        fields = data::load_dataset(path);
    } else if (path.extension() == ".ffd") {
        fields.push_back(data::load_grid(path));
    } else if (path.extension() == ".csv") {
        fields.push_back(data::load_csv(path));
        fields.back().component = component;
    } else {
        throw InputError("unsupported data file (expected .ffd or .csv): " + path.string());
    }
    std::erase_if(fields, [&](const data::FlowField& x) { return x.component != component; });
    if (fields.empty()) throw InputError("no " + f.component + "-component samples under " + path.string());
    return fields;
}

data::DatasetSplit split_fields(const std::vector<data::FlowField>& fields, const DataFlags& f, std::uint64_t seed) {
    data::DatasetSplit split;
    split.strategy = data::strategy_from_string(f.strategy);
    split.split_ratio = f.split;
    split.seed = seed;
    if (fields.size() == 1) {
        // A lone sample is both the training and the evaluation set.
        split.train = fields;
        split.test = fields;
        return split;
    }
    try {
        return data::partition(fields, split.strategy, f.split, seed,
                               {f.flow_type, f.condition, data::component_from_string(f.component)});
    } catch (const DomainError& e) {
        throw InputError(std::string("cannot partition the data: ") + e.what());
    }
}

json data_json(const DataFlags& f, const data::DatasetSplit& split) {
    json j;
    if (!f.data.empty()) {
        j["source"] = f.data;
    } else {
        j["source"] = "synthetic";
        j["kind"] = f.kind;
        j["grid"] = f.grid;
        j["steps"] = f.steps;
        j["conditions"] = f.conditions;
    }
    j["component"] = f.component;
    j["strategy"] = data::to_string(split.strategy);
    j["split"] = split.split_ratio;
    j["train_samples"] = split.train.size();
    j["test_samples"] = split.test.size();
    return j;
}

/// Qubits per axis of a square power-of-two grid.
int square_qubits(const data::FlowField& field) {
    if (field.height != field.width || !data::is_power_of_two(field.height) || field.height < 2) {
        throw ShapeError("circuit families need a square power-of-two grid, got " + std::to_string(field.height) +
                         "x" + std::to_string(field.width));
    }
    return data::log2_exact(field.height);
}

std::vector<qsim::StateVector> states_of(std::span<const data::FlowField> fields) {
    std::vector<qsim::StateVector> out;
    out.reserve(fields.size());
    for (const auto& f : fields) out.push_back(data::encode(f).state);
    return out;
}

// --- model and training flags ---------------------------------------------

struct TrainFlags {
    std::size_t m = 8;
    std::string init = "structured";
    int depth = 0;
    std::string match = "qft";
    std::uint64_t seed = 0;
    int epochs = 75;
    double lr = 1e-3;
    double decay = 0.1;
    int decay_period = 25;
    double fd_eps = 1e-4;
    double lambda = projection::kDefaultLambda;
    std::string ordering = "diagonal";
    std::string inner = "sesquilinear";
    std::size_t batch = 0;
    bool record_time = false;
};

void add_train_flags(CLI::App* app, TrainFlags& f, bool with_m = true) {
    if (with_m) app->add_option("--m", f.m, "Reconstruction order")->check(CLI::Range(1, 1 << 20));
    app->add_option("--init", f.init, "Parameter initialization")->check(CLI::IsMember({"structured", "random"}));
    app->add_option("--depth", f.depth, "Ansatz depth; 0 matches the --match family's parameter count")
        ->check(CLI::Range(0, 1000));
    app->add_option("--match", f.match, "Family the ansatz depth is matched to")
        ->check(CLI::IsMember({"qft", "qdct"}));
    app->add_option("--seed", f.seed, "Seed for random initialization, shuffles, and sampling");
    app->add_option("--epochs", f.epochs, "Training epochs; 0 evaluates without training")
        ->check(CLI::Range(0, 1000000));
    app->add_option("--lr", f.lr, "Base learning rate")->check(CLI::PositiveNumber);
    app->add_option("--decay", f.decay, "Learning-rate decay factor")->check(CLI::Range(0.0, 1.0));
    app->add_option("--decay-period", f.decay_period, "Epochs per decay step")->check(CLI::Range(1, 1000000));
    app->add_option("--fd-eps", f.fd_eps, "Central finite-difference step")->check(CLI::PositiveNumber);
    app->add_option("--lambda", f.lambda, "Tikhonov regularization")->check(CLI::NonNegativeNumber);
    app->add_option("--ordering", f.ordering, "Basis ordering")->check(CLI::IsMember({"natural", "diagonal"}));
    app->add_option("--inner", f.inner, "Inner product")->check(CLI::IsMember({"sesquilinear", "bilinear"}));
    app->add_option("--batch", f.batch, "Samples per Adam step; 0 is the full set");
    app->add_option("--record-time", f.record_time, "Record wall-clock times (breaks bitwise reruns)");
}

train::TrainConfig train_config(const TrainFlags& f, std::size_t m) {
    train::TrainConfig c;
    c.epochs = std::max(f.epochs, 1);
    c.base_lr = f.lr;
    c.decay_factor = f.decay;
    c.decay_period_epochs = f.decay_period;
    c.fd_epsilon = f.fd_eps;
    c.lambda = f.lambda;
    c.m = m;
    c.seed = f.seed;
    c.ordering = opqnn::ordering_from_string(f.ordering);
    c.inner = projection::inner_product_from_string(f.inner);
    c.batch_size = f.batch;
    c.record_wall_time = f.record_time;
    c.validate();
    c.epochs = f.epochs;
    return c;
}

bool is_circuit_family(const std::string& name) { return name == "qft" || name == "qdct" || name == "ansatz"; }

opqnn::OpqnnModel build_model(Family family, bool structured, int n, std::uint64_t seed, const TrainFlags& f) {
    if (family == Family::ansatz) {
        if (structured) throw FlagError("the ansatz has no structured initialization; use --init random");
        const int depth = f.depth > 0 ? f.depth
                                      : opqnn::matched_ansatz_depth(
                                            opqnn::param_count(opqnn::family_from_string(f.match), n), n);
        return opqnn::random_model(family, n, 2, seed, depth);
    }
    return structured ? opqnn::structured_model(family, n, 2) : opqnn::random_model(family, n, 2, seed);
}

void check_order(std::size_t m, std::size_t dim) {
    if (m > dim) {
        throw FlagError("reconstruction order " + std::to_string(m) + " exceeds the " + std::to_string(dim) +
                        " available basis columns");
    }
}

struct FitOutcome {
    opqnn::OpqnnModel model;
    train::TrainHistory history;
    double final_test_fidelity = 0.0;
};

/// Trains for cfg.epochs (0 only scores the initial parameters).
FitOutcome fit_model(opqnn::OpqnnModel model, std::span<const qsim::StateVector> train_set,
                     std::span<const qsim::StateVector> test_set, const train::TrainConfig& cfg) {
    if (cfg.epochs > 0) {
        auto r = train::train_reconstruction(std::move(model), train_set, test_set, cfg);
        const double final_fid = r.history.epochs.back().test_metric;
        return {std::move(r.model), std::move(r.history), final_fid};
    }
    FitOutcome out{std::move(model), {}, 0.0};
    const auto tr = train::score_reconstruction(out.model, train_set, cfg);
    const auto te = train::score_reconstruction(out.model, test_set, cfg);
    out.history.initial_train_loss = tr.mean_loss();
    out.history.final_train_loss = out.history.initial_train_loss;
    out.history.initial_test_metric = te.mean_fidelity();
    out.history.skipped_samples = tr.failures.size() + te.failures.size();
    out.final_test_fidelity = out.history.initial_test_metric;
    return out;
}

// --- synth -----------------------------------------------------------------

struct SynthFlags {
    std::string kind = "all";
    int grid = 16;
    int steps = 10;
    int conditions = 1;
    std::string component = "u";
};

void cmd_synth(const SynthFlags& f, Session& s, std::ostream& out) {
    std::vector<data::FlowField> fields;
    const std::vector<std::string> comps = f.component == "both" ? std::vector<std::string>{"u", "v"}
                                                                 : std::vector<std::string>{f.component};
    for (const auto& c : comps) {
        auto part = synthesize(f.kind, f.grid, f.steps, f.conditions, data::component_from_string(c));
        std::move(part.begin(), part.end(), std::back_inserter(fields));
    }
    std::ostringstream index;
    index << "path,flow_type,condition,component,time_index,height,width\n";
    for (const auto& field : fields) {
        const auto path = data::dataset_path(s.dir(), field);
        data::save_grid(field, path);
        const auto rel = fs::relative(path, s.dir()).generic_string();
        s.record(rel);
        index << rel << ',' << field.flow_type << ',' << field.condition << ',' << data::to_string(field.component)
              << ',' << field.time_index << ',' << field.height << ',' << field.width << '\n';
    }
    s.write("index.csv", index.str());
    out << "wrote " << fields.size() << " fields to " << s.dir().string() << '\n';
}

// --- reconstruct ------------------------------------------------------------

struct ReconstructFlags {
    std::string family = "qft";
    DataFlags data;
    TrainFlags train;
    std::string route = "direct";
    std::string estimator = "exact";
    std::uint64_t shots = 100000;
};

struct SampleEval {
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    double mse = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> reconstruction;
    std::string error;
};

json sample_json(const data::FlowField& f, const SampleEval& e) {
    json j;
    j["flow_type"] = f.flow_type;
    j["condition"] = f.condition;
    j["component"] = data::to_string(f.component);
    j["time_index"] = f.time_index;
    if (e.error.empty()) {
        j["fidelity"] = e.fidelity;
        j["mse"] = e.mse;
    } else {
        j["error"] = e.error;
    }
    return j;
}

/// Final evaluation of one test field through the direct or the circuit route.
SampleEval evaluate_sample(const opqnn::OpqnnModel& model, const data::FlowField& field, const train::TrainConfig& cfg,
                           bool circuit_route, const projection::EstimatorConfig& est) {
    SampleEval e;
    try {
        const auto enc = data::encode(field);
        const auto psi = enc.state.amplitudes();
        const auto a = opqnn::basis_matrix(model, cfg.m, cfg.ordering);
        Eigen::VectorXcd x;
        if (circuit_route) {
            const auto g = projection::estimate_gram(model, cfg.m, cfg.ordering, est);
            const auto b = projection::estimate_cross(model, recon::amplitude_encode(psi), cfg.m, cfg.ordering, est);
            x = projection::tikhonov_solve(g, b, cfg.lambda).x;
            const auto lcu = recon::lcu_reconstruct(model, x, cfg.ordering);
            e.fidelity = recon::swap_test(enc.state, lcu.state, est).fidelity;
        } else {
            x = projection::project(a, psi, cfg.lambda, cfg.inner).coefficients.x;
            e.fidelity = recon::direct_fidelity(psi, a, x);
        }
        const Eigen::VectorXcd ax = recon::combine(a, x);
        e.reconstruction.resize(static_cast<std::size_t>(ax.size()));
        for (Eigen::Index i = 0; i < ax.size(); ++i) e.reconstruction[static_cast<std::size_t>(i)] = enc.norm * ax(i).real();
        e.mse = recon::mse(e.reconstruction, field.values);
    } catch (const SingularSystemError& ex) {
        e.error = ex.what();
    } catch (const DegenerateReconstructionError& ex) {
        e.error = ex.what();
    } catch (const NumericalError& ex) {
        e.error = ex.what();
    } catch (const EstimationError& ex) {
        e.error = ex.what();
    }
    return e;
}

void summarize(json& metrics, std::span<const SampleEval> evals) {
    std::vector<double> fid;
    std::vector<double> mse;
    for (const auto& e : evals) {
        if (!e.error.empty()) continue;
        fid.push_back(e.fidelity);
        mse.push_back(e.mse);
    }
    if (fid.empty()) throw DegenerateReconstructionError("every test sample failed to reconstruct");
    metrics["fidelity"] = mean_of(fid);
    metrics["fidelity_std"] = std_of(fid);
    metrics["mse"] = mean_of(mse);
    metrics["failed_samples"] = evals.size() - fid.size();
}

void cmd_reconstruct(const ReconstructFlags& f, Session& s, std::ostream& out) {
    const auto fields = load_fields(f.data);
    const auto split = split_fields(fields, f.data, f.train.seed);
    const auto cfg = train_config(f.train, f.train.m);
    s.seed = f.train.seed;

    json metrics;
    metrics["schema_version"] = kCsvSchemaVersion;
    metrics["artifact_version"] = kArtifactVersion;
    metrics["family"] = f.family;
    metrics["m"] = cfg.m;
    metrics["data"] = data_json(f.data, split);

    std::vector<SampleEval> evals;
    if (f.family == "chebyshev") {
        const auto& first = split.test.front();
        check_order(cfg.m, static_cast<std::size_t>(first.height) * static_cast<std::size_t>(first.width));
        s.config["lambda"] = cfg.lambda;
        s.config["ordering"] = opqnn::to_string(cfg.ordering);
        std::ostringstream fits;
        fits << "flow_type,condition,component,time_index,fidelity,residual,mse\n";
        std::optional<baseline::ChebBasis> basis;
        for (const auto& field : split.test) {
            if (!basis || basis->height != field.height || basis->width != field.width) {
                basis = baseline::cheb_basis(field.height, field.width, cfg.m, cfg.ordering);
            }
            const auto fit = baseline::cheb_fit(field, *basis, cfg.lambda);
            SampleEval e;
            e.fidelity = fit.fidelity;
            e.reconstruction = fit.reconstruction;
            e.mse = recon::mse(fit.reconstruction, field.values);
            fits << field.flow_type << ',' << field.condition << ',' << data::to_string(field.component) << ','
                 << field.time_index << ',' << fmt(e.fidelity) << ',' << fmt(fit.residual) << ',' << fmt(e.mse) << '\n';
            evals.push_back(std::move(e));
        }
        s.write("fits.csv", fits.str());
        metrics["train_samples"] = 0;
        metrics["test_samples"] = split.test.size();
    } else {
        const auto family = opqnn::family_from_string(f.family);
        const int n = square_qubits(split.train.front());
        for (const auto& field : split.test) square_qubits(field);
        check_order(cfg.m, std::size_t{1} << (2 * n));
        const bool circuit_route = f.route == "circuit";
        projection::EstimatorConfig est;
        est.mode = projection::estimator_mode_from_string(f.estimator);
        est.shots = f.shots;
        est.seed = f.train.seed;
        est.inner = cfg.inner;
        s.config["train"] = train_config_json(cfg);
        s.config["estimator"] = estimator_json(est);
        s.config["route"] = f.route;

        auto model = build_model(family, f.train.init == "structured", n, f.train.seed, f.train);
        const auto train_states = states_of(split.train);
        const auto test_states = states_of(split.test);
        auto fit = fit_model(std::move(model), train_states, test_states, cfg);
        s.write("history.csv", fit.history.to_csv());

        std::ostringstream params;
        params << "index,theta\n";
        for (std::size_t i = 0; i < fit.model.params.size(); ++i) params << i << ',' << fmt(fit.model.params[i]) << '\n';
        s.write("params.csv", params.str());

        evals.resize(split.test.size());
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            evals[i] = evaluate_sample(fit.model, split.test[i], cfg, circuit_route, est);
        }
        metrics["init"] = f.train.init;
        metrics["route"] = f.route;
        metrics["estimator"] = estimator_json(est);
        metrics["circuit_params"] = fit.model.params.size();
        if (family == Family::ansatz) metrics["ansatz_depth"] = fit.model.ansatz_depth;
        metrics["epochs"] = cfg.epochs;
        metrics["train_samples"] = split.train.size();
        metrics["test_samples"] = split.test.size();
        metrics["initial_train_loss"] = fit.history.initial_train_loss;
        metrics["final_train_loss"] = fit.history.final_train_loss;
        metrics["initial_test_fidelity"] = fit.history.initial_test_metric;
        metrics["skipped_samples"] = fit.history.skipped_samples;
    }
    summarize(metrics, evals);
    json samples = json::array();
    for (std::size_t i = 0; i < evals.size(); ++i) samples.push_back(sample_json(split.test[i], evals[i]));
    metrics["samples"] = samples;
    s.write("metrics.json", metrics.dump(2) + "\n");

    for (std::size_t i = 0; i < evals.size(); ++i) {
        if (!evals[i].error.empty()) continue;
        const auto& field = split.test[i];
        data::save_csv(evals[i].reconstruction, field.height, field.width, s.dir() / "reconstruction.csv");
        s.record("reconstruction.csv");
        break;
    }
    out << f.family << " m=" << cfg.m << " test_fidelity=" << fmt(metrics["fidelity"].get<double>())
        << " mse=" << fmt(metrics["mse"].get<double>()) << '\n';
}

// --- sweep -----------------------------------------------------------------

struct SweepFlags {
    std::string families = "qft,qdct";
    std::string inits = "structured,random";
    std::string m_range = "2..18";
    std::size_t m_step = 1;
    int seeds = 5;
    DataFlags data;
    TrainFlags train;
};

struct Cell {
    std::string family;
    std::string init;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::size_t circuit_params = 0;
    double initial_train_loss = 0.0;
    double initial_test_fidelity = 0.0;
    double final_train_loss = 0.0;
    double final_test_fidelity = 0.0;
    std::size_t skipped = 0;
};

constexpr const char* kCellHeader =
    "family,init,m,seed,circuit_params,initial_train_loss,initial_test_fidelity,final_train_loss,"
    "final_test_fidelity,skipped_samples\n";

std::string cell_row(const Cell& c) {
    std::ostringstream o;
    o << c.family << ',' << c.init << ',' << c.m << ',' << c.seed << ',' << c.circuit_params << ','
      << fmt(c.initial_train_loss) << ',' << fmt(c.initial_test_fidelity) << ',' << fmt(c.final_train_loss) << ','
      << fmt(c.final_test_fidelity) << ',' << c.skipped << '\n';
    return o.str();
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& r) {
    const auto dots = r.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = std::stoul(r);
            return {v, v};
        }
        return {std::stoul(r.substr(0, dots)), std::stoul(r.substr(dots + 2))};
    } catch (const std::exception&) {
        throw FlagError("--m-range must look like 2..18, got '" + r + "'");
    }
}

void cmd_sweep(const SweepFlags& f, Session& s, std::ostream& out) {
    const auto families = split_list(f.families);
    const auto inits = split_list(f.inits);
    if (families.empty()) throw FlagError("--families is empty");
    for (const auto& fam : families) {
        if (!is_circuit_family(fam) && fam != "chebyshev") throw FlagError("unknown family '" + fam + "'");
    }
    for (const auto& init : inits) {
        if (init != "structured" && init != "random") throw FlagError("unknown init '" + init + "'");
    }
    const auto [m_lo, m_hi] = parse_range(f.m_range);
    if (m_lo < 1 || m_hi < m_lo || f.m_step < 1) throw FlagError("--m-range needs 1 <= lo <= hi and --m-step >= 1");
    if (f.seeds < 1) throw FlagError("--seeds must be >= 1");
    std::vector<std::size_t> orders;
    for (std::size_t m = m_lo; m <= m_hi; m += f.m_step) orders.push_back(m);

    const auto fields = load_fields(f.data);
    const auto split = split_fields(fields, f.data, f.train.seed);
    const auto base_cfg = train_config(f.train, m_hi);
    s.seed = f.train.seed;
    s.config["train"] = train_config_json(base_cfg);
    s.config["data"] = data_json(f.data, split);

    const auto& probe = split.train.front();
    check_order(m_hi, static_cast<std::size_t>(probe.height) * static_cast<std::size_t>(probe.width));
    const bool any_circuit = std::any_of(families.begin(), families.end(), is_circuit_family);
    const int n = any_circuit ? square_qubits(probe) : 0;
    const auto train_states = any_circuit ? states_of(split.train) : std::vector<qsim::StateVector>{};
    const auto test_states = any_circuit ? states_of(split.test) : std::vector<qsim::StateVector>{};

    std::vector<Cell> cells;
    for (const auto& fam : families) {
        for (std::size_t m : orders) {
            if (fam == "chebyshev") {
                cells.push_back({fam, "fit", m, f.train.seed});
                continue;
            }
            for (const auto& init : inits) {
                // The ansatz has only random initializations.
                if (fam == "ansatz" && init == "structured") continue;
                if (init == "structured") {
                    cells.push_back({fam, init, m, f.train.seed});
                } else {
                    for (int k = 0; k < f.seeds; ++k) {
                        cells.push_back({fam, init, m, f.train.seed + static_cast<std::uint64_t>(k)});
                    }
                }
            }
        }
    }
    if (cells.empty()) throw FlagError("the family / init selection yields no sweep cells");

    parallel_for(cells.size(), [&](std::size_t i) {
        Cell& c = cells[i];
        auto cfg = base_cfg;
        cfg.m = c.m;
        cfg.seed = c.seed;
        if (c.family == "chebyshev") {
            const auto fit_mean = [&](std::span<const data::FlowField> set) {
                std::vector<double> fid;
                const auto basis = baseline::cheb_basis(set.front().height, set.front().width, c.m, cfg.ordering);
                for (const auto& field : set) fid.push_back(baseline::cheb_fit(field, basis, cfg.lambda).fidelity);
                return mean_of(fid);
            };
            c.initial_train_loss = 1.0 - fit_mean(split.train);
            c.final_train_loss = c.initial_train_loss;
            c.initial_test_fidelity = fit_mean(split.test);
            c.final_test_fidelity = c.initial_test_fidelity;
        } else {
            auto model = build_model(opqnn::family_from_string(c.family), c.init == "structured", n, c.seed, f.train);
            c.circuit_params = model.params.size();
            const auto fit = fit_model(std::move(model), train_states, test_states, cfg);
            c.initial_train_loss = fit.history.initial_train_loss;
            c.initial_test_fidelity = fit.history.initial_test_metric;
            c.final_train_loss = fit.history.final_train_loss;
            c.final_test_fidelity = fit.final_test_fidelity;
            c.skipped = fit.history.skipped_samples;
        }
        std::ostringstream name;
        name << "cells/" << c.family << '-' << c.init << "-m" << c.m << "-s" << c.seed << ".csv";
        s.write(name.str(), std::string(kCellHeader) + cell_row(c));
    });

    std::string all = kCellHeader;
    // (family, init, m) -> per-seed values in cell order.
    std::map<std::tuple<std::size_t, std::string, std::size_t>, std::vector<const Cell*>> groups;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        all += cell_row(cells[i]);
        const auto fam_pos = static_cast<std::size_t>(
            std::find(families.begin(), families.end(), cells[i].family) - families.begin());
        groups[{fam_pos * 2 + (cells[i].init == "random"), cells[i].family, cells[i].m}].push_back(&cells[i]);
    }
    s.write("cells.csv", all);

    std::ostringstream fid_csv;
    std::ostringstream loss_csv;
    fid_csv << "family,init,m,seeds,mean_test_fidelity,std_test_fidelity,mean_initial_test_fidelity\n";
    loss_csv << "family,init,m,seeds,mean_initial_loss,std_initial_loss\n";
    for (const auto& [key, members] : groups) {
        std::vector<double> fid;
        std::vector<double> init_fid;
        std::vector<double> loss;
        for (const Cell* c : members) {
            fid.push_back(c->final_test_fidelity);
            init_fid.push_back(c->initial_test_fidelity);
            loss.push_back(c->initial_train_loss);
        }
        const Cell& c0 = *members.front();
        fid_csv << c0.family << ',' << c0.init << ',' << c0.m << ',' << members.size() << ',' << fmt(mean_of(fid))
                << ',' << fmt(std_of(fid)) << ',' << fmt(mean_of(init_fid)) << '\n';
        loss_csv << c0.family << ',' << c0.init << ',' << c0.m << ',' << members.size() << ',' << fmt(mean_of(loss))
                 << ',' << fmt(std_of(loss)) << '\n';
    }
    s.write("fidelity_vs_m.csv", fid_csv.str());
    s.write("initial_loss_vs_m.csv", loss_csv.str());
    out << "swept " << cells.size() << " cells over m=" << m_lo << ".." << m_hi << '\n';
}

// --- classify --------------------------------------------------------------

struct ClassifyFlags {
    std::string families = "qft,qdct,chebyshev";
    int classes = 4;
    std::string data;
    int grid = 16;
    int conditions = 4;
    int steps = 12;
    std::string component = "u";
    double split = data::kDefaultSplitRatio;
    std::string mode = "auto";
    std::size_t cheb_m = 0;
    std::uint64_t fc_seed = 1;
    double fc_scale = 0.1;
    TrainFlags train;
};

std::vector<classify::LabeledSample> labeled_set(const ClassifyFlags& f) {
    std::vector<classify::LabeledSample> out;
    if (f.data.empty()) {
        if (!data::is_power_of_two(f.grid)) throw FlagError("--grid must be a power of two");
        if (f.classes > 4) throw FlagError("the synthetic set has 4 classes");
        for (auto& s : classify::synthetic_class_set(f.grid, f.conditions, f.steps)) {
            if (s.label < f.classes) out.push_back(std::move(s));
        }
        return out;
    }
    if (!fs::is_directory(f.data)) throw InputError("--data must be a dataset directory: " + f.data);
    auto fields = data::load_dataset(f.data);
    const auto component = data::component_from_string(f.component);
    std::set<std::string> types;
    for (const auto& x : fields) {
        if (x.component == component) types.insert(x.flow_type);
    }
    if (static_cast<int>(types.size()) < f.classes) {
        throw InputError("dataset holds " + std::to_string(types.size()) + " flow types, fewer than --classes");
    }
    const std::vector<std::string> names(types.begin(), types.end());
    for (auto& x : fields) {
        if (x.component != component) continue;
        const int label = static_cast<int>(std::find(names.begin(), names.end(), x.flow_type) - names.begin());
        if (label < f.classes) out.push_back({std::move(x), label});
    }
    return out;
}

void cmd_classify(const ClassifyFlags& f, Session& s, std::ostream& out) {
    const auto families = split_list(f.families);
    if (families.empty()) throw FlagError("--families is empty");
    for (const auto& fam : families) {
        if (!is_circuit_family(fam) && fam != "chebyshev") throw FlagError("unknown family '" + fam + "'");
    }
    if (f.classes < 2) throw FlagError("--classes must be >= 2");
    const auto samples = labeled_set(f);
    const auto split = classify::stratified_split(samples, f.split, f.train.seed);
    if (split.train.empty() || split.test.empty()) throw InputError("the split leaves an empty side");
    const auto cfg = train_config(f.train, f.train.m);
    if (cfg.epochs < 1) throw FlagError("classification needs --epochs >= 1");
    s.seed = f.train.seed;
    s.config["train"] = train_config_json(cfg);
    s.config["fc"] = {{"seed", f.fc_seed}, {"scale", f.fc_scale}};

    std::vector<int> train_labels;
    std::vector<int> test_labels;
    for (const auto& x : split.train) train_labels.push_back(x.label);
    for (const auto& x : split.test) test_labels.push_back(x.label);
    std::vector<data::FlowField> test_fields;
    for (const auto& x : split.test) test_fields.push_back(x.field);

    const auto mode_for = [&](Family fam) {
        return f.mode == "auto" ? classify::default_feature_mode(fam) : classify::feature_mode_from_string(f.mode);
    };
    // The baseline defaults to the feature width of the first circuit family.
    std::size_t cheb_m = f.cheb_m;
    if (cheb_m == 0) {
        cheb_m = 2 * cfg.m;
        for (const auto& fam : families) {
            if (!is_circuit_family(fam)) continue;
            cheb_m = classify::feature_count(cfg.m, mode_for(opqnn::family_from_string(fam)));
            break;
        }
    }

    std::string report_csv;
    json reports = json::array();
    for (const auto& fam : families) {
        const auto start = std::chrono::steady_clock::now();
        train::ClassifierResult result;
        std::vector<int> predictions;
        std::size_t circuit_params = 0;
        json info;
        if (fam == "chebyshev") {
            const auto& probe = split.train.front().field;
            check_order(cheb_m, static_cast<std::size_t>(probe.height) * static_cast<std::size_t>(probe.width));
            const auto basis = baseline::cheb_basis(probe.height, probe.width, cheb_m, cfg.ordering);
            const auto features_of = [&](const auto& set) {
                std::vector<classify::FeatureVector> out_f;
                for (const auto& x : set) out_f.push_back(baseline::cheb_fit(x.field, basis, cfg.lambda).coefficients);
                return out_f;
            };
            const auto train_f = features_of(split.train);
            const auto test_f = features_of(split.test);
            auto fc = classify::random_fc(static_cast<int>(cheb_m), f.classes, f.fc_seed, f.fc_scale);
            result = train::fit_fc(std::move(fc), train_f, train_labels, test_f, test_labels, cfg);
            predictions = train::predict_all(result.fc, test_f);
            info["basis_order"] = cheb_m;
        } else {
            const auto family = opqnn::family_from_string(fam);
            const int n = square_qubits(split.train.front().field);
            check_order(cfg.m, std::size_t{1} << (2 * n));
            const auto mode = mode_for(family);
            auto model = build_model(family, f.train.init == "structured", n, f.train.seed, f.train);
            auto fc = classify::random_fc(static_cast<int>(classify::feature_count(cfg.m, mode)), f.classes, f.fc_seed,
                                          f.fc_scale);
            result = train::train_classifier(std::move(model), std::move(fc), split.train, split.test, cfg,
                                             {mode, false});
            const auto test_f = train::direct_feature_set(result.model, states_of(test_fields), cfg, mode);
            predictions = train::predict_all(result.fc, test_f);
            circuit_params = result.model.params.size();
            info["feature_mode"] = classify::to_string(mode);
            info["init"] = f.train.init;
        }
        auto report = classify::make_report(fam, predictions, test_labels, f.classes);
        report.circuit_params = circuit_params;
        report.fc_params = result.fc.param_count();
        report.budget = circuit_params + report.fc_params;
        if (f.train.record_time) {
            report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
        s.write("history_" + fam + ".csv", result.history.to_csv());
        auto csv = report.to_csv();
        // Keep one header row across methods.
        if (!report_csv.empty()) csv.erase(0, csv.find('\n') + 1);
        report_csv += csv;
        auto j = json::parse(report.to_json());
        for (auto& [k, v] : info.items()) j[k] = v;
        reports.push_back(std::move(j));
        out << fam << " accuracy=" << fmt(report.accuracy) << " budget=" << report.budget << '\n';
    }
    s.write("report.csv", report_csv);
    json doc;
    doc["schema_version"] = kCsvSchemaVersion;
    doc["artifact_version"] = kArtifactVersion;
    doc["classes"] = f.classes;
    doc["train_samples"] = split.train.size();
    doc["test_samples"] = split.test.size();
    doc["methods"] = reports;
    s.write("report.json", doc.dump(2) + "\n");
}

// --- validate ----------------------------------------------------------------

void cmd_validate(const validation::SuiteOptions& o, Session* s, std::ostream& out) {
    const auto results = validation::run_suite(o);
    std::ostringstream csv;
    csv << "check,passed,worst,tolerance,detail\n";
    bool ok = true;
    for (const auto& r : results) {
        out << validation::format(r) << '\n';
        csv << r.name << ',' << (r.passed ? 1 : 0) << ',' << fmt(r.worst) << ',' << fmt(r.tolerance) << ','
            << r.detail << '\n';
        ok = ok && r.passed;
    }
    if (s != nullptr) {
        s->seed = o.seed;
        s->write("validate.csv", csv.str());
    }
    if (!ok) throw CheckFailed("oracle suite reported failures");
    out << "all " << results.size() << " oracle checks passed\n";
}

// --- rerun -------------------------------------------------------------------

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

void cmd_rerun(const std::string& manifest_path, const std::string& out_flag, std::ostream& out, std::ostream& err) {
    const fs::path mpath = manifest_path;
    if (!fs::is_regular_file(mpath)) throw InputError("manifest not found: " + mpath.string());
    json m;
    try {
        m = json::parse(read_file(mpath));
    } catch (const json::exception& e) {
        throw InputError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!m.contains("command") || !m.contains("flags") || !m.contains("outputs")) {
        throw InputError("manifest lacks command, flags, or outputs");
    }
    const fs::path original = mpath.parent_path();
    const fs::path target = out_flag.empty() ? original / "rerun" : fs::path(out_flag);
    if (fs::weakly_canonical(target) == fs::weakly_canonical(original)) {
        throw FlagError("rerun output directory must differ from the original run");
    }
    std::vector<std::string> args{m["command"].get<std::string>()};
    for (const auto& [k, v] : m["flags"].items()) {
        const auto value = v.get<std::string>();
        if (value.empty()) continue;
        args.push_back("--" + k);
        args.push_back(value);
    }
    args.push_back("--out");
    args.push_back(target.string());
    const int code = dispatch(args, out, err);
    if (code != kExitOk) throw CheckFailed("re-executed command exited with " + std::to_string(code));

    std::size_t same = 0;
    std::size_t total = 0;
    for (const auto& entry : m["outputs"]) {
        const auto rel = entry.get<std::string>();
        ++total;
        const auto a = original / rel;
        const auto b = target / rel;
        const bool identical = fs::exists(a) && fs::exists(b) && read_file(a) == read_file(b);
        same += identical;
        out << (identical ? "IDENTICAL " : "DIFFERS ") << rel << '\n';
    }
    out << same << '/' << total << " outputs identical\n";
    if (same != total) throw CheckFailed("rerun outputs differ from the manifest's run");
}

// --- parsing and dispatch --------------------------------------------------------

/// key=value lines (# comments) become "--key value" pairs.
std::vector<std::string> config_args(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FlagError("cannot read config file " + path.string());
    std::vector<std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FlagError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-') key.erase(0, 1);
        if (key.empty()) throw FlagError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        out.push_back("--" + key);
        out.push_back(trim(line.substr(eq + 1)));
    }
    return out;
}

/// Prepends config-file entries after the command name so flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            continue;
        }
        const auto extra = config_args(path);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
        break;
    }
    return args;
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    const auto original = args;
    CLI::App app{"Orthogonal-polynomial circuit reduced-order modeling driver", "qrom"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kArtifactVersion);

    std::string config_path;
    std::string out_dir;
    const auto add_common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--config", config_path, "Plain key=value file; command-line flags win");
        auto* o = sub->add_option("--out", out_dir, "Output directory");
        if (out_required) o->required();
    };

    SynthFlags synth_f;
    auto* synth = app.add_subcommand("synth", "Write synthetic FFD1 datasets");
    synth->add_option("--kind", synth_f.kind, "Kind or 'all'")->check(CLI::IsMember(kKindNames));
    synth->add_option("--grid", synth_f.grid, "Grid side (power of two)")->check(CLI::Range(2, 1024));
    synth->add_option("--steps", synth_f.steps, "Time steps per condition")->check(CLI::Range(1, 100000));
    synth->add_option("--conditions", synth_f.conditions, "Conditions per kind")->check(CLI::Range(1, 1000));
    synth->add_option("--component", synth_f.component, "u, v, or both")->check(CLI::IsMember({"u", "v", "both"}));
    add_common(synth, true);

    ReconstructFlags rec_f;
    auto* rec = app.add_subcommand("reconstruct", "Train (or fit) one family and report fidelity and MSE");
    rec->add_option("--family", rec_f.family, "Basis family")
        ->check(CLI::IsMember({"qft", "qdct", "ansatz", "chebyshev"}));
    add_data_flags(rec, rec_f.data);
    add_train_flags(rec, rec_f.train);
    rec->add_option("--route", rec_f.route, "Final evaluation route")->check(CLI::IsMember({"direct", "circuit"}));
    rec->add_option("--estimator", rec_f.estimator, "Circuit-route estimator")
        ->check(CLI::IsMember({"exact", "sampled"}));
    rec->add_option("--shots", rec_f.shots, "Shots per sampled estimate")->check(CLI::Range(1, 1000000000));
    add_common(rec, true);

    SweepFlags sweep_f;
    auto* sweep = app.add_subcommand("sweep", "Fidelity and initial loss over reconstruction orders");
    sweep->add_option("--families", sweep_f.families, "Comma list of qft, qdct, ansatz, chebyshev");
    sweep->add_option("--inits", sweep_f.inits, "Comma list of structured, random");
    sweep->add_option("--m-range", sweep_f.m_range, "Orders lo..hi");
    sweep->add_option("--m-step", sweep_f.m_step, "Order stride");
    sweep->add_option("--seeds", sweep_f.seeds, "Random-init seeds per cell");
    add_data_flags(sweep, sweep_f.data);
    add_train_flags(sweep, sweep_f.train, false);
    add_common(sweep, true);

    ClassifyFlags cls_f;
    cls_f.train.m = 6;
    cls_f.train.batch = 4;
    auto* cls = app.add_subcommand("classify", "Flow-type classification with an FC head");
    cls->add_option("--families", cls_f.families, "Comma list of qft, qdct, ansatz, chebyshev");
    cls->add_option("--classes", cls_f.classes, "Number of classes")->check(CLI::Range(2, 1000));
    cls->add_option("--data", cls_f.data, "Dataset directory labeled by flow type (default: synthetic)");
    cls->add_option("--grid", cls_f.grid, "Synthetic grid side")->check(CLI::Range(2, 64));
    cls->add_option("--conditions", cls_f.conditions, "Synthetic conditions per class")->check(CLI::Range(1, 1000));
    cls->add_option("--steps", cls_f.steps, "Synthetic time steps per condition")->check(CLI::Range(1, 100000));
    cls->add_option("--component", cls_f.component, "Velocity component")->check(CLI::IsMember({"u", "v"}));
    cls->add_option("--split", cls_f.split, "Training fraction per class")->check(CLI::Range(0.0, 1.0));
    cls->add_option("--mode", cls_f.mode, "Feature mode")->check(CLI::IsMember({"auto", "real", "split_complex"}));
    cls->add_option("--cheb-m", cls_f.cheb_m, "Baseline basis order; 0 matches the circuit feature width");
    cls->add_option("--fc-seed", cls_f.fc_seed, "FC initialization seed");
    cls->add_option("--fc-scale", cls_f.fc_scale, "FC initialization scale")->check(CLI::NonNegativeNumber);
    add_train_flags(cls, cls_f.train);
    add_common(cls, true);

    validation::SuiteOptions val_f;
    auto* val = app.add_subcommand("validate", "Run the oracle suite; exit 4 on any violation");
    val->add_option("--lcu-instances", val_f.lcu_instances)->check(CLI::Range(1, 100000));
    val->add_option("--swap-pairs", val_f.swap_pairs)->check(CLI::Range(1, 1000000));
    val->add_option("--solver-systems", val_f.solver_systems)->check(CLI::Range(1, 100000));
    val->add_option("--sampled-seeds", val_f.sampled_seeds)->check(CLI::Range(1, 1000));
    val->add_option("--shots", val_f.shots)->check(CLI::Range(1, 1000000000));
    val->add_option("--seed", val_f.seed);
    add_common(val, false);

    std::string manifest;
    auto* rerun = app.add_subcommand("rerun", "Re-execute a manifest and compare outputs bytewise");
    rerun->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
    rerun->add_option("--out", out_dir, "Output directory (default: <run>/rerun)");

    try {
        args = expand_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFlagError;
    }

    if (rerun->parsed()) {
        cmd_rerun(manifest, out_dir, out, err);
        return kExitOk;
    }
    // Absolute input paths keep outputs and reruns independent of the working directory.
    for (std::string* p : {&rec_f.data.data, &sweep_f.data.data, &cls_f.data}) {
        if (!p->empty()) *p = fs::absolute(*p).lexically_normal().string();
    }
    CLI::App* sub = app.get_subcommands().front();
    std::optional<Session> session;
    if (!out_dir.empty()) {
        session.emplace(sub->get_name(), original, out_dir);
        session->flags = resolved_flags(*sub);
        if (!config_path.empty()) session->config["config_file"] = config_path;
    }
    if (synth->parsed()) {
        cmd_synth(synth_f, *session, out);
    } else if (rec->parsed()) {
        cmd_reconstruct(rec_f, *session, out);
    } else if (sweep->parsed()) {
        cmd_sweep(sweep_f, *session, out);
    } else if (cls->parsed()) {
        cmd_classify(cls_f, *session, out);
    } else if (val->parsed()) {
        cmd_validate(val_f, session ? &*session : nullptr, out);
    }
    if (session) session->write_manifest();
    return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch({args.begin(), args.end()}, out, err);
    } catch (const FlagError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFlagError;
    } catch (const InputError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const CheckFailed& e) {
        err << "failed: " << e.what() << '\n';
        return kExitFailure;
    } catch (const FormatError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const ShapeError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const DegenerateFieldError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFlagError;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace qrom::cli
