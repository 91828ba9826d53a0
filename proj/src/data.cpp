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

#include "qrom/data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "qrom/errors.hpp"

namespace qrom::data {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kHeaderBytes = 17;
constexpr std::array<char, 4> kMagic{'F', 'F', 'D', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint32_t get_u32(const std::vector<unsigned char>& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
    return v;
}

std::uint64_t get_u64(const std::vector<unsigned char>& in, std::size_t at) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[at + b]) << (8 * b);
    return v;
}

[[noreturn]] void format_error(const fs::path& path, std::size_t offset, const std::string& what) {
    throw FormatError(path.string() + ": " + what + " at byte offset " + std::to_string(offset));
}

// Fills flow_type / condition from <flow_type>/<condition>/<component>_<t>.ffd.
void apply_layout(FlowField& f, const fs::path& path) {
    static const std::regex name(R"(([uv])_(\d+)\.ffd)");
    if (!std::regex_match(path.filename().string(), name)) return;
    const auto cond = path.parent_path();
    const auto flow = cond.parent_path();
    if (cond.filename().empty() || flow.filename().empty()) return;
    f.condition = cond.filename().string();
    f.flow_type = flow.filename().string();
}

double smoothstep_tanh(double z) { return 0.5 * (1.0 - std::tanh(z)); }

double sech2(double z) {
    const double c = std::cosh(z);
    return 1.0 / (c * c);
}

double cavity(const SynthParams& p, double x, double y, std::uint32_t t, Component comp) {
    // Stream function A sin(pi x) sin(pi Y) with Y = y^k; spin-up raises A and
    // pushes the cell center toward the lid as k grows.
    const double ramp = 1.0 - std::exp(-(static_cast<double>(t) + 1.0) / p.spin_up);
    const double a = p.strength * ramp;
    const double k = 1.0 + 0.6 * ramp;
    const double yk = std::pow(y, k);
    const double pi = std::numbers::pi;
    if (comp == Component::u) return a * pi * std::sin(pi * x) * std::cos(pi * yk) * k * std::pow(y, k - 1.0);
    return -a * pi * std::cos(pi * x) * std::sin(pi * yk);
}

double tube(const SynthParams& p, double x, double y, std::uint32_t t, Component comp) {
    // Plug inflow relaxing to a parabola over the developing length; the
    // length grows with t. v follows from continuity with v(y=0) = 0.
    const double ell = p.length * (1.0 + 0.1 * static_cast<double>(t));
    const double f = 1.0 - std::exp(-x / ell);
    if (comp == Component::u) return p.strength * (f * 6.0 * y * (1.0 - y) + (1.0 - f));
    const double df = std::exp(-x / ell) / ell;
    return -p.strength * df * (3.0 * y * y - 2.0 * y * y * y - y);
}

double dam(const SynthParams& p, double x, double y, std::uint32_t t, Component comp) {
    // Water column behind a tanh front at x_f = 0.2 + speed * t; the surge is
    // fastest near the bed (y = 1 is the bottom row).
    const double xf = 0.2 + p.speed * static_cast<double>(t);
    const double z = (x - xf) / p.width;
    if (comp == Component::u) return p.strength * (0.05 + smoothstep_tanh(z) * (0.3 + y));
    return -p.strength * 0.5 * sech2(z) * (1.0 - y) * y;
}

double cylinder(const SynthParams& p, double x, double y, std::uint32_t t, Component comp) {
    // Free stream with a momentum-deficit wake behind a body at (0.2, 0.5),
    // plus a street of Gaussian vortices of alternating sign advected
    // downstream and wrapped with period 2 * spacing.
    constexpr double kSigma = 0.07;
    constexpr double kBody = 0.07;
    const double xc = 0.2;
    const double yc = 0.5;
    const double behind = 0.5 * (1.0 + std::tanh((x - xc) / 0.05));
    const double deficit = 0.9 * behind * std::exp(-(y - yc) * (y - yc) / 0.02);
    double u = 1.0 - deficit;
    double v = 0.0;
    const double shift = std::fmod(p.speed * static_cast<double>(t), 2.0 * p.spacing);
    for (int k = 0; k < 8; ++k) {
        const double xk = xc + 0.1 + shift + k * p.spacing;
        if (xk > 1.2) break;
        const double yk = yc + (k % 2 == 0 ? 0.1 : -0.1);
        const double g = p.strength * (k % 2 == 0 ? 1.0 : -1.0) * 1.5;
        const double dx = x - xk;
        const double dy = y - yk;
        const double e = g * std::exp(-(dx * dx + dy * dy) / (kSigma * kSigma)) / kSigma;
        u -= dy * e;
        v += dx * e;
    }
    const double rb = ((x - xc) * (x - xc) + (y - yc) * (y - yc)) / (kBody * kBody);
    const double blockage = 1.0 - std::exp(-rb);
    return (comp == Component::u ? u : v) * blockage;
}

}  // namespace

void write_file_atomically(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw FormatError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

const char* to_string(Component c) noexcept { return c == Component::u ? "u" : "v"; }

Component component_from_string(const std::string& s) {
    if (s == "u") return Component::u;
    if (s == "v") return Component::v;
    throw DomainError("unknown velocity component '" + s + "'");
}

void validate(const FlowField& field) {
    if (field.height < 1 || field.width < 1) throw ShapeError("grid dimensions must be positive");
    if (field.values.size() != static_cast<std::size_t>(field.height) * static_cast<std::size_t>(field.width)) {
        throw ShapeError("grid holds " + std::to_string(field.values.size()) + " values, expected " +
                         std::to_string(field.height) + " x " + std::to_string(field.width));
    }
    for (double v : field.values) {
        if (!std::isfinite(v)) throw DomainError("grid contains a non-finite value");
    }
}

bool is_power_of_two(int v) noexcept { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); }

int log2_exact(int v) {
    if (!is_power_of_two(v)) throw ShapeError(std::to_string(v) + " is not a power of two");
    return std::countr_zero(static_cast<unsigned>(v));
}

EncodedSample encode(const FlowField& field) {
    validate(field);
    if (!is_power_of_two(field.height) || !is_power_of_two(field.width)) {
        throw ShapeError("grid " + std::to_string(field.height) + " x " + std::to_string(field.width) +
                         " is not a power-of-two shape");
    }
    double n2 = 0.0;
    for (double v : field.values) n2 += v * v;
    const double norm = std::sqrt(n2);
    if (!(norm > kMinFieldNorm)) throw DegenerateFieldError("field norm below 1e-12 cannot be encoded");
    std::vector<qsim::Amplitude> amps(field.values.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = field.values[i] / norm;
    const int nq = log2_exact(field.height) + log2_exact(field.width);
    if (nq == 0) throw ShapeError("a 1 x 1 grid has no qubits to encode into");
    return {qsim::StateVector(nq, std::move(amps)), norm, field};
}

std::vector<double> decode(std::span<const qsim::Amplitude> state, double norm) {
    std::vector<double> out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) out[i] = norm * state[i].real();
    return out;
}

std::vector<double> decode(const EncodedSample& sample) { return decode(sample.state.amplitudes(), sample.norm); }

void save_grid(const FlowField& field, const fs::path& path) {
    validate(field);
    std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
    put_u32(bytes, static_cast<std::uint32_t>(field.height));
    put_u32(bytes, static_cast<std::uint32_t>(field.width));
    bytes.push_back(static_cast<unsigned char>(field.component));
    put_u32(bytes, field.time_index);
    for (double v : field.values) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
    write_file_atomically(path, std::string(bytes.begin(), bytes.end()));
}

FlowField load_grid(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < kHeaderBytes) {
        format_error(path, bytes.size(),
                     "truncated header: expected " + std::to_string(kHeaderBytes) + " bytes, got " +
                         std::to_string(bytes.size()));
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                    [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
        format_error(path, 0, "bad magic (expected FFD1)");
    }
    FlowField f;
    const auto h = get_u32(bytes, 4);
    const auto w = get_u32(bytes, 8);
    if (h == 0 || h > (1u << 16)) format_error(path, 4, "implausible height " + std::to_string(h));
    if (w == 0 || w > (1u << 16)) format_error(path, 8, "implausible width " + std::to_string(w));
    if (bytes[12] > 1) format_error(path, 12, "unknown component tag " + std::to_string(bytes[12]));
    f.height = static_cast<int>(h);
    f.width = static_cast<int>(w);
    f.component = static_cast<Component>(bytes[12]);
    f.time_index = get_u32(bytes, 13);
    const std::size_t count = static_cast<std::size_t>(h) * w;
    const std::size_t expected = kHeaderBytes + 8 * count;
    if (bytes.size() != expected) {
        format_error(path, std::min(bytes.size(), expected),
                     "body length mismatch: expected " + std::to_string(expected) + " bytes, got " +
                         std::to_string(bytes.size()));
    }
    f.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t at = kHeaderBytes + 8 * i;
        const double v = std::bit_cast<double>(get_u64(bytes, at));
        if (!std::isfinite(v)) format_error(path, at, "non-finite value");
        f.values[i] = v;
    }
    apply_layout(f, path);
    return f;
}

FlowField load_csv(const fs::path& path, int expected_height, int expected_width) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    FlowField f;
    f.flow_type = "external";
    std::string line;
    int line_no = 0;
    std::size_t byte_offset = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t line_start = byte_offset;
        byte_offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ',' || line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ',' && line[end] != ' ' && line[end] != '\t') ++end;
            double v = 0.0;
            const auto* b = line.data() + pos;
            const auto* e = line.data() + end;
            const auto [ptr, ec] = std::from_chars(b, e, v);
            if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
                format_error(path, line_start + pos,
                             "line " + std::to_string(line_no) + ": not a finite number '" + std::string(b, e) + "'");
            }
            row.push_back(v);
            pos = end;
        }
        if (f.width == 0) f.width = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != f.width) {
            format_error(path, line_start,
                         "line " + std::to_string(line_no) + " has " + std::to_string(row.size()) + " columns, expected " +
                             std::to_string(f.width));
        }
        f.values.insert(f.values.end(), row.begin(), row.end());
        ++f.height;
    }
    if (f.height == 0) format_error(path, 0, "no numeric rows");
    if ((expected_height > 0 && f.height != expected_height) || (expected_width > 0 && f.width != expected_width)) {
        throw ShapeError(path.string() + ": grid is " + std::to_string(f.height) + " x " + std::to_string(f.width) +
                         ", expected " + std::to_string(expected_height) + " x " + std::to_string(expected_width));
    }
    return f;
}

void save_csv(std::span<const double> values, int height, int width, const fs::path& path) {
    if (values.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
        throw ShapeError("CSV grid shape does not match the value count");
    }
    std::ostringstream out;
    out.precision(17);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (c) out << ',';
            out << values[static_cast<std::size_t>(r) * width + c];
        }
        out << '\n';
    }
    write_file_atomically(path, out.str());
}

fs::path dataset_path(const fs::path& root, const FlowField& field) {
    return root / field.flow_type / field.condition /
           (std::string(to_string(field.component)) + "_" + std::to_string(field.time_index) + ".ffd");
}

std::vector<fs::path> save_dataset(const fs::path& root, std::span<const FlowField> fields) {
    std::vector<fs::path> out;
    for (const auto& f : fields) {
        out.push_back(dataset_path(root, f));
        save_grid(f, out.back());
    }
    return out;
}

std::vector<FlowField> load_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw FormatError("dataset root " + root.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().extension() == ".ffd") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<FlowField> out;
    out.reserve(files.size());
    for (const auto& p : files) out.push_back(load_grid(p));
    return out;
}

const char* to_string(SynthKind k) noexcept {
    switch (k) {
        case SynthKind::cavity_vortex: return "cavity_vortex";
        case SynthKind::tube_profile: return "tube_profile";
        case SynthKind::dam_front: return "dam_front";
        case SynthKind::cylinder_wake: return "cylinder_wake";
    }
    return "?";
}

SynthKind synth_kind_from_string(const std::string& s) {
    for (auto k : {SynthKind::cavity_vortex, SynthKind::tube_profile, SynthKind::dam_front, SynthKind::cylinder_wake}) {
        if (s == to_string(k) || s == flow_type_of(k)) return k;
    }
    throw DomainError("unknown synthetic kind '" + s + "'");
}

const char* flow_type_of(SynthKind k) noexcept {
    switch (k) {
        case SynthKind::cavity_vortex: return "cavity";
        case SynthKind::tube_profile: return "tube";
        case SynthKind::dam_front: return "dam";
        case SynthKind::cylinder_wake: return "cylinder";
    }
    return "?";
}

FlowField synth(SynthKind kind, int height, int width, const SynthParams& params, std::uint32_t t, Component component) {
    if (!is_power_of_two(height) || !is_power_of_two(width)) {
        throw ShapeError("synthetic grids need power-of-two dimensions");
    }
    const bool sane = std::isfinite(params.strength) && params.strength > 0.0 && params.length > 0.0 &&
                      params.width > 0.0 && params.spacing > 0.0 && params.spin_up > 0.0 &&
                      std::isfinite(params.speed) && params.speed >= 0.0;
    if (!sane) throw DomainError("synthetic parameters out of range");
    FlowField f;
    f.height = height;
    f.width = width;
    f.flow_type = flow_type_of(kind);
    f.condition = params.condition;
    f.component = component;
    f.time_index = t;
    f.values.resize(static_cast<std::size_t>(height) * width);
    for (int r = 0; r < height; ++r) {
        const double y = (r + 0.5) / height;
        for (int c = 0; c < width; ++c) {
            const double x = (c + 0.5) / width;
            double v = 0.0;
            switch (kind) {
                case SynthKind::cavity_vortex: v = cavity(params, x, y, t, component); break;
                case SynthKind::tube_profile: v = tube(params, x, y, t, component); break;
                case SynthKind::dam_front: v = dam(params, x, y, t, component); break;
                case SynthKind::cylinder_wake: v = cylinder(params, x, y, t, component); break;
            }
            f.values[static_cast<std::size_t>(r) * width + c] = v;
        }
    }
    validate(f);
    return f;
}

std::vector<SynthParams> condition_sweep(SynthKind kind, int count) {
    if (count < 1) throw DomainError("condition count must be >= 1");
    std::vector<SynthParams> out;
    for (int k = 0; k < count; ++k) {
        // Position in [0, 1] across the sweep; a single condition sits at the default.
        const double s = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
        SynthParams p;
        switch (kind) {
            case SynthKind::cavity_vortex:
                p.spin_up = 2.0 + 6.0 * s;
                p.condition = "bc-" + std::to_string(k);
                break;
            case SynthKind::tube_profile:
                p.length = 0.15 + 0.2 * s;
                p.condition = "geo-" + std::to_string(k);
                break;
            case SynthKind::dam_front:
                p.width = 0.06 + 0.08 * s;
                p.condition = "prop-" + std::to_string(k);
                break;
            case SynthKind::cylinder_wake:
                p.spacing = 0.25 + 0.1 * s;
                p.condition = "geo-" + std::to_string(k);
                break;
        }
        out.push_back(p);
    }
    return out;
}

std::vector<FlowField> synth_series(SynthKind kind, int height, int width, const SynthParams& params, int steps,
                                    Component component) {
    if (steps < 1) throw DomainError("a series needs at least one time step");
    std::vector<FlowField> out;
    for (int t = 0; t < steps; ++t) {
        out.push_back(synth(kind, height, width, params, static_cast<std::uint32_t>(t), component));
    }
    return out;
}

const char* to_string(Strategy s) noexcept {
    return s == Strategy::minimal_class ? "minimal_class" : "comprehensive";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "minimal_class") return Strategy::minimal_class;
    if (s == "comprehensive") return Strategy::comprehensive;
    throw DomainError("unknown partition strategy '" + s + "'");
}

DatasetSplit partition(std::span<const FlowField> samples, Strategy strategy, double split_ratio, std::uint64_t seed,
                       const PartitionFilter& filter) {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw DomainError("split ratio must lie in (0, 1)");
    if (samples.empty()) throw DomainError("cannot partition an empty sample list");

    PartitionFilter key = filter;
    if (strategy == Strategy::minimal_class) {
        if (key.flow_type.empty()) key.flow_type = samples.front().flow_type;
        if (key.condition.empty()) key.condition = samples.front().condition;
        if (!key.component) key.component = samples.front().component;
    }
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!key.flow_type.empty() && s.flow_type != key.flow_type) continue;
        if (!key.condition.empty() && s.condition != key.condition) continue;
        if (key.component && s.component != *key.component) continue;
        picked.push_back(i);
    }
    if (picked.empty()) throw DomainError("partition filter selected no samples");

    if (strategy == Strategy::minimal_class) {
        std::stable_sort(picked.begin(), picked.end(),
                         [&](std::size_t a, std::size_t b) { return samples[a].time_index < samples[b].time_index; });
    } else {
        std::mt19937_64 rng(seed);
        // Fisher-Yates with an explicit draw so the order is portable.
        for (std::size_t i = picked.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(picked[i - 1], picked[j]);
        }
    }
    const auto n_train = static_cast<std::size_t>(std::floor(split_ratio * static_cast<double>(picked.size()) + 1e-9));
    if (n_train == 0 || n_train >= picked.size()) {
        throw DomainError("split of " + std::to_string(picked.size()) + " samples at ratio " +
                          std::to_string(split_ratio) + " leaves one side empty");
    }
    DatasetSplit out;
    out.strategy = strategy;
    out.split_ratio = split_ratio;
    out.seed = seed;
    for (std::size_t k = 0; k < picked.size(); ++k) {
        (k < n_train ? out.train : out.test).push_back(samples[picked[k]]);
    }
    return out;
}

}  // namespace qrom::data
