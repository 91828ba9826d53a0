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
 * @file data.hpp
 * @brief Flow-field grids: FFD1 / CSV I/O, amplitude encoding, synthetic
 *        generators, and train/test partitions.
 *
 * FFD1 layout (little endian): "FFD1", u32 height, u32 width, u8 component
 * (0 = u, 1 = v), u32 time_index, then height * width f64 values row-major.
 * On disk a dataset lives at <root>/<flow_type>/<condition>/<component>_<t>.ffd.
 *
 * Grids are flattened row-major; the row index occupies the axis-0 register.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrom/qsim.hpp"

namespace qrom::data {

enum class Component : std::uint8_t { u = 0, v = 1 };

[[nodiscard]] const char* to_string(Component c) noexcept;
[[nodiscard]] Component component_from_string(const std::string& s);

struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<double> values;
    /// cavity, tube, dam, cylinder, or synthetic-*.
    std::string flow_type = "synthetic";
    /// Condition tag and identifier, e.g. "bc-0", "geo-2", "prop-1".
    std::string condition = "bc-0";
    Component component = Component::u;
    std::uint32_t time_index = 0;

    [[nodiscard]] double at(int r, int c) const { return values[static_cast<std::size_t>(r) * width + c]; }
};

/// Throws ShapeError / DomainError if the invariants do not hold.
void validate(const FlowField& field);

struct EncodedSample {
    qsim::StateVector state;
    double norm = 0.0;
    FlowField source;
};

inline constexpr double kMinFieldNorm = 1e-12;

[[nodiscard]] bool is_power_of_two(int v) noexcept;
/// log2 of a power of two.
[[nodiscard]] int log2_exact(int v);

/// Unit-norm state of the flattened grid. Throws DegenerateFieldError or ShapeError.
[[nodiscard]] EncodedSample encode(const FlowField& field);
/// norm * Re(state), the inverse of encode on real data.
[[nodiscard]] std::vector<double> decode(const EncodedSample& sample);
/// Real parts of an arbitrary state rescaled by `norm`.
[[nodiscard]] std::vector<double> decode(std::span<const qsim::Amplitude> state, double norm);

// --- FFD1 / CSV ----------------------------------------------------------

/// Writes to <path>.tmp then renames, creating parent directories. Throws FormatError.
void write_file_atomically(const std::filesystem::path& path, const std::string& bytes);

void save_grid(const FlowField& field, const std::filesystem::path& path);
/// Throws FormatError naming the byte offset of the first problem. When the
/// path follows the dataset layout, flow_type and condition are taken from it.
[[nodiscard]] FlowField load_grid(const std::filesystem::path& path);
/// Plain numeric grid, one row per line, comma or whitespace separated.
[[nodiscard]] FlowField load_csv(const std::filesystem::path& path, int expected_height = 0, int expected_width = 0);
void save_csv(std::span<const double> values, int height, int width, const std::filesystem::path& path);

[[nodiscard]] std::filesystem::path dataset_path(const std::filesystem::path& root, const FlowField& field);
/// Writes every field under the dataset layout; returns the written paths.
std::vector<std::filesystem::path> save_dataset(const std::filesystem::path& root, std::span<const FlowField> fields);
/// Every *.ffd below root, in lexicographic path order.
[[nodiscard]] std::vector<FlowField> load_dataset(const std::filesystem::path& root);

// --- synthetic generators ------------------------------------------------

enum class SynthKind : std::uint8_t { cavity_vortex, tube_profile, dam_front, cylinder_wake };

[[nodiscard]] const char* to_string(SynthKind k) noexcept;
[[nodiscard]] SynthKind synth_kind_from_string(const std::string& s);
/// Flow-type label written for a kind (cavity, tube, dam, cylinder).
[[nodiscard]] const char* flow_type_of(SynthKind k) noexcept;

/// Condition knobs. Each kind reads the fields relevant to it:
///  cavity_vortex  strength (lid speed), spin_up (time constant in steps)
///  tube_profile   strength (inlet speed), length (developing length)
///  dam_front      strength (front speed scale), width (front thickness), speed (per step)
///  cylinder_wake  strength (circulation), spacing (vortex spacing), speed (advection per step)
struct SynthParams {
    double strength = 1.0;
    double length = 0.25;
    double width = 0.1;
    double speed = 0.03;
    double spacing = 0.3;
    double spin_up = 4.0;
    std::string condition = "bc-0";
};

/// Deterministic analytic velocity component on cell centers x = (c + 0.5)/W,
/// y = (r + 0.5)/H. H and W must be powers of two.
[[nodiscard]] FlowField synth(SynthKind kind, int height, int width, const SynthParams& params, std::uint32_t t,
                              Component component = Component::u);

/// `count` condition variants of a kind spread over one geometric knob
/// (cavity spin_up, tube length, dam width, cylinder spacing), tagged
/// "<tag>-<k>" with tag bc, geo, prop, geo respectively.
[[nodiscard]] std::vector<SynthParams> condition_sweep(SynthKind kind, int count);

/// Time steps 0..steps-1 of one condition.
[[nodiscard]] std::vector<FlowField> synth_series(SynthKind kind, int height, int width, const SynthParams& params,
                                                  int steps, Component component = Component::u);

// --- partitions ----------------------------------------------------------

enum class Strategy : std::uint8_t { minimal_class, comprehensive };

[[nodiscard]] const char* to_string(Strategy s) noexcept;
[[nodiscard]] Strategy strategy_from_string(const std::string& s);

inline constexpr double kDefaultSplitRatio = 0.8;

/// Selects the samples a partition draws from. Empty strings match anything;
/// for minimal_class an empty selector means "the first sample's key".
struct PartitionFilter {
    std::string flow_type;
    std::string condition;
    std::optional<Component> component;
};

struct DatasetSplit {
    std::vector<FlowField> train;
    std::vector<FlowField> test;
    Strategy strategy = Strategy::minimal_class;
    double split_ratio = kDefaultSplitRatio;
    std::uint64_t seed = 0;
};

/// minimal_class: one (flow_type, condition, component), time-ordered, earlier
/// floor(ratio * n) samples train. comprehensive: all conditions of the
/// filtered flow type(s), seeded shuffle, same count rule.
[[nodiscard]] DatasetSplit partition(std::span<const FlowField> samples, Strategy strategy, double split_ratio,
                                     std::uint64_t seed, const PartitionFilter& filter = {});

}  // namespace qrom::data
