#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hazardqa/ingest.hpp"

namespace hazardqa {

struct Identity {
    friend bool operator==(const Identity&, const Identity&) = default;
};

/// Counter-clockwise rotation about the image centre, canvas size kept.
struct Rotate {
    double degrees = 0.0;
    friend bool operator==(const Rotate&, const Rotate&) = default;
};

/// Additive per-channel Gaussian noise N(0, sigma^2).
struct Noise {
    double sigma = 0.0;
    std::uint64_t seed = 0;
    friend bool operator==(const Noise&, const Noise&) = default;
};

using AugmentationVariant = std::variant<Identity, Rotate, Noise>;

struct AugmentationSpec {
    AugmentationVariant variant;
    std::string label;

    friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

/// Throws InvalidArgument if the rotation is outside (-360, 360) or sigma < 0.
void validate(const AugmentationSpec& spec);

/// Deterministic transform. Noise is drawn from a counter-based generator
/// keyed on (seed, scenario_id, frame index, pixel, channel), so results do
/// not depend on call order or threading.
Frame apply_augmentation(const Frame& frame, const AugmentationSpec& spec);

std::vector<std::pair<AugmentationSpec, Window>> make_variant_windows(
    const Window& window, const std::vector<AugmentationSpec>& specs);

/// [raw, rotate30, noise(sigma)] with the given seed.
std::vector<AugmentationSpec> default_variant_set(std::uint64_t seed, double noise_sigma = 25.0);

/// Resolves a short name ("raw", "rotate30", "rotate-15", "noise", "noise8")
/// into a spec. Throws InvalidArgument for unknown names.
AugmentationSpec variant_from_name(const std::string& name, std::uint64_t seed, double default_sigma = 25.0);

}  // namespace hazardqa
