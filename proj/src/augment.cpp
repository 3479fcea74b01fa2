#include "hazardqa/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform in (0, 1]; 53 bits of mantissa.
double unit_open_closed(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

std::uint8_t clamp_to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Image rotate_image(const Image& src, double degrees) {
    const double theta = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double cx = (src.width - 1) / 2.0;
    const double cy = (src.height - 1) / 2.0;
    const double max_x = src.width - 1;
    const double max_y = src.height - 1;
    constexpr double kEps = 1e-9;

    Image out(src.width, src.height, 0);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            double sx = cx + dx * c - dy * s;
            double sy = cy + dx * s + dy * c;
            if (sx < -kEps || sy < -kEps || sx > max_x + kEps || sy > max_y + kEps) {
                continue;
            }
            sx = std::clamp(sx, 0.0, max_x);
            sy = std::clamp(sy, 0.0, max_y);
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const int x1 = std::min(x0 + 1, src.width - 1);
            const int y1 = std::min(y0 + 1, src.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            for (int ch = 0; ch < 3; ++ch) {
                const double top = src.at(x0, y0, ch) * (1.0 - fx) + src.at(x1, y0, ch) * fx;
                const double bottom = src.at(x0, y1, ch) * (1.0 - fx) + src.at(x1, y1, ch) * fx;
                out.at(x, y, ch) = clamp_to_byte(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    return out;
}

Image add_noise(const Image& src, const Noise& noise, const std::string& scenario_id, int index) {
    Image out = src;
    const std::uint64_t frame_key =
        splitmix64(splitmix64(splitmix64(noise.seed) ^ fnv1a(scenario_id)) ^ static_cast<std::uint64_t>(index));
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            const std::uint64_t pixel_key =
                splitmix64(frame_key ^ ((static_cast<std::uint64_t>(y) << 32) | static_cast<std::uint32_t>(x)));
            for (int ch = 0; ch < 3; ++ch) {
                const std::uint64_t key = splitmix64(pixel_key + static_cast<std::uint64_t>(ch));
                // Box-Muller on two independent draws from the same counter.
                const double u1 = unit_open_closed(splitmix64(key ^ 0x1ULL));
                const double u2 = unit_open_closed(splitmix64(key ^ 0x2ULL));
                const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
                out.at(x, y, ch) = clamp_to_byte(src.at(x, y, ch) + noise.sigma * z);
            }
        }
    }
    return out;
}

}  // namespace

void validate(const AugmentationSpec& spec) {
    if (const auto* rot = std::get_if<Rotate>(&spec.variant)) {
        if (!(rot->degrees > -360.0 && rot->degrees < 360.0)) {
            throw InvalidArgument("rotation must lie in (-360, 360) degrees");
        }
    }
    if (const auto* noise = std::get_if<Noise>(&spec.variant)) {
        if (!(noise->sigma >= 0.0) || !std::isfinite(noise->sigma)) {
            throw InvalidArgument("noise sigma must be >= 0");
        }
    }
}

Frame apply_augmentation(const Frame& frame, const AugmentationSpec& spec) {
    validate(spec);
    if (frame.image.empty()) {
        throw InvalidArgument("cannot augment an empty frame");
    }
    Frame out = frame;
    if (const auto* rot = std::get_if<Rotate>(&spec.variant)) {
        if (rot->degrees != 0.0) {
            out.image = rotate_image(frame.image, rot->degrees);
        }
    } else if (const auto* noise = std::get_if<Noise>(&spec.variant)) {
        if (noise->sigma > 0.0) {
            out.image = add_noise(frame.image, *noise, frame.scenario_id, frame.index);
        }
    }
    return out;
}

std::vector<std::pair<AugmentationSpec, Window>> make_variant_windows(
    const Window& window, const std::vector<AugmentationSpec>& specs) {
    if (specs.empty()) {
        throw InvalidArgument("at least one augmentation spec is required");
    }
    std::set<std::string> labels;
    for (const auto& spec : specs) {
        if (!labels.insert(spec.label).second) {
            throw DuplicateLabel("duplicate augmentation label '" + spec.label + "'");
        }
        validate(spec);
    }
    std::vector<std::pair<AugmentationSpec, Window>> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) {
        Window augmented{window.start_index, window.length, {}};
        augmented.frames.reserve(window.frames.size());
        for (const auto& frame : window.frames) {
            augmented.frames.push_back(apply_augmentation(frame, spec));
        }
        out.emplace_back(spec, std::move(augmented));
    }
    return out;
}

std::vector<AugmentationSpec> default_variant_set(std::uint64_t seed, double noise_sigma) {
    return {
        {Identity{}, "raw"},
        {Rotate{30.0}, "rotate30"},
        {Noise{noise_sigma, seed}, "noise"},
    };
}

AugmentationSpec variant_from_name(const std::string& name, std::uint64_t seed, double default_sigma) {
    if (name == "raw" || name == "identity") {
        return {Identity{}, name};
    }
    const auto parse_number = [&](std::string_view digits) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(std::string(digits), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != digits.size()) {
            throw InvalidArgument("unknown augmentation variant '" + name + "'");
        }
        return value;
    };
    if (name.rfind("rotate", 0) == 0) {
        AugmentationSpec spec{Rotate{parse_number(std::string_view(name).substr(6))}, name};
        validate(spec);
        return spec;
    }
    if (name.rfind("noise", 0) == 0) {
        const auto rest = std::string_view(name).substr(5);
        AugmentationSpec spec{Noise{rest.empty() ? default_sigma : parse_number(rest), seed}, name};
        validate(spec);
        return spec;
    }
    throw InvalidArgument("unknown augmentation variant '" + name + "'");
}

}  // namespace hazardqa
