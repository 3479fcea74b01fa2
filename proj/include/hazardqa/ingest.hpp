#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hazardqa/image.hpp"

namespace hazardqa {

struct Frame {
    std::string scenario_id;
    int index = 0;
    double timestamp_s = 0.0;
    Image image;
    std::string source_path;

    friend bool operator==(const Frame&, const Frame&) = default;
};

struct FrameSequence {
    std::string scenario_id;
    std::vector<Frame> frames;
    double interval_s = 1.0;

    std::size_t size() const { return frames.size(); }
};

struct SamplingSpec {
    double interval_s = 1.0;
    std::optional<int> max_frames;
};

/// A run of `length` consecutive frames beginning at `start_index`.
struct Window {
    int start_index = 0;
    int length = 0;
    std::vector<Frame> frames;

    std::vector<int> indices() const;
};

/// Loads a scenario's frames from an image directory or a video file and
/// samples them every `spec.interval_s` seconds starting at t = 0.
///
/// Directory sources hold frames that were already extracted at the
/// sampling rate: file k in numeric order is taken as the sample at
/// k * interval_s. Files are PNG/JPEG whose names contain an integer run;
/// they are ordered by the first such run.
///
/// Throws SourceNotFound, UndecodableImage, EmptySource, and
/// InvalidArgument for a bad spec or an unsupported source.
FrameSequence sample_frames(const std::string& scenario_id,
                            const std::filesystem::path& source,
                            const SamplingSpec& spec);

/// Frames t_i .. t_i+n-1. Throws OutOfRange past the end of the sequence.
Window make_window(const FrameSequence& seq, int t_i, int n);

std::vector<Window> enumerate_windows(const FrameSequence& seq, int n, int stride);

/// True when video sources can be decoded in this build.
bool video_decoding_available();

}  // namespace hazardqa
