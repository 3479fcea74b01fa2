#include "hazardqa/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

#ifdef HAZARDQA_WITH_VIDEO
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>
#endif

#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_image_extension(const std::filesystem::path& p) {
    const auto ext = lower(p.extension().string());
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::optional<std::uint64_t> first_integer_run(const std::string& name) {
    auto it = std::find_if(name.begin(), name.end(), [](unsigned char c) { return std::isdigit(c); });
    if (it == name.end()) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    for (; it != name.end() && std::isdigit(static_cast<unsigned char>(*it)); ++it) {
        value = value * 10 + static_cast<std::uint64_t>(*it - '0');
    }
    return value;
}

void validate(const SamplingSpec& spec) {
    if (!(spec.interval_s > 0.0) || !std::isfinite(spec.interval_s)) {
        throw InvalidArgument("sampling interval must be > 0");
    }
    if (spec.max_frames && *spec.max_frames < 1) {
        throw InvalidArgument("max_frames must be >= 1");
    }
}

FrameSequence sample_directory(const std::string& scenario_id, const std::filesystem::path& dir,
                               const SamplingSpec& spec) {
    struct Entry {
        std::uint64_t number;
        std::string name;
        std::filesystem::path path;
    };
    std::vector<Entry> entries;
    for (const auto& item : std::filesystem::directory_iterator(dir)) {
        if (!item.is_regular_file() || !is_image_extension(item.path())) {
            continue;
        }
        const auto name = item.path().filename().string();
        if (auto number = first_integer_run(item.path().stem().string())) {
            entries.push_back({*number, name, item.path()});
        }
    }
    // Directory iteration order is unspecified; the name breaks numeric ties.
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.number != b.number ? a.number < b.number : a.name < b.name;
    });
    if (spec.max_frames && entries.size() > static_cast<std::size_t>(*spec.max_frames)) {
        entries.resize(static_cast<std::size_t>(*spec.max_frames));
    }

    FrameSequence seq{scenario_id, {}, spec.interval_s};
    seq.frames.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Frame frame;
        frame.scenario_id = scenario_id;
        frame.index = static_cast<int>(i);
        frame.timestamp_s = static_cast<double>(i) * spec.interval_s;
        frame.image = load_image(entries[i].path);
        frame.source_path = entries[i].path.string();
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

#ifdef HAZARDQA_WITH_VIDEO
FrameSequence sample_video(const std::string& scenario_id, const std::filesystem::path& path,
                           const SamplingSpec& spec) {
    cv::VideoCapture capture(path.string());
    if (!capture.isOpened()) {
        throw UndecodableImage("cannot open video " + path.string());
    }
    const double fps = capture.get(cv::CAP_PROP_FPS);
    if (!(fps > 0.0)) {
        throw UndecodableImage("video reports no frame rate: " + path.string());
    }

    FrameSequence seq{scenario_id, {}, spec.interval_s};
    const auto target_for = [&](std::size_t k) {
        return static_cast<long long>(std::llround(static_cast<double>(k) * spec.interval_s * fps));
    };
    cv::Mat bgr;
    long long decoded = 0;
    while (capture.read(bgr)) {
        while (target_for(seq.frames.size()) == decoded) {
            cv::Mat rgb;
            cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
            Frame frame;
            frame.scenario_id = scenario_id;
            frame.index = static_cast<int>(seq.frames.size());
            frame.timestamp_s = static_cast<double>(frame.index) * spec.interval_s;
            frame.image = Image(rgb.cols, rgb.rows);
            for (int y = 0; y < rgb.rows; ++y) {
                const auto* row = rgb.ptr<std::uint8_t>(y);
                std::copy(row, row + static_cast<std::ptrdiff_t>(rgb.cols) * 3,
                          frame.image.pixels.begin() + static_cast<std::ptrdiff_t>(frame.image.offset(0, y)));
            }
            frame.source_path = path.string();
            seq.frames.push_back(std::move(frame));
            if (spec.max_frames && seq.frames.size() >= static_cast<std::size_t>(*spec.max_frames)) {
                return seq;
            }
        }
        ++decoded;
    }
    return seq;
}
#endif

}  // namespace

std::vector<int> Window::indices() const {
    std::vector<int> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        out.push_back(f.index);
    }
    return out;
}

bool video_decoding_available() {
#ifdef HAZARDQA_WITH_VIDEO
    return true;
#else
    return false;
#endif
}

FrameSequence sample_frames(const std::string& scenario_id, const std::filesystem::path& source,
                            const SamplingSpec& spec) {
    validate(spec);
    std::error_code ec;
    if (!std::filesystem::exists(source, ec)) {
        throw SourceNotFound("frame source does not exist: " + source.string());
    }

    FrameSequence seq;
    if (std::filesystem::is_directory(source, ec)) {
        seq = sample_directory(scenario_id, source, spec);
    } else {
#ifdef HAZARDQA_WITH_VIDEO
        seq = sample_video(scenario_id, source, spec);
#else
        throw InvalidArgument("video sources need a build with HAZARDQA_WITH_VIDEO: " + source.string());
#endif
    }
    if (seq.frames.empty()) {
        throw EmptySource("no frames sampled from " + source.string());
    }
    return seq;
}

Window make_window(const FrameSequence& seq, int t_i, int n) {
    if (n < 1) {
        throw InvalidArgument("window length must be >= 1");
    }
    if (t_i < 0 || static_cast<std::size_t>(t_i) + static_cast<std::size_t>(n) > seq.frames.size()) {
        throw OutOfRange("window (t_i=" + std::to_string(t_i) + ", n=" + std::to_string(n) +
                         ") exceeds sequence of " + std::to_string(seq.frames.size()) + " frames");
    }
    Window window{t_i, n, {}};
    window.frames.assign(seq.frames.begin() + t_i, seq.frames.begin() + t_i + n);
    return window;
}

std::vector<Window> enumerate_windows(const FrameSequence& seq, int n, int stride) {
    if (n < 1 || stride < 1) {
        throw InvalidArgument("window length and stride must be >= 1");
    }
    std::vector<Window> windows;
    const auto len = static_cast<int>(seq.frames.size());
    for (int start = 0; start + n <= len; start += stride) {
        windows.push_back(make_window(seq, start, n));
    }
    return windows;
}

}  // namespace hazardqa
