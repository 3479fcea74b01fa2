#pragma once

#include <stdexcept>
#include <string>

namespace hazardqa {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable name used in diagnostics and run logs.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HAZARDQA_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

// Precondition violations on public operations.
HAZARDQA_DEFINE_ERROR(InvalidArgument);

// ingest
HAZARDQA_DEFINE_ERROR(SourceNotFound);
HAZARDQA_DEFINE_ERROR(UndecodableImage);
HAZARDQA_DEFINE_ERROR(EmptySource);
HAZARDQA_DEFINE_ERROR(OutOfRange);

// augment / prompt
HAZARDQA_DEFINE_ERROR(DuplicateLabel);
HAZARDQA_DEFINE_ERROR(ForwardReference);
HAZARDQA_DEFINE_ERROR(TemplateError);

// backend
HAZARDQA_DEFINE_ERROR(AuthMissing);
HAZARDQA_DEFINE_ERROR(MalformedResponse);
HAZARDQA_DEFINE_ERROR(FixtureMiss);
HAZARDQA_DEFINE_ERROR(CacheCorrupt);
// Non-retryable HTTP status (4xx other than 429).
HAZARDQA_DEFINE_ERROR(RequestRejected);

class ExhaustedRetries : public Error {
public:
    ExhaustedRetries(int last_status, const std::string& message)
        : Error("ExhaustedRetries", message), last_status_(last_status) {}

    /// HTTP status of the final attempt; 0 when it timed out or never connected.
    int last_status() const noexcept { return last_status_; }

private:
    int last_status_;
};

// strategy / vote / eval
HAZARDQA_DEFINE_ERROR(UnparsableRisk);
HAZARDQA_DEFINE_ERROR(ScenarioTooShort);
HAZARDQA_DEFINE_ERROR(EmptyCandidates);
HAZARDQA_DEFINE_ERROR(UnknownScenario);
HAZARDQA_DEFINE_ERROR(EmptyRun);

// runstore / cli
HAZARDQA_DEFINE_ERROR(ConfigMismatch);
HAZARDQA_DEFINE_ERROR(IoFailure);
HAZARDQA_DEFINE_ERROR(ConfigError);

#undef HAZARDQA_DEFINE_ERROR

}  // namespace hazardqa
