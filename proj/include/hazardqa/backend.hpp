#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hazardqa {

class ResponseStore;

struct GenerationParams {
    double temperature = 0.2;
    int max_tokens = 256;

    friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

enum class BackendKind { HttpGeneric, Mock };

std::string_view backend_kind_name(BackendKind kind);

struct BackendConfig {
    BackendKind kind = BackendKind::Mock;
    std::string name = "mock";
    double timeout_s = 60.0;
    int max_retries = 3;
    double rate_limit_rps = 1.0;
    GenerationParams generation;

    // http_generic
    std::string endpoint_url;
    std::string auth_env_var;
    /// JSON body with placeholders {{prompt}}, {{images_b64[]}}, {{temperature}},
    /// {{max_tokens}} and {{model}}. Each placeholder expands to a JSON value.
    std::string body_template;
    /// Per-image element inside {{images_b64[]}}; {{image_b64}} is the base64 PNG string.
    std::string image_item_template = "{{image_b64}}";
    /// JSON pointer to the answer text in the response body.
    std::string response_pointer = "/text";

    // mock
    std::string fixtures_path;
};

/// Throws ConfigError when an invariant on the config does not hold.
void validate(const BackendConfig& config);

/// Routing metadata carried with each request as
/// `x-meta: scenario=<id>;stage=<name>;variant=<label>`.
struct RequestMeta {
    std::string scenario;
    std::string stage;
    std::string variant;

    std::string header() const;
    static RequestMeta parse(std::string_view header);

    friend bool operator==(const RequestMeta&, const RequestMeta&) = default;
};

struct ModelRequest {
    std::string prompt_text;
    std::vector<std::string> images;  // PNG bytes, in prompt order
    GenerationParams generation;
    std::string backend_name;
    RequestMeta meta;
};

struct ModelResponse {
    std::string text;
    double latency_ms = 0.0;
    bool from_cache = false;
    int attempt_count = 0;  // network attempts; 0 for cache hits
};

struct CacheKey {
    std::string digest;  // 64 lowercase hex chars

    friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// SHA-256 over (backend_name, prompt_text, each image, temperature,
/// max_tokens), each length-framed. Request metadata is not part of the key.
CacheKey cache_key(const ModelRequest& request);

/// Outcome of one network attempt. On status 200 `text` holds the
/// extracted answer.
struct TransportReply {
    int status = 0;
    std::string text;
    bool timed_out = false;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportReply send(const ModelRequest& request) = 0;
};

/// Time source and sleeper. Tests substitute fakes so retry and
/// rate-limit behaviour is observable without real delays.
struct ClientClock {
    using Clock = std::chrono::steady_clock;
    std::function<Clock::time_point()> now;
    std::function<void(Clock::duration)> sleep_for;

    static ClientClock system();
};

/// Spaces dispatches at least 1/rps apart, so any window of length T holds
/// at most ceil(T * rps) + 1 dispatches.
class RateLimiter {
public:
    explicit RateLimiter(double rps);

    /// Reserves the next dispatch slot and returns when it may proceed.
    ClientClock::Clock::time_point reserve(ClientClock::Clock::time_point now);

private:
    std::mutex mutex_;
    ClientClock::Clock::duration spacing_;
    ClientClock::Clock::time_point next_free_{};
    bool first_ = true;
};

struct BackoffPolicy {
    double base_s = 1.0;
    double factor = 2.0;
    double jitter = 0.2;

    /// Delay before retry number `retry` (1-based), with `unit` in [-1, 1]
    /// scaling the jitter band.
    double delay_s(int retry, double unit) const;
};

/// Uniform front-end over a transport: content-addressed caching, rate
/// limiting and retry with exponential backoff on 429, 5xx and timeouts.
/// Safe to share between threads.
class ModelClient {
public:
    ModelClient(BackendConfig config, std::shared_ptr<Transport> transport,
                std::shared_ptr<ResponseStore> cache, ClientClock clock = ClientClock::system(),
                BackoffPolicy backoff = {});

    /// Throws ExhaustedRetries, RequestRejected, MalformedResponse, or
    /// anything the transport raises (FixtureMiss on the mock).
    ModelResponse query(const ModelRequest& request);

    const BackendConfig& config() const { return config_; }

private:
    double jitter_unit();

    BackendConfig config_;
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<ResponseStore> cache_;
    ClientClock clock_;
    BackoffPolicy backoff_;
    RateLimiter limiter_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

/// Builds the transport named by `config.kind`. For http_generic this
/// reads the bearer token and throws AuthMissing when it is unset.
std::shared_ptr<Transport> make_transport(const BackendConfig& config);

}  // namespace hazardqa
