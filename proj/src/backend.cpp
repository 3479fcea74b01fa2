#include "hazardqa/backend.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <thread>

#include "hazardqa/cache.hpp"
#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

bool retryable(const TransportReply& reply) {
    return reply.timed_out || reply.status == 0 || reply.status == 429 || reply.status >= 500;
}

std::string utc_now_iso() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string_view backend_kind_name(BackendKind kind) {
    return kind == BackendKind::HttpGeneric ? "http_generic" : "mock";
}

void validate(const BackendConfig& config) {
    if (config.name.empty()) {
        throw ConfigError("backend name must be set");
    }
    if (!(config.timeout_s > 0.0)) {
        throw ConfigError("backend timeout_s must be > 0");
    }
    if (config.max_retries < 0) {
        throw ConfigError("backend max_retries must be >= 0");
    }
    if (!(config.rate_limit_rps > 0.0)) {
        throw ConfigError("backend rate_limit_rps must be > 0");
    }
    if (!(config.generation.temperature >= 0.0 && config.generation.temperature <= 2.0)) {
        throw ConfigError("temperature must lie in [0, 2]");
    }
    if (config.generation.max_tokens < 1) {
        throw ConfigError("max_tokens must be >= 1");
    }
    if (config.kind == BackendKind::HttpGeneric) {
        if (config.endpoint_url.empty()) {
            throw ConfigError("http_generic backend needs endpoint_url");
        }
        if (config.body_template.empty()) {
            throw ConfigError("http_generic backend needs body_template");
        }
        if (config.auth_env_var.empty()) {
            throw ConfigError("http_generic backend needs auth_env_var");
        }
    } else if (config.fixtures_path.empty()) {
        throw ConfigError("mock backend needs fixtures_path");
    }
}

std::string RequestMeta::header() const {
    return "scenario=" + scenario + ";stage=" + stage + ";variant=" + variant;
}

RequestMeta RequestMeta::parse(std::string_view header) {
    RequestMeta meta;
    while (!header.empty()) {
        const auto end = header.find(';');
        const auto part = header.substr(0, end);
        const auto eq = part.find('=');
        if (eq != std::string_view::npos) {
            const auto name = part.substr(0, eq);
            const std::string value(part.substr(eq + 1));
            if (name == "scenario") {
                meta.scenario = value;
            } else if (name == "stage") {
                meta.stage = value;
            } else if (name == "variant") {
                meta.variant = value;
            }
        }
        if (end == std::string_view::npos) {
            break;
        }
        header.remove_prefix(end + 1);
    }
    return meta;
}

CacheKey cache_key(const ModelRequest& request) {
    Sha256 hasher;
    hasher.field("hazardqa-response-v1");
    hasher.field(request.backend_name);
    hasher.field(request.prompt_text);
    hasher.field_u64(request.images.size());
    for (const auto& image : request.images) {
        hasher.field(image);
    }
    hasher.field_f64(request.generation.temperature);
    hasher.field_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(request.generation.max_tokens)));
    return CacheKey{hasher.hex_digest()};
}

ClientClock ClientClock::system() {
    ClientClock clock;
    clock.now = [] { return Clock::now(); };
    clock.sleep_for = [](Clock::duration d) {
        if (d > Clock::duration::zero()) {
            std::this_thread::sleep_for(d);
        }
    };
    return clock;
}

RateLimiter::RateLimiter(double rps)
    : spacing_(std::chrono::duration_cast<ClientClock::Clock::duration>(std::chrono::duration<double>(1.0 / rps))) {}

ClientClock::Clock::time_point RateLimiter::reserve(ClientClock::Clock::time_point now) {
    std::lock_guard lock(mutex_);
    const auto slot = (first_ || now > next_free_) ? now : next_free_;
    first_ = false;
    next_free_ = slot + spacing_;
    return slot;
}

double BackoffPolicy::delay_s(int retry, double unit) const {
    const double nominal = base_s * std::pow(factor, std::max(0, retry - 1));
    return nominal * (1.0 + jitter * std::clamp(unit, -1.0, 1.0));
}

ModelClient::ModelClient(BackendConfig config, std::shared_ptr<Transport> transport,
                         std::shared_ptr<ResponseStore> cache, ClientClock clock, BackoffPolicy backoff)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(std::move(cache)),
      clock_(std::move(clock)),
      backoff_(backoff),
      limiter_(config_.rate_limit_rps),
      rng_(std::random_device{}()) {
    if (!transport_) {
        throw InvalidArgument("ModelClient needs a transport");
    }
}

double ModelClient::jitter_unit() {
    std::lock_guard lock(rng_mutex_);
    return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_);
}

ModelResponse ModelClient::query(const ModelRequest& request) {
    if (request.prompt_text.empty()) {
        throw InvalidArgument("request prompt is empty");
    }
    const CacheKey key = cache_key(request);
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            return ModelResponse{hit->text, hit->latency_ms, true, 0};
        }
    }

    TransportReply reply;
    int attempts = 0;
    for (;;) {
        const auto slot = limiter_.reserve(clock_.now());
        clock_.sleep_for(slot - clock_.now());

        const auto started = clock_.now();
        reply = transport_->send(request);
        ++attempts;
        const double latency_ms =
            std::chrono::duration<double, std::milli>(clock_.now() - started).count();

        if (!reply.timed_out && reply.status == 200) {
            if (reply.text.empty()) {
                throw MalformedResponse("backend '" + config_.name + "' returned an empty answer");
            }
            ModelResponse response{reply.text, latency_ms, false, attempts};
            if (cache_) {
                cache_->put(key, CachedResponse{key.digest, config_.name, response.text, latency_ms, utc_now_iso()});
            }
            return response;
        }
        if (!retryable(reply)) {
            throw RequestRejected("backend '" + config_.name + "' rejected the request with HTTP " +
                                  std::to_string(reply.status));
        }
        if (attempts > config_.max_retries) {
            break;
        }
        const double delay = backoff_.delay_s(attempts, jitter_unit());
        clock_.sleep_for(std::chrono::duration_cast<ClientClock::Clock::duration>(std::chrono::duration<double>(delay)));
    }
    const std::string what = reply.timed_out ? std::string("timeout") : "HTTP " + std::to_string(reply.status);
    throw ExhaustedRetries(reply.timed_out ? 0 : reply.status,
                           "backend '" + config_.name + "' failed after " + std::to_string(attempts) +
                               " attempts; last: " + what);
}

}  // namespace hazardqa
