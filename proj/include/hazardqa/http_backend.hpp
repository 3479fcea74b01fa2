#pragma once

#include <string>

#include "hazardqa/backend.hpp"

namespace hazardqa {

/// Expands the configured body template for one request. The result is
/// validated as JSON; throws ConfigError if the template does not produce it.
std::string render_request_body(const BackendConfig& config, const ModelRequest& request);

/// Pulls the answer text out of a response body via the configured JSON
/// pointer. Throws MalformedResponse if it is absent, empty or not a string.
std::string extract_response_text(const BackendConfig& config, const std::string& body);

/// Generic JSON-over-HTTP(S) adapter. Sends `Authorization: Bearer <token>`
/// and the request metadata as an `x-meta` header.
class HttpTransport : public Transport {
public:
    /// Throws AuthMissing when `config.auth_env_var` is unset or empty.
    explicit HttpTransport(BackendConfig config);

    TransportReply send(const ModelRequest& request) override;

private:
    BackendConfig config_;
    std::string token_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;
};

}  // namespace hazardqa
