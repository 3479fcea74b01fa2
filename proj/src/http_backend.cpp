#include "hazardqa/http_backend.hpp"

#include <chrono>
#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"
#include "hazardqa/mock_backend.hpp"

namespace hazardqa {

namespace {

std::string replace_all(std::string text, std::string_view needle, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

void split_url(const std::string& url, std::string& origin, std::string& path) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint_url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    origin = url.substr(0, path_start);
    path = path_start == std::string::npos ? "/" : url.substr(path_start);
}

}  // namespace

std::string render_request_body(const BackendConfig& config, const ModelRequest& request) {
    std::string images = "[";
    for (std::size_t i = 0; i < request.images.size(); ++i) {
        if (i != 0) {
            images += ",";
        }
        images += replace_all(config.image_item_template, "{{image_b64}}",
                              nlohmann::json(base64_encode(request.images[i])).dump());
    }
    images += "]";

    std::string body = config.body_template;
    body = replace_all(body, "{{images_b64[]}}", images);
    body = replace_all(body, "{{prompt}}", nlohmann::json(request.prompt_text).dump());
    body = replace_all(body, "{{model}}", nlohmann::json(config.name).dump());
    body = replace_all(body, "{{temperature}}", nlohmann::json(request.generation.temperature).dump());
    body = replace_all(body, "{{max_tokens}}", std::to_string(request.generation.max_tokens));
    if (!nlohmann::json::accept(body)) {
        throw ConfigError("body_template for backend '" + config.name + "' does not expand to valid JSON");
    }
    return body;
}

std::string extract_response_text(const BackendConfig& config, const std::string& body) {
    try {
        const auto doc = nlohmann::json::parse(body);
        const auto& node = doc.at(nlohmann::json::json_pointer(config.response_pointer));
        if (!node.is_string() || node.get_ref<const std::string&>().empty()) {
            throw MalformedResponse("response field " + config.response_pointer + " is not a non-empty string");
        }
        return node.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse("no text at " + config.response_pointer + " in response: " + e.what());
    }
}

HttpTransport::HttpTransport(BackendConfig config) : config_(std::move(config)) {
    const char* token = std::getenv(config_.auth_env_var.c_str());
    if (config_.auth_env_var.empty() || token == nullptr || *token == '\0') {
        throw AuthMissing("environment variable '" + config_.auth_env_var + "' holding the bearer token is not set");
    }
    token_ = token;
    split_url(config_.endpoint_url, origin_, path_);
}

TransportReply HttpTransport::send(const ModelRequest& request) {
    const std::string body = render_request_body(config_, request);

    httplib::Client client(origin_);
    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_bearer_token_auth(token_);

    const httplib::Headers headers = {{"x-meta", request.meta.header()}};
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
        // Connection failures and timeouts are both treated as transient.
        return TransportReply{0, {}, true};
    }
    if (result->status != 200) {
        return TransportReply{result->status, {}, false};
    }
    return TransportReply{200, extract_response_text(config_, result->body), false};
}

std::shared_ptr<Transport> make_transport(const BackendConfig& config) {
    if (config.kind == BackendKind::HttpGeneric) {
        return std::make_shared<HttpTransport>(config);
    }
    auto mock = std::make_shared<MockBackend>(load_fixtures(config.fixtures_path));
    mock->set_capture(false);
    return mock;
}

}  // namespace hazardqa
