#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace hazardqa {

/// Incremental SHA-256. Field helpers frame each value with its length so
/// that concatenations of different field splits never collide.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::string_view bytes);
    Sha256& field(std::string_view bytes);
    Sha256& field_u64(std::uint64_t value);
    Sha256& field_f64(double value);

    /// Lowercase hex digest (64 chars). The hasher is spent afterwards.
    std::string hex_digest();

private:
    struct State;
    std::unique_ptr<State> state_;
};

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

}  // namespace hazardqa
