#include "hazardqa/digest.hpp"

#include <bit>
#include <cstring>
#include <vector>

#include <openssl/evp.h>

#include "hazardqa/errors.hpp"

namespace hazardqa {

struct Sha256::State {
    EVP_MD_CTX* ctx = nullptr;
    bool finished = false;
};

Sha256::Sha256() : state_(std::make_unique<State>()) {
    state_->ctx = EVP_MD_CTX_new();
    if (state_->ctx == nullptr || EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr) != 1) {
        throw Error("CryptoFailure", "SHA-256 initialisation failed");
    }
}

Sha256::~Sha256() {
    EVP_MD_CTX_free(state_->ctx);
}

Sha256& Sha256::update(std::string_view bytes) {
    if (state_->finished) {
        throw InvalidArgument("Sha256 used after hex_digest()");
    }
    EVP_DigestUpdate(state_->ctx, bytes.data(), bytes.size());
    return *this;
}

Sha256& Sha256::field(std::string_view bytes) {
    field_u64(bytes.size());
    return update(bytes);
}

Sha256& Sha256::field_u64(std::uint64_t value) {
    char le[8];
    for (int i = 0; i < 8; ++i) {
        le[i] = static_cast<char>((value >> (8 * i)) & 0xffU);
    }
    return update(std::string_view(le, 8));
}

Sha256& Sha256::field_f64(double value) {
    return field_u64(std::bit_cast<std::uint64_t>(value));
}

std::string Sha256::hex_digest() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(state_->ctx, digest, &len);
    state_->finished = true;
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    Sha256 hasher;
    hasher.update(bytes);
    return hasher.hex_digest();
}

std::string base64_encode(std::string_view bytes) {
    std::vector<unsigned char> out(4 * ((bytes.size() + 2) / 3) + 1);
    const int written = EVP_EncodeBlock(out.data(), reinterpret_cast<const unsigned char*>(bytes.data()),
                                        static_cast<int>(bytes.size()));
    return {reinterpret_cast<const char*>(out.data()), static_cast<std::size_t>(written)};
}

}  // namespace hazardqa
