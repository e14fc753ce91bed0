#ifndef TDLSM_SHA256_HPP
#define TDLSM_SHA256_HPP

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlsm {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256, used for dataset payload hashes and config hashes.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new())
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n)
    {
        if (EVP_DigestUpdate(ctx_, data, n) != 1)
            throw std::runtime_error("sha256 update failed");
    }

    Digest finish()
    {
        Digest d{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, d.data(), &len) != 1 || len != d.size())
            throw std::runtime_error("sha256 final failed");
        return d;
    }

    static Digest of(const void* data, std::size_t n)
    {
        Sha256 h;
        h.update(data, n);
        return h.finish();
    }

    static Digest of(const std::string& s) { return of(s.data(), s.size()); }

private:
    EVP_MD_CTX* ctx_ = nullptr;
};

inline std::string hex(const Digest& d)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto b : d) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

} // namespace tdlsm

#endif
