#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "ucreat/error.hpp"

namespace ucreat::detail {

/// Incremental SHA-256, hex-encoded on finish.
class sha256 {
  public:
    sha256() : m_ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free)
    {
        if (!m_ctx || EVP_DigestInit_ex(m_ctx.get(), EVP_sha256(), nullptr) != 1) {
            throw error("sha256 initialisation failed");
        }
    }

    sha256& update(std::string_view data)
    {
        EVP_DigestUpdate(m_ctx.get(), data.data(), data.size());
        return *this;
    }

    std::string hex()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(m_ctx.get(), digest.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(len * 2);
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[digest[i] >> 4];
            out += digits[digest[i] & 0x0f];
        }
        return out;
    }

  private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> m_ctx;
};

inline std::string sha256_hex(std::string_view data)
{
    return sha256().update(data).hex();
}

}  // namespace ucreat::detail
