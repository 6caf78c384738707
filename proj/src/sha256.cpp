#include "qrng/sha256.hpp"

#include <openssl/evp.h>

#include "qrng/error.hpp"

namespace qrng {

struct Sha256::Ctx {
  EVP_MD_CTX* md = nullptr;
  ~Ctx() { EVP_MD_CTX_free(md); }
};

Sha256::Sha256() : ctx_(std::make_unique<Ctx>()) {
  ctx_->md = EVP_MD_CTX_new();
  if (ctx_->md == nullptr || EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "SHA-256: failed to initialise OpenSSL digest context");
  }
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(std::span<const std::uint8_t> data) {
  if (!data.empty() && EVP_DigestUpdate(ctx_->md, data.data(), data.size()) != 1) {
    fail(ErrorKind::Io, "SHA-256: update failed");
  }
  return *this;
}

Sha256Digest Sha256::finish() {
  Sha256Digest out{};
  unsigned len = 0;
  if (EVP_DigestFinal_ex(ctx_->md, out.data(), &len) != 1 || len != out.size() ||
      EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "SHA-256: finalisation failed");
  }
  return out;
}

Sha256Digest sha256(std::span<const std::uint8_t> data) {
  return Sha256().update(data).finish();
}

Sha256Digest sha256(std::initializer_list<std::span<const std::uint8_t>> parts) {
  Sha256 h;
  for (auto part : parts) h.update(part);
  return h.finish();
}

}  // namespace qrng
