#include "satakit/digest.hpp"

#include <openssl/evp.h>

#include <memory>

#include "satakit/error.hpp"

namespace satakit {
namespace {

struct MdCtxFree {
  void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

Digest256 run_digest(const EVP_MD* md, ByteView data) {
  std::unique_ptr<EVP_MD_CTX, MdCtxFree> ctx(EVP_MD_CTX_new());
  Digest256 out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("OpenSSL digest failure");
  }
  return out;
}

}  // namespace

Digest256 sha256(ByteView data) { return run_digest(EVP_sha256(), data); }

Digest256 sha3_256(ByteView data) { return run_digest(EVP_sha3_256(), data); }

}  // namespace satakit
