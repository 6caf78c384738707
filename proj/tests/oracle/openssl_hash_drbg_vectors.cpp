// Emits Hash_DRBG (SHA-256) known-answer vectors in DRBGVS response format,
// computed with OpenSSL's HASH-DRBG fed through a TEST-RAND parent.
// Inputs are drawn from std::random_device; the output is frozen under
// tests/data and replayed by the test suites.
//
//   openssl_hash_drbg_vectors no_reseed > file.rsp
//   openssl_hash_drbg_vectors pr_false  > file.rsp

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

namespace {

using Bytes = std::vector<unsigned char>;

Bytes random_bytes(std::random_device& rd, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<unsigned char>(rd());
  return b;
}

std::string hex(const Bytes& b) {
  static const char* d = "0123456789abcdef";
  std::string s;
  for (unsigned char x : b) {
    s.push_back(d[x >> 4]);
    s.push_back(d[x & 15]);
  }
  return s;
}

void check(int ok, const char* what) {
  if (ok != 1) {
    std::fprintf(stderr, "openssl: %s failed\n", what);
    std::exit(1);
  }
}

class OpensslHashDrbg {
 public:
  OpensslHashDrbg() {
    EVP_RAND* test = EVP_RAND_fetch(nullptr, "TEST-RAND", nullptr);
    EVP_RAND* hash = EVP_RAND_fetch(nullptr, "HASH-DRBG", nullptr);
    if (!test || !hash) check(0, "fetch");
    parent_ = EVP_RAND_CTX_new(test, nullptr);
    drbg_ = EVP_RAND_CTX_new(hash, parent_);
    EVP_RAND_free(test);
    EVP_RAND_free(hash);

    unsigned strength = 256;
    OSSL_PARAM p[] = {OSSL_PARAM_construct_uint(OSSL_RAND_PARAM_STRENGTH, &strength),
                      OSSL_PARAM_construct_end()};
    check(EVP_RAND_CTX_set_params(parent_, p), "parent strength");
    check(EVP_RAND_instantiate(parent_, strength, 0, nullptr, 0, nullptr), "parent instantiate");

    char digest[] = "SHA256";
    OSSL_PARAM d[] = {OSSL_PARAM_construct_utf8_string(OSSL_DRBG_PARAM_DIGEST, digest, 0),
                      OSSL_PARAM_construct_end()};
    check(EVP_RAND_CTX_set_params(drbg_, d), "digest");
  }

  ~OpensslHashDrbg() {
    EVP_RAND_CTX_free(drbg_);
    EVP_RAND_CTX_free(parent_);
  }

  void feed(const Bytes& entropy, const Bytes* nonce) {
    std::vector<OSSL_PARAM> p;
    p.push_back(OSSL_PARAM_construct_octet_string(OSSL_RAND_PARAM_TEST_ENTROPY,
                                                  const_cast<unsigned char*>(entropy.data()),
                                                  entropy.size()));
    if (nonce) {
      p.push_back(OSSL_PARAM_construct_octet_string(OSSL_RAND_PARAM_TEST_NONCE,
                                                    const_cast<unsigned char*>(nonce->data()),
                                                    nonce->size()));
    }
    p.push_back(OSSL_PARAM_construct_end());
    check(EVP_RAND_CTX_set_params(parent_, p.data()), "test entropy");
  }

  void instantiate(const Bytes& entropy, const Bytes& nonce, const Bytes& pers) {
    feed(entropy, &nonce);
    // A null personalization pointer makes OpenSSL substitute its own
    // default string, so an empty one must still be non-null.
    static const unsigned char empty = 0;
    const unsigned char* p = pers.empty() ? &empty : pers.data();
    check(EVP_RAND_instantiate(drbg_, 256, 0, p, pers.size(), nullptr), "instantiate");
  }

  void reseed(const Bytes& entropy, const Bytes& adin) {
    feed(entropy, nullptr);
    check(EVP_RAND_reseed(drbg_, 0, nullptr, 0, adin.data(), adin.size()), "reseed");
  }

  Bytes generate(std::size_t n, const Bytes& adin) {
    Bytes out(n);
    check(EVP_RAND_generate(drbg_, out.data(), n, 256, 0, adin.data(), adin.size()), "generate");
    return out;
  }

 private:
  EVP_RAND_CTX* parent_ = nullptr;
  EVP_RAND_CTX* drbg_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "no_reseed";
  const bool with_reseed = mode == "pr_false";
  std::random_device rd;

  std::printf("# Hash_DRBG SHA-256 known-answer vectors (%s)\n", mode.c_str());
  std::printf("# Generated with OpenSSL %s HASH-DRBG through a TEST-RAND parent.\n\n",
              OPENSSL_VERSION_TEXT);

  for (std::size_t pers_len : {0u, 256u}) {
    for (std::size_t adin_len : {0u, 256u}) {
      std::printf("[SHA-256]\n[PredictionResistance = False]\n[EntropyInputLen = 256]\n"
                  "[NonceLen = 128]\n[PersonalizationStringLen = %zu]\n"
                  "[AdditionalInputLen = %zu]\n[ReturnedBitsLen = 1024]\n\n",
                  pers_len, adin_len);
      for (int count = 0; count < 15; ++count) {
        const Bytes entropy = random_bytes(rd, 32);
        const Bytes nonce = random_bytes(rd, 16);
        const Bytes pers = random_bytes(rd, pers_len / 8);
        OpensslHashDrbg drbg;
        drbg.instantiate(entropy, nonce, pers);
        std::printf("COUNT = %d\nEntropyInput = %s\nNonce = %s\nPersonalizationString = %s\n",
                    count, hex(entropy).c_str(), hex(nonce).c_str(), hex(pers).c_str());
        if (with_reseed) {
          const Bytes entropy_reseed = random_bytes(rd, 32);
          const Bytes adin_reseed = random_bytes(rd, adin_len / 8);
          drbg.reseed(entropy_reseed, adin_reseed);
          std::printf("EntropyInputReseed = %s\nAdditionalInputReseed = %s\n",
                      hex(entropy_reseed).c_str(), hex(adin_reseed).c_str());
        }
        Bytes out;
        for (int call = 0; call < 2; ++call) {
          const Bytes adin = random_bytes(rd, adin_len / 8);
          out = drbg.generate(128, adin);
          std::printf("AdditionalInput = %s\n", hex(adin).c_str());
        }
        std::printf("ReturnedBits = %s\n\n", hex(out).c_str());
      }
    }
  }
  return 0;
}
