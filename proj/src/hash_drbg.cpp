#include "qrng/hash_drbg.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "qrng/error.hpp"
#include "qrng/sha256.hpp"

namespace qrng {

void add_mod_440(Seed440& a, std::span<const std::uint8_t> b) {
  if (b.size() > a.size()) fail(ErrorKind::InvalidArgument, "add_mod_440: operand too wide");
  unsigned carry = 0;
  std::size_t bi = b.size();
  for (std::size_t ai = a.size(); ai-- > 0;) {
    unsigned sum = a[ai] + carry;
    if (bi > 0) sum += b[--bi];
    else if (carry == 0) break;
    a[ai] = static_cast<std::uint8_t>(sum);
    carry = sum >> 8;
  }
}

void add_mod_440(Seed440& a, std::uint64_t b) {
  std::array<std::uint8_t, 8> be{};
  for (int i = 7; i >= 0; --i, b >>= 8) be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(b);
  add_mod_440(a, be);
}

EntropyInput EntropyInput::from_bytes(std::span<const std::uint8_t> bytes) {
  return {Bytes(bytes.begin(), bytes.end()), bytes.size() * 8};
}

EntropyInput EntropyInput::from_hex(std::string_view hex) {
  return {hex_to_bytes(hex), hex.size() * 4};
}

namespace {

Bytes hash_df_parts(std::initializer_list<std::span<const std::uint8_t>> parts,
                    std::size_t n_bits) {
  if (n_bits == 0 || n_bits > drbg::kMaxHashDfBits) {
    fail(ErrorKind::InvalidArgument,
         "hash_df: requested " + std::to_string(n_bits) + " bits, allowed 1.." +
             std::to_string(drbg::kMaxHashDfBits));
  }
  const std::size_t len = hashgen_block_count(n_bits);
  const std::array<std::uint8_t, 4> bits_be = {
      static_cast<std::uint8_t>(n_bits >> 24), static_cast<std::uint8_t>(n_bits >> 16),
      static_cast<std::uint8_t>(n_bits >> 8), static_cast<std::uint8_t>(n_bits)};

  Bytes temp;
  temp.reserve(len * 32);
  Sha256 h;
  for (std::size_t counter = 1; counter <= len; ++counter) {
    const std::uint8_t counter_byte = static_cast<std::uint8_t>(counter);
    h.update({&counter_byte, 1}).update(bits_be);
    for (auto part : parts) h.update(part);
    const Sha256Digest d = h.finish();
    temp.insert(temp.end(), d.begin(), d.end());
  }
  temp.resize((n_bits + 7) / 8);
  if (n_bits % 8 != 0) temp.back() &= static_cast<std::uint8_t>(0xff00u >> (n_bits % 8));
  return temp;
}

Seed440 to_seed(const Bytes& b) {
  Seed440 s{};
  std::copy(b.begin(), b.end(), s.begin());
  return s;
}

void derive_constant(DrbgState& state) {
  const std::uint8_t zero = 0x00;
  state.c = to_seed(hash_df_parts({{&zero, 1}, state.v}, drbg::kSeedlenBits));
}

void require_entropy(const EntropyInput& entropy, const char* who) {
  if (entropy.assessed_bits < drbg::kSecurityStrength) {
    fail(ErrorKind::InsufficientEntropy,
         std::string(who) + ": entropy input carries " + std::to_string(entropy.assessed_bits) +
             " bits, need at least " + std::to_string(drbg::kSecurityStrength));
  }
}

void check_request(const DrbgState& state, std::size_t n_bits) {
  if (n_bits > drbg::kMaxBitsPerRequest) {
    fail(ErrorKind::RequestTooLarge,
         "generate: request of " + std::to_string(n_bits) + " bits exceeds " +
             std::to_string(drbg::kMaxBitsPerRequest));
  }
  if (state.reseed_counter == 0) {
    fail(ErrorKind::InvalidArgument, "generate: state is not instantiated");
  }
  if (state.reseed_counter > state.reseed_interval) {
    fail(ErrorKind::ReseedRequired, "generate: reseed interval exhausted, reseed required");
  }
}

// Writes the leftmost n_bits of Hash(V) || Hash(V+1) || ... into out.
void hashgen(const Seed440& v, std::size_t n_bits, std::span<std::uint8_t> out, Sha256& h) {
  Seed440 data = v;
  const std::size_t n_bytes = (n_bits + 7) / 8;
  std::size_t written = 0;
  while (written < n_bytes) {
    const Sha256Digest d = h.update(data).finish();
    const std::size_t take = std::min(d.size(), n_bytes - written);
    std::copy_n(d.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(written));
    written += take;
    add_mod_440(data, std::uint64_t{1});
  }
  if (n_bits % 8 != 0) out[n_bytes - 1] &= static_cast<std::uint8_t>(0xff00u >> (n_bits % 8));
}

// V = V + Hash(0x03 || V) + C + reseed_counter; reseed_counter += 1.
void advance(DrbgState& state, Sha256& h) {
  const std::uint8_t three = 0x03;
  const Sha256Digest hv = h.update({&three, 1}).update(state.v).finish();
  add_mod_440(state.v, hv);
  add_mod_440(state.v, state.c);
  add_mod_440(state.v, state.reseed_counter);
  ++state.reseed_counter;
}

}  // namespace

Bytes hash_df(std::span<const std::uint8_t> input, std::size_t n_bits) {
  return hash_df_parts({input}, n_bits);
}

DrbgState instantiate(const EntropyInput& entropy, std::span<const std::uint8_t> nonce,
                      std::span<const std::uint8_t> personalization,
                      std::uint64_t reseed_interval) {
  require_entropy(entropy, "instantiate");
  if (reseed_interval == 0) fail(ErrorKind::InvalidArgument, "reseed interval must be positive");
  DrbgState state;
  state.v = to_seed(hash_df_parts({entropy.bytes, nonce, personalization}, drbg::kSeedlenBits));
  derive_constant(state);
  state.reseed_counter = 1;
  state.reseed_interval = reseed_interval;
  return state;
}

void reseed(DrbgState& state, const EntropyInput& entropy,
            std::span<const std::uint8_t> additional_input) {
  if (state.reseed_counter == 0) fail(ErrorKind::InvalidArgument, "reseed: state is not instantiated");
  require_entropy(entropy, "reseed");
  const std::uint8_t one = 0x01;
  state.v = to_seed(
      hash_df_parts({{&one, 1}, state.v, entropy.bytes, additional_input}, drbg::kSeedlenBits));
  derive_constant(state);
  state.reseed_counter = 1;
}

Bytes generate(DrbgState& state, std::size_t n_bits,
               std::span<const std::uint8_t> additional_input) {
  check_request(state, n_bits);
  Sha256 h;
  if (!additional_input.empty()) {
    const std::uint8_t two = 0x02;
    const Sha256Digest w = h.update({&two, 1}).update(state.v).update(additional_input).finish();
    add_mod_440(state.v, w);
  }
  Bytes out((n_bits + 7) / 8);
  hashgen(state.v, n_bits, out, h);
  advance(state, h);
  return out;
}

Bytes generate_bulk(DrbgState& state, std::uint64_t total_bits, std::size_t request_bits,
                    unsigned workers) {
  if (request_bits == 0 || request_bits % 8 != 0) {
    fail(ErrorKind::InvalidArgument, "generate_bulk: request size must be a positive multiple of 8");
  }
  if (total_bits == 0 || total_bits % request_bits != 0) {
    fail(ErrorKind::InvalidArgument, "generate_bulk: total bits must be a positive multiple of the request size");
  }
  if (workers == 0) fail(ErrorKind::InvalidArgument, "generate_bulk: workers must be at least 1");
  check_request(state, request_bits);

  const std::uint64_t requests = total_bits / request_bits;
  if (requests > state.reseed_interval - state.reseed_counter + 1) {
    fail(ErrorKind::ReseedRequired,
         "generate_bulk: " + std::to_string(requests) +
             " requests exceed the remaining reseed interval");
  }

  // Serial part: the starting V of every request.
  std::vector<Seed440> starts(requests);
  {
    Sha256 h;
    for (std::uint64_t r = 0; r < requests; ++r) {
      starts[r] = state.v;
      advance(state, h);
    }
  }

  const std::size_t request_bytes = request_bits / 8;
  Bytes out(requests * request_bytes);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    Sha256 h;
    for (std::uint64_t r = next.fetch_add(1); r < requests; r = next.fetch_add(1)) {
      hashgen(starts[r], request_bits,
              std::span<std::uint8_t>(out).subspan(r * request_bytes, request_bytes), h);
    }
  };

  const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, requests));
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
  }
  return out;
}

}  // namespace qrng
