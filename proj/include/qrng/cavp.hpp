#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qrng/bits.hpp"

namespace qrng {

/// One COUNT block of a DRBGVS response file.
struct CavpCase {
  std::size_t count = 0;
  Bytes entropy_input;
  Bytes nonce;
  Bytes personalization;
  bool has_reseed = false;
  Bytes entropy_input_reseed;
  Bytes additional_input_reseed;
  std::vector<Bytes> additional_input;
  std::vector<Bytes> entropy_input_pr;
  Bytes returned_bits;
};

/// A bracketed section such as [SHA-256] followed by its parameter lines.
struct CavpGroup {
  std::string hash;
  bool prediction_resistance = false;
  std::map<std::string, std::size_t> lengths;
  std::vector<CavpCase> cases;

  std::string describe() const;
};

/// Parses DRBGVS request/response text. Groups for every hash are
/// returned; callers filter on `hash`.
std::vector<CavpGroup> parse_drbgvs(std::istream& in);

/// Replays a case against Hash_DRBG(SHA-256): instantiate, optional
/// reseed, then one generate per AdditionalInput line. Returns the output
/// of the final generate.
Bytes run_cavp_case(const CavpGroup& group, const CavpCase& test);

}  // namespace qrng
