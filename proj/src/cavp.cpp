#include "qrng/cavp.hpp"

#include <algorithm>
#include <istream>

#include "qrng/error.hpp"
#include "qrng/hash_drbg.hpp"

namespace qrng {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string CavpGroup::describe() const {
  std::string d = "[" + hash + "] PR=" + (prediction_resistance ? "True" : "False");
  for (const auto& [k, v] : lengths) d += " " + k + "=" + std::to_string(v);
  return d;
}

std::vector<CavpGroup> parse_drbgvs(std::istream& in) {
  std::vector<CavpGroup> groups;
  CavpCase* current = nullptr;
  bool header_open = false;

  std::string raw;
  std::uint64_t offset = 0;
  while (std::getline(in, raw)) {
    const std::uint64_t line_offset = offset;
    offset += raw.size() + 1;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("unterminated section header", line_offset);
      const std::string body = trim(line.substr(1, line.size() - 2));
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        if (!header_open) {
          groups.emplace_back();
          header_open = true;
        }
        groups.back().hash = body;
      } else {
        if (groups.empty()) throw FormatError("parameter before hash section", line_offset);
        if (!header_open) {
          // A new parameter block without a repeated hash line.
          CavpGroup next;
          next.hash = groups.back().hash;
          groups.push_back(std::move(next));
          header_open = true;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key == "PredictionResistance") {
          groups.back().prediction_resistance = (value == "True");
        } else {
          try {
            groups.back().lengths[key] = std::stoul(value);
          } catch (const std::exception&) {
            throw FormatError("invalid value for " + key, line_offset);
          }
        }
      }
      current = nullptr;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected 'Name = value'", line_offset);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (groups.empty()) throw FormatError("test case before any section header", line_offset);
    header_open = false;

    if (key == "COUNT") {
      groups.back().cases.emplace_back();
      current = &groups.back().cases.back();
      current->count = std::stoul(value);
      continue;
    }
    if (current == nullptr) throw FormatError("field '" + key + "' before COUNT", line_offset);

    Bytes bytes;
    try {
      bytes = hex_to_bytes(value);
    } catch (const FormatError& e) {
      throw FormatError("invalid hex in " + key, line_offset + raw.find(value) + e.offset());
    }
    if (key == "EntropyInput") current->entropy_input = std::move(bytes);
    else if (key == "Nonce") current->nonce = std::move(bytes);
    else if (key == "PersonalizationString") current->personalization = std::move(bytes);
    else if (key == "EntropyInputReseed") {
      current->has_reseed = true;
      current->entropy_input_reseed = std::move(bytes);
    } else if (key == "AdditionalInputReseed") current->additional_input_reseed = std::move(bytes);
    else if (key == "AdditionalInput") current->additional_input.push_back(std::move(bytes));
    else if (key == "EntropyInputPR") current->entropy_input_pr.push_back(std::move(bytes));
    else if (key == "ReturnedBits") current->returned_bits = std::move(bytes);
    else throw FormatError("unknown field '" + key + "'", line_offset);
  }
  return groups;
}

Bytes run_cavp_case(const CavpGroup& group, const CavpCase& test) {
  if (group.hash != "SHA-256") {
    fail(ErrorKind::InvalidArgument, "only SHA-256 Hash_DRBG cases are supported, got " + group.hash);
  }
  const auto it = group.lengths.find("ReturnedBitsLen");
  const std::size_t out_bits =
      it != group.lengths.end() ? it->second : test.returned_bits.size() * 8;

  DrbgState state =
      instantiate(EntropyInput::from_bytes(test.entropy_input), test.nonce, test.personalization);
  if (test.has_reseed) {
    reseed(state, EntropyInput::from_bytes(test.entropy_input_reseed), test.additional_input_reseed);
  }
  const std::size_t calls = std::max<std::size_t>(test.additional_input.size(), 2);
  Bytes out;
  for (std::size_t i = 0; i < calls; ++i) {
    const Bytes empty;
    const Bytes& adin = i < test.additional_input.size() ? test.additional_input[i] : empty;
    if (group.prediction_resistance) {
      if (i >= test.entropy_input_pr.size()) {
        fail(ErrorKind::InvalidArgument, "prediction-resistance case lacks EntropyInputPR");
      }
      reseed(state, EntropyInput::from_bytes(test.entropy_input_pr[i]), adin);
      out = generate(state, out_bits);
    } else {
      out = generate(state, out_bits, adin);
    }
  }
  return out;
}

}  // namespace qrng
