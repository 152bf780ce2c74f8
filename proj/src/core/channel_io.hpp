#pragma once

// Channel-spec files: a JSON object
//
//   {
//     "id": "optional name",
//     "input_sizes": [2, 2],
//     "output_sizes": [2],
//     "exact": true,
//     "rows": [["1/4", "3/4"], ["1/2", "1/2"], ...]
//   }
//
// `rows` has one entry per symbol of the product input alphabet and each
// row one probability per symbol of the product output alphabet, both in
// lexicographic order with the first coordinate slowest. With "exact": true
// entries are rationals "num/den" (or integers) and rows must sum to exactly
// one; serialization then reproduces the same rationals bit for bit.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core/channel.hpp"

namespace nc {

/// Malformed channel file. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct ChannelSpec {
  std::string id;
  std::vector<std::size_t> input_sizes;
  std::vector<std::size_t> output_sizes;
  Dmc flat;

  bool is_point_to_point() const { return input_sizes.size() == 1 && output_sizes.size() == 1; }
  bool is_mac() const { return output_sizes.size() == 1; }
  bool is_broadcast() const { return input_sizes.size() == 1; }
};

ChannelSpec parse_channel_spec(std::string_view text);
ChannelSpec load_channel_spec(const std::filesystem::path& path);
std::string serialize_channel_spec(const ChannelSpec& spec);

/// Views of a parsed spec; throw std::invalid_argument on arity mismatch.
Dmc as_dmc(const ChannelSpec& spec);
MacChannel as_mac(const ChannelSpec& spec);
BroadcastChannel as_broadcast(const ChannelSpec& spec);

/// Parses "num/den" or an integer into an exact rational.
Rational parse_rational(std::string_view text);

} // namespace nc
