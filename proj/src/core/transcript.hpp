#pragma once

// Transcript files (JSON): the public parameters, everything exchanged in
// the commit phase and optionally the reveal-phase claim, so a reveal can be
// replayed bit-exactly.
//
// Sequences are {"length", "alphabet", "hex"} with symbols packed by
// SymbolCodec; bit strings are {"length", "hex"}; hash functions are
// {"input_len", "output_len", "seed"} with the seed as a hex bit string;
// challenge sets are sorted index lists.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/broadcast.hpp"
#include "core/protocol.hpp"

namespace nc {

inline constexpr int kTranscriptSchemaVersion = 1;

struct TranscriptHeader {
  std::string version;
  std::string channel_id;
  /// "colluding", "product" or "broadcast".
  std::string mode;
  ProtocolParams params;
  std::vector<std::size_t> input_sizes;
  std::vector<std::size_t> output_sizes;
  /// One joint law, or one law per bidder for product inputs.
  std::vector<std::vector<double>> input;
};

struct MacTranscript {
  TranscriptHeader header;
  VerifierView view;
  std::optional<RevealClaim> claim;
};

struct BroadcastClaim {
  std::vector<std::size_t> x;
  BitString a;
};

struct BroadcastTranscript {
  TranscriptHeader header;
  BroadcastView view;
  std::optional<BroadcastClaim> claim;
};

std::string write_transcript(const MacTranscript& t);
std::string write_transcript(const BroadcastTranscript& t);

/// Throw std::invalid_argument naming the offending field.
MacTranscript read_mac_transcript(std::string_view text);
BroadcastTranscript read_broadcast_transcript(std::string_view text);

/// "broadcast" or the MAC mode, read from the header only.
std::string transcript_mode(std::string_view text);

/// Input distribution recorded in a MAC header.
InputDistribution header_input(const TranscriptHeader& h);

} // namespace nc
