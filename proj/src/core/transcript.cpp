#include "core/transcript.hpp"

#include <stdexcept>

#include <json.hpp>

namespace nc {

using json = nlohmann::ordered_json;

namespace {

json seq_json(const std::vector<std::size_t>& x, std::size_t alphabet) {
  const SymbolCodec codec(alphabet);
  return json{{"length", x.size()}, {"alphabet", alphabet}, {"hex", codec.encode(x).to_hex()}};
}

std::vector<std::size_t> seq_from(const json& j, std::size_t alphabet) {
  const std::size_t n = j.at("length").get<std::size_t>();
  if (j.at("alphabet").get<std::size_t>() != alphabet) {
    throw std::invalid_argument("transcript: sequence alphabet does not match the header");
  }
  const SymbolCodec codec(alphabet);
  return codec.decode(BitString::from_hex(j.at("hex").get<std::string>(), n * codec.width()));
}

json bits_json(const BitString& b) { return json{{"length", b.size()}, {"hex", b.to_hex()}}; }

BitString bits_from(const json& j) {
  return BitString::from_hex(j.at("hex").get<std::string>(), j.at("length").get<std::size_t>());
}

json hash_json(const LinearHash& h) {
  return json{{"input_len", h.input_len()}, {"output_len", h.output_len()},
              {"seed", h.seed().to_hex()}};
}

LinearHash hash_from(const json& j) {
  const std::size_t m = j.at("input_len").get<std::size_t>();
  const std::size_t r = j.at("output_len").get<std::size_t>();
  return LinearHash(m, r, BitString::from_hex(j.at("seed").get<std::string>(),
                                              LinearHash::seed_len(m, r)));
}

json header_json(const TranscriptHeader& h) {
  return json{{"schema_version", kTranscriptSchemaVersion},
              {"version", h.version},
              {"channel_id", h.channel_id},
              {"mode", h.mode},
              {"params",
               {{"n", h.params.n},
                {"mu", h.params.mu},
                {"eta", h.params.eta},
                {"eps", h.params.eps},
                {"security", h.params.security},
                {"rates", h.params.rates}}},
              {"input_sizes", h.input_sizes},
              {"output_sizes", h.output_sizes},
              {"input", h.input}};
}

TranscriptHeader header_from(const json& doc) {
  if (doc.at("schema_version").get<int>() != kTranscriptSchemaVersion) {
    throw std::invalid_argument("transcript: unsupported schema_version");
  }
  TranscriptHeader h;
  h.version = doc.at("version").get<std::string>();
  h.channel_id = doc.at("channel_id").get<std::string>();
  h.mode = doc.at("mode").get<std::string>();
  const json& p = doc.at("params");
  h.params.n = p.at("n").get<std::size_t>();
  h.params.mu = p.at("mu").get<double>();
  h.params.eta = p.at("eta").get<double>();
  h.params.eps = p.at("eps").get<double>();
  h.params.security = p.at("security").get<unsigned>();
  h.params.rates = p.at("rates").get<std::vector<std::size_t>>();
  h.input_sizes = doc.at("input_sizes").get<std::vector<std::size_t>>();
  h.output_sizes = doc.at("output_sizes").get<std::vector<std::size_t>>();
  h.input = doc.at("input").get<std::vector<std::vector<double>>>();
  return h;
}

std::size_t product_size(const std::vector<std::size_t>& sizes) {
  std::size_t p = 1;
  for (std::size_t s : sizes) {
    p *= s;
  }
  return p;
}

json parse_doc(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("transcript: malformed JSON: ") + e.what());
  }
}

template <class Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("transcript: ") + e.what());
  }
}

} // namespace

InputDistribution header_input(const TranscriptHeader& h) {
  if (h.mode == "product") {
    std::vector<Pmf> factors;
    for (const auto& f : h.input) {
      factors.emplace_back(f);
    }
    return InputDistribution::product(factors);
  }
  if (h.input.size() != 1) {
    throw std::invalid_argument("transcript: joint input must be a single law");
  }
  return InputDistribution(h.input_sizes, Pmf(h.input[0]));
}

std::string write_transcript(const MacTranscript& t) {
  const auto& v = t.view;
  const auto& sizes = t.header.input_sizes;
  json bidders = json::array();
  for (std::size_t l = 0; l < v.g.size(); ++l) {
    bidders.push_back(json{{"g", hash_json(v.g[l])},
                           {"s", v.s[l]},
                           {"t", bits_json(v.t[l])},
                           {"f", hash_json(v.f[l])},
                           {"e", bits_json(v.e[l])}});
  }
  json doc = header_json(t.header);
  doc["commit"] = json{{"y", seq_json(v.y, product_size(t.header.output_sizes))},
                       {"bidders", bidders}};
  if (t.claim) {
    json claim = json::array();
    for (std::size_t l = 0; l < t.claim->x.size(); ++l) {
      claim.push_back(json{{"x", seq_json(t.claim->x[l], sizes.at(l))},
                           {"a", bits_json(t.claim->a[l])}});
    }
    doc["claim"] = claim;
  }
  return doc.dump(2) + "\n";
}

std::string write_transcript(const BroadcastTranscript& t) {
  const auto& v = t.view;
  json verifiers = json::array();
  for (std::size_t b = 0; b < v.g.size(); ++b) {
    verifiers.push_back(json{{"y", seq_json(v.y[b], t.header.output_sizes.at(b))},
                             {"g", hash_json(v.g[b])},
                             {"t", bits_json(v.t[b])}});
  }
  json doc = header_json(t.header);
  doc["commit"] = json{{"s", v.s}, {"f", hash_json(v.f)}, {"e", bits_json(v.e)},
                       {"verifiers", verifiers}};
  if (t.claim) {
    doc["claim"] = json{{"x", seq_json(t.claim->x, t.header.input_sizes.at(0))},
                        {"a", bits_json(t.claim->a)}};
  }
  return doc.dump(2) + "\n";
}

std::string transcript_mode(std::string_view text) {
  const json doc = parse_doc(text);
  return guarded([&] { return doc.at("mode").get<std::string>(); });
}

MacTranscript read_mac_transcript(std::string_view text) {
  const json doc = parse_doc(text);
  return guarded([&] {
    MacTranscript t;
    t.header = header_from(doc);
    if (t.header.mode == "broadcast") {
      throw std::invalid_argument("transcript: broadcast transcript where a MAC one was expected");
    }
    const json& c = doc.at("commit");
    t.view.y = seq_from(c.at("y"), product_size(t.header.output_sizes));
    for (const json& b : c.at("bidders")) {
      t.view.g.push_back(hash_from(b.at("g")));
      t.view.s.push_back(b.at("s").get<std::vector<std::size_t>>());
      t.view.t.push_back(bits_from(b.at("t")));
      t.view.f.push_back(hash_from(b.at("f")));
      t.view.e.push_back(bits_from(b.at("e")));
    }
    if (t.view.g.size() != t.header.input_sizes.size()) {
      throw std::invalid_argument("transcript: bidder count does not match input_sizes");
    }
    for (const auto& s : t.view.s) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= t.view.y.size() || (i > 0 && s[i] <= s[i - 1])) {
          throw std::invalid_argument("transcript: challenge set must be sorted and in range");
        }
      }
    }
    if (doc.contains("claim")) {
      RevealClaim claim;
      const json& cl = doc.at("claim");
      for (std::size_t l = 0; l < cl.size(); ++l) {
        claim.x.push_back(seq_from(cl[l].at("x"), t.header.input_sizes.at(l)));
        claim.a.push_back(bits_from(cl[l].at("a")));
      }
      t.claim = std::move(claim);
    }
    return t;
  });
}

BroadcastTranscript read_broadcast_transcript(std::string_view text) {
  const json doc = parse_doc(text);
  return guarded([&] {
    BroadcastTranscript t;
    t.header = header_from(doc);
    if (t.header.mode != "broadcast") {
      throw std::invalid_argument("transcript: MAC transcript where a broadcast one was expected");
    }
    const json& c = doc.at("commit");
    t.view.s = c.at("s").get<std::vector<std::size_t>>();
    t.view.f = hash_from(c.at("f"));
    t.view.e = bits_from(c.at("e"));
    std::size_t b = 0;
    for (const json& v : c.at("verifiers")) {
      t.view.y.push_back(seq_from(v.at("y"), t.header.output_sizes.at(b++)));
      t.view.g.push_back(hash_from(v.at("g")));
      t.view.t.push_back(bits_from(v.at("t")));
    }
    if (doc.contains("claim")) {
      const json& cl = doc.at("claim");
      t.claim = BroadcastClaim{seq_from(cl.at("x"), t.header.input_sizes.at(0)),
                               bits_from(cl.at("a"))};
    }
    return t;
  });
}

} // namespace nc
