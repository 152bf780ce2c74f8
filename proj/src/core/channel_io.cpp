#include "core/channel_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nc {

using nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
    }
  }
  return line;
}

// Line on which the `row`-th inner array of "rows" starts, or of the key
// itself when row is npos. Returns 0 if it cannot be located.
std::size_t locate_row(std::string_view text, std::size_t row) {
  const std::size_t key = text.find("\"rows\"");
  if (key == std::string_view::npos) {
    return 0;
  }
  if (row == std::string_view::npos) {
    return line_of_offset(text, key);
  }
  int depth = 0;
  std::size_t seen = 0;
  bool in_string = false;
  for (std::size_t i = key + 6; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
      if (depth == 2) {
        if (seen == row) {
          return line_of_offset(text, i);
        }
        ++seen;
      }
    } else if (c == ']') {
      if (--depth == 0) {
        break;
      }
    }
  }
  return 0;
}

std::vector<std::size_t> read_sizes(const json& doc, const char* key, std::string_view text) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty()) {
    throw ParseError(line_of_offset(text, text.find(std::string("\"") + key + "\"")),
                     std::string("'") + key + "' must be a nonempty array of positive integers");
  }
  std::vector<std::size_t> out;
  for (const json& v : doc[key]) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      throw ParseError(line_of_offset(text, text.find(std::string("\"") + key + "\"")),
                       std::string("'") + key + "' entries must be positive integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

} // namespace

Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) {
    s = trim(s);
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) {
      throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
    }
    for (std::size_t k = i; k < s.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
        throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
      }
    }
    return boost::multiprecision::cpp_int(std::string(s));
  };
  const std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_int(text));
  }
  const auto num = parse_int(text.substr(0, slash));
  const auto den = parse_int(text.substr(slash + 1));
  if (den == 0) {
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

ChannelSpec parse_channel_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(1, "channel file must contain a JSON object");
  }
  std::string id;
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) {
      throw ParseError(line_of_offset(text, text.find("\"id\"")), "'id' must be a string");
    }
    id = doc["id"].get<std::string>();
  }
  auto inputs = read_sizes(doc, "input_sizes", text);
  auto outputs = read_sizes(doc, "output_sizes", text);
  bool exact = false;
  if (doc.contains("exact")) {
    if (!doc["exact"].is_boolean()) {
      throw ParseError(line_of_offset(text, text.find("\"exact\"")), "'exact' must be a boolean");
    }
    exact = doc["exact"].get<bool>();
  }

  const ProductAlphabet in(inputs);
  const ProductAlphabet out(outputs);
  if (!doc.contains("rows") || !doc["rows"].is_array()) {
    throw ParseError(locate_row(text, std::string_view::npos), "'rows' must be an array");
  }
  const json& rows = doc["rows"];
  if (rows.size() != in.size()) {
    throw ParseError(locate_row(text, std::string_view::npos),
                     "expected " + std::to_string(in.size()) + " rows, found " +
                         std::to_string(rows.size()));
  }

  std::vector<double> values;
  std::vector<Rational> exact_values;
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const json& row = rows[x];
    if (!row.is_array() || row.size() != out.size()) {
      throw ParseError(locate_row(text, x), "row " + std::to_string(x) + " must have " +
                                                std::to_string(out.size()) + " entries");
    }
    for (const json& v : row) {
      try {
        if (exact) {
          if (v.is_string()) {
            exact_values.push_back(parse_rational(v.get<std::string>()));
          } else if (v.is_number_integer()) {
            exact_values.emplace_back(v.get<long long>());
          } else {
            throw std::invalid_argument("exact entries must be \"num/den\" strings or integers");
          }
        } else if (v.is_number()) {
          values.push_back(v.get<double>());
        } else if (v.is_string()) {
          values.push_back(parse_rational(v.get<std::string>()).convert_to<double>());
        } else {
          throw std::invalid_argument("entries must be numbers or \"num/den\" strings");
        }
      } catch (const std::invalid_argument& e) {
        throw ParseError(locate_row(text, x), "row " + std::to_string(x) + ": " + e.what());
      }
    }
  }

  try {
    Dmc flat = exact ? Dmc(in.size(), out.size(), std::move(exact_values))
                     : Dmc(in.size(), out.size(), std::move(values));
    return ChannelSpec{std::move(id), std::move(inputs), std::move(outputs), std::move(flat)};
  } catch (const std::invalid_argument& e) {
    // Dmc messages name the row; point at it.
    const std::string msg = e.what();
    std::size_t row = std::string_view::npos;
    const auto pos = msg.find("row ");
    if (pos != std::string::npos) {
      row = std::stoul(msg.substr(pos + 4));
    }
    throw ParseError(locate_row(text, row), msg);
  }
}

ChannelSpec load_channel_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open channel file '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ChannelSpec spec = parse_channel_spec(ss.str());
  if (spec.id.empty()) {
    spec.id = path.stem().string();
  }
  return spec;
}

std::string serialize_channel_spec(const ChannelSpec& spec) {
  json doc;
  if (!spec.id.empty()) {
    doc["id"] = spec.id;
  }
  doc["input_sizes"] = spec.input_sizes;
  doc["output_sizes"] = spec.output_sizes;
  doc["exact"] = spec.flat.is_exact();
  json rows = json::array();
  const std::size_t ny = spec.flat.output_size();
  for (std::size_t x = 0; x < spec.flat.input_size(); ++x) {
    json row = json::array();
    for (std::size_t y = 0; y < ny; ++y) {
      if (spec.flat.is_exact()) {
        row.push_back(spec.flat.exact_rows()[x * ny + y].str());
      } else {
        row.push_back(spec.flat(x, y));
      }
    }
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Dmc as_dmc(const ChannelSpec& spec) {
  if (!spec.is_point_to_point()) {
    throw std::invalid_argument("channel '" + spec.id + "' is not point-to-point");
  }
  return spec.flat;
}

MacChannel as_mac(const ChannelSpec& spec) {
  if (!spec.is_mac()) {
    throw std::invalid_argument("channel '" + spec.id + "' has more than one output");
  }
  return MacChannel(spec.input_sizes, spec.flat);
}

BroadcastChannel as_broadcast(const ChannelSpec& spec) {
  if (!spec.is_broadcast()) {
    throw std::invalid_argument("channel '" + spec.id + "' has more than one input");
  }
  return BroadcastChannel(spec.output_sizes, spec.flat);
}

} // namespace nc
