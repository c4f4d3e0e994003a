// Scaler file: a JSON document. Every real is stored as a C99 hex-float string
// so a save/load round-trip is bit-exact. The checksum is FNV-1a 64 over the
// compact dump of the document with the "checksum" key removed.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dtization/error.hpp"
#include "dtization/scalers.hpp"

namespace dtz {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string hex(double v) { return fmt::format("{:a}", v); }

double unhex(const json& j) {
  if (!j.is_string()) throw FormatError("scaler file: expected a hex-float string");
  const auto& s = j.get_ref<const std::string&>();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty() || errno == ERANGE)
    throw FormatError(fmt::format("scaler file: bad number '{}'", s));
  return v;
}

json hex_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(hex(v(i)));
  return out;
}

Eigen::VectorXd read_vector(const json& params, const char* key, std::size_t expected) {
  if (!params.contains(key) || !params[key].is_array())
    throw FormatError(fmt::format("scaler file: missing parameter array '{}'", key));
  const auto& arr = params[key];
  if (arr.size() != expected)
    throw FormatError(fmt::format("scaler file: '{}' has {} entries for {} features", key, arr.size(), expected));
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) v(static_cast<Eigen::Index>(i)) = unhex(arr[i]);
  return v;
}

std::string checksum(const json& doc) {
  const auto text = doc.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

json factor_table_json(const ScalingFactorTable& t) {
  json depth = json::array();
  for (const auto& d : t.first_depth) depth.push_back(d ? json(*d) : json(nullptr));
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.parent, n.depth, n.feature, hex(n.split_point), n.rows});
  return {{"exponent", hex(t.exponent)}, {"nf_total", t.nf_total}, {"mode", std::string(to_string(t.mode))},
          {"factors", hex_vector(t.factors)}, {"first_depth", depth}, {"tree", nodes}};
}

ScalingFactorTable read_factor_table(const json& j, const std::vector<std::string>& names) {
  ScalingFactorTable t;
  t.feature_names = names;
  t.exponent = unhex(j.at("exponent"));
  t.nf_total = j.at("nf_total").get<int>();
  t.mode = parse_factor_mode(j.at("mode").get<std::string>());
  t.factors = read_vector(j, "factors", names.size());
  const auto& depth = j.at("first_depth");
  if (depth.size() != names.size()) throw FormatError("scaler file: first_depth length mismatch");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (depth[i].is_null()) {
      t.first_depth.emplace_back();
      if (t.factors(static_cast<Eigen::Index>(i)) != 1.0)
        throw FormatError(fmt::format("scaler file: unassigned feature '{}' has factor != 1", names[i]));
    } else {
      const int d = depth[i].get<int>();
      if (d < 1 || d > t.nf_total) throw FormatError("scaler file: depth out of range");
      t.first_depth.emplace_back(d);
      if (t.factors(static_cast<Eigen::Index>(i)) != factor_for_depth(t.exponent, d, t.mode))
        throw FormatError(fmt::format("scaler file: factor of '{}' does not match its depth", names[i]));
    }
  }
  for (const auto& n : j.at("tree")) {
    if (!n.is_array() || n.size() != 5) throw FormatError("scaler file: malformed tree node");
    t.nodes.push_back({n[0].get<int>(), n[1].get<int>(), n[2].get<Eigen::Index>(), unhex(n[3]),
                       n[4].get<Eigen::Index>()});
  }
  return t;
}

}  // namespace

std::string serialize_scaler(const FittedScaler& s) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["method"] = std::string(to_string(s.method));
  doc["mode"] = std::string(to_string(s.mode));
  doc["target"] = s.target_name;
  doc["features"] = s.feature_names;
  json params = json::object();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MinMaxParams>) {
          params["min"] = hex_vector(p.min);
          params["max"] = hex_vector(p.max);
        } else if constexpr (std::is_same_v<P, StandardParams>) {
          params["mean"] = hex_vector(p.mean);
          params["std"] = hex_vector(p.stddev);
        } else if constexpr (std::is_same_v<P, LogParams>) {
          params["shift"] = hex_vector(p.shift);
        } else if constexpr (std::is_same_v<P, RobustParams>) {
          params["q1"] = hex_vector(p.q1);
          params["q3"] = hex_vector(p.q3);
        } else {
          params["q1"] = hex_vector(p.quartiles.q1);
          params["q3"] = hex_vector(p.quartiles.q3);
          doc["factor_table"] = factor_table_json(p.factors);
        }
      },
      s.params);
  doc["parameters"] = params;
  doc["checksum"] = checksum(doc);
  return doc.dump(2) + "\n";
}

FittedScaler deserialize_scaler(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("unparseable scaler file: {}", e.what()));
  }
  if (!doc.is_object()) throw FormatError("unparseable scaler file: not an object");

  try {
    if (!doc.contains("format_version") || doc["format_version"] != kFormatVersion)
      throw FormatError(fmt::format("scaler file version mismatch (expected {}, found {})", kFormatVersion,
                                    doc.value("format_version", json()).dump()));
    FittedScaler s;
    const auto method = doc.at("method").get<std::string>();
    try {
      s.method = parse_scaler_method(method);
    } catch (const ArgumentError&) {
      throw FormatError(fmt::format("unknown method '{}' in scaler file", method));
    }
    const auto stored = doc.at("checksum").get<std::string>();
    json body = doc;
    body.erase("checksum");
    if (checksum(body) != stored) throw FormatError("scaler file checksum mismatch");

    s.mode = parse_factor_mode(doc.at("mode").get<std::string>());
    s.target_name = doc.at("target").get<std::string>();
    s.feature_names = doc.at("features").get<std::vector<std::string>>();
    const auto n = s.feature_names.size();
    const auto& p = doc.at("parameters");
    switch (s.method) {
      case ScalerMethod::minmax:
        s.params = MinMaxParams{read_vector(p, "min", n), read_vector(p, "max", n)};
        break;
      case ScalerMethod::standard:
        s.params = StandardParams{read_vector(p, "mean", n), read_vector(p, "std", n)};
        break;
      case ScalerMethod::log:
        s.params = LogParams{read_vector(p, "shift", n)};
        break;
      case ScalerMethod::robust:
        s.params = RobustParams{read_vector(p, "q1", n), read_vector(p, "q3", n)};
        break;
      case ScalerMethod::dtization:
        s.params = DtizationParams{RobustParams{read_vector(p, "q1", n), read_vector(p, "q3", n)},
                                   read_factor_table(doc.at("factor_table"), s.feature_names)};
        break;
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed scaler file: {}", e.what()));
  } catch (const ArgumentError& e) {
    throw FormatError(fmt::format("malformed scaler file: {}", e.what()));
  }
}

void save_scaler(const FittedScaler& scaler, const std::filesystem::path& path) {
  const auto text = serialize_scaler(scaler);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw DataError(fmt::format("error while writing '{}'", path.string()));
}

FittedScaler load_scaler(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_scaler(buf.str());
}

}  // namespace dtz
