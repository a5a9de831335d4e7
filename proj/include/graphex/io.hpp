#pragma once

// JSON schema for graphexes and friends. Finite numbers round-trip bit-exactly
// (nlohmann emits shortest round-trip decimal); an infinite isolated mass is
// spelled "inf" because JSON has no infinity literal.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "graphex/core.hpp"

namespace graphex {

inline nlohmann::json to_json(const step_graphex& g) {
  nlohmann::json j;
  j["masses"] = g.masses;
  j["graphon"] = g.graphon;
  j["star"] = g.star;
  j["dust"] = g.dust;
  if (std::isinf(g.isolated_mass))
    j["isolated_mass"] = "inf";
  else
    j["isolated_mass"] = g.isolated_mass;
  j["signed"] = g.signed_mode;
  return j;
}

inline step_graphex graphex_from_json(const nlohmann::json& j) {
  step_graphex g;
  if (!j.contains("masses")) throw std::invalid_argument("graphex json: missing \"masses\"");
  g.masses = j.at("masses").get<std::vector<double>>();
  if (j.contains("graphon"))
    g.graphon = j.at("graphon").get<std::vector<std::vector<double>>>();
  else
    g.graphon.assign(g.masses.size(), std::vector<double>(g.masses.size(), 0.0));
  if (j.contains("star"))
    g.star = j.at("star").get<std::vector<double>>();
  else
    g.star.assign(g.masses.size(), 0.0);
  g.dust = j.value("dust", 0.0);
  if (j.contains("isolated_mass")) {
    const auto& v = j.at("isolated_mass");
    if (v.is_string()) {
      if (v.get<std::string>() != "inf")
        throw std::invalid_argument("graphex json: isolated_mass string must be \"inf\"");
      g.isolated_mass = infinity;
    } else {
      g.isolated_mass = v.get<double>();
    }
  }
  g.signed_mode = j.value("signed", false);
  return g;
}

inline std::string serialize(const step_graphex& g) { return to_json(g).dump(2) + "\n"; }

inline step_graphex parse_graphex(const std::string& text) {
  return graphex_from_json(nlohmann::json::parse(text));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline step_graphex load_graphex(const std::string& path) {
  return parse_graphex(read_text_file(path));
}

} // namespace graphex
