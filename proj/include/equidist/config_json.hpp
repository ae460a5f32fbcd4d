#pragma once

// JSON (de)serialization of sequence specs and family configs, plus the
// compact colon syntax used by --seq on the command line.
//
// Family config schema:
//   { "sequences": [ {"kind": "polynomial", "coeffs": [0,1], "label": "n"},
//                    {"kind": "geometric", "base": 2} ],
//     "closure_h_max": 8 }
//
// Integers may be JSON numbers or decimal strings (values like 2^200 do not
// fit a JSON number).

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "equidist/sequences.hpp"

namespace equidist {

inline Int json_to_int(const nlohmann::json& v) {
  if (v.is_string()) return Int(v.get<std::string>());
  if (v.is_number_integer()) return Int(v.get<long long>());
  throw std::runtime_error("expected integer or decimal string in config");
}

inline nlohmann::json int_to_json(const Int& v) {
  if (v >= std::numeric_limits<long long>::min() &&
      v <= std::numeric_limits<long long>::max())
    return v.convert_to<long long>();
  return v.str();
}

// Exact rational as {"num": ..., "den": ...}.
inline nlohmann::json rat_to_json(const Rat& r) {
  return {{"num", int_to_json(numerator(r))},
          {"den", int_to_json(denominator(r))}};
}

inline Rat rat_from_json(const nlohmann::json& v) {
  Int den = json_to_int(v.at("den"));
  if (den == 0) throw std::runtime_error("rational with zero denominator");
  return Rat(json_to_int(v.at("num")), den);
}

inline nlohmann::json sequence_to_json(const SequenceSpec& s) {
  nlohmann::json j;
  switch (s.kind) {
    case SequenceSpec::Kind::polynomial: {
      j["kind"] = "polynomial";
      nlohmann::json c = nlohmann::json::array();
      for (const auto& v : s.coeffs) c.push_back(int_to_json(v));
      j["coeffs"] = c;
      break;
    }
    case SequenceSpec::Kind::geometric:
      j["kind"] = "geometric";
      j["base"] = int_to_json(s.base);
      break;
    case SequenceSpec::Kind::primes:
      j["kind"] = "primes";
      break;
    case SequenceSpec::Kind::explicit_list: {
      j["kind"] = "explicit";
      nlohmann::json v = nlohmann::json::array();
      for (const auto& x : s.values) v.push_back(int_to_json(x));
      j["values"] = v;
      break;
    }
    case SequenceSpec::Kind::multiple:
      j["kind"] = "multiple";
      j["h"] = int_to_json(s.h);
      j["inner"] = sequence_to_json(*s.inner);
      break;
  }
  j["label"] = s.label;
  return j;
}

inline SequenceSpec sequence_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  std::string label = j.value("label", std::string());
  if (kind == "polynomial") {
    std::vector<Int> c;
    for (const auto& v : j.at("coeffs")) c.push_back(json_to_int(v));
    return SequenceSpec::polynomial_spec(std::move(c), label);
  }
  if (kind == "geometric")
    return SequenceSpec::geometric_spec(json_to_int(j.at("base")), label);
  if (kind == "primes") return SequenceSpec::primes_spec(label);
  if (kind == "explicit") {
    std::vector<Int> v;
    for (const auto& x : j.at("values")) v.push_back(json_to_int(x));
    return SequenceSpec::explicit_spec(std::move(v), label);
  }
  if (kind == "multiple")
    return SequenceSpec::multiple_spec(json_to_int(j.at("h")),
                                       sequence_from_json(j.at("inner")),
                                       label);
  throw std::runtime_error("unknown sequence kind: " + kind);
}

struct FamilyConfig {
  std::vector<SequenceSpec> members;  // as listed, before closure
  int closure_h_max = 1;

  std::vector<SequenceSpec> closed() const {
    return close_under_multiples(members, closure_h_max);
  }
};

inline FamilyConfig family_from_json(const nlohmann::json& j) {
  FamilyConfig cfg;
  for (const auto& s : j.at("sequences"))
    cfg.members.push_back(sequence_from_json(s));
  cfg.closure_h_max = j.value("closure_h_max", 1);
  if (cfg.members.empty())
    throw std::runtime_error("family config needs at least one sequence");
  if (cfg.closure_h_max < 1)
    throw std::runtime_error("closure_h_max must be >= 1");
  return cfg;
}

inline FamilyConfig load_family_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return family_from_json(j);
}

// Compact CLI syntax:
//   identity | primes | geometric:B | geo:B | poly:c0,c1,... |
//   explicit:v0,v1,... | multiple:H:<spec>
inline SequenceSpec parse_sequence_string(const std::string& text) {
  auto split_ints = [](const std::string& s) {
    std::vector<Int> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      std::size_t comma = s.find(',', pos);
      if (comma == std::string::npos) comma = s.size();
      out.push_back(Int(s.substr(pos, comma - pos)));
      pos = comma + 1;
      if (comma == s.size()) break;
    }
    return out;
  };
  if (text == "identity") return SequenceSpec::identity();
  if (text == "primes") return SequenceSpec::primes_spec();
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  if (colon == std::string::npos)
    throw std::runtime_error("cannot parse sequence: " + text);
  std::string rest = text.substr(colon + 1);
  if (head == "geometric" || head == "geo")
    return SequenceSpec::geometric_spec(Int(rest));
  if (head == "poly" || head == "polynomial")
    return SequenceSpec::polynomial_spec(split_ints(rest));
  if (head == "explicit") return SequenceSpec::explicit_spec(split_ints(rest));
  if (head == "multiple") {
    auto second = rest.find(':');
    if (second == std::string::npos)
      throw std::runtime_error("multiple needs multiple:H:<spec>");
    return SequenceSpec::multiple_spec(
        Int(rest.substr(0, second)),
        parse_sequence_string(rest.substr(second + 1)));
  }
  throw std::runtime_error("cannot parse sequence: " + text);
}

}  // namespace equidist
