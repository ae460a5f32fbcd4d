#pragma once

// Digit-file format: ASCII, one bit per line ('0' or '1'), digit index 1
// first.  Lines starting with '#' are comments (writers put provenance
// there); blank lines are ignored.

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "equidist/dyadic.hpp"

namespace equidist {

inline DyadicReal read_digits(std::istream& in) {
  std::vector<std::uint8_t> bits;
  std::string line;
  while (std::getline(in, line)) {
    // strip trailing CR/whitespace
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t'))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "0")
      bits.push_back(0);
    else if (line == "1")
      bits.push_back(1);
    else
      throw std::runtime_error("digit file: bad line '" + line + "'");
  }
  if (bits.empty()) throw std::runtime_error("digit file: no digits");
  return DyadicReal(std::move(bits));
}

inline DyadicReal read_digits_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open digit file: " + path);
  return read_digits(in);
}

inline void write_digits(std::ostream& out, const DyadicReal& x,
                         const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) out << "# " << c << "\n";
  for (auto d : x.digits()) out << static_cast<int>(d) << "\n";
}

inline void write_digits_file(const std::string& path, const DyadicReal& x,
                              const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write digit file: " + path);
  write_digits(out, x, comments);
}

}  // namespace equidist
