// Copyright 2026 The DGANN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dgann/sdf.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "text_util.h"

namespace dgann {
namespace {

std::string_view field(std::string_view line, std::size_t start, std::size_t width) {
  if (start >= line.size()) return {};
  return line.substr(start, std::min(width, line.size() - start));
}

bool parse_count(std::string_view token, std::size_t& out) {
  token = detail::trim(token);
  if (token.empty()) return false;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool is_record_end(std::string_view line) { return detail::trim(line) == "$$$$"; }

class SdfReader {
 public:
  explicit SdfReader(std::string_view text) : lines_(detail::split_lines(text)) {}

  std::vector<Molecule> read_all() {
    std::vector<Molecule> out;
    while (!only_blank_from(pos_)) out.push_back(read_record());
    return out;
  }

 private:
  bool only_blank_from(std::size_t i) const {
    for (; i < lines_.size(); ++i) {
      if (!detail::trim(lines_[i]).empty()) return false;
    }
    return true;
  }

  std::string_view line_at(std::size_t i, const char* expected) const {
    if (i >= lines_.size()) {
      throw ParseError(std::string("unexpected end of input, expected ") + expected, i + 1);
    }
    return lines_[i];
  }

  Molecule read_record() {
    Molecule m;
    const std::size_t header = pos_;
    m.id = std::string(detail::trim(line_at(header, "title line")));
    line_at(header + 1, "program line");
    line_at(header + 2, "comment line");
    const std::size_t counts_line = header + 3;
    std::string_view counts = line_at(counts_line, "counts line");
    if (counts.find("V3000") != std::string_view::npos) {
      throw ParseError("V3000 molfiles are not supported", counts_line + 1);
    }
    std::size_t n_atoms = 0;
    std::size_t n_bonds = 0;
    if (!parse_count(field(counts, 0, 3), n_atoms) ||
        !parse_count(field(counts, 3, 3), n_bonds)) {
      throw ParseError("malformed counts line '" + std::string(counts) + "'",
                       counts_line + 1);
    }
    if (n_atoms == 0) throw ParseError("counts line declares no atoms", counts_line + 1);

    std::size_t i = counts_line + 1;
    m.atoms.reserve(n_atoms);
    for (std::size_t k = 0; k < n_atoms; ++k, ++i) {
      std::string_view line = line_at(i, "atom line");
      if (is_record_end(line) || line.starts_with("M  ")) {
        throw ParseError("expected atom " + std::to_string(k + 1) + " of " +
                             std::to_string(n_atoms) + ", found '" + std::string(line) + "'",
                         i + 1);
      }
      Atom atom;
      for (std::size_t c = 0; c < 3; ++c) {
        if (!detail::parse_double(field(line, c * 10, 10), atom.position[c])) {
          throw ParseError("malformed atom line '" + std::string(line) + "'", i + 1);
        }
      }
      const std::string_view symbol = detail::trim(field(line, 31, 3));
      if (symbol.empty()) {
        throw ParseError("malformed atom line '" + std::string(line) + "'", i + 1);
      }
      const auto element = parse_element(symbol);
      if (!element) {
        throw ParseError("unsupported element '" + std::string(symbol) + "'", i + 1);
      }
      atom.element = *element;
      m.atoms.push_back(atom);
    }

    std::set<std::pair<std::size_t, std::size_t>> seen;
    m.bonds.reserve(n_bonds);
    for (std::size_t k = 0; k < n_bonds; ++k, ++i) {
      std::string_view line = line_at(i, "bond line");
      std::size_t a = 0;
      std::size_t b = 0;
      std::size_t type = 0;
      if (!parse_count(field(line, 0, 3), a) || !parse_count(field(line, 3, 3), b) ||
          !parse_count(field(line, 6, 3), type)) {
        throw ParseError("malformed bond line '" + std::string(line) + "'", i + 1);
      }
      if (a < 1 || b < 1 || a > n_atoms || b > n_atoms) {
        throw ParseError("bond references atom outside 1.." + std::to_string(n_atoms), i + 1);
      }
      if (a == b) throw ParseError("bond joins an atom to itself", i + 1);
      if (type < 1 || type > 4) {
        throw ParseError("unsupported bond type " + std::to_string(type), i + 1);
      }
      if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
        throw ParseError("duplicate bond " + std::to_string(a) + "-" + std::to_string(b),
                         i + 1);
      }
      m.bonds.push_back(Bond{a - 1, b - 1, static_cast<BondOrder>(type - 1)});
    }

    for (;; ++i) {
      if (i >= lines_.size() || is_record_end(lines_[i])) {
        throw ParseError("missing 'M  END' in record '" + m.id + "'",
                         std::min(i, lines_.size()) + 1);
      }
      if (lines_[i].starts_with("M  END")) break;
    }
    ++i;
    while (i < lines_.size() && !is_record_end(lines_[i])) ++i;
    pos_ = i + 1;
    return m;
  }

  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Molecule> parse_sdf(std::string_view text) { return SdfReader(text).read_all(); }

std::string write_molblock(const Molecule& m) {
  std::ostringstream out;
  char buf[128];
  out << m.id << "\n  dgann\n\n";
  std::snprintf(buf, sizeof(buf), "%3zu%3zu  0  0  0  0  0  0  0  0999 V2000\n",
                m.atoms.size(), m.bonds.size());
  out << buf;
  for (const Atom& a : m.atoms) {
    std::snprintf(buf, sizeof(buf),
                  "%10.4f%10.4f%10.4f %-3s 0  0  0  0  0  0  0  0  0  0  0  0\n",
                  a.position[0], a.position[1], a.position[2],
                  std::string(element_symbol(a.element)).c_str());
    out << buf;
  }
  for (const Bond& b : m.bonds) {
    std::snprintf(buf, sizeof(buf), "%3zu%3zu%3d  0\n", b.a + 1, b.b + 1,
                  static_cast<int>(b.order) + 1);
    out << buf;
  }
  out << "M  END\n";
  return out.str();
}

std::string write_sdf(std::span<const Molecule> molecules) {
  std::string out;
  for (const Molecule& m : molecules) {
    out += write_molblock(m);
    out += "$$$$\n";
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Molecule> read_sdf_file(const std::filesystem::path& path) {
  try {
    return parse_sdf(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

}  // namespace dgann
