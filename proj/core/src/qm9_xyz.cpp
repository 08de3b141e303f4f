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

#include "dgann/qm9_xyz.h"

#include <charconv>
#include <stdexcept>

#include "dgann/bond_perception.h"
#include "dgann/sdf.h"
#include "text_util.h"

namespace dgann {
namespace {

constexpr std::array<std::string_view, kNumTargets> kTargetNames = {
    "mu", "alpha", "homo", "lumo", "gap", "r2",
    "zpve", "u0_atom", "u_atom", "h_atom", "g_atom", "cv"};

constexpr std::array<std::string_view, kNumTargets> kTargetUnits = {
    "D", "a0^3", "eV", "eV", "eV", "a0^2", "eV", "eV", "eV", "eV", "eV", "cal/mol K"};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double number(std::string_view token, std::size_t line, const char* what) {
  double v = 0.0;
  if (!detail::parse_fortran_double(token, v)) {
    throw ParseError(std::string("cannot parse ") + what + " '" + std::string(token) + "'",
                     line);
  }
  return v;
}

class Qm9Reader {
 public:
  Qm9Reader(std::string_view text, const Qm9ParseOptions& options)
      : lines_(detail::split_lines(text)), options_(options) {}

  bool at_end() {
    while (pos_ < lines_.size() && detail::trim(lines_[pos_]).empty()) ++pos_;
    return pos_ >= lines_.size();
  }

  QM9Record read_record() {
    QM9Record rec;
    const std::size_t count_line = pos_;
    std::size_t n_atoms = 0;
    {
      const std::string_view tok = detail::trim(line(count_line, "atom count"));
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n_atoms);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || n_atoms == 0) {
        throw ParseError("expected a positive atom count, found '" + std::string(tok) + "'",
                         count_line + 1);
      }
    }

    const std::size_t prop_line = count_line + 1;
    const auto props = detail::split_whitespace(line(prop_line, "property line"));
    if (props.size() != 2 + kNumQm9Properties) {
      throw ParseError("property line has " + std::to_string(props.size()) +
                           " fields, expected tag, index and " +
                           std::to_string(kNumQm9Properties) + " properties",
                       prop_line + 1);
    }
    rec.tag = std::string(props[0]);
    {
      auto [ptr, ec] = std::from_chars(props[1].data(), props[1].data() + props[1].size(),
                                       rec.index);
      if (ec != std::errc() || ptr != props[1].data() + props[1].size()) {
        throw ParseError("cannot parse record index '" + std::string(props[1]) + "'",
                         prop_line + 1);
      }
    }
    for (std::size_t k = 0; k < kNumQm9Properties; ++k) {
      rec.properties[k] = number(props[k + 2], prop_line + 1, "property");
    }
    rec.molecule.id = rec.tag + "_" + std::to_string(rec.index);

    for (std::size_t a = 0; a < n_atoms; ++a) {
      const std::size_t ln = prop_line + 1 + a;
      const auto toks = detail::split_whitespace(line(ln, "atom line"));
      if (toks.size() != 4 && toks.size() != 5) {
        throw ParseError("atom line needs element, x, y, z and optional charge", ln + 1);
      }
      const auto element = parse_element(toks[0]);
      if (!element) {
        throw ParseError("unsupported element '" + std::string(toks[0]) + "'", ln + 1);
      }
      Atom atom;
      atom.element = *element;
      for (std::size_t c = 0; c < 3; ++c) atom.position[c] = number(toks[c + 1], ln + 1, "coordinate");
      rec.molecule.atoms.push_back(atom);
      if (toks.size() == 5) rec.partial_charges.push_back(number(toks[4], ln + 1, "charge"));
    }

    const std::size_t freq_line = prop_line + 1 + n_atoms;
    for (std::string_view tok : detail::split_whitespace(line(freq_line, "frequency line"))) {
      rec.frequencies.push_back(number(tok, freq_line + 1, "frequency"));
    }
    const auto smiles = detail::split_whitespace(line(freq_line + 1, "SMILES line"));
    if (smiles.empty() || smiles.size() > 2) {
      throw ParseError("SMILES line needs one or two fields", freq_line + 2);
    }
    rec.smiles_gdb = std::string(smiles.front());
    rec.smiles_relaxed = std::string(smiles.back());
    const auto inchi = detail::split_whitespace(line(freq_line + 2, "InChI line"));
    if (inchi.empty() || inchi.size() > 2) {
      throw ParseError("InChI line needs one or two fields", freq_line + 3);
    }
    rec.inchi_gdb = std::string(inchi.front());
    rec.inchi_relaxed = std::string(inchi.back());
    pos_ = freq_line + 3;

    if (options_.perceive_bonds) rec.molecule.bonds = perceive_bonds(rec.molecule);
    return rec;
  }

 private:
  std::string_view line(std::size_t i, const char* expected) const {
    if (i >= lines_.size()) {
      throw ParseError(std::string("unexpected end of input, expected ") + expected, i + 1);
    }
    return lines_[i];
  }

  std::vector<std::string_view> lines_;
  Qm9ParseOptions options_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view target_name(Target t) { return kTargetNames[static_cast<std::size_t>(t)]; }

std::string_view target_unit(Target t) { return kTargetUnits[static_cast<std::size_t>(t)]; }

std::optional<Target> parse_target(std::string_view name) {
  for (std::size_t i = 0; i < kNumTargets; ++i) {
    if (kTargetNames[i] == name) return static_cast<Target>(i);
  }
  return std::nullopt;
}

std::string target_name_list() {
  std::string out;
  for (std::size_t i = 0; i < kNumTargets; ++i) {
    if (i) out += ", ";
    out += kTargetNames[i];
  }
  return out;
}

bool uses_lsm(Target t) {
  switch (t) {
    case Target::kZpve:
    case Target::kU0Atom:
    case Target::kUAtom:
    case Target::kHAtom:
    case Target::kGAtom:
      return true;
    default:
      return false;
  }
}

AtomRefTable parse_atomref_csv(std::string_view text) {
  AtomRefTable table;
  std::array<bool, kNumElements> seen{};
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("empty atom reference table", 1);
  const auto header = detail::split_char(detail::trim(lines[0]), ',');
  const std::array<std::string_view, 5> expected = {"element", "U0", "U", "H", "G"};
  if (header.size() != expected.size()) {
    throw ParseError("atom reference header must be element,U0,U,H,G", 1);
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (detail::trim(header[i]) != expected[i]) {
      throw ParseError("atom reference header must be element,U0,U,H,G", 1);
    }
  }
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (detail::trim(lines[ln]).empty()) continue;
    const auto cells = detail::split_char(detail::trim(lines[ln]), ',');
    if (cells.size() != 5) throw ParseError("expected 5 columns", ln + 1);
    const auto element = parse_element(detail::trim(cells[0]));
    if (!element) throw ParseError("unknown element '" + std::string(cells[0]) + "'", ln + 1);
    const auto e = static_cast<std::size_t>(*element);
    for (std::size_t k = 0; k < 4; ++k) {
      if (!detail::parse_double(cells[k + 1], table.energies[e][k])) {
        throw ParseError("cannot parse energy '" + std::string(cells[k + 1]) + "'", ln + 1);
      }
    }
    seen[e] = true;
  }
  for (std::size_t e = 0; e < kNumElements; ++e) {
    if (!seen[e]) {
      throw ParseError("atom reference table lacks element " +
                           std::string(element_symbol(static_cast<Element>(e))),
                       0);
    }
  }
  return table;
}

double QM9Record::target(Target t, const AtomRefTable* atomref) const {
  const auto& p = properties;
  auto atomization = [&](std::size_t prop, std::size_t ref_column) {
    double value = p[prop] * kHartreeToEv;
    if (atomref) {
      for (const Atom& a : molecule.atoms) {
        value -= atomref->energies[static_cast<std::size_t>(a.element)][ref_column];
      }
    }
    return value;
  };
  switch (t) {
    case Target::kMu: return p[3];
    case Target::kAlpha: return p[4];
    case Target::kHomo: return p[5] * kHartreeToEv;
    case Target::kLumo: return p[6] * kHartreeToEv;
    case Target::kGap: return p[7] * kHartreeToEv;
    case Target::kR2: return p[8];
    case Target::kZpve: return p[9] * kHartreeToEv;
    case Target::kU0Atom: return atomization(10, 0);
    case Target::kUAtom: return atomization(11, 1);
    case Target::kHAtom: return atomization(12, 2);
    case Target::kGAtom: return atomization(13, 3);
    case Target::kCv: return p[14];
  }
  throw std::invalid_argument("unknown target");
}

QM9Record parse_qm9_xyz(std::string_view text, const Qm9ParseOptions& options) {
  Qm9Reader reader(text, options);
  if (reader.at_end()) throw ParseError("empty QM9 record", 1);
  QM9Record rec = reader.read_record();
  if (!reader.at_end()) {
    throw ParseError("trailing content after the first QM9 record", 0);
  }
  return rec;
}

std::vector<QM9Record> parse_qm9_xyz_stream(std::string_view text,
                                            const Qm9ParseOptions& options) {
  Qm9Reader reader(text, options);
  std::vector<QM9Record> out;
  while (!reader.at_end()) out.push_back(reader.read_record());
  return out;
}

std::string write_qm9_xyz(const QM9Record& r) {
  std::string out = std::to_string(r.molecule.atoms.size()) + "\n";
  out += r.tag + " " + std::to_string(r.index);
  for (double v : r.properties) out += "\t" + format_double(v);
  out += "\n";
  for (std::size_t i = 0; i < r.molecule.atoms.size(); ++i) {
    const Atom& a = r.molecule.atoms[i];
    out += element_symbol(a.element);
    for (double c : a.position) out += "\t" + format_double(c);
    if (i < r.partial_charges.size()) out += "\t" + format_double(r.partial_charges[i]);
    out += "\n";
  }
  for (std::size_t i = 0; i < r.frequencies.size(); ++i) {
    if (i) out += "\t";
    out += format_double(r.frequencies[i]);
  }
  out += "\n" + r.smiles_gdb + "\t" + r.smiles_relaxed + "\n";
  out += r.inchi_gdb + "\t" + r.inchi_relaxed + "\n";
  return out;
}

std::vector<QM9Record> read_qm9_xyz_file(const std::filesystem::path& path,
                                         const Qm9ParseOptions& options) {
  try {
    return parse_qm9_xyz_stream(read_text_file(path), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

}  // namespace dgann
