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

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgann/molecule.h"

namespace dgann {

/// CODATA Hartree energy in eV; the only unit conversion applied to QM9.
inline constexpr double kHartreeToEv = 27.211386;

/// Regression targets in reporting order.
enum class Target : int {
  kMu = 0,
  kAlpha,
  kHomo,
  kLumo,
  kGap,
  kR2,
  kZpve,
  kU0Atom,
  kUAtom,
  kHAtom,
  kGAtom,
  kCv,
};

inline constexpr std::size_t kNumTargets = 12;

std::string_view target_name(Target t);
/// Unit of the value reported for `t` (D, a0^3, eV, a0^2, cal/mol K).
std::string_view target_unit(Target t);
std::optional<Target> parse_target(std::string_view name);
/// Comma-separated list of every valid target name.
std::string target_name_list();
/// Energy-like targets that are residualized against species counts.
bool uses_lsm(Target t);

/// Number of scalar properties on the QM9 property line after tag and index.
inline constexpr std::size_t kNumQm9Properties = 15;

/// Free-atom reference energies (eV) per species for U0, U, H and G.
struct AtomRefTable {
  std::array<std::array<double, 4>, kNumElements> energies{};
};

AtomRefTable parse_atomref_csv(std::string_view text);

/// One record of the QM9 extended XYZ format.
struct QM9Record {
  Molecule molecule;
  std::string tag;
  long index = 0;
  /// Property line values exactly as read, in file units: rotational
  /// constants A, B, C (GHz), mu (D), alpha (a0^3), homo, lumo, gap (Ha),
  /// r2 (a0^2), zpve, U0, U, H, G (Ha), Cv (cal/mol K).
  std::array<double, kNumQm9Properties> properties{};
  std::vector<double> partial_charges;
  std::vector<double> frequencies;
  std::string smiles_gdb;
  std::string smiles_relaxed;
  std::string inchi_gdb;
  std::string inchi_relaxed;

  /// Value of `t` in reporting units (energies in eV). The *_atom targets
  /// are total energies unless `atomref` is given, in which case the summed
  /// free-atom energies are subtracted.
  double target(Target t, const AtomRefTable* atomref = nullptr) const;
};

struct Qm9ParseOptions {
  /// Derive bonds from geometry (bond_perception.h). When false the
  /// molecule has no bonds and the caller attaches them.
  bool perceive_bonds = true;
};

/// Parses exactly one record. Numbers may use Fortran 'D' or Mathematica
/// "*^" exponents. Throws ParseError on a bad atom count, a property line
/// without tag + index + 15 values, an unparsable number or an element
/// outside H/C/N/O/F.
QM9Record parse_qm9_xyz(std::string_view text, const Qm9ParseOptions& options = {});

/// Parses back-to-back records (the raw files concatenated).
std::vector<QM9Record> parse_qm9_xyz_stream(std::string_view text,
                                            const Qm9ParseOptions& options = {});

/// Serializes in the raw layout with shortest round-trip number formatting.
std::string write_qm9_xyz(const QM9Record& record);

std::vector<QM9Record> read_qm9_xyz_file(const std::filesystem::path& path,
                                         const Qm9ParseOptions& options = {});

}  // namespace dgann
