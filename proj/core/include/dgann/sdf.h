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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dgann/molecule.h"

namespace dgann {

/// Parses MDL MOL / SD (V2000) content. Records are separated by "$$$$";
/// the title line becomes Molecule::id. Bond type 4 maps to aromatic.
///
/// Fixed columns are honoured: counts line aaabbb..., atom lines with x, y, z
/// in three 10-wide fields followed by the symbol at column 32, bond lines
/// with 3-wide a1, a2 and type fields. Property and data blocks are skipped.
///
/// Throws ParseError naming the offending line for malformed counts/atom/bond
/// lines, V3000 content, elements outside H/C/N/O/F, bond types other than
/// 1-4, out-of-range or duplicate bonds, and a missing "M  END".
std::vector<Molecule> parse_sdf(std::string_view text);

/// One V2000 block terminated by "M  END" (no "$$$$").
std::string write_molblock(const Molecule& m);
/// Concatenated V2000 records, each followed by "$$$$".
std::string write_sdf(std::span<const Molecule> molecules);

std::vector<Molecule> read_sdf_file(const std::filesystem::path& path);

/// Reads a whole file into memory; throws std::runtime_error if unreadable.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace dgann
