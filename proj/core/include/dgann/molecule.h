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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dgann {

using Vec3 = std::array<double, 3>;

/// The QM9 species set. The enumerator order is the species order used by
/// one-hot features and by the least-squares count matrix.
enum class Element : std::uint8_t { kH = 0, kC = 1, kN = 2, kO = 3, kF = 4 };

inline constexpr std::size_t kNumElements = 5;
inline constexpr std::array<Element, kNumElements> kAllElements = {
    Element::kH, Element::kC, Element::kN, Element::kO, Element::kF};

std::string_view element_symbol(Element e);
int atomic_number(Element e);
std::optional<Element> parse_element(std::string_view symbol);

enum class BondOrder : std::uint8_t { kSingle = 0, kDouble = 1, kTriple = 2, kAromatic = 3 };

struct Atom {
  Element element = Element::kH;
  Vec3 position{};

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Undirected chemical bond between atoms `a` and `b`.
struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;
  BondOrder order = BondOrder::kSingle;

  friend bool operator==(const Bond&, const Bond&) = default;
};

struct Molecule {
  std::string id;
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  friend bool operator==(const Molecule&, const Molecule&) = default;
};

/// Input error carrying the 1-based line it was detected on (0 if unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line);
  std::size_t line() const { return line_; }
  /// Message without the line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Throws std::invalid_argument for structural violations (no atoms, bond
/// endpoints out of range or equal, duplicate bonds, non-finite coordinates).
/// Disconnected molecules only produce a warning.
void validate_molecule(const Molecule& m);

bool is_connected(const Molecule& m);

/// Per-species atom counts in H, C, N, O, F order.
std::array<double, kNumElements> species_counts(const Molecule& m);

}  // namespace dgann
