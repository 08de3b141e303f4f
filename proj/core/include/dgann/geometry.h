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
#include <random>

#include "dgann/molecule.h"

namespace dgann {

using Mat3 = std::array<std::array<double, 3>, 3>;

Vec3 centroid(const Molecule& m);

/// Translates so the unweighted mean atom position is the origin.
Molecule center_molecule(Molecule m);
Molecule translate_molecule(Molecule m, const Vec3& offset);
/// Applies x -> R x to every atom position.
Molecule rotate_molecule(Molecule m, const Mat3& rotation);

/// Uniformly distributed rotation from a random unit quaternion (Shoemake's
/// subgroup algorithm).
Mat3 random_rotation_matrix(std::mt19937_64& rng);
Molecule random_rotation(Molecule m, std::mt19937_64& rng);

double determinant(const Mat3& a);

}  // namespace dgann
