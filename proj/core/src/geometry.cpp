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

#include "dgann/geometry.h"

#include <cmath>
#include <numbers>

namespace dgann {

Vec3 centroid(const Molecule& m) {
  Vec3 c{};
  if (m.atoms.empty()) return c;
  for (const Atom& a : m.atoms) {
    for (std::size_t k = 0; k < 3; ++k) c[k] += a.position[k];
  }
  for (double& v : c) v /= static_cast<double>(m.atoms.size());
  return c;
}

Molecule center_molecule(Molecule m) {
  const Vec3 c = centroid(m);
  for (Atom& a : m.atoms) {
    for (std::size_t k = 0; k < 3; ++k) a.position[k] -= c[k];
  }
  return m;
}

Molecule translate_molecule(Molecule m, const Vec3& offset) {
  for (Atom& a : m.atoms) {
    for (std::size_t k = 0; k < 3; ++k) a.position[k] += offset[k];
  }
  return m;
}

Molecule rotate_molecule(Molecule m, const Mat3& r) {
  for (Atom& a : m.atoms) {
    const Vec3 p = a.position;
    for (std::size_t i = 0; i < 3; ++i) {
      a.position[i] = r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2];
    }
  }
  return m;
}

Mat3 random_rotation_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(rng);
  const double u2 = unit(rng);
  const double u3 = unit(rng);
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double x = a * std::sin(two_pi * u2);
  const double y = a * std::cos(two_pi * u2);
  const double z = b * std::sin(two_pi * u3);
  const double w = b * std::cos(two_pi * u3);
  return Mat3{{
      {1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
      {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
      {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)},
  }};
}

Molecule random_rotation(Molecule m, std::mt19937_64& rng) {
  return rotate_molecule(std::move(m), random_rotation_matrix(rng));
}

double determinant(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace dgann
