// Copyright 2026 The ppovm Authors
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

// Seeded random source. Every randomized procedure takes one of these (or a
// seed to build one) so results are reproducible bit for bit on a given
// standard library.

#pragma once

#include <cstdint>
#include <random>

#include "ppovm/linalg.hpp"

namespace ppovm {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return gen_(); }

  /// Index uniformly drawn from [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
  }

  /// Entries i.i.d. standard complex Gaussian, E|z|^2 = 1.
  Matrix gaussian(std::size_t rows, std::size_t cols) {
    Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double re = normal();
        a(i, j) = cplx(re, normal()) * s;
      }
    }
    return a;
  }

  Matrix hermitian(std::size_t d) { return hermitian_part(gaussian(d, d)); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-random unitary: QR of a Gaussian matrix with the phases of R's
/// diagonal moved into Q.
inline Matrix random_unitary(std::size_t d, Rng& rng) {
  const Matrix g = rng.gaussian(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const cplx rjj = r(j, j);
    if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

/// Haar-random isometry C^cols -> C^rows.
inline Matrix random_isometry(std::size_t rows, std::size_t cols, Rng& rng) {
  if (cols > rows) throw DimensionError("random_isometry: cols > rows");
  return random_unitary(rows, rng).leftCols(static_cast<Eigen::Index>(cols));
}

}  // namespace ppovm
