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

// Random instances for tests, the self-test and `ppovm random`.
//
// Inputs T are redrawn until the nonzero spectrum of T^dagger T has a ratio
// of at least kMinSpectralRatio, so that minimal representations are not
// dominated by a single tiny eigenvalue.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "ppovm/naimark_face.hpp"
#include "ppovm/rng.hpp"

namespace ppovm {

inline constexpr double kMinSpectralRatio = 0.05;

// Cutoff for the generators' own pseudo-inverses, independent of the
// run's eps so that a loose eps does not change the instances drawn.
inline const Tolerance kGenerationTol{1e-12};

/// Effects S^{-1/2} G_i S^{-1/2} with G_i = A_i^dagger A_i, A_i Gaussian of
/// `rank` rows, S = sum G_i.
inline Povm random_povm(std::size_t d, std::size_t n, Rng& rng,
                        std::size_t rank_each = 0, Tolerance tol = {}) {
  if (d == 0 || n == 0) throw DimensionError("random_povm: empty dimensions");
  const auto r = rank_each == 0 ? d : rank_each;
  if (r * n < d) throw DimensionError("random_povm: effects cannot span the space");
  std::vector<Matrix> g;
  Matrix s = zeros(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix a = rng.gaussian(r, d);
    g.push_back(a.adjoint() * a);
    s += g.back();
  }
  const Matrix si = psd_inv_sqrt(s, kGenerationTol);
  for (auto& e : g) e = hermitian_part(si * e * si);
  return Povm(detail::renormalize(std::move(g), kGenerationTol), tol);
}

/// Projectors onto the columns of a Haar unitary, split into n nonempty
/// groups.
inline Povm random_pvm(std::size_t d, std::size_t n, Rng& rng,
                       Tolerance tol = {}) {
  if (n == 0 || n > d) throw DimensionError("random_pvm: need 1 <= n <= d");
  const Matrix u = random_unitary(d, rng);
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t k = 0; k < d; ++k) {
    groups[k < n ? k : rng.index(n)].push_back(idx[k]);
  }
  return pvm_from_basis(u, groups, tol);
}

/// PVM on K (x) H0 with H0 = H0a (+) H0b that is block diagonal in that
/// split, conjugated by I_K (x) W for a Haar W. Its commutant inside
/// I_K (x) B(H0) contains the two block projections.
inline Povm random_reducible_pvm(std::size_t d_k, std::size_t d_a,
                                 std::size_t d_b, std::size_t n, Rng& rng,
                                 Tolerance tol = {}) {
  const auto dh0 = d_a + d_b;
  const auto da = d_k * d_a;
  const auto db = d_k * d_b;
  if (n == 0 || n > std::min(da, db)) {
    throw DimensionError("random_reducible_pvm: too many outcomes");
  }
  const Povm pa = random_pvm(da, n, rng, tol);
  const Povm pb = random_pvm(db, n, rng, tol);
  // Index map from K (x) H0a and K (x) H0b into K (x) H0.
  Matrix ea = zeros(d_k * dh0, da);
  Matrix eb = zeros(d_k * dh0, db);
  for (std::size_t k = 0; k < d_k; ++k) {
    for (std::size_t j = 0; j < d_a; ++j) {
      ea(static_cast<Eigen::Index>(k * dh0 + j),
         static_cast<Eigen::Index>(k * d_a + j)) = 1.0;
    }
    for (std::size_t j = 0; j < d_b; ++j) {
      eb(static_cast<Eigen::Index>(k * dh0 + d_a + j),
         static_cast<Eigen::Index>(k * d_b + j)) = 1.0;
    }
  }
  const Matrix w = kron(identity(d_k), random_unitary(dh0, rng));
  std::vector<Matrix> effects;
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix p = ea * pa[i] * ea.adjoint() + eb * pb[i] * eb.adjoint();
    effects.push_back(hermitian_part(w * p * w.adjoint()));
  }
  return Povm(std::move(effects), tol);
}

inline DensityMatrix random_density(std::size_t d, Rng& rng,
                                    std::size_t rank_ = 0, Tolerance tol = {}) {
  const auto r = rank_ == 0 ? d : rank_;
  const Matrix a = rng.gaussian(d, r);
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitian_part(rho), tol);
}

/// Kraus operators cut from a Haar isometry C^in -> C^out (x) C^kraus.
inline Channel random_channel(std::size_t in, std::size_t out, Rng& rng,
                              std::size_t kraus = 0, Tolerance tol = {}) {
  const auto k = kraus == 0 ? in * out : kraus;
  if (k * out < in) throw DimensionError("random_channel: too few Kraus operators");
  const Matrix v = random_isometry(k * out, in, rng);
  std::vector<Matrix> ops;
  for (std::size_t j = 0; j < k; ++j) {
    ops.push_back(v.middleRows(static_cast<Eigen::Index>(j * out),
                               static_cast<Eigen::Index>(out)));
  }
  return Channel(in, out, std::move(ops), tol);
}

/// Input operator T : H -> H0 of the given rank with Tr T^dagger T = 1 and
/// a well-conditioned nonzero spectrum.
inline Matrix random_input(std::size_t d_h, std::size_t d_h0, Rng& rng,
                           std::size_t rank_ = 0) {
  const auto r = rank_ == 0 ? std::min(d_h, d_h0) : rank_;
  if (r > std::min(d_h, d_h0)) throw DimensionError("random_input: rank too large");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix t = random_isometry(d_h0, r, rng) * rng.gaussian(r, r) *
               random_isometry(d_h, r, rng).adjoint();
    t /= std::sqrt((t.adjoint() * t).trace().real());
    const RealVector s = svd(t).s;
    const double ratio = s(static_cast<Eigen::Index>(r) - 1) * s(static_cast<Eigen::Index>(r) - 1) /
                         (s(0) * s(0));
    if (ratio >= kMinSpectralRatio) return t;
  }
  throw ValidationError("random_input: no well-conditioned draw");
}

inline RepresentationTriple random_pure_triple(std::size_t d_k, std::size_t d_h,
                                               std::size_t d_h0, std::size_t n,
                                               Rng& rng, std::size_t rank_ = 0,
                                               Tolerance tol = {}) {
  Matrix t = random_input(d_h, d_h0, rng, rank_);
  return RepresentationTriple::pure(d_k, std::move(t),
                                    random_povm(d_k * d_h0, n, rng, 0, tol), tol);
}

inline RepresentationTriple random_mixed_triple(std::size_t d_k, std::size_t d_h,
                                                std::size_t d_h0, std::size_t n,
                                                Rng& rng, Tolerance tol = {}) {
  return RepresentationTriple::mixed(d_k, d_h, random_density(d_h * d_h0, rng, 0, tol),
                                     random_povm(d_k * d_h0, n, rng, 0, tol));
}

/// realize of a random pure triple whose ancilla equals the rank.
inline ProcessPovm random_tester(std::size_t d_k, std::size_t d_h, std::size_t n,
                                 Rng& rng, std::size_t rank_ = 0,
                                 Tolerance tol = {}) {
  const auto r = rank_ == 0 ? d_h : rank_;
  return realize(random_pure_triple(d_k, d_h, r, n, rng, r, tol), tol);
}

/// Tester with a rank-one measurement of d_k*d_h outcomes plus `extra` on
/// K (x) H. Generic instances of this kind are extremal.
inline ProcessPovm random_rank_one_tester(std::size_t d_k, std::size_t d_h,
                                          std::size_t extra, Rng& rng,
                                          Tolerance tol = {}) {
  const auto d = d_k * d_h;
  Matrix t = random_input(d_h, d_h, rng);
  const Povm m = random_povm(d, d + extra, rng, 1, tol);
  return realize(RepresentationTriple::pure(d_k, std::move(t), m, tol), tol);
}

}  // namespace ppovm
