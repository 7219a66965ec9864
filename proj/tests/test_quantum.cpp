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

#include "catch_amalgamated.hpp"

#include "ppovm/random.hpp"

using namespace ppovm;

namespace {

Matrix ket_bra(std::size_t d, std::size_t i, std::size_t j) {
  Matrix m = zeros(d, d);
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return m;
}

// Sum over Kraus operators of K rho K^dagger, written without the library.
Matrix apply_kraus(const std::vector<Matrix>& kraus, const Matrix& rho) {
  Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

}  // namespace

TEST_CASE("density matrix and POVM validation") {
  CHECK_NOTHROW(DensityMatrix(identity(2) / 2.0));
  CHECK_THROWS_AS(DensityMatrix(identity(2)), ValidationError);
  Matrix neg = zeros(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS(DensityMatrix(neg));

  CHECK_NOTHROW(Povm({ket_bra(2, 0, 0), ket_bra(2, 1, 1)}));
  CHECK_THROWS(Povm({0.45 * identity(2), 0.45 * identity(2)}));
  const Report r = Povm::check({0.45 * identity(2), 0.45 * identity(2)});
  CHECK_FALSE(all_pass(r));
}

TEST_CASE("choi matrices of standard channels") {
  const ChoiMatrix id = choi(identity_channel(2));
  Matrix expect = zeros(4, 4);
  for (int a : {0, 3}) {
    for (int b : {0, 3}) expect(a, b) = 1.0;
  }
  CHECK(max_abs(id.mat - expect) < 1e-12);

  // sum_ij |i><j| (x) delta_ij I/2 expanded by hand.
  const ChoiMatrix dep = choi(completely_depolarizing(2, 2));
  Matrix dep_expect = zeros(4, 4);
  for (std::size_t i = 0; i < 2; ++i) dep_expect += kron(identity(2) / 2.0, ket_bra(2, i, i));
  CHECK(max_abs(dep.mat - dep_expect) < 1e-12);
  CHECK(max_abs(dep.mat - identity(4) / 2.0) < 1e-12);

  Rng rng(1);
  const ChoiMatrix u = choi(unitary_channel(random_unitary(2, rng)));
  CHECK(rank(u.mat) == 1);
  CHECK(std::abs(u.mat.trace() - 2.0) < 1e-12);
}

TEST_CASE("channel_from_choi inverts choi") {
  const Channel dep = channel_from_choi({2, 2, identity(4) / 2.0});
  Rng rng(2);
  const Matrix rho = random_density(2, rng).mat();
  CHECK(max_abs(dep.apply(rho) - identity(2) / 2.0) < 1e-12);

  const Channel id = channel_from_choi(choi(identity_channel(2)));
  CHECK(max_abs(id.apply(rho) - rho) < 1e-12);

  const Matrix u = random_unitary(2, rng);
  const Channel back = channel_from_choi(choi(unitary_channel(u)));
  REQUIRE(back.kraus().size() == 1);
  const Matrix k = back.kraus().front();
  // Equal to U up to a global phase.
  const cplx phase = (u.adjoint() * k).trace() / 2.0;
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
  CHECK(max_abs(k - phase * u) < 1e-12);
}

TEST_CASE("choi round trip reproduces channel action") {
  Rng rng(3);
  for (int c = 0; c < 5; ++c) {
    const std::size_t in = 2 + rng.index(2);
    const std::size_t out = 2 + rng.index(2);
    const Channel phi = random_channel(in, out, rng);
    const Channel back = channel_from_choi(choi(phi));
    for (int s = 0; s < 20; ++s) {
      const Matrix rho = random_density(in, rng).mat();
      CHECK(max_abs(apply_kraus(back.kraus(), rho) - apply_kraus(phi.kraus(), rho)) <= 1e-8);
    }
  }
}

TEST_CASE("vectorize and Schmidt decomposition") {
  const Vector omega = vectorize(identity(2) / std::sqrt(2.0));
  Vector expect = Vector::Zero(4);
  expect(0) = expect(3) = 1.0 / std::sqrt(2.0);
  CHECK((omega - expect).norm() < 1e-12);

  const Vector e00 = vectorize(ket_bra(2, 0, 0));
  CHECK(std::abs(e00(0) - 1.0) < 1e-12);
  CHECK(e00.norm() == Catch::Approx(1.0));

  const Schmidt s1 = schmidt(e00, 2, 2);
  CHECK(s1.coeffs.size() == 1);
  CHECK(s1.coeffs(0) == Catch::Approx(1.0));
  const Schmidt s2 = schmidt(omega, 2, 2);
  REQUIRE(s2.coeffs.size() == 2);
  CHECK(s2.coeffs(0) == Catch::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s2.coeffs(1) == Catch::Approx(1.0 / std::sqrt(2.0)));

  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const std::size_t dh = 2 + rng.index(2);
    const std::size_t dh0 = 2 + rng.index(2);
    const std::size_t r = 1 + rng.index(std::min(dh, dh0));
    const Matrix t = rng.gaussian(dh0, r) * rng.gaussian(r, dh);
    const Vector v = vectorize(t);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) sq += std::norm(t.data()[i]);
    CHECK(v.squaredNorm() == Catch::Approx(sq));
    CHECK(schmidt_rank(v, dh, dh0) == r);
    CHECK(max_abs(devectorize(v, dh, dh0) - t) < 1e-12);
    const Schmidt s = schmidt(v / v.norm(), dh, dh0);
    CHECK(s.coeffs.squaredNorm() == Catch::Approx(1.0));
  }
}

TEST_CASE("state adjoint map on product and maximally entangled states") {
  Rng rng(5);
  const DensityMatrix tau = random_density(2, rng);
  const DensityMatrix omega = random_density(3, rng);
  const StateAdjointMap prod(DensityMatrix(kron(tau.mat(), omega.mat())), 2, 3);
  const Matrix b = rng.gaussian(3, 3);
  CHECK(max_abs(prod(b) - tau.mat().transpose() * (b * omega.mat()).trace()) < 1e-12);

  const StateAdjointMap ent(pure_state(identity(2) / std::sqrt(2.0)), 2, 2);
  const Matrix b2 = rng.gaussian(2, 2);
  // Tr_H0[(I (x) B)|Omega>><<Omega|] = B^t / 2, transposed once more.
  CHECK(max_abs(ent(b2) - b2 / 2.0) < 1e-12);

  for (int k = 0; k < 5; ++k) {
    const DensityMatrix rho = random_density(6, rng);
    CHECK(std::abs(state_adjoint_map(rho, 2, 3)(identity(3)).trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("state adjoint map is the dual of the forward map") {
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const std::size_t dh = 2 + rng.index(2);
    const std::size_t dh0 = 2 + rng.index(2);
    const StateAdjointMap m(random_density(dh * dh0, rng), dh, dh0);
    const Matrix a = rng.gaussian(dh, dh);
    const Matrix b = rng.gaussian(dh0, dh0);
    CHECK(std::abs((m.forward(a) * b).trace() - (a * m(b)).trace()) <= 1e-9);
  }
}

TEST_CASE("extend_povm fills the complement uniformly") {
  Rng rng(7);
  const Povm m = random_povm(2, 2, rng);
  const Povm big = extend_povm(m, leading_embedding(3, 2));
  for (std::size_t i = 0; i < 2; ++i) {
    Matrix expect = zeros(3, 3);
    expect.topLeftCorner(2, 2) = m[i];
    expect(2, 2) = 0.5;
    CHECK(max_abs(big[i] - expect) < 1e-12);
  }
  const Povm same = extend_povm(m, identity(2));
  CHECK(effect_distance(same.effects(), m.effects()) < 1e-12);
  const Povm triv = extend_povm(Povm({identity(2)}), leading_embedding(4, 2));
  CHECK(max_abs(triv[0] - identity(4)) < 1e-12);
  CHECK_THROWS_AS(extend_povm(m, 2.0 * leading_embedding(3, 2)), DimensionError);
}

TEST_CASE("measurement and channel application") {
  const Povm z({ket_bra(2, 0, 0), ket_bra(2, 1, 1)});
  const auto p = measure(z, DensityMatrix(ket_bra(2, 0, 0)));
  CHECK(p[0] == Catch::Approx(1.0));
  CHECK(std::abs(p[1]) < 1e-15);

  Rng rng(8);
  const DensityMatrix rho = random_density(2, rng);
  const auto q = measure(Povm({identity(2) / 2.0, identity(2) / 2.0}), rho);
  CHECK(q[0] == Catch::Approx(0.5));
  CHECK(q[1] == Catch::Approx(0.5));
  CHECK(max_abs(apply_channel(identity_channel(2), rho).mat() - rho.mat()) < 1e-12);
}

TEST_CASE("channel on one tensor factor matches explicit Kraus sums") {
  Rng rng(9);
  const Channel phi = random_channel(2, 3, rng);
  const Matrix rho = random_density(4, rng).mat();
  std::vector<Matrix> first;
  for (const auto& k : phi.kraus()) first.push_back(kron(k, identity(2)));
  CHECK(max_abs(apply_channel_first(phi, rho, 2) - apply_kraus(first, rho)) < 1e-12);
  std::vector<Matrix> second;
  for (const auto& k : phi.kraus()) second.push_back(kron(identity(2), k));
  CHECK(max_abs(apply_channel_second(phi, rho, 2) - apply_kraus(second, rho)) < 1e-12);
}

TEST_CASE("random channels are trace preserving") {
  Rng rng(10);
  for (int k = 0; k < 10; ++k) {
    const Channel phi = random_channel(3, 2, rng, 2);
    Matrix s = zeros(3, 3);
    for (const auto& kr : phi.kraus()) s += kr.adjoint() * kr;
    CHECK(max_abs(s - identity(3)) < 1e-12);
  }
}
