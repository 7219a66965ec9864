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

// Choi matrix sum_ij Phi(|i><j|) (x) |i><j| built entry by entry.
Matrix choi_loops(const Channel& phi) {
  const auto din = phi.in_dim();
  const auto dout = phi.out_dim();
  Matrix c = zeros(dout * din, dout * din);
  for (std::size_t i = 0; i < din; ++i) {
    for (std::size_t j = 0; j < din; ++j) {
      Matrix e = zeros(din, din);
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      Matrix out = zeros(dout, dout);
      for (const auto& k : phi.kraus()) out += k * e * k.adjoint();
      for (std::size_t a = 0; a < dout; ++a) {
        for (std::size_t b = 0; b < dout; ++b) {
          c(static_cast<Eigen::Index>(a * din + i), static_cast<Eigen::Index>(b * din + j)) =
              out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
    }
  }
  return c;
}

// Tr M_i (Phi (x) id)(rho) with the Kraus operators lifted by hand.
std::vector<double> scheme_loops(const RepresentationTriple& t, const Channel& phi) {
  const Matrix rho = t.rho().mat();
  Matrix out = zeros(t.dk() * t.dh0(), t.dk() * t.dh0());
  for (const auto& k : phi.kraus()) {
    const Matrix kl = kron(k, identity(t.dh0()));
    out += kl * rho * kl.adjoint();
  }
  std::vector<double> p;
  for (const auto& m : t.M().effects()) p.push_back((m * out).trace().real());
  return p;
}

double sum_effect_distance(const std::vector<std::pair<double, ProcessPovm>>& parts,
                           const ProcessPovm& target) {
  std::vector<Matrix> s(target.size(), zeros(target.dk() * target.dh(),
                                             target.dk() * target.dh()));
  for (const auto& [w, f] : parts) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += w * f[i];
  }
  return effect_distance(s, target.effects());
}

Povm bell_pvm() {
  Matrix b(4, 4);
  const double r = 1.0 / std::sqrt(2.0);
  b << r, 0, 0, r, 0, r, r, 0, 0, r, -r, 0, r, 0, 0, -r;
  return pvm_from_basis(b, {{0}, {1}, {2}, {3}});
}

}  // namespace

TEST_CASE("process POVM validation") {
  Rng rng(1);
  const DensityMatrix sigma = random_density(2, rng);
  CHECK_NOTHROW(ProcessPovm(2, 2, {kron(identity(2), sigma.mat())}));
  CHECK_THROWS_AS(ProcessPovm(2, 2, {kron(identity(2), 2.0 * sigma.mat())}), ValidationError);
  Matrix bad = kron(identity(2), sigma.mat());
  bad(0, 1) += 0.1;
  bad(1, 0) += 0.1;
  CHECK_THROWS(ProcessPovm(2, 2, {bad}));
}

TEST_CASE("realize with a scalar input halves the effects") {
  Rng rng(2);
  const Povm m = random_povm(4, 3, rng);
  const ProcessPovm f =
      realize(RepresentationTriple::pure(2, identity(2) / std::sqrt(2.0), m));
  for (std::size_t i = 0; i < 3; ++i) CHECK(max_abs(f[i] - m[i] / 2.0) < 1e-12);
  CHECK(max_abs(f.sigma() - identity(2) / 2.0) < 1e-12);
}

TEST_CASE("realize of the trivial POVM is I (x) T^dagger T") {
  Rng rng(3);
  const Matrix t = random_input(3, 2, rng);
  const ProcessPovm f = realize(RepresentationTriple::pure(2, t, Povm({identity(4)})));
  REQUIRE(f.size() == 1);
  CHECK(max_abs(f[0] - kron(identity(2), t.adjoint() * t)) < 1e-12);
}

TEST_CASE("realization identity against explicit Kraus evaluation") {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const auto dk = 2 + rng.index(2);
    const auto dh = 2 + rng.index(2);
    const auto dh0 = 2 + rng.index(2);
    const RepresentationTriple t = k % 2 == 0 ? random_pure_triple(dk, dh, dh0, 3, rng)
                                              : random_mixed_triple(dk, dh, dh0, 3, rng);
    const ProcessPovm f = realize(t);
    for (int c = 0; c < 10; ++c) {
      const Channel phi = random_channel(dh, dk, rng);
      const Matrix choi_m = choi_loops(phi);
      CHECK(max_abs(choi(phi).mat - choi_m) < 1e-12);
      const auto rhs = scheme_loops(t, phi);
      for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs((f[i] * choi_m).trace().real() - rhs[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("tester probabilities of simple testers") {
  const Povm m = bell_pvm();
  const ProcessPovm f = realize(RepresentationTriple::pure(2, identity(2) / std::sqrt(2.0), m));
  const auto p = tester_probabilities(f, identity_channel(2));
  const auto q = measure(m, DensityMatrix(psi(2) / 2.0));
  for (std::size_t i = 0; i < 4; ++i) CHECK(p[i] == Catch::Approx(q[i]).margin(1e-12));
  // psi/2 is the first Bell state.
  CHECK(p[0] == Catch::Approx(1.0));

  Rng rng(5);
  const ProcessPovm one(2, 2, {kron(identity(2), random_density(2, rng).mat())});
  CHECK(tester_probabilities(one, random_channel(2, 2, rng))[0] == Catch::Approx(1.0));

  Matrix p0 = zeros(2, 2);
  p0(0, 0) = 1.0;
  const ProcessPovm sym(2, 2, {kron(p0, identity(2) / 2.0),
                               kron(identity(2) - p0, identity(2) / 2.0)});
  const auto u = tester_probabilities(sym, completely_depolarizing(2, 2));
  CHECK(u[0] == Catch::Approx(0.5));
  CHECK(u[1] == Catch::Approx(0.5));
}

TEST_CASE("minimal representation of a tester with maximally mixed sigma") {
  Rng rng(6);
  const std::size_t d = 3;
  const Povm m = random_povm(2 * d, 2, rng);
  std::vector<Matrix> effects;
  for (const auto& e : m.effects()) effects.push_back(e / static_cast<double>(d));
  const ProcessPovm f(2, d, effects);
  const RepresentationTriple t = minimal_representation(f);
  CHECK(t.dh0() == d);
  CHECK(max_abs(t.T() - identity(d) / std::sqrt(static_cast<double>(d))) < 1e-12);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(max_abs(t.M()[i] - static_cast<double>(d) * f[i]) < 1e-12);
  }
  CHECK(rank(f).r == d);
}

TEST_CASE("minimal representation of a tester with pure sigma") {
  Rng rng(7);
  const Matrix v = random_isometry(2, 1, rng);
  const Povm k = random_povm(2, 3, rng);
  std::vector<Matrix> effects;
  for (const auto& e : k.effects()) effects.push_back(kron(e, v * v.adjoint()));
  const ProcessPovm f(2, 2, effects);
  CHECK(rank(f).r == 1);
  const RepresentationTriple t = minimal_representation(f);
  CHECK(t.dh0() == 1);
  CHECK(t.M().space_dim() == 2);
  // Compressing to |v> recovers the POVM on K.
  for (std::size_t i = 0; i < 3; ++i) CHECK(max_abs(t.M()[i] - k[i]) < 1e-9);
  CHECK(effect_distance(realize(t), f) < 1e-12);
}

TEST_CASE("minimize and realize round trip on random testers") {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto dk = 2 + rng.index(2);
    const auto dh = 2 + rng.index(2);
    const auto r = 1 + rng.index(dh);
    const ProcessPovm f = random_tester(dk, dh, 2 + rng.index(3), rng, r);
    const RepresentationTriple t = minimal_representation(f);
    CHECK(effect_distance(realize(t), f) <= 1e-9);
    CHECK(t.dh0() == r);
    CHECK(rank(f).r == r);
    CHECK(is_minimal(t));
  }
}

TEST_CASE("Schmidt rank of any pure representation equals the tester rank") {
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const auto dh = 2 + rng.index(2);
    const auto dh0 = 2 + rng.index(2);
    const auto r = 1 + rng.index(std::min(dh, dh0));
    const RepresentationTriple t = random_pure_triple(2, dh, dh0, 3, rng, r);
    CHECK(schmidt_rank(vectorize(t.T()), dh, dh0) == rank(realize(t)).r);
    CHECK(rank(realize(t)).r == r);
  }
}

TEST_CASE("equivalence of triples") {
  Rng rng(10);
  const RepresentationTriple a = random_pure_triple(2, 2, 2, 3, rng);
  CHECK(triples_equivalent(a, a));
  const Matrix u = random_unitary(2, rng);
  std::vector<Matrix> rotated;
  const Matrix ul = kron(identity(2), u);
  for (const auto& e : a.M().effects()) rotated.push_back(ul * e * ul.adjoint());
  const RepresentationTriple b = RepresentationTriple::pure(2, u * a.T(), Povm(rotated));
  CHECK(triples_equivalent(a, b));
  const RepresentationTriple c =
      RepresentationTriple::pure(2, a.T(), random_povm(4, 3, rng));
  CHECK_FALSE(triples_equivalent(a, c));
}

TEST_CASE("connecting isometries") {
  Rng rng(11);
  const RepresentationTriple a = minimal_representation(random_tester(2, 3, 3, rng));
  const ConnectingIsometry self = connecting_isometry(a, a);
  CHECK(max_abs(self.U - identity(3)) < 1e-9);

  const Matrix v = random_unitary(3, rng);
  const RepresentationTriple b =
      RepresentationTriple::pure(2, v * a.T(), Povm(compress_all(a.M().effects(), 2, v.adjoint())));
  const ConnectingIsometry c = connecting_isometry(a, b);
  CHECK(max_abs(c.U - v) < 1e-9);
  CHECK(max_abs(c.U * a.T() - b.T()) < 1e-9);

  const RepresentationTriple big = extend_ancilla(a, 5);
  const ConnectingIsometry e = connecting_isometry(a, big);
  CHECK(rows_of(e.U) == 5);
  CHECK(max_abs(e.U.adjoint() * e.U - identity(3)) < 1e-9);
  CHECK(max_abs(e.U * e.U.adjoint() - identity(5)) > 0.5);
  CHECK(e.conjugation_residual < 1e-8);

  CHECK_THROWS_AS(connecting_isometry(big, a), NonMinimalError);
  const RepresentationTriple other = minimal_representation(random_tester(2, 3, 3, rng));
  CHECK_THROWS_AS(connecting_isometry(a, other), NotEquivalentError);
}

TEST_CASE("ancilla channels can move between state and measurement") {
  Rng rng(12);
  for (int k = 0; k < 10; ++k) {
    const std::size_t dk = 2;
    const std::size_t dh = 2;
    const std::size_t dh0 = 2;
    const std::size_t dh0b = 3;
    const DensityMatrix rho = random_density(dh * dh0, rng);
    const Channel chi = random_channel(dh0, dh0b, rng);
    const Povm mb = random_povm(dk * dh0b, 3, rng);
    const DensityMatrix moved(apply_channel_second(chi, rho.mat(), dh));
    const ProcessPovm lhs = realize(RepresentationTriple::mixed(dk, dh, moved, mb));
    std::vector<Matrix> pulled;
    for (const auto& e : mb.effects()) pulled.push_back(apply_adjoint_second(chi, e, dk));
    const ProcessPovm rhs = realize(RepresentationTriple::mixed(dk, dh, rho, Povm(pulled)));
    CHECK(effect_distance(lhs, rhs) <= 1e-9);
  }
}

TEST_CASE("mixing testers") {
  Rng rng(13);
  const RepresentationTriple a = random_pure_triple(2, 2, 2, 3, rng);
  const MixResult single = mix({{1.0, a}});
  CHECK(triples_equivalent(single.triple, a));
  CHECK(is_minimal(single.triple));

  const MixResult twice = mix({{0.5, a}, {0.5, a}});
  CHECK(triples_equivalent(twice.triple, a));

  const RepresentationTriple b = random_pure_triple(2, 2, 3, 3, rng);
  const MixResult ab = mix({{0.3, a}, {0.7, b}});
  CHECK(sum_effect_distance({{0.3, realize(a)}, {0.7, realize(b)}}, realize(ab.triple)) <=
        1e-9);
  CHECK_THROWS_AS(mix({{0.3, a}, {0.3, b}}), WeightSumError);
}

TEST_CASE("decompose along trivial and filtered splits") {
  Rng rng(14);
  const RepresentationTriple t = random_pure_triple(2, 2, 2, 2, rng);
  const auto one = decompose_along_split(t, {{identity(2)}, {t.M()}});
  REQUIRE(one.size() == 1);
  CHECK(one[0].weight == Catch::Approx(1.0));
  CHECK(triples_equivalent(one[0].triple, t));

  // A T of rank one inside H0 = C^2 and a split whose second coefficient
  // annihilates range(T).
  Matrix t1 = zeros(2, 2);
  t1(0, 0) = 0.6;
  t1(0, 1) = 0.8;
  const Povm m1 = random_povm(2, 2, rng);
  const Povm m2 = random_povm(2, 2, rng);
  Matrix x1 = zeros(1, 2);
  x1(0, 0) = 1.0;
  Matrix x2 = zeros(1, 2);
  x2(0, 1) = 1.0;
  std::vector<Matrix> m(2, zeros(4, 4));
  for (std::size_t i = 0; i < 2; ++i) {
    m[i] = compress(m1[i], 2, x1) + compress(m2[i], 2, x2);
  }
  const RepresentationTriple rt = RepresentationTriple::pure(2, t1, Povm(m));
  const auto filtered = decompose_along_split(rt, {{x1, x2}, {m1, m2}});
  REQUIRE(filtered.size() == 1);
  CHECK(filtered[0].index == 0);
  CHECK(filtered[0].weight == Catch::Approx(1.0));
}

TEST_CASE("decompose along a random proper split reconstructs the tester") {
  Rng rng(15);
  for (int k = 0; k < 20; ++k) {
    const Matrix g = random_density(2, rng).mat();
    const Matrix x1 = psd_sqrt(g);
    const Matrix x2 = psd_sqrt(identity(2) - g);
    const Povm m1 = random_povm(4, 3, rng);
    const Povm m2 = random_povm(4, 3, rng);
    std::vector<Matrix> m;
    for (std::size_t i = 0; i < 3; ++i) m.push_back(compress(m1[i], 2, x1) + compress(m2[i], 2, x2));
    const RepresentationTriple t =
        RepresentationTriple::pure(2, random_input(2, 2, rng), Povm(m));
    const auto parts = decompose_along_split(t, {{x1, x2}, {m1, m2}});
    std::vector<std::pair<double, ProcessPovm>> weighted;
    double total = 0.0;
    for (const auto& p : parts) {
      weighted.emplace_back(p.weight, realize(p.triple));
      total += p.weight;
    }
    CHECK(total == Catch::Approx(1.0));
    CHECK(sum_effect_distance(weighted, realize(t)) <= 1e-9);
  }
}

TEST_CASE("decompose rejects splits that do not reproduce M") {
  Rng rng(16);
  const RepresentationTriple t = random_pure_triple(2, 2, 2, 2, rng);
  CHECK_THROWS_AS(decompose_along_split(t, {{identity(2)}, {random_povm(4, 2, rng)}}),
                  SplitInconsistencyError);
}

TEST_CASE("mix and decompose are inverse on weights") {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const RepresentationTriple a = random_pure_triple(2, 2, 1 + rng.index(3), 2, rng);
    const RepresentationTriple b = random_pure_triple(2, 2, 1 + rng.index(3), 2, rng);
    const double w = rng.uniform(0.1, 0.9);
    const MixResult r = mix({{w, a}, {1.0 - w, b}});
    const auto back = decompose_along_split(r.triple, r.split);
    REQUIRE(back.size() == 2);
    for (const auto& p : back) {
      CHECK(std::abs(p.weight - (p.index == 0 ? w : 1.0 - w)) <= 1e-8);
      CHECK(effect_distance(realize(p.triple), realize(p.index == 0 ? a : b)) <= 1e-8);
    }
  }
}

TEST_CASE("restricting and extending the ancilla") {
  Rng rng(18);
  const RepresentationTriple a = minimal_representation(random_tester(2, 2, 3, rng));
  CHECK(triples_equivalent(restrict_to_minimal(a), a));
  CHECK(restrict_to_minimal(a).dh0() == a.dh0());

  const RepresentationTriple ext = extend_ancilla(a, 4);
  CHECK(ext.dh0() == 4);
  CHECK(triples_equivalent(restrict_to_minimal(ext), a));

  const RepresentationTriple low = random_pure_triple(2, 2, 3, 2, rng, 1);
  CHECK(restrict_to_minimal(low).dh0() == 1);
  CHECK(effect_distance(realize(restrict_to_minimal(low)), realize(low)) < 1e-9);
}
