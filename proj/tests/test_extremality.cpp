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

#include "ppovm/selftest.hpp"

using namespace ppovm;

namespace {

Matrix pauli_x() {
  Matrix m = zeros(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = identity(2);
  m(1, 1) = -1.0;
  return m;
}

Matrix proj(std::size_t d, std::size_t i) {
  Matrix m = zeros(d, d);
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return m;
}

ProcessPovm tester_of(const Povm& m) {
  return realize(RepresentationTriple::pure(2, identity(2) / std::sqrt(2.0), m));
}

double witness_residual(const ProcessPovm& f, const Witness& w) {
  double r = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    r = std::max(r, max_abs(w.lambda * w.f1[i] + (1.0 - w.lambda) * w.f2[i] - f[i]));
  }
  return r;
}

}  // namespace

TEST_CASE("generated subalgebras") {
  CHECK(Subalgebra::generated_by({identity(2)}).dim() == 1);
  const Subalgebra diag = Subalgebra::generated_by({identity(2), pauli_z()});
  CHECK(diag.dim() == 2);
  CHECK(diag.contains(proj(2, 1)));
  CHECK_FALSE(diag.contains(pauli_x()));
  CHECK(Subalgebra::generated_by({pauli_x(), pauli_z()}).dim() == 4);
  CHECK(Subalgebra::ancilla(2, 3).dim() == 9);
  CHECK(all_pass(Subalgebra::ancilla(2, 2).check()));
}

TEST_CASE("A-convex combinations") {
  Rng rng(1);
  const Povm m = random_povm(4, 3, rng);
  const Subalgebra a = Subalgebra::ancilla(2, 2);
  const ACombination one = a_convex_combine({identity(4)}, {m}, a);
  CHECK(effect_distance(one.povm.effects(), m.effects()) < 1e-12);
  const Matrix h = identity(4) / std::sqrt(2.0);
  CHECK(effect_distance(a_convex_combine({h, h}, {m, m}, a).povm.effects(), m.effects()) <
        1e-12);

  // Random proper combination: X_1 = I (x) G^{1/2}, X_2 = I (x) (I-G)^{1/2}.
  const Matrix g = random_density(2, rng).mat();
  const Matrix x1 = kron(identity(2), psd_sqrt(g));
  const Matrix x2 = kron(identity(2), psd_sqrt(identity(2) - g));
  const Povm n1 = random_povm(4, 3, rng);
  const Povm n2 = random_povm(4, 3, rng);
  const ACombination c = a_convex_combine({x1, x2}, {n1, n2}, a);
  CHECK(c.proper);
  CHECK(all_pass(Povm::check(c.povm.effects())));
  for (std::size_t i = 0; i < 3; ++i) {
    const Matrix direct = x1.adjoint() * n1[i] * x1 + x2.adjoint() * n2[i] * x2;
    CHECK(max_abs(c.povm[i] - direct) < 1e-12);
  }
  CHECK_THROWS_AS(a_convex_combine({kron(pauli_x(), identity(2))}, {m}, a),
                  NotInSubalgebraError);
}

TEST_CASE("purity solution spaces of small POVMs") {
  const Povm z({proj(2, 0), proj(2, 1)});
  CHECK(purity_solution_space(z, Subalgebra::scalars(2)).dim() == 1);
  const Povm halves({identity(2) / 2.0, identity(2) / 2.0});
  CHECK(purity_solution_space(halves, Subalgebra::scalars(2)).dim() >= 2);

  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const std::size_t d = 2 + rng.index(2);
    const Povm m = random_povm(d, 3, rng, 1 + rng.index(d));
    std::size_t expect = 0;
    for (const auto& e : m.effects()) {
      const std::size_t r = rank(e);
      expect += r * r;
    }
    CHECK(purity_solution_space(m, Subalgebra::full(d)).dim() == expect);
  }
}

TEST_CASE("purity and irreducibility of the Bell and reducible PVMs") {
  const Subalgebra anc = Subalgebra::ancilla(2, 2);
  const Povm bell = bell_pvm();
  CHECK(is_a_pure(bell, anc));
  CHECK(is_a_irreducible(bell, anc));
  const Povm e = reducible_pvm();
  CHECK_FALSE(is_a_pure(e, anc));
  CHECK_FALSE(is_a_irreducible(e, anc));
  // D_i = E_i (I (x) B) for every B in B(C^2).
  CHECK(purity_solution_space(e, anc).dim() == 4);
  Rng rng(3);
  CHECK(is_a_irreducible(random_povm(3, 2, rng), Subalgebra::scalars(3)));
}

TEST_CASE("PVMs with nonzero effects are pure for the scalars") {
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const std::size_t d = 2 + rng.index(3);
    const Povm p = random_pvm(d, 1 + rng.index(d), rng);
    CHECK(is_a_pure(p, Subalgebra::scalars(d)));
    CHECK(is_classical_extremal(p));
  }
  CHECK_FALSE(is_classical_extremal(Povm({identity(2) / 2.0, identity(2) / 2.0})));
}

TEST_CASE("classical extremality of rank-one POVMs agrees with a perturbation search") {
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    const Povm m = random_povm(2, 3, rng, 1);
    const bool extremal = is_classical_extremal(m);
    CHECK(extremal);
    // With dH = 1 the tester constraints reduce to sum_i G_i = 0.
    const ProcessPovm as_tester(2, 1, m.effects());
    CHECK(perturbation_decomposes(as_tester, rng, 100) == !extremal);
  }
  const Povm full = random_povm(2, 3, rng, 2);
  CHECK_FALSE(is_classical_extremal(full));
  CHECK(perturbation_decomposes(ProcessPovm(2, 1, full.effects()), rng, 100));
}

TEST_CASE("purity dimension grows with the subalgebra") {
  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const std::size_t d = 2 + rng.index(2);
    const std::size_t n = 2 + rng.index(2);
    const std::size_t r = std::max((d + n - 1) / n, 1 + rng.index(d));
    const Povm m = random_povm(d, n, rng, r);
    const auto c = purity_solution_space(m, Subalgebra::scalars(d)).dim();
    const auto g = purity_solution_space(m, Subalgebra::diagonal(d)).dim();
    const auto f = purity_solution_space(m, Subalgebra::full(d)).dim();
    CHECK(c <= g);
    CHECK(g <= f);
  }
}

TEST_CASE("purity for some subalgebra implies classical extremality") {
  Rng rng(7);
  for (int k = 0; k < 30; ++k) {
    const std::size_t d = 2 + rng.index(2);
    const Povm m = k % 2 == 0 ? random_pvm(d, 1 + rng.index(d), rng)
                              : random_povm(d, d + rng.index(2), rng, 1);
    for (const auto& a : {Subalgebra::scalars(d), Subalgebra::diagonal(d),
                          Subalgebra::generated_by({rng.hermitian(d)})}) {
      if (is_a_pure(m, a)) CHECK(is_classical_extremal(m));
    }
  }
}

TEST_CASE("certification of fixed testers") {
  const ExtremalityCertificate bell = certify_process_extremal(tester_of(bell_pvm()));
  CHECK(bell.verdict == Verdict::Extremal);
  CHECK(bell.purity_dim == 1);
  CHECK_FALSE(bell.witness);

  const ProcessPovm f = tester_of(reducible_pvm());
  const ExtremalityCertificate red = certify_process_extremal(f);
  REQUIRE(red.verdict == Verdict::NotExtremal);
  REQUIRE(red.witness);
  CHECK(red.purity_dim == 4);
  CHECK(witness_residual(f, *red.witness) <= 1e-8);
  CHECK(effect_distance(red.witness->f1, red.witness->f2) > 1e-6);
  CHECK(red.witness->lambda > 0.0);
  CHECK(red.witness->lambda < 1.0);

  Rng rng(8);
  const Matrix v = random_isometry(2, 1, rng);
  const ProcessPovm single(2, 2, {kron(identity(2), v * v.adjoint())});
  CHECK(certify_process_extremal(single).verdict == Verdict::Extremal);
}

TEST_CASE("certification is deterministic under a fixed seed") {
  const ProcessPovm f = tester_of(reducible_pvm());
  const auto a = certify_process_extremal(f, {}, 99);
  const auto b = certify_process_extremal(f, {}, 99);
  REQUIRE(a.witness);
  REQUIRE(b.witness);
  CHECK(a.witness->lambda == b.witness->lambda);
  CHECK(effect_distance(a.witness->f1, b.witness->f1) == 0.0);
}

TEST_CASE("witness along an explicit direction of the reducible PVM") {
  const RepresentationTriple t =
      RepresentationTriple::pure(2, identity(2) / std::sqrt(2.0), reducible_pvm());
  const Matrix b = kron(identity(2), pauli_z());
  std::vector<Matrix> dir;
  for (const auto& e : t.M().effects()) dir.push_back(e * b);
  const Witness w = nonextremal_witness(t, dir);
  const ProcessPovm f = realize(t);
  CHECK(witness_residual(f, w) <= 1e-9);
  CHECK(effect_distance(w.f1, w.f2) > 1e-6);
  CHECK(effect_distance(realize(w.t1), w.f1) <= 1e-9);

  CHECK_THROWS_AS(nonextremal_witness(t, t.M().effects()), DegenerateDirectionError);
}

TEST_CASE("witness for a POVM on K alone") {
  const Povm halves({identity(2) / 2.0, identity(2) / 2.0});
  const RepresentationTriple t = RepresentationTriple::pure(2, identity(1), halves);
  const Matrix d = proj(2, 0) - identity(2) / 2.0;
  const Witness w = nonextremal_witness(t, {d, -d});
  CHECK(effect_distance(w.f1, w.f2) > 1e-6);
  CHECK(witness_residual(realize(t), w) <= 1e-9);
}

TEST_CASE("A-equivalence") {
  Rng rng(9);
  const Subalgebra anc = Subalgebra::ancilla(2, 2);
  const Povm m = random_povm(4, 3, rng);
  const EquivalenceResult same = a_equivalent(m, m, anc);
  REQUIRE(same.verdict == Equivalence::Yes);
  REQUIRE(same.U);
  CHECK(max_abs(same.U->adjoint() * *same.U - identity(4)) < 1e-8);

  for (int k = 0; k < 50; ++k) {
    const Povm mk = random_povm(4, 2 + rng.index(2), rng);
    const Matrix u = kron(identity(2), random_unitary(2, rng));
    std::vector<Matrix> n;
    for (const auto& e : mk.effects()) n.push_back(u.adjoint() * e * u);
    const EquivalenceResult r = a_equivalent(mk, Povm(n), anc);
    REQUIRE(r.verdict == Equivalence::Yes);
    CHECK(anc.contains(*r.U, Tolerance(1e-7)));
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(max_abs(r.U->adjoint() * mk[i] * *r.U - n[i]) <= 1e-8);
    }
  }

  const Povm other({identity(4) * 0.3, identity(4) * 0.7});
  CHECK(a_equivalent(Povm({identity(4) * 0.5, identity(4) * 0.5}), other, anc).verdict ==
        Equivalence::No);
}

TEST_CASE("folding the tail of a combination") {
  Rng rng(10);
  const Povm a = random_povm(2, 2, rng);
  const Povm b = random_povm(2, 2, rng);
  const Povm c = random_povm(2, 2, rng);
  const Matrix g = random_density(2, rng).mat();
  const Matrix x = psd_sqrt(g);
  const Matrix y = psd_sqrt(identity(2) - g);
  const TwoTerm two = combine_tail({x, y}, {a, b}, 0);
  CHECK(max_abs(two.X - x) < 1e-12);
  REQUIRE(two.Y);
  CHECK(max_abs(*two.Y - y) < 1e-9);
  CHECK(effect_distance(two.N->effects(), b.effects()) < 1e-9);

  const Matrix third = identity(2) / std::sqrt(3.0);
  const TwoTerm sym = combine_tail({third, third, third}, {a, b, c}, 0);
  REQUIRE(sym.Y);
  CHECK(max_abs(sym.Y->adjoint() * *sym.Y - 2.0 / 3.0 * identity(2)) < 1e-12);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(max_abs((*sym.N)[i] - (b[i] + c[i]) / 2.0) < 1e-12);
  }

  const TwoTerm zero = combine_tail({zeros(2, 2), identity(2)}, {a, b}, 0);
  REQUIRE(zero.Y);
  CHECK(max_abs(zero.Y->adjoint() * *zero.Y - identity(2)) < 1e-12);
  CHECK(effect_distance(zero.N->effects(), b.effects()) < 1e-12);
}
