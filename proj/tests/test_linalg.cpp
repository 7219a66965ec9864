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

#include "ppovm/rng.hpp"

using namespace ppovm;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Matrix m = zeros(v.size(), v.size());
  Eigen::Index i = 0;
  for (double x : v) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

// Entry-by-entry partial trace, written out independently of the library.
Matrix partial_trace_loops(const Matrix& a, int d1, int d2, bool trace_first) {
  const int keep = trace_first ? d2 : d1;
  const int sum = trace_first ? d1 : d2;
  Matrix out = zeros(static_cast<std::size_t>(keep), static_cast<std::size_t>(keep));
  for (int i = 0; i < keep; ++i) {
    for (int j = 0; j < keep; ++j) {
      for (int k = 0; k < sum; ++k) {
        out(i, j) += trace_first ? a(k * d2 + i, k * d2 + j) : a(i * d2 + k, j * d2 + k);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("svd of fixed matrices") {
  const Svd id = svd(identity(2));
  CHECK(id.s(0) == Catch::Approx(1.0));
  CHECK(id.s(1) == Catch::Approx(1.0));
  CHECK(max_abs(id.U * id.V.adjoint() - identity(2)) < 1e-12);

  const Svd d = svd(diag({3, 0}));
  CHECK(d.s(0) == Catch::Approx(3.0));
  CHECK(std::abs(d.s(1)) < 1e-15);
}

TEST_CASE("svd reconstructs random matrices") {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = rng.gaussian(3, 3);
    const Svd s = svd(a);
    CHECK(max_abs(s.U * s.s.cast<cplx>().asDiagonal() * s.V.adjoint() - a) <= 1e-9);
  }
}

TEST_CASE("svd handles repeated singular values of block systems") {
  // Block-diagonal kron structure with threefold degenerate singular values.
  Rng rng(5);
  Matrix a = zeros(27, 27);
  for (int b = 0; b < 3; ++b) {
    const Matrix j = rng.gaussian(3, 3);
    a.block(9 * b, 9 * b, 9, 9) = kron(identity(3), j.transpose());
  }
  const Svd s = svd(a);
  CHECK(max_abs(s.U * s.s.cast<cplx>().asDiagonal() * s.V.adjoint() - a) <= 1e-12);
  CHECK(max_abs(a * pinv(a) * a - a) <= 1e-12);
}

TEST_CASE("null space examples") {
  CHECK(null_space(identity(2)).cols() == 0);
  CHECK(null_space(zeros(2, 2)).cols() == 2);

  Matrix l(2, 2);
  l << 1, 1, 1, 1;
  const Matrix k = null_space(l);
  REQUIRE(k.cols() == 1);
  // The kernel of [[1,1],[1,1]] is spanned by (1,-1)/sqrt 2.
  Vector expect(2);
  expect << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(k.col(0).dot(expect)) - 1.0) < 1e-12);
}

TEST_CASE("null space vectors are orthonormal and annihilated") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const Matrix l = rng.gaussian(3, 6);
    const Matrix n = null_space(l);
    REQUIRE(n.cols() == 3);
    CHECK(max_abs(n.adjoint() * n - identity(3)) <= 1e-9);
    CHECK(max_abs(l * n) <= 1e-9 * op_norm(l));
  }
}

TEST_CASE("null space ignores rounding residue of a vanishing operator") {
  Matrix l = zeros(4, 3);
  l(0, 0) = 1e-17;
  l(2, 1) = -2e-17;
  CHECK(null_space(l).cols() == 3);
}

TEST_CASE("psd square roots") {
  CHECK(max_abs(psd_sqrt(diag({4, 0})) - diag({2, 0})) < 1e-12);
  CHECK(max_abs(psd_inv_sqrt(diag({4, 0})) - diag({0.5, 0})) < 1e-12);
  CHECK(max_abs(psd_sqrt(identity(3)) - identity(3)) < 1e-12);
  CHECK(max_abs(psd_inv_sqrt(identity(3)) - identity(3)) < 1e-12);
}

TEST_CASE("psd sqrt squares back on random PSD matrices") {
  Rng rng(17);
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = 2 + rng.index(5);
    const Matrix b = rng.gaussian(d, d);
    const Matrix a = b.adjoint() * b;
    const Matrix r = psd_sqrt(a);
    CHECK(max_abs(r * r - a) <= 10 * 1e-9 * op_norm(a));
  }
}

TEST_CASE("eigh orders eigenvalues descending with canonical phases") {
  Rng rng(23);
  const Matrix h = rng.hermitian(4);
  const Eigh e = eigh(h);
  for (Eigen::Index i = 1; i < 4; ++i) CHECK(e.values(i - 1) >= e.values(i));
  CHECK(max_abs(e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint() - h) <
        1e-12);
  // Repeated runs on the same input give identical vectors.
  CHECK(max_abs(eigh(h).vectors - e.vectors) == 0.0);
}

TEST_CASE("eigh keeps degenerate eigenvectors in a basis-stable order") {
  const Eigh e = eigh(diag({1, 1, 0}));
  // Within the degenerate cluster the vector pivoting on row 0 comes first.
  CHECK(std::abs(e.vectors(0, 0)) == Catch::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 1)) == Catch::Approx(1.0));
}

TEST_CASE("polar decomposition") {
  Rng rng(7);
  const Matrix u = random_unitary(3, rng);
  const Polar pu = polar(u);
  CHECK(max_abs(pu.W - u) < 1e-12);
  CHECK(max_abs(pu.P - identity(3)) < 1e-12);
  CHECK(pu.unique);

  const Polar pd = polar(diag({2, 0}));
  CHECK(max_abs(pd.W - diag({1, 0})) < 1e-12);
  CHECK(max_abs(pd.P - diag({2, 0})) < 1e-12);
  CHECK_FALSE(pd.unique);

  for (int k = 0; k < 10; ++k) {
    const Matrix a = rng.gaussian(3, 3);
    const Polar p = polar(a);
    CHECK(max_abs(a - p.W * p.P) <= 1e-9);
    CHECK(max_abs(p.W.adjoint() * p.W - identity(3)) <= 1e-9);
  }
}

TEST_CASE("kron and partial trace") {
  CHECK(max_abs(kron(identity(2), identity(2)) - identity(4)) == 0.0);
  CHECK(max_abs(partial_trace(identity(4), 2, 2, Factor::First) - 2.0 * identity(2)) ==
        0.0);

  Rng rng(29);
  const Matrix rho = rng.hermitian(2);
  const Matrix tau = rng.hermitian(2);
  CHECK(max_abs(partial_trace(kron(rho, tau), 2, 2, Factor::Second) - rho * tau.trace()) <
        1e-12);
}

TEST_CASE("partial trace agrees with explicit index sums") {
  Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const int d1 = 2 + static_cast<int>(rng.index(2));
    const int d2 = 2 + static_cast<int>(rng.index(2));
    const Matrix a = rng.gaussian(static_cast<std::size_t>(d1 * d2),
                                  static_cast<std::size_t>(d1 * d2));
    const Matrix b = rng.gaussian(static_cast<std::size_t>(d1 * d2),
                                  static_cast<std::size_t>(d1 * d2));
    const auto u1 = static_cast<std::size_t>(d1);
    const auto u2 = static_cast<std::size_t>(d2);
    CHECK(max_abs(partial_trace(a, u1, u2, Factor::First) -
                  partial_trace_loops(a, d1, d2, true)) < 1e-12);
    CHECK(max_abs(partial_trace(a, u1, u2, Factor::Second) -
                  partial_trace_loops(a, d1, d2, false)) < 1e-12);
    CHECK(std::abs(partial_trace(a, u1, u2, Factor::First).trace() - a.trace()) < 1e-12);
    const cplx c(0.3, -1.2);
    CHECK(max_abs(partial_trace(a + c * b, u1, u2, Factor::Second) -
                  partial_trace(a, u1, u2, Factor::Second) -
                  c * partial_trace(b, u1, u2, Factor::Second)) < 1e-12);
  }
}

TEST_CASE("support projections") {
  CHECK(max_abs(support_projection(diag({1, 0})) - diag({1, 0})) < 1e-12);
  CHECK(max_abs(support_projection(identity(2)) - identity(2)) < 1e-12);
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs(support_projection(v * v.adjoint()) - half) < 1e-12);
}

TEST_CASE("rank cutoff is relative") {
  CHECK(rank(1e-6 * identity(3)) == 3);
  CHECK(rank(diag({1, 1e-12})) == 1);
}

TEST_CASE("complete_to_unitary extends an isometry") {
  Rng rng(41);
  const Matrix v = random_isometry(4, 2, rng);
  const Matrix u = complete_to_unitary(v);
  CHECK(max_abs(u.leftCols(2) - v) < 1e-12);
  CHECK(max_abs(u.adjoint() * u - identity(4)) < 1e-12);
}

TEST_CASE("non-finite input is rejected") {
  Matrix a = identity(2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(a), DecompositionError);
  CHECK_THROWS_AS(Tolerance(0.0), ValidationError);
}
