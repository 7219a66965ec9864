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

// Subalgebras, A-convex combinations of POVMs, and exact certification of
// extremality for process POVMs.
//
// A POVM M is A-pure when the only tuples (D_i) with D_i supported on
// supp(M_i) and sum_i D_i in A are the multiples z M. That is a kernel
// computation, and a tester is extremal exactly when the POVM of its minimal
// representation is pure for A = I_K (x) B(H0). Any extra solution D yields
// an explicit two-point decomposition of the tester.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppovm/process_povm.hpp"
#include "ppovm/rng.hpp"

namespace ppovm {

// ---------------------------------------------------------------------------
// Subalgebra
// ---------------------------------------------------------------------------

/// Unital *-subalgebra of B(C^d), held as a Hilbert-Schmidt orthonormal
/// basis.
class Subalgebra {
 public:
  /// Smallest unital *-algebra containing `mats`.
  static Subalgebra generated_by(const std::vector<Matrix>& mats,
                                 Tolerance tol = {}) {
    if (mats.empty()) throw DimensionError("subalgebra: no generators");
    const auto d = rows_of(mats.front());
    std::vector<Matrix> gens;
    for (const auto& m : mats) {
      require_square(m, "subalgebra generator");
      if (rows_of(m) != d) throw DimensionError("subalgebra: generator sizes differ");
      require_finite(m, "subalgebra generator");
      gens.push_back(m);
      gens.push_back(m.adjoint());
    }
    std::vector<Matrix> span = gens;
    span.push_back(identity(d));
    std::vector<Matrix> basis = hs_orthonormal_basis(span, tol);
    // Words in the generators are reached by right-multiplying the current
    // span by generators until its dimension stops growing.
    while (true) {
      std::vector<Matrix> grown = basis;
      for (const auto& b : basis) {
        for (const auto& g : gens) grown.push_back(b * g);
      }
      std::vector<Matrix> next = hs_orthonormal_basis(grown, tol);
      if (next.size() > d * d) {
        throw ValidationError("subalgebra closure exceeded d^2 dimensions");
      }
      if (next.size() == basis.size()) break;
      basis = std::move(next);
    }
    return Subalgebra(d, std::move(basis));
  }

  static Subalgebra scalars(std::size_t d) {
    return Subalgebra(d, {identity(d) / std::sqrt(static_cast<double>(d))});
  }

  static Subalgebra full(std::size_t d) {
    std::vector<Matrix> basis;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) basis.push_back(unit(d, d, i, j));
    }
    return Subalgebra(d, std::move(basis));
  }

  static Subalgebra diagonal(std::size_t d) {
    std::vector<Matrix> basis;
    for (std::size_t i = 0; i < d; ++i) basis.push_back(unit(d, d, i, i));
    return Subalgebra(d, std::move(basis));
  }

  /// I_K (x) B(H0) inside B(K (x) H0).
  static Subalgebra ancilla(std::size_t d_k, std::size_t d_h0) {
    std::vector<Matrix> basis;
    const double s = 1.0 / std::sqrt(static_cast<double>(d_k));
    for (std::size_t i = 0; i < d_h0; ++i) {
      for (std::size_t j = 0; j < d_h0; ++j) {
        basis.push_back(s * kron(identity(d_k), unit(d_h0, d_h0, i, j)));
      }
    }
    return Subalgebra(d_k * d_h0, std::move(basis));
  }

  std::size_t ambient_dim() const { return d_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }

  /// Coordinates <B_b, X> in the orthonormal basis.
  Vector coordinates(const Matrix& x) const {
    Vector c(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      c(static_cast<Eigen::Index>(b)) = hs_inner(basis_[b], x);
    }
    return c;
  }

  Matrix element(const Vector& c) const {
    Matrix x = zeros(d_, d_);
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      x += c(static_cast<Eigen::Index>(b)) * basis_[b];
    }
    return x;
  }

  /// Hilbert-Schmidt orthogonal projection onto the span.
  Matrix project(const Matrix& x) const { return element(coordinates(x)); }

  double membership_residual(const Matrix& x) const {
    if (rows_of(x) != d_ || cols_of(x) != d_) {
      throw DimensionError("subalgebra membership: operand has wrong size");
    }
    return hs_norm(x - project(x));
  }

  bool contains(const Matrix& x, Tolerance tol = {}) const {
    return membership_residual(x) <= tol.eps * hs_norm(x);
  }

  Report check(Tolerance tol = {}) const {
    double star = 0.0;
    double mult = 0.0;
    for (const auto& a : basis_) {
      star = std::max(star, membership_residual(a.adjoint()));
      for (const auto& b : basis_) {
        mult = std::max(mult, membership_residual(a * b));
      }
    }
    return {
        {"contains identity", membership_residual(identity(d_)), tol.check()},
        {"closed under adjoint", star, tol.check()},
        {"closed under products", mult, tol.check()},
    };
  }

 private:
  Subalgebra(std::size_t d, std::vector<Matrix> basis)
      : d_(d), basis_(std::move(basis)) {}

  static Matrix unit(std::size_t r, std::size_t c, std::size_t i,
                     std::size_t j) {
    Matrix e = zeros(r, c);
    e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    return e;
  }

  std::size_t d_;
  std::vector<Matrix> basis_;
};

inline Subalgebra subalgebra_from_basis(const std::vector<Matrix>& mats,
                                        Tolerance tol = {}) {
  return Subalgebra::generated_by(mats, tol);
}

// ---------------------------------------------------------------------------
// A-convex combinations
// ---------------------------------------------------------------------------

struct ACombination {
  Povm povm;
  bool proper;  // every coefficient invertible
};

/// M_i = sum_j X_j^dagger N^j_i X_j with X_j in A and sum_j X_j^dagger X_j = I.
inline ACombination a_convex_combine(const std::vector<Matrix>& coeffs,
                                     const std::vector<Povm>& parts,
                                     const Subalgebra& a, Tolerance tol = {}) {
  if (coeffs.empty() || coeffs.size() != parts.size()) {
    throw DimensionError("a_convex_combine: coefficient/part count mismatch");
  }
  const auto d = a.ambient_dim();
  const auto n = parts.front().size();
  Matrix gram = zeros(d, d);
  std::vector<Matrix> out(n, zeros(d, d));
  bool proper = true;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const Matrix& x = coeffs[j];
    if (parts[j].space_dim() != d || parts[j].size() != n) {
      throw DimensionError("a_convex_combine: part " + std::to_string(j) +
                           " has the wrong shape");
    }
    if (!a.contains(x, tol)) {
      throw NotInSubalgebraError("a_convex_combine: coefficient " +
                                 std::to_string(j) + " is not in A (residual " +
                                 std::to_string(a.membership_residual(x)) + ")");
    }
    gram += x.adjoint() * x;
    const RealVector s = svd(x).s;
    if (s.size() == 0 || s(s.size() - 1) <= tol.eps * s(0)) proper = false;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += x.adjoint() * parts[j][i] * x;
    }
  }
  const double res = max_abs(gram - identity(d));
  if (res > tol.eps) {
    throw ValidationError("a_convex_combine: sum X^dagger X deviates from I by " +
                          std::to_string(res));
  }
  return {Povm(std::move(out), tol), proper};
}

struct TwoTerm {
  Matrix X;
  Povm M;
  std::optional<Matrix> Y;  // absent when the tail vanishes
  std::optional<Povm> N;
};

/// Folds all terms except `keep` into one: Y = (I - X^dagger X)^{1/2} and
/// N = Y^+ (tail) Y^+ on supp(Y), completed uniformly on ker(Y).
inline TwoTerm combine_tail(const std::vector<Matrix>& coeffs,
                            const std::vector<Povm>& parts, std::size_t keep,
                            Tolerance tol = {}) {
  if (coeffs.empty() || coeffs.size() != parts.size()) {
    throw DimensionError("combine_tail: coefficient/part count mismatch");
  }
  if (keep >= coeffs.size()) {
    throw DimensionError("combine_tail: keep index out of range");
  }
  const auto d = cols_of(coeffs.front());
  const auto n = parts.front().size();
  Matrix gram = zeros(d, d);
  std::vector<Matrix> tail(n, zeros(d, d));
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const Matrix& x = coeffs[j];
    if (cols_of(x) != d || parts[j].space_dim() != rows_of(x) ||
        parts[j].size() != n) {
      throw DimensionError("combine_tail: term " + std::to_string(j) +
                           " has the wrong shape");
    }
    gram += x.adjoint() * x;
    if (j == keep) continue;
    for (std::size_t i = 0; i < n; ++i) tail[i] += x.adjoint() * parts[j][i] * x;
  }
  if (max_abs(gram - identity(d)) > tol.eps) {
    throw ValidationError("combine_tail: coefficients do not resolve I");
  }
  const Matrix& x = coeffs[keep];
  const Matrix rest = hermitian_part(identity(d) - x.adjoint() * x);
  TwoTerm out{x, parts[keep], std::nullopt, std::nullopt};
  if (max_eigenvalue(rest) <= tol.eps) return out;
  const Matrix y = psd_sqrt(rest, tol);
  const Matrix y_pinv = psd_pinv(y, tol);
  const Matrix p = support_projection(rest, tol);
  const Matrix fill = (identity(d) - p) / static_cast<double>(n);
  std::vector<Matrix> nt;
  for (const auto& t : tail) nt.push_back(y_pinv * t * y_pinv + fill);
  out.Y = y;
  out.N = Povm(std::move(nt), Tolerance(tol.check()));
  return out;
}

// ---------------------------------------------------------------------------
// Purity, irreducibility, classical extremality
// ---------------------------------------------------------------------------

/// Solutions (D_1..D_n), D_i = P_i D_i P_i, of sum_i D_i in A.
struct PuritySolutionSpace {
  std::vector<std::size_t> dims;               // rank of each support P_i
  std::vector<std::vector<Matrix>> basis;      // orthonormal tuples
  std::size_t dim() const { return basis.size(); }
};

namespace detail {

/// Kernel of (D_i) -> (I - Pi)(sum D_i) over tuples supported on supp(M_i),
/// where Pi projects onto span(`target`) (Pi = 0 for an empty target).
inline PuritySolutionSpace supported_tuples_mapping_into(
    const Povm& m, const std::vector<Matrix>& target, Tolerance tol) {
  const auto d = m.space_dim();
  PuritySolutionSpace out;
  std::vector<Matrix> supports;
  std::size_t unknowns = 0;
  for (const auto& e : m.effects()) {
    const double top = max_abs(e);
    Matrix v = top == 0.0 ? zeros(d, 0) : psd_support_basis(e, tol);
    out.dims.push_back(cols_of(v));
    unknowns += cols_of(v) * cols_of(v);
    supports.push_back(std::move(v));
  }
  if (unknowns == 0) return out;
  const auto dd = static_cast<Eigen::Index>(d * d);
  Matrix l(dd, static_cast<Eigen::Index>(unknowns));
  Eigen::Index col = 0;
  for (const auto& v : supports) {
    for (Eigen::Index a = 0; a < v.cols(); ++a) {
      for (Eigen::Index b = 0; b < v.cols(); ++b) {
        Matrix unit = v.col(a) * v.col(b).adjoint();
        for (const auto& t : target) unit -= hs_inner(t, unit) * t;
        l.col(col++) = vec_rows(unit);
      }
    }
  }
  const Matrix ker = null_space(l, tol);
  for (Eigen::Index k = 0; k < ker.cols(); ++k) {
    std::vector<Matrix> tuple;
    Eigen::Index pos = 0;
    for (const auto& v : supports) {
      const auto r = v.cols();
      Matrix z(r, r);
      for (Eigen::Index a = 0; a < r; ++a) {
        for (Eigen::Index b = 0; b < r; ++b) z(a, b) = ker(pos++, k);
      }
      tuple.push_back(r == 0 ? zeros(d, d) : Matrix(v * z * v.adjoint()));
    }
    out.basis.push_back(std::move(tuple));
  }
  return out;
}

inline cplx tuple_inner(const std::vector<Matrix>& a,
                        const std::vector<Matrix>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += hs_inner(a[i], b[i]);
  return s;
}

}  // namespace detail

inline PuritySolutionSpace purity_solution_space(const Povm& m,
                                                 const Subalgebra& a,
                                                 Tolerance tol = {}) {
  if (m.space_dim() != a.ambient_dim()) {
    throw DimensionError("purity_solution_space: POVM and algebra spaces differ");
  }
  return detail::supported_tuples_mapping_into(m, a.basis(), tol);
}

inline bool is_a_pure(const Povm& m, const Subalgebra& a, Tolerance tol = {}) {
  return purity_solution_space(m, a, tol).dim() == 1;
}

/// Basis of {M}' intersected with A, as elements of A.
inline std::vector<Matrix> commutant_in(const Povm& m, const Subalgebra& a,
                                        Tolerance tol = {}) {
  if (m.space_dim() != a.ambient_dim()) {
    throw DimensionError("commutant_in: POVM and algebra spaces differ");
  }
  const auto d = static_cast<Eigen::Index>(m.space_dim());
  Matrix l(d * d * static_cast<Eigen::Index>(m.size()),
           static_cast<Eigen::Index>(a.dim()));
  for (std::size_t b = 0; b < a.dim(); ++b) {
    const Matrix& x = a.basis()[b];
    for (std::size_t i = 0; i < m.size(); ++i) {
      l.block(static_cast<Eigen::Index>(i) * d * d, static_cast<Eigen::Index>(b),
              d * d, 1) = vec_rows(x * m[i] - m[i] * x);
    }
  }
  const Matrix ker = null_space(l, tol);
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < ker.cols(); ++k) out.push_back(a.element(ker.col(k)));
  return out;
}

inline bool is_a_irreducible(const Povm& m, const Subalgebra& a,
                             Tolerance tol = {}) {
  return commutant_in(m, a, tol).size() == 1;
}

/// Weak independence of the supports: sum_i D_i = 0 forces D_i = 0.
inline bool is_classical_extremal(const Povm& m, Tolerance tol = {}) {
  return detail::supported_tuples_mapping_into(m, {}, tol).dim() == 0;
}

// ---------------------------------------------------------------------------
// Witnesses and certificates
// ---------------------------------------------------------------------------

struct Witness {
  double lambda;
  ProcessPovm f1;
  ProcessPovm f2;
  RepresentationTriple t1;
  RepresentationTriple t2;
};

/// Splits the tester of a minimal triple along a purity solution D that is
/// not a multiple of M.
///
/// With H the Hermitian part of D orthogonal to M, D'_i = M_i/2 + s H_i and
/// G = I/2 + s sum_i H_i (an element of I_K (x) B(H0)), s is halved from
/// 1/(4 |sum H|) until M_i/4 +- s H_i >= 0, so that I/4 <= G <= 3I/4. Then
/// M_i = G^{1/2} N_i G^{1/2} + (I-G)^{1/2} N'_i (I-G)^{1/2} with
/// N = G^{-1/2} D' G^{-1/2}, N' = (I-G)^{-1/2} (M - D') (I-G)^{-1/2}, and
/// the tester is decomposed along this split.
inline Witness nonextremal_witness(const RepresentationTriple& t,
                                   const std::vector<Matrix>& direction,
                                   Tolerance tol = {}) {
  if (!is_minimal(t, tol)) {
    throw NonMinimalError("nonextremal_witness: triple is not minimal");
  }
  const auto& m = t.M();
  if (direction.size() != m.size()) {
    throw DimensionError("nonextremal_witness: direction has wrong length");
  }
  const auto dk = t.dk();
  const auto dh0 = t.dh0();
  const auto d = dk * dh0;

  const double mm = detail::tuple_inner(m.effects(), m.effects()).real();
  const cplx overlap = detail::tuple_inner(m.effects(), direction) / mm;
  std::vector<Matrix> dir = direction;
  double dir_norm = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    dir[i] -= overlap * m[i];
    dir_norm += dir[i].squaredNorm();
  }
  dir_norm = std::sqrt(dir_norm);
  double in_norm = 0.0;
  for (const auto& x : direction) in_norm += x.squaredNorm();
  in_norm = std::sqrt(in_norm);
  if (dir_norm <= tol.check() * std::max(1.0, in_norm)) {
    throw DegenerateDirectionError(
        "nonextremal_witness: direction is proportional to M");
  }
  std::vector<Matrix> h(dir.size());
  double h_norm = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    h[i] = hermitian_part(dir[i]);
    h_norm += h[i].squaredNorm();
  }
  if (std::sqrt(h_norm) <= tol.check() * dir_norm) {
    // Purely anti-Hermitian: i D is Hermitian and solves the same system.
    for (std::size_t i = 0; i < dir.size(); ++i) {
      h[i] = hermitian_part(cplx(0.0, 1.0) * dir[i]);
    }
  }
  Matrix hsum = zeros(d, d);
  double hmax = 0.0;
  for (const auto& x : h) {
    hsum += x;
    hmax = std::max(hmax, op_norm(x));
  }
  if (hmax <= tol.check()) {
    throw DegenerateDirectionError("nonextremal_witness: direction vanishes");
  }
  const double hs = op_norm(hsum);
  double s = hs > tol.check() ? 0.25 / hs : 0.5 / hmax;

  std::vector<Matrix> supports;
  for (const auto& e : m.effects()) supports.push_back(psd_support_basis(e, tol));
  auto margins_hold = [&](double step) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Matrix& v = supports[i];
      if (v.cols() == 0) continue;
      const Matrix a = v.adjoint() * m[i] * v / 4.0;
      const Matrix b = v.adjoint() * h[i] * v * step;
      if (min_eigenvalue(a + b) < 0.0 || min_eigenvalue(a - b) < 0.0) {
        return false;
      }
    }
    return true;
  };
  int halvings = 0;
  while (!margins_hold(s)) {
    s *= 0.5;
    if (++halvings > 60) {
      throw DegenerateDirectionError(
          "nonextremal_witness: no positive step keeps the margins");
    }
  }

  const Matrix g_full = hermitian_part(0.5 * identity(d) + s * hsum);
  const Matrix g = partial_trace(g_full, dk, dh0, Factor::First) /
                   static_cast<double>(dk);
  const Matrix g_rest = hermitian_part(identity(dh0) - g);
  const Matrix gi = kron(identity(dk), psd_inv_sqrt(g, tol));
  const Matrix ri = kron(identity(dk), psd_inv_sqrt(g_rest, tol));
  std::vector<Matrix> n1;
  std::vector<Matrix> n2;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Matrix dp = hermitian_part(0.5 * m[i] + s * h[i]);
    n1.push_back(hermitian_part(gi * dp * gi));
    n2.push_back(hermitian_part(ri * (m[i] - dp) * ri));
  }
  Split split{{psd_sqrt(g, tol), psd_sqrt(g_rest, tol)},
              {Povm(detail::renormalize(std::move(n1), tol), tol),
               Povm(detail::renormalize(std::move(n2), tol), tol)}};
  auto terms = decompose_along_split(t, split, tol);
  if (terms.size() != 2) {
    throw DegenerateDirectionError("nonextremal_witness: split lost a term");
  }
  const double total = terms[0].weight + terms[1].weight;
  const double lambda = terms[0].weight / total;
  ProcessPovm f1 = realize(terms[0].triple, tol);
  ProcessPovm f2 = realize(terms[1].triple, tol);
  const ProcessPovm f = realize(t, tol);
  std::vector<Matrix> recon;
  for (std::size_t i = 0; i < f.size(); ++i) {
    recon.push_back(lambda * f1[i] + (1.0 - lambda) * f2[i]);
  }
  if (effect_distance(recon, f.effects()) > tol.check()) {
    throw DegenerateDirectionError("nonextremal_witness: reconstruction failed");
  }
  if (effect_distance(f1, f2) <= tol.check()) {
    throw DegenerateDirectionError("nonextremal_witness: the two testers coincide");
  }
  return {lambda, std::move(f1), std::move(f2), std::move(terms[0].triple),
          std::move(terms[1].triple)};
}

enum class Verdict { Extremal, NotExtremal, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Extremal:
      return "Extremal";
    case Verdict::NotExtremal:
      return "NotExtremal";
    case Verdict::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

struct ExtremalityCertificate {
  Verdict verdict = Verdict::Unknown;
  std::size_t purity_dim = 0;
  std::optional<Witness> witness;
  std::optional<RepresentationTriple> minimal;
  std::string diagnostics;
};

/// Extremal iff the minimal representation's POVM is I_K (x) B(H0)-pure;
/// otherwise a witness is built from the extra solutions. Unknown only when
/// every tried direction fails numerically.
inline ExtremalityCertificate certify_process_extremal(const ProcessPovm& f,
                                                       Tolerance tol = {},
                                                       std::uint64_t seed = 0) {
  ExtremalityCertificate cert;
  RepresentationTriple t = minimal_representation(f, tol);
  const auto space =
      purity_solution_space(t.M(), Subalgebra::ancilla(t.dk(), t.dh0()), tol);
  cert.purity_dim = space.dim();
  cert.minimal = t;
  if (space.dim() == 1) {
    cert.verdict = Verdict::Extremal;
    return cert;
  }
  if (space.dim() == 0) {
    cert.diagnostics = "solution space is empty; M itself was lost to rounding";
    return cert;
  }
  std::vector<std::vector<Matrix>> candidates = space.basis;
  Rng rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng.engine());
  for (int extra = 0; extra < 8; ++extra) {
    std::vector<Matrix> mixture(t.size(), zeros(t.dk() * t.dh0(), t.dk() * t.dh0()));
    for (const auto& b : space.basis) {
      const cplx c(rng.normal(), rng.normal());
      for (std::size_t i = 0; i < mixture.size(); ++i) mixture[i] += c * b[i];
    }
    candidates.push_back(std::move(mixture));
  }
  for (const auto& dir : candidates) {
    try {
      cert.witness = nonextremal_witness(t, dir, tol);
      cert.verdict = Verdict::NotExtremal;
      return cert;
    } catch (const DegenerateDirectionError& e) {
      cert.diagnostics = e.what();
    }
  }
  cert.verdict = Verdict::Unknown;
  return cert;
}

// ---------------------------------------------------------------------------
// Unitary equivalence inside a subalgebra
// ---------------------------------------------------------------------------

enum class Equivalence { Yes, No, Unknown };

inline const char* to_string(Equivalence e) {
  switch (e) {
    case Equivalence::Yes:
      return "Yes";
    case Equivalence::No:
      return "No";
    case Equivalence::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

struct EquivalenceResult {
  Equivalence verdict = Equivalence::Unknown;
  std::optional<Matrix> U;  // U^dagger M_i U = N_i, U in A
  std::size_t intertwiner_dim = 0;
};

/// Searches for a unitary U in A with U^dagger M_i U = N_i.
///
/// Intertwiners W in A with W M_i = N_i W form a linear space; a generic
/// element is invertible when an equivalence exists, and its unitary polar
/// factor V then satisfies V M_i V^dagger = N_i. Sixteen random draws are
/// tried before giving up.
inline EquivalenceResult a_equivalent(const Povm& m, const Povm& n,
                                      const Subalgebra& a, Tolerance tol = {},
                                      std::uint64_t seed = 0) {
  if (m.space_dim() != n.space_dim() || m.size() != n.size() ||
      m.space_dim() != a.ambient_dim()) {
    throw DimensionError("a_equivalent: POVMs or algebra have different shapes");
  }
  EquivalenceResult out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const RealVector em = eigh(m[i], tol).values;
    const RealVector en = eigh(n[i], tol).values;
    if ((em - en).cwiseAbs().maxCoeff() > tol.check()) {
      out.verdict = Equivalence::No;
      return out;
    }
  }
  const auto d = static_cast<Eigen::Index>(m.space_dim());
  Matrix l(d * d * static_cast<Eigen::Index>(m.size()),
           static_cast<Eigen::Index>(a.dim()));
  for (std::size_t b = 0; b < a.dim(); ++b) {
    const Matrix& x = a.basis()[b];
    for (std::size_t i = 0; i < m.size(); ++i) {
      l.block(static_cast<Eigen::Index>(i) * d * d, static_cast<Eigen::Index>(b),
              d * d, 1) = vec_rows(x * m[i] - n[i] * x);
    }
  }
  const Matrix ker = null_space(l, tol);
  out.intertwiner_dim = cols_of(ker);
  if (ker.cols() == 0) {
    out.verdict = Equivalence::No;
    return out;
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Vector c = ker * rng.gaussian(cols_of(ker), 1);
    const Matrix w = a.element(c);
    if (rank(w, tol) < m.space_dim()) continue;
    const Matrix u = nearest_isometry(w).adjoint();
    if (!a.contains(u, Tolerance(tol.check()))) continue;
    if (max_abs(u.adjoint() * u - identity(m.space_dim())) > tol.check()) continue;
    double res = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      res = std::max(res, max_abs(u.adjoint() * m[i] * u - n[i]));
    }
    if (res <= tol.check()) {
      out.verdict = Equivalence::Yes;
      out.U = u;
      return out;
    }
  }
  out.verdict = Equivalence::Unknown;
  return out;
}

}  // namespace ppovm
