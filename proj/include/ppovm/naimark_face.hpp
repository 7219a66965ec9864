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

// Naimark dilations, commutants, the contraction semigroup
// L_M = {X : X^dagger M_i X <= M_i} and the face of the tester set generated
// by T^dagger M T.
//
// Operators X on the ancilla H0 act on K (x) H0 as I_K (x) X. Functions
// taking an X accept either size and extend it when needed.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppovm/extremality.hpp"

namespace ppovm {

/// X itself when it matches the POVM space, I (x) X when it acts on a
/// tensor factor of it.
inline Matrix lift_operator(const Povm& m, const Matrix& x) {
  require_square(x, "operator");
  const auto d = m.space_dim();
  const auto dx = rows_of(x);
  if (dx == d) return x;
  if (dx == 0 || d % dx != 0) {
    throw DimensionError("operator of size " + std::to_string(dx) +
                         " does not act on a space of dimension " +
                         std::to_string(d));
  }
  return kron(identity(d / dx), x);
}

// ---------------------------------------------------------------------------
// Naimark dilation
// ---------------------------------------------------------------------------

struct NaimarkDilation {
  std::size_t dilated_dim = 0;
  std::vector<std::size_t> offsets;  // start of each outcome block
  Povm E;
  Matrix J;  // dilated_dim x space_dim isometry

  Report check(const Povm& m, Tolerance tol = {}) const {
    double proj = 0.0;
    double compress = 0.0;
    std::size_t span = 0;
    for (std::size_t k = 0; k < E.size(); ++k) {
      proj = std::max(proj, max_abs(E[k] * E[k] - E[k]));
      compress = std::max(compress, max_abs(J.adjoint() * E[k] * J - m[k]));
      span += rank(E[k] * J, tol);
    }
    return {
        {"effects are projections", proj, tol.eps},
        {"J is an isometry",
         max_abs(J.adjoint() * J - identity(m.space_dim())), tol.eps},
        {"J^dagger E J = M", compress, tol.eps},
        {"minimal", static_cast<double>(span > dilated_dim ? span - dilated_dim
                                                           : dilated_dim - span),
         0.0},
    };
  }
};

/// Dilated space = (+)_k supp(M_k), block k spanned by the eigenvectors of
/// M_k with nonzero eigenvalue (descending). J stacks the blocks
/// Lambda_k^{1/2} V_k^dagger and E_k projects onto block k.
inline NaimarkDilation minimal_naimark(const Povm& m, Tolerance tol = {}) {
  const auto d = m.space_dim();
  std::vector<Matrix> blocks;
  NaimarkDilation out{0, {}, Povm({identity(1)}), Matrix()};
  for (const auto& e : m.effects()) {
    out.offsets.push_back(out.dilated_dim);
    if (max_abs(e) == 0.0) {
      blocks.push_back(zeros(0, d));
      continue;
    }
    const Eigh h = eigh_psd(e, tol);
    const auto r = static_cast<Eigen::Index>(psd_rank(h, tol));
    blocks.push_back(h.values.head(r).cwiseSqrt().cast<cplx>().asDiagonal() *
                     h.vectors.leftCols(r).adjoint());
    out.dilated_dim += static_cast<std::size_t>(r);
  }
  out.J = zeros(out.dilated_dim, d);
  std::vector<Matrix> proj;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto off = static_cast<Eigen::Index>(out.offsets[k]);
    out.J.middleRows(off, blocks[k].rows()) = blocks[k];
    Matrix p = zeros(out.dilated_dim, out.dilated_dim);
    p.block(off, off, blocks[k].rows(), blocks[k].rows()).setIdentity();
    proj.push_back(std::move(p));
  }
  out.E = Povm(std::move(proj), tol);
  return out;
}

// ---------------------------------------------------------------------------
// Commutant and L_M
// ---------------------------------------------------------------------------

/// Orthonormal basis of {X : XA = AX for all A in mats}.
inline std::vector<Matrix> commutant(const std::vector<Matrix>& mats,
                                     Tolerance tol = {}) {
  if (mats.empty()) throw DimensionError("commutant: empty list");
  const auto d = rows_of(mats.front());
  const auto dd = static_cast<Eigen::Index>(d * d);
  Matrix l(dd * static_cast<Eigen::Index>(mats.size()), dd);
  const Matrix id = identity(d);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    require_square(mats[k], "commutant operand");
    if (rows_of(mats[k]) != d) throw DimensionError("commutant: sizes differ");
    // vec_rows(XA - AX) = (I (x) A^t - A (x) I) vec_rows(X).
    l.middleRows(static_cast<Eigen::Index>(k) * dd, dd) =
        kron(id, mats[k].transpose()) - kron(mats[k], id);
  }
  const Matrix ker = null_space(l, tol);
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < ker.cols(); ++k) {
    out.push_back(unvec_rows(ker.col(k), d, d));
  }
  return out;
}

/// M_i - X^dagger M_i X >= -eps for every i.
inline bool lm_membership(const Povm& m, const Matrix& x, Tolerance tol = {}) {
  const Matrix xl = lift_operator(m, x);
  for (const auto& e : m.effects()) {
    if (min_eigenvalue(e - xl.adjoint() * e * xl) < -tol.eps) return false;
  }
  return true;
}

struct LmElementCertificate {
  Matrix X;
  Matrix C;  // in {E}', |C| <= 1, C J = J X
};

/// The operator C of the dilation criterion for X in L_M.
///
/// C is sought block-diagonally (the commutant of E) with C J = J X. For a
/// minimal dilation every block of J is surjective and C is unique; any
/// remaining freedom is spent lowering |C| by projected subgradient steps.
inline std::optional<LmElementCertificate> lift_to_dilation(
    const Povm& m, const Matrix& x, const NaimarkDilation& dil,
    Tolerance tol = {}) {
  if (!lm_membership(m, x, tol)) {
    throw NotInLmError("lift_to_dilation: X is not in L_M");
  }
  const Matrix xl = lift_operator(m, x);
  const auto d = static_cast<Eigen::Index>(m.space_dim());
  const auto nb = dil.offsets.size();
  std::vector<Eigen::Index> sizes;
  Eigen::Index unknowns = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    const auto end = k + 1 < nb ? dil.offsets[k + 1] : dil.dilated_dim;
    sizes.push_back(static_cast<Eigen::Index>(end - dil.offsets[k]));
    unknowns += sizes.back() * sizes.back();
  }
  if (unknowns == 0) return std::nullopt;
  // Row-major unknowns per block: C_k(a, b). Equations (C_k J_k)(a, c) =
  // (J_k X)(a, c).
  Eigen::Index eqs = 0;
  for (auto s : sizes) eqs += s * d;
  Matrix a = Matrix::Zero(eqs, unknowns);
  Vector rhs(eqs);
  Eigen::Index row = 0;
  Eigen::Index col0 = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    const auto s = sizes[k];
    const auto off = static_cast<Eigen::Index>(dil.offsets[k]);
    const Matrix jk = dil.J.middleRows(off, s);
    const Matrix target = jk * xl;
    for (Eigen::Index r = 0; r < s; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index b = 0; b < s; ++b) a(row, col0 + r * s + b) = jk(b, c);
        rhs(row) = target(r, c);
        ++row;
      }
    }
    col0 += s * s;
  }
  auto assemble = [&](const Vector& v) {
    Matrix c = zeros(dil.dilated_dim, dil.dilated_dim);
    Eigen::Index pos = 0;
    for (std::size_t k = 0; k < nb; ++k) {
      const auto s = sizes[k];
      const auto off = static_cast<Eigen::Index>(dil.offsets[k]);
      for (Eigen::Index r = 0; r < s; ++r) {
        for (Eigen::Index b = 0; b < s; ++b) c(off + r, off + b) = v(pos++);
      }
    }
    return c;
  };
  Vector v = pinv(a, tol) * rhs;
  const Matrix free_dirs = null_space(a, tol);
  if (free_dirs.cols() > 0 && free_dirs.cols() < unknowns + 1 &&
      max_abs(a) > 0.0) {
    Vector best = v;
    double best_norm = op_norm(assemble(v));
    for (int it = 0; it < 100 && best_norm > 1.0; ++it) {
      const Matrix c = assemble(v);
      const Svd dec = svd(c);
      const Matrix g = dec.U.col(0) * dec.V.col(0).adjoint();
      Vector gv(unknowns);
      Eigen::Index pos = 0;
      for (std::size_t k = 0; k < nb; ++k) {
        const auto s = sizes[k];
        const auto off = static_cast<Eigen::Index>(dil.offsets[k]);
        for (Eigen::Index r = 0; r < s; ++r) {
          for (Eigen::Index b = 0; b < s; ++b) gv(pos++) = g(off + r, off + b);
        }
      }
      const Vector step = free_dirs * (free_dirs.adjoint() * gv);
      v -= (0.5 / (1.0 + it)) * step;
      const double nv = op_norm(assemble(v));
      if (nv < best_norm) {
        best_norm = nv;
        best = v;
      }
    }
    v = best;
  }
  LmElementCertificate cert{x, assemble(v)};
  double comm = 0.0;
  for (const auto& e : dil.E.effects()) {
    comm = std::max(comm, max_abs(cert.C * e - e * cert.C));
  }
  const double intertwine = max_abs(cert.C * dil.J - dil.J * xl);
  if (comm > tol.check() || intertwine > tol.check() ||
      op_norm(cert.C) > 1.0 + tol.eps) {
    return std::nullopt;
  }
  return cert;
}

/// For a PVM M and a contraction X commuting with it, Y = (I - X^dagger X)^{1/2}
/// completes X^dagger M X + Y^dagger M Y = M.
inline Matrix lm_complement(const Povm& m, const Matrix& x, Tolerance tol = {}) {
  if (!is_projection_valued(m, tol)) {
    throw NotPvmError("lm_complement: M is not projection valued");
  }
  const Matrix xl = lift_operator(m, x);
  for (const auto& e : m.effects()) {
    const double res = max_abs(xl * e - e * xl);
    if (res > tol.check()) {
      throw NotInCommutantError("lm_complement: X does not commute with M "
                                "(residual " + std::to_string(res) + ")");
    }
  }
  if (op_norm(x) > 1.0 + tol.eps) {
    throw NotInLmError("lm_complement: X is not a contraction");
  }
  const auto dx = rows_of(x);
  Matrix rest = hermitian_part(identity(dx) - x.adjoint() * x);
  // Clamp rounding below zero for X on the unit sphere.
  const Eigh e = eigh(rest, tol);
  return spectral_apply(e, [](double v) { return std::sqrt(std::max(v, 0.0)); });
}

// ---------------------------------------------------------------------------
// The face generated by T^dagger M T
// ---------------------------------------------------------------------------

/// mu_X^{-1} T^dagger X^dagger M X T with mu_X = Tr T^dagger X^dagger X T.
inline ProcessPovm face_sample(const Matrix& t, const Povm& m, const Matrix& x,
                               Tolerance tol = {}) {
  const auto dh0 = rows_of(t);
  if (dh0 == 0 || m.space_dim() % dh0 != 0) {
    throw DimensionError("face_sample: POVM space is not K (x) H0");
  }
  if (rows_of(x) != dh0 || cols_of(x) != dh0) {
    throw DimensionError("face_sample: X must act on H0");
  }
  if (std::abs((t.adjoint() * t).trace().real() - 1.0) > tol.eps) {
    throw ValidationError("face_sample: Tr T^dagger T != 1");
  }
  if (rank(t, tol) != dh0) {
    throw NonMinimalError("face_sample: T is not surjective");
  }
  if (!lm_membership(m, x, tol)) throw NotInLmError("face_sample: X is not in L_M");
  const Matrix xt = x * t;
  const double mu = (xt.adjoint() * xt).trace().real();
  if (mu <= tol.eps) {
    throw ZeroWeightError("face_sample: mu_X = " + std::to_string(mu));
  }
  const auto dk = m.space_dim() / dh0;
  auto effects = compress_all(m.effects(), dk, xt / std::sqrt(mu));
  return ProcessPovm(dk, cols_of(t), std::move(effects), tol);
}

struct FaceCertificate {
  ProcessPovm sample;
  RepresentationTriple minimal;  // of the sample
  Povm N;                        // minimal POVM extended to H0
  Matrix Q;                      // projection on H0
  Matrix U;                      // unitary on H0
};

/// Q U^dagger N U Q = Q M = M Q, with each of Q, U on H0 or on the full
/// space.
inline bool mface_certificate_check(const Povm& n, const Matrix& q,
                                    const Matrix& u, const Povm& m,
                                    Tolerance tol = {}) {
  if (n.space_dim() != m.space_dim() || n.size() != m.size()) return false;
  const Matrix ql = lift_operator(m, q);
  const Matrix ul = lift_operator(m, u);
  const auto d = m.space_dim();
  if (max_abs(ql * ql - ql) > tol.check() || hermiticity_residual(ql) > tol.check()) {
    return false;
  }
  if (max_abs(ul.adjoint() * ul - identity(d)) > tol.check()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (max_abs(ql * ul.adjoint() * n[i] * ul * ql - ql * m[i]) > tol.check()) {
      return false;
    }
    if (max_abs(ql * m[i] - m[i] * ql) > tol.check()) return false;
  }
  return true;
}

/// Samples the face at X and builds the certificate relating the sample's
/// own minimal representation to M: Q is the range projection of X and U a
/// unitary carrying range(X) onto the leading coordinates where the
/// minimal POVM was embedded.
inline FaceCertificate face_certificate(const Matrix& t, const Povm& m,
                                        const Matrix& x, Tolerance tol = {}) {
  ProcessPovm f = face_sample(t, m, x, tol);
  RepresentationTriple small = minimal_representation(f, tol);
  const auto dh0 = rows_of(t);
  const auto dk = m.space_dim() / dh0;
  const Matrix xt = x * t;
  const double mu = (xt.adjoint() * xt).trace().real();
  const auto full = RepresentationTriple::pure(dk, xt / std::sqrt(mu), m, tol);
  const Matrix v = connecting_isometry(small, full, tol).U;
  const Matrix e = leading_embedding(dh0, small.dh0());
  Matrix u = complete_to_unitary(e, tol) * complete_to_unitary(v, tol).adjoint();
  Matrix q = v * v.adjoint();
  Povm n = extend_povm(small.M(), kron(identity(dk), e), tol);
  return {std::move(f), std::move(small), std::move(n), std::move(q), std::move(u)};
}

// ---------------------------------------------------------------------------
// Decompositions of a tester with extremal measurement
// ---------------------------------------------------------------------------

enum class Consistency { Consistent, Inconsistent, Unknown };

inline const char* to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent:
      return "Consistent";
    case Consistency::Inconsistent:
      return "Inconsistent";
    case Consistency::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

struct DecompositionCheck {
  Consistency verdict = Consistency::Unknown;
  std::vector<Equivalence> components;
};

/// Whether every F^i in sum_i lambda_i F^i = T^dagger M T has the form
/// (S_i, M).
///
/// A component of full rank dim H0 is compared through a_equivalent on
/// I_K (x) B(H0). A lower-rank component with minimal POVM N needs an
/// isometry V : H_r -> H0 with (I (x) V)^dagger M (I (x) V) = N; it is
/// searched for among intertwiners M (I (x) W) = (I (x) W) N, and an empty
/// intertwiner space is reported as Unknown since V need not intertwine.
///
/// This overload takes the decomposed tester explicitly, which may be any
/// element of the face rather than T^dagger M T itself.
inline DecompositionCheck extremal_povm_decomposition_check(
    const Povm& m, std::size_t dh0, const ProcessPovm& target,
    const std::vector<std::pair<double, ProcessPovm>>& decomposition,
    Tolerance tol = {}, std::uint64_t seed = 0) {
  if (decomposition.empty()) {
    throw ValidationError("extremal_povm_decomposition_check: empty decomposition");
  }
  if (dh0 == 0 || m.space_dim() % dh0 != 0 || m.space_dim() / dh0 != target.dk()) {
    throw DimensionError("extremal_povm_decomposition_check: POVM space is not K (x) H0");
  }
  const auto dk = target.dk();
  std::vector<double> w;
  std::vector<std::vector<Matrix>> parts;
  for (const auto& [lambda, f] : decomposition) {
    w.push_back(lambda);
    parts.push_back(f.effects());
  }
  const double res = effect_distance(combine_effects(w, parts), target.effects());
  if (res > tol.check()) {
    throw ValidationError("extremal_povm_decomposition_check: components do not "
                          "sum to T^dagger M T (residual " + std::to_string(res) + ")");
  }
  DecompositionCheck out;
  Rng rng(seed);
  const Subalgebra anc = Subalgebra::ancilla(dk, dh0);
  for (const auto& [lambda, f] : decomposition) {
    const RepresentationTriple small = minimal_representation(f, tol);
    const std::uint64_t sub_seed = rng.next();
    if (small.dh0() == dh0) {
      out.components.push_back(a_equivalent(small.M(), m, anc, tol, sub_seed).verdict);
      continue;
    }
    if (small.dh0() > dh0) {
      out.components.push_back(Equivalence::No);
      continue;
    }
    const auto r = small.dh0();
    const Povm& nm = small.M();
    // Unknown W (dh0 x r), row-major; equations M_i (I (x) W) - (I (x) W) N_i = 0.
    const auto big = static_cast<Eigen::Index>(dk * dh0);
    const auto sm = static_cast<Eigen::Index>(dk * r);
    Matrix l(big * sm * static_cast<Eigen::Index>(m.size()),
             static_cast<Eigen::Index>(dh0 * r));
    for (std::size_t a = 0; a < dh0; ++a) {
      for (std::size_t b = 0; b < r; ++b) {
        Matrix unit = zeros(dh0, r);
        unit(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1.0;
        const Matrix wl = kron(identity(dk), unit);
        for (std::size_t i = 0; i < m.size(); ++i) {
          l.block(static_cast<Eigen::Index>(i) * big * sm,
                  static_cast<Eigen::Index>(a * r + b), big * sm, 1) =
              vec_rows(m[i] * wl - wl * nm[i]);
        }
      }
    }
    const Matrix ker = null_space(l, tol);
    Equivalence verdict = Equivalence::Unknown;
    Rng local(sub_seed);
    for (int attempt = 0; attempt < 16 && ker.cols() > 0; ++attempt) {
      const Vector c = ker * local.gaussian(cols_of(ker), 1);
      const Matrix wmat = unvec_rows(c, dh0, r);
      if (rank(wmat, tol) < r) continue;
      const Matrix v = nearest_isometry(wmat);
      double cres = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        cres = std::max(cres, max_abs(compress(m[i], dk, v) - nm[i]));
      }
      if (cres <= tol.check()) {
        verdict = Equivalence::Yes;
        break;
      }
    }
    out.components.push_back(verdict);
  }
  bool any_no = false;
  bool all_yes = true;
  for (auto v : out.components) {
    any_no = any_no || v == Equivalence::No;
    all_yes = all_yes && v == Equivalence::Yes;
  }
  out.verdict = any_no ? Consistency::Inconsistent
                       : (all_yes ? Consistency::Consistent : Consistency::Unknown);
  return out;
}

inline DecompositionCheck extremal_povm_decomposition_check(
    const Povm& m, const Matrix& t,
    const std::vector<std::pair<double, ProcessPovm>>& decomposition,
    Tolerance tol = {}, std::uint64_t seed = 0) {
  const auto dh0 = rows_of(t);
  if (dh0 == 0 || m.space_dim() % dh0 != 0) {
    throw DimensionError("extremal_povm_decomposition_check: POVM space is not K (x) H0");
  }
  const auto dk = m.space_dim() / dh0;
  const ProcessPovm target(dk, cols_of(t), compress_all(m.effects(), dk, t), tol);
  return extremal_povm_decomposition_check(m, dh0, target, decomposition, tol, seed);
}

}  // namespace ppovm
