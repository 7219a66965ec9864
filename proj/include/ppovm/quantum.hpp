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

// States, POVMs, channels and the Choi isomorphism.
//
// Basis conventions, fixed once for the whole toolkit:
//  * the computational basis {|i>} in index order is used for every
//    transpose, for psi_H = sum_ij |i><j| (x) |i><j| and for vectorization;
//  * Choi matrices live on K (x) H (output first, input second), so that
//    index o*d_in + i carries output o and input i;
//  * input states of measurement schemes live on H (x) H0 (system first,
//    ancilla second), and |T>> = sum_i |i> (x) T|i> for T : H -> H0.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ppovm/linalg.hpp"

namespace ppovm {

/// Outcome of one invariant check, with the measured residual.
struct InvariantCheck {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass() const { return residual <= threshold; }
};

using Report = std::vector<InvariantCheck>;

inline bool all_pass(const Report& r) {
  for (const auto& c : r) {
    if (!c.pass()) return false;
  }
  return true;
}

inline void throw_on_failure(const Report& r, const std::string& what) {
  for (const auto& c : r) {
    if (!c.pass()) {
      throw ValidationError(what + ": invariant '" + c.name +
                            "' violated (residual " +
                            std::to_string(c.residual) + " > " +
                            std::to_string(c.threshold) + ")");
    }
  }
}

namespace detail {

inline double psd_violation(const Matrix& a) {
  return std::max(0.0, -min_eigenvalue(a));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

class DensityMatrix {
 public:
  DensityMatrix(Matrix m, Tolerance tol = {}) {
    throw_on_failure(check(m, tol), "density matrix");
    mat_ = hermitian_part(m);
  }

  static Report check(const Matrix& m, Tolerance tol = {}) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      return {{"square", 1.0, 0.0}};
    }
    if (!m.allFinite()) return {{"finite", 1.0, 0.0}};
    const double scale = std::max(1.0, max_abs(m));
    return {
        {"hermitian", hermiticity_residual(m), tol.eps * scale},
        {"positive", detail::psd_violation(m), tol.eps * scale},
        {"unit trace", std::abs(m.trace() - 1.0), tol.eps},
    };
  }

  std::size_t dim() const { return rows_of(mat_); }
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

// ---------------------------------------------------------------------------
// Povm
// ---------------------------------------------------------------------------

/// An ordered list of PSD effects summing to the identity.
class Povm {
 public:
  Povm(std::vector<Matrix> effects, Tolerance tol = {}) {
    throw_on_failure(check(effects, tol), "POVM");
    for (auto& e : effects) e = hermitian_part(e);
    effects_ = std::move(effects);
  }

  static Report check(const std::vector<Matrix>& effects, Tolerance tol = {}) {
    if (effects.empty()) return {{"nonempty", 1.0, 0.0}};
    const auto d = effects.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    double herm = 0.0;
    double neg = 0.0;
    for (const auto& e : effects) {
      if (e.rows() != d || e.cols() != d) return {{"common shape", 1.0, 0.0}};
      if (!e.allFinite()) return {{"finite", 1.0, 0.0}};
      herm = std::max(herm, hermiticity_residual(e));
      neg = std::max(neg, detail::psd_violation(e));
      sum += e;
    }
    const double n = static_cast<double>(effects.size());
    return {
        {"effects hermitian", herm, tol.eps},
        {"effects positive", neg, tol.eps},
        {"sum to identity", max_abs(sum - Matrix::Identity(d, d)),
         n * tol.eps},
    };
  }

  std::size_t space_dim() const { return rows_of(effects_.front()); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<Matrix>& effects() const { return effects_; }
  const Matrix& operator[](std::size_t i) const { return effects_[i]; }

 private:
  std::vector<Matrix> effects_;
};

/// The POVM whose effects are the projectors onto the columns of an
/// orthonormal basis, grouped by `groups[k]` = list of column indices.
inline Povm pvm_from_basis(const Matrix& basis,
                           const std::vector<std::vector<std::size_t>>& groups,
                           Tolerance tol = {}) {
  std::vector<Matrix> effects;
  for (const auto& g : groups) {
    Matrix p = Matrix::Zero(basis.rows(), basis.rows());
    for (auto k : g) {
      const auto c = basis.col(static_cast<Eigen::Index>(k));
      p += c * c.adjoint();
    }
    effects.push_back(p);
  }
  return Povm(std::move(effects), tol);
}

/// True iff every effect is an orthogonal projection within tolerance.
inline bool is_projection_valued(const Povm& m, Tolerance tol = {}) {
  for (const auto& e : m.effects()) {
    if (max_abs(e * e - e) > tol.check()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Channel and Choi matrix
// ---------------------------------------------------------------------------

/// Completely positive trace preserving map in Kraus form.
class Channel {
 public:
  Channel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> kraus,
          Tolerance tol = {})
      : in_(in_dim), out_(out_dim) {
    throw_on_failure(check(in_dim, out_dim, kraus, tol), "channel");
    kraus_ = std::move(kraus);
  }

  static Report check(std::size_t in_dim, std::size_t out_dim,
                      const std::vector<Matrix>& kraus, Tolerance tol = {}) {
    if (kraus.empty()) return {{"nonempty", 1.0, 0.0}};
    Matrix sum = zeros(in_dim, in_dim);
    for (const auto& k : kraus) {
      if (rows_of(k) != out_dim || cols_of(k) != in_dim) {
        return {{"kraus shape", 1.0, 0.0}};
      }
      if (!k.allFinite()) return {{"finite", 1.0, 0.0}};
      sum += k.adjoint() * k;
    }
    return {{"trace preserving", max_abs(sum - identity(in_dim)), tol.eps}};
  }

  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  /// Heisenberg-picture action on an output operator.
  Matrix adjoint_apply(const Matrix& b) const {
    Matrix out = zeros(in_, in_);
    for (const auto& k : kraus_) out += k.adjoint() * b * k;
    return out;
  }

  Matrix apply(const Matrix& a) const {
    Matrix out = zeros(out_, out_);
    for (const auto& k : kraus_) out += k * a * k.adjoint();
    return out;
  }

 private:
  std::size_t in_;
  std::size_t out_;
  std::vector<Matrix> kraus_;
};

inline Channel identity_channel(std::size_t d) {
  return Channel(d, d, {identity(d)});
}

inline Channel unitary_channel(const Matrix& u, Tolerance tol = {}) {
  require_square(u, "unitary");
  return Channel(rows_of(u), rows_of(u), {u}, tol);
}

/// The channel rho -> Tr(rho) I/d_out.
inline Channel completely_depolarizing(std::size_t in_dim,
                                       std::size_t out_dim) {
  std::vector<Matrix> kraus;
  const double w = 1.0 / std::sqrt(static_cast<double>(out_dim));
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t i = 0; i < in_dim; ++i) {
      Matrix k = zeros(out_dim, in_dim);
      k(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) = w;
      kraus.push_back(k);
    }
  }
  return Channel(in_dim, out_dim, std::move(kraus));
}

struct ChoiMatrix {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Matrix mat;  // on K (x) H
};

/// psi_H = sum_ij |i><j| (x) |i><j|, unnormalized (trace d).
inline Matrix psi(std::size_t d) {
  const Vector v = vec_rows(identity(d));
  return v * v.adjoint();
}

/// C(Phi) = (Phi (x) id)(psi_H) = sum_k |K_k>><<K_k|, unnormalized.
inline ChoiMatrix choi(const Channel& phi) {
  const auto n = static_cast<Eigen::Index>(phi.in_dim() * phi.out_dim());
  Matrix c = Matrix::Zero(n, n);
  for (const auto& k : phi.kraus()) {
    const Vector v = vec_rows(k);
    c += v * v.adjoint();
  }
  return {phi.in_dim(), phi.out_dim(), c};
}

/// Kraus form of the channel whose Choi matrix is `c`; one Kraus operator
/// per nonzero eigenvalue.
inline Channel channel_from_choi(const ChoiMatrix& c, Tolerance tol = {}) {
  const auto n = c.in_dim * c.out_dim;
  if (rows_of(c.mat) != n || cols_of(c.mat) != n) {
    throw DimensionError("channel_from_choi: Choi matrix has wrong size");
  }
  const Eigh e = eigh_psd(c.mat, tol);
  const Matrix reduced = partial_trace(c.mat, c.out_dim, c.in_dim, Factor::First);
  const double tp = max_abs(reduced - identity(c.in_dim));
  if (tp > tol.eps * static_cast<double>(c.in_dim)) {
    throw NotTracePreservingError(
        "channel_from_choi: partial trace deviates from identity by " +
        std::to_string(tp));
  }
  std::vector<Matrix> kraus;
  const auto r = static_cast<Eigen::Index>(psd_rank(e, tol));
  for (Eigen::Index k = 0; k < r; ++k) {
    kraus.push_back(std::sqrt(e.values(k)) *
                    unvec_rows(e.vectors.col(k), c.out_dim, c.in_dim));
  }
  // The trace-preservation check above was made at the Choi level; the
  // Kraus sum inherits its residual.
  return Channel(c.in_dim, c.out_dim, std::move(kraus),
                 Tolerance(std::max(tol.eps, 2.0 * tp + 1e-12)));
}

// ---------------------------------------------------------------------------
// Vectorization and Schmidt decomposition
// ---------------------------------------------------------------------------

/// |T>> = sum_i |i> (x) T|i> in H (x) H0, for T : H -> H0 (d_H0 x d_H).
inline Vector vectorize(const Matrix& t) { return vec_rows(t.transpose()); }

inline Matrix devectorize(const Vector& v, std::size_t d_h, std::size_t d_h0) {
  if (static_cast<std::size_t>(v.size()) != d_h * d_h0) {
    throw DimensionError("devectorize: vector length " +
                         std::to_string(v.size()) + " != " +
                         std::to_string(d_h * d_h0));
  }
  return unvec_rows(v, d_h, d_h0).transpose();
}

struct Schmidt {
  RealVector coeffs;  // strictly positive, descending
  Matrix left;        // columns e_k in H
  Matrix right;       // columns f_k in H0
};

/// v = sum_k coeffs_k e_k (x) f_k. Coefficients below eps * max are dropped.
inline Schmidt schmidt(const Vector& v, std::size_t d_h, std::size_t d_h0,
                       Tolerance tol = {}) {
  if (static_cast<std::size_t>(v.size()) != d_h * d_h0) {
    throw DimensionError("schmidt: vector length mismatch");
  }
  if (v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0) {
    throw ValidationError("schmidt: zero vector");
  }
  const Svd dec = svd(unvec_rows(v, d_h, d_h0));
  const auto r = static_cast<Eigen::Index>(numerical_rank(dec.s, tol));
  return {dec.s.head(r), dec.U.leftCols(r), dec.V.leftCols(r).conjugate()};
}

inline std::size_t schmidt_rank(const Vector& v, std::size_t d_h,
                                std::size_t d_h0, Tolerance tol = {}) {
  return static_cast<std::size_t>(schmidt(v, d_h, d_h0, tol).coeffs.size());
}

// ---------------------------------------------------------------------------
// Input-state maps
// ---------------------------------------------------------------------------

/// B -> (Tr_H0[(I_H (x) B) rho])^t, the Hilbert-Schmidt adjoint of the map
/// A -> Tr_H[rho (A^t (x) I)] induced by a state rho on H (x) H0.
class StateAdjointMap {
 public:
  StateAdjointMap(const DensityMatrix& rho, std::size_t d_h, std::size_t d_h0)
      : rho_(rho.mat()), dh_(d_h), dh0_(d_h0) {
    if (rho.dim() != d_h * d_h0) {
      throw DimensionError("state_adjoint_map: state dimension " +
                           std::to_string(rho.dim()) + " != " +
                           std::to_string(d_h * d_h0));
    }
  }

  Matrix operator()(const Matrix& b) const {
    if (rows_of(b) != dh0_ || cols_of(b) != dh0_) {
      throw DimensionError("state_adjoint_map: operand is not on H0");
    }
    return partial_trace(kron(identity(dh_), b) * rho_, dh_, dh0_,
                         Factor::Second)
        .transpose();
  }

  /// The forward map A -> Tr_H[rho (A^t (x) I)], from B(H) to B(H0).
  Matrix forward(const Matrix& a) const {
    if (rows_of(a) != dh_ || cols_of(a) != dh_) {
      throw DimensionError("state map: operand is not on H");
    }
    return partial_trace(rho_ * kron(a.transpose(), identity(dh0_)), dh_, dh0_,
                         Factor::First);
  }

  std::size_t system_dim() const { return dh_; }
  std::size_t ancilla_dim() const { return dh0_; }

 private:
  Matrix rho_;
  std::size_t dh_;
  std::size_t dh0_;
};

inline StateAdjointMap state_adjoint_map(const DensityMatrix& rho,
                                         std::size_t d_h, std::size_t d_h0) {
  return StateAdjointMap(rho, d_h, d_h0);
}

/// The pure state |T>><<T| for T with Tr T^dagger T = 1.
inline DensityMatrix pure_state(const Matrix& t, Tolerance tol = {}) {
  const Vector v = vectorize(t);
  return DensityMatrix(v * v.adjoint(), tol);
}

// ---------------------------------------------------------------------------
// POVM extension, channel application and measurement
// ---------------------------------------------------------------------------

/// Embeds a POVM on K into H along an isometry V : K -> H, filling the
/// orthogonal complement P^perp = I - VV^dagger uniformly:
/// M~_i = V M_i V^dagger + (I - P)/n.
inline Povm extend_povm(const Povm& m, const Matrix& embedding,
                        Tolerance tol = {}) {
  if (cols_of(embedding) != m.space_dim()) {
    throw DimensionError("extend_povm: embedding has " +
                         std::to_string(embedding.cols()) +
                         " columns, POVM space has dimension " +
                         std::to_string(m.space_dim()));
  }
  const double iso = max_abs(embedding.adjoint() * embedding -
                             identity(m.space_dim()));
  if (iso > tol.check()) {
    throw DimensionError("extend_povm: embedding is not an isometry (rank "
                         "mismatch), residual " +
                         std::to_string(iso));
  }
  const auto d = rows_of(embedding);
  const Matrix rest = (identity(d) - embedding * embedding.adjoint()) /
                      static_cast<double>(m.size());
  std::vector<Matrix> effects;
  effects.reserve(m.size());
  for (const auto& e : m.effects()) {
    effects.push_back(embedding * e * embedding.adjoint() + rest);
  }
  return Povm(std::move(effects), tol);
}

/// The isometry C^small -> C^large onto the leading coordinates.
inline Matrix leading_embedding(std::size_t large, std::size_t small) {
  if (small > large) {
    throw DimensionError("leading_embedding: target smaller than source");
  }
  return Matrix::Identity(static_cast<Eigen::Index>(large),
                          static_cast<Eigen::Index>(small));
}

inline DensityMatrix apply_channel(const Channel& phi, const DensityMatrix& rho,
                                   Tolerance tol = {}) {
  if (rho.dim() != phi.in_dim()) {
    throw DimensionError("apply_channel: state dimension mismatch");
  }
  return DensityMatrix(phi.apply(rho.mat()), tol);
}

/// Outcome probabilities Tr(rho M_i).
inline std::vector<double> measure(const Povm& m, const DensityMatrix& rho) {
  if (rho.dim() != m.space_dim()) {
    throw DimensionError("measure: state dimension mismatch");
  }
  std::vector<double> p;
  p.reserve(m.size());
  for (const auto& e : m.effects()) p.push_back((rho.mat() * e).trace().real());
  return p;
}

/// (Phi (x) id)(rho) for rho on H (x) H0, Phi acting on the first factor.
inline Matrix apply_channel_first(const Channel& phi, const Matrix& rho,
                                  std::size_t d_second) {
  if (rows_of(rho) != phi.in_dim() * d_second) {
    throw DimensionError("apply_channel_first: dimension mismatch");
  }
  const Matrix id = identity(d_second);
  const auto n = static_cast<Eigen::Index>(phi.out_dim() * d_second);
  Matrix out = Matrix::Zero(n, n);
  for (const auto& k : phi.kraus()) {
    const Matrix kk = kron(k, id);
    out += kk * rho * kk.adjoint();
  }
  return out;
}

/// (id (x) chi)(rho) for rho on A (x) H0, chi acting on the second factor.
inline Matrix apply_channel_second(const Channel& chi, const Matrix& rho,
                                   std::size_t d_first) {
  return apply_to_second_factor(
      rho, d_first, [&](const Matrix& blk) { return chi.apply(blk); });
}

/// (id (x) chi^*)(M) for M on A (x) H0', the adjoint acting on the second
/// factor.
inline Matrix apply_adjoint_second(const Channel& chi, const Matrix& m,
                                   std::size_t d_first) {
  return apply_to_second_factor(
      m, d_first, [&](const Matrix& blk) { return chi.adjoint_apply(blk); });
}

}  // namespace ppovm
