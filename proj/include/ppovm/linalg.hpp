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

// Dense complex linear algebra used by every other module.
//
// All rank and kernel decisions use a relative cutoff: a singular value (or
// eigenvalue of a PSD matrix) counts as zero when it is at most eps times the
// largest one. Hermitian inputs are symmetrized before being decomposed when
// they are Hermitian within tolerance, and rejected otherwise.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ppovm/errors.hpp"

namespace ppovm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Absolute entrywise and relative spectral threshold.
struct Tolerance {
  double eps = 1e-9;

  constexpr Tolerance() = default;
  explicit Tolerance(double e) : eps(e) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw ValidationError("tolerance must be a positive finite number");
    }
  }

  /// Threshold for post-condition checks on composite results, which carry
  /// the rounding of several decompositions.
  double check() const { return 100.0 * eps; }
};

inline Matrix identity(std::size_t d) {
  return Matrix::Identity(static_cast<Eigen::Index>(d),
                          static_cast<Eigen::Index>(d));
}

inline Matrix zeros(std::size_t rows, std::size_t cols) {
  return Matrix::Zero(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
}

inline std::size_t rows_of(const Matrix& a) {
  return static_cast<std::size_t>(a.rows());
}
inline std::size_t cols_of(const Matrix& a) {
  return static_cast<std::size_t>(a.cols());
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + " has non-finite entries");
  }
}

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + " must be square, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

/// Largest entry modulus; zero for empty matrices.
inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double hs_norm(const Matrix& a) { return a.norm(); }

inline cplx hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

inline Matrix hermitian_part(const Matrix& a) {
  return 0.5 * (a + a.adjoint());
}

/// max |A - A^dagger|, the Hermiticity residual.
inline double hermiticity_residual(const Matrix& a) {
  return max_abs(a - a.adjoint());
}

// ---------------------------------------------------------------------------
// Singular value decomposition
// ---------------------------------------------------------------------------

struct Svd {
  Matrix U;
  RealVector s;  // descending
  Matrix V;
};

/// A = U diag(s) V^dagger. With `full`, U and V are square unitaries;
/// otherwise they are thin (min(m,n) columns).
inline Svd svd(const Matrix& a, bool full = false) {
  if (!a.allFinite()) {
    throw DecompositionError(rows_of(a), cols_of(a));
  }
  if (a.size() == 0) {
    return {full ? identity(rows_of(a)) : zeros(rows_of(a), 0), RealVector(),
            full ? identity(cols_of(a)) : zeros(cols_of(a), 0)};
  }
  const unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                             : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  // BDCSVD in Eigen 3.4.0 mis-deflates complex matrices with repeated
  // singular values (as in the block systems of lift_to_dilation).
  Eigen::JacobiSVD<Matrix> dec(a, opts);
  if (dec.info() != Eigen::Success || !dec.singularValues().allFinite()) {
    throw DecompositionError(rows_of(a), cols_of(a));
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Number of singular values above eps times the largest one.
inline std::size_t numerical_rank(const RealVector& s, Tolerance tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cut = tol.eps * s(0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++r;
  }
  return r;
}

inline std::size_t rank(const Matrix& a, Tolerance tol = {}) {
  return numerical_rank(svd(a).s, tol);
}

/// Orthonormal basis of ker L, one vector per column. All of the domain
/// when L vanishes.
///
/// Singular values below eps * max(s_max, 1) count as zero: the linear
/// systems solved here are built from operators of norm about one, whose
/// rounding residue would otherwise pass a purely relative cutoff when L
/// vanishes up to rounding.
inline Matrix null_space(const Matrix& l, Tolerance tol = {}) {
  const auto n = cols_of(l);
  if (l.rows() == 0 || max_abs(l) == 0.0) return identity(n);
  const Svd dec = svd(l, /*full=*/true);
  std::size_t r = 0;
  const double cut = tol.eps * std::max(dec.s(0), 1.0);
  for (Eigen::Index i = 0; i < dec.s.size(); ++i) {
    if (dec.s(i) > cut) ++r;
  }
  return dec.V.rightCols(static_cast<Eigen::Index>(n - r));
}

/// Orthonormal basis of the column space of A.
inline Matrix range_basis(const Matrix& a, Tolerance tol = {}) {
  if (a.size() == 0 || max_abs(a) == 0.0) return zeros(rows_of(a), 0);
  const Svd dec = svd(a);
  const auto r = static_cast<Eigen::Index>(numerical_rank(dec.s, tol));
  return dec.U.leftCols(r);
}

/// Orthonormal basis of the orthogonal complement of range(Q), Q having
/// orthonormal columns.
inline Matrix orthogonal_complement(const Matrix& q, Tolerance tol = {}) {
  const auto d = rows_of(q);
  if (q.cols() == 0) return identity(d);
  return null_space(q.adjoint(), tol);
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition and functional calculus
// ---------------------------------------------------------------------------

/// Rotates the phase of each column so that its first non-negligible entry
/// is real and positive.
inline void fix_column_phases(Matrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double scale = v.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-8 * scale) {
        const cplx phase = v(i, j) / std::abs(v(i, j));
        v.col(j) *= std::conj(phase);
        break;
      }
    }
  }
}

struct Eigh {
  RealVector values;  // descending
  Matrix vectors;     // columns, canonical phase
};

/// Eigendecomposition of a matrix that must be Hermitian within tolerance.
inline Eigh eigh(const Matrix& a, Tolerance tol = {}) {
  require_square(a, "eigh input");
  if (!a.allFinite()) throw DecompositionError(rows_of(a), cols_of(a));
  const double res = hermiticity_residual(a);
  if (res > tol.eps * std::max(1.0, max_abs(a))) throw NotHermitianError(res);
  if (a.size() == 0) return {RealVector(), Matrix()};
  Eigen::SelfAdjointEigenSolver<Matrix> dec(hermitian_part(a));
  if (dec.info() != Eigen::Success) {
    throw DecompositionError(rows_of(a), cols_of(a));
  }
  const RealVector& w = dec.eigenvalues();
  const Matrix& v = dec.eigenvectors();
  const auto n = w.size();
  // Descending order. Eigenvalues equal within eps*scale form one cluster,
  // whose eigenspace gets the basis obtained by Gram-Schmidt on the columns
  // of its projector, taken largest residual first (lowest index on ties).
  // That basis depends on the eigenspace only, not on the solver's choice.
  const double scale = std::max(1.0, std::max(std::abs(w(0)), std::abs(w(n - 1))));
  Eigh out;
  out.values.resize(n);
  out.vectors.resize(v.rows(), n);
  Eigen::Index k = 0;
  Eigen::Index hi = n;
  while (hi > 0) {
    Eigen::Index lo = hi - 1;
    while (lo > 0 && w(hi - 1) - w(lo - 1) <= tol.eps * scale) --lo;
    const Eigen::Index size = hi - lo;
    for (Eigen::Index j = 0; j < size; ++j) out.values(k + j) = w(hi - 1 - j);
    if (size == 1) {
      out.vectors.col(k) = v.col(lo);
    } else {
      const Matrix block = v.middleCols(lo, size);
      Matrix rest = block * block.adjoint();
      for (Eigen::Index j = 0; j < size; ++j) {
        const RealVector norms = rest.colwise().norm();
        const double top = norms.maxCoeff();
        Eigen::Index pick = 0;
        while (norms(pick) < top * (1.0 - 1e-8)) ++pick;
        const Vector u = rest.col(pick) / norms(pick);
        out.vectors.col(k + j) = u;
        rest -= u * (u.adjoint() * rest);
      }
    }
    k += size;
    hi = lo;
  }
  fix_column_phases(out.vectors);
  return out;
}

/// Eigendecomposition of a matrix that must be PSD within tolerance;
/// eigenvalues are clamped at zero.
inline Eigh eigh_psd(const Matrix& a, Tolerance tol = {}) {
  Eigh e = eigh(a, tol);
  if (e.values.size() == 0) return e;
  const double top = std::max(1.0, e.values(0));
  const double low = e.values(e.values.size() - 1);
  if (low < -tol.eps * top) throw NegativeEigenvalueError(low);
  e.values = e.values.cwiseMax(0.0);
  return e;
}

inline double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> dec(hermitian_part(a),
                                            Eigen::EigenvaluesOnly);
  return dec.eigenvalues()(0);
}

inline double max_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> dec(hermitian_part(a),
                                            Eigen::EigenvaluesOnly);
  return dec.eigenvalues()(dec.eigenvalues().size() - 1);
}

/// Spectral norm.
inline double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return svd(a).s(0);
}

/// Number of eigenvalues of a PSD matrix above eps * lambda_max.
inline std::size_t psd_rank(const Eigh& e, Tolerance tol) {
  return numerical_rank(e.values.cwiseMax(0.0), tol);
}

template <class F>
Matrix spectral_apply(const Eigh& e, F&& f) {
  RealVector mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) mapped(i) = f(e.values(i));
  return e.vectors * mapped.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

inline Matrix psd_sqrt(const Matrix& a, Tolerance tol = {}) {
  const Eigh e = eigh_psd(a, tol);
  return spectral_apply(e, [](double x) { return std::sqrt(x); });
}

/// Pseudo-inverse square root: inverse on the support, zero on the kernel.
inline Matrix psd_inv_sqrt(const Matrix& a, Tolerance tol = {}) {
  const Eigh e = eigh_psd(a, tol);
  if (e.values.size() == 0) return Matrix();
  const double cut = tol.eps * e.values(0);
  return spectral_apply(e, [cut](double x) {
    return x > cut && x > 0.0 ? 1.0 / std::sqrt(x) : 0.0;
  });
}

/// Pseudo-inverse of a PSD matrix.
inline Matrix psd_pinv(const Matrix& a, Tolerance tol = {}) {
  const Eigh e = eigh_psd(a, tol);
  if (e.values.size() == 0) return Matrix();
  const double cut = tol.eps * e.values(0);
  return spectral_apply(
      e, [cut](double x) { return x > cut && x > 0.0 ? 1.0 / x : 0.0; });
}

/// Orthonormal basis of the range of a PSD matrix, eigenvectors ordered by
/// descending eigenvalue.
inline Matrix psd_support_basis(const Matrix& a, Tolerance tol = {}) {
  const Eigh e = eigh_psd(a, tol);
  return e.vectors.leftCols(static_cast<Eigen::Index>(psd_rank(e, tol)));
}

/// Orthogonal projection onto the range of a PSD matrix.
inline Matrix support_projection(const Matrix& a, Tolerance tol = {}) {
  const Matrix v = psd_support_basis(a, tol);
  return v * v.adjoint();
}

/// General pseudo-inverse through the SVD.
inline Matrix pinv(const Matrix& a, Tolerance tol = {}) {
  if (a.size() == 0) return zeros(cols_of(a), rows_of(a));
  const Svd dec = svd(a);
  const auto r = static_cast<Eigen::Index>(numerical_rank(dec.s, tol));
  RealVector inv = dec.s.head(r).cwiseInverse();
  return dec.V.leftCols(r) * inv.cast<cplx>().asDiagonal() *
         dec.U.leftCols(r).adjoint();
}

// ---------------------------------------------------------------------------
// Polar decomposition
// ---------------------------------------------------------------------------

struct Polar {
  Matrix W;     // partial isometry, W^dagger W = supp(P)
  Matrix P;     // (A^dagger A)^{1/2}
  bool unique;  // false when A has a kernel and W is not determined there
};

/// A = W P. On rank-deficient input W is taken to vanish on ker(P), which
/// is one of many valid completions; `unique` reports this.
inline Polar polar(const Matrix& a, Tolerance tol = {}) {
  const Svd dec = svd(a);
  const auto r = static_cast<Eigen::Index>(numerical_rank(dec.s, tol));
  Polar out;
  out.W = dec.U.leftCols(r) * dec.V.leftCols(r).adjoint();
  out.P = dec.V * dec.s.cast<cplx>().asDiagonal() * dec.V.adjoint();
  out.P = hermitian_part(out.P);
  out.unique = r == a.cols();
  return out;
}

/// Closest isometry (in any unitarily invariant norm) to a full-column-rank
/// matrix.
inline Matrix nearest_isometry(const Matrix& a) {
  const Svd dec = svd(a);
  return dec.U * dec.V.adjoint();
}

/// Extends an isometry V (d x r) to a d x d unitary whose first r columns
/// are V.
inline Matrix complete_to_unitary(const Matrix& v, Tolerance tol = {}) {
  const Matrix comp = orthogonal_complement(v, tol);
  Matrix u(v.rows(), v.rows());
  u << v, comp;
  return u;
}

// ---------------------------------------------------------------------------
// Tensor operations
// ---------------------------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

enum class Factor { First = 1, Second = 2 };

/// Traces out one factor of a (d1*d2)-dimensional square matrix.
inline Matrix partial_trace(const Matrix& a, std::size_t d1, std::size_t d2,
                            Factor traced) {
  const auto n1 = static_cast<Eigen::Index>(d1);
  const auto n2 = static_cast<Eigen::Index>(d2);
  if (a.rows() != n1 * n2 || a.cols() != n1 * n2) {
    throw DimensionError("partial_trace: matrix is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected " +
                         std::to_string(d1 * d2) + " square");
  }
  if (traced == Factor::First) {
    Matrix out = Matrix::Zero(n2, n2);
    for (Eigen::Index k = 0; k < n1; ++k) out += a.block(k * n2, k * n2, n2, n2);
    return out;
  }
  Matrix out(n1, n1);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n1; ++j) {
      out(i, j) = a.block(i * n2, j * n2, n2, n2).trace();
    }
  }
  return out;
}

/// Applies a linear map to the second tensor factor: for A on C^{d_outer} (x)
/// C^{d_in}, returns sum_{kl} |k><l| (x) f(A_kl), where A_kl are the
/// d_in x d_in blocks. `f` may change the block size.
template <class F>
Matrix apply_to_second_factor(const Matrix& a, std::size_t d_outer, F&& f) {
  const auto no = static_cast<Eigen::Index>(d_outer);
  if (no == 0 || a.rows() % no != 0 || a.rows() != a.cols()) {
    throw DimensionError("apply_to_second_factor: bad outer dimension");
  }
  const Eigen::Index ni = a.rows() / no;
  Matrix out;
  Eigen::Index nb = -1;
  for (Eigen::Index k = 0; k < no; ++k) {
    for (Eigen::Index l = 0; l < no; ++l) {
      const Matrix blk = f(Matrix(a.block(k * ni, l * ni, ni, ni)));
      if (nb < 0) {
        nb = blk.rows();
        out = Matrix::Zero(no * nb, no * nb);
      }
      out.block(k * nb, l * nb, nb, nb) = blk;
    }
  }
  return out;
}

/// Vectorizes a matrix row-major into a column, vec(A)_{i*cols+j} = A_ij.
inline Vector vec_rows(const Matrix& a) {
  Vector v(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  }
  return v;
}

inline Matrix unvec_rows(const Vector& v, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(v.size()) != rows * cols) {
    throw DimensionError("unvec_rows: length mismatch");
  }
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = v(i * a.cols() + j);
  }
  return a;
}

/// Orthonormalizes a list of matrices under the Hilbert-Schmidt inner
/// product; the result spans the same space.
inline std::vector<Matrix> hs_orthonormal_basis(const std::vector<Matrix>& mats,
                                                Tolerance tol = {}) {
  if (mats.empty()) return {};
  const auto r = rows_of(mats.front());
  const auto c = cols_of(mats.front());
  Matrix stacked(static_cast<Eigen::Index>(r * c),
                 static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) {
    require_same_shape(mats[k], mats.front(), "hs_orthonormal_basis");
    stacked.col(static_cast<Eigen::Index>(k)) = vec_rows(mats[k]);
  }
  const Matrix q = range_basis(stacked, tol);
  std::vector<Matrix> out;
  out.reserve(cols_of(q));
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    out.push_back(unvec_rows(q.col(k), r, c));
  }
  return out;
}

}  // namespace ppovm
