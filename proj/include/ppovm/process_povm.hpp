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

// Process POVMs (quantum 1-testers) and the triples (H0, input, M) that
// implement them: prepare the input on H (x) H0, send the H part through the
// unknown channel H -> K, then measure M on K (x) H0.
//
// Operators T : H -> H0 act on K (x) H as I_K (x) T; the extended matrix is
// formed at the point of use and never stored.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ppovm/quantum.hpp"

namespace ppovm {

// ---------------------------------------------------------------------------
// ProcessPovm
// ---------------------------------------------------------------------------

/// PSD effects on K (x) H summing to I_K (x) sigma for a state sigma on H.
class ProcessPovm {
 public:
  ProcessPovm(std::size_t d_k, std::size_t d_h, std::vector<Matrix> effects,
              Tolerance tol = {})
      : dk_(d_k), dh_(d_h) {
    throw_on_failure(check(d_k, d_h, effects, tol), "process POVM");
    Matrix sum = zeros(d_k * d_h, d_k * d_h);
    for (auto& e : effects) {
      e = hermitian_part(e);
      sum += e;
    }
    sigma_ = hermitian_part(partial_trace(sum, d_k, d_h, Factor::First)) /
             static_cast<double>(d_k);
    effects_ = std::move(effects);
  }

  static Report check(std::size_t d_k, std::size_t d_h,
                      const std::vector<Matrix>& effects, Tolerance tol = {}) {
    if (effects.empty()) return {{"nonempty", 1.0, 0.0}};
    if (d_k == 0 || d_h == 0) return {{"positive dimensions", 1.0, 0.0}};
    const auto d = d_k * d_h;
    Matrix sum = zeros(d, d);
    double herm = 0.0;
    double neg = 0.0;
    for (const auto& e : effects) {
      if (rows_of(e) != d || cols_of(e) != d) {
        return {{"effects on K (x) H", 1.0, 0.0}};
      }
      if (!e.allFinite()) return {{"finite", 1.0, 0.0}};
      herm = std::max(herm, hermiticity_residual(e));
      neg = std::max(neg, detail::psd_violation(e));
      sum += e;
    }
    const Matrix sigma =
        partial_trace(sum, d_k, d_h, Factor::First) / static_cast<double>(d_k);
    const double n = static_cast<double>(effects.size());
    return {
        {"effects hermitian", herm, tol.eps},
        {"effects positive", neg, tol.eps},
        {"sum is I_K (x) sigma", max_abs(sum - kron(identity(d_k), sigma)),
         n * tol.eps},
        {"sigma positive", detail::psd_violation(hermitian_part(sigma)),
         tol.eps},
        {"sigma unit trace", std::abs(sigma.trace() - 1.0), n * tol.eps},
    };
  }

  std::size_t dk() const { return dk_; }
  std::size_t dh() const { return dh_; }
  std::size_t size() const { return effects_.size(); }
  const std::vector<Matrix>& effects() const { return effects_; }
  const Matrix& operator[](std::size_t i) const { return effects_[i]; }
  /// The normalization state sigma on H.
  const Matrix& sigma() const { return sigma_; }

 private:
  std::size_t dk_;
  std::size_t dh_;
  std::vector<Matrix> effects_;
  Matrix sigma_;
};

/// max over effects of the largest entrywise deviation.
inline double effect_distance(const std::vector<Matrix>& a,
                              const std::vector<Matrix>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("effect_distance: outcome counts differ");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require_same_shape(a[i], b[i], "effect_distance");
    d = std::max(d, max_abs(a[i] - b[i]));
  }
  return d;
}

inline double effect_distance(const ProcessPovm& a, const ProcessPovm& b) {
  return effect_distance(a.effects(), b.effects());
}

/// Effectwise convex combination sum_k w_k F^k.
inline std::vector<Matrix> combine_effects(
    const std::vector<double>& weights,
    const std::vector<std::vector<Matrix>>& parts) {
  if (weights.size() != parts.size() || parts.empty()) {
    throw DimensionError("combine_effects: weight/part count mismatch");
  }
  std::vector<Matrix> out = parts.front();
  for (auto& e : out) e.setZero();
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].size() != out.size()) {
      throw DimensionError("combine_effects: outcome counts differ");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += weights[k] * parts[k][i];
    }
  }
  return out;
}

struct TesterRank {
  std::size_t r = 1;
};

/// r(F) = rank(sigma) at the relative cutoff.
inline TesterRank rank(const ProcessPovm& f, Tolerance tol = {}) {
  return {psd_rank(eigh_psd(f.sigma(), tol), tol)};
}

/// Probabilities m(Phi)_i = Tr F_i C(Phi).
inline std::vector<double> tester_probabilities(const ProcessPovm& f,
                                                const Channel& phi) {
  if (phi.in_dim() != f.dh() || phi.out_dim() != f.dk()) {
    throw DimensionError("tester_probabilities: channel is " +
                         std::to_string(phi.in_dim()) + "->" +
                         std::to_string(phi.out_dim()) + ", tester expects " +
                         std::to_string(f.dh()) + "->" +
                         std::to_string(f.dk()));
  }
  const Matrix c = choi(phi).mat;
  std::vector<double> p;
  p.reserve(f.size());
  for (const auto& e : f.effects()) p.push_back((e * c).trace().real());
  return p;
}

// ---------------------------------------------------------------------------
// RepresentationTriple
// ---------------------------------------------------------------------------

struct PureInput {
  Matrix T;  // H -> H0, d_H0 x d_H, Tr T^dagger T = 1
};

struct MixedInput {
  DensityMatrix rho;  // on H (x) H0
};

/// (H0, input, M): an input state on H (x) H0 and a POVM M on K (x) H0.
class RepresentationTriple {
 public:
  static RepresentationTriple pure(std::size_t d_k, Matrix t, Povm m,
                                   Tolerance tol = {}) {
    require_finite(t, "input operator T");
    const double norm = (t.adjoint() * t).trace().real();
    if (std::abs(norm - 1.0) > tol.eps) {
      throw ValidationError("triple: Tr T^dagger T = " + std::to_string(norm) +
                            ", expected 1");
    }
    const auto dh0 = rows_of(t);
    const auto dh = cols_of(t);
    if (m.space_dim() != d_k * dh0) {
      throw DimensionError("triple: POVM space dimension " +
                           std::to_string(m.space_dim()) + " != dK*dH0 = " +
                           std::to_string(d_k * dh0));
    }
    return RepresentationTriple(d_k, dh, dh0, PureInput{std::move(t)},
                                std::move(m));
  }

  static RepresentationTriple mixed(std::size_t d_k, std::size_t d_h,
                                    DensityMatrix rho, Povm m) {
    if (d_k == 0 || m.space_dim() % d_k != 0) {
      throw DimensionError("triple: POVM space not divisible by dK");
    }
    const auto dh0 = m.space_dim() / d_k;
    if (rho.dim() != d_h * dh0) {
      throw DimensionError("triple: input state dimension " +
                           std::to_string(rho.dim()) + " != dH*dH0 = " +
                           std::to_string(d_h * dh0));
    }
    return RepresentationTriple(d_k, d_h, dh0, MixedInput{std::move(rho)},
                                std::move(m));
  }

  std::size_t dk() const { return dk_; }
  std::size_t dh() const { return dh_; }
  std::size_t dh0() const { return dh0_; }
  std::size_t size() const { return m_.size(); }
  const Povm& M() const { return m_; }

  bool is_pure() const { return std::holds_alternative<PureInput>(input_); }

  const Matrix& T() const {
    if (!is_pure()) throw ValidationError("triple has a mixed input state");
    return std::get<PureInput>(input_).T;
  }

  /// The input state; |T>><<T| for pure inputs.
  DensityMatrix rho(Tolerance tol = {}) const {
    if (is_pure()) return pure_state(T(), tol);
    return std::get<MixedInput>(input_).rho;
  }

 private:
  RepresentationTriple(std::size_t dk, std::size_t dh, std::size_t dh0,
                       std::variant<PureInput, MixedInput> input, Povm m)
      : dk_(dk), dh_(dh), dh0_(dh0), input_(std::move(input)), m_(std::move(m)) {}

  std::size_t dk_;
  std::size_t dh_;
  std::size_t dh0_;
  std::variant<PureInput, MixedInput> input_;
  Povm m_;
};

/// Pure input with surjective T.
inline bool is_minimal(const RepresentationTriple& t, Tolerance tol = {}) {
  return t.is_pure() && rank(t.T(), tol) == t.dh0();
}

/// (I_K (x) A)^dagger X (I_K (x) A).
inline Matrix compress(const Matrix& x, std::size_t d_k, const Matrix& a) {
  const Matrix ext = kron(identity(d_k), a);
  return ext.adjoint() * x * ext;
}

/// Effects (I_K (x) A)^dagger M_i (I_K (x) A).
inline std::vector<Matrix> compress_all(const std::vector<Matrix>& m,
                                        std::size_t d_k, const Matrix& a) {
  const Matrix ext = kron(identity(d_k), a);
  std::vector<Matrix> out;
  out.reserve(m.size());
  for (const auto& e : m) out.push_back(ext.adjoint() * e * ext);
  return out;
}

/// The unique process POVM implemented by a triple: F_j = T^dagger M_j T for
/// pure inputs, F_j = (id_K (x) Phi_rho^*)(M_j) in general.
inline ProcessPovm realize(const RepresentationTriple& t, Tolerance tol = {}) {
  std::vector<Matrix> effects;
  effects.reserve(t.size());
  if (t.is_pure()) {
    effects = compress_all(t.M().effects(), t.dk(), t.T());
  } else {
    const StateAdjointMap adj(t.rho(tol), t.dh(), t.dh0());
    for (const auto& m : t.M().effects()) {
      effects.push_back(apply_to_second_factor(m, t.dk(), adj));
    }
  }
  return ProcessPovm(t.dk(), t.dh(), std::move(effects), tol);
}

/// Tr M_i (Phi (x) id_H0)(rho): the probabilities of the scheme itself,
/// computed without passing through the tester.
inline std::vector<double> scheme_probabilities(const RepresentationTriple& t,
                                                const Channel& phi,
                                                Tolerance tol = {}) {
  if (phi.in_dim() != t.dh() || phi.out_dim() != t.dk()) {
    throw DimensionError("scheme_probabilities: channel dimension mismatch");
  }
  const Matrix out = apply_channel_first(phi, t.rho(tol).mat(), t.dh0());
  std::vector<double> p;
  p.reserve(t.size());
  for (const auto& m : t.M().effects()) p.push_back((m * out).trace().real());
  return p;
}

namespace detail {

/// Rescales effects so they sum exactly to the identity. Used where a
/// normalization is known to hold analytically and only rounding (amplified
/// by a pseudo-inverse) separates the computed effects from it.
inline std::vector<Matrix> renormalize(std::vector<Matrix> effects,
                                       Tolerance tol) {
  Matrix sum = zeros(rows_of(effects.front()), rows_of(effects.front()));
  for (const auto& e : effects) sum += e;
  const Matrix s = psd_inv_sqrt(sum, tol);
  for (auto& e : effects) e = hermitian_part(s * e * s);
  return effects;
}

}  // namespace detail

/// Minimal representation (H0, T, M) with H0 = supp(sigma), dim H0 = r(F).
///
/// H0 is given the eigenbasis of sigma ordered by descending eigenvalue
/// (phases fixed by eigh); T = diag(sqrt(lambda)) V^dagger so that
/// T^dagger T = sigma, and M_i = (I (x) T^+)^dagger F_i (I (x) T^+).
/// Degenerate eigenvalues leave the basis determined only up to rotations
/// inside each eigenspace.
inline RepresentationTriple minimal_representation(const ProcessPovm& f,
                                                   Tolerance tol = {}) {
  const Eigh e = eigh_psd(f.sigma(), tol);
  const auto r = static_cast<Eigen::Index>(psd_rank(e, tol));
  const Matrix v = e.vectors.leftCols(r);
  const RealVector lam = e.values.head(r);
  const Matrix t = lam.cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint();
  const Matrix t_pinv = v * lam.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
  auto m = compress_all(f.effects(), f.dk(), t_pinv);
  m = detail::renormalize(std::move(m), tol);
  const Matrix tn = t / std::sqrt((t.adjoint() * t).trace().real());
  return RepresentationTriple::pure(f.dk(), tn, Povm(std::move(m), tol), tol);
}

inline bool triples_equivalent(const RepresentationTriple& a,
                               const RepresentationTriple& b,
                               Tolerance tol = {}) {
  if (a.size() != b.size()) {
    throw DimensionError("triples_equivalent: outcome counts differ");
  }
  if (a.dk() != b.dk() || a.dh() != b.dh()) {
    throw DimensionError("triples_equivalent: triples act on different H, K");
  }
  return effect_distance(realize(a, tol), realize(b, tol)) <= tol.eps;
}

/// (H_T, Q^dagger T, (I (x) Q)^dagger M (I (x) Q)) with Q an orthonormal
/// basis of range(T).
inline RepresentationTriple restrict_to_minimal(const RepresentationTriple& t,
                                                Tolerance tol = {}) {
  const Matrix q = range_basis(t.T(), tol);
  Matrix tr = q.adjoint() * t.T();
  tr /= std::sqrt((tr.adjoint() * tr).trace().real());
  return RepresentationTriple::pure(
      t.dk(), tr, Povm(compress_all(t.M().effects(), t.dk(), q), tol), tol);
}

/// Embeds the ancilla into the leading coordinates of C^{d_new}; M is
/// extended uniformly on the complement.
inline RepresentationTriple extend_ancilla(const RepresentationTriple& t,
                                           std::size_t d_new,
                                           Tolerance tol = {}) {
  if (d_new < t.dh0()) {
    throw DimensionError("extend_ancilla: target dimension " +
                         std::to_string(d_new) + " < current " +
                         std::to_string(t.dh0()));
  }
  const Matrix v = leading_embedding(d_new, t.dh0());
  Povm m = extend_povm(t.M(), kron(identity(t.dk()), v), tol);
  if (t.is_pure()) {
    return RepresentationTriple::pure(t.dk(), v * t.T(), std::move(m), tol);
  }
  const Matrix ext = kron(identity(t.dh()), v);
  return RepresentationTriple::mixed(
      t.dk(), t.dh(), DensityMatrix(ext * t.rho(tol).mat() * ext.adjoint(), tol),
      std::move(m));
}

// ---------------------------------------------------------------------------
// Equivalence of representations
// ---------------------------------------------------------------------------

struct ConnectingIsometry {
  Matrix U;  // H0_a -> H0_b
  double isometry_residual = 0.0;
  double input_residual = 0.0;        // |U T_a - T_b|
  double conjugation_residual = 0.0;  // |(I(x)U)^dagger M_b (I(x)U) - M_a|
};

/// For a minimal `a` and a pure-input `b` implementing the same tester,
/// the isometry U with T_b = U T_a and M_a = (I (x) U)^dagger M_b (I (x) U).
///
/// U = T_b T_a^+ is forced on range(T_a), which is all of H0_a by
/// minimality, so no completion is involved; it is then snapped to the
/// nearest isometry.
inline ConnectingIsometry connecting_isometry(const RepresentationTriple& a,
                                              const RepresentationTriple& b,
                                              Tolerance tol = {}) {
  if (!b.is_pure()) {
    throw ValidationError("connecting_isometry: second triple needs a pure input");
  }
  if (!is_minimal(a, tol)) {
    throw NonMinimalError("connecting_isometry: first triple is not minimal");
  }
  if (!triples_equivalent(a, b, Tolerance(tol.check()))) {
    throw NotEquivalentError("connecting_isometry: triples realize different testers");
  }
  if (b.dh0() < a.dh0()) {
    throw NotEquivalentError("connecting_isometry: target ancilla too small");
  }
  ConnectingIsometry out;
  out.U = nearest_isometry(b.T() * pinv(a.T(), tol));
  out.isometry_residual =
      max_abs(out.U.adjoint() * out.U - identity(a.dh0()));
  out.input_residual = max_abs(out.U * a.T() - b.T());
  out.conjugation_residual = effect_distance(
      compress_all(b.M().effects(), b.dk(), out.U), a.M().effects());
  return out;
}

/// Checks a candidate ancilla channel chi : H0_a -> H0_b for
/// (id (x) chi)(rho_a) = rho_b and M_a = (id (x) chi^*)(M_b).
inline Report verify_connecting_channel(const RepresentationTriple& a,
                                        const RepresentationTriple& b,
                                        const Channel& chi,
                                        Tolerance tol = {}) {
  if (chi.in_dim() != a.dh0() || chi.out_dim() != b.dh0() || a.dh() != b.dh() ||
      a.dk() != b.dk() || a.size() != b.size()) {
    throw DimensionError("verify_connecting_channel: dimension mismatch");
  }
  const Matrix pushed = apply_channel_second(chi, a.rho(tol).mat(), a.dh());
  std::vector<Matrix> pulled;
  for (const auto& m : b.M().effects()) {
    pulled.push_back(apply_adjoint_second(chi, m, b.dk()));
  }
  return {
      {"state pushed forward", max_abs(pushed - b.rho(tol).mat()), tol.check()},
      {"POVM pulled back", effect_distance(pulled, a.M().effects()),
       tol.check()},
  };
}

// ---------------------------------------------------------------------------
// Mixing and decomposition
// ---------------------------------------------------------------------------

/// Coefficients X_j : H0 -> H_j with sum X_j^dagger X_j = I, together with
/// POVMs M^j on K (x) H_j, describing M = sum_j X_j^dagger M^j X_j.
struct Split {
  std::vector<Matrix> coeffs;
  std::vector<Povm> parts;
};

struct MixResult {
  RepresentationTriple triple;  // minimal, (H_S, S, N)
  Split split;                  // X_i : H_S -> H0 common, with parts M^i
};

/// Minimal triple of sum_i lambda_i realize(term_i).
///
/// All ancillas are first embedded into a common C^D. With
/// S = (sum_i lambda_i T_i^dagger T_i)^{1/2}, X_i = lambda_i^{1/2} T_i S^{-1}
/// restricted to H_S = supp(S), and N = sum_i X_i^dagger M^i X_i, the result
/// is (H_S, S, N).
inline MixResult mix(
    const std::vector<std::pair<double, RepresentationTriple>>& terms,
    Tolerance tol = {}) {
  if (terms.empty()) throw WeightSumError("mix: no terms");
  double total = 0.0;
  std::size_t dmax = 0;
  const auto& first = terms.front().second;
  for (const auto& [w, t] : terms) {
    if (!(w > 0.0)) throw WeightSumError("mix: weights must be positive");
    if (!t.is_pure()) throw ValidationError("mix: terms need pure inputs");
    if (t.dk() != first.dk() || t.dh() != first.dh() ||
        t.size() != first.size()) {
      throw DimensionError("mix: terms act on different spaces");
    }
    total += w;
    dmax = std::max(dmax, t.dh0());
  }
  if (std::abs(total - 1.0) > tol.eps) {
    throw WeightSumError("mix: weights sum to " + std::to_string(total));
  }
  const auto dk = first.dk();
  const auto dh = first.dh();

  std::vector<RepresentationTriple> ext;
  Matrix s2 = zeros(dh, dh);
  for (const auto& [w, t] : terms) {
    ext.push_back(extend_ancilla(t, dmax, tol));
    s2 += w * ext.back().T().adjoint() * ext.back().T();
  }
  const Eigh e = eigh_psd(s2, tol);
  const auto r = static_cast<Eigen::Index>(psd_rank(e, tol));
  const Matrix v = e.vectors.leftCols(r);
  const RealVector lam = e.values.head(r);
  const Matrix s = lam.cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint();
  const Matrix s_inv = v * lam.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();

  Split split;
  std::vector<Matrix> n(first.size(), zeros(dk * static_cast<std::size_t>(r),
                                            dk * static_cast<std::size_t>(r)));
  Matrix gram = Matrix::Zero(r, r);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Matrix x = std::sqrt(terms[i].first) * ext[i].T() * s_inv;
    gram += x.adjoint() * x;
    const auto part = compress_all(ext[i].M().effects(), dk, x);
    for (std::size_t j = 0; j < n.size(); ++j) n[j] += part[j];
    split.coeffs.push_back(x);
    split.parts.push_back(ext[i].M());
  }
  const double gram_res = max_abs(gram - Matrix::Identity(r, r));
  if (gram_res > tol.check()) {
    throw ValidationError("mix: coefficients do not resolve the identity "
                          "(residual " + std::to_string(gram_res) + ")");
  }
  n = detail::renormalize(std::move(n), tol);
  return {RepresentationTriple::pure(dk, s, Povm(std::move(n), tol), tol),
          std::move(split)};
}

struct WeightedTriple {
  double weight;
  RepresentationTriple triple;
  std::size_t index;  // position in the split
};

/// Tester decomposition induced by M = sum_j X_j^dagger M^j X_j:
/// mu_j = Tr T^dagger X_j^dagger X_j T, T_j = mu_j^{-1/2} X_j T, keeping the
/// indices with mu_j > eps. The split is verified against M first.
inline std::vector<WeightedTriple> decompose_along_split(
    const RepresentationTriple& t, const Split& split, Tolerance tol = {}) {
  if (!t.is_pure()) {
    throw ValidationError("decompose_along_split: needs a pure input");
  }
  if (split.coeffs.size() != split.parts.size() || split.coeffs.empty()) {
    throw SplitInconsistencyError("decompose_along_split: malformed split");
  }
  const auto dk = t.dk();
  Matrix gram = zeros(t.dh0(), t.dh0());
  std::vector<Matrix> recon(t.size(), zeros(dk * t.dh0(), dk * t.dh0()));
  for (std::size_t j = 0; j < split.coeffs.size(); ++j) {
    const Matrix& x = split.coeffs[j];
    const Povm& part = split.parts[j];
    if (cols_of(x) != t.dh0() || part.space_dim() != dk * rows_of(x) ||
        part.size() != t.size()) {
      throw SplitInconsistencyError("decompose_along_split: split term " +
                                    std::to_string(j) + " has wrong shape");
    }
    gram += x.adjoint() * x;
    const auto c = compress_all(part.effects(), dk, x);
    for (std::size_t i = 0; i < recon.size(); ++i) recon[i] += c[i];
  }
  const double gram_res = max_abs(gram - identity(t.dh0()));
  const double recon_res = effect_distance(recon, t.M().effects());
  if (gram_res > tol.check() || recon_res > tol.check()) {
    throw SplitInconsistencyError(
        "decompose_along_split: split does not reproduce M (identity residual " +
        std::to_string(gram_res) + ", effect residual " +
        std::to_string(recon_res) + ")");
  }
  std::vector<WeightedTriple> out;
  for (std::size_t j = 0; j < split.coeffs.size(); ++j) {
    const Matrix y = split.coeffs[j] * t.T();
    const double mu = (y.adjoint() * y).trace().real();
    if (mu <= tol.eps) continue;
    out.push_back({mu,
                   RepresentationTriple::pure(dk, y / std::sqrt(mu),
                                              split.parts[j], tol),
                   j});
  }
  return out;
}

}  // namespace ppovm
