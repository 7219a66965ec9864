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

// JSON documents. A matrix is {"rows", "cols", "data"} with data a
// row-major array of [re, im] pairs. A scene is
//
//   {"kind", "dims": {"dK", "dH", "dH0"}, "n", "payload", "meta"}
//
// where dims lists only the dimensions meaningful for the kind. Doubles are
// written with 17 significant digits, so parse and serialize are inverse.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppovm/naimark_face.hpp"

namespace ppovm {

using Json = nlohmann::ordered_json;

/// Malformed input: not JSON, or JSON of the wrong shape.
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const Matrix& a) {
  require_finite(a, "serialized matrix");
  Json data = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      data.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
    }
  }
  Json out;
  out["rows"] = a.rows();
  out["cols"] = a.cols();
  out["data"] = std::move(data);
  return out;
}

namespace detail {

inline const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) {
    throw ParseError(where + ": missing field '" + name + "'");
  }
  return j.at(name);
}

inline std::size_t positive(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) {
    throw ParseError(where + ": expected a positive integer");
  }
  return j.get<std::size_t>();
}

}  // namespace detail

inline Matrix matrix_from_json(const Json& j, const std::string& where = "matrix") {
  const auto rows = detail::positive(detail::field(j, "rows", where), where + ".rows");
  const auto cols = detail::positive(detail::field(j, "cols", where), where + ".cols");
  const Json& data = detail::field(j, "data", where);
  if (!data.is_array() || data.size() != rows * cols) {
    throw ParseError(where + ": data must hold rows*cols = " +
                     std::to_string(rows * cols) + " entries");
  }
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const Json& e = data[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ParseError(where + ": entry " + std::to_string(k) +
                       " is not an [re, im] pair");
    }
    const cplx z(e[0].get<double>(), e[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ParseError(where + ": entry " + std::to_string(k) + " is not finite");
    }
    a(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = z;
  }
  return a;
}

inline Json matrices_to_json(const std::vector<Matrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

inline std::vector<Matrix> matrices_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a nonempty array");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(matrix_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene documents
// ---------------------------------------------------------------------------

struct Dims {
  std::optional<std::size_t> dK;
  std::optional<std::size_t> dH;
  std::optional<std::size_t> dH0;
};

struct SceneDocument {
  std::string kind;
  Dims dims;
  std::size_t n = 0;
  Json payload;
  std::map<std::string, std::string> meta;
};

inline const std::vector<std::string>& document_kinds() {
  static const std::vector<std::string> kinds = {
      "povm", "process_povm", "triple", "channel", "subalgebra", "naimark",
      "certificate"};
  return kinds;
}

inline Json to_json(const SceneDocument& doc) {
  Json dims = Json::object();
  if (doc.dims.dK) dims["dK"] = *doc.dims.dK;
  if (doc.dims.dH) dims["dH"] = *doc.dims.dH;
  if (doc.dims.dH0) dims["dH0"] = *doc.dims.dH0;
  Json meta = Json::object();
  for (const auto& [k, v] : doc.meta) meta[k] = v;
  Json out;
  out["kind"] = doc.kind;
  out["dims"] = std::move(dims);
  out["n"] = doc.n;
  out["payload"] = doc.payload;
  out["meta"] = std::move(meta);
  return out;
}

inline std::string serialize(const SceneDocument& doc) {
  return to_json(doc).dump(2) + "\n";
}

inline SceneDocument document_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("document: expected a JSON object");
  SceneDocument doc;
  const Json& kind = detail::field(j, "kind", "document");
  if (!kind.is_string()) throw ParseError("document.kind: expected a string");
  doc.kind = kind.get<std::string>();
  bool known = false;
  for (const auto& k : document_kinds()) known = known || k == doc.kind;
  if (!known) throw ParseError("document.kind: unknown kind '" + doc.kind + "'");
  const Json& dims = detail::field(j, "dims", "document");
  if (!dims.is_object()) throw ParseError("document.dims: expected an object");
  for (const auto& [key, value] : dims.items()) {
    const auto v = detail::positive(value, "document.dims." + key);
    if (key == "dK") {
      doc.dims.dK = v;
    } else if (key == "dH") {
      doc.dims.dH = v;
    } else if (key == "dH0") {
      doc.dims.dH0 = v;
    } else {
      throw ParseError("document.dims: unknown dimension '" + key + "'");
    }
  }
  const Json& n = detail::field(j, "n", "document");
  if (!n.is_number_integer() || n.get<long long>() < 0) {
    throw ParseError("document.n: expected a nonnegative integer");
  }
  doc.n = n.get<std::size_t>();
  doc.payload = detail::field(j, "payload", "document");
  if (!doc.payload.is_object()) throw ParseError("document.payload: expected an object");
  if (j.contains("meta")) {
    const Json& meta = j.at("meta");
    if (!meta.is_object()) throw ParseError("document.meta: expected an object");
    for (const auto& [k, v] : meta.items()) {
      if (!v.is_string()) throw ParseError("document.meta." + k + ": expected a string");
      doc.meta[k] = v.get<std::string>();
    }
  }
  return doc;
}

inline SceneDocument parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return document_from_json(j);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

inline SceneDocument load_document(const std::string& path) {
  return parse_document(read_text(path));
}

/// A bare matrix document.
inline Matrix load_matrix(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return matrix_from_json(j, path);
}

// ---------------------------------------------------------------------------
// Conversions between documents and objects
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t need(const std::optional<std::size_t>& d, const char* name,
                        const std::string& kind) {
  if (!d) throw ParseError(kind + " document: dims." + name + " is required");
  return *d;
}

inline void check_count(const SceneDocument& doc, std::size_t count) {
  if (doc.n != count) {
    throw ParseError(doc.kind + " document: n = " + std::to_string(doc.n) +
                     " but payload holds " + std::to_string(count) + " effects");
  }
}

inline void check_sizes(const std::vector<Matrix>& ms, std::size_t rows,
                        std::size_t cols, const std::string& what) {
  for (const auto& m : ms) {
    if (rows_of(m) != rows || cols_of(m) != cols) {
      throw ParseError(what + ": expected " + std::to_string(rows) + "x" +
                       std::to_string(cols) + " matrices");
    }
  }
}

}  // namespace detail

inline SceneDocument povm_document(const Povm& m, std::size_t d_k = 0) {
  SceneDocument doc;
  doc.kind = "povm";
  const auto k = d_k == 0 ? m.space_dim() : d_k;
  doc.dims.dK = k;
  doc.dims.dH0 = m.space_dim() / k;
  doc.n = m.size();
  doc.payload["effects"] = matrices_to_json(m.effects());
  return doc;
}

inline SceneDocument tester_document(const ProcessPovm& f) {
  SceneDocument doc;
  doc.kind = "process_povm";
  doc.dims.dK = f.dk();
  doc.dims.dH = f.dh();
  doc.n = f.size();
  doc.payload["effects"] = matrices_to_json(f.effects());
  return doc;
}

inline Json triple_payload(const RepresentationTriple& t) {
  Json p;
  if (t.is_pure()) {
    p["input"] = "pure";
    p["T"] = matrix_to_json(t.T());
  } else {
    p["input"] = "mixed";
    p["rho"] = matrix_to_json(t.rho().mat());
  }
  p["M"] = matrices_to_json(t.M().effects());
  return p;
}

inline SceneDocument triple_document(const RepresentationTriple& t) {
  SceneDocument doc;
  doc.kind = "triple";
  doc.dims.dK = t.dk();
  doc.dims.dH = t.dh();
  doc.dims.dH0 = t.dh0();
  doc.n = t.size();
  doc.payload = triple_payload(t);
  return doc;
}

inline SceneDocument channel_document(const Channel& phi) {
  SceneDocument doc;
  doc.kind = "channel";
  doc.dims.dK = phi.out_dim();
  doc.dims.dH = phi.in_dim();
  doc.n = phi.kraus().size();
  doc.payload["kraus"] = matrices_to_json(phi.kraus());
  return doc;
}

inline SceneDocument subalgebra_document(const std::vector<Matrix>& basis) {
  SceneDocument doc;
  doc.kind = "subalgebra";
  doc.dims.dH = rows_of(basis.front());
  doc.n = basis.size();
  doc.payload["basis"] = matrices_to_json(basis);
  return doc;
}

inline SceneDocument naimark_document(const NaimarkDilation& dil, std::size_t space_dim) {
  SceneDocument doc;
  doc.kind = "naimark";
  doc.dims.dH = space_dim;
  doc.n = dil.E.size();
  doc.payload["dilated_dim"] = dil.dilated_dim;
  doc.payload["offsets"] = dil.offsets;
  doc.payload["J"] = matrix_to_json(dil.J);
  doc.payload["E"] = matrices_to_json(dil.E.effects());
  return doc;
}

inline SceneDocument certificate_document(const ProcessPovm& f,
                                          const ExtremalityCertificate& c) {
  SceneDocument doc;
  doc.kind = "certificate";
  doc.dims.dK = f.dk();
  doc.dims.dH = f.dh();
  if (c.minimal) doc.dims.dH0 = c.minimal->dh0();
  doc.n = f.size();
  doc.payload["verdict"] = to_string(c.verdict);
  doc.payload["purity_dim"] = c.purity_dim;
  if (c.witness) {
    Json w;
    w["lambda"] = c.witness->lambda;
    w["F1"] = matrices_to_json(c.witness->f1.effects());
    w["F2"] = matrices_to_json(c.witness->f2.effects());
    doc.payload["witness"] = std::move(w);
  } else {
    doc.payload["witness"] = nullptr;
  }
  if (c.minimal) doc.payload["minimal"] = triple_payload(*c.minimal);
  if (!c.diagnostics.empty()) doc.meta["diagnostics"] = c.diagnostics;
  return doc;
}

/// Raw effect matrices of a povm or process_povm document, shape-checked.
inline std::vector<Matrix> document_effects(const SceneDocument& doc) {
  auto effects = matrices_from_json(detail::field(doc.payload, "effects", doc.kind),
                                    "payload.effects");
  detail::check_count(doc, effects.size());
  std::size_t d = 0;
  if (doc.kind == "povm") {
    d = detail::need(doc.dims.dK, "dK", doc.kind) * doc.dims.dH0.value_or(1);
  } else if (doc.kind == "process_povm") {
    d = detail::need(doc.dims.dK, "dK", doc.kind) * detail::need(doc.dims.dH, "dH", doc.kind);
  } else {
    throw ParseError("expected a povm or process_povm document, got " + doc.kind);
  }
  detail::check_sizes(effects, d, d, "payload.effects");
  return effects;
}

inline Povm to_povm(const SceneDocument& doc, Tolerance tol = {}) {
  if (doc.kind != "povm") throw ParseError("expected a povm document, got " + doc.kind);
  return Povm(document_effects(doc), tol);
}

inline ProcessPovm to_tester(const SceneDocument& doc, Tolerance tol = {}) {
  if (doc.kind != "process_povm") {
    throw ParseError("expected a process_povm document, got " + doc.kind);
  }
  auto effects = document_effects(doc);
  return ProcessPovm(*doc.dims.dK, *doc.dims.dH, std::move(effects), tol);
}

struct RawTriple {
  std::size_t dK, dH, dH0;
  bool pure;
  Matrix input;  // T or rho
  std::vector<Matrix> M;
};

inline RawTriple raw_triple(const SceneDocument& doc) {
  if (doc.kind != "triple") throw ParseError("expected a triple document, got " + doc.kind);
  RawTriple r;
  r.dK = detail::need(doc.dims.dK, "dK", doc.kind);
  r.dH = detail::need(doc.dims.dH, "dH", doc.kind);
  r.dH0 = detail::need(doc.dims.dH0, "dH0", doc.kind);
  const Json& input = detail::field(doc.payload, "input", "payload");
  if (input == "pure") {
    r.pure = true;
    r.input = matrix_from_json(detail::field(doc.payload, "T", "payload"), "payload.T");
    if (rows_of(r.input) != r.dH0 || cols_of(r.input) != r.dH) {
      throw ParseError("payload.T: expected a dH0 x dH matrix");
    }
  } else if (input == "mixed") {
    r.pure = false;
    r.input = matrix_from_json(detail::field(doc.payload, "rho", "payload"), "payload.rho");
    if (rows_of(r.input) != r.dH * r.dH0 || cols_of(r.input) != r.dH * r.dH0) {
      throw ParseError("payload.rho: expected a state on H (x) H0");
    }
  } else {
    throw ParseError("payload.input: expected \"pure\" or \"mixed\"");
  }
  r.M = matrices_from_json(detail::field(doc.payload, "M", "payload"), "payload.M");
  detail::check_count(doc, r.M.size());
  detail::check_sizes(r.M, r.dK * r.dH0, r.dK * r.dH0, "payload.M");
  return r;
}

inline RepresentationTriple to_triple(const SceneDocument& doc, Tolerance tol = {}) {
  RawTriple r = raw_triple(doc);
  Povm m(std::move(r.M), tol);
  if (r.pure) return RepresentationTriple::pure(r.dK, std::move(r.input), std::move(m), tol);
  return RepresentationTriple::mixed(r.dK, r.dH, DensityMatrix(r.input, tol), std::move(m));
}

inline Channel to_channel(const SceneDocument& doc, Tolerance tol = {}) {
  if (doc.kind != "channel") throw ParseError("expected a channel document, got " + doc.kind);
  const auto out = detail::need(doc.dims.dK, "dK", doc.kind);
  const auto in = detail::need(doc.dims.dH, "dH", doc.kind);
  auto kraus = matrices_from_json(detail::field(doc.payload, "kraus", "payload"),
                                  "payload.kraus");
  detail::check_count(doc, kraus.size());
  detail::check_sizes(kraus, out, in, "payload.kraus");
  return Channel(in, out, std::move(kraus), tol);
}

inline std::vector<Matrix> subalgebra_basis(const SceneDocument& doc) {
  if (doc.kind != "subalgebra") {
    throw ParseError("expected a subalgebra document, got " + doc.kind);
  }
  const auto d = detail::need(doc.dims.dH, "dH", doc.kind);
  auto basis = matrices_from_json(detail::field(doc.payload, "basis", "payload"),
                                  "payload.basis");
  detail::check_count(doc, basis.size());
  detail::check_sizes(basis, d, d, "payload.basis");
  return basis;
}

/// Checks a document against the invariants of its kind without throwing
/// on invariant violations (shape problems still raise ParseError).
inline Report validate_document(const SceneDocument& doc, Tolerance tol = {}) {
  if (doc.kind == "povm") return Povm::check(document_effects(doc), tol);
  if (doc.kind == "process_povm") {
    auto effects = document_effects(doc);
    return ProcessPovm::check(*doc.dims.dK, *doc.dims.dH, std::move(effects), tol);
  }
  if (doc.kind == "triple") {
    const RawTriple r = raw_triple(doc);
    Report rep = Povm::check(r.M, tol);
    if (r.pure) {
      rep.push_back({"Tr T^dagger T = 1",
                     std::abs((r.input.adjoint() * r.input).trace().real() - 1.0),
                     tol.eps});
    } else {
      for (auto& c : DensityMatrix::check(r.input, tol)) {
        c.name = "input state " + c.name;
        rep.push_back(c);
      }
    }
    return rep;
  }
  if (doc.kind == "channel") {
    const auto out = detail::need(doc.dims.dK, "dK", doc.kind);
    const auto in = detail::need(doc.dims.dH, "dH", doc.kind);
    auto kraus = matrices_from_json(detail::field(doc.payload, "kraus", "payload"),
                                    "payload.kraus");
    detail::check_count(doc, kraus.size());
    detail::check_sizes(kraus, out, in, "payload.kraus");
    return Channel::check(in, out, kraus, tol);
  }
  if (doc.kind == "subalgebra") {
    const auto basis = subalgebra_basis(doc);
    double ortho = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const cplx g = hs_inner(basis[a], basis[b]);
        ortho = std::max(ortho, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    }
    Report rep{{"basis orthonormal", ortho, tol.check()}};
    const Subalgebra span = Subalgebra::generated_by(basis, tol);
    rep.push_back({"closed (closure adds no dimensions)",
                   static_cast<double>(span.dim() - basis.size()), 0.0});
    return rep;
  }
  if (doc.kind == "naimark") {
    const auto effects = matrices_from_json(detail::field(doc.payload, "E", "payload"),
                                            "payload.E");
    const Matrix j = matrix_from_json(detail::field(doc.payload, "J", "payload"),
                                      "payload.J");
    Report rep = Povm::check(effects, tol);
    double proj = 0.0;
    for (const auto& e : effects) proj = std::max(proj, max_abs(e * e - e));
    rep.push_back({"effects are projections", proj, tol.eps});
    rep.push_back({"J is an isometry", max_abs(j.adjoint() * j - identity(cols_of(j))),
                   tol.eps});
    return rep;
  }
  throw ParseError("validate: documents of kind '" + doc.kind +
                   "' carry no invariants to check");
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  double eps = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_dim = 8;

  Tolerance tol() const { return Tolerance(eps); }

  /// Defaults overridden by PPOVM_EPS and PPOVM_SEED when set.
  static RunConfig from_env() { return resolve("", ""); }

  /// Flag values win over the environment; an overridden variable is not
  /// read at all.
  static RunConfig resolve(const std::string& eps_flag, const std::string& seed_flag) {
    RunConfig c;
    if (!eps_flag.empty()) {
      c.eps = parse_eps(eps_flag);
    } else if (const char* e = std::getenv("PPOVM_EPS")) {
      c.eps = parse_eps(e);
    }
    if (!seed_flag.empty()) {
      c.seed = parse_seed(seed_flag);
    } else if (const char* s = std::getenv("PPOVM_SEED")) {
      c.seed = parse_seed(s);
    }
    return c;
  }

  static double parse_eps(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParseError("eps: '" + s + "' is not a number");
    }
    if (used != s.size() || !(v > 0.0) || !std::isfinite(v)) {
      throw ParseError("eps: '" + s + "' is not a positive number");
    }
    return v;
  }

  static std::uint64_t parse_seed(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw ParseError("seed: '" + s + "' is not an unsigned integer");
    }
    if (used != s.size() || s.find('-') != std::string::npos) {
      throw ParseError("seed: '" + s + "' is not an unsigned integer");
    }
    return v;
  }
};

inline void check_dims(const SceneDocument& doc, const RunConfig& cfg) {
  for (const auto& d : {doc.dims.dK, doc.dims.dH, doc.dims.dH0}) {
    if (d && *d > cfg.max_dim) {
      throw DimensionError("dimension " + std::to_string(*d) + " exceeds max_dim " +
                           std::to_string(cfg.max_dim));
    }
  }
}

}  // namespace ppovm
