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

// Commands behind the `ppovm` executable. Each takes parsed arguments and
// streams, writes its document to --out or stdout, and returns the exit
// code. Argument parsing itself lives in tools/ppovm.cpp.

#pragma once

#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ppovm/io.hpp"
#include "ppovm/selftest.hpp"

namespace ppovm {

enum ExitCode : int {
  kExitOk = 0,
  kExitDomain = 1,
  kExitParse = 2,
  kExitUnknown = 3,
};

struct CommandContext {
  RunConfig cfg;
  std::string out;  // empty: stdout
  std::ostream* stdout_ = &std::cout;
  std::ostream* stderr_ = &std::cerr;

  std::ostream& os() const { return *stdout_; }
  std::ostream& err() const { return *stderr_; }

  void emit(const SceneDocument& doc) const {
    if (out.empty()) {
      os() << serialize(doc);
    } else {
      write_text(out, serialize(doc));
    }
  }

  SceneDocument load(const std::string& path) const {
    SceneDocument doc = load_document(path);
    check_dims(doc, cfg);
    return doc;
  }
};

namespace detail {

inline std::string residual_str(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

inline void print_report(std::ostream& os, const Report& rep) {
  for (const auto& c : rep) {
    os << (c.pass() ? "PASS " : "FAIL ") << c.name << "  residual "
       << residual_str(c.residual) << "  threshold " << residual_str(c.threshold)
       << "\n";
  }
}

inline void require_inputs(const std::vector<std::string>& in, std::size_t count,
                           const char* usage) {
  if (in.size() != count) throw ParseError(std::string("usage: ") + usage);
}

}  // namespace detail

inline int cmd_validate(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 1, "ppovm validate FILE");
  const SceneDocument doc = ctx.load(in[0]);
  const Report rep = validate_document(doc, ctx.cfg.tol());
  detail::print_report(ctx.os(), rep);
  return all_pass(rep) ? kExitOk : kExitDomain;
}

inline int cmd_realize(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 1, "ppovm realize TRIPLE");
  const Tolerance tol = ctx.cfg.tol();
  const RepresentationTriple t = to_triple(ctx.load(in[0]), tol);
  const ProcessPovm f = realize(t, tol);
  SceneDocument doc = tester_document(f);
  const double rt = effect_distance(realize(minimal_representation(f, tol), tol), f);
  doc.meta["round_trip_residual"] = detail::residual_str(rt);
  ctx.err() << "realize: minimize/realize round trip residual "
            << detail::residual_str(rt) << "\n";
  ctx.emit(doc);
  return kExitOk;
}

inline int cmd_minimize(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 1, "ppovm minimize PROCESS_POVM");
  const Tolerance tol = ctx.cfg.tol();
  const ProcessPovm f = to_tester(ctx.load(in[0]), tol);
  const RepresentationTriple t = minimal_representation(f, tol);
  SceneDocument doc = triple_document(t);
  const double rt = effect_distance(realize(t, tol), f);
  doc.meta["round_trip_residual"] = detail::residual_str(rt);
  ctx.err() << "minimize: realize round trip residual " << detail::residual_str(rt)
            << "\n";
  ctx.emit(doc);
  return rt <= tol.check() ? kExitOk : kExitDomain;
}

inline int cmd_certify(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 1, "ppovm certify PROCESS_POVM");
  const Tolerance tol = ctx.cfg.tol();
  const ProcessPovm f = to_tester(ctx.load(in[0]), tol);
  const ExtremalityCertificate c = certify_process_extremal(f, tol, ctx.cfg.seed);
  SceneDocument doc = certificate_document(f, c);
  if (c.witness) {
    const auto& w = *c.witness;
    double recon = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      recon = std::max(recon, max_abs(w.lambda * w.f1[i] + (1.0 - w.lambda) * w.f2[i] - f[i]));
    }
    const bool valid = all_pass(ProcessPovm::check(f.dk(), f.dh(), w.f1.effects(), tol)) &&
                       all_pass(ProcessPovm::check(f.dk(), f.dh(), w.f2.effects(), tol));
    doc.meta["witness_reconstruction_residual"] = detail::residual_str(recon);
    doc.meta["witness_distance"] = detail::residual_str(effect_distance(w.f1, w.f2));
    doc.meta["witness_valid"] = valid && recon <= tol.check() ? "true" : "false";
  }
  ctx.emit(doc);
  ctx.err() << "certify: " << to_string(c.verdict) << ", purity dim " << c.purity_dim
            << "\n";
  if (c.verdict == Verdict::Unknown) {
    ctx.err() << "certify: " << c.diagnostics << "\n";
    return kExitUnknown;
  }
  return kExitOk;
}

inline int cmd_naimark(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 1, "ppovm naimark POVM");
  const Tolerance tol = ctx.cfg.tol();
  const Povm m = to_povm(ctx.load(in[0]), tol);
  const NaimarkDilation dil = minimal_naimark(m, tol);
  const Report rep = dil.check(m, tol);
  ctx.emit(naimark_document(dil, m.space_dim()));
  if (!all_pass(rep)) {
    detail::print_report(ctx.err(), rep);
    return kExitDomain;
  }
  return kExitOk;
}

inline int cmd_commutant(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 1, "ppovm commutant POVM|SUBALGEBRA");
  const Tolerance tol = ctx.cfg.tol();
  const SceneDocument doc = ctx.load(in[0]);
  std::vector<Matrix> mats;
  if (doc.kind == "povm") {
    mats = to_povm(doc, tol).effects();
  } else if (doc.kind == "subalgebra") {
    mats = subalgebra_basis(doc);
  } else {
    throw ParseError("commutant: expected a povm or subalgebra document, got " + doc.kind);
  }
  // An orthonormal basis of a *-closed set is closed; orthonormalize anyway
  // so the output validates as a subalgebra document.
  ctx.emit(subalgebra_document(Subalgebra::generated_by(commutant(mats, tol), tol).basis()));
  return kExitOk;
}

inline int cmd_face_sample(const CommandContext& ctx, const std::vector<std::string>& in) {
  detail::require_inputs(in, 3, "ppovm face-sample POVM T X");
  const Tolerance tol = ctx.cfg.tol();
  const SceneDocument pd = ctx.load(in[0]);
  const Povm m = to_povm(pd, tol);
  const Matrix t = load_matrix(in[1]);
  const Matrix x = load_matrix(in[2]);
  if (pd.dims.dH0 && rows_of(t) != *pd.dims.dH0) {
    throw DimensionError("face-sample: T has " + std::to_string(rows_of(t)) +
                         " rows, the POVM acts on K (x) H0 with dH0 = " +
                         std::to_string(*pd.dims.dH0));
  }
  if (cols_of(t) > ctx.cfg.max_dim) {
    throw DimensionError("face-sample: dH exceeds max_dim");
  }
  ctx.emit(tester_document(face_sample(t, m, x, tol)));
  return kExitOk;
}

struct RandomArgs {
  std::string kind;
  std::size_t dK = 2;
  std::size_t dH = 2;
  std::size_t dH0 = 0;  // 0: kind default
  std::size_t n = 2;
};

inline int cmd_random(const CommandContext& ctx, const RandomArgs& a) {
  const Tolerance tol = ctx.cfg.tol();
  for (auto d : {a.dK, a.dH, a.dH0}) {
    if (d > ctx.cfg.max_dim) {
      throw DimensionError("random: dimension " + std::to_string(d) + " exceeds max_dim " +
                           std::to_string(ctx.cfg.max_dim));
    }
  }
  if (a.dK == 0 || a.dH == 0 || a.n == 0) throw DimensionError("random: zero dimension");
  Rng rng(ctx.cfg.seed);
  const std::size_t dh0 = a.dH0 == 0 ? 1 : a.dH0;
  SceneDocument doc;
  if (a.kind == "povm") {
    doc = povm_document(random_povm(a.dK * dh0, a.n, rng, 0, tol), a.dK);
  } else if (a.kind == "pvm") {
    doc = povm_document(random_pvm(a.dK * dh0, a.n, rng, tol), a.dK);
  } else if (a.kind == "channel") {
    doc = channel_document(random_channel(a.dH, a.dK, rng, a.n, tol));
  } else if (a.kind == "triple") {
    doc = triple_document(
        random_pure_triple(a.dK, a.dH, a.dH0 == 0 ? a.dH : a.dH0, a.n, rng, 0, tol));
  } else if (a.kind == "process_povm") {
    const auto r = a.dH0 == 0 ? a.dH : a.dH0;
    if (r > a.dH) throw DimensionError("random: rank dH0 exceeds dH");
    doc = tester_document(random_tester(a.dK, a.dH, a.n, rng, r, tol));
  } else {
    throw ParseError("random: unknown kind '" + a.kind +
                     "' (povm, pvm, channel, triple, process_povm)");
  }
  doc.meta["seed"] = std::to_string(ctx.cfg.seed);
  ctx.emit(doc);
  return kExitOk;
}

struct SelftestArgs {
  std::string mutation;
  std::string repro = "ppovm-repro.json";
};

inline int cmd_selftest(const CommandContext& ctx, const SelftestArgs& a) {
  if (!a.mutation.empty()) {
    bool known = false;
    for (const auto& m : known_mutations()) known = known || m == a.mutation;
    if (!known) throw ParseError("selftest: unknown mutation '" + a.mutation + "'");
  }
  SelftestOptions opts{ctx.cfg.seed, ctx.cfg.eps, a.mutation};
  std::vector<SuiteResult> results;
  for (const auto& suite : all_suites()) results.push_back(suite(opts));
  std::sort(results.begin(), results.end(),
            [](const SuiteResult& x, const SuiteResult& y) { return x.name < y.name; });
  ctx.os() << "selftest seed " << opts.seed << " eps " << detail::residual_str(opts.eps)
           << "\n";
  bool ok = true;
  Json repro = Json::array();
  double total = 0.0;
  for (const auto& r : results) {
    ctx.os() << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.passed << "/"
             << r.total << "  " << r.detail << "\n";
    ctx.err() << "  " << r.name << " took " << std::fixed << std::setprecision(2)
              << r.seconds << " s\n";
    total += r.seconds;
    if (!r.ok()) {
      ok = false;
      if (r.repro) repro.push_back(*r.repro);
    }
  }
  ctx.err() << "selftest: total " << std::fixed << std::setprecision(2) << total << " s\n";
  if (!ok) {
    write_text(a.repro, repro.dump(2) + "\n");
    ctx.os() << "reproduction written to " << a.repro << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

/// Runs `body`, mapping exceptions to the exit-code contract.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace ppovm
