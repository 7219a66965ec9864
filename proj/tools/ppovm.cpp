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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppovm/commands.hpp"

int main(int argc, char** argv) {
  using namespace ppovm;

  CLI::App app{"ppovm: process POVMs, minimal representations and extremality"};
  app.require_subcommand(1);
  std::string eps_flag;
  std::string seed_flag;
  std::string out;
  app.add_option("--eps", eps_flag, "numerical tolerance (default 1e-9, env PPOVM_EPS)");
  app.add_option("--seed", seed_flag, "random seed (default 0, env PPOVM_SEED)");
  app.add_option("--out", out, "write the output document here instead of stdout");
  app.fallthrough();

  std::vector<std::string> inputs;
  auto with_inputs = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("inputs", inputs, "input files");
    return sub;
  };
  auto* validate = with_inputs("validate", "check a document against its invariants");
  auto* realize_cmd = with_inputs("realize", "triple -> process_povm");
  auto* minimize = with_inputs("minimize", "process_povm -> minimal triple");
  auto* certify = with_inputs("certify", "process_povm -> extremality certificate");
  auto* naimark = with_inputs("naimark", "povm -> minimal Naimark dilation");
  auto* commutant_cmd = with_inputs("commutant", "povm or subalgebra -> commutant subalgebra");
  auto* face = with_inputs("face-sample", "POVM T X -> face element of T^dagger M T");

  RandomArgs rargs;
  auto* random = app.add_subcommand("random", "seeded random document");
  random->add_option("kind", rargs.kind, "povm, pvm, channel, triple or process_povm")
      ->required();
  random->add_option("--dK", rargs.dK, "output / tensor factor dimension");
  random->add_option("--dH", rargs.dH, "input dimension");
  random->add_option("--dH0", rargs.dH0, "ancilla dimension (rank for process_povm)");
  random->add_option("--n", rargs.n, "outcomes (Kraus operators for channel)");

  SelftestArgs sargs;
  auto* selftest = app.add_subcommand("selftest", "run the property suites");
  selftest->add_option("--mutate", sargs.mutation, "corrupt an internal constant");
  selftest->add_option("--repro", sargs.repro, "reproduction file on failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  return guarded(std::cerr, [&]() -> int {
    CommandContext ctx;
    ctx.cfg = RunConfig::resolve(eps_flag, seed_flag);
    ctx.out = out;
    if (validate->parsed()) return cmd_validate(ctx, inputs);
    if (realize_cmd->parsed()) return cmd_realize(ctx, inputs);
    if (minimize->parsed()) return cmd_minimize(ctx, inputs);
    if (certify->parsed()) return cmd_certify(ctx, inputs);
    if (naimark->parsed()) return cmd_naimark(ctx, inputs);
    if (commutant_cmd->parsed()) return cmd_commutant(ctx, inputs);
    if (face->parsed()) return cmd_face_sample(ctx, inputs);
    if (random->parsed()) return cmd_random(ctx, rargs);
    if (selftest->parsed()) return cmd_selftest(ctx, sargs);
    throw ParseError("no command given");
  });
}
