// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cclab: certify the complementarity/distillation bounds from the command line.
// Exit status: 0 all certificates pass, 1 some certificate failed, 2 invalid input.

#include <cclab/io.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

void emit(const cclab::Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    cclab::write_text_file(out, text);
  }
}

std::vector<int> parse_theorems(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.size() != 1 || item[0] < '1' || item[0] > '4') throw cclab::InputError("theorems: expected a list like 1,2,3,4");
    out.push_back(item[0] - '0');
  }
  if (out.empty()) throw cclab::InputError("theorems: empty list");
  return out;
}

int cmd_validate(const std::string& path) {
  const auto j = cclab::read_json_file(path);
  const auto state = cclab::state_from_json(j);
  cclab::Json report = cclab::Json::array();
  bool ok = true;
  std::visit(
      [&](const auto& s) {
        for (const auto& b : s.blocks()) {
          const auto diag = cclab::validate_density(cclab::to_density(b.state));
          ok = ok && diag.ok;
          report.push_back({{"omega", b.omega},
                            {"prob", b.prob},
                            {"hermiticity_residual", diag.hermiticity_residual},
                            {"min_eigenvalue", diag.min_eigenvalue},
                            {"trace_deviation", diag.trace_deviation},
                            {"ok", diag.ok}});
        }
      },
      state);
  std::cout << cclab::Json{{"ok", ok}, {"blocks", std::move(report)}}.dump(2) << "\n";
  return ok ? kExitPass : kExitInvalid;
}

int cmd_theorem(int theorem, const std::string& path, double tol, const std::string& out) {
  const auto j = cclab::read_json_file(path);
  cclab::TheoremCertificate cert;
  switch (theorem) {
    case 1:
      cert = cclab::thm1_run(cclab::instance_from_json(j), tol).cert;
      break;
    case 2:
      cert = cclab::as_input([&] { return cclab::thm2_build_secondary(cclab::keyrun_from_json(j), std::nullopt, tol); }).cert;
      break;
    case 3: {
      const auto c = cclab::distiller_from_json(j);
      cert = cclab::as_input([&] { return cclab::thm3_run(c.primary, c.lambda, tol); }).cert;
      break;
    }
    case 4: {
      const auto [rho, d] = cclab::two_qudit_from_json(j);
      cert = cclab::as_input([&, &rho = rho, d = d] { return cclab::thm4_run(rho, d, tol); }).cert;
      break;
    }
    default:
      throw cclab::InputError("unknown theorem");
  }
  emit(cclab::to_json(cert), out);
  return cert.ok ? kExitPass : kExitFail;
}

int cmd_suite(const cclab::SuiteConfig& cfg, const std::string& out) {
  cclab::as_input([&] {
    cfg.validate();
    return 0;
  });
  const auto rep = cclab::run_suite(cfg);
  const auto j = cclab::to_json(rep);
  if (!out.empty()) cclab::write_text_file(out, j.dump(2) + "\n");
  for (const auto& [th, a] : rep.aggregate) {
    std::cout << "theorem " << th << ": " << a.trials << " trials, " << a.failures << " failures, worst slack "
              << cclab::format_double(a.worst_slack) << "\n";
  }
  std::cout << (rep.ok() ? "PASS" : "FAIL") << " (" << rep.failures << " failures)\n";
  return rep.ok() ? kExitPass : kExitFail;
}

int cmd_sweep(const std::string& family, const std::string& grid, int theorem, std::size_t d, double tol,
              const std::string& out) {
  const auto g = cclab::as_input([&] { return cclab::Grid::parse(grid); });
  const auto rows = cclab::as_input([&] { return cclab::sweep(family, g, theorem, d, tol); });
  const std::string csv = cclab::sweep_csv(rows);
  if (out.empty()) {
    std::cout << csv;
  } else {
    cclab::write_text_file(out, csv);
  }
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.cert.ok; });
  return ok ? kExitPass : kExitFail;
}

int cmd_gen(const std::string& kind, const cclab::SuiteConfig& cfg, const std::string& out) {
  cclab::as_input([&] {
    cfg.validate();
    return 0;
  });
  cclab::Rng rng(cfg.seed);
  cclab::Json j;
  if (kind == "instance") {
    j = cclab::to_json(cclab::gen_random_instance(cfg, rng));
  } else if (kind == "keyrun") {
    j = cclab::to_json(cclab::gen_key_run(cfg, rng, 0.05));
  } else if (kind == "distiller") {
    j = cclab::to_json(cclab::gen_distiller(cfg, rng, false));
  } else if (kind == "two-qudit") {
    j = cclab::two_qudit_to_json(cclab::gen_two_qudit_state(cfg.d, rng), cfg.d);
  } else {
    throw cclab::InputError("gen: kind must be instance, keyrun, distiller or two-qudit");
  }
  emit(j, out);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify complementary control, key and entanglement distillation bounds"};
  app.require_subcommand(1);

  std::string state_path;
  auto* validate = app.add_subcommand("validate", "Check a state file (Hermitian, PSD, unit trace per block)");
  validate->add_option("state", state_path, "State JSON file")->required();

  struct TheoremArgs {
    std::string instance;
    double tol = cclab::kBoundTol;
    std::string out;
  };
  TheoremArgs targs[4];
  CLI::App* thm[4];
  const char* thm_help[4] = {"Key from quantum-channel complementary control (instance file)",
                             "Secondary protocol from a coherent key run (keyrun file)",
                             "Entanglement distiller from a coherent primary (distiller file)",
                             "Classical-channel control from a two-qudit state (two-qudit file)"};
  for (int k = 0; k < 4; ++k) {
    thm[k] = app.add_subcommand("thm" + std::to_string(k + 1), thm_help[k]);
    thm[k]->add_option("--instance", targs[k].instance, "Input JSON file")->required();
    thm[k]->add_option("--tol", targs[k].tol, "Slack tolerance for inequalities")->check(CLI::PositiveNumber);
    thm[k]->add_option("--out", targs[k].out, "Write the certificate here instead of stdout");
  }

  cclab::SuiteConfig cfg;
  std::string theorems = "1,2,3,4";
  std::string suite_out;
  auto* suite = app.add_subcommand("suite", "Run seeded random certification trials");
  suite->add_option("--seed", cfg.seed, "PRNG seed");
  suite->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  suite->add_option("--theorems", theorems, "Comma-separated subset of 1,2,3,4");
  suite->add_option("--d", cfg.d, "Key dimension");
  suite->add_option("--dim-e", cfg.dim_e, "Eve's dimension");
  suite->add_option("--dim-aux", cfg.dim_aux, "Auxiliary dimension");
  suite->add_option("--tol", cfg.tol, "Slack tolerance")->check(CLI::PositiveNumber);
  suite->add_option("--out", suite_out, "Report JSON path");

  std::string family = "depolarize-mes", grid = "0:0.5:6", sweep_out;
  int sweep_theorem = 4;
  std::size_t sweep_d = 2;
  double sweep_tol = cclab::kBoundTol;
  auto* sweep = app.add_subcommand("sweep", "Certify a noise family over a parameter grid, emit CSV");
  sweep->add_option("--family", family, "depolarize-mes, dephase-mes or classical-flip");
  sweep->add_option("--grid", grid, "lo:hi:n");
  sweep->add_option("--theorem", sweep_theorem, "Theorem to certify")->check(CLI::Range(1, 4));
  sweep->add_option("--d", sweep_d, "Key dimension");
  sweep->add_option("--tol", sweep_tol, "Slack tolerance")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "CSV path (stdout if omitted)");

  std::string kind = "instance", gen_out;
  cclab::SuiteConfig gen_cfg;
  auto* gen = app.add_subcommand("gen", "Write a random input file for thm1..thm4");
  gen->add_option("--kind", kind, "instance, keyrun, distiller or two-qudit");
  gen->add_option("--seed", gen_cfg.seed, "PRNG seed");
  gen->add_option("--d", gen_cfg.d, "Key dimension");
  gen->add_option("--dim-e", gen_cfg.dim_e, "Eve's dimension");
  gen->add_option("--dim-aux", gen_cfg.dim_aux, "Auxiliary dimension");
  gen->add_option("--out", gen_out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(state_path);
    for (int k = 0; k < 4; ++k) {
      if (*thm[k]) return cmd_theorem(k + 1, targs[k].instance, targs[k].tol, targs[k].out);
    }
    if (*suite) {
      cfg.theorems = parse_theorems(theorems);
      return cmd_suite(cfg, suite_out);
    }
    if (*sweep) return cmd_sweep(family, grid, sweep_theorem, sweep_d, sweep_tol, sweep_out);
    if (*gen) return cmd_gen(kind, gen_cfg, gen_out);
  } catch (const cclab::InputError& e) {
    std::cerr << "cclab: invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "cclab: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
