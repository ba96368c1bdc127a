// Copyright 2026 The qpdist developers
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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>

#include "qpdist/channel_io.hpp"
#include "qpdist/verify.hpp"

using nlohmann::json;
using namespace qpdist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNonConverged = 3;
constexpr int kExitNotUnitary = 4;
constexpr int kExitVerifyFailed = 5;

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed) {
  if (seed_given) return seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void emit(const json& j, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(output_path);
    if (!out) throw Error("cannot write output file '" + output_path + "'");
    out << j.dump(2) << "\n";
  }
}

void print_compare_table(const MeasureReport& r) {
  std::printf("dim: %d   seed: %llu\n", r.dim,
              static_cast<unsigned long long>(r.seed));
  std::printf("  %-16s %.10f\n", "d_pro", r.d_pro);
  std::printf("  %-16s %.10f\n", "f_pro", r.f_pro);
  if (r.f_ave)
    std::printf("  %-16s %.10f\n", "f_ave", *r.f_ave);
  else
    std::printf("  %-16s %s\n", "f_ave", "n/a (reference not unitary)");
  std::printf("  %-16s %.10f (stderr %.2e, n=%lld)\n", "d_ave_mc",
              r.d_ave_mc.estimate, r.d_ave_mc.std_error, r.d_ave_mc.samples);
  std::printf("  %-16s %.10f (stderr %.2e, n=%lld)\n", "f_ave_mc",
              r.f_ave_mc.estimate, r.f_ave_mc.std_error, r.f_ave_mc.samples);
  auto opt_row = [](const char* name, double v,
                    const OptimizerDiagnostics& d) {
    std::printf("  %-16s %.10f (iters %d, gap %.2e, %s)\n", name, v,
                d.iterations, d.final_gap,
                d.converged ? "converged" : "NOT CONVERGED");
  };
  opt_row("d_max", r.d_max, r.d_max_diag);
  opt_row("f_min", r.f_min, r.f_min_diag);
  opt_row("d_stab", r.d_stab, r.d_stab_diag);
  opt_row("f_stab", r.f_stab, r.f_stab_diag);
  std::printf("  %-16s %.10f\n", "c_stab", r.c_stab);
  std::printf("  %-16s %.10f\n", "process_purity", r.process_purity);
  std::printf("consistency: fvg=%s dmax<=dstab=%s fmin>=fstab=%s\n",
              r.fvg_process_holds ? "ok" : "VIOLATED",
              r.dmax_le_dstab ? "ok" : "VIOLATED",
              r.fmin_ge_fstab ? "ok" : "VIOLATED");
}

int cmd_compare(const std::string& ideal_path, const std::string& real_path,
                ReportConfig config, bool allow_nonconverged,
                const std::string& output, const std::string& format) {
  Channel ideal = load_channel(ideal_path);
  Channel real = load_channel(real_path);
  if (ideal.dim() != real.dim())
    throw DimensionMismatch("compare: channel dimensions differ");
  MeasureReport report = full_report(real, ideal, config);
  if (format == "table") {
    print_compare_table(report);
    if (!output.empty()) emit(report_to_json(report), output);
  } else {
    emit(report_to_json(report), output);
  }
  if (!report.all_converged && !allow_nonconverged) {
    std::cerr << "error: optimizer did not converge "
                 "(rerun with --allow-nonconverged to accept)\n";
    return kExitNonConverged;
  }
  return kExitOk;
}

int cmd_estimate(const std::string& ideal_path, const std::string& real_path,
                 long long shots, std::uint64_t seed, bool oracle,
                 const std::string& output, bool export_plan) {
  std::ifstream in(ideal_path);
  if (!in) throw ParseError("cannot open channel file '" + ideal_path + "'");
  json jideal;
  try {
    in >> jideal;
  } catch (const json::exception& ex) {
    throw ParseError("invalid JSON in '" + ideal_path + "': " + ex.what());
  }
  if (!jideal.contains("form") || jideal["form"] != "unitary")
    throw NonUnitaryTarget("estimate: ideal channel file must have form "
                           "'unitary'");
  Channel ideal = channel_from_json(jideal);
  Channel real = load_channel(real_path);
  if (ideal.dim() != real.dim())
    throw DimensionMismatch("estimate: channel dimensions differ");
  auto u = ideal.as_unitary();
  if (!u) throw NonUnitaryTarget("estimate: target is not unitary");

  int n = 0;
  while ((1 << n) < ideal.dim()) ++n;
  if ((1 << n) != ideal.dim())
    throw NoUnitaryBasis("estimate: dimension must be a power of two");
  EstimationPlan plan = build_plan_pauli_minimal(*u, n);
  ShotModel shot_model{shots, seed};
  EstimateResult est = run_plan(plan, real, shot_model);

  json j;
  j["scheme"] = "pauli-minimal";
  j["settings_count"] = plan.settings_count();
  j["shots_per_setting"] = shots;
  j["seed"] = seed;
  j["estimate"] = est.estimate;
  j["stderr"] = est.std_error;
  if (oracle) {
    j["oracle_f_pro"] = j_fidelity(real, ideal);
    j["oracle_abs_error"] = std::abs(est.estimate - j["oracle_f_pro"].get<double>());
  }
  if (export_plan) j["plan"] = plan_to_json(plan);
  emit(j, output);
  return kExitOk;
}

int cmd_verify(int sweep, std::vector<int> dims, bool seed_given,
               std::uint64_t seed, const std::string& dump_dir,
               const std::string& replay_path, const std::string& output) {
  if (!replay_path.empty()) {
    verify::ReplayResult rep = verify::replay_dump(replay_path);
    json j;
    j["family"] = rep.family;
    j["dim"] = rep.dim;
    j["pass"] = rep.outcome.pass;
    j["message"] = rep.outcome.message;
    j["matches_dump"] = rep.matches_dump;
    emit(j, output);
    return rep.matches_dump ? kExitOk : kExitVerifyFailed;
  }

  verify::SuiteOptions options;
  options.sweep = sweep;
  if (!dims.empty()) options.dims = dims;
  options.seed = resolve_seed(seed_given, seed);
  options.dump_dir = dump_dir;

  bool all_pass = true;
  json families = json::array();
  for (const std::string& name : verify::family_names()) {
    verify::FamilyResult res = verify::run_family(name, options);
    all_pass = all_pass && res.passed();
    std::printf("[%s] %-28s %3d instances, %d failures (%.2fs)\n",
                res.passed() ? "PASS" : "FAIL", res.family.c_str(),
                res.instances, res.failures, res.seconds);
    for (const std::string& msg : res.messages)
      std::printf("       %s\n", msg.c_str());
    for (const std::string& path : res.dump_paths)
      std::printf("       counterexample: %s\n", path.c_str());
    json jf;
    jf["family"] = res.family;
    jf["instances"] = res.instances;
    jf["failures"] = res.failures;
    jf["worst_violation"] = res.worst_violation;
    jf["seconds"] = res.seconds;
    jf["messages"] = res.messages;
    jf["dumps"] = res.dump_paths;
    families.push_back(jf);
  }
  std::printf("%s (seed %llu)\n", all_pass ? "ALL SUITES PASS" : "FAILURES",
              static_cast<unsigned long long>(options.seed));
  if (!output.empty()) {
    json j;
    j["seed"] = options.seed;
    j["families"] = families;
    j["all_pass"] = all_pass;
    emit(j, output);
  }
  return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_tomography(const std::string& real_path, long long shots,
                   std::uint64_t seed, const std::string& output_channel,
                   const std::string& output) {
  Channel real = load_channel(real_path);
  ShotModel shot_model{shots, seed};
  Channel reconstructed = simulate_tomography(real, shot_model);
  const double dist = j_distance(reconstructed, real);
  if (!output_channel.empty())
    save_channel(reconstructed, "choi", output_channel);
  json j;
  j["shots_per_setting"] = shots;
  j["seed"] = seed;
  j["d_pro_to_truth"] = dist;
  if (!output_channel.empty()) j["reconstructed_path"] = output_channel;
  else j["reconstructed"] = channel_to_json(reconstructed, "choi");
  emit(j, output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"process distance measures for quantum channels"};
  app.require_subcommand(1);

  // compare
  std::string ideal_path, real_path, output, format = "json";
  std::uint64_t seed = 0;
  bool allow_nonconverged = false;
  int restarts = 8, max_iter = 500;
  double gap_tol = 1e-7;
  long long mc_samples = 10000;
  auto* compare = app.add_subcommand("compare",
                                     "full measure report for a channel pair");
  compare->add_option("ideal", ideal_path, "ideal channel JSON")->required();
  compare->add_option("real", real_path, "real channel JSON")->required();
  auto* compare_seed = compare->add_option("--seed", seed, "PRNG seed");
  compare->add_option("--restarts", restarts, "optimizer restarts");
  compare->add_option("--max-iter", max_iter, "optimizer iteration cap");
  compare->add_option("--gap-tol", gap_tol, "optimizer duality-gap tolerance");
  compare->add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
  compare->add_option("--output", output, "write JSON to this file");
  compare->add_option("--format", format, "json | table");
  compare->add_flag("--allow-nonconverged", allow_nonconverged,
                    "exit 0 even if an optimizer did not converge");

  // estimate
  long long shots = 0;
  bool oracle = false, export_plan = false;
  auto* estimate = app.add_subcommand(
      "estimate", "direct J-fidelity estimation against a unitary target");
  estimate->add_option("ideal", ideal_path, "ideal unitary JSON")->required();
  estimate->add_option("real", real_path, "real channel JSON")->required();
  estimate->add_option("--shots", shots, "shots per setting (0 = exact)");
  auto* estimate_seed = estimate->add_option("--seed", seed, "PRNG seed");
  estimate->add_flag("--oracle", oracle, "include the exact value");
  estimate->add_flag("--export-plan", export_plan,
                     "include the full settings list");
  estimate->add_option("--output", output, "write JSON to this file");

  // verify
  int sweep = 5;
  std::vector<int> dims;
  std::string dump_dir = "counterexamples", replay_path;
  auto* verify_cmd =
      app.add_subcommand("verify", "run the randomized property suites");
  verify_cmd->add_option("--sweep", sweep, "instances per family per dim");
  verify_cmd->add_option("--dim", dims, "dimensions to sweep (repeatable)");
  auto* verify_seed = verify_cmd->add_option("--seed", seed, "PRNG seed");
  verify_cmd->add_option("--dump-dir", dump_dir,
                         "directory for counterexample dumps");
  verify_cmd->add_option("--replay", replay_path,
                         "re-run a dumped counterexample");
  verify_cmd->add_option("--output", output, "write JSON summary here");

  // tomography
  std::string output_channel;
  auto* tomo = app.add_subcommand(
      "tomography", "simulated process tomography reconstruction");
  tomo->add_option("real", real_path, "true channel JSON")->required();
  tomo->add_option("--shots", shots, "shots per setting (0 = exact)");
  auto* tomo_seed = tomo->add_option("--seed", seed, "PRNG seed");
  tomo->add_option("--output", output_channel,
                   "write the reconstructed channel here");
  tomo->add_option("--report", output, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compare->parsed()) {
      ReportConfig config;
      config.seed = resolve_seed(!compare_seed->empty(), seed);
      config.optimizer.restarts = restarts;
      config.optimizer.max_iterations = max_iter;
      config.optimizer.gap_tolerance = gap_tol;
      config.mc.samples = mc_samples;
      return cmd_compare(ideal_path, real_path, config, allow_nonconverged,
                         output, format);
    }
    if (estimate->parsed()) {
      return cmd_estimate(ideal_path, real_path, shots,
                          resolve_seed(!estimate_seed->empty(), seed), oracle,
                          output, export_plan);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(sweep, dims, !verify_seed->empty(), seed, dump_dir,
                        replay_path, output);
    }
    if (tomo->parsed()) {
      return cmd_tomography(real_path, shots,
                            resolve_seed(!tomo_seed->empty(), seed),
                            output_channel, output);
    }
  } catch (const NonUnitaryTarget& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitNotUnitary;
  } catch (const ParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
