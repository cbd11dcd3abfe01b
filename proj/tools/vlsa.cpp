/*
 * Copyright 2026 The VLSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// vlsa: command-line front end (synth, train, eval, interpret, km, gradcheck).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlsa/experiment.hpp"
#include "vlsa/gradcheck.hpp"
#include "vlsa/interpretation.hpp"
#include "vlsa/io.hpp"
#include "vlsa/synth.hpp"

namespace fs = std::filesystem;
using namespace vlsa;
using nlohmann::json;

namespace {

constexpr int kUsageError = 2;

// Splices "--key value" pairs from a JSON object in front of the user's own
// arguments, so explicit flags win (options keep their last value).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::optional<std::string> config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (!config_path || args.size() < 2) return args;

  std::ifstream in(*config_path);
  if (!in) throw CLI::ValidationError("--config", "cannot open '" + *config_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");

  std::vector<std::string> injected;
  auto scalar = [](const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        injected.push_back(flag);
        injected.push_back(scalar(v));
      }
    } else {
      injected.push_back(flag);
      injected.push_back(scalar(value));
    }
  }
  std::vector<std::string> out = {args[0], args[1]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

std::string default_out() {
  const char* env = std::getenv("VLSA_OUTPUT_DIR");
  return env != nullptr ? env : "";
}

void require_out(const std::string& out) {
  if (out.empty()) throw CLI::RequiredError("--out (or VLSA_OUTPUT_DIR)");
}

fs::path sibling(const std::string& manifest, const char* name) {
  return fs::path(manifest).parent_path() / name;
}

struct TrainArgs {
  std::string manifest, priors, phrases, out, fold = "0/5";
  std::optional<std::uint64_t> split_seed;
  std::vector<std::string> ablations;
  std::optional<int> bins;
  std::string scheme = "uniform";
  TrainConfig config;
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--manifest", a.manifest, "manifest CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--priors", a.priors, "prior embeddings (VLSB); default: priors.vlsb beside the manifest");
  cmd->add_option("--phrases", a.phrases, "phrase config JSON; default: priors.json beside the manifest");
  cmd->add_option("--fold", a.fold, "test fold as i/k")->capture_default_str();
  cmd->add_option("--split-seed", a.split_seed, "fold shuffle seed (default: --seed)");
  cmd->add_option("--seed", a.config.seed, "seed")->capture_default_str();
  cmd->add_option("--epochs", a.config.epochs)->capture_default_str();
  cmd->add_option("--lr", a.config.learning_rate)->capture_default_str();
  cmd->add_option("--wd", a.config.weight_decay)->capture_default_str();
  cmd->add_option("--accumulation", a.config.accumulation_steps)->capture_default_str();
  cmd->add_option("--beta", a.config.loss.beta, "EMD weight")->capture_default_str();
  cmd->add_option("--alpha", a.config.aggregator.alpha, "pooling temperature")->capture_default_str();
  cmd->add_option("--bins", a.bins, "number of time bins (default floor(sqrt(N_e)))");
  cmd->add_option("--scheme", a.scheme, "uniform or quantile")
      ->check(CLI::IsMember({"uniform", "quantile"}))
      ->capture_default_str();
  cmd->add_option("--num-bases", a.config.num_bases)->capture_default_str();
  cmd->add_option("--token-dim", a.config.token_dim)->capture_default_str();
  cmd->add_option("--ablation", a.ablations,
                  "no-ordinal-prompts | no-emd | attention | prototypes | hazard-head | "
                  "quantile-bins | bins=N")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmd->add_option("--out", a.out, "output directory")->default_str(default_out());
}

int run_synth(const SynthConfig& config, std::string out) {
  if (out.empty()) out = default_out();
  require_out(out);
  const SynthCohort cohort = generate(config);
  write_cohort(cohort, out);
  int events = 0;
  for (const auto& r : cohort.records) events += r.event;
  std::cout << std::setprecision(4) << "synth: " << cohort.records.size() << " patients, "
            << events << " events, censored "
            << 1.0 - static_cast<double>(events) / cohort.records.size() << ", oracle CI "
            << oracle_ci(cohort) << " -> " << out << "\n";
  return 0;
}

int run_train(TrainArgs a) {
  if (a.out.empty()) a.out = default_out();
  require_out(a.out);
  TrainConfig& config = a.config;
  config.scheme = grid_scheme_from_string(a.scheme);
  if (a.bins) config.num_bins = a.bins;
  for (const auto& ablation : a.ablations) apply_ablation(config, ablation);
  config.validate();

  const FoldSpec fold = parse_fold(a.fold, a.split_seed.value_or(config.seed));
  const Dataset data = load_dataset(a.manifest);
  const fs::path priors_path = a.priors.empty() ? sibling(a.manifest, "priors.vlsb") : fs::path(a.priors);
  const Eigen::MatrixXd priors = load_embeddings(priors_path);
  std::vector<std::string> texts;
  const fs::path phrases = a.phrases.empty() ? sibling(a.manifest, "priors.json") : fs::path(a.phrases);
  if (fs::exists(phrases)) texts = read_phrase_config(phrases).priors;

  const FoldResult result = train_fold(data, priors, texts, config, fold);
  const fs::path out(a.out);
  save_checkpoint(out / "checkpoint.vlsc", result.checkpoint);
  write_training_log(out / "train_log.csv", result.log);
  write_text(out / "train_config.json", train_config_to_json(config) + "\n");

  std::cout << "train: fold " << fold.index << "/" << fold.count << ", C="
            << result.checkpoint.grid.num_classes() << ", beta=" << config.loss.effective_beta()
            << ", aggregator=" << to_string(config.aggregator.kind)
            << ", final loss=" << result.log.back().mean_loss << " -> " << out.string() << "\n";
  return 0;
}

int run_eval(const std::string& checkpoint_path, const std::string& manifest,
             const std::string& split, std::string out, const std::vector<std::string>& reports) {
  if (out.empty()) out = default_out();
  require_out(out);
  EvaluationReport report;
  if (!reports.empty()) {
    std::vector<EvaluationReport> parsed;
    for (const auto& r : reports) parsed.push_back(report_from_json(read_text(r)));
    report = aggregate_reports(parsed);
  } else {
    if (checkpoint_path.empty() || manifest.empty()) {
      throw CLI::RequiredError("--checkpoint and --manifest (or --aggregate)");
    }
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    const Dataset data = load_dataset(manifest);
    const FoldSplit parts = kfold_split(data.size(), ck.fold);
    const Dataset subset = split == "test" ? data.subset(parts.test)
                           : split == "train" ? data.subset(parts.train)
                                              : data;
    const Evaluation ev = evaluate(ck.model, ck.grid, subset);
    report = ev.report;
    write_predictions(fs::path(out) / "predictions.csv", ev.predictions);
    if (report.has_logrank) {
      write_km_curve(fs::path(out) / "km_low_risk.csv", ev.grouping.low_risk);
      write_km_curve(fs::path(out) / "km_high_risk.csv", ev.grouping.high_risk);
    }
  }
  write_text(fs::path(out) / "report.json", report_to_json(report));
  std::cout << std::setprecision(4) << "eval: CI " << report.ci << ", MAE " << report.mae
            << ", D-cal p " << report.dcal_pvalue << " (" << report.n_patients << " patients)\n";
  return 0;
}

int run_interpret(const std::string& checkpoint_path, const std::string& manifest,
                  const std::string& patient, int top_k, std::string out) {
  if (out.empty()) out = default_out();
  require_out(out);
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const auto records = read_manifest(manifest);
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const SurvivalRecord& r) { return r.patient_id == patient; });
  if (it == records.end()) throw std::invalid_argument("patient '" + patient + "' not in manifest");
  const Eigen::MatrixXd bag = load_embeddings(it->bag_path);
  const ShapleyReport report = explain(ck.model, bag);
  write_shapley(fs::path(out) / "shapley.csv", report);
  write_evidence(fs::path(out) / "evidence.csv", prior_evidence(ck.model, bag, top_k));
  std::cout << std::setprecision(6) << "interpret: " << patient << ", risk " << report.full_risk
            << " (baseline " << report.baseline_risk << ", sum phi "
            << report.contributions.sum() << ")\n";
  return 0;
}

int run_km(const std::string& manifest, std::string out) {
  if (out.empty()) out = default_out();
  require_out(out);
  const auto records = read_manifest(manifest);
  write_km_curve(fs::path(out) / "km.csv", kaplan_meier(records));
  std::cout << "km: " << records.size() << " records -> " << out << "\n";
  return 0;
}

int run_gradcheck(const GradCheckOptions& options) {
  const auto rows = gradcheck(options);
  bool all = true;
  std::cout << std::left << std::setw(16) << "group" << std::setw(9) << "entries" << std::setw(14)
            << "rel_error" << "status\n";
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(16) << r.group << std::setw(9) << r.entries
              << std::setw(14) << std::setprecision(3) << std::scientific << r.relative_error
              << std::defaultfloat << (r.pass ? "PASS" : "FAIL") << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VLSA discrete-time survival toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_file;
  auto config_opt = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON file of flag values; explicit flags win");
  };

  SynthConfig synth;
  std::string synth_out;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic cohort");
  config_opt(cmd_synth);
  cmd_synth->add_option("--n", synth.n_patients)->capture_default_str();
  cmd_synth->add_option("--seed", synth.seed)->capture_default_str();
  cmd_synth->add_option("--k-min", synth.k_min)->capture_default_str();
  cmd_synth->add_option("--k-max", synth.k_max)->capture_default_str();
  cmd_synth->add_option("--dim", synth.dim)->capture_default_str();
  cmd_synth->add_option("--prototypes", synth.n_prototypes)->capture_default_str();
  cmd_synth->add_option("--signal", synth.signal_strength)->capture_default_str();
  cmd_synth->add_option("--censoring", synth.censoring_rate)->capture_default_str();
  cmd_synth->add_option("--baseline", synth.baseline_scale, "months")->capture_default_str();
  cmd_synth->add_option("--signal-fraction", synth.signal_fraction)->capture_default_str();
  cmd_synth->add_option("--noise", synth.noise_scale)->capture_default_str();
  cmd_synth->add_option("--amplitude", synth.amplitude)->capture_default_str();
  cmd_synth->add_option("--distractor", synth.distractor_scale)->capture_default_str();
  cmd_synth->add_option("--out", synth_out, "output directory")->default_str(default_out());

  TrainArgs train_args;
  auto* cmd_train = app.add_subcommand("train", "train one fold and write a checkpoint");
  config_opt(cmd_train);
  add_train_options(cmd_train, train_args);

  std::string eval_ck, eval_manifest, eval_split = "test", eval_out;
  std::vector<std::string> eval_reports;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint or aggregate fold reports");
  config_opt(cmd_eval);
  cmd_eval->add_option("--checkpoint", eval_ck)->check(CLI::ExistingFile);
  cmd_eval->add_option("--manifest", eval_manifest)->check(CLI::ExistingFile);
  cmd_eval->add_option("--split", eval_split, "test, train or all")
      ->check(CLI::IsMember({"test", "train", "all"}))
      ->capture_default_str();
  cmd_eval->add_option("--aggregate", eval_reports, "fold report.json files to average")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->check(CLI::ExistingFile);
  cmd_eval->add_option("--out", eval_out)->default_str(default_out());

  std::string int_ck, int_manifest, int_patient, int_out;
  int int_top_k = 5;
  auto* cmd_interpret = app.add_subcommand("interpret", "Shapley attribution for one patient");
  config_opt(cmd_interpret);
  cmd_interpret->add_option("--checkpoint", int_ck)->required()->check(CLI::ExistingFile);
  cmd_interpret->add_option("--manifest", int_manifest)->required()->check(CLI::ExistingFile);
  cmd_interpret->add_option("--patient", int_patient)->required();
  cmd_interpret->add_option("--top-k", int_top_k)->capture_default_str();
  cmd_interpret->add_option("--out", int_out)->default_str(default_out());

  std::string km_manifest, km_out;
  auto* cmd_km = app.add_subcommand("km", "Kaplan-Meier curve of a manifest");
  config_opt(cmd_km);
  cmd_km->add_option("--manifest", km_manifest)->required()->check(CLI::ExistingFile);
  cmd_km->add_option("--out", km_out)->default_str(default_out());

  GradCheckOptions gc;
  std::string gc_head = "incidence", gc_aggregator = "prior_guided";
  bool gc_no_ordinal = false;
  auto* cmd_gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  config_opt(cmd_gradcheck);
  cmd_gradcheck->add_option("--seed", gc.seed)->capture_default_str();
  cmd_gradcheck->add_option("--head", gc_head)
      ->check(CLI::IsMember({"incidence", "hazard"}))
      ->capture_default_str();
  cmd_gradcheck->add_option("--aggregator", gc_aggregator)
      ->check(CLI::IsMember({"prior_guided", "attention", "prototypes"}))
      ->capture_default_str();
  cmd_gradcheck->add_flag("--no-ordinal-prompts", gc_no_ordinal);
  cmd_gradcheck->add_flag("--break-head", gc.break_head, "perturb the analytic head gradient");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*cmd_synth) return run_synth(synth, synth_out);
    if (*cmd_train) return run_train(train_args);
    if (*cmd_eval) return run_eval(eval_ck, eval_manifest, eval_split, eval_out, eval_reports);
    if (*cmd_interpret) return run_interpret(int_ck, int_manifest, int_patient, int_top_k, int_out);
    if (*cmd_km) return run_km(km_manifest, km_out);
    if (*cmd_gradcheck) {
      gc.head = head_kind_from_string(gc_head);
      gc.aggregator = aggregator_kind_from_string(gc_aggregator);
      gc.ordinal_prompts = !gc_no_ordinal;
      return run_gradcheck(gc);
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "vlsa: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
