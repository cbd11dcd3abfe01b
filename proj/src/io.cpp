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

#include "vlsa/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vlsa/embeddings.hpp"
#include "vlsa/synth.hpp"

namespace vlsa {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::runtime_error(where + ": cannot parse number '" + text + "'");
  }
  return value;
}

json grid_json(const TimeGrid& grid) {
  return json{{"scheme", to_string(grid.scheme())}, {"cuts", grid.cuts()}};
}

TimeGrid grid_from(const json& j) {
  return TimeGrid(j.at("cuts").get<std::vector<double>>(),
                  grid_scheme_from_string(j.at("scheme").get<std::string>()));
}

json train_json(const TrainConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["accumulation_steps"] = c.accumulation_steps;
  j["seed"] = c.seed;
  j["beta"] = c.loss.beta;
  j["emd_norm_order"] = c.loss.emd_norm_order;
  j["use_emd"] = c.loss.use_emd;
  j["head"] = to_string(c.loss.head);
  j["scheme"] = to_string(c.scheme);
  j["num_bins"] = c.num_bins ? json(*c.num_bins) : json(nullptr);
  j["aggregator"] = to_string(c.aggregator.kind);
  j["alpha"] = c.aggregator.alpha;
  j["attention_hidden"] = c.aggregator.attention_hidden;
  j["ordinal_prompts"] = c.ordinal_prompts;
  j["num_bases"] = c.num_bases;
  j["context_length"] = c.context_length;
  j["class_length"] = c.class_length;
  j["token_dim"] = c.token_dim;
  return j;
}

TrainConfig train_from(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.accumulation_steps = j.at("accumulation_steps").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.loss.beta = j.at("beta").get<double>();
  c.loss.emd_norm_order = j.at("emd_norm_order").get<int>();
  c.loss.use_emd = j.at("use_emd").get<bool>();
  c.loss.head = head_kind_from_string(j.at("head").get<std::string>());
  c.scheme = grid_scheme_from_string(j.at("scheme").get<std::string>());
  if (!j.at("num_bins").is_null()) c.num_bins = j.at("num_bins").get<int>();
  c.aggregator.kind = aggregator_kind_from_string(j.at("aggregator").get<std::string>());
  c.aggregator.alpha = j.at("alpha").get<double>();
  c.aggregator.attention_hidden = j.at("attention_hidden").get<int>();
  c.ordinal_prompts = j.at("ordinal_prompts").get<bool>();
  c.num_bases = j.at("num_bases").get<int>();
  c.context_length = j.at("context_length").get<int>();
  c.class_length = j.at("class_length").get<int>();
  c.token_dim = j.at("token_dim").get<int>();
  return c;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF),
                                 static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

std::uint32_t read_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw std::runtime_error("truncated checkpoint header");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

constexpr char kCheckpointMagic[4] = {'V', 'L', 'S', 'C'};
constexpr int kCheckpointFormat = 1;

}  // namespace

std::vector<SurvivalRecord> read_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty manifest");
  const auto header = split_csv(trim(line));
  const std::vector<std::string> expected = {"patient_id", "bag_path", "time_months", "event"};
  if (header != expected) {
    throw std::runtime_error(path.string() +
                             ": manifest header must be patient_id,bag_path,time_months,event");
  }
  const auto base = path.parent_path();
  std::vector<SurvivalRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != 4) throw std::runtime_error(where + ": expected 4 fields");
    SurvivalRecord r;
    r.patient_id = f[0];
    std::filesystem::path bag(f[1]);
    r.bag_path = (bag.is_relative() ? base / bag : bag).string();
    r.time = parse_double(f[2], where);
    if (!(r.time >= 0.0) || !std::isfinite(r.time)) {
      throw std::runtime_error(where + ": time must be finite and >= 0");
    }
    if (f[3] != "0" && f[3] != "1") throw std::runtime_error(where + ": event must be 0 or 1");
    r.event = f[3] == "1" ? 1 : 0;
    records.push_back(std::move(r));
  }
  if (records.empty()) throw std::runtime_error(path.string() + ": manifest has no records");
  return records;
}

void write_manifest(const std::filesystem::path& path, const std::vector<SurvivalRecord>& records) {
  auto out = open_out(path);
  out << "patient_id,bag_path,time_months,event\n";
  for (const auto& r : records) {
    out << r.patient_id << ',' << r.bag_path << ',' << r.time << ',' << r.event << '\n';
  }
}

std::vector<Eigen::MatrixXd> load_bags(const std::vector<SurvivalRecord>& records) {
  std::vector<Eigen::MatrixXd> bags;
  bags.reserve(records.size());
  for (const auto& r : records) bags.push_back(load_embeddings(r.bag_path));
  return bags;
}

std::string grid_to_json(const TimeGrid& grid) { return grid_json(grid).dump(); }

TimeGrid grid_from_json(const std::string& text) { return grid_from(json::parse(text)); }

PhraseConfig read_phrase_config(const std::filesystem::path& path) {
  const json j = json::parse(read_text(path));
  PhraseConfig c;
  c.context = j.value("context", "");
  c.bases = j.value("bases", std::vector<std::string>{});
  c.priors = j.at("priors").get<std::vector<std::string>>();
  return c;
}

void write_phrase_config(const std::filesystem::path& path, const PhraseConfig& config) {
  const json j{{"context", config.context}, {"bases", config.bases}, {"priors", config.priors}};
  write_text(path, j.dump(2) + "\n");
}

void write_latent_risks(const std::filesystem::path& path, const SynthCohort& cohort) {
  json latent = json::array();
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    latent.push_back({{"patient_id", cohort.records[i].patient_id},
                      {"risk", cohort.latent_risks[i]}});
  }
  const auto& c = cohort.config;
  json j;
  j["config"] = {{"n_patients", c.n_patients}, {"k_min", c.k_min}, {"k_max", c.k_max},
                 {"dim", c.dim}, {"n_prototypes", c.n_prototypes},
                 {"signal_strength", c.signal_strength}, {"censoring_rate", c.censoring_rate},
                 {"baseline_scale", c.baseline_scale}, {"seed", c.seed},
                 {"signal_fraction", c.signal_fraction}, {"noise_scale", c.noise_scale},
                 {"amplitude", c.amplitude}, {"distractor_scale", c.distractor_scale}};
  j["censoring_bound"] = std::isinf(cohort.censoring_bound) ? json(nullptr)
                                                            : json(cohort.censoring_bound);
  j["oracle_ci"] = oracle_ci(cohort);
  j["latent"] = latent;
  write_text(path, j.dump(2) + "\n");
}

std::map<std::string, double> read_latent_risks(const std::filesystem::path& path) {
  const json j = json::parse(read_text(path));
  std::map<std::string, double> out;
  for (const auto& e : j.at("latent")) {
    out[e.at("patient_id").get<std::string>()] = e.at("risk").get<double>();
  }
  return out;
}

FoldSpec parse_fold(const std::string& text, std::uint64_t seed) {
  const auto slash = text.find('/');
  FoldSpec f;
  f.seed = seed;
  try {
    if (slash == std::string::npos) throw std::invalid_argument("");
    std::size_t a = 0, b = 0;
    f.index = std::stoi(text.substr(0, slash), &a);
    f.count = std::stoi(text.substr(slash + 1), &b);
    if (a != slash || b != text.size() - slash - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("fold must look like 'i/k', got '" + text + "'");
  }
  if (f.count < 1 || f.index < 0 || f.index >= f.count) {
    throw std::invalid_argument("fold index must satisfy 0 <= i < k, got '" + text + "'");
  }
  return f;
}

std::string train_config_to_json(const TrainConfig& config) { return train_json(config).dump(); }

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  Model model = checkpoint.model;
  const auto& mc = model.config();
  json header;
  header["format"] = kCheckpointFormat;
  header["train"] = train_json(checkpoint.train);
  header["grid"] = grid_json(checkpoint.grid);
  header["fold"] = {{"index", checkpoint.fold.index},
                    {"count", checkpoint.fold.count},
                    {"seed", checkpoint.fold.seed}};
  header["model"] = {{"num_classes", mc.num_classes}, {"seed", mc.seed},
                     {"num_priors", model.num_priors()}, {"dim", model.dim()}};
  header["prior_texts"] = model.prior_texts();
  json tensors = json::array();
  tensors.push_back({{"name", "prior_base"},
                     {"rows", model.prior_base().rows()},
                     {"cols", model.prior_base().cols()}});
  auto views = model.params().tensors();
  for (const auto& t : views) {
    tensors.push_back({{"name", t.name}, {"rows", t.values.rows()}, {"cols", t.values.cols()}});
  }
  header["tensors"] = tensors;

  const std::string text = header.dump();
  auto out = open_out(path, true);
  out.write(kCheckpointMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_vlsb(out, model.prior_base(), VlsbPrecision::kFloat64);
  for (const auto& t : views) write_vlsb(out, t.values, VlsbPrecision::kFloat64);
  if (!out) throw std::runtime_error("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw std::runtime_error(path.string() + ": not a checkpoint (bad magic)");
  }
  const std::uint32_t length = read_u32(in);
  std::string text(length, '\0');
  in.read(text.data(), length);
  if (!in) throw std::runtime_error(path.string() + ": truncated checkpoint header");
  const json header = json::parse(text);
  if (header.at("format").get<int>() != kCheckpointFormat) {
    throw std::runtime_error(path.string() + ": unsupported checkpoint format");
  }

  Checkpoint ck;
  ck.train = train_from(header.at("train"));
  ck.grid = grid_from(header.at("grid"));
  const auto& fold = header.at("fold");
  ck.fold = {fold.at("index").get<int>(), fold.at("count").get<int>(),
             fold.at("seed").get<std::uint64_t>()};

  const auto& tensors = header.at("tensors");
  if (tensors.empty() || tensors[0].at("name") != "prior_base") {
    throw std::runtime_error(path.string() + ": checkpoint lacks the prior base");
  }
  const std::string source = path.string();
  Eigen::MatrixXd prior_base = read_vlsb(in, source);
  ModelConfig mc = model_config(ck.train, header.at("model").at("num_classes").get<int>());
  mc.seed = header.at("model").at("seed").get<std::uint64_t>();
  ck.model = Model(mc, prior_base, header.at("prior_texts").get<std::vector<std::string>>());

  auto views = ck.model.params().tensors();
  if (views.size() + 1 != tensors.size()) {
    throw std::runtime_error(source + ": checkpoint tensor count does not match its config");
  }
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& entry = tensors[i + 1];
    const Eigen::MatrixXd values = read_vlsb(in, source);
    if (entry.at("name").get<std::string>() != views[i].name ||
        values.rows() != views[i].values.rows() || values.cols() != views[i].values.cols()) {
      throw std::runtime_error(source + ": tensor '" + views[i].name + "' shape/name mismatch");
    }
    views[i].values = values;
  }
  if (ck.model.prior_base() != prior_base) {
    throw std::runtime_error(source + ": prior base does not match the model configuration");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error(source + ": trailing bytes after checkpoint tensors");
  }
  return ck;
}

void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  auto out = open_out(path);
  out << "epoch,mean_loss,val_ci\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << e.mean_loss << ',';
    if (e.val_ci) out << *e.val_ci;
    out << '\n';
  }
}

void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows) {
  auto out = open_out(path);
  const Eigen::Index c = rows.empty() ? 0 : rows.front().y_hat.size();
  out << "patient_id";
  for (Eigen::Index i = 1; i <= c; ++i) out << ",y_hat_" << i;
  out << ",risk,expected_time\n";
  for (const auto& r : rows) {
    out << r.patient_id;
    for (Eigen::Index i = 0; i < r.y_hat.size(); ++i) out << ',' << r.y_hat(i);
    out << ',' << r.risk << ',' << r.expected_time << '\n';
  }
}

void write_km_curve(const std::filesystem::path& path, const KMCurve& curve) {
  auto out = open_out(path);
  out << "time,survival,at_risk,deaths\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out << curve.times[i] << ',' << curve.survival[i] << ',' << curve.at_risk[i] << ','
        << curve.deaths[i] << '\n';
  }
}

std::string report_to_json(const EvaluationReport& r) {
  json j;
  j["ci"] = r.ci;
  j["mae"] = r.mae;
  j["dcal"] = {{"statistic", r.dcal_statistic}, {"pvalue", r.dcal_pvalue}};
  if (r.has_logrank) {
    j["logrank"] = {{"statistic", r.logrank.statistic}, {"pvalue", r.logrank.p_value},
                    {"observed", r.logrank.observed},   {"expected", r.logrank.expected},
                    {"variance", r.logrank.variance}};
  } else {
    j["logrank"] = nullptr;
  }
  j["n_pairs_comparable"] = r.n_pairs_comparable;
  j["n_patients"] = r.n_patients;
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  EvaluationReport r;
  r.ci = j.at("ci").get<double>();
  r.mae = j.at("mae").get<double>();
  r.dcal_statistic = j.at("dcal").at("statistic").get<double>();
  r.dcal_pvalue = j.at("dcal").at("pvalue").get<double>();
  const auto& lr = j.at("logrank");
  r.has_logrank = !lr.is_null();
  if (r.has_logrank) {
    r.logrank.statistic = lr.at("statistic").get<double>();
    r.logrank.p_value = lr.at("pvalue").get<double>();
    r.logrank.observed = lr.at("observed").get<double>();
    r.logrank.expected = lr.at("expected").get<double>();
    r.logrank.variance = lr.at("variance").get<double>();
  }
  r.n_pairs_comparable = j.at("n_pairs_comparable").get<long>();
  r.n_patients = j.at("n_patients").get<int>();
  return r;
}

void write_shapley(const std::filesystem::path& path, const ShapleyReport& report) {
  auto out = open_out(path);
  out << "prior_index,prior_text,phi,baseline_risk,full_risk\n";
  for (Eigen::Index m = 0; m < report.contributions.size(); ++m) {
    const auto i = static_cast<std::size_t>(m);
    std::string text = i < report.prior_texts.size() ? report.prior_texts[i] : "";
    for (char& ch : text) {
      if (ch == ',' || ch == '\n') ch = ' ';
    }
    out << m << ',' << text << ',' << report.contributions(m) << ',' << report.baseline_risk << ','
        << report.full_risk << '\n';
  }
}

void write_evidence(const std::filesystem::path& path, const std::vector<EvidenceRow>& rows) {
  auto out = open_out(path);
  out << "prior_index,instance_index,weight\n";
  for (const auto& r : rows) out << r.prior_index << ',' << r.instance_index << ',' << r.weight << '\n';
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace vlsa
