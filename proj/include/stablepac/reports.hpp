//
// Copyright 2026 The stablepac Authors
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
//

// Machine-readable experiment reports. Summaries serialize to JSON (schema
// versioned, key order fixed) and to a flat key,value CSV export; per-run
// tables are plain CSV with documented columns. JSON emission/parsing
// round-trips exactly.

#pragma once

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "stablepac/class_file.hpp"
#include "stablepac/stats.hpp"

namespace stablepac {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Stability experiment

struct StabilityRunRow {
  int64_t run_id = 0;
  int k_chosen = 0;
  bool failed = false;
  int64_t draws_used = 0;
  std::string hypothesis_fingerprint;
  double population_loss = 0.0;
};

struct FrequentHypothesis {
  std::string fingerprint;
  int64_t count = 0;
  double frequency = 0.0;        // count / runs
  double frequency_lower = 0.0;  // one-sided 99% Clopper-Pearson lower bound
  double population_loss = 0.0;
  double loss_bound = 0.0;        // ln(1/frequency) / n
  double loss_bound_lower = 0.0;  // ln(1/frequency_lower) / n
};

struct StabilityReport {
  int schema_version = kReportSchemaVersion;
  std::string kind = "stability";
  uint64_t seed = 0;
  int64_t runs = 0;
  double alpha = 0.0;
  int d = 0;
  std::string aux_n, draw_cap, budget;  // exact n, N, m
  std::string freq_threshold_text, eta_guarantee_text;
  double freq_threshold = 0.0, eta_guarantee = 0.0;
  int64_t fail_count = 0;
  double fail_rate = 0.0;
  std::map<std::string, int64_t> counts;       // non-fail outputs only
  std::map<std::string, double> frequencies;   // counts / runs
  std::string max_frequency_fingerprint;
  double max_frequency = 0.0;
  std::vector<FrequentHypothesis> frequent;  // frequency >= eta_guarantee
};

inline void to_json(Json& j, const FrequentHypothesis& f) {
  j = Json{{"fingerprint", f.fingerprint},
           {"count", f.count},
           {"frequency", f.frequency},
           {"frequency_lower", f.frequency_lower},
           {"population_loss", f.population_loss},
           {"loss_bound", f.loss_bound},
           {"loss_bound_lower", f.loss_bound_lower}};
}

inline void from_json(const Json& j, FrequentHypothesis& f) {
  j.at("fingerprint").get_to(f.fingerprint);
  j.at("count").get_to(f.count);
  j.at("frequency").get_to(f.frequency);
  j.at("frequency_lower").get_to(f.frequency_lower);
  j.at("population_loss").get_to(f.population_loss);
  j.at("loss_bound").get_to(f.loss_bound);
  j.at("loss_bound_lower").get_to(f.loss_bound_lower);
}

inline void to_json(Json& j, const StabilityReport& r) {
  j = Json{{"schema_version", r.schema_version},
           {"kind", r.kind},
           {"seed", r.seed},
           {"runs", r.runs},
           {"alpha", r.alpha},
           {"d", r.d},
           {"aux_n", r.aux_n},
           {"draw_cap", r.draw_cap},
           {"budget", r.budget},
           {"freq_threshold_text", r.freq_threshold_text},
           {"eta_guarantee_text", r.eta_guarantee_text},
           {"freq_threshold", r.freq_threshold},
           {"eta_guarantee", r.eta_guarantee},
           {"fail_count", r.fail_count},
           {"fail_rate", r.fail_rate},
           {"counts", r.counts},
           {"frequencies", r.frequencies},
           {"max_frequency_fingerprint", r.max_frequency_fingerprint},
           {"max_frequency", r.max_frequency},
           {"frequent", r.frequent}};
}

inline void from_json(const Json& j, StabilityReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  j.at("kind").get_to(r.kind);
  j.at("seed").get_to(r.seed);
  j.at("runs").get_to(r.runs);
  j.at("alpha").get_to(r.alpha);
  j.at("d").get_to(r.d);
  j.at("aux_n").get_to(r.aux_n);
  j.at("draw_cap").get_to(r.draw_cap);
  j.at("budget").get_to(r.budget);
  j.at("freq_threshold_text").get_to(r.freq_threshold_text);
  j.at("eta_guarantee_text").get_to(r.eta_guarantee_text);
  j.at("freq_threshold").get_to(r.freq_threshold);
  j.at("eta_guarantee").get_to(r.eta_guarantee);
  j.at("fail_count").get_to(r.fail_count);
  j.at("fail_rate").get_to(r.fail_rate);
  r.counts = j.at("counts").get<std::map<std::string, int64_t>>();
  r.frequencies = j.at("frequencies").get<std::map<std::string, double>>();
  j.at("max_frequency_fingerprint").get_to(r.max_frequency_fingerprint);
  j.at("max_frequency").get_to(r.max_frequency);
  r.frequent = j.at("frequent").get<std::vector<FrequentHypothesis>>();
}

// ---------------------------------------------------------------------------
// Mistake-bound experiment

struct MistakeReport {
  int schema_version = kReportSchemaVersion;
  std::string kind = "mistakes";
  uint64_t seed = 0;
  int64_t runs = 0;
  int64_t sample_length = 0;
  int d = 0;
  bool random_target = true;
  std::vector<int64_t> histogram;       // index i = runs with i mistakes
  std::vector<double> probabilities;    // histogram / runs
  int max_mistakes = 0;
};

inline void to_json(Json& j, const MistakeReport& r) {
  j = Json{{"schema_version", r.schema_version}, {"kind", r.kind},
           {"seed", r.seed},                     {"runs", r.runs},
           {"sample_length", r.sample_length},   {"d", r.d},
           {"random_target", r.random_target},   {"histogram", r.histogram},
           {"probabilities", r.probabilities},   {"max_mistakes", r.max_mistakes}};
}

inline void from_json(const Json& j, MistakeReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  j.at("kind").get_to(r.kind);
  j.at("seed").get_to(r.seed);
  j.at("runs").get_to(r.runs);
  j.at("sample_length").get_to(r.sample_length);
  j.at("d").get_to(r.d);
  j.at("random_target").get_to(r.random_target);
  r.histogram = j.at("histogram").get<std::vector<int64_t>>();
  r.probabilities = j.at("probabilities").get<std::vector<double>>();
  j.at("max_mistakes").get_to(r.max_mistakes);
}

// ---------------------------------------------------------------------------
// Draw-count experiment

struct DrawsReport {
  int schema_version = kReportSchemaVersion;
  std::string kind = "draws";
  uint64_t seed = 0;
  int64_t runs = 0;
  int level = 0;
  int d = 0;
  std::string aux_n, draw_cap;
  int64_t successes = 0, fails = 0;
  double mean_draws = 0.0, stddev_draws = 0.0, se_draws = 0.0;
  int64_t max_draws = 0;
  double mean_rejections = 0.0;
  int64_t max_rejections = 0;
  double expected_draw_bound = 0.0;  // 4^(level+1) * n
  // one-sided check: mean draws over successes <= bound + 3 standard errors
  bool mean_within_bound = false;
};

inline void to_json(Json& j, const DrawsReport& r) {
  j = Json{{"schema_version", r.schema_version},
           {"kind", r.kind},
           {"seed", r.seed},
           {"runs", r.runs},
           {"level", r.level},
           {"d", r.d},
           {"aux_n", r.aux_n},
           {"draw_cap", r.draw_cap},
           {"successes", r.successes},
           {"fails", r.fails},
           {"mean_draws", r.mean_draws},
           {"stddev_draws", r.stddev_draws},
           {"se_draws", r.se_draws},
           {"max_draws", r.max_draws},
           {"mean_rejections", r.mean_rejections},
           {"max_rejections", r.max_rejections},
           {"expected_draw_bound", r.expected_draw_bound},
           {"mean_within_bound", r.mean_within_bound}};
}

inline void from_json(const Json& j, DrawsReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  j.at("kind").get_to(r.kind);
  j.at("seed").get_to(r.seed);
  j.at("runs").get_to(r.runs);
  j.at("level").get_to(r.level);
  j.at("d").get_to(r.d);
  j.at("aux_n").get_to(r.aux_n);
  j.at("draw_cap").get_to(r.draw_cap);
  j.at("successes").get_to(r.successes);
  j.at("fails").get_to(r.fails);
  j.at("mean_draws").get_to(r.mean_draws);
  j.at("stddev_draws").get_to(r.stddev_draws);
  j.at("se_draws").get_to(r.se_draws);
  j.at("max_draws").get_to(r.max_draws);
  j.at("mean_rejections").get_to(r.mean_rejections);
  j.at("max_rejections").get_to(r.max_rejections);
  j.at("expected_draw_bound").get_to(r.expected_draw_bound);
  j.at("mean_within_bound").get_to(r.mean_within_bound);
}

// ---------------------------------------------------------------------------
// End-to-end private learning

struct E2ETrialRow {
  int64_t trial = 0;
  std::string hypothesis_fingerprint;
  double population_loss = 0.0;
  bool success = false;
  bool failed_empty_list = false;
  int64_t released_list_size = 0;
  int64_t pruned_list_size = 0;
  int64_t sampler_fail_count = 0;
};

struct E2EReport {
  int schema_version = kReportSchemaVersion;
  std::string kind = "e2e";
  uint64_t seed = 0;
  int64_t trials = 0;
  double alpha = 0.0, beta = 0.0, epsilon = 0.0, delta = 0.0;
  int d = 0;
  double eta = 0.0;
  std::string batch_size, batch_count, total_samples;  // m, k, k*m + n'
  int64_t n_prime = 0;
  double hist_epsilon = 0.0, hist_delta = 0.0;
  double em_epsilon = 0.0, em_delta = 0.0;
  int64_t successes = 0;
  double success_fraction = 0.0;
  double success_fraction_lower = 0.0;  // 99% Clopper-Pearson
  int64_t max_pruned_list = 0;
  int64_t empty_list_trials = 0;
  std::vector<E2ETrialRow> trials_detail;
};

inline void to_json(Json& j, const E2ETrialRow& r) {
  j = Json{{"trial", r.trial},
           {"hypothesis_fingerprint", r.hypothesis_fingerprint},
           {"population_loss", r.population_loss},
           {"success", r.success},
           {"failed_empty_list", r.failed_empty_list},
           {"released_list_size", r.released_list_size},
           {"pruned_list_size", r.pruned_list_size},
           {"sampler_fail_count", r.sampler_fail_count}};
}

inline void from_json(const Json& j, E2ETrialRow& r) {
  j.at("trial").get_to(r.trial);
  j.at("hypothesis_fingerprint").get_to(r.hypothesis_fingerprint);
  j.at("population_loss").get_to(r.population_loss);
  j.at("success").get_to(r.success);
  j.at("failed_empty_list").get_to(r.failed_empty_list);
  j.at("released_list_size").get_to(r.released_list_size);
  j.at("pruned_list_size").get_to(r.pruned_list_size);
  j.at("sampler_fail_count").get_to(r.sampler_fail_count);
}

inline void to_json(Json& j, const E2EReport& r) {
  j = Json{{"schema_version", r.schema_version},
           {"kind", r.kind},
           {"seed", r.seed},
           {"trials", r.trials},
           {"alpha", r.alpha},
           {"beta", r.beta},
           {"epsilon", r.epsilon},
           {"delta", r.delta},
           {"d", r.d},
           {"eta", r.eta},
           {"batch_size", r.batch_size},
           {"batch_count", r.batch_count},
           {"total_samples", r.total_samples},
           {"n_prime", r.n_prime},
           {"hist_epsilon", r.hist_epsilon},
           {"hist_delta", r.hist_delta},
           {"em_epsilon", r.em_epsilon},
           {"em_delta", r.em_delta},
           {"successes", r.successes},
           {"success_fraction", r.success_fraction},
           {"success_fraction_lower", r.success_fraction_lower},
           {"max_pruned_list", r.max_pruned_list},
           {"empty_list_trials", r.empty_list_trials},
           {"trials_detail", r.trials_detail}};
}

inline void from_json(const Json& j, E2EReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  j.at("kind").get_to(r.kind);
  j.at("seed").get_to(r.seed);
  j.at("trials").get_to(r.trials);
  j.at("alpha").get_to(r.alpha);
  j.at("beta").get_to(r.beta);
  j.at("epsilon").get_to(r.epsilon);
  j.at("delta").get_to(r.delta);
  j.at("d").get_to(r.d);
  j.at("eta").get_to(r.eta);
  j.at("batch_size").get_to(r.batch_size);
  j.at("batch_count").get_to(r.batch_count);
  j.at("total_samples").get_to(r.total_samples);
  j.at("n_prime").get_to(r.n_prime);
  j.at("hist_epsilon").get_to(r.hist_epsilon);
  j.at("hist_delta").get_to(r.hist_delta);
  j.at("em_epsilon").get_to(r.em_epsilon);
  j.at("em_delta").get_to(r.em_delta);
  j.at("successes").get_to(r.successes);
  j.at("success_fraction").get_to(r.success_fraction);
  j.at("success_fraction_lower").get_to(r.success_fraction_lower);
  j.at("max_pruned_list").get_to(r.max_pruned_list);
  j.at("empty_list_trials").get_to(r.empty_list_trials);
  r.trials_detail = j.at("trials_detail").get<std::vector<E2ETrialRow>>();
}

// ---------------------------------------------------------------------------
// Emission

// Summary reports: "json" is full fidelity (emit + parse round-trips);
// "csv" is a flat key,value export. Any other format is an error.
template <class Report>
std::string report_to_string(const Report& report, const std::string& format) {
  const Json j = report;
  if (format == "json") return j.dump(2) + "\n";
  if (format == "csv") {
    std::string out = "key,value\n";
    for (const auto& [key, value] : j.items()) {
      out += key;
      out += ',';
      if (value.is_string())
        out += value.template get<std::string>();
      else
        out += value.dump();
      out += '\n';
    }
    return out;
  }
  throw ConfigError("unknown report format '" + format + "' (use csv or json)");
}

template <class Report>
void emit_report(const Report& report, const std::string& path,
                 const std::string& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report file '" + path + "'");
  out << report_to_string(report, format);
}

template <class Report>
Report parse_report(const std::string& text) {
  return Json::parse(text).get<Report>();
}

// Per-run CSV tables. Columns are fixed and documented in the README.

inline std::string stability_rows_to_csv(const std::vector<StabilityRunRow>& rows) {
  std::string out =
      "run_id,k_chosen,failed,draws_used,hypothesis_fingerprint,population_loss\n";
  for (const StabilityRunRow& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.population_loss);
    out += std::to_string(r.run_id) + "," + std::to_string(r.k_chosen) + "," +
           (r.failed ? "1" : "0") + "," + std::to_string(r.draws_used) + "," +
           r.hypothesis_fingerprint + "," + buf + "\n";
  }
  return out;
}

inline std::vector<StabilityRunRow> stability_rows_from_csv(const std::string& text) {
  std::vector<StabilityRunRow> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    StabilityRunRow r;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    r.run_id = std::stoll(field);
    std::getline(ls, field, ',');
    r.k_chosen = std::stoi(field);
    std::getline(ls, field, ',');
    r.failed = field == "1";
    std::getline(ls, field, ',');
    r.draws_used = std::stoll(field);
    std::getline(ls, field, ',');
    r.hypothesis_fingerprint = field;
    std::getline(ls, field, ',');
    r.population_loss = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string e2e_rows_to_csv(const std::vector<E2ETrialRow>& rows) {
  std::string out =
      "trial,hypothesis_fingerprint,population_loss,success,failed_empty_list,"
      "released_list_size,pruned_list_size,sampler_fail_count\n";
  for (const E2ETrialRow& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.population_loss);
    out += std::to_string(r.trial) + "," + r.hypothesis_fingerprint + "," + buf +
           "," + (r.success ? "1" : "0") + "," + (r.failed_empty_list ? "1" : "0") +
           "," + std::to_string(r.released_list_size) + "," +
           std::to_string(r.pruned_list_size) + "," +
           std::to_string(r.sampler_fail_count) + "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file '" + path + "'");
  out << text;
}

}  // namespace stablepac
