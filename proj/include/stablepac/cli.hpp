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

// Command-line entry point. Subcommands: ldim, soa-run, stability, mistakes,
// draws, private-learn, params, dp-audit, e2e. Exit codes: 0 success,
// 1 usage/config error, 2 assertion or audit failure.

#pragma once

#include <iostream>

#include "CLI11.hpp"
#include "stablepac/experiments.hpp"

namespace stablepac {

namespace cli_detail {

inline void write_summary_files(const std::string& out, const std::string& format,
                                const Json& summary, const std::string& runs_csv) {
  if (out.empty()) return;
  if (format == "json")
    write_text_file(out + ".json", summary.dump(2) + "\n");
  else if (format == "csv") {
    std::string flat = "key,value\n";
    for (const auto& [key, value] : summary.items()) {
      flat += key;
      flat += ',';
      flat += value.is_string() ? value.get<std::string>() : value.dump();
      flat += '\n';
    }
    write_text_file(out + ".csv", flat);
  } else {
    throw ConfigError("unknown report format '" + format + "' (use csv or json)");
  }
  if (!runs_csv.empty()) write_text_file(out + ".runs.csv", runs_csv);
}

}  // namespace cli_detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"globally-stable and differentially-private PAC learning lab"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key = value file");

  uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
  int threads = 1;
  app.add_option("--seed", seed, "master seed for all randomness");
  app.add_option("--out", out_path, "output file base path");
  app.add_option("--format", format, "summary format: csv or json");
  app.add_option("--threads", threads, "worker threads for run-parallel experiments");

  std::string class_path, sample_path;
  bool witness = false;
  double alpha = 0.5, beta = 0.2, epsilon = 1.0, delta = 1e-6;
  int64_t runs = 1000, trials = 200, length = 50;
  int level = 1, d_param = 1;
  bool force = false, fixed_target = false;
  int64_t custom_aux_n = 0, custom_cap = 0;
  std::string audit_mode = "em";
  int64_t audit_pairs = 100, audit_max_count = 200;
  int audit_max_class = 8, audit_max_sample = 6;
  double check_epsilon = -1.0;

  CLI::App* c_ldim = app.add_subcommand("ldim", "Littlestone dimension of a class file");
  c_ldim->add_option("--class", class_path, "class file")->required();
  c_ldim->add_flag("--witness", witness, "print a shattered tree of maximal depth");

  CLI::App* c_soa = app.add_subcommand("soa-run", "run the online learner over a sample");
  c_soa->add_option("--class", class_path, "class file")->required();
  c_soa->add_option("--sample", sample_path, "CSV sample file (point,label)")->required();

  CLI::App* c_stab = app.add_subcommand("stability", "output-frequency experiment");
  c_stab->add_option("--class", class_path, "class file")->required();
  c_stab->add_option("--alpha", alpha, "target accuracy");
  c_stab->add_option("--runs", runs, "number of runs");

  CLI::App* c_mist = app.add_subcommand("mistakes", "online mistake histogram");
  c_mist->add_option("--class", class_path, "class file")->required();
  c_mist->add_option("--runs", runs, "number of runs");
  c_mist->add_option("--length", length, "examples per run");
  c_mist->add_flag("--fixed-target", fixed_target,
                   "use the class-file target instead of a random one per run");

  CLI::App* c_draws = app.add_subcommand("draws", "tournament-sampler draw accounting");
  c_draws->add_option("--class", class_path, "class file")->required();
  c_draws->add_option("--level", level, "tournament level k");
  c_draws->add_option("--alpha", alpha, "target accuracy (sets n and the cap)");
  c_draws->add_option("--aux-n", custom_aux_n, "override: auxiliary sample size");
  c_draws->add_option("--cap", custom_cap, "override: draw cap");
  c_draws->add_option("--runs", runs, "number of runs");

  CLI::App* c_learn = app.add_subcommand("private-learn", "composite private learner trials");
  c_learn->add_option("--class", class_path, "class file")->required();
  c_learn->add_option("--alpha", alpha, "accuracy");
  c_learn->add_option("--beta", beta, "confidence");
  c_learn->add_option("--epsilon", epsilon, "privacy epsilon");
  c_learn->add_option("--delta", delta, "privacy delta");
  c_learn->add_option("--trials", trials, "number of trials");
  c_learn->add_flag("--force", force, "run even when d >= 2");

  CLI::App* c_params = app.add_subcommand("params", "print the derived parameter table");
  c_params->add_option("--d", d_param, "Littlestone dimension")->required();
  c_params->add_option("--alpha", alpha, "accuracy");
  c_params->add_option("--beta", beta, "confidence");
  c_params->add_option("--epsilon", epsilon, "privacy epsilon");
  c_params->add_option("--delta", delta, "privacy delta");

  CLI::App* c_audit = app.add_subcommand("dp-audit", "closed-form privacy audits");
  c_audit->add_option("--mode", audit_mode, "em or hist")->required();
  c_audit->add_option("--epsilon", epsilon, "privacy epsilon");
  c_audit->add_option("--delta", delta, "privacy delta (hist mode)");
  c_audit->add_option("--pairs", audit_pairs, "neighbor pairs to audit (em)");
  c_audit->add_option("--max-class", audit_max_class, "max hypotheses per pair (em)");
  c_audit->add_option("--max-sample", audit_max_sample, "max sample length (em)");
  c_audit->add_option("--max-count", audit_max_count, "audit counts 0..max (hist)");
  c_audit->add_option("--check-epsilon", check_epsilon,
                      "epsilon to verify against (defaults to --epsilon)");

  CLI::App* c_e2e = app.add_subcommand("e2e", "end-to-end success-rate experiment");
  c_e2e->add_option("--class", class_path, "class file")->required();
  c_e2e->add_option("--alpha", alpha, "accuracy");
  c_e2e->add_option("--beta", beta, "confidence");
  c_e2e->add_option("--epsilon", epsilon, "privacy epsilon");
  c_e2e->add_option("--delta", delta, "privacy delta");
  c_e2e->add_option("--trials", trials, "number of trials");
  c_e2e->add_flag("--force", force, "run even when d >= 2");

  // global flags (--seed, --out, ...) are accepted after a subcommand too
  for (CLI::App* sub : app.get_subcommands(
           [](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_ldim->parsed()) {
      const ClassSpec spec = load_class_spec(class_path);
      const int d = ldim(spec.cls);
      std::cout << "ldim = " << d << "\n";
      if (witness && d >= 1) {
        const auto tree = find_shattered_tree(spec.cls, d);
        std::cout << tree->to_text();
      }
      return 0;
    }

    if (c_soa->parsed()) {
      const ClassSpec spec = load_class_spec(class_path);
      const Sample s = load_sample_csv(sample_path);
      SoaEngine engine(spec.cls);
      const SoaRunResult r = soa_run(engine, s);
      std::cout << "mistakes = " << r.mistake_count << "\n";
      std::cout << "mistake_positions =";
      for (int p : r.mistake_positions) std::cout << " " << p;
      std::cout << "\nfinal_hypothesis = " << r.final_hypothesis.fingerprint() << "\n";
      return 0;
    }

    if (c_stab->parsed()) {
      const ClassSpec spec = load_class_spec(class_path);
      StabilityConfig cfg{spec.cls, spec.distribution(), alpha, runs, seed, threads};
      const StabilityOutcome res = run_stability_experiment(cfg);
      const Json j = res.report;
      std::cout << j.dump(2) << "\n";
      cli_detail::write_summary_files(out_path, format, j,
                                      stability_rows_to_csv(res.rows));
      return 0;
    }

    if (c_mist->parsed()) {
      const ClassSpec spec = load_class_spec(class_path);
      MistakeConfig cfg{spec.cls,
                        spec.marginal,
                        fixed_target ? spec.target : std::nullopt,
                        runs,
                        length,
                        seed,
                        threads};
      if (fixed_target && !spec.target)
        throw ConfigError("--fixed-target needs a target in the class file");
      const MistakeReport rep = run_mistake_experiment(cfg);
      const Json j = rep;
      std::cout << j.dump(2) << "\n";
      cli_detail::write_summary_files(out_path, format, j, "");
      return 0;
    }

    if (c_draws->parsed()) {
      const ClassSpec spec = load_class_spec(class_path);
      DrawsConfig cfg{spec.cls, spec.distribution(), level, alpha, std::nullopt,
                      runs,     seed,                threads};
      if (custom_aux_n > 0 || custom_cap > 0) {
        if (custom_aux_n <= 0 || custom_cap <= 0)
          throw ConfigError("--aux-n and --cap must be set together");
        cfg.custom_caps = {custom_aux_n, custom_cap};
      }
      const DrawsOutcome res = run_draws_experiment(cfg);
      const Json j = res.report;
      std::cout << j.dump(2) << "\n";
      std::string rows_csv = "run_id,failed,draws_used,rejections\n";
      for (const DrawsRunRow& r : res.rows)
        rows_csv += std::to_string(r.run_id) + "," + (r.failed ? "1" : "0") + "," +
                    std::to_string(r.draws_used) + "," +
                    std::to_string(r.rejections) + "\n";
      cli_detail::write_summary_files(out_path, format, j, rows_csv);
      return 0;
    }

    if (c_learn->parsed() || c_e2e->parsed()) {
      const ClassSpec spec = load_class_spec(class_path);
      E2EConfig cfg{spec.cls, spec.distribution(), alpha, beta,    epsilon,
                    delta,    trials,              seed,  threads, force};
      const E2EOutcome res = run_e2e_experiment(cfg);
      const Json j = res.report;
      std::cout << j.dump(2) << "\n";
      cli_detail::write_summary_files(out_path, format, j,
                                      e2e_rows_to_csv(res.report.trials_detail));
      return 0;
    }

    if (c_params->parsed()) {
      const StabilityParams p = stability_params(d_param, alpha);
      std::cout << "d = " << p.d << "\nalpha = " << p.alpha << "\nn = " << p.n
                << "\nN = " << p.N << "\nm = " << p.m
                << "\nfreq_threshold = " << p.freq_threshold_text() << " ("
                << p.freq_threshold() << ")"
                << "\neta_guarantee = " << p.eta_guarantee_text() << " ("
                << p.eta_guarantee() << ")\n";
      if (*c_params->get_option("--beta") || *c_params->get_option("--epsilon") ||
          *c_params->get_option("--delta")) {
        const PrivateLearnerParams mp =
            private_learner_params(d_param, alpha, beta, epsilon, delta);
        std::cout << "composite learner (alpha=" << alpha << ", beta=" << beta
                  << ", epsilon=" << epsilon << ", delta=" << delta << "):\n"
                  << "  eta = " << mp.batch.eta_guarantee_text() << " (" << mp.eta
                  << ")\n  batch m = " << mp.batch.m << "\n  batches k = " << mp.k
                  << "\n  n' = " << mp.n_prime << "\n  total n = " << mp.total_n
                  << "\n  histogram budget = (" << mp.hist_budget.epsilon << ", "
                  << mp.hist_budget.delta << ")\n  selection budget = ("
                  << mp.em_budget.epsilon << ", " << mp.em_budget.delta << ")\n";
      }
      return 0;
    }

    if (c_audit->parsed()) {
      const double check = check_epsilon > 0.0 ? check_epsilon : epsilon;
      if (audit_mode == "em") {
        const double worst = audit_em_dp_random(epsilon, audit_pairs,
                                                audit_max_class, audit_max_sample,
                                                seed);
        const bool ok = worst <= check + 1e-9;
        std::cout << "worst |log ratio| = " << worst << " over " << audit_pairs
                  << " neighbor pairs (checked against epsilon = " << check
                  << ")\n"
                  << (ok ? "PASS" : "FAIL") << "\n";
        return ok ? 0 : 2;
      }
      if (audit_mode == "hist") {
        const PrivacyParams priv{epsilon, delta};
        bool ok = true;
        for (int64_t c = 0; c <= audit_max_count; ++c)
          ok = ok && audit_hist_release_dp(c, audit_max_count, priv).dp_ok;
        std::cout << "release threshold t = " << hist_release_threshold(priv)
                  << "\nsingle-occurrence release probability = "
                  << hist_release_probability(1, priv) << "\ncounts 0.."
                  << audit_max_count << ": " << (ok ? "PASS" : "FAIL") << "\n";
        return ok ? 0 : 2;
      }
      throw ConfigError("unknown audit mode '" + audit_mode + "' (use em or hist)");
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "assertion failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace stablepac
