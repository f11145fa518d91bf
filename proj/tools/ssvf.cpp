// Campaign runner. `ssvf run` executes an injection campaign from a config
// file plus flag overrides and writes a report directory; `ssvf compare`
// builds a side-by-side table from report directories.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssvf/ssvf.hpp"

namespace {

int cmd_run(const std::string& config_path,
            const std::vector<std::pair<std::string, std::string>>& overrides,
            bool event_log) {
  ssvf::RunConfig cfg;
  if (!config_path.empty()) cfg = ssvf::parse_config_file(config_path);
  for (const auto& [key, value] : overrides) ssvf::apply_setting(cfg, key, value);
  if (event_log) cfg.event_log = true;
  cfg.validate();
  ssvf::run_and_report(cfg);
  std::printf("n=%llu\n", (unsigned long long)cfg.effective_runs());
  std::printf("report=%s/summary.txt\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& dirs,
                const std::string& out_path) {
  const std::string table = ssvf::compare_reports(dirs);
  if (out_path.empty()) {
    std::fputs(table.c_str(), stdout);
  } else {
    ssvf::atomic_write(out_path, table);
    std::printf("table=%s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache soft-error vulnerability campaigns"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute an injection campaign");
  std::string config_path, scheme, workload, n_str, redundancy, mbu, out_dir;
  std::string seed_str, workers_str;
  bool event_log = false;
  run->add_option("--config", config_path, "configuration file (key=value)");
  run->add_option("--scheme", scheme,
                  "protection scheme (none, parity, interleaved_parity, "
                  "secded, interleaved_secded, dected)");
  run->add_option("--workload", workload, "'synthetic' or a trace CSV path");
  run->add_option("--seed", seed_str, "campaign seed");
  run->add_option("--n", n_str, "run count, or 'auto' for statistical sizing");
  run->add_option("--redundancy", redundancy, "single or dual");
  run->add_option("--mbu", mbu, "upset-size preset (single, dixit, oliveira)");
  run->add_option("--workers", workers_str, "worker thread count");
  run->add_option("--out", out_dir, "report directory");
  run->add_flag("--event-log", event_log, "write per-event log CSV");

  auto* cmp = app.add_subcommand("compare", "tabulate reports side by side");
  std::vector<std::string> cmp_dirs;
  std::string cmp_out;
  cmp->add_option("reports", cmp_dirs, "report directories")->required();
  cmp->add_option("--out", cmp_out, "write the table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::vector<std::pair<std::string, std::string>> overrides;
      if (!scheme.empty()) overrides.emplace_back("scheme", scheme);
      if (!workload.empty()) overrides.emplace_back("workload", workload);
      if (!seed_str.empty()) overrides.emplace_back("seed", seed_str);
      if (!n_str.empty()) overrides.emplace_back("n", n_str);
      if (!redundancy.empty()) overrides.emplace_back("redundancy", redundancy);
      if (!mbu.empty()) overrides.emplace_back("mbu", mbu);
      if (!workers_str.empty()) overrides.emplace_back("workers", workers_str);
      if (!out_dir.empty()) overrides.emplace_back("out_dir", out_dir);
      return cmd_run(config_path, overrides, event_log);
    }
    return cmd_compare(cmp_dirs, cmp_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
