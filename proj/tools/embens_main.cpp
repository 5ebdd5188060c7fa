// CLI wiring: generate | embed | diversity | ensemble | report.
#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "embens/config.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--jobs", flags.jobs, "worker count (1 = deterministic reference path)");
  cmd->add_option("--seed", flags.seed, "override the config seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--out", flags.out_dir, "override the output directory");
}

embens::RunConfig resolve(const CommonFlags& flags) {
  embens::RunConfig config = embens::load_config(flags.config_path);
  if (flags.jobs > 0) config.jobs = flags.jobs;
  if (flags.seed_set) config.seed = flags.seed;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph embedding ensembles: learn, measure diversity, combine"};
  app.require_subcommand(1);

  CommonFlags generate_flags, embed_flags, diversity_flags, ensemble_flags, report_flags;
  auto* generate = app.add_subcommand("generate", "write the merged synthetic graph and labels");
  add_common(generate, generate_flags);
  auto* embed = app.add_subcommand("embed", "grid-search all methods into the embedding cache");
  add_common(embed, embed_flags);
  auto* diversity = app.add_subcommand("diversity", "emit method correlation matrices (CSV)");
  add_common(diversity, diversity_flags);
  auto* ensemble = app.add_subcommand("ensemble", "run the full multi-round ensemble pipeline");
  add_common(ensemble, ensemble_flags);
  auto* report = app.add_subcommand("report", "print the results table from a finished run");
  add_common(report, report_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> written;
    if (generate->parsed()) written = embens::cmd_generate(resolve(generate_flags));
    if (embed->parsed()) written = embens::cmd_embed(resolve(embed_flags));
    if (diversity->parsed()) written = embens::cmd_diversity(resolve(diversity_flags));
    if (ensemble->parsed()) written = embens::cmd_ensemble(resolve(ensemble_flags));
    if (report->parsed()) {
      const embens::RunConfig config = resolve(report_flags);
      std::cout << embens::render_report(config.out_dir + "/results.json");
      return 0;
    }
    for (const auto& path : written) std::cout << path << '\n';
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 1;
  }
}
