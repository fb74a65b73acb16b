// sigverify: offline signature verification from the command line.
//
// Exit codes: 0 success, 1 data or domain error, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sigverify/errors.hpp"
#include "sigverify/pipeline/commands.hpp"
#include "sigverify/pipeline/config.hpp"
#include "sigverify/pipeline/synthetic_dataset.hpp"
#include "sigverify/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::string config_path;
  std::string cache_dir;
  int jobs = -1;
};

sigverify::CommandContext make_context(const GlobalOptions& g) {
  auto config = g.config_path.empty() ? sigverify::RunConfig{} : sigverify::load_config(g.config_path);
  if (g.jobs >= 0) config.jobs = g.jobs;
  config.validate();
  const auto root = sigverify::resolve_cache_dir(config, g.cache_dir);
  return {config, sigverify::ArtifactCache(root), std::cout, std::cerr};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline signature verification with keypoint graphs and inkball models"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--config", global.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--cache-dir", global.cache_dir, "artifact cache (overrides SIGVERIFY_CACHE and config)");
  app.add_option("-j,--jobs", global.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);

  std::string manifest_path;
  std::string system = "both";
  std::string out_dir;

  auto* ingest = app.add_subcommand("ingest", "validate a dataset manifest and store it in the cache");
  ingest->add_option("manifest", manifest_path, "manifest file")->required();

  auto* extract = app.add_subcommand("extract", "compute skeletons, keypoint graphs and inkball models");
  extract->add_option("manifest", manifest_path, "manifest file")->required();

  auto* match = app.add_subcommand("match", "compute pairwise dissimilarity matrices");
  match->add_option("manifest", manifest_path, "manifest file")->required();
  match->add_option("--system", system, "ged, inkball or both")->check(CLI::IsMember({"ged", "inkball", "both"}));

  auto* evaluate = app.add_subcommand("evaluate", "verification reports from the stored matrices");
  evaluate->add_option("manifest", manifest_path, "manifest file")->required();
  evaluate->add_option("--system", system, "ged, inkball or both")->check(CLI::IsMember({"ged", "inkball", "both"}));
  evaluate->add_option("--out", out_dir, "report directory (default <cache>/reports)");

  auto* run = app.add_subcommand("run", "ingest, extract, match and evaluate in one go");
  run->add_option("manifest", manifest_path, "manifest file")->required();
  run->add_option("--system", system, "ged, inkball or both")->check(CLI::IsMember({"ged", "inkball", "both"}));
  run->add_option("--out", out_dir, "report directory (default <cache>/reports)");

  auto* selftest = app.add_subcommand("selftest", "check the fast algorithms against brute force");

  sigverify::SyntheticDatasetSpec synth_spec;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset with a manifest");
  synth->add_option("--out", synth_dir, "output directory")->required();
  synth->add_option("--users", synth_spec.users)->check(CLI::Range(1, 10000));
  synth->add_option("--genuine", synth_spec.genuine)->check(CLI::Range(1, 10000));
  synth->add_option("--forgeries", synth_spec.forgeries)->check(CLI::Range(0, 10000));
  synth->add_option("--references", synth_spec.references)->check(CLI::Range(2, 10000));
  synth->add_option("--seed", synth_spec.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*selftest) return sigverify::run_selftest(std::cout) ? kExitOk : kExitDomain;
    if (*synth) {
      const auto path = sigverify::write_synthetic_dataset(synth_dir, synth_spec);
      std::cout << "wrote " << path.string() << '\n';
      return kExitOk;
    }

    auto ctx = make_context(global);
    const bool use_ged = system != "inkball";
    const bool use_inkball = system != "ged";
    const std::filesystem::path reports = out_dir.empty() ? ctx.cache.reports_dir() : std::filesystem::path(out_dir);

    if (*ingest) {
      sigverify::cmd_ingest(manifest_path, ctx);
      return kExitOk;
    }
    const auto manifest = *run ? sigverify::cmd_ingest(manifest_path, ctx) : sigverify::load_manifest(manifest_path);
    if (*extract || *run) {
      const auto summary = sigverify::cmd_extract(manifest, ctx);
      if (summary.failed > 0) return kExitDomain;
      if (*extract) return kExitOk;
    }
    if (*match || *run) {
      if (use_ged) sigverify::cmd_match(manifest, ctx, sigverify::SystemKind::kGed);
      if (use_inkball) sigverify::cmd_match(manifest, ctx, sigverify::SystemKind::kInkball);
      if (*match) return kExitOk;
    }
    sigverify::cmd_evaluate(manifest, ctx, use_ged, use_inkball, reports);
    return kExitOk;
  } catch (const sigverify::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}
