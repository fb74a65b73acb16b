#pragma once

// Batch pipeline behind the command line tool: ingest, extract, match,
// evaluate. Each step reads what the previous one left in the cache.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sigverify/eval.hpp"
#include "sigverify/ged.hpp"
#include "sigverify/graph.hpp"
#include "sigverify/image_io.hpp"
#include "sigverify/imaging.hpp"
#include "sigverify/inkball.hpp"
#include "sigverify/pipeline/cache.hpp"
#include "sigverify/pipeline/config.hpp"
#include "sigverify/pipeline/manifest.hpp"
#include "sigverify/verify.hpp"

namespace sigverify {

struct CommandContext {
  RunConfig config;
  ArtifactCache cache;
  std::ostream& out;
  std::ostream& log;
};

/// Runs body(i) for i in [0, n) on up to jobs threads. The first exception
/// is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(std::size_t(std::max(1, jobs)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// ingest

inline DatasetManifest cmd_ingest(const std::string& manifest_path, CommandContext& ctx) {
  auto manifest = load_manifest(manifest_path);
  write_file_atomic(ctx.cache.manifest_path(), manifest_to_json(manifest).dump(2) + "\n");
  std::size_t genuine = 0, forgeries = 0;
  for (const auto& u : manifest.users) {
    genuine += u.genuine.size();
    forgeries += u.forgeries.size();
  }
  ctx.out << "dataset " << (manifest.name.empty() ? "(unnamed)" : manifest.name) << ": " << manifest.users.size()
          << " users, " << genuine << " genuine, " << forgeries << " forgeries, R" << manifest.references << '\n';
  for (const auto& u : manifest.users)
    ctx.out << "  user " << u.id << ": " << u.genuine.size() << " genuine, " << u.forgeries.size() << " forgeries\n";
  return manifest;
}

// ---------------------------------------------------------------------------
// extract

struct ArtifactKeys {
  std::string skeleton, graph, model;
};

inline ArtifactKeys artifact_keys(const std::string& image_path, const RunConfig& c) {
  const auto skeleton = ArtifactCache::skeleton_key(read_file(image_path), c);
  return {skeleton, ArtifactCache::graph_key(skeleton, c), ArtifactCache::model_key(skeleton, c)};
}

inline SkeletonImage load_skeleton(const std::filesystem::path& path) {
  const auto gray = load_grayscale(path.string());
  BinaryImage b(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y)
    for (int x = 0; x < gray.width(); ++x) b.set(x, y, gray(x, y) < 128);
  return SkeletonImage(std::move(b));
}

struct ExtractSummary {
  std::size_t images = 0;
  std::size_t computed = 0;  // images with at least one artifact rebuilt
  std::size_t failed = 0;
  std::vector<int> graph_nodes, model_nodes;
};

struct NodeStats {
  int min = 0, max = 0;
  double median = 0.0, mean = 0.0;
};

inline NodeStats node_stats(std::vector<int> v) {
  NodeStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  double sum = 0.0;
  for (int x : v) sum += x;
  s.mean = sum / double(n);
  return s;
}

inline ExtractSummary cmd_extract(const DatasetManifest& manifest, CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto signatures = manifest.all_signatures();
  ExtractSummary summary;
  summary.images = signatures.size();
  std::vector<int> graph_nodes(signatures.size(), -1), model_nodes(signatures.size(), -1);
  std::vector<char> rebuilt(signatures.size(), 0);
  std::vector<std::string> failures(signatures.size());

  parallel_for(signatures.size(), c.worker_count(), [&](std::size_t i) {
    const auto& sig = *signatures[i];
    try {
      const auto keys = artifact_keys(sig.path, c);
      const auto skel_path = ctx.cache.skeleton_path(keys.skeleton);
      const auto graph_path = ctx.cache.graph_path(keys.graph);
      const auto model_path = ctx.cache.model_path(keys.model);
      std::optional<SkeletonImage> skel;
      auto skeleton = [&]() -> const SkeletonImage& {
        if (skel) return *skel;
        if (std::filesystem::exists(skel_path)) {
          skel = load_skeleton(skel_path);
        } else {
          auto img = load_grayscale(sig.path);
          if (c.scale < 1.0) img = downscale(img, c.scale);
          skel = skeletonize(img, c.preprocess);
          const std::string tmp = skel_path.string() + ".build." + std::to_string(i);
          std::filesystem::create_directories(skel_path.parent_path());
          write_pgm(tmp, BinaryImage(*skel));
          std::filesystem::rename(tmp, skel_path);
          rebuilt[i] = 1;
        }
        return *skel;
      };
      if (std::filesystem::exists(graph_path)) {
        graph_nodes[i] = graph_from_string(read_file(graph_path)).node_count();
      } else {
        const auto g = extract_keypoint_graph(skeleton(), c.d_ged, keys.skeleton);
        write_file_atomic(graph_path, graph_to_string(g));
        graph_nodes[i] = g.node_count();
        rebuilt[i] = 1;
      }
      if (std::filesystem::exists(model_path)) {
        model_nodes[i] = model_from_string(read_file(model_path)).size();
      } else {
        const auto m = build_model(skeleton(), c.d_inkball, c.match.augmented, keys.skeleton);
        write_file_atomic(model_path, model_to_string(m));
        model_nodes[i] = m.size();
        rebuilt[i] = 1;
      }
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < signatures.size(); ++i) {
    if (!failures[i].empty()) {
      ++summary.failed;
      ctx.log << "error: " << signatures[i]->id << " (" << signatures[i]->path << "): " << failures[i] << '\n';
      continue;
    }
    summary.computed += rebuilt[i] ? 1 : 0;
    summary.graph_nodes.push_back(graph_nodes[i]);
    summary.model_nodes.push_back(model_nodes[i]);
  }
  ctx.out << "extracted " << summary.images << " images: " << summary.computed << " computed, "
          << summary.images - summary.computed - summary.failed << " cached, " << summary.failed << " failed\n";
  const auto gs = node_stats(summary.graph_nodes), ms = node_stats(summary.model_nodes);
  char line[160];
  ctx.out << "artifact            D     min  median      avg     max\n";
  std::snprintf(line, sizeof line, "keypoint graph %6s %7d %7.1f %8.2f %7d\n", format_double(c.d_ged).c_str(), gs.min,
                gs.median, gs.mean, gs.max);
  ctx.out << line;
  std::snprintf(line, sizeof line, "inkball model  %6s %7d %7.1f %8.2f %7d\n", format_double(c.d_inkball).c_str(),
                ms.min, ms.median, ms.mean, ms.max);
  ctx.out << line;
  return summary;
}

// ---------------------------------------------------------------------------
// match

enum class SystemKind { kGed, kInkball };

inline const char* system_tag(SystemKind s) { return s == SystemKind::kGed ? "ged" : "inkball"; }

/// (reference, test) pairs needed for one user: reference pairs for the
/// baseline and every reference against every test signature.
inline std::vector<std::pair<std::string, std::string>> required_pairs(const UserTrials& t) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : t.references) {
    for (const auto& s : t.references)
      if (r != s) pairs.insert({r, s});
    for (const auto* list : {&t.positives, &t.skilled, &t.random})
      for (const auto& id : *list) pairs.insert({r, id});
  }
  return {pairs.begin(), pairs.end()};
}

struct MatchSummary {
  std::size_t pairs = 0;
  std::size_t computed = 0;
  double wall_seconds = 0.0;
  double mean_seconds = 0.0;  // per computed comparison
};

namespace detail {

inline std::map<std::pair<std::string, std::string>, double> read_journal(const std::filesystem::path& path,
                                                                          const std::string& params_hash) {
  std::map<std::pair<std::string, std::string>, double> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  if (!std::getline(in, line) || line != "# params " + params_hash) return done;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) continue;
    try {
      const double d = parse_double(line.substr(c2 + 1));
      if (d >= 0.0) done[{line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1)}] = d;
    } catch (const FormatError&) {
      // torn final line of an interrupted run
    }
  }
  return done;
}

}  // namespace detail

inline MatchSummary cmd_match(const DatasetManifest& manifest, CommandContext& ctx, SystemKind system) {
  const auto& c = ctx.config;
  const auto plan = manifest.trials();
  const auto t0 = std::chrono::steady_clock::now();

  std::map<std::string, const SignatureEntry*> by_id;
  for (const auto* s : manifest.all_signatures()) by_id[s->id] = s;

  // Keys of every signature involved.
  std::map<std::string, ArtifactKeys> keys;
  for (const auto& t : plan)
    for (const auto& [r, s] : required_pairs(t))
      for (const auto& id : {r, s})
        if (!keys.count(id)) keys[id] = artifact_keys(by_id.at(id)->path, c);

  auto need = [&](const std::filesystem::path& p, const std::string& id) {
    if (!std::filesystem::exists(p)) {
      throw DataError("no cached artifact for " + id + " (" + p.string() + "); run 'sigverify extract' first");
    }
    return p;
  };

  const std::string system_params = system == SystemKind::kGed
                                        ? ged_match_signature(c)
                                        : inkball_match_signature(c);
  struct UserJob {
    const UserTrials* trials;
    std::string params_hash;
    std::map<std::pair<std::string, std::string>, double> done;
    std::vector<std::pair<std::string, std::string>> pairs;
    std::unique_ptr<std::ofstream> journal;
  };
  std::vector<UserJob> jobs;
  struct WorkItem {
    std::size_t job;
    std::size_t pair;
  };
  std::vector<WorkItem> work;
  MatchSummary summary;
  for (const auto& t : plan) {
    UserJob job{&t, {}, {}, required_pairs(t), nullptr};
    Fnv1a h;
    h.add(system_tag(system)).add("|").add(system_params);
    for (const auto& [r, s] : job.pairs) {
      const auto& kr = keys.at(r);
      const auto& ks = keys.at(s);
      h.add("|").add(r).add("=").add(system == SystemKind::kGed ? kr.graph : kr.model);
      h.add(",").add(s).add("=").add(system == SystemKind::kGed ? ks.graph : ks.skeleton);
    }
    job.params_hash = h.hex();
    summary.pairs += job.pairs.size();

    const auto final_path = ctx.cache.matrix_path(system_tag(system), t.user);
    if (std::filesystem::exists(final_path)) {
      try {
        const auto m = score_matrix_from_string(read_file(final_path));
        if (m.params_hash() == job.params_hash && m.size() == job.pairs.size()) continue;
      } catch (const Error&) {
        // unreadable result is recomputed
      }
    }
    const auto journal_path = ctx.cache.journal_path(system_tag(system), t.user);
    job.done = detail::read_journal(journal_path, job.params_hash);
    std::filesystem::create_directories(journal_path.parent_path());
    {
      // Rewrite the journal with only the valid entries, then append.
      std::ofstream fresh(journal_path, std::ios::trunc);
      fresh << "# params " << job.params_hash << '\n';
      for (const auto& [key, d] : job.done) fresh << key.first << ',' << key.second << ',' << format_double(d) << '\n';
    }
    job.journal = std::make_unique<std::ofstream>(journal_path, std::ios::app);
    const std::size_t index = jobs.size();
    for (std::size_t p = 0; p < job.pairs.size(); ++p)
      if (!job.done.count(job.pairs[p])) work.push_back({index, p});
    jobs.push_back(std::move(job));
  }

  // Load the artifacts the outstanding work needs.
  std::map<std::string, KeypointGraph> graphs;
  std::map<std::string, InkballModel> models;
  std::map<std::string, SkeletonImage> skeletons;
  for (const auto& w : work) {
    const auto& [r, s] = jobs[w.job].pairs[w.pair];
    if (system == SystemKind::kGed) {
      for (const auto& id : {r, s})
        if (!graphs.count(id)) graphs[id] = graph_from_string(read_file(need(ctx.cache.graph_path(keys.at(id).graph), id)));
    } else {
      if (!models.count(r)) models[r] = model_from_string(read_file(need(ctx.cache.model_path(keys.at(r).model), r)));
      if (!skeletons.count(s)) skeletons[s] = load_skeleton(need(ctx.cache.skeleton_path(keys.at(s).skeleton), s));
    }
  }

  std::mutex journal_mutex;
  std::vector<double> seconds(work.size(), 0.0);
  parallel_for(work.size(), c.worker_count(), [&](std::size_t i) {
    auto& job = jobs[work[i].job];
    const auto& [r, s] = job.pairs[work[i].pair];
    const auto start = std::chrono::steady_clock::now();
    const double d = system == SystemKind::kGed
                         ? d_ged(graphs.at(r), graphs.at(s), c.cost, c.ged_method)
                         : inkball_dissimilarity(models.at(r), skeletons.at(s), c.match);
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::lock_guard lock(journal_mutex);
    job.done[{r, s}] = d;
    *job.journal << r << ',' << s << ',' << format_double(d) << '\n' << std::flush;
  });

  for (auto& job : jobs) {
    job.journal.reset();
    ScoreMatrix m(system_tag(system), job.trials->user, job.params_hash);
    for (const auto& [key, d] : job.done) m.set(key.first, key.second, d);
    write_file_atomic(ctx.cache.matrix_path(system_tag(system), job.trials->user), score_matrix_to_string(m));
    std::filesystem::remove(ctx.cache.journal_path(system_tag(system), job.trials->user));
  }

  summary.computed = work.size();
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double total = 0.0;
  for (double s : seconds) total += s;
  summary.mean_seconds = work.empty() ? 0.0 : total / double(work.size());
  char line[200];
  std::snprintf(line, sizeof line, "%s: %zu pairs, %zu computed, wall %.2f s, %.3f ms per comparison\n",
                system_tag(system), summary.pairs, summary.computed, summary.wall_seconds,
                summary.mean_seconds * 1e3);
  ctx.out << line;
  return summary;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluationResult {
  std::vector<EvalReport> reports;
  std::optional<FusionStats> ged_stats, inkball_stats;
};

inline std::map<std::string, ScoreMatrix> load_matrices(const TrialPlan& plan, const ArtifactCache& cache,
                                                        SystemKind system) {
  std::map<std::string, ScoreMatrix> out;
  for (const auto& t : plan) {
    const auto path = cache.matrix_path(system_tag(system), t.user);
    if (!std::filesystem::exists(path)) {
      throw DataError(std::string("no ") + system_tag(system) + " matrix for user " + t.user +
                      "; run 'sigverify match' first");
    }
    out[t.user] = score_matrix_from_string(read_file(path));
  }
  return out;
}

inline ReferenceSet reference_set(const UserTrials& t) { return {t.user, t.references}; }

inline EvaluationResult evaluate_plan(const TrialPlan& plan, const std::map<std::string, ScoreMatrix>* ged,
                                      const std::map<std::string, ScoreMatrix>* inkball, const RunConfig& c,
                                      std::ostream& log) {
  DegeneratePolicy policy;
  policy.allow_epsilon = c.allow_degenerate;
  policy.warn = [&log](const std::string& msg) { log << "warning: " << msg << '\n'; };

  EvaluationResult result;
  auto report = [&](const std::string& name, const TrialSet& trials, std::optional<double> configured) {
    const double threshold = configured ? *configured : eer_global(pool(trials).positive, pool(trials).skilled).threshold;
    result.reports.push_back(fixed_threshold_report(trials, threshold, name));
  };
  auto single = [&](const std::map<std::string, ScoreMatrix>& m) {
    return score_trials(plan, [&](const UserTrials& t, const std::string& id) {
      return verification_score(reference_set(t), id, m.at(t.user), policy);
    });
  };
  if (ged) report("GED", single(*ged), c.threshold_ged);
  if (inkball) report("Inkball", single(*inkball), c.threshold_inkball);
  if (ged && inkball) {
    auto stats_of = [&](const std::map<std::string, ScoreMatrix>& m) {
      std::vector<UserMatrix> users;
      for (const auto& t : plan) users.push_back({reference_set(t), &m.at(t.user)});
      return fusion_stats(users, policy);
    };
    result.ged_stats = stats_of(*ged);
    result.inkball_stats = stats_of(*inkball);
    const auto trials = score_trials(plan, [&](const UserTrials& t, const std::string& id) {
      return mcs_score(reference_set(t), id, c.fusion_weight, ged->at(t.user), inkball->at(t.user),
                       *result.ged_stats, *result.inkball_stats, policy);
    });
    report("MCS(w=" + format_double(c.fusion_weight) + ")", trials, c.threshold_mcs);
  }
  return result;
}

inline std::string render_report_text(const DatasetManifest& manifest, const EvaluationResult& r,
                                      const RunConfig& c) {
  std::ostringstream ss;
  ss << "dataset " << (manifest.name.empty() ? "(unnamed)" : manifest.name) << ", " << manifest.users.size()
     << " users, R" << manifest.references << "\n\n";
  write_report_table(ss, r.reports);
  ss << "\ndecision thresholds\n";
  for (const auto& rep : r.reports) {
    const bool configured = (rep.system == "GED" && c.threshold_ged) ||
                            (rep.system == "Inkball" && c.threshold_inkball) ||
                            (rep.system.rfind("MCS", 0) == 0 && c.threshold_mcs);
    ss << "  " << rep.system << ' ' << format_double(rep.threshold)
       << (configured ? " (configured)" : " (global EER, skilled forgeries)") << '\n';
  }
  if (r.ged_stats && r.inkball_stats) {
    ss << "\nfusion statistics\n";
    ss << "  GED     mu " << format_double(r.ged_stats->mu) << " sigma " << format_double(r.ged_stats->sigma) << '\n';
    ss << "  Inkball mu " << format_double(r.inkball_stats->mu) << " sigma " << format_double(r.inkball_stats->sigma)
       << '\n';
  }
  return ss.str();
}

inline EvaluationResult cmd_evaluate(const DatasetManifest& manifest, CommandContext& ctx, bool use_ged,
                                     bool use_inkball, const std::filesystem::path& out_dir) {
  const auto plan = manifest.trials();
  std::optional<std::map<std::string, ScoreMatrix>> ged, inkball;
  if (use_ged) ged = load_matrices(plan, ctx.cache, SystemKind::kGed);
  if (use_inkball) inkball = load_matrices(plan, ctx.cache, SystemKind::kInkball);
  auto result = evaluate_plan(plan, ged ? &*ged : nullptr, inkball ? &*inkball : nullptr, ctx.config, ctx.log);

  const auto text = render_report_text(manifest, result, ctx.config);
  std::ostringstream csv;
  write_report_csv(csv, result.reports);
  write_file_atomic(out_dir / "report.txt", text);
  write_file_atomic(out_dir / "report.csv", csv.str());
  for (const auto& rep : result.reports) {
    std::string stem = rep.system;
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char ch) {
      return std::isalnum(ch) ? char(std::tolower(ch)) : '_';
    });
    while (!stem.empty() && stem.back() == '_') stem.pop_back();
    std::ostringstream sf, rf;
    write_det_csv(sf, rep.det_sf);
    write_det_csv(rf, rep.det_rf);
    write_file_atomic(out_dir / ("det_" + stem + "_sf.csv"), sf.str());
    write_file_atomic(out_dir / ("det_" + stem + "_rf.csv"), rf.str());
  }
  ctx.out << text;
  return result;
}

}  // namespace sigverify
