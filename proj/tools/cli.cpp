#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dpm/config.hpp"
#include "dpm/error.hpp"
#include "dpm/metrics.hpp"
#include "dpm/parallel.hpp"
#include "dpm/staircase.hpp"
#include "dpm/timeline.hpp"
#include "oracles.hpp"

namespace dpm::cli {

namespace {

namespace fs = std::filesystem;

/// Usage or configuration problem detected before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Manifest {
 public:
  Manifest(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

  void set_config(const SimConfig& config) {
    seed_ = config.seed;
    snapshot_ = snapshot(config);
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

  fs::path file(const std::string& name, const std::string& what) {
    files_.emplace_back(name, what);
    return dir_ / name;
  }

  void write() {
    std::ofstream out(dir_ / "manifest.txt");
    if (!out) throw Error("cannot write manifest in " + dir_.string());
    out << "tool: dpm " << kVersion << "\n";
    out << "command: " << command_ << "\n";
    if (seed_) out << "seed: " << *seed_ << "\n";
    out << "output_dir: " << dir_.string() << "\n";
    for (const auto& [k, v] : notes_) out << k << ": " << v << "\n";
    out << "files:\n";
    for (const auto& [name, what] : files_) out << "  " << name << ": " << what << "\n";
    out << "files_manifest: manifest.txt\n";
    if (!snapshot_.empty()) {
      out << "config:\n";
      std::istringstream in(snapshot_);
      std::string line;
      while (std::getline(in, line)) out << "  " << line << "\n";
      std::ofstream cfg(dir_ / "config.snapshot.cfg");
      cfg << snapshot_;
    }
  }

  void list_snapshot() {
    if (!snapshot_.empty()) files_.emplace_back("config.snapshot.cfg", "resolved configuration");
  }

 private:
  fs::path dir_;
  std::string command_;
  std::optional<std::uint64_t> seed_;
  std::string snapshot_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::pair<std::string, std::string>> notes_;
};

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "Scenario configuration file");
  app->add_option("--set", c.sets, "Override as section.key=value (repeatable)");
  app->add_option("--seed", c.seed, "Random seed (overrides sim.seed)");
  app->add_option("-o,--out", c.out, "Output directory")->capture_default_str();
}

SimConfig load_config(const Common& c) {
  try {
    Config cfg = c.config.empty() ? Config::parse("", "<defaults>") : Config::load(c.config);
    for (const auto& s : c.sets) cfg.set_override(s);
    SimConfig sim = to_sim_config(cfg);
    if (c.seed) sim.seed = *c.seed;
    sim.validate();
    return sim;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<FilterVariant> parse_variants(const std::vector<std::string>& names) {
  std::vector<FilterVariant> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse_filter_variant(n));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

fs::path make_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::vector<std::string> filters;
  bool bench = false;
  int dump_stride = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig base = load_config(a.common);
  auto variants = parse_variants(a.filters);
  if (variants.empty()) variants.push_back(base.filter.variant);
  if (a.dump_stride < 0) throw UsageError("--dump-frames must be >= 0");
  const fs::path dir = make_out_dir(a.common.out);
  Manifest manifest(dir, "simulate");
  manifest.set_config(base);
  const bool compare = variants.size() > 1;

  std::vector<std::pair<FilterVariant, RunSummary>> summaries;
  std::ostringstream bench_text;
  for (FilterVariant v : variants) {
    SimConfig c = base;
    c.filter.variant = v;
    const std::string suffix = compare ? "_" + to_string(v) : "";
    RunOptions opts;
    opts.time_stages = a.bench;
    fs::path frame_dir;
    if (a.dump_stride > 0 && c.render_images) {
      frame_dir = dir / ("frames" + suffix);
      fs::create_directories(frame_dir);
      opts.on_frame = [&](const FrameLog& log, const FrameImages& img) {
        if (log.tick % a.dump_stride != 0) return;
        write_ppm(frame_dir / frame_filename("final", log.present_time, "ppm"),
                  img.pbr ? img.pbr->color : img.warped.color);
      };
    }
    const SimResult result = run(c, opts);
    write_frame_csv(manifest.file("frames" + suffix + ".csv", "per-tick frame log"), result.frames);
    const MetricsReport report = build_report(result.frames);
    write_report_csv(manifest.file("metrics" + suffix + ".csv", "per-frame metrics vs ground truth"),
                     report);
    if (!frame_dir.empty()) {
      manifest.file(frame_dir.filename().string() + "/", "final frames (PPM)");
    }
    std::ofstream(manifest.file("summary" + suffix + ".txt", "run summary"))
        << "filter: " << to_string(v) << "\n"
        << summary_text(report.summary);
    out << "[" << to_string(v) << "] frames=" << result.frames.size()
        << fmt::format(" mean_error_px={:.4f} median_error_px={:.4f}", report.summary.mean_error,
                       report.summary.median_error);
    if (report.summary.has_images) out << fmt::format(" mean_iou={:.4f}", report.summary.mean_iou);
    out << "\n";
    summaries.emplace_back(v, report.summary);

    if (a.bench) {
      const StageTimes& t = result.stage_times;
      const double n = static_cast<double>(std::max<std::size_t>(1, t.frames));
      bench_text << fmt::format(
          "filter: {}\nresolution: {}x{}\nkernel_threads: {}\nframes: {}\n"
          "skin_ms: {:.3f}\nraster_ms: {:.3f}\nmls_ms: {:.3f}\npbr_ms: {:.3f}\n"
          "pipeline_ms: {:.3f}\nthroughput_fps: {:.1f}\n\n",
          to_string(v), c.width, c.height, kernel_threads(), t.frames, 1e3 * t.skin / n,
          1e3 * t.raster / n, 1e3 * t.mls / n, 1e3 * t.pbr / n, 1e3 * t.total() / n,
          t.total() > 0 ? n / t.total() : 0.0);
    }
  }
  if (compare) {
    auto sorted = summaries;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& x, const auto& y) { return x.second.mean_error > y.second.mean_error; });
    std::ofstream table(manifest.file("comparison.csv", "variants ordered by mean error"));
    table << "rank,filter,mean_error_px,median_error_px,p95_error_px\n";
    out << "\nfilter        mean_err  median_err\n";
    int rank = 1;
    for (const auto& [v, s] : sorted) {
      table << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", rank++, to_string(v), s.mean_error,
                           s.median_error, s.p95_error);
      out << fmt::format("{:<12}  {:8.4f}  {:10.4f}\n", to_string(v), s.mean_error, s.median_error);
    }
  }
  if (a.bench) {
    std::ofstream(manifest.file("bench.txt", "stage timings")) << bench_text.str();
    out << "\n" << bench_text.str();
  }
  manifest.list_snapshot();
  manifest.write();
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_filters_bench(const Common& common, std::ostream& out) {
  const SimConfig base = load_config(common);
  const fs::path dir = make_out_dir(common.out);
  Manifest manifest(dir, "filters-bench");
  manifest.set_config(base);

  std::map<FilterVariant, SimResult> runs;
  for (FilterVariant v : all_filter_variants()) {
    SimConfig c = base;
    c.filter.variant = v;
    runs.emplace(v, run(c));
  }
  const auto traces = corrected_traces(runs.at(FilterVariant::kIdeal).frames);
  const SplineFit fit = fit_ideal_spline(traces);

  std::map<FilterVariant, MetricsReport> reports;
  for (const auto& [v, r] : runs) reports.emplace(v, build_report(r.frames, &fit));

  // Per-tick error traces, one column per variant.
  std::map<int, std::map<FilterVariant, double>> by_tick;
  std::map<int, std::pair<double, double>> tick_info;
  for (const auto& [v, rep] : reports) {
    for (const auto& m : rep.frames) {
      by_tick[m.tick][v] = m.mean_error;
      tick_info[m.tick] = {m.time, m.mean_abs_velocity_x};
    }
  }
  {
    std::ofstream csv(manifest.file("filter_errors.csv", "per-frame mean error vs ideal curve"));
    csv << "tick,time,ideal_abs_velocity_x";
    for (FilterVariant v : all_filter_variants()) csv << "," << to_string(v);
    csv << "\n";
    for (const auto& [tick, errs] : by_tick) {
      csv << fmt::format("{},{:.17g},{:.17g}", tick, tick_info[tick].first, tick_info[tick].second);
      for (FilterVariant v : all_filter_variants()) {
        auto it = errs.find(v);
        csv << (it == errs.end() ? std::string(",") : fmt::format(",{:.17g}", it->second));
      }
      csv << "\n";
    }
  }
  std::ofstream summary(manifest.file("filter_summary.csv", "per-variant summary"));
  summary << "filter,mean_error_px,median_error_px,p95_error_px,max_error_px,"
             "mean_error_vs_truth_px\n";
  out << fmt::format("ideal curve: {} knots, rms residual {:.4f} px\n\n", fit.knot_count,
                     fit.rms_residual_px);
  out << "filter        mean_err  median_err  p95_err  vs_truth\n";
  for (FilterVariant v : all_filter_variants()) {
    const RunSummary& s = reports.at(v).summary;
    const double direct = mean_frame_error(runs.at(v).frames);
    summary << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", to_string(v),
                           s.mean_error, s.median_error, s.p95_error, s.max_error, direct);
    out << fmt::format("{:<12}  {:8.4f}  {:10.4f}  {:7.4f}  {:8.4f}\n", to_string(v), s.mean_error,
                       s.median_error, s.p95_error, direct);
  }
  manifest.add_note("ideal_fit_knots", std::to_string(fit.knot_count));
  manifest.add_note("ideal_fit_rms_px", fmt::format("{:.17g}", fit.rms_residual_px));
  manifest.list_snapshot();
  manifest.write();
  return kOk;
}

// ---------------------------------------------------------------------------

struct PbrDemoArgs {
  Common common;
  int stride = 36;
  bool debug = false;
};

int cmd_pbr_demo(const PbrDemoArgs& a, std::ostream& out) {
  SimConfig c = load_config(a.common);
  if (a.stride < 1) throw UsageError("--stride must be >= 1");
  c.render_images = true;
  const fs::path dir = make_out_dir(a.common.out);
  Manifest manifest(dir, "pbr-demo");
  manifest.set_config(c);
  const fs::path img_dir = dir / "images";
  fs::create_directories(img_dir);

  std::ofstream csv(manifest.file("pbr_demo.csv", "per-frame stage IoU vs camera truth"));
  csv << "tick,time,iou_raw,iou_mls,iou_final,omega_d,final_equals_camera\n";
  std::size_t with_seed = 0, equal = 0, dumped = 0, ordered = 0, frames = 0;
  RunOptions opts;
  opts.on_frame = [&](const FrameLog& log, const FrameImages& img) {
    ++frames;
    const bool has_d = log.counts.d > 0;
    const Mask& final_mask = img.pbr ? img.pbr->lit : img.warped.mask;
    const bool same = final_mask == img.camera;
    if (has_d) {
      ++with_seed;
      equal += same ? 1 : 0;
    }
    if (log.iou_final > log.iou_warped && log.iou_warped > log.iou_render) ++ordered;
    csv << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", log.tick, log.present_time,
                       log.iou_render, log.iou_warped, log.iou_final, log.counts.d, same ? 1 : 0);
    if (log.tick % a.stride != 0) return;
    ++dumped;
    write_ppm(img_dir / frame_filename("1_raw", log.present_time, "ppm"), img.render.color);
    write_ppm(img_dir / frame_filename("2_mls", log.present_time, "ppm"), img.warped.color);
    write_ppm(img_dir / frame_filename("3_mls_pbr", log.present_time, "ppm"),
              img.pbr ? img.pbr->color : img.warped.color);
    if (a.debug && img.pbr) {
      write_region_ppm(img_dir / frame_filename("regions", log.present_time, "ppm"),
                       img.pbr->regions);
      write_distance_pgm(img_dir / frame_filename("distance", log.present_time, "pgm"),
                         img.pbr->field);
    }
  };
  run(c, opts);
  manifest.file("images/", "1_raw / 2_mls / 3_mls_pbr triplets (PPM)");
  manifest.add_note("frames_dumped", std::to_string(dumped));
  out << fmt::format(
      "frames: {}\ntriplets written: {}\nfinal mask == camera mask: {}/{} frames with Omega_D\n"
      "IoU(final) > IoU(mls) > IoU(raw): {}/{} frames\n",
      frames, dumped, equal, with_seed, ordered, frames);
  manifest.list_snapshot();
  manifest.write();
  return kOk;
}

// ---------------------------------------------------------------------------

struct StaircaseArgs {
  ObserverModel observer;
  StaircaseParams params;
  int sessions = 1;
  std::uint64_t seed = 1;
  std::string out = "out";
};

int cmd_staircase(const StaircaseArgs& a, std::ostream& out) {
  try {
    a.observer.validate();
    a.params.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (a.sessions < 1) throw UsageError("--sessions must be >= 1");
  const fs::path dir = make_out_dir(a.out);
  Manifest manifest(dir, "staircase");
  manifest.set_seed(a.seed);
  manifest.add_note("observer", fmt::format("threshold_ms={} slope_ms={} lapse={} guess={}",
                                            a.observer.threshold_ms, a.observer.slope_ms,
                                            a.observer.lapse, a.observer.guess));
  manifest.add_note("staircase", fmt::format("start_ms={} step_ms={} min_step_ms={} max_trials={} reversals={}",
                                             a.params.start_latency_ms, a.params.base_step_ms,
                                             a.params.min_step_ms, a.params.max_trials,
                                             a.params.target_reversals));
  std::vector<double> jnds;
  std::ofstream sessions(manifest.file("sessions.csv", "one row per session"));
  sessions << "session,seed,jnd_ms,final_latency_ms,status,reversals,trials\n";
  const fs::path trace_dir = dir / "traces";
  fs::create_directories(trace_dir);
  SessionResult last;
  for (int s = 0; s < a.sessions; ++s) {
    ObserverModel o = a.observer;
    o.seed = a.seed + static_cast<std::uint64_t>(s);
    last = run_session(o, a.params);
    write_trial_csv(trace_dir / fmt::format("trace_seed{}.csv", o.seed), last.trace);
    sessions << fmt::format("{},{},{:.17g},{:.17g},{},{},{}\n", s, o.seed, last.jnd_ms,
                            last.final_latency_ms, to_string(last.status), last.reversals,
                            last.trace.size());
    jnds.push_back(last.jnd_ms);
  }
  manifest.file("traces/", "per-session trial traces");
  const double mean = std::accumulate(jnds.begin(), jnds.end(), 0.0) / static_cast<double>(jnds.size());
  double var = 0.0;
  for (double j : jnds) var += (j - mean) * (j - mean);
  const double sd = jnds.size() > 1 ? std::sqrt(var / static_cast<double>(jnds.size() - 1)) : 0.0;
  std::string text;
  if (a.sessions == 1) {
    text = summary_block(last);
  } else {
    text = fmt::format("{{\n  \"sessions\": {},\n  \"threshold_ms\": {},\n  \"mean_jnd_ms\": {:.6f},\n"
                       "  \"std_jnd_ms\": {:.6f}\n}}\n",
                       a.sessions, a.observer.threshold_ms, mean, sd);
  }
  std::ofstream(manifest.file("summary.txt", "JND summary")) << text;
  out << text;
  manifest.write();
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_oracle(const std::string& suite, std::uint64_t seed, std::ostream& out) {
  std::vector<oracle::Check> checks;
  try {
    checks = oracle::run_suite(suite, seed);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass;
    out << fmt::format("{} {:<48} observed {:.3e}  bound {:.3e}\n", c.pass ? "PASS" : "FAIL", c.name,
                       c.observed, c.tolerance);
  }
  out << (ok ? "suite passed\n" : "suite FAILED\n");
  return ok ? kOk : kRuntimeFailure;
}

// ---------------------------------------------------------------------------

struct TuneArgs {
  Common common;
  std::vector<double> process{300, 1e3, 2e3, 5e3, 1e4, 1e5};
  std::vector<double> measurement{0.01, 0.05, 0.1, 0.25, 1.0};
};

int cmd_kalman_tune(const TuneArgs& a, std::ostream& out) {
  SimConfig base = load_config(a.common);
  base.render_images = false;
  base.filter.variant = FilterVariant::kKalmanCv;
  const fs::path dir = make_out_dir(a.common.out);
  Manifest manifest(dir, "kalman-tune");
  manifest.set_config(base);
  std::ofstream csv(manifest.file("kalman_tune.csv", "grid search over Kalman noise"));
  csv << "process,measurement,mean_error_px\n";
  double best = std::numeric_limits<double>::infinity();
  double best_q = 0, best_r = 0;
  for (double q : a.process) {
    for (double r : a.measurement) {
      SimConfig c = base;
      c.filter.kalman.process = q;
      c.filter.kalman.measurement = r;
      const double e = mean_frame_error(run(c).frames);
      csv << fmt::format("{:.17g},{:.17g},{:.17g}\n", q, r, e);
      if (e < best) {
        best = e;
        best_q = q;
        best_r = r;
      }
    }
  }
  out << fmt::format("best: kalman_process = {} kalman_measurement = {} (mean error {:.4f} px)\n",
                     best_q, best_r, best);
  manifest.list_snapshot();
  manifest.write();
  return kOk;
}

int cmd_export_track(const Common& common, double rate, std::ostream& out) {
  const SimConfig c = load_config(common);
  if (!(rate > 0.0)) throw UsageError("--rate must be > 0");
  const fs::path dir = make_out_dir(common.out);
  Manifest manifest(dir, "export-track");
  manifest.set_config(c);
  const Skeleton skeleton = Skeleton::hand();
  const auto gt = make_ground_truth(c, skeleton);
  std::vector<Pose> poses;
  for (long k = 0; k / rate < gt->duration(); ++k) poses.push_back(gt->at(k / rate));
  poses.push_back(gt->at(gt->duration()));
  write_pose_track(manifest.file("pose_track.csv", "ground-truth pose track"), poses);
  out << "wrote " << poses.size() << " poses\n";
  manifest.list_snapshot();
  manifest.write();
  return kOk;
}

int cmd_export_mesh(const Common& common, std::ostream& out) {
  const SimConfig c = load_config(common);
  const fs::path dir = make_out_dir(common.out);
  Manifest manifest(dir, "export-mesh");
  manifest.set_config(c);
  const Skeleton skeleton = Skeleton::hand();
  const HandMesh mesh = generate_hand_mesh(skeleton, c.mesh_vertices, c.atlas);
  write_obj(manifest.file("hand.obj", "rest-pose hand mesh"), mesh);
  out << "vertices: " << mesh.vertices.size() << "\ntriangles: " << mesh.triangles.size()
      << "\nuv islands: " << mesh.island_count << "\n";
  manifest.list_snapshot();
  manifest.write();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic projection mapping pipeline simulator"};
  app.set_version_flag("--version", std::string("dpm ") + kVersion);
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Kernel threads (0 = runtime default)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the pipeline simulation");
  add_common(simulate, sim.common);
  simulate->add_option("--filter", sim.filters,
                       "Filter variant (repeatable for comparison): " + filter_variant_names());
  simulate->add_flag("--bench", sim.bench, "Time the per-frame stages");
  simulate->add_option("--dump-frames", sim.dump_stride, "Write every Nth final frame as PPM");

  Common bench_common;
  auto* bench = app.add_subcommand("filters-bench", "Compare all filter variants");
  add_common(bench, bench_common);

  PbrDemoArgs demo;
  auto* pbr = app.add_subcommand("pbr-demo", "Raw / +MLS / +MLS+PBR image triplets");
  add_common(pbr, demo.common);
  pbr->add_option("--stride", demo.stride, "Write every Nth frame")->capture_default_str();
  pbr->add_flag("--debug", demo.debug, "Also write region maps and distance fields");

  StaircaseArgs stair;
  auto* staircase = app.add_subcommand("staircase", "JND staircase with a synthetic observer");
  staircase->add_option("--threshold", stair.observer.threshold_ms, "Observer threshold (ms)")->capture_default_str();
  staircase->add_option("--slope", stair.observer.slope_ms, "Psychometric slope (ms)")->capture_default_str();
  staircase->add_option("--lapse", stair.observer.lapse, "Lapse rate")->capture_default_str();
  staircase->add_option("--start", stair.params.start_latency_ms, "Start latency (ms)")->capture_default_str();
  staircase->add_option("--step", stair.params.base_step_ms, "Base step (ms)")->capture_default_str();
  staircase->add_option("--min-step", stair.params.min_step_ms, "Minimum step (ms)")->capture_default_str();
  staircase->add_option("--max-trials", stair.params.max_trials, "Trial cap")->capture_default_str();
  staircase->add_option("--reversals", stair.params.target_reversals, "Reversals to finish")->capture_default_str();
  staircase->add_option("--sessions", stair.sessions, "Number of seeded sessions")->capture_default_str();
  staircase->add_option("--seed", stair.seed, "First session seed")->capture_default_str();
  staircase->add_option("-o,--out", stair.out, "Output directory")->capture_default_str();

  std::string suite;
  std::uint64_t oracle_seed = 1;
  bool list_suites = false;
  auto* oracle_cmd = app.add_subcommand("oracle", "Check kernels against reference implementations");
  oracle_cmd->add_option("suite", suite, "Suite name");
  oracle_cmd->add_option("--seed", oracle_seed, "Random seed")->capture_default_str();
  oracle_cmd->add_flag("--list", list_suites, "List suites");

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("kalman-tune", "Grid search of Kalman noise on a scenario");
  add_common(tune_cmd, tune.common);
  tune_cmd->add_option("--process", tune.process, "Process noise values");
  tune_cmd->add_option("--measurement", tune.measurement, "Measurement noise values");

  Common track_common;
  double track_rate = 240.0;
  auto* track = app.add_subcommand("export-track", "Write the scenario's ground truth as a pose CSV");
  add_common(track, track_common);
  track->add_option("--rate", track_rate, "Samples per second")->capture_default_str();

  Common mesh_common;
  auto* mesh = app.add_subcommand("export-mesh", "Write the hand mesh as OBJ");
  add_common(mesh, mesh_common);

  std::vector<const char*> argv{"dpm"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  set_kernel_threads(threads);

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (bench->parsed()) return cmd_filters_bench(bench_common, out);
    if (pbr->parsed()) return cmd_pbr_demo(demo, out);
    if (staircase->parsed()) return cmd_staircase(stair, out);
    if (oracle_cmd->parsed()) {
      if (list_suites || suite.empty()) {
        for (const auto& s : oracle::suite_names()) out << s << "\n";
        return suite.empty() && !list_suites ? kUsageError : kOk;
      }
      return cmd_oracle(suite, oracle_seed, out);
    }
    if (tune_cmd->parsed()) return cmd_kalman_tune(tune, out);
    if (track->parsed()) return cmd_export_track(track_common, track_rate, out);
    if (mesh->parsed()) return cmd_export_mesh(mesh_common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace dpm::cli
