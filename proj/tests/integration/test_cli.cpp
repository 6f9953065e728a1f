#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome dpm_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = dpm::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string config(const std::string& name) {
  return (fs::path(DPM_SOURCE_DIR) / "configs" / name).string();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dpm_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n == 0 ? 0 : n - 1;
}

std::vector<std::string> csv_column(const fs::path& csv, std::size_t col) {
  std::ifstream in(csv);
  std::string line;
  std::vector<std::string> out;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t k = 0; k <= col; ++k) std::getline(ss, cell, ',');
    out.push_back(cell);
  }
  return out;
}

/// Every regular file under `dir` must be named in the manifest.
void expect_manifest_complete(const fs::path& dir) {
  const std::string manifest = slurp(dir / "manifest.txt");
  ASSERT_FALSE(manifest.empty());
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir);
    const std::string top = rel.begin()->string();
    const bool listed = manifest.find(" " + rel.string() + ":") != std::string::npos ||
                        manifest.find(" " + top + "/:") != std::string::npos ||
                        rel == "manifest.txt";
    EXPECT_TRUE(listed) << rel;
  }
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(dpm_run({"--help"}).code, 0);
  const Outcome v = dpm_run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(dpm::cli::kVersion), std::string::npos);
  EXPECT_EQ(dpm_run({}).code, 2);
  EXPECT_EQ(dpm_run({"frobnicate"}).code, 2);
}

TEST(Cli, SimulateWritesFramesAndManifest) {
  const fs::path out = fresh_dir("simulate");
  const Outcome o = dpm_run({"simulate", "-c", config("translate.cfg"), "--filter", "propagation",
                             "--set", "sim.render_images=false", "-o", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NEAR(static_cast<double>(data_rows(out / "frames.csv")), 3.0 * 360.0, 1.0);
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.txt"));
  EXPECT_TRUE(fs::exists(out / "config.snapshot.cfg"));
  const std::string manifest = slurp(out / "manifest.txt");
  EXPECT_NE(manifest.find("seed: 1"), std::string::npos);
  EXPECT_NE(manifest.find(dpm::cli::kVersion), std::string::npos);
  expect_manifest_complete(out);
}

TEST(Cli, SnapshotReproducesTheRun) {
  const fs::path a = fresh_dir("snap_a");
  const fs::path b = fresh_dir("snap_b");
  ASSERT_EQ(dpm_run({"simulate", "-c", config("combined.cfg"), "--set", "sim.duration_s=0.4",
                     "--seed", "7", "-o", a.string()})
                .code,
            0);
  ASSERT_EQ(dpm_run({"simulate", "-c", (a / "config.snapshot.cfg").string(), "-o", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "frames.csv"), slurp(b / "frames.csv"));
  EXPECT_EQ(slurp(a / "config.snapshot.cfg"), slurp(b / "config.snapshot.cfg"));
}

TEST(Cli, SeedChangesOutputDeterministically) {
  const fs::path a = fresh_dir("seed_a"), b = fresh_dir("seed_b"), c = fresh_dir("seed_c");
  const std::vector<std::string> base{"simulate", "-c", config("translate.cfg"), "--set",
                                      "sim.duration_s=0.5", "--set", "sim.render_images=false"};
  auto with = [&](const std::string& seed, const fs::path& dir) {
    auto args = base;
    args.insert(args.end(), {"--seed", seed, "-o", dir.string()});
    return dpm_run(args).code;
  };
  ASSERT_EQ(with("3", a), 0);
  ASSERT_EQ(with("3", b), 0);
  ASSERT_EQ(with("4", c), 0);
  EXPECT_EQ(slurp(a / "frames.csv"), slurp(b / "frames.csv"));
  EXPECT_NE(slurp(a / "frames.csv"), slurp(c / "frames.csv"));
}

TEST(Cli, ComparisonModeOrdersVariants) {
  const fs::path out = fresh_dir("compare");
  const Outcome o = dpm_run({"simulate", "-c", config("translate.cfg"), "--filter", "baseline",
                             "--filter", "propagation", "--set", "sim.render_images=false", "-o",
                             out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(out / "frames_baseline.csv"));
  EXPECT_TRUE(fs::exists(out / "frames_propagation.csv"));
  const auto names = csv_column(out / "comparison.csv", 1);
  ASSERT_EQ(names.size(), 2u);
  EXPECT_EQ(names[0], "baseline");
  EXPECT_EQ(names[1], "propagation");
  const auto means = csv_column(out / "comparison.csv", 2);
  EXPECT_GT(std::stod(means[0]), std::stod(means[1]));
  expect_manifest_complete(out);
}

TEST(Cli, UsageAndConfigErrors) {
  const fs::path out = fresh_dir("errors");
  const Outcome bad_filter =
      dpm_run({"simulate", "-c", config("translate.cfg"), "--filter", "lowpass", "-o", out.string()});
  EXPECT_EQ(bad_filter.code, 2);
  for (const char* n : {"baseline", "naive", "kalman_cv", "propagation", "ideal"}) {
    EXPECT_NE(bad_filter.err.find(n), std::string::npos) << n;
  }
  EXPECT_FALSE(fs::exists(out));

  const fs::path cfg = fresh_dir("errors_cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "bad.cfg") << "[sim]\nseed = 1\n[camera]\nwidht = 3\n";
  const Outcome bad_key = dpm_run({"simulate", "-c", (cfg / "bad.cfg").string(), "-o", out.string()});
  EXPECT_EQ(bad_key.code, 2);
  EXPECT_NE(bad_key.err.find(":4"), std::string::npos) << bad_key.err;

  EXPECT_EQ(dpm_run({"simulate", "-c", (cfg / "missing.cfg").string(), "-o", out.string()}).code, 2);
  EXPECT_EQ(dpm_run({"simulate", "--set", "detector.latency_s=0", "-o", out.string()}).code, 2);
  EXPECT_EQ(dpm_run({"simulate", "--set", "nonsense", "-o", out.string()}).code, 2);
}

TEST(Cli, RuntimeFailureExitsOne) {
  const fs::path cfg = fresh_dir("runtime_cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "short.csv") << "0,0,0,0,500,1,0,0,0\n";
  std::ofstream(cfg / "run.cfg") << "[scenario]\nkind = recorded\ntrack = short.csv\n";
  // A file where the output directory should be makes writing fail.
  const fs::path blocker = fresh_dir("runtime_blocker");
  std::ofstream(blocker) << "x";
  const Outcome o = dpm_run({"export-mesh", "-o", (blocker / "sub").string()});
  EXPECT_EQ(o.code, 1) << o.err;
}

TEST(Cli, FiltersBenchSummarisesAllVariants) {
  const fs::path out = fresh_dir("bench");
  const Outcome o = dpm_run({"filters-bench", "-c", config("translate.cfg"), "--set",
                             "sim.render_images=false", "-o", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto names = csv_column(out / "filter_summary.csv", 0);
  const auto vs_curve = csv_column(out / "filter_summary.csv", 1);
  const auto vs_truth = csv_column(out / "filter_summary.csv", 5);
  ASSERT_EQ(names.size(), 5u);
  std::map<std::string, double> curve, truth;
  for (std::size_t k = 0; k < names.size(); ++k) {
    curve[names[k]] = std::stod(vs_curve[k]);
    truth[names[k]] = std::stod(vs_truth[k]);
  }
  for (const auto& [name, value] : curve) EXPECT_LE(curve["ideal"], value) << name;
  EXPECT_GT(truth["baseline"], truth["naive"]);
  EXPECT_GT(truth["naive"], truth["propagation"]);
  // Frames before the first detector delivery have no rendered output.
  const std::size_t rows = data_rows(out / "filter_errors.csv");
  EXPECT_GE(rows, 1070u);
  EXPECT_LE(rows, 1080u);

  const fs::path again = fresh_dir("bench_again");
  ASSERT_EQ(dpm_run({"filters-bench", "-c", config("translate.cfg"), "--set",
                     "sim.render_images=false", "-o", again.string()})
                .code,
            0);
  EXPECT_EQ(slurp(out / "filter_summary.csv"), slurp(again / "filter_summary.csv"));
  expect_manifest_complete(out);
}

TEST(Cli, PbrDemoStaticHandIsFullyCovered) {
  const fs::path out = fresh_dir("pbr_static");
  const Outcome o = dpm_run({"pbr-demo", "-c", config("static.cfg"), "--set", "sim.duration_s=0.2",
                             "--stride", "18", "-o", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto omega_d = csv_column(out / "pbr_demo.csv", 5);
  const auto iou_final = csv_column(out / "pbr_demo.csv", 4);
  std::size_t seeded = 0;
  for (std::size_t k = 0; k < iou_final.size(); ++k) {
    if (std::stoul(omega_d[k]) == 0) continue;
    ++seeded;
    EXPECT_DOUBLE_EQ(std::stod(iou_final[k]), 1.0) << k;
  }
  EXPECT_GT(seeded, 60u);
  EXPECT_GE(std::distance(fs::directory_iterator(out / "images"), fs::directory_iterator{}), 9);
  expect_manifest_complete(out);
}

TEST(Cli, PbrDemoWithoutErrorsKeepsStagesIdentical) {
  const fs::path out = fresh_dir("pbr_exact");
  const Outcome o = dpm_run({"pbr-demo", "-c", config("static.cfg"), "--set", "lmc.bias_x_mm=0",
                             "--set", "lmc.jitter_mm=0", "--set", "detector.jitter_px=0", "--set",
                             "sim.duration_s=0.2", "--stride", "20", "-o", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(out / "images")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("1_raw_", 0) != 0) continue;
    const std::string stamp = name.substr(6);
    const std::string raw = slurp(entry.path());
    EXPECT_EQ(raw, slurp(out / "images" / ("2_mls_" + stamp))) << stamp;
    EXPECT_EQ(raw, slurp(out / "images" / ("3_mls_pbr_" + stamp))) << stamp;
    ++compared;
  }
  EXPECT_GE(compared, 3u);
}

TEST(Cli, StaircaseSessions) {
  const fs::path a = fresh_dir("stair_a"), b = fresh_dir("stair_b");
  ASSERT_EQ(dpm_run({"staircase", "--seed", "5", "-o", a.string()}).code, 0);
  ASSERT_EQ(dpm_run({"staircase", "--seed", "5", "-o", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "traces" / "trace_seed5.csv"), slurp(b / "traces" / "trace_seed5.csv"));
  EXPECT_EQ(slurp(a / "summary.txt"), slurp(b / "summary.txt"));

  const fs::path many = fresh_dir("stair_many");
  const Outcome o = dpm_run({"staircase", "--threshold", "6", "--sessions", "50", "-o", many.string()});
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(data_rows(many / "sessions.csv"), 50u);
  const auto jnds = csv_column(many / "sessions.csv", 2);
  double mean = 0.0;
  for (const auto& j : jnds) mean += std::stod(j);
  mean /= static_cast<double>(jnds.size());
  EXPECT_GE(mean, 4.5);
  EXPECT_LE(mean, 7.5);
  expect_manifest_complete(many);

  EXPECT_EQ(dpm_run({"staircase", "--step", "1", "--min-step", "2", "-o", fresh_dir("stair_bad").string()}).code, 2);
}

TEST(Cli, OracleSuites) {
  const Outcome ok = dpm_run({"oracle", "kalman"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  const Outcome unknown = dpm_run({"oracle", "nope"});
  EXPECT_EQ(unknown.code, 2);
  for (const char* s : {"jfa", "mls", "kalman"}) EXPECT_NE(unknown.err.find(s), std::string::npos);
  const Outcome listing = dpm_run({"oracle", "--list"});
  EXPECT_EQ(listing.code, 0);
  EXPECT_NE(listing.out.find("jfa"), std::string::npos);
}

TEST(Cli, ExportsAndOutputConfinement) {
  const fs::path root = fresh_dir("confine");
  fs::create_directories(root);
  const fs::path previous = fs::current_path();
  fs::current_path(root);
  const Outcome mesh = dpm_run({"export-mesh", "-o", "mesh_out"});
  const Outcome track = dpm_run({"export-track", "-c", config("translate.cfg"), "--rate", "100",
                                 "-o", "track_out"});
  fs::current_path(previous);
  ASSERT_EQ(mesh.code, 0) << mesh.err;
  ASSERT_EQ(track.code, 0) << track.err;
  std::vector<std::string> top;
  for (const auto& e : fs::directory_iterator(root)) top.push_back(e.path().filename().string());
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<std::string>{"mesh_out", "track_out"}));
  EXPECT_NE(slurp(root / "mesh_out" / "hand.obj").find("\nf "), std::string::npos);
  // 3.003 s at 100 Hz plus the end sample.
  EXPECT_EQ(data_rows(root / "track_out" / "pose_track.csv"), 302u * 21u);

  // The exported track drives a run.
  const fs::path cfg_dir = root / "track_out";
  std::ofstream(cfg_dir / "replay.cfg") << "[sim]\nduration_s = 3\nrender_images = false\n"
                                           "[scenario]\nkind = recorded\ntrack = pose_track.csv\n"
                                           "[lmc]\nbias_x_mm = 5\n";
  const fs::path run_out = fresh_dir("replay_run");
  const Outcome replay = dpm_run({"simulate", "-c", (cfg_dir / "replay.cfg").string(), "-o", run_out.string()});
  EXPECT_EQ(replay.code, 0) << replay.err;
}
