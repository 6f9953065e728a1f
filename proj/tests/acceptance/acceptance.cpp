#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "cli.hpp"
#include "dpm/config.hpp"
#include "dpm/metrics.hpp"
#include "dpm/parallel.hpp"
#include "dpm/staircase.hpp"
#include "dpm/timeline.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  /// Failure caused only by the host having a single hardware thread.
  bool single_core_only = false;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

dpm::SimConfig bundled(const std::string& name) {
  return dpm::to_sim_config(dpm::Config::load(fs::path(DPM_SOURCE_DIR) / "configs" / name));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dpm_acceptance" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict suite(const std::string& name) {
  const auto checks = dpm::oracle::run_suite(name, 1);
  std::size_t failed = 0;
  double worst = 0.0;
  for (const auto& c : checks) {
    failed += c.pass ? 0 : 1;
    if (c.tolerance > 0) worst = std::max(worst, c.observed / c.tolerance);
  }
  return {failed == 0,
          fmt::format("{}/{} checks, worst observed/bound {:.3g}", checks.size() - failed, checks.size(), worst)};
}

Verdict translate_ordering() {
  const auto t0 = Clock::now();
  std::map<dpm::FilterVariant, double> err;
  for (auto v : {dpm::FilterVariant::kBaseline, dpm::FilterVariant::kNaive, dpm::FilterVariant::kKalmanCv,
                 dpm::FilterVariant::kPropagation, dpm::FilterVariant::kIdeal}) {
    dpm::SimConfig c = bundled("translate.cfg");
    c.filter.variant = v;
    err[v] = dpm::mean_frame_error(dpm::run(c).frames);
  }
  const double secs = seconds_since(t0);
  using V = dpm::FilterVariant;
  const double rel = std::abs(err[V::kPropagation] - err[V::kKalmanCv]) / err[V::kKalmanCv];
  const bool ok = err[V::kBaseline] > err[V::kNaive] && err[V::kNaive] > err[V::kPropagation] &&
                  err[V::kIdeal] < 0.5 && rel <= 0.25 && secs < 60.0;
  return {ok, fmt::format("baseline {:.3f} > naive {:.3f} > propagation {:.3f}; ideal {:.3f}; "
                          "propagation vs kalman_cv {:.3f} ({:.1f}%); {:.1f} s",
                          err[V::kBaseline], err[V::kNaive], err[V::kPropagation], err[V::kIdeal],
                          err[V::kKalmanCv], 100.0 * rel, secs)};
}

Verdict pbr_coverage() {
  std::size_t frames = 0, seeded = 0, lit_ok = 0, d_ok = 0;
  for (const char* name : {"translate.cfg", "articulate.cfg"}) {
    dpm::SimConfig c = bundled(name);
    c.duration_s = 0.6;
    std::size_t here = 0;
    dpm::RunOptions opts;
    opts.on_frame = [&](const dpm::FrameLog&, const dpm::FrameImages& img) {
      if (here++ >= 200) return;
      ++frames;
      if (!img.pbr || img.pbr->counts.d == 0) return;
      ++seeded;
      lit_ok += img.pbr->lit == img.camera ? 1 : 0;
      bool identical = true;
      const auto& regions = img.pbr->regions;
      for (std::size_t i = 0; i < regions.size() && identical; ++i) {
        if (regions[i] == dpm::Region::kD) identical = img.pbr->color[i] == img.warped.color[i];
      }
      d_ok += identical ? 1 : 0;
    };
    dpm::run(c, opts);
  }
  const bool ok = frames == 400 && seeded > 0 && lit_ok == seeded && d_ok == seeded;
  return {ok, fmt::format("{} frames, {} with seeds: lit == camera {}/{}, D identical {}/{}", frames,
                          seeded, lit_ok, seeded, d_ok, seeded)};
}

Verdict staircase_recovery() {
  const auto t0 = Clock::now();
  const dpm::StaircaseParams params;
  double sum3 = 0.0, sum6 = 0.0;
  int ordered = 0;
  constexpr int kSeeds = 50;
  for (int s = 1; s <= kSeeds; ++s) {
    dpm::ObserverModel low, high;
    low.threshold_ms = 3.0;
    high.threshold_ms = 6.0;
    low.seed = high.seed = static_cast<std::uint64_t>(s);
    const double j3 = dpm::run_session(low, params).jnd_ms;
    const double j6 = dpm::run_session(high, params).jnd_ms;
    sum3 += j3;
    sum6 += j6;
    ordered += j3 < j6 ? 1 : 0;
  }
  const double m3 = sum3 / kSeeds, m6 = sum6 / kSeeds, secs = seconds_since(t0);
  const bool ok = m6 >= 4.5 && m6 <= 7.5 && m3 >= 2.0 && m3 <= 4.0 && ordered >= 45 && secs < 30.0;
  return {ok, fmt::format("mean JND theta=6 {:.3f}, theta=3 {:.3f}; ordered {}/{}; {:.2f} s", m6, m3,
                          ordered, kSeeds, secs)};
}

int dpm_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = dpm::cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

Verdict deterministic_csv() {
  const std::string cfg = (fs::path(DPM_SOURCE_DIR) / "configs" / "translate.cfg").string();
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::string err;
  if (dpm_cli({"simulate", "-c", cfg, "-o", a.string()}, &err) != 0 ||
      dpm_cli({"simulate", "-c", cfg, "-o", b.string()}, &err) != 0) {
    return {false, "simulate failed: " + err};
  }
  std::size_t same = 0, total = 0;
  for (const char* f : {"frames.csv", "metrics.csv", "summary.txt"}) {
    ++total;
    const std::string x = slurp(a / f);
    same += !x.empty() && x == slurp(b / f) ? 1 : 0;
  }
  return {same == total, fmt::format("{}/{} outputs byte-identical across two runs", same, total)};
}

double bench_pipeline_ms(const fs::path& dir) {
  std::ifstream in(dir / "bench.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("pipeline_ms: ", 0) == 0) return std::stod(line.substr(13));
  }
  return std::numeric_limits<double>::infinity();
}

Verdict frame_budget() {
  const std::string cfg = (fs::path(DPM_SOURCE_DIR) / "configs" / "translate.cfg").string();
  const std::vector<std::string> sim{"simulate", "-c", cfg, "--set", "camera.width=1024", "--set",
                                     "camera.height=768", "--set", "sim.duration_s=0.5", "--bench"};
  const fs::path single = scratch("bench_single"), parallel = scratch("bench_parallel");
  auto with = [&](std::vector<std::string> prefix, const fs::path& out) {
    prefix.insert(prefix.end(), sim.begin(), sim.end());
    prefix.insert(prefix.end(), {"-o", out.string()});
    return dpm_cli(prefix);
  };
  if (with({"--threads", "1"}, single) != 0 || with({}, parallel) != 0) return {false, "bench run failed"};
  const double ms1 = bench_pipeline_ms(single), msn = bench_pipeline_ms(parallel);
  const int threads = dpm::kernel_threads();
  const unsigned hw = std::thread::hardware_concurrency();
  const bool single_ok = ms1 <= 40.0, parallel_ok = msn <= 10.0;
  Verdict v{single_ok && parallel_ok,
            fmt::format("single-thread {:.2f} ms (<= 40), parallel {:.2f} ms on {} kernel threads, "
                        "{} hardware threads (<= 10)",
                        ms1, msn, threads, hw)};
  v.single_core_only = single_ok && !parallel_ok && hw < 2;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  bool tolerate_single_core = false;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--tolerate-single-core") == 0) {
      tolerate_single_core = true;
    } else {
      std::cerr << "usage: dpm_acceptance [--tolerate-single-core]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"translate filter ordering", translate_ordering},
      {"grid MLS vs dense MLS", [] { return suite("mls"); }},
      {"PBR coverage", pbr_coverage},
      {"JFA vs brute force", [] { return suite("jfa"); }},
      {"staircase threshold recovery", staircase_recovery},
      {"deterministic CSV", deterministic_csv},
      {"1024x768 frame budget", frame_budget},
      {"Kalman vs reference recursion", [] { return suite("kalman"); }},
  };

  int hard_failures = 0, failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << fmt::format("{} {}. {} ({:.2f} s): {}{}\n", v.pass ? "PASS" : "FAIL", k + 1,
                             criteria[k].first, seconds_since(t0), v.detail,
                             v.single_core_only ? " [parallel budget not measurable on one core]" : "")
              << std::flush;
    if (!v.pass) {
      ++failures;
      if (!(tolerate_single_core && v.single_core_only)) ++hard_failures;
    }
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return hard_failures == 0 ? 0 : 1;
}
