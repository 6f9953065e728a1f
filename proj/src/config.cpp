#include "dpm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "dpm/error.hpp"

namespace dpm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string describe(const std::string& source, int line) {
  return line > 0 ? fmt::format("{}:{}", source, line) : std::string("override");
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw ConfigError(fmt::format("{}: malformed section header '{}'", describe(source, line), s),
                          line);
      }
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}: expected key = value, got '{}'", describe(source, line), s),
                        line);
    }
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(describe(source, line) + ": empty key", line);
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.entries_.count(full)) {
      throw ConfigError(fmt::format("{}: duplicate key '{}' (first set on line {})",
                                    describe(source, line), full, cfg.entries_[full].line),
                        line);
    }
    cfg.entries_[full] = {trim(s.substr(eq + 1)), line};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Config cfg = parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

void Config::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value, int line) {
  entries_[key] = {value, line};
}

namespace {

struct Reader {
  const Config& cfg;
  std::map<std::string, bool> used;

  const Config::Entry* find(const std::string& key) {
    auto it = cfg.entries().find(key);
    if (it == cfg.entries().end()) return nullptr;
    used[key] = true;
    return &it->second;
  }

  [[noreturn]] void fail(const std::string& key, const Config::Entry& e, const std::string& what) {
    throw ConfigError(fmt::format("{}: {} '{}': {}", describe(cfg.source(), e.line), key, e.value,
                                  what),
                      e.line);
  }

  void number(const std::string& key, double& out) {
    const auto* e = find(key);
    if (!e) return;
    double v = 0.0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) fail(key, *e, "not a number");
    out = v;
  }

  void integer(const std::string& key, int& out) {
    const auto* e = find(key);
    if (!e) return;
    int v = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) fail(key, *e, "not an integer");
    out = v;
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    const auto* e = find(key);
    if (!e) return;
    std::uint64_t v = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) fail(key, *e, "not a non-negative integer");
    out = v;
  }

  void boolean(const std::string& key, bool& out) {
    const auto* e = find(key);
    if (!e) return;
    const std::string& v = e->value;
    if (v == "true" || v == "on" || v == "yes" || v == "1") {
      out = true;
    } else if (v == "false" || v == "off" || v == "no" || v == "0") {
      out = false;
    } else {
      fail(key, *e, "expected true/false");
    }
  }

  template <typename T>
  void parsed(const std::string& key, T& out, const std::function<T(const std::string&)>& parse) {
    const auto* e = find(key);
    if (!e) return;
    try {
      out = parse(e->value);
    } catch (const Error& err) {
      fail(key, *e, err.what());
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const auto* e = find(key)) out = e->value;
  }
};

UvAtlas parse_atlas(const std::string& s) {
  if (s == "side_seams") return UvAtlas::kSideSeams;
  if (s == "back_seam") return UvAtlas::kBackSeam;
  throw InvalidArgument("valid atlases: side_seams, back_seam");
}

std::string atlas_name(UvAtlas a) { return a == UvAtlas::kSideSeams ? "side_seams" : "back_seam"; }

}  // namespace

SimConfig to_sim_config(const Config& config) {
  SimConfig c;
  Reader r{config, {}};

  r.number("sim.duration_s", c.duration_s);
  r.unsigned64("sim.seed", c.seed);
  r.number("sim.render_rate_hz", c.render_rate_hz);
  r.number("sim.projector_latency_s", c.projector_latency_s);
  r.boolean("sim.render_images", c.render_images);

  r.integer("camera.width", c.width);
  r.integer("camera.height", c.height);
  r.number("camera.focal_scale", c.focal_scale);
  r.number("camera.projector_bias_x_px", c.projector_bias_px.x());
  r.number("camera.projector_bias_y_px", c.projector_bias_px.y());

  std::string kind = to_string(c.scenario.kind);
  r.text("scenario.kind", kind);
  r.number("scenario.amplitude", c.scenario.amplitude);
  r.number("scenario.frequency_hz", c.scenario.frequency_hz);
  std::uint64_t scenario_seed = c.scenario.seed;
  r.unsigned64("scenario.seed", scenario_seed);
  c.scenario.seed = scenario_seed;
  std::string track;
  r.text("scenario.track", track);
  if (kind == "recorded") {
    if (track.empty()) {
      throw ConfigError("scenario.kind = recorded needs scenario.track",
                        config.entries().at("scenario.kind").line);
    }
    std::filesystem::path p(track);
    c.recorded_track = p.is_relative() ? config.base_dir() / p : p;
  } else {
    r.parsed<MotionKind>("scenario.kind", c.scenario.kind, [](const std::string& s) {
      return parse_motion_kind(s);
    });
  }

  r.number("lmc.rate_hz", c.sensors.lmc_rate_hz);
  r.number("lmc.latency_s", c.sensors.lmc_latency_s);
  r.number("lmc.jitter_mm", c.sensors.lmc_jitter_std_mm);
  Vec3 bias = Vec3::Zero();
  r.number("lmc.bias_x_mm", bias.x());
  r.number("lmc.bias_y_mm", bias.y());
  r.number("lmc.bias_z_mm", bias.z());
  if (!bias.isZero(0.0)) c.sensors.lmc_bias_mm = SensorModels::uniform_bias(bias);

  r.number("capture.interval_s", c.sensors.camera_interval_s);
  r.number("capture.latency_s", c.sensors.camera_latency_s);

  r.number("detector.latency_s", c.sensors.detector_latency_s);
  r.number("detector.jitter_px", c.sensors.detector_jitter_std_px);

  r.integer("mesh.vertices", c.mesh_vertices);
  r.parsed<UvAtlas>("mesh.atlas", c.atlas, parse_atlas);

  r.boolean("mls.enabled", c.mls_enabled);
  r.parsed<MlsVariant>("mls.variant", c.mls_variant,
                       [](const std::string& s) { return parse_mls_variant(s); });
  r.number("mls.alpha", c.mls_alpha);
  r.number("mls.grid_spacing_px", c.grid_spacing_px);

  r.parsed<FilterVariant>("filter.variant", c.filter.variant,
                          [](const std::string& s) { return parse_filter_variant(s); });
  r.number("filter.kalman_process", c.filter.kalman.process);
  r.number("filter.kalman_measurement", c.filter.kalman.measurement);
  r.number("filter.kalman_initial_velocity", c.filter.kalman.initial_velocity);

  r.boolean("pbr.enabled", c.pbr_enabled);

  for (const auto& [key, entry] : config.entries()) {
    if (!r.used.count(key)) {
      throw ConfigError(fmt::format("{}: unknown key '{}'", describe(config.source(), entry.line), key),
                        entry.line);
    }
  }
  c.validate();
  return c;
}

std::string snapshot(const SimConfig& c) {
  const Vec3 bias = c.sensors.lmc_bias_mm.empty() ? Vec3::Zero() : c.sensors.lmc_bias_mm.front();
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };
  line("[sim]");
  line(fmt::format("duration_s = {:.17g}", c.duration_s));
  line(fmt::format("seed = {}", c.seed));
  line(fmt::format("render_rate_hz = {:.17g}", c.render_rate_hz));
  line(fmt::format("projector_latency_s = {:.17g}", c.projector_latency_s));
  line(fmt::format("render_images = {}", c.render_images));
  line("\n[camera]");
  line(fmt::format("width = {}", c.width));
  line(fmt::format("height = {}", c.height));
  line(fmt::format("focal_scale = {:.17g}", c.focal_scale));
  line(fmt::format("projector_bias_x_px = {:.17g}", c.projector_bias_px.x()));
  line(fmt::format("projector_bias_y_px = {:.17g}", c.projector_bias_px.y()));
  line("\n[scenario]");
  if (!c.recorded_track.empty()) {
    line("kind = recorded");
    line("track = " + std::filesystem::absolute(c.recorded_track).string());
  } else {
    line("kind = " + to_string(c.scenario.kind));
  }
  line(fmt::format("amplitude = {:.17g}", c.scenario.amplitude));
  line(fmt::format("frequency_hz = {:.17g}", c.scenario.frequency_hz));
  line(fmt::format("seed = {}", c.scenario.seed));
  line("\n[lmc]");
  line(fmt::format("rate_hz = {:.17g}", c.sensors.lmc_rate_hz));
  line(fmt::format("latency_s = {:.17g}", c.sensors.lmc_latency_s));
  line(fmt::format("jitter_mm = {:.17g}", c.sensors.lmc_jitter_std_mm));
  line(fmt::format("bias_x_mm = {:.17g}", bias.x()));
  line(fmt::format("bias_y_mm = {:.17g}", bias.y()));
  line(fmt::format("bias_z_mm = {:.17g}", bias.z()));
  line("\n[capture]");
  line(fmt::format("interval_s = {:.17g}", c.sensors.camera_interval_s));
  line(fmt::format("latency_s = {:.17g}", c.sensors.camera_latency_s));
  line("\n[detector]");
  line(fmt::format("latency_s = {:.17g}", c.sensors.detector_latency_s));
  line(fmt::format("jitter_px = {:.17g}", c.sensors.detector_jitter_std_px));
  line("\n[mesh]");
  line(fmt::format("vertices = {}", c.mesh_vertices));
  line("atlas = " + atlas_name(c.atlas));
  line("\n[mls]");
  line(fmt::format("enabled = {}", c.mls_enabled));
  line("variant = " + to_string(c.mls_variant));
  line(fmt::format("alpha = {:.17g}", c.mls_alpha));
  line(fmt::format("grid_spacing_px = {:.17g}", c.grid_spacing_px));
  line("\n[filter]");
  line("variant = " + to_string(c.filter.variant));
  line(fmt::format("kalman_process = {:.17g}", c.filter.kalman.process));
  line(fmt::format("kalman_measurement = {:.17g}", c.filter.kalman.measurement));
  line(fmt::format("kalman_initial_velocity = {:.17g}", c.filter.kalman.initial_velocity));
  line("\n[pbr]");
  line(fmt::format("enabled = {}", c.pbr_enabled));
  return out;
}

}  // namespace dpm
