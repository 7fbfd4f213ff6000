#include "ds1/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ds1 {

using nlohmann::json;

SpectralGrid GridConfig::make() const { return make_grid(n_xi, n_eta, l_xi, l_eta); }

void RunConfig::validate() const {
  const auto pow2 = [](std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; };
  if (!pow2(grid.n_xi) || !pow2(grid.n_eta)) throw std::invalid_argument("grid sizes must be powers of two >= 8");
  if (!(grid.l_xi > 0.0) || !(grid.l_eta > 0.0)) throw std::invalid_argument("grid half-periods must be positive");
  evolution.validate();
  newton.validate();
  if (!(restart_fraction > 0.0 && restart_fraction < 1.0))
    throw std::invalid_argument("restart_fraction must lie in (0, 1)");
  if (refine < 1) throw std::invalid_argument("refine must be >= 1");
  if (initial.kind == InitialKind::from_file && !initial.file_path)
    throw std::invalid_argument("from_file initial data needs initial.file");
}

namespace {

json to_json_value(const RunConfig& c, bool with_output) {
  json j;
  j["scenario"] = c.scenario;
  j["grid"] = {{"n_xi", c.grid.n_xi}, {"n_eta", c.grid.n_eta}, {"l_xi", c.grid.l_xi}, {"l_eta", c.grid.l_eta}};
  j["initial"] = {{"kind", to_string(c.initial.kind)}, {"amplitude", c.initial.amplitude}};
  if (c.initial.file_path) j["initial"]["file"] = c.initial.file_path->string();
  const auto& e = c.evolution;
  j["evolution"] = {{"t_start", e.t_start},
                    {"t_max", e.t_max},
                    {"n_steps", e.n_steps},
                    {"record_every", e.record_every},
                    {"snapshot_times", e.snapshot_times},
                    {"delta_abort", e.delta_abort},
                    {"checkpoint_every", e.checkpoint_every},
                    {"record_energy", e.record_energy},
                    {"resolution_abort", e.resolution_abort}};
  j["two_phase"] = {{"enabled", c.two_phase}, {"restart_fraction", c.restart_fraction}, {"refine", c.refine}};
  const auto& n = c.newton;
  j["newton"] = {{"residual_tol", n.residual_tol},     {"max_newton_iters", n.max_newton_iters},
                 {"gmres_rel_tol", n.gmres_rel_tol},   {"gmres_max_iters", n.gmres_max_iters},
                 {"gmres_restart", n.gmres_restart},   {"max_halvings", n.max_halvings},
                 {"resolution_tol", n.resolution_tol}, {"center", n.center}};
  if (c.q_file) j["q_file"] = c.q_file->string();
  if (with_output) j["output_dir"] = c.output_dir.string();
  return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw std::invalid_argument("config: unknown key '" + where + k + "'");
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_json(const RunConfig& c) { return to_json_value(c, true).dump(2); }

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j, {"scenario", "grid", "initial", "evolution", "two_phase", "newton", "q_file", "output_dir"}, "");
    get(j, "scenario", c.scenario);
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      check_keys(g, {"n_xi", "n_eta", "l_xi", "l_eta"}, "grid.");
      get(g, "n_xi", c.grid.n_xi);
      get(g, "n_eta", c.grid.n_eta);
      get(g, "l_xi", c.grid.l_xi);
      get(g, "l_eta", c.grid.l_eta);
    }
    if (j.contains("initial")) {
      const auto& i = j["initial"];
      check_keys(i, {"kind", "amplitude", "file"}, "initial.");
      if (i.contains("kind")) c.initial.kind = initial_kind_from_string(i["kind"].get<std::string>());
      get(i, "amplitude", c.initial.amplitude);
      if (i.contains("file")) c.initial.file_path = i["file"].get<std::string>();
    }
    if (j.contains("evolution")) {
      const auto& e = j["evolution"];
      check_keys(e,
                 {"t_start", "t_max", "n_steps", "record_every", "snapshot_times", "delta_abort", "checkpoint_every",
                  "record_energy", "resolution_abort"},
                 "evolution.");
      auto& ev = c.evolution;
      get(e, "t_start", ev.t_start);
      get(e, "t_max", ev.t_max);
      get(e, "n_steps", ev.n_steps);
      get(e, "record_every", ev.record_every);
      get(e, "snapshot_times", ev.snapshot_times);
      get(e, "delta_abort", ev.delta_abort);
      get(e, "checkpoint_every", ev.checkpoint_every);
      get(e, "record_energy", ev.record_energy);
      get(e, "resolution_abort", ev.resolution_abort);
    }
    if (j.contains("two_phase")) {
      const auto& t = j["two_phase"];
      check_keys(t, {"enabled", "restart_fraction", "refine"}, "two_phase.");
      get(t, "enabled", c.two_phase);
      get(t, "restart_fraction", c.restart_fraction);
      get(t, "refine", c.refine);
    }
    if (j.contains("newton")) {
      const auto& n = j["newton"];
      check_keys(n,
                 {"residual_tol", "max_newton_iters", "gmres_rel_tol", "gmres_max_iters", "gmres_restart",
                  "max_halvings", "resolution_tol", "center"},
                 "newton.");
      auto& nc = c.newton;
      get(n, "residual_tol", nc.residual_tol);
      get(n, "max_newton_iters", nc.max_newton_iters);
      get(n, "gmres_rel_tol", nc.gmres_rel_tol);
      get(n, "gmres_max_iters", nc.gmres_max_iters);
      get(n, "gmres_restart", nc.gmres_restart);
      get(n, "max_halvings", nc.max_halvings);
      get(n, "resolution_tol", nc.resolution_tol);
      get(n, "center", nc.center);
    }
    if (j.contains("q_file")) c.q_file = j["q_file"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return run_config_from_json(os.str());
}

void write_config(const std::filesystem::path& path, const RunConfig& c) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(c) << "\n";
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string s = to_json_value(c, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string q_cache_name(const GridConfig& g) {
  std::ostringstream os;
  os << "Q_" << g.n_xi << "x" << g.n_eta << "_" << g.l_xi << "x" << g.l_eta << ".ds1";
  return os.str();
}

std::vector<std::string> preset_names() {
  return {"selftest", "qorbit", "drom09", "dromgauss", "drom11", "drom11_ci", "gauss3", "gauss45"};
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.scenario = name;
  c.output_dir = std::filesystem::path("runs") / name;
  auto& e = c.evolution;
  const auto grid = [&](std::size_t n, double l) { c.grid = {n, n, l, l}; };

  if (name == "selftest") {
    grid(512, 10.0);
    e.t_max = 0.1;
    e.n_steps = 10;
  } else if (name == "qorbit") {
    grid(1024, 20.0);
    c.initial = {InitialKind::mu_times_Q, 1.0, std::nullopt};
    e.t_max = 1.0;
    e.n_steps = 1000;
    e.record_every = 10;
    e.snapshot_times = {1.0};
  } else if (name == "drom09" || name == "dromgauss") {
    grid(1024, 20.0);
    c.initial = name == "drom09" ? InitialDataSpec{InitialKind::mu_times_Q, 0.9, std::nullopt}
                                 : InitialDataSpec{InitialKind::Q_minus_gaussian, 0.1, std::nullopt};
    e.t_max = 5.0;
    e.n_steps = 5000;
    e.record_every = 10;
    e.snapshot_times = {0.0, 5.0};
    e.checkpoint_every = 500;
  } else if (name == "drom11") {
    grid(4096, 20.0);
    c.initial = {InitialKind::mu_times_Q, 1.1, std::nullopt};
    e.t_max = 1.3;
    e.n_steps = 1300;
    e.record_every = 1;
    e.checkpoint_every = 100;
    e.record_energy = false;
    e.resolution_abort = 1e-3;
    c.two_phase = true;
  } else if (name == "drom11_ci") {
    grid(1024, 10.0);
    c.initial = {InitialKind::mu_times_Q, 1.1, std::nullopt};
    e.t_max = 1.3;
    e.n_steps = 1300;
    e.record_every = 1;
    e.checkpoint_every = 100;
    e.record_energy = false;
    e.resolution_abort = 1e-3;
    c.two_phase = true;
  } else if (name == "gauss3") {
    grid(1024, 10.0);
    c.initial = {InitialKind::gaussian, 3.0, std::nullopt};
    e.t_max = 1.0;
    e.n_steps = 1000;
    e.record_every = 5;
    e.snapshot_times = {0.0, 1.0};
  } else if (name == "gauss45") {
    grid(1024, 10.0);
    c.initial = {InitialKind::gaussian, 4.5, std::nullopt};
    e.t_max = 0.2;
    e.n_steps = 2000;
    e.record_every = 1;
    e.checkpoint_every = 100;
    e.record_energy = false;
    e.resolution_abort = 1e-3;
    c.two_phase = true;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace ds1
