// ds1solve: command-line driver.
//
//   ds1solve selftest [--n N]
//   ds1solve stationary|evolve (--config PATH | --preset NAME) [--out DIR] [--n N] [--resume]
//   ds1solve fit --run DIR [--window LO HI] [--delta-cutoff D] [--force]
//   ds1solve compare-profile --snapshot PATH --q PATH [--out DIR]
//   ds1solve scenario NAME... [--out DIR] [--jobs N] [--resume] [--n N]
//
// DS1_OUT_DIR overrides the output directory of a configuration (--out wins).

#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>

#include "ds1/fft.hpp"
#include "ds1/log.hpp"
#include "ds1/parallel.hpp"
#include "ds1/runner.hpp"

namespace {

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

ds1::RunConfig load(const std::string& config, const std::string& preset, const std::string& out_dir, std::size_t n) {
  if (config.empty() == preset.empty()) throw UsageError("exactly one of --config and --preset is required");
  ds1::RunConfig cfg;
  try {
    cfg = config.empty() ? ds1::preset(preset) : ds1::read_config(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (n != 0) {
    if (!power_of_two(n)) throw UsageError("--n must be a power of two >= 8");
    cfg.grid.n_xi = cfg.grid.n_eta = n;
  }
  if (const char* env = std::getenv("DS1_OUT_DIR"); env && *env) cfg.output_dir = env;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return cfg;
}

// Runs each scenario in its own process, at most `jobs` at a time.
int run_jobs(const std::vector<std::string>& names, std::size_t jobs, const std::vector<std::string>& common,
             const std::filesystem::path& base) {
  std::map<pid_t, std::string> running;
  int worst = 0;
  const auto reap = [&] {
    int status = 0;
    const pid_t pid = ::wait(&status);
    if (pid <= 0) return;
    const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : 1;
    std::cout << "[" << running[pid] << "] exit " << rc << std::endl;
    worst = std::max(worst, rc);
    running.erase(pid);
  };
  for (const auto& name : names) {
    while (running.size() >= jobs) reap();
    std::vector<std::string> args{"ds1solve", "scenario", name, "--out", (base / name).string()};
    args.insert(args.end(), common.begin(), common.end());
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      ::execv("/proc/self/exe", argv.data());
      std::_Exit(127);
    }
    running[pid] = name;
  }
  while (!running.empty()) reap();
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral solver for the DS I system with trivial boundary conditions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ds1::version_string());
  int verbose = 0;
  int threads = 0;
  app.add_flag("-v,--verbose", verbose, "Progress output (repeat for more)");
  app.add_option("--threads", threads, "OpenMP threads (default: runtime choice)")->check(CLI::NonNegativeNumber);

  std::size_t n = 0;
  std::string config, preset_name, out_dir;
  bool resume = false;

  auto* selftest = app.add_subcommand("selftest", "Antiderivative and B-operator checks");
  selftest->add_option("--n", n, "Grid points per direction (default 512)");

  const auto run_options = [&](CLI::App* sc) {
    auto* c = sc->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    auto* p = sc->add_option("--preset", preset_name, "Named scenario preset");
    c->excludes(p);
    sc->add_option("--out", out_dir, "Output directory");
    sc->add_option("--n", n, "Override the grid size (both directions)");
  };
  auto* stationary = app.add_subcommand("stationary", "Solve for the stationary state Q");
  run_options(stationary);
  auto* evolve = app.add_subcommand("evolve", "Time evolution");
  run_options(evolve);
  evolve->add_flag("--resume", resume, "Continue from the checkpoint in the output directory");

  ds1::FitCommandOptions fit_opt;
  std::vector<double> window;
  auto* fit = app.add_subcommand("fit", "Classify a run and fit blow-up rates");
  fit->add_option("--run", fit_opt.run_dir, "Run directory written by evolve")->required()->check(CLI::ExistingDirectory);
  fit->add_option("--window", window, "Explicit fit window LO HI")->expected(2);
  fit->add_option("--delta-cutoff", fit_opt.delta_cutoff, "Discard records with a larger mass defect");
  fit->add_flag("--force", fit_opt.force, "Fit even without a blow-up classification");

  std::string snapshot, q_path;
  auto* compare = app.add_subcommand("compare-profile", "Compare a snapshot with the rescaled Q");
  compare->add_option("--snapshot", snapshot, "Snapshot near blow-up")->required()->check(CLI::ExistingFile);
  compare->add_option("--q", q_path, "Q snapshot")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out_dir, "Output directory (default: the snapshot's)");

  std::vector<std::string> names;
  std::size_t jobs = 1;
  auto* scenario = app.add_subcommand("scenario", "Run named scenarios end to end");
  scenario->add_option("names", names, "Preset names")->required();
  scenario->add_option("--out", out_dir, "Output directory (base directory with several names)");
  scenario->add_option("--config", config, "JSON run configuration instead of a preset")->check(CLI::ExistingFile);
  scenario->add_option("--jobs", jobs, "Scenarios run in parallel processes")->check(CLI::PositiveNumber);
  scenario->add_flag("--resume", resume, "Continue from checkpoints");
  scenario->add_option("--n", n, "Override the grid size (both directions)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  ds1::set_verbosity(verbose);
  if (threads > 0) ds1::exec::set_num_threads(threads);
  ds1::use_default_fft_wisdom();
  ds1::set_warning_handler([](const std::string& m) { std::cerr << "warning: " << m << "\n"; });

  try {
    if (*selftest) {
      if (n == 0) n = 512;
      if (!power_of_two(n)) throw UsageError("--n must be a power of two >= 8");
      return ds1::cmd_selftest(n, std::cout);
    }
    if (*stationary) return ds1::cmd_stationary(load(config, preset_name, out_dir, n), std::cout);
    if (*evolve) return ds1::cmd_evolve(load(config, preset_name, out_dir, n), resume, std::cout);
    if (*fit) {
      if (!window.empty()) fit_opt.window = std::make_pair(window[0], window[1]);
      return ds1::cmd_fit(fit_opt, std::cout);
    }
    if (*compare) {
      const std::filesystem::path dir =
          out_dir.empty() ? std::filesystem::path(snapshot).parent_path() : std::filesystem::path(out_dir);
      return ds1::cmd_compare_profile(snapshot, q_path, dir.empty() ? "." : dir, std::cout);
    }
    if (*scenario) {
      if (!config.empty() && names.size() != 1) throw UsageError("--config runs exactly one scenario");
      for (const auto& name : names)
        if (config.empty() && name != "all") ds1::preset(name);  // validates the name
      if (names.size() == 1 && names[0] == "all") {
        names = ds1::preset_names();
        names.erase(std::find(names.begin(), names.end(), "drom11"));  // opt-in: hours on one core
      }
      if (names.size() == 1) {
        ds1::RunConfig cfg = config.empty() ? load("", names[0], out_dir, n) : load(config, "", out_dir, n);
        return ds1::cmd_scenario(cfg, resume, std::cout);
      }
      std::filesystem::path base = "runs";
      if (const char* env = std::getenv("DS1_OUT_DIR"); env && *env) base = env;
      if (!out_dir.empty()) base = out_dir;
      std::vector<std::string> common;
      if (resume) common.push_back("--resume");
      if (n != 0) common.insert(common.end(), {"--n", std::to_string(n)});
      return run_jobs(names, jobs, common, base);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
