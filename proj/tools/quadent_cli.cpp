#include <CLI11.hpp>

#include <quadent/config.hpp>
#include <quadent/error.hpp>
#include <quadent/pipeline.hpp>
#include <quadent/report.hpp>
#include <quadent/scenarios.hpp>

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace quadent;

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;

enum class Command { Simulate, Lyapunov, Exponent, BoundsCheck, Oracle };

struct Job {
  std::string label;
  ScenarioConfig config;
};

struct Outcome {
  std::string label;
  std::string text;
  bool passed = false;
  std::string error;
};

struct OutputFlags {
  std::string out_dir;
  bool quiet = false;
};

RunStages stages_for(Command c, ScenarioConfig& cfg) {
  RunStages s;
  switch (c) {
    case Command::Simulate: break;
    case Command::Lyapunov:
      s.exponents = s.entropies = s.bounds = false;
      cfg.oracle.enabled = false;
      break;
    case Command::Exponent:
      s.entropies = s.bounds = false;
      cfg.oracle.enabled = false;
      break;
    case Command::BoundsCheck: cfg.oracle.enabled = false; break;
    case Command::Oracle: s.force_oracle = true; break;
  }
  return s;
}

// --out-dir fills unset output paths with <dir>/<label>.{csv,txt,json}.
void apply_out_dir(Job& job, const OutputFlags& flags) {
  if (flags.out_dir.empty()) return;
  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  auto& out = job.config.output;
  if (out.csv.empty()) out.csv = (dir / (job.label + ".csv")).string();
  if (out.report.empty()) out.report = (dir / (job.label + ".txt")).string();
  if (out.json.empty()) out.json = (dir / (job.label + ".json")).string();
}

void require_exclusive_outputs(const std::vector<Job>& jobs) {
  std::map<std::string, std::string> owner;
  for (const auto& job : jobs) {
    for (const auto* path : {&job.config.output.csv, &job.config.output.report, &job.config.output.json}) {
      if (path->empty()) continue;
      const std::string key = std::filesystem::weakly_canonical(*path).string();
      const auto [it, inserted] = owner.emplace(key, job.label);
      if (!inserted) {
        throw Error(ErrorCode::ConfigError, "output " + *path + " is written by both " + it->second + " and " + job.label);
      }
    }
  }
}

Outcome run_job(Job job, Command command) {
  Outcome out;
  out.label = job.label;
  try {
    const RunStages stages = stages_for(command, job.config);
    const RunReport report = run_scenario(job.config, stages);
    write_outputs(report, job.config.output);
    out.text = text_report(report);
    out.passed = report.passed();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

int run_jobs(std::vector<Job> jobs, Command command, const OutputFlags& flags) {
  for (auto& job : jobs) apply_out_dir(job, flags);
  require_exclusive_outputs(jobs);
  std::vector<std::future<Outcome>> running;
  running.reserve(jobs.size());
  for (auto& job : jobs) running.push_back(std::async(std::launch::async, run_job, std::move(job), command));
  bool all_passed = true;
  bool any_error = false;
  for (auto& f : running) {
    const Outcome o = f.get();
    if (!o.error.empty()) {
      std::cerr << o.label << ": " << o.error << "\n";
      any_error = true;
      continue;
    }
    if (flags.quiet) {
      std::cout << (o.passed ? "PASS " : "FAIL ") << o.label << "\n";
    } else {
      std::cout << o.text << "\n";
    }
    all_passed = all_passed && o.passed;
  }
  if (any_error) return kExitUsage;
  return all_passed ? 0 : kExitChecksFailed;
}

std::string label_of(const std::string& path, const ScenarioConfig& cfg) {
  if (cfg.name != "custom") return cfg.name;
  return std::filesystem::path(path).stem().string();
}

void add_config_command(CLI::App& app, const std::string& name, const std::string& help, Command command,
                        OutputFlags& flags, int& exit_code) {
  auto* sub = app.add_subcommand(name, help);
  auto paths = std::make_shared<std::vector<std::string>>();
  auto overrides = std::make_shared<std::vector<std::string>>();
  sub->add_option("configs", *paths, "Config files (JSON); several run concurrently")->required()->check(CLI::ExistingFile);
  sub->add_option("--override", *overrides, "key.path=value applied to every config");
  sub->callback([paths, overrides, command, &flags, &exit_code] {
    std::vector<Job> jobs;
    for (const auto& p : *paths) {
      ScenarioConfig cfg = load_config(p, *overrides);
      jobs.push_back({label_of(p, cfg), std::move(cfg)});
    }
    exit_code = run_jobs(std::move(jobs), command, flags);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement growth laboratory for quadratic bosonic Hamiltonians"};
  app.require_subcommand(1);
  OutputFlags flags;
  app.add_option("--out-dir", flags.out_dir, "Write <label>.csv/.txt/.json here unless the config names paths");
  app.add_flag("-q,--quiet", flags.quiet, "Print only one PASS/FAIL line per run");
  int exit_code = 0;

  add_config_command(app, "simulate", "Full pipeline: propagate, Lyapunov, exponents, entropies, bounds, oracle",
                     Command::Simulate, flags, exit_code);
  add_config_command(app, "lyapunov", "Propagate and report the Lyapunov spectrum", Command::Lyapunov, flags, exit_code);
  add_config_command(app, "exponent", "Lyapunov spectrum plus algebraic and volumetric subsystem exponents",
                     Command::Exponent, flags, exit_code);
  add_config_command(app, "bounds-check", "Entropies and squashed/GSS bounds without the Fock oracle",
                     Command::BoundsCheck, flags, exit_code);
  add_config_command(app, "oracle", "Full pipeline with the truncated Fock oracle forced on", Command::Oracle, flags,
                     exit_code);

  auto* scenario = app.add_subcommand("scenario", "Built-in scenarios");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "List built-in scenarios");
  list->callback([] {
    for (const auto& s : builtin_scenarios()) std::printf("%-26s %s\n", s.name.c_str(), s.summary.c_str());
  });
  auto* run = scenario->add_subcommand("run", "Run built-in scenarios");
  std::vector<std::string> names;
  std::vector<std::string> overrides;
  bool dump = false;
  run->add_option("names", names, "Scenario names; several run concurrently")->required();
  run->add_option("--override", overrides, "key.path=value, e.g. run.horizon=100 or hamiltonian.params.kappa=0.5");
  run->add_flag("--print-config", dump, "Print the resolved config instead of running");
  run->callback([&] {
    std::vector<Job> jobs;
    for (const auto& n : names) {
      ScenarioConfig cfg = parse_config(serialize_config(builtin_scenario(n)), overrides, "scenario " + n);
      if (dump) {
        std::cout << serialize_config(cfg);
        continue;
      }
      jobs.push_back({n, std::move(cfg)});
    }
    if (!dump) exit_code = run_jobs(std::move(jobs), Command::Simulate, flags);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return exit_code;
}
