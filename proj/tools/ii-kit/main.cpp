// ii-kit: command-line front end over the C API.
//
// Exit status: 0 all rows pass, 1 some row failed, 2 config or usage error,
// 3 runtime or i/o error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iikit/iikit.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailures = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigDeleter {
  void operator()(iikit_config* c) const { iikit_config_free(c); }
};
struct ReportDeleter {
  void operator()(iikit_report* r) const { iikit_report_free(r); }
};
using ConfigPtr = std::unique_ptr<iikit_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<iikit_report, ReportDeleter>;

// Owned C string from the library.
std::string take(char* s, size_t len) {
  std::string out(s, len);
  iikit_string_free(s);
  return out;
}

int report_error(iikit_status st, const std::string& context) {
  std::cerr << "ii-kit: " << context << ": " << iikit_status_string(st) << "\n";
  const std::string detail = iikit_last_error();
  if (!detail.empty()) std::cerr << detail << "\n";
  return st == IIKIT_ERR_SCHEMA || st == IIKIT_ERR_IO ? kExitConfig : kExitRuntime;
}

ConfigPtr load(const std::string& path, int& code) {
  iikit_config* raw = nullptr;
  const iikit_status st = iikit_config_load(path.c_str(), &raw);
  if (st != IIKIT_OK) {
    code = report_error(st, path);
    return nullptr;
  }
  return ConfigPtr(raw);
}

struct RunArgs {
  std::string config;
  std::string out_dir = ".";
  std::string format;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tolerances;
  bool timing = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& args) {
  int code = 0;
  ConfigPtr cfg = load(args.config, code);
  if (!cfg) return code;
  if (args.seed) {
    if (iikit_status st = iikit_config_set_seed(cfg.get(), *args.seed); st != IIKIT_OK)
      return report_error(st, "--seed");
  }
  for (const std::string& kv : args.tolerances) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "ii-kit: --tol expects KEY=VALUE, got \"" << kv << "\"\n";
      return kExitConfig;
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    } catch (const std::exception&) {
      std::cerr << "ii-kit: --tol value is not a number: \"" << kv << "\"\n";
      return kExitConfig;
    }
    if (iikit_status st = iikit_config_set_tolerance(cfg.get(), kv.substr(0, eq).c_str(), value); st != IIKIT_OK)
      return report_error(st, "--tol " + kv);
  }

  const std::string format = args.format.empty() ? iikit_config_output_format(cfg.get()) : args.format;
  const iikit_format fmt = format == "csv" ? IIKIT_FORMAT_CSV : IIKIT_FORMAT_JSON;

  iikit_report* raw = nullptr;
  if (iikit_status st = iikit_run(cfg.get(), &raw); st != IIKIT_OK) return report_error(st, "run");
  ReportPtr rep(raw);

  char* buf = nullptr;
  size_t len = 0;
  if (iikit_status st = iikit_report_emit(rep.get(), fmt, args.timing ? 1 : 0, &buf, &len); st != IIKIT_OK)
    return report_error(st, "emit");
  const std::string body = take(buf, len);

  std::string name = iikit_config_output_path(cfg.get());
  if (name.empty()) name = fs::path(args.config).stem().string() + "." + format;
  const fs::path target = fs::path(args.out_dir) / name;
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  std::ofstream out(target, std::ios::binary);
  if (!out || !(out << body) || !out.flush()) {
    std::cerr << "ii-kit: cannot write " << target.string() << "\n";
    return kExitRuntime;
  }

  if (!args.quiet) {
    if (iikit_report_table(rep.get(), &buf, &len) == IIKIT_OK) std::cout << take(buf, len);
    std::cout << "wrote " << target.string() << "\n";
  }
  return iikit_report_exit_status(rep.get()) == 0 ? 0 : kExitFailures;
}

int cmd_validate(const std::string& path) {
  int code = 0;
  ConfigPtr cfg = load(path, code);
  if (!cfg) return code;
  std::cout << path << ": valid " << iikit_config_experiment(cfg.get()) << " config\n";
  return 0;
}

int cmd_presets(const std::string& show) {
  const size_t count = iikit_preset_count();
  if (!show.empty()) {
    for (size_t i = 0; i < count; ++i) {
      if (show == iikit_preset_name(i)) {
        char* buf = nullptr;
        size_t len = 0;
        if (iikit_status st = iikit_preset_config(i, &buf, &len); st != IIKIT_OK) return report_error(st, show);
        std::cout << take(buf, len) << "\n";
        return 0;
      }
    }
    std::cerr << "ii-kit: unknown preset \"" << show << "\"\n";
    return kExitConfig;
  }
  std::size_t width = 0;
  for (size_t i = 0; i < count; ++i) width = std::max(width, std::string(iikit_preset_name(i)).size());
  for (size_t i = 0; i < count; ++i) {
    const std::string name = iikit_preset_name(i);
    std::cout << name << std::string(width - name.size() + 2, ' ') << iikit_preset_description(i) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ii-kit: integral-inequality bounds and property experiments"};
  app.set_version_flag("--version", std::string(iikit_version()));
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config and write its report");
  run_cmd->add_option("config", run.config, "config file (JSON)")->required();
  run_cmd->add_option("--out", run.out_dir, "output directory")->capture_default_str();
  run_cmd->add_option("--format", run.format, "report format (default: the config's output.format)")
      ->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--seed", run.seed, "override the config seed");
  run_cmd->add_option("--tol", run.tolerances, "override a tolerance, KEY=VALUE (repeatable)")
      ->allow_extra_args(false)
      ->take_all();
  run_cmd->add_flag("--timing", run.timing, "include per-row wall time in the report");
  run_cmd->add_flag("-q,--quiet", run.quiet, "do not print the table");

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config without running it");
  validate_cmd->add_option("config", validate_path, "config file (JSON)")->required();

  std::string show;
  CLI::App* presets_cmd = app.add_subcommand("presets", "list the built-in inequality presets");
  presets_cmd->add_option("--show", show, "print the config of one preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*run_cmd) return cmd_run(run);
  if (*validate_cmd) return cmd_validate(validate_path);
  if (*presets_cmd) return cmd_presets(show);
  return kExitConfig;
}
