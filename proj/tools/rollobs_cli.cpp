#include <glob.h>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rollobs/io.hpp"
#include "rollobs/simulation.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kNotExciting = 1, kConfig = 2, kBlowUp = 3, kIo = 4 };

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  return out;
}

void print_summary(const rollobs::RunSummary& s, const std::filesystem::path& dir) {
  std::cout << "wrote " << dir.string() << " in " << s.wall_clock_seconds << " s\n";
  std::cout << "final theta_hat: [" << rollobs::format_double(s.final_theta_hat[0]) << ", "
            << rollobs::format_double(s.final_theta_hat[1]) << "]\n";
  for (const auto& p : s.phases) {
    std::cout << "phase t=[" << p.start << ", " << p.end << "): theta within tolerance from ";
    if (p.theta_reached_at)
      std::cout << *p.theta_reached_at << " s";
    else
      std::cout << "never";
    std::cout << ", err_norm_X in [" << p.err_norm_X_min << ", " << p.err_norm_X_max << "]\n";
  }
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const rollobs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const rollobs::DesignError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const rollobs::BlowUpError& e) {
    std::cerr << "numerical blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const rollobs::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-contact ODE-PDE simulator with adaptive observer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write CSV and JSON outputs");
  simulate->add_option("--config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::string pattern;
  auto* sweep = app.add_subcommand("sweep", "Run every config matching a glob, one output directory each");
  sweep->add_option("--configs", pattern, "Glob pattern, quoted")->required();

  std::string pe_config;
  auto* check_pe = app.add_subcommand("check-pe", "Report the excitation level of the regressor");
  check_pe->add_option("--config", pe_config, "Scenario JSON file")->required();

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  if (app.got_subcommand("version")) {
    std::cout << "rollobs " << kVersion << '\n';
    return kOk;
  }

  if (app.got_subcommand(simulate)) {
    return guarded([&] {
      auto cfg = rollobs::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      print_summary(rollobs::run_experiment(cfg), cfg.output_dir);
      return kOk;
    });
  }

  if (app.got_subcommand(sweep)) {
    const auto files = expand_glob(pattern);
    if (files.empty()) {
      std::cerr << "config error: no files match " << pattern << '\n';
      return kConfig;
    }
    int worst = kOk;
    for (const auto& file : files) {
      std::cout << "== " << file << '\n';
      const int rc = guarded([&] {
        auto cfg = rollobs::load_config(file);
        cfg.output_dir = cfg.output_dir / std::filesystem::path(file).stem();
        print_summary(rollobs::run_experiment(cfg), cfg.output_dir);
        return kOk;
      });
      worst = std::max(worst, rc);
    }
    return worst;
  }

  return guarded([&] {
    const auto cfg = rollobs::load_config(pe_config);
    const auto summary = rollobs::summarize(cfg, rollobs::simulate(cfg).rows);
    const auto& pe = summary.pe;
    std::cout << "window: " << pe.window << " s, threshold: " << pe.threshold << '\n';
    if (!pe.min_eig) {
      std::cout << "run shorter than the window; nothing to report\n";
      return static_cast<int>(kNotExciting);
    }
    std::cout << "min eigenvalue over run: " << rollobs::format_double(*pe.min_eig) << '\n';
    std::cout << "max eigenvalue over run: " << rollobs::format_double(*pe.max_eig) << '\n';
    std::cout << "fraction of samples above threshold: " << pe.fraction_above_threshold << '\n';
    const bool exciting = *pe.min_eig > pe.threshold;
    std::cout << (exciting ? "persistently exciting\n" : "not persistently exciting\n");
    return static_cast<int>(exciting ? kOk : kNotExciting);
  });
}
