// Copyright 2026 The pnpplo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through pnpplo.h.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "pnpplo/pnpplo.h"

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitIo = 2;

struct ConfigDeleter {
  void operator()(pnp_config* c) const { pnp_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<pnp_config, ConfigDeleter>;

struct CliFailure {
  int code;
};

int exit_code(pnp_status s) { return s == PNP_ERR_NUMERICAL ? kExitNumerical : kExitIo; }

void check(pnp_status s, const std::string& what) {
  if (s == PNP_OK) return;
  std::cerr << "error: " << what << ": " << pnp_last_error() << " (" << pnp_status_string(s) << ")\n";
  throw CliFailure{exit_code(s)};
}

struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", path, "key = value experiment configuration");
    cmd->add_option("--set", sets, "override one setting, key=value (repeatable)");
  }
};

void apply_sets(pnp_config* config, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << s << "'\n";
      throw CliFailure{kExitIo};
    }
    check(pnp_config_set(config, s.substr(0, eq).c_str(), s.substr(eq + 1).c_str()), "--set " + s);
  }
}

ConfigPtr load(const std::string& path, const std::vector<std::string>& sets) {
  pnp_config* raw = nullptr;
  if (path.empty()) {
    check(pnp_config_create(&raw), "config");
  } else {
    check(pnp_config_load(path.c_str(), &raw), "loading " + path);
  }
  ConfigPtr config(raw);
  apply_sets(config.get(), sets);
  return config;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

const char* status_name(pnp_solve_status s) {
  switch (s) {
    case PNP_SOLVE_CONVERGED: return "converged";
    case PNP_SOLVE_MAX_ITERS: return "max_iters";
    case PNP_SOLVE_INFEASIBLE_DIRECTION: return "infeasible_direction";
  }
  return "unknown";
}

// "key=a,b,c" or "key=lo:hi:n" (n evenly spaced values).
std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    std::cerr << "error: --sweep expects key=v1,v2,... or key=lo:hi:n\n";
    throw CliFailure{kExitIo};
  }
  const std::string key = spec.substr(0, eq);
  const std::string body = spec.substr(eq + 1);
  std::vector<std::string> values;
  const auto c1 = body.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = body.find(':', c1 + 1);
    try {
      const double lo = std::stod(body.substr(0, c1));
      const double hi = std::stod(body.substr(c1 + 1, c2 - c1 - 1));
      const int n = c2 == std::string::npos ? 2 : std::stoi(body.substr(c2 + 1));
      if (n < 1) throw std::invalid_argument("count");
      for (int i = 0; i < n; ++i) {
        const double v = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        values.push_back(fmt(v));
      }
    } catch (const std::exception&) {
      std::cerr << "error: bad range in --sweep '" << spec << "'\n";
      throw CliFailure{kExitIo};
    }
  } else {
    std::stringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) values.push_back(item);
  }
  if (values.empty()) {
    std::cerr << "error: empty --sweep '" << spec << "'\n";
    throw CliFailure{kExitIo};
  }
  return {key, values};
}

int cmd_degrade(const ConfigArgs& args, const std::string& out, const std::string& truth) {
  auto config = load(args.path, args.sets);
  check(pnp_degrade(config.get(), out.c_str(), truth.empty() ? nullptr : truth.c_str()), "degrade");
  return 0;
}

int cmd_solve(const ConfigArgs& args, const std::string& trace, const std::string& image,
              const std::string& summary) {
  auto config = load(args.path, args.sets);
  if (!trace.empty()) check(pnp_config_set(config.get(), "trace_out", trace.c_str()), "--trace");
  if (!image.empty()) check(pnp_config_set(config.get(), "image_out", image.c_str()), "--image");
  if (!summary.empty()) check(pnp_config_set(config.get(), "summary_out", summary.c_str()), "--summary");
  pnp_report* raw = nullptr;
  check(pnp_run_experiment(config.get(), &raw), "solve");
  std::unique_ptr<pnp_report, decltype(&pnp_report_destroy)> report(raw, pnp_report_destroy);
  pnp_summary s{};
  check(pnp_report_summary(report.get(), &s), "summary");
  std::cout << "status=" << status_name(s.status) << " iters=" << s.iters_run
            << " final_f=" << fmt(s.final_f) << " final_psnr=" << fmt(s.final_psnr)
            << " input_psnr=" << fmt(s.input_psnr) << " sigma_eta=" << fmt(s.sigma_eta)
            << " w=" << fmt(s.w) << " theory=" << (s.theory_applies ? "yes" : "no") << '\n';
  if (s.status == PNP_SOLVE_INFEASIBLE_DIRECTION) {
    std::cerr << "error: solver stalled (residual orthogonal to the range of A)\n";
    return kExitNumerical;
  }
  if (!std::isfinite(s.final_f)) {
    std::cerr << "error: solver produced a non-finite objective\n";
    return kExitNumerical;
  }
  return 0;
}

int cmd_estimate_alpha(const ConfigArgs& args, std::size_t samples, std::size_t per_sample,
                       double scale, std::uint64_t seed) {
  auto config = load(args.path, args.sets);
  pnp_alpha_result r{};
  check(pnp_estimate_alpha(config.get(), samples, per_sample, scale, seed, &r), "estimate-alpha");
  std::cout << "alpha=" << fmt(r.alpha) << " pairs=" << r.pairs_used << " skipped=" << r.skipped
            << " advertised=" << (r.has_advertised ? fmt(r.advertised) : "none") << '\n';
  if (r.identity_on_samples) {
    std::cout << "identity_on_samples: the denoiser left every sample unchanged\n";
    return 0;
  }
  if (r.has_advertised && r.alpha > r.advertised + 1e-8) {
    std::cerr << "error: estimate exceeds the advertised alpha\n";
    return kExitNumerical;
  }
  return 0;
}

int cmd_grid(const std::vector<std::string>& paths, const std::vector<std::string>& sets,
             const std::vector<std::string>& sweeps, std::size_t jobs, const std::string& out,
             const std::string& out_dir) {
  std::vector<ConfigPtr> configs;
  if (paths.empty()) {
    configs.push_back(load("", sets));
  } else {
    for (const auto& p : paths) configs.push_back(load(p, sets));
  }
  for (const auto& spec : sweeps) {
    const auto [key, values] = parse_sweep(spec);
    std::vector<ConfigPtr> expanded;
    for (const auto& base : configs) {
      for (const auto& v : values) {
        pnp_config* copy = nullptr;
        check(pnp_config_clone(base.get(), &copy), "grid");
        ConfigPtr owned(copy);
        check(pnp_config_set(owned.get(), key.c_str(), v.c_str()), "--sweep " + key);
        expanded.push_back(std::move(owned));
      }
    }
    configs = std::move(expanded);
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string stem = out_dir.empty() ? "" : out_dir + "/entry_" + std::to_string(i);
    for (const char* key : {"trace_out", "image_out", "summary_out", "degraded_out"}) {
      check(pnp_config_set(configs[i].get(), key, ""), "grid");
    }
    if (!stem.empty()) {
      check(pnp_config_set(configs[i].get(), "trace_out", (stem + "_trace.csv").c_str()), "grid");
      check(pnp_config_set(configs[i].get(), "image_out", (stem + ".rawf32").c_str()), "grid");
      check(pnp_config_set(configs[i].get(), "summary_out", (stem + "_summary.csv").c_str()), "grid");
    }
  }
  std::vector<const pnp_config*> raw;
  for (const auto& c : configs) raw.push_back(c.get());
  pnp_grid* grid_raw = nullptr;
  check(pnp_grid_run(raw.data(), raw.size(), jobs, &grid_raw), "grid");
  std::unique_ptr<pnp_grid, decltype(&pnp_grid_destroy)> grid(grid_raw, pnp_grid_destroy);
  for (std::size_t i = 0; i < pnp_grid_size(grid.get()); ++i) {
    const std::string err = pnp_grid_entry_error(grid.get(), i);
    if (!err.empty()) std::cerr << "entry " << i << " failed: " << err << '\n';
  }
  const std::string table = out.empty() ? "-" : out;
  check(pnp_grid_write_table(grid.get(), table.c_str()), "writing grid table");
  return pnp_grid_failures(grid.get()) == pnp_grid_size(grid.get()) ? kExitNumerical : 0;
}

int cmd_check_adjoint(const ConfigArgs& args, int trials, double tol, std::uint64_t seed) {
  auto config = load(args.path, args.sets);
  pnp_adjoint_result r{};
  check(pnp_check_adjoint(config.get(), trials, tol, seed, &r), "check-adjoint");
  std::cout << (r.passed ? "PASS" : "FAIL") << " worst_violation=" << fmt(r.worst_violation)
            << " trials=" << r.trials << " norm_estimate=" << fmt(r.norm_estimate)
            << " norm_bound=" << (r.has_norm_bound ? fmt(r.norm_bound) : "none") << '\n';
  return r.passed ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plug-and-play projected Landweber restoration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pnp_version());

  ConfigArgs degrade_args;
  std::string degrade_out, degrade_truth;
  auto* degrade = app.add_subcommand("degrade", "write the task's noisy measurement");
  degrade_args.attach(degrade);
  degrade->add_option("-o,--out", degrade_out, "measurement file (RAWF32)")->required();
  degrade->add_option("--truth", degrade_truth, "also write the ground-truth image");

  ConfigArgs solve_args;
  std::string trace, image, summary;
  auto* solve = app.add_subcommand("solve", "degrade, restore and report one experiment");
  solve_args.attach(solve);
  solve->add_option("--trace", trace, "trace CSV path");
  solve->add_option("--image", image, "restored image path (.pgm or RAWF32)");
  solve->add_option("--summary", summary, "summary CSV path");

  ConfigArgs alpha_args;
  std::size_t samples = 200, per_sample = 5;
  double scale = 1.0;
  std::uint64_t alpha_seed = 1;
  auto* alpha = app.add_subcommand("estimate-alpha", "estimate the denoiser's demicontraction constant");
  alpha_args.attach(alpha);
  alpha->add_option("--samples", samples, "random inputs")->check(CLI::PositiveNumber);
  alpha->add_option("--per-sample", per_sample, "fixed points per input")->check(CLI::PositiveNumber);
  alpha->add_option("--scale", scale, "standard deviation of the inputs");
  alpha->add_option("--seed", alpha_seed);

  std::vector<std::string> grid_paths, grid_sets, sweeps;
  std::size_t jobs = 0;
  std::string grid_out, grid_dir;
  auto* grid = app.add_subcommand("grid", "run a parameter grid and tabulate PSNR per solver");
  grid->add_option("configs", grid_paths, "configuration files");
  grid->add_option("--set", grid_sets, "override applied to every config");
  grid->add_option("--sweep", sweeps, "key=v1,v2,... or key=lo:hi:n (repeatable, crossed)");
  grid->add_option("-j,--jobs", jobs, "worker threads (0 = all cores)");
  grid->add_option("-o,--out", grid_out, "table CSV path (default stdout)");
  grid->add_option("--out-dir", grid_dir, "per-entry trace, image and summary files");

  ConfigArgs adj_args;
  int trials = 100;
  double tol = 1e-10;
  std::uint64_t adj_seed = 1;
  auto* adjoint = app.add_subcommand("check-adjoint", "check <Ax,u> = <x,A*u> for the task operator");
  adj_args.attach(adjoint);
  adjoint->add_option("--trials", trials)->check(CLI::PositiveNumber);
  adjoint->add_option("--tol", tol);
  adjoint->add_option("--seed", adj_seed);

  std::string mode = "identity";
  auto* mock = app.add_subcommand("mock-denoiser", "reference denoiser peer on stdin/stdout");
  mock->add_option("--mode", mode, "identity, scale_half, bad_magic, truncate or crash");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitIo;
  }

  try {
    if (*degrade) return cmd_degrade(degrade_args, degrade_out, degrade_truth);
    if (*solve) return cmd_solve(solve_args, trace, image, summary);
    if (*alpha) return cmd_estimate_alpha(alpha_args, samples, per_sample, scale, alpha_seed);
    if (*grid) return cmd_grid(grid_paths, grid_sets, sweeps, jobs, grid_out, grid_dir);
    if (*adjoint) return cmd_check_adjoint(adj_args, trials, tol, adj_seed);
    if (*mock) {
      const pnp_status s = pnp_serve_mock_denoiser(mode.c_str(), STDIN_FILENO, STDOUT_FILENO);
      if (s != PNP_OK) {
        std::cerr << "mock-denoiser: " << pnp_last_error() << '\n';
        return kExitIo;
      }
      return 0;
    }
  } catch (const CliFailure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitIo;
}
