// Copyright 2026 The Gentle Authors
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

// Command-line front end. Exit codes: 0 success, 1 validation or usage
// error, 2 runtime failure.

#ifndef GENTLE_CLI_HPP_
#define GENTLE_CLI_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gentle/errors.hpp"
#include "gentle/forcefield.hpp"
#include "gentle/harness.hpp"
#include "gentle/hugopt.hpp"
#include "gentle/hugopt_io.hpp"
#include "gentle/motion_clip.hpp"
#include "gentle/random.hpp"
#include "gentle/safety.hpp"
#include "gentle/scenario.hpp"

namespace gentle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct SampleReport {
  std::size_t draws = 0;
  std::array<std::size_t, forcefield::kNumActiveSetModes> mode_counts{};
  PerLink<std::size_t> link_counts{};
  double k_min = std::numeric_limits<double>::infinity();
  double k_max = -std::numeric_limits<double>::infinity();
  double k_mean = 0.0;
  std::size_t k_samples = 0;
  double tau_min = std::numeric_limits<double>::infinity();
  double tau_max = -std::numeric_limits<double>::infinity();
  double tau_mean = 0.0;
  std::array<std::size_t, 10> k_histogram{};

  double mode_fraction(forcefield::ActiveSetMode m) const {
    return static_cast<double>(mode_counts[static_cast<std::size_t>(m)]) / static_cast<double>(draws);
  }
};

// Draws `draws` force intervals with the scenario's sampling parameters, using
// the same named streams as an episode.
inline SampleReport sample_forces(const harness::Scenario& sc, std::size_t draws) {
  detail::require(draws >= 1, "sample-forces: draws must be >= 1");
  harness::EpisodeStreams streams(sc.seed);
  safety::ThresholdSchedule thresholds(sc.safety);
  SampleReport rep;
  rep.draws = draws;
  const auto& range = sc.forces.stiffness;
  for (std::size_t i = 0; i < draws; ++i) {
    const auto set = forcefield::sample_active_set(streams.active_set, sc.forces.modes);
    ++rep.mode_counts[static_cast<std::size_t>(set.mode)];
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      if (!set.mask[l]) continue;
      ++rep.link_counts[l];
      const double k = forcefield::sample_stiffness(streams.stiffness, range);
      rep.k_min = std::min(rep.k_min, k);
      rep.k_max = std::max(rep.k_max, k);
      rep.k_mean += k;
      ++rep.k_samples;
      const double span = range.k_max - range.k_min;
      auto bin = span > 0.0 ? static_cast<std::size_t>((k - range.k_min) / span * 10.0) : 0;
      ++rep.k_histogram[std::min<std::size_t>(bin, 9)];
    }
    // Interior of interval i: past the blend window.
    const double t = static_cast<double>(i) * sc.safety.resample_period + 0.5 * sc.safety.resample_period +
                     0.5 * sc.safety.blend_window;
    const double tau = thresholds.value_at(std::min(t, (static_cast<double>(i) + 1.0) * sc.safety.resample_period - 1e-9),
                                           streams.threshold);
    rep.tau_min = std::min(rep.tau_min, tau);
    rep.tau_max = std::max(rep.tau_max, tau);
    rep.tau_mean += tau;
  }
  if (rep.k_samples) rep.k_mean /= static_cast<double>(rep.k_samples);
  rep.tau_mean /= static_cast<double>(draws);
  return rep;
}

inline void print_report(const SampleReport& rep, std::ostream& out) {
  static constexpr std::array<const char*, forcefield::kNumActiveSetModes> names = {
      "none", "both_arms", "left_arm", "right_arm", "single_link"};
  char buf[160];
  out << "draws " << rep.draws << "\n";
  out << "active-set mode fractions\n";
  for (std::size_t m = 0; m < names.size(); ++m) {
    std::snprintf(buf, sizeof buf, "  %-12s %.5f  (%zu)\n", names[m],
                  rep.mode_fraction(static_cast<forcefield::ActiveSetMode>(m)), rep.mode_counts[m]);
    out << buf;
  }
  out << "link activation fractions\n";
  for (std::size_t l = 0; l < kNumLinks; ++l) {
    std::snprintf(buf, sizeof buf, "  %-12s %.5f\n", std::string(kLinkNames[l]).c_str(),
                  static_cast<double>(rep.link_counts[l]) / static_cast<double>(rep.draws));
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "stiffness N/m  samples %zu  min %.4f  mean %.4f  max %.4f\n", rep.k_samples,
                rep.k_min, rep.k_mean, rep.k_max);
  out << buf << "stiffness histogram (10 equal bins)\n ";
  for (auto c : rep.k_histogram) out << ' ' << c;
  out << '\n';
  std::snprintf(buf, sizeof buf, "tau_safe N     min %.4f  mean %.4f  max %.4f\n", rep.tau_min, rep.tau_mean,
                rep.tau_max);
  out << buf;
}

inline void print_hug(const hug::HugResult& r, std::ostream& out) {
  char buf[160];
  out << "q";
  for (Eigen::Index j = 0; j < r.q.size(); ++j) {
    std::snprintf(buf, sizeof buf, " %.9g", r.q[j]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "\nbase %.9g %.9g %.9g\ncost %.9g\niterations %d\nstart %zu\n", r.base.x,
                r.base.y, r.base.psi, r.cost, r.iterations, r.winning_start);
  out << buf;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Compliant reference-dynamics simulator", "gentle"};
  app.require_subcommand(1);

  std::string scenario_path, out_path;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one episode and write its trace CSV");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_path, "Trace output path (default: stdout)");

  std::string config_path;
  std::size_t draws = 100000;
  auto* sample = app.add_subcommand("sample-forces", "Summarize the interaction sampling distributions");
  sample->add_option("config", config_path, "Scenario file supplying [forces] and [safety]")->required();
  sample->add_option("--draws", draws, "Number of intervals to draw");
  sample->add_option("--seed", seed, "Override the scenario seed");

  std::string model_path, targets_path;
  int restarts = 8;
  std::uint64_t hug_seed = 0;
  auto* opt = app.add_subcommand("optimize-hug", "Fit arm joints and base pose to waist targets");
  opt->add_option("model", model_path, "Model file")->required();
  opt->add_option("targets", targets_path, "Targets file")->required();
  opt->add_option("--restarts", restarts, "Random restarts")->check(CLI::NonNegativeNumber);
  opt->add_option("--seed", hug_seed, "Restart seed");

  std::string clip_path;
  auto* validate = app.add_subcommand("validate-clip", "Check a motion clip file");
  validate->add_option("clip", clip_path, "Clip file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*run) {
      auto sc = harness::load_scenario_file(scenario_path);
      if (seed) sc.seed = *seed;
      const auto trace = harness::run_episode(sc);
      for (const auto& w : trace.warnings) err << "warning: " << w << '\n';
      std::size_t bytes = 0;
      if (out_path.empty()) {
        bytes = harness::write_trace(trace, out);
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
        bytes = harness::write_trace(trace, f);
      }
      err << "wrote " << trace.rows.size() << " rows (" << bytes << " bytes)\n";
    } else if (*sample) {
      auto sc = harness::load_scenario_file(config_path);
      if (seed) sc.seed = *seed;
      print_report(sample_forces(sc, draws), out);
    } else if (*opt) {
      const auto model = hug::parse_file(model_path, hug::parse_model);
      const auto targets = hug::parse_file(targets_path, hug::parse_hug_targets);
      hug::OptimizeOptions o;
      o.restarts = restarts;
      o.seed = hug_seed;
      print_hug(hug::optimize_hug(model.model, targets, model.model.q, model.base_init, o), out);
    } else if (*validate) {
      const auto clip = motion::load_clip_file(clip_path);
      out << clip.name << ": " << clip.frames.size() << " frames at " << clip.frame_rate << " Hz ("
          << clip.duration() << " s)" << (clip.joints.empty() ? "" : ", with joint values") << '\n';
      for (const auto& w : clip.warnings) out << "warning: " << w << '\n';
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace gentle::cli

#endif  // GENTLE_CLI_HPP_
