// Copyright 2026 The qcnn2d authors
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

// Command-line driver for the toric-code phase-recognition toolkit.
//
// Subcommands:
//   verify         structural checks of the noiseless pipeline (exit 0 iff ok)
//   noise-sweep    sweep phase-flip rate p_z on noisy stabilizer syndromes
//   field-sweep    sweep longitudinal field h_z over exact ground states
//   multicritical  sweep the combined-field parameter with detuned preparation
//   threshold      noise sweeps at several depths + crossing estimate

#include <cmath>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcnn/harness.hpp"

namespace {

// Accepts either "start:stop:step" (inclusive endpoints) or a comma-separated
// list of values.
std::vector<double> parse_grid_spec(const std::string& spec) {
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos || spec.find(':', c2 + 1) != std::string::npos)
      throw std::runtime_error("--grid expects start:stop:step, got '" + spec + "'");
    const double start = qcnn::parse_double(spec.substr(0, c1));
    const double stop = qcnn::parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = qcnn::parse_double(spec.substr(c2 + 1));
    if (step <= 0.0) throw std::runtime_error("--grid step must be positive");
    if (stop < start) throw std::runtime_error("--grid stop must be >= start");
    const long count = std::lround((stop - start) / step) + 1;
    if (count < 1 || count > 1000000)
      throw std::runtime_error("--grid produces an unreasonable point count");
    values.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
      values.push_back(start + static_cast<double>(i) * step);
    // Guard against a rounded count overshooting the requested endpoint.
    while (!values.empty() && values.back() > stop + step * 0.5) values.pop_back();
  } else {
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      auto comma = spec.find(',', pos);
      if (comma == std::string::npos) comma = spec.size();
      values.push_back(qcnn::parse_double(spec.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  if (values.empty()) throw std::runtime_error("--grid produced no values");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D toric-code phase recognition: simulators, sweeps, and checks"};
  app.require_subcommand(1);

  qcnn::ExperimentConfig cfg;
  std::string grid_spec;

  auto add_output_opts = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Master RNG seed")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "Samples per sweep point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out_path, "Output file path (default: stdout)");
    sub->set_config("--config", "", "Read options from an INI/TOML file");
  };

  CLI::App* verify = app.add_subcommand(
      "verify", "Check circuit identities, syndrome maps, and logical erasure");

  CLI::App* noise = app.add_subcommand(
      "noise-sweep", "Sweep p_z on independently sampled X/Z error patterns");
  noise->add_option("--depth", cfg.depth, "Network depth (lattice side 3^depth)")
      ->check(CLI::PositiveNumber);
  noise->add_option("--grid", grid_spec, "p_z grid: start:stop:step or comma list");
  noise->add_option("--px", cfg.p_x, "Fixed bit-flip rate p_x")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_output_opts(noise);

  CLI::App* field = app.add_subcommand(
      "field-sweep", "Sweep h_z over exact perturbed-toric-code ground states");
  field->add_option("--depth", cfg.depth, "Network depth (only 1 fits exact solving)")
      ->check(CLI::PositiveNumber);
  field->add_option("--grid", grid_spec, "h_z grid: start:stop:step or comma list");
  field->add_option("--hx", cfg.h_x, "Fixed transverse field h_x")
      ->capture_default_str();
  field->add_option("--penalty", cfg.penalty, "Loop-bias strength for state preparation")
      ->capture_default_str();
  field->add_option("--px", cfg.p_x, "Snapshot bit-flip corruption rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  field->add_option("--pz", cfg.p_z, "Snapshot phase-flip corruption rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  field->add_option("--tol", cfg.tol, "Eigensolver residual tolerance")
      ->capture_default_str();
  add_output_opts(field);

  CLI::App* multi = app.add_subcommand(
      "multicritical", "Sweep h_x=h_z=h with detuned two-stage preparation");
  multi->add_option("--depth", cfg.depth, "Network depth (only 1 fits exact solving)")
      ->check(CLI::PositiveNumber);
  multi->add_option("--grid", grid_spec, "h grid: start:stop:step or comma list");
  multi->add_option("--delta", cfg.delta, "Field detuning for the preparation stage")
      ->capture_default_str();
  multi->add_option("--penalty", cfg.penalty, "Loop-bias strength for state preparation")
      ->capture_default_str();
  multi->add_option("--px", cfg.p_x, "Snapshot bit-flip corruption rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  multi->add_option("--pz", cfg.p_z, "Snapshot phase-flip corruption rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  multi->add_option("--tol", cfg.tol, "Eigensolver residual tolerance")
      ->capture_default_str();
  add_output_opts(multi);

  CLI::App* thresh = app.add_subcommand(
      "threshold", "Estimate the p_z threshold from crossings of depth curves");
  thresh->add_option("--depth", cfg.depths, "Depths to compare (comma list)")
      ->delimiter(',')
      ->capture_default_str();
  thresh->add_option("--grid", grid_spec, "p_z grid: start:stop:step or comma list");
  thresh->add_option("--px", cfg.p_x, "Fixed bit-flip rate p_x")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_output_opts(thresh);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const bool ok = qcnn::run_verify(std::cout);
      std::cout << (ok ? "verification passed" : "verification FAILED") << '\n';
      return ok ? 0 : 1;
    }

    if (noise->parsed()) {
      cfg.mode = qcnn::ExperimentMode::NoiseSweep;
      if (grid_spec.empty()) grid_spec = "0.015:0.030:0.0015";
    } else if (field->parsed()) {
      cfg.mode = qcnn::ExperimentMode::FieldSweep;
      if (field->count("--depth") == 0) cfg.depth = 1;
      if (grid_spec.empty()) grid_spec = "0.0:1.0:0.1";
    } else if (multi->parsed()) {
      cfg.mode = qcnn::ExperimentMode::Multicritical;
      if (multi->count("--depth") == 0) cfg.depth = 1;
      if (grid_spec.empty()) grid_spec = "0.20:0.50:0.025";
    } else if (thresh->parsed()) {
      cfg.mode = qcnn::ExperimentMode::Threshold;
      if (grid_spec.empty()) grid_spec = "0.015:0.030:0.0015";
    }
    cfg.grid = parse_grid_spec(grid_spec);

    qcnn::SweepResult result = qcnn::run_experiment(cfg);

    int exit_code = 0;
    if (cfg.mode == qcnn::ExperimentMode::Threshold) {
      try {
        qcnn::ThresholdEstimate est = qcnn::estimate_threshold(result);
        result.add_meta("threshold_estimate", qcnn::format_double(est.value));
        result.add_meta("threshold_spread", qcnn::format_double(est.spread));
        std::string crossings;
        for (std::size_t i = 0; i < est.crossings.size(); ++i) {
          if (i) crossings += ' ';
          crossings += qcnn::format_double(est.crossings[i]);
        }
        result.add_meta("threshold_crossings", crossings);
        std::cerr << "threshold estimate: " << qcnn::format_double(est.value)
                  << " (spread " << qcnn::format_double(est.spread) << ")\n";
      } catch (const std::exception& e) {
        result.add_meta("threshold_error", e.what());
        std::cerr << "threshold estimation failed: " << e.what() << '\n';
        exit_code = 1;
      }
    }

    qcnn::emit_results(result, cfg.format, cfg.out_path);
    return exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
