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

#pragma once

// Experiment harness: configuration, sweep drivers, result serialization,
// and threshold estimation for the toric-code phase-recognition pipeline.
//
// Reproducibility contract: every stochastic quantity is drawn from a
// dedicated RNG stream derived from (master seed, purpose tag, indices).
// Per-sample results are written into preallocated slots and reduced in a
// fixed order, so output files are byte-identical across reruns with the
// same configuration and seed, regardless of the thread count.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "qcnn/bits.hpp"
#include "qcnn/circuit.hpp"
#include "qcnn/grid.hpp"
#include "qcnn/groundstate.hpp"
#include "qcnn/lattice.hpp"
#include "qcnn/pauli_frame.hpp"
#include "qcnn/pooling.hpp"
#include "qcnn/rng.hpp"
#include "qcnn/stats.hpp"
#include "qcnn/verification.hpp"

#include "json.hpp"

namespace qcnn {

// ---------------------------------------------------------------------------
// Stream tags (arbitrary fixed constants; changing them changes all outputs).
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kTagNoiseX = 0x584e4f4953ULL;    // bit-flip noise masks
inline constexpr std::uint64_t kTagNoiseZ = 0x5a4e4f4953ULL;    // phase-flip noise masks
inline constexpr std::uint64_t kTagSnapshotZ = 0x5a534e4150ULL; // Z-basis snapshot draws
inline constexpr std::uint64_t kTagSnapshotX = 0x58534e4150ULL; // X-basis snapshot draws
inline constexpr std::uint64_t kTagCorruptX = 0x58434f5252ULL;  // bit-flip corruption of snapshots
inline constexpr std::uint64_t kTagCorruptZ = 0x5a434f5252ULL;  // phase-flip corruption of snapshots

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class ExperimentMode { Verify, NoiseSweep, FieldSweep, Multicritical, Threshold };

inline const char* mode_name(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::Verify: return "verify";
    case ExperimentMode::NoiseSweep: return "noise-sweep";
    case ExperimentMode::FieldSweep: return "field-sweep";
    case ExperimentMode::Multicritical: return "multicritical";
    case ExperimentMode::Threshold: return "threshold";
  }
  return "unknown";
}

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::NoiseSweep;

  // Network depth. Noise sweeps default to 3; exact-diagonalization sweeps
  // are limited to depth 1 (18 qubits) by the state-vector size cap.
  int depth = 3;
  // Depths compared by threshold estimation.
  std::vector<int> depths = {3, 4, 5};

  // Sweep grid (p_z for noise sweeps, h_z or the multicritical parameter for
  // field sweeps).
  std::vector<double> grid;

  int samples = 2000;

  // Noise rates. In noise sweeps p_x is held fixed while p_z is swept.
  // In field sweeps nonzero rates corrupt sampled snapshots (bit flips on
  // Z-basis snapshots with probability p_x per site, phase flips affecting
  // X-basis snapshots with probability p_z per site).
  double p_x = 0.0;
  double p_z = 0.0;

  // Field parameters for exact-diagonalization sweeps.
  double h_x = 0.0;
  double h_z = 0.0;
  double penalty = 1.0;
  double delta = 0.05; // loop-bias detuning for the multicritical protocol

  double tol = 1e-10;  // eigensolver residual tolerance
  std::uint64_t seed = 1;
  int threads = 1;

  std::string format = "csv"; // csv | json
  std::string out_path;       // empty: write to stdout

  // Guard against accidentally huge lattices: bits of syndrome-grid storage.
  std::int64_t max_grid_bits = std::int64_t(1) << 31;
};

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct SweepRow {
  double sweep_value = 0.0;
  int layer = 0;
  std::string basis; // "X", "Z", or "XZ" (per-sample product of the two)
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Ordered key/value pairs describing the run (mode, seed, fixed parameters,
  // warnings). Order is fixed by the producing code, so serialization is
  // deterministic.
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
};

// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad numeric field: '" + std::string(s) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad integer field: '" + std::string(s) + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string render_csv(const SweepResult& result) {
  std::string out;
  for (const auto& [key, value] : result.metadata) {
    out += "# ";
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  out += "sweep_value,layer,basis,mean,stderr,n\n";
  for (const SweepRow& row : result.rows) {
    out += format_double(row.sweep_value);
    out += ',';
    out += std::to_string(row.layer);
    out += ',';
    out += row.basis;
    out += ',';
    out += format_double(row.mean);
    out += ',';
    out += format_double(row.std_error);
    out += ',';
    out += std::to_string(row.n);
    out += '\n';
  }
  return out;
}

inline std::string render_json(const SweepResult& result) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : result.metadata) meta[key] = value;
  doc["metadata"] = std::move(meta);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SweepRow& row : result.rows) {
    nlohmann::ordered_json r;
    r["sweep_value"] = row.sweep_value;
    r["layer"] = row.layer;
    r["basis"] = row.basis;
    r["mean"] = row.mean;
    r["stderr"] = row.std_error;
    r["n"] = row.n;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

// Parses the CSV format produced by render_csv (round-trip safe).
inline SweepResult parse_csv(const std::string& text) {
  SweepResult result;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      auto eq = line.find('=', 2);
      if (eq == std::string::npos)
        throw std::runtime_error("malformed metadata line: " + line);
      result.add_meta(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    if (!header_seen) {
      if (line != "sweep_value,layer,basis,mean,stderr,n")
        throw std::runtime_error("unexpected CSV header: " + line);
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 6)
      throw std::runtime_error("expected 6 CSV fields, got " +
                               std::to_string(fields.size()) + ": " + line);
    SweepRow row;
    row.sweep_value = parse_double(fields[0]);
    row.layer = static_cast<int>(parse_int(fields[1]));
    row.basis = fields[2];
    row.mean = parse_double(fields[3]);
    row.std_error = parse_double(fields[4]);
    row.n = parse_int(fields[5]);
    result.rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::runtime_error("CSV header line missing");
  return result;
}

inline SweepResult parse_json(const std::string& text) {
  auto doc = nlohmann::ordered_json::parse(text);
  SweepResult result;
  for (auto it = doc.at("metadata").begin(); it != doc.at("metadata").end(); ++it)
    result.add_meta(it.key(), it.value().get<std::string>());
  for (const auto& r : doc.at("rows")) {
    SweepRow row;
    row.sweep_value = r.at("sweep_value").get<double>();
    row.layer = r.at("layer").get<int>();
    row.basis = r.at("basis").get<std::string>();
    row.mean = r.at("mean").get<double>();
    row.std_error = r.at("stderr").get<double>();
    row.n = r.at("n").get<std::int64_t>();
    result.rows.push_back(std::move(row));
  }
  return result;
}

inline std::string render_results(const SweepResult& result, const std::string& format) {
  if (format == "csv") return render_csv(result);
  if (format == "json") return render_json(result);
  throw std::invalid_argument("unknown output format: " + format);
}

// Writes results to `path`, or to `fallback` when path is empty.
inline void emit_results(const SweepResult& result, const std::string& format,
                         const std::string& path, std::ostream& fallback = std::cout) {
  const std::string text = render_results(result, format);
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// ---------------------------------------------------------------------------
// Parallel sample loop (deterministic: results land in per-index slots)
// ---------------------------------------------------------------------------

template <class Fn>
inline void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        // Strided assignment keeps per-thread work balanced without locks.
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Aggregation helpers
// ---------------------------------------------------------------------------

namespace detail {

inline void append_point_rows(SweepResult& result, double sweep_value,
                              const std::vector<LayerOutputs>& samples) {
  if (samples.empty()) return;
  const int depth = samples.front().depth();
  const char* bases[3] = {"X", "Z", "XZ"};
  for (int layer = 0; layer <= depth; ++layer) {
    for (int b = 0; b < 3; ++b) {
      std::vector<double> values;
      values.reserve(samples.size());
      for (const LayerOutputs& s : samples) {
        const auto& vec = (b == 0) ? s.x : (b == 1) ? s.z : s.combined;
        values.push_back(vec[static_cast<std::size_t>(layer)]);
      }
      SweepRow row;
      row.sweep_value = sweep_value;
      row.layer = layer;
      row.basis = bases[b];
      row.mean = mean_of(values);
      row.std_error = standard_error(values);
      row.n = static_cast<std::int64_t>(values.size());
      result.rows.push_back(std::move(row));
    }
  }
}

inline std::string grid_to_string(const std::vector<double>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) s += ' ';
    s += format_double(grid[i]);
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Noise sweep
// ---------------------------------------------------------------------------

// Per-sample pipeline outputs at one noise point. The bit-flip noise stream
// is keyed by sample index only, so for fixed p_x the X-type error masks are
// identical across sweep points; the phase-flip stream is additionally keyed
// by `z_point_index`. Consequence: X-basis outputs depend only on
// (seed, p_z, z_point_index, sample), never on p_x, and Z-basis outputs for a
// fixed p_x reuse the same error masks at every sweep point (variance
// reduction across the sweep).
inline std::vector<LayerOutputs> noise_point_samples(int depth, const NoiseModel& model,
                                                     int z_point_index, int samples,
                                                     std::uint64_t seed, int threads = 1) {
  if (depth < 1) throw std::invalid_argument("noise_point_samples: depth must be >= 1");
  if (samples < 1) throw std::invalid_argument("noise_point_samples: samples must be >= 1");
  validate(model);
  const int side = static_cast<int>(pow3(depth));
  const LatticeGeometry geom = build_torus(side, side);
  const PoolingSchedule schedule = build_pooling_schedule(depth);
  std::vector<LayerOutputs> slots(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    auto rng_x = make_stream(seed, kTagNoiseX, static_cast<std::uint64_t>(i));
    auto rng_z = make_stream(seed, kTagNoiseZ, static_cast<std::uint64_t>(z_point_index),
                             static_cast<std::uint64_t>(i));
    PauliFrame frame = sample_noise(model, geom, rng_x, rng_z);
    auto [plaq, vert] = syndromes_direct(frame, geom);
    slots[i] = run_pipeline(plaq, vert, schedule);
  });
  return slots;
}

inline int effective_samples(const ExperimentConfig& cfg, int depth, SweepResult* result) {
  if (depth >= 6 && cfg.samples > 200) {
    if (result)
      result->add_meta("warning",
                       "samples reduced to 200 at depth >= 6 (requested " +
                           std::to_string(cfg.samples) + ")");
    return 200;
  }
  return cfg.samples;
}

inline void check_grid_budget(const ExperimentConfig& cfg, int depth) {
  const std::int64_t bits = layer_qubit_count(depth, 0);
  if (bits > cfg.max_grid_bits)
    throw std::invalid_argument("depth " + std::to_string(depth) + " needs " +
                                std::to_string(bits) +
                                " syndrome bits, above the configured cap of " +
                                std::to_string(cfg.max_grid_bits));
}

// Sweeps p_z over cfg.grid at fixed p_x, running cfg.samples noisy shots per
// point through syndrome extraction and the full pooling pipeline.
inline SweepResult run_noise_sweep(const ExperimentConfig& cfg) {
  if (cfg.grid.empty()) throw std::invalid_argument("noise sweep: empty grid");
  if (cfg.depth < 1) throw std::invalid_argument("noise sweep: depth must be >= 1");
  check_grid_budget(cfg, cfg.depth);
  SweepResult result;
  result.add_meta("mode", mode_name(cfg.mode));
  result.add_meta("depth", std::to_string(cfg.depth));
  result.add_meta("lattice_side", std::to_string(pow3(cfg.depth)));
  result.add_meta("sweep_parameter", "p_z");
  result.add_meta("p_x", format_double(cfg.p_x));
  result.add_meta("seed", std::to_string(cfg.seed));
  const int samples = effective_samples(cfg, cfg.depth, &result);
  result.add_meta("samples", std::to_string(samples));
  result.add_meta("grid", detail::grid_to_string(cfg.grid));
  for (std::size_t ip = 0; ip < cfg.grid.size(); ++ip) {
    NoiseModel model{cfg.p_x, cfg.grid[ip]};
    auto samples_out = noise_point_samples(cfg.depth, model, static_cast<int>(ip),
                                           samples, cfg.seed, cfg.threads);
    detail::append_point_rows(result, cfg.grid[ip], samples_out);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Field sweep (exact diagonalization + snapshot sampling)
// ---------------------------------------------------------------------------

// Draws basis-measurement snapshots from a precomputed cumulative
// distribution, one uniform variate per snapshot.
class SnapshotSampler {
 public:
  SnapshotSampler(const std::vector<double>& state, Basis basis) {
    std::size_t dim = state.size();
    int n = 0;
    while ((std::size_t(1) << n) < dim) ++n;
    if ((std::size_t(1) << n) != dim)
      throw std::invalid_argument("SnapshotSampler: state dimension is not a power of two");
    n_bits_ = n;
    std::vector<double> amps = state;
    if (basis == Basis::X) walsh_hadamard_transform(amps);
    cdf_.resize(dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      acc += amps[i] * amps[i];
      cdf_[i] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-8)
      throw std::invalid_argument("SnapshotSampler: state is not normalized");
    cdf_.back() = 1.0;
  }

  BitVec draw(std::mt19937_64& rng) const {
    const double u = uniform_unit(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    if (idx >= cdf_.size()) idx = cdf_.size() - 1;
    BitVec bits(static_cast<std::size_t>(n_bits_));
    for (int q = 0; q < n_bits_; ++q)
      if ((idx >> q) & 1) bits.set(static_cast<std::size_t>(q), true);
    return bits;
  }

  int n_bits() const { return n_bits_; }

 private:
  int n_bits_ = 0;
  std::vector<double> cdf_;
};

namespace detail {

struct FieldPointParams {
  FieldParams stage1;
  FieldParams stage2;
};

inline FieldPointParams field_point_params(const ExperimentConfig& cfg,
                                           const LatticeGeometry& geom, double value) {
  FieldPointParams p;
  if (cfg.mode == ExperimentMode::Multicritical) {
    auto [s1, s2] = multicritical_init(geom, value, cfg.delta);
    s1.penalty = cfg.penalty;
    p.stage1 = s1;
    p.stage2 = s2;
  } else {
    p.stage1 = FieldParams{cfg.h_x, value, cfg.penalty};
    p.stage2 = FieldParams{cfg.h_x, value, 0.0};
  }
  return p;
}

}  // namespace detail

// Sweeps the longitudinal field h_z (or, in multicritical mode, the common
// field parameter) over cfg.grid. Each point prepares the exact ground state
// by the two-stage protocol (loop-penalized solve, then the penalty-free
// re-solve warm-started from stage 1), samples `samples` measurement
// snapshots in each basis, optionally applies sampling-noise corruption, maps
// snapshots to stabilizer-violation grids, and runs the pooling pipeline.
inline SweepResult run_field_sweep(const ExperimentConfig& cfg) {
  if (cfg.grid.empty()) throw std::invalid_argument("field sweep: empty grid");
  if (cfg.depth < 1) throw std::invalid_argument("field sweep: depth must be >= 1");
  const int side = static_cast<int>(pow3(cfg.depth));
  const LatticeGeometry geom = build_torus(side, side);
  if (geom.n_qubits() > kMaxExactQubits)
    throw std::invalid_argument(
        "field sweep: lattice has " + std::to_string(geom.n_qubits()) +
        " qubits, above the exact-diagonalization cap of " +
        std::to_string(kMaxExactQubits) + " (use depth 1)");
  const PoolingSchedule schedule = build_pooling_schedule(cfg.depth);

  SweepResult result;
  result.add_meta("mode", mode_name(cfg.mode));
  result.add_meta("depth", std::to_string(cfg.depth));
  result.add_meta("lattice_side", std::to_string(side));
  result.add_meta("sweep_parameter",
                  cfg.mode == ExperimentMode::Multicritical ? "h" : "h_z");
  if (cfg.mode == ExperimentMode::Multicritical)
    result.add_meta("delta", format_double(cfg.delta));
  else
    result.add_meta("h_x", format_double(cfg.h_x));
  result.add_meta("penalty", format_double(cfg.penalty));
  result.add_meta("p_x", format_double(cfg.p_x));
  result.add_meta("p_z", format_double(cfg.p_z));
  result.add_meta("seed", std::to_string(cfg.seed));
  result.add_meta("samples", std::to_string(cfg.samples));
  result.add_meta("tol", format_double(cfg.tol));
  result.add_meta("grid", detail::grid_to_string(cfg.grid));

  const bool corrupt = cfg.p_x > 0.0 || cfg.p_z > 0.0;
  if (corrupt) validate(NoiseModel{cfg.p_x, cfg.p_z});

  for (std::size_t ip = 0; ip < cfg.grid.size(); ++ip) {
    const double value = cfg.grid[ip];
    const auto params = detail::field_point_params(cfg, geom, value);
    GroundStateResult gs = solve_two_step(geom, params.stage1, params.stage2, cfg.tol);
    if (!gs.converged) {
      result.add_meta("warning.point." + format_double(value),
                      "eigensolver did not converge: " + gs.message);
      continue;
    }
    SnapshotSampler sampler_z(gs.vector, Basis::Z);
    SnapshotSampler sampler_x(gs.vector, Basis::X);

    std::vector<LayerOutputs> slots(static_cast<std::size_t>(cfg.samples));
    parallel_for(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t i) {
      auto rng_z = make_stream(cfg.seed, kTagSnapshotZ, static_cast<std::uint64_t>(ip),
                               static_cast<std::uint64_t>(i));
      auto rng_x = make_stream(cfg.seed, kTagSnapshotX, static_cast<std::uint64_t>(ip),
                               static_cast<std::uint64_t>(i));
      BitVec snap_z = sampler_z.draw(rng_z);
      BitVec snap_x = sampler_x.draw(rng_x);
      if (corrupt) {
        // Bit-flip errors toggle Z-basis readout; phase-flip errors toggle
        // X-basis readout.
        if (cfg.p_x > 0.0) {
          auto rng = make_stream(cfg.seed, kTagCorruptX, static_cast<std::uint64_t>(ip),
                                 static_cast<std::uint64_t>(i));
          BitVec mask(snap_z.size());
          fill_bernoulli(mask, cfg.p_x, rng);
          snap_z.xor_with(mask);
        }
        if (cfg.p_z > 0.0) {
          auto rng = make_stream(cfg.seed, kTagCorruptZ, static_cast<std::uint64_t>(ip),
                                 static_cast<std::uint64_t>(i));
          BitVec mask(snap_x.size());
          fill_bernoulli(mask, cfg.p_z, rng);
          snap_x.xor_with(mask);
        }
      }
      SyndromeGrid grid_z = snapshot_to_grid(snap_z, Basis::Z, geom);
      SyndromeGrid grid_x = snapshot_to_grid(snap_x, Basis::X, geom);
      slots[i] = run_pipeline(grid_x, grid_z, schedule);
    });
    detail::append_point_rows(result, value, slots);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Threshold estimation
// ---------------------------------------------------------------------------

struct ThresholdEstimate {
  double value = 0.0;   // mean of pairwise curve crossings
  double spread = 0.0;  // half-range of the crossings
  std::vector<double> crossings;
};

// Estimates the error-correction threshold from final-layer X-basis curves at
// two or more depths. The input follows the threshold-mode convention: each
// depth contributes rows whose `layer` equals that depth (the final pooling
// layer), all sharing one sweep grid. Curves at successive depths cross at
// the threshold: below it deeper networks converge toward +1, above it they
// collapse faster toward 0. Crossings are located by linear interpolation of
// the curve difference on the common grid.
inline ThresholdEstimate estimate_threshold(const SweepResult& result) {
  // layer -> (sweep_value -> mean), X basis only.
  std::map<int, std::map<double, double>> curves;
  for (const SweepRow& row : result.rows) {
    if (row.basis != "X") continue;
    auto [it, inserted] = curves[row.layer].emplace(row.sweep_value, row.mean);
    if (!inserted)
      throw std::invalid_argument("estimate_threshold: duplicate point for layer " +
                                  std::to_string(row.layer) + " at sweep value " +
                                  format_double(row.sweep_value));
  }
  if (curves.size() < 2)
    throw std::invalid_argument(
        "estimate_threshold: need final-layer curves from at least two depths, got " +
        std::to_string(curves.size()));
  // All curves must share the same grid.
  const auto& first_curve = curves.begin()->second;
  std::vector<double> grid;
  grid.reserve(first_curve.size());
  for (const auto& [v, m] : first_curve) grid.push_back(v);
  if (grid.size() < 2)
    throw std::invalid_argument("estimate_threshold: need at least two grid points");
  for (const auto& [layer, curve] : curves) {
    if (curve.size() != grid.size())
      throw std::invalid_argument("estimate_threshold: depth curves use different grids");
    std::size_t k = 0;
    for (const auto& [v, m] : curve)
      if (v != grid[k++])
        throw std::invalid_argument("estimate_threshold: depth curves use different grids");
  }

  ThresholdEstimate est;
  auto it = curves.begin();
  for (auto next = std::next(it); next != curves.end(); ++it, ++next) {
    const auto& shallow = it->second;
    const auto& deep = next->second;
    std::vector<double> diff;
    diff.reserve(grid.size());
    for (double v : grid) diff.push_back(shallow.at(v) - deep.at(v));
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double d0 = diff[k], d1 = diff[k + 1];
      if (d0 == 0.0 && d1 == 0.0) continue; // degenerate flat segment
      const bool sign_change = (d0 <= 0.0 && d1 > 0.0) || (d0 >= 0.0 && d1 < 0.0);
      if (!sign_change) continue;
      double cross;
      if (d0 == d1) continue;
      cross = grid[k] + (0.0 - d0) * (grid[k + 1] - grid[k]) / (d1 - d0);
      est.crossings.push_back(cross);
      break; // one crossing per depth pair: take the first
    }
  }
  if (est.crossings.empty())
    throw std::runtime_error("estimate_threshold: no crossing in range");
  est.value = mean_of(est.crossings);
  const auto [lo, hi] = std::minmax_element(est.crossings.begin(), est.crossings.end());
  est.spread = (*hi - *lo) / 2.0;
  return est;
}

// Runs a noise sweep at each depth in cfg.depths and merges the final-layer
// rows (layer == depth identifies the depth uniquely in the merged table).
inline SweepResult run_threshold_scan(const ExperimentConfig& cfg) {
  if (cfg.depths.size() < 2)
    throw std::invalid_argument("threshold scan: need at least two depths");
  if (cfg.grid.empty()) throw std::invalid_argument("threshold scan: empty grid");
  {
    std::vector<int> sorted = cfg.depths;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("threshold scan: duplicate depths");
  }
  SweepResult merged;
  merged.add_meta("mode", mode_name(cfg.mode));
  {
    std::string ds;
    for (std::size_t i = 0; i < cfg.depths.size(); ++i) {
      if (i) ds += ' ';
      ds += std::to_string(cfg.depths[i]);
    }
    merged.add_meta("depths", ds);
  }
  merged.add_meta("sweep_parameter", "p_z");
  merged.add_meta("p_x", format_double(cfg.p_x));
  merged.add_meta("seed", std::to_string(cfg.seed));
  merged.add_meta("grid", detail::grid_to_string(cfg.grid));
  for (int depth : cfg.depths) {
    ExperimentConfig sub = cfg;
    sub.mode = ExperimentMode::NoiseSweep;
    sub.depth = depth;
    SweepResult r = run_noise_sweep(sub);
    for (const auto& [key, value] : r.metadata)
      if (key == "warning" || key == "samples")
        merged.add_meta(key + ".depth" + std::to_string(depth), value);
    for (SweepRow& row : r.rows)
      if (row.layer == depth) merged.rows.push_back(std::move(row));
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Verification driver
// ---------------------------------------------------------------------------

// Runs the structural checks of the noiseless pipeline and reports each as a
// pass/fail line on `os`. Returns true only if every check passes.
inline bool run_verify(std::ostream& os, const std::vector<int>& sides = {3, 9}) {
  bool all_ok = true;
  auto report = [&](bool ok, const std::string& what) {
    os << (ok ? "[ok]   " : "[FAIL] ") << what << '\n';
    if (!ok) all_ok = false;
  };

  for (int side : sides) {
    const LatticeGeometry geom = build_torus(side, side);
    // 1. Noiseless circuit identity: preparing the ground state and applying
    //    the convolution yields deterministic all-zero readout.
    auto identity = verify_convolution_identity(geom);
    report(identity.passed,
           "convolution maps the prepared state to all-zero readout (" +
               std::to_string(side) + "x" + std::to_string(side) + ")" +
               (identity.passed ? "" : ": " + identity.detail));
    // 2. Logical erasure: the four noncontractible string operators leave no
    //    imprint on the readout.
    report(logical_erasure_ok(geom), "logical string operators are erased (" +
                                         std::to_string(side) + "x" + std::to_string(side) +
                                         ")");
  }

  // 3. Exhaustive single-error syndrome equivalence on the largest lattice:
  //    full tableau simulation, Pauli-frame conjugation, and the direct
  //    adjacency map must agree for every single-qubit X and Z error.
  {
    const int side = sides.empty() ? 9 : sides.back();
    const LatticeGeometry geom = build_torus(side, side);
    ConvolutionOracle oracle(geom);
    const GateSequence conv = build_convolution(geom);
    int mismatches = 0;
    int cases = 0;
    for (std::uint32_t q = 0; q < geom.n_qubits(); ++q) {
      for (PauliType type : {PauliType::X, PauliType::Z}) {
        ++cases;
        PauliFrame error = single_qubit_error(geom.n_qubits(), q, type);
        // Tableau oracle.
        BitVec tableau_bits = oracle.measurement_outcomes(error);
        // Pauli-frame propagation through the convolution.
        const PauliFrame frame = conjugate_through(error, conv);
        const BitVec& frame_bits = measurement_flips(frame);
        // Direct adjacency map (no circuit at all).
        BitVec direct_bits = expected_measurement_flips(error, geom);
        if (!(tableau_bits == frame_bits) || !(frame_bits == direct_bits)) ++mismatches;
      }
    }
    report(mismatches == 0,
           "single-error syndromes agree across tableau, frame, and adjacency map (" +
               std::to_string(cases) + " cases, " + std::to_string(side) + "x" +
               std::to_string(side) + ")" +
               (mismatches ? ": " + std::to_string(mismatches) + " mismatches" : ""));
  }

  // 4. The prepared state is the intended stabilizer state: all plaquette and
  //    vertex operators at +1 on the smallest lattice.
  {
    const LatticeGeometry geom = build_torus(3, 3);
    const GateSequence prep = build_prep_circuit(geom);
    Tableau tab(geom.n_qubits());
    std::mt19937_64 rng(12345);
    tab.apply(prep, rng);
    bool ok = true;
    for (int r = 0; r < geom.l2 && ok; ++r) {
      for (int c = 0; c < geom.l1 && ok; ++c) {
        for (StabilizerKind kind : {StabilizerKind::Plaquette, StabilizerKind::Vertex}) {
          PauliFrame op = stabilizer_frame(geom, StabilizerId{kind, r, c});
          if (tab.pauli_expectation(op.x_mask, op.z_mask) != 1) ok = false;
        }
      }
    }
    report(ok, "prepared state satisfies all stabilizers (3x3)");
  }

  return all_ok;
}

// ---------------------------------------------------------------------------
// Top-level dispatch
// ---------------------------------------------------------------------------

inline SweepResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case ExperimentMode::NoiseSweep: return run_noise_sweep(cfg);
    case ExperimentMode::FieldSweep:
    case ExperimentMode::Multicritical: return run_field_sweep(cfg);
    case ExperimentMode::Threshold: return run_threshold_scan(cfg);
    case ExperimentMode::Verify:
      throw std::invalid_argument("verify mode produces no sweep table");
  }
  throw std::logic_error("unreachable experiment mode");
}

}  // namespace qcnn
