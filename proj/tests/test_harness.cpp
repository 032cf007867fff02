// Tests for the experiment harness: serialization round-trips, determinism
// across reruns and worker counts, the noise/field sweep drivers on exactly
// solvable operating points, and threshold estimation on synthetic curve
// families with known crossings.

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qcnn/harness.hpp"

namespace {

using qcnn::ExperimentConfig;
using qcnn::ExperimentMode;
using qcnn::SweepResult;
using qcnn::SweepRow;

bool rows_equal(const SweepResult& a, const SweepResult& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const SweepRow &x = a.rows[i], &y = b.rows[i];
    if (x.sweep_value != y.sweep_value || x.layer != y.layer ||
        x.basis != y.basis || x.mean != y.mean || x.std_error != y.std_error ||
        x.n != y.n)
      return false;
  }
  return true;
}

const SweepRow* find_row(const SweepResult& r, double value, int layer,
                         const std::string& basis) {
  for (const auto& row : r.rows)
    if (row.sweep_value == value && row.layer == layer && row.basis == basis)
      return &row;
  return nullptr;
}

// Synthetic final-layer curves M_d(p) = tanh(k_d (p0 - p)): every depth pair
// crosses at exactly p0 (where all curves vanish), steeper for deeper d.
SweepResult synthetic_threshold_curves(const std::vector<int>& depths,
                                       const std::vector<double>& grid,
                                       double p0) {
  SweepResult r;
  r.add_meta("mode", "threshold");
  for (int d : depths)
    for (double p : grid) {
      SweepRow row;
      row.sweep_value = p;
      row.layer = d;
      row.basis = "X";
      row.mean = std::tanh(80.0 * d * (p0 - p));
      row.std_error = 0.0;
      row.n = 1;
      r.rows.push_back(row);
    }
  return r;
}

}  // namespace

TEST_CASE("format_double and parse_double round-trip exactly") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 0.0228, 2.0 / 3.0, 1e-12, 123456.789,
                   -0.9999999999999999}) {
    std::string s = qcnn::format_double(v);
    REQUIRE(qcnn::parse_double(s) == v);
  }
  REQUIRE_THROWS_AS(qcnn::parse_double("12x"), std::runtime_error);
  REQUIRE_THROWS_AS(qcnn::parse_int("3.5"), std::runtime_error);
}

TEST_CASE("CSV and JSON serialization round-trip a real sweep") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::NoiseSweep;
  cfg.depth = 2;
  cfg.grid = {0.0, 0.01, 0.05};
  cfg.samples = 40;
  cfg.p_x = 0.01;
  cfg.seed = 7;
  SweepResult r = qcnn::run_noise_sweep(cfg);
  REQUIRE(r.rows.size() == 3 * 3 * 3);  // 3 points x 3 layers x 3 bases

  const std::string csv = qcnn::render_csv(r);
  SweepResult r2 = qcnn::parse_csv(csv);
  REQUIRE(rows_equal(r, r2));
  REQUIRE(r2.metadata == r.metadata);
  REQUIRE(qcnn::render_csv(r2) == csv);

  const std::string json = qcnn::render_json(r);
  SweepResult r3 = qcnn::parse_json(json);
  REQUIRE(rows_equal(r, r3));
  REQUIRE(r3.metadata == r.metadata);
  REQUIRE(qcnn::render_json(r3) == json);

  REQUIRE(qcnn::render_results(r, "csv") == csv);
  REQUIRE(qcnn::render_results(r, "json") == json);
  REQUIRE_THROWS_AS(qcnn::render_results(r, "yaml"), std::invalid_argument);

  REQUIRE_THROWS_AS(qcnn::parse_csv("no header\n"), std::runtime_error);
  REQUIRE_THROWS_AS(qcnn::parse_csv("sweep_value,layer,basis,mean,stderr,n\n1,2\n"),
                    std::runtime_error);
}

TEST_CASE("parallel_for covers every index exactly once, any worker count") {
  for (int threads : {1, 2, 7}) {
    std::vector<std::atomic<int>> hits(101);
    for (auto& h : hits) h = 0;
    qcnn::parallel_for(101, threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) REQUIRE(h == 1);
  }
  // Exceptions from workers surface to the caller.
  REQUIRE_THROWS_AS(qcnn::parallel_for(8, 4,
                                       [](std::size_t i) {
                                         if (i == 5)
                                           throw std::runtime_error("boom");
                                       }),
                    std::runtime_error);
}

TEST_CASE("noise sweep is deterministic and thread-count invariant") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::NoiseSweep;
  cfg.depth = 2;
  cfg.grid = {0.01, 0.03};
  cfg.samples = 60;
  cfg.p_x = 0.02;
  cfg.seed = 11;
  cfg.threads = 1;
  SweepResult a = qcnn::run_noise_sweep(cfg);
  SweepResult b = qcnn::run_noise_sweep(cfg);
  REQUIRE(qcnn::render_csv(a) == qcnn::render_csv(b));

  cfg.threads = 4;
  SweepResult c = qcnn::run_noise_sweep(cfg);
  REQUIRE(qcnn::render_csv(a) == qcnn::render_csv(c));

  ExperimentConfig changed = cfg;
  changed.seed = 12;
  REQUIRE(qcnn::render_csv(qcnn::run_noise_sweep(changed)) != qcnn::render_csv(a));
}

TEST_CASE("noiseless sweep reads +1 at every layer; saturated noise scrambles") {
  ExperimentConfig cfg;
  cfg.depth = 2;
  cfg.grid = {0.0};
  cfg.samples = 25;
  cfg.seed = 3;
  SweepResult r = qcnn::run_noise_sweep(cfg);
  for (const auto& row : r.rows) {
    REQUIRE(row.mean == 1.0);
    REQUIRE(row.std_error == 0.0);
    REQUIRE(row.n == 25);
  }

  // p_z = 1/2 randomizes every plaquette parity: the depth-2 X readout at
  // layer 0 averages near 0 (81 fair bits per sample).
  ExperimentConfig noisy = cfg;
  noisy.grid = {0.5};
  noisy.samples = 400;
  SweepResult s = qcnn::run_noise_sweep(noisy);
  const SweepRow* x0 = find_row(s, 0.5, 0, "X");
  REQUIRE(x0 != nullptr);
  REQUIRE(std::abs(x0->mean) < 5.0 / std::sqrt(81.0 * 400.0) + 0.02);
  // Z-basis stays clean: p_x = 0 means no vertex violations at all.
  const SweepRow* z0 = find_row(s, 0.5, 0, "Z");
  REQUIRE(z0->mean == 1.0);
}

TEST_CASE("X-basis outputs are independent of the bit-flip rate") {
  // Phase-flip masks are keyed only by (seed, z-point, sample), so the
  // plaquette-side results must be bit-identical for any p_x.
  ExperimentConfig cfg;
  cfg.depth = 2;
  cfg.grid = {0.01, 0.02};
  cfg.samples = 50;
  cfg.seed = 21;
  cfg.p_x = 0.0;
  SweepResult a = qcnn::run_noise_sweep(cfg);
  cfg.p_x = 0.08;
  SweepResult b = qcnn::run_noise_sweep(cfg);
  for (const auto& row : a.rows) {
    if (row.basis != "X") continue;
    const SweepRow* other = find_row(b, row.sweep_value, row.layer, "X");
    REQUIRE(other != nullptr);
    REQUIRE(other->mean == row.mean);
    REQUIRE(other->std_error == row.std_error);
  }
}

TEST_CASE("sweep drivers validate their configuration") {
  ExperimentConfig cfg;
  cfg.grid = {};
  REQUIRE_THROWS_AS(qcnn::run_noise_sweep(cfg), std::invalid_argument);
  cfg.grid = {0.01};
  cfg.depth = 0;
  REQUIRE_THROWS_AS(qcnn::run_noise_sweep(cfg), std::invalid_argument);
  cfg.depth = 8;  // 2*3^16 grid bits, above the cap below
  cfg.max_grid_bits = 1 << 20;
  REQUIRE_THROWS_AS(qcnn::run_noise_sweep(cfg), std::invalid_argument);

  ExperimentConfig field;
  field.mode = ExperimentMode::FieldSweep;
  field.grid = {0.1};
  field.depth = 2;  // 162 qubits, far past the exact-diagonalization cap
  REQUIRE_THROWS_AS(qcnn::run_field_sweep(field), std::invalid_argument);

  ExperimentConfig thr;
  thr.mode = ExperimentMode::Threshold;
  thr.grid = {0.01, 0.02};
  thr.depths = {3};
  REQUIRE_THROWS_AS(qcnn::run_threshold_scan(thr), std::invalid_argument);
  thr.depths = {3, 3};
  REQUIRE_THROWS_AS(qcnn::run_threshold_scan(thr), std::invalid_argument);
}

TEST_CASE("field sweep at zero field reads +1 exactly in both bases") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::FieldSweep;
  cfg.depth = 1;
  cfg.grid = {0.0};
  cfg.samples = 30;
  cfg.seed = 5;
  cfg.tol = 1e-10;
  SweepResult r = qcnn::run_field_sweep(cfg);
  REQUIRE_FALSE(r.rows.empty());
  for (const auto& row : r.rows) {
    INFO("layer " << row.layer << " basis " << row.basis);
    REQUIRE(row.mean == 1.0);
    REQUIRE(row.std_error == 0.0);
  }
}

TEST_CASE("field sweep is deterministic and seed-sensitive at finite field") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::FieldSweep;
  cfg.depth = 1;
  cfg.grid = {0.4};
  cfg.samples = 40;
  cfg.seed = 9;
  cfg.threads = 1;
  SweepResult a = qcnn::run_field_sweep(cfg);
  cfg.threads = 3;
  SweepResult b = qcnn::run_field_sweep(cfg);
  REQUIRE(qcnn::render_csv(a) == qcnn::render_csv(b));
  // Without a transverse field the vertex parities are conserved, so every
  // computational-basis snapshot satisfies them and the Z-basis readout is
  // pinned at exactly +1 even at finite h_z...
  const SweepRow* z0 = find_row(a, 0.4, 0, "Z");
  REQUIRE(z0 != nullptr);
  REQUIRE(z0->mean == 1.0);
  REQUIRE(z0->std_error == 0.0);
  // ...while the longitudinal field disorders the plaquette sector, giving
  // real fluctuations in the X-basis readout.
  const SweepRow* x0 = find_row(a, 0.4, 0, "X");
  REQUIRE(x0 != nullptr);
  REQUIRE(x0->mean < 1.0);
  REQUIRE(x0->std_error > 0.0);
  // A different seed draws different snapshots.
  cfg.seed = 10;
  SweepResult c = qcnn::run_field_sweep(cfg);
  REQUIRE(qcnn::render_csv(a) != qcnn::render_csv(c));
}

TEST_CASE("snapshot corruption only affects the matching basis") {
  ExperimentConfig clean;
  clean.mode = ExperimentMode::FieldSweep;
  clean.depth = 1;
  clean.grid = {0.2};
  clean.samples = 40;
  clean.seed = 13;
  SweepResult base = qcnn::run_field_sweep(clean);

  ExperimentConfig corrupted = clean;
  corrupted.p_x = 0.2;  // bit flips corrupt Z-basis snapshots only
  SweepResult r = qcnn::run_field_sweep(corrupted);
  const SweepRow* zc = find_row(r, 0.2, 0, "Z");
  const SweepRow* z0 = find_row(base, 0.2, 0, "Z");
  REQUIRE(zc->mean != z0->mean);
  const SweepRow* xc = find_row(r, 0.2, 0, "X");
  const SweepRow* x0 = find_row(base, 0.2, 0, "X");
  REQUIRE(xc->mean == x0->mean);  // X side untouched by p_x
}

TEST_CASE("threshold estimation recovers a common crossing exactly") {
  const std::vector<double> grid = {0.015, 0.0165, 0.018, 0.0195, 0.021,
                                    0.0225, 0.024, 0.0255, 0.027, 0.0285, 0.03};
  const double p0 = 0.0228;
  SweepResult curves = synthetic_threshold_curves({3, 4, 5}, grid, p0);
  qcnn::ThresholdEstimate est = qcnn::estimate_threshold(curves);
  REQUIRE(est.crossings.size() == 2);  // successive depth pairs (3,4), (4,5)
  REQUIRE(est.value == Catch::Approx(p0).margin(1e-4));
  REQUIRE(est.spread < 1e-4);
  for (double c : est.crossings) REQUIRE(c == Catch::Approx(p0).margin(1e-4));
}

TEST_CASE("threshold estimation rejects degenerate inputs") {
  const std::vector<double> grid = {0.01, 0.02, 0.03};

  // Curves that never cross (ordered uniformly) have no threshold.
  SweepResult mono;
  for (int d : {3, 4})
    for (double p : grid) {
      SweepRow row;
      row.sweep_value = p;
      row.layer = d;
      row.basis = "X";
      row.mean = d == 3 ? 0.9 - p : 0.5 - p;  // parallel, never equal
      row.n = 1;
      mono.rows.push_back(row);
    }
  REQUIRE_THROWS_AS(qcnn::estimate_threshold(mono), std::runtime_error);

  // A single depth cannot define a crossing.
  SweepResult single = synthetic_threshold_curves({3}, grid, 0.02);
  REQUIRE_THROWS_AS(qcnn::estimate_threshold(single), std::invalid_argument);

  // Duplicate points are a data error, not something to average away.
  SweepResult dup = synthetic_threshold_curves({3, 4}, grid, 0.02);
  dup.rows.push_back(dup.rows.front());
  REQUIRE_THROWS_AS(qcnn::estimate_threshold(dup), std::invalid_argument);

  // Mismatched grids between depths are rejected.
  SweepResult mixed = synthetic_threshold_curves({3}, grid, 0.02);
  SweepResult other = synthetic_threshold_curves({4}, {0.01, 0.025, 0.03}, 0.02);
  for (auto& row : other.rows) mixed.rows.push_back(row);
  REQUIRE_THROWS_AS(qcnn::estimate_threshold(mixed), std::invalid_argument);
}

TEST_CASE("threshold scan merges final-layer rows from every depth") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Threshold;
  cfg.depths = {1, 2};
  cfg.grid = {0.0, 0.05};
  cfg.samples = 30;
  cfg.seed = 17;
  SweepResult r = qcnn::run_threshold_scan(cfg);
  // 2 depths x 2 points x 3 bases, final layer only.
  REQUIRE(r.rows.size() == 2 * 2 * 3);
  for (int d : {1, 2})
    for (double p : {0.0, 0.05})
      REQUIRE(find_row(r, p, d, "X") != nullptr);
  // The merged table must agree with each per-depth sweep's final layer.
  for (int d : {1, 2}) {
    ExperimentConfig sub = cfg;
    sub.mode = ExperimentMode::NoiseSweep;
    sub.depth = d;
    SweepResult full = qcnn::run_noise_sweep(sub);
    for (double p : {0.0, 0.05}) {
      const SweepRow* merged = find_row(r, p, d, "X");
      const SweepRow* direct = find_row(full, p, d, "X");
      REQUIRE(merged->mean == direct->mean);
      REQUIRE(merged->std_error == direct->std_error);
    }
  }
}

TEST_CASE("run_verify reports structural checks on stdout") {
  std::ostringstream os;
  bool ok = qcnn::run_verify(os, {3});
  REQUIRE(ok);
  const std::string out = os.str();
  REQUIRE(out.find("[ok]") != std::string::npos);
  REQUIRE(out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("run_experiment dispatches by mode") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::NoiseSweep;
  cfg.depth = 1;
  cfg.grid = {0.0};
  cfg.samples = 5;
  SweepResult r = qcnn::run_experiment(cfg);
  REQUIRE_FALSE(r.rows.empty());
  bool saw_mode = false;
  for (const auto& [k, v] : r.metadata)
    if (k == "mode" && v == "noise-sweep") saw_mode = true;
  REQUIRE(saw_mode);
}
