// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.
//
//   acceptance [--regen]   --regen rewrites the golden files instead of
//                           comparing against them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecglong/assemble.hpp"
#include "ecglong/beat_store.hpp"
#include "ecglong/beat_synth.hpp"
#include "ecglong/delineate.hpp"
#include "ecglong/errors.hpp"
#include "ecglong/feature_model.hpp"
#include "ecglong/io.hpp"
#include "ecglong/metrics.hpp"
#include "ecglong/random.hpp"
#include "ecglong/signal.hpp"
#include "ecglong/tstr.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#ifndef ECGLONG_CLI_PATH
#define ECGLONG_CLI_PATH "ecglong"
#endif
#ifndef ECGLONG_GOLDEN_DIR
#define ECGLONG_GOLDEN_DIR "golden"
#endif

using namespace ecglong;
namespace stdfs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

Outcome metric_oracles() {
  const auto start = Clock::now();
  RandomSource rng(1001);
  int cases = 0;
  for (int rep = 0; rep < 1200; ++rep) {
    const std::size_t n = 1 + rng.uniform_int(6);
    const std::size_t m = 1 + rng.uniform_int(6);
    const auto a = testutil::random_vector(rng, n, -3, 3);
    const auto b = testutil::random_vector(rng, m, -3, 3);
    if (std::abs(dtw_distance(a, b) - oracle::dtw_bruteforce(a, b)) > 1e-9)
      return {false, "dtw mismatch at case " + std::to_string(rep)};
    if (std::abs(frechet_distance(a, b) - oracle::frechet_bruteforce(a, b)) > 1e-9)
      return {false, "frechet mismatch at case " + std::to_string(rep)};
    if (std::abs(ks_statistic(a, b) - oracle::ks_bruteforce(a, b)) > 1e-9)
      return {false, "ks mismatch at case " + std::to_string(rep)};
    const auto y = testutil::random_vector(rng, n, -3, 3);
    if (std::abs(wasserstein1(a, y) - oracle::wasserstein1_bruteforce(a, y)) > 1e-9)
      return {false, "wasserstein mismatch at case " + std::to_string(rep)};
    ++cases;
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return {false, "oracle sweep took " + fmt(elapsed) + " s"};
  return {true, std::to_string(cases) + " cases, " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------- criterion 2

Outcome matcher_optimality() {
  RandomSource rng(1002);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + rng.uniform_int(8);
    std::vector<std::string> schema;
    for (std::size_t k = 0; k < d; ++k) schema.push_back("f" + std::to_string(k));
    const std::size_t n = 2 + rng.uniform_int(999);
    std::vector<BeatRecord> beats;
    for (std::size_t i = 0; i < n; ++i) {
      BeatRecord b;
      b.id = static_cast<std::int64_t>(i);
      b.label = BeatLabel::Normal;
      b.waveform = {0.0, 1.0, 0.0};
      for (std::size_t k = 0; k < d; ++k) b.descriptors[schema[k]] = rng.normal();
      beats.push_back(std::move(b));
    }
    const auto store = build_store(std::move(beats), schema, BeatWindow{1, 1});
    FeatureVector target;
    target.label = BeatLabel::Normal;
    for (std::size_t k = 0; k < d; ++k) target.values.push_back(rng.normal());
    std::vector<double> weights;
    for (std::size_t k = 0; k < d; ++k) weights.push_back(0.1 + rng.uniform());
    const bool standardize = rep % 2 == 0;

    const auto rec = match_beat(target, schema, store, {weights, standardize}, CandidateMode::exhaustive());
    const auto expect = oracle::match_bruteforce(target, schema, store, weights, standardize);
    if (rec.beat_id != expect)
      return {false, "argmin mismatch at instance " + std::to_string(rep)};

    const double scale = 0.05 + 20.0 * rng.uniform();
    auto rescaled = weights;
    for (double& w : rescaled) w *= scale;
    const auto rec2 = match_beat(target, schema, store, {rescaled, standardize}, CandidateMode::exhaustive());
    if (rec2.beat_id != rec.beat_id)
      return {false, "weight rescaling changed the argmin at instance " + std::to_string(rep)};
  }
  return {true, "100 instances exact"};
}

// ---------------------------------------------------------------- criterion 3

Outcome assembly_round_trip() {
  // Normal-only source recording, the published matching-workflow setting.
  BeatSynthConfig cfg;
  cfg.window = BeatWindow{60, 120};
  const auto base = analytic_template(cfg.window, cfg.fs, BeatLabel::Normal);

  // R-R of 1000-1300 ms keeps the neighbouring QRS outside the 181-sample
  // window, so the sliced training beats are ghost-free; assembled windows
  // still overlap (spacing < window length), exercising the cross-fade.
  RandomSource src_rng(1003);
  std::vector<std::int64_t> r_positions;
  std::int64_t at = cfg.window.pre_r + 8;
  for (int i = 0; i < 300; ++i) {
    r_positions.push_back(at);
    at += std::llround((1000.0 + 300.0 * src_rng.uniform()) * cfg.fs / 1000.0);
  }
  Signal source;
  source.fs = cfg.fs;
  source.samples.assign(static_cast<std::size_t>(at + cfg.window.post_r + 1), 0.0);
  for (const std::int64_t r : r_positions) {
    const double gain = 0.9 + 0.2 * src_rng.uniform();
    for (std::size_t t = 0; t < base.size(); ++t)
      source.samples[static_cast<std::size_t>(r - cfg.window.pre_r + static_cast<std::int64_t>(t))] +=
          gain * base[t];
  }

  const auto rs = detect_r_peaks(source);
  std::vector<FiducialPoints> fiducials;
  std::vector<BeatLabel> labels;
  std::vector<std::vector<double>> waveforms;
  for (const std::int64_t r : rs) {
    if (r - cfg.window.pre_r < 0 || r + cfg.window.post_r >= source.length()) continue;
    fiducials.push_back(delineate(source, r));
    labels.push_back(BeatLabel::Normal);
    waveforms.push_back(slice_beat(source, r, cfg.window));
  }
  const auto features = extract_features(source, fiducials, labels);

  // Default 10,000-beat store from the same population.
  const auto model = fit_template(waveforms, BeatLabel::Normal, 5, cfg);
  RandomSource gen_rng(1004);
  const auto store = build_store(generate_beats(model, 10000, gen_rng), default_schema(), cfg.window);

  // 1000-row synthetic trajectory (normal-only workflow).
  const auto feature_model = fit_copula_var(features);
  RandomSource traj_rng(1005);
  auto trajectory = sample(feature_model, 1000, traj_rng);
  for (auto& row : trajectory.rows) row.label = BeatLabel::Normal;

  const auto assemble_start = Clock::now();
  const auto assembled =
      assemble(trajectory, store, {}, CandidateMode::sampled(16, 64, 1006), {}, cfg.fs);
  const double assemble_s = seconds_since(assemble_start);

  const auto found = detect_r_peaks(assembled.signal);
  if (found.size() != assembled.r_indices.size())
    return {false, "detector recovered " + std::to_string(found.size()) + " of " +
                       std::to_string(assembled.r_indices.size()) + " beats"};
  std::size_t rr_ok = 0;
  for (std::size_t i = 0; i + 1 < found.size(); ++i) {
    const std::int64_t target = assembled.r_indices[i + 1] - assembled.r_indices[i];
    rr_ok += std::llabs((found[i + 1] - found[i]) - target) <= 2 ? 1 : 0;
  }
  const double rr_rate = static_cast<double>(rr_ok) / static_cast<double>(found.size() - 1);

  const auto hist = match_histogram(assembled.matches, store.schema(), "R_Amp", ramp_histogram_edges());
  const std::size_t within = hist.counts[0] + hist.counts[1] + hist.counts[2];
  const double amp_rate = static_cast<double>(within) / static_cast<double>(assembled.matches.size());

  if (rr_rate < 0.99) return {false, "R-R recovery " + fmt(rr_rate) + " < 0.99"};
  if (amp_rate < 0.85) return {false, "R-amp within 0.03 mV " + fmt(amp_rate) + " < 0.85"};
  if (assemble_s >= 10.0) return {false, "assembly took " + fmt(assemble_s) + " s"};
  return {true, "R-R " + fmt(rr_rate) + ", R-amp " + fmt(amp_rate) + ", assemble " + fmt(assemble_s) + " s"};
}

// ---------------------------------------------------------------- criterion 4

Outcome feature_model_recovery() {
  const std::size_t d = 4, n = 5000;
  FeatureTrajectory traj;
  for (std::size_t k = 0; k < d; ++k) traj.schema.push_back("f" + std::to_string(k));
  RandomSource rng(1007);
  std::vector<double> state(d);
  const double coeff = 0.6;
  const double noise_std = std::sqrt(1.0 - coeff * coeff);
  for (double& z : state) z = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector row;
    row.values = state;
    traj.rows.push_back(std::move(row));
    for (double& z : state) z = coeff * z + noise_std * rng.normal();
  }

  const auto model = fit_copula_var(traj);
  for (std::size_t k = 0; k < d; ++k) {
    const double got = model.lag1_coeff(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    if (std::abs(got - coeff) > 0.1)
      return {false, "lag-1 diagonal " + fmt(got) + " not within 0.1 of 0.6"};
  }

  RandomSource srng(1008);
  const auto sampled = sample(model, 5000, srng);
  for (std::size_t k = 0; k < d; ++k) {
    const double ks = ks_statistic(sampled.column(k), traj.column(k));
    if (ks >= 0.05) return {false, "marginal KS " + fmt(ks) + " >= 0.05"};
  }
  const auto corr_train = feature_correlations(traj).pearson;
  const auto corr_sampled = feature_correlations(sampled).pearson;
  const double frob = (corr_sampled - corr_train).norm() / static_cast<double>(d);
  if (frob >= 0.1) return {false, "correlation Frobenius/d " + fmt(frob) + " >= 0.1"};
  return {true, "diag within 0.1, KS ok, Frobenius/d " + fmt(frob)};
}

// ---------------------------------------------------------------- criterion 5

Outcome beat_population_statistics() {
  BeatSynthConfig cfg;
  cfg.window = BeatWindow{60, 120};
  const auto train =
      testutil::jittered_population(analytic_template(cfg.window, cfg.fs, BeatLabel::Normal), 100, 0.15, 1009);
  const auto model = fit_template(train, BeatLabel::Normal, 3, cfg);

  RandomSource r1(1010), r2(1011);
  std::vector<std::vector<double>> p1, p2;
  for (const auto& b : generate_beats(model, 10000, r1)) p1.push_back(b.waveform);
  for (const auto& b : generate_beats(model, 10000, r2)) p2.push_back(b.waveform);

  const auto report = compare_beat_populations(p1, p2);
  if (report.avg_kl_divergence >= 0.05)
    return {false, "avg per-timestep KL " + fmt(report.avg_kl_divergence) + " >= 0.05"};

  const auto s1 = beat_population_summary(p1);
  const auto s2 = beat_population_summary(p2);
  double worst = 0.0;
  for (std::size_t t = 0; t < s1.mean.size(); ++t) {
    const double se = std::sqrt(s1.stddev[t] * s1.stddev[t] / 10000.0 + s2.stddev[t] * s2.stddev[t] / 10000.0);
    if (se > 0.0) worst = std::max(worst, std::abs(s1.mean[t] - s2.mean[t]) / se);
  }
  if (worst > 3.0) return {false, "mean beats differ by " + fmt(worst) + " stderr"};
  return {true, "avg KL " + fmt(report.avg_kl_divergence) + ", max mean gap " + fmt(worst) + " stderr"};
}

// ---------------------------------------------------------------- criterion 6

LabeledDataset acceptance_blobs(std::size_t per_class, double separation, std::uint64_t seed,
                                Provenance provenance) {
  LabeledDataset d;
  d.provenance = provenance;
  RandomSource rng(seed);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool abnormal = i % 2 == 1;
    d.rows.push_back({(abnormal ? separation : 0.0) + rng.normal(), rng.normal()});
    d.labels.push_back(abnormal ? BeatLabel::Abnormal : BeatLabel::Normal);
  }
  return d;
}

Outcome tstr_sanity_ladder() {
  // (a) oracle leak: identical data, identical reports.
  {
    const auto real = acceptance_blobs(100, 2.5, 1012, Provenance::Real);
    auto synth = real;
    synth.provenance = Provenance::Synthetic;
    const auto report = tstr_protocol(synth, real, default_classifier_suite(), 42);
    const std::size_t half = report.rows.size() / 2;
    for (std::size_t i = 0; i < half; ++i)
      if (report.rows[i].report.confusion != report.rows[i + half].report.confusion)
        return {false, "oracle-leak TSTR differs from TRTR for " + report.rows[i].spec.name()};
  }
  // (b) same generator: per-class recall within 0.1 of the baseline.
  {
    const auto real = acceptance_blobs(400, 3.0, 1013, Provenance::Real);
    const auto synth = acceptance_blobs(400, 3.0, 1014, Provenance::Synthetic);
    const auto report = tstr_protocol(synth, real, default_classifier_suite(), 43);
    const std::size_t half = report.rows.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      if (std::abs(report.rows[i].report.rec_normal - report.rows[i + half].report.rec_normal) >= 0.1)
        return {false, "normal recall gap for " + report.rows[i].spec.name()};
      if (std::abs(report.rows[i].report.rec_abnormal - report.rows[i + half].report.rec_abnormal) >= 0.1)
        return {false, "abnormal recall gap for " + report.rows[i].spec.name()};
    }
  }
  // (c) destroyed signal: shuffled labels land at the majority rate.
  {
    const auto real = acceptance_blobs(300, 0.5, 1015, Provenance::Real);
    auto shuffled = acceptance_blobs(300, 0.5, 1016, Provenance::Synthetic);
    RandomSource rng(1017);
    for (std::size_t i = 0; i + 1 < shuffled.labels.size(); ++i)
      std::swap(shuffled.labels[i], shuffled.labels[i + rng.uniform_int(shuffled.labels.size() - i)]);
    const auto report = tstr_protocol(shuffled, real, default_classifier_suite(), 44);
    for (const auto& row : report.rows)
      if (row.protocol == "TSTR" && std::abs(row.report.accuracy - 0.5) >= 0.1)
        return {false, "shuffled accuracy " + fmt(row.report.accuracy) + " for " + row.spec.name()};
  }
  // Confusion identities on 1000 random matrices, exact.
  {
    RandomSource rng(1018);
    for (int rep = 0; rep < 1000; ++rep) {
      std::array<std::array<std::size_t, 2>, 2> m{};
      for (auto& row : m)
        for (auto& cell : row) cell = rng.uniform_int(40);
      const double total = static_cast<double>(m[0][0] + m[0][1] + m[1][0] + m[1][1]);
      if (total == 0.0) continue;
      const auto r = report_from_confusion(m);
      const double trace = static_cast<double>(m[0][0] + m[1][1]);
      if (std::abs(r.accuracy - trace / total) > 1e-12) return {false, "accuracy identity violated"};
      const double tn = static_cast<double>(m[0][0]), fp = static_cast<double>(m[0][1]);
      const double fn = static_cast<double>(m[1][0]), tp = static_cast<double>(m[1][1]);
      const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
      const double mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
      if (std::abs(r.mcc - mcc) > 1e-12) return {false, "mcc formula violated"};
    }
  }
  return {true, "leak exact, recall gaps < 0.1, shuffled at majority, 1000 identities exact"};
}

// ---------------------------------------------------------------- criterion 7

std::string slurp(const stdfs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ECGLONG_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome pipeline_determinism() {
  const stdfs::path work = stdfs::temp_directory_path() / "ecglong_acceptance_c7";
  stdfs::remove_all(work);
  stdfs::create_directories(work);

  if (run_cli("demo-signal --out " + (work / "demo").string() + " --seed 7 --beats 240") != 0)
    return {false, "demo-signal failed"};
  std::ofstream(work / "cfg.json") << R"({"store": {"count_per_label": 1000}})";

  for (const char* run : {"run1", "run2"}) {
    const std::string out = (work / run).string();
    if (run_cli("pipeline --signal " + (work / "demo" / "signal.csv").string() + " --manifest " +
                (work / "demo" / "manifest.json").string() + " --labels " + (work / "demo" / "labels.csv").string() +
                " --outdir " + out + " --config " + (work / "cfg.json").string() + " --seed 99 --beats 200") != 0)
      return {false, std::string("pipeline failed in ") + run};
  }

  std::vector<std::string> files;
  for (const auto& entry : stdfs::recursive_directory_iterator(work / "run1"))
    if (entry.is_regular_file()) files.push_back(stdfs::relative(entry.path(), work / "run1").string());
  std::sort(files.begin(), files.end());
  if (files.size() < 15) return {false, "pipeline produced only " + std::to_string(files.size()) + " files"};
  for (const auto& f : files) {
    if (!stdfs::exists(work / "run2" / f)) return {false, f + " missing in second run"};
    if (slurp(work / "run1" / f) != slurp(work / "run2" / f)) return {false, f + " differs between runs"};
  }
  stdfs::remove_all(work);
  return {true, std::to_string(files.size()) + " files byte-identical (csv/json/svg)"};
}

// ---------------------------------------------------------------- criterion 8

struct GoldenArtifacts {
  stdfs::path dir;

  void build(const stdfs::path& out) const {
    stdfs::create_directories(out);

    // Tiny two-label store with hand-set descriptors, window (2, 3).
    const BeatWindow window{2, 3};
    std::vector<BeatRecord> beats;
    const double waves[4][6] = {{0, 0.2, 1.0, 0.1, -0.1, 0},
                                {0, 0.25, 0.9, 0.05, -0.05, 0},
                                {0, -0.1, 1.2, -0.4, 0.1, 0},
                                {0, -0.15, 1.25, -0.35, 0.05, 0}};
    for (int i = 0; i < 4; ++i) {
      BeatRecord b;
      b.id = i;
      b.label = i < 2 ? BeatLabel::Normal : BeatLabel::Abnormal;
      b.waveform.assign(waves[i], waves[i] + 6);
      const auto& schema = default_schema();
      for (std::size_t k = 0; k < schema.size(); ++k)
        b.descriptors[schema[k]] = 100.0 * static_cast<double>(k + 1) + 3.0 * i + 0.125;
      beats.push_back(std::move(b));
    }
    const auto store = build_store(std::move(beats), default_schema(), window);
    write_store(out / "store", store, 128);

    // Feature model fit on a deterministic generated trajectory.
    FeatureTrajectory traj;
    traj.schema = {"R_Int", "R_Amp"};
    RandomSource rng(4242);
    for (int i = 0; i < 80; ++i) {
      traj.rows.push_back({{800.0 + 40.0 * rng.normal(), 1.0 + 0.1 * rng.normal()},
                           i % 7 == 0 ? BeatLabel::Abnormal : BeatLabel::Normal});
    }
    const auto model = fit_feature_model(FeatureModelKind::CopulaVar, traj);
    write_feature_model(out / "model.json", model);

    // Trajectory sampled from that model at a fixed seed.
    RandomSource srng(42);
    write_trajectory_csv(out / "traj.csv", sample(model, 5, srng));

    // Metric report over two small fixed populations.
    std::vector<std::vector<double>> pa, pb;
    RandomSource prng(77);
    for (int i = 0; i < 12; ++i) {
      std::vector<double> row;
      for (int t = 0; t < 9; ++t) row.push_back(std::sin(0.5 * t) + 0.05 * prng.normal());
      pa.push_back(row);
      for (double& v : row) v += 0.02;
      pb.push_back(row);
    }
    write_metric_report_json(out / "report.json", compare_beat_populations(pa, pb));

    // Assembly report against the tiny store.
    FeatureTrajectory targets;
    targets.schema = default_schema();
    for (int i = 0; i < 3; ++i) {
      FeatureVector row;
      for (std::size_t k = 0; k < targets.schema.size(); ++k)
        row.values.push_back(100.0 * static_cast<double>(k + 1) + 1.5 * i);
      row.values[0] = 60.0;  // ~8 samples at 128 Hz
      row.label = i == 1 ? BeatLabel::Abnormal : BeatLabel::Normal;
      targets.rows.push_back(std::move(row));
    }
    const auto assembled = assemble(targets, store, {}, CandidateMode::exhaustive(), {}, 128);
    const auto hist = match_histogram(assembled.matches, store.schema(), "R_Amp", ramp_histogram_edges());
    write_assembly_report(out / "matches.json", assembled, store.schema(), hist, 128);
  }

  Outcome compare() const {
    const stdfs::path work = stdfs::temp_directory_path() / "ecglong_acceptance_c8";
    stdfs::remove_all(work);
    build(work);
    const std::vector<std::string> files = {"store/index.json", "store/normal.csv", "store/abnormal.csv",
                                            "model.json",       "traj.csv",         "report.json",
                                            "matches.json"};
    for (const auto& f : files) {
      if (!stdfs::exists(dir / f)) return {false, "golden file missing: " + f + " (run with --regen)"};
      if (slurp(work / f) != slurp(dir / f)) return {false, "byte mismatch vs golden: " + f};
    }
    stdfs::remove_all(work);
    return {true, std::to_string(files.size()) + " artifacts byte-exact"};
  }
};

}  // namespace

int main(int argc, char** argv) {
  const bool regen = argc > 1 && std::string(argv[1]) == "--regen";
  GoldenArtifacts golden{stdfs::path(ECGLONG_GOLDEN_DIR)};
  if (regen) {
    golden.build(golden.dir);
    std::printf("regenerated golden files in %s\n", golden.dir.string().c_str());
    return 0;
  }

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1. metric oracle equivalence (dtw/frechet/ks/wasserstein)", metric_oracles},
      {"2. matcher optimality and weight-rescaling invariance", matcher_optimality},
      {"3. assembly round trip (1000 beats, R-R and R-amp)", assembly_round_trip},
      {"4. feature-model recovery (latent VAR(1), 0.6 I)", feature_model_recovery},
      {"5. beat-population statistics (two seeded 10^4 populations)", beat_population_statistics},
      {"6. TSTR sanity ladder and confusion identities", tstr_sanity_ladder},
      {"7. full-pipeline determinism (byte-identical outputs)", pipeline_determinism},
      {"8. golden serialization formats", [&] { return golden.compare(); }},
  };

  bool all_pass = true;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s — %s\n", outcome.pass ? "PASS" : "FAIL", c.name, outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
