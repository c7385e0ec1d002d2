// ecglong: synthesize and evaluate long-form ECG signals.
//
// segment        delineate a signal CSV into beats + per-beat features
// fit-features   fit the inter-beat feature model
// synth-features sample a synthetic feature trajectory
// build-store    generate or ingest the candidate beat store
// assemble       match beats to a trajectory and stitch the long signal
// evaluate       beat-population fidelity metrics (+ SVG plots)
// evaluate-features  per-feature distributional divergences
// tstr           train-on-synthetic / test-on-real classifier tables
// demo-signal    write a synthetic two-class source recording
// pipeline       run the whole chain from one seed

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
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

using namespace ecglong;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::invalid_config:
    case Errc::length_mismatch:
      return 2;
    case Errc::no_beats_found:
    case Errc::too_short:
      return 3;
    case Errc::label_empty:
      return 4;
    case Errc::single_class:
    case Errc::too_few_beats:
    case Errc::too_few_rows:
    case Errc::empty_test_set:
      return 5;
    default:
      return 1;
  }
}

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return PipelineConfig{};
  return read_pipeline_config(path);
}

struct SegmentResult {
  std::vector<BeatRecord> beats;
  FeatureTrajectory features;
};

std::vector<std::pair<std::int64_t, BeatLabel>> read_labels_csv(const fs::path& path) {
  std::vector<std::pair<std::int64_t, BeatLabel>> out;
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "sample,label") fail(Errc::parse_error, path.string() + ":1: expected header 'sample,label'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(Errc::parse_error, path.string() + ": bad label row at line " + std::to_string(lineno));
    out.emplace_back(std::stoll(line.substr(0, comma)), beat_label_from_string(line.substr(comma + 1)));
  }
  return out;
}

// Delineate, slice and featurize a signal; beats whose window does not fit
// are skipped (they are always at the edges).
SegmentResult segment_signal(const Signal& signal, const BeatWindow& window,
                             const std::vector<std::pair<std::int64_t, BeatLabel>>& labels) {
  const auto rs = detect_r_peaks(signal);
  std::vector<std::int64_t> kept;
  for (const std::int64_t r : rs)
    if (r - window.pre_r >= 0 && r + window.post_r < signal.length()) kept.push_back(r);
  if (kept.empty()) fail(Errc::no_beats_found, "segment: no beat fits the window");

  std::vector<FiducialPoints> fiducials;
  std::vector<BeatLabel> beat_labels;
  const std::int64_t tolerance = signal.fs / 2;
  for (const std::int64_t r : kept) {
    fiducials.push_back(delineate(signal, r));
    BeatLabel label = BeatLabel::Normal;
    std::int64_t best = tolerance + 1;
    for (const auto& [at, l] : labels) {
      const std::int64_t dist = std::llabs(at - r);
      if (dist < best) {
        best = dist;
        label = l;
      }
    }
    beat_labels.push_back(label);
  }

  SegmentResult out;
  out.features = extract_features(signal, fiducials, beat_labels);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    BeatRecord rec;
    rec.id = static_cast<std::int64_t>(i);
    rec.label = beat_labels[i];
    rec.waveform = slice_beat(signal, kept[i], window);
    for (std::size_t k = 0; k < out.features.schema.size(); ++k)
      rec.descriptors[out.features.schema[k]] = out.features.rows[i].values[k];
    out.beats.push_back(std::move(rec));
  }
  return out;
}

BeatStore generate_store(const std::vector<BeatRecord>& seed_beats, const PipelineConfig& cfg,
                         std::uint64_t seed) {
  const BeatSynthConfig synth_cfg = cfg.beat_synth_config();
  std::vector<BeatRecord> all;
  std::int64_t next_id = 0;
  RandomSource root(seed);
  int label_index = 0;
  for (const auto label : {BeatLabel::Normal, BeatLabel::Abnormal}) {
    std::vector<std::vector<double>> waves;
    for (const auto& b : seed_beats)
      if (b.label == label) waves.push_back(b.waveform);
    ++label_index;
    if (waves.empty()) continue;
    const auto model = fit_template(waves, label, cfg.store.pca_components, synth_cfg);
    RandomSource rng = root.fork(static_cast<std::uint64_t>(label_index));
    auto generated = generate_beats(model, cfg.store.count_per_label, rng, next_id);
    next_id += static_cast<std::int64_t>(generated.size());
    all.insert(all.end(), std::make_move_iterator(generated.begin()), std::make_move_iterator(generated.end()));
  }
  return build_store(std::move(all), cfg.schema, cfg.window);
}

BeatStore ingest_store(std::vector<BeatRecord> beats, const PipelineConfig& cfg) {
  const BeatSynthConfig synth_cfg = cfg.beat_synth_config();
  for (auto& b : beats)
    if (b.descriptors.empty()) b.descriptors = beat_descriptors(b.waveform, b.label, synth_cfg);
  return build_store(std::move(beats), cfg.schema, cfg.window);
}

std::vector<std::vector<double>> waveforms_of(const std::vector<BeatRecord>& beats) {
  std::vector<std::vector<double>> out;
  out.reserve(beats.size());
  for (const auto& b : beats) out.push_back(b.waveform);
  return out;
}

std::vector<ClassifierSpec> parse_classifiers(const std::string& arg) {
  if (arg == "all") return default_classifier_suite();
  std::vector<ClassifierSpec> out;
  std::size_t start = 0;
  while (start <= arg.size()) {
    const std::size_t comma = arg.find(',', start);
    const std::string name = arg.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!name.empty()) out.push_back(classifier_spec_from_string(name));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) fail(Errc::invalid_config, "no classifiers selected");
  return out;
}

LabeledDataset beats_to_dataset(const std::vector<BeatRecord>& beats, Provenance provenance) {
  LabeledDataset d;
  d.provenance = provenance;
  for (const auto& b : beats) {
    d.rows.push_back(b.waveform);
    d.labels.push_back(b.label);
  }
  return d;
}

// Synthetic two-class demo recording: jittered analytic templates placed at
// label-dependent R-R intervals, with a little additive noise.
void write_demo(const fs::path& dir, std::uint64_t seed, std::size_t n_beats, double abnormal_fraction,
                const PipelineConfig& cfg) {
  RandomSource rng(seed);
  const auto normal_beat = analytic_template(cfg.window, cfg.fs, BeatLabel::Normal);
  const auto abnormal_beat = analytic_template(cfg.window, cfg.fs, BeatLabel::Abnormal);

  std::vector<std::int64_t> r_positions;
  std::vector<BeatLabel> labels;
  std::int64_t at = cfg.window.pre_r + 16;
  bool prev_abnormal = false;
  for (std::size_t i = 0; i < n_beats; ++i) {
    // Sticky label chain so both transition directions appear.
    const double p_abnormal = prev_abnormal ? 0.5 : abnormal_fraction;
    const bool abnormal = rng.uniform() < p_abnormal;
    const double rr_ms = abnormal ? 560.0 + 120.0 * rng.uniform() : 720.0 + 220.0 * rng.uniform();
    r_positions.push_back(at);
    labels.push_back(abnormal ? BeatLabel::Abnormal : BeatLabel::Normal);
    prev_abnormal = abnormal;
    at += std::llround(rr_ms * cfg.fs / 1000.0);
  }

  Signal signal;
  signal.fs = cfg.fs;
  signal.channel_name = "demo";
  signal.samples.assign(static_cast<std::size_t>(at + cfg.window.post_r + 1), 0.0);
  for (std::size_t i = 0; i < r_positions.size(); ++i) {
    const auto& beat = labels[i] == BeatLabel::Normal ? normal_beat : abnormal_beat;
    const double gain = 0.9 + 0.2 * rng.uniform();
    for (std::size_t t = 0; t < beat.size(); ++t) {
      const std::int64_t idx = r_positions[i] - cfg.window.pre_r + static_cast<std::int64_t>(t);
      if (idx >= 0 && idx < signal.length()) signal.samples[static_cast<std::size_t>(idx)] += gain * beat[t];
    }
  }
  for (double& v : signal.samples) v += 0.004 * rng.normal();

  fs::create_directories(dir);
  write_signal_csv(dir / "signal.csv", signal);
  Manifest manifest;
  manifest.fs = cfg.fs;
  manifest.channel_name = "demo";
  manifest.source = "ecglong demo-signal";
  manifest.window = cfg.window;
  write_manifest(dir / "manifest.json", manifest);
  std::string labels_csv = "sample,label\n";
  for (std::size_t i = 0; i < r_positions.size(); ++i)
    labels_csv += std::to_string(r_positions[i]) + "," + to_string(labels[i]) + "\n";
  std::ofstream(dir / "labels.csv", std::ios::binary) << labels_csv;
}

int run_pipeline(const std::string& signal_path, const std::string& manifest_path,
                 const std::string& labels_path, const fs::path& outdir, PipelineConfig cfg,
                 std::size_t synth_beats) {
  fs::create_directories(outdir);
  write_pipeline_config(outdir / "config.json", cfg);

  const Manifest manifest = read_manifest(manifest_path);
  cfg.fs = manifest.fs;
  cfg.window = manifest.window;
  const Signal signal = read_signal_csv(signal_path, manifest.fs, manifest.channel_name);
  std::vector<std::pair<std::int64_t, BeatLabel>> labels;
  if (!labels_path.empty()) labels = read_labels_csv(labels_path);

  // 1. segment the source recording
  const auto segmented = segment_signal(signal, cfg.window, labels);
  write_beats_csv(outdir / "beats.csv", segmented.beats, cfg.window.length());
  write_trajectory_csv(outdir / "features.csv", segmented.features);

  // 2. fit the inter-beat feature model
  const auto kind = feature_model_kind_from_string(cfg.feature_model.kind);
  const auto model = fit_feature_model(kind, segmented.features, cfg.feature_model.block_len);
  write_feature_model(outdir / "model.json", model);

  // 3. sample the synthetic scaffold
  RandomSource traj_rng = RandomSource(cfg.seed).fork(1);
  const auto trajectory = sample(model, synth_beats, traj_rng);
  write_trajectory_csv(outdir / "traj.csv", trajectory);

  // 4. build the candidate store from the segmented beats
  const auto store = generate_store(segmented.beats, cfg, RandomSource(cfg.seed).fork(2).seed());
  write_store(outdir / "store", store, cfg.fs);

  // 5. match and stitch
  const auto mode = cfg.matcher.candidate_mode(RandomSource(cfg.seed).fork(3).seed());
  const auto weights = cfg.matcher.match_weights(store.schema());
  const auto assembled = assemble(trajectory, store, weights, mode, cfg.smoothing, cfg.fs);
  write_signal_csv(outdir / "long.csv", assembled.signal);
  const auto hist = match_histogram(assembled.matches, store.schema(), "R_Amp", ramp_histogram_edges());
  write_assembly_report(outdir / "matches.json", assembled, store.schema(), hist, cfg.fs);

  // 6. slice the assembled signal back into beats and re-extract features
  std::vector<BeatRecord> synth_slices;
  std::vector<FiducialPoints> synth_fiducials;
  std::vector<BeatLabel> synth_labels;
  for (std::size_t i = 0; i < assembled.r_indices.size(); ++i) {
    BeatRecord rec;
    rec.id = static_cast<std::int64_t>(i);
    rec.label = trajectory.rows[i].label;
    rec.waveform = slice_beat(assembled.signal, assembled.r_indices[i], cfg.window);
    synth_slices.push_back(std::move(rec));
    synth_fiducials.push_back(delineate(assembled.signal, assembled.r_indices[i]));
    synth_labels.push_back(trajectory.rows[i].label);
  }
  write_beats_csv(outdir / "synth_beats.csv", synth_slices, cfg.window.length());
  const auto synth_features = extract_features(assembled.signal, synth_fiducials, synth_labels);
  write_trajectory_csv(outdir / "synth_features.csv", synth_features);

  // 7. fidelity metrics: beat populations and per-feature divergences
  const auto report = compare_beat_populations(waveforms_of(segmented.beats), waveforms_of(synth_slices),
                                               cfg.metrics.divergence_params());
  write_metric_report_json(outdir / "report.json", report);
  write_metric_report_csv(outdir / "report.csv", report);
  write_heatmap_svg(outdir / "heatmap.svg",
                    density_heatmap(waveforms_of(segmented.beats), waveforms_of(synth_slices), cfg.metrics.bins));
  write_overlay_svg(outdir / "overlay.svg", beat_population_summary(waveforms_of(segmented.beats)),
                    beat_population_summary(waveforms_of(synth_slices)));
  write_feature_divergences_json(outdir / "feature_report.json",
                                 feature_divergences(segmented.features, synth_features, cfg.fs,
                                                     cfg.metrics.divergence_params()));
  write_feature_divergences_csv(outdir / "feature_report.csv",
                                feature_divergences(segmented.features, synth_features, cfg.fs,
                                                    cfg.metrics.divergence_params()));

  // 8. downstream TSTR tables on 5-beat windows
  const auto synth_train = windows_to_dataset(synth_features, 5, Provenance::Synthetic);
  const auto real_test = windows_to_dataset(segmented.features, 5, Provenance::Real);
  if (synth_train.trainable() && real_test.trainable()) {
    const auto table = tstr_protocol(synth_train, real_test, default_classifier_suite(), cfg.seed);
    write_tstr_csv(outdir / "tstr.csv", table);
    std::ofstream(outdir / "tstr.txt", std::ios::binary) << format_tstr_table(table);
  } else {
    std::fprintf(stderr, "pipeline: skipping tstr (single-class windows)\n");
  }
  std::printf("pipeline: wrote %s\n", outdir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-form ECG synthesis and evaluation"};
  app.require_subcommand(1);

  // segment
  std::string sg_signal, sg_manifest, sg_out, sg_features, sg_labels;
  auto* segment_cmd = app.add_subcommand("segment", "delineate a signal into beats and features");
  segment_cmd->add_option("signal", sg_signal, "signal CSV (t,amplitude_mv)")->required();
  segment_cmd->add_option("--manifest", sg_manifest, "manifest JSON")->required();
  segment_cmd->add_option("--out", sg_out, "output beat CSV")->required();
  segment_cmd->add_option("--features", sg_features, "output feature CSV (default: <out stem>_features.csv)");
  segment_cmd->add_option("--labels", sg_labels, "per-beat labels CSV (sample,label)");

  // fit-features
  std::string ff_features, ff_out, ff_kind = "copula_var";
  std::size_t ff_block = 8;
  auto* fit_cmd = app.add_subcommand("fit-features", "fit the inter-beat feature model");
  fit_cmd->add_option("--features", ff_features, "feature CSV from segment")->required();
  fit_cmd->add_option("--out", ff_out, "output model JSON")->required();
  fit_cmd->add_option("--kind", ff_kind, "copula_var | block_bootstrap");
  fit_cmd->add_option("--block-len", ff_block, "block length for block_bootstrap");

  // synth-features
  std::string sf_model, sf_out;
  std::size_t sf_beats = 100;
  std::uint64_t sf_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth-features", "sample a synthetic feature trajectory");
  synth_cmd->add_option("--model", sf_model, "fitted model JSON")->required();
  synth_cmd->add_option("--beats", sf_beats, "number of beats")->required();
  synth_cmd->add_option("--seed", sf_seed, "random seed");
  synth_cmd->add_option("--out", sf_out, "output trajectory CSV")->required();

  // build-store
  std::string bs_beats, bs_out, bs_mode = "generate", bs_config;
  std::uint64_t bs_seed = 1;
  auto* store_cmd = app.add_subcommand("build-store", "generate or ingest the candidate beat store");
  store_cmd->add_option("--beats", bs_beats, "beat CSV (seed beats for generate, records for ingest)")->required();
  store_cmd->add_option("--out", bs_out, "output store directory")->required();
  store_cmd->add_option("--mode", bs_mode, "generate | ingest");
  store_cmd->add_option("--config", bs_config, "pipeline config JSON");
  store_cmd->add_option("--seed", bs_seed, "random seed (generate mode)");

  // assemble
  std::string as_traj, as_store, as_config, as_out, as_report;
  std::uint64_t as_seed = 0;
  bool as_seed_set = false;
  auto* assemble_cmd = app.add_subcommand("assemble", "match beats to a trajectory and stitch");
  assemble_cmd->add_option("--traj", as_traj, "trajectory CSV")->required();
  assemble_cmd->add_option("--store", as_store, "beat store directory")->required();
  assemble_cmd->add_option("--config", as_config, "pipeline config JSON");
  assemble_cmd->add_option("--out", as_out, "output signal CSV")->required();
  assemble_cmd->add_option("--report", as_report, "output match report JSON")->required();
  assemble_cmd->add_option("--seed", as_seed, "random seed override (sampled matching)")
      ->each([&](const std::string&) { as_seed_set = true; });

  // evaluate
  std::string ev_real, ev_synth, ev_out, ev_csv, ev_heatmap, ev_overlay, ev_config;
  auto* eval_cmd = app.add_subcommand("evaluate", "beat-population fidelity metrics");
  eval_cmd->add_option("--real", ev_real, "real beat CSV")->required();
  eval_cmd->add_option("--synth", ev_synth, "synthetic beat CSV")->required();
  eval_cmd->add_option("--out", ev_out, "output metric JSON")->required();
  eval_cmd->add_option("--csv", ev_csv, "optional metric CSV");
  eval_cmd->add_option("--heatmap", ev_heatmap, "optional density-difference heatmap SVG");
  eval_cmd->add_option("--overlay", ev_overlay, "optional mean +/- std overlay SVG");
  eval_cmd->add_option("--config", ev_config, "pipeline config JSON (metric parameters)");

  // evaluate-features
  std::string ef_real, ef_synth, ef_out, ef_csv;
  int ef_fs = 128;
  auto* evalf_cmd = app.add_subcommand("evaluate-features", "per-feature distributional divergences");
  evalf_cmd->add_option("--real", ef_real, "real feature CSV")->required();
  evalf_cmd->add_option("--synth", ef_synth, "synthetic feature CSV")->required();
  evalf_cmd->add_option("--out", ef_out, "output JSON")->required();
  evalf_cmd->add_option("--csv", ef_csv, "optional CSV");
  evalf_cmd->add_option("--fs", ef_fs, "sampling rate for ms->samples conversion");

  // tstr
  std::string ts_synth, ts_real, ts_out, ts_classifiers = "all";
  std::uint64_t ts_seed = 1;
  std::size_t ts_window = 5;
  double ts_split = 0.0;
  bool ts_beats_input = false;
  auto* tstr_cmd = app.add_subcommand("tstr", "train-on-synthetic / test-on-real tables");
  tstr_cmd->add_option("--synth-train", ts_synth, "synthetic training CSV (features or beats)")->required();
  tstr_cmd->add_option("--real-test", ts_real, "real test CSV (features or beats)")->required();
  tstr_cmd->add_option("--out", ts_out, "output table CSV")->required();
  tstr_cmd->add_option("--classifiers", ts_classifiers, "all or comma list (gnb,logreg,tree,svm,balanced-logreg,balanced-svm)");
  tstr_cmd->add_option("--seed", ts_seed, "random seed");
  tstr_cmd->add_option("--window-beats", ts_window, "beats per window (feature input)");
  tstr_cmd->add_option("--split-real", ts_split, "hold out 1-f of the real data for evaluation (0 = train baseline on the test set)");
  tstr_cmd->add_flag("--beats-input", ts_beats_input, "inputs are beat CSVs; rows are raw waveforms");

  // demo-signal
  std::string dm_out;
  std::uint64_t dm_seed = 7;
  std::size_t dm_beats = 240;
  double dm_abnormal = 0.18;
  auto* demo_cmd = app.add_subcommand("demo-signal", "write a synthetic two-class source recording");
  demo_cmd->add_option("--out", dm_out, "output directory")->required();
  demo_cmd->add_option("--seed", dm_seed, "random seed");
  demo_cmd->add_option("--beats", dm_beats, "number of beats");
  demo_cmd->add_option("--abnormal-fraction", dm_abnormal, "abnormal beat rate");

  // pipeline
  std::string pl_signal, pl_manifest, pl_labels, pl_outdir, pl_config;
  std::uint64_t pl_seed = 0;
  bool pl_seed_set = false;
  std::size_t pl_beats = 1000;
  auto* pipe_cmd = app.add_subcommand("pipeline", "run segment -> fit -> synth -> assemble -> evaluate -> tstr");
  pipe_cmd->add_option("--signal", pl_signal, "source signal CSV")->required();
  pipe_cmd->add_option("--manifest", pl_manifest, "manifest JSON")->required();
  pipe_cmd->add_option("--labels", pl_labels, "per-beat labels CSV");
  pipe_cmd->add_option("--outdir", pl_outdir, "output directory")->required();
  pipe_cmd->add_option("--config", pl_config, "pipeline config JSON");
  pipe_cmd->add_option("--seed", pl_seed, "seed override")->each([&](const std::string&) { pl_seed_set = true; });
  pipe_cmd->add_option("--beats", pl_beats, "synthetic trajectory length");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*segment_cmd) {
      const Manifest manifest = read_manifest(sg_manifest);
      const Signal signal = read_signal_csv(sg_signal, manifest.fs, manifest.channel_name);
      std::vector<std::pair<std::int64_t, BeatLabel>> labels;
      if (!sg_labels.empty()) labels = read_labels_csv(sg_labels);
      const auto result = segment_signal(signal, manifest.window, labels);
      write_beats_csv(sg_out, result.beats, manifest.window.length());
      const fs::path feature_path = sg_features.empty()
                                        ? fs::path(fs::path(sg_out).replace_extension("").string() + "_features.csv")
                                        : fs::path(sg_features);
      write_trajectory_csv(feature_path, result.features);
      std::printf("segment: %zu beats -> %s, %s\n", result.beats.size(), sg_out.c_str(),
                  feature_path.string().c_str());
    } else if (*fit_cmd) {
      const auto features = read_trajectory_csv(ff_features);
      const auto model = fit_feature_model(feature_model_kind_from_string(ff_kind), features, ff_block);
      write_feature_model(ff_out, model);
      std::printf("fit-features: %s model on %zu rows -> %s\n", ff_kind.c_str(), features.size(), ff_out.c_str());
    } else if (*synth_cmd) {
      const auto model = read_feature_model(sf_model);
      RandomSource rng(sf_seed);
      write_trajectory_csv(sf_out, sample(model, sf_beats, rng));
      std::printf("synth-features: %zu rows -> %s\n", sf_beats, sf_out.c_str());
    } else if (*store_cmd) {
      const PipelineConfig cfg = load_config(bs_config);
      const auto beats = read_beats_csv(bs_beats);
      if (beats.empty()) fail(Errc::empty_input, bs_beats + ": no beats");
      BeatStore store = bs_mode == "ingest" ? ingest_store(beats, cfg) : generate_store(beats, cfg, bs_seed);
      if (bs_mode != "ingest" && bs_mode != "generate")
        fail(Errc::invalid_config, "--mode must be generate or ingest");
      write_store(bs_out, store, cfg.fs);
      std::printf("build-store: %zu beats -> %s\n", store.size(), bs_out.c_str());
    } else if (*assemble_cmd) {
      const PipelineConfig cfg = load_config(as_config);
      int store_fs = cfg.fs;
      const BeatStore store = read_store(as_store, &store_fs);
      const auto trajectory = read_trajectory_csv(as_traj);
      const std::uint64_t seed = as_seed_set ? as_seed : cfg.seed;
      const auto mode = cfg.matcher.candidate_mode(seed);
      const auto assembled =
          assemble(trajectory, store, cfg.matcher.match_weights(store.schema()), mode, cfg.smoothing, store_fs);
      write_signal_csv(as_out, assembled.signal);
      const auto hist = match_histogram(assembled.matches, store.schema(), "R_Amp", ramp_histogram_edges());
      write_assembly_report(as_report, assembled, store.schema(), hist, store_fs);
      std::printf("assemble: %zu beats, %lld samples -> %s\n", assembled.matches.size(),
                  static_cast<long long>(assembled.signal.length()), as_out.c_str());
    } else if (*eval_cmd) {
      const PipelineConfig cfg = load_config(ev_config);
      const auto real = read_beats_csv(ev_real);
      const auto synth = read_beats_csv(ev_synth);
      if (real.empty() || synth.empty()) fail(Errc::parse_error, "evaluate: empty beat file");
      const auto report =
          compare_beat_populations(waveforms_of(real), waveforms_of(synth), cfg.metrics.divergence_params());
      write_metric_report_json(ev_out, report);
      if (!ev_csv.empty()) write_metric_report_csv(ev_csv, report);
      if (!ev_heatmap.empty())
        write_heatmap_svg(ev_heatmap, density_heatmap(waveforms_of(real), waveforms_of(synth), cfg.metrics.bins));
      if (!ev_overlay.empty())
        write_overlay_svg(ev_overlay, beat_population_summary(waveforms_of(real)),
                          beat_population_summary(waveforms_of(synth)));
      std::printf("evaluate: %s\n", ev_out.c_str());
    } else if (*evalf_cmd) {
      const auto real = read_trajectory_csv(ef_real);
      const auto synth = read_trajectory_csv(ef_synth);
      const auto rows = feature_divergences(real, synth, ef_fs);
      write_feature_divergences_json(ef_out, rows);
      if (!ef_csv.empty()) write_feature_divergences_csv(ef_csv, rows);
      std::printf("evaluate-features: %zu rows -> %s\n", rows.size(), ef_out.c_str());
    } else if (*tstr_cmd) {
      LabeledDataset synth_train, real_test;
      if (ts_beats_input) {
        synth_train = beats_to_dataset(read_beats_csv(ts_synth), Provenance::Synthetic);
        real_test = beats_to_dataset(read_beats_csv(ts_real), Provenance::Real);
      } else {
        synth_train = windows_to_dataset(read_trajectory_csv(ts_synth), ts_window, Provenance::Synthetic);
        real_test = windows_to_dataset(read_trajectory_csv(ts_real), ts_window, Provenance::Real);
      }
      const auto suite = parse_classifiers(ts_classifiers);
      const auto table = ts_split > 0.0 ? tstr_protocol_split(synth_train, real_test, ts_split, suite, ts_seed)
                                        : tstr_protocol(synth_train, real_test, suite, ts_seed);
      write_tstr_csv(ts_out, table);
      std::fputs(format_tstr_table(table).c_str(), stdout);
    } else if (*demo_cmd) {
      PipelineConfig cfg;
      write_demo(dm_out, dm_seed, dm_beats, dm_abnormal, cfg);
      std::printf("demo-signal: %s\n", dm_out.c_str());
    } else if (*pipe_cmd) {
      PipelineConfig cfg = load_config(pl_config);
      if (pl_seed_set) cfg.seed = pl_seed;
      return run_pipeline(pl_signal, pl_manifest, pl_labels, pl_outdir, cfg, pl_beats);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
