#include "ecglong/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ecglong/errors.hpp"
#include "json.hpp"

namespace ecglong {

using nlohmann::json;

namespace {

std::string fmt_csv_context(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::parse_error, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

json parse_json_file(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  if (!j.is_object()) fail(Errc::parse_error, context + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail(Errc::invalid_config, context + ": unknown key '" + item.key() + "'");
  }
}

std::vector<double> json_to_vector(const json& j) { return j.get<std::vector<double>>(); }

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd json_to_matrix(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) fail(Errc::parse_error, context + ": expected a non-empty matrix");
  const auto rows = j.size();
  const auto cols = j.front().size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) fail(Errc::parse_error, context + ": ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
  }
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int precision) {
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const char* context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    fail(Errc::parse_error, std::string(context) + ": bad number '" + text + "'");
  return v;
}

CandidateMode MatcherConfig::candidate_mode(std::uint64_t seed) const {
  if (mode == "exhaustive") return CandidateMode::exhaustive();
  if (mode == "sampled") return CandidateMode::sampled(batch, max, seed);
  fail(Errc::invalid_config, "matcher.mode must be 'sampled' or 'exhaustive', got '" + mode + "'");
}

MatchWeights MatcherConfig::match_weights(const std::vector<std::string>& schema) const {
  MatchWeights w;
  w.standardize = standardize;
  w.weights.assign(schema.size(), 1.0);
  for (const auto& [name, value] : weights) {
    const auto it = std::find(schema.begin(), schema.end(), name);
    if (it == schema.end()) fail(Errc::invalid_config, "matcher.weights: '" + name + "' is not in the schema");
    w.weights[static_cast<std::size_t>(it - schema.begin())] = value;
  }
  return w;
}

BeatSynthConfig PipelineConfig::beat_synth_config() const {
  BeatSynthConfig c;
  c.fs = fs;
  c.window = window;
  c.amplitude_jitter_lo = store.amplitude_jitter_lo;
  c.amplitude_jitter_hi = store.amplitude_jitter_hi;
  c.time_warp_max = store.time_warp_max;
  return c;
}

void write_signal_csv(const fs::path& path, const Signal& signal) {
  std::string text = "t,amplitude_mv\n";
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    text += std::to_string(i);
    text += ',';
    text += format_fixed(signal.samples[i], 6);
    text += '\n';
  }
  write_text(path, text);
}

Signal read_signal_csv(const fs::path& path, int fs, const std::string& channel_name) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "t,amplitude_mv")
    fail(Errc::parse_error, fmt_csv_context(path, 1) + ": expected header 't,amplitude_mv'");
  Signal s;
  s.fs = fs;
  s.channel_name = channel_name;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) fail(Errc::parse_error, fmt_csv_context(path, lineno) + ": expected 2 fields");
    s.samples.push_back(parse_double(fields[1], fmt_csv_context(path, lineno).c_str()));
  }
  if (s.samples.empty()) fail(Errc::parse_error, path.string() + ": no samples");
  return s;
}

void write_beats_csv(const fs::path& path, const std::vector<BeatRecord>& beats, int width) {
  std::string text = "id,label";
  for (int t = 0; t < width; ++t) text += ",s" + std::to_string(t);
  text += '\n';
  for (const auto& b : beats) {
    text += std::to_string(b.id);
    text += ',';
    text += to_string(b.label);
    for (double v : b.waveform) {
      text += ',';
      text += format_double(v);
    }
    text += '\n';
  }
  write_text(path, text);
}

std::vector<BeatRecord> read_beats_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, path.string() + ": empty file");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label" || header[2] != "s0")
    fail(Errc::parse_error, fmt_csv_context(path, 1) + ": expected header 'id,label,s0..'");
  const std::size_t width = header.size() - 2;

  std::vector<BeatRecord> beats;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      fail(Errc::parse_error, fmt_csv_context(path, lineno) + ": expected " + std::to_string(header.size()) + " fields");
    BeatRecord rec;
    try {
      rec.id = std::stoll(fields[0]);
    } catch (const std::exception&) {
      fail(Errc::parse_error, fmt_csv_context(path, lineno) + ": bad id '" + fields[0] + "'");
    }
    rec.label = beat_label_from_string(fields[1]);
    rec.waveform.reserve(width);
    for (std::size_t k = 0; k < width; ++k)
      rec.waveform.push_back(parse_double(fields[2 + k], fmt_csv_context(path, lineno).c_str()));
    beats.push_back(std::move(rec));
  }
  return beats;
}

void write_trajectory_csv(const fs::path& path, const FeatureTrajectory& trajectory) {
  std::string text;
  for (const auto& name : trajectory.schema) {
    text += name;
    text += ',';
  }
  text += "label\n";
  for (const auto& row : trajectory.rows) {
    for (double v : row.values) {
      text += format_double(v);
      text += ',';
    }
    text += to_string(row.label);
    text += '\n';
  }
  write_text(path, text);
}

FeatureTrajectory read_trajectory_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, path.string() + ": empty file");
  auto header = split_csv(line);
  if (header.size() < 2 || header.back() != "label")
    fail(Errc::parse_error, fmt_csv_context(path, 1) + ": expected feature names followed by 'label'");
  header.pop_back();

  FeatureTrajectory traj;
  traj.schema = std::move(header);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != traj.schema.size() + 1)
      fail(Errc::parse_error, fmt_csv_context(path, lineno) + ": expected " +
                                  std::to_string(traj.schema.size() + 1) + " fields");
    FeatureVector row;
    row.values.reserve(traj.schema.size());
    for (std::size_t k = 0; k < traj.schema.size(); ++k)
      row.values.push_back(parse_double(fields[k], fmt_csv_context(path, lineno).c_str()));
    row.label = beat_label_from_string(fields.back());
    traj.rows.push_back(std::move(row));
  }
  if (traj.rows.empty()) fail(Errc::parse_error, path.string() + ": no feature rows");
  return traj;
}

void write_store(const fs::path& dir, const BeatStore& store, int fs) {
  fs::create_directories(dir);
  json index;
  index["format"] = "ecglong-store-v1";
  index["fs"] = fs;
  index["window"] = {{"pre_r", store.window().pre_r}, {"post_r", store.window().post_r}};
  index["schema"] = store.schema();
  index["stats"] = {{"mean", store.descriptor_stats().mean}, {"stddev", store.descriptor_stats().stddev}};

  for (const BeatLabel label : {BeatLabel::Normal, BeatLabel::Abnormal}) {
    const std::string file = label == BeatLabel::Normal ? "normal.csv" : "abnormal.csv";
    std::vector<BeatRecord> beats;
    json descriptors = json::array();
    for (const std::size_t idx : store.partition(label)) {
      beats.push_back(store.beats()[idx]);
      json row = json::array();
      const double* g = store.descriptor_row(idx);
      for (std::size_t k = 0; k < store.schema().size(); ++k) row.push_back(g[k]);
      descriptors.push_back(std::move(row));
    }
    write_beats_csv(dir / file, beats, store.window().length());
    index["labels"][to_string(label)] = {{"file", file}, {"count", beats.size()}, {"descriptors", std::move(descriptors)}};
  }
  write_text(dir / "index.json", index.dump(2) + "\n");
}

BeatStore read_store(const fs::path& dir, int* fs_out) {
  const json index = parse_json_file(dir / "index.json");
  try {
    if (index.at("format").get<std::string>() != "ecglong-store-v1")
      fail(Errc::parse_error, dir.string() + ": not a beat store index");
    BeatWindow window{index.at("window").at("pre_r").get<int>(), index.at("window").at("post_r").get<int>()};
    const auto schema = index.at("schema").get<std::vector<std::string>>();
    if (fs_out) *fs_out = index.at("fs").get<int>();

    std::vector<BeatRecord> all;
    for (const BeatLabel label : {BeatLabel::Normal, BeatLabel::Abnormal}) {
      if (!index.at("labels").contains(to_string(label))) continue;
      const auto& entry = index.at("labels").at(to_string(label));
      auto beats = read_beats_csv(dir / entry.at("file").get<std::string>());
      const auto& descriptors = entry.at("descriptors");
      if (descriptors.size() != beats.size())
        fail(Errc::parse_error, dir.string() + ": descriptor rows do not match " + entry.at("file").get<std::string>());
      for (std::size_t i = 0; i < beats.size(); ++i) {
        if (beats[i].label != label)
          fail(Errc::parse_error, dir.string() + ": label mismatch in " + entry.at("file").get<std::string>());
        const auto row = json_to_vector(descriptors[i]);
        if (row.size() != schema.size()) fail(Errc::parse_error, dir.string() + ": descriptor width mismatch");
        for (std::size_t k = 0; k < schema.size(); ++k) beats[i].descriptors[schema[k]] = row[k];
      }
      all.insert(all.end(), std::make_move_iterator(beats.begin()), std::make_move_iterator(beats.end()));
    }
    BeatStore store = build_store(std::move(all), schema, window);

    // Serialized stats must agree with the recomputed ones.
    const auto mean = index.at("stats").at("mean").get<std::vector<double>>();
    const auto stddev = index.at("stats").at("stddev").get<std::vector<double>>();
    for (std::size_t k = 0; k < schema.size(); ++k)
      if (std::abs(mean[k] - store.descriptor_stats().mean[k]) > 1e-9 ||
          std::abs(stddev[k] - store.descriptor_stats().stddev[k]) > 1e-9)
        fail(Errc::parse_error, dir.string() + ": descriptor stats do not match the stored records");
    return store;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, dir.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  json j;
  j["fs"] = manifest.fs;
  j["channel_name"] = manifest.channel_name;
  j["units"] = manifest.units;
  j["source"] = manifest.source;
  j["window"] = {{"pre_r", manifest.window.pre_r}, {"post_r", manifest.window.post_r}};
  write_text(path, j.dump(2) + "\n");
}

Manifest read_manifest(const fs::path& path) {
  const json j = parse_json_file(path);
  Manifest m;
  try {
    m.fs = j.at("fs").get<int>();
    m.channel_name = j.value("channel_name", m.channel_name);
    m.units = j.at("units").get<std::string>();
    m.source = j.value("source", std::string());
    if (j.contains("window")) {
      m.window.pre_r = j.at("window").at("pre_r").get<int>();
      m.window.post_r = j.at("window").at("post_r").get<int>();
    }
  } catch (const json::exception& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
  if (m.fs <= 0) fail(Errc::invalid_config, path.string() + ": fs must be positive");
  if (m.units != "mV") fail(Errc::invalid_config, path.string() + ": units must be exactly 'mV'");
  if (m.window.pre_r < 1 || m.window.post_r < 1)
    fail(Errc::invalid_config, path.string() + ": window sides must be >= 1");
  return m;
}

void write_pipeline_config(const fs::path& path, const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["fs"] = c.fs;
  j["window"] = {{"pre_r", c.window.pre_r}, {"post_r", c.window.post_r}};
  j["schema"] = c.schema;
  j["matcher"] = {{"mode", c.matcher.mode},
                  {"batch", c.matcher.batch},
                  {"max", c.matcher.max},
                  {"standardize", c.matcher.standardize},
                  {"weights", c.matcher.weights}};
  j["smoothing"] = {{"max_crossfade", c.smoothing.max_crossfade}};
  j["feature_model"] = {{"kind", c.feature_model.kind}, {"block_len", c.feature_model.block_len}};
  j["store"] = {{"count_per_label", c.store.count_per_label},
                {"pca_components", c.store.pca_components},
                {"amplitude_jitter", {c.store.amplitude_jitter_lo, c.store.amplitude_jitter_hi}},
                {"time_warp_max", c.store.time_warp_max}};
  j["metrics"] = {{"bins", c.metrics.bins}, {"smoothing", c.metrics.smoothing}};
  write_text(path, j.dump(2) + "\n");
}

PipelineConfig read_pipeline_config(const fs::path& path) {
  const json j = parse_json_file(path);
  PipelineConfig c;
  try {
    check_keys(j, {"seed", "fs", "window", "schema", "matcher", "smoothing", "feature_model", "store", "metrics"},
               path.string());
    c.seed = j.value("seed", c.seed);
    c.fs = j.value("fs", c.fs);
    if (j.contains("window")) {
      check_keys(j.at("window"), {"pre_r", "post_r"}, path.string() + ":window");
      c.window.pre_r = j.at("window").value("pre_r", c.window.pre_r);
      c.window.post_r = j.at("window").value("post_r", c.window.post_r);
    }
    if (j.contains("schema")) c.schema = j.at("schema").get<std::vector<std::string>>();
    if (j.contains("matcher")) {
      const auto& m = j.at("matcher");
      check_keys(m, {"mode", "batch", "max", "standardize", "weights"}, path.string() + ":matcher");
      c.matcher.mode = m.value("mode", c.matcher.mode);
      c.matcher.batch = m.value("batch", c.matcher.batch);
      c.matcher.max = m.value("max", c.matcher.max);
      c.matcher.standardize = m.value("standardize", c.matcher.standardize);
      if (m.contains("weights")) c.matcher.weights = m.at("weights").get<std::map<std::string, double>>();
    }
    if (j.contains("smoothing")) {
      check_keys(j.at("smoothing"), {"max_crossfade"}, path.string() + ":smoothing");
      c.smoothing.max_crossfade = j.at("smoothing").value("max_crossfade", c.smoothing.max_crossfade);
    }
    if (j.contains("feature_model")) {
      const auto& f = j.at("feature_model");
      check_keys(f, {"kind", "block_len"}, path.string() + ":feature_model");
      c.feature_model.kind = f.value("kind", c.feature_model.kind);
      c.feature_model.block_len = f.value("block_len", c.feature_model.block_len);
    }
    if (j.contains("store")) {
      const auto& s = j.at("store");
      check_keys(s, {"count_per_label", "pca_components", "amplitude_jitter", "time_warp_max"},
                 path.string() + ":store");
      c.store.count_per_label = s.value("count_per_label", c.store.count_per_label);
      c.store.pca_components = s.value("pca_components", c.store.pca_components);
      if (s.contains("amplitude_jitter")) {
        const auto jitter = s.at("amplitude_jitter").get<std::vector<double>>();
        if (jitter.size() != 2) fail(Errc::invalid_config, path.string() + ": amplitude_jitter must be [lo, hi]");
        c.store.amplitude_jitter_lo = jitter[0];
        c.store.amplitude_jitter_hi = jitter[1];
      }
      c.store.time_warp_max = s.value("time_warp_max", c.store.time_warp_max);
    }
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      check_keys(m, {"bins", "smoothing"}, path.string() + ":metrics");
      c.metrics.bins = m.value("bins", c.metrics.bins);
      c.metrics.smoothing = m.value("smoothing", c.metrics.smoothing);
    }
  } catch (const json::exception& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
  // Basic sanity; the modules re-validate what they consume.
  if (c.fs <= 0) fail(Errc::invalid_config, path.string() + ": fs must be positive");
  if (c.feature_model.kind != "copula_var" && c.feature_model.kind != "block_bootstrap")
    fail(Errc::invalid_config, path.string() + ": feature_model.kind must be copula_var or block_bootstrap");
  return c;
}

void write_feature_model(const fs::path& path, const FeatureModel& model) {
  json j;
  j["format"] = "ecglong-model-v1";
  j["kind"] = to_string(model.kind());
  if (const auto* m = std::get_if<CopulaVarModel>(&model.impl)) {
    j["schema"] = m->schema;
    json marginals = json::array();
    for (const auto& marginal : m->marginals)
      marginals.push_back({{"feature", marginal.feature_name()}, {"values", marginal.sorted_values()}});
    j["marginals"] = std::move(marginals);
    j["latent_corr"] = matrix_to_json(m->latent_corr);
    j["lag1_coeff"] = matrix_to_json(m->lag1_coeff);
    j["noise_cov"] = matrix_to_json(m->noise_cov);
    j["label_transition"] = {{m->label_transition[0][0], m->label_transition[0][1]},
                             {m->label_transition[1][0], m->label_transition[1][1]}};
  } else {
    const auto& b = std::get<BlockBootstrapModel>(model.impl);
    j["schema"] = b.training.schema;
    j["block_len"] = b.block_len;
    json rows = json::array();
    json labels = json::array();
    for (const auto& row : b.training.rows) {
      rows.push_back(row.values);
      labels.push_back(to_string(row.label));
    }
    j["rows"] = std::move(rows);
    j["labels"] = std::move(labels);
  }
  write_text(path, j.dump(2) + "\n");
}

FeatureModel read_feature_model(const fs::path& path) {
  const json j = parse_json_file(path);
  FeatureModel model;
  try {
    if (j.at("format").get<std::string>() != "ecglong-model-v1")
      fail(Errc::parse_error, path.string() + ": not a feature model file");
    const auto kind = feature_model_kind_from_string(j.at("kind").get<std::string>());
    if (kind == FeatureModelKind::CopulaVar) {
      CopulaVarModel m;
      m.schema = j.at("schema").get<std::vector<std::string>>();
      for (const auto& marginal : j.at("marginals"))
        m.marginals.emplace_back(marginal.at("feature").get<std::string>(),
                                 marginal.at("values").get<std::vector<double>>());
      if (m.marginals.size() != m.schema.size())
        fail(Errc::parse_error, path.string() + ": marginal count does not match schema");
      m.latent_corr = json_to_matrix(j.at("latent_corr"), path.string());
      m.lag1_coeff = json_to_matrix(j.at("lag1_coeff"), path.string());
      m.noise_cov = json_to_matrix(j.at("noise_cov"), path.string());
      const auto& t = j.at("label_transition");
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) m.label_transition[a][b] = t.at(a).at(b).get<double>();
      model.impl = std::move(m);
    } else {
      BlockBootstrapModel b;
      b.training.schema = j.at("schema").get<std::vector<std::string>>();
      b.block_len = j.at("block_len").get<std::size_t>();
      const auto& rows = j.at("rows");
      const auto& labels = j.at("labels");
      if (rows.size() != labels.size()) fail(Errc::parse_error, path.string() + ": rows and labels misaligned");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        FeatureVector row;
        row.values = rows[i].get<std::vector<double>>();
        if (row.values.size() != b.training.schema.size())
          fail(Errc::parse_error, path.string() + ": row width does not match schema");
        row.label = beat_label_from_string(labels[i].get<std::string>());
        b.training.rows.push_back(std::move(row));
      }
      model.impl = std::move(b);
    }
  } catch (const json::exception& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
  return model;
}

void write_metric_report_json(const fs::path& path, const MetricReport& report) {
  json j;
  j["format"] = "ecglong-metrics-v1";
  json metrics;
  for (const auto& [name, value] : report.named()) metrics[name] = value;
  j["metrics"] = std::move(metrics);
  write_text(path, j.dump(2) + "\n");
}

void write_metric_report_csv(const fs::path& path, const MetricReport& report) {
  std::string text = "metric,value\n";
  for (const auto& [name, value] : report.named()) text += name + "," + format_double(value) + "\n";
  write_text(path, text);
}

void write_assembly_report(const fs::path& path, const AssembledSignal& assembled,
                           const std::vector<std::string>& schema, const MatchHistogram& r_amp_histogram,
                           int fs) {
  json j;
  j["format"] = "ecglong-assembly-v1";
  j["fs"] = fs;
  j["schema"] = schema;
  j["r_indices"] = assembled.r_indices;
  json matches = json::array();
  for (const auto& m : assembled.matches) {
    json target, chosen, diff;
    for (std::size_t k = 0; k < schema.size(); ++k) {
      target[schema[k]] = m.target.values[k];
      chosen[schema[k]] = m.chosen_descriptors[k];
      diff[schema[k]] = m.abs_diff[k];
    }
    matches.push_back({{"position", m.position},
                       {"beat_id", m.beat_id},
                       {"label", to_string(m.target.label)},
                       {"cost", m.cost},
                       {"candidates_evaluated", m.candidates_evaluated},
                       {"target", std::move(target)},
                       {"chosen", std::move(chosen)},
                       {"abs_diff", std::move(diff)}});
  }
  j["matches"] = std::move(matches);
  j["r_amp_histogram"] = {{"edges", r_amp_histogram.edges},
                          {"counts", r_amp_histogram.counts},
                          {"overflow", r_amp_histogram.overflow}};
  write_text(path, j.dump(2) + "\n");
}

void write_feature_divergences_json(const fs::path& path, const std::vector<FeatureDivergenceRow>& rows) {
  json features = json::array();
  for (const auto& row : rows)
    features.push_back({{"feature", row.feature},
                        {"unit", row.unit},
                        {"kl", row.stats.kl},
                        {"js", row.stats.js},
                        {"mmd", row.stats.mmd},
                        {"wasserstein", row.stats.wasserstein},
                        {"ks", row.stats.ks},
                        {"mean_diff", row.stats.mean_diff},
                        {"var_diff", row.stats.var_diff},
                        {"skew_diff", row.stats.skew_diff}});
  json j;
  j["format"] = "ecglong-feature-divergences-v1";
  j["features"] = std::move(features);
  write_text(path, j.dump(2) + "\n");
}

void write_feature_divergences_csv(const fs::path& path, const std::vector<FeatureDivergenceRow>& rows) {
  std::string text = "feature,unit,kl,js,mmd,wasserstein,ks,mean_diff,var_diff,skew_diff\n";
  for (const auto& r : rows) {
    text += r.feature + "," + r.unit;
    for (double v : {r.stats.kl, r.stats.js, r.stats.mmd, r.stats.wasserstein, r.stats.ks, r.stats.mean_diff,
                     r.stats.var_diff, r.stats.skew_diff})
      text += "," + format_double(v);
    text += '\n';
  }
  write_text(path, text);
}

void write_tstr_csv(const fs::path& path, const TstrReport& report) {
  std::string text = "protocol,classifier,acc_n,acc_a,prec_n,prec_a,rec_n,rec_a,f1_n,f1_a,accuracy,mcc\n";
  for (const auto& row : report.rows) {
    const auto& r = row.report;
    text += row.protocol + "," + row.spec.name();
    for (double v : {r.acc_normal, r.acc_abnormal, r.prec_normal, r.prec_abnormal, r.rec_normal, r.rec_abnormal,
                     r.f1_normal, r.f1_abnormal, r.accuracy, r.mcc})
      text += "," + format_double(v);
    text += '\n';
  }
  write_text(path, text);
}

std::string format_tstr_table(const TstrReport& report) {
  std::ostringstream out;
  out << "protocol  classifier        Acc(N)  Acc(A)  Pr(N)   Pr(A)   Rec(N)  Rec(A)  F1(N)   F1(A)   MCC\n";
  for (const auto& row : report.rows) {
    std::string name = row.protocol;
    name.resize(10, ' ');
    std::string cls = row.spec.name();
    cls.resize(18, ' ');
    out << name << cls;
    const auto& r = row.report;
    for (double v : {r.acc_normal, r.acc_abnormal, r.prec_normal, r.prec_abnormal, r.rec_normal, r.rec_abnormal,
                     r.f1_normal, r.f1_abnormal, r.mcc}) {
      std::string cell = format_fixed(v, 4);
      cell.resize(8, ' ');
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string color_for(double v) {
  // Diverging blue (original denser) -> white -> red (generated denser).
  const double a = std::clamp(std::abs(v), 0.0, 1.0);
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - a)));
  char buf[8];
  if (v >= 0.0)
    std::snprintf(buf, sizeof(buf), "#ff%02x%02x", fade, fade);
  else
    std::snprintf(buf, sizeof(buf), "#%02x%02xff", fade, fade);
  return buf;
}

}  // namespace

void write_heatmap_svg(const fs::path& path, const DensityHeatmap& heatmap) {
  const std::size_t w = heatmap.diff.size();
  const std::size_t bins = w > 0 ? heatmap.diff.front().size() : 0;
  if (w == 0 || bins == 0) fail(Errc::empty_input, "write_heatmap_svg: empty heatmap");
  const int cell = 4, margin = 30;
  const int width = margin * 2 + cell * static_cast<int>(w);
  const int height = margin * 2 + cell * static_cast<int>(bins);

  double peak = 0.0;
  for (const auto& col : heatmap.diff)
    for (double v : col) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) peak = 1.0;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t t = 0; t < w; ++t)
    for (std::size_t b = 0; b < bins; ++b) {
      const double v = heatmap.diff[t][b] / peak;
      const int x = margin + cell * static_cast<int>(t);
      const int y = margin + cell * static_cast<int>(bins - 1 - b);  // low bins at the bottom
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + color_for(v) + "\"/>\n";
    }
  svg += "<text x=\"" + std::to_string(margin) + "\" y=\"" + std::to_string(height - 8) +
         "\" font-size=\"10\">time step</text>\n";
  svg += "<text x=\"4\" y=\"" + std::to_string(margin - 8) + "\" font-size=\"10\">density diff (generated - original), peak " +
         format_fixed(peak, 4) + "</text>\n";
  svg += "</svg>\n";
  write_text(path, svg);
}

void write_overlay_svg(const fs::path& path, const BeatPopulationSummary& original,
                       const BeatPopulationSummary& generated) {
  if (original.mean.size() != generated.mean.size() || original.mean.empty())
    fail(Errc::length_mismatch, "write_overlay_svg: summaries differ in length");
  const std::size_t n = original.mean.size();
  const int width = 640, height = 320, margin = 30;

  double lo = 0.0, hi = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    lo = std::min({lo, original.mean[t] - original.stddev[t], generated.mean[t] - generated.stddev[t]});
    hi = std::max({hi, original.mean[t] + original.stddev[t], generated.mean[t] + generated.stddev[t]});
  }
  if (hi <= lo) hi = lo + 1.0;

  auto xpos = [&](std::size_t t) {
    return margin + (width - 2.0 * margin) * static_cast<double>(t) / static_cast<double>(n - 1 > 0 ? n - 1 : 1);
  };
  auto ypos = [&](double v) { return height - margin - (height - 2.0 * margin) * (v - lo) / (hi - lo); };
  auto polyline = [&](const std::vector<double>& v) {
    std::string pts;
    for (std::size_t t = 0; t < n; ++t)
      pts += format_fixed(xpos(t), 2) + "," + format_fixed(ypos(v[t]), 2) + " ";
    return pts;
  };
  auto band = [&](const BeatPopulationSummary& s) {
    std::string pts;
    for (std::size_t t = 0; t < n; ++t)
      pts += format_fixed(xpos(t), 2) + "," + format_fixed(ypos(s.mean[t] + s.stddev[t]), 2) + " ";
    for (std::size_t t = n; t-- > 0;)
      pts += format_fixed(xpos(t), 2) + "," + format_fixed(ypos(s.mean[t] - s.stddev[t]), 2) + " ";
    return pts;
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<polygon points=\"" + band(original) + "\" fill=\"#4169e1\" opacity=\"0.15\"/>\n";
  svg += "<polygon points=\"" + band(generated) + "\" fill=\"#dc143c\" opacity=\"0.15\"/>\n";
  svg += "<polyline points=\"" + polyline(original.mean) + "\" fill=\"none\" stroke=\"#4169e1\" stroke-width=\"1.5\"/>\n";
  svg += "<polyline points=\"" + polyline(generated.mean) + "\" fill=\"none\" stroke=\"#dc143c\" stroke-width=\"1.5\"/>\n";
  svg += "<text x=\"" + std::to_string(margin) + "\" y=\"16\" font-size=\"11\" fill=\"#4169e1\">original mean +/- std</text>\n";
  svg += "<text x=\"" + std::to_string(margin + 180) + "\" y=\"16\" font-size=\"11\" fill=\"#dc143c\">generated mean +/- std</text>\n";
  svg += "</svg>\n";
  write_text(path, svg);
}

}  // namespace ecglong
