#include "ecglong/tstr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <variant>

#include "ecglong/errors.hpp"
#include "ecglong/random.hpp"

namespace ecglong {

namespace {

int as_index(BeatLabel l) { return l == BeatLabel::Normal ? 0 : 1; }

struct Scaler {
  std::vector<double> mean, scale;

  static Scaler fit(const std::vector<std::vector<double>>& rows) {
    const std::size_t d = rows.front().size();
    Scaler s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 0.0);
    for (const auto& r : rows)
      for (std::size_t k = 0; k < d; ++k) s.mean[k] += r[k];
    for (double& m : s.mean) m /= static_cast<double>(rows.size());
    for (const auto& r : rows)
      for (std::size_t k = 0; k < d; ++k) {
        const double dev = r[k] - s.mean[k];
        s.scale[k] += dev * dev;
      }
    for (double& v : s.scale) {
      v = std::sqrt(v / static_cast<double>(rows.size()));
      if (v < 1e-9) v = 1.0;
    }
    return s;
  }

  std::vector<double> apply(const std::vector<double>& row) const {
    std::vector<double> out(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) out[k] = (row[k] - mean[k]) / scale[k];
    return out;
  }
};

struct LinearModel {
  Scaler scaler;
  std::vector<double> w;
  double b = 0.0;

  double margin(const std::vector<double>& row) const {
    const auto x = scaler.apply(row);
    return std::inner_product(x.begin(), x.end(), w.begin(), b);
  }
};

struct GnbModel {
  double log_prior[2] = {0, 0};
  std::vector<double> mean[2], var[2];
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  BeatLabel leaf = BeatLabel::Normal;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
};

std::vector<double> class_weights(const LabeledDataset& data, bool balanced) {
  double counts[2] = {0, 0};
  for (BeatLabel l : data.labels) counts[as_index(l)] += 1.0;
  const double n = static_cast<double>(data.labels.size());
  std::vector<double> w(data.labels.size(), 1.0);
  if (!balanced) return w;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = n / (2.0 * counts[as_index(data.labels[i])]);
  return w;
}

}  // namespace

struct Classifier::Impl {
  std::variant<GnbModel, LinearModel, TreeModel> model;
  bool linear_is_logistic = false;
};

bool LabeledDataset::trainable() const {
  bool has[2] = {false, false};
  for (BeatLabel l : labels) has[as_index(l)] = true;
  return has[0] && has[1];
}

const char* to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::GaussianNaiveBayes: return "gnb";
    case ClassifierKind::LogisticRegression: return "logreg";
    case ClassifierKind::DecisionTree: return "tree";
    case ClassifierKind::LinearSVM: return "svm";
  }
  return "?";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "gnb") return ClassifierKind::GaussianNaiveBayes;
  if (s == "logreg") return ClassifierKind::LogisticRegression;
  if (s == "tree") return ClassifierKind::DecisionTree;
  if (s == "svm") return ClassifierKind::LinearSVM;
  fail(Errc::invalid_config, "unknown classifier '" + s + "'");
}

std::string ClassifierSpec::name() const {
  return balanced ? std::string("balanced-") + to_string(kind) : to_string(kind);
}

std::vector<ClassifierSpec> default_classifier_suite() {
  return {{ClassifierKind::GaussianNaiveBayes, false},
          {ClassifierKind::LogisticRegression, false},
          {ClassifierKind::DecisionTree, false},
          {ClassifierKind::LinearSVM, false},
          {ClassifierKind::LogisticRegression, true},
          {ClassifierKind::LinearSVM, true}};
}

ClassifierSpec classifier_spec_from_string(const std::string& name) {
  ClassifierSpec spec;
  std::string base = name;
  if (name.rfind("balanced-", 0) == 0) {
    spec.balanced = true;
    base = name.substr(9);
  }
  spec.kind = classifier_kind_from_string(base);
  if (spec.balanced && spec.kind != ClassifierKind::LogisticRegression && spec.kind != ClassifierKind::LinearSVM)
    fail(Errc::invalid_config, "balanced variant only applies to logreg and svm");
  return spec;
}

namespace {

GnbModel train_gnb(const LabeledDataset& data) {
  const std::size_t d = data.n_features();
  GnbModel m;
  double counts[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(d, 0.0);
    m.var[c].assign(d, 0.0);
  }
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const int c = as_index(data.labels[i]);
    counts[c] += 1.0;
    for (std::size_t k = 0; k < d; ++k) m.mean[c][k] += data.rows[i][k];
  }
  for (int c = 0; c < 2; ++c)
    for (double& v : m.mean[c]) v /= counts[c];
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const int c = as_index(data.labels[i]);
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = data.rows[i][k] - m.mean[c][k];
      m.var[c][k] += dev * dev;
    }
  }
  const double n = counts[0] + counts[1];
  for (int c = 0; c < 2; ++c) {
    for (double& v : m.var[c]) v = std::max(v / counts[c], 1e-9);
    m.log_prior[c] = std::log(counts[c] / n);
  }
  return m;
}

LinearModel train_linear(const LabeledDataset& data, const TrainOptions& opt, bool logistic) {
  const std::size_t d = data.n_features();
  const std::size_t n = data.rows.size();
  LinearModel m;
  m.scaler = Scaler::fit(data.rows);
  m.w.assign(d, 0.0);

  std::vector<std::vector<double>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m.scaler.apply(data.rows[i]);
  const auto sw = class_weights(data, opt.balanced);
  const double wsum = std::accumulate(sw.begin(), sw.end(), 0.0);

  std::vector<double> grad(d);
  for (int it = 0; it < opt.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = std::inner_product(x[i].begin(), x[i].end(), m.w.begin(), m.b);
      double g;
      if (logistic) {
        const double y = data.labels[i] == BeatLabel::Abnormal ? 1.0 : 0.0;
        g = sw[i] * (1.0 / (1.0 + std::exp(-z)) - y);
      } else {
        const double t = data.labels[i] == BeatLabel::Abnormal ? 1.0 : -1.0;
        g = t * z < 1.0 ? -sw[i] * t : 0.0;  // hinge subgradient
      }
      for (std::size_t k = 0; k < d; ++k) grad[k] += g * x[i][k];
      grad_b += g;
    }
    for (std::size_t k = 0; k < d; ++k) {
      double step = grad[k] / wsum;
      if (!logistic) step += opt.svm_l2 * m.w[k];
      m.w[k] -= opt.learning_rate * step;
    }
    m.b -= opt.learning_rate * grad_b / wsum;
  }
  return m;
}

struct TreeBuilder {
  const LabeledDataset& data;
  const TrainOptions& opt;
  std::vector<TreeNode> nodes;

  static double gini(double n0, double n1) {
    const double n = n0 + n1;
    if (n == 0.0) return 0.0;
    const double p0 = n0 / n, p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
  }

  int build(std::vector<std::size_t> idx, int depth) {
    double n0 = 0, n1 = 0;
    for (std::size_t i : idx) (data.labels[i] == BeatLabel::Normal ? n0 : n1) += 1.0;
    TreeNode node;
    node.leaf = n1 > n0 ? BeatLabel::Abnormal : BeatLabel::Normal;  // ties go Normal

    const bool pure = n0 == 0.0 || n1 == 0.0;
    if (!pure && depth < opt.max_depth && idx.size() >= static_cast<std::size_t>(2 * opt.min_leaf)) {
      const double parent = gini(n0, n1);
      double best_gain = 0.0;
      int best_feature = -1;
      double best_threshold = 0.0;
      const std::size_t d = data.n_features();
      for (std::size_t k = 0; k < d; ++k) {
        std::vector<std::size_t> order(idx);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.rows[a][k] < data.rows[b][k]; });
        double l0 = 0, l1 = 0, r0 = n0, r1 = n1;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
          (data.labels[order[pos]] == BeatLabel::Normal ? l0 : l1) += 1.0;
          (data.labels[order[pos]] == BeatLabel::Normal ? r0 : r1) -= 1.0;
          const double lo = data.rows[order[pos]][k], hi = data.rows[order[pos + 1]][k];
          if (lo == hi) continue;
          const std::size_t left_n = pos + 1, right_n = order.size() - left_n;
          if (left_n < static_cast<std::size_t>(opt.min_leaf) || right_n < static_cast<std::size_t>(opt.min_leaf))
            continue;
          const double gain = parent - (gini(l0, l1) * (l0 + l1) + gini(r0, r1) * (r0 + r1)) / (n0 + n1);
          if (gain > best_gain + 1e-12) {  // first feature / lowest threshold wins ties
            best_gain = gain;
            best_feature = static_cast<int>(k);
            best_threshold = 0.5 * (lo + hi);
          }
        }
      }
      if (best_feature >= 0) {
        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
          (data.rows[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
        node.feature = best_feature;
        node.threshold = best_threshold;
        const int self = static_cast<int>(nodes.size());
        nodes.push_back(node);
        nodes[static_cast<std::size_t>(self)].left = build(std::move(left), depth + 1);
        nodes[static_cast<std::size_t>(self)].right = build(std::move(right), depth + 1);
        return self;
      }
    }
    nodes.push_back(node);
    return static_cast<int>(nodes.size()) - 1;
  }
};

}  // namespace

Classifier train(ClassifierKind kind, const LabeledDataset& train_set, const TrainOptions& options) {
  if (train_set.rows.size() < 10)
    fail(Errc::too_few_rows, "train: need at least 10 rows, got " + std::to_string(train_set.rows.size()));
  if (train_set.rows.size() != train_set.labels.size())
    fail(Errc::length_mismatch, "train: rows and labels misaligned");
  if (!train_set.trainable()) fail(Errc::single_class, "train: training data contains a single class");

  auto impl = std::make_shared<Classifier::Impl>();
  switch (kind) {
    case ClassifierKind::GaussianNaiveBayes:
      impl->model = train_gnb(train_set);
      break;
    case ClassifierKind::LogisticRegression:
      impl->model = train_linear(train_set, options, true);
      impl->linear_is_logistic = true;
      break;
    case ClassifierKind::LinearSVM:
      impl->model = train_linear(train_set, options, false);
      break;
    case ClassifierKind::DecisionTree: {
      TreeBuilder builder{train_set, options, {}};
      std::vector<std::size_t> all(train_set.rows.size());
      std::iota(all.begin(), all.end(), 0);
      builder.build(std::move(all), 0);
      impl->model = TreeModel{std::move(builder.nodes)};
      break;
    }
  }
  return Classifier(std::move(impl), kind);
}

BeatLabel Classifier::predict(const std::vector<double>& row) const {
  if (const auto* gnb = std::get_if<GnbModel>(&impl_->model)) {
    double score[2];
    for (int c = 0; c < 2; ++c) {
      score[c] = gnb->log_prior[c];
      for (std::size_t k = 0; k < row.size(); ++k) {
        const double dev = row[k] - gnb->mean[c][k];
        score[c] -= 0.5 * (std::log(2.0 * std::numbers::pi * gnb->var[c][k]) + dev * dev / gnb->var[c][k]);
      }
    }
    return score[1] > score[0] ? BeatLabel::Abnormal : BeatLabel::Normal;
  }
  if (const auto* lin = std::get_if<LinearModel>(&impl_->model))
    return lin->margin(row) > 0.0 ? BeatLabel::Abnormal : BeatLabel::Normal;
  const auto& tree = std::get<TreeModel>(impl_->model);
  int at = 0;
  while (tree.nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = tree.nodes[static_cast<std::size_t>(at)];
    at = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return tree.nodes[static_cast<std::size_t>(at)].leaf;
}

ClassReport report_from_confusion(const std::array<std::array<std::size_t, 2>, 2>& confusion) {
  ClassReport r;
  r.confusion = confusion;
  const double tn = static_cast<double>(confusion[0][0]);  // Normal predicted Normal
  const double fp = static_cast<double>(confusion[0][1]);
  const double fn = static_cast<double>(confusion[1][0]);
  const double tp = static_cast<double>(confusion[1][1]);  // Abnormal predicted Abnormal
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  r.rec_normal = ratio(tn, tn + fp);
  r.rec_abnormal = ratio(tp, tp + fn);
  r.acc_normal = r.rec_normal;
  r.acc_abnormal = r.rec_abnormal;
  r.prec_normal = ratio(tn, tn + fn);
  r.prec_abnormal = ratio(tp, tp + fp);
  r.f1_normal = ratio(2.0 * r.prec_normal * r.rec_normal, r.prec_normal + r.rec_normal);
  r.f1_abnormal = ratio(2.0 * r.prec_abnormal * r.rec_abnormal, r.prec_abnormal + r.rec_abnormal);
  r.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  r.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
  return r;
}

ClassReport evaluate(const Classifier& model, const LabeledDataset& test_set) {
  if (test_set.rows.empty()) fail(Errc::empty_test_set, "evaluate: empty test set");
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  for (std::size_t i = 0; i < test_set.rows.size(); ++i) {
    const int truth = as_index(test_set.labels[i]);
    const int pred = as_index(model.predict(test_set.rows[i]));
    ++confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
  }
  return report_from_confusion(confusion);
}

LabeledDataset windows_to_dataset(const FeatureTrajectory& trajectory, std::size_t window_beats,
                                  Provenance provenance, WindowLabelRule rule) {
  (void)rule;  // one rule today
  if (window_beats == 0) fail(Errc::invalid_config, "windows_to_dataset: window_beats must be >= 1");
  if (trajectory.size() < window_beats)
    fail(Errc::too_few_beats, "windows_to_dataset: " + std::to_string(trajectory.size()) + " beats cannot fill a " +
                                  std::to_string(window_beats) + "-beat window");
  LabeledDataset out;
  out.provenance = provenance;
  const std::size_t n_windows = trajectory.size() / window_beats;
  out.rows.reserve(n_windows);
  out.labels.reserve(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    std::vector<double> row;
    row.reserve(window_beats * trajectory.dim());
    bool abnormal = false;
    for (std::size_t b = 0; b < window_beats; ++b) {
      const auto& r = trajectory.rows[w * window_beats + b];
      row.insert(row.end(), r.values.begin(), r.values.end());
      abnormal = abnormal || r.label == BeatLabel::Abnormal;
    }
    out.rows.push_back(std::move(row));
    out.labels.push_back(abnormal ? BeatLabel::Abnormal : BeatLabel::Normal);
  }
  return out;
}

namespace {

void run_suite(const LabeledDataset& train_set, const LabeledDataset& test_set, const char* protocol,
               const std::vector<ClassifierSpec>& suite, std::uint64_t seed, TstrReport& out) {
  for (const auto& spec : suite) {
    TrainOptions opt;
    opt.balanced = spec.balanced;
    opt.seed = seed;
    const Classifier model = train(spec.kind, train_set, opt);
    out.rows.push_back({spec, protocol, evaluate(model, test_set)});
  }
}

}  // namespace

TstrReport tstr_protocol(const LabeledDataset& synth_train, const LabeledDataset& real_test,
                         const std::vector<ClassifierSpec>& suite, std::uint64_t seed) {
  if (synth_train.n_features() != real_test.n_features())
    fail(Errc::length_mismatch, "tstr_protocol: train and test feature widths differ");
  TstrReport report;
  run_suite(synth_train, real_test, "TSTR", suite, seed, report);
  run_suite(real_test, real_test, "TRTR", suite, seed, report);
  return report;
}

TstrReport tstr_protocol_split(const LabeledDataset& synth_train, const LabeledDataset& real_all,
                               double train_fraction, const std::vector<ClassifierSpec>& suite,
                               std::uint64_t seed) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    fail(Errc::invalid_config, "tstr_protocol_split: train_fraction must be in (0, 1)");
  const std::size_t n = real_all.rows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RandomSource rng(seed);
  for (std::size_t i = 0; i + 1 < n; ++i)
    std::swap(order[i], order[i + static_cast<std::size_t>(rng.uniform_int(n - i))]);
  const std::size_t n_train = std::max<std::size_t>(1, static_cast<std::size_t>(train_fraction * static_cast<double>(n)));

  LabeledDataset real_train, real_eval;
  real_train.provenance = real_eval.provenance = Provenance::Real;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = i < n_train ? real_train : real_eval;
    dst.rows.push_back(real_all.rows[order[i]]);
    dst.labels.push_back(real_all.labels[order[i]]);
  }
  if (real_eval.rows.empty()) fail(Errc::empty_test_set, "tstr_protocol_split: nothing left for evaluation");

  TstrReport report;
  run_suite(synth_train, real_eval, "TSTR", suite, seed, report);
  run_suite(real_train, real_eval, "TRTR", suite, seed, report);
  return report;
}

}  // namespace ecglong
