#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ecglong/delineate.hpp"
#include "ecglong/signal.hpp"

namespace ecglong {

enum class Provenance { Real, Synthetic };

struct LabeledDataset {
  std::vector<std::vector<double>> rows;
  std::vector<BeatLabel> labels;
  Provenance provenance = Provenance::Real;

  std::size_t n_features() const { return rows.empty() ? 0 : rows.front().size(); }
  bool trainable() const;  // both classes present
};

enum class ClassifierKind { GaussianNaiveBayes, LogisticRegression, DecisionTree, LinearSVM };

const char* to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct TrainOptions {
  bool balanced = false;  // class weights inverse to frequency (logreg / svm only)
  std::uint64_t seed = 0;
  int iterations = 500;
  double learning_rate = 0.1;
  int max_depth = 8;     // decision tree
  int min_leaf = 5;      // decision tree
  double svm_l2 = 1e-3;  // linear SVM ridge term
};

/// A fitted classifier. Training is deterministic for a given seed: linear
/// models run full-batch gradient descent from zero on standardized features,
/// the tree search scans features and thresholds in a fixed order.
class Classifier {
 public:
  BeatLabel predict(const std::vector<double>& row) const;
  ClassifierKind kind() const { return kind_; }

  struct Impl;
  explicit Classifier(std::shared_ptr<const Impl> impl, ClassifierKind kind)
      : impl_(std::move(impl)), kind_(kind) {}

 private:
  std::shared_ptr<const Impl> impl_;
  ClassifierKind kind_;
};

Classifier train(ClassifierKind kind, const LabeledDataset& train_set, const TrainOptions& options = {});

/// Confusion-matrix summary. Per-class accuracy is that class's recall, as
/// in the published tables. MCC uses Abnormal as the positive class with the
/// zero-denominator-means-zero convention.
struct ClassReport {
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [true][pred], 0=Normal 1=Abnormal
  double acc_normal = 0, acc_abnormal = 0;
  double prec_normal = 0, prec_abnormal = 0;
  double rec_normal = 0, rec_abnormal = 0;
  double f1_normal = 0, f1_abnormal = 0;
  double accuracy = 0;
  double mcc = 0;
};

ClassReport report_from_confusion(const std::array<std::array<std::size_t, 2>, 2>& confusion);
ClassReport evaluate(const Classifier& model, const LabeledDataset& test_set);

enum class WindowLabelRule { AnyAbnormal };

// Non-overlapping windows of `window_beats` consecutive feature rows,
// concatenated into one dataset row each; a window is Abnormal when any
// member beat is (the default rule).
LabeledDataset windows_to_dataset(const FeatureTrajectory& trajectory, std::size_t window_beats,
                                  Provenance provenance, WindowLabelRule rule = WindowLabelRule::AnyAbnormal);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::GaussianNaiveBayes;
  bool balanced = false;
  std::string name() const;
};

// gnb, logreg, tree, svm plus the balanced logreg/svm variants.
std::vector<ClassifierSpec> default_classifier_suite();
ClassifierSpec classifier_spec_from_string(const std::string& name);

struct TstrRow {
  ClassifierSpec spec;
  std::string protocol;  // "TSTR" or "TRTR"
  ClassReport report;
};

struct TstrReport {
  std::vector<TstrRow> rows;
};

// Train-on-synthetic/test-on-real with a train-on-real baseline evaluated on
// the same test set. The baseline trains on the test set itself; use the
// split variant for a held-out baseline.
TstrReport tstr_protocol(const LabeledDataset& synth_train, const LabeledDataset& real_test,
                         const std::vector<ClassifierSpec>& suite, std::uint64_t seed);

// Splits the real dataset by a seeded shuffle: the baseline trains on the
// first `train_fraction`, both protocols evaluate on the remainder.
TstrReport tstr_protocol_split(const LabeledDataset& synth_train, const LabeledDataset& real_all,
                               double train_fraction, const std::vector<ClassifierSpec>& suite,
                               std::uint64_t seed);

}  // namespace ecglong
