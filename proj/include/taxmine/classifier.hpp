#pragma once

#include <iosfwd>

#include "taxmine/features.hpp"

namespace taxmine {

enum class PairLabel { Specialization, Generalization, Undefined };

struct LabeledPair {
  std::string q1;
  int64_t t1 = 0;
  std::string q2;
  int64_t t2 = 0;
  PairLabel label = PairLabel::Undefined;
};

struct LabeledLoadStats {
  uint64_t lines = 0;
  uint64_t rows = 0;
  uint64_t undefined_dropped = 0;
};

// `q1<TAB>t1<TAB>q2<TAB>t2<TAB>judge1<TAB>judge2<TAB>judge3`; judge entries
// are specialization | generalization | undefined. Majority vote decides the
// label; rows without a majority resolve to Undefined and are dropped.
std::vector<LabeledPair> load_labeled_pairs(std::istream& in, LabeledLoadStats* stats = nullptr);

struct TreeParams {
  int min_leaf = 2;
  int max_depth = 25;
};

// Binary decision tree over numeric features, split on gain ratio.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;        // -1 for leaves
    double threshold = 0.0;  // go left when value <= threshold
    int left = -1;
    int right = -1;
    int leaf_class = -1;
    std::array<int, 2> counts{0, 0};  // training distribution at the node
  };

  // Recursive induction: thresholds are midpoints between consecutive
  // distinct feature values; stops on purity, min_leaf, max_depth or when no
  // split has positive information gain. Leaf ties go to class 0.
  static DecisionTree induce(const std::vector<FeatureVector>& rows,
                             const std::vector<int>& labels, const TreeParams& params,
                             uint64_t seed = 0);

  int predict(const FeatureVector& v) const;

  // Versioned JSON; byte-identical across platforms for the same tree.
  std::string serialize() const;
  static DecisionTree deserialize(const std::string& text);

  const std::vector<Node>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  int depth() const;

 private:
  std::vector<Node> nodes_;
  TreeParams params_;
  uint64_t seed_ = 0;
};

// Information gain over split information, both in bits.
// std::invalid_argument when a partition side is empty.
double gain_ratio(const std::vector<FeatureVector>& rows, const std::vector<int>& labels,
                  int feature, double threshold);

enum class CascadeOutcome { ForwardSpecialization, ReverseSpecialization, Discard };

// Two binary classifiers in a queue: specialization first, then
// generalization (flipped by antisymmetry); anything else is discarded.
CascadeOutcome cascade_classify(const FeatureVector& features, const DecisionTree& spec_tree,
                                const DecisionTree& gen_tree);

struct TrainReport {
  size_t n_total = 0;
  size_t n_train = 0;
  size_t n_test = 0;
  double accuracy = 0.0;
  std::optional<double> spec_precision, spec_recall;
  std::optional<double> gen_precision, gen_recall;
  bool zero_variance = false;  // single-class training set
  uint64_t seed = 0;
  std::string to_json() const;
};

struct TrainResult {
  DecisionTree spec_tree;
  DecisionTree gen_tree;
  TrainReport report;
};

// Seeded shuffle, floor(n * holdout_fraction) held out, two one-vs-rest
// trees, cascade metrics on the holdout. DataError under 6 usable pairs.
TrainResult train_eval(const std::vector<LabeledPair>& labeled, const Indices* indices,
                       double holdout_fraction, uint64_t seed, const TreeParams& params);

}  // namespace taxmine
