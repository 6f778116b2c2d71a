#include "taxmine/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"

namespace taxmine {

namespace {

std::optional<PairLabel> label_from_name(std::string_view name) {
  if (name == "specialization") return PairLabel::Specialization;
  if (name == "generalization") return PairLabel::Generalization;
  if (name == "undefined") return PairLabel::Undefined;
  return std::nullopt;
}

}  // namespace

std::vector<LabeledPair> load_labeled_pairs(std::istream& in, LabeledLoadStats* stats) {
  LabeledLoadStats local;
  LabeledLoadStats& st = stats ? *stats : local;
  std::vector<LabeledPair> pairs;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++st.lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f.size() != 7) {
      throw DataError("labeled pairs: expected 7 columns at line " + std::to_string(line_no));
    }
    LabeledPair pair;
    pair.q1 = normalize_query(f[0]);
    pair.q2 = normalize_query(f[2]);
    auto t1 = parse_timestamp(f[1]);
    auto t2 = parse_timestamp(f[3]);
    if (pair.q1.empty() || pair.q2.empty() || !t1 || !t2) {
      throw DataError("labeled pairs: bad row at line " + std::to_string(line_no));
    }
    pair.t1 = *t1;
    pair.t2 = *t2;

    int votes_spec = 0, votes_gen = 0;
    for (size_t j = 4; j < 7; ++j) {
      auto vote = label_from_name(to_lower_ascii(f[j]));
      if (!vote) {
        throw DataError("labeled pairs: unknown judge label at line " + std::to_string(line_no));
      }
      if (*vote == PairLabel::Specialization) ++votes_spec;
      if (*vote == PairLabel::Generalization) ++votes_gen;
    }
    if (votes_spec >= 2) {
      pair.label = PairLabel::Specialization;
    } else if (votes_gen >= 2) {
      pair.label = PairLabel::Generalization;
    } else {
      pair.label = PairLabel::Undefined;
    }
    ++st.rows;
    if (pair.label == PairLabel::Undefined) {
      ++st.undefined_dropped;
      continue;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

namespace {

double entropy_bits(int c0, int c1) {
  int n = c0 + c1;
  if (n == 0 || c0 == 0 || c1 == 0) return 0.0;
  double p0 = static_cast<double>(c0) / n;
  double p1 = static_cast<double>(c1) / n;
  return -(p0 * std::log2(p0) + p1 * std::log2(p1));
}

constexpr double kMinGain = 1e-12;

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double ratio = 0.0;
};

struct Builder {
  const std::vector<FeatureVector>& rows;
  const std::vector<int>& labels;
  TreeParams params;
  std::vector<DecisionTree::Node> nodes;

  int build(std::vector<int>& idx, int depth) {
    std::array<int, 2> counts{0, 0};
    for (int i : idx) ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];

    int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<size_t>(node_id)].counts = counts;

    SplitChoice split;
    if (counts[0] != 0 && counts[1] != 0 && depth < params.max_depth) {
      split = best_split(idx, counts);
    }
    if (!split.found) {
      nodes[static_cast<size_t>(node_id)].leaf_class = counts[1] > counts[0] ? 1 : 0;
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : idx) {
      if (rows[static_cast<size_t>(i)][static_cast<size_t>(split.feature)] <= split.threshold) {
        left.push_back(i);
      } else {
        right.push_back(i);
      }
    }
    idx.clear();
    idx.shrink_to_fit();

    int left_id = build(left, depth + 1);
    int right_id = build(right, depth + 1);
    DecisionTree::Node& node = nodes[static_cast<size_t>(node_id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left_id;
    node.right = right_id;
    return node_id;
  }

  SplitChoice best_split(const std::vector<int>& idx, const std::array<int, 2>& counts) {
    SplitChoice best;
    int n = static_cast<int>(idx.size());
    double total_entropy = entropy_bits(counts[0], counts[1]);
    std::vector<std::pair<double, int>> values(idx.size());
    for (int f = 0; f < static_cast<int>(kFeatureCount); ++f) {
      for (size_t i = 0; i < idx.size(); ++i) {
        const auto row = static_cast<size_t>(idx[i]);
        values[i] = {rows[row][static_cast<size_t>(f)], labels[row]};
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::array<int, 2> left{0, 0};
      for (int i = 0; i + 1 < n; ++i) {
        ++left[static_cast<size_t>(values[static_cast<size_t>(i)].second)];
        double v = values[static_cast<size_t>(i)].first;
        double next = values[static_cast<size_t>(i) + 1].first;
        if (v == next) continue;
        int nl = i + 1;
        int nr = n - nl;
        if (nl < params.min_leaf || nr < params.min_leaf) continue;
        std::array<int, 2> right{counts[0] - left[0], counts[1] - left[1]};
        double pl = static_cast<double>(nl) / n;
        double pr = static_cast<double>(nr) / n;
        double gain =
            total_entropy - pl * entropy_bits(left[0], left[1]) - pr * entropy_bits(right[0], right[1]);
        if (gain <= kMinGain) continue;
        double split_info = -(pl * std::log2(pl) + pr * std::log2(pr));
        double ratio = gain / split_info;
        // Strict improvement keeps the lowest feature index, lowest
        // threshold on ties (iteration order is ascending in both).
        if (!best.found || ratio > best.ratio) {
          best.found = true;
          best.feature = f;
          best.threshold = (v + next) / 2.0;
          best.ratio = ratio;
        }
      }
    }
    return best;
  }
};

}  // namespace

DecisionTree DecisionTree::induce(const std::vector<FeatureVector>& rows,
                                  const std::vector<int>& labels, const TreeParams& params,
                                  uint64_t seed) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw std::invalid_argument("induce: empty or mismatched training data");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) throw std::invalid_argument("induce: labels must be 0/1");
  }
  if (params.min_leaf < 1 || params.max_depth < 1) {
    throw ConfigError("tree params must be positive");
  }
  Builder builder{rows, labels, params, {}};
  std::vector<int> idx(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) idx[i] = static_cast<int>(i);
  builder.build(idx, 0);

  DecisionTree tree;
  tree.nodes_ = std::move(builder.nodes);
  tree.params_ = params;
  tree.seed_ = seed;
  return tree;
}

int DecisionTree::predict(const FeatureVector& v) const {
  if (nodes_.empty()) throw std::logic_error("predict on an empty tree");
  int at = 0;
  while (nodes_[static_cast<size_t>(at)].feature >= 0) {
    const Node& node = nodes_[static_cast<size_t>(at)];
    at = v[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<size_t>(at)].leaf_class;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  // Depth via explicit stack of (node, depth).
  int max_depth = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<size_t>(at)];
    max_depth = std::max(max_depth, d);
    if (node.feature >= 0) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return max_depth;
}

std::string DecisionTree::serialize() const {
  nlohmann::json j;
  j["format"] = "taxmine-tree";
  j["version"] = 1;
  j["min_leaf"] = params_.min_leaf;
  j["max_depth"] = params_.max_depth;
  j["seed"] = seed_;
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& node : nodes_) {
    nlohmann::json n;
    n["f"] = node.feature;
    n["t"] = node.threshold;
    n["l"] = node.left;
    n["r"] = node.right;
    n["c"] = node.leaf_class;
    n["n0"] = node.counts[0];
    n["n1"] = node.counts[1];
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  return j.dump();
}

DecisionTree DecisionTree::deserialize(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || j.value("format", "") != "taxmine-tree" || j.value("version", 0) != 1) {
    throw DataError("tree file: unsupported format");
  }
  DecisionTree tree;
  tree.params_.min_leaf = j.value("min_leaf", 2);
  tree.params_.max_depth = j.value("max_depth", 25);
  tree.seed_ = j.value("seed", uint64_t{0});
  for (const auto& n : j.at("nodes")) {
    Node node;
    node.feature = n.at("f").get<int>();
    node.threshold = n.at("t").get<double>();
    node.left = n.at("l").get<int>();
    node.right = n.at("r").get<int>();
    node.leaf_class = n.at("c").get<int>();
    node.counts[0] = n.at("n0").get<int>();
    node.counts[1] = n.at("n1").get<int>();
    if (node.feature >= static_cast<int>(kFeatureCount)) {
      throw DataError("tree file: feature index out of range");
    }
    tree.nodes_.push_back(node);
  }
  if (tree.nodes_.empty()) throw DataError("tree file: no nodes");
  for (const Node& node : tree.nodes_) {
    if (node.feature >= 0) {
      auto valid = [&](int child) {
        return child > 0 && child < static_cast<int>(tree.nodes_.size());
      };
      if (!valid(node.left) || !valid(node.right)) throw DataError("tree file: bad child link");
    }
  }
  return tree;
}

double gain_ratio(const std::vector<FeatureVector>& rows, const std::vector<int>& labels,
                  int feature, double threshold) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw std::invalid_argument("gain_ratio: empty or mismatched data");
  }
  if (feature < 0 || feature >= static_cast<int>(kFeatureCount)) {
    throw std::invalid_argument("gain_ratio: feature out of range");
  }
  std::array<int, 2> total{0, 0}, left{0, 0}, right{0, 0};
  int nl = 0, nr = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    ++total[static_cast<size_t>(labels[i])];
    if (rows[i][static_cast<size_t>(feature)] <= threshold) {
      ++left[static_cast<size_t>(labels[i])];
      ++nl;
    } else {
      ++right[static_cast<size_t>(labels[i])];
      ++nr;
    }
  }
  if (nl == 0 || nr == 0) {
    throw std::invalid_argument("gain_ratio: degenerate split");
  }
  int n = nl + nr;
  double pl = static_cast<double>(nl) / n;
  double pr = static_cast<double>(nr) / n;
  double gain = entropy_bits(total[0], total[1]) - pl * entropy_bits(left[0], left[1]) -
                pr * entropy_bits(right[0], right[1]);
  double split_info = -(pl * std::log2(pl) + pr * std::log2(pr));
  return gain / split_info;
}

CascadeOutcome cascade_classify(const FeatureVector& features, const DecisionTree& spec_tree,
                                const DecisionTree& gen_tree) {
  if (spec_tree.predict(features) == 1) return CascadeOutcome::ForwardSpecialization;
  if (gen_tree.predict(features) == 1) return CascadeOutcome::ReverseSpecialization;
  return CascadeOutcome::Discard;
}

std::string TrainReport::to_json() const {
  nlohmann::json j;
  j["n_total"] = n_total;
  j["n_train"] = n_train;
  j["n_test"] = n_test;
  j["accuracy"] = accuracy;
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j["specialization_precision"] = opt(spec_precision);
  j["specialization_recall"] = opt(spec_recall);
  j["generalization_precision"] = opt(gen_precision);
  j["generalization_recall"] = opt(gen_recall);
  j["zero_variance"] = zero_variance;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

namespace {

// Portable Fisher-Yates; std::shuffle is implementation-defined.
void seeded_shuffle(std::vector<size_t>& order, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

TrainResult train_eval(const std::vector<LabeledPair>& labeled, const Indices* indices,
                       double holdout_fraction, uint64_t seed, const TreeParams& params) {
  std::vector<const LabeledPair*> usable;
  for (const LabeledPair& pair : labeled) {
    if (pair.label != PairLabel::Undefined) usable.push_back(&pair);
  }
  if (usable.size() < 6) {
    throw DataError("train: need at least 6 labeled specialization/generalization pairs, got " +
                    std::to_string(usable.size()));
  }
  if (!(holdout_fraction > 0.0) || holdout_fraction >= 1.0) {
    throw ConfigError("holdout fraction must be in (0, 1)");
  }

  std::vector<FeatureVector> features(usable.size());
  for (size_t i = 0; i < usable.size(); ++i) {
    const LabeledPair& pair = *usable[i];
    QueryRecord r1, r2;
    r1.query = pair.q1;
    r1.query_norm = pair.q1;
    r1.timestamp = pair.t1;
    r2.query = pair.q2;
    r2.query_norm = pair.q2;
    r2.timestamp = pair.t2;
    PairSessionContext ctx;
    if (indices) ctx = pair_session_stats(pair.q1, pair.q2, *indices);
    features[i] = compute_features(r1, r2, ctx);
  }

  std::vector<size_t> order(usable.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, seed);

  size_t n_test = static_cast<size_t>(static_cast<double>(usable.size()) * holdout_fraction);
  size_t n_train = usable.size() - n_test;

  std::vector<FeatureVector> train_rows;
  std::vector<int> spec_labels, gen_labels;
  train_rows.reserve(n_train);
  for (size_t i = n_test; i < order.size(); ++i) {
    const LabeledPair& pair = *usable[order[i]];
    train_rows.push_back(features[order[i]]);
    spec_labels.push_back(pair.label == PairLabel::Specialization ? 1 : 0);
    gen_labels.push_back(pair.label == PairLabel::Generalization ? 1 : 0);
  }

  TrainResult result;
  result.spec_tree = DecisionTree::induce(train_rows, spec_labels, params, seed);
  result.gen_tree = DecisionTree::induce(train_rows, gen_labels, params, seed);

  TrainReport& report = result.report;
  report.n_total = usable.size();
  report.n_train = n_train;
  report.n_test = n_test;
  report.seed = seed;
  int train_spec = 0;
  for (int label : spec_labels) train_spec += label;
  report.zero_variance = train_spec == 0 || static_cast<size_t>(train_spec) == n_train;

  size_t correct = 0;
  uint64_t spec_tp = 0, spec_predicted = 0, spec_actual = 0;
  uint64_t gen_tp = 0, gen_predicted = 0, gen_actual = 0;
  for (size_t i = 0; i < n_test; ++i) {
    const LabeledPair& pair = *usable[order[i]];
    CascadeOutcome outcome = cascade_classify(features[order[i]], result.spec_tree, result.gen_tree);
    bool actual_spec = pair.label == PairLabel::Specialization;
    if (actual_spec) ++spec_actual;
    else ++gen_actual;
    if (outcome == CascadeOutcome::ForwardSpecialization) {
      ++spec_predicted;
      if (actual_spec) {
        ++spec_tp;
        ++correct;
      }
    } else if (outcome == CascadeOutcome::ReverseSpecialization) {
      ++gen_predicted;
      if (!actual_spec) {
        ++gen_tp;
        ++correct;
      }
    }
  }
  report.accuracy = n_test > 0 ? static_cast<double>(correct) / static_cast<double>(n_test) : 0.0;
  if (spec_predicted > 0)
    report.spec_precision = static_cast<double>(spec_tp) / static_cast<double>(spec_predicted);
  if (spec_actual > 0)
    report.spec_recall = static_cast<double>(spec_tp) / static_cast<double>(spec_actual);
  if (gen_predicted > 0)
    report.gen_precision = static_cast<double>(gen_tp) / static_cast<double>(gen_predicted);
  if (gen_actual > 0)
    report.gen_recall = static_cast<double>(gen_tp) / static_cast<double>(gen_actual);
  return result;
}

}  // namespace taxmine
