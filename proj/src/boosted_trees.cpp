#include "likecat/models/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "likecat/error.hpp"

namespace likecat {

double RegressionTree::predict(std::span<const double> x) const {
  int at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = nodes[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(at)].value;
}

int RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  // Children are always appended after their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature < 0) continue;
    for (int child : {nodes[i].left, nodes[i].right}) {
      level[static_cast<std::size_t>(child)] = level[i] + 1;
      deepest = std::max(deepest, level[i] + 1);
    }
  }
  return deepest;
}

void BoostedTreesConfig::validate() const {
  if (n_rounds < 0) throw Error(ErrorCode::InvalidConfig, "n_rounds must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must lie in (0,1]");
  if (max_depth < 0) throw Error(ErrorCode::InvalidConfig, "max_depth must be >= 0");
  if (min_leaf < 1) throw Error(ErrorCode::InvalidConfig, "min_leaf must be >= 1");
}

double BoostedTreesModel::raw_predict(std::span<const double> x) const {
  if (x.size() != dimension) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(dimension) + " features, got " + std::to_string(x.size()));
  }
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return base_prediction + config.learning_rate * sum;
}

PresortedColumns::PresortedColumns(std::span<const FeatureVector> rows) : n_rows_(rows.size()) {
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  columns_.assign(d, std::vector<double>(n_rows_));
  order_.assign(d, std::vector<std::uint32_t>(n_rows_));
  for (std::size_t i = 0; i < n_rows_; ++i) {
    if (rows[i].size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t f = 0; f < d; ++f) columns_[f][i] = rows[i][f];
  }
  for (std::size_t f = 0; f < d; ++f) {
    auto& ord = order_[f];
    std::iota(ord.begin(), ord.end(), 0u);
    const auto& col = columns_[f];
    std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
}

namespace {

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  // Adjacent doubles can round the midpoint up onto `hi`.
  return mid < hi ? mid : lo;
}

struct NodeStats {
  double sum = 0.0;
  std::size_t count = 0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct ScanState {
  double left_sum = 0.0;
  std::size_t left_count = 0;
  double prev_value = 0.0;
};

}  // namespace

RegressionTree fit_regression_tree(const PresortedColumns& data, std::span<const double> targets, int max_depth,
                                   int min_leaf, std::vector<double>& fitted) {
  const std::size_t n = data.n_rows();
  RegressionTree tree;
  tree.nodes.emplace_back();
  // Node id per row; rows in finished leaves keep the leaf id.
  std::vector<int> node_of(n, 0);
  std::vector<int> open = {0};
  const auto min_leaf_count = static_cast<std::size_t>(min_leaf);

  for (int depth = 0; !open.empty(); ++depth) {
    // Local slot per open node so scans use flat arrays.
    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) slot[static_cast<std::size_t>(open[s])] = static_cast<int>(s);

    std::vector<NodeStats> stats(open.size());
    for (std::size_t i = 0; i < n; ++i) {
      const int s = slot[static_cast<std::size_t>(node_of[i])];
      if (s < 0) continue;
      stats[static_cast<std::size_t>(s)].sum += targets[i];
      ++stats[static_cast<std::size_t>(s)].count;
    }

    std::vector<SplitCandidate> best(open.size());
    if (depth < max_depth) {
      for (std::size_t f = 0; f < data.n_features(); ++f) {
        const auto& col = data.column(f);
        std::vector<ScanState> scan(open.size());
        for (std::uint32_t i : data.order(f)) {
          const int s = slot[static_cast<std::size_t>(node_of[i])];
          if (s < 0) continue;
          auto& st = scan[static_cast<std::size_t>(s)];
          const auto& total = stats[static_cast<std::size_t>(s)];
          const double x = col[i];
          if (st.left_count >= min_leaf_count && x > st.prev_value && total.count - st.left_count >= min_leaf_count) {
            const double right_sum = total.sum - st.left_sum;
            const auto nl = static_cast<double>(st.left_count);
            const auto nr = static_cast<double>(total.count - st.left_count);
            const double gain = st.left_sum * st.left_sum / nl + right_sum * right_sum / nr -
                                total.sum * total.sum / static_cast<double>(total.count);
            auto& b = best[static_cast<std::size_t>(s)];
            if (gain > b.gain) b = {gain, static_cast<int>(f), midpoint(st.prev_value, x)};
          }
          st.left_sum += targets[i];
          ++st.left_count;
          st.prev_value = x;
        }
      }
    }

    std::vector<int> next_open;
    std::vector<int> left_child(open.size(), -1), right_child(open.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) {
      const auto id = static_cast<std::size_t>(open[s]);
      if (best[s].feature < 0) {
        tree.nodes[id].value = stats[s].sum / static_cast<double>(stats[s].count);
        continue;
      }
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      tree.nodes[id].feature = best[s].feature;
      tree.nodes[id].threshold = best[s].threshold;
      tree.nodes[id].left = l;
      tree.nodes[id].right = l + 1;
      left_child[s] = l;
      right_child[s] = l + 1;
      next_open.push_back(l);
      next_open.push_back(l + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int s = slot[static_cast<std::size_t>(node_of[i])];
      if (s < 0 || left_child[static_cast<std::size_t>(s)] < 0) continue;
      const auto& node = tree.nodes[static_cast<std::size_t>(open[static_cast<std::size_t>(s)])];
      node_of[i] = data.column(static_cast<std::size_t>(node.feature))[i] <= node.threshold
                       ? left_child[static_cast<std::size_t>(s)]
                       : right_child[static_cast<std::size_t>(s)];
    }
    open = std::move(next_open);
  }

  fitted.resize(n);
  for (std::size_t i = 0; i < n; ++i) fitted[i] = tree.nodes[static_cast<std::size_t>(node_of[i])].value;
  return tree;
}

namespace {

double mean_square(std::span<const double> r) {
  double acc = 0.0;
  for (double v : r) acc += v * v;
  return acc / static_cast<double>(r.size());
}

}  // namespace

BoostedTreesModel fit_boosted_trees(std::span<const FeatureVector> rows, std::span<const double> targets,
                                    const BoostedTreesConfig& config, std::vector<double>* train_mse) {
  config.validate();
  if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "boosting needs at least one row");
  if (rows.size() != targets.size()) throw Error(ErrorCode::LengthMismatch, "rows and targets differ in length");

  BoostedTreesModel model;
  model.config = config;
  model.dimension = rows.front().size();
  model.base_prediction =
      std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());

  std::vector<double> residual(targets.begin(), targets.end());
  for (double& r : residual) r -= model.base_prediction;
  if (train_mse) {
    train_mse->clear();
    train_mse->push_back(mean_square(residual));
  }

  const PresortedColumns data(rows);
  std::vector<double> fitted;
  for (int round = 0; round < config.n_rounds; ++round) {
    model.trees.push_back(fit_regression_tree(data, residual, config.max_depth, config.min_leaf, fitted));
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= config.learning_rate * fitted[i];
    if (train_mse) train_mse->push_back(mean_square(residual));
  }
  return model;
}

BoostedTreesModel fit_boosted_trees(const FeatureMatrix& train, Trait trait, const BoostedTreesConfig& config,
                                    std::vector<double>* train_mse) {
  std::vector<FeatureVector> rows;
  rows.reserve(train.size());
  for (const auto& r : train.rows) rows.push_back(r.features);
  return fit_boosted_trees(rows, train.targets(trait), config, train_mse);
}

}  // namespace likecat
