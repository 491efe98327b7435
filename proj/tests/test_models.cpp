#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "fssinv/metrics.hpp"
#include "fssinv/models/model.hpp"
#include "fssinv/random.hpp"

using namespace fssinv;

namespace {

design_matrix make(std::vector<std::vector<double>> xs, std::vector<std::vector<double>> ys, int size) {
  design_matrix d;
  d.image_size = size;
  d.x.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs[0].size()));
  d.y.resize(static_cast<Eigen::Index>(ys.size()), static_cast<Eigen::Index>(ys[0].size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t f = 0; f < xs[i].size(); ++f) d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = xs[i][f];
    for (std::size_t p = 0; p < ys[i].size(); ++p) d.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = ys[i][p];
  }
  return d;
}

// Labelled toy corpus: a 3x3 image whose pixels depend on thresholds of a
// few features, plus two columns that are always the same.
design_matrix toy_labels(int n, std::uint64_t seed, int features = 6) {
  rng_engine rng(seed);
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(features));
    for (auto& v : x) v = uniform_unit(rng);
    std::vector<double> y(9, 0.0);
    y[4] = 2;
    y[0] = y[8] = x[0] > 0.5 ? 2 : 0;
    y[1] = y[7] = x[1] > 0.3 ? 1 : (x[2] > 0.6 ? 2 : 0);
    y[2] = static_cast<double>(uniform_index(rng, 3));
    y[3] = y[5] = x[0] + x[3] > 1.0 ? 1 : 0;
    xs.push_back(x);
    ys.push_back(y);
  }
  return make(xs, ys, 3);
}

design_matrix toy_regression(int n, std::uint64_t seed, double noise) {
  rng_engine rng(seed);
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = uniform_unit(rng);
    std::vector<double> y(4);
    y[0] = 2 * x[0];
    y[1] = x[1] + x[2];
    y[2] = 1.0;
    y[3] = x[0] > 0.5 ? 2.0 : 0.0;
    for (auto& v : y) v += noise * (uniform_unit(rng) - 0.5);
    xs.push_back(x);
    ys.push_back(y);
  }
  return make(xs, ys, 2);
}

model_spec spec_of(model_kind k) { return default_spec(k, 42); }

std::vector<double> flat(const matrix& m) { return {m.data(), m.data() + m.size()}; }

}  // namespace

TEST(DecisionTree, SingleSampleGivesOneLeaf) {
  const auto d = make({{0.1, 0.2, 0.3}}, {{0, 1, 2, 1}}, 2);
  const auto m = fit(spec_of(model_kind::dtc), d);
  const auto& forest = std::get<tree_ensemble>(m.state);
  ASSERT_EQ(forest.trees.size(), 1u);
  EXPECT_EQ(forest.trees[0].nodes.size(), 1u);
  const std::vector<double> q{0.9, 0.9, 0.9};
  EXPECT_EQ(predict(m, q).values, (std::vector<double>{0, 1, 2, 1}));
}

// Weighted Gini impurity averaged over outputs, minimised by exhaustive
// search over (feature, midpoint) pairs.
TEST(DecisionTree, RootSplitMatchesBruteForceGini) {
  const auto d = make({{0.2, 0.10}, {0.7, 0.20}, {0.4, 0.80}, {0.9, 0.95}},
                      {{0, 0, 1, 1}, {0, 0, 1, 1}, {2, 2, 1, 0}, {2, 2, 1, 0}}, 2);
  auto gini = [&](const std::vector<int>& rows) {
    double total = 0;
    for (int u = 0; u < 4; ++u) {
      std::array<double, 3> cnt{};
      for (int r : rows) cnt[static_cast<std::size_t>(d.y(r, u))] += 1;
      double g = 1;
      for (double c : cnt) g -= (c / rows.size()) * (c / rows.size());
      total += g / 4;
    }
    return total;
  };
  int best_f = -1;
  double best_t = 0, best = std::numeric_limits<double>::infinity();
  for (int f = 0; f < 2; ++f) {
    std::set<double> vals;
    for (int i = 0; i < 4; ++i) vals.insert(d.x(i, f));
    std::vector<double> v(vals.begin(), vals.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double t = (v[k] + v[k + 1]) / 2;
      std::vector<int> l, r;
      for (int i = 0; i < 4; ++i) (d.x(i, f) <= t ? l : r).push_back(i);
      const double score = (l.size() * gini(l) + r.size() * gini(r)) / 4.0;
      if (score < best - 1e-12) {
        best = score;
        best_f = f;
        best_t = t;
      }
    }
  }
  ASSERT_EQ(best_f, 1);
  const auto m = fit(spec_of(model_kind::dtc), d);
  const auto& root = std::get<tree_ensemble>(m.state).trees[0].nodes[0];
  EXPECT_EQ(root.feature, best_f);
  EXPECT_DOUBLE_EQ(root.threshold, best_t);
  EXPECT_DOUBLE_EQ(root.threshold, 0.5);
}

TEST(DecisionTree, ReachesTrainingPerfection) {
  const auto d = toy_labels(60, 3);
  const auto dtc = fit(spec_of(model_kind::dtc), d);
  EXPECT_EQ(pixel_accuracy(flat(d.y), predict_rows(dtc, d.x)), 1.0);
  const auto r = toy_regression(60, 4, 0.3);
  const auto dtr = fit(spec_of(model_kind::dtr), r);
  EXPECT_NEAR(r2_pooled(flat(r.y), predict_rows(dtr, r.x)), 1.0, 1e-12);
}

TEST(DecisionTree, DepthAndLeafLimitsAreRespected) {
  const auto d = toy_regression(80, 5, 0.3);
  auto s = spec_of(model_kind::dtr);
  s.max_depth = 2;
  const auto m = fit(s, d);
  EXPECT_LE(std::get<tree_ensemble>(m.state).trees[0].leaf_count(), 4);
  s.max_depth = 0;
  s.min_samples_leaf = 10;
  const auto limited = fit(s, d);
  const auto& t = std::get<tree_ensemble>(limited.state).trees[0];
  for (int l = 0; l < t.leaf_count(); ++l) {
    double w = 0;
    for (int k = t.leaf_begin[l]; k < t.leaf_begin[l + 1]; ++k) w += t.leaf_weights[k];
    EXPECT_GE(w, 10.0);
  }
}

TEST(RandomForest, SingleTreeWithoutBootstrapIsDecisionTree) {
  const auto d = toy_labels(50, 8);
  auto rf = spec_of(model_kind::rfc);
  rf.n_trees = 1;
  rf.bootstrap = false;
  rf.max_features = static_cast<int>(d.features());
  const auto a = fit(rf, d);
  const auto b = fit(spec_of(model_kind::dtc), d);
  const auto probe = toy_labels(30, 99);
  EXPECT_EQ(predict_rows(a, probe.x), predict_rows(b, probe.x));
  EXPECT_EQ(predict_rows(a, d.x), predict_rows(b, d.x));

  const auto r = toy_regression(50, 8, 0.2);
  auto rr = spec_of(model_kind::rfr);
  rr.n_trees = 1;
  rr.bootstrap = false;
  rr.max_features = static_cast<int>(r.features());
  EXPECT_EQ(predict_rows(fit(rr, r), r.x), predict_rows(fit(spec_of(model_kind::dtr), r), r.x));
}

TEST(RandomForest, ClassifierIsMajorityOverTrees) {
  const auto d = toy_labels(60, 12);
  auto s = spec_of(model_kind::rfc);
  s.n_trees = 7;
  const auto m = fit(s, d);
  const auto& forest = std::get<tree_ensemble>(m.state);
  const auto probe = toy_labels(25, 77);
  const auto got = predict_rows(m, probe.x);
  for (Eigen::Index q = 0; q < probe.x.rows(); ++q) {
    const double* x = probe.x.row(q).data();
    for (int p = 0; p < 9; ++p) {
      std::array<int, 3> votes{};
      for (const auto& t : forest.trees) {
        const int leaf = t.find_leaf(x);
        std::array<double, 3> w{};
        for (int k = t.leaf_begin[leaf]; k < t.leaf_begin[leaf + 1]; ++k)
          w[static_cast<std::size_t>(d.y(t.leaf_rows[k], p))] += t.leaf_weights[k];
        votes[static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin())] += 1;
      }
      const int expect = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
      ASSERT_EQ(got[static_cast<std::size_t>(q * 9 + p)], expect);
    }
  }
}

TEST(RandomForest, RegressorIsMeanOverTrees) {
  const auto d = toy_regression(60, 13, 0.4);
  auto s = spec_of(model_kind::rfr);
  s.n_trees = 6;
  const auto m = fit(s, d);
  const auto& forest = std::get<tree_ensemble>(m.state);
  const auto probe = toy_regression(20, 78, 0.0);
  const auto got = predict_rows(m, probe.x);
  for (Eigen::Index q = 0; q < probe.x.rows(); ++q) {
    const double* x = probe.x.row(q).data();
    for (int p = 0; p < 4; ++p) {
      double sum = 0;
      for (const auto& t : forest.trees) {
        const int leaf = t.find_leaf(x);
        double num = 0, den = 0;
        for (int k = t.leaf_begin[leaf]; k < t.leaf_begin[leaf + 1]; ++k) {
          num += t.leaf_weights[k] * d.y(t.leaf_rows[k], p);
          den += t.leaf_weights[k];
        }
        sum += num / den;
      }
      ASSERT_NEAR(got[static_cast<std::size_t>(q * 4 + p)], sum / 6.0, 1e-12);
    }
  }
}

TEST(RandomForest, DefaultFeatureCounts) {
  EXPECT_EQ(default_max_features(tree_task::classification, 30), 6);
  EXPECT_EQ(default_max_features(tree_task::regression, 30), 10);
  EXPECT_EQ(default_max_features(tree_task::regression, 2), 1);
  EXPECT_EQ(default_max_features(tree_task::classification, 16), 4);
}

TEST(Knn, SingleNeighbourReproducesTraining) {
  const auto d = toy_labels(40, 21);
  auto s = spec_of(model_kind::knc);
  s.k = 1;
  EXPECT_EQ(predict_rows(fit(s, d), d.x), flat(d.y));
}

TEST(Knn, MajorityVoteAndTies) {
  const auto d = make({{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.2}, {1.0, 1.0}},
                      {{0, 1, 1, 0}, {0, 2, 1, 0}, {2, 1, 0, 0}, {1, 1, 1, 1}}, 2);
  auto s = spec_of(model_kind::knc);
  s.k = 3;
  const auto m = fit(s, d);
  const std::vector<double> q{0.0, 0.0};
  const auto out = predict(m, q).values;
  EXPECT_EQ(out[0], 0);  // votes 0,0,2
  EXPECT_EQ(out[1], 1);  // votes 1,2,1
  EXPECT_EQ(out[2], 1);  // votes 1,1,0
  EXPECT_EQ(out[3], 0);

  // three-way tie goes to the lowest class
  const auto t = make({{0.0}, {0.1}, {0.2}}, {{2, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}}, 2);
  s.k = 3;
  const std::vector<double> q1{0.1};
  EXPECT_EQ(predict(fit(s, t), q1).values[0], 0);

  // equidistant neighbours: the lower sample index wins
  const auto e = make({{0.0}, {0.2}, {0.2}}, {{1, 1, 1, 1}, {2, 2, 2, 2}, {0, 0, 0, 0}}, 2);
  s.k = 1;
  const std::vector<double> q2{0.1};
  EXPECT_EQ(predict(fit(s, e), q2).values[0], 1);
  const std::vector<double> q3{0.3};
  EXPECT_EQ(predict(fit(s, e), q3).values[0], 2);
}

TEST(Linear, RecoversExactLinearMap) {
  rng_engine rng(5);
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = uniform_unit(rng);
    ys.push_back({0.5 + x[0] - 2 * x[1], 3 * x[4], 1.0, x[2] + x[3] - x[0]});
    xs.push_back(x);
  }
  const auto d = make(xs, ys, 2);
  const auto m = fit(spec_of(model_kind::lir), d);
  const auto pred = predict_rows(m, d.x);
  const auto truth = flat(d.y);
  for (std::size_t i = 0; i < truth.size(); ++i) EXPECT_NEAR(pred[i], truth[i], 1e-6);
}

TEST(Linear, TinyRidgeMatchesLeastSquares) {
  const auto d = toy_regression(50, 31, 0.5);
  auto rr = spec_of(model_kind::rr);
  rr.lambda = 1e-8;
  const auto a = predict_rows(fit(rr, d), d.x);
  const auto b = predict_rows(fit(spec_of(model_kind::lir), d), d.x);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-5);
}

TEST(Linear, HeavyL1PenaltyPredictsTrainingMeans) {
  const auto d = toy_regression(50, 32, 0.5);
  const Eigen::VectorXd mean = d.y.colwise().mean();
  for (auto kind : {model_kind::lr, model_kind::er}) {
    auto s = spec_of(kind);
    s.lambda = 1e6;
    const auto m = fit(s, d);
    const auto pred = predict_rows(m, d.x);
    for (Eigen::Index i = 0; i < d.y.rows(); ++i)
      for (Eigen::Index p = 0; p < 4; ++p) ASSERT_NEAR(pred[static_cast<std::size_t>(i * 4 + p)], mean[p], 1e-12);
    EXPECT_NEAR(r2_per_output_baseline(flat(d.y), pred, 4), 0.0, 1e-9);
    EXPECT_EQ(std::get<linear_model>(m.state).coef.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Linear, ElasticNetEndpoints) {
  const auto d = toy_regression(60, 33, 0.3);
  auto en = spec_of(model_kind::er);
  auto lasso = spec_of(model_kind::lr);
  auto ridge = spec_of(model_kind::rr);
  for (double lambda : {0.001, 0.01, 0.1}) {
    en.lambda = lasso.lambda = ridge.lambda = lambda;
    en.rho = 1.0;
    const auto a = predict_rows(fit(en, d), d.x);
    const auto b = predict_rows(fit(lasso, d), d.x);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-6);
    en.rho = 0.0;
    const auto c = predict_rows(fit(en, d), d.x);
    const auto r = predict_rows(fit(ridge, d), d.x);
    for (std::size_t i = 0; i < c.size(); ++i) ASSERT_NEAR(c[i], r[i], 1e-6);
  }
}

// Lasso solution checked against its optimality conditions on the
// normalised objective 1/(2n)|r|^2 + lambda |w|_1.
TEST(Linear, LassoSatisfiesOptimalityConditions) {
  const auto d = toy_regression(60, 34, 0.3);
  auto s = spec_of(model_kind::lr);
  s.lambda = 0.02;
  const auto m = fit(s, d);
  const auto& lm = std::get<linear_model>(m.state);
  const auto pred = predict_rows(m, d.x);
  const double n = static_cast<double>(d.x.rows());
  for (Eigen::Index p = 0; p < 4; ++p) {
    const auto col = static_cast<Eigen::Index>(lm.map.pixel_to_column[static_cast<std::size_t>(p)]);
    for (Eigen::Index f = 0; f < d.x.cols(); ++f) {
      double g = 0;
      for (Eigen::Index i = 0; i < d.x.rows(); ++i)
        g += d.x(i, f) * (d.y(i, p) - pred[static_cast<std::size_t>(i * 4 + p)]);
      g /= n;
      const double w = lm.coef(f, col);
      if (w != 0.0) {
        EXPECT_NEAR(g, s.lambda * (w > 0 ? 1 : -1), 1e-6);
      } else {
        EXPECT_LE(std::abs(g), s.lambda + 1e-6);
      }
    }
  }
}

TEST(Svr, FlatBandPredictsConstant) {
  rng_engine rng(9);
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = uniform_unit(rng);
    xs.push_back(x);
    ys.push_back({2, 0, 1, 2});
  }
  const auto d = make(xs, ys, 2);
  const auto m = fit(spec_of(model_kind::svr), d);
  const auto probe = toy_regression(10, 1, 0.0);
  const auto pred = predict_rows(m, probe.x.leftCols(4));
  for (std::size_t i = 0; i < pred.size(); ++i) EXPECT_NEAR(pred[i], ys[0][i % 4], 0.1);
}

TEST(Svr, FitsSmoothTargetWithinTube) {
  const auto d = toy_regression(80, 35, 0.0);
  auto s = spec_of(model_kind::svr);
  s.c = 100;
  s.gamma = 1.0;
  const auto pred = predict_rows(fit(s, d), d.x);
  const auto y = flat(d.y);
  double worst = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (i % 4 == 1) worst = std::max(worst, std::abs(pred[i] - y[i]));
  EXPECT_LT(worst, 0.1 + 1e-3);
}

TEST(GridSearch, SinglePointEqualsForest) {
  const auto d = toy_regression(45, 41, 0.3);
  auto g = spec_of(model_kind::gsr);
  forest_params p;
  p.n_trees = 10;
  p.tree.max_depth = 4;
  g.grid = {p};
  auto r = spec_of(model_kind::rfr);
  r.n_trees = 10;
  r.max_depth = 4;
  EXPECT_EQ(predict_rows(fit(g, d), d.x), predict_rows(fit(r, d), d.x));
}

TEST(GridSearch, SupersetScoresAtLeastDefault) {
  const auto d = toy_regression(45, 42, 0.3);
  auto g = spec_of(model_kind::gsr);
  forest_params def;
  def.n_trees = 20;
  g.grid = {def};
  for (int depth : {1, 3}) {
    forest_params p = def;
    p.tree.max_depth = depth;
    g.grid.push_back(p);
  }
  const auto m = fit(g, d);
  ASSERT_TRUE(m.search);
  EXPECT_GE(m.search->cv_scores[m.search->best_index], m.search->cv_scores[0]);
}

TEST(GridSearch, SelectsGeneralisingConfigByDirectCv) {
  // Targets are a step in x0 plus large independent noise: a fully grown
  // tree fits the noise, a stump on x0 averages it away.
  rng_engine rng(43);
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = uniform_unit(rng);
    std::vector<double> y(4);
    for (auto& v : y) v = (x[0] > 0.5 ? 2.0 : 0.0) + 3.0 * (uniform_unit(rng) - 0.5);
    xs.push_back(x);
    ys.push_back(y);
  }
  const auto d = make(xs, ys, 2);
  forest_params memorise;
  memorise.n_trees = 1;
  memorise.bootstrap = false;
  memorise.tree.max_features = 5;
  forest_params smooth = memorise;
  smooth.tree.max_depth = 1;
  auto g = spec_of(model_kind::gsr);
  g.grid = {memorise, smooth};
  const auto m = fit(g, d);

  const auto folds = kfold_indices(60, 3, g.seed);
  std::vector<double> direct;
  for (auto p : g.grid) {
    double total = 0;
    for (int f = 0; f < 3; ++f) {
      std::vector<int> train;
      for (int h = 0; h < 3; ++h)
        if (h != f) train.insert(train.end(), folds[h].begin(), folds[h].end());
      std::sort(train.begin(), train.end());
      const auto model = fit_forest(take_rows(d.x, train), take_rows(d.y, train), tree_task::regression, p, g.seed);
      const matrix held = take_rows(d.y, folds[f]);
      total += r2_pooled(flat(held), predict_rows(model, take_rows(d.x, folds[f])));
    }
    direct.push_back(total / 3);
  }
  EXPECT_NEAR(m.search->cv_scores[0], direct[0], 1e-12);
  EXPECT_NEAR(m.search->cv_scores[1], direct[1], 1e-12);
  EXPECT_GT(direct[1], direct[0]);
  EXPECT_EQ(m.search->best_index, 1u);
}

TEST(GridSearch, FoldsPartitionSamples) {
  const auto f = kfold_indices(10, 3, 42);
  ASSERT_EQ(f.size(), 3u);
  std::set<int> all;
  std::size_t total = 0;
  for (const auto& part : f) {
    total += part.size();
    all.insert(part.begin(), part.end());
    EXPECT_GE(part.size(), 3u);
  }
  EXPECT_EQ(total, 10u);
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(kfold_indices(10, 3, 42), f);
}

TEST(ModelSpec, DefaultHyperparameters) {
  EXPECT_EQ(spec_of(model_kind::rfc).n_trees, 100);
  EXPECT_TRUE(spec_of(model_kind::rfr).bootstrap);
  EXPECT_EQ(spec_of(model_kind::knc).k, 5);
  EXPECT_EQ(spec_of(model_kind::lir).lambda, 1e-8);
  EXPECT_EQ(spec_of(model_kind::rr).lambda, 1.0);
  EXPECT_EQ(spec_of(model_kind::lr).lambda, 0.01);
  EXPECT_EQ(spec_of(model_kind::lr).rho, 1.0);
  EXPECT_EQ(spec_of(model_kind::er).rho, 0.5);
  EXPECT_EQ(spec_of(model_kind::svr).c, 1.0);
  EXPECT_EQ(spec_of(model_kind::svr).epsilon, 0.1);
  EXPECT_EQ(spec_of(model_kind::gsr).grid.size(), 12u);
  EXPECT_EQ(spec_of(model_kind::dtc).n_trees, 1);
  EXPECT_FALSE(spec_of(model_kind::dtr).bootstrap);
}

TEST(ModelSpec, NamesRoundTrip) {
  for (auto k : all_model_kinds) EXPECT_EQ(parse_model_kind(to_string(k)), k);
  EXPECT_THROW(parse_model_kind("xyz"), spec_error);
  EXPECT_EQ(all_model_kinds.size(), 11u);
}

TEST(ModelSpec, InvalidHyperparametersRejected) {
  const auto reals = toy_regression(10, 1, 0.1);
  const auto labels = toy_labels(10, 1);
  auto bad = [&](model_kind k, auto mutate) {
    auto s = spec_of(k);
    mutate(s);
    EXPECT_THROW(fit(s, is_classifier(k) ? labels : reals), spec_error) << to_string(k);
  };
  bad(model_kind::rfr, [](model_spec& s) { s.n_trees = 0; });
  bad(model_kind::knc, [](model_spec& s) { s.k = 0; });
  bad(model_kind::knc, [](model_spec& s) { s.k = 11; });
  bad(model_kind::rr, [](model_spec& s) { s.lambda = -1; });
  bad(model_kind::er, [](model_spec& s) { s.rho = 1.5; });
  bad(model_kind::svr, [](model_spec& s) { s.c = 0; });
  bad(model_kind::svr, [](model_spec& s) { s.epsilon = -0.1; });
  bad(model_kind::svr, [](model_spec& s) { s.gamma = -1; });
  bad(model_kind::gsr, [](model_spec& s) { s.grid.clear(); });
  bad(model_kind::dtr, [](model_spec& s) { s.min_samples_leaf = 0.5; });
}

TEST(ModelSpec, InvalidDataRejected) {
  auto d = toy_labels(10, 1);
  d.y(0, 0) = 3;
  EXPECT_THROW(fit(spec_of(model_kind::dtc), d), validation_error);
  auto r = toy_regression(10, 1, 0.1);
  r.x(0, 0) = 1.5;
  EXPECT_THROW(fit(spec_of(model_kind::dtr), r), validation_error);
}

TEST(Predict, DimensionMismatch) {
  const auto d = toy_regression(10, 1, 0.1);
  const auto m = fit(spec_of(model_kind::dtr), d);
  const std::vector<double> q(4, 0.5);
  EXPECT_THROW(predict(m, q), dimension_error);
}

TEST(Persistence, ReloadedModelsPredictIdentically) {
  const auto labels = toy_labels(40, 51, 5);
  const auto reals = toy_regression(40, 52, 0.3);
  const auto probe = toy_regression(15, 53, 0.0);
  const auto dir = std::filesystem::temp_directory_path() / "fssinv_test_models";
  std::filesystem::create_directories(dir);
  for (auto k : all_model_kinds) {
    auto s = spec_of(k);
    if (k == model_kind::rfc || k == model_kind::rfr) s.n_trees = 5;
    if (k == model_kind::gsr) {
      forest_params a, b;
      a.n_trees = b.n_trees = 3;
      b.tree.max_depth = 2;
      s.grid = {a, b};
    }
    const auto& data = is_classifier(k) ? labels : reals;
    const auto m = fit(s, data);
    const auto path = dir / (std::string(to_string(k)) + ".json");
    save_model(path, m);
    const auto back = load_model(path);
    EXPECT_EQ(predict_rows(back, probe.x), predict_rows(m, probe.x)) << to_string(k);
    EXPECT_EQ(serialize(back), serialize(m)) << to_string(k);
    EXPECT_EQ(back.spec.kind, k);
  }
  std::filesystem::remove_all(dir);
}

TEST(Persistence, RejectsForeignDocuments) {
  EXPECT_THROW(deserialize("{}"), parse_error);
  EXPECT_THROW(deserialize("not json"), parse_error);
}

TEST(Determinism, RepeatedFitsAreIdentical) {
  const auto labels = toy_labels(40, 61, 5);
  const auto reals = toy_regression(40, 62, 0.3);
  for (auto k : all_model_kinds) {
    if (k == model_kind::gsr) continue;
    auto s = spec_of(k);
    if (k == model_kind::rfc || k == model_kind::rfr) s.n_trees = 10;
    const auto& data = is_classifier(k) ? labels : reals;
    EXPECT_EQ(serialize(fit(s, data)), serialize(fit(s, data))) << to_string(k);
  }
}

TEST(ColumnCompression, ExpandInvertsCompress) {
  const auto d = toy_labels(30, 71);
  const auto c = compress_columns(d.y);
  EXPECT_EQ(c.map.outputs(), 9u);
  EXPECT_LT(c.map.distinct(), 9u);
  double w = 0;
  for (double v : c.map.weight) w += v;
  EXPECT_EQ(w, 9.0);
  for (Eigen::Index i = 0; i < d.y.rows(); ++i) {
    std::vector<double> row(c.map.distinct());
    for (std::size_t u = 0; u < row.size(); ++u) row[u] = c.values(i, static_cast<Eigen::Index>(u));
    const auto full = c.map.expand(row);
    for (Eigen::Index p = 0; p < 9; ++p) ASSERT_EQ(full[static_cast<std::size_t>(p)], d.y(i, p));
  }
}
