#pragma once

// Uniform fit / predict / persist surface over the eleven estimators.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fssinv/io.hpp"
#include "fssinv/metrics.hpp"
#include "fssinv/models/design.hpp"
#include "fssinv/models/forest.hpp"
#include "fssinv/models/knn.hpp"
#include "fssinv/models/linear.hpp"
#include "fssinv/models/svr.hpp"
#include "fssinv/random.hpp"

namespace fssinv {

enum class model_kind { rfc, knc, gsr, rfr, dtc, svr, lir, rr, dtr, er, lr };

inline constexpr std::array<model_kind, 11> all_model_kinds{
    model_kind::rfc, model_kind::knc, model_kind::gsr, model_kind::rfr, model_kind::dtc, model_kind::svr,
    model_kind::lir, model_kind::rr,  model_kind::dtr, model_kind::er,  model_kind::lr};

inline std::string_view to_string(model_kind k) {
  switch (k) {
    case model_kind::rfc: return "rfc";
    case model_kind::knc: return "knc";
    case model_kind::gsr: return "gsr";
    case model_kind::rfr: return "rfr";
    case model_kind::dtc: return "dtc";
    case model_kind::svr: return "svr";
    case model_kind::lir: return "lir";
    case model_kind::rr: return "rr";
    case model_kind::dtr: return "dtr";
    case model_kind::er: return "er";
    case model_kind::lr: return "lr";
  }
  return "?";
}

inline std::string_view display_name(model_kind k) {
  switch (k) {
    case model_kind::rfc: return "Random forest classification (RFC)";
    case model_kind::knc: return "K-Neighbors Classification (KNC)";
    case model_kind::gsr: return "Grid search regression (GSR)";
    case model_kind::rfr: return "Random forest regression (RFR)";
    case model_kind::dtc: return "Decision tree classification (DTC)";
    case model_kind::svr: return "SVM regression (SVR)";
    case model_kind::lir: return "Linear regression (LIR)";
    case model_kind::rr: return "Ridge regression (RR)";
    case model_kind::dtr: return "Decision tree regression (DTR)";
    case model_kind::er: return "Elastic Net regression (ER)";
    case model_kind::lr: return "Lasso regression (LR)";
  }
  return "?";
}

inline model_kind parse_model_kind(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto k : all_model_kinds)
    if (to_string(k) == lower) return k;
  throw spec_error("unknown model kind '" + std::string(s) + "'");
}

inline bool is_classifier(model_kind k) {
  return k == model_kind::rfc || k == model_kind::knc || k == model_kind::dtc;
}

struct model_spec {
  model_kind kind = model_kind::dtc;
  std::uint64_t seed = 42;

  // trees and forests
  int n_trees = 1;
  int max_depth = 0;  // 0 = unlimited
  double min_samples_leaf = 1.0;
  int max_features = 0;  // 0 = all features (single trees) or kind default (forests)
  bool bootstrap = false;

  int k = 5;  // neighbours

  // penalised linear models
  double lambda = 0.0;
  double rho = 0.0;
  double tol = 1e-6;
  int max_sweeps = 1000;

  // svr
  double c = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;  // 0 = 1/F
  int max_passes = 1000;

  // grid search over forest settings
  std::vector<forest_params> grid;
  int folds = 3;
};

inline std::vector<forest_params> default_gsr_grid() {
  std::vector<forest_params> grid;
  for (int trees : {50, 100})
    for (int depth : {8, 16, 0})
      for (double leaf : {1.0, 5.0}) {
        forest_params p;
        p.n_trees = trees;
        p.bootstrap = true;
        p.tree.max_depth = depth;
        p.tree.min_samples_leaf = leaf;
        grid.push_back(p);
      }
  return grid;
}

inline model_spec default_spec(model_kind kind, std::uint64_t seed = 42) {
  model_spec s;
  s.kind = kind;
  s.seed = seed;
  switch (kind) {
    case model_kind::rfc:
    case model_kind::rfr:
      s.n_trees = 100;
      s.bootstrap = true;
      break;
    case model_kind::gsr: s.grid = default_gsr_grid(); break;
    case model_kind::lir: s.lambda = 1e-8; break;
    case model_kind::rr: s.lambda = 1.0; break;
    case model_kind::lr:
      s.lambda = 0.01;
      s.rho = 1.0;
      break;
    case model_kind::er:
      s.lambda = 0.01;
      s.rho = 0.5;
      break;
    default: break;
  }
  return s;
}

inline void validate(const model_spec& s) {
  if (s.n_trees < 1) throw spec_error("tree count must be >= 1");
  if (s.max_depth < 0) throw spec_error("max_depth must be >= 0");
  if (!(s.min_samples_leaf >= 1.0)) throw spec_error("min_samples_leaf must be >= 1");
  if (s.max_features < 0) throw spec_error("max_features must be >= 0");
  if (s.k < 1) throw spec_error("k must be >= 1");
  if (!(s.lambda >= 0.0)) throw spec_error("lambda must be >= 0");
  if (!(s.rho >= 0.0 && s.rho <= 1.0)) throw spec_error("rho must lie in [0, 1]");
  if (!(s.tol > 0.0) || s.max_sweeps < 1) throw spec_error("solver tolerance and sweep cap must be positive");
  if (!(s.c > 0.0)) throw spec_error("C must be > 0");
  if (!(s.epsilon >= 0.0)) throw spec_error("epsilon must be >= 0");
  if (!(s.gamma >= 0.0)) throw spec_error("gamma must be > 0 (or 0 for 1/F)");
  if (s.max_passes < 1) throw spec_error("max_passes must be >= 1");
  if (s.kind == model_kind::gsr) {
    if (s.grid.empty()) throw spec_error("grid search needs a non-empty grid");
    if (s.folds < 2) throw spec_error("grid search needs >= 2 folds");
    for (const auto& g : s.grid)
      if (g.n_trees < 1 || g.tree.max_depth < 0 || !(g.tree.min_samples_leaf >= 1.0))
        throw spec_error("invalid grid point");
  }
}

struct grid_search_result {
  std::size_t best_index = 0;
  std::vector<double> cv_scores;
};

using model_state = std::variant<tree_ensemble, knn_classifier, linear_model, svr_model>;

struct trained_model {
  model_spec spec;
  int n_features = 0;
  int image_size = 0;
  model_state state;
  std::optional<grid_search_result> search;
  double fit_seconds = 0.0;
};

namespace detail {

inline forest_params forest_from_spec(const model_spec& s, tree_task task, int n_features) {
  forest_params p;
  p.n_trees = s.n_trees;
  p.bootstrap = s.bootstrap;
  p.tree.max_depth = s.max_depth;
  p.tree.min_samples_leaf = s.min_samples_leaf;
  p.tree.max_features = s.max_features;
  const bool forest = s.kind == model_kind::rfc || s.kind == model_kind::rfr;
  if (forest && s.max_features == 0) p.tree.max_features = default_max_features(task, n_features);
  return p;
}

inline std::vector<double> predict_state(const model_state& st, const double* x) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, knn_classifier>) {
          return m.predict(x);
        } else if constexpr (std::is_same_v<T, tree_ensemble>) {
          return m.targets.map.expand(m.predict_compressed(x));
        } else {
          return m.map.expand(m.predict_compressed(x));
        }
      },
      st);
}

}  // namespace detail

// Stacked predictions, row-major rows x P.
inline std::vector<double> predict_rows(const model_state& st, const matrix& x) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(x.rows()));
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i] = detail::predict_state(st, &x(static_cast<Eigen::Index>(i), 0));
  });
  std::vector<double> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// Seeded shuffle, then contiguous folds.
inline std::vector<std::vector<int>> kfold_indices(std::size_t n, int folds, std::uint64_t seed) {
  rng_engine rng(seed);
  const auto perm = permutation(n, rng);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
    const std::size_t hi = n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(folds);
    for (std::size_t k = lo; k < hi; ++k) out[f].push_back(static_cast<int>(perm[k]));
  }
  return out;
}

inline matrix take_rows(const matrix& m, const std::vector<int>& rows) {
  matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
  return out;
}

inline grid_search_result cross_validate_grid(const std::vector<forest_params>& grid, const design_matrix& data,
                                              int folds, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.rows());
  if (n < static_cast<std::size_t>(folds)) throw spec_error("grid search needs n >= folds");
  const auto parts = kfold_indices(n, folds, seed);
  const int nf = static_cast<int>(data.features());

  grid_search_result res;
  res.cv_scores.assign(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    forest_params p = grid[g];
    if (p.tree.max_features == 0) p.tree.max_features = default_max_features(tree_task::regression, nf);
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train;
      for (int h = 0; h < folds; ++h)
        if (h != f) train.insert(train.end(), parts[h].begin(), parts[h].end());
      std::sort(train.begin(), train.end());
      const auto& held = parts[f];
      auto forest = fit_forest(take_rows(data.x, train), take_rows(data.y, train), tree_task::regression, p, seed);
      const matrix y_held = take_rows(data.y, held);
      const auto pred = predict_rows(forest, take_rows(data.x, held));
      double score;
      try {
        score = r2_pooled({y_held.data(), static_cast<std::size_t>(y_held.size())}, pred);
      } catch (const metric_error&) {
        score = -std::numeric_limits<double>::infinity();
      }
      total += score;
    }
    res.cv_scores[g] = total / folds;
    if (res.cv_scores[g] > res.cv_scores[res.best_index]) res.best_index = g;
  }
  return res;
}

inline trained_model fit(const model_spec& spec, const design_matrix& data) {
  validate(spec);
  const bool labels = is_classifier(spec.kind);
  validate(data, labels);
  if (spec.kind == model_kind::knc && spec.k > data.rows())
    throw spec_error("k = " + std::to_string(spec.k) + " exceeds sample count " + std::to_string(data.rows()));

  const auto start = std::chrono::steady_clock::now();
  trained_model m;
  m.spec = spec;
  m.n_features = static_cast<int>(data.features());
  m.image_size = data.image_size;
  const int nf = m.n_features;

  switch (spec.kind) {
    case model_kind::rfc:
    case model_kind::dtc: {
      auto p = detail::forest_from_spec(spec, tree_task::classification, nf);
      m.state = fit_forest(data.x, data.y, tree_task::classification, p, spec.seed);
      break;
    }
    case model_kind::rfr:
    case model_kind::dtr: {
      auto p = detail::forest_from_spec(spec, tree_task::regression, nf);
      m.state = fit_forest(data.x, data.y, tree_task::regression, p, spec.seed);
      break;
    }
    case model_kind::gsr: {
      auto res = cross_validate_grid(spec.grid, data, spec.folds, spec.seed);
      forest_params best = spec.grid[res.best_index];
      if (best.tree.max_features == 0) best.tree.max_features = default_max_features(tree_task::regression, nf);
      m.state = fit_forest(data.x, data.y, tree_task::regression, best, spec.seed);
      m.search = std::move(res);
      break;
    }
    case model_kind::knc: m.state = knn_classifier::fit(data.x, data.y, spec.k); break;
    case model_kind::lir:
    case model_kind::rr: m.state = fit_ridge(data.x, data.y, spec.lambda); break;
    case model_kind::lr:
    case model_kind::er:
      m.state = fit_elastic_net(data.x, data.y, spec.lambda, spec.rho, {spec.tol, spec.max_sweeps});
      break;
    case model_kind::svr: {
      svr_params p;
      p.c = spec.c;
      p.epsilon = spec.epsilon;
      p.gamma = spec.gamma;
      p.max_passes = spec.max_passes;
      m.state = fit_svr(data.x, data.y, p);
      break;
    }
  }
  m.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

inline predicted_image predict(const trained_model& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.n_features)
    throw dimension_error("spectrum has " + std::to_string(x.size()) + " values, model expects " +
                          std::to_string(m.n_features));
  predicted_image out;
  out.size = m.image_size;
  out.labels = is_classifier(m.spec.kind);
  out.values = detail::predict_state(m.state, x.data());
  return out;
}

inline std::vector<double> predict_rows(const trained_model& m, const matrix& x) {
  if (x.cols() != m.n_features) throw dimension_error("feature count does not match the model");
  return predict_rows(m.state, x);
}

// ---------------------------------------------------------------------------
// Persistence: versioned JSON document. Doubles are written in shortest
// round-trip form, so a reloaded model predicts identically.

inline constexpr int model_format_version = 1;

namespace detail {

using ojson = nlohmann::ordered_json;

template <typename M>
ojson matrix_json(const M& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

template <typename M>
M matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) throw parse_error("matrix size mismatch");
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = flat[static_cast<std::size_t>(i * cols + c)];
  return m;
}

inline ojson forest_params_json(const forest_params& p) {
  return {{"n_trees", p.n_trees},
          {"bootstrap", p.bootstrap},
          {"max_depth", p.tree.max_depth},
          {"min_samples_leaf", p.tree.min_samples_leaf},
          {"max_features", p.tree.max_features}};
}

inline forest_params forest_params_from_json(const nlohmann::json& j) {
  forest_params p;
  p.n_trees = j.at("n_trees").get<int>();
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.tree.max_depth = j.at("max_depth").get<int>();
  p.tree.min_samples_leaf = j.at("min_samples_leaf").get<double>();
  p.tree.max_features = j.at("max_features").get<int>();
  return p;
}

inline ojson map_json(const column_map& m) {
  return {{"pixel_to_column", m.pixel_to_column}, {"weight", m.weight}};
}

inline column_map map_from_json(const nlohmann::json& j) {
  column_map m;
  m.pixel_to_column = j.at("pixel_to_column").get<std::vector<int>>();
  m.weight = j.at("weight").get<std::vector<double>>();
  return m;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const model_spec& s) {
  nlohmann::ordered_json grid = nlohmann::ordered_json::array();
  for (const auto& g : s.grid) grid.push_back(detail::forest_params_json(g));
  return {{"kind", to_string(s.kind)},
          {"seed", s.seed},
          {"n_trees", s.n_trees},
          {"max_depth", s.max_depth},
          {"min_samples_leaf", s.min_samples_leaf},
          {"max_features", s.max_features},
          {"bootstrap", s.bootstrap},
          {"k", s.k},
          {"lambda", s.lambda},
          {"rho", s.rho},
          {"tol", s.tol},
          {"max_sweeps", s.max_sweeps},
          {"c", s.c},
          {"epsilon", s.epsilon},
          {"gamma", s.gamma},
          {"max_passes", s.max_passes},
          {"folds", s.folds},
          {"grid", grid}};
}

inline model_spec spec_from_json(const nlohmann::json& j) {
  model_spec s;
  s.kind = parse_model_kind(j.at("kind").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.n_trees = j.at("n_trees").get<int>();
  s.max_depth = j.at("max_depth").get<int>();
  s.min_samples_leaf = j.at("min_samples_leaf").get<double>();
  s.max_features = j.at("max_features").get<int>();
  s.bootstrap = j.at("bootstrap").get<bool>();
  s.k = j.at("k").get<int>();
  s.lambda = j.at("lambda").get<double>();
  s.rho = j.at("rho").get<double>();
  s.tol = j.at("tol").get<double>();
  s.max_sweeps = j.at("max_sweeps").get<int>();
  s.c = j.at("c").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  s.gamma = j.at("gamma").get<double>();
  s.max_passes = j.at("max_passes").get<int>();
  s.folds = j.at("folds").get<int>();
  for (const auto& g : j.at("grid")) s.grid.push_back(detail::forest_params_from_json(g));
  return s;
}

// Serialised model without timing information, so that refits with the
// same inputs produce identical files.
inline std::string serialize(const trained_model& m) {
  using detail::ojson;
  ojson doc;
  doc["format"] = "fssinv-model";
  doc["version"] = model_format_version;
  doc["spec"] = to_json(m.spec);
  doc["n_features"] = m.n_features;
  doc["image_size"] = m.image_size;
  if (m.search) doc["search"] = {{"best_index", m.search->best_index}, {"cv_scores", m.search->cv_scores}};

  ojson state;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, tree_ensemble>) {
          state["type"] = "trees";
          state["task"] = s.task == tree_task::classification ? "classification" : "regression";
          state["map"] = detail::map_json(s.targets.map);
          state["targets"] = detail::matrix_json(s.targets.values);
          ojson trees = ojson::array();
          for (const auto& t : s.trees) {
            std::vector<int> feature, left, right, leaf;
            std::vector<double> threshold;
            for (const auto& nd : t.nodes) {
              feature.push_back(nd.feature);
              threshold.push_back(nd.threshold);
              left.push_back(nd.left);
              right.push_back(nd.right);
              leaf.push_back(nd.leaf);
            }
            trees.push_back({{"feature", feature},
                             {"threshold", threshold},
                             {"left", left},
                             {"right", right},
                             {"leaf", leaf},
                             {"leaf_begin", t.leaf_begin},
                             {"leaf_rows", t.leaf_rows},
                             {"leaf_weights", t.leaf_weights}});
          }
          state["trees"] = std::move(trees);
        } else if constexpr (std::is_same_v<T, knn_classifier>) {
          state["type"] = "knn";
          state["k"] = s.k;
          state["x"] = detail::matrix_json(s.x);
          state["outputs"] = s.outputs;
          std::string digits(s.labels.size(), '0');
          for (std::size_t i = 0; i < s.labels.size(); ++i) digits[i] = static_cast<char>('0' + s.labels[i]);
          state["labels"] = digits;
        } else if constexpr (std::is_same_v<T, linear_model>) {
          state["type"] = "linear";
          state["map"] = detail::map_json(s.map);
          state["x_mean"] = detail::matrix_json(Eigen::MatrixXd(s.x_mean));
          state["intercept"] = detail::matrix_json(Eigen::MatrixXd(s.intercept));
          state["coef"] = detail::matrix_json(s.coef);
        } else {
          state["type"] = "svr";
          state["map"] = detail::map_json(s.map);
          state["support"] = detail::matrix_json(s.support);
          state["gamma"] = s.gamma;
          state["mean"] = detail::matrix_json(Eigen::MatrixXd(s.mean));
          state["beta"] = detail::matrix_json(s.beta);
        }
      },
      m.state);
  doc["state"] = std::move(state);
  return doc.dump() + "\n";
}

inline trained_model deserialize(const std::string& text, const std::string& name = "model") {
  trained_model m;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("format", "") != "fssinv-model") throw parse_error(name + ": not a model file");
    if (doc.at("version").get<int>() != model_format_version)
      throw parse_error(name + ": unsupported model version");
    m.spec = spec_from_json(doc.at("spec"));
    m.n_features = doc.at("n_features").get<int>();
    m.image_size = doc.at("image_size").get<int>();
    if (doc.contains("search")) {
      grid_search_result r;
      r.best_index = doc["search"].at("best_index").get<std::size_t>();
      r.cv_scores = doc["search"].at("cv_scores").get<std::vector<double>>();
      m.search = r;
    }
    const auto& st = doc.at("state");
    const auto type = st.at("type").get<std::string>();
    if (type == "trees") {
      tree_ensemble e;
      e.task = st.at("task").get<std::string>() == "classification" ? tree_task::classification
                                                                     : tree_task::regression;
      e.targets.map = detail::map_from_json(st.at("map"));
      e.targets.values = detail::matrix_from_json<matrix>(st.at("targets"));
      for (const auto& tj : st.at("trees")) {
        decision_tree t;
        const auto feature = tj.at("feature").get<std::vector<int>>();
        const auto threshold = tj.at("threshold").get<std::vector<double>>();
        const auto left = tj.at("left").get<std::vector<int>>();
        const auto right = tj.at("right").get<std::vector<int>>();
        const auto leaf = tj.at("leaf").get<std::vector<int>>();
        for (std::size_t k = 0; k < feature.size(); ++k)
          t.nodes.push_back({feature[k], threshold[k], left[k], right[k], leaf[k]});
        t.leaf_begin = tj.at("leaf_begin").get<std::vector<int>>();
        t.leaf_rows = tj.at("leaf_rows").get<std::vector<int>>();
        t.leaf_weights = tj.at("leaf_weights").get<std::vector<double>>();
        e.trees.push_back(std::move(t));
      }
      m.state = std::move(e);
    } else if (type == "knn") {
      knn_classifier k;
      k.k = st.at("k").get<int>();
      k.x = detail::matrix_from_json<matrix>(st.at("x"));
      k.outputs = st.at("outputs").get<std::size_t>();
      const auto digits = st.at("labels").get<std::string>();
      k.labels.resize(digits.size());
      for (std::size_t i = 0; i < digits.size(); ++i) k.labels[i] = static_cast<std::uint8_t>(digits[i] - '0');
      m.state = std::move(k);
    } else if (type == "linear") {
      linear_model l;
      l.map = detail::map_from_json(st.at("map"));
      l.x_mean = detail::matrix_from_json<Eigen::MatrixXd>(st.at("x_mean")).col(0);
      l.intercept = detail::matrix_from_json<Eigen::MatrixXd>(st.at("intercept")).col(0);
      l.coef = detail::matrix_from_json<Eigen::MatrixXd>(st.at("coef"));
      m.state = std::move(l);
    } else if (type == "svr") {
      svr_model s;
      s.map = detail::map_from_json(st.at("map"));
      s.support = detail::matrix_from_json<matrix>(st.at("support"));
      s.gamma = st.at("gamma").get<double>();
      s.mean = detail::matrix_from_json<Eigen::MatrixXd>(st.at("mean")).col(0);
      s.beta = detail::matrix_from_json<Eigen::MatrixXd>(st.at("beta"));
      m.state = std::move(s);
    } else {
      throw parse_error(name + ": unknown state type '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(name + ": " + e.what());
  }
  return m;
}

inline void save_model(const std::filesystem::path& path, const trained_model& m) {
  io::write_file(path, serialize(m));
}

inline trained_model load_model(const std::filesystem::path& path) {
  return deserialize(io::read_file(path), path.string());
}

}  // namespace fssinv
