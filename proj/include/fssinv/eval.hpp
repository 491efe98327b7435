#pragma once

// Benchmarking across estimators, tolerance envelopes and the
// predict -> threshold -> extract -> re-simulate roundtrip.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fssinv/dataset.hpp"
#include "fssinv/em_surrogate.hpp"
#include "fssinv/io.hpp"
#include "fssinv/metrics.hpp"
#include "fssinv/models/model.hpp"
#include "fssinv/postprocess.hpp"

namespace fssinv {

// Rows of the given samples stacked into a design matrix.
inline design_matrix make_design(const dataset& ds, const std::vector<int>& ids) {
  design_matrix d;
  const auto nf = static_cast<Eigen::Index>(ds.config.grid.size());
  const int side = ds.config.cell.resolution;
  d.image_size = side;
  d.x.resize(static_cast<Eigen::Index>(ids.size()), nf);
  d.y.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(side) * side);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto& s = ds.by_id(ids[r]);
    for (Eigen::Index f = 0; f < nf; ++f) d.x(static_cast<Eigen::Index>(r), f) = s.absorption[f];
    const auto& lab = s.image.labels();
    for (std::size_t p = 0; p < lab.size(); ++p)
      d.y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p)) = lab[p];
  }
  return d;
}

struct metrics {
  double r2 = 0.0;
  double mse = 0.0;
  double pixel_accuracy = 0.0;
};

inline metrics evaluate(std::span<const double> y_true, std::span<const double> y_pred) {
  metrics m;
  m.mse = mse(y_true, y_pred);
  m.pixel_accuracy = pixel_accuracy(y_true, y_pred);
  m.r2 = r2_pooled(y_true, y_pred);
  return m;
}

struct benchmark_row {
  model_kind kind = model_kind::dtc;
  bool classifier = false;
  double train_metric = std::numeric_limits<double>::quiet_NaN();  // accuracy or pooled R^2
  double test_metric = std::numeric_limits<double>::quiet_NaN();
  double train_mse = std::numeric_limits<double>::quiet_NaN();
  double test_mse = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct benchmark_report {
  std::vector<benchmark_row> rows;
};

inline benchmark_row score_model(const trained_model& model, const design_matrix& train,
                                 const design_matrix& test) {
  benchmark_row row;
  row.kind = model.spec.kind;
  row.classifier = is_classifier(model.spec.kind);
  row.seconds = model.fit_seconds;
  const std::span<const double> y_train(train.y.data(), static_cast<std::size_t>(train.y.size()));
  const std::span<const double> y_test(test.y.data(), static_cast<std::size_t>(test.y.size()));
  const auto m_train = evaluate(y_train, predict_rows(model, train.x));
  const auto m_test = evaluate(y_test, predict_rows(model, test.x));
  row.train_metric = row.classifier ? m_train.pixel_accuracy : m_train.r2;
  row.test_metric = row.classifier ? m_test.pixel_accuracy : m_test.r2;
  row.train_mse = m_train.mse;
  row.test_mse = m_test.mse;
  return row;
}

// Best test metric first, failed rows last, otherwise request order.
inline void sort_rows(benchmark_report& rep) {
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const benchmark_row& a, const benchmark_row& b) {
    if (a.ok() != b.ok()) return a.ok();
    return a.ok() && a.test_metric > b.test_metric;
  });
}

// Trains each model on the train split and scores both splits. Classifiers
// report pixel accuracy, regressors pooled R^2. A failing model yields a
// row with its error instead of aborting the run.
inline benchmark_report benchmark(const std::vector<model_spec>& specs, const dataset& ds,
                                  const split_index& sp,
                                  const std::function<void(const trained_model&)>& on_fitted = {}) {
  const auto train = make_design(ds, sp.train);
  const auto test = make_design(ds, sp.test);
  benchmark_report rep;
  for (const auto& spec : specs) {
    benchmark_row row;
    row.kind = spec.kind;
    row.classifier = is_classifier(spec.kind);
    try {
      const auto model = fit(spec, train);
      row = score_model(model, train, test);
      if (on_fitted) on_fitted(model);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  sort_rows(rep);
  return rep;
}

inline std::string report_csv(const benchmark_report& rep) {
  std::string out = "model,name,metric,train_accuracy,test_accuracy,train_mse,test_mse,execution_time_s,error\n";
  for (const auto& r : rep.rows) {
    auto num = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += std::string(to_string(r.kind)) + "," + std::string(display_name(r.kind)) + "," +
           (r.classifier ? "pixel_accuracy" : "r2_pooled") + "," + num(r.train_metric) + "," +
           num(r.test_metric) + "," + num(r.train_mse) + "," + num(r.test_mse) + "," +
           io::format_double(r.seconds) + "," + err + "\n";
  }
  return out;
}

inline std::string report_table(const benchmark_report& rep) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-7s %-38s %14s %13s %9s %8s %18s\n", "Sl. No.", "Model", "Train Accuracy",
                "Test Accuracy", "Train MSE", "Test MSE", "Execution Time (s)");
  os << line;
  int k = 1;
  for (const auto& r : rep.rows) {
    const std::string name(display_name(r.kind));
    if (r.ok()) {
      std::snprintf(line, sizeof(line), "%-7d %-38s %14.2f %13.2f %9.2f %8.2f %18.2f\n", k, name.c_str(),
                    r.train_metric, r.test_metric, r.train_mse, r.test_mse, r.seconds);
    } else {
      std::snprintf(line, sizeof(line), "%-7d %-38s failed: %s\n", k, name.c_str(), r.error.c_str());
    }
    os << line;
    ++k;
  }
  os << "Accuracy is pixel accuracy for classifiers and pooled R^2 for regressors.\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Tolerance envelope

struct tolerance_envelope {
  spectrum lower;
  spectrum upper;
  spectrum nominal;

  bool contains(std::size_t k, double a) const { return a >= lower[k] && a <= upper[k]; }
};

inline tolerance_envelope make_envelope(const unit_cell_params& q, const layer_stack& s, const cell_config& cfg,
                                        const frequency_grid& grid, double tolerance = 0.05) {
  tolerance_envelope env;
  env.nominal = absorption(q, s, cfg, grid);
  env.lower = env.nominal;
  env.upper = env.nominal;
  for (int corner = 0; corner < 16; ++corner) {
    auto f = [&](int bit) { return (corner >> bit) & 1 ? 1.0 + tolerance : 1.0 - tolerance; };
    const unit_cell_params p{q.b * f(3), q.c * f(2), q.d * f(1), q.e * f(0)};
    spectrum a;
    try {
      a = absorption(p, s, cfg, grid);
    } catch (const error& e) {
      std::ostringstream os;
      os << "perturbed corner (b*" << f(3) << ", c*" << f(2) << ", d*" << f(1) << ", e*" << f(0)
         << ") invalid: " << e.what();
      throw geometry_error(os.str());
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      env.lower[k] = std::min(env.lower[k], a[k]);
      env.upper[k] = std::max(env.upper[k], a[k]);
    }
  }
  return env;
}

// ---------------------------------------------------------------------------
// Roundtrip verification

struct roundtrip_options {
  threshold_case tcase = case_2;
  bool snap = false;  // snap extracted parameters to the design grid before re-simulating
};

struct roundtrip_row {
  int id = 0;
  unit_cell_params true_params;
  std::optional<extracted_params> extracted;
  spectrum a_true;
  spectrum a_pred;  // empty when extraction or re-simulation failed
  tolerance_envelope envelope;
  double max_abs_diff = std::numeric_limits<double>::quiet_NaN();
  double in_envelope = std::numeric_limits<double>::quiet_NaN();
  bool true_merged = false;
  std::string failure;
};

using image_predictor = std::function<predicted_image(const sample&)>;

inline roundtrip_row roundtrip_one(const image_predictor& predictor, const sample& s, const dataset_config& c,
                                   const roundtrip_options& opt) {
  roundtrip_row row;
  row.id = s.id;
  row.true_params = s.params;
  row.true_merged = caps_merged(s.params);
  row.a_true = s.absorption;
  row.envelope = make_envelope(s.params, c.stack, c.cell, c.grid);
  try {
    const auto pred = predictor(s);
    const label_image img = pred.labels ? to_label_image(pred) : threshold(pred, opt.tcase);
    auto ex = extract_params(img, c.cell);
    row.extracted = ex;
    const auto q = opt.snap ? snap_to_grid(ex.params) : ex.params;
    row.a_pred = absorption(q, c.stack, c.cell, c.grid);
  } catch (const error& e) {
    row.failure = std::string(e.kind()) + ": " + e.what();
    return row;
  }
  double worst = 0.0;
  std::size_t inside = 0;
  for (std::size_t k = 0; k < row.a_true.size(); ++k) {
    worst = std::max(worst, std::abs(row.a_true[k] - row.a_pred[k]));
    inside += row.envelope.contains(k, row.a_pred[k]) ? 1 : 0;
  }
  row.max_abs_diff = worst;
  row.in_envelope = static_cast<double>(inside) / static_cast<double>(row.a_true.size());
  return row;
}

inline std::vector<roundtrip_row> roundtrip(const image_predictor& predictor, const dataset& ds,
                                            const std::vector<int>& ids, const roundtrip_options& opt = {}) {
  std::vector<roundtrip_row> rows(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) { rows[k] = roundtrip_one(predictor, ds.by_id(ids[k]), ds.config, opt); });
  return rows;
}

inline std::vector<roundtrip_row> roundtrip(const trained_model& model, const dataset& ds,
                                            const std::vector<int>& ids, const roundtrip_options& opt = {}) {
  return roundtrip([&](const sample& s) { return predict(model, s.absorption); }, ds, ids, opt);
}

// Predictor that returns each sample's true image.
inline image_predictor oracle_predictor() {
  return [](const sample& s) {
    predicted_image p;
    p.size = s.image.size();
    p.labels = true;
    p.values.assign(s.image.labels().begin(), s.image.labels().end());
    return p;
  };
}

inline double mean_in_envelope(const std::vector<roundtrip_row>& rows) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!r.failure.empty()) continue;
    total += r.in_envelope;
    ++n;
  }
  return n ? total / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline std::string roundtrip_csv(const std::vector<roundtrip_row>& rows, model_kind kind) {
  std::string out = "id,model,max_abs_diff,in_envelope,true_merged,extracted_merged,failure\n";
  for (const auto& r : rows) {
    auto num = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
    std::string fail = r.failure;
    std::replace(fail.begin(), fail.end(), ',', ';');
    out += std::to_string(r.id) + "," + std::string(to_string(kind)) + "," + num(r.max_abs_diff) + "," +
           num(r.in_envelope) + "," + (r.true_merged ? "1" : "0") + "," +
           (r.extracted && r.extracted->merged ? "1" : "0") + "," + fail + "\n";
  }
  return out;
}

// Per-frequency series of one sample, for external plotting.
inline std::string envelope_csv(const roundtrip_row& r, const frequency_grid& grid) {
  std::string out = "f_GHz,env_min,env_max,A_true,A_pred\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out += io::format_double(grid[k]) + "," + io::format_double(r.envelope.lower[k]) + "," +
           io::format_double(r.envelope.upper[k]) + "," + io::format_double(r.a_true[k]) + "," +
           (r.a_pred.empty() ? std::string() : io::format_double(r.a_pred[k])) + "\n";
  }
  return out;
}

inline std::string predictions_csv_header() { return "id,model,b,c,d,e,merged\n"; }

inline std::string predictions_csv_row(int id, model_kind kind, const extracted_params& ex) {
  return std::to_string(id) + "," + std::string(to_string(kind)) + "," + io::format_double(ex.params.b) + "," +
         io::format_double(ex.params.c) + "," + io::format_double(ex.params.d) + "," +
         io::format_double(ex.params.e) + "," + (ex.merged ? "1" : "0") + "\n";
}

}  // namespace fssinv

namespace fssinv {

// Reads back a report written by report_csv().
inline benchmark_report parse_report_csv(const std::string& text, const std::string& name) {
  benchmark_report rep;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  if (line.rfind("model,name,metric,", 0) != 0) throw parse_error(name + ": not a benchmark report");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    auto cells = io::split_csv_line(line);
    if (cells.size() != 9) throw parse_error(where + ": expected 9 columns");
    benchmark_row r;
    r.kind = parse_model_kind(cells[0]);
    r.classifier = cells[2] == "pixel_accuracy";
    auto num = [&](std::string_view v) {
      return v.empty() ? std::numeric_limits<double>::quiet_NaN() : io::parse_double(v, where);
    };
    r.train_metric = num(cells[3]);
    r.test_metric = num(cells[4]);
    r.train_mse = num(cells[5]);
    r.test_mse = num(cells[6]);
    r.seconds = num(cells[7]);
    r.error = std::string(cells[8]);
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

}  // namespace fssinv
