// fssinv: batch front end for the spectrum -> unit-cell inverse-design
// pipeline.
//
//   fssinv gen        build the dataset
//   fssinv train      fit models on the train split
//   fssinv predict    predicted images + extracted parameters for the test split
//   fssinv eval       benchmark report of the trained models
//   fssinv roundtrip  re-simulate predicted cells against +/-5% envelopes
//   fssinv report     consolidated text table
//
// Errors are reported on stderr as one line: "error<TAB>kind<TAB>message".

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fssinv/config.hpp"
#include "fssinv/fssinv.hpp"

namespace fs = std::filesystem;
using namespace fssinv;

namespace {

struct cli_options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  std::string models;
  std::optional<int> tcase;
  bool quick = false;
  bool snap = false;
  std::optional<std::size_t> extra_jitter;
  std::string out;
};

// Exclusive lock on an output directory for the lifetime of a command.
class dir_lock {
public:
  explicit dir_lock(const fs::path& dir) : path_(dir / ".fssinv.lock") {
    fs::create_directories(dir);
    file_ = std::fopen(path_.string().c_str(), "wx");
    if (!file_) throw io_error("output directory is locked by another run: " + path_.string());
  }
  ~dir_lock() {
    std::fclose(file_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  dir_lock(const dir_lock&) = delete;
  dir_lock& operator=(const dir_lock&) = delete;

private:
  fs::path path_;
  std::FILE* file_ = nullptr;
};

run_config resolve(const cli_options& o) {
  run_config rc;
  if (!o.config_path.empty()) apply_settings(rc, parse_key_values(io::read_file(o.config_path), o.config_path));
  if (!o.out.empty()) {
    const fs::path root = o.out;
    rc.data_dir = root / "data";
    rc.model_dir = root / "models";
    rc.report_dir = root / "reports";
  }
  if (o.seed) rc.data.seed = *o.seed;
  if (o.quick) rc.data.cell.resolution = 16;
  if (o.resolution) rc.data.cell.resolution = *o.resolution;
  if (!o.models.empty()) {
    rc.models = parse_model_list(o.models);
    rc.models_explicit = true;
  }
  if (o.tcase) rc.threshold_case = *o.tcase;
  if (o.snap) rc.snap = true;
  if (o.extra_jitter) rc.data.extra_jitter = *o.extra_jitter;
  validate(rc);
  return rc;
}

fs::path model_path(const run_config& rc, model_kind k) {
  return rc.model_dir / (std::string(to_string(k)) + ".model.json");
}

dataset load_data(const run_config& rc) { return load(rc.data_dir / "manifest.json"); }

// Models named on the command line, or every model file present.
std::vector<model_kind> available_models(const run_config& rc) {
  if (rc.models_explicit) return rc.models;
  std::vector<model_kind> out;
  for (auto k : all_model_kinds)
    if (fs::exists(model_path(rc, k))) out.push_back(k);
  if (out.empty()) throw missing_data_error("no trained models in " + rc.model_dir.string());
  return out;
}

std::map<model_kind, double> read_train_times(const run_config& rc) {
  std::map<model_kind, double> out;
  const fs::path p = rc.model_dir / "train_times.csv";
  if (!fs::exists(p)) return out;
  std::istringstream is(io::read_file(p));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    auto cells = io::split_csv_line(line);
    if (cells.size() == 2) out[parse_model_kind(cells[0])] = io::parse_double(cells[1], p.string());
  }
  return out;
}

int cmd_gen(const run_config& rc) {
  dir_lock lock(rc.data_dir);
  auto summary = generate(rc.data, rc.data_dir, echo(rc));
  std::printf("generated %zu samples in %s (merged caps fraction %.4f, checksum %s)\n", summary.sample_count,
              rc.data_dir.string().c_str(), summary.merged_fraction, summary.checksum.c_str());
  return 0;
}

int cmd_train(const run_config& rc) {
  const auto ds = load_data(rc);
  dir_lock lock(rc.model_dir);
  io::write_file(rc.model_dir / "run_config.toml", echo(rc));
  const auto train = make_design(ds, ds.split.train);
  std::string times = "model,fit_seconds\n";
  std::size_t failed = 0;
  for (auto k : rc.models) {
    try {
      const auto m = fit(default_spec(k, rc.data.seed), train);
      save_model(model_path(rc, k), m);
      times += std::string(to_string(k)) + "," + io::format_double(m.fit_seconds) + "\n";
      std::printf("trained %-3s in %.3f s\n", std::string(to_string(k)).c_str(), m.fit_seconds);
    } catch (const error& e) {
      ++failed;
      std::fprintf(stderr, "model-error\t%s\t%s: %s\n", std::string(to_string(k)).c_str(), e.kind().c_str(), e.what());
    }
  }
  io::write_file(rc.model_dir / "train_times.csv", times);
  return failed == rc.models.size() ? 1 : 0;
}

std::string real_image_csv(const predicted_image& p) {
  std::string out;
  for (int i = 0; i < p.size; ++i) {
    for (int j = 0; j < p.size; ++j) {
      if (j) out += ',';
      out += io::format_double(p(i, j));
    }
    out += '\n';
  }
  return out;
}

int cmd_predict(const run_config& rc) {
  const auto ds = load_data(rc);
  const auto tc = threshold_case_by_id(rc.threshold_case);
  const auto kinds = available_models(rc);
  dir_lock lock(rc.report_dir);
  std::string predictions = predictions_csv_header();
  std::size_t failed = 0;
  for (auto k : kinds) {
    try {
      const auto m = load_model(model_path(rc, k));
      const fs::path dir = rc.report_dir / "predict" / std::string(to_string(k));
      fs::create_directories(dir);
      for (int id : ds.split.test) {
        const auto pred = predict(m, ds.by_id(id).absorption);
        label_image labels;
        if (pred.labels) {
          labels = to_label_image(pred);
          write_pgm(dir / image_file_name(id), labels);
        } else {
          io::write_file(dir / ("cell_" + std::to_string(id) + ".csv"), real_image_csv(pred));
          labels = threshold(pred, tc);
          write_pgm(dir / ("cell_" + std::to_string(id) + "_case" + std::to_string(tc.id) + ".pgm"), labels);
        }
        try {
          predictions += predictions_csv_row(id, k, extract_params(labels, rc.data.cell));
        } catch (const extraction_error&) {
          predictions += std::to_string(id) + "," + std::string(to_string(k)) + ",,,,,\n";
        }
      }
    } catch (const error& e) {
      ++failed;
      std::fprintf(stderr, "model-error\t%s\t%s: %s\n", std::string(to_string(k)).c_str(), e.kind().c_str(), e.what());
    }
  }
  io::write_file(rc.report_dir / "predictions.csv", predictions);
  std::printf("wrote predictions for %zu model(s) to %s\n", kinds.size() - failed, rc.report_dir.string().c_str());
  return failed == kinds.size() ? 1 : 0;
}

int cmd_eval(const run_config& rc) {
  const auto ds = load_data(rc);
  const auto kinds = available_models(rc);
  const auto times = read_train_times(rc);
  const auto train = make_design(ds, ds.split.train);
  const auto test = make_design(ds, ds.split.test);
  dir_lock lock(rc.report_dir);
  benchmark_report rep;
  for (auto k : kinds) {
    benchmark_row row;
    row.kind = k;
    row.classifier = is_classifier(k);
    try {
      row = score_model(load_model(model_path(rc, k)), train, test);
      if (auto it = times.find(k); it != times.end()) row.seconds = it->second;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rep.rows.push_back(row);
  }
  sort_rows(rep);
  io::write_file(rc.report_dir / "benchmark.csv", report_csv(rep));
  io::write_file(rc.report_dir / "benchmark.txt", report_table(rep));
  std::fputs(report_table(rep).c_str(), stdout);
  const bool any_ok = std::any_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.ok(); });
  return any_ok ? 0 : 1;
}

int cmd_roundtrip(const run_config& rc) {
  const auto ds = load_data(rc);
  const auto kinds = available_models(rc);
  roundtrip_options opt;
  opt.tcase = threshold_case_by_id(rc.threshold_case);
  opt.snap = rc.snap;
  dir_lock lock(rc.report_dir);
  const fs::path env_dir = rc.report_dir / "envelope";
  fs::create_directories(env_dir);

  std::string summary = "model,samples,extraction_failures,mean_in_envelope,mean_max_abs_diff\n";
  auto record = [&](const std::string& name, const std::vector<roundtrip_row>& rows, model_kind kind_tag) {
    io::write_file(rc.report_dir / ("roundtrip_" + name + ".csv"), roundtrip_csv(rows, kind_tag));
    std::size_t failures = 0;
    double diff = 0.0;
    for (const auto& r : rows) {
      if (!r.failure.empty()) {
        ++failures;
        continue;
      }
      diff += r.max_abs_diff;
      io::write_file(env_dir / (name + "_" + std::to_string(r.id) + ".csv"), envelope_csv(r, ds.config.grid));
    }
    const std::size_t ok = rows.size() - failures;
    summary += name + "," + std::to_string(rows.size()) + "," + std::to_string(failures) + "," +
               (ok ? io::format_double(mean_in_envelope(rows)) : std::string()) + "," +
               (ok ? io::format_double(diff / static_cast<double>(ok)) : std::string()) + "\n";
    std::printf("%-6s in-envelope %.4f over %zu samples, %zu extraction failure(s)\n", name.c_str(),
                ok ? mean_in_envelope(rows) : 0.0, rows.size(), failures);
  };

  // The oracle passes the true images through; it bounds what extraction allows.
  auto oracle_rows = roundtrip(oracle_predictor(), ds, ds.split.test, opt);
  std::size_t failed = 0;
  for (auto k : kinds) {
    try {
      const auto m = load_model(model_path(rc, k));
      record(std::string(to_string(k)), roundtrip(m, ds, ds.split.test, opt), k);
    } catch (const error& e) {
      ++failed;
      std::fprintf(stderr, "model-error\t%s\t%s: %s\n", std::string(to_string(k)).c_str(), e.kind().c_str(), e.what());
    }
  }
  record("oracle", oracle_rows, model_kind::dtc);
  io::write_file(rc.report_dir / "roundtrip_summary.csv", summary);
  return failed == kinds.size() ? 1 : 0;
}

int cmd_report(const run_config& rc) {
  const fs::path bench = rc.report_dir / "benchmark.csv";
  auto rep = parse_report_csv(io::read_file(bench), bench.string());
  std::string text = "PERFORMANCE OF DIFFERENT ML MODELS\n\n" + report_table(rep);
  const fs::path rt = rc.report_dir / "roundtrip_summary.csv";
  if (fs::exists(rt)) text += "\nROUNDTRIP (case " + std::to_string(rc.threshold_case) + ")\n" + io::read_file(rt);
  dir_lock lock(rc.report_dir);
  io::write_file(rc.report_dir / "report.txt", text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FSS absorber inverse design: spectrum -> unit-cell image"};
  app.require_subcommand(1);
  cli_options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key = value configuration file");
    sub->add_option("--seed", opt.seed, "random seed (default 42)");
    sub->add_option("--resolution", opt.resolution, "raster resolution N (default 64)");
    sub->add_option("--models", opt.models, "comma-separated model kinds or 'all'");
    sub->add_option("--case", opt.tcase, "threshold case 1, 2 or 3 (default 2)")->check(CLI::Range(1, 3));
    sub->add_flag("--quick", opt.quick, "quick mode: N = 16");
    sub->add_flag("--snap", opt.snap, "roundtrip: snap extracted parameters to the design grid");
    sub->add_option("--extra-jitter", opt.extra_jitter, "extra jittered cells beyond the design grid");
    sub->add_option("--out", opt.out, "output root (data/, models/, reports/ below it)");
  };

  struct command {
    const char* name;
    const char* help;
    int (*run)(const run_config&);
  };
  const command commands[] = {
      {"gen", "generate the dataset", cmd_gen},
      {"train", "fit models on the train split", cmd_train},
      {"predict", "predict test-split images and extract parameters", cmd_predict},
      {"eval", "benchmark the trained models", cmd_eval},
      {"roundtrip", "re-simulate predicted cells against tolerance envelopes", cmd_roundtrip},
      {"report", "print the consolidated report", cmd_report},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const run_config rc = resolve(opt);
    for (const auto& c : commands)
      if (app.got_subcommand(c.name)) return c.run(rc);
  } catch (const fssinv::error& e) {
    std::fprintf(stderr, "error\t%s\t%s\n", e.kind().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error\tinternal\t%s\n", e.what());
    return 2;
  }
  return 2;
}
