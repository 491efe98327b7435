#pragma once

// Spectrum -> label-image corpus over the design grid: generation, on-disk
// layout, train/test split and validated loading.
//
// Directory layout written by generate():
//   manifest.json   config echo, split, sample table, checksums
//   params.csv      id,b,c,d,e
//   spectra.csv     id,f_GHz_<f1>,...,f_GHz_<fF>
//   cell_<id>.pgm   one label image per sample

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fssinv/em_surrogate.hpp"
#include "fssinv/error.hpp"
#include "fssinv/geometry.hpp"
#include "fssinv/io.hpp"
#include "fssinv/parallel.hpp"
#include "fssinv/random.hpp"

namespace fssinv {

struct sample {
  int id = 0;
  unit_cell_params params;
  spectrum absorption;
  label_image image;
};

struct split_index {
  std::vector<int> train;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

inline std::vector<unit_cell_params> table1_grid() {
  std::vector<unit_cell_params> out;
  out.reserve(grid_b.size() * grid_c.size() * grid_d.size() * grid_e.size());
  for (double b : grid_b)
    for (double c : grid_c)
      for (double d : grid_d)
        for (double e : grid_e) out.push_back({b, c, d, e});
  return out;
}

// k extra cells: a grid cell drawn uniformly, each parameter scaled by an
// independent factor in [0.9, 1.1]; invalid draws are redrawn.
inline std::vector<unit_cell_params> jittered_cells(std::size_t k, std::uint64_t seed,
                                                    const cell_config& cfg) {
  const auto base = table1_grid();
  rng_engine rng(seed ^ 0x6a09e667f3bcc909ULL);
  auto scale = [&] { return 0.9 + 0.2 * uniform_unit(rng); };
  std::vector<unit_cell_params> out;
  out.reserve(k);
  while (out.size() < k) {
    const auto& q = base[uniform_index(rng, base.size())];
    unit_cell_params j{q.b * scale(), q.c * scale(), q.d * scale(), q.e * scale()};
    if (is_valid(j, cfg.period)) out.push_back(j);
  }
  return out;
}

inline split_index split(std::size_t n, std::uint64_t seed) {
  if (n < 5) throw constraint_error("split needs n >= 5, got " + std::to_string(n));
  rng_engine rng(seed);
  auto perm = permutation(n, rng);
  const std::size_t n_train = (n * 4) / 5;  // floor(0.8 n) in exact arithmetic
  split_index s;
  s.seed = seed;
  for (std::size_t k = 0; k < n; ++k) {
    (k < n_train ? s.train : s.test).push_back(static_cast<int>(perm[k]));
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// ---------------------------------------------------------------------------
// CSV formats

inline std::string spectra_header(const frequency_grid& grid) {
  std::string out = "id";
  for (double f : grid.ghz()) out += ",f_GHz_" + io::format_double(f);
  return out;
}

inline std::string format_spectra_csv(const std::vector<sample>& samples, const frequency_grid& grid) {
  std::string out = spectra_header(grid) + "\n";
  for (const auto& s : samples) {
    out += std::to_string(s.id);
    for (double a : s.absorption) out += "," + io::format_double(a);
    out += "\n";
  }
  return out;
}

inline std::string format_params_csv(const std::vector<sample>& samples) {
  std::string out = "id,b,c,d,e\n";
  for (const auto& s : samples) {
    out += std::to_string(s.id) + "," + io::format_double(s.params.b) + "," +
           io::format_double(s.params.c) + "," + io::format_double(s.params.d) + "," +
           io::format_double(s.params.e) + "\n";
  }
  return out;
}

// id -> row values; `expected` is the number of values after the id column.
inline std::map<int, std::vector<double>> parse_id_table(const std::string& text,
                                                         const std::string& name,
                                                         std::size_t expected,
                                                         std::optional<std::string> header = {}) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw parse_error(name + ": empty file");
  if (header && line != *header) throw parse_error(name + ": unexpected header '" + line + "'");
  std::map<int, std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    auto cells = io::split_csv_line(line);
    if (cells.size() != expected + 1)
      throw parse_error(where + ": expected " + std::to_string(expected + 1) + " columns, got " +
                        std::to_string(cells.size()));
    int id = static_cast<int>(io::parse_int(cells[0], where));
    std::vector<double> vals;
    vals.reserve(expected);
    for (std::size_t k = 1; k < cells.size(); ++k) vals.push_back(io::parse_double(cells[k], where));
    if (!rows.emplace(id, std::move(vals)).second)
      throw parse_error(where + ": duplicate id " + std::to_string(id));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Generation

struct dataset_config {
  cell_config cell;
  layer_stack stack;
  frequency_grid grid;
  std::uint64_t seed = 42;
  std::size_t extra_jitter = 0;
};

struct dataset {
  dataset_config config;
  std::vector<sample> samples;
  split_index split;
  std::filesystem::path directory;

  const sample& by_id(int id) const { return samples.at(static_cast<std::size_t>(id)); }
};

inline nlohmann::ordered_json to_json(const layer_stack& s) {
  return {{"t1_mm", s.t1},       {"t3_mm", s.t3},       {"eps_r", s.eps_r},
          {"tan_d", s.tan_d},    {"rs_ohm_sq", s.rs},   {"kappa_c", s.kappa_c},
          {"include_sheet", s.include_sheet}};
}

inline layer_stack stack_from_json(const nlohmann::json& j) {
  layer_stack s;
  s.t1 = j.at("t1_mm").get<double>();
  s.t3 = j.at("t3_mm").get<double>();
  s.eps_r = j.at("eps_r").get<double>();
  s.tan_d = j.at("tan_d").get<double>();
  s.rs = j.at("rs_ohm_sq").get<double>();
  s.kappa_c = j.at("kappa_c").get<double>();
  s.include_sheet = j.at("include_sheet").get<bool>();
  return s;
}

inline nlohmann::ordered_json to_json(const dataset_config& c) {
  return {{"period_mm", c.cell.period},
          {"resolution", c.cell.resolution},
          {"resistive_length_mm", c.cell.resistive_length},
          {"f_min_ghz", c.grid.f_min()},
          {"f_max_ghz", c.grid.f_max()},
          {"frequency_count", c.grid.size()},
          {"stack", to_json(c.stack)},
          {"seed", c.seed},
          {"extra_jitter", c.extra_jitter}};
}

inline dataset_config dataset_config_from_json(const nlohmann::json& j) {
  dataset_config c;
  c.cell.period = j.at("period_mm").get<double>();
  c.cell.resolution = j.at("resolution").get<int>();
  c.cell.resistive_length = j.at("resistive_length_mm").get<double>();
  c.grid = frequency_grid(j.at("f_min_ghz").get<double>(), j.at("f_max_ghz").get<double>(),
                          j.at("frequency_count").get<std::size_t>());
  c.stack = stack_from_json(j.at("stack"));
  c.seed = j.at("seed").get<std::uint64_t>();
  c.extra_jitter = j.at("extra_jitter").get<std::size_t>();
  return c;
}

inline std::string image_file_name(int id) { return "cell_" + std::to_string(id) + ".pgm"; }

inline std::string pgm_text(const label_image& img) {
  std::ostringstream os;
  write_pgm(os, img);
  return os.str();
}

// Builds the samples in memory (grid cells first, then jittered cells).
inline std::vector<sample> build_samples(const dataset_config& c) {
  validate(c.cell);
  validate(c.stack);
  auto cells = table1_grid();
  auto extra = jittered_cells(c.extra_jitter, c.seed, c.cell);
  cells.insert(cells.end(), extra.begin(), extra.end());

  std::vector<sample> out(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    out[i].id = static_cast<int>(i);
    out[i].params = cells[i];
    out[i].image = rasterize(cells[i], c.cell);
    out[i].absorption = absorption(cells[i], c.stack, c.cell, c.grid);
  });
  return out;
}

struct manifest_summary {
  std::filesystem::path path;
  std::size_t sample_count = 0;
  double merged_fraction = 0.0;
  std::string checksum;
};

inline manifest_summary generate(const dataset_config& c, const std::filesystem::path& out_dir,
                                 const std::string& provenance = {}) {
  namespace fs = std::filesystem;
  auto samples = build_samples(c);
  const auto sp = split(samples.size(), c.seed);

  nlohmann::ordered_json manifest;
  manifest["format"] = "fssinv-dataset";
  manifest["version"] = 1;
  manifest["complete"] = false;
  manifest["config"] = to_json(c);
  if (!provenance.empty()) manifest["provenance"] = provenance;
  manifest["files"] = {{"params", "params.csv"}, {"spectra", "spectra.csv"}};
  manifest["split"] = {{"seed", sp.seed}, {"train", sp.train}, {"test", sp.test}};

  const fs::path manifest_path = out_dir / "manifest.json";
  io::fnv1a total;
  std::size_t merged = 0;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  try {
    fs::create_directories(out_dir);
    const std::string params_csv = format_params_csv(samples);
    const std::string spectra_csv = format_spectra_csv(samples, c.grid);
    io::write_file(out_dir / "params.csv", params_csv);
    io::write_file(out_dir / "spectra.csv", spectra_csv);
    total.update(params_csv);
    total.update(spectra_csv);
    manifest["files"]["params_checksum"] = io::checksum(params_csv);
    manifest["files"]["spectra_checksum"] = io::checksum(spectra_csv);
    for (const auto& s : samples) {
      const std::string text = pgm_text(s.image);
      const std::string name = image_file_name(s.id);
      io::write_file(out_dir / name, text);
      total.update(text);
      const bool m = caps_merged(s.params);
      merged += m ? 1 : 0;
      table.push_back({{"id", s.id},
                       {"b", s.params.b},
                       {"c", s.params.c},
                       {"d", s.params.d},
                       {"e", s.params.e},
                       {"caps_merged", m},
                       {"image", name},
                       {"checksum", io::checksum(text)}});
    }
  } catch (const std::exception& e) {
    manifest["error"] = e.what();
    manifest["samples"] = table;
    try {
      io::write_file(manifest_path, manifest.dump(2) + "\n");
    } catch (...) {
    }
    throw io_error(std::string("dataset generation aborted: ") + e.what());
  }

  manifest_summary out;
  out.path = manifest_path;
  out.sample_count = samples.size();
  out.merged_fraction = samples.empty() ? 0.0 : static_cast<double>(merged) / samples.size();
  out.checksum = total.hex();

  manifest["complete"] = true;
  manifest["merged_fraction"] = out.merged_fraction;
  manifest["samples"] = std::move(table);
  manifest["checksum"] = out.checksum;
  io::write_file(manifest_path, manifest.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// Loading

inline dataset load(const std::filesystem::path& manifest_path) {
  namespace fs = std::filesystem;
  const std::string manifest_name = manifest_path.string();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(io::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(manifest_name + ": " + e.what());
  }
  if (manifest.value("format", "") != "fssinv-dataset")
    throw parse_error(manifest_name + ": not a dataset manifest");
  if (!manifest.value("complete", false))
    throw io_error(manifest_name + ": dataset generation did not complete");

  const fs::path dir = manifest_path.parent_path();
  dataset ds;
  ds.directory = dir;
  try {
    ds.config = dataset_config_from_json(manifest.at("config"));
    ds.split.seed = manifest.at("split").at("seed").get<std::uint64_t>();
    ds.split.train = manifest.at("split").at("train").get<std::vector<int>>();
    ds.split.test = manifest.at("split").at("test").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(manifest_name + ": " + e.what());
  }
  const std::size_t nf = ds.config.grid.size();

  const std::string params_name = (dir / "params.csv").string();
  const std::string spectra_name = (dir / "spectra.csv").string();
  const std::string params_csv = io::read_file(dir / "params.csv");
  const std::string spectra_csv = io::read_file(dir / "spectra.csv");
  auto params = parse_id_table(params_csv, params_name, 4, std::string("id,b,c,d,e"));
  auto spectra = parse_id_table(spectra_csv, spectra_name, nf, spectra_header(ds.config.grid));

  io::fnv1a total;
  total.update(params_csv);
  total.update(spectra_csv);

  const auto& table = manifest.at("samples");
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto& row = table[k];
    sample s;
    s.id = row.at("id").get<int>();
    if (s.id != static_cast<int>(k)) throw parse_error(manifest_name + ": sample ids must be 0..n-1");
    auto pit = params.find(s.id);
    if (pit == params.end())
      throw missing_data_error(params_name + ": no row for id " + std::to_string(s.id));
    s.params = {pit->second[0], pit->second[1], pit->second[2], pit->second[3]};
    auto sit = spectra.find(s.id);
    if (sit == spectra.end())
      throw missing_data_error(spectra_name + ": no spectrum row for id " + std::to_string(s.id));
    s.absorption = sit->second;
    for (double a : s.absorption) {
      if (!(a >= 0.0 && a <= 1.0))
        throw validation_error(spectra_name + ": absorption " + io::format_double(a) +
                               " outside [0, 1] for id " + std::to_string(s.id));
    }
    const fs::path image_path = dir / row.at("image").get<std::string>();
    const std::string text = io::read_file(image_path);
    std::istringstream is(text);
    s.image = read_pgm(is, image_path.string());
    if (s.image.size() != ds.config.cell.resolution)
      throw validation_error(image_path.string() + ": resolution does not match manifest");
    total.update(text);
    if (io::checksum(text) != row.at("checksum").get<std::string>())
      throw checksum_error(image_path.string() + ": checksum mismatch");
    ds.samples.push_back(std::move(s));
  }

  if (io::checksum(params_csv) != manifest.at("files").at("params_checksum").get<std::string>())
    throw checksum_error(params_name + ": checksum mismatch");
  if (io::checksum(spectra_csv) != manifest.at("files").at("spectra_checksum").get<std::string>())
    throw checksum_error(spectra_name + ": checksum mismatch");
  if (total.hex() != manifest.at("checksum").get<std::string>())
    throw checksum_error(manifest_name + ": dataset checksum mismatch");

  // The split must partition the sample ids.
  std::vector<int> all = ds.split.train;
  all.insert(all.end(), ds.split.test.begin(), ds.split.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (all[k] != static_cast<int>(k) || all.size() != ds.samples.size())
      throw validation_error(manifest_name + ": split is not a partition of the sample ids");
  }
  return ds;
}

}  // namespace fssinv
