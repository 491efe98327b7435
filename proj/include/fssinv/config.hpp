#pragma once

// Run configuration: a flat `key = value` document (TOML subset: comments
// with '#', optional quotes, [sections] ignored) overlaid by CLI flags.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fssinv/dataset.hpp"
#include "fssinv/error.hpp"
#include "fssinv/io.hpp"
#include "fssinv/models/model.hpp"
#include "fssinv/postprocess.hpp"

namespace fssinv {

struct run_config {
  std::filesystem::path data_dir = "fssinv_run/data";
  std::filesystem::path model_dir = "fssinv_run/models";
  std::filesystem::path report_dir = "fssinv_run/reports";
  dataset_config data;
  std::vector<model_kind> models{all_model_kinds.begin(), all_model_kinds.end()};
  bool models_explicit = false;
  int threshold_case = 2;
  bool snap = false;  // roundtrip: snap extracted parameters to the design grid
};

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

inline std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& name) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(name + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

inline std::vector<model_kind> parse_model_list(const std::string& text) {
  std::string t = trim(text);
  if (t == "all") return {all_model_kinds.begin(), all_model_kinds.end()};
  std::vector<model_kind> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto k = parse_model_kind(item);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  if (out.empty()) throw config_error("empty model list");
  return out;
}

inline void apply_settings(run_config& rc, const std::map<std::string, std::string>& kv) {
  double f_min = rc.data.grid.f_min(), f_max = rc.data.grid.f_max();
  std::size_t count = rc.data.grid.size();
  for (const auto& [key, value] : kv) {
    const std::string where = "config key '" + key + "'";
    auto num = [&] { return io::parse_double(value, where); };
    auto integer = [&] { return io::parse_int(value, where); };
    if (key == "data_dir") rc.data_dir = value;
    else if (key == "model_dir") rc.model_dir = value;
    else if (key == "report_dir") rc.report_dir = value;
    else if (key == "period") rc.data.cell.period = num();
    else if (key == "resolution") rc.data.cell.resolution = static_cast<int>(integer());
    else if (key == "resistive_length") rc.data.cell.resistive_length = num();
    else if (key == "f_min") f_min = num();
    else if (key == "f_max") f_max = num();
    else if (key == "frequency_count") count = static_cast<std::size_t>(integer());
    else if (key == "t1") rc.data.stack.t1 = num();
    else if (key == "t3") rc.data.stack.t3 = num();
    else if (key == "eps_r") rc.data.stack.eps_r = num();
    else if (key == "tan_d") rc.data.stack.tan_d = num();
    else if (key == "rs") rc.data.stack.rs = num();
    else if (key == "kappa_c") rc.data.stack.kappa_c = num();
    else if (key == "seed") rc.data.seed = static_cast<std::uint64_t>(integer());
    else if (key == "extra_jitter") rc.data.extra_jitter = static_cast<std::size_t>(integer());
    else if (key == "models") {
      rc.models = parse_model_list(value);
      rc.models_explicit = true;
    } else if (key == "case") rc.threshold_case = static_cast<int>(integer());
    else if (key == "snap") {
      if (value != "true" && value != "false") throw config_error(where + ": expected true or false");
      rc.snap = value == "true";
    }
    else throw config_error("unknown " + where);
  }
  rc.data.grid = frequency_grid(f_min, f_max, count);
}

inline void validate(const run_config& rc) {
  validate(rc.data.cell);
  validate(rc.data.stack);
  threshold_case_by_id(rc.threshold_case);
  namespace fs = std::filesystem;
  auto norm = [](const fs::path& p) { return fs::weakly_canonical(fs::absolute(p)); };
  if (norm(rc.data_dir) == norm(rc.model_dir) || norm(rc.data_dir) == norm(rc.report_dir) ||
      norm(rc.model_dir) == norm(rc.report_dir))
    throw config_error("data, model and report directories must be distinct");
}

// Normalised echo of the effective configuration, stored with every run.
inline std::string echo(const run_config& rc) {
  std::ostringstream os;
  os << "data_dir = \"" << rc.data_dir.generic_string() << "\"\n"
     << "model_dir = \"" << rc.model_dir.generic_string() << "\"\n"
     << "report_dir = \"" << rc.report_dir.generic_string() << "\"\n"
     << "period = " << io::format_double(rc.data.cell.period) << "\n"
     << "resolution = " << rc.data.cell.resolution << "\n"
     << "resistive_length = " << io::format_double(rc.data.cell.resistive_length) << "\n"
     << "f_min = " << io::format_double(rc.data.grid.f_min()) << "\n"
     << "f_max = " << io::format_double(rc.data.grid.f_max()) << "\n"
     << "frequency_count = " << rc.data.grid.size() << "\n"
     << "t1 = " << io::format_double(rc.data.stack.t1) << "\n"
     << "t3 = " << io::format_double(rc.data.stack.t3) << "\n"
     << "eps_r = " << io::format_double(rc.data.stack.eps_r) << "\n"
     << "tan_d = " << io::format_double(rc.data.stack.tan_d) << "\n"
     << "rs = " << io::format_double(rc.data.stack.rs) << "\n"
     << "kappa_c = " << io::format_double(rc.data.stack.kappa_c) << "\n"
     << "seed = " << rc.data.seed << "\n"
     << "extra_jitter = " << rc.data.extra_jitter << "\n"
     << "case = " << rc.threshold_case << "\n"
     << "snap = " << (rc.snap ? "true" : "false") << "\n"
     << "models = \"";
  for (std::size_t k = 0; k < rc.models.size(); ++k) os << (k ? "," : "") << to_string(rc.models[k]);
  os << "\"\n";
  return os.str();
}

}  // namespace fssinv
