#pragma once

// Parametric Jerusalem-cross unit cell and its material-label raster.
//
// Coordinates are millimetres with the origin at the cell centre, x to the
// right and y up. Pixel (i, j) of an N x N image has its centre at
//   x = (j + 0.5 - N/2) * p/N,   y = (N/2 - i - 0.5) * p/N.
// Every rectangle is tested on |x| and |y| with a predicate that is
// symmetric under x <-> y, which makes the raster exactly 4-fold symmetric.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fssinv/error.hpp"

namespace fssinv {

enum class material : std::uint8_t { substrate = 0, resistive = 1, conductor = 2 };

inline constexpr int num_materials = 3;

struct unit_cell_params {
  double b = 0.0;  // cap length across the arm
  double c = 0.0;  // arm shaft width
  double d = 0.0;  // centre-to-cap-centre distance
  double e = 0.0;  // cap width along the arm

  bool operator==(const unit_cell_params&) const = default;
};

struct cell_config {
  double period = 5.0;           // p, mm
  int resolution = 64;           // N, pixels per side
  double resistive_length = 0.4; // l_r, mm

  double pixel_pitch() const { return period / resolution; }
};

// Swept values of each parameter over the design grid (mm).
inline constexpr std::array<double, 7> grid_b{0.85, 1.15, 1.45, 1.75, 2.05, 2.35, 2.55};
inline constexpr std::array<double, 3> grid_c{0.25, 0.55, 0.75};
inline constexpr std::array<double, 6> grid_d{0.65, 0.95, 1.25, 1.55, 1.85, 1.95};
inline constexpr std::array<double, 3> grid_e{0.25, 0.55, 0.75};

inline void validate(const cell_config& cfg) {
  if (!(cfg.period > 0.0)) throw constraint_error("cell config: period p > 0 violated");
  if (cfg.resolution < 16 || cfg.resolution % 2 != 0)
    throw constraint_error("cell config: resolution N must be even and >= 16, got " +
                           std::to_string(cfg.resolution));
  if (!(cfg.resistive_length > 0.0 && cfg.resistive_length < grid_d.front()))
    throw constraint_error("cell config: 0 < l_r < 0.65 violated");
}

inline void validate(const unit_cell_params& q, double period) {
  if (!(q.b > 0.0)) throw constraint_error("b > 0 violated");
  if (!(q.c > 0.0)) throw constraint_error("c > 0 violated");
  if (!(q.d > 0.0)) throw constraint_error("d > 0 violated");
  if (!(q.e > 0.0)) throw constraint_error("e > 0 violated");
  if (!(2.0 * (q.d + q.e / 2.0) < period)) {
    std::ostringstream os;
    os << "2*(d + e/2) < p violated: 2*(" << q.d << " + " << q.e << "/2) >= " << period;
    throw constraint_error(os.str());
  }
  if (!(q.b <= period)) {
    std::ostringstream os;
    os << "b <= p violated: " << q.b << " > " << period;
    throw constraint_error(os.str());
  }
}

// True when a cap reaches the neighbouring arm's cap region, in which case
// the cap outlines are not separable in the raster.
inline bool is_valid(const unit_cell_params& q, double period) {
  try {
    validate(q, period);
    return true;
  } catch (const constraint_error&) {
    return false;
  }
}

inline bool caps_merged(const unit_cell_params& q) { return q.b >= 2.0 * q.d - q.e; }

class label_image {
public:
  label_image() = default;
  explicit label_image(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }
  std::size_t pixel_count() const { return data_.size(); }

  std::uint8_t operator()(int i, int j) const { return data_[index(i, j)]; }
  std::uint8_t& operator()(int i, int j) { return data_[index(i, j)]; }

  const std::vector<std::uint8_t>& labels() const { return data_; }
  std::vector<std::uint8_t>& labels() { return data_; }

  bool operator==(const label_image&) const = default;

private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<std::uint8_t> data_;
};

// Signed pixel-centre coordinates in units of the pixel pitch.
inline double pixel_offset(int index, int n) { return index + 0.5 - n / 2.0; }

namespace detail {

// Horizontal arm features at (ax, ay) = (|x|, |y|); the vertical arm is the
// same predicate with the coordinates swapped.
inline bool in_shaft(double ax, double ay, const unit_cell_params& q) {
  return ax <= q.d && ay <= q.c / 2.0;
}

inline bool in_cap(double ax, double ay, const unit_cell_params& q) {
  return std::abs(ax - q.d) <= q.e / 2.0 && ay <= q.b / 2.0;
}

inline bool in_resistor(double ax, double ay, const unit_cell_params& q, double lr) {
  return std::abs(ax - q.d / 2.0) <= lr / 2.0 && ay <= q.c / 2.0;
}

inline material classify(double ax, double ay, const unit_cell_params& q, double lr) {
  const bool cap = in_cap(ax, ay, q) || in_cap(ay, ax, q);
  if (cap) return material::conductor;
  // A resistor interrupts its own arm's shaft only; the perpendicular shaft
  // stays conductive where it crosses.
  const bool res_h = in_resistor(ax, ay, q, lr) && !in_shaft(ay, ax, q);
  const bool res_v = in_resistor(ay, ax, q, lr) && !in_shaft(ax, ay, q);
  if (res_h || res_v) return material::resistive;
  if (in_shaft(ax, ay, q) || in_shaft(ay, ax, q)) return material::conductor;
  return material::substrate;
}

}  // namespace detail

inline label_image rasterize(const unit_cell_params& q, const cell_config& cfg) {
  validate(cfg);
  validate(q, cfg.period);
  const int n = cfg.resolution;
  const double h = cfg.pixel_pitch();
  label_image img(n);
  for (int i = 0; i < n; ++i) {
    const double ay = std::abs(pixel_offset(i, n)) * h;
    for (int j = 0; j < n; ++j) {
      const double ax = std::abs(pixel_offset(j, n)) * h;
      img(i, j) = static_cast<std::uint8_t>(detail::classify(ax, ay, q, cfg.resistive_length));
    }
  }
  return img;
}

// Image transforms used by the symmetry checks.
inline label_image rotate90(const label_image& img) {
  const int n = img.size();
  label_image out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(j, n - 1 - i) = img(i, j);
  return out;
}

inline label_image mirror_horizontal(const label_image& img) {
  const int n = img.size();
  label_image out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, n - 1 - j) = img(i, j);
  return out;
}

inline label_image mirror_vertical(const label_image& img) {
  const int n = img.size();
  label_image out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(n - 1 - i, j) = img(i, j);
  return out;
}

// ASCII PGM ("P2", maxval 2), row-major labels.
inline void write_pgm(std::ostream& os, const label_image& img) {
  const int n = img.size();
  os << "P2\n" << n << ' ' << n << "\n2\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) os << ' ';
      os << static_cast<int>(img(i, j));
    }
    os << '\n';
  }
}

inline void write_pgm(const std::filesystem::path& path, const label_image& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open " + path.string() + " for writing");
  write_pgm(os, img);
  if (!os) throw io_error("write failed: " + path.string());
}

inline label_image read_pgm(std::istream& is, const std::string& name) {
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  if (!(is >> magic) || magic != "P2") throw parse_error(name + ": not an ASCII PGM (P2)");
  if (!(is >> w >> h >> maxval)) throw parse_error(name + ": malformed PGM header");
  if (w != h || w <= 0) throw parse_error(name + ": PGM image must be square");
  if (maxval != 2) throw parse_error(name + ": PGM maxval must be 2");
  label_image img(w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      long v;
      if (!(is >> v)) throw parse_error(name + ": truncated PGM data");
      if (v < 0 || v > 2)
        throw validation_error(name + ": label " + std::to_string(v) + " out of range at (" +
                               std::to_string(i) + ", " + std::to_string(j) + ")");
      img(i, j) = static_cast<std::uint8_t>(v);
    }
  }
  std::string extra;
  if (is >> extra) throw parse_error(name + ": trailing data after PGM pixels");
  return img;
}

inline label_image read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path.string());
  return read_pgm(is, path.string());
}

}  // namespace fssinv
