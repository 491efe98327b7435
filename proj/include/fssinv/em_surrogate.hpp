#pragma once

// Equivalent-circuit forward model of a PEC-backed Jerusalem-cross absorber.
//
// The patterned layer is a shunt series-RLC sheet sandwiched between two
// dielectric slabs; the stack is terminated by a short. Normal incidence,
// x polarisation, e^{jwt} time convention.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "fssinv/error.hpp"
#include "fssinv/geometry.hpp"
#include "fssinv/parallel.hpp"

namespace fssinv {

using cplx = std::complex<double>;

namespace constants {
inline constexpr double eps0 = 8.8541878128e-12;             // F/m
inline constexpr double mu0 = 4.0e-7 * std::numbers::pi;     // H/m
inline constexpr double c0 = 299792458.0;                    // m/s
inline constexpr double z0 = 376.730313;                     // ohm
}  // namespace constants

struct layer_stack {
  double t1 = 0.5;        // front slab, mm
  double t3 = 1.5;        // back slab, mm
  double eps_r = 4.4;
  double tan_d = 0.02;
  double rs = 100.0;      // sheet resistance, ohm/sq
  double kappa_c = 10.0;  // capacitance scale
  bool include_sheet = true;  // false models the bare shorted slab stack

  double total_thickness() const { return t1 + t3; }
};

inline constexpr double nominal_thickness_mm = 2.0;

inline void validate(const layer_stack& s) {
  if (!(s.t1 >= 0.0 && s.t3 >= 0.0)) throw constraint_error("layer stack: thicknesses must be >= 0");
  if (std::abs(s.total_thickness() - nominal_thickness_mm) > 1e-9)
    throw constraint_error("layer stack: t1 + t3 = 2.0 mm violated");
  if (!(s.eps_r >= 1.0)) throw constraint_error("layer stack: eps_r >= 1 violated");
  if (!(s.tan_d >= 0.0)) throw constraint_error("layer stack: tan_d >= 0 violated");
  if (!(s.rs >= 0.0)) throw constraint_error("layer stack: Rs >= 0 violated");
  if (!(s.kappa_c > 0.0)) throw constraint_error("layer stack: kappa_C > 0 violated");
}

class frequency_grid {
public:
  frequency_grid() : frequency_grid(1.0, 30.0, 30) {}

  frequency_grid(double f_min, double f_max, std::size_t count) : f_min_(f_min), f_max_(f_max) {
    if (!(f_min >= 1.0 && f_max <= 30.0 && f_min < f_max && count >= 2))
      throw constraint_error("frequency grid: need 1 <= f_min < f_max <= 30 GHz and F >= 2");
    values_.resize(count);
    const double step = (f_max - f_min) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) values_[k] = f_min + step * static_cast<double>(k);
    values_.back() = f_max;
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> ghz() const { return values_; }
  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }

  bool operator==(const frequency_grid&) const = default;

private:
  double f_min_ = 1.0;
  double f_max_ = 30.0;
  std::vector<double> values_;
};

// Absorption coefficients aligned to a frequency grid.
using spectrum = std::vector<double>;

// Lumped elements of the patterned sheet, SI units, before kappa_C scaling.
struct sheet_circuit {
  double inductance;   // H
  double capacitance;  // F
  double resistance;   // ohm
};

inline sheet_circuit sheet_elements(const unit_cell_params& q, const layer_stack& s,
                                    const cell_config& cfg) {
  constexpr double mm = 1e-3;
  constexpr double pi = std::numbers::pi;
  const double p = cfg.period * mm;
  const double gap = (cfg.period - 2.0 * q.d - q.e) * mm;
  if (!(gap > 0.0)) {
    std::ostringstream os;
    os << "cap gap g = p - 2d - e must be > 0, got " << gap / mm << " mm";
    throw geometry_error(os.str());
  }
  if (!(q.c > 0.0 && q.c < cfg.period)) throw geometry_error("shaft width must lie in (0, p)");
  const double eps_eff = (s.eps_r + 1.0) / 2.0;
  const double cap = constants::eps0 * eps_eff * (2.0 * q.b * mm / pi) *
                     std::log(1.0 / std::sin(pi * gap / (2.0 * p)));
  const double ind =
      constants::mu0 / (2.0 * pi) * (2.0 * q.d * mm) * std::log(1.0 / std::sin(pi * q.c * mm / (2.0 * p)));
  const double res = s.rs * cfg.resistive_length / q.c;
  return {ind, cap, res};
}

// Series resonance of the sheet, GHz.
inline double sheet_resonance_ghz(const sheet_circuit& el, const layer_stack& s) {
  return 1.0 / (2.0 * std::numbers::pi * std::sqrt(el.inductance * s.kappa_c * el.capacitance)) / 1e9;
}

inline cplx sheet_impedance(const sheet_circuit& el, const layer_stack& s, double f_ghz) {
  const double w = 2.0 * std::numbers::pi * f_ghz * 1e9;
  const cplx j{0.0, 1.0};
  return el.resistance + j * w * el.inductance + 1.0 / (j * w * s.kappa_c * el.capacitance);
}

inline cplx sheet_impedance(const unit_cell_params& q, const layer_stack& s, const cell_config& cfg,
                            double f_ghz) {
  if (!(f_ghz > 0.0)) throw constraint_error("frequency must be > 0");
  validate(q, cfg.period);
  return sheet_impedance(sheet_elements(q, s, cfg), s, f_ghz);
}

// ABCD matrix of a reciprocal two-port.
struct abcd {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  friend abcd operator*(const abcd& l, const abcd& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
  }

  static abcd line(cplx zc, cplx theta) {
    const cplx j{0.0, 1.0};
    return {std::cos(theta), j * zc * std::sin(theta), j * std::sin(theta) / zc, std::cos(theta)};
  }

  static abcd shunt(cplx z) { return {1.0, 0.0, 1.0 / z, 1.0}; }
};

namespace detail {

inline double absorption_at(const std::optional<sheet_circuit>& el, const layer_stack& s,
                            double f_ghz) {
  const double w = 2.0 * std::numbers::pi * f_ghz * 1e9;
  const cplx eps_c = s.eps_r * cplx(1.0, -s.tan_d);
  const cplx n = std::sqrt(eps_c);
  const cplx zc = constants::z0 / n;
  const cplx k = (w / constants::c0) * n;
  abcd chain = abcd::line(zc, k * (s.t1 * 1e-3));
  if (el) chain = chain * abcd::shunt(sheet_impedance(*el, s, f_ghz));
  chain = chain * abcd::line(zc, k * (s.t3 * 1e-3));
  // Short-circuit load: V2 = 0, so Zin = B / D.
  const cplx zin = chain.b / chain.d;
  // 1 - |gamma|^2 rearranged; exactly zero when zin is purely reactive.
  return 4.0 * constants::z0 * zin.real() / std::norm(zin + constants::z0);
}

}  // namespace detail

inline spectrum absorption(const unit_cell_params& q, const layer_stack& s, const cell_config& cfg,
                           const frequency_grid& grid) {
  validate(s);
  std::optional<sheet_circuit> el;
  if (s.include_sheet) {
    validate(q, cfg.period);
    el = sheet_elements(q, s, cfg);
  }
  spectrum out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = detail::absorption_at(el, s, grid[k]);
  return out;
}

// Element-wise absorption; output order follows input order. A failure is
// reported with the lowest offending index.
inline std::vector<spectrum> absorption_batch(std::span<const unit_cell_params> cells,
                                              const layer_stack& s, const cell_config& cfg,
                                              const frequency_grid& grid) {
  std::vector<spectrum> out(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    try {
      out[i] = absorption(cells[i], s, cfg, grid);
    } catch (const error& e) {
      throw batch_error(i, e.what());
    }
  });
  return out;
}

}  // namespace fssinv
