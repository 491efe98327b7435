#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fssinv {

// Root of every exception thrown by the library. `kind()` is a short
// machine-parsable tag used by the CLI's one-line error output.
class error : public std::runtime_error {
public:
  error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

// Unit-cell parameters violate one of the cell inequalities.
struct constraint_error : error {
  explicit constraint_error(const std::string& what) : error("constraint", what) {}
};

// Derived circuit geometry is degenerate (e.g. non-positive gap).
struct geometry_error : error {
  explicit geometry_error(const std::string& what) : error("geometry", what) {}
};

// Batch failure that remembers which element was at fault.
struct batch_error : error {
  batch_error(std::size_t index, const std::string& what)
      : error("batch", "element " + std::to_string(index) + ": " + what), index(index) {}
  std::size_t index;
};

struct io_error : error {
  explicit io_error(const std::string& what) : error("io", what) {}
};

struct checksum_error : error {
  explicit checksum_error(const std::string& what) : error("checksum", what) {}
};

struct parse_error : error {
  explicit parse_error(const std::string& what) : error("parse", what) {}
};

// Loaded data violates a domain invariant (label or absorption range).
struct validation_error : error {
  explicit validation_error(const std::string& what) : error("validation", what) {}
};

struct missing_data_error : error {
  explicit missing_data_error(const std::string& what) : error("missing", what) {}
};

// Invalid model hyperparameters or model/data combination.
struct spec_error : error {
  explicit spec_error(const std::string& what) : error("spec", what) {}
};

struct dimension_error : error {
  explicit dimension_error(const std::string& what) : error("dimension", what) {}
};

struct extraction_error : error {
  explicit extraction_error(const std::string& what) : error("extraction", what) {}
};

struct metric_error : error {
  explicit metric_error(const std::string& what) : error("metric", what) {}
};

struct config_error : error {
  explicit config_error(const std::string& what) : error("config", what) {}
};

}  // namespace fssinv
