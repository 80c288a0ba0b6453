#pragma once

#include "cusplab/cusp_report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cusplab {

/// Malformed or inconsistent configuration. `location` is "line:column" for
/// syntax errors and a JSON pointer for schema errors.
class ConfigError : public Error {
 public:
  ConfigError(std::string location, const std::string& what)
      : Error(location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

enum class OutputFormat { json, csv, table };
OutputFormat parse_format(const std::string& s);

struct JastrowCheckConfig {
  int configurations = 20;
  double scale = 2.5;
  double fd_step = 1e-3;
  bool apriori = false;
  Configuration apriori_center;
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  int apriori_samples = 10000;
  bool probe = false;
  Configuration probe_center;
  std::vector<double> probe_radii{0.1, 0.03, 0.01, 0.003, 0.001};
};

struct ConvergeConfig {
  bool monte_carlo = true;
  std::vector<std::int64_t> sample_counts{1000, 10000, 100000, 1000000};
  std::vector<int> grid_orders{4, 6, 8, 12, 16, 24};
};

struct SphereCheckConfig {
  std::vector<int> degrees{3, 7, 17, 29};
  int trials = 100;
};

struct RunConfig {
  AtomSpec system;
  WavefunctionModel model{Hydrogenic{}};
  ReportConfig report;
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> out_path;
  JastrowCheckConfig jastrow;
  ConvergeConfig converge;
  SphereCheckConfig sphere_check;
  /// FNV-1a 64 of the compact, key-sorted dump of the parsed document, 16 hex
  /// digits.
  std::string hash;
};

/// Parses a JSON configuration. `seed_override` replaces the document's seed
/// (the hash still describes the document).
RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = {});
/// Reads and parses a file; unreadable files raise ConfigError at "<path>".
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {});

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cusplab
