#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fedosov/diffop.hpp"
#include "fedosov/error.hpp"
#include "fedosov/fedosov.hpp"
#include "fedosov/geometry.hpp"

namespace fedosov::cli {

inline constexpr std::string_view kEngineVersion = "fedosov 0.1.0";

/// Unusable input: unreadable or malformed files, schema violations, invalid geometry.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parsed geometry file.  `order` is the valid jet order of the connection; source data
/// (metric, potential) is expanded to the extra orders the construction consumes.
struct GeometryFile {
  GeometryKind kind = GeometryKind::Flat;
  std::size_t n = 1;
  int order = 0;
  std::vector<std::string> base_point;
  nlohmann::json metric;     // cotangent: n x n expression strings in q
  std::string potential;     // kaehler: expression in z, zb
  nlohmann::json gamma;      // darboux: {"ijk": expression}, 1-based indices

  static GeometryFile parse(std::string_view text, const std::string& origin = "<input>");
  static GeometryFile load(const std::string& path);
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical serialization, as 16 hex digits.
  std::string digest() const;
};

struct LoadedGeometry {
  GeometryPtr geometry;
  ValidationReport validation;
};

/// Builds the chart geometry without throwing on failed validation; the report is attached.
LoadedGeometry build_geometry(const GeometryFile& file);
/// As build_geometry, but a failed validation is an InputError carrying the report.
GeometryPtr build_valid_geometry(const GeometryFile& file);

/// Observable on the phase-space chart.  "g(p,p)" stands for g^{ab}(q) p_a p_b on cotangent charts.
Jet parse_observable(const std::string& source, const ChartGeometry& geom, int order);

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
  friend bool operator==(const Check&, const Check&) = default;
};

/// One coefficient table: a label (hbar power, derivative) and monomial -> coefficient rows.
struct Dump {
  std::string label;
  std::vector<std::pair<std::string, std::string>> rows;
  friend bool operator==(const Dump&, const Dump&) = default;
};

struct Report {
  std::vector<std::string> command;
  std::string engine{kEngineVersion};
  std::optional<nlohmann::json> geometry;  // kind, n, order, digest
  std::optional<std::uint64_t> seed;
  std::vector<Check> checks;
  std::vector<Dump> dumps;
  std::vector<std::string> notes;
  double seconds = 0;  // wall time; kept out of the serialized form

  bool passed() const;
  void add(std::string name, bool passed, std::string detail = {});
  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);
  /// Aligned human-readable rendering.
  std::string table() const;
  friend bool operator==(const Report& a, const Report& b) {
    return a.command == b.command && a.engine == b.engine && a.geometry == b.geometry && a.seed == b.seed &&
           a.checks == b.checks && a.dumps == b.dumps && a.notes == b.notes;
  }
};

Dump dump_jet(const std::string& label, const Jet& j);
std::vector<Dump> dump_star(const StarSeries& s);
std::vector<Dump> dump_diffop(const DiffOp& op);

struct SuiteConfig {
  std::optional<GeometryFile> geometry;
  std::optional<int> order;    // hbar order; each suite has its own default
  std::uint64_t seed = 1;
  std::optional<int> samples;  // each suite has its own default
};

const std::vector<std::string>& suite_names();
/// Runs a named suite; unknown names are an InputError.
Report run_suite(const std::string& name, const SuiteConfig& config);

struct Options {
  std::vector<std::string> argv;
  std::string geometry_path;
  std::optional<GeometryFile> geometry;  // used instead of geometry_path when set
  std::string suite;
  std::string f, g;
  std::optional<int> order;
  std::uint64_t seed = 1;
  std::optional<int> samples;
};

Report cmd_validate(const Options& opt);
Report cmd_star(const Options& opt);
Report cmd_check(const Options& opt);
Report cmd_quantize(const Options& opt);

/// 0 when every check passed, 1 otherwise.
int exit_code(const Report& r);

}  // namespace fedosov::cli
