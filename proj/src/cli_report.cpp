#include <algorithm>
#include <sstream>

#include "fedosov/cli.hpp"

namespace fedosov::cli {

namespace {

using nlohmann::json;

std::string monomial_label(Monomial m, const Chart& chart) {
  std::string out;
  for (std::size_t v = 0; v < chart.dim(); ++v) {
    const unsigned e = m[v];
    if (e == 0) continue;
    if (!out.empty()) out += "*";
    out += chart.base(v).is_zero() ? chart.name(v) : "(" + chart.name(v) + "-" + chart.base(v).str() + ")";
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

std::string derivative_label(Monomial alpha, const Chart& chart) {
  std::string out;
  for (std::size_t v = 0; v < chart.dim(); ++v) {
    const unsigned e = alpha[v];
    if (e == 0) continue;
    if (!out.empty()) out += " ";
    out += "d_" + chart.name(v);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

}  // namespace

Dump dump_jet(const std::string& label, const Jet& j) {
  Dump d{label, {}};
  for (const auto& [m, c] : j.terms()) d.rows.emplace_back(monomial_label(m, *j.chart()), c.str());
  d.rows.emplace_back("valid_order", std::to_string(j.valid_order()));
  return d;
}

std::vector<Dump> dump_star(const StarSeries& s) {
  std::vector<Dump> out;
  for (std::size_t k = 0; k < s.coefficients.size(); ++k) out.push_back(dump_jet("hbar^" + std::to_string(k), s[k]));
  return out;
}

std::vector<Dump> dump_diffop(const DiffOp& op) {
  std::vector<Dump> out;
  for (const auto& [alpha, coeffs] : op.terms()) {
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k].is_zero()) continue;
      out.push_back(dump_jet("hbar^" + std::to_string(k) + " " + derivative_label(alpha, *op.chart()), coeffs[k]));
    }
  }
  return out;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void Report::add(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

nlohmann::json Report::to_json() const {
  json j;
  j["command"] = command;
  j["engine"] = engine;
  j["geometry"] = geometry ? *geometry : json(nullptr);
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["coefficients"] = json::array();
  for (const auto& d : dumps) {
    json rows = json::array();
    for (const auto& [m, c] : d.rows) rows.push_back({m, c});
    j["coefficients"].push_back({{"label", d.label}, {"terms", rows}});
  }
  j["notes"] = notes;
  j["status"] = passed() ? "pass" : "fail";
  return j;
}

Report Report::from_json(const nlohmann::json& j) {
  Report r;
  r.command = j.at("command").get<std::vector<std::string>>();
  r.engine = j.at("engine").get<std::string>();
  if (!j.at("geometry").is_null()) r.geometry = j.at("geometry");
  if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
  }
  for (const auto& d : j.at("coefficients")) {
    Dump dump{d.at("label").get<std::string>(), {}};
    for (const auto& row : d.at("terms")) dump.rows.emplace_back(row.at(0).get<std::string>(), row.at(1).get<std::string>());
    r.dumps.push_back(std::move(dump));
  }
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

std::string Report::table() const {
  std::ostringstream os;
  os << engine;
  if (geometry) {
    os << "  geometry " << geometry->value("kind", "") << " n=" << geometry->value("n", 0)
       << " order=" << geometry->value("order", 0) << " digest=" << geometry->value("digest", "");
  }
  if (seed) os << "  seed " << *seed;
  os << "\n";
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    os << (c.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size(), ' ');
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  for (const auto& d : dumps) {
    os << d.label << "\n";
    std::size_t w = 0;
    for (const auto& [m, c] : d.rows) w = std::max(w, m.size());
    for (const auto& [m, c] : d.rows) os << "  " << m << std::string(w - m.size(), ' ') << "  " << c << "\n";
  }
  for (const auto& n : notes) os << "note: " << n << "\n";
  if (!checks.empty()) os << (passed() ? "status: pass" : "status: fail") << "\n";
  return os.str();
}

int exit_code(const Report& r) { return r.passed() ? 0 : 1; }

}  // namespace fedosov::cli
