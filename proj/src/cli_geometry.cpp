#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fedosov/cli.hpp"
#include "fedosov/expr.hpp"
#include "fedosov/quantization.hpp"

namespace fedosov::cli {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& origin, const std::string& where, const std::string& what) {
  throw InputError(origin + ": " + where + ": " + what);
}

/// Exact value of a constant expression ("1/2", "-3", "1/2+i/3").
Complex constant_value(const std::string& text, const std::string& origin, const std::string& where) {
  static const ChartPtr scratch = make_chart({"_"}, {Complex(0)});
  try {
    return expr::elaborate(text, scratch, 0).constant_term();
  } catch (const Error& e) {
    schema_error(origin, where, e.what());
  }
}

std::string as_expression(const json& v, const std::string& origin, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  schema_error(origin, where, "expected an expression string or an integer");
}

std::vector<Complex> base_values(const GeometryFile& f, std::size_t count, bool real) {
  std::vector<Complex> out(count, Complex(0));
  for (std::size_t i = 0; i < f.base_point.size(); ++i) {
    out[i] = constant_value(f.base_point[i], "base_point", "/base_point/" + std::to_string(i));
    if (real && !out[i].is_real()) {
      throw InputError("base_point: /base_point/" + std::to_string(i) + ": must be real for " +
                       std::string(kind_name(f.kind)) + " charts");
    }
  }
  return out;
}

Jet elaborate_at(const std::string& source, const ChartPtr& chart, int order, const std::string& where) {
  try {
    return expr::elaborate(source, chart, order);
  } catch (const Error& e) {
    throw InputError(where + ": " + e.what());
  }
}

std::size_t expected_base_size(const GeometryFile& f) {
  return (f.kind == GeometryKind::Cotangent || f.kind == GeometryKind::Kaehler) ? f.n : 2 * f.n;
}

GeometryPtr build_darboux_file(const GeometryFile& f) {
  const auto base = base_values(f, 2 * f.n, true);
  const auto chart = make_chart(coordinate_names(GeometryKind::Darboux, f.n), base);
  std::map<std::array<std::size_t, 3>, Jet> given;
  for (const auto& [key, value] : f.gamma.items()) {
    const std::string where = "/gamma/" + key;
    std::array<std::size_t, 3> idx{};
    for (std::size_t t = 0; t < 3; ++t) idx[t] = static_cast<std::size_t>(key[t] - '1');
    given[idx] = elaborate_at(value.get<std::string>(), chart, f.order, where);
  }
  // An entry also stands for its permutations that are not listed explicitly.
  std::map<std::array<std::size_t, 3>, Jet> full = given;
  for (const auto& [idx, value] : given) {
    std::array<std::size_t, 3> perm = idx;
    std::sort(perm.begin(), perm.end());
    do {
      if (!given.count(perm)) full[perm] = value;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return build_darboux(f.n, f.order, full, base, false);
}

GeometryPtr build_cotangent_file(const GeometryFile& f) {
  const auto base = base_values(f, f.n, true);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < f.n; ++i) names.push_back(f.n == 1 ? "q" : "q" + std::to_string(i + 1));
  const auto chart = make_chart(names, base);
  const int order = f.order + 2;
  JetMatrix g(f.n, std::vector<Jet>(f.n));
  for (std::size_t i = 0; i < f.n; ++i) {
    for (std::size_t j = 0; j < f.n; ++j) {
      const std::string where = "/metric/" + std::to_string(i) + "/" + std::to_string(j);
      g[i][j] = elaborate_at(f.metric[i][j].get<std::string>(), chart, order, where);
    }
  }
  for (std::size_t i = 0; i < f.n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!agree(g[i][j], g[j][i])) {
        throw InputError("/metric/" + std::to_string(i) + "/" + std::to_string(j) + ": metric is not symmetric");
      }
    }
  }
  return lift_cotangent(g, false);
}

GeometryPtr build_kaehler_file(const GeometryFile& f) {
  const auto z = base_values(f, f.n, false);
  std::vector<Complex> base(2 * f.n);
  std::vector<int> partner(2 * f.n);
  for (std::size_t i = 0; i < f.n; ++i) {
    base[i] = z[i];
    base[f.n + i] = z[i].conj();
    partner[i] = static_cast<int>(f.n + i);
    partner[f.n + i] = static_cast<int>(i);
  }
  const auto chart = make_chart(coordinate_names(GeometryKind::Kaehler, f.n), base, partner);
  return build_kaehler(elaborate_at(f.potential, chart, f.order + 3, "/potential"), false);
}

}  // namespace

GeometryFile GeometryFile::parse(std::string_view text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
  if (!j.is_object()) schema_error(origin, "/", "expected a JSON object");
  auto field = [&](const char* name) -> const json& {
    if (!j.contains(name)) schema_error(origin, std::string("/") + name, "missing field");
    return j.at(name);
  };
  GeometryFile f;
  const json& kind = field("kind");
  if (!kind.is_string()) schema_error(origin, "/kind", "expected a string");
  auto k = kind_from_name(kind.get<std::string>());
  if (!k) schema_error(origin, "/kind", "unknown kind '" + kind.get<std::string>() + "'");
  f.kind = *k;
  const json& n = field("n");
  if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > 4) {
    schema_error(origin, "/n", "expected an integer in 1..4");
  }
  f.n = n.get<std::size_t>();
  const json& order = field("order");
  if (!order.is_number_integer() || order.get<long long>() < 0 || order.get<long long>() > 40) {
    schema_error(origin, "/order", "expected an integer in 0..40");
  }
  f.order = order.get<int>();
  if (j.contains("base_point")) {
    const json& b = j.at("base_point");
    if (!b.is_array()) schema_error(origin, "/base_point", "expected an array");
    if (b.size() != expected_base_size(f)) {
      schema_error(origin, "/base_point", "expected " + std::to_string(expected_base_size(f)) + " entries");
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      f.base_point.push_back(as_expression(b[i], origin, "/base_point/" + std::to_string(i)));
    }
  }
  static const std::vector<std::string> data_fields{"metric", "potential", "gamma"};
  const std::string wanted = f.kind == GeometryKind::Cotangent ? "metric"
                             : f.kind == GeometryKind::Kaehler ? "potential"
                             : f.kind == GeometryKind::Darboux ? "gamma"
                                                               : "";
  for (const auto& d : data_fields) {
    if (j.contains(d) && d != wanted) {
      schema_error(origin, "/" + d, "not allowed for kind '" + std::string(kind_name(f.kind)) + "'");
    }
  }
  if (f.kind == GeometryKind::Cotangent) {
    const json& m = field("metric");
    if (!m.is_array() || m.size() != f.n) schema_error(origin, "/metric", "expected an n x n array");
    f.metric = json::array();
    for (std::size_t i = 0; i < f.n; ++i) {
      if (!m[i].is_array() || m[i].size() != f.n) {
        schema_error(origin, "/metric/" + std::to_string(i), "expected " + std::to_string(f.n) + " entries");
      }
      json row = json::array();
      for (std::size_t c = 0; c < f.n; ++c) {
        row.push_back(as_expression(m[i][c], origin, "/metric/" + std::to_string(i) + "/" + std::to_string(c)));
      }
      f.metric.push_back(row);
    }
  } else if (f.kind == GeometryKind::Kaehler) {
    f.potential = as_expression(field("potential"), origin, "/potential");
  } else if (f.kind == GeometryKind::Darboux) {
    f.gamma = json::object();
    if (j.contains("gamma")) {
      const json& g = j.at("gamma");
      if (!g.is_object()) schema_error(origin, "/gamma", "expected an object");
      for (const auto& [key, value] : g.items()) {
        const std::string where = "/gamma/" + key;
        bool ok = key.size() == 3;
        for (char c : key) ok = ok && c >= '1' && c < static_cast<char>('1' + 2 * f.n);
        if (!ok) schema_error(origin, where, "key must be three indices in 1.." + std::to_string(2 * f.n));
        f.gamma[key] = as_expression(value, origin, where);
      }
    }
  }
  return f;
}

GeometryFile GeometryFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

nlohmann::json GeometryFile::to_json() const {
  json j;
  j["kind"] = std::string(kind_name(kind));
  j["n"] = n;
  j["order"] = order;
  j["base_point"] = base_point;
  if (kind == GeometryKind::Cotangent) j["metric"] = metric;
  if (kind == GeometryKind::Kaehler) j["potential"] = potential;
  if (kind == GeometryKind::Darboux) j["gamma"] = gamma;
  return j;
}

std::string GeometryFile::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedGeometry build_geometry(const GeometryFile& f) {
  LoadedGeometry out;
  try {
    switch (f.kind) {
      case GeometryKind::Flat:
        out.geometry = build_flat(f.n, f.order, base_values(f, 2 * f.n, true));
        break;
      case GeometryKind::Darboux:
        out.geometry = build_darboux_file(f);
        break;
      case GeometryKind::Cotangent:
        out.geometry = build_cotangent_file(f);
        break;
      case GeometryKind::Kaehler:
        out.geometry = build_kaehler_file(f);
        break;
    }
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(std::string("geometry construction failed: ") + e.what());
  }
  out.validation = validate_connection(*out.geometry);
  return out;
}

GeometryPtr build_valid_geometry(const GeometryFile& f) {
  LoadedGeometry g = build_geometry(f);
  if (!g.validation.ok()) throw InputError("geometry failed validation:\n" + g.validation.str());
  return g.geometry;
}

Jet parse_observable(const std::string& source, const ChartGeometry& geom, int order) {
  std::string compact;
  for (char c : source) {
    if (c != ' ' && c != '\t') compact += c;
  }
  if (compact == "g(p,p)") {
    if (geom.kind != GeometryKind::Cotangent && geom.kind != GeometryKind::Flat) {
      throw InputError("g(p,p) needs a cotangent or flat geometry");
    }
    return kinetic_observable(geom).truncated(order);
  }
  return elaborate_at(source, geom.chart, order, "expression '" + source + "'");
}

}  // namespace fedosov::cli
