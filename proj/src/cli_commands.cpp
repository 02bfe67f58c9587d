#include "fedosov/cli.hpp"
#include "fedosov/quantization.hpp"

namespace fedosov::cli {

namespace {

nlohmann::json geometry_summary(const GeometryFile& f) {
  return {{"kind", std::string(kind_name(f.kind))}, {"n", f.n}, {"order", f.order}, {"digest", f.digest()}};
}

GeometryFile require_file(const Options& opt) {
  if (opt.geometry) return *opt.geometry;
  if (opt.geometry_path.empty()) throw InputError("a geometry file is required");
  return GeometryFile::load(opt.geometry_path);
}

Report start(const Options& opt, const GeometryFile& f) {
  Report r;
  r.command = opt.argv;
  r.geometry = geometry_summary(f);
  return r;
}

FedosovState solve_for(const GeometryPtr& g, int N) {
  try {
    return solve_r(g, N);
  } catch (const OrderError& e) {
    throw InputError(std::string("insufficient order in geometry file: ") + e.what());
  }
}

/// Highest total degree in the second coordinate block.
int momentum_degree(const Jet& f, const ChartGeometry& g) {
  int out = 0;
  for (const auto& [m, c] : f.terms()) {
    int d = 0;
    for (std::size_t v : g.second_block()) d += static_cast<int>(m[v]);
    out = std::max(out, d);
  }
  return out;
}

}  // namespace

Report cmd_validate(const Options& opt) {
  const GeometryFile f = require_file(opt);
  Report r = start(opt, f);
  LoadedGeometry g = build_geometry(f);
  for (const auto& e : g.validation.entries) {
    if (e.informational) {
      r.notes.push_back(e.name + (e.detail.empty() ? "" : ": " + e.detail));
    } else {
      r.add(e.name, e.passed, e.detail);
    }
  }
  return r;
}

Report cmd_star(const Options& opt) {
  const GeometryFile f = require_file(opt);
  if (opt.f.empty() || opt.g.empty()) throw InputError("star needs --f and --g");
  Report r = start(opt, f);
  const GeometryPtr geom = build_valid_geometry(f);
  const int N = opt.order.value_or(1);
  if (N < 0) throw InputError("--order must be non-negative");
  const FedosovState s = solve_for(geom, N);
  const Jet fj = parse_observable(opt.f, *geom, geom->order), gj = parse_observable(opt.g, *geom, geom->order);
  r.dumps = dump_star(star(fj, gj, s));
  return r;
}

Report cmd_check(const Options& opt) {
  SuiteConfig c;
  c.order = opt.order;
  c.seed = opt.seed;
  c.samples = opt.samples;
  if (opt.geometry) {
    c.geometry = opt.geometry;
  } else if (!opt.geometry_path.empty()) {
    c.geometry = GeometryFile::load(opt.geometry_path);
  }
  Report r = run_suite(opt.suite, c);
  r.command = opt.argv;
  if (c.geometry) r.geometry = geometry_summary(*c.geometry);
  return r;
}

Report cmd_quantize(const Options& opt) {
  const GeometryFile f = require_file(opt);
  if (opt.f.empty()) throw InputError("quantize needs --f");
  Report r = start(opt, f);
  const GeometryPtr geom = build_valid_geometry(f);
  const Jet fj = parse_observable(opt.f, *geom, geom->order);
  if (geom->kind == GeometryKind::Kaehler) {
    try {
      r.dumps = dump_diffop(gq_kaehler(fj, *geom));
      r.add("f is affine in dK with holomorphic coefficients", true);
    } catch (const StructureError& e) {
      r.add("f is affine in dK with holomorphic coefficients", false, e.what());
    }
    return r;
  }
  if (geom->kind != GeometryKind::Cotangent && geom->kind != GeometryKind::Flat) {
    throw InputError("quantize needs a cotangent, flat or kaehler geometry");
  }
  const int degree = momentum_degree(fj, *geom);
  const int N = opt.order.value_or(degree);
  if (N < degree) throw InputError("--order must be at least the momentum degree " + std::to_string(degree));
  const FedosovState s = solve_for(geom, N);
  RhoResult rho;
  try {
    rho = rho_extend_checked(fj, s, false);
  } catch (const StructureError& e) {
    r.add("rho_extend", false, e.what());
    return r;
  }
  r.add("rho_extend independent of factorization", rho.consistent, rho.detail);
  r.dumps = dump_diffop(rho.op);
  if (geom->kind == GeometryKind::Cotangent && agree(fj, kinetic_observable(*geom).truncated(fj.valid_order()))) {
    const ChartPtr config = configuration_chart(*geom);
    const Jet R = scalar_curvature(geom->metric);
    DiffOp want = laplace_beltrami(geom->metric).shift_hbar(2) * Complex(-1) +
                  DiffOp::multiplication(R * Complex(Rational(1, 4))).shift_hbar(2);
    r.add("rho(g^ab p_a p_b) = -hbar^2 (Delta - R/4)", agree(rho.op, want));
    r.notes.push_back("scalar curvature R: " + R.str());
  }
  return r;
}

}  // namespace fedosov::cli
