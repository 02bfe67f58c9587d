#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "fedosov/cli.hpp"

using namespace fedosov;

namespace {

struct Output {
  std::string json_path;
  bool quiet = false;
};

int emit(const cli::Report& r, const Output& out) {
  if (!out.json_path.empty()) {
    std::ofstream f(out.json_path);
    if (!f) {
      std::cerr << "error: cannot write " << out.json_path << "\n";
      return 2;
    }
    f << r.to_json().dump(2) << "\n";
  }
  if (!out.quiet) std::cout << r.table();
  std::cerr << "time: " << r.seconds << " s\n";
  return cli::exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fedosov star products and quantization on jets"};
  app.require_subcommand(1);
  cli::Options opt;
  for (int i = 1; i < argc; ++i) opt.argv.emplace_back(argv[i]);
  Output out;
  std::optional<int> order, samples;
  std::uint64_t seed = 1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--json", out.json_path, "write the report as JSON to this path");
    sub->add_flag("--quiet", out.quiet, "suppress the table on standard output");
  };

  auto* validate = app.add_subcommand("validate", "check a geometry file");
  validate->add_option("geometry", opt.geometry_path, "geometry JSON file")->required();
  common(validate);

  auto* star = app.add_subcommand("star", "star product coefficients of two functions");
  star->add_option("geometry", opt.geometry_path, "geometry JSON file")->required();
  star->add_option("--f", opt.f, "first function")->required();
  star->add_option("--g", opt.g, "second function")->required();
  star->add_option("--order", order, "highest power of hbar");
  common(star);

  auto* check = app.add_subcommand("check", "run a named check suite");
  check->add_option("suite", opt.suite, "suite name")->required()->check(CLI::IsMember(cli::suite_names()));
  check->add_option("geometry", opt.geometry_path, "optional geometry JSON file");
  check->add_option("--order", order, "highest power of hbar");
  check->add_option("--seed", seed, "random seed");
  check->add_option("--samples", samples, "number of random samples");
  common(check);

  auto* quantize = app.add_subcommand("quantize", "operator of a polarization-preserving observable");
  quantize->add_option("geometry", opt.geometry_path, "geometry JSON file")->required();
  quantize->add_option("--f", opt.f, "observable; g(p,p) is g^{ab} p_a p_b")->required();
  quantize->add_option("--order", order, "highest power of hbar");
  common(quantize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opt.order = order;
  opt.samples = samples;
  opt.seed = seed;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    cli::Report r;
    if (*validate) r = cli::cmd_validate(opt);
    if (*star) r = cli::cmd_star(opt);
    if (*check) r = cli::cmd_check(opt);
    if (*quantize) r = cli::cmd_quantize(opt);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit(r, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
