#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedosov/cli.hpp"

namespace py = pybind11;
using namespace fedosov;
using namespace fedosov::cli;

namespace {

Options options(const std::string& command, const GeometryFile* geometry) {
  Options o;
  o.argv = {command};
  if (geometry) o.geometry = *geometry;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fedosov star products and quantization on exact jets";
  m.attr("engine_version") = std::string(kEngineVersion);

  static py::exception<Error> base(m, "FedosovError");
  static py::exception<InputError> input(m, "InputError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      PyErr_SetString(input.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  py::class_<GeometryFile>(m, "GeometryFile")
      .def_static("parse", &GeometryFile::parse, py::arg("text"), py::arg("origin") = "<input>")
      .def_static("load", &GeometryFile::load, py::arg("path"))
      .def_property_readonly("kind", [](const GeometryFile& f) { return std::string(kind_name(f.kind)); })
      .def_readonly("n", &GeometryFile::n)
      .def_readonly("order", &GeometryFile::order)
      .def("digest", &GeometryFile::digest)
      .def("to_json", [](const GeometryFile& f) { return f.to_json().dump(); });

  py::class_<Check>(m, "Check")
      .def_readonly("name", &Check::name)
      .def_readonly("passed", &Check::passed)
      .def_readonly("detail", &Check::detail)
      .def("__repr__", [](const Check& c) { return std::string(c.passed ? "PASS " : "FAIL ") + c.name; });

  py::class_<Dump>(m, "Dump")
      .def_readonly("label", &Dump::label)
      .def_readonly("rows", &Dump::rows);

  py::class_<Report>(m, "Report")
      .def_readonly("checks", &Report::checks)
      .def_readonly("dumps", &Report::dumps)
      .def_readonly("notes", &Report::notes)
      .def_readonly("seconds", &Report::seconds)
      .def_property_readonly("passed", &Report::passed)
      .def("table", &Report::table)
      .def("to_json", [](const Report& r, int indent) { return r.to_json().dump(indent); }, py::arg("indent") = -1);

  m.def("suite_names", &suite_names);

  m.def(
      "validate",
      [](const GeometryFile& g) {
        py::gil_scoped_release release;
        return cmd_validate(options("validate", &g));
      },
      py::arg("geometry"));

  m.def(
      "star",
      [](const GeometryFile& g, const std::string& f, const std::string& h, std::optional<int> order) {
        Options o = options("star", &g);
        o.f = f;
        o.g = h;
        o.order = order;
        py::gil_scoped_release release;
        return cmd_star(o);
      },
      py::arg("geometry"), py::arg("f"), py::arg("g"), py::arg("order") = py::none());

  m.def(
      "quantize",
      [](const GeometryFile& g, const std::string& f, std::optional<int> order) {
        Options o = options("quantize", &g);
        o.f = f;
        o.order = order;
        py::gil_scoped_release release;
        return cmd_quantize(o);
      },
      py::arg("geometry"), py::arg("f"), py::arg("order") = py::none());

  m.def(
      "check",
      [](const std::string& suite, const std::optional<GeometryFile>& g, std::optional<int> order, std::uint64_t seed,
         std::optional<int> samples) {
        Options o = options("check", g ? &*g : nullptr);
        o.suite = suite;
        o.order = order;
        o.seed = seed;
        o.samples = samples;
        py::gil_scoped_release release;
        return cmd_check(o);
      },
      py::arg("suite"), py::arg("geometry") = py::none(), py::arg("order") = py::none(), py::arg("seed") = 1,
      py::arg("samples") = py::none());
}
