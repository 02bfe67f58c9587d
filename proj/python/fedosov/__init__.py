"""Fedosov star products and geometric quantization on exact jets."""

import json
import os

from . import _core
from ._core import Check, Dump, FedosovError, GeometryFile, InputError, Report, suite_names

__all__ = [
    "Check",
    "Dump",
    "FedosovError",
    "GeometryFile",
    "InputError",
    "Report",
    "check",
    "geometry",
    "quantize",
    "report_dict",
    "star",
    "suite_names",
    "validate",
]

__version__ = _core.engine_version.split()[-1]


def geometry(source):
    """A GeometryFile from a path, a JSON string or a dict in the geometry file schema."""
    if isinstance(source, GeometryFile):
        return source
    if isinstance(source, dict):
        return GeometryFile.parse(json.dumps(source), "<dict>")
    if isinstance(source, os.PathLike) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        return GeometryFile.load(os.fspath(source))
    return GeometryFile.parse(source)


def validate(source):
    return _core.validate(geometry(source))


def star(source, f, g, order=None):
    """Star product coefficients of f and g through hbar^order (default 1)."""
    return _core.star(geometry(source), f, g, order)


def quantize(source, f, order=None):
    """Operator representing the observable f."""
    return _core.quantize(geometry(source), f, order)


def check(suite, source=None, order=None, seed=1, samples=None):
    return _core.check(suite, None if source is None else geometry(source), order, seed, samples)


def report_dict(report):
    return json.loads(report.to_json())
