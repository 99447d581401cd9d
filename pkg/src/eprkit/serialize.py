"""JSON schemas for assemblages, functionals, correlation tables, reports.

Conventions: complex numbers are two-element arrays [re, im]; matrices are
row-major arrays of such pairs; floats use Python's shortest exact repr.
Index keys are comma-joined integers (settings 1-based, outcomes 0-based);
the protocol setting is written ``*``; multi-qubit c/w labels join their
components with ``.``.

Hermiticity and index completeness are enforced on load, so malformed files
fail at parse time rather than inside the numerics.
"""

from __future__ import annotations

import json

import numpy as np

from . import linalg as la
from .assemblages import (
    BwIAssemblage,
    ChannelAssemblage,
    MDIAssemblage,
    StandardAssemblage,
)
from .bounds import BoundReport, DeterministicStrategy
from .functionals import BellCoefficients, EPRFunctional
from .protocol import STAR, CorrelationTable


class SchemaError(ValueError):
    """Raised when a JSON document does not match the expected schema."""


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows, hermitian: bool = True) -> np.ndarray:
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed matrix entry: {exc}") from exc
    if hermitian:
        try:
            return la.hermitian(m)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    return m


def _label(value) -> str:
    if isinstance(value, tuple):
        return ".".join(str(v) for v in value)
    return str(value)


def _parse_label(text: str):
    if "." in text:
        return tuple(int(v) for v in text.split("."))
    return int(text)


def _key_to_str(key) -> str:
    return ",".join(_label(v) for v in key)


def _key_from_str(text: str) -> tuple:
    return tuple(_parse_label(part) for part in text.split(","))


_ASSEMBLAGE_TYPES = {
    "standard": (StandardAssemblage, ("c", "w")),
    "bwi": (BwIAssemblage, ("a", "x", "y")),
    "mdi": (MDIAssemblage, ("a", "b", "x")),
    "channel": (ChannelAssemblage, ("a", "x")),
}


def assemblage_to_json(assemblage) -> dict:
    cls, names = _ASSEMBLAGE_TYPES[assemblage.scenario]
    if assemblage.scenario == "standard":
        alphabets = {"c": assemblage.n_outcomes, "w": assemblage.n_settings}
    else:
        alphabets = {name: getattr(assemblage, f"n_{name}") for name in names}
    return {
        "scenario": assemblage.scenario,
        "alphabets": alphabets,
        "elements": {
            _key_to_str(key): matrix_to_json(m) for key, m in sorted(assemblage.elements.items())
        },
    }


def assemblage_from_json(doc: dict):
    scenario = doc.get("scenario")
    if scenario not in _ASSEMBLAGE_TYPES:
        raise SchemaError(f"unknown scenario {scenario!r}")
    cls, names = _ASSEMBLAGE_TYPES[scenario]
    elements = {
        _key_from_str(key): matrix_from_json(rows)
        for key, rows in doc.get("elements", {}).items()
    }
    alphabets = doc.get("alphabets", {})
    if scenario == "standard":
        return StandardAssemblage(elements, alphabets.get("c", 2), alphabets.get("w", 3))
    kwargs = {f"n_{name}": alphabets[name] for name in names if name in alphabets}
    return cls(elements, **kwargs)


def functional_to_json(f) -> dict:
    if isinstance(f, EPRFunctional):
        return {
            "scenario": f.scenario,
            "form": "epr",
            "operators": {
                _key_to_str(k): matrix_to_json(m) for k, m in sorted(f.operators.items())
            },
            "bounds": dict(f.bounds),
        }
    if isinstance(f, BellCoefficients):
        return {
            "scenario": f.scenario,
            "form": "bell",
            "n": f.n,
            "coefficients": {_key_to_str(k): float(v) for k, v in sorted(f.xi.items())},
        }
    raise TypeError(f"cannot serialise {type(f).__name__}")


def functional_from_json(doc: dict):
    form = doc.get("form")
    if form == "epr":
        operators = {
            _key_from_str(k): matrix_from_json(rows)
            for k, rows in doc.get("operators", {}).items()
        }
        return EPRFunctional(doc["scenario"], operators, dict(doc.get("bounds", {})))
    if form == "bell":
        xi = {_key_from_str(k): float(v) for k, v in doc.get("coefficients", {}).items()}
        return BellCoefficients(doc["scenario"], xi, int(doc.get("n", 1)))
    raise SchemaError(f"unknown functional form {form!r}")


def _slice_key_to_str(scenario: str, key) -> str:
    if scenario == "bwi":
        a, x, y, c, w = key
        return f"{a},0,{_label(c)}|{x},{y},{STAR},{_label(w)}"
    if scenario == "mdi":
        a, b, x, c, z = key
        return f"{a},{b},{c}|{x},{STAR},{z}"
    if scenario == "channel":
        a, x, c, d, w, u = key
        return f"{a},0,{c},{d}|{x},{STAR},{STAR},{w},{u}"
    raise SchemaError(f"unknown scenario {scenario!r}")


def _slice_key_from_str(scenario: str, text: str) -> tuple:
    try:
        outcomes, settings = text.split("|")
        o = outcomes.split(",")
        s = settings.split(",")
        if scenario == "bwi":
            return (int(o[0]), int(s[0]), int(s[1]), _parse_label(o[2]), _parse_label(s[3]))
        if scenario == "mdi":
            return (int(o[0]), int(o[1]), int(s[0]), _parse_label(o[2]), _parse_label(s[2]))
        if scenario == "channel":
            return (int(o[0]), int(s[0]), int(o[2]), int(o[3]), int(s[3]), int(s[4]))
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"malformed slice key {text!r}: {exc}") from exc
    raise SchemaError(f"unknown scenario {scenario!r}")


def table_to_json(table: CorrelationTable) -> dict:
    return {
        "scenario": table.scenario,
        "slice": {
            _slice_key_to_str(table.scenario, key): float(p)
            for key, p in sorted(table.slice.items())
        },
        "selftest": {
            block: {
                ",".join(str(v) for v in key[:2]) + "|" + ",".join(str(v) for v in key[2:]): float(p)
                for key, p in sorted(marginal.items())
            }
            for block, marginal in table.selftest.items()
        },
        "meta": dict(table.meta),
    }


def table_from_json(doc: dict) -> CorrelationTable:
    scenario = doc.get("scenario")
    slc = {
        _slice_key_from_str(scenario, key): float(p)
        for key, p in doc.get("slice", {}).items()
    }
    selftest = {}
    for block, marginal in doc.get("selftest", {}).items():
        parsed = {}
        for key, p in marginal.items():
            try:
                outcomes, settings = key.split("|")
                b, c = (int(v) for v in outcomes.split(","))
                z, w = (int(v) for v in settings.split(","))
            except ValueError as exc:
                raise SchemaError(f"malformed self-test key {key!r}") from exc
            parsed[(b, c, z, w)] = float(p)
        selftest[block] = parsed
    return CorrelationTable(scenario, slc, selftest, dict(doc.get("meta", {})))


def bound_report_to_json(report: BoundReport) -> dict:
    doc = {
        "kind": report.kind,
        "value": float(report.value),
        "guaranteed_tight": report.guaranteed_tight,
        "note": report.note,
        "iterations": report.iterations,
        "restarts": report.restarts,
    }
    w = report.witness
    if isinstance(w, DeterministicStrategy):
        doc["witness"] = {
            "type": "deterministic-strategy",
            "response": {str(x): a for x, a in sorted(w.response.items())},
        }
    elif w is not None:
        witness = {
            "type": "quantum-realisation",
            "state": matrix_to_json(w.state),
            "povms": {
                str(x): [matrix_to_json(m) for m in effects]
                for x, effects in sorted(w.povms.items())
            },
        }
        if w.channels is not None:
            witness["channels"] = {
                str(y): [matrix_to_json(k) for k in kmap.kraus_ops]
                for y, kmap in sorted(w.channels.items())
            }
        doc["witness"] = witness
    return doc


def _json_default(obj):
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"object of type {type(obj).__name__} is not JSON serialisable")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def load_path(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
