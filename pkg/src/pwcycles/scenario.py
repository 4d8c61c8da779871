"""Scenario documents: JSON descriptions of a piecewise system.

A scenario looks like::

    {
      "name": "one-cycle",
      "inner": [2, 0, 0, -1, 0, 0],
      "outer": ["2", "-1", "2", "-1", "-4", "1"],
      "conic": {"u2inv": 1, "v2inv": 1, "level": 1},
      "solver": {"grid": 720}
    }

Each piece lists ``(e0, e1, e2, f0, f1, f2)`` of
``F = (e0 + e1 x + e2 y, f0 + f1 x + f2 y)``.  Numbers may be JSON numbers
or strings in the small exact grammar handled by :func:`parse_number`,
e.g. ``"-2/3"``, ``"sqrt(5)"`` or ``"1/4 - 3/20*sqrt(15)"``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field as dc_field, fields as dc_fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from .cycles import DEFAULT_CONFIG, SolverConfig
from .errors import ScenarioError
from .fields import AffineField
from .switching import SwitchingConic
from .system import PiecewiseSystem

__all__ = ["Scenario", "parse_number", "load_scenario", "parse_scenario"]

_RATIONAL = r"\d+(?:\.\d*)?(?:/\d+(?:\.\d*)?)?"
_TERM = re.compile(
    rf"""\s*(?P<sign>[+-])?\s*
        (?:
           (?P<coef>{_RATIONAL})\s*(?:\*\s*sqrt\(\s*(?P<rad1>{_RATIONAL})\s*\))?
         | sqrt\(\s*(?P<rad2>{_RATIONAL})\s*\)(?:\s*/\s*(?P<div>\d+))?
        )\s*""",
    re.VERBOSE,
)


def _rational(text: str) -> Fraction:
    num, _, den = text.partition("/")
    value = Fraction(num)
    if den:
        d = Fraction(den)
        if d == 0:
            raise ZeroDivisionError(text)
        value /= d
    return value


def parse_number(value: Any) -> float:
    """A JSON number, or a string ``q0 +- q1*sqrt(r1) +- ...`` with rational ``q``, ``r``.

    Terms are a rational, ``q*sqrt(r)``, ``sqrt(r)`` or ``sqrt(r)/n``.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, (int, float)):
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite number {value!r}")
        return out
    if not isinstance(value, str):
        raise ValueError(f"expected a number or expression string, got {type(value).__name__}")
    text = value.strip()
    if not text:
        raise ValueError("empty expression")
    pos, total, first = 0, 0.0, True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (not first and not m.group("sign")):
            raise ValueError(f"cannot parse {value!r} at offset {pos}")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        try:
            if m.group("coef") is not None:
                term = float(_rational(m.group("coef")))
                if m.group("rad1") is not None:
                    term *= _sqrt(_rational(m.group("rad1")), value)
            else:
                term = _sqrt(_rational(m.group("rad2")), value)
                if m.group("div"):
                    term /= int(m.group("div"))
        except ZeroDivisionError:
            raise ValueError(f"division by zero in {value!r}") from None
        total += sign * term
        pos, first = m.end(), False
    return total


def _sqrt(q: Fraction, original) -> float:
    if q < 0:
        raise ValueError(f"square root of a negative number in {original!r}")
    return math.sqrt(q.numerator) / math.sqrt(q.denominator)


@dataclass(frozen=True)
class Scenario:
    name: str
    system: PiecewiseSystem
    solver: SolverConfig = DEFAULT_CONFIG
    expected: Dict[str, Any] = dc_field(default_factory=dict)
    source: Optional[str] = None


_SOLVER_KEYS = {f.name: f.type for f in dc_fields(SolverConfig)}


def _line_of(text: str, needle: str) -> Optional[int]:
    idx = text.find(needle)
    return None if idx < 0 else text.count("\n", 0, idx) + 1


def parse_scenario(text: str, source: Optional[str] = None) -> Scenario:
    """Parse and validate a scenario document.

    Raises
    ------
    ScenarioError
        On malformed JSON, missing keys, wrong coefficient counts, bad
        expressions, a zero field or an invalid conic; the 1-based line
        number is attached when it can be located.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object", 1)

    def fail(msg, key):
        raise ScenarioError(msg, _line_of(text, f'"{key}"'))

    name = doc.get("name", source or "scenario")
    if not isinstance(name, str):
        fail("name must be a string", "name")

    pieces = {}
    for key in ("inner", "outer"):
        if key not in doc:
            raise ScenarioError(f"missing key {key!r}")
        raw = doc[key]
        if not isinstance(raw, list) or len(raw) != 6:
            fail(f"{key} needs exactly 6 coefficients", key)
        try:
            coeffs = [parse_number(v) for v in raw]
        except ValueError as exc:
            fail(f"{key}: {exc}", key)
        f = AffineField(*coeffs)
        if f.is_zero():
            fail(f"{key} field is identically zero", key)
        pieces[key] = f

    conic_doc = doc.get("conic", {})
    if not isinstance(conic_doc, dict):
        fail("conic must be an object", "conic")
    try:
        conic = SwitchingConic(
            parse_number(conic_doc.get("u2inv", 1)),
            parse_number(conic_doc.get("v2inv", 1)),
            parse_number(conic_doc.get("level", 1)),
        )
    except ValueError as exc:
        fail(f"conic: {exc}", "conic")

    solver = DEFAULT_CONFIG
    overrides = doc.get("solver", {})
    if not isinstance(overrides, dict):
        fail("solver must be an object", "solver")
    for key, value in overrides.items():
        if key not in _SOLVER_KEYS:
            fail(f"unknown solver option {key!r}", key)
        try:
            value = int(value) if key in ("grid", "max_newton", "diagonal_band") else (
                bool(value) if key in ("enforce_bounds", "validate_orbits") else parse_number(value))
        except (TypeError, ValueError) as exc:
            fail(f"solver option {key}: {exc}", key)
        solver = replace(solver, **{key: value})

    try:
        system = PiecewiseSystem(pieces["inner"], pieces["outer"], conic)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    expected = doc.get("expected", {})
    if not isinstance(expected, dict):
        fail("expected must be an object", "expected")
    return Scenario(name, system, solver, expected, source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ScenarioError(f"{path} is not UTF-8") from None
    return parse_scenario(text, source=str(path))
