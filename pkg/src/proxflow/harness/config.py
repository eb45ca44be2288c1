"""Scenario files: sectioned ``key = value`` text read with :mod:`configparser`.

Grammar
-------
Sections::

    [experiment]   kind, seed, output, plus kind-specific knobs (eps, pairs, ...)
    [domain]       kind and its numeric parameters, optional eta_override
    [potential.W]  kind and factory parameters (default: zero)
    [potential.V]  same as above
    [initial]      recipe and its parameters (see ``discretize_initial``)
    [initial.2]    second initial datum for two-trajectory experiments
    [scheme]       scheme, dt, t_end, record_every
    [check]        thresholds and slack factors for every asserted envelope

Values are parsed as follows. ``true``/``false`` become booleans. Plain
numbers and arithmetic over numbers and ``pi`` become floats (or ints).
Comma- or space-separated lists become vectors, and ``;`` separates the rows
of a matrix. Anything else stays a string. ``#`` and ``;`` at line start are
comments.
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from ..dynamics import SCHEMES, SchemeConfig
from ..errors import ConfigError, UnknownPotential
from ..geometry import Domain, make_domain
from ..potentials import Potential, builtin_potential

KINDS = ("simulate", "stability", "aggregate", "sharpness", "instability", "evi_check")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}


def _eval_number(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_number(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_number(node.left), _eval_number(node.right))
    raise ValueError("not a number")


def _scalar(token: str):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    return _eval_number(ast.parse(token, mode="eval").body)


def _row(text: str):
    parts = [p for p in text.replace(",", " ").split() if p]
    return [float(_scalar(p)) for p in parts]


def parse_value(text: str):
    """Turn a raw config value into a bool, number, vector, matrix or string."""
    s = text.strip()
    low = s.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        if ";" in s:
            return [_row(r) for r in s.split(";") if r.strip()]
        if "," in s or (" " in s and not any(op in s for op in "+*/")):
            return _row(s)
        return _scalar(s)
    except (ValueError, SyntaxError, ZeroDivisionError):
        return s


def _section(cp: configparser.ConfigParser, name: str) -> dict:
    if not cp.has_section(name):
        return {}
    return {k: parse_value(v) for k, v in cp.items(name)}


@dataclass
class ScenarioConfig:
    """Validated scenario with ready-to-use domain and potentials."""

    kind: str
    seed: int
    output: str
    experiment: dict
    domain_spec: dict
    W_spec: dict
    V_spec: dict
    initial: dict
    initial2: dict | None
    scheme: SchemeConfig
    check: dict
    domain: Domain | None = field(default=None, repr=False)
    W: Potential | None = field(default=None, repr=False)
    V: Potential | None = field(default=None, repr=False)
    source: str | None = None

    def threshold(self, key: str, default):
        return self.check.get(key, default)


def _build_potential(spec: dict, where: str, problems):
    spec = dict(spec) or {"kind": "zero"}
    kind = spec.pop("kind", None)
    if kind is None:
        problems.append((f"{where}.kind", "missing"))
        return None
    try:
        return builtin_potential(str(kind), spec)
    except UnknownPotential:
        problems.append((f"{where}.kind", f"unknown potential {kind!r}"))
    except TypeError as exc:
        problems.append((where, f"bad parameters for {kind!r}: {exc}"))
    return None


def build_config(raw: dict, seed_override: int | None = None, source: str | None = None) -> ScenarioConfig:
    """Validate parsed sections and build the scenario; raises ``ConfigError``."""
    problems: list[tuple[str, str]] = []
    exp = dict(raw.get("experiment", {}))
    kind = exp.pop("kind", None)
    if kind is None:
        problems.append(("experiment.kind", "missing"))
    elif kind not in KINDS:
        problems.append(("experiment.kind", f"unknown experiment {kind!r}; expected one of {', '.join(KINDS)}"))
    seed = exp.pop("seed", 0) if seed_override is None else seed_override
    if not isinstance(seed, int) or isinstance(seed, bool):
        problems.append(("experiment.seed", f"must be an integer, got {seed!r}"))
        seed = 0
    output = str(exp.pop("output", kind or "run"))

    domain_spec = dict(raw.get("domain", {}))
    domain = None
    if kind == "sharpness" and not domain_spec:
        eps = exp.get("eps")
        if not isinstance(eps, (int, float)) or not 0 < eps < 0.5:
            problems.append(("experiment.eps", "sharpness needs 0 < eps < 0.5"))
    elif "kind" not in domain_spec:
        problems.append(("domain.kind", "missing"))
    else:
        params = {k: v for k, v in domain_spec.items() if k != "kind"}
        try:
            domain = make_domain(str(domain_spec["kind"]), params)
        except KeyError as exc:
            problems.append((f"domain.{exc.args[0]}", "required parameter missing"))
        except (ValueError, TypeError) as exc:
            problems.append(("domain", str(exc)))

    W = _build_potential(raw.get("potential.W", {}), "potential.W", problems)
    V = _build_potential(raw.get("potential.V", {}), "potential.V", problems)

    sch = dict(raw.get("scheme", {}))
    scheme = None
    if sch.get("scheme", "catching_up") not in SCHEMES:
        problems.append(("scheme.scheme", f"unknown scheme {sch.get('scheme')!r}"))
    else:
        try:
            scheme = SchemeConfig(
                scheme=sch.get("scheme", "catching_up"),
                dt=float(sch.get("dt", 1e-3)),
                t_end=float(sch.get("t_end", 1.0)),
                record_every=int(sch.get("record_every", 1)),
            )
        except (ValueError, TypeError) as exc:
            problems.append(("scheme", str(exc)))

    initial = dict(raw.get("initial", {}))
    initial2 = dict(raw["initial.2"]) if raw.get("initial.2") else None
    if kind not in ("sharpness", None) and not initial:
        problems.append(("initial", "missing initial-measure block"))
    if kind in ("stability", "instability") and initial2 is None:
        problems.append(("initial.2", f"{kind} compares two trajectories and needs a second initial block"))

    check = dict(raw.get("check", {}))
    for key, val in check.items():
        if not isinstance(val, (int, float)):  # bools count as switches
            problems.append((f"check.{key}", f"threshold must be numeric, got {val!r}"))

    if kind == "aggregate" and W is not None and V is not None:
        if not V.is_zero:
            problems.append(("potential.V", "aggregate requires V = 0"))
        if not W.lam > 0:
            problems.append(("potential.W", f"aggregate requires lambda_W > 0, got {W.lam}"))

    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(kind, seed, output, exp, domain_spec, dict(raw.get("potential.W", {})),
                          dict(raw.get("potential.V", {})), initial, initial2, scheme, check,
                          domain, W, V, source)


def parse_text(text: str) -> dict:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str  # keep parameter names such as R case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([("file", str(exc))]) from None
    unknown = [s for s in cp.sections() if s not in
               ("experiment", "domain", "potential.W", "potential.V", "initial", "initial.2", "scheme", "check")]
    if unknown:
        raise ConfigError([(s, "unknown section") for s in unknown])
    return {s: _section(cp, s) for s in cp.sections()}


def load_config(path, seed_override: int | None = None) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([("file", f"{path} does not exist")])
    return build_config(parse_text(path.read_text(encoding="utf-8")), seed_override, str(path))
