"""Experiment configs: JSON in, validated against the bundled schema, resolved to objects."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import jsonschema
import numpy as np

from .corpus import random_sparse_symbol
from .integral_examples import CauchySpec, DiskMeasure, matrix_of_A, matrix_of_B, moment_symbol
from .operator_core import TruncatedOperator, build_mu_nu_hankel
from .ordered_group import (
    ConeWindow,
    GroupDescriptor,
    cyclic_power,
    dyadic_window,
    first_positive,
    integer_window,
    lex_window,
)
from .symbols import (
    Semicharacter,
    SparseSymbol,
    SymbolFunction,
    cyclic_supported,
    dyadic_power,
    generator_powers,
    geometric,
    trivial,
)


class ConfigError(Exception):
    """Invalid experiment config; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path
        self.message = message


def load_schema() -> dict:
    text = resources.files("muhankel").joinpath("config_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _path(parts: Iterable) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def make_group(spec: dict) -> GroupDescriptor:
    kind = spec["kind"]
    return GroupDescriptor(kind, spec.get("dim", 2 if kind == "lex" else 1))


def make_window(g: GroupDescriptor, spec: dict, path: str) -> ConeWindow:
    if g.kind == "integer" and "n_max" in spec:
        return integer_window(spec["n_max"])
    if g.kind == "lex" and "box" in spec:
        if len(spec["box"]) != g.dim:
            raise ConfigError(path + ".box", f"expected {g.dim} ranges, got {len(spec['box'])}")
        return lex_window([tuple(r) for r in spec["box"]])
    if g.kind == "dyadic" and "max_exponent" in spec:
        return dyadic_window(spec["max_exponent"], spec["max_value"])
    raise ConfigError(path, f"window bounds do not match the {g.kind} group")


@dataclass
class Experiment:
    group: GroupDescriptor
    window: ConeWindow
    seed: int
    checks: List[dict]
    semicharacters: Dict[str, Semicharacter] = field(default_factory=dict)
    measures: Dict[str, DiskMeasure] = field(default_factory=dict)
    symbol_specs: Dict[str, dict] = field(default_factory=dict)
    operator_specs: Dict[str, dict] = field(default_factory=dict)
    _fixed_symbols: Dict[str, SymbolFunction] = field(default_factory=dict)
    source: Optional[str] = None
    offset: int = 0
    prefix: str = ""

    def check_id(self, i: int) -> str:
        chk = self.checks[i]
        return chk.get("id", f"{self.offset + i:02d}_{chk['op']}")

    def element(self, v, path: str = ""):
        try:
            return self.group.parse(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(path, str(exc)) from None

    def window_for(self, check: dict, path: str = "") -> ConeWindow:
        if "window" in check:
            return make_window(self.group, check["window"], path + ".window")
        return self.window

    def symbol(self, name: str, w: Optional[ConeWindow] = None) -> SymbolFunction:
        if name in self._fixed_symbols:
            return self._fixed_symbols[name]
        spec = self.symbol_specs[name]
        w = w or self.window
        # cyclic_power: a(nχ₁) = scale·baseⁿ, materialized over the window sumset
        base, scale = as_complex(spec["base"]), as_complex(spec.get("scale", 1.0))
        entries = {}
        for x in w.sumset():
            n = cyclic_power(x, self.group)
            if n:
                entries[x] = scale * base ** n
        return SparseSymbol(self.group, entries)

    def cauchy_spec(self, name: str) -> CauchySpec:
        spec = self.operator_specs[name]
        if spec["kind"] not in ("cauchy_A", "cauchy_B"):
            raise ConfigError(f"operators.{name}", "not a Cauchy-transform operator")
        return CauchySpec(spec["kind"][-1], as_complex(spec["q"]), self.measures[spec["measure"]])

    def operator(self, name: str, w: Optional[ConeWindow] = None) -> TruncatedOperator:
        spec = self.operator_specs[name]
        w = w or self.window
        if spec["kind"] == "cauchy_A":
            return matrix_of_A(self.cauchy_spec(name), w)
        if spec["kind"] == "cauchy_B":
            return matrix_of_B(self.cauchy_spec(name), w)
        mu = self.semicharacters[spec["mu"]] if "mu" in spec else None
        nu = self.semicharacters[spec["nu"]] if "nu" in spec else None
        return build_mu_nu_hankel(mu, nu, self.symbol(spec["symbol"], w), w)


def _make_semicharacter(g: GroupDescriptor, spec: dict, path: str) -> Semicharacter:
    form = spec["form"]
    try:
        if form == "trivial":
            return trivial(g)
        if form == "generator_powers":
            if "qs" not in spec:
                raise ConfigError(path, "generator_powers needs 'qs'")
            return generator_powers(g, [as_complex(q) for q in spec["qs"]])
        if "q" not in spec:
            raise ConfigError(path, f"{form} needs 'q'")
        q = as_complex(spec["q"])
        if form == "geometric":
            if g.kind != "integer":
                raise ConfigError(path, "geometric semicharacters live on the integer group")
            return geometric(q)
        if form == "cyclic":
            return cyclic_supported(g, q)
        if g.kind != "dyadic":
            raise ConfigError(path, "dyadic_power semicharacters live on the dyadic group")
        return dyadic_power(q)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


REFERENCE_FIELDS = {
    "mu": "semicharacters",
    "nu": "semicharacters",
    "symbol": "symbols",
    "reject_symbol": "symbols",
    "operator": "operators",
    "measure": "measures",
}


def _check_refs(obj: dict, declared: Dict[str, dict], path: str) -> None:
    for key, section in REFERENCE_FIELDS.items():
        if key in obj and obj[key] not in declared[section]:
            raise ConfigError(f"{path}.{key}", f"undeclared {section[:-1]} {obj[key]!r}")
    for i, name in enumerate(obj.get("measures", []) if isinstance(obj.get("measures"), list) else []):
        if name not in declared["measures"]:
            raise ConfigError(f"{path}.measures[{i}]", f"undeclared measure {name!r}")


def _parse_experiment(raw: dict, pre: str, ops, seen_ids: set, offset: int, source) -> Experiment:
    declared = {s: raw.get(s, {}) for s in ("semicharacters", "symbols", "measures", "operators")}
    for section in ("symbols", "operators"):
        for name, spec in declared[section].items():
            _check_refs(spec, declared, f"{pre}{section}.{name}")
    for i, chk in enumerate(raw["checks"]):
        path = f"{pre}checks[{i}]"
        if ops is not None and chk["op"] not in ops:
            raise ConfigError(path + ".op", f"unknown check {chk['op']!r}")
        _check_refs(chk, declared, path)
        cid = chk.get("id", f"{offset + i:02d}_{chk['op']}")
        if cid in seen_ids:
            raise ConfigError(path + ".id", f"duplicate check id {cid!r}")
        seen_ids.add(cid)

    try:
        g = make_group(raw["group"])
    except ValueError as exc:
        raise ConfigError(pre + "group", str(exc)) from None
    w = make_window(g, raw["window"], pre + "window")
    exp = Experiment(g, w, raw.get("seed", 0), list(raw["checks"]), source=source, offset=offset, prefix=pre)

    for name, spec in declared["semicharacters"].items():
        exp.semicharacters[name] = _make_semicharacter(g, spec, f"{pre}semicharacters.{name}")
    for name, spec in declared["measures"].items():
        try:
            atoms = tuple((complex(a, b), complex(c, d)) for a, b, c, d in spec["atoms"])
            exp.measures[name] = DiskMeasure(atoms, spec.get("domain", "open"))
        except ValueError as exc:
            raise ConfigError(f"{pre}measures.{name}", str(exc)) from None
    for idx, (name, spec) in enumerate(sorted(declared["symbols"].items())):
        path = f"{pre}symbols.{name}"
        kind = spec["kind"]
        exp.symbol_specs[name] = spec
        try:
            if kind == "sparse":
                entries = {}
                for j, (x, v) in enumerate(spec.get("entries", [])):
                    entries[exp.element(x, f"{path}.entries[{j}]")] = as_complex(v)
                exp._fixed_symbols[name] = SparseSymbol(g, entries)
            elif kind == "delta":
                if "at" not in spec:
                    raise ConfigError(path, "delta needs 'at'")
                at = exp.element(spec["at"], path + ".at")
                exp._fixed_symbols[name] = SparseSymbol(g, {at: as_complex(spec.get("value", 1.0))})
            elif kind == "moments":
                if g.kind != "integer":
                    raise ConfigError(path, "moment symbols live on the integer group")
                if "measure" not in spec:
                    raise ConfigError(path, "moments needs 'measure'")
                exp._fixed_symbols[name] = moment_symbol(exp.measures[spec["measure"]])
            elif kind == "random":
                rng = np.random.default_rng([exp.seed, idx])
                exp._fixed_symbols[name] = random_sparse_symbol(
                    w, rng, spec.get("density", 0.3), spec.get("cyclic_only", False))
            else:
                if first_positive(g) is None:
                    raise ConfigError(path, f"{g} has no cyclic cone")
                if "base" not in spec:
                    raise ConfigError(path, "cyclic_power needs 'base'")
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None
    for name, spec in declared["operators"].items():
        path = f"{pre}operators.{name}"
        exp.operator_specs[name] = spec
        if spec["kind"] == "mu_nu_hankel":
            if "symbol" not in spec:
                raise ConfigError(path, "mu_nu_hankel needs 'symbol'")
        else:
            for key in ("q", "measure"):
                if key not in spec:
                    raise ConfigError(path, f"{spec['kind']} needs {key!r}")
            try:
                exp.cauchy_spec(name)
            except ValueError as exc:
                raise ConfigError(path, str(exc)) from None
            if g.kind != "integer":
                raise ConfigError(path, "Cauchy operators need the integer group")
    return exp


def parse_config(raw: Any, known_ops: Optional[Iterable[str]] = None,
                 source: Optional[str] = None) -> List[Experiment]:
    """Validate a decoded config (one experiment or an ``experiments`` list) and resolve it."""
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = jsonschema.exceptions.best_match(errors)
        raise ConfigError(_path(e.absolute_path), e.message)
    ops = set(known_ops) if known_ops is not None else None
    parts = raw["experiments"] if "experiments" in raw else [raw]
    seen: set = set()
    out, offset = [], 0
    for k, part in enumerate(parts):
        pre = f"experiments[{k}]." if "experiments" in raw else ""
        out.append(_parse_experiment(part, pre, ops, seen, offset, source))
        offset += len(part["checks"])
    return out


def load_config(path, known_ops: Optional[Iterable[str]] = None) -> List[Experiment]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("", f"cannot read {p}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(raw, known_ops, str(p))
