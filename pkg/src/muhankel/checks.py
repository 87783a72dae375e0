"""Named checks runnable from a config.

Each check takes the resolved :class:`Experiment`, its own config entry and a
:class:`RunContext`, and returns a :class:`CheckResult` whose ``report`` is a
JSON-ready dict with a boolean ``pass``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import ConfigError, Experiment, as_complex
from .corpus import (
    hankel_equation_corpus,
    oracle_measures,
    random_operator,
    random_semicharacter,
    random_sparse_symbol,
    shift_elements,
    smallest_shift,
    standard_windows,
)
from .integral_examples import (
    CauchySpec,
    adjoint_decomposition,
    matrix_of_A,
    norm_bound_A,
    norm_bound_B,
    oracle_fourier_sampling,
    trace_JA,
    trace_JB,
    unimodular_route_error,
    widom_diagnostic,
)
from .operator_core import (
    MINUS,
    PLUS,
    TruncatedOperator,
    WindowVector,
    adjoint,
    basis_vector,
    build_mu_nu_hankel,
    nuclear_norm,
    rank_one,
    shift_matrix,
    spectral_norm,
)
from .ordered_group import ConeWindow, first_positive, integer_window
from .theorems import (
    SupportError,
    check_boundedness_bound,
    check_duality,
    check_generalized_hankel_equation,
    check_nu_bound,
    check_nu_equation,
    factor_unimodular,
    large_mu_bound,
    off_cyclic_columns,
    off_cyclic_rows,
    reconstruct_large_mu,
    reconstruct_small_mu,
    small_mu_bound,
    small_mu_direct,
    solve_neumann_backward,
    solve_neumann_forward,
)
from .symbols import delta


@dataclass
class RunContext:
    tol_scale: float = 1.0
    seed: int = 0
    index: int = 0

    def tol(self, chk: dict, default: float) -> float:
        return chk.get("tol", default) * self.tol_scale

    def rng(self, chk: dict) -> np.random.Generator:
        return np.random.default_rng([chk.get("seed", self.seed), self.index])


@dataclass
class CheckResult:
    report: dict
    table: Optional[Tuple[List[str], List[list]]] = None
    headline: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.report["pass"])


def jsonable(x):
    """Complex numbers as [re, im], non-finite floats as strings, numpy scalars unwrapped."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _maxabs(m) -> float:
    return float(np.max(np.abs(m), initial=0.0))


def _chis(exp: Experiment, chk: dict, w: ConeWindow, path: str):
    if "chis" in chk:
        return [exp.element(c, f"{path}.chis[{i}]") for i, c in enumerate(chk["chis"])]
    return shift_elements(w)


def _require(chk: dict, path: str, *keys):
    for k in keys:
        if k not in chk:
            raise ConfigError(path, f"{chk['op']} needs {k!r}")


# ---------------------------------------------------------------- norms, bounds


def run_spectral_norm(exp, chk, ctx, path):
    _require(chk, path, "operator")
    w = exp.window_for(chk, path)
    A = exp.operator(chk["operator"], w)
    norm = spectral_norm(A)
    report = {"operation": "spectral_norm", "params": {"operator": chk["operator"], "shape": list(A.shape)},
              "norm": norm}
    ok = True
    if "expected" in chk:
        tol = ctx.tol(chk, 1e-6)
        expected = as_complex(chk["expected"]).real
        err = abs(norm - expected)
        report.update(expected=expected, abs_error=err, tolerance=tol)
        ok = err <= tol
    if exp.operator_specs[chk["operator"]]["kind"] in ("cauchy_A", "cauchy_B"):
        spec = exp.cauchy_spec(chk["operator"])
        bound = norm_bound_A(spec) if spec.kind == "A" else norm_bound_B(spec)
        report["bound"] = bound
        ok = ok and norm <= bound + 1e-10
        if math.isinf(bound):
            report["note"] = "unbounded symbol"
    report["pass"] = ok
    return CheckResult(report, headline={"norm": norm})


def _bound_result(chk_obj, chk, ctx):
    d = chk_obj.to_dict()
    ok = chk_obj.passed
    if "expected_bound" in chk:
        berr = abs(chk_obj.bound - chk["expected_bound"])
        d["expected_bound"] = chk["expected_bound"]
        d["bound_error"] = berr
        ok = ok and berr <= ctx.tol(chk, 1e-12)
    if "expected" in chk:
        nerr = abs(chk_obj.norm - as_complex(chk["expected"]))
        d["expected_norm"] = as_complex(chk["expected"]).real
        d["norm_error"] = nerr
        ok = ok and nerr <= ctx.tol(chk, 1e-6)
    d["pass"] = ok
    return CheckResult(d, headline={"norm": chk_obj.norm, "bound": chk_obj.bound})


def run_boundedness_bound(exp, chk, ctx, path):
    _require(chk, path, "mu", "symbol")
    w = exp.window_for(chk, path)
    res = check_boundedness_bound(exp.semicharacters[chk["mu"]], exp.symbol(chk["symbol"], w), w, 1e-10)
    return _bound_result(res, chk, ctx)


def run_nu_bound(exp, chk, ctx, path):
    _require(chk, path, "nu", "symbol")
    w = exp.window_for(chk, path)
    try:
        res = check_nu_bound(exp.semicharacters[chk["nu"]], exp.symbol(chk["symbol"], w), w, 1e-10)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return _bound_result(res, chk, ctx)


def run_boundedness_random(exp, chk, ctx, path):
    """Random finitely supported (μ, a) on each standard group."""
    count = chk.get("count", 100)
    rng = ctx.rng(chk)
    tol = ctx.tol(chk, 1e-10)
    rows, worst = [], -math.inf
    failures = 0
    for name, w in standard_windows().items():
        for i in range(count):
            mu = random_semicharacter(w, rng)
            a = random_sparse_symbol(w, rng)
            r = check_boundedness_bound(mu, a, w, tol)
            gap = r.norm - r.bound
            worst = max(worst, gap)
            failures += not r.passed
            rows.append([name, i, r.norm, r.bound, gap])
    report = {"operation": "boundedness_random", "params": {"count_per_group": count},
              "cases": len(rows), "failures": failures, "max_norm_minus_bound": worst,
              "tolerance": tol, "pass": failures == 0}
    return CheckResult(report, (["group", "case", "norm", "bound", "gap"], rows),
                       {"cases": len(rows), "failures": failures})


# ---------------------------------------------------------------- traces


def _trace_check(exp, chk, ctx, path, kind):
    _require(chk, path, "operator")
    spec = exp.cauchy_spec(chk["operator"])
    if spec.kind != kind:
        raise ConfigError(path + ".operator", f"trace_J{kind} needs a cauchy_{kind} operator")
    w = exp.window_for(chk, path)
    fn = trace_JA if kind == "A" else trace_JB
    try:
        t = fn(spec, w)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    tol = ctx.tol(chk, 1e-10 if kind == "A" else 1e-12)
    vals = {"series": t.series, "closed_form": t.closed_form, "matrix": t.matrix}
    names = list(vals)
    pair = max(abs(vals[a] - vals[b]) for i, a in enumerate(names) for b in names[i + 1:])
    ok = pair <= tol
    report = {"operation": f"trace_J{kind}", "params": {"operator": chk["operator"], "window": len(w) - 1},
              **vals, "max_pairwise_difference": pair, "tolerance": tol}
    if "expected" in chk:
        e = as_complex(chk["expected"])
        err = max(abs(v - e) for v in vals.values())
        report.update(expected=e, max_abs_error=err)
        ok = ok and err <= tol
    report["pass"] = ok
    return CheckResult(report, headline={"trace": t.closed_form})


def run_trace_JA(exp, chk, ctx, path):
    return _trace_check(exp, chk, ctx, path, "A")


def run_trace_JB(exp, chk, ctx, path):
    return _trace_check(exp, chk, ctx, path, "B")


# ---------------------------------------------------------------- operator equations


def _equation_reports(reports, op, extra=None):
    worst = max((r.max_abs_residual for r in reports), default=0.0)
    ok = all(r.passed for r in reports)
    report = {"operation": op, "params": extra or {}, "max_abs_residual": worst,
              "num_entries_checked": sum(r.num_entries_checked for r in reports),
              "min_interior_fraction": min((r.interior_fraction for r in reports), default=1.0),
              "per_shift": [r.to_dict() for r in reports], "pass": ok}
    return report


def run_generalized_hankel_equation(exp, chk, ctx, path):
    _require(chk, path, "mu", "symbol")
    w = exp.window_for(chk, path)
    mu = exp.semicharacters[chk["mu"]]
    A = build_mu_nu_hankel(mu, None, exp.symbol(chk["symbol"], w), w)
    tol = ctx.tol(chk, 1e-12)
    reps = [check_generalized_hankel_equation(A, mu, chi, w, tol) for chi in _chis(exp, chk, w, path)]
    report = _equation_reports(reps, "generalized_hankel_equation", {"mu": chk["mu"], "symbol": chk["symbol"]})
    return CheckResult(report, headline={"max_abs_residual": report["max_abs_residual"]})


def run_hankel_equation_corpus(exp, chk, ctx, path):
    """Every corpus case satisfies the equation; seeded random matrices all fail it."""
    tol = ctx.tol(chk, 1e-12)
    fail_tol = 1e-6 * ctx.tol_scale
    rows, worst = [], 0.0
    cases = hankel_equation_corpus(chk.get("seed", 20240101))
    n_ok = 0
    for c in cases:
        A = build_mu_nu_hankel(c.mu, None, c.a, c.window)
        reps = [check_generalized_hankel_equation(A, c.mu, chi, c.window, tol) for chi in shift_elements(c.window)]
        r = max(x.max_abs_residual for x in reps)
        ok = all(x.passed for x in reps)
        n_ok += ok
        worst = max(worst, r)
        rows.append([c.name, str(c.window.group), r, ok])
    rng = ctx.rng(chk)
    wins = list(standard_windows().values())
    random_count = chk.get("random_count", 100)
    min_random, random_passes = math.inf, 0
    for i in range(random_count):
        w = wins[i % len(wins)]
        rep = check_generalized_hankel_equation(random_operator(w, rng), random_semicharacter(w, rng),
                                                smallest_shift(w), w, fail_tol)
        min_random = min(min_random, rep.max_abs_residual)
        random_passes += rep.passed
        rows.append([f"random {i}", str(w.group), rep.max_abs_residual, rep.passed])
    report = {"operation": "hankel_equation_corpus",
              "params": {"groups": sorted({str(c.window.group) for c in cases})},
              "corpus_cases": len(cases), "corpus_passed": n_ok, "max_abs_residual": worst, "tolerance": tol,
              "random_matrices": random_count, "random_passed": random_passes,
              "min_random_residual": min_random, "random_tolerance": fail_tol,
              "pass": n_ok == len(cases) and random_passes == 0}
    return CheckResult(report, (["case", "group", "max_abs_residual", "pass"], rows),
                       {"max_abs_residual": worst, "random_passed": random_passes})


def run_nu_equation(exp, chk, ctx, path):
    _require(chk, path, "nu", "symbol")
    w = exp.window_for(chk, path)
    nu = exp.semicharacters[chk["nu"]]
    B = build_mu_nu_hankel(None, nu, exp.symbol(chk["symbol"], w), w)
    tol = ctx.tol(chk, 1e-12)
    reps = [check_nu_equation(B, nu, chi, w, tol) for chi in _chis(exp, chk, w, path)]
    report = _equation_reports(reps, "nu_equation", {"nu": chk["nu"], "symbol": chk["symbol"]})
    rng = ctx.rng(chk)
    n_rand = chk.get("random_count", 0)
    if n_rand:
        chi = smallest_shift(w)
        passes = sum(check_nu_equation(random_operator(w, rng), nu, chi, w, 1e-6).passed for _ in range(n_rand))
        report.update(random_matrices=n_rand, random_passed=passes)
        report["pass"] = report["pass"] and passes == 0
    return CheckResult(report, headline={"max_abs_residual": report["max_abs_residual"]})


def run_duality(exp, chk, ctx, path):
    _require(chk, path, "mu", "nu", "symbol")
    w = exp.window_for(chk, path)
    try:
        r = check_duality(exp.semicharacters[chk["mu"]], exp.semicharacters[chk["nu"]],
                          exp.symbol(chk["symbol"], w), w, ctx.tol(chk, 1e-12))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return CheckResult(r.to_dict(), headline={"max_abs_residual": r.max_abs_residual})


# ---------------------------------------------------------------- unimodular


def run_factor_unimodular(exp, chk, ctx, path):
    _require(chk, path, "mu", "symbol")
    w = exp.window_for(chk, path)
    try:
        f = factor_unimodular(exp.semicharacters[chk["mu"]], exp.symbol(chk["symbol"], w), w)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    tol = ctx.tol(chk, 1e-12)
    utol = 1e-14 * ctx.tol_scale
    report = {"operation": "factor_unimodular", "params": {"mu": chk["mu"], "symbol": chk["symbol"]},
              "reconstruction_error": f.reconstruction_error, "unitarity_error": f.unitarity_error,
              "tolerance": tol, "unitarity_tolerance": utol,
              "pass": f.reconstruction_error <= tol and f.unitarity_error <= utol}
    return CheckResult(report, headline={"max_abs_residual": f.reconstruction_error})


def run_unimodular_cauchy(exp, chk, ctx, path):
    _require(chk, path, "operator")
    w = exp.window_for(chk, path)
    try:
        err = unimodular_route_error(exp.cauchy_spec(chk["operator"]), w)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    tol = ctx.tol(chk, 1e-12)
    report = {"operation": "unimodular_cauchy", "params": {"operator": chk["operator"]},
              "max_abs_residual": err, "tolerance": tol, "pass": err <= tol}
    return CheckResult(report, headline={"max_abs_residual": err})


# ---------------------------------------------------------------- structure series


def run_reconstruct_small_mu(exp, chk, ctx, path):
    _require(chk, path, "q", "symbol")
    w = exp.window_for(chk, path)
    q = as_complex(chk["q"])
    a = exp.symbol(chk["symbol"], w)
    try:
        S = reconstruct_small_mu(q, a, w)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    D = small_mu_direct(q, a, w)
    tol = ctx.tol(chk, 1e-10)
    err = _maxabs(S.matrix - D.matrix)
    off = _maxabs(off_cyclic_columns(S))
    sn, nn, bound = spectral_norm(S), nuclear_norm(S), small_mu_bound(q, a)
    ok = err <= tol and off == 0 and sn <= nn + 1e-12 and nn <= bound + 1e-8
    report = {"operation": "reconstruct_small_mu", "params": {"q": q, "symbol": chk["symbol"]},
              "max_abs_residual": err, "off_cyclic_max": off, "spectral_norm": sn, "nuclear_norm": nn,
              "bound": bound, "tolerance": tol, "pass": ok}
    return CheckResult(report, headline={"max_abs_residual": err, "nuclear_norm": nn})


def run_reconstruct_large_mu(exp, chk, ctx, path):
    _require(chk, path, "mu", "symbol")
    w = exp.window_for(chk, path)
    mu = exp.semicharacters[chk["mu"]]
    a = exp.symbol(chk["symbol"], w)
    try:
        S = reconstruct_large_mu(mu, a, w)
    except SupportError as exc:
        raise ConfigError(path + ".symbol", str(exc)) from None
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    D = build_mu_nu_hankel(mu, None, a, w)
    tol = ctx.tol(chk, 1e-10)
    err = _maxabs(S.matrix - D.matrix)
    off = max(_maxabs(off_cyclic_rows(S)), _maxabs(off_cyclic_rows(D)))
    support = a.support() if a.support() is not None else w.sumset()
    sn, nn, bound = spectral_norm(S), nuclear_norm(S), large_mu_bound(mu, a, support)
    ok = err <= tol and off == 0 and sn <= nn + 1e-12 and nn <= bound + 1e-8
    report = {"operation": "reconstruct_large_mu", "params": {"mu": chk["mu"], "symbol": chk["symbol"]},
              "max_abs_residual": err, "off_cyclic_max": off, "spectral_norm": sn, "nuclear_norm": nn,
              "bound": bound, "tolerance": tol}
    if "reject_symbol" in chk:
        try:
            reconstruct_large_mu(mu, exp.symbol(chk["reject_symbol"], w), w)
            report["rejection"] = None
            ok = False
        except SupportError as exc:
            report["rejection"] = str(exc)
    report["pass"] = ok
    return CheckResult(report, headline={"max_abs_residual": err, "nuclear_norm": nn})


# ---------------------------------------------------------------- Neumann series


def _scaled_random(rng, n, c):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return m * (c / np.linalg.svd(m, compute_uv=False)[0])


def _neumann(exp, chk, ctx, path, forward: bool):
    w = exp.window_for(chk, path)
    g = w.group
    chi1 = first_positive(g)
    if chi1 is None:
        raise ConfigError("group", f"{g} has no first positive element")
    norms = chk.get("norms", [0.3, 0.5, 0.9])
    rng = ctx.rng(chk)
    side_elems = w.positives if forward else w.elements
    side = MINUS if forward else PLUS
    rows, ok = [], True
    for c in norms:
        # a shift-based operator with a series oracle, and a dense random one
        if forward:
            shift_op = shift_matrix(chi1, "compressed", w) * c
            start = side_elems[len(side_elems) // 2]
        else:
            shift_op = adjoint(shift_matrix(chi1, PLUS, w)) * c
            start = side_elems[len(side_elems) // 2]
        dense = TruncatedOperator(g, side_elems, side_elems, _scaled_random(rng, len(side_elems), c), side, side)
        vec0 = basis_vector(g, side, side_elems, start)
        vec1 = WindowVector(g, side, side_elems, rng.normal(size=len(side_elems)) + 1j * rng.normal(size=len(side_elems)))
        for label, op, vec in (("shift", shift_op, vec0), ("dense", dense, vec1)):
            sol = (solve_neumann_forward if forward else solve_neumann_backward)(op, vec, w)
            col = w.elements.index(g.zero) if forward else w.positives.index(chi1)
            recovered = _maxabs(sol.X.matrix[:, col] - vec.coeffs)
            oracle_err = None
            if label == "shift" and forward:
                oracle_err = _maxabs(sol.X.matrix - reconstruct_small_mu(c, delta(g, start), w).matrix)
            elif label == "shift":
                oracle = np.zeros_like(sol.X.matrix)
                # column (n+1)χ₁ holds cⁿ e_{start - nχ₁} until the chain leaves the window
                for n in range(sol.n_terms + 1):
                    lab, tgt = g.sub(start, g.multiple(chi1, n)), g.multiple(chi1, n + 1)
                    if not g.is_positive(lab) or lab not in w or tgt not in w:
                        break
                    oracle[w.elements.index(lab), w.positives.index(tgt)] = c ** n
                oracle_err = _maxabs(sol.X.matrix - oracle)
            good = sol.ok and recovered == 0 and (oracle_err is None or oracle_err <= 1e-12)
            ok = ok and good
            rows.append([c, label, sol.operator_norm, sol.n_terms, sol.residual_norm, sol.tail_bound,
                         recovered, oracle_err if oracle_err is not None else "", good])
    op = "neumann_forward" if forward else "neumann_backward"
    worst = max(r[4] - r[5] for r in rows)
    report = {"operation": op, "params": {"norms": norms, "window_size": len(w)},
              "runs": [dict(zip(NEUMANN_HEADER, r)) for r in rows],
              "max_residual_minus_tail": worst, "pass": ok}
    return CheckResult(report, (NEUMANN_HEADER, rows), {"max_residual_minus_tail": worst})


NEUMANN_HEADER = ["operator_norm_target", "kind", "operator_norm", "n_terms", "residual_norm", "tail_bound",
                  "recovery_error", "oracle_error", "pass"]


def run_neumann_forward(exp, chk, ctx, path):
    return _neumann(exp, chk, ctx, path, True)


def run_neumann_backward(exp, chk, ctx, path):
    return _neumann(exp, chk, ctx, path, False)


# ---------------------------------------------------------------- Cauchy examples


def run_adjoint_decomposition(exp, chk, ctx, path):
    _require(chk, path, "operator")
    w = exp.window_for(chk, path)
    spec = exp.cauchy_spec(chk["operator"])
    try:
        Bp, Cp = adjoint_decomposition(spec, w)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    err = _maxabs(adjoint(matrix_of_A(spec, w)).matrix - (Bp + Cp).matrix)
    tol = ctx.tol(chk, 1e-12)
    c_off_row = _maxabs(Cp.matrix[1:])
    report = {"operation": "adjoint_decomposition", "params": {"operator": chk["operator"], "window": len(w) - 1},
              "max_abs_residual": err, "c_part_outside_first_row": c_off_row, "tolerance": tol,
              "pass": err <= tol and c_off_row == 0}
    return CheckResult(report, headline={"max_abs_residual": err})


def run_fourier_oracle(exp, chk, ctx, path):
    w = exp.window_for(chk, path)
    if w.group.kind != "integer":
        raise ConfigError(path, "the sampling oracle needs the integer group")
    if "measures" in chk:
        measures = [(n, exp.measures[n]) for n in chk["measures"]]
    else:
        measures = [(f"corpus_{i}", m) for i, m in enumerate(oracle_measures())]
    qs = [as_complex(q) for q in chk.get("qs", [0.5])]
    tol = ctx.tol(chk, 1e-8)
    rows, worst = [], 0.0
    for name, m in measures:
        for q in qs:
            try:
                spec = CauchySpec("A", q, m)
                A = matrix_of_A(spec, w)
                for k in w.elements:
                    col = oracle_fourier_sampling(spec, k, len(w.positives))
                    err = _maxabs(col - A.matrix[:, w.elements.index(k)])
                    worst = max(worst, err)
                    rows.append([name, repr(q), k, err])
            except ValueError as exc:
                raise ConfigError(path, f"{name}: {exc}") from None
    report = {"operation": "fourier_oracle", "params": {"measures": [n for n, _ in measures], "qs": qs},
              "columns_checked": len(rows), "max_abs_residual": worst, "tolerance": tol, "pass": worst <= tol}
    return CheckResult(report, (["measure", "q", "column", "max_abs_error"], rows), {"max_abs_residual": worst})


def run_widom_diagnostic(exp, chk, ctx, path):
    _require(chk, path, "measure")
    m = exp.measures[chk["measure"]]
    rep = widom_diagnostic(m.moments(0), chk.get("n_max", 64), chk.get("window_sizes", (8, 16, 32, 64)))
    d = {"operation": "widom_diagnostic", "params": {"measure": chk["measure"]}, **rep.to_dict()}
    ok = True
    if "expected" in chk:
        err = abs(rep.b_star - as_complex(chk["expected"]))
        d["b_star_error"] = err
        ok = err <= ctx.tol(chk, 1e-12)
    d["pass"] = ok
    rows = [[n, v] for n, v in rep.table]
    return CheckResult(d, (["window_size", "spectral_norm"], rows), {"b_star": rep.b_star})


# ---------------------------------------------------------------- algebra


def _unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _unit_matrix(rng, n):
    return _scaled_random(rng, n, 1.0)


def run_rank_one_algebra(exp, chk, ctx, path):
    """A(f⊗y)B = (Af)⊗(B*y), (f⊗y)* = y⊗f and ‖f⊗y‖ = ‖f‖‖y‖ on random data."""
    count = chk.get("count", 200)
    rng = ctx.rng(chk)
    tol = ctx.tol(chk, 1e-12)
    norm_tol = 1e-10 * ctx.tol_scale
    wins = list(standard_windows().values())
    worst = {"product": 0.0, "adjoint": 0.0, "action": 0.0, "norm": 0.0}
    for i in range(count):
        w = wins[i % len(wins)]
        g = w.group
        nm, npl = len(w.positives), len(w)
        sf, sy = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
        f = WindowVector(g, MINUS, w.positives, sf * _unit(rng, nm))
        y = WindowVector(g, PLUS, w.elements, sy * _unit(rng, npl))
        A = TruncatedOperator(g, w.positives, w.positives, _unit_matrix(rng, nm), MINUS, MINUS)
        B = TruncatedOperator(g, w.elements, w.elements, _unit_matrix(rng, npl), PLUS, PLUS)
        R = rank_one(f, y)
        worst["product"] = max(worst["product"], _maxabs((A @ R @ B).matrix - rank_one(A @ f, adjoint(B) @ y).matrix))
        worst["adjoint"] = max(worst["adjoint"], _maxabs(adjoint(R).matrix - rank_one(y, f).matrix))
        # defining action x ↦ <x, y> f
        x = WindowVector(g, PLUS, w.elements, _unit(rng, npl))
        inner = np.vdot(y.coeffs, x.coeffs)
        worst["action"] = max(worst["action"], _maxabs((R @ x).coeffs - inner * f.coeffs))
        worst["norm"] = max(worst["norm"], abs(spectral_norm(R) - f.norm() * y.norm()))
    ok = worst["product"] <= tol and worst["adjoint"] <= tol and worst["action"] <= tol and worst["norm"] <= norm_tol
    report = {"operation": "rank_one_algebra", "params": {"count": count},
              "max_abs_residual": max(worst["product"], worst["adjoint"], worst["action"]),
              "max_errors": worst, "tolerance": tol, "norm_tolerance": norm_tol, "pass": ok}
    return CheckResult(report, headline={"max_abs_residual": report["max_abs_residual"]})


# ---------------------------------------------------------------- convergence


def run_convergence_table(exp, chk, ctx, path):
    """Value of a quantity over growing windows; truncated norms must not decrease."""
    _require(chk, path, "operator")
    if exp.group.kind != "integer":
        raise ConfigError(path, "convergence tables scale integer windows")
    quantity = chk.get("quantity", "spectral_norm")
    sizes = chk.get("window_sizes", [8, 16, 32, 64])
    values = []
    for n in sizes:
        w = integer_window(n)
        if quantity == "spectral_norm":
            values.append(spectral_norm(exp.operator(chk["operator"], w)))
        else:
            fn = trace_JA if quantity == "trace_JA" else trace_JB
            values.append(fn(exp.cauchy_spec(chk["operator"]), w).matrix)
    limit = chk.get("limit")
    if limit is None and quantity != "spectral_norm":
        fn = trace_JA if quantity == "trace_JA" else trace_JB
        limit = fn(exp.cauchy_spec(chk["operator"])).closed_form
    rows = []
    for n, v in zip(sizes, values):
        gap = abs(limit - v) if limit is not None else ""
        rows.append([n, v, limit if limit is not None else "", gap])
    ok = True
    if quantity == "spectral_norm":
        monotone = all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
        ok = monotone and (limit is None or values[-1] <= limit + 1e-10)
    elif "tol" in chk:
        ok = abs(limit - values[-1]) <= ctx.tol(chk, 1e-10)
    report = {"operation": "convergence_table", "params": {"operator": chk["operator"], "quantity": quantity},
              "window_sizes": sizes, "values": values, "limit": limit, "pass": ok}
    return CheckResult(report, (["window_size", "value", "limit", "gap"], rows), {"last_value": values[-1]})


CheckFn = Callable[[Experiment, dict, RunContext, str], CheckResult]

REGISTRY: Dict[str, Tuple[CheckFn, str]] = {
    "spectral_norm": (run_spectral_norm, "largest singular value of a declared operator"),
    "boundedness_bound": (run_boundedness_bound, "truncated norm against ‖μ‖‖a‖"),
    "nu_bound": (run_nu_bound, "truncated ν-Hankel norm against ‖ν‖‖a‖"),
    "boundedness_random": (run_boundedness_random, "norm bound on seeded random (μ, a) for all three groups"),
    "trace_JA": (run_trace_JA, "trace of the flipped Cauchy operator A, three ways"),
    "trace_JB": (run_trace_JB, "trace of the flipped Cauchy operator B, three ways"),
    "generalized_hankel_equation": (run_generalized_hankel_equation, "A S_χ = μ(χ) P₋S_χ A on interior entries"),
    "hankel_equation_corpus": (run_hankel_equation_corpus, "equation on the built-in corpus plus random failures"),
    "nu_equation": (run_nu_equation, "S_χ̄* B = ν(χ) B S_χ on interior entries"),
    "duality": (run_duality, "A_(μ;ν),a against A_(μ/ν;1),aν"),
    "factor_unimodular": (run_factor_unimodular, "A = H U with U unitary for unimodular μ"),
    "unimodular_cauchy": (run_unimodular_cauchy, "A(q) = A(1) diag(q^k) for |q| = 1"),
    "reconstruct_small_mu": (run_reconstruct_small_mu, "rank-one series for |μ(χ₁)| < 1"),
    "reconstruct_large_mu": (run_reconstruct_large_mu, "rank-one series for |μ(χ₁)| > 1"),
    "neumann_forward": (run_neumann_forward, "series solution of Q X = X S_χ₁"),
    "neumann_backward": (run_neumann_backward, "series solution of R Y = Y S_χ̄₁"),
    "adjoint_decomposition": (run_adjoint_decomposition, "adjoint of A split into its two parts"),
    "fourier_oracle": (run_fourier_oracle, "matrix columns against circle sampling + DFT"),
    "rank_one_algebra": (run_rank_one_algebra, "rank-one operator identities on random data"),
    "widom_diagnostic": (run_widom_diagnostic, "max γ_n (n+1) and Hankel norm growth"),
    "convergence_table": (run_convergence_table, "a quantity over growing windows, as CSV"),
}


def run_check(exp: Experiment, chk: dict, ctx: RunContext, path: str) -> CheckResult:
    fn, _ = REGISTRY[chk["op"]]
    try:
        res = fn(exp, chk, ctx, path)
    except ConfigError:
        raise
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        # numerical failure inside a check counts as a failed check, not a crash
        res = CheckResult({"operation": chk["op"], "error": f"{type(exc).__name__}: {exc}", "pass": False},
                          headline={"error": type(exc).__name__})
    res.report = jsonable(res.report)
    res.headline = jsonable(res.headline)
    return res
