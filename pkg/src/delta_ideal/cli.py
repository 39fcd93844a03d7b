"""Scenario runner: JSON config in, report.json / points.csv / profile.csv / field.csv out.

Exit codes: 0 all enabled checks pass, 1 a check failed, 2 usage or config
error, 3 numerical degeneracy (construction or point evaluation broke down).
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .ambient import SpaceKind
from .curvature import METRIC_STEP
from .delta import DeltaOptions, PartitionError, Theorem
from .families.blocks import BlockError, BlockName, block_chart, list_blocks
from .families.certify import POINT_ERRORS, VARIANT_FAMILIES, resolve_variants
from .families.charts import FAMILIES, FamilyError, construct_family
from .families.profiles import ProfileError, ProfileKind, chc_profile, conserved_quantity
from .families.warp import WarpError
from .graphs import random_graph_chart
from .jets import H1, H2, H3, ChartDomainError, ImmersionChart, ImmersionDegeneracyError
from .pipeline import ALL_CHECKS, DEFAULT_MARGIN, analyze_point, sample_points
from .rng import NAME as PRNG_NAME
from .shape import LagrangianInconsistencyError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3
SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "plotdata")

DEFAULT_TOLERANCES = {
    "lagrangian": 1e-6,
    "lift": 1e-6,
    "cubic_symmetry": 1e-6,
    "gauss": 1e-3,
    "codazzi": 1e-3,
    "ideality": 1e-4,
    "inequality": 1e-4,
    "pattern": 1e-4,
    "case_fraction": 0.99,
}

POINT_COLUMNS = ["lagrangian_res", "cubic_sym_res", "gauss_res", "codazzi_res", "delta", "rhs",
                 "ideality_res", "case", "gamma", "lambda", "mu"]
# record attribute behind each CSV column where the names differ
_ATTR = {"lambda": "lam"}

DEGENERACY_ERRORS = (ImmersionDegeneracyError, LagrangianInconsistencyError, ChartDomainError,
                     FamilyError, ProfileError, WarpError, FloatingPointError, np.linalg.LinAlgError)

COMMAND_CHECKS = {
    "verify": ("lagrangian", "lift", "cubic_symmetry", "gauss", "codazzi"),
    "delta": ("lagrangian", "delta"),
    "classify": ("lagrangian", "delta", "classify"),
    "run": ALL_CHECKS,
}


class ConfigError(ValueError):
    """Schema violation; the message starts with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------- config


@dataclass
class Scenario:
    name: str
    family: dict
    sample: dict
    checks: list
    tolerances: dict
    expect: dict
    delta: dict
    ambient: dict | None = None
    raw: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return int(self.sample["seed"])

    def echo(self) -> dict:
        return {"schema": SCHEMA_VERSION, "name": self.name, "ambient": self.ambient, "family": self.family,
                "sample": self.sample, "checks": self.checks, "tolerances": self.tolerances,
                "expect": self.expect, "delta": self.delta}


def _require(obj: dict, key: str, kinds, path: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}", "required field missing")
    return _typed(obj[key], kinds, f"{path}.{key}")


def _typed(value, kinds, path: str):
    if isinstance(value, bool) and bool not in (kinds if isinstance(kinds, tuple) else (kinds,)):
        raise ConfigError(path, f"expected {kinds}, got a boolean")
    if not isinstance(value, kinds):
        raise ConfigError(path, f"expected {kinds}, got {type(value).__name__}")
    return value


def _optional(obj: dict, key: str, kinds, path: str, default=None):
    return default if obj.get(key) is None else _typed(obj[key], kinds, f"{path}.{key}")


def _known_keys(obj: dict, allowed, path: str):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", f"unknown field (allowed: {', '.join(sorted(allowed))})")


_NUM = (int, float)


def _parse_family(fam, path="$.family") -> dict:
    _typed(fam, dict, path)
    sources = [k for k in ("name", "block", "graph") if k in fam]
    if len(sources) != 1:
        raise ConfigError(path, "exactly one of 'name', 'block' or 'graph' is required")
    src = sources[0]
    if src == "name":
        _known_keys(fam, {"name", "n", "variant", "init", "window", "y_window", "step", "axis"}, path)
        name = _require(fam, "name", str, path)
        if name not in FAMILIES:
            raise ConfigError(f"{path}.name", f"unknown family {name!r} (choose from {', '.join(FAMILIES)})")
        n = _require(fam, "n", int, path)
        if n < 5:
            raise ConfigError(f"{path}.n", "families need n >= 5")
        out = {"name": name, "n": n}
        variant = _optional(fam, "variant", str, path)
        if variant is not None:
            choices = VARIANT_FAMILIES.get(name, [])
            if variant != "auto" and variant not in choices:
                raise ConfigError(f"{path}.variant", f"{name} has variants {choices or 'none'} (or 'auto')")
            out["variant"] = variant
        elif name in VARIANT_FAMILIES:
            out["variant"] = "auto"
        for key in ("init", "window", "y_window"):
            val = _optional(fam, key, list, path)
            if val is not None:
                for i, v in enumerate(val):
                    _typed(v, _NUM, f"{path}.{key}[{i}]")
                out[key] = [float(v) for v in val]
        step = _optional(fam, "step", _NUM, path)
        if step is not None:
            if not step > 0:
                raise ConfigError(f"{path}.step", "must be positive")
            out["step"] = float(step)
        axis = _optional(fam, "axis", str, path)
        if axis is not None:
            if axis not in ("x", "y"):
                raise ConfigError(f"{path}.axis", "must be 'x' or 'y'")
            out["axis"] = axis
        return out
    if src == "block":
        _known_keys(fam, {"block", "dim"}, path)
        block = _require(fam, "block", str, path)
        try:
            BlockName(block)
        except ValueError:
            raise ConfigError(f"{path}.block", f"unknown block {block!r}") from None
        dim = _require(fam, "dim", int, path)
        if dim < 2:
            raise ConfigError(f"{path}.dim", "must be >= 2")
        return {"block": block, "dim": dim}
    _known_keys(fam, {"graph"}, path)
    g = _typed(fam["graph"], dict, f"{path}.graph")
    _known_keys(g, {"n", "seed", "amplitude"}, f"{path}.graph")
    n = _require(g, "n", int, f"{path}.graph")
    if n < 2:
        raise ConfigError(f"{path}.graph.n", "must be >= 2")
    return {"graph": {"n": n, "seed": _optional(g, "seed", int, f"{path}.graph", 0),
                      "amplitude": float(_optional(g, "amplitude", _NUM, f"{path}.graph", 0.3))}}


def parse_scenario(doc, seed_override: int | None = None) -> Scenario:
    """Validate a decoded config document; raises ConfigError naming the field path."""
    path = "$"
    _typed(doc, dict, path)
    _known_keys(doc, {"schema", "name", "ambient", "family", "sample", "checks", "tolerances", "expect",
                      "delta", "description"}, path)
    schema = _require(doc, "schema", int, path)
    if schema != SCHEMA_VERSION:
        raise ConfigError("$.schema", f"unsupported schema version {schema} (expected {SCHEMA_VERSION})")
    name = _require(doc, "name", str, path)
    family = _parse_family(doc.get("family"))

    ambient = None
    if doc.get("ambient") is not None:
        amb = _typed(doc["ambient"], dict, "$.ambient")
        _known_keys(amb, {"kind", "n"}, "$.ambient")
        kind = _require(amb, "kind", str, "$.ambient")
        try:
            SpaceKind(kind)
        except ValueError:
            raise ConfigError("$.ambient.kind", f"unknown ambient {kind!r}") from None
        ambient = {"kind": kind, "n": _require(amb, "n", int, "$.ambient")}

    smp = _typed(doc.get("sample", {}), dict, "$.sample")
    _known_keys(smp, {"mode", "count", "per_axis", "seed", "margin"}, "$.sample")
    mode = _optional(smp, "mode", str, "$.sample", "random")
    if mode not in ("random", "grid"):
        raise ConfigError("$.sample.mode", "must be 'random' or 'grid'")
    sample = {"mode": mode, "seed": _optional(smp, "seed", int, "$.sample", 0)}
    if mode == "random":
        sample["count"] = _optional(smp, "count", int, "$.sample", 20)
        if sample["count"] < 1:
            raise ConfigError("$.sample.count", "must be >= 1")
    else:
        sample["per_axis"] = _optional(smp, "per_axis", int, "$.sample", 2)
        if sample["per_axis"] < 1:
            raise ConfigError("$.sample.per_axis", "must be >= 1")
    margin = _optional(smp, "margin", _NUM, "$.sample")
    if margin is not None:
        sample["margin"] = float(margin)
    if seed_override is not None:
        sample["seed"] = int(seed_override)

    checks = _optional(doc, "checks", list, path, list(ALL_CHECKS))
    for i, c in enumerate(checks):
        if c not in ALL_CHECKS:
            raise ConfigError(f"$.checks[{i}]", f"unknown check {c!r} (choose from {', '.join(ALL_CHECKS)})")

    tol = dict(DEFAULT_TOLERANCES)
    over = _typed(doc.get("tolerances", {}), dict, "$.tolerances")
    for key, val in over.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"$.tolerances.{key}", "unknown tolerance")
        tol[key] = float(_typed(val, _NUM, f"$.tolerances.{key}"))

    exp = _typed(doc.get("expect", {}), dict, "$.expect")
    _known_keys(exp, {"case", "ideal", "f_closed_form"}, "$.expect")
    default_case = FAMILIES[family["name"]].case if "name" in family else None
    expect = {"case": _optional(exp, "case", str, "$.expect", default_case),
              "ideal": _optional(exp, "ideal", bool, "$.expect", "graph" not in family),
              "f_closed_form": _optional(exp, "f_closed_form", str, "$.expect")}
    if expect["f_closed_form"] not in (None, "cos4x_quarter"):
        raise ConfigError("$.expect.f_closed_form", "only 'cos4x_quarter' is known")

    dl = _typed(doc.get("delta", {}), dict, "$.delta")
    _known_keys(dl, {"parts", "theorem", "n_samples", "n_refine", "restarts"}, "$.delta")
    delta = {"parts": _optional(dl, "parts", list, "$.delta"),
             "theorem": _optional(dl, "theorem", str, "$.delta", Theorem.DELTA2N2.value),
             "n_samples": _optional(dl, "n_samples", int, "$.delta", 2000),
             "n_refine": _optional(dl, "n_refine", int, "$.delta", 4),
             "restarts": _optional(dl, "restarts", int, "$.delta", 20)}
    try:
        Theorem(delta["theorem"])
    except ValueError:
        raise ConfigError("$.delta.theorem", f"unknown theorem {delta['theorem']!r}") from None
    return Scenario(name=name, family=family, sample=sample, checks=list(checks), tolerances=tol,
                    expect=expect, delta=delta, ambient=ambient, raw=doc)


def bundled_scenarios() -> list[str]:
    """Names accepted by ``--config`` without a path."""
    return sorted(p.name[:-5] for p in resources.files("delta_ideal.scenarios").iterdir() if p.name.endswith(".json"))


def load_scenario(path: str, seed_override: int | None = None) -> Scenario:
    """Read a config from ``path``, falling back to a bundled scenario of that name."""
    p = Path(path)
    if p.is_file():
        text = p.read_text(encoding="utf-8")
    else:
        name = p.name if p.name.endswith(".json") else p.name + ".json"
        res = resources.files("delta_ideal.scenarios").joinpath(name)
        if not res.is_file():
            raise ConfigError("--config", f"no such file or bundled scenario: {path}")
        text = res.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON ({exc})") from None
    return parse_scenario(doc, seed_override)


# ---------------------------------------------------------------- execution


def _json_safe(obj):
    """Nested plain-Python copy with NaN/inf mapped to None."""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if hasattr(obj, "value"):
        return obj.value
    return str(obj)


def build_chart(scn: Scenario) -> tuple[ImmersionChart, dict]:
    """Chart for the scenario plus the sign-variant selection record (empty when none applies)."""
    fam = scn.family
    selection = {}
    if "block" in fam:
        chart, _ = block_chart(fam["block"], fam["dim"])
    elif "graph" in fam:
        g = fam["graph"]
        chart = random_graph_chart(g["n"], g["seed"], g["amplitude"])
    else:
        kwargs = {k: fam[k] for k in ("init", "window", "y_window", "step", "axis") if k in fam}
        variant = fam.get("variant")
        if variant == "auto":
            res = resolve_variants(fam["name"], fam["n"], n_points=8, seed=scn.seed,
                                   checks=COMMAND_CHECKS["verify"])
            selection = res.summary()
            selection.pop("variants")
            selection["structural_points"] = 8
            if res.selected is None:
                raise FamilyError(f"{fam['name']}: no unique sign variant passes ({selection['passing_variants']})")
            variant = res.selected
        chart = construct_family(fam["name"], fam["n"], variant=variant, **kwargs)
    if scn.ambient is not None:
        sp = chart.space
        if sp.kind.value != scn.ambient["kind"] or sp.complex_dim_n != scn.ambient["n"]:
            raise ConfigError("$.ambient", f"chart lives in {sp.kind.value}(n={sp.complex_dim_n}), "
                                           f"config says {scn.ambient['kind']}(n={scn.ambient['n']})")
    return chart, selection


def scenario_points(chart: ImmersionChart, scn: Scenario) -> np.ndarray:
    margin = scn.sample.get("margin")
    if scn.sample["mode"] == "random":
        return sample_points(chart, scn.sample["count"], scn.seed, margin)
    pad = margin if margin is not None else DEFAULT_MARGIN
    k = scn.sample["per_axis"]
    axes = []
    for lo, hi in chart.domain_box:
        lo, hi = lo + pad, hi - pad
        if hi <= lo:
            raise ChartDomainError("margin leaves an empty interior")
        axes.append([0.5 * (lo + hi)] if k == 1 else list(np.linspace(lo, hi, k)))
    return np.array(list(itertools.product(*axes)))


def _delta_options(scn: Scenario) -> DeltaOptions:
    d = scn.delta
    return DeltaOptions(n_samples=d["n_samples"], n_refine=d["n_refine"], restarts=d["restarts"], seed=scn.seed)


def _point_row(rec, n: int) -> dict:
    row = {f"param_{i + 1}": float(rec.params[i]) for i in range(n)}
    for col in POINT_COLUMNS:
        row[col] = getattr(rec, _ATTR.get(col, col))
    return row


def _blank_row(params, n: int, label: str) -> dict:
    row = {f"param_{i + 1}": float(params[i]) for i in range(n)}
    for col in POINT_COLUMNS:
        row[col] = float("nan")
    row["case"] = label
    return row


def _aggregate(rows: list, records: list, scn: Scenario, checks) -> dict:
    tol = scn.tolerances
    out = {"max": {}, "mean": {}, "checks": {}, "case_counts": {}}

    def col(name):
        return np.array([getattr(r, name) for r in records], dtype=float)

    metric = {"lagrangian": ("lagrangian_res",), "lift": ("lift_norm_res", "lift_horizontal_res"),
              "cubic_symmetry": ("cubic_sym_res",), "gauss": ("gauss_res",), "codazzi": ("codazzi_res",)}
    for check, attrs in metric.items():
        if check not in checks:
            continue
        vals = np.concatenate([col(a) for a in attrs]) if records else np.array([np.inf])
        worst = float(np.inf if np.isnan(vals).any() else vals.max())
        for a in attrs:
            v = col(a) if records else np.array([np.nan])
            out["max"][a], out["mean"][a] = float(np.max(v)), float(np.mean(v))
        out["checks"][check] = {"passed": worst <= tol[check], "max": worst, "tolerance": tol[check]}
    if "delta" in checks:
        gap = np.array([r.rhs - r.delta for r in records]) if records else np.array([-np.inf])
        gap = np.nan_to_num(gap, nan=-np.inf)
        out["max"]["abs_ideality_res"] = float(np.max(np.abs(gap)))
        out["checks"]["inequality"] = {"passed": float(gap.min()) >= -tol["inequality"],
                                       "min_rhs_minus_delta": float(gap.min()), "tolerance": tol["inequality"]}
        if scn.expect["ideal"]:
            worst = float(np.max(np.abs(gap)))
            out["checks"]["ideality"] = {"passed": worst <= tol["ideality"], "max": worst,
                                         "tolerance": tol["ideality"]}
    counts: dict = {}
    for row in rows:
        counts[row["case"]] = counts.get(row["case"], 0) + 1
    out["case_counts"] = counts
    expected = scn.expect["case"]
    if "classify" in checks and expected is not None:
        hits = [r for r in records if r.case == expected]
        wrong = [r for r in records if r.case not in (expected, "Ambiguous")]
        pattern = max((r.pattern_res for r in hits), default=0.0 if expected == "MinimalI" else np.inf)
        frac = len(hits) / max(len(rows), 1)
        out["checks"]["classify"] = {
            "passed": bool(not wrong and frac >= tol["case_fraction"]
                           and (expected == "MinimalI" or pattern <= tol["pattern"])),
            "expected": expected, "fraction": frac, "wrong": len(wrong), "max_pattern_res": float(pattern),
            "tolerance": tol["pattern"]}
    return out


def profile_rows(chart: ImmersionChart) -> list[dict]:
    """(t, lambda, phi, theta, conserved) along the chart's profile, or [] for non-profile charts."""
    prof = chart.payload.get("profile")
    if prof is None:
        if chart.metadata.get("family") != "CHn_IIc":
            return []
        n = chart.param_dim
        t = np.linspace(chart.domain_box[0, 0], chart.domain_box[0, 1], 201)
        lam, phi, theta = chc_profile(n, t)
        kind = ProfileKind.CHN_C
    else:
        stride = max(1, len(prof.t) // 400)
        t, lam, phi, theta = (a[::stride] for a in (prof.t, prof.lam, prof.phi, prof.theta))
        kind, n = prof.kind, prof.n
    cons = conserved_quantity(lam, phi, n) if kind is ProfileKind.CN else np.full_like(t, np.nan)
    return [{"t": float(a), "lambda": float(b), "phi": float(c), "theta": float(d), "conserved": float(e)}
            for a, b, c, d, e in zip(t, lam, phi, theta, cons)]


def field_rows(chart: ImmersionChart, closed_form: str | None = None) -> list[dict]:
    """(x, y, f, residual) of the chart's warp field; optional closed-form column."""
    warp = chart.payload.get("warp")
    if warp is None:
        return []
    if warp.reduced_1d:
        t = warp.line.t
        stride = max(1, len(t) // 400)
        idx = np.arange(0, len(t), stride)
        f = warp.line.y[idx, 0]
        res = np.abs(warp.line_residual(t[idx]))
        xs, ys = (t[idx], np.zeros(idx.size)) if warp.reduced_axis == "x" else (np.zeros(idx.size), t[idx])
    else:
        X, Y = np.meshgrid(warp.x, warp.y, indexing="ij")
        xs, ys, f = X.ravel(), Y.ravel(), np.asarray(warp.f).ravel()
        res = np.asarray(warp.pde_residual).ravel()
    rows = [{"x": float(a), "y": float(b), "f": float(c), "residual": float(d)} for a, b, c, d in zip(xs, ys, f, res)]
    if closed_form == "cos4x_quarter":
        for r in rows:
            r["f_closed_form"] = float(np.cos(4 * r["x"]) ** 0.25)
    return rows


@dataclass
class RunResult:
    report: dict
    rows: list
    profile: list
    field: list
    exit_code: int


def execute(scn: Scenario, command: str = "run") -> RunResult:
    """Build the chart, evaluate the command's checks at every sample point and aggregate."""
    checks = [c for c in scn.checks if c in COMMAND_CHECKS.get(command, ())] if command != "construct" else []
    env = {"package": __version__, "python": platform.python_version(), "numpy": np.__version__,
           "scipy": scipy.__version__, "prng": PRNG_NAME, "seed": scn.seed,
           "jet_steps": {"h1": H1, "h2": H2, "h3": H3}, "metric_step": METRIC_STEP}
    report = {"command": command, "scenario": scn.echo(), "environment": env, "errors": []}
    try:
        chart, selection = build_chart(scn)
    except DEGENERACY_ERRORS + (BlockError, PartitionError) as exc:
        report["errors"].append(f"construction: {type(exc).__name__}: {exc}")
        report.update(passed=False, exit_code=EXIT_DEGENERATE)
        return RunResult(report, [], [], [], EXIT_DEGENERATE)
    n = chart.param_dim
    report["chart"] = {"family_tag": chart.family_tag, "param_dim": n, "domain_box": chart.domain_box,
                       "ambient": {"kind": chart.space.kind.value, "n": chart.space.complex_dim_n},
                       "metadata": chart.metadata}
    if selection:
        report["variant_selection"] = selection
    prof, fld = profile_rows(chart), field_rows(chart, scn.expect["f_closed_form"])
    if scn.expect["f_closed_form"] and fld:
        report["closed_form_max_abs_error"] = max(abs(r["f"] - r["f_closed_form"]) for r in fld)

    rows, records, degenerate = [], [], False
    if command != "construct":
        try:
            pts = scenario_points(chart, scn)
        except ChartDomainError as exc:
            raise ConfigError("$.sample.margin", str(exc)) from None
        opts = _delta_options(scn)
        parts = tuple(scn.delta["parts"]) if scn.delta["parts"] else None
        for i, p in enumerate(pts):
            try:
                rec = analyze_point(chart, p, checks=checks, parts=parts, theorem=scn.delta["theorem"],
                                    delta_opts=opts, ideal_tol=scn.tolerances["ideality"])
            except POINT_ERRORS as exc:
                degenerate = True
                report["errors"].append(f"point {i}: {type(exc).__name__}: {exc}")
                rows.append(_blank_row(p, n, "Degenerate"))
                continue
            records.append(rec)
            rows.append(_point_row(rec, n))
        report["aggregates"] = _aggregate(rows, records, scn, checks)
    passed = all(c["passed"] for c in report.get("aggregates", {}).get("checks", {}).values())
    code = EXIT_DEGENERATE if degenerate else (EXIT_PASS if passed else EXIT_FAIL)
    report["points"] = rows
    report.update(passed=passed and not degenerate, exit_code=code)
    return RunResult(report, rows, prof, fld, code)


# ---------------------------------------------------------------- output


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    return repr(v) if math.isfinite(v) else "nan"


def write_csv(path: Path, rows: list, header: list | None = None):
    header = header or (list(rows[0]) if rows else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r[h]) for h in header])


def read_points_csv(path) -> list[dict]:
    """Inverse of the points.csv writer: numbers back to float, NaN back to None."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rec = {}
            for k, v in row.items():
                if k == "case":
                    rec[k] = v
                else:
                    f = float(v)
                    rec[k] = f if math.isfinite(f) else None
            out.append(rec)
    return out


def points_header(n: int) -> list[str]:
    return [f"param_{i + 1}" for i in range(n)] + POINT_COLUMNS


def emit_outputs(result: RunResult, out_dir, formats=FORMATS) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / "report.json"
        p.write_text(json.dumps(_json_safe(result.report), indent=2, allow_nan=False) + "\n", encoding="utf-8")
        written.append(p)
    if "csv" in formats and "chart" in result.report and result.report["command"] != "construct":
        p = out / "points.csv"
        write_csv(p, result.rows, points_header(result.report["chart"]["param_dim"]))
        written.append(p)
    if "plotdata" in formats:
        if result.profile:
            p = out / "profile.csv"
            write_csv(p, result.profile)
            written.append(p)
        if result.field:
            p = out / "field.csv"
            write_csv(p, result.field)
            written.append(p)
    return written


def run_scenario(config_path, out_dir=None, *, seed: int | None = None, command: str = "run",
                 formats=FORMATS) -> RunResult:
    """Load, execute and (when ``out_dir`` is given) write the outputs of one scenario."""
    scn = load_scenario(str(config_path), seed)
    result = execute(scn, command)
    if out_dir is not None:
        emit_outputs(result, out_dir, formats)
    return result


# ---------------------------------------------------------------- argparse


def _formats(text: str):
    vals = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in vals if v not in FORMATS]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"formats must be a comma list of {', '.join(FORMATS)}")
    return tuple(vals)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delta-ideal",
                                     description="Construct and certify delta(2, n-2)-ideal Lagrangian charts.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"construct": "build the chart and write profile/field plot data",
             "verify": "structural residuals (Lagrangian, lift, symmetry, Gauss, Codazzi)",
             "delta": "delta(2, n-2) against the inequality right-hand side",
             "classify": "delta plus the case classifier",
             "run": "full pipeline"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, metavar="PATH",
                       help="scenario JSON (or the name of a bundled scenario)")
        p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, metavar="N", help="override sample.seed")
        p.add_argument("--format", type=_formats, default=FORMATS, dest="formats", metavar="LIST",
                       help="comma list of json,csv,plotdata (default: all)")
        p.add_argument("--quiet", action="store_true", help="no summary on stdout")
    blocks = sub.add_parser("blocks", help="building-block catalog")
    bsub = blocks.add_subparsers(dest="blocks_command", required=True)
    bsub.add_parser("list", help="list the built-in blocks")
    sub.add_parser("scenarios", help="list the bundled scenarios")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    if args.command == "blocks":
        print(json.dumps(list_blocks(), indent=2))
        return EXIT_PASS
    if args.command == "scenarios":
        print("\n".join(bundled_scenarios()))
        return EXIT_PASS
    try:
        scn = load_scenario(args.config, args.seed)
        result = execute(scn, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        written = emit_outputs(result, args.out, args.formats)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.quiet:
        rep = result.report
        print(f"{scn.name}: {args.command} -> exit {result.exit_code}")
        for name, chk in rep.get("aggregates", {}).get("checks", {}).items():
            print(f"  {name:<15} {'pass' if chk['passed'] else 'FAIL'}")
        if rep.get("aggregates"):
            print(f"  cases           {rep['aggregates']['case_counts']}")
        if "variant_selection" in rep:
            print(f"  variant         {rep['variant_selection']['selected_variant']}")
        for err in rep["errors"][:5]:
            print(f"  error: {err}")
        for p in written:
            print(f"  wrote {p}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
