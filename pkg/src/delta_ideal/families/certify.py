"""Certification of constructed charts: structural residuals, delta equality, case labels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..delta import DeltaOptions
from ..jets import ChartDomainError, ImmersionChart, ImmersionDegeneracyError
from ..pipeline import ALL_CHECKS, analyze_point, default_delta_options, sample_points
from ..shape import LagrangianInconsistencyError
from .charts import FAMILIES, ChcVariant, FamilyError, construct_family
from .companions import CompanionVariant

STRUCTURAL_LIMITS = {
    "lagrangian_res": 1e-6,
    "lift_norm_res": 1e-6,
    "lift_horizontal_res": 1e-6,
    "cubic_sym_res": 1e-6,
    "gauss_res": 1e-3,
    "codazzi_res": 1e-3,
}
IDEAL_LIMIT = 1e-4
PATTERN_LIMIT = 1e-4
CASE_FRACTION = 0.99

# Families built in two sign variants; certification decides which one holds.
VARIANT_FAMILIES = {
    "CHn_IIc": [v.value for v in ChcVariant],
    "CHn_IIIc": [v.value for v in CompanionVariant],
}

POINT_ERRORS = (LagrangianInconsistencyError, ImmersionDegeneracyError, ChartDomainError,
                np.linalg.LinAlgError, FloatingPointError, ValueError)


@dataclass
class ChartCertificate:
    family: str
    n: int
    variant: str | None
    expected_case: str | None
    records: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    maxima: dict = field(default_factory=dict)
    case_counts: dict = field(default_factory=dict)
    structural_ok: bool = False
    ideal_ok: bool = False
    classification_ok: bool = False
    construction_error: str | None = None

    @property
    def passed(self) -> bool:
        return self.structural_ok and self.ideal_ok and self.classification_ok

    def summary(self) -> dict:
        return {
            "family": self.family, "n": self.n, "variant": self.variant,
            "expected_case": self.expected_case, "points": len(self.records),
            "errors": self.errors[:5], "error_count": len(self.errors),
            "maxima": self.maxima, "case_counts": self.case_counts,
            "structural_ok": self.structural_ok, "ideal_ok": self.ideal_ok,
            "classification_ok": self.classification_ok, "passed": self.passed,
            "construction_error": self.construction_error,
        }


def _finalize(cert: ChartCertificate):
    recs = cert.records
    if not recs:
        cert.structural_ok = cert.ideal_ok = cert.classification_ok = False
        return cert
    for key in STRUCTURAL_LIMITS:
        vals = np.array([getattr(r, key) for r in recs], dtype=float)
        # a NaN residual is a failure, never a silent skip
        cert.maxima[key] = float(np.inf if np.isnan(vals).any() else vals.max())
    gaps = np.nan_to_num(np.array([r.rhs - r.delta for r in recs]), nan=-np.inf)
    cert.maxima["abs_ideality_res"] = float(np.max(np.abs(gaps)))
    cert.maxima["min_rhs_minus_delta"] = float(np.min(gaps))
    counts: dict = {}
    for r in recs:
        counts[r.case] = counts.get(r.case, 0) + 1
    cert.case_counts = counts
    cert.structural_ok = not cert.errors and all(
        cert.maxima[k] <= lim for k, lim in STRUCTURAL_LIMITS.items())
    cert.ideal_ok = not cert.errors and cert.maxima["abs_ideality_res"] <= IDEAL_LIMIT
    if cert.expected_case is None:
        cert.classification_ok = True
    else:
        hits = [r for r in recs if r.case == cert.expected_case]
        wrong = [r for r in recs if r.case not in (cert.expected_case, "Ambiguous")]
        pattern = max((r.pattern_res for r in hits), default=np.inf)
        cert.maxima["pattern_res"] = float(pattern)
        cert.classification_ok = (not cert.errors and not wrong
                                  and len(hits) >= CASE_FRACTION * len(recs) and pattern <= PATTERN_LIMIT)
    return cert


def certify_chart(chart: ImmersionChart, n_points: int = 100, seed: int = 0, *,
                  expected_case: str | None = None, checks=ALL_CHECKS,
                  delta_opts: DeltaOptions | None = None, stop_on_error: bool = True) -> ChartCertificate:
    """Run the point pipeline at ``n_points`` interior points of ``chart``.

    A point whose geometry cannot even be evaluated (second derivatives leaving
    the expected span, degenerate metric) counts as a structural failure; with
    ``stop_on_error`` the remaining points are skipped.
    """
    meta = chart.metadata
    cert = ChartCertificate(family=meta.get("family", chart.family_tag), n=chart.param_dim,
                            variant=meta.get("variant"),
                            expected_case=expected_case if expected_case is not None else meta.get("case"))
    opts = delta_opts or default_delta_options(seed)
    for p in sample_points(chart, n_points, seed):
        try:
            rec = analyze_point(chart, p, checks=checks, delta_opts=opts)
        except POINT_ERRORS as exc:
            cert.errors.append(f"{type(exc).__name__}: {exc}")
            if stop_on_error:
                break
            continue
        cert.records.append(rec)
    return _finalize(cert)


def certify_family(name: str, n: int, n_points: int = 100, seed: int = 0, *,
                   variant: str | None = None, **kwargs) -> ChartCertificate:
    try:
        chart = construct_family(name, n, variant=variant)
    except (FamilyError, ValueError) as exc:
        cert = ChartCertificate(family=name, n=n, variant=variant, expected_case=FAMILIES[name].case,
                                construction_error=str(exc))
        return _finalize(cert)
    return certify_chart(chart, n_points, seed, **kwargs)


@dataclass
class VariantResolution:
    family: str
    n: int
    certificates: dict
    selected: str | None

    def summary(self) -> dict:
        passing = [v for v, c in self.certificates.items() if c.structural_ok]
        return {"family": self.family, "n": self.n, "passing_variants": passing,
                "selected_variant": self.selected, "exactly_one": len(passing) == 1,
                "variants": {v: c.summary() for v, c in self.certificates.items()}}


def resolve_variants(name: str, n: int, n_points: int = 100, seed: int = 0, **kwargs) -> VariantResolution:
    """Certify every sign variant; the selected one is the unique variant passing the structural suite."""
    certs = {v: certify_family(name, n, n_points, seed, variant=v, **kwargs) for v in VARIANT_FAMILIES[name]}
    passing = [v for v, c in certs.items() if c.structural_ok]
    return VariantResolution(family=name, n=n, certificates=certs,
                             selected=passing[0] if len(passing) == 1 else None)


@dataclass
class SuiteReport:
    n: int
    certificates: dict
    resolutions: dict

    def selected_certificates(self) -> dict:
        """One certificate per family, using the selected variant where there is a choice."""
        out = dict(self.certificates)
        for name, res in self.resolutions.items():
            if res.selected is not None:
                out[name] = res.certificates[res.selected]
        return out

    def summary(self) -> dict:
        return {"n": self.n,
                "families": {k: c.summary() for k, c in self.certificates.items()},
                "variants": {k: r.summary() for k, r in self.resolutions.items()}}


def certify_all(n: int = 5, n_points: int = 100, seed: int = 0, families=None, **kwargs) -> SuiteReport:
    names = list(families or FAMILIES)
    certs, res = {}, {}
    for name in names:
        if name in VARIANT_FAMILIES:
            res[name] = resolve_variants(name, n, n_points, seed, **kwargs)
        else:
            certs[name] = certify_family(name, n, n_points, seed, **kwargs)
    return SuiteReport(n=n, certificates=certs, resolutions=res)
