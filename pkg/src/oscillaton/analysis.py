"""Null-result analysis: Gaussian fits, error budget, and the mixing-angle bound.

The elastic (780 nm) trace is fit with peak, center, width and baseline free.
The inelastic (1560 nm) trace is fit with the width (and center) pinned to
the elastic fit; the one-sigma uncertainty of its peak, not the peak itself,
is what enters the bound.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields, replace
from importlib import resources
from typing import Optional

import numpy as np

from .errors import FitError, OscillatonError, ParameterError
from .gaussian import PARAM_NAMES, GaussianModel
from .scattering import gamma_from_ratio
from .traces import ScanTrace

MAX_ITERATIONS = 200
JACOBIAN_STEP = 1e-6
GRADIENT_TOL = 1e-10
COST_RTOL = 1e-12
MIN_FIT_SAMPLES = 8


@dataclass(frozen=True)
class FitResult:
    model: GaussianModel
    sigma: dict
    covariance: np.ndarray
    free_params: tuple
    residual_rms: float
    converged: bool
    iterations: int
    gradient_norm: float

    def as_dict(self) -> dict:
        return {
            "model": self.model.as_dict(),
            "sigma": dict(self.sigma),
            "free_params": list(self.free_params),
            "covariance": self.covariance.tolist(),
            "residual_rms": self.residual_rms,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def initial_guess(trace: ScanTrace) -> GaussianModel:
    v = trace.voltage
    median = float(np.median(v))
    return GaussianModel(
        peak=float(v.max()) - median,
        center=float(trace.detuning[int(np.argmax(v))]),
        width=trace.span / 8.0,
        baseline=median,
    )


def _evaluate(x: np.ndarray, p: dict) -> np.ndarray:
    return p["peak"] * np.exp(-0.5 * ((x - p["center"]) / p["width"]) ** 2) + p["baseline"]


def fit_gaussian(
    trace: ScanTrace,
    initial: Optional[GaussianModel] = None,
    fixed_width: Optional[float] = None,
    fixed_center: Optional[float] = None,
    max_iterations: int = MAX_ITERATIONS,
) -> FitResult:
    """Least-squares Gaussian fit by damped Gauss-Newton steps.

    Pinned parameters (``fixed_width``, ``fixed_center``) are held at exactly
    the given value and excluded from the covariance.  The Jacobian is a
    forward difference with relative step 1e-6.  Stops when the gradient
    max-norm drops below 1e-10 or the relative cost decrease below 1e-12.

    Raises :class:`FitError` on non-convergence or a rank-deficient Jacobian.
    """
    x, y = trace.detuning, trace.voltage
    if len(trace) < MIN_FIT_SAMPLES:
        raise FitError(f"fit needs at least {MIN_FIT_SAMPLES} samples, got {len(trace)}")
    start = initial if initial is not None else initial_guess(trace)
    fixed = {}
    if fixed_width is not None:
        if not fixed_width > 0:
            raise FitError(f"fixed width must be > 0, got {fixed_width}")
        fixed["width"] = float(fixed_width)
    if fixed_center is not None:
        fixed["center"] = float(fixed_center)
    start = start.replace(**fixed)
    if not trace.span > 2 * start.width:
        raise FitError(f"scan range {trace.span} GHz must exceed twice the width {start.width} GHz")

    free = tuple(n for n in PARAM_NAMES if n not in fixed)
    params = start.as_dict()
    v_scale = float(np.max(np.abs(y))) or 1.0
    step_floor = {"peak": v_scale, "baseline": v_scale, "center": trace.span, "width": trace.span}

    def residual(p):
        return y - _evaluate(x, p)

    def jacobian(p):
        base = _evaluate(x, p)
        cols = []
        for name in free:
            h = JACOBIAN_STEP * max(abs(p[name]), step_floor[name])
            shifted = dict(p)
            shifted[name] = p[name] + h
            cols.append((_evaluate(x, shifted) - base) / ((p[name] + h) - p[name]))
        return np.column_stack(cols)

    r = residual(params)
    ssr = float(r @ r)
    jac = jacobian(params)
    damping = 1e-3
    converged = False
    iterations = 0
    grad_norm = float("inf")

    while iterations < max_iterations:
        grad = jac.T @ r
        grad_norm = float(np.max(np.abs(grad)))
        if ssr == 0.0 or grad_norm < GRADIENT_TOL:
            converged = True
            break
        iterations += 1
        normal = jac.T @ jac
        diag = np.diag(normal).copy()
        diag[diag <= 0] = 1e-12 * max(diag.max(), 1e-300)

        improved = False
        while not improved:
            try:
                delta = np.linalg.solve(normal + damping * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                damping *= 10.0
                delta = None
            if delta is not None:
                trial = dict(params)
                for name, d in zip(free, delta):
                    trial[name] = params[name] + float(d)
                if trial["width"] > 0:
                    r_trial = residual(trial)
                    ssr_trial = float(r_trial @ r_trial)
                    if ssr_trial < ssr:
                        improved = True
                        break
                damping *= 10.0
            if damping > 1e16:
                break
        if not improved:
            # no downhill step exists at working precision: relative decrease is zero
            converged = True
            break
        rel_drop = (ssr - ssr_trial) / ssr
        params, r, ssr = trial, r_trial, ssr_trial
        jac = jacobian(params)
        damping = max(damping / 10.0, 1e-15)
        if rel_drop < COST_RTOL:
            converged = True
            grad_norm = float(np.max(np.abs(jac.T @ r)))
            break

    if not converged:
        raise FitError(f"fit did not converge after {max_iterations} iterations")

    n, k = y.size, len(free)
    if n <= k or np.linalg.matrix_rank(jac) < k:
        raise FitError("degenerate fit geometry: normal equations are singular")
    s2 = ssr / (n - k)
    cov = s2 * np.linalg.inv(jac.T @ jac)
    cov = 0.5 * (cov + cov.T)
    sigma = {name: float(math.sqrt(max(cov[i, i], 0.0))) for i, name in enumerate(free)}
    for name in fixed:
        sigma[name] = 0.0
    return FitResult(
        model=GaussianModel(**params),
        sigma=sigma,
        covariance=cov,
        free_params=free,
        residual_rms=float(math.sqrt(ssr / n)),
        converged=True,
        iterations=iterations,
        gradient_norm=grad_norm,
    )


@dataclass(frozen=True)
class Measured:
    value: float
    rel_uncertainty: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.rel_uncertainty)):
            raise ParameterError("invalid experimental parameter: non-finite entry")
        if self.rel_uncertainty < 0:
            raise ParameterError("invalid experimental parameter: negative relative uncertainty")


ENTRY_NAMES = (
    "v_780", "v_1560", "a_780", "a_1560", "l_780", "l_1560",
    "eta_780", "eta_1560", "g_780", "g_1560",
)


@dataclass(frozen=True)
class ExperimentParams:
    """Detector outputs, attenuations, losses, efficiencies and gains at both wavelengths."""

    v_780: Measured
    v_1560: Measured
    a_780: Measured
    a_1560: Measured
    l_780: Measured
    l_1560: Measured
    eta_780: Measured
    eta_1560: Measured
    g_780: Measured
    g_1560: Measured
    confidence_multiplier: float = 3.0

    def __post_init__(self):
        for name in ENTRY_NAMES:
            entry = getattr(self, name)
            if name == "v_1560":
                ok = entry.value >= 0
            else:
                ok = entry.value > 0
            if not ok:
                raise ParameterError(f"invalid experimental parameter: {name} = {entry.value}")
        if not self.confidence_multiplier > 0:
            raise ParameterError("invalid experimental parameter: confidence_multiplier must be > 0")

    def entries(self) -> dict[str, Measured]:
        return {name: getattr(self, name) for name in ENTRY_NAMES}

    def with_values(self, **values: float) -> "ExperimentParams":
        """Copy with new central values, keeping the relative uncertainties."""
        changes = {k: replace(getattr(self, k), value=float(v)) for k, v in values.items()}
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {
            name: {"value": m.value, "rel_uncertainty": m.rel_uncertainty}
            for name, m in self.entries().items()
        }
        out["confidence_multiplier"] = self.confidence_multiplier
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentParams":
        missing = [n for n in ENTRY_NAMES if n not in data]
        if missing:
            raise ParameterError(f"invalid experimental parameter: missing {', '.join(missing)}")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ParameterError(f"invalid experimental parameter: unknown keys {sorted(extra)}")
        kwargs = {}
        for name in ENTRY_NAMES:
            entry = data[name]
            try:
                kwargs[name] = Measured(float(entry["value"]), float(entry.get("rel_uncertainty", 0.0)))
            except (TypeError, KeyError, ValueError) as exc:
                raise ParameterError(f"invalid experimental parameter: {name}: {exc}") from None
        kwargs["confidence_multiplier"] = float(data.get("confidence_multiplier", 3.0))
        return cls(**kwargs)


def load_params(path: str | os.PathLike) -> ExperimentParams:
    with open(path, encoding="utf-8") as fh:
        return ExperimentParams.from_dict(json.load(fh))


def save_params(params: ExperimentParams, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params.to_dict(), fh, indent=2)
        fh.write("\n")


def default_params() -> ExperimentParams:
    """The published parameter table shipped with the package."""
    text = resources.files("oscillaton").joinpath("data/table1.json").read_text(encoding="utf-8")
    return ExperimentParams.from_dict(json.loads(text))


def error_factor(params: ExperimentParams) -> float:
    """``1 + sqrt(sum of squared relative uncertainties)`` over all ten entries."""
    return 1.0 + math.sqrt(math.fsum(m.rel_uncertainty**2 for m in params.entries().values()))


@dataclass(frozen=True)
class BoundResult:
    f_e: float
    r_bound: float
    gamma_bound: float
    confidence_label: str
    v_780: float
    v_1560: float

    def as_dict(self) -> dict:
        return {
            "f_e": self.f_e,
            "r_bound": self.r_bound,
            "gamma_bound": self.gamma_bound,
            "confidence_label": self.confidence_label,
            "v_780": self.v_780,
            "v_1560": self.v_1560,
        }


def _confidence_label(k: float) -> str:
    if k == 3.0:
        return "99% (3 sigma convention; two-sided Gaussian 3 sigma is 99.73%)"
    return f"{k:g} sigma"


def ratio_bound(params: ExperimentParams, f_e: Optional[float] = None) -> BoundResult:
    """Upper bound on the inelastic/elastic rate ratio and the implied mixing angle."""
    if f_e is None:
        f_e = error_factor(params)
    p = params
    for name in ("v_780", "a_780", "l_780", "eta_1560", "g_1560"):
        if getattr(p, name).value == 0:
            raise ParameterError(f"invalid experimental parameter: {name} is zero")
    r = (
        p.confidence_multiplier
        * (p.v_1560.value / p.v_780.value)
        * (p.a_1560.value / p.a_780.value)
        * (p.l_1560.value / p.l_780.value)
        * (p.eta_780.value / p.eta_1560.value)
        * (p.g_780.value / p.g_1560.value)
        * f_e
    )
    if not (math.isfinite(r) and r >= 0):
        raise ParameterError(f"invalid experimental parameter: bound evaluates to {r}")
    return BoundResult(
        f_e=float(f_e),
        r_bound=r,
        gamma_bound=gamma_from_ratio(r),
        confidence_label=_confidence_label(p.confidence_multiplier),
        v_780=p.v_780.value,
        v_1560=p.v_1560.value,
    )


@dataclass(frozen=True)
class PipelineResult:
    bound: BoundResult
    fit_780: FitResult
    fit_1560: FitResult
    params: ExperimentParams


def analyse_traces(trace_780: ScanTrace, trace_1560: ScanTrace, params: ExperimentParams) -> PipelineResult:
    elastic = fit_gaussian(trace_780)
    if not elastic.model.peak > 0:
        raise OscillatonError(f"elastic fit found no peak (peak = {elastic.model.peak:g} V)")
    w, c = elastic.model.width, elastic.model.center
    inelastic = fit_gaussian(trace_1560, initial_guess(trace_1560).replace(peak=0.0),
                             fixed_width=w, fixed_center=c)
    used = params.with_values(v_780=elastic.model.peak, v_1560=inelastic.sigma["peak"])
    bound = ratio_bound(used, error_factor(used))
    return PipelineResult(bound=bound, fit_780=elastic, fit_1560=inelastic, params=used)


def full_pipeline(trace_780: ScanTrace, trace_1560: ScanTrace, params: ExperimentParams) -> BoundResult:
    return analyse_traces(trace_780, trace_1560, params).bound
