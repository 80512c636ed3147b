"""Command-line front end.

Every subcommand builds a JSON run report (``--report FILE``) and prints a
short human summary.  Exit codes: 0 ok, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .analysis import (
    ExperimentParams,
    analyse_traces,
    default_params,
    error_factor,
    fit_gaussian,
    load_params,
    ratio_bound,
)
from .errors import OscillatonError
from .fock import DEFAULT_LEVEL_CUTOFF, DEFAULT_OSC_CUTOFF, ModeSpace, mixing_params
from .gaussian import PARAM_UNITS, GaussianModel
from .invariants import COMMUTATOR_TOL, ORTHONORMALITY_TOL, run_invariant_suite
from .scattering import (
    Kinematics,
    RATE_CONSTANT,
    decompose_channels,
    inelastic_frequency,
    omega_from_wavelength,
    predicted_ratio,
)
from .traces import DEFAULT_SAMPLES, DEFAULT_SPAN_GHZ, TraceSpec, generate_trace, read_trace, write_trace

OMEGA_780 = omega_from_wavelength(780e-9)


class Report:
    """Accumulates a run report; every numeric output carries a unit."""

    def __init__(self, command: str, inputs: dict[str, Any]):
        self.command = command
        self.inputs = inputs
        self.outputs: dict[str, dict[str, Any]] = {}
        self.status = "ok"
        self.message: Optional[str] = None

    def add(self, name: str, value, unit: str) -> None:
        self.outputs[name] = {"value": value, "unit": unit}

    def fail(self, message: str) -> None:
        self.status = "error"
        self.message = message

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "status": self.status,
        }
        if self.message is not None:
            out["message"] = self.message
        return out

    def summary(self) -> str:
        lines = [f"[{self.command}] status: {self.status}"]
        for name, out in self.outputs.items():
            value, unit = out["value"], out["unit"]
            if isinstance(value, float):
                value = f"{value:.6g}"
            elif isinstance(value, (list, dict)):
                value = json.dumps(value)
            lines.append(f"  {name} = {value} {unit}".rstrip())
        if self.message:
            lines.append(f"  error: {self.message}")
        return "\n".join(lines)


def _add_fit(report: Report, prefix: str, fit) -> None:
    for name, value in fit.model.as_dict().items():
        report.add(f"{prefix}{name}", value, PARAM_UNITS[name])
        report.add(f"{prefix}{name}_sigma", fit.sigma[name], PARAM_UNITS[name])
    report.add(f"{prefix}residual_rms", fit.residual_rms, "V")
    report.add(f"{prefix}iterations", fit.iterations, "count")


def _add_bound(report: Report, bound) -> None:
    report.add("v_780", bound.v_780, "V")
    report.add("v_1560", bound.v_1560, "V")
    report.add("f_e", bound.f_e, "dimensionless")
    report.add("r_bound", bound.r_bound, "dimensionless")
    report.add("gamma_bound", bound.gamma_bound, "rad")
    report.add("confidence", bound.confidence_label, "label")


def _params(path: Optional[str]) -> ExperimentParams:
    return default_params() if path is None else load_params(path)


def cmd_verify(args, report: Report) -> None:
    space = ModeSpace(args.levels, args.osc)
    res = run_invariant_suite(space, n_gammas=args.gamma_grid, gamma_max=args.gamma_max)
    report.add("dim", space.dim, "count")
    report.add("commutator_max_deviation", res.commutator_deviation, "dimensionless")
    report.add("commutator_tolerance", COMMUTATOR_TOL, "dimensionless")
    report.add("single_sector_max_deviation", res.single_sector_deviation, "dimensionless")
    report.add("orthonormality_max_deviation", res.orthonormality_deviation, "dimensionless")
    report.add("orthonormality_tolerance", ORTHONORMALITY_TOL, "dimensionless")
    report.add("adjoint_involution", res.adjoint_involution, "bool")
    if not res.ok:
        report.fail("invariant check exceeded tolerance")


def cmd_predict(args, report: Report) -> None:
    pred = predicted_ratio(args.gamma)
    report.add("gamma", pred.gamma, "rad")
    report.add("R", pred.ratio, "dimensionless")
    report.add("R_constant", RATE_CONSTANT, "dimensionless")

    p = mixing_params(args.gamma)
    report.add("beta", p.beta, "dimensionless")
    space = ModeSpace(args.levels, args.osc)
    dec = decompose_channels(space, p, args.initial_level)
    report.add("elastic_amplitude", dec.elastic_amplitude, "dimensionless")
    channels = []
    for idx, ratio in dec.ratios().items():
        entry = {"occupation": list(space.occupation(idx)), "amplitude": dec.amplitude(idx), "ratio": ratio}
        if pred.gamma != 0:
            entry["ratio_over_gamma2"] = ratio / pred.gamma**2
        channels.append(entry)
    report.add("pair_channels", channels, "dimensionless")
    report.add("max_pair_ratio", max(c["ratio"] for c in channels), "dimensionless")

    kin = Kinematics(omega_in=args.omega, mass=args.mass)
    report.add("omega_in", kin.omega_in, "rad/s")
    report.add("mass", kin.mass, "kg")
    omega_out = inelastic_frequency(kin)
    report.add("omega_inelastic", omega_out, "rad/s")
    report.add("wavelength_inelastic", 2 * math.pi * kin.c_light / omega_out, "m")


def cmd_fit(args, report: Report) -> None:
    trace = read_trace(args.trace)
    fit = fit_gaussian(trace, fixed_width=args.fix_width, fixed_center=args.fix_center)
    report.add("n_samples", len(trace), "count")
    _add_fit(report, "", fit)
    if args.curve_out:
        model = fit.model(trace.detuning)
        with open(args.curve_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("detuning_ghz,voltage_v,model_v\n")
            for d, v, m in zip(trace.detuning, trace.voltage, model):
                fh.write(f"{d!r},{v!r},{m!r}\n")


def cmd_bound(args, report: Report) -> None:
    params = _params(args.params)
    overrides = {}
    if args.v780 is not None:
        overrides["v_780"] = args.v780
    if args.v1560 is not None:
        overrides["v_1560"] = args.v1560
    if overrides:
        params = params.with_values(**overrides)
    report.inputs["resolved_params"] = params.to_dict()
    _add_bound(report, ratio_bound(params, error_factor(params)))


def cmd_gen(args, report: Report) -> None:
    spec = TraceSpec(
        model=GaussianModel(peak=args.peak, center=args.center, width=args.width, baseline=args.baseline),
        sign=-1 if args.dip else 1,
        noise_sigma=args.noise,
        n_samples=args.samples,
        span=args.span,
        seed=args.seed,
        meta=args.meta,
    )
    trace = generate_trace(spec)
    write_trace(trace, args.out)
    report.add("n_samples", len(trace), "count")
    report.add("voltage_min", float(trace.voltage.min()), "V")
    report.add("voltage_max", float(trace.voltage.max()), "V")
    report.add("voltage_std", float(np.std(trace.voltage)), "V")


def cmd_pipeline(args, report: Report) -> None:
    params = _params(args.params)
    res = analyse_traces(read_trace(args.trace780), read_trace(args.trace1560), params)
    _add_fit(report, "fit780_", res.fit_780)
    _add_fit(report, "fit1560_", res.fit_1560)
    _add_bound(report, res.bound)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="FILE", help="write the JSON run report here")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of the summary")

    parser = argparse.ArgumentParser(
        prog="oscillaton",
        description="Oscillaton operator algebra checks and mixing-angle bound analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("verify", parents=[common], help="run the operator-algebra invariant suite")
    p.add_argument("--gamma-grid", type=int, default=20, metavar="N")
    p.add_argument("--gamma-max", type=float, default=0.5)
    p.add_argument("--levels", type=int, default=DEFAULT_LEVEL_CUTOFF, metavar="L")
    p.add_argument("--osc", type=int, default=DEFAULT_OSC_CUTOFF, metavar="M")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("predict", parents=[common], help="predicted ratio, pair channels and kinematics")
    p.add_argument("--gamma", type=float, required=True, metavar="G")
    p.add_argument("--mass", type=float, default=0.0, metavar="KG")
    p.add_argument("--omega", type=float, default=OMEGA_780, metavar="RAD_S")
    p.add_argument("--levels", type=int, default=DEFAULT_LEVEL_CUTOFF, metavar="L")
    p.add_argument("--osc", type=int, default=DEFAULT_OSC_CUTOFF, metavar="M")
    p.add_argument("--initial-level", type=int, default=0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("fit", parents=[common], help="fit a Gaussian to a trace file")
    p.add_argument("--trace", required=True, metavar="FILE")
    p.add_argument("--fix-width", type=float, default=None, metavar="W")
    p.add_argument("--fix-center", type=float, default=None, metavar="C")
    p.add_argument("--curve-out", default=None, metavar="FILE", help="CSV of data and fitted curve")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bound", parents=[common], help="error factor and bounds from a parameter file")
    p.add_argument("--params", default=None, metavar="FILE", help="defaults to the packaged table")
    p.add_argument("--v780", type=float, default=None, metavar="X")
    p.add_argument("--v1560", type=float, default=None, metavar="Y")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("gen", parents=[common], help="write a synthetic scan trace")
    p.add_argument("--peak", type=float, required=True, metavar="V")
    p.add_argument("--width", type=float, required=True, metavar="W")
    p.add_argument("--noise", type=float, default=0.0, metavar="S")
    p.add_argument("--seed", type=int, default=0, metavar="K")
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--dip", action="store_true", help="absorption dip instead of a peak")
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--baseline", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--span", type=float, default=DEFAULT_SPAN_GHZ)
    p.add_argument("--meta", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("pipeline", parents=[common], help="fit both traces and compute the bound")
    p.add_argument("--trace780", required=True, metavar="FILE")
    p.add_argument("--trace1560", required=True, metavar="FILE")
    p.add_argument("--params", default=None, metavar="FILE")
    p.set_defaults(func=cmd_pipeline)
    return parser


_NOT_INPUTS = {"func", "command", "report", "json"}


def dispatch(argv: Optional[list[str]] = None) -> tuple[int, Optional[dict]]:
    """Parse ``argv``, run the subcommand and return ``(exit_code, report)``.

    Usage errors return code 2 and no report.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None

    inputs = {k: v for k, v in vars(args).items() if k not in _NOT_INPUTS}
    report = Report(args.command, inputs)
    try:
        args.func(args, report)
    except (OscillatonError, OSError) as exc:
        report.fail(str(exc))

    payload = report.as_dict()
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(report.summary())
    if report.status != "ok":
        print(f"error: {report.message}", file=sys.stderr)
    return (0 if report.status == "ok" else 1), payload


def main(argv: Optional[list[str]] = None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
