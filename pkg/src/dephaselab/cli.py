"""Batch command-line surface.

Subcommands:

* evolve      - evolve one state, emit it as JSON
* classify    - verdict line plus witness metrics as JSON
* sweep       - CSV grids of witnesses, fidelity curves or verdicts
* thresholds  - JSON table of the family's transition times
* verify-lemmas - run the certified-claim checks, exit 1 on any failure

Exit codes: 0 success, 1 verification failure, 2 usage error (bad flags,
unreadable or malformed input files, malformed ranges), 3 content
validation failure (parameters or matrices outside the physical domain).
All results go to standard output, diagnostics to standard error; output
is byte-identical across reruns with identical flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import channels, criteria, family
from .channels import NoiseParams, apply_channel, kraus_ground_excited
from .linalg import TOL, NotHermitianError, NotPSDError
from .qstate import (
    BadShapeError,
    DensityMatrix,
    Dims,
    TraceNotOneError,
    ZeroTraceError,
    random_state,
    state_from_json,
    state_to_json,
)


class UsageError(Exception):
    """Maps to exit code 2."""


class ContentError(Exception):
    """Maps to exit code 3."""


_CONTENT_ERRORS = (
    ContentError,
    family.AlphaDomainError,
    BadShapeError,
    NotHermitianError,
    TraceNotOneError,
    NotPSDError,
    ZeroTraceError,
)


@dataclass(frozen=True)
class ThresholdReport:
    """The family's transition times for one (alpha, gamma) setting.

    Times are floats, math.inf where the transition never happens, or
    None where it is undefined (no PPT onset exists for alpha <= 4).
    """

    alpha: float
    gamma: float
    t_d_analytic: Optional[float]
    t_d_numeric: Optional[float]
    realignment_zero: Optional[float]
    certificate_onset: Optional[float]

    def to_json(self) -> str:
        def encode(v: Optional[float]):
            if v is None:
                return None
            return "inf" if math.isinf(v) else v

        doc = {
            "alpha": self.alpha,
            "gamma": self.gamma,
            "t_d_analytic": encode(self.t_d_analytic),
            "t_d_numeric": encode(self.t_d_numeric),
            "realignment_zero": encode(self.realignment_zero),
            "certificate_onset": encode(self.certificate_onset),
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError(f"must be finite and nonnegative, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be finite and positive, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def _load_state_file(path: str) -> DensityMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    try:
        return state_from_json(text)
    except (NotHermitianError, TraceNotOneError, NotPSDError) as exc:
        raise ContentError(f"invalid state in {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"malformed state file {path}: {exc}") from exc


def _evolved_state(initial: str, alpha: float, noise: NoiseParams) -> DensityMatrix:
    """Evolve the requested initial state to noise.t.

    The built-in "rho" uses the closed form; "rho-prime" and file states
    go through the Kraus path (the two agree within 1e-12, a test-pinned
    fact). File states must be qutrit-qutrit to match the channel.
    """
    if initial == "rho":
        return family.evolved_closed_form(family.FamilyParams(alpha, noise))
    if initial == "rho-prime":
        base = family.swapped_state(alpha)
    else:
        base = _load_state_file(initial)
        if (base.dims.da, base.dims.db) != (3, 3):
            raise ContentError(
                f"the ground/excited channel needs a qutrit-qutrit state, got dims "
                f"({base.dims.da}, {base.dims.db})"
            )
    return apply_channel(base, kraus_ground_excited(noise))


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def cmd_evolve(args: argparse.Namespace) -> int:
    noise = NoiseParams(args.gamma_a, args.gamma_b, args.t)
    print(state_to_json(_evolved_state(args.initial, args.alpha, noise)))
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    noise = NoiseParams(args.gamma_a, args.gamma_b, args.t)
    state = _evolved_state(args.initial, args.alpha, noise)
    blocks = family.certificate_blocks() if args.certificate == "three-block" else None
    result = criteria.classify(state, blocks)
    print(result.verdict.value)
    metrics = {
        "verdict": result.verdict.value,
        "min_pt_eigenvalue": result.min_pt_eigenvalue,
        "realignment_excess": result.realignment_excess,
        "certificate_passed": result.certificate_passed,
    }
    print(json.dumps(metrics, sort_keys=True))
    return 0


def _grid(spec: list[float], what: str) -> np.ndarray:
    start, end, steps = spec
    if not all(math.isfinite(x) for x in spec):
        raise UsageError(f"{what} range must be finite, got {spec}")
    if steps != int(steps) or int(steps) < 2:
        raise UsageError(f"{what} range needs an integer step count >= 2, got {steps}")
    if not start < end:
        raise UsageError(f"{what} range needs start < end, got {start} >= {end}")
    return np.linspace(start, end, int(steps))


def cmd_sweep(args: argparse.Namespace) -> int:
    ts = _grid(args.t_range, "t")
    if np.any(ts < 0):
        raise UsageError("t range must be nonnegative")
    if args.gamma is not None and args.gamma_range is not None:
        raise UsageError("pass either --gamma or --gamma-range, not both")
    if args.gamma_range is not None:
        gammas = _grid(args.gamma_range, "gamma")
        if np.any(gammas < 0):
            raise UsageError("gamma range must be nonnegative")
    else:
        gammas = np.array([1.0 if args.gamma is None else args.gamma])
    writer = csv.writer(sys.stdout, lineterminator="\n")
    if args.quantity == "fidelity":
        writer.writerow(["t", "gamma", "f_rho", "f_rho_prime"])
        for t in ts:
            for g in gammas:
                writer.writerow(
                    [_fmt(t), _fmt(g), _fmt(family.fidelity_initial(g, t)), _fmt(family.fidelity_swapped(g, t))]
                )
        return 0
    blocks = family.certificate_blocks() if args.initial == "rho" else None
    header = {"pt-min-eig": "value", "realignment": "value", "verdict": "verdict"}
    writer.writerow(["t", "gamma", header[args.quantity]])
    for t in ts:
        for g in gammas:
            state = _evolved_state(args.initial, args.alpha, NoiseParams(g, g, t))
            if args.quantity == "pt-min-eig":
                writer.writerow([_fmt(t), _fmt(g), _fmt(criteria.min_pt_eigenvalue(state))])
            elif args.quantity == "realignment":
                writer.writerow([_fmt(t), _fmt(g), _fmt(criteria.realignment_excess(state))])
            else:
                writer.writerow([_fmt(t), _fmt(g), criteria.classify(state, blocks).verdict.value])
    return 0


def _crossing(curve: Callable[[float], float], cap: float = 1.0e6) -> float:
    """Root of curve on t >= 0 by doubling then bisection; inf past cap.

    The sign test treats values in [0, 1e-12] as not yet positive, so a
    curve that only decays to zero (never genuinely crossing) reports inf
    instead of chasing eigensolver noise.
    """
    floor = 1e-12
    sign0 = curve(0.0) > floor
    hi = 0.5
    while hi <= cap:
        if (curve(hi) > floor) != sign0:
            return criteria.find_sign_change(curve, 0.0, hi, tol=1e-9)
        hi *= 2
    return math.inf


def cmd_thresholds(args: argparse.Namespace) -> int:
    alpha, gamma = args.alpha, args.gamma

    def evolved(t: float) -> DensityMatrix:
        return family.evolved_closed_form(
            family.FamilyParams(alpha, NoiseParams(gamma, gamma, t))
        )

    try:
        t_d_analytic: Optional[float] = family.ppt_onset_time(alpha, gamma)
    except family.AlreadyPptError:
        t_d_analytic = None

    def pt_curve(t: float) -> float:
        return criteria.min_pt_eigenvalue(evolved(t))

    t_d_numeric = None if pt_curve(0.0) >= -TOL.verdict else _crossing(pt_curve)

    def realignment_curve(t: float) -> float:
        return criteria.realignment_excess(evolved(t))

    realignment_zero = _crossing(realignment_curve)

    blocks = family.certificate_blocks()

    def certificate_margin(t: float) -> float:
        result = criteria.separability_certificate(evolved(t), blocks)
        return min(min(b.min_eigenvalue, b.min_pt_eigenvalue) for b in result.blocks)

    certificate_onset = _crossing(certificate_margin)

    report = ThresholdReport(
        alpha, gamma, t_d_analytic, t_d_numeric, realignment_zero, certificate_onset
    )
    print(report.to_json())
    return 0


def _verify_checks(seed: int, samples: int, inject_fault: bool):
    """Yield (name, passed, detail) for every certified-claim check."""
    alpha = 4.5
    rho0 = family.initial_state(alpha)
    rho_prime0 = family.swapped_state(alpha)
    onset = family.ppt_onset_time(alpha, 1.0)

    probe = family.one_sided_probe(rho_prime0, "B", NoiseParams(1.0, 1.0, 1.0))
    yield (
        "one-sided probe certifies the swapped family (side B, t=1)",
        probe.entangled,
        f"witness {probe.min_pt_eigenvalue:.6g}",
    )
    probe = family.one_sided_probe(rho_prime0, "A", NoiseParams(1.0, 1.0, 1.0))
    yield (
        "one-sided probe certifies the swapped family (side A, t=1)",
        probe.entangled,
        f"witness {probe.min_pt_eigenvalue:.6g}",
    )
    t_before, t_after = 0.3, 1.0
    probe = family.one_sided_probe(rho0, "B", NoiseParams(1.0, 1.0, t_before))
    yield (
        f"one-sided probe flags the unswapped family before its PPT onset (t={t_before} < {onset:.4f})",
        probe.entangled,
        f"witness {probe.min_pt_eigenvalue:.6g}",
    )
    probe = family.one_sided_probe(rho0, "B", NoiseParams(1.0, 1.0, t_after))
    yield (
        f"one-sided probe declines the unswapped family after its PPT onset (t={t_after} > {onset:.4f})",
        not probe.entangled,
        f"witness {probe.min_pt_eigenvalue:.6g}",
    )
    probe = family.two_sided_probe(rho_prime0)
    yield (
        "two-sided probe certifies the swapped family for all finite time",
        probe.entangled,
        f"witness {probe.min_pt_eigenvalue:.6g}",
    )
    probe = family.two_sided_probe(rho0)
    yield (
        "two-sided probe declines the unswapped family",
        not probe.entangled,
        f"witness {probe.min_pt_eigenvalue:.6g}",
    )

    grid = [k * 0.5 for k in range(21)]
    witnesses = [
        criteria.qubit_block_witness(
            apply_channel(rho_prime0, kraus_ground_excited(NoiseParams(1.0, 1.0, t))),
            (1, 2),
            (1, 2),
        )
        for t in grid
    ]
    yield (
        "swapped family witness stays negative on t in [0, 10]",
        max(witnesses) < -TOL.verdict,
        f"max witness {max(witnesses):.6g}",
    )

    for d in (3, 4):
        spec = family.McSpec(d, np.full((d, d), 1.0 / d))
        report = family.mc_report(spec, NoiseParams(1.0, 1.0, 0.7))
        yield (
            f"maximally correlated state (d={d}, uniform): pattern kept, entangled, distillable",
            report.still_mc and report.entangled and report.distillable,
            f"deviation {report.mc_deviation:.3g}, witness {report.witness_value}",
        )
    diag_spec = family.McSpec(3, np.diag([0.2, 0.3, 0.5]))
    report = family.mc_report(diag_spec, NoiseParams(1.0, 1.0, 0.7))
    yield (
        "maximally correlated state with diagonal coefficients stays separable",
        report.still_mc and not report.entangled and not report.distillable,
        f"deviation {report.mc_deviation:.3g}",
    )

    plus = family.mc_state(family.McSpec(3, np.full((3, 3), 1.0 / 3.0)))
    yield (
        "projection reads a maximally correlated block off the uniform state",
        family.mc_projection(plus, (0, 1), (0, 1)) is not None,
        "",
    )
    yield (
        "projection strictness declines the unswapped family corner",
        family.mc_projection(rho0, (1, 2), (1, 2)) is None,
        "",
    )
    yield (
        "projection strictness declines the swapped family corner",
        family.mc_projection(rho_prime0, (1, 2), (1, 2)) is None,
        "",
    )

    expected_rho_limit = (
        family.LimitVerdict.DISTILLABLE_LIMIT if inject_fault else family.LimitVerdict.SEPARABLE_LIMIT
    )
    verdict = family.limit_verdict(rho0)
    yield (
        "infinite-time limit of the unswapped family is separable",
        verdict == expected_rho_limit,
        f"got {verdict.value}",
    )
    verdict = family.limit_verdict(rho_prime0)
    yield (
        "infinite-time limit of the swapped family stays distillable",
        verdict == family.LimitVerdict.DISTILLABLE_LIMIT,
        f"got {verdict.value}",
    )

    rng = np.random.default_rng(seed)
    dims = Dims(3, 3)
    states = [random_state(rng, dims) for _ in range(samples)]

    bad = 0
    for s in states:
        lim = channels.infinite_limit(s)
        if criteria.min_pt_eigenvalue(lim) >= -TOL.verdict:
            if criteria.realignment_excess(lim) > TOL.verdict:
                bad += 1
    yield (
        f"no random infinite-time limit is PPT-entangled-witnessed ({samples} samples)",
        bad == 0,
        f"{bad} violations",
    )

    bad = 0
    for s in states:
        try:
            probe = family.two_sided_probe(s)
        except ZeroTraceError:
            continue
        if probe.entangled and criteria.min_pt_eigenvalue(s) >= -TOL.verdict:
            bad += 1
    yield (
        f"two-sided probe verdicts imply NPT parents ({samples} samples)",
        bad == 0,
        f"{bad} violations",
    )

    bad = 0
    noise = NoiseParams(1.0, 1.0, 0.7)
    ks = kraus_ground_excited(noise)
    for s in states:
        try:
            probe = family.one_sided_probe(s, "B", noise)
        except ZeroTraceError:
            continue
        if probe.entangled:
            evolved = apply_channel(s, ks)
            if criteria.min_pt_eigenvalue(evolved) >= -TOL.verdict:
                bad += 1
    yield (
        f"one-sided probe verdicts imply NPT evolved parents ({samples} samples, t=0.7)",
        bad == 0,
        f"{bad} violations",
    )


def cmd_verify_lemmas(args: argparse.Namespace) -> int:
    failures = 0
    total = 0
    for name, passed, detail in _verify_checks(args.seed, args.samples, args.inject_fault):
        total += 1
        if passed:
            print(f"[ok] {name}")
        else:
            failures += 1
            suffix = f": {detail}" if detail else ""
            print(f"[FAIL] {name}{suffix}")
    print(f"{total - failures}/{total} checks passed")
    return 1 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dephaselab",
        description="Evolve bipartite qutrit states under local dephasing and classify their entanglement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_state_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--alpha", type=float, default=4.5, help="family population parameter in (3, 5] (default 4.5)")
        p.add_argument("--gamma-a", dest="gamma_a", type=_nonneg_float, default=1.0, help="dephasing rate on side A (default 1)")
        p.add_argument("--gamma-b", dest="gamma_b", type=_nonneg_float, default=1.0, help="dephasing rate on side B (default 1)")
        p.add_argument("--t", type=_nonneg_float, required=True, help="evolution time")
        p.add_argument("--initial", default="rho", help="rho, rho-prime, or a state JSON file (default rho)")

    p = sub.add_parser("evolve", help="evolve one state and print it as JSON")
    add_state_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("classify", help="print the entanglement verdict and witness metrics")
    add_state_flags(p)
    p.add_argument(
        "--certificate",
        choices=["three-block"],
        default=None,
        help="enable the family's three-block separability certificate",
    )
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="print a CSV grid over time (and optionally rate)")
    p.add_argument("--quantity", required=True, choices=["pt-min-eig", "realignment", "fidelity", "verdict"])
    p.add_argument("--alpha", type=float, default=4.5, help="family population parameter (default 4.5)")
    p.add_argument(
        "--t-range", dest="t_range", nargs=3, type=float, default=[0.0, 3.0, 121],
        metavar=("START", "END", "STEPS"), help="time grid (default 0 3 121)",
    )
    p.add_argument("--gamma", type=_nonneg_float, default=None, help="single symmetric rate (default 1)")
    p.add_argument(
        "--gamma-range", dest="gamma_range", nargs=3, type=float, default=None,
        metavar=("START", "END", "STEPS"), help="rate grid, e.g. 0.1 2 20 (excludes --gamma)",
    )
    p.add_argument("--initial", default="rho", help="rho, rho-prime, or a state JSON file (ignored for fidelity)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thresholds", help="print the family's transition times as JSON")
    p.add_argument("--alpha", type=float, default=4.5, help="family population parameter (default 4.5)")
    p.add_argument("--gamma", type=_positive_float, default=1.0, help="symmetric dephasing rate (default 1)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("verify-lemmas", help="run the certified-claim checks")
    p.add_argument("--seed", type=int, default=42, help="random state seed (default 42)")
    p.add_argument("--samples", type=_nonneg_int, default=200, help="random states per section (default 200)")
    p.add_argument("--inject-fault", dest="inject_fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_lemmas)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _CONTENT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
