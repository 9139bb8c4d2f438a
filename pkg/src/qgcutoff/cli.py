"""Command-line interface: cutoff profiles, single bounds, thresholds,
moments, and verification suites, with deterministic CSV/JSON output.

Commands:

- ``profile``: one row per step count k over a grid given by --k, --c,
  --k-range or --c-range (c maps to k = N ln N / rate + c N, where rate is
  tau, 1 - cos(theta), or 2 depending on the family);
- ``bound``: a single JSON record with the series interval, certificate
  hypotheses, and both TV bounds;
- ``thresholds``: the closed-form constants C, D, Q and nominal cutoffs;
- ``moments``: circle-measure moments m_eps and lambda-moments;
- ``verify``: the inequality suites with negative controls.

Output is byte-identical across repeated runs and across --threads values:
there is no randomness, reduction orders are fixed, and floats are printed
with their shortest round-trip representation.  Exit codes: 0 success, 1
verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

from .bounds import (
    DEFAULT_TRUNCATION,
    MIXTURE_DEFAULT_TRUNCATION,
    A_k_for_query,
    TruncationConfig,
    WalkQuery,
    nominal_cutoff,
    threshold_C,
    threshold_D,
    threshold_Q,
    tv_lower,
    tv_upper_from_A,
    wreath_certificate_threshold,
    cutoff_profile,
)
from .numerics import lambda_moment
from .structures import (
    CircleMeasure,
    FiniteGroup,
    GroupState,
    cyclic_group,
    haar_state,
    load_cayley,
    load_group_state,
    moment,
    trivial_state,
)
from .verify import format_report, negative_controls, report_to_dict, run_all

__all__ = ["main", "RunConfig"]

_FAMILY_TOKENS = {
    "unitary": "unitary-free",
    "unitary-free": "unitary-free",
    "eval": "unitary-eval",
    "unitary-eval": "unitary-eval",
    "mixture": "mixture",
    "wreath": "wreath",
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation; collected in one place so outputs can echo it."""

    command: str
    family: str | None = None
    N: int | None = None
    tau: float | None = None
    theta: float | None = None
    group_source: str | None = None
    psi_source: str | None = None
    nu_source: str | None = None
    k_values: tuple[float, ...] = ()
    max_p: int | None = None
    max_total: int | None = None
    tail_mode: str = "geometric-certificate"
    quad_points: int = 2048
    output: str | None = None
    fmt: str = "csv"
    threads: int = 1
    round_k: bool = False


class CliError(Exception):
    """Invalid input; message names the offending flag."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgcutoff",
        description="Certified total-variation bounds for central random walks "
        "on free unitary quantum groups and free wreath products.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_walk: bool) -> None:
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; accepted for interface stability, results never depend on it")
        if with_walk:
            p.add_argument("--family", required=True, choices=sorted(_FAMILY_TOKENS))
            p.add_argument("--N", type=int, required=True)
            p.add_argument("--tau", type=float)
            p.add_argument("--theta", type=float)
            p.add_argument("--group", help="cyclic:<s> or cayley:<path>")
            p.add_argument("--psi", help="trivial, haar, or file:<path>")
            p.add_argument("--nu", help="haar, delta:<theta>, atoms:<path>, or porod")
            p.add_argument("--k", type=float)
            p.add_argument("--c", type=float)
            p.add_argument("--k-range", help="kmin:kmax:kstep")
            p.add_argument("--c-range", help="cmin:cmax:cstep")
            p.add_argument("--round-k", action="store_true", help="round each k to the nearest integer")
            p.add_argument("--max-p", type=int)
            p.add_argument("--max-total", type=int)
            p.add_argument("--tail-mode", default="geometric-certificate",
                           choices=["geometric-certificate", "none"])
            p.add_argument("--quad-points", type=int, default=2048)

    p_profile = sub.add_parser("profile", help="cutoff profile over a k grid")
    add_common(p_profile, with_walk=True)
    p_profile.add_argument("--format", dest="fmt", default="csv", choices=["csv", "json"])

    p_bound = sub.add_parser("bound", help="single-point bound record")
    add_common(p_bound, with_walk=True)
    p_bound.add_argument("--format", dest="fmt", default="json", choices=["json"])

    p_thresh = sub.add_parser("thresholds", help="closed-form constants and cutoffs")
    p_thresh.add_argument("--tau", type=float, required=True)
    p_thresh.add_argument("--theta", type=float)
    p_thresh.add_argument("--N", type=int, default=100)
    add_common(p_thresh, with_walk=False)

    p_mom = sub.add_parser("moments", help="circle-measure moments and lambda-moments")
    p_mom.add_argument("--nu", help="haar, delta:<theta>, atoms:<path>, or porod")
    p_mom.add_argument("--N", type=int, help="size parameter for the Porod mixture")
    p_mom.add_argument("--eps", help="comma-separated winding exponents, e.g. 0,1,-2")
    p_mom.add_argument("--lambda-moments", dest="lambda_moments",
                       help="N:LMAX — moments of 1 - cos under the Porod mixture")
    p_mom.add_argument("--quad-points", type=int, default=2048)
    add_common(p_mom, with_walk=False)

    p_verify = sub.add_parser("verify", help="run inequality suites")
    p_verify.add_argument("--suite", default="all",
                          help="all, or comma-separated suite names")
    p_verify.add_argument("--report", help="write the JSON report to this file")
    add_common(p_verify, with_walk=False)
    return parser


def _merge_range_flags(argv: list[str]) -> list[str]:
    # argparse rejects values like "-5:5:1" after a separate flag token, so
    # fold them into --flag=value form
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--k-range", "--c-range") and i + 1 < len(argv) and ":" in argv[i + 1]:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _parse_nu(source: str | None, N: int | None, quad_points: int) -> CircleMeasure:
    if source is None or source == "delta:0" or source == "delta:0.0":
        return CircleMeasure.delta(0.0)
    if source == "haar":
        return CircleMeasure.haar()
    if source == "porod":
        if N is None:
            raise CliError("--nu porod needs --N")
        return CircleMeasure.porod(N)
    if source.startswith("delta:"):
        return CircleMeasure.delta(float(source.split(":", 1)[1]))
    if source.startswith("atoms:"):
        path = source.split(":", 1)[1]
        pairs = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                angle, weight = line.split()
                pairs.append((float(angle), float(weight)))
        return CircleMeasure.atomic(pairs)
    raise CliError(f"--nu: unknown measure spec {source!r}")


def _parse_group(source: str | None) -> FiniteGroup:
    if source is None:
        raise CliError("--group is required for the wreath family")
    if source.startswith("cyclic:"):
        return cyclic_group(int(source.split(":", 1)[1]))
    if source.startswith("cayley:"):
        path = source.split(":", 1)[1]
        with open(path, "r", encoding="utf-8") as fh:
            return load_cayley(fh.read())
    raise CliError(f"--group: unknown group spec {source!r}")


def _parse_psi(source: str | None, group: FiniteGroup) -> GroupState:
    if source is None or source == "trivial":
        return trivial_state(group)
    if source == "haar":
        return haar_state(group)
    if source.startswith("file:"):
        path = source.split(":", 1)[1]
        with open(path, "r", encoding="utf-8") as fh:
            return load_group_state(group, fh.read())
    raise CliError(f"--psi: unknown state spec {source!r}")


def _float_grid(lo: float, hi: float, step: float, flag: str) -> list[float]:
    if step <= 0:
        raise CliError(f"{flag}: step must be > 0")
    out = []
    x = lo
    while x <= hi + 1e-9 * max(1.0, abs(hi)):
        out.append(x)
        x = x + step
    return out


def _build_query(args: argparse.Namespace) -> tuple[WalkQuery, RunConfig]:
    family = _FAMILY_TOKENS[args.family]
    N = args.N
    quad_points = args.quad_points
    nu = None
    group = None
    psi = None
    tau = args.tau
    theta = args.theta
    try:
        if family == "unitary-free":
            if tau is None:
                raise CliError("--tau is required for the unitary family")
            nu = _parse_nu(args.nu, N, quad_points)
            q = WalkQuery("unitary-free", N, 0.0, tau=tau, nu=nu, quad_points=quad_points)
        elif family == "unitary-eval":
            if theta is None:
                raise CliError("--theta is required for the eval family")
            q = WalkQuery("unitary-eval", N, 0.0, theta=theta, quad_points=quad_points)
        elif family == "mixture":
            q = WalkQuery("mixture", N, 0.0, quad_points=quad_points)
        else:
            if tau is None:
                raise CliError("--tau is required for the wreath family")
            group = _parse_group(args.group)
            psi = _parse_psi(args.psi, group)
            q = WalkQuery("wreath", N, 0.0, tau=tau, group=group, psi=psi, quad_points=quad_points)
    except ValueError as exc:
        raise CliError(f"invalid walk parameters: {exc}") from exc

    k_flags = [name for name, val in
               [("--k", args.k), ("--c", args.c), ("--k-range", args.k_range), ("--c-range", args.c_range)]
               if val is not None]
    if len(k_flags) != 1:
        raise CliError("exactly one of --k, --c, --k-range, --c-range is required, got: "
                       + (", ".join(k_flags) if k_flags else "none"))
    cutoff = nominal_cutoff(q.with_k(0.0))
    if args.k is not None:
        ks = [args.k]
    elif args.c is not None:
        ks = [cutoff + args.c * N]
    elif args.k_range is not None:
        parts = args.k_range.split(":")
        if len(parts) != 3:
            raise CliError("--k-range must be kmin:kmax:kstep")
        ks = _float_grid(float(parts[0]), float(parts[1]), float(parts[2]), "--k-range")
    else:
        parts = args.c_range.split(":")
        if len(parts) != 3:
            raise CliError("--c-range must be cmin:cmax:cstep")
        cs = _float_grid(float(parts[0]), float(parts[1]), float(parts[2]), "--c-range")
        ks = [cutoff + c * N for c in cs]
    if args.round_k:
        ks = [float(round(k)) for k in ks]
    ks = [k for k in ks if k >= 0]
    if not ks:
        raise CliError("empty k grid (check --k/--c/--k-range/--c-range)")

    cfg = RunConfig(
        command=args.command,
        family=family,
        N=N,
        tau=tau,
        theta=theta,
        group_source=args.group,
        psi_source=args.psi,
        nu_source=args.nu,
        k_values=tuple(ks),
        max_p=args.max_p,
        max_total=args.max_total,
        tail_mode=args.tail_mode,
        quad_points=quad_points,
        output=args.output,
        fmt=getattr(args, "fmt", "csv"),
        threads=args.threads,
        round_k=args.round_k,
    )
    return q, cfg


def _truncation_for(cfg: RunConfig, family: str) -> TruncationConfig:
    base = MIXTURE_DEFAULT_TRUNCATION if family == "mixture" else DEFAULT_TRUNCATION
    return TruncationConfig(
        max_p=cfg.max_p if cfg.max_p is not None else base.max_p,
        max_total=cfg.max_total if cfg.max_total is not None else base.max_total,
        tail_mode=cfg.tail_mode,
    )


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _fmt(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _config_lines(q: WalkQuery, cfg: RunConfig, tc: TruncationConfig) -> list[tuple[str, object]]:
    items: list[tuple[str, object]] = [
        ("command", cfg.command),
        ("family", q.family),
        ("N", q.N),
    ]
    if q.tau is not None:
        items.append(("tau", float(q.tau)))
    if q.theta is not None:
        items.append(("theta", float(q.theta)))
    if q.family == "unitary-free":
        assert q.nu is not None
        items.append(("nu", q.nu.describe()))
    if q.family == "wreath":
        items.append(("group", cfg.group_source or ""))
        items.append(("psi", cfg.psi_source or "trivial"))
        items.append(("group_order", q.group.order if q.group else 0))
    items.extend(
        [
            ("truncation_max_p", tc.max_p),
            ("truncation_max_total", tc.max_total),
            ("tail_mode", tc.tail_mode),
            ("quad_points", cfg.quad_points),
            ("nominal_cutoff", nominal_cutoff(q.with_k(0.0))),
        ]
    )
    rate_tau = q.tau if q.tau is not None else None
    if rate_tau is not None:
        items.append(("threshold_C", threshold_C(rate_tau)))
        items.append(("threshold_D", threshold_D(rate_tau)))
        if q.family == "wreath":
            if rate_tau > 7.0 / 4.0:
                items.append(("threshold_Q", threshold_Q(rate_tau)))
                items.append(("wreath_threshold", wreath_certificate_threshold(rate_tau)))
            else:
                items.append(("threshold_Q", "undefined (tau <= 7/4)"))
    return items


def _hyp_str(hyps: tuple[tuple[str, bool], ...]) -> str:
    return ";".join(f"{name}={_fmt(ok)}" for name, ok in hyps)


def cmd_profile(args: argparse.Namespace) -> int:
    q, cfg = _build_query(args)
    tc = _truncation_for(cfg, q.family)
    result = cutoff_profile(q, list(cfg.k_values), tc)
    hyps_per_row: list[tuple[tuple[str, bool], ...]] = []
    for k in cfg.k_values:
        hyps_per_row.append(A_k_for_query(q.with_k(k), tc).hypotheses)
    for row in result.rows:
        if row.certified and row.tv_lower > row.tv_upper_hi + 1e-12:
            raise RuntimeError(
                f"internal inconsistency at k={row.k!r}: certified lower bound "
                f"{row.tv_lower!r} exceeds certified upper bound {row.tv_upper_hi!r}"
            )
    meta = _config_lines(q, cfg, tc) + [("monotone_upper", result.monotone_upper)]
    for note in result.notes:
        meta.append(("note", note))
    if cfg.fmt == "csv":
        lines = [f"# {key}={_fmt(val)}" for key, val in meta]
        lines.append("k,tv_upper_lo,tv_upper_hi,tv_lower,certified,hypotheses")
        for row, hyps in zip(result.rows, hyps_per_row):
            lines.append(
                ",".join(
                    [
                        repr(row.k),
                        repr(row.tv_upper_lo),
                        repr(row.tv_upper_hi),
                        repr(row.tv_lower),
                        _fmt(row.certified),
                        _hyp_str(hyps),
                    ]
                )
            )
        _emit("\n".join(lines), cfg.output)
    else:
        doc = {
            "config": {key: val for key, val in meta},
            "rows": [
                {
                    "k": row.k,
                    "tv_upper_lo": row.tv_upper_lo,
                    "tv_upper_hi": row.tv_upper_hi,
                    "tv_lower": row.tv_lower,
                    "certified": row.certified,
                    "hypotheses": {name: ok for name, ok in hyps},
                }
                for row, hyps in zip(result.rows, hyps_per_row)
            ],
        }
        _emit(json.dumps(doc, indent=2), cfg.output)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    q, cfg = _build_query(args)
    if len(cfg.k_values) != 1:
        raise CliError("bound needs a single k (--k or --c)")
    tc = _truncation_for(cfg, q.family)
    qk = q.with_k(cfg.k_values[0])
    A = A_k_for_query(qk, tc)
    tv = tv_upper_from_A(A)
    doc = {
        "config": {key: val for key, val in _config_lines(q, cfg, tc)},
        "k": qk.k,
        "A_partial": A.partial,
        "A_tail": A.tail if A.tail != math.inf else "infinity",
        "A_log_partial": A.log_partial,
        "A_log_tail": A.log_tail if A.log_tail != math.inf else "infinity",
        "terms_used": A.terms_used,
        "certified": A.certified,
        "certificate": A.certificate,
        "hypotheses": {name: ok for name, ok in A.hypotheses},
        "notes": list(A.notes),
        "tv_upper_lo": tv.lower_info,
        "tv_upper_hi": tv.upper,
        "tv_clamped": tv.clamped,
        "tv_lower": tv_lower(qk),
    }
    _emit(json.dumps(doc, indent=2), cfg.output)
    return 0


def cmd_thresholds(args: argparse.Namespace) -> int:
    tau = args.tau
    if not tau > 0:
        raise CliError("--tau must be > 0")
    N = args.N
    doc: dict[str, object] = {
        "tau": tau,
        "N": N,
        "C": threshold_C(tau),
        "D": threshold_D(tau),
    }
    if tau > 7.0 / 4.0:
        doc["Q"] = threshold_Q(tau)
        doc["Qthr"] = wreath_certificate_threshold(tau)
    else:
        doc["Q"] = None
        doc["Qthr"] = None
        doc["note"] = "Q is defined for tau > 7/4 only"
    doc["cutoff_steps"] = N * math.log(N) / tau
    doc["cutoff_steps_mixture"] = N * math.log(N) / 2.0
    if args.theta is not None:
        lam = 1.0 - math.cos(args.theta)
        if lam <= 0:
            raise CliError("--theta gives 1 - cos(theta) = 0; no cutoff rate")
        doc["cutoff_steps_eval"] = N * math.log(N) / lam
    _emit(json.dumps(doc, indent=2), args.output)
    return 0


def cmd_moments(args: argparse.Namespace) -> int:
    doc: dict[str, object] = {}
    if args.eps is not None:
        nu = _parse_nu(args.nu, args.N, args.quad_points)
        eps_list = [int(x) for x in args.eps.split(",") if x.strip() != ""]
        vals = {}
        for e in eps_list:
            m = moment(nu, e, quad_points=args.quad_points)
            vals[str(e)] = {"re": m.real, "im": m.imag}
        doc["nu"] = nu.describe()
        doc["moments"] = vals
    if args.lambda_moments is not None:
        parts = args.lambda_moments.split(":")
        if len(parts) != 2:
            raise CliError("--lambda-moments must be N:LMAX")
        N, lmax = int(parts[0]), int(parts[1])
        doc["lambda_moments"] = {str(l): lambda_moment(N, l) for l in range(lmax + 1)}
        doc["wallis_ratio_recurrence"] = N / (N + 1.0)
        doc["wallis_ratio_alternative"] = (N + 1.0) / (N + 2.0)
        doc["wallis_ratio_note"] = (
            "W_{N+1}/W_{N-1} from the Wallis recurrence is N/(N+1); "
            "the alternative (N+1)/(N+2) disagrees with quadrature"
        )
    if not doc:
        raise CliError("moments needs --eps (with --nu) or --lambda-moments")
    _emit(json.dumps(doc, indent=2), args.output)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    names = None if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    try:
        reports = run_all(names)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    lines = [format_report(r) for r in reports.values()]
    all_ok = all(r.ok for r in reports.values())
    controls_ok = True
    control_reports: dict[str, object] = {}
    if args.suite == "all":
        controls = negative_controls()
        for name, rep in controls.items():
            control_reports[name] = report_to_dict(rep)
            got = len(rep.failures)
            status = "OK" if got > 0 else "VACUOUS"
            if got == 0:
                controls_ok = False
            lines.append(f"{status} negative control {name}: {got} failures (expected >= 1)")
    text = "\n".join(lines)
    sys.stdout.write(text + "\n")
    if args.report is not None:
        doc = {
            "suites": {name: report_to_dict(r) for name, r in reports.items()},
            "negative_controls": control_reports,
            "all_pass": all_ok and controls_ok,
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")
    return 0 if (all_ok and controls_ok) else 1


def main(argv: Sequence[str] | None = None) -> int:
    args_list = list(argv) if argv is not None else sys.argv[1:]
    parser = _build_parser()
    try:
        args = parser.parse_args(_merge_range_flags(args_list))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return code
    try:
        if args.threads is not None and args.threads < 1:
            raise CliError("--threads must be >= 1")
        if args.command == "profile":
            return cmd_profile(args)
        if args.command == "bound":
            return cmd_bound(args)
        if args.command == "thresholds":
            return cmd_thresholds(args)
        if args.command == "moments":
            return cmd_moments(args)
        if args.command == "verify":
            return cmd_verify(args)
        raise CliError(f"unknown command {args.command!r}")
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
