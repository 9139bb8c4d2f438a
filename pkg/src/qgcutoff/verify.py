"""Grid-based numerical verification of the standalone analytic inequalities
behind the walk bounds, with margins, tight-point flagging, and negative
controls guarding against vacuous passes.

Each verifier sweeps a default grid (log-spaced in N where the domain is
wide), computes a margin per point, and reports failures as (point, lhs, rhs,
margin).  Margins for inequalities between exponentially large quantities are
taken on the log scale; |margin| below the grid tolerance is flagged "tight"
and counted as a pass.  Every verifier is pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import lambda_moment, q_of, u_seq
from .structures import lambda_theta, porod_nodes, tau_theta
from .bounds import threshold_C, wreath_certificate_threshold

__all__ = [
    "GridSpec",
    "VerifyReport",
    "verify_encadrement",
    "verify_lower_aux",
    "verify_main_inequality",
    "verify_anqn",
    "verify_ratio_comparison",
    "verify_wreath_inequality",
    "verify_lambda_moment",
    "negative_controls",
    "run_all",
    "report_to_dict",
    "format_report",
]


@dataclass(frozen=True)
class GridSpec:
    """Grid parameters; each verifier documents which fields it reads.

    ``taus`` holds the primary parameter values (tau for the inequality
    families, a for the lower-bound auxiliary, unused elsewhere); the n-range
    fields describe the secondary sweep (N, or t for the envelope check);
    ``index_max`` caps polynomial indices; ``theta_count`` the angle grid.
    """

    taus: tuple[float, ...] = ()
    n_min: float = 4.0
    n_max: float = 1e4
    n_points: int = 200
    log_spaced: bool = True
    theta_count: int = 64
    index_max: int = 60
    tolerance: float = 1e-12

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.n_points < 1 or self.index_max < 1 or self.theta_count < 1:
            raise ValueError("grid sizes must be >= 1")
        if not self.n_max >= self.n_min:
            raise ValueError("empty n range")


@dataclass(frozen=True)
class VerifyReport:
    inequality_id: str
    grid_size: int
    pass_count: int
    tight_count: int
    failures: tuple[tuple[str, float, float, float], ...]
    min_margin: float
    min_margin_point: str
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return len(self.failures) == 0


class _Collector:
    """Accumulates (point, lhs, rhs, margin) records in fixed grid order."""

    def __init__(self, inequality_id: str, tolerance: float) -> None:
        self.id = inequality_id
        self.tol = tolerance
        self.size = 0
        self.passes = 0
        self.tights = 0
        self.failures: list[tuple[str, float, float, float]] = []
        self.min_margin = math.inf
        self.min_point = ""
        self.notes: list[str] = []

    def add(self, point: str, lhs: float, rhs: float, margin: float) -> None:
        self.size += 1
        if margin < self.min_margin:
            self.min_margin = margin
            self.min_point = point
        if margin < -self.tol:
            self.failures.append((point, lhs, rhs, margin))
        else:
            self.passes += 1
            if abs(margin) < self.tol:
                self.tights += 1

    def note(self, text: str) -> None:
        self.notes.append(text)

    def report(self) -> VerifyReport:
        return VerifyReport(
            inequality_id=self.id,
            grid_size=self.size,
            pass_count=self.passes,
            tight_count=self.tights,
            failures=tuple(self.failures),
            min_margin=self.min_margin,
            min_margin_point=self.min_point,
            notes=tuple(self.notes),
        )


def _geom_floats(lo: float, hi: float, count: int) -> list[float]:
    if count == 1:
        return [lo]
    ratio = (hi / lo) ** (1.0 / (count - 1))
    return [lo * ratio**i for i in range(count)]

def _geom_ints(lo: int, hi: int, count: int) -> list[int]:
    vals = sorted({int(round(x)) for x in _geom_floats(float(lo), float(hi), count)})
    return [v for v in vals if lo <= v <= hi]


DEFAULT_ENCADREMENT_GRID = GridSpec(n_min=2.1, n_max=200.0, n_points=200, index_max=60)
DEFAULT_LOWER_AUX_GRID = GridSpec(taus=(1.0, 2.0, 4.0), n_min=2.0, n_max=1e4, n_points=200)
DEFAULT_MAIN_GRID = GridSpec(taus=(2.0, 3.0, 5.0), n_min=4.0, n_max=500.0)
DEFAULT_ANQN_GRID = GridSpec(n_min=4.0, n_max=1e4, n_points=200)
DEFAULT_RATIO_GRID = GridSpec(taus=(6.0, 10.0, 50.0, 200.0), theta_count=64, index_max=40)
DEFAULT_WREATH_GRID = GridSpec(taus=(2.0, 3.0), n_min=4.0, n_max=500.0)
DEFAULT_LAMBDA_GRID = GridSpec(taus=(5.0, 10.0, 50.0), index_max=6, tolerance=1e-8)


def verify_encadrement(g: GridSpec = DEFAULT_ENCADREMENT_GRID) -> VerifyReport:
    """t q^{-(n-1)} <= u_n(t) <= q^{-n}/(1 - q^2) over t in the n-range
    (geometric) and 1 <= n <= index_max; both sides checked per point,
    margins on the log scale."""
    return _encadrement_impl(g, lower_exponent_shift=1)


def _encadrement_impl(g: GridSpec, lower_exponent_shift: int) -> VerifyReport:
    col = _Collector("encadrement", g.tolerance)
    for t in _geom_floats(g.n_min, g.n_max, g.n_points):
        q = q_of(t)
        log_q = math.log(q)
        us = u_seq(t, g.index_max)
        for n in range(1, g.index_max + 1):
            log_u = us[n].logmag
            log_lower = math.log(t) - (n - lower_exponent_shift) * log_q
            log_upper = -n * log_q - math.log1p(-q * q)
            col.add(f"lower t={t:.6g} n={n}", math.exp(min(log_lower, 700.0)),
                    math.exp(min(log_u, 700.0)), log_u - log_lower)
            col.add(f"upper t={t:.6g} n={n}", math.exp(min(log_u, 700.0)),
                    math.exp(min(log_upper, 700.0)), log_upper - log_u)
    return col.report()


def verify_lower_aux(g: GridSpec = DEFAULT_LOWER_AUX_GRID) -> VerifyReport:
    """N (1 - a/N)^{N ln N / a} >= e^{-a/2e} / sqrt(2) for each a in taus and
    integer N >= 2a (log-spaced, boundary N = ceil(2a) included)."""
    return _lower_aux_impl(g, rhs_log_shift=0.0)


def _lower_aux_impl(g: GridSpec, rhs_log_shift: float) -> VerifyReport:
    col = _Collector("lower_aux", g.tolerance)
    for a in g.taus:
        n_lo = max(int(math.ceil(2.0 * a)), 2)
        ns = sorted(set([n_lo] + _geom_ints(n_lo, int(g.n_max), g.n_points)))
        for N in ns:
            log_lhs = math.log(N) + (N * math.log(N) / a) * math.log1p(-a / N)
            log_rhs = -a / (2.0 * math.e) - 0.5 * math.log(2.0) + rhs_log_shift
            col.add(f"a={a:g} N={N}", math.exp(log_lhs), math.exp(log_rhs), log_lhs - log_rhs)
    return col.report()


def verify_main_inequality(g: GridSpec = DEFAULT_MAIN_GRID) -> VerifyReport:
    """N q(N - tau) (1 - q(N - tau)^2) >= e^{tau/N} for integer
    N >= ceil(tau + C(tau)), N <= n_max; sub-threshold points are scanned and
    recorded in the notes, not counted."""
    col = _Collector("main_inequality", g.tolerance)
    for tau in g.taus:
        n_start = int(math.ceil(tau + threshold_C(tau)))
        for N in range(n_start, int(g.n_max) + 1):
            q = q_of(N - tau)
            log_lhs = math.log(N) + math.log(q) + math.log1p(-q * q)
            margin = log_lhs - tau / N
            col.add(f"tau={tau:g} N={N}", math.exp(log_lhs), math.exp(tau / N), margin)
        # exploratory scan below the threshold (domain still needs N - tau > 2)
        for N in range(int(math.floor(tau)) + 3, n_start):
            if N - tau <= 2.0 + 1e-9:
                continue
            q = q_of(N - tau)
            margin = math.log(N) + math.log(q) + math.log1p(-q * q) - tau / N
            col.note(f"below threshold: tau={tau:g} N={N} margin={margin:.6g}")
    return col.report()


def verify_anqn(g: GridSpec = DEFAULT_ANQN_GRID) -> VerifyReport:
    """(N - 2 + 2/N) q(N - 2) <= 1 + 8/(N - 2)^2 for integer N >= 4.

    At the boundary N = 4 the deformation parameter sits at its parabolic
    limit q(2) = 1, which is taken exactly."""
    return _anqn_impl(g, numerator=8.0)


def _anqn_impl(g: GridSpec, numerator: float) -> VerifyReport:
    col = _Collector("anqn", g.tolerance)
    ns = sorted(set([4] + _geom_ints(4, int(g.n_max), g.n_points)))
    for N in ns:
        t = N - 2.0
        q = 1.0 if t <= 2.0 else q_of(t)
        lhs = (N - 2.0 + 2.0 / N) * q
        rhs = 1.0 + numerator / (t * t)
        col.add(f"N={N}", lhs, rhs, rhs - lhs)
    return col.report()


def verify_ratio_comparison(g: GridSpec = DEFAULT_RATIO_GRID) -> VerifyReport:
    """u_n(N - tau_theta) / u_n(N - lambda_theta) <= e^{4n/(N-2)^2} for N in
    taus (all >= 6), theta on a uniform grid over [0, 2 pi), n <= index_max;
    margins on the log scale.  theta = 0 gives ratio 1 exactly (tight)."""
    col = _Collector("ratio_comparison", g.tolerance)
    for N_f in g.taus:
        N = int(N_f)
        for j in range(g.theta_count):
            theta = 2.0 * math.pi * j / g.theta_count
            t1 = N - tau_theta(N, theta)
            t2 = N - lambda_theta(theta)
            us1 = u_seq(t1, g.index_max)
            us2 = u_seq(t2, g.index_max)
            for n in range(1, g.index_max + 1):
                log_ratio = us1[n].logmag - us2[n].logmag
                bound = 4.0 * n / ((N - 2.0) * (N - 2.0))
                col.add(
                    f"N={N} theta={theta:.6g} n={n}",
                    math.exp(log_ratio),
                    math.exp(bound),
                    bound - log_ratio,
                )
    return col.report()


def verify_wreath_inequality(g: GridSpec = DEFAULT_WREATH_GRID) -> VerifyReport:
    """q(sqrt N) / (sqrt N q(sqrt(N - tau))^2 (1 - q(sqrt(N - tau))^2)) <=
    e^{-tau/N} for tau > 7/4 and integer N >= ceil(Q(tau)/(4 tau - 7));
    a sub-threshold scan records where the inequality first holds."""
    col = _Collector("wreath_inequality", g.tolerance)
    for tau in g.taus:
        n_start = int(math.ceil(wreath_certificate_threshold(tau)))
        first_hold: int | None = None
        for N in range(int(math.floor(tau)) + 5, n_start):
            if N - tau <= 4.0 or N < 5:
                continue
            margin = -tau / N - _wreath_lhs_log(N, tau)
            if margin >= 0 and first_hold is None:
                first_hold = N
        if first_hold is not None:
            col.note(f"tau={tau:g}: holds from N={first_hold} (threshold {n_start})")
        for N in range(max(n_start, 5), int(g.n_max) + 1):
            log_lhs = _wreath_lhs_log(N, tau)
            col.add(f"tau={tau:g} N={N}", math.exp(log_lhs), math.exp(-tau / N), -tau / N - log_lhs)
    return col.report()


def _wreath_lhs_log(N: int, tau: float) -> float:
    s = math.sqrt(float(N))
    qp = q_of(math.sqrt(N - tau))
    return math.log(q_of(s)) - math.log(s) - 2.0 * math.log(qp) - math.log1p(-qp * qp)


def verify_lambda_moment(g: GridSpec = DEFAULT_LAMBDA_GRID) -> VerifyReport:
    """Closed-form moments 2^l prod (N-2+2s)/(N-1+2s) against quadrature at
    relative tolerance; also records, per N, the quadrature resolution of the
    Wallis-ratio question (recurrence ratio N/(N+1) versus the alternative
    (N+1)/(N+2) sometimes quoted for W_{N+1}/W_{N-1})."""
    # margin = tolerance - relative deviation, so a point fails exactly when
    # the deviation exceeds the grid tolerance
    col = _Collector("lambda_moment", 1e-15)
    for N_f in g.taus:
        N = int(N_f)
        theta, w = porod_nodes(N, 2048)
        lam = 1.0 - np.cos(theta)
        for l in range(0, g.index_max + 1):
            closed = lambda_moment(N, l)
            quad = float(np.dot(w, lam**l))
            rel = abs(closed - quad) / max(abs(quad), 1e-300)
            col.add(f"N={N} l={l}", closed, quad, g.tolerance - rel)
        half_mean = float(np.dot(w, lam)) / 2.0
        rec = N / (N + 1.0)
        alt = (N + 1.0) / (N + 2.0)
        col.note(
            f"N={N}: quadrature E[lambda]/2 = {half_mean!r}; recurrence ratio N/(N+1) = {rec!r} "
            f"(deviation {abs(half_mean - rec):.3e}); alternative ratio (N+1)/(N+2) = {alt!r} "
            f"(deviation {abs(half_mean - alt):.3e})"
        )
    return col.report()


def negative_controls() -> dict[str, VerifyReport]:
    """Deliberately perturbed inequalities; every report must show failures.

    - encadrement with the lower exponent n instead of n - 1;
    - the auxiliary lower bound with its constant doubled;
    - the a_N q_N comparison with 8 replaced by 2.
    """
    return {
        "encadrement_broken": _encadrement_impl(DEFAULT_ENCADREMENT_GRID, lower_exponent_shift=0),
        "lower_aux_broken": _lower_aux_impl(DEFAULT_LOWER_AUX_GRID, rhs_log_shift=math.log(2.0)),
        "anqn_broken": _anqn_impl(DEFAULT_ANQN_GRID, numerator=2.0),
    }


_SUITES: dict[str, Callable[[], VerifyReport]] = {
    "encadrement": verify_encadrement,
    "lower_aux": verify_lower_aux,
    "main_inequality": verify_main_inequality,
    "anqn": verify_anqn,
    "ratio_comparison": verify_ratio_comparison,
    "wreath_inequality": verify_wreath_inequality,
    "lambda_moment": verify_lambda_moment,
}


def run_all(names: Sequence[str] | None = None) -> dict[str, VerifyReport]:
    """Run the named suites (default: all) on their default grids."""
    selected = list(_SUITES) if names is None else list(names)
    out: dict[str, VerifyReport] = {}
    for name in selected:
        if name not in _SUITES:
            raise ValueError(f"unknown suite {name!r}; available: {', '.join(_SUITES)}")
        out[name] = _SUITES[name]()
    return out


def report_to_dict(r: VerifyReport) -> dict:
    return {
        "inequality_id": r.inequality_id,
        "grid_size": r.grid_size,
        "pass_count": r.pass_count,
        "tight_count": r.tight_count,
        "failures": [list(f) for f in r.failures],
        "min_margin": r.min_margin,
        "min_margin_point": r.min_margin_point,
        "notes": list(r.notes),
    }


def format_report(r: VerifyReport) -> str:
    status = "PASS" if r.ok else "FAIL"
    lines = [
        f"{status} {r.inequality_id}: {r.pass_count}/{r.grid_size} points "
        f"({r.tight_count} tight), min margin {r.min_margin:.6g} at {r.min_margin_point}"
    ]
    for point, lhs, rhs, margin in r.failures[:10]:
        lines.append(f"    FAIL {point}: lhs={lhs!r} rhs={rhs!r} margin={margin:.6g}")
    if len(r.failures) > 10:
        lines.append(f"    ... {len(r.failures) - 10} more failures")
    for note in r.notes:
        lines.append(f"    note: {note}")
    return "\n".join(lines)
