"""Finite groups with positive-definite states, and measures on the circle.

These are the two ingredients a central walk is built from: a walk on the free
wreath product carries a state psi on the chosen finite group, and a walk on
the free unitary group carries a probability measure nu on the circle whose
moments m_eps(nu) = int e^{i eps theta} dnu weight the power-of-z part of each
character word.

File formats (used by the CLI):

- Cayley table: first line the order m, then m lines of m whitespace-separated
  element indices, row g listing g*h for h = 0..m-1.
- Group state: m lines "re im", line g holding psi(g).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numerics import wallis

__all__ = [
    "FiniteGroup",
    "GroupState",
    "CircleMeasure",
    "cyclic_group",
    "load_cayley",
    "load_group_state",
    "trivial_state",
    "haar_state",
    "group_sum_abs",
    "moment",
    "porod_nodes",
    "tau_theta",
    "lambda_theta",
    "arg_trace",
]

# validation tolerances for state data supplied as floats
_STATE_ATOL = 1e-9
_PSD_EIG_FLOOR = -1e-10


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its Cayley table over element indices 0..m-1.

    ``table[g][h]`` is the product g*h.  Instances are only produced through
    ``from_table``, which checks the Latin-square property, locates the
    two-sided identity, inverts every element and verifies associativity on
    all triples, naming the first offending entry in the error message.
    """

    order: int
    table: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]

    @classmethod
    def from_table(cls, rows: Sequence[Sequence[int]]) -> "FiniteGroup":
        m = len(rows)
        if m == 0:
            raise ValueError("empty Cayley table")
        table = tuple(tuple(int(x) for x in row) for row in rows)
        full = set(range(m))
        for g, row in enumerate(table):
            if len(row) != m:
                raise ValueError(f"row {g} has length {len(row)}, expected {m}")
            if set(row) != full:
                raise ValueError(f"row {g} is not a permutation of 0..{m - 1}")
        for h in range(m):
            if {table[g][h] for g in range(m)} != full:
                raise ValueError(f"column {h} is not a permutation of 0..{m - 1}")
        identity = None
        for e in range(m):
            if all(table[e][h] == h for h in range(m)) and all(table[g][e] == g for g in range(m)):
                identity = e
                break
        if identity is None:
            raise ValueError("no two-sided identity element")
        inverse = [-1] * m
        for g in range(m):
            for h in range(m):
                if table[g][h] == identity:
                    inverse[g] = h
                    break
            if inverse[g] < 0 or table[inverse[g]][g] != identity:
                raise ValueError(f"element {g} has no two-sided inverse")
        for a in range(m):
            for b in range(m):
                ab = table[a][b]
                row_a = table[a]
                for c in range(m):
                    if table[ab][c] != row_a[table[b][c]]:
                        raise ValueError(f"associativity fails at triple ({a}, {b}, {c})")
        return cls(m, table, identity, tuple(inverse))

    def multiply(self, a: int, b: int) -> int:
        return self.table[a][b]

    def multiply_all(self, elements: Sequence[int]) -> int:
        g = self.identity
        for h in elements:
            g = self.table[g][h]
        return g


def cyclic_group(s: int) -> FiniteGroup:
    """Z/sZ with elements 0..s-1 under addition."""
    if s < 1:
        raise ValueError("order must be >= 1")
    return FiniteGroup.from_table([[(i + j) % s for j in range(s)] for i in range(s)])


def load_cayley(text: str) -> FiniteGroup:
    """Parse a Cayley-table file: order on the first line, then the rows."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty Cayley file")
    m = int(lines[0].split()[0])
    if len(lines) != m + 1:
        raise ValueError(f"expected {m} table rows, found {len(lines) - 1}")
    rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    return FiniteGroup.from_table(rows)


@dataclass(frozen=True)
class GroupState:
    """A normalized positive-definite function psi on a finite group.

    Validation enforces psi(e) = 1, |psi(g)| <= 1, hermitian symmetry
    psi(g^{-1}) = conj(psi(g)), and positive semidefiniteness of the Gram
    matrix M[g][h] = psi(g^{-1} h) (smallest eigenvalue >= -1e-10).
    """

    group: FiniteGroup
    values: tuple[complex, ...]

    @classmethod
    def from_values(cls, group: FiniteGroup, values: Sequence[complex]) -> "GroupState":
        m = group.order
        vals = tuple(complex(v) for v in values)
        if len(vals) != m:
            raise ValueError(f"expected {m} values, got {len(vals)}")
        if abs(vals[group.identity] - 1.0) > _STATE_ATOL:
            raise ValueError(f"psi(identity) = {vals[group.identity]!r}, must equal 1")
        for g, v in enumerate(vals):
            if abs(v) > 1.0 + _STATE_ATOL:
                raise ValueError(f"|psi({g})| = {abs(v)} exceeds 1")
        for g in range(m):
            if abs(vals[group.inverse[g]] - vals[g].conjugate()) > _STATE_ATOL:
                raise ValueError(f"psi({group.inverse[g]}) != conj(psi({g}))")
        gram = np.empty((m, m), dtype=complex)
        for g in range(m):
            gi = group.inverse[g]
            for h in range(m):
                gram[g, h] = vals[group.table[gi][h]]
        eigs = np.linalg.eigvalsh(gram)
        if float(eigs.min()) < _PSD_EIG_FLOOR:
            raise ValueError(f"state is not positive definite (min eigenvalue {eigs.min():.3e})")
        return cls(group, vals)

    def value_of_product(self, elements: Sequence[int]) -> complex:
        return self.values[self.group.multiply_all(elements)]

    def abs_sum(self) -> float:
        """K(psi) = sum_g |psi(g)|."""
        return float(sum(abs(v) for v in self.values))


def trivial_state(group: FiniteGroup) -> GroupState:
    return GroupState.from_values(group, [1.0] * group.order)


def haar_state(group: FiniteGroup) -> GroupState:
    vals = [0.0] * group.order
    vals[group.identity] = 1.0
    return GroupState.from_values(group, vals)


def load_group_state(group: FiniteGroup, text: str) -> GroupState:
    """Parse a state file: one "re im" pair per element, in index order."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != group.order:
        raise ValueError(f"expected {group.order} value lines, found {len(lines)}")
    vals = []
    for g, ln in enumerate(lines):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {g}: expected 're im', got {ln!r}")
        vals.append(complex(float(parts[0]), float(parts[1])))
    return GroupState.from_values(group, vals)


def group_sum_abs(group: FiniteGroup, psi: GroupState, p: int) -> float:
    """sum over (g_1, ..., g_p) of |psi(g_1 * ... * g_p)|.

    Equals m^{p-1} * K(psi): for each fixed product value g the solution set of
    g_1 ... g_p = g has exactly m^{p-1} tuples (the first p-1 entries are free,
    the last is determined).  Cross-checked against brute-force enumeration in
    the test suite.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    return group.order ** (p - 1) * psi.abs_sum()


@dataclass(frozen=True)
class CircleMeasure:
    """A probability measure on the circle, normalized to angles in [0, 2*pi).

    Three kinds:
    - "haar": normalized arc length;
    - "atomic": finitely many atoms (angle, weight), weights summing to 1;
    - "porod": the Porod mixture of parameter N, density proportional to
      |sin(theta/2)|^{N-1} with normalization 1 / (4 W_{N-1}); this is the
      rotation-angle law driving the uniform mixture of evaluation states.
    """

    kind: str
    atoms: tuple[tuple[float, float], ...] = field(default=())
    N: int | None = None

    @classmethod
    def haar(cls) -> "CircleMeasure":
        return cls("haar")

    @classmethod
    def atomic(cls, pairs: Sequence[tuple[float, float]]) -> "CircleMeasure":
        if not pairs:
            raise ValueError("atomic measure needs at least one atom")
        total = 0.0
        norm = []
        for theta, w in pairs:
            if w < -1e-15:
                raise ValueError(f"negative weight {w}")
            total += w
            norm.append((math.fmod(float(theta), 2.0 * math.pi) % (2.0 * math.pi), float(w)))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, must be 1")
        return cls("atomic", atoms=tuple(norm))

    @classmethod
    def delta(cls, theta: float) -> "CircleMeasure":
        return cls.atomic([(theta, 1.0)])

    @classmethod
    def porod(cls, N: int) -> "CircleMeasure":
        if N < 2:
            raise ValueError("N must be >= 2")
        return cls("porod", N=N)

    def describe(self) -> str:
        if self.kind == "haar":
            return "haar"
        if self.kind == "porod":
            return f"porod(N={self.N})"
        return "atomic[" + ", ".join(f"({t!r}, {w!r})" for t, w in self.atoms) + "]"


def porod_nodes(N: int, quad_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights for the Porod mixture of parameter N.

    Substituting theta = 2*phi maps the density to sin^{N-1}(phi) / (2 W_{N-1})
    on [0, pi]; the nodes are Gauss-Legendre on that interval.  Returned angles
    are the original theta = 2*phi; the weights sum to 1 up to quadrature
    error.
    """
    if quad_points < 1:
        raise ValueError("quad_points must be >= 1")
    x, w = np.polynomial.legendre.leggauss(quad_points)
    phi = 0.5 * math.pi * (x + 1.0)
    wq = 0.5 * math.pi * w
    dens = np.exp((N - 1) * np.log(np.maximum(np.sin(phi), 1e-300))) / (2.0 * wallis(N - 1))
    return 2.0 * phi, wq * dens


def moment(nu: CircleMeasure, eps: int, quad_points: int = 2048) -> complex:
    """m_eps(nu) = int e^{i * eps * theta} dnu(theta).

    Haar gives the Kronecker delta at eps = 0; atomic measures are summed
    exactly; the Porod mixture is integrated by Gauss-Legendre quadrature in
    the half-angle variable with ``quad_points`` nodes.
    """
    if nu.kind == "haar":
        return complex(1.0 if eps == 0 else 0.0)
    if nu.kind == "atomic":
        acc = 0j
        for theta, w in nu.atoms:
            acc += w * cmath.exp(1j * eps * theta)
        return acc
    if nu.kind == "porod":
        assert nu.N is not None
        theta, w = porod_nodes(nu.N, quad_points)
        re = float(np.dot(w, np.cos(eps * theta)))
        im = float(np.dot(w, np.sin(eps * theta)))
        return complex(re, im)
    raise ValueError(f"unknown measure kind {nu.kind!r}")


def lambda_theta(theta: float) -> float:
    """1 - cos(theta), the decay-rate parameter of an evaluation state."""
    return 1.0 - math.cos(theta)


def tau_theta(N: int, theta: float) -> float:
    """N - |e^{i theta} + N - 1|, the trace deficit of an evaluation state.

    Satisfies lambda(theta) * (N - 1) / N <= tau <= lambda(theta), with
    lambda = 1 - cos(theta).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = lambda_theta(theta)
    return N - math.sqrt(N * N - 2.0 * N * lam + 2.0 * lam)


def arg_trace(N: int, theta: float) -> float:
    """Argument of e^{i theta} + N - 1."""
    return math.atan2(math.sin(theta), N - 1.0 + math.cos(theta))
