"""Irreducible-character words for the two families of walks, with their
dimensions, state coefficients, truncated enumeration, and the closed-form
expectations feeding the lower bounds.

Free unitary family.  Nontrivial irreducible characters are indexed by words

    z^{[eps0]_-} chi_{n_1} z^{eps_1} ... chi_{n_p} z^{[eps_p]_+},

with p >= 1 blocks, n_i >= 1, and eps0 = +-1.  The signs alternate according
to the parity of the block sizes: eps_i = eps_{i-1} * (-1)^{n_i + 1}.  The
dimension is prod_i u_{n_i}(N), and a central state built from a parameter
t in [0, N) and a circle measure nu has normalized character value

    m_eps(nu) * prod_i u_{n_i}(t) / u_{n_i}(N),

where eps = [eps0]_- + eps_1 + ... + eps_{p-1} + [eps_p]_+ is the total
winding exponent picked up by the z factors.

Free wreath family (a finite group Gamma wreathed with the quantum
permutation group).  Nontrivial characters are words

    p = 0:   chi_{2 n0 + 2}                          (n0 >= 0)
    p >= 1:  chi_{2 n0 + 1} gamma_1 chi_{2 n1 + 2} ... gamma_p chi_{2 np + 1}

with n_i >= 0 and gamma_i in Gamma; single-character words carry even indices,
interleaved words carry odd indices at both ends and even in the interior.
The dimension is the product of u_index(sqrt(N)) over the character indices,
and the normalized character value of the walk state with parameters
(t', psi) is psi(gamma_1 ... gamma_p) times the product of
u_index(t') / u_index(sqrt(N)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .numerics import LogScalar, lambda_moment, u_seq
from .structures import CircleMeasure, FiniteGroup, GroupState, arg_trace, moment, tau_theta

__all__ = [
    "UIrrepWord",
    "WreathWord",
    "LogComplex",
    "dim_unitary",
    "dim_wreath",
    "coeff_unitary",
    "coeff_wreath",
    "enumerate_unitary",
    "enumerate_wreath",
    "count_unitary",
    "count_wreath",
    "eval_state_params",
    "chi2_expectation_unitary",
    "chi2_expectation_wreath",
    "chi_expectation_mixture",
]


@dataclass(frozen=True)
class LogComplex:
    """A complex number as (log of modulus, phase); modulus-zero is logmag -inf."""

    logmag: float
    phase: float

    def to_complex(self) -> complex:
        if self.logmag == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.logmag), self.phase)

    @property
    def abs_log(self) -> float:
        return self.logmag


@dataclass(frozen=True)
class UIrrepWord:
    """A free-unitary character word: block sizes and the leading sign."""

    ns: tuple[int, ...]
    eps0: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        if len(self.ns) == 0:
            raise ValueError("a word needs at least one block")
        if any(n < 1 for n in self.ns):
            raise ValueError(f"block sizes must be >= 1, got {self.ns}")
        if self.eps0 not in (-1, 1):
            raise ValueError(f"eps0 must be -1 or +1, got {self.eps0}")

    @property
    def p(self) -> int:
        return len(self.ns)

    @property
    def total(self) -> int:
        return sum(self.ns)

    def eps_sequence(self) -> tuple[int, ...]:
        """(eps_1, ..., eps_p) from the parity recursion."""
        eps = self.eps0
        out = []
        for n in self.ns:
            eps = eps if n % 2 == 1 else -eps
            out.append(eps)
        return tuple(out)

    def z_exponent(self) -> int:
        """Total winding exponent carried by the z factors of the word."""
        seq = self.eps_sequence()
        return min(self.eps0, 0) + sum(seq[:-1]) + max(seq[-1], 0)


@dataclass(frozen=True)
class WreathWord:
    """A free-wreath character word: p + 1 outer indices and p group labels.

    ``outer`` holds (n_0, ..., n_p) with n_i >= 0; ``gammas`` holds the p
    group-element indices sitting between consecutive characters.
    """

    outer: tuple[int, ...]
    gammas: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outer", tuple(int(n) for n in self.outer))
        object.__setattr__(self, "gammas", tuple(int(g) for g in self.gammas))
        if len(self.outer) == 0:
            raise ValueError("a word needs at least one character")
        if len(self.gammas) != len(self.outer) - 1:
            raise ValueError(
                f"{len(self.outer)} characters need {len(self.outer) - 1} group labels, "
                f"got {len(self.gammas)}"
            )
        if any(n < 0 for n in self.outer):
            raise ValueError(f"outer indices must be >= 0, got {self.outer}")

    @property
    def p(self) -> int:
        return len(self.gammas)

    def char_indices(self) -> tuple[int, ...]:
        """Indices of the u-factors: even for a single character, odd ends and
        even interior otherwise."""
        if self.p == 0:
            return (2 * self.outer[0] + 2,)
        idx = [2 * self.outer[0] + 1]
        for n in self.outer[1:-1]:
            idx.append(2 * n + 2)
        idx.append(2 * self.outer[-1] + 1)
        return tuple(idx)

    @property
    def index_total(self) -> int:
        return sum(self.char_indices())


def dim_unitary(word: UIrrepWord, N: float) -> LogScalar:
    """prod_i u_{n_i}(N); requires N > 2."""
    if N <= 2:
        raise ValueError(f"N must exceed 2, got {N!r}")
    us = u_seq(float(N), max(word.ns))
    out = LogScalar.one()
    for n in word.ns:
        out = out * us[n]
    return out


def dim_wreath(word: WreathWord, N: float) -> LogScalar:
    """prod over character indices of u_index(sqrt(N)); requires N > 4."""
    if N <= 4:
        raise ValueError(f"N must exceed 4, got {N!r}")
    idx = word.char_indices()
    us = u_seq(math.sqrt(float(N)), max(idx))
    out = LogScalar.one()
    for i in idx:
        out = out * us[i]
    return out


def _ratio_log_complex(num: LogScalar, den: LogScalar) -> tuple[float, float]:
    # returns (logmag, phase-contribution) of num/den; signs fold into phase
    if num.sign == 0:
        return -math.inf, 0.0
    phase = math.pi if num.sign * den.sign < 0 else 0.0
    return num.logmag - den.logmag, phase


def coeff_unitary(
    word: UIrrepWord, t: float, nu: CircleMeasure, N: float, quad_points: int = 2048
) -> LogComplex:
    """Normalized character value m_eps(nu) * prod u_{n_i}(t) / u_{n_i}(N).

    Requires 0 <= t < N and N > 2.  The modulus never exceeds 1.
    """
    if N <= 2:
        raise ValueError(f"N must exceed 2, got {N!r}")
    if not 0.0 <= t < float(N):
        raise ValueError(f"t must lie in [0, N), got t = {t!r}, N = {N!r}")
    nmax = max(word.ns)
    us_t = u_seq(float(t), nmax)
    us_N = u_seq(float(N), nmax)
    logmag = 0.0
    phase = 0.0
    for n in word.ns:
        lm, ph = _ratio_log_complex(us_t[n], us_N[n])
        logmag += lm
        phase += ph
    m = moment(nu, word.z_exponent(), quad_points=quad_points)
    if m == 0:
        return LogComplex(-math.inf, 0.0)
    return LogComplex(logmag + math.log(abs(m)), phase + cmath.phase(m))


def coeff_wreath(
    word: WreathWord, t: float, group: FiniteGroup, psi: GroupState, N: float
) -> LogComplex:
    """Normalized character value psi(gamma_1 ... gamma_p) * prod of
    u_index(t) / u_index(sqrt(N)).

    ``t`` is the transferred parameter on the quantum SU(2) side; a walk at
    trace deficit tau uses t = sqrt(N - tau).  Requires 0 <= t < sqrt(N) and
    N > 4.
    """
    if N <= 4:
        raise ValueError(f"N must exceed 4, got {N!r}")
    s = math.sqrt(float(N))
    if not 0.0 <= t < s:
        raise ValueError(f"t must lie in [0, sqrt(N)), got t = {t!r}")
    idx = word.char_indices()
    us_t = u_seq(float(t), max(idx))
    us_s = u_seq(s, max(idx))
    logmag = 0.0
    phase = 0.0
    for i in idx:
        lm, ph = _ratio_log_complex(us_t[i], us_s[i])
        logmag += lm
        phase += ph
    val = psi.value_of_product(word.gammas) if word.p else complex(1.0)
    if val == 0:
        return LogComplex(-math.inf, 0.0)
    return LogComplex(logmag + math.log(abs(val)), phase + cmath.phase(val))


def _compositions(total_max: int, parts: int) -> Iterator[tuple[int, ...]]:
    # all vectors of `parts` entries >= 1 with sum <= total_max, lex ascending
    if parts == 0:
        yield ()
        return
    for first in range(1, total_max - parts + 2):
        for rest in _compositions(total_max - first, parts - 1):
            yield (first,) + rest


def _nonneg_vectors(total_max: int, parts: int) -> Iterator[tuple[int, ...]]:
    # all vectors of `parts` entries >= 0 with sum <= total_max, lex ascending
    if parts == 0:
        yield ()
        return
    for first in range(0, total_max + 1):
        for rest in _nonneg_vectors(total_max - first, parts - 1):
            yield (first,) + rest


def enumerate_unitary(max_total: int, max_p: int) -> Iterator[UIrrepWord]:
    """All words with sum(n_i) <= max_total and p <= max_p blocks.

    Deterministic order: p ascending, then the block vector lexicographically,
    then eps0 in (-1, +1).
    """
    for p in range(1, max_p + 1):
        if p > max_total:
            break
        for ns in _compositions(max_total, p):
            for eps0 in (-1, 1):
                yield UIrrepWord(ns, eps0)


def enumerate_wreath(group: FiniteGroup, max_total: int, max_p: int) -> Iterator[WreathWord]:
    """All words with character-index total <= max_total and p <= max_p labels.

    Deterministic order: p ascending, then the outer vector lexicographically,
    then the group labels in lexicographic product order.
    """
    n0 = 0
    while 2 * n0 + 2 <= max_total:
        yield WreathWord((n0,), ())
        n0 += 1
    m = group.order
    for p in range(1, max_p + 1):
        budget2 = max_total - 2 * p  # index total is 2*sum(n) + 2p
        if budget2 < 0:
            break
        budget = budget2 // 2
        for vec in _nonneg_vectors(budget, p + 1):
            for gammas in _lex_products(m, p):
                yield WreathWord(vec, gammas)


def _lex_products(m: int, p: int) -> Iterator[tuple[int, ...]]:
    if p == 0:
        yield ()
        return
    for g in range(m):
        for rest in _lex_products(m, p - 1):
            yield (g,) + rest


def count_unitary(max_total: int, max_p: int) -> int:
    """Number of words enumerate_unitary yields, in closed form."""
    total = 0
    for p in range(1, max_p + 1):
        for s in range(p, max_total + 1):
            total += 2 * math.comb(s - 1, p - 1)
    return total


def count_wreath(group: FiniteGroup, max_total: int, max_p: int) -> int:
    """Number of words enumerate_wreath yields, in closed form."""
    total = max((max_total - 2) // 2 + 1, 0) if max_total >= 2 else 0
    for p in range(1, max_p + 1):
        budget2 = max_total - 2 * p
        if budget2 < 0:
            break
        budget = budget2 // 2
        # vectors of p+1 nonneg entries with sum <= budget
        total += group.order**p * math.comb(budget + p + 1, p + 1)
    return total


def eval_state_params(N: int, theta: float) -> tuple[float, CircleMeasure]:
    """Parameters (t, nu) of the evaluation state at rotation angle theta.

    The state evaluates characters at the rotation diag(e^{i theta}, 1, ..., 1)
    pushed into the free unitary group; its trace has modulus t = N - tau_theta
    and argument beta, so the state coincides with the central state of
    parameter t and measure delta_beta.
    """
    t = float(N) - tau_theta(N, theta)
    return t, CircleMeasure.delta(arg_trace(N, theta))


def chi2_expectation_unitary(N: int, tau: float, k: float) -> LogScalar:
    """Expectation of the degree-2 self-conjugate character under the k-th
    convolution power at trace deficit tau:
    (N^2 - 1) * (((N - tau)^2 - 1) / (N^2 - 1))^k.

    Requires N - tau > 1.
    """
    t = N - tau
    if not t > 1.0:
        raise ValueError(f"need N - tau > 1, got {t!r}")
    log_top = math.log(t * t - 1.0)
    log_bot = math.log(float(N) * N - 1.0)
    return LogScalar(1, log_bot + k * (log_top - log_bot))


def chi2_expectation_wreath(N: int, tau: float, k: float) -> LogScalar:
    """(N - 1) * ((N - tau - 1) / (N - 1))^k; requires N - tau > 1."""
    t = N - tau - 1.0
    if not t > 0.0:
        raise ValueError(f"need N - tau > 1, got N - tau = {N - tau!r}")
    log_top = math.log(t)
    log_bot = math.log(N - 1.0)
    return LogScalar(1, log_bot + k * (log_top - log_bot))


def chi_expectation_mixture(N: int, k: float) -> LogScalar:
    """2N * ((N - 1) / (N + 1))^k, the expectation of the real degree-1
    witness under the k-th power of the Porod-mixed evaluation state.

    The per-step factor is (N - 1 + E[cos theta]) / N with
    E[cos theta] = 1 - lambda_moment(N, 1) = (1 - N) / (1 + N).
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    mean_cos = 1.0 - lambda_moment(N, 1)
    step = (N - 1.0 + mean_cos) / N  # = (N - 1) / (N + 1)
    return LogScalar(1, math.log(2.0 * N) + k * math.log(step))
