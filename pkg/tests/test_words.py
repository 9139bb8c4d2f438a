"""Irreducible-word indexing: dimensions, normalized character coefficients,
deterministic enumeration, and the closed-form walk expectations.
"""

import cmath
import itertools
import math

import numpy as np
import pytest

from qgcutoff.numerics import lambda_moment, u_seq
from qgcutoff.structures import (
    CircleMeasure,
    cyclic_group,
    haar_state,
    moment,
    porod_nodes,
    trivial_state,
)
from qgcutoff.words import (
    UIrrepWord,
    WreathWord,
    chi2_expectation_unitary,
    chi2_expectation_wreath,
    chi_expectation_mixture,
    coeff_unitary,
    coeff_wreath,
    count_unitary,
    count_wreath,
    dim_unitary,
    dim_wreath,
    enumerate_unitary,
    enumerate_wreath,
    eval_state_params,
)


# ---------------------------------------------------------------------------
# word structure


def test_uirrep_word_validation():
    with pytest.raises(ValueError):
        UIrrepWord((), 1)  # at least one block
    with pytest.raises(ValueError):
        UIrrepWord((0, 1), 1)  # blocks are >= 1
    with pytest.raises(ValueError):
        UIrrepWord((1,), 0)  # leading sign is -1 or +1


def test_z_exponent_cases():
    assert UIrrepWord((1,), 1).z_exponent() == 1
    assert UIrrepWord((1,), -1).z_exponent() == -1
    # even blocks flip the running sign, making the single even word neutral
    assert UIrrepWord((2,), 1).z_exponent() == 0
    assert UIrrepWord((2,), -1).z_exponent() == 0
    assert UIrrepWord((1, 1), 1).z_exponent() == 2
    assert UIrrepWord((1, 1), -1).z_exponent() == -2
    assert UIrrepWord((2, 1), 1).z_exponent() == -1
    assert UIrrepWord((1, 2), 1).z_exponent() == 1


def test_wreath_word_validation():
    WreathWord((0,), ())  # single outer entry, no labels
    WreathWord((0, 0), (1,))
    with pytest.raises(ValueError):
        WreathWord((), ())
    with pytest.raises(ValueError):
        WreathWord((0, 0), ())  # needs exactly p = len(outer) - 1 labels
    with pytest.raises(ValueError):
        WreathWord((-1,), ())


def test_wreath_char_indices():
    # single outer entry n0 maps to the even index 2 n0 + 2
    assert WreathWord((0,), ()).char_indices() == (2,)
    assert WreathWord((3,), ()).char_indices() == (8,)
    # with labels: odd indices 2n+1 at the ends, even 2n+2 inside
    assert WreathWord((0, 0), (0,)).char_indices() == (1, 1)
    assert WreathWord((1, 2), (0,)).char_indices() == (3, 5)
    assert WreathWord((1, 0, 2), (0, 1)).char_indices() == (3, 2, 5)
    w = WreathWord((1, 0, 2), (0, 1))
    assert w.index_total == 2 * 3 + 2 * 2  # 2*sum(n) + 2p


# ---------------------------------------------------------------------------
# dimensions


def test_dim_unitary_values():
    assert dim_unitary(UIrrepWord((1,), 1), 10).to_float() == pytest.approx(10.0)
    assert dim_unitary(UIrrepWord((2,), 1), 3).to_float() == pytest.approx(8.0)
    assert dim_unitary(UIrrepWord((2, 1), 1), 10).to_float() == pytest.approx(990.0)
    with pytest.raises(ValueError):
        dim_unitary(UIrrepWord((1,), 1), 2)


def test_dim_wreath_values():
    # the one-entry word at N = 9 has dimension u_2(3) = 8
    assert dim_wreath(WreathWord((0,), ()), 9).to_float() == pytest.approx(8.0)
    # the minimal labeled word: u_1(sqrt(N))^2 = N
    assert dim_wreath(WreathWord((0, 0), (0,)), 9).to_float() == pytest.approx(9.0)
    with pytest.raises(ValueError):
        dim_wreath(WreathWord((0,), ()), 4)


# ---------------------------------------------------------------------------
# coefficients


def test_coeff_unitary_basic_ratio():
    # word (1,) with delta_0 measure: coefficient is t/N exactly
    nu = CircleMeasure.delta(0.0)
    c = coeff_unitary(UIrrepWord((1,), 1), 18.0, nu, 20)
    assert c.to_complex() == pytest.approx(18.0 / 20.0, rel=1e-12)


def test_coeff_unitary_haar_vanishes_off_neutral():
    nu = CircleMeasure.haar()
    # any word with nonzero winding exponent has zero coefficient under Haar
    c = coeff_unitary(UIrrepWord((1,), 1), 18.0, nu, 20)
    assert c.abs_log == -math.inf
    # neutral words survive
    c2 = coeff_unitary(UIrrepWord((2,), 1), 18.0, nu, 20)
    assert c2.to_complex() == pytest.approx((18.0**2 - 1) / (20.0**2 - 1), rel=1e-12)


def test_coeff_unitary_eval_state():
    # the evaluation state at angle theta is central with t = |N-1+e^{i theta}|
    N = 10
    for theta in [0.3, 1.3, 2.9]:
        t, nu = eval_state_params(N, theta)
        c = coeff_unitary(UIrrepWord((1,), 1), t, nu, N).to_complex()
        want = ((N - 1.0) + cmath.exp(1j * theta)) / N
        assert abs(c - want) < 1e-12


def test_coeff_unitary_modulus_at_most_one():
    nu = CircleMeasure.delta(0.4)
    for w in enumerate_unitary(8, 3):
        c = coeff_unitary(w, 17.5, nu, 20)
        assert c.abs_log <= 1e-12


def test_coeff_wreath_values():
    g = cyclic_group(3)
    psi = trivial_state(g)
    N = 30
    t = math.sqrt(N - 2.0)
    s = math.sqrt(float(N))
    # p = 0 word: ratio of u_2 values
    c = coeff_wreath(WreathWord((0,), ()), t, g, psi, N)
    assert c.to_complex() == pytest.approx((t * t - 1) / (s * s - 1), rel=1e-12)
    # minimal labeled word with trivial psi: (t/s)^2
    c2 = coeff_wreath(WreathWord((0, 0), (1,)), t, g, psi, N)
    assert c2.to_complex() == pytest.approx((N - 2.0) / N, rel=1e-12)


def test_coeff_wreath_haar_state_kills_nontrivial_labels():
    g = cyclic_group(3)
    psi = haar_state(g)
    N = 30
    t = math.sqrt(N - 2.0)
    c = coeff_wreath(WreathWord((0, 0), (1,)), t, g, psi, N)
    assert c.abs_log == -math.inf
    # product of labels = identity keeps the coefficient alive
    c2 = coeff_wreath(WreathWord((0, 0, 0), (1, 2)), t, g, psi, N)
    assert c2.abs_log > -math.inf


def test_coeff_wreath_modulus_at_most_one():
    g = cyclic_group(2)
    psi = trivial_state(g)
    for w in enumerate_wreath(g, 8, 3):
        c = coeff_wreath(w, math.sqrt(7.0), g, psi, 9)
        assert c.abs_log <= 1e-12


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_unitary_small():
    words = list(enumerate_unitary(1, 1))
    assert [(w.ns, w.eps0) for w in words] == [((1,), -1), ((1,), 1)]
    words2 = list(enumerate_unitary(2, 2))
    assert [(w.ns, w.eps0) for w in words2] == [
        ((1,), -1),
        ((1,), 1),
        ((2,), -1),
        ((2,), 1),
        ((1, 1), -1),
        ((1, 1), 1),
    ]


def test_enumerate_unitary_counts():
    for max_total, max_p in [(1, 1), (4, 2), (6, 6), (10, 5), (12, 3)]:
        words = list(enumerate_unitary(max_total, max_p))
        assert len(words) == count_unitary(max_total, max_p)
        assert len(set(words)) == len(words)
        for w in words:
            assert sum(w.ns) <= max_total and 1 <= len(w.ns) <= max_p
    assert count_unitary(10, 5) == 1274


def test_enumerate_wreath_small():
    g = cyclic_group(2)
    words = list(enumerate_wreath(g, 3, 1))
    assert [(w.outer, w.gammas) for w in words] == [
        ((0,), ()),
        ((0, 0), (0,)),
        ((0, 0), (1,)),
    ]
    assert len(list(enumerate_wreath(g, 4, 1))) == 8


def test_enumerate_wreath_counts():
    for s in [1, 2, 3]:
        g = cyclic_group(s)
        for max_total, max_p in [(2, 1), (6, 2), (10, 4), (9, 3)]:
            words = list(enumerate_wreath(g, max_total, max_p))
            assert len(words) == count_wreath(g, max_total, max_p)
            assert len(set(words)) == len(words)
            for w in words:
                assert w.index_total <= max_total and w.p <= max_p


def test_enumeration_is_deterministic():
    a = [(w.ns, w.eps0) for w in enumerate_unitary(9, 4)]
    b = [(w.ns, w.eps0) for w in enumerate_unitary(9, 4)]
    assert a == b
    g = cyclic_group(3)
    c = [(w.outer, w.gammas) for w in enumerate_wreath(g, 9, 4)]
    d = [(w.outer, w.gammas) for w in enumerate_wreath(g, 9, 4)]
    assert c == d


# ---------------------------------------------------------------------------
# closed-form expectations


def test_chi2_expectation_unitary():
    # one step: ((N - tau)^2 - 1) / (N^2 - 1); k steps exponentiate the ratio
    N, tau = 20, 2.0
    one = chi2_expectation_unitary(N, tau, 1.0).to_float()
    assert one == pytest.approx((N * N - 1.0) * ((18.0**2 - 1) / (N * N - 1)), rel=1e-12)
    k = 7.0
    want = (N * N - 1.0) * (((N - tau) ** 2 - 1) / (N * N - 1.0)) ** k
    assert chi2_expectation_unitary(N, tau, k).to_float() == pytest.approx(want, rel=1e-12)
    assert chi2_expectation_unitary(N, tau, 0.0).to_float() == pytest.approx(N * N - 1.0)


def test_chi2_expectation_wreath():
    N, tau = 30, 2.0
    k = 5.0
    want = (N - 1.0) * ((N - tau - 1.0) / (N - 1.0)) ** k
    assert chi2_expectation_wreath(N, tau, k).to_float() == pytest.approx(want, rel=1e-12)


def test_chi_expectation_mixture():
    N = 10
    k = 3.0
    want = 2.0 * N * ((N - 1.0) / (N + 1.0)) ** k
    assert chi_expectation_mixture(N, k).to_float() == pytest.approx(want, rel=1e-12)


def test_mixture_per_step_factor_matches_quadrature():
    # per-step damping of the degree-1 witness: (N - 1 + E[cos]) / N with
    # E[cos] = 1 - E[lambda] = -(N-1)/(N+1) under the Porod mixture
    N = 12
    nu = CircleMeasure.porod(N)
    mean_cos = moment(nu, 1).real
    assert mean_cos == pytest.approx(1.0 - lambda_moment(N, 1), abs=1e-10)
    step = (N - 1.0 + mean_cos) / N
    assert step == pytest.approx((N - 1.0) / (N + 1.0), abs=1e-10)


def test_mixture_expectation_consistency():
    # E[chi + bar chi] after k steps = 2N step^k; check against one-step +
    # power using the quadrature value of the step factor
    N = 15
    nu = CircleMeasure.porod(N)
    theta, w = porod_nodes(N, 2048)
    # average of the word-(1,) coefficient over the angle mixture
    vals = ((N - 1.0) + np.exp(1j * theta)) / N
    step = float(np.sum(w * vals.real))
    k = 9.0
    want = 2.0 * N * step**k
    assert chi_expectation_mixture(N, k).to_float() == pytest.approx(want, rel=1e-7)


def test_eval_state_params_geometry():
    N = 8
    for theta in [0.0, 0.9, math.pi]:
        t, nu = eval_state_params(N, theta)
        z = (N - 1.0) + cmath.exp(1j * theta)
        assert t == pytest.approx(abs(z), rel=1e-12)
        assert nu.kind == "atomic"
        # the single atom sits at the trace argument
        [(angle, weight)] = nu.atoms
        assert weight == 1.0
        assert cmath.exp(1j * angle) == pytest.approx(
            z / abs(z) if abs(z) > 0 else 1.0, rel=1e-12
        )
