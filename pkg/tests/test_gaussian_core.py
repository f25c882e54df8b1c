import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ghostcorr import gaussian_core as gc
from ghostcorr.errors import DomainError, InconsistentStateError

OMEGA = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)


def numeric_symplectic(sigma):
    """Moduli of the eigenvalues of i Omega sigma, each pair collapsed."""
    ev = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ sigma.matrix())))
    return ev[2], ev[0]


def bose_entropy(x, terms=20000):
    """Entropy of the Bose-Einstein law with mean n = (x - 1)/2, summed term by term."""
    n = (x - 1) / 2
    with mpmath.workdps(30):
        n = mpmath.mpf(n)
        if n == 0:
            return 0.0
        q = n / (n + 1)
        s = mpmath.mpf(0)
        for k in range(terms):
            p = q**k / (n + 1)
            if p < mpmath.mpf(10) ** -40:
                break
            s -= p * mpmath.log(p)
        return float(s)


@st.composite
def physical_states(draw, hi=20.0):
    a = draw(st.floats(1.0, hi))
    b = draw(st.floats(1.0 + 1e-3, hi))
    c = draw(st.floats(-hi, hi))
    d = draw(st.floats(-hi, hi))
    try:
        return gc.TwoModeCovariance(a, b, c, d)
    except DomainError:
        assume(False)


@pytest.mark.parametrize("x", [1.0, 1.5, 3.0, 10.0, 201.0])
def test_entropy_matches_bose_einstein_sum(x):
    assert gc.entropy_f(x) == pytest.approx(bose_entropy(x), rel=1e-12, abs=1e-15)


def test_entropy_rejects_below_one():
    with pytest.raises(DomainError):
        gc.entropy_f(0.99)
    assert gc.entropy_f(1.0 - 1e-13) == 0.0


def test_entropy_vectorized():
    xs = np.array([1.0, 2.0, 5.0])
    np.testing.assert_allclose(gc.entropy_f(xs), [gc.entropy_f(x) for x in xs])


def test_reference_thermal_pair():
    s = gc.TwoModeCovariance(3, 3, 2, 2)
    sp = gc.symplectic_spectrum(s)
    assert (sp.nu_plus, sp.nu_minus) == pytest.approx((5.0, 1.0))
    r = gc.correlations(s)
    assert r.cond_det == pytest.approx(4.0)
    assert r.quantum == pytest.approx(0.4315231, abs=1e-7)
    assert r.classical == pytest.approx(0.4315231, abs=1e-7)
    # f(3) = 2 ln 2, f(5) = 3 ln 3 - 2 ln 2, nu_minus = 1 contributes nothing
    assert r.total == pytest.approx(6 * math.log(2) - 3 * math.log(3), rel=1e-13)
    assert not r.entangled


def test_two_mode_squeezed_vacuum():
    c = 2 * math.sqrt(2)
    s = gc.TwoModeCovariance(3, 3, c, -c)
    r = gc.correlations(s)
    # pure state: Q equals the local entropy, T twice that
    assert r.quantum == pytest.approx(gc.entropy_f(3.0), abs=1e-12)
    assert r.total == pytest.approx(2 * gc.entropy_f(3.0), abs=1e-12)
    assert r.entangled
    assert gc.symplectic_spectrum(s).nu_tilde_minus == pytest.approx(3 - 2 * math.sqrt(2))


def test_same_sign_squeezed_matrix_is_unphysical():
    c = 2 * math.sqrt(2)
    with pytest.raises(DomainError, match="unphysical"):
        gc.TwoModeCovariance(3, 3, c, c)


@pytest.mark.parametrize("args", [(0.5, 2, 0, 0), (2, 2, 3, 0), (float("nan"), 1, 0, 0)])
def test_constructor_rejects(args):
    with pytest.raises(DomainError):
        gc.TwoModeCovariance(*args)


def test_pure_second_mode_with_correlations_is_inconsistent():
    # b = 1 forces c = d = 0 physically; a tiny correlation slips past positivity
    s = gc.TwoModeCovariance(2.0, 1.0, 0.0, 0.0)
    assert gc.optimal_conditional_determinant(s) == 4.0
    with pytest.raises((InconsistentStateError, DomainError)):
        gc.optimal_conditional_determinant(gc.TwoModeCovariance(2.0, 1.0, 1e-9, 0.0))


def test_vacuum_has_no_correlations():
    r = gc.correlations(gc.TwoModeCovariance.vacuum())
    assert (r.quantum, r.classical, r.total) == (0.0, 0.0, 0.0)


@given(physical_states())
def test_spectrum_matches_eigen_decomposition(s):
    sp = gc.symplectic_spectrum(s)
    nup, num = numeric_symplectic(s)
    assert sp.nu_plus == pytest.approx(nup, rel=1e-8)
    assert sp.nu_minus == pytest.approx(num, rel=1e-6, abs=1e-8)
    assert sp.nu_minus >= 1 - 1e-9


@given(physical_states())
def test_additivity_and_signs(s):
    r = gc.correlations(s)
    assert r.quantum + r.classical == pytest.approx(gc.mutual_information(s), abs=1e-12)
    assert r.classical >= -1e-12
    assert r.quantum >= -1e-9
    assert r.total >= -1e-12


@given(physical_states(hi=8.0))
def test_discord_bounded_by_local_entropy(s):
    assert gc.correlations(s).quantum <= gc.entropy_f(s.b) + 1e-9


@given(physical_states())
def test_cond_det_between_one_and_a_squared(s):
    v = gc.optimal_conditional_determinant(s)
    assert 1.0 - 1e-12 <= v <= s.a**2 * (1 + 1e-12)


@given(physical_states(hi=6.0))
def test_closed_form_is_a_lower_bound_of_any_measurement(s):
    rng = np.random.default_rng(0)
    ll = rng.uniform(-8, 8, 64)
    ph = rng.uniform(0, np.pi, 64)
    vals = gc._cond_det(s, ll, ph)
    assert gc.optimal_conditional_determinant(s) <= vals.min() * (1 + 1e-10) + 1e-12


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_oracle_agreement(seed):
    rng = np.random.default_rng(seed)
    n = 0
    while n < 4:
        a, b = rng.uniform(1, 8, 2)
        c, d = rng.uniform(-8, 8, 2)
        try:
            s = gc.TwoModeCovariance(a, b, c, d)
        except DomainError:
            continue
        if b < 1 + 1e-6:
            continue
        n += 1
        assert gc.optimal_conditional_determinant(s) == pytest.approx(gc.measurement_oracle(s), abs=1e-8)


def test_oracle_on_homodyne_branch():
    # squeezed vacuum: optimal measurement is heterodyne-like, cond det 1
    c = 2 * math.sqrt(2)
    s = gc.TwoModeCovariance(3, 3, c, -c)
    assert gc.measurement_oracle(s) == pytest.approx(1.0, abs=1e-8)
    # classically correlated only in q: homodyne on q is optimal
    s = gc.TwoModeCovariance(3, 3, 2.5, 0.0)
    assert gc.optimal_conditional_determinant(s) == pytest.approx(gc.measurement_oracle(s), abs=1e-8)
    assert gc.optimal_conditional_determinant(s) == pytest.approx(3 * (3 - 2.5**2 / 3), rel=1e-10)


@given(st.floats(0.0, 50.0))
def test_mutual_information_invariant_under_mode_swap(a_shift):
    s = gc.TwoModeCovariance(2 + a_shift, 3, 1.5, 1.2)
    t = gc.TwoModeCovariance(3, 2 + a_shift, 1.5, 1.2)
    assert gc.mutual_information(s) == pytest.approx(gc.mutual_information(t), rel=1e-12)


def test_custom_entropy_is_used():
    flipped = lambda x: -gc.entropy_f(x)  # noqa: E731
    s = gc.TwoModeCovariance(3, 3, 2, 2)
    assert gc.mutual_information(s, entropy=flipped) == pytest.approx(-gc.mutual_information(s))
