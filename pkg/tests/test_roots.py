import math

import numpy as np
import pytest

import oracles
from tds_psa import PerturbationSpec, TimeDelaySystem, characteristic_roots, spectral_abscissa
from tds_psa.discretization import build_generator_N
from tds_psa.roots import rightmost_roots
from tds_psa.system import eval_f


def test_delay_free_scalar(sys_a):
    rs = characteristic_roots(sys_a, 16, -2.0)
    assert rs.roots == pytest.approx([-1.0])
    assert rs.alpha0 == -1.0
    assert spectral_abscissa(sys_a) == -1.0


def test_diagonal_delay_free():
    s = TimeDelaySystem([np.diag([-1.0, -2.0])], [0.0])
    assert spectral_abscissa(s) == pytest.approx(-1.0)


def test_sys_b_rightmost_pair(sys_b):
    ref = oracles.sys_b_rightmost()
    rs = characteristic_roots(sys_b, 16, -1.0)
    assert any(abs(z - ref) <= 1e-6 for z in rs.roots)
    assert any(abs(z - ref.conjugate()) <= 1e-6 for z in rs.roots)
    assert abs(spectral_abscissa(sys_b) - ref.real) <= 1e-10


def test_reported_roots_are_roots(sys_b):
    rs = rightmost_roots(sys_b)
    spec = PerturbationSpec([1, 1], 0.1)
    z = rs.roots[np.argmax(rs.roots.real)]
    assert rs.alpha0 == max(rs.roots.real)
    # sigma_min at the refined root sits at rounding level
    assert 1.0 / eval_f(sys_b, spec, z) <= 1e-12 * (sys_b.scale + abs(z)) * 5


@pytest.mark.parametrize("seed", range(5))
def test_real_data_roots_closed_under_conjugation(seed):
    s = oracles.random_system(seed)
    rs = rightmost_roots(s)
    for z in rs.roots:
        if abs(z.imag) > 1e-8:
            assert np.min(np.abs(rs.roots - z.conjugate())) <= 1e-7
    bound = 1e-8 * (1 + np.abs(rs.roots)) * s.scale
    assert np.all(rs.residuals <= bound)


def test_escalation_improves(sys_b):
    ref = oracles.sys_b_rightmost().real
    # raw collocation eigenvalues, before Newton polishes them to full accuracy
    errs = [abs(np.max(np.linalg.eigvals(build_generator_N(sys_b, Na)).real) - ref)
            for Na in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]


def test_f_blows_up_approaching_root(sys_b):
    ref = oracles.sys_b_rightmost()
    spec = PerturbationSpec([1, 1], 0.1)
    vals = [eval_f(sys_b, spec, complex(ref.real + 10.0 ** -k, ref.imag)) for k in range(1, 7)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 1e5
    assert eval_f(sys_b, spec, 100.0) < eval_f(sys_b, spec, 10.0) < 1.0
    assert math.isfinite(vals[-1])
