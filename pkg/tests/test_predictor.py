import numpy as np
import pytest

import oracles
from tds_psa import PerturbationSpec, has_imaginary_eigs, predict
from tds_psa.discretization import build_L_sigma_N, build_mesh
from tds_psa.errors import PredictorError
from tds_psa.predictor import alpha_f_N
from tds_psa.roots import spectral_abscissa
from tds_psa.system import eval_f_batch


@pytest.fixture
def spec_a():
    return PerturbationSpec([1.0], 0.1)


@pytest.mark.parametrize("N", [1, 4])
def test_imaginary_test_scalar_examples(sys_a, spec_a, N):
    mesh = build_mesh(N, 1.0)
    found, fr = has_imaginary_eigs(build_L_sigma_N(sys_a, spec_a, mesh, -0.95))
    assert found and fr == pytest.approx([np.sqrt(0.01 - 0.0025)], rel=1e-6)
    assert has_imaginary_eigs(build_L_sigma_N(sys_a, spec_a, mesh, -0.85)) == (False, [])
    found, fr = has_imaginary_eigs(build_L_sigma_N(sys_a, spec_a, mesh, -0.9))
    assert found and fr[0] == pytest.approx(0.0, abs=1e-6)


def test_tol_im_must_be_positive(sys_a, spec_a):
    L = build_L_sigma_N(sys_a, spec_a, build_mesh(2, 1.0), -0.9)
    with pytest.raises(ValueError):
        has_imaginary_eigs(L, 0.0)


def test_predict_fine_tolerance(sys_a, spec_a):
    p = predict(sys_a, spec_a, build_mesh(3, 1.0), -1.0, 1e-3)
    lo, hi = p.bracket
    # one ulp of slack: the doubling steps land on -0.9 up to rounding
    assert -0.902 <= p.sigma_tilde <= -0.9 + 1e-15
    assert lo <= -0.9 + 1e-15 and -0.9 <= hi
    assert hi - lo <= 2e-3


def test_predict_coarse_tolerance(sys_a, spec_a):
    p = predict(sys_a, spec_a, build_mesh(6, 1.0), -1.0, 0.05)
    assert -1.0 <= p.sigma_tilde <= -0.9
    assert p.bracket[1] - p.bracket[0] <= 0.1
    a = -1.0 - p.sigma_tilde
    assert p.frequencies[0] == pytest.approx(np.sqrt(max(0.01 - a * a, 0.0)), abs=1e-5)


@pytest.mark.parametrize("seed", range(4))
def test_bracket_semantics(sys_b, seed):
    s = sys_b if seed == 0 else oracles.random_system(seed)
    spec = PerturbationSpec.uniform(s, 0.1)
    a0 = spectral_abscissa(s)
    p = predict(s, spec, build_mesh(6, s.tau_max), a0 - 1e-8, 0.01)
    lo, hi = p.bracket
    assert p.sigma_tilde == lo and hi - lo <= 0.02
    for sigma, ok in p.trace:
        assert ok == (sigma <= lo)
    assert p.frequencies == sorted(p.frequencies)
    assert all(w >= 0 for w in p.frequencies)
    assert len(set(p.frequencies)) == len(p.frequencies)


def test_iteration_cap(sys_b):
    with pytest.raises(PredictorError) as info:
        predict(sys_b, PerturbationSpec([1, 1], 0.1), build_mesh(4, 1.0), -0.4, 1e-9,
                max_iter=3)
    assert len(info.value.trace) == 3


@pytest.mark.parametrize("which", ["a", "b"])
def test_imaginary_test_is_monotone(which):
    s = oracles.sys_a() if which == "a" else oracles.sys_b()
    spec = PerturbationSpec.uniform(s, 0.1)
    a0 = spectral_abscissa(s)
    mesh = build_mesh(6, s.tau_max if s.m else 1.0)
    flags = [has_imaginary_eigs(build_L_sigma_N(s, spec, mesh, x))[0]
             for x in np.linspace(a0 + 0.01, a0 + 0.4, 20)]
    first_false = flags.index(False)
    assert all(flags[:first_false]) and not any(flags[first_false:])


def test_alpha_f_N_scalar(sys_a, spec_a):
    mesh = build_mesh(4, 1.0)
    grid = np.linspace(-2, 2, 41)
    for sigma in (-0.8, -0.5, 0.3):
        assert alpha_f_N(sys_a, spec_a, mesh, sigma, grid) == pytest.approx(1 / abs(1 + sigma))


def test_alpha_f_N_refinement_and_convergence(sys_b):
    spec = PerturbationSpec([1, 1], 0.1)
    coarse = np.linspace(0, 3, 31)
    fine = np.linspace(0, 3, 301)
    m6 = build_mesh(6, 1.0)
    assert alpha_f_N(sys_b, spec, m6, -0.2, fine) >= alpha_f_N(sys_b, spec, m6, -0.2, coarse)
    exact = float(np.max(eval_f_batch(sys_b, spec, -0.2 + 1j * fine)))
    assert alpha_f_N(sys_b, spec, build_mesh(20, 1.0), -0.2, fine) == pytest.approx(exact,
                                                                                  abs=1e-6)


def test_imaginary_eigs_match_level_crossings(sys_b):
    spec = PerturbationSpec([1, 1], 0.1)
    mesh = build_mesh(6, 1.0)
    omegas = np.linspace(0, 4, 801)
    for sigma in (-0.25, -0.2, -0.17, -0.1, 0.0):
        found, _ = has_imaginary_eigs(build_L_sigma_N(sys_b, spec, mesh, sigma))
        sup = alpha_f_N(sys_b, spec, mesh, sigma, omegas)
        assert found == (sup >= 1 / spec.epsilon)
