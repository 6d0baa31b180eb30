import math

import numpy as np
import pytest

import oracles
from tds_psa import PerturbationSpec, TimeDelaySystem
from tds_psa.discretization import (OperatorBuilder, build_generator_N, build_L_sigma_N,
                                    build_mesh, differentiation_matrix, eval_pN,
                                    hamiltonian_blocks, level)
from tds_psa.errors import SystemValidationError
from tds_psa.system import shift


def test_mesh_examples():
    assert build_mesh(1, 1.0).points == pytest.approx([-1, 0, 1])
    r = math.sqrt(2) / 2
    assert build_mesh(2, 1.0).points == pytest.approx([-1, -r, 0, r, 1], abs=1e-15)
    assert build_mesh(2, 0.8).points == pytest.approx(0.8 * np.array([-1, -r, 0, r, 1]))


@pytest.mark.parametrize("N", [1, 2, 5, 8, 13])
def test_mesh_invariants(N):
    m = build_mesh(N, 1.7)
    p = m.points
    assert p[N] == 0.0
    assert np.array_equal(p[::-1], -p)
    assert np.all(np.diff(p) > 0)
    assert (p[0], p[-1]) == (-1.7, 1.7)
    D = differentiation_matrix(m)
    assert np.max(np.abs(D.sum(axis=1))) <= 1e-12 * np.max(np.abs(D))


def test_differentiation_matrix_example():
    D = differentiation_matrix(build_mesh(1, 1.0))
    expect = np.array([[-1.5, 2, -0.5], [-0.5, 0, 0.5], [0.5, -2, 1.5]])
    assert np.allclose(D, expect, atol=1e-14)


@pytest.mark.parametrize("N", [2, 4, 7])
def test_interpolation_reproduces_polynomials(N):
    m = build_mesh(N, 1.3)
    rng = np.random.default_rng(N)
    coef = rng.normal(size=2 * N + 1)
    t = rng.uniform(-1.3, 1.3, 9)
    got = m.interpolate(np.polyval(coef, m.points), t)
    assert np.allclose(got, np.polyval(coef, t), rtol=1e-12, atol=1e-12)
    # derivative of the same polynomial at the nodes
    dcoef = np.polyder(coef)
    assert np.allclose(m.D @ np.polyval(coef, m.points), np.polyval(dcoef, m.points),
                       rtol=1e-10, atol=1e-10)


def test_hamiltonian_block_example(sys_a):
    spec = PerturbationSpec([1.0], 0.1)
    sh = shift(sys_a, -0.9)
    M0, pairs = hamiltonian_blocks(sh, level(sys_a, spec, -0.9))
    assert np.allclose(M0, [[-0.1, -0.01], [1.0, 0.1]], atol=1e-15)
    assert pairs == []


@pytest.mark.parametrize("N", [1, 3, 6])
def test_middle_row_delay_free(sys_a, N):
    spec = PerturbationSpec([1.0], 0.1)
    L = build_L_sigma_N(sys_a, spec, build_mesh(N, 1.0), -0.9)
    row = L.middle_row()
    assert L.dim == 2 * (2 * N + 1)
    for k in range(2 * N + 1):
        blk = row[:, 2 * k:2 * k + 2]
        if k == N:
            assert np.allclose(blk, [[-0.1, -0.01], [1.0, 0.1]])
        else:
            assert np.all(blk == 0)


def test_middle_row_endpoint_cardinality(sys_b):
    spec = PerturbationSpec([1.0, 1.0], 0.1)
    N = 2
    row = build_L_sigma_N(sys_b, spec, build_mesh(N, 1.0), 0.0).middle_row()
    M0, [(Mp, Mm)] = hamiltonian_blocks(shift(sys_b, 0.0), level(sys_b, spec, 0.0))
    blocks = [row[:, 2 * k:2 * k + 2] for k in range(2 * N + 1)]
    assert np.allclose(blocks[0], Mp)
    assert np.allclose(blocks[-1], Mm)
    assert np.allclose(blocks[N], M0)
    for k in (1, 3):
        assert np.all(blocks[k] == 0)


def test_other_block_rows_are_derivative_rows(sys_b):
    spec = PerturbationSpec([1.0, 1.0], 0.1)
    mesh = build_mesh(3, 1.0)
    L = build_L_sigma_N(sys_b, spec, mesh, 0.2).matrix
    base = np.kron(mesh.D, np.eye(2))
    mask = np.ones(L.shape[0], bool)
    mask[2 * 3:2 * 4] = False
    assert np.array_equal(L[mask], base[mask])


def test_builder_rejects_wrong_mesh(sys_b):
    with pytest.raises(SystemValidationError):
        OperatorBuilder(sys_b, PerturbationSpec([1, 1], 0.1), build_mesh(4, 2.0))


@pytest.mark.parametrize("seed", range(4))
def test_delay_free_exactness(seed):
    rng = np.random.default_rng(seed)
    n = 3
    s = TimeDelaySystem([rng.normal(size=(n, n))], [0.0])
    spec = PerturbationSpec([1.0], 0.3)
    L = build_L_sigma_N(s, spec, build_mesh(4, 1.0), 0.1)
    M0, _ = hamiltonian_blocks(shift(s, 0.1), level(s, spec, 0.1))
    muL = np.linalg.eigvals(L.matrix)
    for mu in np.linalg.eigvals(M0):
        assert np.min(np.abs(muL - mu)) <= 1e-10 * np.linalg.norm(M0, 2) + 1e-12


@pytest.mark.parametrize("seed", range(6))
def test_spectrum_symmetry(seed):
    s = oracles.random_system(seed, nmax=3, mmax=2, complex_entries=True)
    rng = np.random.default_rng(seed + 50)
    spec = PerturbationSpec(rng.uniform(0.5, 2, s.m + 1), 0.2)
    L = build_L_sigma_N(s, spec, build_mesh(5, s.tau_max), float(rng.uniform(-1, 1))).matrix
    mu = np.linalg.eigvals(L)
    tol = 1e-8 * np.linalg.norm(L)
    for z in mu:
        assert np.min(np.abs(mu + z.conjugate())) <= tol


def test_pN_examples():
    m = build_mesh(3, 1.0)
    assert np.allclose(eval_pN(m, 0.0, m.points), 1.0)
    m20 = build_mesh(20, 1.0)
    assert abs(eval_pN(m20, 1j, -1.0) - np.exp(-1j)) <= 1e-10


def test_generator_examples(sys_a, sys_b):
    assert np.array_equal(build_generator_N(sys_a, 16), np.array([[-1.0]]))
    G = build_generator_N(sys_b, 16)
    assert G.shape == (17, 17)
    mu = np.linalg.eigvals(G)
    ref = oracles.sys_b_rightmost()
    assert np.min(np.abs(mu - ref)) <= 1e-6
    assert np.min(np.abs(mu - ref.conjugate())) <= 1e-6
