import math

import numpy as np
import pytest
import scipy.linalg
from conftest import random_graph
from hypothesis import given, settings
from hypothesis import strategies as st

from spinbus.dynamics import (
    amplitude_series,
    amplitude_trace,
    diagonalize,
    evolve_state,
    series_to_csv,
    transition_amplitudes,
)
from spinbus.errors import InvalidInputError
from spinbus.graph import disjoint_union, gauge_transform, make_chain, make_ring
from spinbus.hamiltonian import build_single_excitation


def prop(g):
    return diagonalize(build_single_excitation(g))


def test_two_by_two_eigenvalues():
    p = diagonalize(np.array([[0, 2], [2, 0]]))
    np.testing.assert_allclose(p.eigenvalues, [-2, 2], atol=1e-14)


def test_diagonal_matrix():
    p = diagonalize(np.diag([3.0, -1.0]))
    np.testing.assert_allclose(p.eigenvalues, [-1, 3])
    np.testing.assert_allclose(np.abs(p.eigenvectors), [[0, 1], [1, 0]])


def test_three_ring_spectrum():
    p = prop(make_ring(3))
    np.testing.assert_allclose(p.eigenvalues, [-2, -2, 4], atol=1e-12)


def test_half_flux_three_ring_spectrum():
    p = prop(make_ring(3, 1.0, 0.5))
    expected = sorted(4 * math.cos(2 * math.pi * k / 3 + math.pi / 3) for k in range(3))
    np.testing.assert_allclose(p.eigenvalues, expected, atol=1e-12)


def test_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        diagonalize(np.array([[0, 1], [0.5, 0]]))


def test_reconstruction_and_orthonormality(rng):
    for _ in range(10):
        h = build_single_excitation(random_graph(rng, 7)).matrix
        p = diagonalize(h)
        np.testing.assert_allclose(p.matrix(), h, atol=1e-10)
        v = p.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(7), atol=1e-10)


def test_deterministic():
    h = build_single_excitation(make_ring(6, 1.0, 0.2)).matrix
    a, b = diagonalize(h), diagonalize(h.copy())
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    assert a.fingerprint == b.fingerprint


def test_identity_at_zero(rng):
    p = prop(random_graph(rng, 6))
    np.testing.assert_allclose(transition_amplitudes(p, 0.0).f, np.eye(6), atol=1e-12)


def test_two_site_analytic():
    p = prop(make_chain(2))
    for t in np.linspace(0, 5, 50):
        f = transition_amplitudes(p, t).f
        assert f[1, 0] == pytest.approx(-1j * math.sin(2 * t), abs=1e-12)
        assert f[0, 0] == pytest.approx(math.cos(2 * t), abs=1e-12)
    assert abs(transition_amplitudes(p, math.pi / 4).f[1, 0]) == pytest.approx(1.0, abs=1e-12)


def test_three_ring_analytic():
    p = prop(make_ring(3))
    t = np.linspace(0, 3, 301)
    np.testing.assert_allclose(np.abs(amplitude_trace(p, 1, 0, t)) ** 2, (2 - 2 * np.cos(6 * t)) / 9, atol=1e-12)
    assert abs(transition_amplitudes(p, math.pi / 6).f[1, 0]) ** 2 == pytest.approx(4 / 9, abs=1e-12)


def test_matches_expm_oracle(rng):
    for _ in range(10):
        h = build_single_excitation(random_graph(rng, 6)).matrix
        p = diagonalize(h)
        t = rng.uniform(0, 10)
        np.testing.assert_allclose(transition_amplitudes(p, t).f, scipy.linalg.expm(-1j * h * t), atol=1e-10)


def test_unitarity_random(rng):
    worst = 0.0
    for _ in range(100):
        p = prop(random_graph(rng, int(rng.integers(1, 10))))
        f = transition_amplitudes(p, rng.uniform(-50, 50)).f
        worst = max(worst, np.max(np.abs(np.sum(np.abs(f) ** 2, axis=0) - 1)))
    assert worst <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20), st.integers(0, 2 ** 31))
def test_group_property(t1, t2, seed):
    p = prop(random_graph(np.random.default_rng(seed), 5))
    f1 = transition_amplitudes(p, t1).f
    f2 = transition_amplitudes(p, t2).f
    np.testing.assert_allclose(f1 @ f2, transition_amplitudes(p, t1 + t2).f, atol=1e-9)


def test_flux_free_symmetry(rng):
    for _ in range(10):
        p = prop(random_graph(rng, 6, flux=False))
        f = transition_amplitudes(p, rng.uniform(0, 20)).f
        np.testing.assert_allclose(f, f.T, atol=1e-10)


def test_isolated_site_amplitude_is_one():
    p = prop(disjoint_union(make_chain(3), make_chain(1, fields=[0.4])))
    t = np.linspace(0, 30, 200)
    np.testing.assert_allclose(np.abs(amplitude_trace(p, 3, 3, t)), 1.0, atol=1e-12)


def test_gauge_invariance_of_probabilities(rng):
    for _ in range(10):
        g = random_graph(rng, 6)
        h = gauge_transform(g, rng.uniform(-np.pi, np.pi, 6))
        t = rng.uniform(0, 20)
        a = np.abs(transition_amplitudes(prop(g), t).f)
        b = np.abs(transition_amplitudes(prop(h), t).f)
        np.testing.assert_allclose(a, b, atol=1e-10)


def test_evolve_state_matches_matrix(rng):
    p = prop(random_graph(rng, 5))
    psi = rng.normal(size=5) + 1j * rng.normal(size=5)
    np.testing.assert_allclose(evolve_state(p, psi, 1.7), transition_amplitudes(p, 1.7).f @ psi, atol=1e-12)


def test_series_trivial_rows():
    p = prop(make_ring(4))
    rows = amplitude_series(p, [0.0], [(2, 2), (1, 3)])
    assert rows[0].f == pytest.approx(1.0)
    assert rows[1].f == pytest.approx(0.0, abs=1e-15)


def test_series_two_site():
    p = prop(make_chain(2))
    rows = amplitude_series(p, [math.pi / 8, math.pi / 4], [(1, 0)])
    np.testing.assert_allclose([abs(r.f) for r in rows], [math.sin(math.pi / 4), 1.0], atol=1e-12)


def test_series_matches_pointwise(rng):
    p = prop(random_graph(rng, 5))
    times = np.linspace(0, 4, 9)
    rows = amplitude_series(p, times, [(0, 1), (3, 2)])
    assert len(rows) == 18
    for r in rows:
        assert r.f == pytest.approx(transition_amplitudes(p, r.t).f[r.i, r.j], abs=1e-12)
        assert r.abs2 == pytest.approx(abs(r.f) ** 2)


def test_series_errors():
    p = prop(make_chain(3))
    with pytest.raises(InvalidInputError):
        amplitude_series(p, [0.0], [(0, 3)])
    with pytest.raises(InvalidInputError):
        amplitude_series(p, [], [(0, 1)])


def test_series_csv_format():
    p = prop(make_chain(2))
    text = series_to_csv(amplitude_series(p, [0.0, math.pi / 8], [(1, 0)]))
    lines = text.splitlines()
    assert lines[0] == "t,i,j,re_f,im_f,abs2"
    assert lines[1] == "0,1,0,0,0,0"
    t, i, j, re_f, im_f, abs2 = lines[2].split(",")
    assert im_f == "-0.707106781187"
    assert abs2 == "0.5"
