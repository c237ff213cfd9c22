import itertools

import numpy as np
import pytest

from spinbus.graph import Model, disjoint_union, make_chain, make_graph, make_ring


def random_graph(rng, n, model=None, flux=True, fields=True, density=0.5):
    """Random connected-or-not graph with random couplings, fields and phases."""
    model = model or [Model.XY, Model.HEISENBERG][int(rng.integers(2))]
    bonds = []
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < density:
            phase = rng.uniform(-np.pi, np.pi) if flux else 0.0
            bonds.append((i, j, rng.uniform(-1.5, 1.5), phase))
    f = rng.uniform(-1, 1, n) if fields else np.zeros(n)
    return make_graph(n, bonds, f, model)


def oracle_graphs():
    """Twenty small test graphs spanning models, fields, flux and disconnection."""
    rng = np.random.default_rng(20240617)
    xy, hb = Model.XY, Model.HEISENBERG
    graphs = [
        make_chain(1, fields=[0.3]),
        make_chain(2),
        make_chain(3, model=hb),
        make_chain(5, model=hb),
        make_chain(6, [1.0, 0.6, 1.4, 0.8, 1.2], fields=[0.1, -0.2, 0.3, 0.0, 0.2, -0.1]),
        make_chain(8, 0.7, model=hb),
        make_ring(3, 1.0, 0.5),
        make_ring(4, 1.0, 1.0),
        make_ring(5, 1.0, 0.3, model=hb),
        make_ring(7, 0.8, 0.0, fields=np.linspace(-0.5, 0.5, 7)),
        make_ring(8, 1.2, 0.25, model=hb),
        disjoint_union(make_chain(2), make_chain(3)),
        disjoint_union(make_chain(1), make_chain(1)),
        disjoint_union(make_ring(3, 1.0, 0.2, model=hb), make_chain(2, model=hb)),
        disjoint_union(make_ring(4, 1.0, 0.7), make_chain(1, fields=[0.5]), make_chain(2)),
    ]
    for k in range(5):
        n = int(rng.integers(3, 9))
        graphs.append(random_graph(rng, n, model=[xy, hb][k % 2]))
    return graphs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_force_involutions(g, tol=1e-12):
    """Every order-<=2 permutation of S_n preserving the weighted graph.

    Enumerates all n! permutations and compares couplings, fields and bond
    phases directly (phases matched exactly, or all negated together).
    """
    n = g.n_sites

    def hop(i, j):
        b = g.bond(i, j)
        return None if b is None else b.coupling * np.exp(1j * b.phase)

    out = []
    for perm in itertools.permutations(range(n)):
        if any(perm[perm[i]] != i for i in range(n)):
            continue
        if any(abs(g.fields[i] - g.fields[perm[i]]) > tol for i in range(n)):
            continue
        for conj in (False, True):
            ok = True
            for i, j in itertools.combinations(range(n), 2):
                a, b = hop(i, j), hop(perm[i], perm[j])
                if (a is None) != (b is None):
                    ok = False
                    break
                if a is not None and abs(b - (np.conj(a) if conj else a)) > tol:
                    ok = False
                    break
            if ok:
                out.append(perm)
                break
    return sorted(out)
