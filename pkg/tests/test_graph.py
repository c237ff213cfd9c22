import json
import math

import numpy as np
import pytest
from conftest import brute_force_involutions, random_graph

from spinbus.errors import ConfigParseError, GraphValidationError, InvalidInputError, InvalidSizeError
from spinbus.graph import (
    Bond,
    Model,
    SpinGraph,
    connected_components,
    cycle_phase,
    disjoint_union,
    fundamental_cycles,
    gauge_transform,
    graph_to_dict,
    make_chain,
    make_graph,
    make_ring,
    parse_graph,
)


def test_single_site_chain_has_no_bonds():
    g = make_chain(1, 1.0, [0.0])
    assert g.n_sites == 1
    assert g.bonds == ()


def test_two_site_chain():
    g = make_chain(2, 1.0, [0.0, 0.0])
    assert g.bonds == (Bond(0, 1, 1.0, 0.0),)


def test_five_chain_path_and_unique_mirror():
    g = make_chain(5, 1.0, [0.0] * 5)
    assert [(b.i, b.j) for b in g.bonds] == [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert brute_force_involutions(g) == [(0, 1, 2, 3, 4), (4, 3, 2, 1, 0)]


def test_chain_rejects_zero_sites():
    with pytest.raises(InvalidSizeError):
        make_chain(0)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_ring_rejects_small_n(n):
    with pytest.raises(InvalidSizeError):
        make_ring(n)


def test_zero_flux_ring():
    g = make_ring(5, 1.0, 0.0)
    assert len(g.bonds) == 5
    assert all(b.phase == 0.0 for b in g.bonds)


def test_unit_flux_ring_phases():
    g = make_ring(4, 1.0, 1.0)
    assert all(b.phase == pytest.approx(math.pi / 2) for b in g.bonds)
    assert cycle_phase(g, [0, 1, 2, 3, 0]) == pytest.approx(2 * math.pi)


def test_half_flux_three_ring_phases():
    g = make_ring(3, 1.0, 0.5)
    assert all(b.phase == pytest.approx(math.pi / 3) for b in g.bonds)


def test_reversed_bond_negates_phase():
    g = make_ring(5, 1.0, 0.3)
    for b in g.bonds:
        assert g.phase(b.j, b.i) == -g.phase(b.i, b.j)
    assert g.bond(0, 2) is None


def test_identity_gauge():
    g = make_ring(5, 1.0, 0.3)
    assert gauge_transform(g, [0.0] * 5) == g


def test_gauge_telescopes_ring_phase_onto_last_bond():
    g = make_ring(4, 1.0, 1.0)
    h = gauge_transform(g, [0.0, -math.pi / 2, -math.pi, -3 * math.pi / 2])
    phases = [h.phase(k, (k + 1) % 4) for k in range(4)]
    np.testing.assert_allclose(phases, [0, 0, 0, 2 * math.pi], atol=1e-12)
    assert cycle_phase(h, [0, 1, 2, 3, 0]) == pytest.approx(2 * math.pi)


def test_gauge_length_mismatch():
    with pytest.raises(InvalidInputError):
        gauge_transform(make_ring(4), [0.0] * 3)


def test_gauge_preserves_every_fundamental_cycle(rng):
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(3, 8)), density=0.7)
        h = gauge_transform(g, rng.uniform(-7, 7, g.n_sites))
        assert [(b.coupling) for b in h.bonds] == [b.coupling for b in g.bonds]
        assert h.fields == g.fields
        for walk in fundamental_cycles(g):
            assert cycle_phase(h, walk) == pytest.approx(cycle_phase(g, walk), abs=1e-10)


def test_fundamental_cycle_count(rng):
    for _ in range(10):
        g = random_graph(rng, 7, density=0.6)
        expected = len(g.bonds) - g.n_sites + len(connected_components(g))
        cycles = fundamental_cycles(g)
        assert len(cycles) == expected
        for walk in cycles:
            assert walk[0] == walk[-1]
            assert all(g.bond(walk[k], walk[k + 1]) is not None for k in range(len(walk) - 1))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_zero_flux_ring_reflections(n):
    invs = brute_force_involutions(make_ring(n))
    reflections = [p for p in invs if any(p[i] != i for i in range(n))]
    # odd n: n reflections; even n: n reflections plus the half-turn rotation
    assert len(reflections) == (n if n % 2 else n + 1)
    if n % 2:
        for p in reflections:
            assert sum(p[i] == i for i in range(n)) == 1


def test_validation_errors():
    with pytest.raises(GraphValidationError, match="self-loop"):
        make_graph(2, [(0, 0, 1.0)])
    with pytest.raises(GraphValidationError, match="duplicate"):
        make_graph(3, [(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(GraphValidationError, match="outside"):
        make_graph(2, [(0, 2, 1.0)])
    with pytest.raises(GraphValidationError, match="fields"):
        SpinGraph(Model.XY, 3, (0.0, 0.0), ())


def test_graph_is_immutable():
    g = make_chain(3)
    with pytest.raises(AttributeError):
        g.n_sites = 4


def test_parse_minimal_document():
    doc = '{"model": "xy", "sites": [{"id": 0}, {"id": 1}], "bonds": [{"i": 0, "j": 1, "J": 1.0}]}'
    g = parse_graph(doc)
    assert g == make_chain(2)


def test_parse_rejects_self_loop():
    doc = {"model": "xy", "sites": [{"id": 0}], "bonds": [{"i": 0, "j": 0, "J": 1.0}]}
    with pytest.raises(GraphValidationError, match="self-loop"):
        parse_graph(json.dumps(doc))


def test_parse_ring_shorthand():
    g = parse_graph('{"ring": {"n": 5, "J": 1.0, "flux": 0.3}}')
    assert g == make_ring(5, 1.0, 0.3)


def test_parse_chain_shorthand_heisenberg():
    g = parse_graph('{"model": "heisenberg", "chain": {"n": 4, "J": 0.5}}')
    assert g == make_chain(4, 0.5, model=Model.HEISENBERG)


def test_parse_error_has_line_number():
    with pytest.raises(ConfigParseError) as info:
        parse_graph('{\n  "model": "xy",\n  "sites": [\n}')
    assert info.value.line == 4
    assert "line 4" in str(info.value)


def test_parse_error_names_field():
    with pytest.raises(ConfigParseError) as info:
        parse_graph('{"sites": [{"id": 0}, {"id": 1}], "bonds": [{"i": 0, "j": 1, "J": "big"}]}')
    assert info.value.field == "bonds[0].J"


def test_parse_rejects_bad_site_ids():
    with pytest.raises(GraphValidationError):
        parse_graph('{"sites": [{"id": 0}, {"id": 2}]}')
    with pytest.raises(GraphValidationError):
        parse_graph('{"sites": [{"id": 0}, {"id": 1}], "bonds": [{"i": 0, "j": 5, "J": 1}]}')


def test_parse_unknown_model():
    with pytest.raises(ConfigParseError, match="model"):
        parse_graph('{"model": "ising", "chain": {"n": 3}}')


def test_document_round_trip(rng):
    for _ in range(5):
        g = random_graph(rng, 6)
        assert parse_graph(json.dumps(graph_to_dict(g))) == g


def test_disjoint_union_components():
    g = disjoint_union(make_chain(2), make_chain(3))
    assert g.n_sites == 5
    assert connected_components(g) == [[0, 1], [2, 3, 4]]
