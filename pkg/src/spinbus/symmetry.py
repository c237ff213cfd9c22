"""Mirror (involutive) symmetries of spin graphs and class I / II configurations.

An involution p is accepted when relabelling sites by p maps the
single-excitation Hamiltonian onto itself, or onto its complex conjugate.
The conjugating case covers reflections of flux-threaded rings, which
reverse the loop orientation. Amplitude identities and predicted optima
only hold for non-conjugating symmetries, i.e. flux-free graphs in practice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import Propagator, amplitude_trace
from .errors import InvalidClassificationError, InvalidInputError, InvalidTargetError, ResourceError
from .graph import SpinGraph
from .hamiltonian import build_single_excitation

__all__ = [
    "Involution",
    "SymmetryClass",
    "SymmetryClassification",
    "Prediction",
    "MAX_EXHAUSTIVE_SITES",
    "find_involutions",
    "classify",
    "predicted_cmax",
    "counterpart_coverage",
    "permute_matrix",
]

MAX_EXHAUSTIVE_SITES = 16
MATCH_TOL = 1e-12
SEARCH_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class Involution:
    permutation: tuple[int, ...]
    conjugating: bool = False

    @property
    def fixed_sites(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self.permutation) if i == j)

    @property
    def swap_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, j in enumerate(self.permutation) if i < j)

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.permutation))

    def __call__(self, site: int) -> int:
        return self.permutation[site]

    def swaps(self, a: int, b: int) -> bool:
        return a != b and self.permutation[a] == b

    def cycle_notation(self) -> str:
        """One-line cycle notation, e.g. ``(0 4)(1 3)``; identity is ``()``."""
        pairs = self.swap_pairs
        if not pairs:
            return "()"
        return "".join(f"({i} {j})" for i, j in pairs)

    def to_dict(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "cycles": self.cycle_notation(),
            "fixed_sites": sorted(self.fixed_sites),
            "conjugating": self.conjugating,
        }

    @classmethod
    def from_dict(cls, d) -> Involution:
        return cls(tuple(d["permutation"]), bool(d.get("conjugating", False)))


class SymmetryClass(str, enum.Enum):
    CLASS_I = "class-I"
    CLASS_II = "class-II"
    NONE = "none"


@dataclass(frozen=True)
class SymmetryClassification:
    cls: SymmetryClass
    witness: Involution | None = None

    def to_dict(self) -> dict:
        return {"class": self.cls.value,
                "witness": None if self.witness is None else self.witness.to_dict()}

    @classmethod
    def from_dict(cls, d) -> SymmetryClassification:
        w = d.get("witness")
        return cls(SymmetryClass(d["class"]), None if w is None else Involution.from_dict(w))


class Prediction(NamedTuple):
    """Approximate optimum and the amplitudes it rests on.

    ``cross_terms`` holds |f_m,nu| and |f_n,nu| at t_star when nu is known;
    the approximation is only trustworthy when these are small.
    """

    value: float
    amplitude: float
    cross_terms: tuple[float, float] | None


def permute_matrix(h: np.ndarray, perm) -> np.ndarray:
    """P h P^T for the permutation matrix sending site i to perm[i]."""
    perm = np.asarray(perm)
    out = np.empty_like(h)
    out[np.ix_(perm, perm)] = h
    return out


def _search(h: np.ndarray, conjugate: bool, tol: float) -> list[tuple[int, ...]]:
    n = h.shape[0]
    target = h.conj() if conjugate else h
    perm = [-1] * n
    found = []
    nodes = 0

    def consistent(new):
        for s in new:
            ps = perm[s]
            for a in range(n):
                pa = perm[a]
                if pa < 0:
                    continue
                if abs(h[pa, ps] - target[a, s]) > tol:
                    return False
        return True

    def recurse(start):
        nonlocal nodes
        nodes += 1
        if nodes > SEARCH_NODE_BUDGET:
            raise ResourceError("involution search exceeded its node budget")
        i = start
        while i < n and perm[i] >= 0:
            i += 1
        if i == n:
            found.append(tuple(perm))
            return
        for j in range(i, n):
            if perm[j] >= 0:
                continue
            perm[i], perm[j] = j, i
            if consistent((i, j) if j != i else (i,)):
                recurse(i + 1)
            perm[i] = perm[j] = -1

    recurse(0)
    return found


def _cycle_order(g: SpinGraph) -> list[int] | None:
    """Sites in cycle order if ``g`` is a single ring, else None."""
    n = g.n_sites
    if n < 3 or len(g.bonds) != n or any(len(g.neighbors(s)) != 2 for s in range(n)):
        return None
    order = [0]
    prev, cur = None, 0
    while True:
        nxt = [s for s in g.neighbors(cur) if s != prev][0]
        if nxt == 0:
            break
        order.append(nxt)
        prev, cur = cur, nxt
    return order if len(order) == n else None


def _ring_candidates(order: list[int]) -> list[tuple[int, ...]]:
    n = len(order)
    cands = []
    for r in range(n):
        for reflect in (False, True):
            perm = [0] * n
            for k, s in enumerate(order):
                perm[s] = order[(r - k) % n] if reflect else order[(k + r) % n]
            if all(perm[perm[s]] == s for s in range(n)):
                cands.append(tuple(perm))
    return sorted(set(cands))


def find_involutions(g: SpinGraph) -> list[Involution]:
    """All permutations p with p(p(i)) = i that preserve the weighted graph.

    The identity is included. Output is sorted lexicographically by the
    permutation image. Graphs above MAX_EXHAUSTIVE_SITES sites are only
    handled when they form a single ring.
    """
    h = build_single_excitation(g).matrix
    tol = MATCH_TOL * max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if g.n_sites > MAX_EXHAUSTIVE_SITES:
        order = _cycle_order(g)
        if order is None:
            raise ResourceError(
                f"exhaustive involution search is limited to {MAX_EXHAUSTIVE_SITES} sites "
                f"(got {g.n_sites}) and the graph is not a ring"
            )
        exact, conj = [], []
        for perm in _ring_candidates(order):
            ph = permute_matrix(h, perm)
            if np.max(np.abs(ph - h)) <= tol:
                exact.append(perm)
            elif np.max(np.abs(ph - h.conj())) <= tol:
                conj.append(perm)
    else:
        exact = _search(h, False, tol)
        conj = _search(h, True, tol)
    result = {p: Involution(p, False) for p in exact}
    for p in conj:
        result.setdefault(p, Involution(p, True))
    return [result[p] for p in sorted(result)]


def _check_site(g: SpinGraph, s, name):
    if s is None or not 0 <= s < g.n_sites:
        raise InvalidInputError(f"{name}={s!r} is not a site of a {g.n_sites}-site graph")


def classify(g: SpinGraph, mu: int, nu: int | None, m: int, n: int,
             involutions: list[Involution] | None = None) -> SymmetryClassification:
    """Class I if a symmetry fixes mu and swaps m, n; otherwise class II if one
    swaps mu, nu and m, n. Class I wins when both apply."""
    for name, s in (("mu", mu), ("m", m), ("n", n)):
        _check_site(g, s, name)
    if nu is not None:
        _check_site(g, nu, "nu")
    if m == n:
        raise InvalidTargetError(f"target sites must differ, got m = n = {m}")
    if involutions is None:
        involutions = find_involutions(g)
    for inv in involutions:
        if inv(mu) == mu and inv.swaps(m, n):
            return SymmetryClassification(SymmetryClass.CLASS_I, inv)
    if nu is not None and nu != mu:
        for inv in involutions:
            if inv.swaps(mu, nu) and inv.swaps(m, n):
                return SymmetryClassification(SymmetryClass.CLASS_II, inv)
    return SymmetryClassification(SymmetryClass.NONE, None)


def predicted_cmax(cls: SymmetryClassification, p: Propagator, mu: int, m: int, t_star: float,
                   nu: int | None = None) -> Prediction:
    """Approximate optimum: 2|f_m,mu(t*)|^2 for class I, |f_m,mu(t*)|^2 for class II."""
    if cls.cls is SymmetryClass.NONE or cls.witness is None:
        raise InvalidClassificationError("no symmetry class to base a prediction on")
    amp = float(abs(amplitude_trace(p, m, mu, [t_star])[0]))
    if cls.cls is SymmetryClass.CLASS_II and nu is None:
        nu = cls.witness(mu)
    cross = None
    if nu is not None and nu != mu:
        n = cls.witness(m)
        cross = (float(abs(amplitude_trace(p, m, nu, [t_star])[0])),
                 float(abs(amplitude_trace(p, n, nu, [t_star])[0])))
    factor = 2.0 if cls.cls is SymmetryClass.CLASS_I else 1.0
    return Prediction(factor * amp * amp, amp, cross)


def counterpart_coverage(g: SpinGraph, mu: int,
                         involutions: list[Involution] | None = None) -> list[tuple[int, int]]:
    """Target pairs reachable as class I from a single excitation on ``mu``."""
    _check_site(g, mu, "mu")
    if involutions is None:
        involutions = find_involutions(g)
    pairs = set()
    for inv in involutions:
        if inv(mu) == mu:
            pairs.update(inv.swap_pairs)
    return sorted(pairs)
