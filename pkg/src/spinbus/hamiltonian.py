"""Single-excitation and full Hilbert-space Hamiltonians.

Conventions: sigma^z|up> = +|up>, an excitation is an up spin. The XY bond
term J(sx sx + sy sy) equals 2J(s+ s- + s- s+); a bond phase theta on
i -> j multiplies the s+_i s-_j part by exp(i theta). The Heisenberg bond
adds J sz sz. Each unordered pair is counted once.

In the one-excitation basis |k> (site k up, all others down):

* XY:         H_kk = 2 B_k,                      constant -sum(B) dropped
* Heisenberg: H_kk = 2 B_k - 2 sum_{l~k} J_kl,   constant sum(J) - sum(B) dropped
* both:       H_kl = 2 J_kl exp(i phase(k -> l))

The dropped constant only adds a global phase to exp(-iHt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BlockLeakageError, ResourceError
from .graph import Model, SpinGraph

__all__ = [
    "SingleExcHamiltonian",
    "FullSpaceHamiltonian",
    "MAX_FULL_SPACE_SITES",
    "build_single_excitation",
    "build_full_space",
    "dropped_constant",
    "check_excitation_conservation",
    "extract_single_excitation_block",
    "single_excitation_indices",
]

MAX_FULL_SPACE_SITES = 12
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SingleExcHamiltonian:
    """N x N Hermitian matrix; row/column k is the state with site k flipped up."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class FullSpaceHamiltonian:
    """2^N x 2^N Hamiltonian on computational product states.

    Site 0 is the most significant bit; bit value 0 means spin up.
    ``matrix`` is a scipy sparse matrix or a dense array.
    """

    matrix: object
    n_sites: int

    def toarray(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix, dtype=complex)


def build_single_excitation(g: SpinGraph) -> SingleExcHamiltonian:
    n = g.n_sites
    h = np.zeros((n, n), dtype=complex)
    for k, b in enumerate(g.fields):
        h[k, k] = 2.0 * b
    for bond in g.bonds:
        hop = 2.0 * bond.coupling * np.exp(1j * bond.phase)
        h[bond.i, bond.j] += hop
        h[bond.j, bond.i] += np.conj(hop)
        if g.model is Model.HEISENBERG:
            h[bond.i, bond.i] -= 2.0 * bond.coupling
            h[bond.j, bond.j] -= 2.0 * bond.coupling
    return SingleExcHamiltonian(h)


def dropped_constant(g: SpinGraph) -> float:
    """Identity offset between the full-space block and the effective matrix."""
    c = -sum(g.fields)
    if g.model is Model.HEISENBERG:
        c += sum(b.coupling for b in g.bonds)
    return float(c)


def _site_bit(n: int, k: int) -> int:
    return 1 << (n - 1 - k)


def single_excitation_indices(n: int) -> np.ndarray:
    """Full-space indices of |k>, k = 0..n-1."""
    full = (1 << n) - 1
    return np.array([full - _site_bit(n, k) for k in range(n)], dtype=np.int64)


def build_full_space(g: SpinGraph) -> FullSpaceHamiltonian:
    """Exact many-body Hamiltonian, built bond by bond on the bit basis."""
    n = g.n_sites
    if n > MAX_FULL_SPACE_SITES:
        raise ResourceError(f"full-space oracle limited to {MAX_FULL_SPACE_SITES} sites, got {n}")
    dim = 1 << n
    states = np.arange(dim, dtype=np.int64)
    # z_k = +1 for up (bit clear), -1 for down (bit set)
    z = np.empty((n, dim))
    for k in range(n):
        z[k] = np.where(states & _site_bit(n, k), -1.0, 1.0)

    diag = np.zeros(dim)
    for k, b in enumerate(g.fields):
        diag += b * z[k]
    rows, cols, vals = [states], [states], [diag.astype(complex)]
    for bond in g.bonds:
        bi, bj = _site_bit(n, bond.i), _site_bit(n, bond.j)
        if g.model is Model.HEISENBERG:
            rows.append(states)
            cols.append(states)
            vals.append((bond.coupling * z[bond.i] * z[bond.j]).astype(complex))
        # s+_i s-_j: i down -> up, j up -> down
        src = states[((states & bi) != 0) & ((states & bj) == 0)]
        dst = (src & ~bi) | bj
        hop = 2.0 * bond.coupling * np.exp(1j * bond.phase)
        rows += [dst, src]
        cols += [src, dst]
        vals += [np.full(src.size, hop), np.full(src.size, np.conj(hop))]
    m = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    ).tocsr()
    m.sum_duplicates()
    return FullSpaceHamiltonian(m, n)


def _total_sz_diag(n: int) -> np.ndarray:
    states = np.arange(1 << n, dtype=np.int64)
    ups = np.zeros(states.size)
    for k in range(n):
        ups += (states & _site_bit(n, k)) == 0
    return 2.0 * ups - n


def check_excitation_conservation(h: FullSpaceHamiltonian) -> float:
    """Max-abs element of [sigma^z_total, H]; zero iff excitation number is conserved."""
    d = _total_sz_diag(h.n_sites)
    m = sp.coo_matrix(h.matrix)
    if m.nnz == 0:
        return 0.0
    comm = (d[m.row] - d[m.col]) * m.data
    return float(np.max(np.abs(comm)))


def extract_single_excitation_block(h: FullSpaceHamiltonian, tol: float = 1e-10) -> SingleExcHamiltonian:
    """Restrict ``h`` to the weight-one sector, ordered by flipped site.

    The raw block still contains the dropped constant on its diagonal;
    subtract ``dropped_constant(g)`` to compare with build_single_excitation.
    """
    n = h.n_sites
    idx = single_excitation_indices(n)
    m = sp.csr_matrix(h.matrix)
    rows = m[idx, :].toarray()
    cols = m[:, idx].toarray()
    outside = np.ones(1 << n, dtype=bool)
    outside[idx] = False
    leak = 0.0
    if outside.any():
        leak = max(np.max(np.abs(rows[:, outside])), np.max(np.abs(cols[outside, :])))
    if leak > tol:
        raise BlockLeakageError(float(leak))
    return SingleExcHamiltonian(rows[:, idx])
