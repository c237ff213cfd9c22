"""Exact single-excitation time evolution by eigendecomposition."""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .hamiltonian import SingleExcHamiltonian

__all__ = [
    "Propagator",
    "AmplitudeMatrix",
    "AmplitudeRow",
    "diagonalize",
    "transition_amplitudes",
    "amplitude_trace",
    "evolve_state",
    "amplitude_series",
    "series_to_csv",
    "format_number",
]

HERMITIAN_TOL = 1e-10


def format_number(x: float) -> str:
    """Render a real with 12 significant digits; negative zero prints as 0."""
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


@dataclass(frozen=True, eq=False)
class Propagator:
    """Cached spectral decomposition H = V diag(w) V^dagger.

    Degenerate levels need no special care: any orthonormal eigenbasis
    gives the same exp(-iHt).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    fingerprint: str

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.size

    def matrix(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class AmplitudeMatrix:
    """f[i, j] = <i| exp(-iHt) |j> at time ``t``."""

    t: float
    f: np.ndarray


class AmplitudeRow(NamedTuple):
    t: float
    i: int
    j: int
    f: complex
    abs2: float


def _fingerprint(m: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(m, dtype=complex).tobytes()).hexdigest()[:16]


def diagonalize(h: SingleExcHamiltonian | np.ndarray) -> Propagator:
    m = np.asarray(getattr(h, "matrix", h), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if asym > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
        raise InvalidInputError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w.setflags(write=False)
    v.setflags(write=False)
    return Propagator(w, v, _fingerprint(m))


def transition_amplitudes(p: Propagator, t: float) -> AmplitudeMatrix:
    t = float(t)
    if not np.isfinite(t):
        raise InvalidInputError(f"time must be finite, got {t}")
    v = p.eigenvectors
    f = (v * np.exp(-1j * p.eigenvalues * t)) @ v.conj().T
    return AmplitudeMatrix(t, f)


def amplitude_trace(p: Propagator, i: int, j: int, times) -> np.ndarray:
    """f_ij at every entry of ``times``.

    Each time is reduced independently, so results do not depend on how a
    time grid is split into chunks.
    """
    times = np.asarray(times, dtype=float)
    v = p.eigenvectors
    weights = v[i] * v[j].conj()
    phases = np.exp(-1j * np.multiply.outer(times, p.eigenvalues))
    return (phases * weights).sum(axis=-1)


def evolve_state(p: Propagator, psi, t: float) -> np.ndarray:
    v = p.eigenvectors
    return v @ (np.exp(-1j * p.eigenvalues * float(t)) * (v.conj().T @ np.asarray(psi, dtype=complex)))


def amplitude_series(p: Propagator, times, pairs) -> list[AmplitudeRow]:
    """One row per (t, pair) in time-major order."""
    times = [float(t) for t in times]
    if not times:
        raise InvalidInputError("amplitude_series needs at least one time")
    n = p.n_sites
    pairs = [(int(i), int(j)) for i, j in pairs]
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidInputError(f"pair ({i}, {j}) out of range for {n} sites")
    traces = {pair: amplitude_trace(p, pair[0], pair[1], times) for pair in dict.fromkeys(pairs)}
    rows = []
    for k, t in enumerate(times):
        for pair in pairs:
            f = complex(traces[pair][k])
            rows.append(AmplitudeRow(t, pair[0], pair[1], f, abs(f) ** 2))
    return rows


def series_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "i", "j", "re_f", "im_f", "abs2"])
    for r in rows:
        writer.writerow([format_number(r.t), r.i, r.j, format_number(r.f.real),
                         format_number(r.f.imag), format_number(r.abs2)])
    return buf.getvalue()
