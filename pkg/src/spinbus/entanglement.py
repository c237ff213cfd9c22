"""Pair amplitudes, reduced two-site states and concurrence.

The two-site density matrix uses the basis order |11>, |10>, |01>, |00>
(excitation count descending), where the first label is site m and the
second is site n. In the one-excitation sector it reads

    [[0, 0,      0,      0          ],
     [0, |A|^2,  A B*,   0          ],
     [0, B A*,   |B|^2,  0          ],
     [0, 0,      0,      1-|A|^2-|B|^2]]

with A, B the amplitudes of the excitation on m and n, and its concurrence
is 2|A||B|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, InvalidStateError, InvalidTargetError

__all__ = [
    "Encoding",
    "PairAmplitudes",
    "TwoQubitState",
    "FourTerms",
    "pair_amplitudes",
    "pair_state",
    "concurrence_closed_form",
    "concurrence_wootters",
    "four_term_decomposition",
    "entanglement_of_formation",
]

NORM_TOL = 1e-12
STATE_TOL = 1e-10

_SY_SY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


@dataclass(frozen=True)
class Encoding:
    """Initial state alpha|mu> + beta|nu>.

    A single-site excitation is ``Encoding(mu, mu, 1, 0)``; see ``single``.
    """

    mu: int
    nu: int
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInputError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
        if self.mu == self.nu and self.beta != 0:
            raise InvalidInputError("mu and nu must differ unless beta = 0")

    @classmethod
    def single(cls, mu: int) -> Encoding:
        return cls(mu, mu, 1.0, 0.0)

    @property
    def initial_concurrence(self) -> float:
        return 0.0 if self.mu == self.nu else 2.0 * abs(self.alpha * self.beta)

    def state(self, n_sites: int) -> np.ndarray:
        psi = np.zeros(n_sites, dtype=complex)
        psi[self.mu] += self.alpha
        psi[self.nu] += self.beta
        return psi


@dataclass(frozen=True)
class PairAmplitudes:
    A: complex
    B: complex
    m: int
    n: int
    t: float


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    rho: np.ndarray


class FourTerms(NamedTuple):
    """The four products whose sum, doubled in magnitude, is the concurrence."""

    terms: tuple[complex, complex, complex, complex]
    magnitudes: tuple[float, float, float, float]
    concurrence: float


def _f(f):
    return np.asarray(getattr(f, "f", f))


def _time(f) -> float:
    return float(getattr(f, "t", float("nan")))


def _check_target(m: int, n: int) -> None:
    if m == n:
        raise InvalidTargetError(f"target sites must differ, got m = n = {m}")


def pair_amplitudes(f, e: Encoding, m: int, n: int) -> PairAmplitudes:
    """A = alpha f[m, mu] + beta f[m, nu], B likewise for site n."""
    _check_target(m, n)
    fm = _f(f)
    a = e.alpha * fm[m, e.mu] + e.beta * fm[m, e.nu]
    b = e.alpha * fm[n, e.mu] + e.beta * fm[n, e.nu]
    return PairAmplitudes(complex(a), complex(b), m, n, _time(f))


def pair_state(pa: PairAmplitudes) -> TwoQubitState:
    a, b = pa.A, pa.B
    weight = abs(a) ** 2 + abs(b) ** 2
    if weight > 1.0 + STATE_TOL:
        raise InvalidStateError(f"|A|^2 + |B|^2 = {weight!r} exceeds 1")
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = abs(a) ** 2
    rho[1, 2] = a * np.conj(b)
    rho[2, 1] = b * np.conj(a)
    rho[2, 2] = abs(b) ** 2
    rho[3, 3] = max(0.0, 1.0 - weight)
    return TwoQubitState(rho)


def concurrence_closed_form(pa: PairAmplitudes) -> float:
    return min(1.0, 2.0 * abs(pa.A) * abs(pa.B))


def _validated_rho(rho) -> np.ndarray:
    rho = np.asarray(getattr(rho, "rho", rho), dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidStateError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > STATE_TOL:
        raise InvalidStateError(f"density matrix trace {np.trace(rho).real!r} != 1")
    return 0.5 * (rho + rho.conj().T)


def concurrence_wootters(rho) -> float:
    """Concurrence of an arbitrary two-qubit density matrix.

    C = max(0, l1 - l2 - l3 - l4), l the decreasing square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy). These equal the singular
    values of sqrt(rho) (sy x sy) sqrt(rho)*, which is the form evaluated
    here since it avoids square roots of near-zero eigenvalues.
    """
    rho = _validated_rho(rho)
    w, v = np.linalg.eigh(rho)
    if w[0] < -STATE_TOL:
        raise InvalidStateError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    lam = np.linalg.svd(sqrt_rho @ _SY_SY @ sqrt_rho.conj(), compute_uv=False)
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def four_term_decomposition(f, e: Encoding, m: int, n: int) -> FourTerms:
    """Split A*B into alpha^2 f_m,mu f_n,mu + alpha beta f_m,mu f_n,nu
    + alpha beta f_m,nu f_n,mu + beta^2 f_m,nu f_n,nu."""
    _check_target(m, n)
    fm = _f(f)
    mu, nu, a, b = e.mu, e.nu, e.alpha, e.beta
    terms = (
        complex(a * a * fm[m, mu] * fm[n, mu]),
        complex(a * b * fm[m, mu] * fm[n, nu]),
        complex(a * b * fm[m, nu] * fm[n, mu]),
        complex(b * b * fm[m, nu] * fm[n, nu]),
    )
    return FourTerms(terms, tuple(abs(x) for x in terms), 2.0 * abs(sum(terms)))


def entanglement_of_formation(c: float) -> float:
    """Entanglement of formation (in ebits) from a two-qubit concurrence."""
    c = min(1.0, max(0.0, float(c)))
    x = 0.5 * (1.0 + math.sqrt(1.0 - c * c))
    if x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
