"""Targeting problems: best encoding, best time, ring flux and staged plans.

The concurrence produced by an encoding (alpha, beta) on sites (mu, nu) is

    C = 2 |v^T Q v|,   v = (alpha, beta),

with Q the complex symmetric 2x2 matrix

    Q = [[f_m,mu f_n,mu,                       (f_m,mu f_n,nu + f_m,nu f_n,mu)/2],
         [(f_m,mu f_n,nu + f_m,nu f_n,mu)/2,   f_m,nu f_n,nu                    ]].

Over unit vectors the maximum of |v^T Q v| is the largest Takagi value of
Q, attained at the conjugate of the leading Takagi vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from ._parallel import chunks, ordered_map
from .dynamics import Propagator, amplitude_trace, diagonalize, evolve_state, transition_amplitudes
from .entanglement import Encoding, concurrence_closed_form, pair_amplitudes
from .errors import InvalidInputError, InvalidTargetError, PreconditionError, RequiresMEEncodingError
from .graph import SpinGraph, connected_components, make_ring
from .hamiltonian import build_single_excitation
from .symmetry import find_involutions

__all__ = [
    "Method",
    "EncodingOptimum",
    "FluxTransferResult",
    "Stage",
    "TargetPlan",
    "Budgets",
    "takagi",
    "encoding_form",
    "optimal_encoding_at_time",
    "grid_encoding_search",
    "optimize_over_time",
    "max_concurrence_over_time",
    "ring_propagator",
    "flux_transfer_search",
    "plan_targeting",
    "isolated_factorization_check",
]

TIE_TOL = 1e-12
DEGENERACY_TOL = 1e-10
CHUNK = 512


def _complex_to_list(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex_from(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


class Method(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    GRID_SEARCH = "grid-search"


@dataclass(frozen=True)
class EncodingOptimum:
    alpha: complex
    beta: complex
    C: float
    t: float
    method: Method = Method.CLOSED_FORM

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise InvalidInputError(f"encoding optimum is not normalized: {norm!r}")

    @property
    def abs_alpha(self) -> float:
        return abs(self.alpha)

    @property
    def relative_phase(self) -> float:
        """arg(beta) - arg(alpha) wrapped to [0, 2 pi); 0 when either vanishes."""
        if abs(self.alpha) < 1e-14 or abs(self.beta) < 1e-14:
            return 0.0
        return float(np.angle(self.beta / self.alpha) % (2.0 * math.pi))

    def encoding(self, mu: int, nu: int) -> Encoding:
        return Encoding(mu, nu, self.alpha, self.beta)

    def to_dict(self) -> dict:
        return {"alpha": _complex_to_list(self.alpha), "beta": _complex_to_list(self.beta),
                "C": self.C, "t": self.t, "method": self.method.value}

    @classmethod
    def from_dict(cls, d) -> EncodingOptimum:
        a, b = _complex_from(d["alpha"]), _complex_from(d["beta"])
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        return cls(a / norm, b / norm, float(d["C"]), float(d["t"]), Method(d["method"]))


@dataclass(frozen=True)
class FluxTransferResult:
    flux: float
    t: float
    amplitude: float
    source: int = 0
    target: int = 0

    @property
    def probability(self) -> float:
        return self.amplitude ** 2

    def to_dict(self) -> dict:
        return {"flux": self.flux, "t": self.t, "amplitude": self.amplitude,
                "probability": self.probability, "source": self.source, "target": self.target}

    @classmethod
    def from_dict(cls, d) -> FluxTransferResult:
        return cls(float(d["flux"]), float(d["t"]), float(d["amplitude"]),
                   int(d.get("source", 0)), int(d.get("target", 0)))


@dataclass(frozen=True)
class Stage:
    flux: float
    duration: float


@dataclass(frozen=True)
class Budgets:
    """Sweep resolutions. Times are in units of 1/J."""

    flux_points: int = 512
    time_points: int = 4096
    horizon: float = 40.0
    refine_passes: int = 1
    refine_points: int = 33

    def to_dict(self) -> dict:
        return {"flux_points": self.flux_points, "time_points": self.time_points,
                "horizon": self.horizon, "refine_passes": self.refine_passes,
                "refine_points": self.refine_points}

    @classmethod
    def from_dict(cls, d) -> Budgets:
        return cls(**{k: d[k] for k in cls().to_dict() if k in d})


@dataclass(frozen=True)
class TargetPlan:
    """Flux schedule on a ring that entangles ``target`` from one excited site."""

    n_sites: int
    coupling: float
    stages: tuple[Stage, ...]
    encoding: Encoding
    target: tuple[int, int]
    achieved_C: float
    relay_site: int = 0
    transfer_amplitude: float = 1.0

    def final_state(self) -> np.ndarray:
        """Evolve the encoded state through every stage from scratch."""
        psi = self.encoding.state(self.n_sites)
        for stage in self.stages:
            p = ring_propagator(self.n_sites, self.coupling, stage.flux)
            psi = evolve_state(p, psi, stage.duration)
        return psi

    def recompute_concurrence(self) -> float:
        psi = self.final_state()
        m, n = self.target
        return 2.0 * abs(psi[m]) * abs(psi[n])

    def to_dict(self) -> dict:
        e = self.encoding
        return {
            "n_sites": self.n_sites,
            "coupling": self.coupling,
            "stages": [{"flux": s.flux, "duration": s.duration} for s in self.stages],
            "encoding": {"mu": e.mu, "nu": e.nu, "alpha": _complex_to_list(e.alpha),
                         "beta": _complex_to_list(e.beta)},
            "target": list(self.target),
            "achieved_C": self.achieved_C,
            "relay_site": self.relay_site,
            "transfer_amplitude": self.transfer_amplitude,
        }

    @classmethod
    def from_dict(cls, d) -> TargetPlan:
        e = d["encoding"]
        return cls(int(d["n_sites"]), float(d["coupling"]),
                   tuple(Stage(float(s["flux"]), float(s["duration"])) for s in d["stages"]),
                   Encoding(int(e["mu"]), int(e["nu"]), _complex_from(e["alpha"]), _complex_from(e["beta"])),
                   (int(d["target"][0]), int(d["target"][1])), float(d["achieved_C"]),
                   int(d.get("relay_site", 0)), float(d.get("transfer_amplitude", 1.0)))


# ---------------------------------------------------------------------------
# Encoding at a fixed time

def takagi(a, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization a = U diag(s) U^T of a complex symmetric matrix.

    Returns ``(s, U)`` with s non-increasing and U unitary. Degenerate
    singular values are handled blockwise.
    """
    a = np.asarray(a, dtype=complex)
    v, s, wh = np.linalg.svd(a)
    w = wh.conj().T
    u = v.astype(complex).copy()
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    start = 0
    while start < s.size:
        stop = start + 1
        while stop < s.size and abs(s[stop] - s[start]) <= tol * scale:
            stop += 1
        if s[start] > tol * scale:
            idx = slice(start, stop)
            z = v[:, idx].T @ w[:, idx]
            u[:, idx] = v[:, idx] @ scipy.linalg.sqrtm(z).conj()
        start = stop
    return s, u


def encoding_form(f, mu: int, nu: int, m: int, n: int) -> np.ndarray:
    """The symmetric 2x2 matrix Q with C = 2|v^T Q v| for v = (alpha, beta)."""
    f = np.asarray(getattr(f, "f", f))
    cross = 0.5 * (f[m, mu] * f[n, nu] + f[m, nu] * f[n, mu])
    return np.array([[f[m, mu] * f[n, mu], cross], [cross, f[m, nu] * f[n, nu]]], dtype=complex)


def _normalize_phase(alpha: complex, beta: complex) -> tuple[complex, complex]:
    """Fix the global phase so the first nonzero amplitude is real positive."""
    ref = alpha if abs(alpha) > 1e-14 else beta
    ph = ref / abs(ref)
    alpha, beta = alpha / ph, beta / ph
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return complex(alpha / norm), complex(beta / norm)


def _check_encoding_sites(mu, nu, m, n):
    if m == n:
        raise InvalidTargetError(f"target sites must differ, got m = n = {m}")
    if mu == nu:
        raise InvalidInputError(f"encoded sites must differ, got mu = nu = {mu}")


def optimal_encoding_at_time(f, mu: int, nu: int, m: int, n: int) -> EncodingOptimum:
    """Best (alpha, beta) on sites (mu, nu) for the pair (m, n) at the time of ``f``."""
    _check_encoding_sites(mu, nu, m, n)
    t = float(getattr(f, "t", 0.0))
    q = encoding_form(f, mu, nu, m, n)
    if np.max(np.abs(q)) == 0.0:
        return EncodingOptimum(1.0, 0.0, 0.0, t, Method.CLOSED_FORM)
    s, u = takagi(q, tol=DEGENERACY_TOL)
    if s[1] >= s[0] * (1.0 - DEGENERACY_TOL):
        alpha, beta = _most_entangled_optimum(u)
    else:
        alpha, beta = np.conj(u[0, 0]), np.conj(u[1, 0])
    alpha, beta = _normalize_phase(alpha, beta)
    return EncodingOptimum(alpha, beta, float(min(1.0, 2.0 * s[0])), t, Method.CLOSED_FORM)


def _most_entangled_optimum(u: np.ndarray) -> tuple[complex, complex]:
    """Pick the optimum with the largest |alpha beta| when both Takagi values tie.

    Then every v = conj(U) (cos a, sin a) is optimal; flux-free bipartite
    chains hit this at all times for counterpart encodings.
    """
    grid = np.linspace(0.0, math.pi, 4096, endpoint=False)

    def score(a):
        v = u.conj() @ np.array([np.cos(a), np.sin(a)])
        return np.abs(v[0] * v[1])

    vals = np.array([score(a) for a in grid])
    k = int(np.argmax(vals))
    step = grid[1] - grid[0]
    lo, hi = grid[k] - step, grid[k] + step
    for _ in range(60):
        m1, m2 = lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0
        if score(m1) < score(m2):
            lo = m1
        else:
            hi = m2
    v = u.conj() @ np.array([np.cos(0.5 * (lo + hi)), np.sin(0.5 * (lo + hi))])
    return complex(v[0]), complex(v[1])


def grid_encoding_search(f, mu: int, nu: int, m: int, n: int, resolution: int = 400) -> EncodingOptimum:
    """Brute-force scan over |alpha| in [0, 1] and relative phase in [0, 2 pi).

    Independent of the Takagi route; used to check it.
    """
    _check_encoding_sites(mu, nu, m, n)
    fm = np.asarray(getattr(f, "f", f))
    t = float(getattr(f, "t", 0.0))
    mag = np.linspace(0.0, 1.0, resolution)
    phase = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    alpha = mag[:, None] * np.ones_like(phase)[None, :]
    beta = np.sqrt(np.clip(1.0 - mag ** 2, 0.0, None))[:, None] * np.exp(1j * phase)[None, :]
    a = alpha * fm[m, mu] + beta * fm[m, nu]
    b = alpha * fm[n, mu] + beta * fm[n, nu]
    c = 2.0 * np.abs(a) * np.abs(b)
    k = int(np.argmax(c))
    i, j = divmod(k, resolution)
    return EncodingOptimum(complex(alpha[i, j]), complex(beta[i, j]), float(c[i, j]), t, Method.GRID_SEARCH)


def _sigma_max_2x2(q11, q12, q22):
    """Largest singular value of [[q11, q12], [q12, q22]], elementwise.

    A batched SVD is used rather than the quadratic formula, which loses
    about half the digits when the two singular values nearly coincide.
    """
    q = np.empty((len(q11), 2, 2), dtype=complex)
    q[:, 0, 0], q[:, 0, 1], q[:, 1, 0], q[:, 1, 1] = q11, q12, q12, q22
    return np.linalg.svd(q, compute_uv=False)[:, 0]


def _first_max(values: np.ndarray) -> int:
    """Index of the earliest entry within TIE_TOL of the maximum."""
    best = np.max(values)
    return int(np.flatnonzero(values >= best - TIE_TOL)[0])


def optimize_over_time(p: Propagator, mu: int, nu: int, m: int, n: int, horizon: float, steps: int,
                       threads: int | None = None) -> EncodingOptimum:
    """Joint optimum of encoding and time on ``linspace(0, horizon, steps)``."""
    _check_encoding_sites(mu, nu, m, n)
    if horizon <= 0 or steps < 2:
        raise InvalidInputError("optimize_over_time needs horizon > 0 and steps >= 2")
    times = np.linspace(0.0, float(horizon), int(steps))

    def evaluate(ts):
        fmm, fnm = amplitude_trace(p, m, mu, ts), amplitude_trace(p, n, mu, ts)
        fmn, fnn = amplitude_trace(p, m, nu, ts), amplitude_trace(p, n, nu, ts)
        return 2.0 * _sigma_max_2x2(fmm * fnm, 0.5 * (fmm * fnn + fmn * fnm), fmn * fnn)

    values = np.concatenate(ordered_map(evaluate, chunks(times, CHUNK), threads))
    k = _first_max(values)
    return optimal_encoding_at_time(transition_amplitudes(p, times[k]), mu, nu, m, n)


def max_concurrence_over_time(p: Propagator, e: Encoding, m: int, n: int, horizon: float,
                              steps: int) -> tuple[float, float]:
    """(C*, t*) for a fixed encoding over ``linspace(0, horizon, steps)``."""
    if m == n:
        raise InvalidTargetError(f"target sites must differ, got m = n = {m}")
    times = np.linspace(0.0, float(horizon), int(steps))
    a = e.alpha * amplitude_trace(p, m, e.mu, times) + e.beta * amplitude_trace(p, m, e.nu, times)
    b = e.alpha * amplitude_trace(p, n, e.mu, times) + e.beta * amplitude_trace(p, n, e.nu, times)
    c = 2.0 * np.abs(a) * np.abs(b)
    k = _first_max(c)
    return float(c[k]), float(times[k])


# ---------------------------------------------------------------------------
# Flux-controlled transfer on rings

def ring_propagator(n: int, coupling: float, flux: float) -> Propagator:
    return diagonalize(build_single_excitation(make_ring(n, coupling, flux)))


def _best_on_grid(n, coupling, source, target, fluxes, times, threads):
    """Best (amplitude, t, flux) over a flux x time grid.

    Each flux row is computed in full by one task; ties within TIE_TOL go
    to the smallest t, then the smallest flux.
    """
    def row(flux):
        amp = np.abs(amplitude_trace(ring_propagator(n, coupling, flux), target, source, times))
        k = _first_max(amp)
        return float(amp[k]), float(times[k]), float(flux)

    rows = ordered_map(row, list(fluxes), threads)
    best = max(r[0] for r in rows)
    ties = [r for r in rows if r[0] >= best - TIE_TOL]
    return min(ties, key=lambda r: (r[1], r[2]))


def flux_transfer_search(n: int, coupling: float, source: int, target: int,
                         budgets: Budgets = Budgets(), fluxes=None,
                         threads: int | None = None) -> FluxTransferResult:
    """Maximize |f_target,source(t; flux)| over flux and time on a uniform ring.

    ``fluxes`` overrides the default grid of ``budgets.flux_points`` values
    in [0, 1); with a single flux value only the time is refined.
    """
    if source == target:
        raise InvalidTargetError("source and target must differ")
    make_ring(n, coupling)
    for s in (source, target):
        if not 0 <= s < n:
            raise InvalidInputError(f"site {s} outside a {n}-site ring")
    if fluxes is None:
        fluxes = np.arange(budgets.flux_points) / budgets.flux_points
        dflux = 1.0 / budgets.flux_points
    else:
        fluxes = np.asarray(fluxes, dtype=float)
        dflux = float(np.min(np.diff(np.sort(fluxes)))) if fluxes.size > 1 else 0.0
    times = np.linspace(0.0, budgets.horizon, budgets.time_points)
    dt = budgets.horizon / (budgets.time_points - 1)
    amp, t, flux = _best_on_grid(n, coupling, source, target, fluxes, times, threads)

    for _ in range(budgets.refine_passes):
        k = budgets.refine_points
        fine_t = np.linspace(max(0.0, t - dt), min(budgets.horizon, t + dt), k)
        fine_f = np.linspace(flux - dflux, flux + dflux, k) if dflux > 0 else np.array([flux])
        cand = _best_on_grid(n, coupling, source, target, fine_f, fine_t, threads)
        if cand[0] > amp + TIE_TOL:
            amp, t, flux = cand
        dt = (fine_t[-1] - fine_t[0]) / (k - 1)
        dflux = 2.0 * dflux / (k - 1)
    if len(fluxes) > 1:
        flux = flux % 1.0
    return FluxTransferResult(flux, t, min(1.0, amp), source, target)


def _relay_candidates(n: int, coupling: float, m: int, n_site: int) -> list[int]:
    ring = make_ring(n, coupling, 0.0)
    sites = set()
    for inv in find_involutions(ring):
        if inv.swaps(m, n_site) and not inv.conjugating:
            sites.update(inv.fixed_sites)
    return sorted(sites)


def plan_targeting(n: int, coupling: float, mu: int, m: int, n_site: int,
                   budgets: Budgets = Budgets(), keep_flux: bool = False,
                   threads: int | None = None) -> TargetPlan:
    """Two-stage plan entangling (m, n_site) from a single excitation on ``mu``.

    Stage 1 threads a flux that moves the excitation from ``mu`` to a site
    on the mirror line swapping m and n_site. Stage 2 evolves freely (or
    with the stage-1 flux kept on, if ``keep_flux``) until the pair
    concurrence peaks.

    Raises
    ------
    RequiresMEEncodingError
        No mirror line through a site swaps the target pair, which happens
        for half of the pairs on even rings.
    """
    make_ring(n, coupling)
    for s in (mu, m, n_site):
        if not 0 <= s < n:
            raise InvalidInputError(f"site {s} outside a {n}-site ring")
    if m == n_site:
        raise InvalidTargetError(f"target sites must differ, got {m}")
    relays = _relay_candidates(n, coupling, m, n_site)
    if not relays:
        raise RequiresMEEncodingError(
            f"the mirror line swapping sites {m} and {n_site} of a {n}-ring passes through no site"
        )
    if mu in relays:
        relay, transfer = mu, FluxTransferResult(0.0, 0.0, 1.0, mu, mu)
    else:
        found = [flux_transfer_search(n, coupling, mu, r, budgets, threads=threads) for r in relays]
        transfer = max(found, key=lambda r: r.amplitude)
        relay = transfer.target

    encoding = Encoding.single(mu)
    stage1 = Stage(transfer.flux, transfer.t)
    psi = evolve_state(ring_propagator(n, coupling, stage1.flux), encoding.state(n), stage1.duration)
    flux2 = stage1.flux if keep_flux else 0.0
    p2 = ring_propagator(n, coupling, flux2)
    coeff = p2.eigenvectors.conj().T @ psi

    def pair_c(ts):
        ph = np.exp(-1j * np.multiply.outer(ts, p2.eigenvalues)) * coeff
        return 2.0 * np.abs(ph @ p2.eigenvectors[m]) * np.abs(ph @ p2.eigenvectors[n_site])

    times = np.linspace(0.0, budgets.horizon, budgets.time_points)
    c = pair_c(times)
    k = _first_max(c)
    t2, best = float(times[k]), float(c[k])
    dt = budgets.horizon / (budgets.time_points - 1)
    for _ in range(budgets.refine_passes):
        fine = np.linspace(max(0.0, t2 - dt), min(budgets.horizon, t2 + dt), budgets.refine_points)
        cf = pair_c(fine)
        j = _first_max(cf)
        if cf[j] > best + TIE_TOL:
            t2, best = float(fine[j]), float(cf[j])
        dt = (fine[-1] - fine[0]) / (budgets.refine_points - 1)

    stages = (stage1, Stage(flux2, t2))
    plan = TargetPlan(n, float(coupling), stages, encoding, (m, n_site), 0.0, relay, transfer.amplitude)
    return replace(plan, achieved_C=plan.recompute_concurrence())


# ---------------------------------------------------------------------------
# Disconnected graphs

def isolated_factorization_check(g: SpinGraph, e: Encoding, m: int, n: int, times) -> float:
    """Max deviation of C_mn(t) from 2|alpha beta| |f_m,mu(t)| |f_n,nu(t)|.

    Requires mu, m in one connected component and nu, n in another, where
    the cross amplitudes vanish identically.
    """
    comp = {}
    for k, sites in enumerate(connected_components(g)):
        for s in sites:
            comp[s] = k
    if not (comp[e.mu] == comp[m] and comp[e.nu] == comp[n] and comp[e.mu] != comp[e.nu]):
        raise PreconditionError(
            "need mu and m in one connected component and nu and n in a different one"
        )
    p = diagonalize(build_single_excitation(g))
    scale = 2.0 * abs(e.alpha * e.beta)
    worst = 0.0
    for t in times:
        f = transition_amplitudes(p, t)
        c = concurrence_closed_form(pair_amplitudes(f, e, m, n))
        worst = max(worst, abs(c - scale * abs(f.f[m, e.mu]) * abs(f.f[n, e.nu])))
    return float(worst)
