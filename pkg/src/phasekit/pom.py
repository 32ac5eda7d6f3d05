"""Covariant phase measurements built from Susskind-Glogower type vectors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse
from .spectrum import ReducedState, Spectrum, two_mode_lambda_basis


@dataclass(frozen=True, eq=False)
class SGVector:
    spectrum: Spectrum
    phase: float
    amplitudes: np.ndarray

    def occupation_map(self) -> dict[tuple[int, int], complex]:
        """Two-mode realization: component n sits on |lambda_n>."""
        return {two_mode_lambda_basis(int(n)): complex(a)
                for n, a in zip(self.spectrum.indices, self.amplitudes)}


def e_vector(spectrum: Spectrum, phi: float) -> SGVector:
    if not math.isfinite(phi):
        raise ValueError("phase must be finite")
    amps = np.exp(1j * spectrum.indices * phi)
    return SGVector(spectrum, float(np.mod(phi, 2 * math.pi)), amps)


def conditional_density(state: ReducedState, phi_est, phi_true, xi: np.ndarray | None = None):
    """p(phi_est | phi_true) for the covariant measurement with seed ``xi``.

    Without ``xi`` the optimal all-ones seed is used and the density is the
    squared harmonic sum |sum_n w_n exp(-i n delta)|^2 / 2pi.
    """
    delta = np.asarray(phi_est, dtype=float) - np.asarray(phi_true, dtype=float)
    n = state.spectrum.indices
    phase = np.exp(-1j * np.multiply.outer(delta, n))
    amp = phase * state.weights
    if xi is None:
        vals = np.abs(amp.sum(axis=-1)) ** 2
    else:
        vals = np.einsum("...n,nm,...m->...", amp, xi, amp.conj()).real
    vals = vals / (2 * math.pi)
    return float(vals) if vals.ndim == 0 else vals


def overlap_profile(state: ReducedState) -> np.ndarray:
    """a_l = sum_n w_n w_{n+l} for l = 0..size-1."""
    w = state.weights
    return np.correlate(w, w, mode="full")[w.size - 1:]


def discrete_pom_zq(q: int) -> list[np.ndarray]:
    """Projectors (1/q)|e(phi_s)><e(phi_s)| at phi_s = 2 pi s / q."""
    if q < 2:
        raise ValueError("q >= 2 required")
    spec = Spectrum.zq(q)
    out = []
    for s in range(q):
        e = e_vector(spec, 2 * math.pi * s / q).amplitudes
        out.append(np.outer(e, e.conj()) / q)
    return out


def discrete_pom_vectors(q: int) -> list[np.ndarray]:
    """Unit vectors whose projectors make up the Z_q measurement."""
    spec = Spectrum.zq(q)
    return [e_vector(spec, 2 * math.pi * s / q).amplitudes / math.sqrt(q) for s in range(q)]


def discrete_outcome_probabilities(state: ReducedState, phi_true: float) -> np.ndarray:
    """Outcome probabilities for the state shifted to exp(i H phi_true)|psi>,
    the orientation under which outcome s estimates phi_s."""
    q = state.spectrum.size
    vecs = np.array(discrete_pom_vectors(q))
    shifted = state.weights * np.exp(1j * state.spectrum.indices * phi_true)
    return np.abs(vecs.conj() @ shifted) ** 2


def discrete_average_cost(state: ReducedState, model, phi_grid: int | None = None) -> float:
    """Average cost of the Z_q measurement with phi_true uniform on [0, 2pi).

    The phi_true average is a trapezoid sum, exact once ``phi_grid`` exceeds
    the highest harmonic (q - 1) + L.
    """
    from .cost import evaluate_cost

    q = state.spectrum.size
    top = q - 1 + model.L
    if phi_grid is None:
        phi_grid = 2 * top + 2
    if phi_grid <= top:
        raise GridTooCoarse(f"phi_true grid of {phi_grid} aliases harmonic {top}")
    outcomes = 2 * math.pi * np.arange(q) / q
    total = 0.0
    for phi in 2 * math.pi * np.arange(phi_grid) / phi_grid:
        probs = discrete_outcome_probabilities(state, phi)
        total += probs @ evaluate_cost(model, outcomes - phi)
    return float(total / phi_grid)


def pom_completeness_residual(spectrum: Spectrum, grid_points: int) -> float:
    """Max deviation of the quadrature of |e(phi)><e(phi)| dphi/2pi from identity."""
    if grid_points < 2 * spectrum.size:
        raise GridTooCoarse(f"{grid_points} points < 2 * window size {spectrum.size}")
    phis = 2 * math.pi * np.arange(grid_points) / grid_points
    E = np.exp(1j * np.multiply.outer(phis, spectrum.indices))
    acc = E.T @ E.conj() / grid_points
    return float(np.max(np.abs(acc - np.eye(spectrum.size))))


def discrete_completeness_residual(q: int) -> float:
    total = sum(discrete_pom_zq(q))
    return float(np.max(np.abs(total - np.eye(q))))


def orthogonality_check_two_mode(dmax: int, phi: float, phi_prime: float) -> float:
    """Truncated Dirichlet kernel sum_{|n| <= dmax} exp(i n (phi - phi'))."""
    if dmax < 1:
        raise ValueError("dmax >= 1 required")
    n = np.arange(-dmax, dmax + 1)
    return float(np.sum(np.cos(n * (phi - phi_prime))))


def density_curve(state: ReducedState, phi_true: float, points: int = 512):
    phis = 2 * math.pi * np.arange(points) / points
    return phis, conditional_density(state, phis, phi_true)
