"""Optimal input states: numeric eigenproblem, Chebyshev closed form for the
multipath interferometer, and the energy-constrained two-mode Bessel family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .bessel import bessel_j, bessel_j_sequence
from .errors import (DimensionMismatch, NoRootsInRange, NonHermitianInput, OutOfEnvelope,
                     SolverFailure, TailNotConverged)
from .spectrum import ReducedState, Spectrum

DENSE_LIMIT = 512
TAIL_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class EigenSolution:
    eigenvalue: float
    vector: np.ndarray
    residual: float
    multiplicity: int = 1
    eigenspace: np.ndarray | None = None
    state: ReducedState | None = None

    def to_dict(self) -> dict:
        out = {
            "eigenvalue": self.eigenvalue,
            "residual": self.residual,
            "multiplicity": self.multiplicity,
            "vector": [float(v) for v in np.real(self.vector)],
        }
        if self.state is not None:
            out["state"] = self.state.to_dict()
        return out


def _is_tridiagonal(mat: np.ndarray) -> bool:
    return not np.any(np.triu(mat, 2)) and not np.any(np.tril(mat, -2))


def optimal_state_numeric(cost_matrix, energy_diag=None, mu_prime: float | None = None,
                          spectrum: Spectrum | None = None, tol: float = 1e-10) -> EigenSolution:
    """Minimal eigenpair of C - mu' diag(E).

    A degenerate minimum is reported through ``multiplicity`` and the full
    ``eigenspace`` basis; ``vector`` is then only one member of it.
    """
    mat = np.asarray(cost_matrix)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"cost matrix shape {mat.shape} is not square")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if not np.allclose(mat, mat.conj().T, atol=1e-12 * scale, rtol=0):
        raise NonHermitianInput("cost matrix is not Hermitian")
    if mu_prime is not None:
        if energy_diag is None:
            raise ValueError("mu_prime needs energy_diag")
        energy = np.asarray(energy_diag, dtype=float)
        if energy.shape != (mat.shape[0],):
            raise DimensionMismatch("energy_diag length differs from the matrix")
        mat = mat - mu_prime * np.diag(energy)
    size = mat.shape[0]
    if spectrum is not None and spectrum.size != size:
        raise DimensionMismatch("spectrum window differs from the matrix")
    if np.isrealobj(mat) or not np.any(mat.imag):
        mat = np.real(mat)

    try:
        if size > DENSE_LIMIT and np.isrealobj(mat) and _is_tridiagonal(mat):
            k = min(size - 1, 7)
            vals, vecs = scipy.linalg.eigh_tridiagonal(
                np.diag(mat).copy(), np.diag(mat, 1).copy(),
                select="i", select_range=(0, k))
        elif size > DENSE_LIMIT:
            vals, vecs = scipy.linalg.eigh(mat, subset_by_index=[0, min(size - 1, 7)])
        else:
            vals, vecs = np.linalg.eigh(mat)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverFailure(str(exc)) from exc

    lam = float(vals[0])
    mult = int(np.sum(vals - lam <= tol * max(1.0, abs(lam))))
    vec = vecs[:, 0]
    lead = vec[np.argmax(np.abs(vec))]
    vec = vec * (abs(lead) / lead)
    if np.isrealobj(mat):
        vec = np.real(vec)
    residual = float(np.linalg.norm(mat @ vec - lam * vec))
    if residual > 1e-8 * scale * max(1, size) ** 0.5:
        raise SolverFailure(f"eigen residual {residual:.3e} too large")

    state = None
    if spectrum is not None and mult == 1:
        re = np.real(vec)
        if np.all(np.abs(np.imag(vec)) < 1e-12) and np.all(re >= -1e-12):
            state = ReducedState.from_weights(spectrum, np.clip(re, 0.0, None))
    return EigenSolution(lam, vec, residual, mult, vecs[:, :mult] if mult > 1 else None, state)


def chebyshev_weights(theta: float, n_max: int) -> np.ndarray:
    """sin((n+1) theta) for n = 0..n_max, unit norm, signs kept."""
    w = np.sin((np.arange(n_max + 1) + 1) * theta)
    return w / np.linalg.norm(w)


def chebyshev_state(theta: float, n_max: int) -> ReducedState:
    """Truncated, renormalized eigenstate of the cosine recursion at lambda = cos(theta)."""
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    if n_max < 1:
        raise ValueError("n_max >= 1 required")
    w = chebyshev_weights(theta, n_max)
    return ReducedState.from_amplitudes(
        Spectrum.naturals(0, n_max), w,
        meta={"lambda": math.cos(theta), "theta": theta, "truncation": n_max})


def recursion_residual_w(weights, lam: float) -> float:
    """max |w_n + w_{n+2} - 2 lam w_{n+1}| over the window."""
    w = np.asarray(weights, dtype=float)
    if w.size < 3:
        raise ValueError("need at least three weights")
    return float(np.max(np.abs(w[:-2] + w[2:] - 2.0 * lam * w[1:-1])))


# ---------------------------------------------------------------- two modes

@dataclass(frozen=True, eq=False)
class TwoModeSolution:
    lam: float
    mu: float
    h: np.ndarray
    k: float
    n_max: int
    N: float | None = None
    cost: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def x(self) -> float:
        return 2.0 / self.mu

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu, "x": self.x, "k": self.k,
                "N": self.N, "cost": self.cost, "h": [float(v) for v in self.h],
                "n_max": self.n_max}


def _bessel_orders(lam: float, x: float, n_max: int | None) -> np.ndarray:
    if n_max is not None:
        return bessel_j_sequence(lam, n_max + 1, x)
    n = max(8, int(x) + 8)
    while True:
        if lam + n > 500:
            raise TailNotConverged(f"tail of J_(lam+n)({x}) not below {TAIL_TOL} by order 500")
        J = bessel_j_sequence(lam, n + 1, x)
        total = J[0] ** 2 + 2.0 * np.sum(J[1:] ** 2)
        if J[-1] ** 2 <= TAIL_TOL * total:
            return J
        n *= 2


def two_mode_coeffs(lam: float, mu: float, n_max: int | None = None) -> TwoModeSolution:
    """h_n = k J_{lam+|n|}(2/mu) on |n| <= n_max (adaptive when None)."""
    if lam < 0:
        raise ValueError("lambda >= 0 required")
    if mu <= 0:
        raise ValueError("mu > 0 required")
    x = 2.0 / mu
    J = _bessel_orders(lam, x, n_max)
    total = J[0] ** 2 + 2.0 * np.sum(J[1:] ** 2)
    if total == 0.0:
        raise TailNotConverged("all retained Bessel terms vanish")
    if J[-1] ** 2 > TAIL_TOL * total:
        raise TailNotConverged(
            f"last term J_{lam + J.size - 1:g}^2 = {J[-1] ** 2:.3e} exceeds {TAIL_TOL} of the sum")
    k = 1.0 / math.sqrt(total)
    half = k * J
    h = np.concatenate([half[:0:-1], half])
    return TwoModeSolution(lam, mu, h, k, J.size - 1)


def two_mode_recursion_residual(sol: TwoModeSolution) -> float:
    """max over |n| < n_max of |h_{n+1} + h_{n-1} - mu (lam + |n|) h_n|."""
    h = sol.h
    n = np.abs(sol.indices[1:-1])
    return float(np.max(np.abs(h[2:] + h[:-2] - sol.mu * (sol.lam + n) * h[1:-1])))


def two_mode_cost(h) -> float:
    """<C> for C = 2 - e+ - e- on the |lambda_n> chain."""
    h = np.asarray(h, dtype=float)
    return float(2.0 * (h @ h) - 2.0 * (h[:-1] @ h[1:]))


def matching_residual(lam: float, mu: float) -> float:
    """lam J_lam(x) - x J_{lam+1}(x) with x = 2/mu, i.e. x dJ_lam/dx."""
    if mu <= 0:
        raise OutOfEnvelope("mu > 0 required")
    x = 2.0 / mu
    return lam * bessel_j(lam, x) - x * bessel_j(lam + 1.0, x)


def _residual_x(lam: float, x: float) -> float:
    return lam * bessel_j(lam, x) - x * bessel_j(lam + 1.0, x)


def _bisect(f, a: float, b: float, fa: float, tol: float = 1e-12) -> float:
    for _ in range(200):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
        if b - a <= 4e-16 * b and abs(fm) < tol:
            break
    return 0.5 * (a + b)


def find_matching_roots_x(lam: float, x_range: tuple[float, float], max_roots: int | None = None,
                          step: float = 0.1) -> list[float]:
    """Sign changes of the matching residual in x, refined by bisection.

    Double roots (no sign change) are not found.
    """
    lo, hi = float(x_range[0]), float(x_range[1])
    if not (0 < lo < hi and math.isfinite(hi)):
        raise ValueError(f"x range {x_range} must be positive and finite")
    count = max(1, math.ceil((hi - lo) / step))
    grid = np.linspace(lo, hi, count + 1)
    f = lambda x: _residual_x(lam, x)
    vals = [f(x) for x in grid]
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(_bisect(f, float(a), float(b), fa))
        if max_roots is not None and len(roots) >= max_roots:
            break
    if vals[-1] == 0.0 and (not roots or roots[-1] != grid[-1]):
        if max_roots is None or len(roots) < max_roots:
            roots.append(float(grid[-1]))
    return roots


def find_matching_branches(lam: float, x_range: tuple[float, float],
                           max_roots: int | None = None) -> list[float]:
    """mu = 2/x for each matching root, in ascending x."""
    roots = find_matching_roots_x(lam, x_range, max_roots)
    if not roots:
        raise NoRootsInRange(f"no matching roots for lambda={lam} in x range {tuple(x_range)}")
    return [2.0 / x for x in roots]


def mean_photon_number(sol: TwoModeSolution) -> float:
    """N = 2 k^2 sum_{n>=0} n J^2_{lam+n}(2/mu)."""
    J = bessel_j_sequence(sol.lam, sol.n_max + 1, sol.x)
    if J[-1] ** 2 > TAIL_TOL * (J[0] ** 2 + 2.0 * np.sum(J[1:] ** 2)):
        raise TailNotConverged("photon-number sum did not converge")
    return float(2.0 * sol.k ** 2 * (np.arange(J.size) @ J ** 2))


def photon_number_from_coeffs(h) -> float:
    h = np.asarray(h, dtype=float)
    m = (h.size - 1) // 2
    return float(np.abs(np.arange(-m, m + 1)) @ h ** 2)


def solve_two_mode(lam: float, mu: float, n_max: int | None = None) -> TwoModeSolution:
    sol = two_mode_coeffs(lam, mu, n_max)
    return replace(sol, N=mean_photon_number(sol), cost=two_mode_cost(sol.h))


def vacuum_solution() -> TwoModeSolution:
    """The |0>|0> state: N = 0 and cost 2, the low-energy end of the frontier."""
    h = np.array([0.0, 1.0, 0.0])
    return TwoModeSolution(0.0, math.inf, h, 1.0, 1, 0.0, two_mode_cost(h), {"anchor": "vacuum"})


def two_mode_branches(lambda_grid, x_range, n_max: int | None = None,
                      max_roots: int | None = None) -> list[TwoModeSolution]:
    """Every (lambda, matching root) solution, sorted by (lambda, x)."""
    grid = [float(v) for v in lambda_grid]
    if not grid:
        raise ValueError("empty lambda grid")
    if min(grid) < 0:
        raise ValueError("lambda >= 0 required")
    out = []
    for lam in sorted(grid):
        for x in find_matching_roots_x(lam, x_range, max_roots):
            out.append(solve_two_mode(lam, 2.0 / x, n_max))
    return out


def pareto_frontier(solutions) -> list[TwoModeSolution]:
    """Points not beaten in cost by any solution of lower or equal N."""
    frontier = []
    best = math.inf
    for sol in sorted(solutions, key=lambda s: (s.N, s.cost)):
        if sol.cost < best:
            frontier.append(sol)
            best = sol.cost
    return frontier


def optimize_two_mode(lambda_grid, x_range, n_max: int | None = None,
                      max_roots: int | None = None) -> list[TwoModeSolution]:
    """Cost-versus-photon-number frontier over the scanned branches.

    The vacuum is always included as the N = 0 end point.
    """
    branches = two_mode_branches(lambda_grid, x_range, n_max, max_roots)
    if not branches:
        raise NoRootsInRange(f"no matching roots in x range {tuple(x_range)}")
    return pareto_frontier([vacuum_solution()] + branches)


def shift_matrices(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Raising e+ |n> = |n+1> and lowering e- on a window of ``size`` levels."""
    up = np.eye(size, k=-1)
    return up, up.T.copy()


def cosine_sine_uncertainty(weights) -> tuple[float, float, float]:
    """(Delta C * Delta S, bound w_0^2 / 4, <[C, S]>/i) for a state on N.

    The shift matrices get two extra levels so every moment of a state
    supported on the window matches the untruncated operators.
    """
    w = np.asarray(weights, dtype=complex)
    size = w.size + 2
    psi = np.zeros(size, dtype=complex)
    psi[:w.size] = w / np.linalg.norm(w)
    up, down = shift_matrices(size)
    C = (up + down) / 2
    S = (up - down) / 2j

    def spread(op):
        m1 = np.vdot(psi, op @ psi).real
        m2 = np.vdot(psi, op @ (op @ psi)).real
        return math.sqrt(max(m2 - m1 * m1, 0.0))

    comm = np.vdot(psi, (C @ S - S @ C) @ psi) / 1j
    return spread(C) * spread(S), abs(psi[0]) ** 2 / 4, float(comm.real)


def tridiagonal_cost_min(size: int) -> float:
    """Smallest eigenvalue of 2 I - e+ - e- on ``size`` sites (dense oracle)."""
    up, down = shift_matrices(size)
    return float(np.linalg.eigvalsh(2 * np.eye(size) - up - down)[0])


def frontier_csv(frontier) -> str:
    rows = ["N,cost,lambda,mu"]
    for s in frontier:
        rows.append(",".join(format(float(v), ".17g") for v in (s.N, s.cost, s.lam, s.mu)))
    return "\n".join(rows) + "\n"
