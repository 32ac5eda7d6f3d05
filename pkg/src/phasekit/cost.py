"""Even 2pi-periodic cost functions, optimal xi matrices and cost operators.

A cost is stored through its cosine coefficients,
``C(phi) = -sum_l c_l cos(l phi)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import pom
from .errors import DimensionMismatch, GridTooCoarse, NonFactorizableSigns
from .spectrum import ReducedState, Spectrum


@dataclass(frozen=True)
class CostModel:
    coeffs: tuple[float, ...]
    name: str = "custom"

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        if not c:
            raise ValueError("at least c_0 is required")
        object.__setattr__(self, "coeffs", c)

    @property
    def L(self) -> int:
        return len(self.coeffs) - 1

    @property
    def holevo(self) -> bool:
        return all(c >= 0 for c in self.coeffs[1:])

    def coeff(self, l: int) -> float:
        l = abs(l)
        return self.coeffs[l] if l <= self.L else 0.0

    def padded(self, size: int) -> np.ndarray:
        """Coefficients c_0..c_{size-1}, zero beyond the truncation order."""
        out = np.zeros(size)
        k = min(size, len(self.coeffs))
        out[:k] = self.coeffs[:k]
        return out

    def __call__(self, phi):
        return evaluate_cost(self, phi)

    def to_dict(self) -> dict:
        return {"coeffs": list(self.coeffs), "holevo": self.holevo}

    @classmethod
    def from_dict(cls, data: Mapping) -> "CostModel":
        return cls(tuple(data["coeffs"]))


def builtin_cost(kind: str, L: int = 1, state: ReducedState | None = None) -> CostModel:
    """The three Holevo-class criteria.

    ``likelihood`` is the Dirac comb -delta_2pi(phi) cut at harmonic L (the
    exact distribution has every c_l = 1/pi).  ``variance`` is 4 sin^2(phi/2).
    ``fidelity`` is 1 - |<psi|exp(i H phi)|psi>|^2 for the given reduced state;
    its coefficients are exact, L is ignored.
    """
    if L < 1:
        raise ValueError("truncation order L must be >= 1")
    kind = kind.lower()
    if kind in ("variance", "variance_2pi"):
        return CostModel((-2.0, 2.0), "variance_2pi")
    if kind == "likelihood":
        return CostModel((1 / (2 * math.pi),) + (1 / math.pi,) * L, "likelihood")
    if kind == "fidelity":
        if state is None:
            raise ValueError("fidelity cost needs a reference state")
        p = state.weights ** 2
        auto = np.correlate(p, p, mode="full")[p.size - 1:]
        coeffs = 2.0 * auto
        coeffs[0] = auto[0] - 1.0
        return CostModel(tuple(coeffs), "fidelity")
    raise ValueError(f"unknown builtin cost {kind!r}")


def evaluate_cost(model: CostModel, phi):
    phi = np.asarray(phi, dtype=float)
    l = np.arange(model.L + 1)
    vals = -np.cos(np.multiply.outer(phi, l)) @ np.asarray(model.coeffs)
    return float(vals) if vals.ndim == 0 else vals


@dataclass(frozen=True, eq=False)
class XiMatrix:
    spectrum: Spectrum
    entries: np.ndarray
    rephasing: np.ndarray | None = None

    def __post_init__(self):
        if self.entries.shape != (self.spectrum.size, self.spectrum.size):
            raise DimensionMismatch("xi entries do not match the spectrum window")

    @classmethod
    def ones(cls, spectrum: Spectrum) -> "XiMatrix":
        n = spectrum.size
        return cls(spectrum, np.ones((n, n)), np.zeros(n, dtype=int))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def _sign_pattern_witness(model: CostModel, size: int) -> np.ndarray | None:
    """Parities eps with sign(c_|n-m|) = (-1)^(eps_n - eps_m) wherever c != 0.

    With every coefficient nonzero only eps = const and eps = n mod 2 can
    work; zero coefficients leave their pairs free, so the parities are
    propagated over the constraint graph instead of testing two patterns.
    """
    signs = np.sign(model.padded(size))
    eps = np.full(size, -1, dtype=int)
    for root in range(size):
        if eps[root] >= 0:
            continue
        eps[root] = 0
        stack = [root]
        while stack:
            n = stack.pop()
            for m in range(size):
                s = signs[abs(n - m)]
                if m == n or s == 0:
                    continue
                want = eps[n] ^ (s < 0)
                if eps[m] < 0:
                    eps[m] = want
                    stack.append(m)
                elif eps[m] != want:
                    return None
    return eps


def optimal_xi(model: CostModel, spectrum: Spectrum) -> XiMatrix:
    """xi_nm = sign(c_|n-m|), when that pattern is a rephased all-ones matrix.

    Entries whose coefficient vanishes do not enter the cost; they are set
    from the parity witness so xi stays positive (sign(0) = 1 whenever the
    witness is constant).  An alternating witness is reported as eps_n = n.
    """
    eps = _sign_pattern_witness(model, spectrum.size)
    if eps is None:
        raise NonFactorizableSigns(
            f"signs of {model.coeffs[1:]} admit no parity witness on {spectrum.size} levels")
    if np.array_equal(eps, np.arange(spectrum.size) % 2):
        eps = spectrum.indices.astype(int)
    s = (-1.0) ** eps
    return XiMatrix(spectrum, np.outer(s, s), eps)


def cost_operator_matrix(model: CostModel, xi: XiMatrix) -> np.ndarray:
    size = xi.spectrum.size
    if xi.entries.shape != (size, size):
        raise DimensionMismatch("xi shape does not match its spectrum")
    c = model.padded(size)
    n = np.arange(size)
    gap = np.abs(n[:, None] - n[None, :])
    mat = -0.5 * c[gap] * xi.entries
    np.fill_diagonal(mat, -c[0])
    return mat


def min_cost(model: CostModel, state: ReducedState) -> float:
    """Lowest average cost reachable with a covariant measurement on ``state``."""
    size = state.spectrum.size
    if _sign_pattern_witness(model, size) is None:
        raise NonFactorizableSigns("no positive xi reaches the Schwartz bound")
    w = state.weights
    c = np.abs(model.padded(size))
    overlap = np.array([w[:size - l] @ w[l:] for l in range(1, size)])
    return float(-model.coeffs[0] * (w @ w) - c[1:] @ overlap)


def average_cost_quadrature(model: CostModel, state: ReducedState, xi: XiMatrix,
                            grid_points: int) -> float:
    """Trapezoid integral of C(delta) p(delta) over one period.

    Exact for trigonometric integrands once the grid resolves the highest
    harmonic, which is (window size - 1) + L.
    """
    if xi.spectrum != state.spectrum:
        raise DimensionMismatch("xi and state live on different windows")
    top = state.spectrum.size - 1 + model.L
    if grid_points < 4 * model.L or grid_points <= top:
        raise GridTooCoarse(
            f"{grid_points} points cannot resolve harmonic {top} (need >= {max(4 * model.L, top + 1)})")
    delta = 2 * math.pi * np.arange(grid_points) / grid_points
    dens = pom.conditional_density(state, delta, 0.0, xi=xi.entries)
    return float(2 * math.pi * np.mean(evaluate_cost(model, delta) * dens))


def mixed_state_cost(model: CostModel, rho: np.ndarray) -> float:
    """Cost of a density matrix under the all-ones xi after rephasing each
    off-diagonal to be real and nonnegative."""
    rho = np.asarray(rho)
    size = rho.shape[0]
    c = model.padded(size)
    total = -c[0] * float(np.trace(rho).real)
    for l in range(1, size):
        total -= c[l] * float(np.abs(np.diagonal(rho, offset=l)).sum())
    return total


def cost_matrix_csv(mat: np.ndarray, spectrum: Spectrum) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    idx = [int(n) for n in spectrum.indices]
    writer.writerow(["n\\m"] + idx)
    for n, row in zip(idx, np.asarray(mat)):
        writer.writerow([n] + [format(float(np.real(v)), ".17g") for v in row])
    return buf.getvalue()
