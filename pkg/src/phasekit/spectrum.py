"""Shift-generator spectra, degeneracy bookkeeping and reduction to the
nondegenerate basis.

Occupation tuples are dense with mode 1 first.  Multipath eigenvalues are
``sum(l * occ[l-1])``; the two-mode difference generator has eigenvalue
``occ[0] - occ[1]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .errors import CutoffTooSmall, EmptyState, InvalidSpectrum, NotNormalized

NORM_TOL = 1e-10

ALL_INTEGERS = "AllIntegers"
NATURALS = "Naturals"
MOD_Q = "ModQ"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue set of the generator plus the inclusive truncation window."""

    kind: str
    lo: int
    hi: int
    q: int | None = None

    def __post_init__(self):
        if self.kind not in (ALL_INTEGERS, NATURALS, MOD_Q):
            raise InvalidSpectrum(f"unknown spectrum kind {self.kind!r}")
        if self.lo > self.hi:
            raise InvalidSpectrum(f"window [{self.lo}, {self.hi}] is empty")
        if self.kind == NATURALS and self.lo < 0:
            raise InvalidSpectrum("Naturals window must start at n >= 0")
        if self.kind == MOD_Q:
            if self.q is None or self.q < 1:
                raise InvalidSpectrum("ModQ needs a positive q")
            if (self.lo, self.hi) != (0, self.q - 1):
                raise InvalidSpectrum("ModQ window must be [0, q-1]")
        if self.hi - self.lo + 1 < 2:
            raise InvalidSpectrum("window size >= 2 required (got 1)")

    @classmethod
    def integers(cls, lo: int, hi: int) -> "Spectrum":
        return cls(ALL_INTEGERS, int(lo), int(hi))

    @classmethod
    def naturals(cls, lo: int, hi: int) -> "Spectrum":
        return cls(NATURALS, int(lo), int(hi))

    @classmethod
    def zq(cls, q: int) -> "Spectrum":
        q = int(q)
        return cls(MOD_Q, 0, q - 1, q)

    @classmethod
    def parse(cls, text: str) -> "Spectrum":
        """Parse ``zq:Q``, ``naturals:LO:HI`` or ``integers:LO:HI``."""
        parts = text.strip().split(":")
        head = parts[0].lower()
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise InvalidSpectrum(f"malformed spectrum {text!r}") from None
        if head == "zq" and len(nums) == 1:
            return cls.zq(nums[0])
        if head in ("naturals", "n") and len(nums) == 2:
            return cls.naturals(*nums)
        if head in ("integers", "z") and len(nums) == 2:
            return cls.integers(*nums)
        raise InvalidSpectrum(f"malformed spectrum {text!r}")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def position(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"eigenvalue {n} outside window [{self.lo}, {self.hi}]")
        return n - self.lo

    def to_dict(self) -> dict:
        return {"kind": self.kind, "q": self.q, "window": [self.lo, self.hi]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Spectrum":
        lo, hi = data["window"]
        return cls(data["kind"], int(lo), int(hi), data.get("q"))


@dataclass(frozen=True)
class MultipathIndex:
    n: int
    nu: tuple[int, ...]

    @property
    def nu1(self) -> int:
        return self.n - sum(l * v for l, v in enumerate(self.nu, start=2))

    @property
    def occupations(self) -> tuple[int, ...]:
        return (self.nu1,) + self.nu


@dataclass(frozen=True)
class TwoModeIndex:
    d: int
    nu: int

    def __post_init__(self):
        if self.nu < max(0, -self.d):
            raise ValueError(f"degeneracy index {self.nu} invalid for d={self.d}")

    @property
    def occupations(self) -> tuple[int, int]:
        return (self.d + self.nu, self.nu)


def _nu_tuples(budget: int, part: int, modes: int) -> Iterator[tuple[int, ...]]:
    # nested integer-part bounds: nu_l runs over 0..[budget / l]
    if part > modes:
        yield ()
        return
    for v in range(budget // part + 1):
        for rest in _nu_tuples(budget - part * v, part + 1, modes):
            yield (v,) + rest


def multipath_degeneracy_set(M: int, n: int) -> list[MultipathIndex]:
    """All degeneracy labels of eigenvalue ``n`` of ``sum_l l a_l^dag a_l``."""
    if M < 1 or n < 0:
        raise ValueError("need M >= 1 and n >= 0")
    return [MultipathIndex(n, nu) for nu in _nu_tuples(n, 2, M)]


def partition_count(M: int, n: int) -> int:
    """Number of partitions of ``n`` into parts no larger than ``M``."""
    if M < 1 or n < 0:
        raise ValueError("need M >= 1 and n >= 0")
    ways = [1] + [0] * n
    for part in range(1, min(M, n) + 1):
        for total in range(part, n + 1):
            ways[total] += ways[total - part]
    return ways[n]


def symmetrized_vector(M: int, n: int, fock_cutoff: int | None = None) -> dict[tuple[int, ...], float]:
    """Equal-weight superposition of every occupation with eigenvalue ``n``."""
    labels = multipath_degeneracy_set(M, n)
    occs = [ix.occupations for ix in labels]
    if fock_cutoff is not None:
        worst = max(max(o) for o in occs)
        if worst > fock_cutoff:
            raise CutoffTooSmall(
                f"eigenvalue {n} needs occupation {worst} > fock_cutoff {fock_cutoff}")
    amp = 1.0 / math.sqrt(len(occs))
    return {o: amp for o in occs}


def two_mode_lambda_basis(n: int) -> tuple[int, int]:
    """Occupations of the representative vector for difference eigenvalue ``n``."""
    return (n, 0) if n >= 0 else (0, -n)


@dataclass(frozen=True)
class Generator:
    """Either ``multipath`` with ``modes`` M, or ``two_mode`` (a^dag a - b^dag b)."""

    kind: str
    modes: int = 2

    @classmethod
    def multipath(cls, M: int) -> "Generator":
        if M < 1:
            raise ValueError("M >= 1 required")
        return cls("multipath", int(M))

    @classmethod
    def two_mode(cls) -> "Generator":
        return cls("two_mode", 2)

    def eigenvalue(self, occ: tuple[int, ...]) -> int:
        if len(occ) != self.modes:
            raise ValueError(f"occupation {occ} does not have {self.modes} modes")
        if min(occ) < 0:
            raise ValueError(f"negative occupation in {occ}")
        if self.kind == "two_mode":
            return occ[0] - occ[1]
        return sum(l * k for l, k in enumerate(occ, start=1))

    def default_vector(self, n: int) -> dict[tuple[int, ...], complex]:
        if self.kind == "two_mode":
            return {two_mode_lambda_basis(n): 1.0}
        return dict(symmetrized_vector(self.modes, n))


@dataclass(frozen=True, eq=False)
class ReducedState:
    """Real nonnegative weights over a spectrum window.

    ``phases[i]`` is the unit factor removed from the eigenspace component at
    window position ``i``; ``basis`` optionally maps eigenvalues to the
    representative occupation vectors.
    """

    spectrum: Spectrum
    weights: np.ndarray
    phases: np.ndarray = None
    basis: dict | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.shape != (self.spectrum.size,):
            raise ValueError(f"expected {self.spectrum.size} weights, got shape {w.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        norm2 = float(w @ w)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NotNormalized(f"sum of squared weights is {norm2!r}")
        w /= math.sqrt(norm2)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        ph = np.ones(w.size, dtype=complex) if self.phases is None else np.asarray(self.phases, dtype=complex).copy()
        if ph.shape != w.shape:
            raise ValueError("phases must match weights")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @classmethod
    def from_weights(cls, spectrum: Spectrum, weights, **kw) -> "ReducedState":
        """Normalize arbitrary nonnegative weights first."""
        w = np.asarray(weights, dtype=float)
        nrm = np.linalg.norm(w)
        if nrm == 0:
            raise EmptyState("all weights vanish")
        return cls(spectrum, w / nrm, **kw)

    @classmethod
    def from_amplitudes(cls, spectrum: Spectrum, amps, **kw) -> "ReducedState":
        """Rephase complex or signed amplitudes to nonnegative weights."""
        a = np.asarray(amps, dtype=complex)
        mag = np.abs(a)
        phases = np.where(mag > 0, a / np.where(mag > 0, mag, 1.0), 1.0)
        nrm = np.linalg.norm(mag)
        if nrm == 0:
            raise EmptyState("all amplitudes vanish")
        return cls(spectrum, mag / nrm, phases=phases, **kw)

    @property
    def null_mask(self) -> np.ndarray:
        return self.weights == 0.0

    @property
    def null_indices(self) -> list[int]:
        return [int(n) for n in self.spectrum.indices[self.null_mask]]

    def weight(self, n: int) -> float:
        return float(self.weights[self.spectrum.position(n)])

    def to_dict(self) -> dict:
        return {
            "spectrum": self.spectrum.to_dict(),
            "weights": [float(x) for x in self.weights],
            "null_indices": self.null_indices,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ReducedState":
        return cls.from_weights(Spectrum.from_dict(data["spectrum"]), data["weights"])


def project_to_reduced(full_state: Mapping[tuple[int, ...], complex],
                       generator: Generator, cutoff: int | None = None) -> ReducedState:
    """Project a multimode state onto one normalized vector per eigenvalue.

    The weight for eigenvalue n is the norm of the eigenspace component; the
    representative vector is that component rescaled, so the reduced amplitude
    is real and positive.  Eigenvalues inside the window with no support are
    kept and listed in ``null_indices``.
    """
    if not full_state:
        raise EmptyState("empty state")
    blocks: dict[int, dict[tuple[int, ...], complex]] = {}
    total = 0.0
    for occ, amp in full_state.items():
        occ = tuple(int(k) for k in occ)
        if cutoff is not None and max(occ) > cutoff:
            raise CutoffTooSmall(f"occupation {occ} exceeds cutoff {cutoff}")
        amp = complex(amp)
        total += abs(amp) ** 2
        if amp != 0:
            blocks.setdefault(generator.eigenvalue(occ), {})[occ] = amp
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"input squared norm is {total!r}")
    if not blocks:
        raise EmptyState("all eigenspace projections vanish")

    if generator.kind == "two_mode":
        D = max(1, max(abs(n) for n in blocks))
        spectrum = Spectrum.integers(-D, D)
    else:
        spectrum = Spectrum.naturals(0, max(1, max(blocks)))

    weights = np.zeros(spectrum.size)
    phases = np.ones(spectrum.size, dtype=complex)
    basis = {}
    for n in spectrum.indices:
        n = int(n)
        comp = blocks.get(n)
        norm = math.sqrt(sum(abs(a) ** 2 for a in comp.values())) if comp else 0.0
        if norm == 0.0:
            basis[n] = generator.default_vector(n)
            continue
        i = spectrum.position(n)
        weights[i] = norm
        lead = comp[min(comp)]
        phases[i] = lead / abs(lead)
        basis[n] = {occ: a / norm for occ, a in sorted(comp.items())}
    total_w = np.linalg.norm(weights)
    if total_w == 0.0:
        raise EmptyState("all eigenspace projections vanish")
    weights /= total_w
    return ReducedState(spectrum, weights, phases=phases, basis=basis)


def occupation_map_to_json(state: Mapping[tuple[int, ...], complex]) -> list[dict]:
    out = []
    for occ, amp in sorted(state.items()):
        amp = complex(amp)
        out.append({"occ": list(occ), "re": amp.real, "im": amp.imag})
    return out


def occupation_map_from_json(items) -> dict[tuple[int, ...], complex]:
    return {tuple(int(k) for k in it["occ"]): complex(it["re"], it.get("im", 0.0)) for it in items}
