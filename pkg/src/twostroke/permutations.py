"""Permutation machinery and brute-force optimisation of work and efficiency.

For a diagonal initial state the extremal work strokes are permutations of
the basis populations, so at desk scale the non-catalytic optimisation is an
exhaustive sweep over the symmetric group.  The sweep is vectorised over all
n! images at once; the guard keeps n at 9 or below (9! = 362880).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Literal

import numpy as np

from .errors import GuardExceededError
from .thermo import (
    MODE_TOL,
    CycleReport,
    InverseTemperaturePair,
    PopulationVector,
    Spectrum,
    gibbs_populations,
    product_state,
    stroke_report,
)

MAX_SWEEP_DIMENSION = 9


@dataclass(frozen=True)
class PermutationMap:
    """Bijection on basis indices; image[x] is the destination of index x."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(x) for x in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"not a bijection on 0..{len(image) - 1}: {image}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, n: int) -> "PermutationMap":
        return cls(tuple(range(n)))

    @classmethod
    def swap(cls, n: int, a: int, b: int) -> "PermutationMap":
        image = list(range(n))
        image[a], image[b] = image[b], image[a]
        return cls(tuple(image))

    def __len__(self) -> int:
        return len(self.image)

    def inverse(self) -> "PermutationMap":
        inv = [0] * len(self.image)
        for source, dest in enumerate(self.image):
            inv[dest] = source
        return PermutationMap(tuple(inv))

    def compose(self, inner: "PermutationMap") -> "PermutationMap":
        """Permutation acting as `inner` first, then `self`."""
        if len(inner) != len(self):
            raise ValueError("size mismatch")
        return PermutationMap(tuple(self.image[x] for x in inner.image))

    def matrix(self) -> np.ndarray:
        n = len(self.image)
        mat = np.zeros((n, n))
        mat[list(self.image), range(n)] = 1.0
        return mat

    def apply_to(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        if values.shape != (len(self.image),):
            raise ValueError("size mismatch")
        out = np.empty_like(values)
        out[list(self.image)] = values
        return out


def apply_permutation(state: PopulationVector, perm: PermutationMap) -> PopulationVector:
    """Move each basis population to its image index."""
    if len(perm) != state.dimension:
        raise ValueError(
            f"permutation on {len(perm)} indices cannot act on dimension {state.dimension}"
        )
    return PopulationVector(perm.apply_to(state.probs), state.basis_shape)


def enumerate_permutations(n: int) -> Iterator[PermutationMap]:
    """All permutations of {0..n-1} in lexicographic order of image."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_SWEEP_DIMENSION:
        raise GuardExceededError(f"enumeration too large: {n}! permutations")
    return (PermutationMap(image) for image in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def images_array(n: int) -> np.ndarray:
    """All n! images as an (n!, n) integer array, lexicographically ordered."""
    if n > MAX_SWEEP_DIMENSION:
        raise GuardExceededError(f"enumeration too large: {n}! permutations")
    arr = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def sweep_heats(
    probs: np.ndarray,
    energy_hot: np.ndarray,
    energy_cold: np.ndarray,
    images: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(work, heat_hot, heat_cold) for every image row, in one shot.

    `energy_hot`/`energy_cold` are the hot/cold marginal energies expanded to
    the full flat basis.  The energy of the permuted state is a gather:
    sum_x p[x] * E[image[x]].
    """
    final_hot = (energy_hot[images] * probs).sum(axis=1)
    final_cold = (energy_cold[images] * probs).sum(axis=1)
    heat_hot = energy_hot @ probs - final_hot
    heat_cold = energy_cold @ probs - final_cold
    return heat_hot + heat_cold, heat_hot, heat_cold


def expand_qubit_energies(
    hamiltonian_hot: Spectrum, hamiltonian_cold: Spectrum
) -> tuple[np.ndarray, np.ndarray]:
    """Hot and cold marginal energies over the flat (hot, cold) basis."""
    d_c = hamiltonian_cold.dimension
    d_h = hamiltonian_hot.dimension
    hot = np.repeat(hamiltonian_hot.energies(), d_c)
    cold = np.tile(hamiltonian_cold.energies(), d_h)
    return hot, cold


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a permutation sweep.

    `witnesses` collects every permutation achieving `best_value` within
    1e-12; work and efficiency optima need not coincide, and surfacing all
    witnesses lets a caller detect when they do.  `engine_regime` is False
    when no permutation produces positive work, in which case `best_value`
    is 0 and there are no witnesses.
    """

    best_value: float
    witnesses: tuple[PermutationMap, ...]
    report: CycleReport | None
    engine_regime: bool


def optimal_noncatalytic(
    hamiltonian_hot: Spectrum,
    hamiltonian_cold: Spectrum,
    beta: InverseTemperaturePair,
    objective: Literal["efficiency", "work"] = "efficiency",
) -> OptimizationResult:
    """Best work or efficiency over all permutation strokes of tau_h x tau_c."""
    if objective not in ("efficiency", "work"):
        raise ValueError(f"unknown objective {objective!r}")
    n = hamiltonian_hot.dimension * hamiltonian_cold.dimension
    if n > MAX_SWEEP_DIMENSION:
        raise GuardExceededError(
            f"working body dimension {n} exceeds the sweep guard {MAX_SWEEP_DIMENSION}"
        )
    hot = gibbs_populations(hamiltonian_hot, beta.beta_h)
    cold = gibbs_populations(hamiltonian_cold, beta.beta_c)
    initial = product_state([1.0], hot, cold)
    energy_hot, energy_cold = expand_qubit_energies(hamiltonian_hot, hamiltonian_cold)
    images = images_array(n)
    work, heat_hot, heat_cold = sweep_heats(initial.probs, energy_hot, energy_cold, images)

    engine = work > MODE_TOL
    if not engine.any():
        return OptimizationResult(0.0, (), None, False)
    if objective == "work":
        values = work
    else:
        values = np.full(work.shape, -np.inf)
        values[engine] = 1.0 + heat_cold[engine] / heat_hot[engine]
    values = np.where(engine, values, -np.inf)
    best = float(values.max())
    winners = np.flatnonzero(values >= best - 1e-12)
    witnesses = tuple(PermutationMap(tuple(images[k])) for k in winners)
    final = apply_permutation(initial, witnesses[0])
    report = stroke_report(initial, final, hamiltonian_hot, hamiltonian_cold, beta)
    return OptimizationResult(best, witnesses, report, True)


OTTO_SWAP_IMAGE: tuple[int, ...] = (0, 2, 1, 3)


@lru_cache(maxsize=1)
def canonical_qubit_images() -> tuple[tuple[int, ...], ...]:
    """Fixed row order for the 24-permutation table of a qubit working body.

    Identity first, then the hot-cold exchange that realises the Otto engine,
    then the remaining images lexicographically; a stable order keeps emitted
    tables byte-identical across runs.
    """
    rest = sorted(
        set(itertools.permutations(range(4))) - {(0, 1, 2, 3), OTTO_SWAP_IMAGE}
    )
    return ((0, 1, 2, 3), OTTO_SWAP_IMAGE, *rest)


@dataclass(frozen=True)
class QubitTableRow:
    index: int
    perm: PermutationMap
    work: float
    efficiency: float | None


def qubit_table(
    beta_h: float, omega_h: float, beta_c: float, omega_c: float
) -> list[QubitTableRow]:
    """Work and efficiency of all 24 permutation strokes of a two-qubit body.

    Efficiency is reported absent (None) whenever the stroke draws no hot
    heat, which covers both the identity row and the rows that only shuffle
    cold populations.
    """
    for name, value in (("beta_h", beta_h), ("omega_h", omega_h),
                        ("beta_c", beta_c), ("omega_c", omega_c)):
        if not float(value) > 0.0:
            raise ValueError(f"{name} must be positive")
    hot = gibbs_populations(Spectrum.qubit(omega_h), beta_h)
    cold = gibbs_populations(Spectrum.qubit(omega_c), beta_c)
    probs = np.kron(hot, cold)
    energy_hot, energy_cold = expand_qubit_energies(
        Spectrum.qubit(omega_h), Spectrum.qubit(omega_c)
    )
    images = np.array(canonical_qubit_images(), dtype=np.int64)
    work, heat_hot, heat_cold = sweep_heats(probs, energy_hot, energy_cold, images)
    rows = []
    for k, image in enumerate(canonical_qubit_images()):
        if abs(heat_hot[k]) > MODE_TOL:
            eff = float(1.0 + heat_cold[k] / heat_hot[k])
        else:
            eff = None
        rows.append(QubitTableRow(k + 1, PermutationMap(image), float(work[k]), eff))
    return rows


def passive_populations(populations, spectrum: Spectrum) -> np.ndarray:
    """Rearrange populations so larger weights sit on lower energies.

    Ties in energy are broken by original level order; any tie-respecting
    arrangement has the same (minimal) mean energy, this choice just makes
    the output unique.
    """
    p = np.asarray(populations, dtype=float)
    if p.shape != (spectrum.dimension,):
        raise ValueError("population vector does not match the spectrum")
    order = np.argsort(spectrum.energies(), kind="stable")
    out = np.empty_like(p)
    out[order] = np.sort(p)[::-1]
    return out


def ergotropy(populations, spectrum: Spectrum) -> float:
    """Unitarily extractable energy: mean energy above the passive floor."""
    p = np.asarray(populations, dtype=float)
    energies = spectrum.energies()
    return float(energies @ p - energies @ passive_populations(p, spectrum))
