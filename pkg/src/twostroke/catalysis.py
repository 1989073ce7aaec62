"""Catalyst-assisted strokes built from simple permutations.

A simple permutation on a (d-block catalyst) x (hot qubit) x (cold qubit)
working body exchanges exactly two levels per catalyst block, one swap with
the next block and one with the previous block (cyclically).  Preserving the
catalyst then forces the same net population transfer through every block,
which makes the whole stroke solvable in closed form: with m swaps dropping a
hot excitation to the ground pair and n swaps converting a hot excitation
into a cold one, the heats are

    Q_h = (m + n) * omega_h * transfer,     Q_c = -n * omega_c * transfer,

so the efficiency is 1 - n*omega_c/((m+n)*omega_h) regardless of the
transfer's size.  The transfer itself follows from the block flow-balance
equations solved here both numerically and in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegeneratePointError,
    GuardExceededError,
    InfeasibleCatalystError,
    NoEngineRegimeError,
)
from .permutations import PermutationMap, ergotropy
from .thermo import (
    ENGINE,
    MODE_TOL,
    CycleReport,
    InverseTemperaturePair,
    PopulationVector,
    Spectrum,
    combined_spectrum,
    gibbs_populations,
)

NEGATIVE_POPULATION_TOL = 1e-12
MAX_REGIME_CATALYST_DIM = 64


@dataclass(frozen=True)
class SimplePermSpec:
    """Shape of a simple permutation.

    m counts the swaps that drop a hot excitation straight to the next
    block's ground pair, n the swaps that convert a hot excitation into a
    cold one; the catalyst dimension is d = m + n.
    """

    m: int
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.n < 1:
            raise ValueError("n must be at least 1")

    @property
    def d(self) -> int:
        return self.m + self.n


@dataclass(frozen=True, eq=False)
class CatalystState:
    """Catalyst populations preserved by a simple permutation.

    `delta_p` is the uniform net population transfer from each block to the
    next; it is the single number the heats are proportional to.
    """

    populations: np.ndarray
    delta_p: float

    def __post_init__(self) -> None:
        pops = np.asarray(self.populations, dtype=float).copy()
        pops.setflags(write=False)
        object.__setattr__(self, "populations", pops)
        object.__setattr__(self, "delta_p", float(self.delta_p))


@dataclass(frozen=True)
class FlowAccount:
    """Net population leaving the excited hot / excited cold subspaces."""

    hot_flow: float
    cold_flow: float


def _level(block: int, hot: int, cold: int) -> int:
    """Flat index of |block, hot, cold> with 1-based block labels."""
    return 4 * (block - 1) + 2 * hot + cold


def build_simple_perm(shape: SimplePermSpec) -> PermutationMap:
    """The simple permutation with m ground-dropping and n cold-raising swaps.

    Blocks 1..m swap their hot-excited level with the next block's ground
    level; blocks m+1..m+n-1 swap it with the next block's cold-excited
    level; the last block wraps around to the first.  Built from disjoint
    transpositions, so the result is an involution.
    """
    d = shape.d
    if 4 * d > 2**22:
        raise GuardExceededError(f"catalyst dimension {d} too large to materialise")
    image = list(range(4 * d))

    def swap(x: int, y: int) -> None:
        image[x], image[y] = image[y], image[x]

    for i in range(1, shape.m + 1):
        swap(_level(i, 1, 0), _level(i + 1, 0, 0))
    for j in range(shape.m + 1, d):
        swap(_level(j, 1, 0), _level(j + 1, 0, 1))
    swap(_level(d, 1, 0), _level(1, 0, 1))
    return PermutationMap(tuple(image))


def subspace_flows(initial: PopulationVector, final: PopulationVector) -> FlowAccount:
    """Net population flow out of the excited hot and cold subspaces.

    For qubit hot/cold factors each heat is this flow times the level
    spacing, which is what makes simple permutations analysable by counting
    arrows instead of energies.
    """
    if initial.basis_shape != final.basis_shape:
        raise ValueError("basis shapes differ")
    _, d_h, d_c = initial.basis_shape
    if d_h != 2 or d_c != 2:
        raise ValueError("subspace flows are defined for qubit hot/cold factors")
    diff = initial.grid() - final.grid()
    return FlowAccount(float(diff[:, 1, :].sum()), float(diff[:, :, 1].sum()))


def _check_boltzmann(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 < value < 1.0) or not math.isfinite(value):
        raise ValueError(f"{name} must lie strictly between 0 and 1")
    return value


def _flow_system(shape: SimplePermSpec, boltz_hot: float, boltz_cold: float):
    """Linear system for (populations, transfer): d flow balances plus the
    normalisation row."""
    d = shape.d
    norm = 1.0 / ((1.0 + boltz_hot) * (1.0 + boltz_cold))
    a = np.zeros((d + 1, d + 1))
    b = np.zeros(d + 1)
    for s in range(shape.m):
        a[s, s] = norm * boltz_hot
        a[s, s + 1] = -norm
        a[s, d] = -1.0
    for t in range(shape.m, d - 1):
        a[t, t] = norm * boltz_hot
        a[t, t + 1] = -norm * boltz_cold
        a[t, d] = -1.0
    a[d - 1, d - 1] += norm * boltz_hot
    a[d - 1, 0] += -norm * boltz_cold
    a[d - 1, d] = -1.0
    a[d, :d] = 1.0
    b[d] = 1.0
    return a, b


def solve_catalyst_state(
    shape: SimplePermSpec, boltz_hot: float, boltz_cold: float
) -> CatalystState:
    """Catalyst state preserved by the simple permutation, by linear solve.

    `boltz_hot`/`boltz_cold` are the excited-level Boltzmann factors
    exp(-beta*omega) of the hot and cold qubits.  Populations more negative
    than 1e-12 mean no valid catalyst exists for these parameters and raise
    InfeasibleCatalystError; tinier negatives are clipped to zero.
    """
    bh = _check_boltzmann(boltz_hot, "boltz_hot")
    bc = _check_boltzmann(boltz_cold, "boltz_cold")
    a, b = _flow_system(shape, bh, bc)
    try:
        solution = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular flow system") from exc
    pops = solution[: shape.d]
    worst = float(pops.min())
    if worst < -NEGATIVE_POPULATION_TOL:
        raise InfeasibleCatalystError(
            f"infeasible catalyst: solved population {worst:.3e} is negative"
        )
    return CatalystState(np.clip(pops, 0.0, None), float(solution[shape.d]))


def _solve_catalyst_batch(
    shape: SimplePermSpec, boltz_hot: np.ndarray, boltz_cold: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised variant of solve_catalyst_state over parameter arrays.

    Returns (populations, transfer, feasible); singular or negative-catalyst
    points are marked infeasible instead of raising.
    """
    bh = np.asarray(boltz_hot, dtype=float)
    bc = np.asarray(boltz_cold, dtype=float)
    count = bh.size
    d = shape.d
    norm = 1.0 / ((1.0 + bh) * (1.0 + bc))
    a = np.zeros((count, d + 1, d + 1))
    b = np.zeros((count, d + 1, 1))
    for s in range(shape.m):
        a[:, s, s] = norm * bh
        a[:, s, s + 1] = -norm
        a[:, s, d] = -1.0
    for t in range(shape.m, d - 1):
        a[:, t, t] = norm * bh
        a[:, t, t + 1] = -norm * bc
        a[:, t, d] = -1.0
    a[:, d - 1, d - 1] += norm * bh
    a[:, d - 1, 0] += -norm * bc
    a[:, d - 1, d] = -1.0
    a[:, d, :d] = 1.0
    b[:, d, 0] = 1.0
    feasible = np.ones(count, dtype=bool)
    try:
        solution = np.linalg.solve(a, b)[..., 0]
    except np.linalg.LinAlgError:
        solution = np.zeros((count, d + 1))
        for i in range(count):
            try:
                solution[i] = np.linalg.solve(a[i], b[i, :, 0])
            except np.linalg.LinAlgError:
                feasible[i] = False
    pops = solution[:, :d]
    transfer = solution[:, d]
    feasible &= pops.min(axis=1) >= -NEGATIVE_POPULATION_TOL
    return np.clip(pops, 0.0, None), transfer, feasible


def delta_p_closed_form(
    shape: SimplePermSpec, boltz_hot: float, boltz_cold: float
) -> float:
    """Per-block transfer in closed form.

    The expression has poles at boltz_hot == boltz_cold and boltz_hot == 1;
    those points are refused and callers are directed to the linear solver,
    which has no pole there.
    """
    ah = _check_boltzmann(boltz_hot, "boltz_hot")
    ac = _check_boltzmann(boltz_cold, "boltz_cold")
    if abs(ah - ac) < 1e-13 or abs(1.0 - ah) < 1e-13:
        raise DegeneratePointError("use linear solver at degenerate point")
    m, n = shape.m, shape.n
    norm = 1.0 / ((1.0 + ah) * (1.0 + ac))
    numerator = ah * (1.0 - ac) ** 2 * (1.0 - ah**m) * (ah**n - ac**n) + (
        ah ** (m + n) - ac**n
    ) * (ah - ac) * (1.0 - ah) * (n * (1.0 - ah) - m * (ah - ac))
    scale = numerator / ((ah - ac) ** 2 * (1.0 - ah) ** 2)
    if scale == 0.0:
        raise DegeneratePointError("use linear solver at degenerate point")
    return norm * (ah ** (m + n) - ac**n) / scale


def _rational_efficiency(shape: SimplePermSpec, omega_h: float, omega_c: float) -> float:
    eta = 1 - Fraction(shape.n) * Fraction(float(omega_c)) / (
        Fraction(shape.d) * Fraction(float(omega_h))
    )
    return float(eta)


def simple_perm_report(
    shape: SimplePermSpec,
    omega_h: float,
    omega_c: float,
    beta: InverseTemperaturePair,
) -> tuple[CycleReport, CatalystState]:
    """Stroke accounting for a simple permutation with its solved catalyst.

    Negative work is reported, not an error.  The efficiency, when defined,
    is evaluated in exact rational arithmetic as 1 - n*omega_c/(d*omega_h)
    before conversion to float, so rational inputs give exact outputs; it is
    reported whenever the block transfer is nonzero, even at deep-cold
    parameters where the heats themselves are astronomically small.
    """
    omega_h = float(omega_h)
    omega_c = float(omega_c)
    if not (omega_h > 0.0 and omega_c > 0.0):
        raise ValueError("level spacings must be positive")
    boltz_hot = math.exp(-beta.beta_h * omega_h)
    boltz_cold = math.exp(-beta.beta_c * omega_c)
    catalyst = solve_catalyst_state(shape, boltz_hot, boltz_cold)
    heat_hot = shape.d * omega_h * catalyst.delta_p
    heat_cold = -shape.n * omega_c * catalyst.delta_p
    efficiency = None
    if catalyst.delta_p != 0.0:
        efficiency = _rational_efficiency(shape, omega_h, omega_c)
    report = CycleReport.from_heats(heat_hot, heat_cold, efficiency=efficiency)
    return report, catalyst


def sweep_simple_perms(
    catalyst_dim: int,
    omega_h: float,
    omega_c: float,
    beta: InverseTemperaturePair,
) -> list[tuple[SimplePermSpec, CycleReport, CatalystState]]:
    """Reports for every (m, n) split of a d-block catalyst, increasing n.

    Splits whose flow equations admit no nonnegative catalyst are skipped.
    """
    out = []
    for n in range(1, int(catalyst_dim) + 1):
        shape = SimplePermSpec(int(catalyst_dim) - n, n)
        try:
            report, catalyst = simple_perm_report(shape, omega_h, omega_c, beta)
        except InfeasibleCatalystError:
            continue
        out.append((shape, report, catalyst))
    return out


def optimal_simple_perm_efficiency(
    catalyst_dim: int,
    omega_h: float,
    omega_c: float,
    beta: InverseTemperaturePair,
) -> float:
    """Best engine efficiency over simple permutations of a d-block catalyst.

    Requires omega_c/omega_h <= d <= beta_c*omega_c/(beta_h*omega_h), the
    window in which the single-cold-swap ladder runs below the Carnot bound;
    the optimum is then 1 - omega_c/(d*omega_h), verified here against the
    full (m, n) sweep.
    """
    d = int(catalyst_dim)
    lower = omega_c / omega_h
    upper = beta.beta_c * omega_c / (beta.beta_h * omega_h)
    if not (lower <= d <= upper):
        raise ValueError(
            f"catalyst dimension {d} outside the admissible window "
            f"[{lower:.6g}, {upper:.6g}]"
        )
    best = _rational_efficiency(SimplePermSpec(d - 1, 1), omega_h, omega_c)
    swept = [
        report.efficiency
        for _, report, _ in sweep_simple_perms(d, omega_h, omega_c, beta)
        if ENGINE in report.modes and report.efficiency is not None
    ]
    if swept and abs(max(swept) - best) > 1e-10:
        raise RuntimeError(
            "sweep maximum disagrees with the closed-form optimum; "
            f"{max(swept)!r} vs {best!r}"
        )
    return best


def feasible_quality(
    omega_h: float,
    omega_c: float,
    beta: InverseTemperaturePair,
    max_dim: int = MAX_REGIME_CATALYST_DIM,
) -> SimplePermSpec:
    """A (d, n) split whose simple permutation runs as an engine here.

    An engine-mode split exists whenever beta_c*omega_c > beta_h*omega_h;
    d/n must land strictly between max(1, omega_c/omega_h) and
    beta_c*omega_c/(beta_h*omega_h), so the midpoint of that interval is
    approximated by continued fractions until a realisation with d <= max_dim
    verifies as an engine.
    """
    low = max(1.0, omega_c / omega_h)
    high = beta.beta_c * omega_c / (beta.beta_h * omega_h)
    if not high > low:
        raise NoEngineRegimeError(
            f"no engine regime: d/n window ({low:.6g}, {high:.6g}) is empty"
        )
    target = Fraction((low + high) / 2.0)
    seen: set[Fraction] = set()
    for cap in range(1, max_dim + 1):
        quality = target.limit_denominator(cap)
        if quality in seen:
            continue
        seen.add(quality)
        d, n = quality.numerator, quality.denominator
        if not (low < d / n < high) or d > max_dim or d < n:
            continue
        shape = SimplePermSpec(d - n, n)
        try:
            report, _ = simple_perm_report(shape, omega_h, omega_c, beta)
        except InfeasibleCatalystError:
            continue
        # Strictly inside the window the true work is positive however small
        # (deep-cold parameters push it far below the engine-mode threshold),
        # so the verification is the sign, not the mode label.
        if report.work > 0.0:
            return shape
    raise NoEngineRegimeError(
        f"no engine-mode simple permutation with catalyst dimension <= {max_dim}"
    )


def _as_quality(value) -> Fraction:
    """Coerce a d/n ratio to an exact Fraction.

    Strings keep their decimal meaning ('2.2' -> 11/5); floats go through
    repr for the same reason.  Pass Fractions directly when exactness
    matters.
    """
    if isinstance(value, Fraction):
        quality = value
    elif isinstance(value, str):
        quality = Fraction(value)
    elif isinstance(value, int):
        quality = Fraction(value)
    elif isinstance(value, float):
        quality = Fraction(repr(value))
    else:
        raise TypeError(f"cannot interpret {value!r} as a d/n ratio")
    if quality <= 0:
        raise ValueError("d/n ratios must be positive")
    return quality


@dataclass(frozen=True)
class RegimeMapRow:
    beta_ratio: float
    freq_ratio: float
    d_over_n: str
    feasible: bool
    region_label: str


@dataclass(frozen=True)
class RegimeMap:
    header: tuple[str, ...]
    rows: tuple[RegimeMapRow, ...]


def regime_map(
    qualities: Iterable,
    beta_ratio_range: Sequence[float],
    freq_ratio_range: Sequence[float],
    resolution: int,
) -> RegimeMap:
    """Feasibility grid over the bath-temperature and level-spacing ratios.

    Every grid point carries one row per region: 'carnot' marks where any
    engine at all can run (beta_c*omega_c > beta_h*omega_h), 'otto' where the
    bare hot-cold swap runs without a catalyst, and one 'catalytic' row per
    requested d/n where the simple permutation realising that ratio (in
    lowest terms) produces positive work with a valid catalyst.  Grid points
    are evaluated at beta_h = omega_h = 1; feasibility only depends on the
    two plotted ratios.
    """
    resolution = int(resolution)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    beta_lo, beta_hi = (float(v) for v in beta_ratio_range)
    freq_lo, freq_hi = (float(v) for v in freq_ratio_range)
    if not (1.0 < beta_lo < beta_hi):
        raise ValueError("beta ratio range must satisfy 1 < lo < hi")
    if not (0.0 < freq_lo < freq_hi):
        raise ValueError("freq ratio range must satisfy 0 < lo < hi")
    fractions = [_as_quality(q) for q in qualities]
    if not fractions:
        raise ValueError("at least one d/n ratio is required")
    for quality in fractions:
        if quality.numerator > MAX_REGIME_CATALYST_DIM:
            raise ValueError(
                f"d/n = {quality} needs catalyst dimension {quality.numerator} "
                f"> cap {MAX_REGIME_CATALYST_DIM}"
            )

    beta_ratios = np.linspace(beta_lo, beta_hi, resolution)
    freq_ratios = np.linspace(freq_lo, freq_hi, resolution)
    grid_beta, grid_freq = np.meshgrid(beta_ratios, freq_ratios, indexing="ij")
    flat_beta = grid_beta.reshape(-1)
    flat_freq = grid_freq.reshape(-1)
    exponent_product = flat_beta * flat_freq

    carnot_mask = exponent_product > 1.0
    otto_mask = (flat_freq < 1.0) & carnot_mask

    catalytic_masks = []
    boltz_hot = np.full(flat_beta.shape, math.exp(-1.0))
    boltz_cold = np.exp(-exponent_product)
    for quality in fractions:
        d, n = quality.numerator, quality.denominator
        if d < n:
            catalytic_masks.append(np.zeros(flat_beta.shape, dtype=bool))
            continue
        shape = SimplePermSpec(d - n, n)
        _, transfer, solvable = _solve_catalyst_batch(shape, boltz_hot, boltz_cold)
        work = (d * 1.0 - n * flat_freq) * transfer
        window = (float(quality) > 1.0) & (float(quality) < exponent_product)
        catalytic_masks.append(window & (work > MODE_TOL) & solvable)

    rows = []
    for idx in range(flat_beta.size):
        b = float(flat_beta[idx])
        f = float(flat_freq[idx])
        rows.append(RegimeMapRow(b, f, "", bool(carnot_mask[idx]), "carnot"))
        rows.append(RegimeMapRow(b, f, "", bool(otto_mask[idx]), "otto"))
        for quality, mask in zip(fractions, catalytic_masks):
            label = f"{quality.numerator}/{quality.denominator}"
            rows.append(RegimeMapRow(b, f, label, bool(mask[idx]), "catalytic"))
    header = (
        "# regime map over beta_c/beta_h (beta_ratio) and omega_c/omega_h (freq_ratio)",
        "# normalisation: beta_h = 1 and omega_h = 1 at every grid point",
        f"# catalytic rows realise d/n in lowest terms, catalyst dimension capped at {MAX_REGIME_CATALYST_DIM}",
        "# feasible: carnot = any engine possible; otto = bare hot-cold swap runs;"
        " catalytic = the d/n simple permutation runs with a valid catalyst",
    )
    return RegimeMap(header, tuple(rows))


def fig_work_vs_cold_swaps(
    catalyst_dim: int,
    hot_exponent: float,
    exponent_ratio: float,
    freq_ratio: float,
) -> list[tuple[int, float, float]]:
    """Work of every (d - n, n) simple permutation next to the best
    non-catalytic work at the same parameters.

    Parameters are dimensionless: omega_h = 1, beta_h = hot_exponent,
    beta_c*omega_c = exponent_ratio * hot_exponent and omega_c = freq_ratio.
    Returns (n, catalytic work, non-catalytic baseline) triples.
    """
    d = int(catalyst_dim)
    if d < 1:
        raise ValueError("catalyst dimension must be at least 1")
    hot_exponent = float(hot_exponent)
    exponent_ratio = float(exponent_ratio)
    freq_ratio = float(freq_ratio)
    if hot_exponent <= 0 or exponent_ratio <= 0 or freq_ratio <= 0:
        raise ValueError("dimensionless parameters must be positive")
    omega_h = 1.0
    omega_c = freq_ratio
    beta_h = hot_exponent
    beta_c = hot_exponent * exponent_ratio / freq_ratio
    if not beta_c > beta_h:
        raise ValueError(
            "exponent_ratio/freq_ratio must exceed 1 so the hot bath is hotter"
        )
    beta = InverseTemperaturePair(beta_h, beta_c)
    hot = gibbs_populations(Spectrum.qubit(omega_h), beta_h)
    cold = gibbs_populations(Spectrum.qubit(omega_c), beta_c)
    baseline = ergotropy(
        np.kron(hot, cold),
        combined_spectrum(
            Spectrum.trivial(1), Spectrum.qubit(omega_h), Spectrum.qubit(omega_c)
        ),
    )
    rows = []
    for n in range(1, d + 1):
        report, _ = simple_perm_report(SimplePermSpec(d - n, n), omega_h, omega_c, beta)
        rows.append((n, report.work, baseline))
    return rows
