"""Linear-programming upper bound on catalytic work extraction.

Over bistochastic strokes, work is linear, so the best bistochastic stroke
that preserves the catalyst marginal is a linear program in permutation
coordinates: maximise sum_m alpha_m * w_m over convex weights alpha subject
to the catalyst block sums staying fixed.  Its value bounds from above the
work of any single catalyst-preserving permutation, and relaxes the harder
question of which bistochastic matrices arise from actual unitaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .catalysis import SimplePermSpec, build_simple_perm
from .permutations import PermutationMap, images_array
from .thermo import PopulationVector, Spectrum

MAX_EXACT_DIMENSION = 8
SIGNATURE_DECIMALS = 12
WEIGHT_TOL = 1e-12

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
GUARD_EXCEEDED = "guard_exceeded"

RESTRICTED_NOTE = "restricted-column (not a valid upper bound)"


@dataclass(frozen=True, eq=False)
class WorkBoundProblem:
    """Deduplicated column data of the work-bound program.

    Permutations sharing the same (work, block-sum) signature are collapsed
    to one representative; `class_sizes` records how many each represents.
    """

    images: np.ndarray      # (M, dim) representative permutation images
    work: np.ndarray        # (M,) work of each representative
    marginals: np.ndarray   # (M, d_s) catalyst block sums after the stroke
    target: np.ndarray      # (d_s,) catalyst block sums of the initial state
    class_sizes: np.ndarray


@dataclass(frozen=True, eq=False)
class LPSolution:
    """Primal weights, dual certificate and value of the work-bound program."""

    value: float
    alphas: dict[PermutationMap, float]
    dual_y: float
    dual_x: tuple[float, ...]
    status: str
    note: str | None
    residuals: dict[str, float]
    problem: WorkBoundProblem = field(repr=False)
    basis: tuple[int, ...] = field(repr=False)

    def to_dict(self) -> dict:
        alphas = sorted(
            self.alphas.items(), key=lambda item: (-item[1], item[0].image)
        )
        return {
            "value": self.value,
            "status": self.status,
            "note": self.note,
            "alphas": [
                {"image": list(perm.image), "weight": weight} for perm, weight in alphas
            ],
            "dual": {"y": self.dual_y, "x": list(self.dual_x)},
            "residuals": dict(self.residuals),
        }


def _column_data(
    energies: np.ndarray, probs: np.ndarray, images: np.ndarray, catalyst_dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """Work and catalyst block sums for each permutation column."""
    count, dim = images.shape
    block_of = np.arange(dim) // (dim // catalyst_dim)
    work = energies @ probs - (energies[images] * probs).sum(axis=1)
    marginals = np.zeros((count, catalyst_dim))
    destination_blocks = block_of[images]
    np.add.at(
        marginals,
        (np.repeat(np.arange(count), dim), destination_blocks.reshape(-1)),
        np.tile(probs, count),
    )
    return work, marginals


def _restricted_images(dim: int, catalyst_dim: int) -> np.ndarray:
    """Identity plus every simple permutation, for bodies too big to sweep."""
    rows = [list(range(dim))]
    if dim == 4 * catalyst_dim:
        for n in range(1, catalyst_dim + 1):
            perm = build_simple_perm(SimplePermSpec(catalyst_dim - n, n))
            rows.append(list(perm.image))
    return np.array(rows, dtype=np.int64)


def build_work_bound_problem(
    hamiltonian: Spectrum,
    initial: PopulationVector,
    catalyst_dim: int,
    images: np.ndarray,
) -> WorkBoundProblem:
    """Assemble and deduplicate the permutation columns of the program.

    The representative of each signature class is the first permutation in
    image order, which keeps the reported weights deterministic.
    """
    energies = hamiltonian.energies()
    probs = initial.probs
    work, marginals = _column_data(energies, probs, images, catalyst_dim)
    signature = np.round(np.column_stack([work, marginals]), SIGNATURE_DECIMALS)
    _, inverse = np.unique(signature, axis=0, return_inverse=True)
    tally = np.bincount(inverse)
    first_index: dict[int, int] = {}
    for row_index, class_index in enumerate(inverse):
        first_index.setdefault(int(class_index), row_index)
    keep = np.array(sorted(first_index.values()), dtype=np.int64)
    class_sizes = np.array([tally[int(inverse[row])] for row in keep], dtype=np.int64)
    return WorkBoundProblem(
        images=images[keep],
        work=work[keep],
        marginals=marginals[keep],
        target=initial.catalyst_marginal(),
        class_sizes=class_sizes,
    )


def lp_work_upper_bound(
    hamiltonian: Spectrum,
    initial: PopulationVector,
    catalyst_dim: int,
) -> LPSolution:
    """Best work over catalyst-preserving bistochastic strokes.

    Exact for working bodies of dimension at most 8 (every permutation is a
    column).  Larger bodies fall back to identity-plus-simple-permutation
    columns and are flagged guard_exceeded: a maximum over a restricted
    column set can only underestimate the relaxation, so the fallback value
    is not a valid upper bound and says so in `note`.
    """
    catalyst_dim = int(catalyst_dim)
    if catalyst_dim != initial.basis_shape[0]:
        raise ValueError(
            f"catalyst_dim {catalyst_dim} does not match the state shape "
            f"{initial.basis_shape}"
        )
    if hamiltonian.dimension != initial.dimension:
        raise ValueError("spectrum does not match the state dimension")
    dim = initial.dimension
    if dim <= MAX_EXACT_DIMENSION:
        images = images_array(dim)
        status = OPTIMAL
        note = None
    else:
        images = _restricted_images(dim, catalyst_dim)
        status = GUARD_EXCEEDED
        note = RESTRICTED_NOTE
    problem = build_work_bound_problem(hamiltonian, initial, catalyst_dim, images)

    # The block-sum constraints sum to the normalisation row, so the last
    # one is dropped; its dual multiplier is implicitly zero.
    rows = [np.ones(problem.work.size)]
    rhs = [1.0]
    for k in range(catalyst_dim - 1):
        rows.append(problem.marginals[:, k])
        rhs.append(problem.target[k])
    result = simplex.simplex_solve(problem.work, np.array(rows), np.array(rhs))
    if result.status != simplex.OPTIMAL:
        return LPSolution(
            0.0, {}, 0.0, (0.0,) * (catalyst_dim - 1), INFEASIBLE, note,
            {}, problem, (),
        )
    weights = result.x
    alphas = {
        PermutationMap(tuple(problem.images[j])): float(weights[j])
        for j in np.flatnonzero(weights > WEIGHT_TOL)
    }
    dual_y = float(result.dual[0])
    dual_x = tuple(float(v) for v in result.dual[1:])
    mix_marginal = problem.marginals.T @ weights
    residuals = {
        "primal_marginal_max": float(np.abs(mix_marginal - problem.target).max()),
        "weight_sum_error": float(abs(weights.sum() - 1.0)),
    }
    solution = LPSolution(
        float(result.value),
        alphas,
        dual_y,
        dual_x,
        status,
        note,
        residuals,
        problem,
        tuple(int(b) for b in result.basis),
    )
    gap_and_slack = lp_dual_check(solution)
    residuals["dual_max_violation"] = gap_and_slack
    return solution


def lp_dual_check(solution: LPSolution, problem: WorkBoundProblem | None = None) -> float:
    """Largest violation of the dual certificate.

    Checks dual feasibility (y >= w_m - sum_k a_m^k x_k for every column m,
    with the dropped last block constraint carrying multiplier zero) and the
    strong-duality gap between y + sum_k a^k x_k and the primal value.
    """
    prob = problem if problem is not None else solution.problem
    x = np.asarray(solution.dual_x, dtype=float)
    slack = (
        prob.work
        - prob.marginals[:, : x.size] @ x
        - solution.dual_y
    )
    dual_objective = solution.dual_y + float(prob.target[: x.size] @ x)
    gap = abs(dual_objective - solution.value)
    worst_slack = float(slack.max(initial=0.0))
    return max(worst_slack, gap)
