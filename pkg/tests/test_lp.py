import math

import numpy as np
import pytest
from scipy.optimize import linprog

import twostroke as ts


def random_instance(rng, dims=(2, 2, 2)):
    """Random catalyst-assisted working body with a Gibbs-product initial."""
    d_s, d_h, d_c = dims
    hot = ts.Spectrum(tuple(np.sort(np.concatenate([[0.0], rng.uniform(0.2, 2.0, d_h - 1)]))))
    cold = ts.Spectrum(tuple(np.sort(np.concatenate([[0.0], rng.uniform(0.1, 1.5, d_c - 1)]))))
    beta_h = float(rng.uniform(0.3, 1.5))
    beta = ts.InverseTemperaturePair(beta_h, beta_h + float(rng.uniform(0.2, 2.0)))
    catalyst = rng.dirichlet(np.ones(d_s))
    initial = ts.product_state(
        catalyst,
        ts.gibbs_populations(hot, beta.beta_h),
        ts.gibbs_populations(cold, beta.beta_c),
    )
    hamiltonian = ts.combined_spectrum(ts.Spectrum.trivial(d_s), hot, cold)
    return hamiltonian, initial, d_s, beta


def scipy_value(problem):
    rows = [np.ones(problem.work.size)]
    rhs = [1.0]
    for k in range(problem.target.size - 1):
        rows.append(problem.marginals[:, k])
        rhs.append(problem.target[k])
    result = linprog(
        -problem.work, A_eq=np.array(rows), b_eq=np.array(rhs), bounds=(0, None),
        method="highs",
    )
    assert result.success
    return -result.fun


def best_single_catalyst_preserving(problem):
    keeps = np.abs(problem.marginals - problem.target).max(axis=1) <= 1e-12
    return float(problem.work[keeps].max())


class TestTrivialCatalyst:
    def test_value_equals_ergotropy(self, rng):
        for _ in range(10):
            hamiltonian, initial, _, _ = random_instance(rng, (1, 2, 3))
            solution = ts.lp_work_upper_bound(hamiltonian, initial, 1)
            assert solution.status == "optimal"
            assert solution.value == pytest.approx(
                ts.ergotropy(initial.probs, hamiltonian), abs=1e-10
            )

    def test_passive_initial_sits_at_identity(self):
        # omega_c > omega_h makes the Gibbs product passive: no work at all
        beta = ts.InverseTemperaturePair(6.0, 7.0)
        hot, cold = ts.Spectrum.qubit(2.0), ts.Spectrum.qubit(3.0)
        initial = ts.product_state(
            [1.0],
            ts.gibbs_populations(hot, beta.beta_h),
            ts.gibbs_populations(cold, beta.beta_c),
        )
        hamiltonian = ts.combined_spectrum(ts.Spectrum.trivial(1), hot, cold)
        solution = ts.lp_work_upper_bound(hamiltonian, initial, 1)
        assert solution.value == pytest.approx(0.0, abs=1e-12)
        assert list(solution.alphas) == [ts.PermutationMap((0, 1, 2, 3))]
        assert solution.alphas[ts.PermutationMap((0, 1, 2, 3))] == pytest.approx(1.0)


class TestCatalyticBound:
    def test_contains_two_block_ladder_value(self):
        # seed the catalyst with the preserved state of the (1, 1) split so
        # that stroke is feasible for the program
        beta = ts.InverseTemperaturePair(1.0, 5.0)
        hot, cold = ts.Spectrum.qubit(1.0), ts.Spectrum.qubit(0.6)
        state = ts.solve_catalyst_state(
            ts.SimplePermSpec(1, 1), math.exp(-1.0), math.exp(-3.0)
        )
        initial = ts.product_state(
            state.populations,
            ts.gibbs_populations(hot, beta.beta_h),
            ts.gibbs_populations(cold, beta.beta_c),
        )
        hamiltonian = ts.combined_spectrum(ts.Spectrum.trivial(2), hot, cold)
        solution = ts.lp_work_upper_bound(hamiltonian, initial, 2)
        ladder, _ = ts.simple_perm_report(ts.SimplePermSpec(1, 1), 1.0, 0.6, beta)
        assert solution.value >= ladder.work - 1e-12

    def test_dominates_single_permutations_and_zero(self, rng):
        for dims in ((2, 2, 2), (1, 2, 4), (2, 2, 2)):
            hamiltonian, initial, d_s, _ = random_instance(rng, dims)
            solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
            assert solution.value >= -1e-12
            assert solution.value >= best_single_catalyst_preserving(solution.problem) - 1e-10

    def test_matches_scipy(self, rng):
        for dims in ((1, 2, 2), (2, 2, 2), (1, 2, 3), (1, 3, 2)):
            hamiltonian, initial, d_s, _ = random_instance(rng, dims)
            solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
            assert solution.value == pytest.approx(scipy_value(solution.problem), abs=1e-9)

    def test_duality_gap(self, rng):
        for _ in range(10):
            hamiltonian, initial, d_s, _ = random_instance(rng, (2, 2, 2))
            solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
            assert ts.lp_dual_check(solution) <= 1e-8

    def test_monotone_in_catalyst_dimension(self, rng):
        # embedding a d-block catalyst into d+1 blocks (new block empty)
        # preserves feasibility, so the bound cannot drop
        for base_dims, big_dims in (((1, 2, 2), (2, 2, 2)), ((2, 2, 1), (3, 2, 1))):
            hamiltonian, initial, d_s, _ = random_instance(rng, base_dims)
            small = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
            padded = np.concatenate([initial.catalyst_marginal(), [0.0]])
            grid = initial.grid()
            big_probs = np.concatenate([initial.probs, np.zeros(grid[0].size)])
            big_initial = ts.PopulationVector(
                big_probs, (d_s + 1, base_dims[1], base_dims[2])
            )
            big_hamiltonian = ts.Spectrum(hamiltonian.levels + hamiltonian.levels[: grid[0].size])
            big = ts.lp_work_upper_bound(big_hamiltonian, big_initial, d_s + 1)
            assert big.value >= small.value - 1e-10

    def test_clausius_at_optimum(self, rng):
        for _ in range(10):
            hamiltonian, initial, d_s, beta = random_instance(rng, (2, 2, 2))
            solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
            final = np.zeros_like(initial.probs)
            for perm, weight in solution.alphas.items():
                final += weight * perm.apply_to(initial.probs)
            report = ts.stroke_report(
                initial,
                ts.PopulationVector(final, initial.basis_shape),
                _hot_spectrum(hamiltonian, initial),
                _cold_spectrum(hamiltonian, initial),
                beta,
            )
            assert ts.clausius_lhs(report.heat_hot, report.heat_cold, beta) <= 1e-10

    def test_dual_perturbation_respects_weak_duality(self, rng):
        hamiltonian, initial, d_s, _ = random_instance(rng, (2, 2, 2))
        solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
        problem = solution.problem
        x = np.asarray(solution.dual_x) + 0.1
        y = float((problem.work - problem.marginals[:, : x.size] @ x).max())
        perturbed_objective = y + float(problem.target[: x.size] @ x)
        assert perturbed_objective >= solution.value - 1e-10


def _hot_spectrum(hamiltonian, state):
    d_s, d_h, d_c = state.basis_shape
    energies = np.asarray(hamiltonian.levels).reshape(d_s, d_h, d_c)
    return ts.Spectrum(tuple(energies[0, :, 0]))


def _cold_spectrum(hamiltonian, state):
    d_s, d_h, d_c = state.basis_shape
    energies = np.asarray(hamiltonian.levels).reshape(d_s, d_h, d_c)
    return ts.Spectrum(tuple(energies[0, 0, :]))


class TestVertexReconstruction:
    def test_nondegenerate_optimum_inverts(self, rng):
        # at a nondegenerate vertex the basic weights follow from the basis
        # matrix alone: alpha_B = inverse(A)^T a with A = [1; block sums]
        verified = 0
        for _ in range(150):
            if verified >= 5:
                break
            hamiltonian, initial, d_s, _ = random_instance(rng, (2, 2, 2))
            solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
            problem = solution.problem
            basis = list(solution.basis)
            if len(basis) != d_s:
                continue
            weights = np.zeros(problem.work.size)
            for perm, weight in solution.alphas.items():
                matches = [
                    j
                    for j in range(problem.images.shape[0])
                    if tuple(problem.images[j]) == perm.image
                ]
                weights[matches[0]] = weight
            if any(weights[j] < 1e-6 for j in basis):
                continue  # degenerate vertex
            x = np.asarray(solution.dual_x)
            slack = problem.work - problem.marginals[:, : x.size] @ x - solution.dual_y
            nonbasic = [j for j in range(problem.work.size) if j not in basis]
            if nonbasic and max(slack[j] for j in nonbasic) > -1e-9:
                continue  # optimum not unique enough to invert
            a_matrix = np.column_stack(
                [np.ones(len(basis)), problem.marginals[basis, : d_s - 1]]
            )
            a_vector = np.concatenate([[1.0], problem.target[: d_s - 1]])
            alpha = np.linalg.solve(a_matrix.T, a_vector)
            assert np.abs(alpha - weights[basis]).max() < 1e-8
            # the same basis matrix also reproduces the dual point
            dual_point = np.linalg.solve(a_matrix, problem.work[basis])
            assert dual_point[0] == pytest.approx(solution.dual_y, abs=1e-8)
            verified += 1
        assert verified >= 3


class TestGuardFallback:
    def test_restricted_columns_flagged(self):
        beta = ts.InverseTemperaturePair(1.0, 6.0)
        hot, cold = ts.Spectrum.qubit(1.0), ts.Spectrum.qubit(0.8)
        state = ts.solve_catalyst_state(
            ts.SimplePermSpec(2, 1), math.exp(-1.0), math.exp(-4.8)
        )
        initial = ts.product_state(
            state.populations,
            ts.gibbs_populations(hot, beta.beta_h),
            ts.gibbs_populations(cold, beta.beta_c),
        )
        hamiltonian = ts.combined_spectrum(ts.Spectrum.trivial(3), hot, cold)
        solution = ts.lp_work_upper_bound(hamiltonian, initial, 3)
        assert solution.status == "guard_exceeded"
        assert "not a valid upper bound" in solution.note
        identity = ts.PermutationMap.identity(12)
        assert any(np.array_equal(row, identity.image) for row in solution.problem.images)
        assert ts.lp_dual_check(solution) <= 1e-8

    def test_shape_mismatch_rejected(self):
        hot, cold = ts.Spectrum.qubit(1.0), ts.Spectrum.qubit(0.5)
        beta = ts.InverseTemperaturePair(1.0, 3.0)
        initial = ts.product_state(
            [0.5, 0.5],
            ts.gibbs_populations(hot, beta.beta_h),
            ts.gibbs_populations(cold, beta.beta_c),
        )
        hamiltonian = ts.combined_spectrum(ts.Spectrum.trivial(2), hot, cold)
        with pytest.raises(ValueError):
            ts.lp_work_upper_bound(hamiltonian, initial, 1)


class TestSerialisation:
    def test_json_shape(self, rng):
        hamiltonian, initial, d_s, _ = random_instance(rng, (2, 2, 2))
        solution = ts.lp_work_upper_bound(hamiltonian, initial, d_s)
        data = solution.to_dict()
        assert set(data) == {"value", "status", "note", "alphas", "dual", "residuals"}
        assert all(set(entry) == {"image", "weight"} for entry in data["alphas"])
        assert set(data["dual"]) == {"y", "x"}
        assert len(data["dual"]["x"]) == d_s - 1
        assert abs(sum(e["weight"] for e in data["alphas"]) - 1.0) < 1e-9
