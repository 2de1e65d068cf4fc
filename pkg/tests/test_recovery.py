import numpy as np
import pytest

from mmsbkit import (
    BlockModel,
    Graph,
    MembershipMatrix,
    NumericalError,
    build_population_matrix,
    planted_memberships,
    crsc,
    crsc_equivalence,
    default_tau,
    ideal_crsc,
    ideal_srsc,
    leading_eigenpairs,
    mixed_hamming_error,
    recover_from_basis,
    regularized_laplacian,
    sample_adjacency,
    srsc,
    srsc_equivalence,
)
from mmsbkit.recovery import _memberships_from_z, _solve_right_inverse
from mmsbkit.spectral import SpectralBasis
from conftest import three_block_setup


def align_columns(pi_ref, corners_result):
    """Column order of a recovery, keyed by the community each corner is
    a pure member of (valid on oracle inputs)."""
    return [int(pi_ref.weights[i].argmax()) for i in corners_result.corners.indices]


class TestIdealPipelines:
    def test_identity_memberships_recover_exactly(self):
        pi = MembershipMatrix(np.eye(4))
        block = BlockModel(np.eye(4) * 0.6 + 0.4 * np.eye(4)[::-1], rho=1.0)
        omega = build_population_matrix(pi, block)
        for fn in (ideal_srsc, ideal_crsc):
            result = fn(omega, 4, tau=0.3)
            assert mixed_hamming_error(result.pi_hat, pi).per_node.max() <= 1e-12

    def test_small_planted_config_exact(self):
        pi, _, omega = three_block_setup(n=150, n0=30)
        for fn in (ideal_srsc, ideal_crsc):
            result = fn(omega, 3)
            assert mixed_hamming_error(result.pi_hat, pi).per_node.max() <= 1e-8
            assert result.clipped_rows == 0
            assert result.fallback_rows == 0

    def test_intermediate_reconstructions_coincide(self):
        # the simplex and cone routes build the same matrix before
        # normalization, up to the corner column order
        pi, _, omega = three_block_setup(n=150, n0=30)
        a = ideal_srsc(omega, 3)
        b = ideal_crsc(omega, 3)
        za = a.z[:, np.argsort(align_columns(pi, a))]
        zb = b.z[:, np.argsort(align_columns(pi, b))]
        assert np.abs(za - zb).max() <= 1e-10

    def test_relabeling_equivariance(self):
        pi, block, omega = three_block_setup(n=120, n0=24)
        sigma = [2, 0, 1]
        pi_perm = MembershipMatrix(pi.weights[:, sigma])
        block_perm = BlockModel(block.tilde_p[np.ix_(sigma, sigma)], rho=block.rho)
        omega_perm = build_population_matrix(pi_perm, block_perm)
        assert np.abs(omega.matrix - omega_perm.matrix).max() <= 1e-12
        result = ideal_srsc(omega_perm, 3)
        assert mixed_hamming_error(result.pi_hat, pi_perm).error <= 1e-10
        assert mixed_hamming_error(result.pi_hat, pi).error <= 1e-10

    def test_exact_recovery_with_negative_connectivity_eigenvalue(self):
        # the strongest disassortative template: lambda_min = -0.27, so one
        # of the three informative eigenvalues is negative and only
        # magnitude ranking keeps it ahead of the noise space
        from mmsbkit import negative_eig_block

        pi = planted_memberships(180, 3, 36, "four-profiles")
        block = negative_eig_block(12)
        omega = build_population_matrix(pi, BlockModel(block.tilde_p, rho=0.9))
        for fn in (ideal_srsc, ideal_crsc):
            result = fn(omega, 3)
            assert mixed_hamming_error(result.pi_hat, pi).per_node.max() <= 1e-8

    @pytest.mark.parametrize("k", [2, 4, 5])
    def test_exact_recovery_across_community_counts(self, k):
        pi = planted_memberships(40 * k, k, 12, "uniform", seed=1)
        block = BlockModel(np.eye(k) * 0.5 + 0.5 * np.full((k, k), 0.4) + 0.3 * np.eye(k))
        omega = build_population_matrix(pi, block)
        for fn in (ideal_srsc, ideal_crsc):
            result = fn(omega, k)
            assert mixed_hamming_error(result.pi_hat, pi).per_node.max() <= 1e-8

    def test_rank_violation_detected(self):
        # duplicate community columns: connectivity full rank but the
        # memberships never use community 2, so the product loses rank
        w = np.zeros((40, 3))
        w[:20, 0] = 1.0
        w[20:, 1] = 1.0
        pi = MembershipMatrix(w)
        block = BlockModel(np.eye(3) * 0.5 + 0.5, rho=1.0)
        omega = build_population_matrix(pi, block)
        with pytest.raises(NumericalError, match="rank"):
            ideal_srsc(omega, 3)


class TestEmpiricalPipelines:
    def test_k1_gives_all_ones_column(self):
        _, _, omega = three_block_setup(n=40, n0=8, rho=0.9)
        g = sample_adjacency(omega, 2)
        for fn in (srsc, crsc, srsc_equivalence, crsc_equivalence):
            result = fn(g, 1)
            assert np.array_equal(result.pi_hat.weights, np.ones((40, 1)))

    def test_rows_sum_to_one(self, small_graph):
        for fn in (srsc, crsc):
            result = fn(small_graph, 3)
            sums = result.pi_hat.weights.sum(axis=1)
            assert np.abs(sums - 1.0).max() <= 1e-12
            assert result.pi_hat.weights.min() >= 0.0

    def test_default_tau_is_recorded(self, small_graph):
        result = srsc(small_graph, 3)
        assert result.tau == pytest.approx(default_tau(small_graph.n))

    def test_explicit_tau_wins(self, small_graph):
        result = srsc(small_graph, 3, tau=1.25)
        assert result.tau == 1.25

    def test_bitwise_determinism(self, small_graph):
        a = crsc(small_graph, 3)
        b = crsc(small_graph, 3)
        assert np.array_equal(a.pi_hat.weights, b.pi_hat.weights)
        assert a.corners.indices == b.corners.indices

    def test_error_beats_uniform_baseline(self):
        pi, _, omega = three_block_setup(n=300, n0=75, rho=0.8)
        g = sample_adjacency(omega, 4)
        uniform = MembershipMatrix(np.full((300, 3), 1 / 3))
        baseline = mixed_hamming_error(uniform, pi).error
        for fn in (srsc, crsc):
            err = mixed_hamming_error(fn(g, 3).pi_hat, pi).error
            assert err < baseline

    def test_reference_config_regression(self):
        # n=800 reference run (membership seed 11, graph seed 7); the
        # constants were frozen from the first verified run
        pi, _, omega = three_block_setup(
            n=800, n0=200, diag=0.8, off=0.1, rho=1.0, profile="random-half", seed=11
        )
        g = sample_adjacency(omega, 7)
        uniform = MembershipMatrix(np.full((800, 3), 1 / 3))
        baseline = mixed_hamming_error(uniform, pi).error
        err_simplex = mixed_hamming_error(srsc(g, 3).pi_hat, pi).error
        err_cone = mixed_hamming_error(crsc(g, 3).pi_hat, pi).error
        assert err_simplex < baseline and err_cone < baseline
        assert err_simplex == pytest.approx(0.10921637193130079, abs=0.02)
        assert err_cone == pytest.approx(0.15067770814903406, abs=0.02)

    def test_method_tags(self, small_graph):
        assert srsc(small_graph, 3).method == "SRSC"
        assert crsc(small_graph, 3).method == "CRSC"
        assert srsc_equivalence(small_graph, 3).method == "SRSC-EQ"
        assert crsc_equivalence(small_graph, 3).method == "CRSC-EQ"


class TestEquivalences:
    def test_simplex_and_cone_routes_match(self):
        _, _, omega = three_block_setup(n=150, n0=30)
        for seed in range(3):
            g = sample_adjacency(omega, seed)
            a, b = srsc(g, 3), srsc_equivalence(g, 3)
            assert a.corners.indices == b.corners.indices
            assert np.abs(a.pi_hat.weights - b.pi_hat.weights).max() <= 1e-10
            c, d = crsc(g, 3), crsc_equivalence(g, 3)
            assert c.corners.indices == d.corners.indices
            assert np.abs(c.pi_hat.weights - d.pi_hat.weights).max() <= 1e-10

    def test_row_norm_diagonals_match(self):
        # the projector's row norms equal the eigenvector row norms
        _, _, omega = three_block_setup(n=100, n0=20)
        g = sample_adjacency(omega, 1)
        lap = regularized_laplacian(g, default_tau(100))
        basis = leading_eigenpairs(lap, 3)
        v = basis.vectors
        n_v = np.linalg.norm(v, axis=1)
        n_v2 = np.linalg.norm(v @ v.T, axis=1)
        assert np.abs(n_v - n_v2).max() <= 1e-10

    def test_oracle_equivalence_routes_recover_exactly(self):
        pi, _, omega = three_block_setup(n=120, n0=24)
        lap = regularized_laplacian(omega, default_tau(120))
        basis = leading_eigenpairs(lap, 3)
        for method in ("SRSC-EQ", "CRSC-EQ"):
            result = recover_from_basis(basis, lap, method, clip=False)
            assert result.method == f"IDEAL-{method}"
            assert mixed_hamming_error(result.pi_hat, pi).per_node.max() <= 1e-8

    def test_corner_gram_matrices_match_across_routes(self):
        # the K x K Gram of the corner rows is the same whether corners are
        # read from the scaled eigenvectors or from the scaled projector
        _, _, omega = three_block_setup(n=150, n0=30)
        from mmsbkit import scale_rows_by_degree
        from mmsbkit.spectral import normalize_rows

        for seed in range(3):
            g = sample_adjacency(omega, seed)
            lap = regularized_laplacian(g, default_tau(150))
            basis = leading_eigenpairs(lap, 3)
            v = basis.vectors
            root_d = np.sqrt(lap.dtau)

            idx = list(srsc(g, 3).corners.indices)
            narrow = scale_rows_by_degree(basis, lap)[idx]
            wide = (root_d[:, None] * (v @ v.T))[idx]
            assert np.abs(narrow @ narrow.T - wide @ wide.T).max() <= 1e-10

            idx = list(crsc(g, 3).corners.indices)
            narrow = normalize_rows(v)[0][idx]
            wide = normalize_rows(v @ v.T)[0][idx]
            assert np.abs(narrow @ narrow.T - wide @ wide.T).max() <= 1e-10


class TestSignFlipInvariance:
    def test_column_negation_leaves_memberships_unchanged(self):
        _, _, omega = three_block_setup(n=100, n0=20)
        rng = np.random.default_rng(8)
        for seed in range(3):
            g = sample_adjacency(omega, seed)
            lap = regularized_laplacian(g, default_tau(100))
            basis = leading_eigenpairs(lap, 3)
            signs = rng.choice([-1.0, 1.0], size=3)
            flipped = SpectralBasis(basis.eigenvalues, basis.vectors * signs)
            for method in ("SRSC", "CRSC", "SRSC-EQ", "CRSC-EQ"):
                ref = recover_from_basis(basis, lap, method)
                out = recover_from_basis(flipped, lap, method)
                assert np.abs(out.pi_hat.weights - ref.pi_hat.weights).max() <= 1e-10


class TestReconstructionHelpers:
    def test_clipping_counts_rows_and_falls_back_to_uniform(self):
        z = np.array([[-1.0, -2.0], [0.5, -0.1], [1.0, 1.0]])
        pi, z_out, clipped, fallback = _memberships_from_z(z, clip=True)
        assert clipped == 2  # two rows carried negative entries
        assert fallback == 1  # the all-negative row clipped to zero
        assert np.allclose(pi.weights[0], [0.5, 0.5])
        assert np.allclose(pi.weights[1], [1.0, 0.0])
        assert z_out.min() >= 0.0

    def test_singular_corner_matrix_raises(self):
        with pytest.raises(NumericalError, match="singular"):
            _solve_right_inverse(np.eye(2), np.ones((2, 2)))

    def test_unclipped_route_rejects_zero_rows(self):
        with pytest.raises(NumericalError, match="zero row"):
            _memberships_from_z(np.array([[0.0, 0.0]]), clip=False)

    def test_k_must_be_positive(self, small_graph):
        with pytest.raises(ValueError):
            srsc(small_graph, 0)

    def test_crsc_rejects_isolated_node(self):
        # an isolated node has a zero row in the leading eigenvectors,
        # which the cone route cannot normalize
        pairs = np.array([[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]])
        g = Graph.from_edges(7, pairs)  # node 6 is isolated
        with pytest.raises(NumericalError, match="zero norm"):
            crsc(g, 2, tau=0.5)
