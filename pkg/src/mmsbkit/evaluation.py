"""Error metrics, network summary statistics, and a concentration
diagnostic for the regularized Laplacian."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import Graph, MembershipMatrix, PopulationMatrix, PURITY_TOL
from .spectral import regularized_laplacian

MAX_BRUTE_FORCE_K = 10


@dataclass(frozen=True)
class ErrorReport:
    """Permutation-minimized l1 membership error.

    ``error`` is ``min_perm (1/n) * sum_i ||PiHat[:, perm](i,:) - Pi(i,:)||_1``
    and lies in [0, 2]. ``permutation`` is the minimizing column order
    (column k of the aligned estimate is ``pi_hat[:, permutation[k]]``)
    and ``per_node`` holds each node's l1 deviation under it.
    """

    error: float
    permutation: tuple[int, ...]
    per_node: np.ndarray

    def __post_init__(self):
        pn = np.ascontiguousarray(self.per_node, dtype=np.float64)
        pn.setflags(write=False)
        object.__setattr__(self, "per_node", pn)
        object.__setattr__(self, "permutation", tuple(int(k) for k in self.permutation))


@dataclass(frozen=True)
class NetworkStats:
    """Summary row: node count, community count if known, mean degree,
    edge density, and the proportion of mixed-membership nodes."""

    n: int
    K: int | None
    mean_degree: float
    density: float
    overlap: float | None


def mixed_hamming_error(pi_hat: MembershipMatrix, pi: MembershipMatrix) -> ErrorReport:
    """Exhaustive search over all K! column permutations for the smallest
    mean row-l1 difference between estimate and truth.

    The search is exact: the total l1 difference decomposes into a sum of
    per-column-pair distances, so each permutation is scored from a
    precomputed K x K table. Guarded to K <= 10.
    """
    if pi_hat.n != pi.n or pi_hat.K != pi.K:
        raise ValueError(
            f"shape mismatch: estimate is {pi_hat.n}x{pi_hat.K}, truth is {pi.n}x{pi.K}"
        )
    K = pi.K
    if K > MAX_BRUTE_FORCE_K:
        raise ValueError(f"brute-force permutation search is limited to K <= {MAX_BRUTE_FORCE_K}")
    a = pi_hat.weights
    b = pi.weights
    # pair_cost[j, k] = sum_i |a[i, j] - b[i, k]|
    pair_cost = np.abs(a.T[:, None, :] - b.T[None, :, :]).sum(axis=2)
    best_perm = None
    best_cost = np.inf
    for perm in itertools.permutations(range(K)):
        cost = sum(pair_cost[perm[k], k] for k in range(K))
        if cost < best_cost:
            best_cost = cost
            best_perm = perm
    per_node = np.abs(a[:, best_perm] - b).sum(axis=1)
    return ErrorReport(error=float(best_cost / pi.n), permutation=best_perm, per_node=per_node)


def network_stats(graph: Graph, pi: MembershipMatrix | None = None) -> NetworkStats:
    """Node count, mean degree, density, and overlap proportion.

    A node counts as mixed when its largest membership weight is below
    ``1 - 1e-12``. ``K`` and ``overlap`` are None without memberships.
    """
    n = graph.n
    degrees = graph.degrees()
    mean_degree = float(degrees.mean()) if n else 0.0
    density = float(degrees.sum() / (n * (n - 1))) if n > 1 else 0.0
    k = overlap = None
    if pi is not None:
        if pi.n != n:
            raise ValueError(f"memberships cover {pi.n} nodes but the graph has {n}")
        k = pi.K
        overlap = float((pi.weights.max(axis=1) < 1.0 - PURITY_TOL).mean())
    return NetworkStats(n=n, K=k, mean_degree=mean_degree, density=density, overlap=overlap)


def laplacian_concentration(graph: Graph, omega: PopulationMatrix, tau: float) -> float:
    """Spectral norm of the difference between the sampled and expected
    regularized Laplacians, via a symmetric eigendecomposition."""
    if graph.n != omega.n:
        raise ValueError(f"graph has {graph.n} nodes but the expected adjacency has {omega.n}")
    sampled = regularized_laplacian(graph, tau).matrix
    expected = regularized_laplacian(omega, tau).matrix
    eigenvalues = np.linalg.eigvalsh(sampled - expected)
    return float(np.abs(eigenvalues).max())
