"""Mixed membership block model: memberships, connectivity, expected and
sampled adjacency.

A network with ``n`` nodes and ``K`` overlapping communities is described
by a row-stochastic membership matrix ``Pi`` (n x K) and a symmetric
connectivity matrix ``P = rho * tilde_p`` (K x K) whose entries are edge
probabilities between communities. The expected adjacency is
``Omega = Pi @ P @ Pi.T``; observed graphs draw each upper-triangular
entry independently as Bernoulli(Omega[i, j]).

All containers are frozen dataclasses over read-only numpy arrays, so
instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .exceptions import NumericalError

ROW_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12
RANK_SV_TOL = 1e-10
PURITY_TOL = 1e-12

#: Mixed-row layouts understood by :func:`planted_memberships`.
PROFILES = ("four-profiles", "uniform", "random-half")

_FOUR_PROFILES = np.array(
    [
        [0.4, 0.4, 0.2],
        [0.4, 0.2, 0.4],
        [0.2, 0.4, 0.4],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ]
)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MembershipMatrix:
    """Row-stochastic n x K matrix of community weights, one row per node.

    A node is *pure* when its row is (numerically) a unit vector and
    *mixed* otherwise; the row maximum is the node's purity.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError(f"memberships must be a 2-d matrix, got shape {w.shape}")
        if not np.isfinite(w).all():
            raise ValueError("memberships contain non-finite entries")
        if w.min() < 0.0 or w.max() > 1.0:
            raise ValueError("membership weights must lie in [0, 1]")
        row_err = np.abs(w.sum(axis=1) - 1.0).max()
        if row_err > ROW_SUM_TOL:
            raise ValueError(f"membership rows must sum to 1 (max deviation {row_err:.3e})")
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def K(self) -> int:
        return self.weights.shape[1]

    def pure_mask(self) -> np.ndarray:
        """Boolean mask of rows whose maximum weight reaches 1 - 1e-12."""
        return self.weights.max(axis=1) >= 1.0 - PURITY_TOL

    def is_identifiable(self) -> bool:
        """True when every community owns at least one pure node."""
        pure = self.pure_mask()
        if not pure.any():
            return False
        owners = self.weights[pure].argmax(axis=1)
        return np.unique(owners).size == self.K


@dataclass(frozen=True)
class BlockModel:
    """Community connectivity ``P = rho * tilde_p``.

    ``tilde_p`` is symmetric, nonnegative, full rank, with entries in
    [0, 1]; the canonical scaling places its maximum entry at 1 so that
    ``rho`` alone carries the sparsity level, but benchmark connectivity
    templates with maximum below 1 are accepted as-is.
    """

    tilde_p: np.ndarray
    rho: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.tilde_p, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 1:
            raise ValueError(f"connectivity must be square, got shape {p.shape}")
        if not np.isfinite(p).all():
            raise ValueError("connectivity contains non-finite entries")
        if np.abs(p - p.T).max() > SYMMETRY_TOL:
            raise ValueError("connectivity must be symmetric within 1e-12")
        if p.min() < 0.0:
            raise ValueError("connectivity entries must be nonnegative")
        if p.max() > 1.0 + SYMMETRY_TOL:
            raise ValueError("connectivity entries must not exceed 1")
        if not (0.0 < self.rho <= 1.0):
            raise ValueError(f"sparsity rho must lie in (0, 1], got {self.rho}")
        smallest_sv = np.linalg.svd(p, compute_uv=False)[-1]
        if smallest_sv <= RANK_SV_TOL:
            raise ValueError(
                f"connectivity is rank deficient (smallest singular value {smallest_sv:.3e})"
            )
        object.__setattr__(self, "tilde_p", _readonly(p))

    @property
    def K(self) -> int:
        return self.tilde_p.shape[0]

    @property
    def p(self) -> np.ndarray:
        """The scaled connectivity ``rho * tilde_p``."""
        return self.rho * self.tilde_p


@dataclass(frozen=True)
class PopulationMatrix:
    """Expected adjacency ``Omega``: symmetric, entries in [0, 1]."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected adjacency must be square, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("expected adjacency contains non-finite entries")
        if np.abs(m - m.T).max() > SYMMETRY_TOL:
            raise ValueError("expected adjacency must be symmetric within 1e-12")
        if m.min() < 0.0 or m.max() > 1.0:
            raise ValueError("expected adjacency entries must lie in [0, 1]")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def degrees(self) -> np.ndarray:
        """Expected degree vector (full row sums, diagonal included)."""
        return self.matrix.sum(axis=1)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph stored as a symmetric sparse 0/1 matrix."""

    adjacency: sp.csr_matrix = field(repr=False)

    def __post_init__(self):
        a = self.adjacency
        if not sp.issparse(a):
            a = sp.csr_matrix(np.asarray(a))
        a = a.tocsr().astype(np.float64)
        a.sum_duplicates()
        a.sort_indices()
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if a.nnz and not np.isin(a.data, (0.0, 1.0)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if a.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if (a != a.T).nnz != 0:
            raise ValueError("adjacency must be symmetric")
        a.eliminate_zeros()
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def edge_count(self) -> int:
        return self.adjacency.nnz // 2

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def edges(self) -> np.ndarray:
        """Edges as a sorted (m, 2) array with i < j per row."""
        coo = sp.triu(self.adjacency, k=1).tocoo()
        pairs = np.column_stack([coo.row, coo.col]).astype(np.int64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]

    @classmethod
    def from_edges(cls, n: int, pairs: np.ndarray) -> "Graph":
        """Build from an (m, 2) array of undirected edges (either order)."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValueError("edge endpoint out of range")
        if pairs.size and (pairs[:, 0] == pairs[:, 1]).any():
            raise ValueError("self-loops are not allowed")
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.ones(rows.size, dtype=np.float64)
        a = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        a.data[:] = 1.0  # collapse duplicate mentions of the same edge
        return cls(a)


def build_population_matrix(pi: MembershipMatrix, block: BlockModel) -> PopulationMatrix:
    """Expected adjacency ``Omega = Pi @ (rho * tilde_p) @ Pi.T``.

    Raises ``ValueError`` when the community counts of ``pi`` and
    ``block`` disagree. The result is explicitly symmetrized to keep the
    1e-12 symmetry invariant under floating point round-off.
    """
    if pi.K != block.K:
        raise ValueError(f"community count mismatch: memberships have K={pi.K}, block model K={block.K}")
    m = pi.weights @ block.p @ pi.weights.T
    m = (m + m.T) / 2.0
    np.clip(m, 0.0, 1.0, out=m)
    return PopulationMatrix(m)


def sample_adjacency(omega: PopulationMatrix, seed: int) -> Graph:
    """Draw a graph with independent Bernoulli(Omega[i, j]) edges for i < j.

    Sampling is deterministic given ``seed``: a PCG64 generator produces
    one uniform block per row ``i`` covering columns ``i+1 .. n-1``, in
    increasing row order. The diagonal is never sampled and stays 0.
    """
    w = omega.matrix
    n = omega.n
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    rows = []
    cols = []
    for i in range(n - 1):
        u = rng.random(n - 1 - i)
        hits = np.nonzero(u < w[i, i + 1:])[0]
        if hits.size:
            rows.append(np.full(hits.size, i, dtype=np.int64))
            cols.append(hits + i + 1)
    if rows:
        pairs = np.column_stack([np.concatenate(rows), np.concatenate(cols)])
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(n, pairs)


def planted_memberships(n: int, K: int, n0: int, mixed_profile: str, seed: int = 0) -> MembershipMatrix:
    """Benchmark membership layout: pure blocks first, then mixed rows.

    The first ``K * n0`` rows are pure, in ``K`` contiguous blocks of
    ``n0`` (community k owns rows ``k*n0 .. (k+1)*n0 - 1``). Remaining
    rows follow ``mixed_profile``:

    - ``"four-profiles"`` (K=3 only): the four rows (0.4, 0.4, 0.2),
      (0.4, 0.2, 0.4), (0.2, 0.4, 0.4) and (1/3, 1/3, 1/3) in equal
      counts; when the mixed count is not divisible by 4 the uniform
      profile absorbs the remainder.
    - ``"uniform"``: every mixed row equals 1/K in each community.
    - ``"random-half"``: seeded; the first K-1 entries are independent
      draws from (0, 1/(K-1)] and the last entry takes the remainder.
      For K=3 this is two entries in (0, 0.5] plus the remainder.
    """
    if K < 1 or n < 1 or n0 < 0:
        raise ValueError("n, K must be positive and n0 nonnegative")
    if K * n0 > n:
        raise ValueError(f"K*n0 = {K * n0} exceeds n = {n}")
    if mixed_profile not in PROFILES:
        raise ValueError(f"unknown profile {mixed_profile!r}; choose from {PROFILES}")

    w = np.zeros((n, K))
    for k in range(K):
        w[k * n0:(k + 1) * n0, k] = 1.0
    n_mixed = n - K * n0
    if n_mixed == 0:
        return MembershipMatrix(w)

    lo = K * n0
    if mixed_profile == "four-profiles":
        if K != 3:
            raise ValueError("the four-profiles layout requires K = 3")
        count = n_mixed // 4
        counts = [count, count, count, n_mixed - 3 * count]
        at = lo
        for profile, c in zip(_FOUR_PROFILES, counts):
            w[at:at + c] = profile
            at += c
    elif mixed_profile == "uniform":
        w[lo:] = 1.0 / K
    else:  # random-half
        rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
        if K == 1:
            w[lo:, 0] = 1.0
        else:
            # (1 - u) maps [0, 1) onto (0, 1], keeping entries strictly positive
            head = (1.0 - rng.random((n_mixed, K - 1))) / (K - 1)
            w[lo:, :K - 1] = head
            w[lo:, K - 1] = 1.0 - head.sum(axis=1)
    return MembershipMatrix(w)


def check_population_rank(omega: PopulationMatrix, K: int) -> None:
    """Verify Omega behaves as a rank-K matrix (full-rank connectivity and
    at least one pure node per community both hold).

    Raises :class:`NumericalError` when the K-th singular value is at or
    below 1e-10 times the largest.
    """
    svals = np.linalg.svd(omega.matrix, compute_uv=False)
    if K > svals.size or svals[K - 1] <= RANK_SV_TOL * max(svals[0], 1e-300):
        raise NumericalError(
            f"expected adjacency is not rank {K}: singular values decay to "
            f"{svals[min(K, svals.size) - 1]:.3e}"
        )
