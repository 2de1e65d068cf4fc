"""Corner hunting: pick the K rows that generate the point cloud.

Two geometries arise from the degree-scaled and row-normalized
eigenvector matrices. In the simplex case every row is a convex
combination of K vertex rows and successive projection (greedy max-norm
selection with orthogonal deflation) recovers them. In the cone case
every row is a nonnegative scaled combination of K generator rows lying
on a supporting hyperplane; a one-class SVM finds that hyperplane and
k-means groups the rows sitting on it.

The one-class SVM ``max b s.t. w.S(i,:) >= b, ||w|| <= 1`` is solved
through its dual, the minimum-norm point ``p`` of the convex hull of the
rows: ``w = p/||p||`` and ``b = ||p||``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError

UNIT_ROW_TOL = 1e-8
KKT_TOL = 1e-8
ORIGIN_TOL = 1e-10
WOLFE_GAP_TOL = 1e-10

#: Margin schedule for :func:`svm_cone_select`: step size as a fraction of
#: the SVM offset, and the number of enlargements attempted.
MARGIN_STEP = 0.05
MARGIN_MAX_STEPS = 40

KMEANS_RESTARTS = 10
KMEANS_ITERS = 100


@dataclass(frozen=True)
class CornerSet:
    """K distinct row indices chosen as simplex vertices or cone generators."""

    indices: tuple[int, ...]
    method: str  # "sp" or "svm-cone"

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("corner indices must be distinct")
        if any(i < 0 for i in self.indices):
            raise ValueError("corner indices must be nonnegative")
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def K(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SvmSolution:
    """Solution of the one-class SVM over unit-norm rows.

    ``weights`` are the dual simplex coefficients over all rows; the
    minimum-norm hull point is ``weights @ S`` and equals ``b * w``.
    """

    w: np.ndarray
    b: float
    weights: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self):
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        al = np.ascontiguousarray(self.weights, dtype=np.float64)
        if np.linalg.norm(w) > 1.0 + 1e-10:
            raise ValueError("svm normal vector must satisfy ||w|| <= 1")
        if al.min() < -1e-12 or abs(al.sum() - 1.0) > 1e-10:
            raise ValueError("dual weights must be a probability vector")
        w.setflags(write=False)
        al.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "weights", al)
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))


def sp_select(matrix: np.ndarray, K: int) -> CornerSet:
    """Successive projection: greedily take the row of largest norm, then
    project every row onto the orthogonal complement of the pick.

    Ties on the row norm resolve to the lowest index. Raises
    :class:`NumericalError` when the residual matrix is numerically zero
    before K picks (the input has rank below K).
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("input must be a 2-d matrix")
    n, width = m.shape
    if not 1 <= K <= min(n, width):
        raise ValueError(f"need 1 <= K <= min(n, m) = {min(n, width)}, got K={K}")
    residual = m.copy()
    initial_scale = np.linalg.norm(residual, axis=1).max()
    if initial_scale == 0.0:
        raise NumericalError("cannot select corners from an all-zero matrix")
    picks = []
    for _ in range(K):
        norms = np.linalg.norm(residual, axis=1)
        pick = int(norms.argmax())  # argmax returns the first max: lowest index on ties
        if norms[pick] <= 1e-12 * initial_scale:
            raise NumericalError(
                f"residual vanished after {len(picks)} picks; matrix rank is below K={K}"
            )
        u = residual[pick]
        residual = residual - np.outer(residual @ u, u) / (u @ u)
        picks.append(pick)
    return CornerSet(indices=tuple(picks), method="sp")


def _check_unit_rows(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] < 1:
        raise ValueError("input must be a nonempty 2-d matrix")
    norms = np.linalg.norm(s, axis=1)
    if np.abs(norms - 1.0).max() > UNIT_ROW_TOL:
        raise ValueError("rows must have unit Euclidean norm")
    return s


def _affine_min_norm(
    s: np.ndarray, active: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """Minimum-norm point over the convex hull of the active rows, found by
    repeatedly solving the affine relaxation and dropping atoms whose
    coefficient turns nonpositive. Returns (kept indices, their weights,
    the point), or None when the linear systems degrade.

    The affine step solves the KKT system ``[G 1; 1' 0] [beta; mu] = [0; 1]``
    by least squares, which stays stable when the active set carries
    near-duplicate atoms (a common situation when many input rows
    coincide)."""
    act = list(active)
    for _ in range(len(active) + 1):
        sa = s[act]
        k = len(act)
        gram = sa @ sa.T
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = gram
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[k] = 1.0
        try:
            solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        beta = solution[:k]
        if not np.isfinite(beta).all():
            return None
        total = beta.sum()
        if abs(total - 1.0) > 1e-8:
            return None
        if beta.min() > 1e-14:
            beta = beta / total
            return np.asarray(act), beta, beta @ sa
        if k == 1:
            return np.asarray(act), np.ones(1), sa[0]
        act.pop(int(beta.argmin()))
    return None


def one_class_svm(s: np.ndarray, tol: float = WOLFE_GAP_TOL, max_iter: int | None = None) -> SvmSolution:
    """Solve ``max b s.t. w.S(i,:) >= b, ||w|| <= 1`` for unit-norm rows.

    The dual problem, minimizing ``||x||`` over the convex hull of the
    rows, is attacked with Frank-Wolfe using away steps and exact line
    search until the Wolfe gap drops below ``tol`` (iteration cap
    ``10*n*m``). The iterate is then polished by solving the minimum-norm
    problem restricted to the active atoms exactly, which pins the
    support face to machine precision.

    Raises :class:`NumericalError` when the hull contains the origin
    (``b`` below 1e-10, so the rows do not form a cone) or when the KKT
    conditions cannot be certified to 1e-8.
    """
    s = _check_unit_rows(s)
    n, width = s.shape
    if max_iter is None:
        max_iter = 10 * n * width

    weights = np.zeros(n)
    weights[0] = 1.0
    x = s[0].copy()
    for _ in range(max_iter):
        scores = s @ x
        sq = x @ x
        fw = int(scores.argmin())
        gap = 2.0 * (sq - scores[fw])
        if gap <= tol:
            break
        active = np.nonzero(weights > 0.0)[0]

        # minor cycle: jump to the exact minimum-norm point of the face
        # spanned by the active atoms plus the new vertex whenever that
        # strictly improves; this sidesteps the slow zig-zag between
        # near-duplicate atoms
        face = active if fw in active else np.append(active, fw)
        polished = _affine_min_norm(s, face)
        if polished is not None:
            act, beta, candidate = polished
            if candidate @ candidate < sq:
                weights = np.zeros(n)
                weights[act] = beta
                x = candidate
                continue

        away_local = int(scores[active].argmax())
        away = int(active[away_local])
        if len(active) == 1 or (sq - scores[fw]) >= (scores[away] - sq):
            direction = s[fw] - x
            gamma_max = 1.0
            target, sign = fw, 1.0
        else:
            direction = x - s[away]
            alpha = weights[away]
            gamma_max = alpha / (1.0 - alpha) if alpha < 1.0 else 1.0
            target, sign = away, -1.0
        dd = direction @ direction
        if dd <= 0.0:
            break
        gamma = min(max(-(x @ direction) / dd, 0.0), gamma_max)
        if gamma <= 0.0:
            break
        if sign > 0:
            weights *= 1.0 - gamma
            weights[target] += gamma
        else:
            weights *= 1.0 + gamma
            weights[target] -= gamma
        weights[weights < 1e-15] = 0.0
        total = weights.sum()
        if total <= 0.0:
            raise NumericalError("svm dual weights collapsed")
        weights /= total
        x = weights @ s

    b = float(np.linalg.norm(x))
    if b <= ORIGIN_TOL:
        raise NumericalError(
            "the convex hull of the rows contains the origin; the rows do not form a cone"
        )
    w = x / b
    margins = s @ w
    # at the optimum the support rows meet the hyperplane, so min margin == b
    if abs(float(margins.min()) - b) > KKT_TOL:
        raise NumericalError(
            f"one-class svm failed to converge: margin residual {abs(margins.min() - b):.3e}"
        )
    support = tuple(int(i) for i in np.nonzero(weights > 1e-12)[0])
    return SvmSolution(w=w, b=b, weights=weights, support=support)


def cone_closed_form(corner_rows: np.ndarray) -> SvmSolution:
    """Exact one-class SVM solution when the input is the K generator rows.

    With ``G = S_C @ S_C.T`` and ``y = G^{-1} 1`` (all components must be
    positive for the cone geometry to hold), the offset is
    ``b = 1/sqrt(1'y)`` and the normal is ``w = S_C' y / (b * 1'y)``.
    """
    sc = _check_unit_rows(corner_rows)
    k = sc.shape[0]
    gram = sc @ sc.T
    if np.linalg.cond(gram) > 1e12:
        raise NumericalError("corner Gram matrix is numerically singular")
    y = np.linalg.solve(gram, np.ones(k))
    if y.min() <= 0.0:
        raise NumericalError(
            "cone condition violated: the Gram inverse row sums must be positive"
        )
    total = y.sum()
    b = 1.0 / np.sqrt(total)
    w = sc.T @ y / (b * total)
    return SvmSolution(w=w, b=b, weights=y / total, support=tuple(range(k)))


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, float]:
    """One seeded k-means++ run with Lloyd iterations. Clusters may come
    out empty (fewer than k distinct values, or a center starved during
    Lloyd); callers decide how to treat that."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centers[0] = x[first]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # every point coincides with a chosen center; duplicate one
            centers[j] = x[int(rng.integers(n))]
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        idx = min(idx, n - 1)
        centers[j] = x[idx]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))

    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(KMEANS_ITERS):
        dists = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dists.argmin(axis=1)
        for j in range(k):
            members = new_labels == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
        if (new_labels == labels).all():
            break
        labels = new_labels
    inertia = float(((x - centers[labels]) ** 2).sum())
    return labels, centers, inertia


def _kmeans(x: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Best of KMEANS_RESTARTS seeded runs. Restarts that fill all k
    clusters beat ones that do not; ties rank by (inertia, restart)."""
    best = None
    for restart in range(KMEANS_RESTARTS):
        rng = np.random.default_rng((int(seed) & 0xFFFFFFFFFFFFFFFF, restart))
        labels, centers, inertia = _kmeans_once(x, k, rng)
        starved = int((np.bincount(labels, minlength=k) == 0).sum())
        key = (starved, inertia, restart)
        if best is None or key < best[0]:
            best = (key, labels, centers)
    return best[1], best[2], best[0][1]


def svm_cone_select(s: np.ndarray, K: int, seed: int = 0) -> CornerSet:
    """Pick K generator rows of a cone-shaped unit-row matrix.

    Runs the one-class SVM to locate the supporting hyperplane, then
    grows a margin ``gamma`` from 0 in steps of ``MARGIN_STEP * b`` until
    the rows within ``b + gamma`` of the hyperplane split into K
    non-empty k-means clusters; the row nearest each cluster center is
    returned. Raises :class:`NumericalError` when the margin schedule is
    exhausted without finding K clusters.
    """
    s = _check_unit_rows(s)
    n = s.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"need 1 <= K <= n, got K={K}, n={n}")
    solution = one_class_svm(s)
    margins = s @ solution.w
    # rows meeting the margin with equality are certified only to the
    # solver's KKT tolerance, so the threshold carries that much slack
    slack = KKT_TOL * max(solution.b, 1.0)
    for step in range(MARGIN_MAX_STEPS + 1):
        gamma = step * MARGIN_STEP * solution.b
        candidates = np.nonzero(margins <= solution.b + gamma + slack)[0]
        if candidates.size < K:
            continue
        labels, centers, _ = _kmeans(s[candidates], K, seed)
        sizes = np.bincount(labels, minlength=K)
        if (sizes == 0).any():
            continue
        picks = []
        for j in range(K):
            members = np.nonzero(labels == j)[0]
            offsets = ((s[candidates[members]] - centers[j]) ** 2).sum(axis=1)
            picks.append(int(candidates[members[int(offsets.argmin())]]))
        if len(set(picks)) == K:
            return CornerSet(indices=tuple(picks), method="svm-cone")
    raise NumericalError(
        f"margin schedule exhausted without K={K} distinct clusters; "
        "K may be too large for this geometry"
    )
