"""Regularized Laplacian construction and its leading eigenstructure.

Both clustering pipelines start from the same object: the symmetric
matrix ``L = Dtau^{-1/2} M Dtau^{-1/2}`` where ``M`` is either a sampled
adjacency matrix or an expected one, and ``Dtau = D + tau*I`` adds a
ridge ``tau`` to the degrees. "Leading" eigenpairs are ranked by
eigenvalue magnitude, not signed value, because block structure with
disassortative connectivity puts informative eigenvalues on the negative
side of the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .model import Graph, PopulationMatrix

UNIT_NORM_TOL = 1e-10
ORTHONORMAL_TOL = 1e-8
RESIDUAL_TOL = 1e-8
ZERO_ROW_TOL = 1e-14


@dataclass(frozen=True)
class RegularizedLaplacian:
    """Dense symmetric ``Dtau^{-1/2} M Dtau^{-1/2}`` with its inputs."""

    tau: float
    dtau: np.ndarray  # regularized degrees D(i,i) + tau, shape (n,)
    matrix: np.ndarray  # (n, n) symmetric

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        d = np.asarray(self.dtau, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or d.shape != (m.shape[0],):
            raise ValueError("laplacian matrix must be square with one regularized degree per node")
        if not (np.isfinite(m).all() and np.isfinite(d).all()):
            raise ValueError("laplacian contains non-finite entries")
        if np.abs(m - m.T).max() > 1e-12:
            raise ValueError("laplacian must be symmetric within 1e-12")
        m = np.ascontiguousarray(m)
        d = np.ascontiguousarray(d)
        m.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dtau", d)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpectralBasis:
    """The K eigenpairs of largest magnitude, eigenvectors unit-norm."""

    eigenvalues: np.ndarray  # (K,), |lambda_1| >= ... >= |lambda_K|
    vectors: np.ndarray  # (n, K), orthonormal columns

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64)
        vecs = np.asarray(self.vectors, dtype=np.float64)
        if vals.ndim != 1 or vecs.ndim != 2 or vecs.shape[1] != vals.size:
            raise ValueError("eigenvalues and eigenvector columns must match")
        mags = np.abs(vals)
        if (np.diff(mags) > 1e-12).any():
            raise ValueError("eigenvalues must be ordered by decreasing magnitude")
        norms = np.linalg.norm(vecs, axis=0)
        if np.abs(norms - 1.0).max() > UNIT_NORM_TOL:
            raise ValueError("eigenvectors must have unit norm")
        gram_err = np.abs(vecs.T @ vecs - np.eye(vals.size)).max()
        if gram_err > ORTHONORMAL_TOL:
            raise ValueError(f"eigenvectors must be orthonormal (deviation {gram_err:.3e})")
        vals = np.ascontiguousarray(vals)
        vecs = np.ascontiguousarray(vecs)
        vals.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "vectors", vecs)

    @property
    def K(self) -> int:
        return self.eigenvalues.size

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def default_tau(n: int) -> float:
    """The default ridge regularizer ``0.1 * ln(n)``."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes for the default regularizer, got n={n}")
    return 0.1 * math.log(n)


def regularized_laplacian(source: Graph | PopulationMatrix, tau: float) -> RegularizedLaplacian:
    """Build ``Dtau^{-1/2} M Dtau^{-1/2}`` from a graph or expected adjacency.

    ``tau`` must be nonnegative; with ``tau = 0`` every node needs a
    strictly positive degree, otherwise a :class:`NumericalError` is
    raised (an isolated node makes the unregularized scaling undefined).
    """
    if tau < 0:
        raise ValueError(f"regularizer tau must be nonnegative, got {tau}")
    if isinstance(source, Graph):
        m = source.dense()
        degrees = source.degrees()
    elif isinstance(source, PopulationMatrix):
        m = np.array(source.matrix)
        degrees = source.degrees()
    else:
        raise TypeError(f"cannot build a laplacian from {type(source).__name__}")
    dtau = degrees + tau
    if dtau.min() <= 0.0:
        raise NumericalError(
            "zero regularized degree: tau = 0 requires every node to have positive degree"
        )
    scale = 1.0 / np.sqrt(dtau)
    lap = scale[:, None] * m * scale[None, :]
    lap = (lap + lap.T) / 2.0
    return RegularizedLaplacian(tau=float(tau), dtau=dtau, matrix=lap)


def leading_eigenpairs(lap: RegularizedLaplacian, K: int) -> SpectralBasis:
    """The K eigenpairs of largest |eigenvalue| from a full symmetric
    eigendecomposition.

    Ties in magnitude at the cut are broken toward the positive
    eigenvalue, then toward the lower position in the decomposition, so
    the selection is deterministic. Each returned pair is verified to
    satisfy ``||L v - lambda v|| <= 1e-8``.
    """
    n = lap.n
    if not 1 <= K <= n:
        raise ValueError(f"need 1 <= K <= n, got K={K}, n={n}")
    try:
        vals, vecs = np.linalg.eigh(lap.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    order = sorted(range(n), key=lambda i: (-abs(vals[i]), vals[i] < 0, i))
    take = order[:K]
    sel_vals = vals[take]
    sel_vecs = vecs[:, take]
    residual = np.linalg.norm(lap.matrix @ sel_vecs - sel_vecs * sel_vals, axis=0)
    if residual.max() > RESIDUAL_TOL:
        raise NumericalError(f"eigenpair residual {residual.max():.3e} exceeds {RESIDUAL_TOL}")
    return SpectralBasis(eigenvalues=sel_vals, vectors=sel_vecs)


def scale_rows_by_degree(basis: SpectralBasis, lap: RegularizedLaplacian) -> np.ndarray:
    """Row i of the result is ``sqrt(tau + D(i,i)) * V(i,:)``."""
    if basis.n != lap.n:
        raise ValueError(f"basis has {basis.n} rows but laplacian has {lap.n}")
    return np.sqrt(lap.dtau)[:, None] * basis.vectors


def normalize_rows(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each row to unit Euclidean norm.

    Returns the normalized matrix and the scaling factors ``1/||row||``.
    A (numerically) zero row aborts with :class:`NumericalError`; for
    eigenvector inputs that is the symptom of an isolated node.
    """
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    if norms.min() <= ZERO_ROW_TOL:
        bad = int(norms.argmin())
        raise NumericalError(f"row {bad} has numerically zero norm ({norms[bad]:.3e})")
    factors = 1.0 / norms
    return m * factors[:, None], factors
