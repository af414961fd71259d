"""Dense and symmetric-tridiagonal matrix helpers.

Operators are plain square ``numpy`` arrays of float64.  Every relation check in
the package goes through :func:`residual`, which uses the max-row-sum norm so
reported numbers are reproducible across platforms.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ConvergenceError, DimensionError

SIGN_THRESHOLD = 1e-12
CLUSTER_RTOL = 1e-10


def as_operator(a, name="operator"):
    """Return ``a`` as a finite, square float64 array or raise."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _pair(a, b):
    a = as_operator(a, "a")
    b = as_operator(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def commutator(a, b):
    """``ab - ba``."""
    a, b = _pair(a, b)
    return a @ b - b @ a


def anticommutator(a, b):
    """``ab + ba``."""
    a, b = _pair(a, b)
    return a @ b + b @ a


def inf_norm(a):
    """Max absolute row sum."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return float(np.abs(a).sum(axis=1).max()) if a.size else 0.0


def residual(a, b):
    """Scale-free distance ``||a-b|| / max(1, ||a||, ||b||)`` in the inf-norm."""
    a, b = _pair(a, b)
    return inf_norm(a - b) / max(1.0, inf_norm(a), inf_norm(b))


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix stored as its diagonal and off-diagonal."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def __post_init__(self):
        d = np.array(self.diagonal, dtype=float).reshape(-1)
        e = np.array(self.offdiagonal, dtype=float).reshape(-1)
        if d.size < 1:
            raise DimensionError("tridiagonal operator needs dim >= 1")
        if e.size != d.size - 1:
            raise DimensionError(f"offdiagonal must have length {d.size - 1}, got {e.size}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal operator has non-finite entries")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiagonal", e)

    @property
    def dim(self):
        return self.diagonal.size

    def densify(self):
        out = np.diag(self.diagonal)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            out[idx, idx + 1] = self.offdiagonal
            out[idx + 1, idx] = self.offdiagonal
        return out

    @classmethod
    def from_dense(cls, a, atol=0.0):
        """Read off the tridiagonal band of a symmetric matrix.

        Raises if ``a`` is not symmetric or has entries outside the band larger
        than ``atol``.
        """
        a = as_operator(a)
        if not np.array_equal(a, a.T):
            if np.abs(a - a.T).max() > atol:
                raise ValueError("matrix is not symmetric")
        band = np.triu(np.tril(a, 1), -1)
        if a.shape[0] > 2 and np.abs(a - band).max() > atol:
            raise ValueError("matrix is not tridiagonal")
        return cls(np.diag(a).copy(), np.diag(a, 1).copy())


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def fix_signs(vectors, threshold=SIGN_THRESHOLD):
    """Flip columns so the first component above ``threshold`` is positive."""
    v = np.array(vectors, dtype=float)
    for s in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, s]) > threshold)
        if nz.size and v[nz[0], s] < 0:
            v[:, s] = -v[:, s]
    return v


def clusters(values, scale, rtol=CLUSTER_RTOL):
    """Group indices of sorted ``values`` whose consecutive gaps are below ``rtol*scale``."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    tol = rtol * max(scale, 1.0)
    groups = [[0]]
    for i in range(1, values.size):
        if values[i] - values[i - 1] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _finish(values, vectors, scale):
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for group in clusters(values, scale):
        if len(group) > 1:
            q, _ = np.linalg.qr(vectors[:, group])
            vectors[:, group] = q
    return EigenDecomposition(values, fix_signs(vectors))


def sym_tridiag_eigen(t, max_iter=60):
    """Eigen-decompose a symmetric tridiagonal operator by implicit-shift QL.

    Returns values in ascending order with orthonormal eigenvectors as columns,
    each normalised so its first component above 1e-12 is positive.

    Raises ConvergenceError if some eigenvalue needs more than ``max_iter``
    sweeps.
    """
    if not isinstance(t, TridiagonalOperator):
        t = TridiagonalOperator.from_dense(t)
    n = t.dim
    d = t.diagonal.copy()
    e = np.zeros(n)
    e[: n - 1] = t.offdiagonal
    z = np.eye(n)
    eps = np.finfo(float).eps
    scale = inf_norm(t.densify())

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise ConvergenceError(f"QL iteration did not converge for eigenvalue {l}")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + np.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return _finish(d, z, scale)


def sym_eigen(a):
    """Dense symmetric eigen-decomposition with the same conventions as
    :func:`sym_tridiag_eigen` (LAPACK via numpy does the work)."""
    a = as_operator(a)
    sym = 0.5 * (a + a.T)
    values, vectors = np.linalg.eigh(sym)
    return _finish(values, vectors, inf_norm(sym))


def reconstruction_residual(a, eig):
    """``||A V - V diag(w)|| / ||A||`` for a decomposition of ``a``."""
    a = as_operator(a)
    lhs = a @ eig.vectors - eig.vectors * eig.values
    return inf_norm(lhs) / max(inf_norm(a), np.finfo(float).tiny)
