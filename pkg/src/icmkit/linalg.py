"""Dense complex linear algebra shared by every other module.

Matrices are plain ``numpy`` complex arrays. Kets are stored as rows
(a basis of C^n is an ``(n, n)`` array whose row ``j`` is ket ``j``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, ValidationError


@dataclass(frozen=True)
class Tolerance:
    """Numerical cutoffs.

    ``rel_rank_eps`` scales the singular-value cutoff used by
    :func:`numerical_rank`; ``abs_eps`` is used for every entrywise
    comparison (hermiticity, orthonormality, completeness).
    """

    rel_rank_eps: float = 1e-10
    abs_eps: float = 1e-10

    def __post_init__(self):
        if not (0 < self.rel_rank_eps < 1):
            raise ValidationError(f"rel_rank_eps must lie in (0, 1), got {self.rel_rank_eps}")
        if not self.abs_eps > 0:
            raise ValidationError(f"abs_eps must be positive, got {self.abs_eps}")


DEFAULT_TOL = Tolerance()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or Inf")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product, first factor major: ``out[(i1,i2),(j1,j2)] = a[i1,j1] * b[i2,j2]``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def singular_values(a) -> np.ndarray:
    a = as_matrix(a)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed for {a.shape} matrix: {exc}") from exc


def rank_cutoff(s: np.ndarray, shape, tol: Tolerance = DEFAULT_TOL) -> float:
    if s.size == 0:
        return 0.0
    return tol.rel_rank_eps * float(s[0]) * max(shape)


def numerical_rank(a, tol: Tolerance = DEFAULT_TOL) -> int:
    """Count singular values above ``rel_rank_eps * sigma_max * max(rows, cols)``."""
    a = as_matrix(a)
    if a.size == 0:
        raise ValidationError("numerical_rank of an empty matrix")
    s = singular_values(a)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rank_cutoff(s, a.shape, tol)))


def gram_schmidt(vectors, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormalize ``vectors`` (rows) in order, dropping near-dependent ones.

    Modified Gram-Schmidt with one re-orthogonalization pass; a vector is
    dropped when its residual norm is at most ``abs_eps``.
    Returns an ``(r, dim)`` array.
    """
    vecs = np.atleast_2d(np.asarray(vectors, dtype=complex))
    dim = vecs.shape[1]
    basis: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w = w - np.vdot(q, w) * q
        norm = np.linalg.norm(w)
        if norm > tol.abs_eps:
            basis.append(w / norm)
    if not basis:
        return np.zeros((0, dim), dtype=complex)
    return np.array(basis)


def complete_to_unitary(cols, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Extend an ``m x n`` matrix with orthonormal columns to an ``m x m`` unitary.

    The first ``n`` columns of the result are the input, unchanged. Further
    columns come from the standard basis vectors in index order, each
    orthogonalized against everything accepted so far; candidates whose
    residual is below ``1/(2 sqrt(m))`` are rejected. Some remaining
    candidate always clears that bar, so the result is always full.
    """
    cols = as_matrix(cols, "cols")
    m, n = cols.shape
    if m < n:
        raise ValidationError(f"cannot complete {m}x{n}: more columns than rows")
    defect = np.abs(dagger(cols) @ cols - np.eye(n)).max() if n else 0.0
    if defect > tol.abs_eps:
        raise ValidationError(f"input columns are not orthonormal (max |C^dag C - I| = {defect:.3e})")
    accepted = [cols[:, k] for k in range(n)]
    cutoff = 0.5 / np.sqrt(m)
    for i in range(m):
        if len(accepted) == m:
            break
        w = np.zeros(m, dtype=complex)
        w[i] = 1.0
        for _ in range(2):
            for q in accepted:
                w = w - np.vdot(q, w) * q
        norm = np.linalg.norm(w)
        if norm > cutoff:
            accepted.append(w / norm)
    return np.column_stack(accepted)


def is_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return a.shape[-1] == a.shape[-2] and bool(np.abs(a - dagger(a)).max(initial=0.0) <= tol.abs_eps)


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + dagger(a)) / 2


def eig_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian matrix."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"eig_hermitian needs a square matrix, got {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - dagger(a)).max(initial=0.0) > tol.abs_eps * scale:
        raise ValidationError("eig_hermitian input is not Hermitian")
    try:
        return np.linalg.eigh(hermitize(a))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigh failed: {exc}") from exc


def psd_sqrt(a) -> np.ndarray:
    """Principal square root of a PSD matrix; small negative eigenvalues are clipped."""
    w, v = np.linalg.eigh(hermitize(as_matrix(a)))
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


def haar_unitary_from_rng(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary (QR of a complex Ginibre matrix, phases fixed)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    return haar_unitary_from_rng(n, np.random.default_rng(seed))


def common_eigenbasis(commuting, tol: Tolerance = DEFAULT_TOL, seed: int = 0,
                      max_attempts: int = 8) -> np.ndarray:
    """Orthonormal basis (rows) that diagonalizes every matrix in ``commuting``.

    Diagonalizes a random real combination of the Hermitian and
    anti-Hermitian parts; a new combination is drawn if an accidental
    degeneracy leaves some input non-diagonal.
    """
    mats = [as_matrix(m, "operator") for m in commuting]
    if not mats:
        raise ValidationError("common_eigenbasis needs at least one operator")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ValidationError("operators must all be square and the same size")
    scale = max(1.0, max(float(np.abs(m).max()) for m in mats))
    for i, a in enumerate(mats):
        if np.abs(a @ dagger(a) - dagger(a) @ a).max() > tol.abs_eps * scale ** 2:
            raise ValidationError(f"operator {i} is not normal")
        for j in range(i + 1, len(mats)):
            if np.abs(a @ mats[j] - mats[j] @ a).max() > tol.abs_eps * scale ** 2:
                raise ValidationError(f"operators {i} and {j} do not commute")
    parts = []
    for a in mats:
        parts.append(hermitize(a))
        parts.append(hermitize(-1j * a))
    rng = np.random.default_rng(seed)
    check = max(1e-8, tol.abs_eps) * scale
    for _ in range(max_attempts):
        coeffs = rng.standard_normal(len(parts))
        h = sum(c * p for c, p in zip(coeffs, parts))
        _, v = np.linalg.eigh(h)
        kets = v.T
        if all(_diagonalizes(a, kets) <= check for a in mats):
            return kets
    raise DecompositionError("could not find a jointly diagonalizing basis")


def _diagonalizes(a: np.ndarray, kets: np.ndarray) -> float:
    worst = 0.0
    for b in kets:
        ab = a @ b
        worst = max(worst, float(np.linalg.norm(ab - np.vdot(b, ab) * b)))
    return worst


def flatten_ops(ops) -> np.ndarray:
    """Stack operators as rows of their row-major flattenings."""
    ops = np.asarray(ops, dtype=complex)
    return ops.reshape(ops.shape[0], -1)


def outer_products(kets) -> np.ndarray:
    """``|k><k|`` for each row ``k``; returns ``(m, n, n)``."""
    kets = np.asarray(kets, dtype=complex)
    return np.einsum("mi,mj->mij", kets, kets.conj())
