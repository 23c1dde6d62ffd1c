"""Projective realizations of IC measurements on enlarged spaces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DecompositionError, ValidationError
from ..linalg import (DEFAULT_TOL, Tolerance, complete_to_unitary, dagger, flatten_ops, numerical_rank,
                      outer_products, psd_sqrt)
from ..measurement import Povm, TensorEmbedding, is_ic, rank_one_factors
from .families import BasisFamily, povm_from_bases


def orthogonalize_with_ancilla(kets, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Make ``m`` kets of C^n pairwise orthogonal inside C^(n+m).

    Coordinates ``n..n+m-1`` are the fresh directions ``f_1..f_m``. Step
    ``i`` emits ``e_i + f_i`` and subtracts ``<e_i|e_k> f_i`` from every
    later ``e_k``. The C^n part of each output equals the input ket, so
    embedded states see the original measurement. Output is unnormalized.

    The ancilla coefficients grow quickly when the kets overlap strongly;
    they stay of order one when ``sum |e_k><e_k| <= I`` (a POVM).
    """
    kets = np.atleast_2d(np.asarray(kets, dtype=complex))
    m, n = kets.shape
    rank = numerical_rank(flatten_ops(outer_products(kets)), tol)
    if rank != n * n:
        raise ValidationError(f"input projectors are not IC (rank {rank} < {n * n})")
    work = np.zeros((m, n + m), dtype=complex)
    work[:, :n] = kets
    out = np.zeros_like(work)
    for i in range(m):
        e_i = work[i].copy()
        out[i] = e_i
        out[i, n + i] += 1
        with np.errstate(over="ignore", invalid="ignore"):
            overlaps = work[i + 1:] @ e_i.conj()
        work[i + 1:, n + i] -= overlaps
    if not np.all(np.isfinite(out)):
        raise DecompositionError("ancilla coefficients overflowed; rescale the kets so sum |e><e| <= I")
    return out


def trace_balanced_extension(e_m, original_kets) -> np.ndarray:
    """Append directions ``g_j`` so every normalized ket has the same weight on C^n.

    Ket ``j`` becomes ``e'_j + x_j g_j`` in C^(n+2m) with
    ``x_j = sqrt(|e_j|^2 / t - |e'_j|^2)`` and ``t`` the smallest ratio
    ``|e_j|^2 / |e'_j|^2``.
    """
    e_m = np.atleast_2d(np.asarray(e_m, dtype=complex))
    orig = np.atleast_2d(np.asarray(original_kets, dtype=complex))
    m, width = e_m.shape
    n = width - m
    if orig.shape != (m, n):
        raise ValidationError(f"original kets must be {m}x{n}, got {orig.shape}")
    weight = np.sum(np.abs(orig) ** 2, axis=1)
    ext_sq = np.sum(np.abs(e_m) ** 2, axis=1)
    t = np.min(weight / ext_sq)
    x = np.sqrt(np.clip(weight / t - ext_sq, 0, None))
    out = np.zeros((m, n + 2 * m), dtype=complex)
    out[:, :width] = e_m
    out[np.arange(m), width + np.arange(m)] = x
    return out


def local_tomography_kets(fam: BasisFamily, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Kets ``|p_ij> (x) |i>`` in C^n (x) C^(n+1), ordered ``(i, j)``."""
    n = fam.dim
    if len(fam) != n + 1:
        raise ValidationError(f"needs an MPICM with {n + 1} bases, got {len(fam)}")
    report = is_ic(povm_from_bases(fam), tol)
    if not report.is_ic:
        raise ValidationError(f"family is not IC (rank {report.rank} < {report.required})")
    anc = np.eye(n + 1, dtype=complex)
    return np.array([np.kron(ket, anc[i]) for i, basis in enumerate(fam.bases) for ket in basis])


def local_tomography_measurement(fam: BasisFamily, tol: Tolerance = DEFAULT_TOL) -> Povm:
    """Complete rank-one projective measurement ``P_ij (x) |i><i|`` on C^(n(n+1))."""
    return Povm(outer_products(local_tomography_kets(fam, tol)), complete=True)


def local_embedding(n: int) -> TensorEmbedding:
    """``rho -> rho (x) I/(n+1)``, the embedding the local measurement is IC over."""
    return TensorEmbedding.maximally_mixed(n, n + 1)


def naimark_dilate_rank_one(povm: Povm, tol: Tolerance = DEFAULT_TOL) -> Povm:
    """Projective measurement on C^m from a complete POVM of ``m`` rank-one effects on C^n.

    The kets ``|e_k>`` are stacked as the rows of ``G``; completeness means
    ``G`` has orthonormal columns, so it extends to a unitary ``G'`` whose
    rows give the projectors. A state of C^n embedded in the first ``n``
    coordinates sees the original outcome probabilities.
    """
    g = rank_one_factors(povm)
    m, n = g.shape
    # rows of g are components of |e_k>; sum |e_k><e_k| = g^T conj(g)
    defect = float(np.abs(g.T @ g.conj() - np.eye(n)).max())
    if defect > tol.abs_eps:
        raise ValidationError(f"columns of G are not orthonormal (completeness defect {defect:.3e})")
    full = complete_to_unitary(g.conj(), tol).conj()
    return Povm(outer_products(full), complete=True)


@dataclass(frozen=True, eq=False)
class NaimarkDilation:
    """Unitary ``U`` on C^n (x) C^m with ``U(|phi>|0>) = sum_k sqrt(M_k)|phi>|k>``."""

    unitary: np.ndarray
    isometry: np.ndarray
    dim: int
    outcomes: int

    def probabilities(self, rho) -> np.ndarray:
        """Ancilla statistics after preparing ``rho (x) |0><0|`` and applying ``U``."""
        n, m = self.dim, self.outcomes
        anc = np.zeros((m, m), dtype=complex)
        anc[0, 0] = 1
        out = self.unitary @ np.kron(np.asarray(rho, dtype=complex), anc) @ dagger(self.unitary)
        blocks = out.reshape(n, m, n, m)
        return np.real(np.einsum("akak->k", blocks))

    def measurement(self) -> Povm:
        """The ancilla readout ``I (x) |k><k|`` pulled back through ``U``."""
        n, m = self.dim, self.outcomes
        eye_m = np.eye(m)
        readout = np.array([np.kron(np.eye(n), np.outer(eye_m[k], eye_m[k])) for k in range(m)])
        return Povm(dagger(self.unitary)[None] @ readout @ self.unitary[None], complete=True)


def naimark_standard(povm: Povm, tol: Tolerance = DEFAULT_TOL) -> NaimarkDilation:
    if not povm.complete or povm.completeness_defect() > tol.abs_eps:
        raise ValidationError(f"standard dilation needs a complete POVM "
                              f"(|sum M - I|_max = {povm.completeness_defect():.3e})")
    n, m = povm.dim, len(povm)
    roots = np.array([psd_sqrt(e) for e in povm.effects])
    eye_m = np.eye(m)
    iso = sum(np.kron(roots[k], eye_m[k][:, None]) for k in range(m))
    defect = float(np.abs(dagger(iso) @ iso - np.eye(n)).max())
    if defect > tol.abs_eps:
        raise ValidationError(f"isometry columns are not orthonormal (defect {defect:.3e})")
    w = complete_to_unitary(iso, tol)
    # columns for |a>|0> sit at a*m; the completion fills the rest in order
    fixed = np.arange(n) * m
    free = np.setdiff1d(np.arange(n * m), fixed)
    u = np.empty_like(w)
    u[:, fixed] = w[:, :n]
    u[:, free] = w[:, n:]
    return NaimarkDilation(unitary=u, isometry=iso, dim=n, outcomes=m)
