"""Passing between MPICM families and partitions of a unitary operator basis into commuting groups."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConstructionError, ValidationError
from ..linalg import DEFAULT_TOL, Tolerance, common_eigenbasis, dagger, flatten_ops, numerical_rank, outer_products
from ..measurement import is_ic
from .families import BasisFamily, povm_from_bases


@dataclass(frozen=True, eq=False)
class UnitaryPartition:
    """``groups[g]`` holds ``n - 1`` pairwise commuting unitaries; the identity is implicit."""

    groups: np.ndarray

    def __post_init__(self):
        groups = np.array(self.groups, dtype=complex)
        if groups.ndim != 4 or groups.shape[2] != groups.shape[3]:
            raise ValidationError(f"groups must have shape (g, n-1, n, n), got {groups.shape}")
        n = groups.shape[2]
        if groups.shape[1] != n - 1:
            raise ValidationError(f"each group needs n-1 = {n - 1} members, got {groups.shape[1]}")
        groups.setflags(write=False)
        object.__setattr__(self, "groups", groups)

    @property
    def dim(self) -> int:
        return self.groups.shape[2]

    def unitarity_defect(self) -> float:
        u = self.groups
        return float(np.abs(u @ dagger(u) - np.eye(self.dim)).max()) if u.size else 0.0

    def commutator_defect(self) -> float:
        worst = 0.0
        for group in self.groups:
            for a in range(len(group)):
                for b in range(a + 1, len(group)):
                    x, y = group[a], group[b]
                    worst = max(worst, float(np.abs(x @ y - y @ x).max()))
        return worst

    def operators(self) -> np.ndarray:
        """``{I}`` followed by every group member, group-major."""
        return np.concatenate([np.eye(self.dim, dtype=complex)[None],
                               self.groups.reshape(-1, self.dim, self.dim)])

    def span_rank(self, tol: Tolerance = DEFAULT_TOL) -> int:
        return numerical_rank(flatten_ops(self.operators()), tol)


def basis_unitaries(basis: np.ndarray) -> np.ndarray:
    """``U_k = sum_j omega^(jk) |p_j><p_j|`` for ``k = 1..n-1``, ``omega = exp(2 pi i / n)``."""
    basis = np.asarray(basis, dtype=complex)
    n = basis.shape[0]
    proj = outer_products(basis)
    phases = np.exp(2j * np.pi * np.outer(np.arange(1, n), np.arange(n)) / n)
    return np.einsum("kj,jab->kab", phases, proj)


def unitary_partition_from_mpicm(fam: BasisFamily, tol: Tolerance = DEFAULT_TOL) -> UnitaryPartition:
    n = fam.dim
    if len(fam) != n + 1:
        raise ValidationError(f"an MPICM of C^{n} has {n + 1} bases, got {len(fam)}")
    report = is_ic(povm_from_bases(fam), tol)
    if not report.is_ic:
        raise ValidationError(f"family is not IC (rank {report.rank} < {report.required})")
    return UnitaryPartition(np.array([basis_unitaries(b) for b in fam.bases]))


def mpicm_from_unitary_partition(part: UnitaryPartition, tol: Tolerance = DEFAULT_TOL,
                                 seed: int = 0) -> BasisFamily:
    """One common eigenbasis per group; each basis' projectors span the same space as ``{I} + group``."""
    n = part.dim
    eye = np.eye(n, dtype=complex)
    bases = []
    for g, group in enumerate(part.groups):
        ops = np.concatenate([eye[None], group])
        kets = common_eigenbasis(ops, tol, seed=seed + g)
        proj = flatten_ops(outer_products(kets))
        joint = numerical_rank(np.vstack([proj, flatten_ops(ops)]), tol)
        if joint != numerical_rank(proj, tol) or joint != numerical_rank(flatten_ops(ops), tol):
            raise ConstructionError(f"group {g}: projector span differs from operator span")
        bases.append(kets)
    return BasisFamily(np.array(bases))


def clock_and_shift_partition(p: int) -> UnitaryPartition:
    """Groups ``{Z^k}`` and ``{(X Z^m)^k}`` for prime ``p``: the Weyl-Heisenberg partition."""
    w = np.exp(2j * np.pi / p)
    z = np.diag(w ** np.arange(p))
    x = np.roll(np.eye(p), 1, axis=0)
    gens = [z] + [x @ np.linalg.matrix_power(z, m) for m in range(p)]
    return UnitaryPartition(np.array([[np.linalg.matrix_power(g, k) for k in range(1, p)] for g in gens]))
