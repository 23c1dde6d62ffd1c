"""POVM data model and informational-completeness tests."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, ValidationError
from .linalg import (DEFAULT_TOL, Tolerance, dagger, flatten_ops, numerical_rank,
                     outer_products)

PSD_EPS = 1e-10


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered effects ``(m, n, n)`` on C^n.

    ``complete`` marks whether the effects sum to the identity; incomplete
    POVMs are allowed and simply lose the complementary outcome.
    """

    effects: np.ndarray
    complete: bool = True
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        effects = np.array(self.effects, dtype=complex)
        if effects.ndim != 3 or effects.shape[1] != effects.shape[2] or effects.shape[0] == 0:
            raise ValidationError(f"effects must have shape (m, n, n) with m >= 1, got {effects.shape}")
        if not np.all(np.isfinite(effects)):
            raise ValidationError("effects contain NaN or Inf")
        effects.setflags(write=False)
        object.__setattr__(self, "effects", effects)
        if self.check:
            self.validate()

    def validate(self, tol: Tolerance = DEFAULT_TOL):
        e = self.effects
        herm = np.abs(e - dagger(e)).max()
        if herm > tol.abs_eps:
            raise ValidationError(f"effects are not Hermitian (max defect {herm:.3e})")
        lowest = np.linalg.eigvalsh(e).min()
        if lowest < -PSD_EPS:
            raise ValidationError(f"effect is not PSD (smallest eigenvalue {lowest:.3e})")
        if self.complete:
            defect = self.completeness_defect()
            if defect > tol.abs_eps:
                raise ValidationError(f"effects flagged complete but |sum M - I|_max = {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self) -> int:
        return self.effects.shape[0]

    def completeness_defect(self) -> float:
        return float(np.abs(self.effects.sum(axis=0) - np.eye(self.dim)).max())

    def permuted(self, order) -> "Povm":
        return Povm(self.effects[list(order)], self.complete, check=False)


@dataclass(frozen=True)
class IcReport:
    rank: int
    required: int
    is_ic: bool
    effect_count: int


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal kets (rows) spanning a subspace D of the ambient space.

    States on C^d are embedded as ``V rho V^dag`` with ``V = kets.T``;
    effects are compressed as ``V^dag M V``.
    """

    kets: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        kets = np.atleast_2d(np.array(self.kets, dtype=complex))
        gram = kets.conj() @ kets.T
        defect = np.abs(gram - np.eye(len(kets))).max()
        if defect > self.tol.abs_eps:
            raise ValidationError(f"subspace kets are not orthonormal (defect {defect:.3e})")
        kets.setflags(write=False)
        object.__setattr__(self, "kets", kets)

    @classmethod
    def natural(cls, d: int, ambient: int) -> "SubspaceBasis":
        """C^d as the first ``d`` coordinates of C^ambient."""
        if not 1 <= d <= ambient:
            raise ValidationError(f"cannot embed C^{d} in C^{ambient}")
        return cls(np.eye(ambient, dtype=complex)[:d])

    @property
    def dim(self) -> int:
        return self.kets.shape[0]

    @property
    def dim_ambient(self) -> int:
        return self.kets.shape[1]

    def projector(self) -> np.ndarray:
        return self.kets.T @ self.kets.conj()

    def compress(self, ops: np.ndarray) -> np.ndarray:
        return self.kets.conj() @ ops @ self.kets.T

    def embed(self, rho: np.ndarray) -> np.ndarray:
        return self.kets.T @ rho @ self.kets.conj()


@dataclass(frozen=True, eq=False)
class TensorEmbedding:
    """C^d embedded in C^d (x) C^k as ``rho (x) ancilla``.

    This is the embedding the local ``P_ij (x) |i><i|`` measurement uses,
    with the maximally mixed ancilla. Effects pull back by a partial trace
    against the ancilla state.
    """

    dim: int
    ancilla: np.ndarray

    def __post_init__(self):
        anc = np.array(self.ancilla, dtype=complex)
        if anc.ndim != 2 or anc.shape[0] != anc.shape[1]:
            raise ValidationError("ancilla state must be a square matrix")
        if abs(np.trace(anc) - 1) > 1e-10:
            raise ValidationError("ancilla state must have unit trace")
        anc.setflags(write=False)
        object.__setattr__(self, "ancilla", anc)

    @classmethod
    def maximally_mixed(cls, d: int, k: int) -> "TensorEmbedding":
        return cls(d, np.eye(k, dtype=complex) / k)

    @property
    def dim_ambient(self) -> int:
        return self.dim * self.ancilla.shape[0]

    def compress(self, ops: np.ndarray) -> np.ndarray:
        d, k = self.dim, self.ancilla.shape[0]
        ops = np.asarray(ops, dtype=complex)
        lead = ops.shape[:-2]
        blocks = ops.reshape(*lead, d, k, d, k)
        return np.einsum("...aibj,ji->...ab", blocks, self.ancilla)

    def embed(self, rho: np.ndarray) -> np.ndarray:
        return np.kron(rho, self.ancilla)


def rank_one_povm(kets, complete: bool = False, normalize: bool = True) -> Povm:
    """POVM of projectors ``|k><k|`` onto the given kets (rows)."""
    kets = np.atleast_2d(np.asarray(kets, dtype=complex))
    if normalize:
        norms = np.linalg.norm(kets, axis=1)
        if np.any(norms == 0):
            raise ValidationError("cannot normalize a zero ket")
        kets = kets / norms[:, None]
    return Povm(outer_products(kets), complete=complete)


def build_effect_matrix(povm: Povm | np.ndarray) -> np.ndarray:
    """The ``m x n^2`` matrix whose row ``i`` is effect ``i`` flattened row-major."""
    effects = povm.effects if isinstance(povm, Povm) else np.asarray(povm)
    return flatten_ops(effects)


def _report(effects: np.ndarray, d: int, tol: Tolerance) -> IcReport:
    rank = numerical_rank(flatten_ops(effects), tol)
    return IcReport(rank=rank, required=d * d, is_ic=rank == d * d, effect_count=len(effects))


def is_ic(povm: Povm, tol: Tolerance = DEFAULT_TOL) -> IcReport:
    """Informational completeness via the rank of the flattened effects."""
    return _report(povm.effects, povm.dim, tol)


def _check_embedding(povm: Povm, embedding):
    if embedding.dim_ambient != povm.dim:
        raise ValidationError(
            f"embedding targets C^{embedding.dim_ambient} but the POVM acts on C^{povm.dim}")


def compressed_effects(povm: Povm, embedding) -> np.ndarray:
    """Effects as seen by states of the embedded space."""
    _check_embedding(povm, embedding)
    return embedding.compress(povm.effects)


def is_ic_over_subspace(povm: Povm, d_basis, tol: Tolerance = DEFAULT_TOL) -> IcReport:
    """Rank test on the compressed effects; ``required`` is ``d^2``."""
    return _report(compressed_effects(povm, d_basis), d_basis.dim, tol)


def complete_povm(povm: Povm) -> Povm:
    """Rescale an incomplete POVM by its largest total eigenvalue and append the complement.

    A positive rescaling keeps the rank of the original effects. The
    complement is omitted when it vanishes.
    """
    total = povm.effects.sum(axis=0)
    top = np.linalg.eigvalsh(total).max()
    if top <= 0:
        raise ValidationError("POVM effects sum to zero")
    scaled = povm.effects / top
    rest = np.eye(povm.dim) - scaled.sum(axis=0)
    if np.abs(rest).max() <= 1e-12:
        return Povm(scaled, complete=True)
    return Povm(np.concatenate([scaled, rest[None]]), complete=True)


def compress_ic_over_subspace(povm: Povm, d_basis, tol: Tolerance = DEFAULT_TOL) -> Povm:
    """Reduce a complete POVM that is IC over D to exactly ``d^2`` effects.

    Greedy maximal independent subset of the compressed effects; the rest
    collapse into one completing effect, which is then merged into a
    selected effect whose expansion coefficient is not -1.
    """
    if not povm.complete:
        raise ValidationError("compress_ic_over_subspace needs a complete POVM")
    blocks = compressed_effects(povm, d_basis)
    d = d_basis.dim
    report = _report(blocks, d, tol)
    if not report.is_ic:
        raise ValidationError(f"POVM is not IC over D (rank {report.rank} < {report.required})")
    flat = flatten_ops(blocks)
    selected: list[int] = []
    for i in range(len(flat)):
        if numerical_rank(flat[selected + [i]], tol) > len(selected):
            selected.append(i)
        if len(selected) == d * d:
            break
    chosen = povm.effects[selected]
    leftover = np.eye(povm.dim) - chosen.sum(axis=0)
    target = flatten_ops(d_basis.compress(leftover[None]))[0]
    coeffs, *_ = np.linalg.lstsq(flat[selected].T, target, rcond=None)
    hits = np.nonzero(np.abs(coeffs + 1) > tol.abs_eps)[0]
    if hits.size == 0:
        raise InvariantViolation("every expansion coefficient of the completing effect equals -1")
    merged = chosen.copy()
    merged[hits[0]] = merged[hits[0]] + leftover
    return Povm(merged, complete=True)


def normalized_kets(kets) -> np.ndarray:
    kets = np.atleast_2d(np.asarray(kets, dtype=complex))
    return kets / np.linalg.norm(kets, axis=1)[:, None]


def frame_potential(kets, tol: Tolerance = DEFAULT_TOL) -> float:
    """Sum of ``|<x|y>|^2`` over all ordered pairs, diagonal included."""
    kets = np.atleast_2d(np.asarray(kets, dtype=complex))
    norms = np.linalg.norm(kets, axis=1)
    if np.abs(norms - 1).max() > tol.abs_eps:
        raise ValidationError("frame potential needs unit-norm kets")
    gram = kets.conj() @ kets.T
    return float(np.sum(np.abs(gram) ** 2))


def rank_one_factors(povm: Povm, ratio: float = 1e-8) -> np.ndarray:
    """Kets ``|e_k>`` with ``M_k = |e_k><e_k|`` (top eigenpair of each effect).

    An effect counts as rank one when its second eigenvalue is at most
    ``ratio`` times its largest.
    """
    w, v = np.linalg.eigh(povm.effects)
    top = w[:, -1]
    if povm.dim > 1:
        second = w[:, -2]
        bad = np.nonzero(second > ratio * np.maximum(top, 0))[0]
        if bad.size:
            raise ValidationError(f"effect {bad[0]} is not rank one (eigenvalues {top[bad[0]]:.3e}, "
                                  f"{second[bad[0]]:.3e})")
    return v[:, :, -1] * np.sqrt(np.clip(top, 0, None))[:, None]


def povm_frame_potential(povm: Povm) -> float:
    """Frame potential of the normalized kets behind a rank-one POVM."""
    return frame_potential(normalized_kets(rank_one_factors(povm)))


@dataclass(frozen=True)
class TraceBalance:
    balanced: bool
    averages: np.ndarray


def trace_balance_check(povm: Povm, d_basis, tol: Tolerance = DEFAULT_TOL) -> TraceBalance:
    """Average outcome probability of each effect over uniformly weighted states of D.

    The unitarily invariant average state of D is ``Pi_D / d``, so the
    average is ``Tr(compressed M_i) / d``.
    """
    blocks = compressed_effects(povm, d_basis)
    averages = np.real(np.trace(blocks, axis1=1, axis2=2)) / d_basis.dim
    balanced = bool(np.ptp(averages) <= tol.abs_eps)
    return TraceBalance(balanced, averages)


def trace_optimal_check(povm: Povm, d_basis, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Balanced, and the outcome probabilities of every state of D sum to one."""
    if not trace_balance_check(povm, d_basis, tol).balanced:
        return False
    total = compressed_effects(povm, d_basis).sum(axis=0)
    return bool(np.abs(total - np.eye(d_basis.dim)).max() <= tol.abs_eps)


def full_space(n: int) -> SubspaceBasis:
    return SubspaceBasis.natural(n, n)


def canonical_ic_set(n: int) -> Povm:
    """The ``n^2`` rank-one operators built from ``|s>``, ``|j>+|k>`` and ``|j>+i|k>``.

    Not complete: the operators sum to ``n`` times something other than I.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    eye = np.eye(n, dtype=complex)
    kets = [eye[s] for s in range(n)]
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    kets += [(eye[j] + eye[k]) / np.sqrt(2) for j, k in pairs]
    kets += [(eye[j] + 1j * eye[k]) / np.sqrt(2) for j, k in pairs]
    return Povm(outer_products(np.array(kets)), complete=False)
