"""Information-volume criterion for comparing sets of measurement bases."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constructions.families import BasisFamily, is_prime, mpicm_family, mub_family, random_bases
from .errors import ValidationError
from .linalg import DEFAULT_TOL, Tolerance, flatten_ops, gram_schmidt, outer_products, rank_cutoff, singular_values
from .measurement import Povm, rank_one_factors


@dataclass(frozen=True)
class VolumeReport:
    """``log10_volume`` is authoritative; ``volume`` may underflow to 0."""

    volume: float
    log10_volume: float
    operator_count: int
    per_subspace_dims: tuple


def q_operators(basis) -> np.ndarray:
    """Traceless ``|x><x| - I/n`` for every ket of ``basis``."""
    basis = np.asarray(basis, dtype=complex)
    n = basis.shape[1]
    return outer_products(basis) - np.eye(n) / n


def _volume(groups, tol: Tolerance) -> VolumeReport:
    """Orthonormalize each group of operators, stack, and multiply the singular values."""
    rows, dims = [], []
    for ops in groups:
        ortho = gram_schmidt(flatten_ops(ops), tol)
        rows.append(ortho)
        dims.append(len(ortho))
    stack = np.vstack(rows)
    s = singular_values(stack)
    count = stack.shape[0]
    if s.size < count or s[-1] <= rank_cutoff(s, stack.shape, tol):
        return VolumeReport(0.0, float("-inf"), count, tuple(dims))
    log10 = float(np.sum(np.log10(s)))
    return VolumeReport(10.0 ** log10, log10, count, tuple(dims))


def information_volume(fam: BasisFamily, tol: Tolerance = DEFAULT_TOL) -> VolumeReport:
    """Volume spanned by per-basis orthonormal frames of ``span{Q}``.

    Each basis contributes ``n - 1`` operators (its ``Q`` operators sum to
    zero, so the last one is dropped by the orthonormalization). The
    result does not depend on which orthonormal frame each span gets.
    """
    return _volume([q_operators(b) for b in fam.bases], tol)


def single_measurement_volume(povm: Povm, tol: Tolerance = DEFAULT_TOL) -> VolumeReport:
    """Volume of ``{P_k - I/m}`` (last dropped) for a complete rank-one projective measurement."""
    if not povm.complete:
        raise ValidationError("single_measurement_volume needs a complete measurement")
    kets = rank_one_factors(povm)
    gram = kets.conj() @ kets.T
    defect = float(np.abs(gram - np.eye(len(kets))).max())
    if defect > 1e-8:
        raise ValidationError(f"measurement is not projective (kets not orthonormal, defect {defect:.3e})")
    m = povm.dim
    ops = povm.effects - np.eye(m) / m
    return _volume([ops[:-1]], tol)


@dataclass(frozen=True)
class SurveyRow:
    n: int
    scheme: str
    seed: object
    report: VolumeReport


def mub_available(n: int) -> bool:
    return n in (2, 4) or (n % 2 == 1 and is_prime(n))


def mpicm_available(n: int) -> bool:
    return n in (4, 6) or (n % 2 == 0 and n >= 10)


def volume_survey(n: int, seeds, sampler: str = "haar", tol: Tolerance = DEFAULT_TOL) -> list[SurveyRow]:
    """MUB and MPICM volumes where those constructions exist, then one random family per seed."""
    rows = []
    if mub_available(n):
        rows.append(SurveyRow(n, "mub", None, information_volume(mub_family(n), tol)))
    if mpicm_available(n):
        rows.append(SurveyRow(n, "mpicm", None, information_volume(mpicm_family(n), tol)))
    for seed in seeds:
        fam = random_bases(n, n + 1, seed, sampler)
        rows.append(SurveyRow(n, "random", seed, information_volume(fam, tol)))
    return rows
