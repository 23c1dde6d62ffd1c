"""Simulated state tomography: Born-rule probabilities, sampling, linear inversion."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .linalg import DEFAULT_TOL, Tolerance, dagger, flatten_ops, hermitize, numerical_rank
from .measurement import Povm, compressed_effects


@dataclass(frozen=True, eq=False)
class DensityState:
    """Hermitian, PSD, unit-trace matrix. ``check=False`` skips the PSD and
    trace checks, for raw estimates that need not be physical."""

    matrix: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValidationError(f"density matrix must be square, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValidationError("density matrix contains NaN or Inf")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        if not self.check:
            return
        eps = self.tol.abs_eps
        if np.abs(rho - dagger(rho)).max() > eps:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > eps:
            raise ValidationError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
        if np.linalg.eigvalsh(hermitize(rho)).min() < -eps:
            raise ValidationError("density matrix is not PSD")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityState":
        return cls(np.eye(n, dtype=complex) / n)


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: np.ndarray
    shots: Optional[int] = None


@dataclass(frozen=True)
class TomographyReport:
    """``hs_error`` and ``trace_error`` are ``None`` when no reference state was given."""

    estimate: DensityState
    residual: float
    shots: Optional[int] = None
    hs_error: Optional[float] = None
    trace_error: Optional[float] = None


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityState) else np.asarray(rho, dtype=complex)


def random_density(n: int, rank: Optional[int] = None, seed: int = 0) -> DensityState:
    """``A A^dag / Tr(A A^dag)`` with ``A`` an ``n x rank`` complex Gaussian matrix."""
    rank = n if rank is None else rank
    if not 1 <= rank <= n:
        raise ValidationError(f"rank must satisfy 1 <= rank <= {n}, got {rank}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = a @ a.conj().T
    return DensityState(hermitize(rho / np.trace(rho).real))


def probabilities(povm: Povm, rho, tol: Tolerance = DEFAULT_TOL) -> OutcomeDistribution:
    """``p_i = Re Tr(M_i rho)``; values within ``abs_eps`` below zero are clamped."""
    rho = _matrix(rho)
    if rho.shape != (povm.dim, povm.dim):
        raise ValidationError(f"state is {rho.shape[0]}-dimensional, POVM acts on C^{povm.dim}")
    p = np.real(np.einsum("mij,ji->m", povm.effects, rho))
    p = np.where((p < 0) & (p >= -tol.abs_eps), 0.0, p)
    return OutcomeDistribution(p)


def sample_outcomes(povm: Povm, rho, shots: int, seed: int) -> OutcomeDistribution:
    """Multinomial frequencies. An incomplete POVM gets a hidden complement outcome,
    so its probabilities must not sum past one."""
    if shots <= 0:
        raise ValidationError(f"shots must be positive, got {shots}")
    p = np.clip(probabilities(povm, rho).probs, 0, None)
    if povm.complete:
        p = p / p.sum()
    else:
        if p.sum() > 1 + 1e-9:
            raise ValidationError(f"outcome probabilities sum to {p.sum():.6g} > 1; the effects are not "
                                  "a sub-normalized measurement (complete it first)")
        p = np.append(p, max(0.0, 1.0 - p.sum()))
    counts = np.random.default_rng(seed).multinomial(shots, p)
    if not povm.complete:
        counts = counts[:-1]
    return OutcomeDistribution(counts / shots, shots=shots)


def project_to_psd(rho: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and renormalize the trace."""
    w, v = np.linalg.eigh(hermitize(rho))
    w = np.clip(w, 0, None)
    if w.sum() <= 0:
        raise ValidationError("estimate has no positive part")
    return (v * (w / w.sum())) @ dagger(v)


def reconstruct(povm: Povm, dist: OutcomeDistribution, project_psd: bool = False, embedding=None,
                tol: Tolerance = DEFAULT_TOL) -> TomographyReport:
    """Least-squares linear inversion of ``Tr(M_i rho) = p_i``.

    With ``embedding``, the state is reconstructed on the embedded space
    from the compressed effects.
    """
    effects = povm.effects if embedding is None else compressed_effects(povm, embedding)
    d = effects.shape[1]
    probs = np.asarray(dist.probs, dtype=float)
    if probs.shape != (len(effects),):
        raise ValidationError(f"{probs.size} probabilities for {len(effects)} effects")
    mbar = flatten_ops(effects)
    rank = numerical_rank(mbar, tol)
    if rank != d * d:
        raise ValidationError(f"POVM is not IC: rank {rank} < {d * d} (deficit {d * d - rank})")
    # Tr(M rho) = flat(M) . flat(rho^T)
    x, *_ = np.linalg.lstsq(mbar, probs.astype(complex), rcond=None)
    residual = float(np.linalg.norm(mbar @ x - probs))
    rho = hermitize(x.reshape(d, d).T)
    rho = rho / np.trace(rho).real
    if project_psd:
        rho = project_to_psd(rho)
    return TomographyReport(estimate=DensityState(rho, check=project_psd), residual=residual, shots=dist.shots)


def hs_distance(a, b) -> float:
    return float(np.linalg.norm(_matrix(a) - _matrix(b)))


def trace_distance(a, b) -> float:
    return float(0.5 * np.abs(np.linalg.eigvalsh(hermitize(_matrix(a) - _matrix(b)))).sum())


def run_experiment(povm: Povm, rho: DensityState, shots: Optional[int] = None, seed: int = 0,
                   project_psd: Optional[bool] = None, embedding=None,
                   tol: Tolerance = DEFAULT_TOL) -> TomographyReport:
    """Measure ``rho`` (exactly or with ``shots`` samples), reconstruct, and score.

    PSD projection defaults to on for sampled data and off for exact data.
    """
    if project_psd is None:
        project_psd = shots is not None
    state = rho.matrix if embedding is None else embedding.embed(rho.matrix)
    if shots is None:
        dist = probabilities(povm, state, tol)
    else:
        dist = sample_outcomes(povm, state, shots, seed)
    report = reconstruct(povm, dist, project_psd=project_psd, embedding=embedding, tol=tol)
    est = report.estimate.matrix
    return TomographyReport(estimate=report.estimate, residual=report.residual, shots=shots,
                            hs_error=hs_distance(est, rho), trace_error=trace_distance(est, rho))
