"""Complete rank-one IC POVMs with ``n^2`` equal-trace effects, and tensor products of POVMs."""
from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from ..errors import ValidationError
from ..linalg import outer_products
from ..measurement import Povm
from .families import is_prime, prime_factors

DEFAULT_X = {2: 1 + 2j}
DEFAULT_X_ODD = 2.0


def default_x(p: int) -> complex:
    return DEFAULT_X.get(p, DEFAULT_X_ODD)


def _check_x(p: int, x: complex, eps: float = 1e-12):
    x = complex(x)
    if p == 2:
        if abs(x.imag) <= eps:
            raise ValidationError(f"n=2 needs non-real x, got {x}")
        if abs(x.real) <= eps:
            raise ValidationError(f"n=2 needs x off the imaginary axis (x and its conjugate "
                                  f"give dependent off-diagonal parts), got {x}")
        if abs(abs(x) - 1) <= eps:
            raise ValidationError(f"n=2 needs |x| != 1, got {x}")
        return
    if abs(x.imag) > eps:
        raise ValidationError(f"odd prime n needs real x, got {x}")
    for bad in (1.0, -1.0, 1 - p / 2):
        if abs(x.real - bad) <= eps:
            raise ValidationError(f"x must avoid 1, -1 and 1 - n/2 = {1 - p / 2} for n={p}, got {x.real}")


def prime_rank_one_kets(p: int, x: complex) -> np.ndarray:
    """``|e_lj> = c * sum_k a_lk w^(jk) |k>`` with ``a_lk = x`` if ``l == k`` else 1.

    Rows are ordered ``(l, j)`` with ``l`` major. The kets have equal norm
    ``1/sqrt(p)`` and their outer products sum to the identity.
    """
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    _check_x(p, x)
    x = complex(x) if p == 2 else float(np.real(x))
    w = np.exp(2j * np.pi / p)
    k = np.arange(p)
    a = np.ones((p, p), dtype=complex)
    np.fill_diagonal(a, x)
    phases = w ** np.outer(k, k)  # phases[j, k] = w^(jk)
    kets = (a[:, None, :] * phases[None, :, :]).reshape(p * p, p)
    return kets / np.sqrt(p * abs(x) ** 2 + p * p - p)


def rank_one_ic_kets(n: int, x=None) -> np.ndarray:
    """Kets of :func:`rank_one_ic_povm`.

    For composite ``n``, ``x`` is ``None`` or one value per prime factor
    (ascending, with multiplicity); factors are combined by Kronecker product.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    factors = prime_factors(n)
    if x is None:
        xs = [default_x(p) for p in factors]
    elif np.ndim(x) == 0:
        if len(factors) > 1:
            raise ValidationError(f"n={n} is composite; pass one x per prime factor {factors}")
        xs = [x]
    else:
        xs = list(x)
        if len(xs) != len(factors):
            raise ValidationError(f"need {len(factors)} x values for prime factors {factors}, got {len(xs)}")
    parts = [prime_rank_one_kets(p, xp) for p, xp in zip(factors, xs)]
    return reduce(lambda a, b: np.einsum("ai,bj->abij", a, b).reshape(len(a) * len(b), -1), parts)


def rank_one_ic_povm(n: int, x=None) -> Povm:
    """Complete IC POVM of ``n^2`` rank-one effects, each of trace ``1/n``."""
    return Povm(outer_products(rank_one_ic_kets(n, x)), complete=True)


def diagonal_rescale_kets(kets, b) -> np.ndarray:
    """Multiply component ``j`` of every ket by ``b[j]``."""
    kets = np.atleast_2d(np.asarray(kets, dtype=complex))
    b = np.asarray(b, dtype=complex)
    if b.shape != (kets.shape[1],):
        raise ValidationError(f"need {kets.shape[1]} scale factors, got shape {b.shape}")
    if np.any(b == 0):
        raise ValidationError("scale factors must be nonzero")
    return kets * b


def tensor_povm(parts) -> Povm:
    """All Kronecker products taking one effect per part; the first part varies slowest."""
    parts = list(parts)
    if not parts:
        raise ValidationError("tensor_povm needs at least one part")
    effects = [reduce(np.kron, combo) for combo in itertools.product(*(p.effects for p in parts))]
    return Povm(np.array(effects), complete=all(p.complete for p in parts))
