"""Families of orthonormal bases: minimal projective IC measurements, MUBs, random bases."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstructionError, ValidationError
from ..linalg import DEFAULT_TOL, Tolerance, haar_unitary_from_rng, outer_products
from ..measurement import Povm


@dataclass(frozen=True, eq=False)
class BasisFamily:
    """``bases[b, j]`` is ket ``j`` of basis ``b``; shape ``(count, n, n)``."""

    bases: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        bases = np.array(self.bases, dtype=complex)
        if bases.ndim != 3 or bases.shape[1] != bases.shape[2] or bases.shape[0] == 0:
            raise ValidationError(f"bases must have shape (count, n, n), got {bases.shape}")
        defect = orthonormality_defect(bases)
        if defect > self.tol.abs_eps:
            raise ValidationError(f"basis is not orthonormal (max |B B^dag - I| = {defect:.3e})")
        bases.setflags(write=False)
        object.__setattr__(self, "bases", bases)

    @property
    def dim(self) -> int:
        return self.bases.shape[1]

    def __len__(self) -> int:
        return self.bases.shape[0]


def orthonormality_defect(bases: np.ndarray) -> float:
    gram = np.einsum("bik,bjk->bij", bases, bases.conj())
    return float(np.abs(gram - np.eye(bases.shape[1])).max())


def povm_from_bases(fam: BasisFamily, scaled: bool = True) -> Povm:
    """Rank-one projectors of every basis, basis-major.

    With ``scaled`` each projector is divided by the number of bases, which
    makes the union a complete POVM; unscaled unions are flagged incomplete.
    """
    effects = outer_products(fam.bases.reshape(-1, fam.dim))
    if scaled:
        return Povm(effects / len(fam), complete=True)
    return Povm(effects, complete=len(fam) == 1)


def _normalized(rows) -> np.ndarray:
    rows = np.array(rows, dtype=complex)
    return rows / np.linalg.norm(rows, axis=1)[:, None]


def _ket(n: int, terms) -> np.ndarray:
    """``terms`` are ``(one_based_index, coefficient)`` pairs."""
    v = np.zeros(n, dtype=complex)
    for idx, c in terms:
        v[idx - 1] += c
    return v


def _explicit_four() -> list:
    i = 1j
    k = lambda *t: _ket(4, t)  # noqa: E731
    return [
        np.eye(4),
        [k((1, 1), (2, 1)), k((3, 1), (4, 1)),
         k((1, 1), (2, -1), (3, 1), (4, -1)), k((1, 1), (2, -1), (3, -1), (4, 1))],
        [k((1, 1), (3, 1)), k((2, 1), (4, 1)),
         k((1, 1), (3, -1), (2, i), (4, -i)), k((1, 1), (3, -1), (2, -i), (4, i))],
        [k((1, 1), (2, i)), k((3, 1), (4, i)),
         k((1, 1), (2, -i), (3, i), (4, 1)), k((1, 1), (2, -i), (3, -i), (4, -1))],
        [k((1, 1), (3, i)), k((2, 1), (4, i)),
         k((1, 1), (3, -i), (2, 1), (4, -i)), k((1, 1), (3, -i), (2, -1), (4, i))],
    ]


def _six_basis(pairs, s, phases) -> list:
    """Three pair kets ``|a> + s|b>`` plus three phased sums of ``|a> - s|b>``."""
    kets = [_ket(6, [(a, 1), (b, s)]) for a, b in pairs]
    for ph in phases:
        terms = []
        for (a, b), c in zip(pairs, ph):
            terms += [(a, c), (b, -s * c)]
        kets.append(_ket(6, terms))
    return kets


def _explicit_six() -> list:
    w = np.exp(2j * np.pi / 3)
    plain = [(1, 1, 1), (1, w, w ** 2), (1, w ** 2, w)]
    first = [(1, 1, 1j), (1, w, w ** 2 * 1j), (1, w ** 2, w * 1j)]
    p12, p13, p14 = [(1, 2), (3, 5), (4, 6)], [(1, 3), (2, 6), (4, 5)], [(1, 4), (2, 3), (5, 6)]
    return [
        np.eye(6),
        _six_basis(p12, 1, first),
        _six_basis(p13, 1, plain),
        _six_basis(p14, 1, plain),
        _six_basis(p12, 1j, plain),
        _six_basis(p13, 1j, plain),
        _six_basis(p14, 1j, plain),
    ]


def mpicm_explicit(n: int) -> BasisFamily:
    """The hand-listed minimal projective IC families for ``n = 4`` and ``n = 6``."""
    if n == 4:
        raw = _explicit_four()
    elif n == 6:
        raw = _explicit_six()
    else:
        raise ValidationError(f"explicit MPICM listings exist only for n in {{4, 6}}, got {n}")
    return BasisFamily(np.array([_normalized(b) for b in raw]))


def _pairs(r: int, i: int) -> list[tuple[int, int]]:
    """One-based coordinate pairs ``(p, q)`` of the kets with family index ``i``.

    ``i = 2k-1`` for ``k = 1..r`` and ``i = 2k`` for ``k = 1..r-1``. Where
    the case ranges overlap (``i = 2r-1``) the first case wins.
    """
    out = []
    if i % 2 == 1:
        k = (i + 1) // 2
        for j in range(1, r + 1):
            if j <= k:
                out.append((j, 2 * k + 1 - j))
            elif j <= r - 1:
                out.append((j + k, 2 * r + k - j))
            else:
                out.append((r + k, 2 * r))
    else:
        k = i // 2
        for j in range(1, r + 1):
            if j <= k:
                out.append((j, 2 * k + 2 - j))
            elif j == k + 1:
                out.append((k + 1, 2 * r))
            else:
                out.append((j + k, 2 * r + k - j + 1))
    return out


def _pair_basis(r: int, i: int, phase: complex) -> np.ndarray:
    """``{|p> + phase|q>}`` followed by the Fourier combinations of ``{|p> - phase|q>}``."""
    n = 2 * r
    omega = np.exp(2j * np.pi / r)
    pr = _pairs(r, i)
    plus = np.array([_ket(n, [(p, 1), (q, phase)]) for p, q in pr])
    minus = np.array([_ket(n, [(p, 1), (q, -phase)]) for p, q in pr])
    fourier = omega ** np.outer(np.arange(r), np.arange(r))
    return _normalized(np.vstack([plus, fourier @ minus]))


def general_family_index(i: int, n: int, reading: str = "shift") -> int:
    """Map a selected basis label ``i`` (``n <= i <= 2n-2``) to its c/d family index."""
    if reading == "shift":
        return i - n + 1
    if reading == "mod":
        return (i - 1) % (n - 1) + 1
    raise ValidationError(f"unknown index reading {reading!r}")


def _general_unchecked(n: int, reading: str = "shift") -> BasisFamily:
    r = n // 2
    q = np.exp(2j * np.pi / n)
    bases = [np.eye(n, dtype=complex)]
    bases += [_pair_basis(r, i, 1) for i in range(1, r + 1)]
    bases += [_pair_basis(r, general_family_index(i, n, reading), q)
              for i in range(3 * r - 2, 4 * r - 2)]
    bases = np.array(bases)
    defect = orthonormality_defect(bases)
    if defect > DEFAULT_TOL.abs_eps:
        raise ConstructionError(f"general construction produced a non-orthonormal basis (defect {defect:.3e})")
    return BasisFamily(bases)


def mpicm_general(n: int, reading: str = "shift") -> BasisFamily:
    """The pair/Fourier construction for even ``n >= 10``; returns ``n + 1`` bases."""
    if n % 2 or n < 10:
        raise ValidationError(f"construction not defined for n <= 8 or odd n (got n={n}); needs even n >= 10")
    return _general_unchecked(n, reading)


def mpicm_family(n: int) -> BasisFamily:
    """Whichever MPICM construction covers ``n``."""
    if n in (4, 6):
        return mpicm_explicit(n)
    return mpicm_general(n)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_factors(n: int) -> list[int]:
    """Prime factors in ascending order, with multiplicity."""
    out, f = [], 2
    while f * f <= n:
        while n % f == 0:
            out.append(f)
            n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


_MUB4 = [
    np.eye(4),
    np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, -1, 1], [1, -1, 1, -1]]) / 2,
    np.array([[1, -1, -1j, -1j], [1, -1, 1j, 1j], [1, 1, 1j, -1j], [1, 1, -1j, 1j]]) / 2,
    np.array([[1, -1j, -1j, -1], [1, -1j, 1j, 1], [1, 1j, 1j, -1], [1, 1j, -1j, 1]]) / 2,
    np.array([[1, -1j, -1, -1j], [1, -1j, 1, 1j], [1, 1j, -1, 1j], [1, 1j, 1, -1j]]) / 2,
]


def mub_family(n: int) -> BasisFamily:
    """Complete set of ``n + 1`` mutually unbiased bases (odd prime ``n``, or ``n`` in {2, 4})."""
    if n == 2:
        s = 1 / np.sqrt(2)
        return BasisFamily(np.array([np.eye(2), [[s, s], [s, -s]], [[s, 1j * s], [s, -1j * s]]]))
    if n == 4:
        return BasisFamily(np.array(_MUB4, dtype=complex))
    if n % 2 == 0 or not is_prime(n):
        raise ValidationError(f"MUB family available for odd primes and n in {{2, 4}}, got {n}")
    w = np.exp(2j * np.pi / n)
    j = np.arange(n)
    bases = [np.eye(n, dtype=complex)]
    for a in range(n):
        bases.append(np.array([w ** ((a * j * j + b * j) % n) for b in range(n)]) / np.sqrt(n))
    return BasisFamily(np.array(bases))


SAMPLERS = ("haar", "hermitian-uniform")


def _hermitian_uniform_basis(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.random((n, n)) + 1j * rng.random((n, n))
    _, v = np.linalg.eigh(a + a.conj().T)
    return v


def random_bases(n: int, count: int, seed: int, sampler: str = "haar") -> BasisFamily:
    """``count`` random orthonormal bases of C^n, reproducible per seed.

    ``haar`` takes the columns of Haar unitaries. ``hermitian-uniform``
    takes eigenbases of ``A + A^dag`` with ``A`` having independent
    uniform [0, 1) real and imaginary parts; these bases are far from
    Haar-distributed.
    """
    if sampler not in SAMPLERS:
        raise ValidationError(f"sampler must be one of {SAMPLERS}, got {sampler!r}")
    rng = np.random.default_rng(seed)
    draw = haar_unitary_from_rng if sampler == "haar" else _hermitian_uniform_basis
    return BasisFamily(np.array([draw(n, rng).T for _ in range(count)]))
