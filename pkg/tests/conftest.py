import numpy as np
import pytest

from icmkit.measurement import Povm


def random_povm(n, m, seed, rank=None):
    """Complete POVM with ``m`` random effects, made complete by S^{-1/2} congruence."""
    rng = np.random.default_rng(seed)
    rank = n if rank is None else rank
    a = rng.standard_normal((m, n, rank)) + 1j * rng.standard_normal((m, n, rank))
    raw = a @ a.conj().transpose(0, 2, 1)
    w, v = np.linalg.eigh(raw.sum(axis=0))
    s = (v / np.sqrt(w)) @ v.conj().T
    eff = s[None] @ raw @ s[None]
    eff = (eff + eff.conj().transpose(0, 2, 1)) / 2
    return Povm(eff, complete=True)


def symmetric_rank_one_completion(kets):
    """Kets ``S^{-1/2}|k>`` with ``S = sum |k><k|``: a complete rank-one POVM."""
    kets = np.asarray(kets, dtype=complex)
    s = kets.T @ kets.conj()
    w, v = np.linalg.eigh(s)
    inv_root = (v / np.sqrt(w)) @ v.conj().T
    # row k of the output is the component vector of S^{-1/2}|k>
    return kets @ inv_root.T


def hermitian_basis(n):
    """Orthonormal basis of n x n Hermitian matrices (HS inner product)."""
    out = []
    for j in range(n):
        e = np.zeros((n, n), complex)
        e[j, j] = 1
        out.append(e)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), complex)
            e[j, k] = e[k, j] = 1 / np.sqrt(2)
            out.append(e)
            f = np.zeros((n, n), complex)
            f[j, k], f[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            out.append(f)
    return np.array(out)


def oracle_ic_rank(effects):
    """Rank of the real map rho -> (Tr M_i rho) in a Hermitian basis, numpy default cutoff."""
    effects = np.asarray(effects)
    basis = hermitian_basis(effects.shape[1])
    table = np.real(np.einsum("mij,kji->mk", effects, basis))
    return int(np.linalg.matrix_rank(table))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
