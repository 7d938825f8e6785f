"""Independent reference computations used to check the library.

Everything here is written directly from definitions with plain numpy
(dense Kronecker products, ``eigvalsh``, brute force over permutations)
and shares no code path with ``qmagic`` beyond the data containers.
"""
from __future__ import annotations

import itertools

import numpy as np

from qmagic import construct, linalg
from qmagic.squares import LatinSquare, QuantumLatinSquare


def perm_matrix(images) -> np.ndarray:
    """``P[i, j] = 1`` iff ``images[j] == i + 1``."""
    n = len(images)
    p = np.zeros((n, n))
    for j, i in enumerate(images):
        p[i - 1, j] = 1.0
    return p


def block(entries: np.ndarray) -> np.ndarray:
    """The ``ns x ns`` block matrix with block (i, j) = entries[i, j]."""
    n, _, s, _ = entries.shape
    return entries.transpose(0, 2, 1, 3).reshape(n * s, n * s)


def kron_sum(terms) -> np.ndarray:
    """``sum_pi P_pi (x) Q_pi`` as a dense block matrix."""
    return sum(np.kron(perm_matrix(p), q) for p, q in terms)


def is_psd(m: np.ndarray, atol: float = 1e-9) -> bool:
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() >= -atol


def is_qms(entries: np.ndarray, atol: float = 1e-9) -> bool:
    n, _, s, _ = entries.shape
    eye = np.eye(s)
    rows = all(np.abs(entries[i].sum(axis=0) - eye).max() <= atol for i in range(n))
    cols = all(np.abs(entries[:, j].sum(axis=0) - eye).max() <= atol for j in range(n))
    return rows and cols and all(is_psd(e, atol) for e in entries.reshape(-1, s, s))


def is_qpm(entries: np.ndarray, atol: float = 1e-9) -> bool:
    s = entries.shape[-1]
    flat = entries.reshape(-1, s, s)
    return is_qms(entries, atol) and all(np.abs(e @ e - e).max() <= atol for e in flat)


def all_commute(entries: np.ndarray, atol: float = 1e-9) -> bool:
    s = entries.shape[-1]
    flat = entries.reshape(-1, s, s)
    return all(np.abs(a @ b - b @ a).max() <= atol for a, b in itertools.combinations(flat, 2))


def ranks(entries: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    s = entries.shape[-1]
    return np.array([np.linalg.matrix_rank(e, tol=atol) for e in entries.reshape(-1, s, s)])


def outer_grid(cells: np.ndarray) -> np.ndarray:
    return np.einsum("ija,ijb->ijab", cells, cells.conj())


def is_latin(cells) -> bool:
    c = np.asarray(cells)
    n = c.shape[0]
    want = set(range(1, n + 1))
    return all(set(r) == want for r in c) and all(set(col) == want for col in c.T)


def same_ray(u, v, atol: float = 1e-9) -> bool:
    return abs(abs(np.vdot(u, v)) - 1.0) <= atol


def is_easy_bruteforce(q: QuantumLatinSquare, atol: float = 1e-8) -> bool:
    """Easy iff every cell is, up to phase, one of the first row's vectors."""
    c = q.cells
    row = c[0]
    for cell in c.reshape(-1, c.shape[-1]):
        if sum(same_ray(cell, r, atol) for r in row) != 1:
            return False
    return True


# -- hand-built quantum Latin squares that are not easy --------------------

LATIN5_INTERCALATE = [
    [1, 2, 3, 4, 5],
    [2, 1, 4, 5, 3],
    [3, 4, 5, 1, 2],
    [4, 5, 2, 3, 1],
    [5, 3, 1, 2, 4],
]


def _unitary2(theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s * np.exp(1j * phi)], [s, c * np.exp(1j * phi)]])


def non_easy_family() -> list[QuantumLatinSquare]:
    """Ten non-easy QLS of orders 4 and 5."""
    out = [construct.nonclassical_qls4()]
    for seed in range(3):
        out.append(construct.nonclassical_qls4(linalg.random_haar_basis(4, 100 + seed)))
    # order 4: twist an intercalate of the cyclic square (rows 0,2 cols 0,2)
    for seed, theta in enumerate([0.3, 0.7, 1.1]):
        base = construct.easy_qls(LatinSquare.cyclic(4), linalg.random_haar_basis(4, 200 + seed))
        out.append(construct.twist_intercalate(base, (0, 2), (0, 2), _unitary2(theta, 0.4 * seed)))
    # order 5: twist the rows 0,1 / cols 0,1 intercalate
    for seed, theta in enumerate([0.5, 0.9, 1.3]):
        base = construct.easy_qls(LatinSquare(LATIN5_INTERCALATE), linalg.random_haar_basis(5, 300 + seed))
        out.append(construct.twist_intercalate(base, (0, 1), (0, 1), _unitary2(theta, 0.2 + seed)))
    return out
