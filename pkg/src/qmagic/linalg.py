"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  A *basis* is a
2-D array whose rows are the basis vectors, so ``basis[k]`` is the
(k+1)-th vector.

The eigensolver is a cyclic complex Jacobi method.  It is exact enough at the
sizes we care about (n, s <= 64) and is deterministic.  For the hot loop of
the membership solver there is a batched LAPACK variant
(:func:`psd_project_batch`); the two are cross-checked in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DependentInput, NonSquare, NotHermitian, NotRankOne, ShapeMismatch


@dataclass(frozen=True)
class Tolerances:
    """Residual thresholds shared by all classifiers and checks.

    Relative checks scale by ``max(1, ||A||_F)`` so the zero matrix is handled.
    """

    tol_herm: float = 1e-9
    tol_psd: float = 1e-9
    tol_sum: float = 1e-9
    tol_rank: float = 1e-9
    tol_comm: float = 1e-9
    tol_feas: float = 1e-7

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{f.name} must be strictly positive, got {value!r}")

    def scaled(self, factor: float) -> "Tolerances":
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})


DEFAULT_TOL = Tolerances()


def _tol(tol: Tolerances | None) -> Tolerances:
    return DEFAULT_TOL if tol is None else tol


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def fnorm(a) -> float:
    return float(np.linalg.norm(a))


def hermitian_residual(a: np.ndarray) -> float:
    return fnorm(a - a.conj().T)


def is_hermitian(a, tol: Tolerances | None = None) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return hermitian_residual(a) <= _tol(tol).tol_herm * max(1.0, fnorm(a))


def _require_hermitian(a, tol: Tolerances | None) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"matrix of shape {a.shape} is not square")
    if not is_hermitian(a, tol):
        raise NotHermitian(f"Hermitian residual {hermitian_residual(a):.3e} exceeds tolerance")
    return a


def fix_phase(v) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive.

    Among entries tied in magnitude (to 1e-12 relative) the first one wins.
    """
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    top = mags.max() if v.size else 0.0
    if top == 0.0:
        return v.copy()
    k = int(np.flatnonzero(mags >= top * (1 - 1e-12))[0])
    return v * (np.conj(v[k]) / mags[k])


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    # 2x2 unitary G with G^* [[app, apq], [conj(apq), aqq]] G diagonal
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * math.atan2(2.0 * r, app - aqq)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [np.conj(phase) * s, np.conj(phase) * c]], dtype=complex)


def _jacobi(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    u = np.eye(n, dtype=complex)
    scale = max(fnorm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = fnorm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                g = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                u[:, idx] = u[:, idx] @ g
    return np.diag(a).real.copy(), u


def _canonical_order(evals: np.ndarray, evecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = evals.size
    evecs = np.column_stack([fix_phase(evecs[:, k]) for k in range(n)]) if n else evecs
    order = sorted(range(n), key=lambda k: -evals[k])
    tie = 1e-12 * max(1.0, float(np.max(np.abs(evals))) if n else 1.0)

    def vec_key(k):
        v = np.round(evecs[:, k], 12)
        return tuple(x for z in v for x in (-z.real, -z.imag))

    result, i = [], 0
    while i < n:
        j = i + 1
        while j < n and evals[order[i]] - evals[order[j]] <= tie:
            j += 1
        result.extend(sorted(order[i:j], key=vec_key))
        i = j
    return evals[result], evecs[:, result]


def hermitian_eig(a, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``A = U diag(lam) U^*`` of a Hermitian matrix.

    Eigenvalues come back in descending order; each eigenvector column has
    the fixed phase convention applied, and ties are broken by the
    lexicographic order of the (phase-fixed) eigenvectors.
    """
    a = _require_hermitian(a, tol)
    evals, evecs = _jacobi(a.copy())
    return _canonical_order(evals, evecs)


class PSDWitness(NamedTuple):
    is_psd: bool
    min_eigenvalue: float
    eigenvector: np.ndarray


def psd_check(a, tol: Tolerances | None = None) -> PSDWitness:
    tol = _tol(tol)
    a = _require_hermitian(a, tol)
    evals, evecs = hermitian_eig(a, tol)
    lam = float(evals[-1])
    return PSDWitness(lam >= -tol.tol_psd * max(1.0, fnorm(a)), lam, evecs[:, -1])


def psd_violation(a, tol: Tolerances | None = None) -> float:
    """Relative amount by which ``a`` fails to be PSD (0 when it is PSD)."""
    a = _require_hermitian(a, tol)
    lam = float(hermitian_eig(a, tol)[0][-1])
    return max(0.0, -lam) / max(1.0, fnorm(a))


def psd_project(a, tol: Tolerances | None = None) -> np.ndarray:
    """Frobenius-nearest PSD matrix: clip negative eigenvalues to zero."""
    a = _require_hermitian(a, tol)
    evals, evecs = hermitian_eig(a, tol)
    out = (evecs * np.maximum(evals, 0.0)) @ evecs.conj().T
    return 0.5 * (out + out.conj().T)


def psd_project_batch(stack: np.ndarray) -> np.ndarray:
    """PSD projection of a stack ``(k, s, s)`` of Hermitian matrices (LAPACK)."""
    herm = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))
    evals, evecs = np.linalg.eigh(herm)
    out = (evecs * np.maximum(evals, 0.0)[..., None, :]) @ np.conj(np.swapaxes(evecs, -1, -2))
    return 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))


def orthonormalize(vectors: Sequence) -> np.ndarray:
    """Gram-Schmidt (two passes) on the rows of ``vectors``."""
    vs = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if vs.shape[0] == 0:
        return vs.copy()
    if vs.shape[0] > vs.shape[1] or np.linalg.svd(vs, compute_uv=False)[-1] <= 1e-10:
        raise DependentInput("input vectors are linearly dependent")
    out = np.zeros_like(vs)
    for k, v in enumerate(vs):
        w = v.copy()
        for _ in range(2):
            w = w - out[:k].T @ (out[:k].conj() @ w)
        out[k] = w / np.linalg.norm(w)
    return out


def gram_residual(vectors) -> float:
    vs = np.atleast_2d(np.asarray(vectors, dtype=complex))
    return fnorm(vs.conj() @ vs.T - np.eye(vs.shape[0]))


def kron(p, q) -> np.ndarray:
    return np.kron(np.asarray(p, dtype=complex), np.asarray(q, dtype=complex))


def commutator_norm(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return fnorm(a @ b - b @ a)


def rank_one_factor(a, tol: Tolerances | None = None) -> np.ndarray:
    """Return ``x`` with ``x x^* = a`` for a rank-one PSD matrix ``a``."""
    tol = _tol(tol)
    evals, evecs = hermitian_eig(a, tol)
    lam1 = float(evals[0])
    lam2 = float(evals[1]) if evals.size > 1 else 0.0
    if lam1 <= tol.tol_rank or lam2 > tol.tol_rank * lam1 or evals[-1] < -tol.tol_rank * lam1:
        raise NotRankOne(f"eigenvalues {evals[:2]} are not rank one")
    return fix_phase(math.sqrt(lam1) * evecs[:, 0])


def random_haar_basis(n: int, seed: int) -> np.ndarray:
    """Haar-random orthonormal basis of C^n, rows are the vectors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    return orthonormalize(z)


def standard_basis(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def fourier_basis(n: int) -> np.ndarray:
    """Rows ``w_k[j] = exp(2 pi i j k / n) / sqrt(n)``."""
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / math.sqrt(n)


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())
