"""Constructions of quantum Latin squares and quantum magic squares.

Bases are 2-D arrays with the basis vectors as rows.  All random generators
take an explicit integer seed and are deterministic for that seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadSize, BasesCommute, InteriorSizeMismatch, NotOrthonormal, NotPOVM, SizeMismatch
from .linalg import Tolerances, _tol
from .squares import (
    LatinSquare,
    Permutation,
    QuantumLatinSquare,
    QuantumMagicSquare,
    SemiclassicalDecomposition,
    qls_to_qms,
    verify_povm,
)


def _basis(basis, n: int) -> np.ndarray:
    b = np.asarray(basis, dtype=complex)
    if b.shape != (n, n):
        raise SizeMismatch(f"expected {n} vectors in C^{n}, got array of shape {b.shape}")
    if linalg.gram_residual(b) > 1e-9:
        raise NotOrthonormal(f"basis Gram residual {linalg.gram_residual(b):.3e} exceeds 1e-9")
    return b


def easy_qls(latin: LatinSquare, basis) -> QuantumLatinSquare:
    """Place ``basis[L_ij - 1]`` in cell (i, j)."""
    b = _basis(basis, latin.n)
    return QuantumLatinSquare(b[latin.cells - 1])


def povm_latin(latin: LatinSquare, povm, tol: Tolerances | None = None) -> QuantumMagicSquare:
    """Arrange the elements of one POVM according to a Latin square."""
    elems = np.asarray(povm, dtype=complex)
    if elems.ndim != 3 or elems.shape[0] != latin.n:
        raise SizeMismatch(f"need {latin.n} POVM elements, got array of shape {elems.shape}")
    if not verify_povm(elems, tol).is_povm:
        raise NotPOVM("elements do not form a POVM")
    return QuantumMagicSquare(elems[latin.cells - 1])


def semiclassical_from_decomposition(
    terms: SemiclassicalDecomposition, tol: Tolerances | None = None
) -> QuantumMagicSquare:
    """Assemble ``sum_pi P_pi (x) Q_pi`` entrywise: ``A_ij = sum_{pi(j)=i} Q_pi``."""
    if not terms.povm_report(tol).is_povm:
        raise NotPOVM("the terms do not form a POVM")
    return assemble(terms)


def assemble(terms: SemiclassicalDecomposition) -> QuantumMagicSquare:
    """Like :func:`semiclassical_from_decomposition` without the POVM check."""
    n, s = terms.n, terms.s
    out = np.zeros((n, n, s, s), dtype=complex)
    for perm, q in terms.terms:
        for j, i in enumerate(perm.images):
            out[i - 1, j] += q
    return QuantumMagicSquare(out)


def direct_sum(a: QuantumMagicSquare, b: QuantumMagicSquare) -> QuantumMagicSquare:
    if a.s != b.s:
        raise InteriorSizeMismatch(f"interior sizes {a.s} and {b.s} differ")
    n1, n2, s = a.n, b.n, a.s
    out = np.zeros((n1 + n2, n1 + n2, s, s), dtype=complex)
    out[:n1, :n1] = a.entries
    out[n1:, n1:] = b.entries
    return QuantumMagicSquare(out)


@dataclass(frozen=True, eq=False)
class CounterexampleBundle:
    """A quantum Latin square that compresses onto a non-semiclassical square.

    ``dilation`` is rank one everywhere, ``direct_sum`` is ``A (+) B`` and
    ``contraction`` is the isometry ``V = (I_m; 0)`` with
    ``V^* C V = A (+) B`` cellwise.
    """

    m: int
    latin: LatinSquare
    basis_v: np.ndarray
    basis_w: np.ndarray
    a: QuantumMagicSquare
    b: QuantumMagicSquare
    direct_sum: QuantumMagicSquare
    dilation: QuantumMagicSquare
    contraction: np.ndarray

    @property
    def n(self) -> int:
        return 2 * self.m


def build_counterexample(m: int, basis_v=None, basis_w=None, tol: Tolerances | None = None) -> CounterexampleBundle:
    """Build ``A (+) B`` and its rank-one dilation for exterior size ``2m``.

    Defaults: ``v`` is the standard basis and ``w`` the discrete Fourier
    basis of C^m, which never commute in the required sense for m >= 2.
    The Latin square is the cyclic one, ``L_ij = ((i + j - 2) mod m) + 1``.
    """
    tol = _tol(tol)
    if m < 2:
        raise BadSize(f"half size m must be >= 2, got {m}")
    v = _basis(linalg.standard_basis(m) if basis_v is None else basis_v, m)
    w = _basis(linalg.fourier_basis(m) if basis_w is None else basis_w, m)
    gap = linalg.commutator_norm(linalg.projector(v[0]), linalg.projector(w[0]))
    if gap <= 10 * tol.tol_comm:
        raise BasesCommute(f"first projectors commute (commutator norm {gap:.3e})")

    n = 2 * m
    latin = LatinSquare.cyclic(m)
    a = qls_to_qms(easy_qls(latin, v))
    b = qls_to_qms(easy_qls(latin, w))

    embed_v = np.zeros((m, n), dtype=complex)
    embed_v[:, :m] = v
    embed_w = np.zeros((m, n), dtype=complex)
    embed_w[:, :m] = w
    tail = np.eye(n, dtype=complex)[m:]

    cells = np.empty((n, n, n), dtype=complex)
    idx = latin.cells - 1
    cells[:m, :m] = embed_v[idx]
    cells[:m, m:] = tail[idx]
    cells[m:, :m] = tail[idx]
    cells[m:, m:] = embed_w[idx]
    dilation = qls_to_qms(QuantumLatinSquare(cells))

    contraction = np.zeros((n, m), dtype=complex)
    contraction[:m, :m] = np.eye(m)
    return CounterexampleBundle(
        m=m, latin=latin, basis_v=v, basis_w=w, a=a, b=b,
        direct_sum=direct_sum(a, b), dilation=dilation, contraction=contraction,
    )


def twist_intercalate(q: QuantumLatinSquare, rows, cols, unitary) -> QuantumLatinSquare:
    """Re-express a 2x2 sub-Latin-square of ``q`` in a rotated basis.

    The four cells at ``rows x cols`` (0-based) must hold ``x, y / y, x``.
    They are replaced by ``u1, u2 / u2, u1`` with ``(u1, u2) = (x, y) U``
    for a 2x2 unitary ``U``; every row and column still spans the same space,
    so the result is again a quantum Latin square.
    """
    (r1, r2), (c1, c2) = rows, cols
    c = np.array(q.cells)
    x, y = c[r1, c1], c[r1, c2]
    same = lambda p, t: abs(abs(np.vdot(p, t)) - 1) < 1e-9
    if not (same(c[r2, c2], x) and same(c[r2, c1], y)):
        raise SizeMismatch("cells do not form an intercalate")
    u = np.asarray(unitary, dtype=complex)
    u1 = u[0, 0] * x + u[1, 0] * y
    u2 = u[0, 1] * x + u[1, 1] * y
    c[r1, c1] = c[r2, c2] = u1
    c[r1, c2] = c[r2, c1] = u2
    return QuantumLatinSquare(c)


# Fixed example squares.

def example_latin_square() -> LatinSquare:
    """The 4x4 Latin square with rows 1234 / 2413 / 3142 / 4321."""
    return LatinSquare([[1, 2, 3, 4], [2, 4, 1, 3], [3, 1, 4, 2], [4, 3, 2, 1]])


def nonclassical_qls4(basis=None) -> QuantumLatinSquare:
    """A 4x4 quantum Latin square with four distinct bases among its lines."""
    v = _basis(linalg.standard_basis(4) if basis is None else basis, 4)
    r2, r5 = math.sqrt(2), math.sqrt(5)
    v1, v2, v3, v4 = v
    return QuantumLatinSquare([
        [v1, v2, v3, v4],
        [(v2 - v3) / r2, (1j * v1 + 2 * v4) / r5, (2 * v1 + 1j * v4) / r5, (v2 + v3) / r2],
        [(v2 + v3) / r2, (2 * v1 + 1j * v4) / r5, (1j * v1 + 2 * v4) / r5, (v2 - v3) / r2],
        [v4, v3, v2, v1],
    ])


def rank_one_deficient_example() -> QuantumMagicSquare:
    """A 3x3 rank-one quantum magic square of interior size 2 that is not a QPM."""
    h = 0.5 * linalg.projector([1, 0])
    e2 = linalg.projector([0, 1])
    return QuantumMagicSquare(np.array([[h, h, e2], [e2, h, h], [h, e2, h]]))


# Seeded random generators.  None of them is uniform over its target set.

def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(rng.permutation(n) + 1))


def random_latin_square(n: int, seed: int) -> LatinSquare:
    """Cyclic square with shuffled rows, columns and symbols."""
    if n < 1:
        raise BadSize("n must be >= 1")
    rng = np.random.default_rng(seed)
    base = LatinSquare.cyclic(n).cells - 1
    rows, cols, syms = rng.permutation(n), rng.permutation(n), rng.permutation(n)
    return LatinSquare(syms[base[rows][:, cols]] + 1)


def random_doubly_stochastic(n: int, seed: int) -> QuantumMagicSquare:
    """Random convex combination of permutation matrices, as an s=1 square."""
    if n < 1:
        raise BadSize("n must be >= 1")
    rng = np.random.default_rng(seed)
    k = min(n * n, (n - 1) ** 2 + 1)
    weights = rng.exponential(size=k)
    weights /= weights.sum()
    d = np.zeros((n, n))
    for wgt in weights:
        d += wgt * random_permutation(n, rng).matrix()
    return QuantumMagicSquare(d[:, :, None, None].astype(complex))


def random_povm(k: int, s: int, seed: int, rank: int | None = None) -> np.ndarray:
    """``k`` PSD matrices summing to ``I_s``: ``S^{-1/2} G_i G_i^* S^{-1/2}``."""
    rng = np.random.default_rng(seed)
    r = s if rank is None else rank
    g = rng.standard_normal((k, s, r)) + 1j * rng.standard_normal((k, s, r))
    parts = g @ np.conj(np.swapaxes(g, 1, 2))
    evals, evecs = np.linalg.eigh(parts.sum(axis=0))
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.conj().T
    out = inv_sqrt @ parts @ inv_sqrt
    return 0.5 * (out + np.conj(np.swapaxes(out, 1, 2)))


def random_semiclassical(n: int, s: int, seed: int, n_terms: int | None = None) -> SemiclassicalDecomposition:
    """POVM over ``n_terms`` distinct random permutations (default ``min(n!, n + 1)``)."""
    rng = np.random.default_rng(seed)
    k = min(math.factorial(n), n + 1 if n_terms is None else n_terms)
    perms: list[Permutation] = []
    while len(perms) < k:
        p = random_permutation(n, rng)
        if p not in perms:
            perms.append(p)
    povm = random_povm(k, s, int(rng.integers(2**31)))
    return SemiclassicalDecomposition(n, s, tuple(zip(perms, povm)))


def random_qms_exterior2(s: int, seed: int) -> QuantumMagicSquare:
    """``[[A, I - A], [I - A, A]]`` with ``0 <= A <= I`` random."""
    rng = np.random.default_rng(seed)
    u = linalg.random_haar_basis(s, int(rng.integers(2**31))).T
    a = (u * rng.uniform(0.0, 1.0, size=s)) @ u.conj().T
    a = 0.5 * (a + a.conj().T)
    eye = np.eye(s)
    return QuantumMagicSquare(np.array([[a, eye - a], [eye - a, a]]))
