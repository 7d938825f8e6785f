"""Square types and the membership classifiers.

Grids are stored entry-major: a quantum magic square of exterior size ``n``
and interior size ``s`` is an array of shape ``(n, n, s, s)``.  Grid
positions are 0-based in arrays but reported 1-based in messages, and
Latin-square symbols and permutation images are 1-based throughout.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import (
    InteriorSizeMismatch,
    InvalidLatinSquare,
    InvalidPermutation,
    InvalidQLS,
    MalformedGrid,
    NotHermitian,
    NotRankOne,
    ShapeMismatch,
)
from .linalg import Tolerances, _tol, fnorm


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}; ``images[j-1] == pi(j)``."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise InvalidPermutation(f"{images} is not a permutation of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j - 1]

    def matrix(self) -> np.ndarray:
        """Permutation matrix with ``P[i, j] = 1`` iff ``pi(j) = i``."""
        p = np.zeros((self.n, self.n))
        for j, i in enumerate(self.images):
            p[i - 1, j] = 1.0
        return p

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, i in enumerate(self.images, start=1):
            inv[i - 1] = j
        return Permutation(tuple(inv))

    def rank(self) -> int:
        """Lexicographic (Lehmer) rank, 0 for the identity."""
        rest = list(range(1, self.n + 1))
        r = 0
        for k, x in enumerate(self.images):
            idx = rest.index(x)
            r = r * (self.n - k) + idx
            rest.pop(idx)
        return r

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __str__(self):
        return "(" + " ".join(map(str, self.images)) + ")"


def all_permutations(n: int) -> list[Permutation]:
    """All of S_n in lexicographic order of the image list."""
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


@dataclass(frozen=True)
class LatinSquare:
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise InvalidLatinSquare(f"Latin square must be n x n, got shape {cells.shape}")
        if cells.size and not np.all(cells == np.round(cells)):
            raise InvalidLatinSquare("symbols must be integers")
        cells = cells.astype(int)
        n = cells.shape[0]
        symbols = list(range(1, n + 1))
        for i in range(n):
            if sorted(cells[i]) != symbols:
                raise InvalidLatinSquare(f"row {i + 1} is not a permutation of 1..{n}")
            if sorted(cells[:, i]) != symbols:
                raise InvalidLatinSquare(f"column {i + 1} is not a permutation of 1..{n}")
        object.__setattr__(self, "cells", _frozen(cells))

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    def symbol_permutation(self, k: int) -> Permutation:
        """The permutation whose matrix marks the cells holding symbol ``k``."""
        rows, cols = np.nonzero(self.cells == k)
        images = [0] * self.n
        for i, j in zip(rows, cols):
            images[j] = i + 1
        return Permutation(tuple(images))

    @classmethod
    def cyclic(cls, n: int) -> "LatinSquare":
        i, j = np.indices((n, n))
        return cls((i + j) % n + 1)

    def __eq__(self, other):
        return isinstance(other, LatinSquare) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash(self.cells.tobytes())


def is_latin_square(cells) -> bool:
    try:
        LatinSquare(cells)
    except InvalidLatinSquare:
        return False
    return True


def grid_from_nested(rows: Sequence, what: str = "grid") -> np.ndarray:
    """Turn a nested ``n x n`` list of ``s x s`` matrices into an entry array.

    Raises :class:`MalformedGrid` naming the first offending cell.
    """
    n = len(rows)
    if n == 0:
        raise MalformedGrid(f"{what} is empty")
    s = None
    out = []
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MalformedGrid(f"{what} row {i + 1} has length {len(row)}, expected {n}")
        out_row = []
        for j, cell in enumerate(row):
            m = np.asarray(cell, dtype=complex)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise MalformedGrid(f"{what} cell ({i + 1}, {j + 1}) is not a square matrix")
            if s is None:
                s = m.shape[0]
            if m.shape[0] != s:
                raise MalformedGrid(
                    f"{what} cell ({i + 1}, {j + 1}) has size {m.shape[0]}, expected {s}"
                )
            out_row.append(m)
        out.append(out_row)
    return np.array(out, dtype=complex)


@dataclass(frozen=True, eq=False)
class QuantumMagicSquare:
    """An ``n x n`` grid of ``s x s`` Hermitian matrices.

    Construction only checks the shape; whether the grid is actually a
    quantum magic square is decided by :func:`classify`.
    """

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 4 or e.shape[0] != e.shape[1] or e.shape[2] != e.shape[3] or e.shape[0] == 0:
            raise MalformedGrid(f"entries must have shape (n, n, s, s), got {e.shape}")
        object.__setattr__(self, "entries", _frozen(e))

    @classmethod
    def from_grid(cls, rows) -> "QuantumMagicSquare":
        return cls(grid_from_nested(rows))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def s(self) -> int:
        return self.entries.shape[2]

    def __getitem__(self, ij) -> np.ndarray:
        return self.entries[ij]

    def cells(self) -> Iterator[tuple[int, int, np.ndarray]]:
        for i in range(self.n):
            for j in range(self.n):
                yield i, j, self.entries[i, j]

    def transpose(self) -> "QuantumMagicSquare":
        return QuantumMagicSquare(self.entries.transpose(1, 0, 2, 3))

    def conjugate_by(self, u) -> "QuantumMagicSquare":
        u = np.asarray(u, dtype=complex)
        return QuantumMagicSquare(u.conj().T @ self.entries @ u)

    def block_matrix(self) -> np.ndarray:
        """The ``ns x ns`` matrix whose (i, j) block is ``A_ij``."""
        n, s = self.n, self.s
        return self.entries.transpose(0, 2, 1, 3).reshape(n * s, n * s)

    def distance(self, other: "QuantumMagicSquare") -> float:
        if self.entries.shape != other.entries.shape:
            raise ShapeMismatch(f"shapes {self.entries.shape} and {other.entries.shape} differ")
        return fnorm(self.entries - other.entries)

    def __eq__(self, other):
        return isinstance(other, QuantumMagicSquare) and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"QuantumMagicSquare(n={self.n}, s={self.s})"


@dataclass(frozen=True, eq=False)
class QuantumLatinSquare:
    """``n x n`` grid of unit vectors in C^n, rows and columns orthonormal bases."""

    cells: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=complex)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] == 0:
            raise InvalidQLS(f"cells must have shape (n, n, n), got {c.shape}")
        norms = np.linalg.norm(c, axis=2)
        bad = np.argwhere(np.abs(norms - 1.0) > 1e-10)
        if bad.size:
            i, j = bad[0]
            raise InvalidQLS(f"cell ({i + 1}, {j + 1}) has norm {norms[i, j]:.12g}")
        for k in range(c.shape[0]):
            if linalg.gram_residual(c[k]) > 1e-9:
                raise InvalidQLS(f"row {k + 1} is not an orthonormal basis")
            if linalg.gram_residual(c[:, k]) > 1e-9:
                raise InvalidQLS(f"column {k + 1} is not an orthonormal basis")
        object.__setattr__(self, "cells", _frozen(c))

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    def phase_fixed(self) -> "QuantumLatinSquare":
        n = self.n
        return QuantumLatinSquare(
            np.array([[linalg.fix_phase(self.cells[i, j]) for j in range(n)] for i in range(n)])
        )

    def __repr__(self):
        return f"QuantumLatinSquare(n={self.n})"


@dataclass(frozen=True)
class Classification:
    n: int
    s: int
    is_qms: bool
    is_qpm: bool
    is_commuting: bool
    is_rank_one: bool
    residuals: dict = field(default_factory=dict)

    @property
    def in_commuting_qpm(self) -> bool:
        return self.is_qpm and self.is_commuting


def _require_hermitian_entries(a: QuantumMagicSquare, tol: Tolerances) -> None:
    for i, j, e in a.cells():
        if not linalg.is_hermitian(e, tol):
            raise NotHermitian(f"entry ({i + 1}, {j + 1}) is not Hermitian")


def max_commutator(entries: np.ndarray) -> float:
    """Largest ``||[X, Y]||_F`` over all pairs of matrices in a stack."""
    flat = np.asarray(entries).reshape(-1, *entries.shape[-2:])
    worst = 0.0
    for a in range(len(flat) - 1):
        rest = flat[a + 1:]
        comm = flat[a] @ rest - rest @ flat[a]
        worst = max(worst, float(np.max(np.linalg.norm(comm, axis=(1, 2)))))
    return worst


def line_sum_residual(entries: np.ndarray) -> float:
    """Worst ``||sum - I||_F`` over all rows and columns of a grid."""
    s = entries.shape[-1]
    eye = np.eye(s)
    rows = np.linalg.norm(entries.sum(axis=1) - eye, axis=(1, 2))
    cols = np.linalg.norm(entries.sum(axis=0) - eye, axis=(1, 2))
    return float(max(rows.max(), cols.max()))


def classify(a: QuantumMagicSquare, tol: Tolerances | None = None) -> Classification:
    """Decide membership in M, P, C and R, backed by residuals.

    The commuting flag is reported on its own; membership in C is
    ``is_qpm and is_commuting``.
    """
    tol = _tol(tol)
    if not isinstance(a, QuantumMagicSquare):
        a = QuantumMagicSquare(a)
    _require_hermitian_entries(a, tol)

    psd_worst = proj_worst = ratio_worst = 0.0
    for _, _, e in a.cells():
        evals, _ = linalg.hermitian_eig(e, tol)
        psd_worst = max(psd_worst, max(0.0, -float(evals[-1])) / max(1.0, fnorm(e)))
        proj_worst = max(proj_worst, fnorm(e @ e - e))
        lam1 = float(evals[0])
        if lam1 <= tol.tol_rank:
            ratio = 1.0
        else:
            ratio = max(float(evals[1]) if evals.size > 1 else 0.0, -float(evals[-1]), 0.0) / lam1
        ratio_worst = max(ratio_worst, ratio)

    sum_res = line_sum_residual(a.entries)
    comm = max_commutator(a.entries)
    is_qms = sum_res <= tol.tol_sum * a.s and psd_worst <= tol.tol_psd
    return Classification(
        n=a.n,
        s=a.s,
        is_qms=is_qms,
        is_qpm=is_qms and proj_worst <= tol.tol_herm,
        is_commuting=comm <= tol.tol_comm,
        is_rank_one=ratio_worst <= tol.tol_rank,
        residuals={
            "line_sum": sum_res,
            "psd_violation": psd_worst,
            "projector": proj_worst,
            "commutator": comm,
            "rank_ratio": ratio_worst,
        },
    )


class PovmReport(NamedTuple):
    is_povm: bool
    is_pvm: bool
    residuals: dict


def verify_povm(elements, tol: Tolerances | None = None) -> PovmReport:
    tol = _tol(tol)
    elems = [np.asarray(e, dtype=complex) for e in elements]
    if not elems:
        raise ShapeMismatch("a POVM needs at least one element")
    shape = elems[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(e.shape != shape for e in elems):
        raise ShapeMismatch("POVM elements must be square matrices of one common size")
    s = shape[0]
    psd = max(linalg.psd_violation(e, tol) for e in elems)
    total = fnorm(sum(elems) - np.eye(s))
    proj = max(fnorm(e @ e - e) for e in elems)
    is_povm = psd <= tol.tol_psd and total <= tol.tol_sum * s
    return PovmReport(
        is_povm, is_povm and proj <= tol.tol_herm,
        {"sum": total, "psd_violation": psd, "projector": proj},
    )


def qls_to_qms(q: QuantumLatinSquare) -> QuantumMagicSquare:
    if not isinstance(q, QuantumLatinSquare):
        q = QuantumLatinSquare(q)
    c = q.cells
    return QuantumMagicSquare(c[..., :, None] * c.conj()[..., None, :])


def qms_to_qls(a: QuantumMagicSquare, tol: Tolerances | None = None) -> QuantumLatinSquare:
    """Factor every entry as ``a_ij a_ij^*`` and return the grid of factors."""
    tol = _tol(tol)
    if a.s != a.n:
        raise InteriorSizeMismatch(
            f"interior size {a.s} differs from exterior size {a.n}; "
            "rank-one factors would not be length-n vectors"
        )
    cells = np.empty((a.n, a.n, a.n), dtype=complex)
    for i, j, e in a.cells():
        try:
            cells[i, j] = linalg.rank_one_factor(e, tol)
        except NotRankOne as exc:
            raise NotRankOne(f"entry ({i + 1}, {j + 1}) is not rank one") from exc
    return QuantumLatinSquare(cells)


@dataclass(frozen=True, eq=False)
class SemiclassicalDecomposition:
    """Sparse family ``{pi: Q_pi}``; permutations not listed carry ``Q_pi = 0``.

    Terms are kept sorted by the lexicographic rank of the permutation.
    Whether the family is a POVM is checked by :meth:`povm_report`, not here.
    """

    n: int
    s: int
    terms: tuple

    def __post_init__(self):
        terms = []
        seen = set()
        for perm, q in self.terms:
            perm = perm if isinstance(perm, Permutation) else Permutation(tuple(perm))
            if perm.n != self.n:
                raise ShapeMismatch(f"permutation {perm} is not on {self.n} points")
            if perm in seen:
                raise ShapeMismatch(f"permutation {perm} listed twice")
            seen.add(perm)
            q = np.asarray(q, dtype=complex)
            if q.shape != (self.s, self.s):
                raise ShapeMismatch(f"term for {perm} has shape {q.shape}, expected {(self.s, self.s)}")
            terms.append((perm, _frozen(q)))
        terms.sort(key=lambda t: t[0].rank())
        object.__setattr__(self, "terms", tuple(terms))

    def __len__(self):
        return len(self.terms)

    def permutations(self) -> list[Permutation]:
        return [p for p, _ in self.terms]

    def povm_report(self, tol: Tolerances | None = None) -> PovmReport:
        if not self.terms:
            raise ShapeMismatch("decomposition has no terms")
        return verify_povm([q for _, q in self.terms], tol)

    def __repr__(self):
        return f"SemiclassicalDecomposition(n={self.n}, s={self.s}, terms={len(self.terms)})"
