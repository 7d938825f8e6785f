"""Matrix convex combinations ``sum_i V_i^* A^(i) V_i`` of quantum magic squares.

The contraction is applied to every cell separately.  Sources may have
different interior sizes ``s_i``; each ``V_i`` is ``s_i x t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ExteriorSizeMismatch, IsometrySumViolation, NotIsometry, ShapeMismatch
from .linalg import Tolerances, _tol, fnorm
from .squares import QuantumMagicSquare


@dataclass(frozen=True, eq=False)
class MatrixConvexCombination:
    t: int
    terms: tuple  # of (QuantumMagicSquare, V)

    def __post_init__(self):
        terms = []
        for source, v in self.terms:
            v = np.asarray(v, dtype=complex)
            if v.ndim == 1:
                v = v[:, None]
            if v.shape != (source.s, self.t):
                raise ShapeMismatch(
                    f"contraction of shape {v.shape} does not map C^{self.t} into C^{source.s}"
                )
            terms.append((source, v))
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def n(self) -> int:
        return self.terms[0][0].n if self.terms else 0

    def contractions(self) -> list[np.ndarray]:
        return [v for _, v in self.terms]


class ContractionReport(NamedTuple):
    valid: bool
    residual: float


def check_contraction_family(vs: Sequence, t: int, tol: Tolerances | None = None) -> ContractionReport:
    """Residual ``||sum_i V_i^* V_i - I_t||_F`` and whether it is within ``tol_sum``."""
    tol = _tol(tol)
    total = np.zeros((t, t), dtype=complex)
    for v in vs:
        v = np.asarray(v, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[1] != t:
            raise ShapeMismatch(f"contraction of shape {v.shape} does not have {t} columns")
        total += v.conj().T @ v
    residual = fnorm(total - np.eye(t))
    return ContractionReport(residual <= tol.tol_sum, residual)


def _apply(source: QuantumMagicSquare, v: np.ndarray) -> np.ndarray:
    return v.conj().T @ source.entries @ v


def combine(c: MatrixConvexCombination, tol: Tolerances | None = None) -> QuantumMagicSquare:
    if not c.terms:
        raise ShapeMismatch("combination has no terms")
    ns = {source.n for source, _ in c.terms}
    if len(ns) != 1:
        raise ExteriorSizeMismatch(f"sources have different exterior sizes {sorted(ns)}")
    report = check_contraction_family(c.contractions(), c.t, tol)
    if not report.valid:
        raise IsometrySumViolation(f"sum of V^*V differs from the identity by {report.residual:.3e}")
    out = _apply(*c.terms[0])
    for source, v in c.terms[1:]:
        out = out + _apply(source, v)
    return QuantumMagicSquare(out)


def compress(a: QuantumMagicSquare, v, tol: Tolerances | None = None) -> QuantumMagicSquare:
    """Single-term combination ``V^* A V`` for an isometry ``V``."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] != a.s:
        raise ShapeMismatch(f"contraction of shape {v.shape} does not act on C^{a.s}")
    if not check_contraction_family([v], v.shape[1], tol).valid:
        raise NotIsometry("V^*V is not the identity")
    return QuantumMagicSquare(_apply(a, v))
