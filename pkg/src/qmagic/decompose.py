"""Semiclassical decompositions ``A = sum_pi P_pi (x) Q_pi`` and how to find them.

* :func:`bvn_decompose` -- Birkhoff-von Neumann for interior size 1.
* :func:`rank_one_semiclassical_test` -- exact decision for rank-one squares
  with ``s = n``; a positive answer comes with a Latin square and a basis.
* :func:`semiclassical_membership` -- numerical feasibility for general
  squares by Dykstra's alternating projections.
* :func:`purify_semiclassical` -- rewrite a semiclassical square as a matrix
  convex combination of easy quantum Latin squares.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import linalg
from .construct import assemble, easy_qls
from .errors import (
    MatchingFailed,
    NonQMSInput,
    NotDoublyStochastic,
    NotPOVM,
    PreconditionFailed,
    ShapeMismatch,
    TooLarge,
)
from .linalg import Tolerances, _tol, fnorm
from .mconv import MatrixConvexCombination, check_contraction_family, combine
from .squares import (
    LatinSquare,
    Permutation,
    QuantumMagicSquare,
    SemiclassicalDecomposition,
    all_permutations,
    classify,
    qls_to_qms,
)

log = logging.getLogger(__name__)

__all__ = [
    "SemiclassicalDecomposition",
    "Status",
    "MembershipVerdict",
    "bvn_decompose",
    "verify_semiclassical",
    "rank_one_semiclassical_test",
    "semiclassical_membership",
    "purify_semiclassical",
    "latin_square_with_permutation",
]


# ---------------------------------------------------------------------------
# Birkhoff-von Neumann

def _augment(row, support, match_col, seen) -> bool:
    for col in np.flatnonzero(support[row]):
        if seen[col]:
            continue
        seen[col] = True
        if match_col[col] < 0 or _augment(match_col[col], support, match_col, seen):
            match_col[col] = row
            return True
    return False


def _has_perfect_matching(support: np.ndarray) -> bool:
    k = support.shape[0]
    match_col = np.full(k, -1)
    return all(_augment(r, support, match_col, np.zeros(k, bool)) for r in range(k))


def _smallest_matching(support: np.ndarray) -> Optional[list[int]]:
    """Lexicographically smallest perfect matching (row -> column), or None."""
    n = support.shape[0]
    if not _has_perfect_matching(support):
        return None
    rows, cols = list(range(n)), list(range(n))
    chosen = []
    for r in range(n):
        rest_rows = rows[r + 1:]
        for c in cols:
            if not support[r, c]:
                continue
            rest_cols = [x for x in cols if x != c]
            if _has_perfect_matching(support[np.ix_(rest_rows, rest_cols)]):
                chosen.append(c)
                cols = rest_cols
                break
        else:  # pragma: no cover - cannot happen once a perfect matching exists
            return None
    return chosen


def _as_doubly_stochastic(d, tol: Tolerances) -> np.ndarray:
    if isinstance(d, QuantumMagicSquare):
        if d.s != 1:
            raise NotDoublyStochastic(f"interior size is {d.s}, expected 1")
        d = d.entries[:, :, 0, 0]
    d = np.asarray(d)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NotDoublyStochastic(f"expected a square matrix, got shape {d.shape}")
    if np.iscomplexobj(d):
        if np.max(np.abs(d.imag), initial=0.0) > tol.tol_herm:
            raise NotDoublyStochastic("entries are not real")
        d = d.real
    d = d.astype(float)
    if d.min() < -tol.tol_psd:
        raise NotDoublyStochastic(f"negative entry {d.min():.3e}")
    worst = max(np.abs(d.sum(axis=0) - 1).max(), np.abs(d.sum(axis=1) - 1).max())
    if worst > tol.tol_sum:
        raise NotDoublyStochastic(f"line sums deviate from 1 by {worst:.3e}")
    return d


def bvn_decompose(d, tol: Tolerances | None = None) -> list[tuple[float, Permutation]]:
    """Greedy Birkhoff-von Neumann decomposition of a doubly stochastic matrix.

    Repeatedly take the lexicographically smallest perfect matching on the
    positive entries and subtract its smallest matched entry.  Returns
    ``[(weight, permutation), ...]`` in extraction order.
    """
    tol = _tol(tol)
    rest = _as_doubly_stochastic(d, tol).copy()
    n = rest.shape[0]
    zero = 1e-12
    rest[rest <= zero] = 0.0
    terms = []
    while rest.max() > zero:
        match = _smallest_matching(rest > zero)
        if match is None:
            raise MatchingFailed(
                f"no perfect matching on the support after {len(terms)} terms; input outside tolerance?"
            )
        rows = np.arange(n)
        weight = float(rest[rows, match].min())
        rest[rows, match] -= weight
        rest[rest <= zero] = 0.0
        images = [0] * n
        for r, c in enumerate(match):
            images[c] = r + 1
        terms.append((weight, Permutation(tuple(images))))
    return terms


def bvn_to_decomposition(terms: list[tuple[float, Permutation]]) -> SemiclassicalDecomposition:
    """View Birkhoff-von Neumann weights as an s=1 semiclassical decomposition."""
    n = terms[0][1].n
    merged: dict[Permutation, float] = {}
    for w, p in terms:
        merged[p] = merged.get(p, 0.0) + w
    return SemiclassicalDecomposition(n, 1, tuple((p, [[w]]) for p, w in merged.items()))


# ---------------------------------------------------------------------------
# Verification

class SemiclassicalReport(NamedTuple):
    valid: bool
    residual: float
    povm_residual: float
    is_povm: bool


def verify_semiclassical(
    a: QuantumMagicSquare,
    terms: SemiclassicalDecomposition,
    tol: Tolerances | None = None,
    atol: float | None = None,
) -> SemiclassicalReport:
    """Check that ``terms`` is a POVM reproducing ``a`` cell by cell.

    ``residual`` is the worst cell error ``||A_ij - sum_{pi(j)=i} Q_pi||_F``.
    The threshold is ``tol_sum`` unless ``atol`` is given; ``atol`` applies
    to both the cell errors and the POVM sum.
    """
    tol = _tol(tol)
    if (a.n, a.s) != (terms.n, terms.s):
        raise ShapeMismatch(f"square is ({a.n}, {a.s}) but decomposition is ({terms.n}, {terms.s})")
    thr = tol.tol_sum if atol is None else atol
    rebuilt = assemble(terms).entries
    residual = float(np.max(np.linalg.norm(a.entries - rebuilt, axis=(2, 3))))
    povm = terms.povm_report(tol)
    povm_ok = povm.residuals["psd_violation"] <= tol.tol_psd and povm.residuals["sum"] <= thr * max(1, terms.s)
    return SemiclassicalReport(povm_ok and residual <= thr, residual, povm.residuals["sum"], povm_ok)


# ---------------------------------------------------------------------------
# Exact test for rank-one squares

class RankOneVerdict(NamedTuple):
    is_semiclassical: bool
    latin: Optional[LatinSquare]
    basis: Optional[np.ndarray]
    reason: str


def rank_one_semiclassical_test(a: QuantumMagicSquare, tol: Tolerances | None = None) -> RankOneVerdict:
    """Decide membership of a rank-one ``s = n`` square in the easy QLS set.

    Such a square is semiclassical exactly when all entries commute, in which
    case the first row's factors form the basis and the arrangement of the
    remaining cells is a Latin square.
    """
    tol = _tol(tol)
    info = classify(a, tol)
    if a.s != a.n or not info.is_rank_one:
        raise PreconditionFailed("input must have s = n and rank-one entries")
    n = a.n

    comm = info.residuals["commutator"]
    if comm > tol.tol_comm:
        return RankOneVerdict(False, None, None, f"entries do not commute (max commutator {comm:.3e})")

    basis = np.array([linalg.rank_one_factor(a.entries[0, k], tol) for k in range(n)])
    gram = linalg.gram_residual(basis)
    if gram > 1e-9:
        return RankOneVerdict(False, None, None, f"first-row factors are not orthonormal (Gram residual {gram:.3e})")

    projs = np.array([linalg.projector(q) for q in basis])
    cells = np.zeros((n, n), dtype=int)
    for i, j, e in a.cells():
        hits = np.flatnonzero(np.linalg.norm(projs - e, axis=(1, 2)) <= 1e-8)
        if hits.size != 1:
            return RankOneVerdict(False, None, None, f"cell ({i + 1}, {j + 1}) matches {hits.size} basis projectors")
        cells[i, j] = hits[0] + 1
    try:
        latin = LatinSquare(cells)
    except ValueError as exc:
        return RankOneVerdict(False, None, None, f"arrangement is not a Latin square: {exc}")
    return RankOneVerdict(True, latin, basis, "easy quantum Latin square")


# ---------------------------------------------------------------------------
# Numerical membership by Dykstra's alternating projections

class Status(str, enum.Enum):
    FEASIBLE = "Feasible"
    LIKELY_INFEASIBLE = "LikelyInfeasible"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class MembershipVerdict:
    status: Status
    certificate: Optional[SemiclassicalDecomposition]
    residual: float
    iterations: int
    active_permutations: int = 0


def _range_projector(m: np.ndarray, cutoff: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    keep = evecs[:, evals > cutoff]
    return keep @ keep.conj().T


def _common_range(projs: list[np.ndarray], s: int) -> np.ndarray:
    """Orthonormal columns spanning the intersection of the given ranges."""
    stacked = np.vstack([np.eye(s) - p for p in projs])
    _, sv, vh = np.linalg.svd(stacked)
    sv = np.concatenate([sv, np.zeros(s - sv.size)])
    return vh[sv <= 1e-6].conj().T


class _Problem:
    """Affine constraints ``M y = b`` on the stacked reduced variables."""

    def __init__(self, a: QuantumMagicSquare, perms: list[Permutation], frames: list[np.ndarray]):
        n, s = a.n, a.s
        self.a = a
        self.perms, self.frames = perms, frames
        self.sizes = [w.shape[1] for w in frames]
        self.offsets = np.concatenate([[0], np.cumsum([k * k for k in self.sizes])]).astype(int)
        rows = (n * n + 1) * s * s
        m = np.zeros((rows, int(self.offsets[-1])), dtype=complex)
        for idx, (perm, w) in enumerate(zip(perms, frames)):
            block = np.kron(w, w.conj())
            lo, hi = self.offsets[idx], self.offsets[idx + 1]
            for j, i in enumerate(perm.images):
                r0 = ((i - 1) * n + j) * s * s
                m[r0:r0 + s * s, lo:hi] = block
            m[n * n * s * s:, lo:hi] = block
        self.m = m
        self.b = np.concatenate([a.entries.reshape(-1), np.eye(s).reshape(-1)])
        self.split = n * n * s * s
        self.pinv = np.linalg.pinv(m, rcond=1e-10) if m.size else m.T
        self.groups: dict[int, list[int]] = {}
        for idx, k in enumerate(self.sizes):
            self.groups.setdefault(k, []).append(idx)

    def project_affine(self, y: np.ndarray) -> np.ndarray:
        return y - self.pinv @ (self.m @ y - self.b)

    def project_cone(self, y: np.ndarray) -> np.ndarray:
        out = np.empty_like(y)
        for k, idxs in self.groups.items():
            stack = np.array([y[self.offsets[i]:self.offsets[i + 1]].reshape(k, k) for i in idxs])
            proj = linalg.psd_project_batch(stack)
            for i, p in zip(idxs, proj):
                out[self.offsets[i]:self.offsets[i + 1]] = p.reshape(-1)
        return out

    def residual(self, y: np.ndarray) -> float:
        r = self.m @ y - self.b
        return max(fnorm(r[:self.split]), fnorm(r[self.split:]))

    def initial(self, count: int) -> np.ndarray:
        # Q_pi = I_s / n!, restricted to each frame
        return np.concatenate([(np.eye(k) / count).reshape(-1) for k in self.sizes]) if self.sizes else np.zeros(0)

    def blocks(self, y: np.ndarray) -> list[np.ndarray]:
        return [
            y[self.offsets[i]:self.offsets[i + 1]].reshape(k, k) for i, k in enumerate(self.sizes)
        ]

    def refine(self, y: np.ndarray, target: float, steps: int = 30) -> tuple[np.ndarray, float]:
        """Gauss-Newton on a factorisation ``Y_pi = R_pi R_pi^*`` started at ``y``.

        Each block is factored over its numerically nonzero eigen-directions,
        so the iterate stays PSD by construction while the affine residual
        is driven down.  Returns the best point found and its residual.
        """
        eig = [np.linalg.eigh(0.5 * (b + b.conj().T)) for b in self.blocks(y)]
        top = max((float(ev[-1]) for ev, _ in eig), default=0.0)
        if top <= 0:
            return y, self.residual(y)
        factors = []
        for ev, u in eig:
            sel = ev > 1e-10 * top
            factors.append(u[:, sel] * np.sqrt(ev[sel]))

        def point(fs):
            return np.concatenate([(f @ f.conj().T).reshape(-1) for f in fs])

        best_y = point(factors)
        best = self.residual(best_y)
        for _ in range(steps):
            if best <= target:
                break
            r = self.b - self.m @ best_y
            cols = []
            for idx, f in enumerate(factors):
                k, rank = f.shape
                mb = self.m[:, self.offsets[idx]:self.offsets[idx + 1]]
                for a in range(k):
                    for c in range(rank):
                        for unit in (1.0, 1j):
                            d = np.zeros((k, rank), dtype=complex)
                            d[a, c] = unit
                            cols.append(mb @ (d @ f.conj().T + f @ d.conj().T).reshape(-1))
            if not cols:
                break
            jac = np.array(cols).T
            step, *_ = np.linalg.lstsq(
                np.vstack([jac.real, jac.imag]), np.concatenate([r.real, r.imag]), rcond=1e-12
            )
            pos = 0
            trial = []
            for f in factors:
                size = f.size
                chunk = step[pos:pos + 2 * size]
                pos += 2 * size
                trial.append(f + (chunk[0::2] + 1j * chunk[1::2]).reshape(f.shape))
            trial_y = point(trial)
            res = self.residual(trial_y)
            if not res < best:
                break
            factors, best_y, best = trial, trial_y, res
        return best_y, best

    def certificate(self, y: np.ndarray, n: int, s: int) -> SemiclassicalDecomposition:
        terms = []
        for idx, (perm, w) in enumerate(zip(self.perms, self.frames)):
            k = self.sizes[idx]
            q = w @ y[self.offsets[idx]:self.offsets[idx + 1]].reshape(k, k) @ w.conj().T
            q = 0.5 * (q + q.conj().T)
            if fnorm(q) > 1e-14:
                terms.append((perm, q))
        return SemiclassicalDecomposition(n, s, tuple(terms))


def semiclassical_membership(
    a: QuantumMagicSquare,
    max_iter: int = 50_000,
    tol_feas: float | None = None,
    tol: Tolerances | None = None,
    *,
    allow_large: bool = False,
    facial_reduction: bool = True,
    stall_window: int = 500,
    refine: bool = True,
) -> MembershipVerdict:
    """Search for a POVM ``{Q_pi}`` with ``A = sum_pi P_pi (x) Q_pi``.

    Alternates the exact projection onto the affine constraints with the
    projection onto the product of PSD cones, with Dykstra's correction on
    the cone step.  With ``facial_reduction`` every ``Q_pi`` is restricted to
    the common range of the cells it contributes to, which any solution must
    respect; permutations touching a zero cell drop out entirely.

    Alternating projections converge slowly when every solution sits on the
    boundary of the cone.  With ``refine`` the PSD iterate is handed, at
    iterations 100, 200, 400, ... and on stalling, to a Gauss-Newton solve on
    a low-rank factorisation of each block; a refined point is accepted only
    if it meets ``tol_feas``, and it is PSD by construction.

    ``LikelyInfeasible`` is a numerical judgement, never a proof.
    """
    tol = _tol(tol)
    tol_feas = tol.tol_feas if tol_feas is None else tol_feas
    n, s = a.n, a.s
    if n > 6 and not allow_large:
        raise TooLarge(f"n = {n} means {math.factorial(n)} PSD blocks; pass allow_large=True to proceed")
    info = classify(a, tol)
    if not info.is_qms:
        raise NonQMSInput(f"input is not a quantum magic square (residuals {info.residuals})")

    perms = all_permutations(n)
    count = len(perms)
    if facial_reduction:
        cutoff = tol.tol_rank * max(1.0, fnorm(a.entries) / n)
        ranges = [[_range_projector(a.entries[i, j], cutoff) for j in range(n)] for i in range(n)]
        frames = [_common_range([ranges[p(j + 1) - 1][j] for j in range(n)], s) for p in perms]
    else:
        frames = [np.eye(s, dtype=complex) for _ in perms]
    keep = [k for k, w in enumerate(frames) if w.shape[1] > 0]
    problem = _Problem(a, [perms[k] for k in keep], [frames[k] for k in keep])
    log.debug("membership: n=%d s=%d, %d of %d permutations active", n, s, len(keep), count)

    if not keep:
        residual = problem.residual(np.zeros(0))
        status = Status.LIKELY_INFEASIBLE if residual >= 10 * tol_feas else Status.UNDETERMINED
        return MembershipVerdict(status, None, residual, 0, 0)

    x = problem.initial(count)
    corr = np.zeros_like(x)
    best, last_gain, next_refine = math.inf, 0, 100
    it = 0
    for it in range(1, max_iter + 1):
        y = problem.project_affine(x)
        x = problem.project_cone(y + corr)
        corr = y + corr - x
        res = problem.residual(x)
        if res < best * (1 - 1e-12):
            best, last_gain = res, it
        if res <= tol_feas:
            return MembershipVerdict(Status.FEASIBLE, problem.certificate(x, n, s), res, it, len(keep))
        stalled = it - last_gain >= stall_window
        if refine and (stalled or it == next_refine or it == max_iter):
            next_refine *= 2
            z, zres = problem.refine(x, 1e-3 * tol_feas)
            if zres <= tol_feas:
                return MembershipVerdict(Status.FEASIBLE, problem.certificate(z, n, s), zres, it, len(keep))
        if stalled:
            break
    status = Status.LIKELY_INFEASIBLE if best >= 10 * tol_feas else Status.UNDETERMINED
    log.debug("membership stopped after %d iterations, best residual %.3e", it, best)
    return MembershipVerdict(status, None, best, it, len(keep))


# ---------------------------------------------------------------------------
# Purification into easy quantum Latin squares

def latin_square_with_permutation(perm: Permutation) -> LatinSquare:
    """A Latin square whose symbol-1 cells are exactly ``(pi(j), j)``.

    Cell (i, j) holds ``((pi^{-1}(i) - j) mod n) + 1`` (0-based i, j), a
    row-relabelled cyclic square.
    """
    n = perm.n
    inv = np.array(perm.inverse().images) - 1
    i, j = np.indices((n, n))
    return LatinSquare((inv[i] - j) % n + 1)


def purify_semiclassical(
    terms: SemiclassicalDecomposition, basis=None, tol: Tolerances | None = None
) -> MatrixConvexCombination:
    """Express ``sum_pi P_pi (x) Q_pi`` as ``sum V^* B V`` over easy QLS ``B``.

    For each eigenpair ``(lam, u)`` of each ``Q_pi`` with ``lam > tol_rank``
    the contraction is ``V = v_1 c^*`` with ``c = sqrt(lam) u``; ``B`` is the
    easy QLS that puts ``v_1`` exactly on the cells of ``P_pi``.
    """
    tol = _tol(tol)
    if not terms.povm_report(tol).is_povm:
        raise NotPOVM("the terms do not form a POVM")
    n = terms.n
    basis = linalg.standard_basis(n) if basis is None else np.asarray(basis, dtype=complex)
    v1 = basis[0]
    pieces = []
    for perm, q in terms.terms:
        evals, evecs = linalg.hermitian_eig(q, tol)
        source = None
        for lam, u in zip(evals, evecs.T):
            if lam <= tol.tol_rank:
                continue
            if source is None:
                source = qls_to_qms(easy_qls(latin_square_with_permutation(perm), basis))
            c = math.sqrt(lam) * u
            pieces.append((source, np.outer(v1, c.conj())))
    return MatrixConvexCombination(terms.s, tuple(pieces))


class PurificationResiduals(NamedTuple):
    isometry: float
    reconstruction: float


def purification_residuals(
    comb: MatrixConvexCombination, target: QuantumMagicSquare, tol: Tolerances | None = None
) -> PurificationResiduals:
    """``||sum V^*V - I||_F`` and ``||sum V^* B V - A||_F`` for a purification."""
    iso = check_contraction_family(comb.contractions(), comb.t, tol).residual
    loose = Tolerances(tol_sum=max(1.0, 2 * iso))
    return PurificationResiduals(iso, combine(comb, loose).distance(target))
