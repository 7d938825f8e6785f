import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

import oracles
from qmagic import construct, linalg
from qmagic.errors import ExteriorSizeMismatch, IsometrySumViolation, NotIsometry, ShapeMismatch
from qmagic.mconv import MatrixConvexCombination, check_contraction_family, combine, compress
from qmagic.squares import LatinSquare, classify, qls_to_qms

seeds = st.integers(0, 2**31 - 1)


def contraction_family(sizes, t, seed):
    """Random ``V_i`` (``s_i x t``) with ``sum V_i^* V_i = I_t``: slice an isometry."""
    rng = np.random.default_rng(seed)
    total = sum(sizes)
    g = rng.standard_normal((total, t)) + 1j * rng.standard_normal((total, t))
    q, _ = np.linalg.qr(g)
    out, k = [], 0
    for s in sizes:
        out.append(q[k:k + s])
        k += s
    return out


def test_identity_term_echoes(bundle2):
    a = bundle2.direct_sum
    out = combine(MatrixConvexCombination(a.s, ((a, np.eye(a.s)),)))
    assert out == a


def test_rejects_bad_family(bundle2):
    a = bundle2.direct_sum
    with pytest.raises(IsometrySumViolation):
        combine(MatrixConvexCombination(2, ((a, 2 * np.eye(2)),)))


def test_rejects_mixed_exterior():
    a = construct.random_qms_exterior2(2, 0)
    b = construct.assemble(construct.random_semiclassical(3, 2, 0))
    with pytest.raises(ExteriorSizeMismatch):
        combine(MatrixConvexCombination(2, ((a, np.eye(2) / np.sqrt(2)), (b, np.eye(2) / np.sqrt(2)))))


def test_shape_checked():
    a = construct.random_qms_exterior2(2, 0)
    with pytest.raises(ShapeMismatch):
        MatrixConvexCombination(2, ((a, np.eye(3)),))


def test_compress_needs_isometry(bundle2):
    with pytest.raises(NotIsometry):
        compress(bundle2.dilation, 0.5 * bundle2.contraction)


@given(st.integers(2, 4), st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(1, 3), seeds)
def test_closure(n, sizes, t, seed):
    assume(sum(sizes) >= t)
    rng = np.random.default_rng(seed)
    sources = [construct.assemble(construct.random_semiclassical(n, s, int(rng.integers(2**31)))) for s in sizes]
    vs = contraction_family(sizes, t, seed)
    assert check_contraction_family(vs, t).valid
    out = combine(MatrixConvexCombination(t, tuple(zip(sources, vs))))
    assert classify(out).is_qms and oracles.is_qms(out.entries)


@given(st.integers(1, 4), seeds)
def test_closure_on_qls_sources(t, seed):
    q = construct.easy_qls(construct.random_latin_square(4, seed), linalg.random_haar_basis(4, seed))
    sources = [qls_to_qms(q), qls_to_qms(construct.nonclassical_qls4())]
    vs = contraction_family([4, 4], t, seed)
    out = combine(MatrixConvexCombination(t, tuple(zip(sources, vs))))
    assert oracles.is_qms(out.entries)


def test_combination_of_qpm_need_not_be_qpm():
    # symbol 1 sits on different cells of the two Latin squares
    a = qls_to_qms(construct.easy_qls(construct.example_latin_square(), np.eye(4)))
    b = qls_to_qms(construct.easy_qls(LatinSquare.cyclic(4), np.eye(4)))
    v = np.eye(4)[:, :1] / np.sqrt(2)
    out = combine(MatrixConvexCombination(1, ((a, v), (b, v))))
    c = classify(out)
    assert c.is_qms and not c.is_qpm
