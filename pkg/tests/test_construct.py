import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from qmagic import construct, linalg
from qmagic.errors import BadSize, BasesCommute, InteriorSizeMismatch, NotOrthonormal, NotPOVM, SizeMismatch
from qmagic.mconv import compress
from qmagic.squares import LatinSquare, QuantumMagicSquare, SemiclassicalDecomposition, classify, qls_to_qms

seeds = st.integers(0, 2**31 - 1)


class TestEasyQLS:
    def test_example_grid(self, example_qls):
        e = np.eye(4)
        assert np.array_equal(example_qls.cells[1], e[[1, 3, 0, 2]])
        assert np.array_equal(example_qls.cells[3], e[[3, 2, 1, 0]])

    def test_bad_basis(self, example_latin):
        with pytest.raises(NotOrthonormal):
            construct.easy_qls(example_latin, np.ones((4, 4)))
        with pytest.raises(SizeMismatch):
            construct.easy_qls(example_latin, np.eye(3))

    @given(st.integers(1, 6), seeds)
    def test_image_is_commuting_rank_one_qpm(self, n, seed):
        q = construct.easy_qls(construct.random_latin_square(n, seed), linalg.random_haar_basis(n, seed))
        a = qls_to_qms(q)
        assert oracles.is_qpm(a.entries) and oracles.all_commute(a.entries)
        assert oracles.is_easy_bruteforce(q)


class TestPovmLatin:
    def test_arrangement(self, cyclic3):
        povm = construct.random_povm(3, 2, 4)
        a = construct.povm_latin(cyclic3, povm)
        assert oracles.is_qms(a.entries)
        assert np.allclose(a[1, 2], povm[cyclic3.cells[1, 2] - 1])

    def test_rejects_non_povm(self, cyclic3):
        with pytest.raises(NotPOVM):
            construct.povm_latin(cyclic3, np.array([np.eye(2)] * 3))


class TestSemiclassical:
    @given(st.integers(1, 4), st.integers(1, 3), seeds)
    def test_matches_kronecker_oracle(self, n, s, seed):
        d = construct.random_semiclassical(n, s, seed)
        a = construct.semiclassical_from_decomposition(d)
        ref = oracles.kron_sum([(p.images, q) for p, q in d.terms])
        assert np.allclose(a.block_matrix(), ref, atol=1e-12)
        assert oracles.is_qms(a.entries)

    def test_rejects_non_povm(self):
        d = SemiclassicalDecomposition(2, 1, (((1, 2), [[0.7]]), ((2, 1), [[0.7]])))
        with pytest.raises(NotPOVM):
            construct.semiclassical_from_decomposition(d)


class TestCounterexample:
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_bundle(self, m):
        b = construct.build_counterexample(m)
        c = classify(b.dilation)
        assert c.is_rank_one and c.is_qpm and not c.is_commuting
        ds = classify(b.direct_sum)
        assert ds.is_qpm and not ds.is_commuting
        assert compress(b.dilation, b.contraction).distance(b.direct_sum) <= 1e-12

    def test_default_direct_sum_n4(self, bundle2):
        # standard basis for A, Fourier basis for B, cyclic Latin square
        h = np.array([[1, 1], [1, 1]]) / 2
        k = np.array([[1, -1], [-1, 1]]) / 2
        e11, e22 = np.diag([1.0, 0]), np.diag([0, 1.0])
        z = np.zeros((2, 2))
        want = np.array([
            [e11, e22, z, z],
            [e22, e11, z, z],
            [z, z, h, k],
            [z, z, k, h],
        ])
        assert np.allclose(bundle2.direct_sum.entries, want, atol=1e-15)

    def test_commuting_bases_rejected(self):
        with pytest.raises(BasesCommute):
            construct.build_counterexample(2, np.eye(2), np.eye(2)[::-1])

    def test_size_guard(self):
        with pytest.raises(BadSize):
            construct.build_counterexample(1)

    @given(st.integers(2, 4), seeds)
    def test_random_bases(self, m, seed):
        b = construct.build_counterexample(m, linalg.random_haar_basis(m, seed), linalg.random_haar_basis(m, seed + 1))
        assert compress(b.dilation, b.contraction).distance(b.direct_sum) <= 1e-12


def test_direct_sum_mismatch():
    with pytest.raises(InteriorSizeMismatch):
        construct.direct_sum(QuantumMagicSquare(np.ones((1, 1, 1, 1))), QuantumMagicSquare(np.zeros((1, 1, 2, 2))))


def test_twist_intercalate_keeps_qls(example_qls):
    # cyclic order-4 square has the intercalate rows 0,2 x cols 0,2
    base = construct.easy_qls(LatinSquare.cyclic(4), np.eye(4))
    u = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    t = construct.twist_intercalate(base, (0, 2), (0, 2), u)
    assert not oracles.is_easy_bruteforce(t)
    with pytest.raises(SizeMismatch):
        construct.twist_intercalate(base, (0, 1), (0, 1), u)


@given(st.integers(2, 7), seeds)
def test_doubly_stochastic(n, seed):
    d = construct.random_doubly_stochastic(n, seed).entries[:, :, 0, 0].real
    assert np.allclose(d.sum(0), 1) and np.allclose(d.sum(1), 1) and d.min() >= 0


@given(st.integers(1, 6), seeds)
def test_qms_exterior2(s, seed):
    a = construct.random_qms_exterior2(s, seed)
    assert oracles.is_qms(a.entries)


def test_seeded_generators_are_deterministic():
    a = construct.random_semiclassical(3, 2, 11)
    b = construct.random_semiclassical(3, 2, 11)
    assert a.permutations() == b.permutations()
    assert all(np.array_equal(x, y) for (_, x), (_, y) in zip(a.terms, b.terms))


@given(st.integers(1, 5), st.integers(1, 4), seeds)
def test_pvm_latin_commutes(n, s, seed):
    # split C^s into n orthogonal pieces, some possibly empty
    rng = np.random.default_rng(seed)
    u = linalg.random_haar_basis(s, seed)
    labels = rng.integers(0, n, size=s)
    pvm = np.array([u[labels == k].T @ u[labels == k].conj() for k in range(n)])
    a = construct.povm_latin(construct.random_latin_square(n, seed), pvm)
    assert classify(a).is_commuting and classify(a).is_qpm


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), seeds)
def test_direct_sum_closure(n1, n2, s, seed):
    a = construct.assemble(construct.random_semiclassical(n1, s, seed))
    b = construct.assemble(construct.random_semiclassical(n2, s, seed + 1))
    assert classify(construct.direct_sum(a, b)).is_qms
    p = qls_to_qms(construct.easy_qls(construct.random_latin_square(n1, seed), linalg.random_haar_basis(n1, seed)))
    q = qls_to_qms(construct.easy_qls(construct.random_latin_square(n1, seed + 1), np.eye(n1)))
    assert classify(construct.direct_sum(p, q)).is_qpm
