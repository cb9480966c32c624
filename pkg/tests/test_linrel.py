import numpy as np
import pytest
from hypothesis import given

from gaussex import linrel
from gaussex.errors import DimensionMismatch, NotSurjective, NotTotal
from gaussex.linalg import Subspace, subspace_equal
from gaussex.linrel import CopartialMap
from gaussex.testing import random_linrel

from conftest import R, seeds


class TestFromPairs:
    def test_graph(self):
        pairs = np.array([[1.0, 2.0], [R, 2 * R]])
        rel = linrel.relation_from_pairs(pairs, 1)
        assert np.allclose(rel.matrix, [[R]]) and rel.fibre.dim == 0

    def test_resistor_read_as_function_of_v(self):
        # {(V, I) : V = R I}, spanned by (R, 1)
        rel = linrel.relation_from_pairs(np.array([[R], [1.0]]), 1)
        assert np.allclose(rel.matrix, [[1 / R]]) and rel.fibre.dim == 0

    def test_full_relation(self):
        rel = linrel.relation_from_pairs(np.eye(2), 1)
        assert np.allclose(rel.matrix, 0) and rel.fibre.is_full

    def test_not_total(self):
        with pytest.raises(NotTotal):
            linrel.relation_from_pairs(np.array([[0.0], [1.0]]), 1)


class TestCompose:
    def test_graphs_compose(self):
        f, g = linrel.graph([[2.0, 1.0]]), linrel.graph([[3.0], [1.0]])
        assert linrel.equals(linrel.compose(f, g), linrel.graph(np.array([[3.0], [1.0]]) @ [[2.0, 1.0]]))

    def test_uninformative_state_absorbs(self):
        # surjective maps send the uninformative state to the uninformative state
        out = linrel.compose(linrel.uninformative(3), linrel.graph([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]]))
        assert out.fibre.is_full
        # otherwise the fibre is the image
        out = linrel.compose(linrel.uninformative(2), linrel.graph([[1.0, 2.0], [0.0, 1.0], [1.0, 1.0]]))
        assert out.fibre.dim == 2

    def test_resistor_collapses(self):
        state = linrel.state(Subspace.span([1.0, R]))  # (I, V) with V = R I
        out = linrel.compose(state, linrel.graph([[-R, 1.0]]))
        assert out.fibre.dim == 0 and out.cod_dim == 1

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linrel.compose(linrel.identity(2), linrel.identity(3))

    @given(seeds)
    def test_normal_form_vs_cospan(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (int(x) for x in rng.integers(0, 6, size=3))
        r1, r2 = random_linrel(rng, a, b), random_linrel(rng, b, c)
        direct = linrel.compose(r1, r2)
        via = linrel.from_cospan(linrel.compose_cospan(linrel.to_cospan(r1), linrel.to_cospan(r2)))
        assert linrel.distance(direct, via) < 1e-8

    @given(seeds)
    def test_totality_preserved(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (int(x) for x in rng.integers(0, 5, size=3))
        r = linrel.compose(random_linrel(rng, a, b), random_linrel(rng, b, c))
        x = rng.standard_normal(a)
        assert linrel.contains_pair(r, x, r.matrix @ x)


class TestCospans:
    def test_graph_round_trip(self):
        f = linrel.graph([[1.0, 2.0]])
        c = linrel.to_cospan(f)
        assert linrel.equals(linrel.from_cospan(c), f)

    def test_uninformative_into_point(self):
        c = linrel.to_cospan(linrel.uninformative(1))
        assert c.q.shape == (0, 1)

    def test_resistor_kernel_map(self):
        c = linrel.to_cospan(linrel.state(Subspace.span([1.0, R])))
        q = c.q / c.q[0, 0]
        assert np.allclose(q, [[1.0, -1 / R]]) or np.allclose(q * -R, [[-R, 1.0]])

    def test_not_surjective(self):
        with pytest.raises(NotSurjective):
            CopartialMap(np.zeros((1, 1)), np.zeros((1, 2)))

    def test_compose_identity(self):
        i = linrel.to_cospan(linrel.identity(2))
        assert linrel.equals(linrel.from_cospan(linrel.compose_cospan(i, i)), linrel.identity(2))

    def test_total_collapse(self):
        c1 = CopartialMap(np.array([[1.0, 0.0]]), np.eye(1))
        c2 = CopartialMap(np.zeros((0, 1)), np.zeros((0, 0)))
        out = linrel.compose_cospan(c1, c2)
        assert out.f.shape[0] == 0


class TestTensor:
    def test_identity(self):
        assert linrel.equals(linrel.tensor(linrel.identity(1), linrel.identity(2)), linrel.identity(3))

    def test_state_with_point(self):
        t = linrel.tensor(linrel.uninformative(1), linrel.state(Subspace.zero(1)))
        assert subspace_equal(t.fibre, Subspace.span([1.0, 0.0]))

    @given(seeds)
    def test_membership(self, seed):
        rng = np.random.default_rng(seed)
        r1, r2 = random_linrel(rng, 2, 2), random_linrel(rng, 1, 2)
        t = linrel.tensor(r1, r2)
        x1, x2 = rng.standard_normal(2), rng.standard_normal(1)
        y1 = r1.matrix @ x1 + r1.fibre.basis @ rng.standard_normal(r1.fibre.dim)
        y2 = r2.matrix @ x2 + r2.fibre.basis @ rng.standard_normal(r2.fibre.dim)
        assert linrel.contains_pair(t, np.concatenate([x1, x2]), np.concatenate([y1, y2]))
        if t.fibre.dim < 4:
            off = np.ones(4) - t.fibre.projector @ np.ones(4)
            bad = np.concatenate([y1, y2]) + off / np.linalg.norm(off) if np.linalg.norm(off) > 1e-6 else None
            if bad is not None:
                assert not linrel.contains_pair(t, np.concatenate([x1, x2]), bad)


@given(seeds)
def test_markov_axioms(seed):
    rng = np.random.default_rng(seed)
    m, n = (int(x) for x in rng.integers(0, 4, size=2))
    r = random_linrel(rng, m, n)
    assert linrel.equals(linrel.compose(r, linrel.discard(n)), linrel.discard(m))
    swapped = linrel.compose(linrel.copy(n), linrel.swap(n, n))
    assert linrel.equals(swapped, linrel.copy(n))
    left = linrel.compose(linrel.copy(n), linrel.tensor(linrel.copy(n), linrel.identity(n)))
    right = linrel.compose(linrel.copy(n), linrel.tensor(linrel.identity(n), linrel.copy(n)))
    assert linrel.equals(left, right)
