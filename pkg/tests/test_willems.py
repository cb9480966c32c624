import numpy as np
import pytest
from hypothesis import given

from gaussex import category, extgauss, quadratic, willems
from gaussex.errors import BadPlacement, NotComplementary, NotParallel, UnsupportedRegion
from gaussex.linalg import Subspace, subspace_equal
from gaussex.testing import random_extgauss, random_morphism
from gaussex.willems import Box, CylinderEvent, GaussianSystem, Placement

from conftest import R, SIGMA2, seeds


def voltage_source(v: float) -> GaussianSystem:
    """V fixed at v, I unconstrained, in (I, V) coordinates."""
    return GaussianSystem(extgauss.make([0.0, v], np.zeros((2, 2)), Subspace.span([1.0, 0.0])))


class TestInterconnect:
    def test_resistor_with_voltage_source(self, resistor):
        joint = willems.interconnect(GaussianSystem.from_state(resistor), voltage_source(1.0))
        assert joint.is_closed
        current = willems.eliminate(joint, [0]).dist
        assert np.allclose(current.mean, [1.0 / R]) and np.allclose(current.cov, [[SIGMA2 / R**2]])

    def test_agrees_with_precision_sum(self, resistor):
        a = willems.interconnect(GaussianSystem.from_state(resistor), voltage_source(1.0)).dist
        b = quadratic.interconnect_precision(resistor.noise, voltage_source(1.0).dist)
        assert extgauss.distance(a, b) < 1e-10

    def test_zero_resistance_is_not_complementary(self):
        short = category.name(category.make([[0.0]], extgauss.normal([0.0], [[SIGMA2]])))
        s1 = GaussianSystem.from_state(short)
        # with R = 0 the resistor fixes V and leaves I free, like the source
        assert subspace_equal(s1.fibre, Subspace.span([1.0, 0.0]))
        assert not willems.is_complementary(s1, voltage_source(1.0))
        with pytest.raises(NotComplementary):
            willems.interconnect(s1, voltage_source(1.0))

    @given(seeds)
    def test_commutative(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        s1 = GaussianSystem(random_extgauss(rng, n))
        d1 = s1.fibre.dim
        s2 = GaussianSystem(random_extgauss(rng, n, fibre_dim=n - d1 + int(rng.integers(0, d1 + 1))))
        # generic subspaces with d1 + d2 >= n span the space
        assert willems.is_complementary(s1, s2)
        a, b = willems.interconnect(s1, s2).dist, willems.interconnect(s2, s1).dist
        assert extgauss.distance(a, b) < 1e-8 * max(1.0, np.linalg.norm(a.cov))
        assert a.fibre.dim == s1.fibre.dim + s2.fibre.dim - n


class TestWeaken:
    def test_free_axes(self):
        s = GaussianSystem(extgauss.normal([1.0], [[2.0]]))
        w = willems.weaken(s, Placement(3, (1,)))
        assert subspace_equal(w.fibre, Subspace.coordinates(3, [0, 2]))
        assert np.allclose(w.dist.mean, [0, 1, 0]) and np.allclose(w.dist.cov, np.diag([0, 2, 0]))

    def test_reorders(self, resistor):
        w = willems.weaken(GaussianSystem.from_state(resistor), Placement(2, (1, 0)))
        assert subspace_equal(w.fibre, Subspace.span([R, 1.0]))

    def test_bad_placements(self):
        with pytest.raises(BadPlacement):
            Placement(2, (0, 0))
        with pytest.raises(BadPlacement):
            Placement(2, (2,))
        with pytest.raises(BadPlacement):
            willems.weaken(GaussianSystem(extgauss.normal([0.0], [[1.0]])), Placement(3, (0, 1)))


class TestCylinders:
    def test_resistor_events(self, resistor):
        s = GaussianSystem.from_state(resistor)
        law = [-R, 1.0]
        assert willems.cylinder_probability(s, CylinderEvent.interval(law, 0.0, np.inf)) == pytest.approx(0.5, abs=1e-12)
        assert willems.cylinder_probability(s, CylinderEvent.interval(law, -np.inf, np.inf)) == pytest.approx(1.0, abs=1e-12)
        sd = np.sqrt(SIGMA2)
        p = willems.cylinder_probability(s, CylinderEvent.interval(law, -sd, sd))
        assert p == pytest.approx(0.682689492137, abs=1e-9)

    def test_not_parallel(self, resistor):
        with pytest.raises(NotParallel):
            willems.cylinder_probability(GaussianSystem.from_state(resistor), CylinderEvent.interval([1.0, 0.0], 0, 1))

    def test_union_inclusion_exclusion(self):
        s = GaussianSystem(extgauss.normal([0.0], [[1.0]]))
        ev = CylinderEvent([[1.0]], (Box([-1.0], [0.5]), Box([0.0], [1.0])))
        whole = willems.cylinder_probability(s, CylinderEvent.interval([1.0], -1.0, 1.0))
        assert willems.cylinder_probability(s, ev) == pytest.approx(whole, abs=1e-12)

    def test_correlated_pair(self):
        rho = 0.6
        s = GaussianSystem(extgauss.normal([0.0, 0.0], [[1.0, rho], [rho, 1.0]]))
        ev = CylinderEvent(np.eye(2), (Box([0.0, 0.0], [np.inf, np.inf]),))
        expected = 0.25 + np.arcsin(rho) / (2 * np.pi)
        assert willems.cylinder_probability(s, ev) == pytest.approx(expected, abs=1e-8)

    def test_correlated_four_dims_unsupported(self):
        cov = np.full((4, 4), 0.5) + 0.5 * np.eye(4)
        s = GaussianSystem(extgauss.normal(np.zeros(4), cov))
        with pytest.raises(UnsupportedRegion):
            willems.cylinder_probability(s, CylinderEvent(np.eye(4), (Box(np.zeros(4), np.ones(4)),)))

    def test_mc_independent_of_workers(self):
        s = GaussianSystem(extgauss.normal([0.0, 1.0], [[1.0, 0.3], [0.3, 2.0]]))
        ev = CylinderEvent([[1.0, 1.0]], (Box([0.0], [2.0]),))
        one = willems.mc_estimate(s, ev, 50_000, seed=7, workers=1)
        four = willems.mc_estimate(s, ev, 50_000, seed=7, workers=4)
        assert one == four
        assert willems.mc_estimate(s, ev, 50_000, seed=8)[0] != one[0]

    def test_mc_agrees(self):
        s = GaussianSystem(extgauss.normal([0.0, 1.0], [[1.0, 0.3], [0.3, 2.0]]))
        ev = CylinderEvent(np.eye(2), (Box([-1.0, 0.0], [1.0, 2.0]),))
        p = willems.cylinder_probability(s, ev)
        est, se = willems.mc_estimate(s, ev, 100_000, seed=1)
        assert abs(est - p) < 4 * max(se, 1e-5)


class TestTheorem:
    @given(seeds)
    def test_name_interconnection(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (int(d) for d in rng.integers(0, 4, size=3))
        f, g = random_morphism(rng, a, b), random_morphism(rng, b, c)
        rep = willems.theorem_check(f, g)
        assert rep.complementary
        assert rep.joint_distance < 1e-8 and rep.composite_distance < 1e-8

    def test_compose_via_interconnection(self, resistor):
        f = category.make([[R]], extgauss.normal([0.0], [[SIGMA2]]))
        g = category.matrix([[2.0]])
        assert category.equals(willems.compose_via_interconnection(f, g), category.compose(g, f))
