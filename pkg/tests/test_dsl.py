import itertools
from pathlib import Path

import numpy as np
import pytest

from gaussex import category, dsl, extgauss
from gaussex.errors import BadQuery, DimensionMismatch, ModelSyntaxError, NotComplementary, ScopeError
from gaussex.linalg import Subspace, subspace_equal

from conftest import R, SIGMA2

MODELS = Path(__file__).resolve().parent.parent / "models"

RESISTOR = "i ~ R\nv = 0.5*i + e\ne ~ N(0, 0.0625)"

INLINE = [
    "",
    "x ~ N(0, 1); output x",
    RESISTOR,
    RESISTOR + "\noutput v, i",
    "x ~ R^3\noutput x",
    "x ~ N([1, 2], [[2, 0.5], [0.5, 1]])\ny = x[0] - x[1]\noutput y",
    "input u\ny = -u + 2\noutput y",
    "input u : 3\ny = u[0] + u[1] * 2 - u[2] / 4\noutput y",
    "a ~ N(0, 1)\nb ~ N(a, 1)\nobserve b == 0.5\noutput a",
    "a ~ N(0, 1)\nb ~ N(0, 1)\nobserve a == b\noutput a",
    "x ~ N(0, 1)\nmarginal x\nform precision",
    "x ~ N(0, 1)\nform covariance",
    'x ~ N(0, 1)\nevent "tail": x in [1.96, inf]',
    "x ~ N(0, 1)\nevent x in [-inf, 0]",
    "x ~ N(0, 4)\npushforward 2 * (x - 1)",
    "x ~ N(0, 1)\ny = (x + 1) * 3\noutput y, x",
    "x ~ N(0, 1e-3)\ny = x * 2.5e2\noutput y",
    "x ~ R\ny ~ R\nobserve x + y == 1\noutput x, y",
    "v ~ N([0, 0], [[1, 0], [0, 1]])\nw = [v[1], v[0]]\noutput w",
    "input a; input b : 2\nc = a + b[1]\noutput c",
    "x ~ N(-1, 1) # trailing comment\noutput x",
]

CORPUS = INLINE + [p.read_text() for p in sorted(MODELS.rglob("*.gx"))]


def state_of(source: str):
    return dsl.elaborate(dsl.parse(source)).result


def test_corpus_size():
    assert len(CORPUS) >= 30


class TestParse:
    def test_resistor(self):
        m = dsl.parse(RESISTOR)
        assert [type(s) for s in m.statements] == [dsl.Sample, dsl.Assign, dsl.Sample]
        assert m.declarations == ("i", "v", "e")
        assert m.statements[0].dist == dsl.Flat(1)

    def test_empty(self):
        m = dsl.parse("")
        assert m.statements == () and m.queries == ()

    def test_truncated(self):
        with pytest.raises(ModelSyntaxError) as info:
            dsl.parse("v = ")
        d = info.value.diagnostics[0]
        assert (d.span.line, d.span.col) == (1, 5) and d.severity == "error"

    @pytest.mark.parametrize("bad", ["x ~", "x ~ N(0)", "observe x", "x = 1 +* 2", "output", "x ~ R^0.5", "event x in [0]"])
    def test_syntax_errors(self, bad):
        with pytest.raises(ModelSyntaxError):
            dsl.parse(bad)

    def test_whitespace_insensitive(self):
        assert dsl.parse("x~N( 0 ,1 )\n\n  output   x") == dsl.parse("x ~ N(0, 1)\noutput x")

    @pytest.mark.parametrize("source", CORPUS)
    def test_round_trip(self, source):
        m = dsl.parse(source)
        text = dsl.print_model(m)
        assert dsl.parse(text) == m
        assert dsl.print_model(dsl.parse(text)) == text


class TestElaborate:
    def test_resistor(self):
        el = dsl.elaborate(dsl.parse(RESISTOR + "\noutput i, v"))
        chi = el.result.noise
        assert subspace_equal(chi.fibre, Subspace.span([1.0, R]))
        law = extgauss.pushforward([[-R, 1.0]], chi)
        assert np.allclose(law.cov, [[SIGMA2]]) and np.allclose(law.mean, 0)

    def test_observed_voltage(self):
        el = dsl.elaborate(dsl.parse((MODELS / "resistor_observe.gx").read_text()))
        chi = el.result.noise
        assert chi.is_closed and np.allclose(chi.mean, [2.0]) and np.allclose(chi.cov, [[0.25]])

    def test_strict_interconnect_agrees(self):
        source = (MODELS / "resistor_observe.gx").read_text()
        a = dsl.elaborate(dsl.parse(source)).result
        b = dsl.elaborate(dsl.parse(source), strict_interconnect=True).result
        assert category.distance(a, b) < 1e-10

    def test_strict_interconnect_rejects_overlap(self):
        m = dsl.parse("a ~ N(0, 1)\nb ~ N(0, 1)\nobserve a == b\noutput a")
        assert np.allclose(dsl.elaborate(m).result.noise.cov, [[0.5]])
        with pytest.raises(NotComplementary):
            dsl.elaborate(m, strict_interconnect=True)

    def test_standard_normal(self):
        st = state_of("x ~ N(0,1); output x")
        assert extgauss.equals(st.noise, extgauss.normal([0.0], [[1.0]]))

    def test_default_outputs(self):
        el = dsl.elaborate(dsl.parse(RESISTOR))
        assert el.outputs == ("i", "v", "e")

    def test_inputs_give_morphism(self):
        el = dsl.elaborate(dsl.parse((MODELS / "corpus" / "05_scale.gx").read_text()))
        assert el.result.dom_dim == 1
        assert np.allclose(el.result.matrix, [[3.0]]) and np.allclose(el.result.noise.mean, [-1.0])

    def test_off_support_warning(self):
        el = dsl.elaborate(dsl.parse("x ~ N(0, 0)\nobserve x == 1\noutput x"))
        assert any(d.severity == "warning" for d in el.diagnostics)

    def test_permuted_statements(self):
        lines = ["a ~ N(1, 2)", "b ~ R", "c = a + b", "d ~ N(0, 0.5)", "e = a - d"]
        reference = state_of("\n".join(lines) + "\noutput a, b, c, d, e")
        for perm in itertools.islice(itertools.permutations(lines), 0, None, 7):
            st = state_of("\n".join(perm) + "\noutput a, b, c, d, e")
            assert category.distance(st, reference) < 1e-10

    @pytest.mark.parametrize(
        "source, error",
        [
            ("y = x + 1", ScopeError),
            ("x ~ N(0, 1)\nx ~ N(0, 1)", ScopeError),
            ("x = y\ny = x", ScopeError),
            ("x ~ N(0, 1)\noutput z", ScopeError),
            ("x ~ N([0, 0], 1)", DimensionMismatch),
            ("x ~ R^2\ny = x + [1, 2, 3]", DimensionMismatch),
            ("x ~ N(0, 1)\ny = x * x", DimensionMismatch),
        ],
    )
    def test_errors(self, source, error):
        with pytest.raises(error) as info:
            dsl.elaborate(dsl.parse(source))
        assert info.value.diagnostics


class TestQueries:
    def el(self):
        return dsl.elaborate(dsl.parse((MODELS / "resistor.gx").read_text()))

    def test_resistor_queries(self):
        el = self.el()
        out = [dsl.run_query(el, q) for q in el.model.queries]
        assert out[0]["result"]["fibre_dim"] == 1 and out[1]["result"]["fibre_dim"] == 1
        assert out[2]["result"]["fibre_dim"] == 0
        assert np.allclose(out[2]["result"]["cov"], [[SIGMA2]]) and np.allclose(out[2]["result"]["mean"], [0])
        assert out[3]["probability"] == pytest.approx(0.5, abs=1e-12)
        assert out[3]["label"] == "v above R i"

    def test_event_below(self):
        el = dsl.elaborate(dsl.parse(RESISTOR + "\nevent v - 0.5*i in [-inf, 0]"))
        assert dsl.run_query(el, el.model.queries[0])["probability"] == pytest.approx(0.5, abs=1e-12)

    def test_bad_queries(self):
        el = dsl.elaborate(dsl.parse(RESISTOR + "\nmarginal w"))
        with pytest.raises(BadQuery):
            dsl.run_query(el, el.model.queries[0])
        el = dsl.elaborate(dsl.parse(RESISTOR + "\nevent i in [0, 1]"))
        with pytest.raises(BadQuery):
            dsl.run_query(el, el.model.queries[0])
        el = dsl.elaborate(dsl.parse("input u\ny = u\nmarginal y"))
        with pytest.raises(BadQuery):
            dsl.run_query(el, el.model.queries[0])
