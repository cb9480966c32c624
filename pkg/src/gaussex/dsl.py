"""A small declarative language for linear-Gaussian models.

    # resistor with noisy voltage
    i ~ R
    v = 0.5*i + e
    e ~ N(0, 0.0625)
    observe v == 1.0
    output i, v

Statements: ``x ~ N(mean, cov)``, ``x ~ R`` / ``x ~ R^k`` (uninformative),
``y = affine``, ``observe a == b``, ``output x, y`` and ``input x`` /
``input x : k`` (turns the model into a morphism). Queries: ``marginal``,
``pushforward``, ``event ["label":] affine in [lo, hi]`` and
``form precision|covariance``.

Statements are separated by newlines or ``;``; newlines inside brackets are
ignored and ``#`` starts a comment. Definitions may appear in any order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import category, extgauss, quadratic, willems
from .category import GaussExMorphism
from .errors import (
    BadQuery,
    DimensionMismatch,
    GaussExError,
    Infeasible,
    ModelSyntaxError,
    NotComplementary,
    ScopeError,
)
from .linalg import Subspace, kernel, orthonormalize, pseudoinverse, subspace_sum

__all__ = [
    "Span",
    "Diagnostic",
    "Num",
    "Var",
    "Index",
    "Neg",
    "BinOp",
    "VectorLit",
    "Normal",
    "Flat",
    "Sample",
    "Assign",
    "Observe",
    "Output",
    "Input",
    "Marginal",
    "Pushforward",
    "Event",
    "Form",
    "Model",
    "Elaborated",
    "parse",
    "print_model",
    "print_expr",
    "elaborate",
    "run_query",
]


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    span: Span | None
    severity: str
    message: str

    def __str__(self):
        where = f"{self.span}: " if self.span is not None else ""
        return f"{where}{self.severity}: {self.message}"

    def to_dict(self) -> dict:
        out = {"severity": self.severity, "message": self.message}
        if self.span is not None:
            out.update(line=self.span.line, col=self.span.col)
        return out


def _loc():
    return field(default=None, compare=False, repr=False)


# Expressions


@dataclass(frozen=True)
class Num:
    value: float
    span: Span | None = _loc()


@dataclass(frozen=True)
class Var:
    name: str
    span: Span | None = _loc()


@dataclass(frozen=True)
class Index:
    name: str
    index: int
    span: Span | None = _loc()


@dataclass(frozen=True)
class Neg:
    operand: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class VectorLit:
    items: tuple
    span: Span | None = _loc()


# Distributions, statements and queries


@dataclass(frozen=True)
class Normal:
    mean: object
    cov: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class Flat:
    dim: int = 1
    span: Span | None = _loc()


@dataclass(frozen=True)
class Sample:
    name: str
    dist: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class Assign:
    name: str
    expr: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class Observe:
    lhs: object
    rhs: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class Output:
    names: tuple
    span: Span | None = _loc()


@dataclass(frozen=True)
class Input:
    name: str
    dim: int = 1
    span: Span | None = _loc()


@dataclass(frozen=True)
class Marginal:
    names: tuple
    span: Span | None = _loc()


@dataclass(frozen=True)
class Pushforward:
    expr: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class Event:
    label: str | None
    expr: object
    lower: object
    upper: object
    span: Span | None = _loc()


@dataclass(frozen=True)
class Form:
    kind: str
    span: Span | None = _loc()


@dataclass(frozen=True)
class Model:
    statements: tuple = ()
    queries: tuple = ()

    @property
    def declarations(self) -> tuple:
        """Names introduced by the model, in source order."""
        return tuple(s.name for s in self.statements if isinstance(s, (Sample, Assign, Input)))


# Lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>==|[~=+\-*/()\[\],^:;])
    """,
    re.VERBOSE,
)

_STATEMENT_WORDS = {"observe", "output", "input"}
_QUERY_WORDS = {"marginal", "pushforward", "event", "form"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col, self.line, self.col + max(len(self.text), 1))


def _syntax_error(msg: str, line: int, col: int, length: int = 1) -> ModelSyntaxError:
    diag = Diagnostic(Span(line, col, line, col + length), "error", msg)
    return ModelSyntaxError(f"{line}:{col}: {msg}", [diag])


def _tokenize(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, pos, depth = 1, 0, 0, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise _syntax_error(f"unexpected character {source[pos]!r}", line, col)
        kind, text = m.lastgroup, m.group()
        pos = m.end()
        if kind == "newline":
            if depth == 0:
                toks.append(_Tok("sep", "\n", line, col))
            line, line_start = line + 1, pos
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "op":
            if text in "([":
                depth += 1
            elif text in ")]":
                depth = max(0, depth - 1)
            elif text == ";":
                kind = "sep"
        toks.append(_Tok(kind, text, line, col))
    toks.append(_Tok("eof", "", line, len(source) - line_start + 1))
    return toks


# Parser


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i = min(self.i + 1, len(self.toks) - 1)
        return t

    def fail(self, msg: str, tok: _Tok | None = None):
        t = self.tok if tok is None else tok
        found = "end of input" if t.kind == "eof" else ("end of line" if t.kind == "sep" else repr(t.text))
        raise _syntax_error(f"{msg}, found {found}", t.line, t.col, max(len(t.text), 1))

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str, what: str | None = None) -> _Tok:
        if not self.at(text):
            self.fail(f"expected {what or repr(text)}")
        return self.advance()

    def ident(self, what: str = "identifier") -> _Tok:
        if self.tok.kind != "ident":
            self.fail(f"expected {what}")
        return self.advance()

    def integer(self, what: str) -> int:
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            self.fail(f"expected {what}")
        self.advance()
        return int(t.text)

    def span_from(self, start: _Tok) -> Span:
        prev = self.toks[self.i - 1] if self.i > 0 else start
        return Span(start.line, start.col, prev.line, prev.col + max(len(prev.text), 1))

    # expressions

    def expr(self):
        start = self.tok
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            right = self.term()
            left = BinOp(op, left, right, self.span_from(start))
        return left

    def term(self):
        start = self.tok
        left = self.factor()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            right = self.factor()
            left = BinOp(op, left, right, self.span_from(start))
        return left

    def factor(self):
        t = self.tok
        if self.at("-"):
            self.advance()
            return Neg(self.factor(), self.span_from(t))
        if self.at("+"):
            self.advance()
            return self.factor()
        if t.kind == "number":
            self.advance()
            return Num(float(t.text), t.span)
        if t.kind == "ident":
            self.advance()
            if t.text == "inf":
                return Num(math.inf, t.span)
            if self.at("["):
                self.advance()
                k = self.integer("integer index")
                self.expect("]")
                return Index(t.text, k, self.span_from(t))
            return Var(t.text, t.span)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("["):
            self.advance()
            items = [self.expr()]
            while self.at(","):
                self.advance()
                items.append(self.expr())
            self.expect("]")
            return VectorLit(tuple(items), self.span_from(t))
        self.fail("expected expression")

    # statements

    def names(self) -> tuple:
        out = [self.ident().text]
        while self.at(","):
            self.advance()
            out.append(self.ident().text)
        return tuple(out)

    def dist(self):
        t = self.tok
        if self.at("R"):
            self.advance()
            k = 1
            if self.at("^"):
                self.advance()
                k = self.integer("dimension")
            return Flat(k, self.span_from(t))
        if self.at("N"):
            self.advance()
            self.expect("(")
            mean = self.expr()
            self.expect(",")
            cov = self.expr()
            self.expect(")")
            return Normal(mean, cov, self.span_from(t))
        self.fail("expected 'N(mean, cov)' or 'R'")

    def item(self):
        t = self.tok
        if t.kind != "ident":
            self.fail("expected a statement")
        nxt = self.peek().text if self.peek().kind == "op" else None
        if nxt == "~":
            self.advance()
            self.advance()
            return Sample(t.text, self.dist(), self.span_from(t))
        if nxt == "=":
            self.advance()
            self.advance()
            return Assign(t.text, self.expr(), self.span_from(t))
        word = t.text
        if word not in _STATEMENT_WORDS | _QUERY_WORDS:
            self.advance()
            self.fail("expected '~' or '=' after identifier")
        self.advance()
        if word == "observe":
            lhs = self.expr()
            self.expect("==", "'=='")
            return Observe(lhs, self.expr(), self.span_from(t))
        if word == "output":
            return Output(self.names(), self.span_from(t))
        if word == "input":
            name = self.ident().text
            k = 1
            if self.at(":"):
                self.advance()
                k = self.integer("dimension")
            return Input(name, k, self.span_from(t))
        if word == "marginal":
            return Marginal(self.names(), self.span_from(t))
        if word == "pushforward":
            return Pushforward(self.expr(), self.span_from(t))
        if word == "form":
            kind = self.ident("'precision' or 'covariance'")
            if kind.text not in ("precision", "covariance"):
                self.fail("expected 'precision' or 'covariance'", kind)
            return Form(kind.text, self.span_from(t))
        label = None
        if self.tok.kind == "string":
            label = self.advance().text[1:-1]
            self.expect(":")
        e = self.expr()
        self.expect("in", "'in'")
        self.expect("[")
        lo = self.expr()
        self.expect(",")
        hi = self.expr()
        self.expect("]")
        return Event(label, e, lo, hi, self.span_from(t))

    def model(self) -> Model:
        stmts, queries = [], []
        while True:
            while self.tok.kind == "sep":
                self.advance()
            if self.tok.kind == "eof":
                break
            node = self.item()
            (queries if isinstance(node, (Marginal, Pushforward, Event, Form)) else stmts).append(node)
            if self.tok.kind not in ("sep", "eof"):
                self.fail("expected end of statement")
        return Model(tuple(stmts), tuple(queries))


def parse(source: str) -> Model:
    """Parse model text; raises ModelSyntaxError with a located diagnostic."""
    return _Parser(source).model()


# Printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _num_text(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def print_expr(e) -> str:
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{e.index}]"
    if isinstance(e, Neg):
        inner = print_expr(e.operand)
        return f"-({inner})" if isinstance(e.operand, BinOp) else f"-{inner}"
    if isinstance(e, VectorLit):
        return "[" + ", ".join(print_expr(x) for x in e.items) + "]"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left, right = print_expr(e.left), print_expr(e.right)
        if isinstance(e.left, BinOp) and _PREC[e.left.op] < p:
            left = f"({left})"
        if isinstance(e.right, BinOp) and _PREC[e.right.op] <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _print_item(s) -> str:
    if isinstance(s, Sample):
        d = s.dist
        if isinstance(d, Flat):
            rhs = "R" if d.dim == 1 else f"R^{d.dim}"
        else:
            rhs = f"N({print_expr(d.mean)}, {print_expr(d.cov)})"
        return f"{s.name} ~ {rhs}"
    if isinstance(s, Assign):
        return f"{s.name} = {print_expr(s.expr)}"
    if isinstance(s, Observe):
        return f"observe {print_expr(s.lhs)} == {print_expr(s.rhs)}"
    if isinstance(s, Output):
        return "output " + ", ".join(s.names)
    if isinstance(s, Input):
        return f"input {s.name}" if s.dim == 1 else f"input {s.name} : {s.dim}"
    if isinstance(s, Marginal):
        return "marginal " + ", ".join(s.names)
    if isinstance(s, Pushforward):
        return f"pushforward {print_expr(s.expr)}"
    if isinstance(s, Form):
        return f"form {s.kind}"
    if isinstance(s, Event):
        label = f'"{s.label}": ' if s.label is not None else ""
        return f"event {label}{print_expr(s.expr)} in [{print_expr(s.lower)}, {print_expr(s.upper)}]"
    raise TypeError(f"not a statement: {s!r}")


def print_model(model: Model) -> str:
    lines = [_print_item(s) for s in model.statements + model.queries]
    return "".join(line + "\n" for line in lines)


# Affine evaluation


@dataclass
class _Affine:
    """coeffs[name] @ value(name) summed, plus const; all blocks have ``dim`` rows."""

    dim: int
    coeffs: dict
    const: np.ndarray

    @property
    def is_constant(self) -> bool:
        return not any(np.any(c != 0) for c in self.coeffs.values())

    def scaled(self, k: float) -> "_Affine":
        return _Affine(self.dim, {n: k * c for n, c in self.coeffs.items()}, k * self.const)

    def broadcast(self, d: int) -> "_Affine":
        if self.dim == d:
            return self
        return _Affine(d, {}, np.full(d, self.const[0]))


def _fail(cls, msg: str, span: Span | None):
    err = cls(f"{span}: {msg}" if span is not None else msg)
    err.diagnostics = [Diagnostic(span, "error", msg)]
    return err


def _free_vars(e) -> set:
    if isinstance(e, Var):
        return {(e.name, e.span)}
    if isinstance(e, Index):
        return {(e.name, e.span)}
    if isinstance(e, Neg):
        return _free_vars(e.operand)
    if isinstance(e, BinOp):
        return _free_vars(e.left) | _free_vars(e.right)
    if isinstance(e, VectorLit):
        out = set()
        for x in e.items:
            out |= _free_vars(x)
        return out
    return set()


def _evaluate(e, dims: dict) -> _Affine:
    if isinstance(e, Num):
        return _Affine(1, {}, np.array([e.value]))
    if isinstance(e, Var):
        if e.name not in dims:
            raise _fail(ScopeError, f"undefined variable {e.name!r}", e.span)
        d = dims[e.name]
        return _Affine(d, {e.name: np.eye(d)}, np.zeros(d))
    if isinstance(e, Index):
        if e.name not in dims:
            raise _fail(ScopeError, f"undefined variable {e.name!r}", e.span)
        d = dims[e.name]
        if not 0 <= e.index < d:
            raise _fail(DimensionMismatch, f"index {e.index} out of range for {e.name!r} of dimension {d}", e.span)
        row = np.zeros((1, d))
        row[0, e.index] = 1.0
        return _Affine(1, {e.name: row}, np.zeros(1))
    if isinstance(e, Neg):
        return _evaluate(e.operand, dims).scaled(-1.0)
    if isinstance(e, VectorLit):
        parts = [_evaluate(x, dims) for x in e.items]
        d = sum(p.dim for p in parts)
        coeffs, row = {}, 0
        for p in parts:
            for n, c in p.coeffs.items():
                block = coeffs.setdefault(n, np.zeros((d, c.shape[1])))
                block[row : row + p.dim] += c
            row += p.dim
        return _Affine(d, coeffs, np.concatenate([p.const for p in parts]))
    if isinstance(e, BinOp):
        a, b = _evaluate(e.left, dims), _evaluate(e.right, dims)
        if e.op in "+-":
            if a.dim != b.dim:
                if a.is_constant and a.dim == 1:
                    a = a.broadcast(b.dim)
                elif b.is_constant and b.dim == 1:
                    b = b.broadcast(a.dim)
                else:
                    raise _fail(DimensionMismatch, f"cannot combine dimensions {a.dim} and {b.dim}", e.span)
            if e.op == "-":
                b = b.scaled(-1.0)
            coeffs = dict(a.coeffs)
            for n, c in b.coeffs.items():
                coeffs[n] = coeffs[n] + c if n in coeffs else c
            return _Affine(a.dim, coeffs, a.const + b.const)
        if e.op == "*":
            if a.is_constant and a.dim == 1:
                return b.scaled(float(a.const[0]))
            if b.is_constant and b.dim == 1:
                return a.scaled(float(b.const[0]))
            raise _fail(DimensionMismatch, "expression is not affine: one factor must be a scalar constant", e.span)
        if not (b.is_constant and b.dim == 1):
            raise _fail(DimensionMismatch, "can only divide by a scalar constant", e.span)
        if b.const[0] == 0:
            raise _fail(GaussExError, "division by zero", e.span)
        return a.scaled(1.0 / float(b.const[0]))
    raise TypeError(f"not an expression: {e!r}")


def _constant_matrix(e, dims: dict) -> np.ndarray:
    """A covariance literal: scalar expression or [[...], ...] rows."""
    if isinstance(e, VectorLit) and all(isinstance(x, VectorLit) for x in e.items):
        rows = [_evaluate(x, dims) for x in e.items]
        if any(not r.is_constant for r in rows) or len({r.dim for r in rows}) != 1:
            raise _fail(DimensionMismatch, "covariance must be a constant rectangular matrix", e.span)
        return np.array([r.const for r in rows])
    v = _evaluate(e, dims)
    if not v.is_constant or v.dim != 1:
        raise _fail(DimensionMismatch, "covariance must be a constant scalar or matrix", getattr(e, "span", None))
    return v.const.reshape(1, 1)


def _constant_scalar(e, dims: dict) -> float:
    v = _evaluate(e, dims)
    if not v.is_constant or v.dim != 1:
        raise _fail(BadQuery, "event bounds must be scalar constants", getattr(e, "span", None))
    return float(v.const[0])


# Elaboration


@dataclass(frozen=True, eq=False)
class Elaborated:
    """Result of elaborating a model.

    ``joint`` maps the inputs to every variable (coordinates in ``layout``);
    ``result`` maps the inputs to the output variables in output order.
    """

    model: Model
    joint: GaussExMorphism
    layout: dict
    inputs: tuple
    outputs: tuple
    result: GaussExMorphism
    diagnostics: tuple

    def dim_of(self, name: str) -> int:
        s = self.layout[name]
        return s.stop - s.start


def _definition_order(model: Model) -> list:
    """Inputs first, then the remaining definitions in dependency order
    (earliest source position among those that are ready)."""
    defs = [s for s in model.statements if isinstance(s, (Sample, Assign, Input))]
    seen = {}
    for s in defs:
        if s.name in seen:
            raise _fail(ScopeError, f"{s.name!r} is defined twice", s.span)
        seen[s.name] = s
    deps = {}
    for s in defs:
        if isinstance(s, Assign):
            fv = _free_vars(s.expr)
        elif isinstance(s, Sample) and isinstance(s.dist, Normal):
            fv = _free_vars(s.dist.mean) | _free_vars(s.dist.cov)
        else:
            fv = set()
        for name, span in fv:
            if name not in seen:
                raise _fail(ScopeError, f"undefined variable {name!r}", span)
        deps[s.name] = {n for n, _ in fv}
    order = [s for s in defs if isinstance(s, Input)]
    done = {s.name for s in order}
    pending = [s for s in defs if not isinstance(s, Input)]
    while pending:
        for k, s in enumerate(pending):
            if deps[s.name] <= done:
                order.append(s)
                done.add(s.name)
                del pending[k]
                break
        else:
            names = ", ".join(sorted(s.name for s in pending))
            raise _fail(ScopeError, f"cyclic definitions among {names}", pending[0].span)
    return order


def _extend(joint: GaussExMorphism, lin: np.ndarray, const, cov, flat: int = 0) -> GaussExMorphism:
    """Append new coordinates lin @ y + const + noise to the joint y."""
    n, d = joint.cod_dim, lin.shape[0]
    step = np.vstack([np.eye(n), lin])
    mean = np.concatenate([np.zeros(n), const])
    full_cov = np.zeros((n + d, n + d))
    full_cov[n:, n:] = cov
    fibre = Subspace.coordinates(n + d, range(n, n + flat))
    return category.compose(category.make(step, extgauss.make(mean, full_cov, fibre)), joint)


def _to_joint_coords(aff: _Affine, layout: dict, n: int) -> tuple[np.ndarray, np.ndarray]:
    lin = np.zeros((aff.dim, n))
    for name, c in aff.coeffs.items():
        lin[:, layout[name]] += c
    return lin, aff.const.copy()


def _observe(joint, lin, const, strict: bool, n_inputs: int, span) -> tuple[GaussExMorphism, list]:
    diags = []
    k, n = lin.shape
    if strict:
        if n_inputs:
            raise _fail(BadQuery, "strict interconnection needs a model without inputs", span)
        point = -pseudoinverse(lin) @ const
        if np.linalg.norm(lin @ point + const) > 1e-8 * max(1.0, float(np.linalg.norm(const))):
            raise _fail(Infeasible, "observation is inconsistent", span)
        s1 = willems.GaussianSystem(joint.noise)
        s2 = willems.GaussianSystem(extgauss.make(point, np.zeros((n, n)), kernel(lin)))
        if not willems.is_complementary(s1, s2):
            raise _fail(NotComplementary, "observation is not complementary to the model", span)
        return category.state(willems.interconnect(s1, s2).dist), diags
    with_r = category.compose(
        category.make(np.vstack([lin, np.eye(n)]), extgauss.make(np.concatenate([const, np.zeros(n)]), np.zeros((k + n,) * 2))),
        joint,
    )
    r_noise = extgauss.pushforward(np.eye(k, k + n), with_r.noise)
    reach = subspace_sum(
        subspace_sum(orthonormalize(r_noise.cov), r_noise.fibre), orthonormalize(with_r.matrix[:k])
    )
    if not reach.contains_vector(r_noise.mean):
        diags.append(Diagnostic(span, "warning", "observed value lies outside the support; result uses the pseudoinverse extension"))
    cond = category.conditional(with_r, k)
    feed = category.tensor(category.identity(n_inputs), category.zero(k))
    return category.compose(cond, feed), diags


def elaborate(model: Model, strict_interconnect: bool = False) -> Elaborated:
    """Compile a model into a GaussEx morphism from its inputs to its outputs."""
    order = _definition_order(model)
    dims, layout = {}, {}
    inputs = tuple(s.name for s in order if isinstance(s, Input))
    m = sum(s.dim for s in order if isinstance(s, Input))
    joint = category.identity(m)
    next_input = 0
    for s in order:
        start = joint.cod_dim
        if isinstance(s, Input):
            d, start = s.dim, next_input
            next_input += d
        elif isinstance(s, Sample) and isinstance(s.dist, Flat):
            d = s.dist.dim
            joint = _extend(joint, np.zeros((d, start)), np.zeros(d), np.zeros((d, d)), flat=d)
        elif isinstance(s, Sample):
            mean = _evaluate(s.dist.mean, dims)
            cov = _constant_matrix(s.dist.cov, dims)
            d = cov.shape[0] if (mean.dim == 1 and mean.is_constant) else mean.dim
            if cov.shape != (d, d):
                raise _fail(DimensionMismatch, f"covariance of {s.name!r} must be {d}x{d}", s.dist.span)
            mean = mean.broadcast(d)
            if not np.allclose(cov, cov.T, atol=1e-12):
                raise _fail(DimensionMismatch, f"covariance of {s.name!r} is not symmetric", s.dist.span)
            lin, const = _to_joint_coords(mean, layout, start)
            try:
                joint = _extend(joint, lin, const, cov)
            except GaussExError as err:
                raise _fail(type(err), f"{s.name!r}: {err}", s.dist.span) from None
        else:
            aff = _evaluate(s.expr, dims)
            d = aff.dim
            lin, const = _to_joint_coords(aff, layout, start)
            joint = _extend(joint, lin, const, np.zeros((d, d)))
        dims[s.name] = d
        layout[s.name] = slice(start, start + d)

    diags = []
    n = joint.cod_dim
    for s in model.statements:
        if isinstance(s, Observe):
            aff = _evaluate(BinOp("-", s.lhs, s.rhs, s.span), dims)
            lin, const = _to_joint_coords(aff, layout, n)
            joint, found = _observe(joint, lin, const, strict_interconnect, m, s.span)
            diags.extend(found)

    declared = [n_ for s in model.statements if isinstance(s, Output) for n_ in s.names]
    for s in model.statements:
        if isinstance(s, Output):
            for name in s.names:
                if name not in layout:
                    raise _fail(ScopeError, f"undefined output {name!r}", s.span)
    if declared:
        outputs = tuple(declared)
    else:
        outputs = tuple(name for name in model.declarations if name not in inputs)
    coords = [i for name in outputs for i in range(layout[name].start, layout[name].stop)]
    result = category.compose(category.permutation(coords, n), joint)
    return Elaborated(model, joint, layout, inputs, outputs, result, tuple(diags))


# Queries


def _require_state(el: Elaborated, q) -> None:
    if el.inputs:
        raise _fail(BadQuery, "queries need a model without inputs", q.span)


def _pushed(el: Elaborated, expr) -> tuple[np.ndarray, np.ndarray]:
    dims = {name: el.dim_of(name) for name in el.layout}
    return _to_joint_coords(_evaluate(expr, dims), el.layout, el.joint.cod_dim)


def run_query(el: Elaborated, q) -> dict:
    """Evaluate one query against the joint state over every model variable."""
    from . import serialize

    _require_state(el, q)
    noise = el.joint.noise
    if isinstance(q, Marginal):
        for name in q.names:
            if name not in el.layout:
                raise _fail(BadQuery, f"unknown variable {name!r}", q.span)
        coords = [i for name in q.names for i in range(el.layout[name].start, el.layout[name].stop)]
        st = category.marginal(el.joint, coords)
        return {"query": _print_item(q), "result": serialize.to_jsonable(st.noise)}
    if isinstance(q, Pushforward):
        lin, const = _pushed(el, q.expr)
        chi = extgauss.pushforward(lin, noise)
        chi = extgauss.make(chi.mean + const, chi.cov, chi.fibre)
        return {"query": _print_item(q), "result": serialize.to_jsonable(chi)}
    if isinstance(q, Event):
        ev = event_of(el, q)
        try:
            p = willems.cylinder_probability(willems.GaussianSystem(noise), ev)
        except GaussExError as err:
            raise _fail(BadQuery, str(err), q.span) from None
        out = {"query": _print_item(q), "probability": p}
        if q.label is not None:
            out["label"] = q.label
        return out
    if isinstance(q, Form):
        conv = quadratic.precision_form if q.kind == "precision" else quadratic.covariance_form
        return {"query": _print_item(q), "result": serialize.to_jsonable(conv(el.result.noise))}
    raise _fail(BadQuery, f"unknown query {q!r}", getattr(q, "span", None))


def event_of(el: Elaborated, q: Event) -> willems.CylinderEvent:
    """The cylinder event a query describes, over the joint coordinates."""
    lin, const = _pushed(el, q.expr)
    lo = _constant_scalar(q.lower, {}) - const
    hi = _constant_scalar(q.upper, {}) - const
    return willems.CylinderEvent(lin, (willems.Box(lo, hi),))
