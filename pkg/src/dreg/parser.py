"""Reader for ``.dreg`` problem files.

A file is a sequence of statements separated by ``;``.  The first must be
``vars <n>``; every other statement is either a generator expression or a
directive::

    vars 3;
    dx2 - dx1*dx3;
    x1*dx1 + x2*dx2 - 1/2;
    x2*dx2 + x3*dx3 - 1/3;
    component x2;          # restrict sampling to these components
    avoid x1 - x3;         # extra polynomials sampled points must avoid
    point 1, 0, 1;         # preferred sample points
    weight 1, 1, 1;        # default weight for `init`
    seed 7; heightbound 5; pointspercomponent 3; charts 1, 2;
    budget 60000;          # milliseconds per Gröbner computation

Expressions use ``x<i>``, ``dx<i>`` (1-based), integers, rationals ``p/q``,
``+ - * ^`` and parentheses.  ``^`` binds tighter than ``*``, which binds
tighter than ``+`` and ``-``; a leading ``-`` negates the factor after it.
Juxtaposition is an error.  Products are evaluated left to right in the
Weyl algebra, so ``dx1*x1`` reads as ``x1*dx1 + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from gmpy2 import mpq

from .arith import MultiPoly
from .errors import ParseError
from .weyl import DIdeal, WeylElement

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<rat>\d+/\d+)
  | (?P<int>\d+)
  | (?P<dvar>dx\d+)
  | (?P<xvar>x\d+)
  | (?P<word>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^(),;])
""", re.VERBOSE)

DIRECTIVES = ("component", "avoid", "point", "weight", "seed", "heightbound",
              "pointspercomponent", "charts", "budget")


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass
class ProblemFile:
    nvars: int
    generators: list[WeylElement]
    components: list[MultiPoly] | None = None
    avoid: list[MultiPoly] = field(default_factory=list)
    points: list[tuple] = field(default_factory=list)
    weights: list[tuple] = field(default_factory=list)
    charts: tuple[int, ...] | None = None
    seed: int | None = None
    height_bound: int | None = None
    points_per_component: int | None = None
    budget_ms: int | None = None

    @property
    def ideal(self) -> DIdeal:
        return DIdeal(self.nvars, self.generators)


def tokenize(text: str) -> list[Token]:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.n: int | None = None

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def at_end_of_statement(self) -> bool:
        return self.tok.kind == "eof" or self.tok.text == ";"

    # -- expressions -------------------------------------------------------

    def expr(self) -> WeylElement:
        acc = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> WeylElement:
        acc = self.factor()
        while self.tok.text == "*":
            self.advance()
            acc = acc * self.factor()
        if not (self.at_end_of_statement() or self.tok.text in ("+", "-", ")", ",")):
            raise self.error(f"unexpected {self.tok.text!r}; write '*' between factors")
        return acc

    def factor(self) -> WeylElement:
        if self.tok.text == "-":
            self.advance()
            return -self.factor()
        base = self.atom()
        if self.tok.text == "^":
            self.advance()
            t = self.tok
            if t.kind != "int":
                raise self.error("exponent must be a nonnegative integer")
            self.advance()
            return base ** int(t.text)
        return base

    def atom(self) -> WeylElement:
        t = self.tok
        n = self.n
        if t.kind == "int":
            self.advance()
            return WeylElement.constant(n, int(t.text))
        if t.kind == "rat":
            p, q = t.text.split("/")
            if int(q) == 0:
                raise self.error("zero denominator")
            self.advance()
            return WeylElement.constant(n, mpq(int(p), int(q)))
        if t.kind in ("xvar", "dvar"):
            idx = int(t.text[2:] if t.kind == "dvar" else t.text[1:])
            if not 1 <= idx <= n:
                raise self.error(f"variable index out of range: {t.text} with vars {n}")
            self.advance()
            return WeylElement.d(n, idx - 1) if t.kind == "dvar" else WeylElement.x(n, idx - 1)
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def polynomial(self) -> MultiPoly:
        start = self.tok
        e = self.expr()
        if any(any(b) for _, b in e.terms):
            raise self.error("polynomial expected, found a derivative", start)
        return MultiPoly(self.n, {a: c for (a, _), c in e.terms.items()})

    # -- numbers -----------------------------------------------------------

    def rational(self) -> mpq:
        neg = False
        if self.tok.text == "-":
            self.advance()
            neg = True
        t = self.tok
        if t.kind == "int":
            v = mpq(int(t.text))
        elif t.kind == "rat":
            p, q = t.text.split("/")
            if int(q) == 0:
                raise self.error("zero denominator")
            v = mpq(int(p), int(q))
        else:
            raise self.error(f"number expected, found {t.text or 'end of input'!r}")
        self.advance()
        return -v if neg else v

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            raise self.error(f"integer expected, found {t.text or 'end of input'!r}")
        self.advance()
        return int(t.text)

    def vector(self) -> tuple:
        vals = [self.rational()]
        while self.tok.text == ",":
            self.advance()
            vals.append(self.rational())
        return tuple(vals)

    # -- statements --------------------------------------------------------

    def problem(self) -> ProblemFile:
        while self.tok.text == ";":
            self.advance()
        t = self.tok
        if t.text != "vars":
            raise self.error("file must start with 'vars <n>'")
        self.advance()
        n = self.integer()
        if n < 1:
            raise self.error("need at least one variable", t)
        self.n = n
        pf = ProblemFile(n, [])
        while True:
            if self.tok.kind == "eof":
                break
            if self.tok.text != ";":
                raise self.error(f"expected ';', found {self.tok.text!r}")
            self.advance()
            if self.tok.kind == "eof":
                break
            if self.tok.text == ";":
                continue
            self.statement(pf)
        if not pf.generators:
            raise self.error("no generators given")
        return pf

    def statement(self, pf: ProblemFile) -> None:
        t = self.tok
        if t.kind != "word":
            g = self.expr()
            if not self.at_end_of_statement():
                raise self.error(f"unexpected {self.tok.text!r}")
            # a generator that simplifies to zero adds nothing
            if g:
                pf.generators.append(g)
            return
        word = t.text
        if word not in DIRECTIVES:
            if word == "vars":
                raise self.error("'vars' may appear only once, at the start")
            raise self.error(f"unknown directive {word!r}")
        self.advance()
        n = pf.nvars
        if word == "component":
            f = self.polynomial()
            if f.is_constant():
                raise self.error("component must be nonconstant", t)
            pf.components = (pf.components or []) + [f]
        elif word == "avoid":
            f = self.polynomial()
            if f.is_zero():
                raise self.error("cannot avoid the zero polynomial", t)
            pf.avoid.append(f)
        elif word in ("point", "weight"):
            v = self.vector()
            if len(v) != n:
                raise self.error(f"{word} needs {n} coordinates, got {len(v)}", t)
            (pf.points if word == "point" else pf.weights).append(v)
        elif word == "charts":
            ks = [self.integer()]
            while self.tok.text == ",":
                self.advance()
                ks.append(self.integer())
            for k in ks:
                if not 1 <= k <= n:
                    raise self.error(f"chart index {k} out of range 1..{n}", t)
            pf.charts = tuple(ks)
        else:
            value = self.integer()
            if word in ("heightbound", "pointspercomponent", "budget") and value < 1:
                raise self.error(f"{word} must be positive", t)
            attr = {"seed": "seed", "heightbound": "height_bound",
                    "pointspercomponent": "points_per_component", "budget": "budget_ms"}[word]
            setattr(pf, attr, value)
        if not self.at_end_of_statement():
            raise self.error(f"unexpected {self.tok.text!r}")


def parse_ideal(text: str) -> ProblemFile:
    """Parse a problem file; raises :class:`ParseError` with line and column."""
    return _Parser(tokenize(text)).problem()


def parse_expression(text: str, nvars: int) -> WeylElement:
    p = _Parser(tokenize(text))
    p.n = nvars
    e = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return e


def format_problem(nvars: int, generators) -> str:
    """Printed form that :func:`parse_ideal` reads back to the same elements."""
    lines = [f"vars {nvars};"] + [f"{g.to_str()};" for g in generators]
    return "\n".join(lines) + "\n"
