"""Text format for parametrizations.

A problem file is a sequence of statements separated by ``;``::

    vars s, t;
    target P3;
    map s*t^6+2, s*t^5-3*s*t^3, s*t^4+5*s^2*t^6, 2+s^2*t^6;
    option nu=2;

``target`` is ``Pn``, ``P1xP1x...xP1`` or ``multigraded r1,...,rs``.
Coefficients are integers or fractions ``a/b``; multiplication must be
written with ``*``; ``#`` starts a comment.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from toricimplicit.arith import SparsePoly, poly_gcd


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ArityError(ValueError):
    pass


class ZeroComponent(ValueError):
    pass


class ReductionWarning(UserWarning):
    pass


SETTINGS = ("projective", "multiproj", "multigraded")
OPTION_KEYS = ("nu", "strategy", "samples", "polytope", "seed", "route", "setting")


@dataclass
class ProblemSpec:
    source_vars: list
    setting: str
    components: list  # (numerator, denominator) pairs of SparsePoly
    options: dict = field(default_factory=dict)
    target: str | None = None  # the target statement as written, canonicalised
    ranks: tuple | None = None

    def __post_init__(self):
        n = len(self.source_vars)
        for num, den in self.components:
            if num.nvars != n or den.nvars != n:
                raise ArityError(f"component arity differs from the {n} declared variables")
            if not den:
                raise ZeroDivisionError("zero denominator")

    def projective_sections(self) -> list:
        """Homogeneous coordinates of the map to P^n.

        Polynomial components are the coordinates themselves; rational
        components f_i/g over a common denominator g give (g : f_1 : ... : f_k).
        """
        dens = [den for _, den in self.components]
        if all(d.total_degree() == 0 for d in dens):
            return [num.scale(1 / den.constant_value()) for num, den in self.components]
        common = dens[0]
        if any(d != common for d in dens):
            raise ValueError("components do not share a denominator")
        return [common] + [num for num, _ in self.components]

    def pairs(self) -> list:
        return [(num, den) for num, den in self.components]


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),;=])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - start + 1))
    return toks


# ---------------------------------------------------------------------------
# rational function values during parsing


@dataclass(frozen=True)
class _RF:
    num: SparsePoly
    den: SparsePoly

    def _norm(self) -> "_RF":
        if self.den.total_degree() == 0:
            c = self.den.constant_value()
            return _RF(self.num.scale(1 / c), SparsePoly.one(self.num.nvars))
        return self

    def __add__(self, o: "_RF") -> "_RF":
        if self.den == o.den:
            return _RF(self.num + o.num, self.den)
        return _RF(self.num * o.den + o.num * self.den, self.den * o.den)._norm()

    def __neg__(self) -> "_RF":
        return _RF(-self.num, self.den)

    def __mul__(self, o: "_RF") -> "_RF":
        return _RF(self.num * o.num, self.den * o.den)._norm()

    def __truediv__(self, o: "_RF") -> "_RF":
        if not o.num:
            raise ZeroDivisionError("division by zero")
        return _RF(self.num * o.den, self.den * o.num)._norm()


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars: list | None = None

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{message}, found {found!r}", tok.line, tok.col)

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        tok = self.tok
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            self.error(f"expected {text or kind}")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "name"):
            self.i += 1
            return True
        return False

    # expressions: sum := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
    # unary := '-' unary | power ; power := atom ('^' int)?
    def expr(self) -> _RF:
        value = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + (rhs if op == "+" else -rhs)
        return value

    def term(self) -> _RF:
        value = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                if not rhs.num:
                    raise ParseError("division by zero", op.line, op.col)
                value = value / rhs
        return value

    def unary(self) -> _RF:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> _RF:
        base = self.atom()
        if self.tok.text == "^":
            self.take("^")
            exp = int(self.take(kind="num").text)
            out = _RF(SparsePoly.one(len(self.vars)), SparsePoly.one(len(self.vars)))
            for _ in range(exp):
                out = out * base
            return out
        return base

    def atom(self) -> _RF:
        n = len(self.vars)
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return _RF(SparsePoly.constant(n, int(tok.text)), SparsePoly.one(n))
        if tok.kind == "name":
            if tok.text not in self.vars:
                self.error("unknown variable")
            self.take()
            return _RF(SparsePoly.variable(n, self.vars.index(tok.text)), SparsePoly.one(n))
        if tok.text == "(":
            self.take("(")
            value = self.expr()
            self.take(")")
            if self.tok.kind in ("name", "num") or self.tok.text == "(":
                self.error("expected an operator (multiplication needs '*')")
            return value
        self.error("expected a number, variable or '('")

    def int_list(self) -> list:
        out = [self.signed_int()]
        while self.accept(","):
            out.append(self.signed_int())
        return out

    def signed_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        return sign * int(self.take(kind="num").text)

    def option_value(self, key: str):
        if key == "polytope":
            pts = []
            while True:
                self.take("(")
                pts.append(tuple(self.int_list()))
                self.take(")")
                if not self.accept(","):
                    return pts
        if key in ("nu", "samples", "seed"):
            vals = self.int_list()
            return vals[0] if len(vals) == 1 else tuple(vals)
        return self.take(kind="name").text

    def parse(self) -> ProblemSpec:
        target = None
        setting = None
        ranks = None
        comps = None
        options: dict = {}
        while self.tok.kind != "eof":
            head = self.take(kind="name")
            if head.text == "vars":
                if self.vars is not None:
                    self.error("duplicate vars statement", head)
                names = [self.take(kind="name").text]
                while self.accept(","):
                    names.append(self.take(kind="name").text)
                if len(set(names)) != len(names):
                    self.error("repeated variable name", head)
                self.vars = names
            elif head.text == "target":
                target, setting, ranks = self.target()
            elif head.text == "map":
                if self.vars is None:
                    self.error("map before vars", head)
                comps = [self.expr()]
                while self.accept(","):
                    comps.append(self.expr())
            elif head.text == "option":
                key = self.take(kind="name")
                if key.text not in OPTION_KEYS:
                    self.error(f"unknown option (expected one of {', '.join(OPTION_KEYS)})", key)
                self.take("=")
                options[key.text] = self.option_value(key.text)
            else:
                self.error("expected vars, target, map or option", head)
            if self.tok.kind != "eof":
                self.take(";")
        last = self.tok
        if self.vars is None:
            raise ParseError("missing vars statement", last.line, last.col)
        if not comps:
            raise ParseError("missing or empty map statement", last.line, last.col)
        pairs = [(rf.num, rf.den) for rf in comps]
        if setting is None:
            dens = {den for _, den in pairs}
            setting = "projective" if len(dens) == 1 else "multiproj"
        if "setting" in options:
            if options["setting"] not in SETTINGS:
                raise ParseError(f"unknown setting {options['setting']!r}", last.line, last.col)
            setting = options["setting"]
        spec = ProblemSpec(self.vars, setting, pairs, options, target, ranks)
        _check_target(spec)
        return spec

    def target(self):
        tok = self.take(kind="name")
        word = tok.text
        if word == "multigraded":
            ranks = tuple(self.int_list())
            if any(r < 1 for r in ranks):
                self.error("ranks must be positive", tok)
            return f"multigraded {','.join(map(str, ranks))}", "multigraded", ranks
        if re.fullmatch(r"P\d+", word):
            return word, "projective", None
        if re.fullmatch(r"P1(xP1)+", word) or word == "P1":
            return word, "multiproj", None
        self.error("expected Pn, P1xP1x...xP1 or multigraded", tok)


def _check_target(spec: ProblemSpec) -> None:
    k = len(spec.components)
    t = spec.target
    if t is None:
        return
    if spec.setting == "multiproj" and t.startswith("P1"):
        want = t.count("P1")
        if want != k:
            raise ArityError(f"target {t} needs {want} components, got {k}")
    elif re.fullmatch(r"P\d+", t):
        n = int(t[1:])
        if k not in (n, n + 1):
            raise ArityError(f"target {t} needs {n + 1} coordinates or {n} affine components, got {k}")
    elif spec.ranks is not None:
        if sum(r + 1 for r in spec.ranks) != len(spec.source_vars):
            raise ArityError("multigraded ranks do not match the number of source variables")


def parse_problem(text: str) -> ProblemSpec:
    return _Parser(text).parse()


def load_problem(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


# ---------------------------------------------------------------------------
# normalisation and printing


def normalize_pairs(spec: ProblemSpec) -> list:
    """Reduce every (f_i, g_i) by its gcd; warns when something was cancelled."""
    out = []
    for i, (f, g) in enumerate(spec.components):
        if not f and not g:
            raise ZeroComponent(f"component {i} is 0/0")
        if not f:
            out.append((f, SparsePoly.one(f.nvars)))
            continue
        c = poly_gcd(f, g)
        if c.total_degree() > 0:
            warnings.warn(f"component {i}: cancelled common factor {c.to_string(spec.source_vars)}",
                          ReductionWarning, stacklevel=2)
            f, g = f.divexact(c), g.divexact(c)
        lead = g.leading_term()[1]
        out.append((f.scale(1 / lead), g.scale(1 / lead)))
    return out


def _component_text(num: SparsePoly, den: SparsePoly, names: list) -> str:
    if den.total_degree() == 0 and den.leading_term()[1] == 1:
        return num.to_string(names)
    return f"({num.to_string(names)})/({den.to_string(names)})"


def format_problem(spec: ProblemSpec) -> str:
    """Canonical text form; parsing it gives back an equal spec."""
    names = spec.source_vars
    lines = [f"vars {', '.join(names)};"]
    if spec.target is not None:
        lines.append(f"target {spec.target};")
    comps = ",\n    ".join(_component_text(n, d, names) for n, d in spec.components)
    lines.append(f"map {comps};")
    for key in sorted(spec.options):
        value = spec.options[key]
        if key == "polytope":
            text = ", ".join("(" + ",".join(map(str, p)) + ")" for p in value)
        elif isinstance(value, tuple):
            text = ",".join(map(str, value))
        else:
            text = str(value)
        lines.append(f"option {key}={text};")
    return "\n".join(lines) + "\n"
