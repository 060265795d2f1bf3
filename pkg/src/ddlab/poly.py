"""Exact sparse multivariate polynomials over Q.

Values are immutable after construction.  A Polynomial always belongs to a
Context (an ordered tuple of variable names); the context order fixes the
graded-reverse-lexicographic order used for canonical printing.  Coefficients
are exact rationals: plain ints where possible, `fractions.Fraction`
otherwise; nothing here is approximate.
"""

from __future__ import annotations

import re
from fractions import Fraction
from operator import add as _add_op
from typing import Iterable, Mapping

Exponents = tuple[int, ...]


class ContextMismatch(ValueError):
    """Two values from different variable contexts were combined."""


class ParseError(ValueError):
    """Syntax or name error in a polynomial expression string."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def grevlex_key(exps: Exponents) -> tuple:
    """Sort key so that max(key) is the grevlex-largest monomial."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


def norm_coeff(value):
    """Exact rational normal form: int when integral, Fraction otherwise."""
    if type(value) is int:
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, int):
        return int(value)
    return norm_coeff(Fraction(value))


def coeff_div(a, b):
    """Exact division of coefficients (never float)."""
    q = Fraction(a) / b
    return int(q) if q.denominator == 1 else q


def _scaled_int_terms(terms: dict) -> tuple[dict, int]:
    """Rewrite a term dict over a common denominator; all values become int."""
    from math import gcd

    den = 1
    for c in terms.values():
        if type(c) is not int:
            d = c.denominator
            den = den // gcd(den, d) * d
    if den == 1:
        return terms, 1
    out = {}
    for e, c in terms.items():
        cc = c * den
        out[e] = cc if type(cc) is int else int(cc)
    return out, den


class Context:
    """An ordered set of variable names shared by a family of polynomials."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in context: {names}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", n):
                raise ValueError(f"invalid variable name: {n!r}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __setattr__(self, *args):
        raise AttributeError("Context is immutable")

    def __eq__(self, other):
        return isinstance(other, Context) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Context{self.names!r}"

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in context {self.names}") from None

    def extend(self, *names: str) -> "Context":
        """New context with extra variables appended (existing ones kept)."""
        extra = tuple(n for n in names if n not in self._index)
        return Context(self.names + extra)

    # -- element builders -------------------------------------------------

    def var(self, name: str) -> "Polynomial":
        exps = [0] * len(self.names)
        exps[self.index(name)] = 1
        return Polynomial._raw(self, {tuple(exps): 1})

    def const(self, value) -> "Polynomial":
        q = norm_coeff(value)
        if q == 0:
            return self.zero()
        return Polynomial._raw(self, {(0,) * len(self.names): q})

    def zero(self) -> "Polynomial":
        return Polynomial._raw(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def monomial(self, exps: Mapping[str, int], coeff=1) -> "Polynomial":
        e = [0] * len(self.names)
        for name, k in exps.items():
            if k < 0:
                raise ValueError(f"negative exponent for {name}")
            e[self.index(name)] = k
        q = norm_coeff(coeff)
        if q == 0:
            return self.zero()
        return Polynomial._raw(self, {tuple(e): q})


class Polynomial:
    """Sparse polynomial: map from exponent vectors to nonzero rationals."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: Mapping[Exponents, object]):
        clean = {}
        n = len(ctx.names)
        for exps, coeff in terms.items():
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not fit context {ctx.names}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = norm_coeff(coeff)
            if coeff != 0:
                clean[exps] = coeff
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, ctx: Context, terms: dict) -> "Polynomial":
        """Trusted constructor: terms must be clean (no zeros, right width)."""
        self = object.__new__(cls)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", terms)
        return self

    def __setattr__(self, *args):
        raise AttributeError("Polynomial is immutable")

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        for c in self.terms.values():
            return Fraction(c)
        return Fraction(0)

    def support_vars(self) -> set[str]:
        used = set()
        names = self.ctx.names
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(names[i])
        return used

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def deg_in(self, name: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        i = self.ctx.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficient_of(self, name: str, power: int) -> "Polynomial":
        """Coefficient of name**power, with that variable's exponent zeroed."""
        i = self.ctx.index(name)
        out = {}
        for exps, coeff in self.terms.items():
            if exps[i] == power:
                e = list(exps)
                e[i] = 0
                key = tuple(e)
                cur = out.get(key)
                out[key] = coeff if cur is None else cur + coeff
        return Polynomial(self.ctx, out)

    def eval_zero(self, name: str) -> "Polynomial":
        """Substitute 0 for one variable."""
        return self.coefficient_of(name, 0)

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ctx != other.ctx:
            raise ContextMismatch(f"contexts differ: {self.ctx.names} vs {other.ctx.names}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        get = out.get
        for exps, coeff in other.terms.items():
            cur = get(exps)
            if cur is None:
                out[exps] = coeff
            else:
                s = cur + coeff
                if s:
                    out[exps] = s
                else:
                    del out[exps]
        return Polynomial._raw(self.ctx, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        get = out.get
        for exps, coeff in other.terms.items():
            cur = get(exps)
            if cur is None:
                out[exps] = -coeff
            else:
                s = cur - coeff
                if s:
                    out[exps] = s
                else:
                    del out[exps]
        return Polynomial._raw(self.ctx, out)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        # clear denominators so the inner loop runs on native ints
        a, da = _scaled_int_terms(a)
        b, db = _scaled_int_terms(b)
        out: dict = {}
        get = out.get
        b_items = list(b.items())
        for e1, c1 in a.items():
            for e2, c2 in b_items:
                e = tuple(map(_add_op, e1, e2))
                prod = c1 * c2
                cur = get(e)
                if cur is None:
                    out[e] = prod
                else:
                    s = cur + prod
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        den = da * db
        if den != 1:
            out = {e: norm_coeff(Fraction(c, den)) for e, c in out.items()}
        return Polynomial._raw(self.ctx, out)

    def mul_monomial(self, exps: Exponents, coeff) -> "Polynomial":
        """Multiply by a single term (trusted exponents)."""
        if coeff == 0:
            return self.ctx.zero()
        out = {}
        for e, c in self.terms.items():
            out[tuple(map(_add_op, e, exps))] = c * coeff
        return Polynomial._raw(self.ctx, out)

    def scale(self, q) -> "Polynomial":
        q = norm_coeff(q)
        if q == 0:
            return self.ctx.zero()
        if q == 1:
            return self
        return Polynomial._raw(self.ctx, {e: c * q for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"polynomial power must be a nonnegative integer, got {n}")
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.ctx == other.ctx
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    # -- calculus and substitution -------------------------------------------

    def partial(self, name: str) -> "Polynomial":
        """Formal partial derivative."""
        i = self.ctx.index(name)
        out: dict = {}
        for exps, coeff in self.terms.items():
            k = exps[i]
            if k == 0:
                continue
            e = list(exps)
            e[i] = k - 1
            key = tuple(e)
            cur = out.get(key)
            s = coeff * k if cur is None else cur + coeff * k
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Polynomial._raw(self.ctx, out)

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Evaluate at polynomial images; unmapped variables map to themselves.

        All image values must share one target context, and every unmapped
        variable of self must exist there under the same name.
        """
        if not images:
            return self
        target = next(iter(images.values())).ctx
        for img in images.values():
            if img.ctx != target:
                raise ContextMismatch("substitution images in mixed contexts")
        powers: dict[str, list[Polynomial]] = {}

        def power(name: str, k: int) -> Polynomial:
            lst = powers.get(name)
            if lst is None:
                base = images.get(name)
                if base is None:
                    base = target.var(name)
                lst = powers[name] = [target.one(), base]
            while len(lst) <= k:
                lst.append(lst[-1] * lst[1])
            return lst[k]

        out = target.zero()
        names = self.ctx.names
        for exps, coeff in self.terms.items():
            term = target.const(coeff)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(names[i], e)
            out = out + term
        return out

    def taylor_shift(self, name: str, shift: "Polynomial") -> "Polynomial":
        """Substitute name -> name + shift, exactly."""
        self._check(shift)
        return self.substitute({name: self.ctx.var(name) + shift})

    def transfer(self, new_ctx: Context) -> "Polynomial":
        """Reinterpret in a different context containing all used variables."""
        if new_ctx == self.ctx:
            return self
        used = self.support_vars()
        for name in used:
            if name not in new_ctx:
                raise ContextMismatch(f"variable {name} missing from target context")
        pos = [new_ctx.index(n) if n in new_ctx else None for n in self.ctx.names]
        out = {}
        width = len(new_ctx.names)
        for exps, coeff in self.terms.items():
            e = [0] * width
            for i, k in enumerate(exps):
                if k:
                    e[pos[i]] = k
            out[tuple(e)] = coeff
        return Polynomial._raw(new_ctx, out)

    # -- printing --------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponents, object]]:
        """Terms in decreasing grevlex order (the canonical print order)."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k, (exps, coeff) in enumerate(self.sorted_terms()):
            factors = [
                self.ctx.names[i] if e == 1 else f"{self.ctx.names[i]}^{e}"
                for i, e in enumerate(exps)
                if e
            ]
            mono = "*".join(factors)
            mag = abs(coeff)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if k == 0:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self):
        return f"<poly {self} over {self.ctx.names}>"


# -- parsing ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.tokens = _tokenize(text)
        self.ctx = ctx
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self) -> Polynomial:
        kind, val, pos = self.peek()
        sign = 1
        while kind == "op" and val in "+-":
            self.take()
            if val == "-":
                sign = -sign
            kind, val, pos = self.peek()
        result = self.term()
        if sign < 0:
            result = -result
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                result = result + rhs if val == "+" else result - rhs
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                raise ParseError("negative exponents are not allowed here", pos)
            if kind != "num" or "/" in val:
                raise ParseError("exponent must be a nonnegative integer", pos)
            self.take()
            return base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            if "/" in val:
                num, den = val.split("/")
                if int(den) == 0:
                    raise ParseError("zero denominator", pos)
                return self.ctx.const(Fraction(int(num), int(den)))
            return self.ctx.const(int(val))
        if kind == "name":
            if val not in self.ctx:
                raise ParseError(f"unknown variable {val!r}", pos)
            return self.ctx.var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val, pos = self.take()
            if not (kind == "op" and val == ")"):
                raise ParseError("expected ')'", pos)
            return inner
        if kind == "op" and val == "-":
            return -self.atom()
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def parse_poly(text: str, ctx: Context) -> Polynomial:
    """Parse an expression with +, -, *, ^, integer/rational literals and context variables."""
    parser = _Parser(text, ctx)
    result = parser.expr()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return result
