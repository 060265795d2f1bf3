"""Elements of B = R[X,Y,Z,T]/(X^d*Y - P, X^e*T - Q), possibly with adjoined variables.

Equality in B is decided through the embedding B -> R[x, x^-1][z, w..]:
y maps to P(x,z)*x^-d and t to Q(x,y,z)*x^-e.  A BElement carries an optional
generator-expression witness plus its Laurent form; the Laurent form is the
source of truth for equality.

Membership of a Laurent form in B[w..] is decided by ideal membership
g in (X^N) + (relations) over Q, with the witness read off the X^N cofactor.
This route is restricted to base ring R = Q.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .groebner import DEFAULT_BUDGET, GroebnerBasis, MonomialOrder, buchberger
from .laurent import LaurentForm, eval_poly_at_laurent
from .poly import Context, ContextMismatch, Polynomial, parse_poly
from .presentations import DDPresentation, GENERATOR_NAMES


class AlgebraError(ValueError):
    """Problem manipulating elements of the quotient algebra."""


class UnsupportedBaseRing(AlgebraError):
    """The operation is only implemented over R = Q (no base variables)."""


class NotInAlgebra(AlgebraError):
    """A Laurent form is not an element of the algebra; carries the failing basis."""

    def __init__(self, message: str, certificate: list[str] | None = None):
        super().__init__(message)
        self.certificate = certificate or []


class AlgebraContext:
    """A presentation together with zero or more adjoined polynomial variables."""

    __slots__ = ("presentation", "adjoined", "gen_ctx", "coeff_ctx", "_images", "_nf_cache")

    def __init__(self, presentation: DDPresentation, adjoined: Iterable[str] = ()):
        presentation.require_valid()
        adjoined = tuple(adjoined)
        base = presentation.base.variables
        taken = set(GENERATOR_NAMES) | set(base)
        for name in adjoined:
            if name in taken:
                raise AlgebraError(f"adjoined variable {name!r} is not fresh")
            taken.add(name)
        object.__setattr__(self, "presentation", presentation)
        object.__setattr__(self, "adjoined", adjoined)
        object.__setattr__(self, "gen_ctx", Context(GENERATOR_NAMES + adjoined + base))
        object.__setattr__(self, "coeff_ctx", Context(("Z",) + adjoined + base))
        object.__setattr__(self, "_images", None)
        object.__setattr__(self, "_nf_cache", {})

    def __setattr__(self, *args):
        raise AttributeError("AlgebraContext is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraContext)
            and self.presentation == other.presentation
            and self.adjoined == other.adjoined
        )

    def __hash__(self):
        return hash((self.presentation, self.adjoined))

    def __repr__(self):
        extra = "".join(f"[{w}]" for w in self.adjoined)
        return f"<algebra {self.presentation}{extra}>"

    # -- Laurent embedding ---------------------------------------------------

    def generator_images(self) -> Mapping[str, LaurentForm]:
        if self._images is None:
            p = self.presentation
            cctx = self.coeff_ctx
            images = {"X": LaurentForm.x_power(cctx, 1)}
            p_poly = p.P.transfer(self.gen_ctx)
            q_poly = p.Q.transfer(self.gen_ctx)
            images["Y"] = eval_poly_at_laurent(p_poly, images, cctx).shift(-p.d)
            images["T"] = eval_poly_at_laurent(q_poly, images, cctx).shift(-p.e)
            object.__setattr__(self, "_images", images)
        return self._images

    def to_laurent(self, expr: Polynomial) -> LaurentForm:
        if expr.ctx != self.gen_ctx:
            expr = expr.transfer(self.gen_ctx)
        return eval_poly_at_laurent(expr, self.generator_images(), self.coeff_ctx)

    # -- element builders -------------------------------------------------------

    def element(self, expr) -> "BElement":
        if isinstance(expr, str):
            expr = parse_poly(expr, self.gen_ctx)
        elif isinstance(expr, Polynomial) and expr.ctx != self.gen_ctx:
            expr = expr.transfer(self.gen_ctx)
        return BElement(self, expr, self.to_laurent(expr))

    def gen(self, name: str) -> "BElement":
        return self.element(self.gen_ctx.var(name))

    def zero(self) -> "BElement":
        return self.element(self.gen_ctx.zero())

    def const(self, value) -> "BElement":
        return self.element(self.gen_ctx.const(value))

    def generator_names(self) -> tuple[str, ...]:
        return GENERATOR_NAMES + self.adjoined

    def relations(self) -> tuple[Polynomial, Polynomial]:
        p = self.presentation
        ctx = self.gen_ctx
        x = ctx.var("X")
        rel1 = x ** p.d * ctx.var("Y") - p.P.transfer(ctx)
        rel2 = x ** p.e * ctx.var("T") - p.Q.transfer(ctx)
        return rel1, rel2

    # -- membership ---------------------------------------------------------------

    def _membership_basis(self, n: int, budget: int) -> GroebnerBasis:
        # X gets lowest priority: the three generators then have pairwise
        # coprime leading monomials and the basis stays tiny for every n
        key = n
        if key not in self._nf_cache:
            ctx = self.gen_ctx
            rel1, rel2 = self.relations()
            gens = [ctx.var("X") ** n, rel1, rel2]
            order = MonomialOrder.elim(ctx, [v for v in ctx.names if v != "X"])
            self._nf_cache[key] = buchberger(gens, order, budget)
        return self._nf_cache[key]

    def _relation_basis(self, budget: int) -> GroebnerBasis:
        """Basis of the defining ideal alone; used to canonicalize witnesses.

        T dominates, then Y: normal forms then carry the minimal possible
        T-degree and Y-degree, which keeps the Laurent depth of witnesses and
        the cost of substituting into them small.
        """
        if "rel" not in self._nf_cache:
            order = MonomialOrder.block_sequence(self.gen_ctx, [["T"], ["Y"]])
            self._nf_cache["rel"] = buchberger(list(self.relations()), order, budget)
        return self._nf_cache["rel"]

    def reduce_witness(self, expr: Polynomial, budget: int = DEFAULT_BUDGET) -> Polynomial:
        """Canonical small representative of expr modulo the defining relations."""
        rem, _ = self._relation_basis(budget).normal_form(expr, budget)
        return rem


class BElement:
    """An element of B[w..]: optional generator expression plus Laurent form."""

    __slots__ = ("actx", "gen", "laurent")

    def __init__(self, actx: AlgebraContext, gen: Polynomial | None, laurent: LaurentForm):
        object.__setattr__(self, "actx", actx)
        object.__setattr__(self, "gen", gen)
        object.__setattr__(self, "laurent", laurent)

    def __setattr__(self, *args):
        raise AttributeError("BElement is immutable")

    def _check(self, other: "BElement"):
        if self.actx != other.actx:
            raise ContextMismatch("elements of different algebras")

    def is_zero(self) -> bool:
        return self.laurent.is_zero()

    def __eq__(self, other):
        if not isinstance(other, BElement):
            return NotImplemented
        self._check(other)
        return self.laurent == other.laurent

    def __hash__(self):
        return hash((self.actx, self.laurent))

    def _combine(self, other: "BElement", expr, laurent) -> "BElement":
        gen = expr if (self.gen is not None and other.gen is not None) else None
        return BElement(self.actx, gen, laurent)

    def __add__(self, other: "BElement") -> "BElement":
        self._check(other)
        expr = self.gen + other.gen if self.gen is not None and other.gen is not None else None
        return BElement(self.actx, expr, self.laurent + other.laurent)

    def __neg__(self) -> "BElement":
        return BElement(self.actx, -self.gen if self.gen is not None else None, -self.laurent)

    def __sub__(self, other: "BElement") -> "BElement":
        return self + (-other)

    def __mul__(self, other: "BElement") -> "BElement":
        self._check(other)
        expr = self.gen * other.gen if self.gen is not None and other.gen is not None else None
        return BElement(self.actx, expr, self.laurent * other.laurent)

    def scale(self, q) -> "BElement":
        q = Fraction(q)
        return BElement(
            self.actx,
            self.gen.scale(q) if self.gen is not None else None,
            self.laurent.scale(q),
        )

    def __pow__(self, n: int) -> "BElement":
        expr = self.gen ** n if self.gen is not None else None
        return BElement(self.actx, expr, self.laurent ** n)

    def __str__(self):
        if self.gen is not None:
            return str(self.gen)
        return str(self.laurent)

    def __repr__(self):
        return f"<element {self} of {self.actx!r}>"


def eq_elements(a: BElement, b: BElement) -> bool:
    """Equality in the quotient algebra (identical Laurent forms)."""
    a._check(b)
    return a.laurent == b.laurent


class MembershipResult:
    """Outcome of a membership test, with witness or retained basis certificate."""

    __slots__ = ("member", "witness", "certificate")

    def __init__(self, member: bool, witness: Polynomial | None, certificate: list[str]):
        self.member = member
        self.witness = witness
        self.certificate = certificate


def membership_with_witness(
    f: LaurentForm, actx: AlgebraContext, budget: int = DEFAULT_BUDGET
) -> MembershipResult:
    """Decide whether a Laurent form lies in B[w..]; return a generator witness.

    Restricted to base ring R = Q.  When the answer is positive the witness h
    satisfies to_laurent(h) = f (asserted).  When negative, the reduced basis
    of (X^N) + relations is retained as the certificate.
    """
    if not actx.presentation.base.is_rational():
        raise UnsupportedBaseRing(
            "membership over R = Q[u..] with base variables is not supported"
        )
    if f.ctx != actx.coeff_ctx:
        f = f.transfer(actx.coeff_ctx)
    if f.is_zero():
        return MembershipResult(True, actx.gen_ctx.zero(), [])

    n = max(0, -f.min_exp())
    g = f.shift(n).as_poly(actx.gen_ctx, "X")
    if n == 0:
        witness = g
    else:
        gb = actx._membership_basis(n, budget)
        rem, cofs = gb.reduce_to_gens(g, budget)
        if not rem.is_zero():
            return MembershipResult(False, None, [str(p) for p in gb.polys])
        # the cofactor of X^n is a witness; canonicalize it modulo the relations
        witness = actx.reduce_witness(cofs[0], budget)
    if actx.to_laurent(witness) != f:
        raise AssertionError("membership witness does not reproduce the input form")
    return MembershipResult(True, witness, [])


def divide_by_x_power(a: BElement, n: int, budget: int = DEFAULT_BUDGET) -> BElement:
    """The quotient q with x^n * q = a, when it exists in B[w..]."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    shifted = a.laurent.shift(-n)
    result = membership_with_witness(shifted, a.actx, budget)
    if not result.member:
        raise NotInAlgebra(
            f"element is not divisible by X^{n} in the algebra",
            result.certificate,
        )
    return BElement(a.actx, result.witness, shifted)
