"""Laurent polynomials in one inverted variable with polynomial coefficients.

A LaurentForm is a finitely supported map from integer x-exponents to nonzero
Polynomials in the remaining variables.  It models elements of
Q[u..][z, w..][x, x^-1]; equality of forms is equality in that ring, which is
what makes quotient-algebra equality decidable downstream.
"""

from __future__ import annotations

from typing import Mapping

from .poly import Context, ContextMismatch, Polynomial, norm_coeff


class LaurentForm:
    """Finitely supported map x-exponent -> coefficient polynomial."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: Context, coeffs: Mapping[int, Polynomial]):
        clean = {}
        for n, p in coeffs.items():
            if p.ctx != ctx:
                raise ContextMismatch("coefficient context differs from Laurent context")
            if not p.is_zero():
                clean[int(n)] = p
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def _raw(cls, ctx: Context, coeffs: dict) -> "LaurentForm":
        self = object.__new__(cls)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", coeffs)
        return self

    def __setattr__(self, *args):
        raise AttributeError("LaurentForm is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx: Context) -> "LaurentForm":
        return cls._raw(ctx, {})

    @classmethod
    def from_poly(cls, p: Polynomial, exponent: int = 0) -> "LaurentForm":
        if p.is_zero():
            return cls._raw(p.ctx, {})
        return cls._raw(p.ctx, {exponent: p})

    @classmethod
    def x_power(cls, ctx: Context, exponent: int) -> "LaurentForm":
        return cls._raw(ctx, {exponent: ctx.one()})

    @classmethod
    def const(cls, ctx: Context, value) -> "LaurentForm":
        p = ctx.const(value)
        return cls._raw(ctx, {} if p.is_zero() else {0: p})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_exp(self) -> int:
        """Smallest x-exponent with nonzero coefficient; 0 for the zero form."""
        return min(self.coeffs, default=0)

    def max_exp(self) -> int:
        return max(self.coeffs, default=0)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentForm)
            and self.ctx == other.ctx
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ctx, frozenset(self.coeffs.items())))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "LaurentForm"):
        if self.ctx != other.ctx:
            raise ContextMismatch("Laurent forms over different contexts")

    def __add__(self, other: "LaurentForm") -> "LaurentForm":
        self._check(other)
        out = dict(self.coeffs)
        for n, p in other.coeffs.items():
            cur = out.get(n)
            if cur is None:
                out[n] = p
            else:
                s = cur + p
                if s.is_zero():
                    del out[n]
                else:
                    out[n] = s
        return LaurentForm._raw(self.ctx, out)

    def __neg__(self) -> "LaurentForm":
        return LaurentForm._raw(self.ctx, {n: -p for n, p in self.coeffs.items()})

    def __sub__(self, other: "LaurentForm") -> "LaurentForm":
        return self + (-other)

    def __mul__(self, other: "LaurentForm") -> "LaurentForm":
        self._check(other)
        out: dict[int, Polynomial] = {}
        for n1, p1 in self.coeffs.items():
            for n2, p2 in other.coeffs.items():
                n = n1 + n2
                prod = p1 * p2
                cur = out.get(n)
                if cur is None:
                    out[n] = prod
                else:
                    s = cur + prod
                    if s.is_zero():
                        del out[n]
                    else:
                        out[n] = s
        return LaurentForm._raw(self.ctx, out)

    def scale(self, q) -> "LaurentForm":
        q = norm_coeff(q)
        if q == 0:
            return LaurentForm._raw(self.ctx, {})
        return LaurentForm._raw(self.ctx, {n: p.scale(q) for n, p in self.coeffs.items()})

    def shift(self, k: int) -> "LaurentForm":
        """Multiply by x^k."""
        return LaurentForm._raw(self.ctx, {n + k: p for n, p in self.coeffs.items()})

    def __pow__(self, n: int) -> "LaurentForm":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"Laurent power must be a nonnegative integer, got {n}")
        result = LaurentForm.const(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- conversions --------------------------------------------------------

    def transfer(self, new_ctx: Context) -> "LaurentForm":
        if new_ctx == self.ctx:
            return self
        return LaurentForm._raw(new_ctx, {n: p.transfer(new_ctx) for n, p in self.coeffs.items()})

    def substitute(self, images: Mapping[str, "LaurentForm"], target: Context) -> "LaurentForm":
        """Evaluate coefficient variables at Laurent images (x stays x)."""
        out = LaurentForm.zero(target)
        for n, p in self.coeffs.items():
            out = out + eval_poly_at_laurent(p, images, target).shift(n)
        return out

    def as_poly(self, target: Context, x_name: str) -> Polynomial:
        """Convert to an ordinary polynomial with the x variable explicit.

        Requires all exponents nonnegative and all coefficient variables
        present in the target context.
        """
        if self.min_exp() < 0:
            raise ValueError(f"negative x-exponent {self.min_exp()}; not a polynomial")
        out = target.zero()
        x = target.var(x_name)
        for n, p in self.coeffs.items():
            out = out + p.transfer(target) * x ** n
        return out

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for n in sorted(self.coeffs):
            parts.append(f"{n}: {self.coeffs[n]}")
        return "{" + ", ".join(parts) + "}"

    def __repr__(self):
        return f"<laurent {self}>"

    def to_json(self) -> dict:
        return {str(n): str(p) for n, p in sorted(self.coeffs.items())}


def laurent_normalize(ctx: Context, raw: Mapping[int, Polynomial]) -> LaurentForm:
    """Canonicalize a raw exponent map: drop zero entries."""
    return LaurentForm(ctx, raw)


def eval_poly_at_laurent(
    p: Polynomial, images: Mapping[str, LaurentForm], target: Context
) -> LaurentForm:
    """Evaluate a polynomial at Laurent images.

    Variables of p not in `images` must exist in the target coefficient
    context and map to themselves (at x-exponent 0).
    """
    out = LaurentForm.zero(target)
    powers: dict[str, list[LaurentForm]] = {}

    def power(name: str, k: int) -> LaurentForm:
        lst = powers.get(name)
        if lst is None:
            base = images.get(name)
            if base is None:
                base = LaurentForm.from_poly(target.var(name))
            elif base.ctx != target:
                raise ContextMismatch("image context differs from target")
            lst = powers[name] = [LaurentForm.const(target, 1), base]
        while len(lst) <= k:
            lst.append(lst[-1] * lst[1])
        return lst[k]

    names = p.ctx.names
    for exps, coeff in p.terms.items():
        term = LaurentForm.const(target, coeff)
        for i, e in enumerate(exps):
            if e:
                term = term * power(names[i], e)
        out = out + term
    return out
