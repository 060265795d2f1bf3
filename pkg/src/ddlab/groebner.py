"""Buchberger's algorithm over Q with cofactor tracking.

Provides reduced Groebner bases, ideal membership with explicit cofactors,
unit-ideal tests, and elimination ideals via block orders.  Pair selection is
plain Buchberger with the product and chain criteria and a deterministic
queue (lcm degree, then index), so bases are reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from operator import add as _add_op
from typing import Iterable, Sequence

from .poly import Context, ContextMismatch, Exponents, Polynomial, coeff_div, grevlex_key

DEFAULT_BUDGET = 100_000


class BudgetExceeded(RuntimeError):
    """The configured reduction-step budget was exhausted."""


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order on a fixed context.

    kind is one of "grevlex", "lex", "elim", "blocks".  For "elim",
    `elim_indices` lists the context positions of the variables to be
    eliminated (they dominate).  For "blocks", `blocks` is an ordered
    partition of all context positions, compared blockwise by grevlex.
    """

    kind: str
    elim_indices: tuple[int, ...] = ()
    blocks: tuple[tuple[int, ...], ...] = ()

    @staticmethod
    def grevlex() -> "MonomialOrder":
        return MonomialOrder("grevlex")

    @staticmethod
    def lex() -> "MonomialOrder":
        return MonomialOrder("lex")

    @staticmethod
    def elim(ctx: Context, eliminate: Iterable[str]) -> "MonomialOrder":
        idx = tuple(sorted(ctx.index(n) for n in eliminate))
        return MonomialOrder("elim", idx)

    @staticmethod
    def block_sequence(ctx: Context, groups: Iterable[Iterable[str]]) -> "MonomialOrder":
        """Ordered blocks of variables; unlisted variables form the last block."""
        blocks = [tuple(ctx.index(n) for n in group) for group in groups]
        used = {i for blk in blocks for i in blk}
        rest = tuple(i for i in range(len(ctx.names)) if i not in used)
        if rest:
            blocks.append(rest)
        return MonomialOrder("blocks", blocks=tuple(blocks))

    def key(self, exps: Exponents) -> tuple:
        if self.kind == "grevlex":
            return grevlex_key(exps)
        if self.kind == "lex":
            return exps
        if self.kind == "elim":
            block = set(self.elim_indices)
            first = tuple(e for i, e in enumerate(exps) if i in block)
            rest = tuple(e for i, e in enumerate(exps) if i not in block)
            return (grevlex_key(first), grevlex_key(rest))
        if self.kind == "blocks":
            return tuple(
                grevlex_key(tuple(exps[i] for i in blk)) for blk in self.blocks
            )
        raise ValueError(f"unknown order kind {self.kind!r}")

    def to_json(self):
        return {
            "kind": self.kind,
            "elim_indices": list(self.elim_indices),
            "blocks": [list(b) for b in self.blocks],
        }


def _leading(p: Polynomial, order: MonomialOrder) -> tuple[Exponents, Fraction]:
    lm = max(p.terms, key=order.key)
    return lm, p.terms[lm]


def _divides(a: Exponents, b: Exponents) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponents, b: Exponents) -> Exponents:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_exp(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x - y for x, y in zip(a, b))


class _Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(
                f"Groebner step budget of {self.limit} reductions exceeded"
            )


class _HeapEntry:
    """Max-heap adapter for monomial order keys (heapq is a min-heap)."""

    __slots__ = ("key", "exps")

    def __init__(self, key, exps):
        self.key = key
        self.exps = exps

    def __lt__(self, other):
        return self.key > other.key


def _normal_form(
    f: Polynomial,
    basis: Sequence[Polynomial],
    leads: Sequence[tuple[Exponents, Fraction]],
    order: MonomialOrder,
    budget: _Budget,
) -> tuple[Polynomial, list[Polynomial]]:
    """Multivariate division, deterministic (first divisor in basis order).

    Works on an in-place term dict with a lazy max-heap of candidate lead
    monomials; every reduction step consumes budget.
    """
    ctx = f.ctx
    key = order.key
    cofs: list[dict] = [{} for _ in basis]
    rem: dict = {}
    work = dict(f.terms)
    heap = [_HeapEntry(key(e), e) for e in work]
    heapq.heapify(heap)
    while heap:
        entry = heapq.heappop(heap)
        e = entry.exps
        c = work.get(e)
        if c is None:
            continue  # stale entry
        for i, (lm_g, lc_g) in enumerate(leads):
            if _divides(lm_g, e):
                budget.tick()
                q_exp = _sub_exp(e, lm_g)
                q_coeff = coeff_div(c, lc_g)
                del work[e]
                for eg, cg in basis[i].terms.items():
                    if eg == lm_g:
                        continue
                    ee = tuple(map(_add_op, q_exp, eg))
                    cur = work.get(ee)
                    if cur is None:
                        work[ee] = -q_coeff * cg
                        heapq.heappush(heap, _HeapEntry(key(ee), ee))
                    else:
                        s = cur - q_coeff * cg
                        if s:
                            work[ee] = s
                        else:
                            del work[ee]
                cof = cofs[i]
                cur = cof.get(q_exp)
                if cur is None:
                    cof[q_exp] = q_coeff
                else:
                    s = cur + q_coeff
                    if s:
                        cof[q_exp] = s
                    else:
                        del cof[q_exp]
                break
        else:
            rem[e] = c
            del work[e]
    return (
        Polynomial._raw(ctx, rem),
        [Polynomial._raw(ctx, c) for c in cofs],
    )


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis, with each element expressed in the input generators."""

    ctx: Context
    order: MonomialOrder
    polys: tuple[Polynomial, ...]
    gens: tuple[Polynomial, ...]
    cofactors: tuple[tuple[Polynomial, ...], ...]  # polys[i] = sum_j cofactors[i][j]*gens[j]

    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant() and not self.polys[0].is_zero()

    def is_zero_ideal(self) -> bool:
        return not self.polys

    def normal_form(self, f: Polynomial, budget: int = DEFAULT_BUDGET) -> tuple[Polynomial, list[Polynomial]]:
        """Remainder of f modulo the basis plus cofactors on the basis elements."""
        if f.ctx != self.ctx:
            raise ContextMismatch("polynomial context differs from basis context")
        leads = [_leading(g, self.order) for g in self.polys]
        return _normal_form(f, self.polys, leads, self.order, _Budget(budget))

    def reduce_to_gens(self, f: Polynomial, budget: int = DEFAULT_BUDGET) -> tuple[Polynomial, list[Polynomial]]:
        """Remainder of f plus cofactors on the original input generators."""
        rem, cofs = self.normal_form(f, budget)
        out = [self.ctx.zero() for _ in self.gens]
        for i, c in enumerate(cofs):
            if c.is_zero():
                continue
            for j, m in enumerate(self.cofactors[i]):
                if not m.is_zero():
                    out[j] = out[j] + c * m
        return rem, out

    def contains(self, f: Polynomial, budget: int = DEFAULT_BUDGET) -> bool:
        return self.normal_form(f, budget)[0].is_zero()


def buchberger(
    gens: Sequence[Polynomial],
    order: MonomialOrder | None = None,
    budget: int = DEFAULT_BUDGET,
    post_check: bool = True,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by gens.

    Deterministic given the order.  Raises BudgetExceeded when the reduction
    budget runs out.  After every run the S-polynomial zero-reduction
    post-check is asserted.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("buchberger requires at least one generator")
    ctx = gens[0].ctx
    for g in gens:
        if g.ctx != ctx:
            raise ContextMismatch("generators in mixed contexts")
    if order is None:
        order = MonomialOrder.grevlex()
    budget_box = _Budget(budget)

    basis: list[Polynomial] = []
    rows: list[list[Polynomial]] = []  # basis[i] = sum_j rows[i][j]*gens[j]
    leads: list[tuple[Exponents, Fraction]] = []

    def push(p: Polynomial, row: list[Polynomial]):
        lm, lc = _leading(p, order)
        basis.append(Polynomial._raw(ctx, {e: coeff_div(c, lc) for e, c in p.terms.items()}))
        rows.append([c.scale(Fraction(1) / lc) for c in row])
        leads.append((lm, Fraction(1)))

    pending: set[tuple[int, int]] = set()
    pair_heap: list[tuple[tuple, int, int]] = []

    def add_pair(i: int, j: int):
        pending.add((i, j))
        key = (sum(_lcm(leads[i][0], leads[j][0])), i, j)
        heapq.heappush(pair_heap, (key, i, j))

    for j, g in enumerate(gens):
        if g.is_zero():
            continue
        row = [ctx.one() if k == j else ctx.zero() for k in range(len(gens))]
        new_index = len(basis)
        push(g, row)
        for i in range(new_index):
            add_pair(i, new_index)

    if not basis:
        return GroebnerBasis(ctx, order, (), tuple(gens), ())

    while pending:
        while True:
            _, i, j = heapq.heappop(pair_heap)
            if (i, j) in pending:
                break
        pending.discard((i, j))
        lm_i, lm_j = leads[i][0], leads[j][0]
        lcm_ij = _lcm(lm_i, lm_j)
        # product criterion: coprime leading monomials never yield new elements
        if lcm_ij == tuple(a + b for a, b in zip(lm_i, lm_j)):
            continue
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if (
                _divides(leads[k][0], lcm_ij)
                and (min(i, k), max(i, k)) not in pending
                and (min(j, k), max(j, k)) not in pending
            ):
                skip = True
                break
        if skip:
            continue
        qi = Polynomial(ctx, {_sub_exp(lcm_ij, lm_i): Fraction(1)})
        qj = Polynomial(ctx, {_sub_exp(lcm_ij, lm_j): Fraction(1)})
        s = qi * basis[i] - qj * basis[j]
        srow = [qi * a - qj * b for a, b in zip(rows[i], rows[j])]
        if s.is_zero():
            continue
        rem, cofs = _normal_form(s, basis, leads, order, budget_box)
        if rem.is_zero():
            continue
        row = srow
        for t, c in enumerate(cofs):
            if not c.is_zero():
                row = [a - c * b for a, b in zip(row, rows[t])]
        new_index = len(basis)
        push(rem, row)
        for t in range(new_index):
            add_pair(t, new_index)

    # minimalize: drop elements whose leading monomial is divisible by another's
    keep = []
    for i in range(len(basis)):
        lm_i = leads[i][0]
        dominated = False
        for k in range(len(basis)):
            if k == i:
                continue
            lm_k = leads[k][0]
            if _divides(lm_k, lm_i) and (lm_k != lm_i or k < i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    minimal = [(basis[i], rows[i]) for i in keep]

    # tail-reduce each survivor against the others
    reduced: list[tuple[Polynomial, list[Polynomial]]] = []
    for i, (p, row) in enumerate(minimal):
        others = [q for k, (q, _) in enumerate(minimal) if k != i]
        other_rows = [r for k, (_, r) in enumerate(minimal) if k != i]
        other_leads = [_leading(q, order) for q in others]
        rem, cofs = _normal_form(p, others, other_leads, order, budget_box)
        new_row = row
        for t, c in enumerate(cofs):
            if not c.is_zero():
                new_row = [a - c * b for a, b in zip(new_row, other_rows[t])]
        lm, lc = _leading(rem, order)
        rem = Polynomial._raw(ctx, {e: coeff_div(c, lc) for e, c in rem.terms.items()})
        new_row = [c.scale(Fraction(1) / lc) for c in new_row]
        reduced.append((rem, new_row))

    reduced.sort(key=lambda pr: order.key(_leading(pr[0], order)[0]), reverse=True)
    polys = tuple(p for p, _ in reduced)
    cof_matrix = tuple(tuple(r) for _, r in reduced)
    gb = GroebnerBasis(ctx, order, polys, tuple(gens), cof_matrix)

    _assert_basis_sound(gb, budget_box)
    return gb


def _assert_basis_sound(gb: GroebnerBasis, budget_box: _Budget):
    """Post-run checks: every S-polynomial reduces to zero; cofactor rows are exact."""
    order = gb.order
    leads = [_leading(g, order) for g in gb.polys]
    ctx = gb.ctx
    for i in range(len(gb.polys)):
        for j in range(i + 1, len(gb.polys)):
            lcm_ij = _lcm(leads[i][0], leads[j][0])
            if lcm_ij == tuple(a + b for a, b in zip(leads[i][0], leads[j][0])):
                continue  # coprime leads: the S-polynomial reduces to zero by theory
            qi = Polynomial(ctx, {_sub_exp(lcm_ij, leads[i][0]): Fraction(1)})
            qj = Polynomial(ctx, {_sub_exp(lcm_ij, leads[j][0]): Fraction(1)})
            s = qi.scale(coeff_div(1, leads[i][1])) * gb.polys[i] - qj.scale(coeff_div(1, leads[j][1])) * gb.polys[j]
            if s.is_zero():
                continue
            rem, _ = _normal_form(s, gb.polys, leads, order, budget_box)
            if not rem.is_zero():
                raise AssertionError("S-polynomial of returned basis does not reduce to zero")
    for p, row in zip(gb.polys, gb.cofactors):
        acc = ctx.zero()
        for c, g in zip(row, gb.gens):
            acc = acc + c * g
        if acc != p:
            raise AssertionError("cofactor row does not reproduce basis element")


def normal_form_with_cofactors(
    f: Polynomial, gb: GroebnerBasis, budget: int = DEFAULT_BUDGET
) -> tuple[Polynomial, list[Polynomial]]:
    """Division of f by the basis: f = sum(cofactor_i*basis_i) + remainder."""
    return gb.normal_form(f, budget)


def is_unit_ideal(
    gens: Sequence[Polynomial],
    order: MonomialOrder | None = None,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """True iff the ideal generated by gens is the whole ring (reduced basis {1})."""
    nonzero = [g for g in gens if not g.is_zero()]
    if not nonzero:
        return False
    return buchberger(nonzero, order, budget).is_unit()


def elimination_ideal(
    gens: Sequence[Polynomial],
    keep: Iterable[str],
    budget: int = DEFAULT_BUDGET,
) -> list[Polynomial]:
    """Groebner basis of (gens) intersected with the subring on `keep` variables."""
    nonzero = [g for g in gens if not g.is_zero()]
    if not nonzero:
        return []
    ctx = nonzero[0].ctx
    keep = set(keep)
    for name in keep:
        ctx.index(name)  # validates
    eliminate = [n for n in ctx.names if n not in keep]
    order = MonomialOrder.elim(ctx, eliminate)
    gb = buchberger(nonzero, order, budget)
    return [p for p in gb.polys if p.support_vars() <= keep]
