"""Groebner bases over Q and the ideal operations built on them.

Buchberger with the normal selection strategy (no sugar), full reduction and
final autoreduction.  A global step budget bounds the number of single-term
reductions; hitting it raises BudgetExhausted, so a too-small budget can only
ever produce an explicit failure, never a wrong basis.

Monomial orders: lex, graded lex, and weight-refined (weight first, lex on a
declared variable permutation as tie-break; zero weights are allowed).  An
order is described by data, so cached bases can be keyed by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import smith_normal_form
from .poly import Context, Polynomial, mono_div, mono_lcm, mono_mul, mono_wdeg

DEFAULT_BUDGET = 10 ** 6


class BudgetExhausted(RuntimeError):
    """The reduction-step budget ran out before the computation finished."""


class Budget:
    __slots__ = ("left",)

    def __init__(self, steps: int = DEFAULT_BUDGET):
        self.left = int(steps)

    def step(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExhausted("reduction budget exhausted")


def _as_budget(b) -> Budget:
    if b is None:
        return Budget()
    if isinstance(b, Budget):
        return b
    return Budget(b)


class MonomialOrder:
    """Total order on monomials, given by kind + permutation (+ weights)."""

    __slots__ = ("kind", "perm", "weights")

    def __init__(self, kind: str, perm: Sequence[int], weights=None):
        if kind not in ("lex", "grlex", "weight"):
            raise ValueError("unknown order kind %r" % kind)
        self.kind = kind
        self.perm = tuple(perm)
        self.weights = None if weights is None else tuple(weights)
        if kind == "weight":
            if self.weights is None:
                raise ValueError("weight order needs a weight vector")
            if any(w < 0 for w in self.weights):
                raise ValueError("weights must be non-negative")

    @classmethod
    def lex(cls, n: int, perm=None):
        return cls("lex", perm if perm is not None else range(n))

    @classmethod
    def grlex(cls, n: int, perm=None):
        return cls("grlex", perm if perm is not None else range(n))

    @classmethod
    def weight(cls, w: Sequence[int], perm=None):
        return cls("weight", perm if perm is not None else range(len(w)), w)

    def key(self, m):
        """Sort key; larger key means larger monomial."""
        if self.kind == "lex":
            return tuple(m[i] for i in self.perm)
        if self.kind == "grlex":
            return (sum(m),) + tuple(m[i] for i in self.perm)
        return (mono_wdeg(m, self.weights),) + tuple(m[i] for i in self.perm)

    def signature(self):
        return (self.kind, self.perm, self.weights)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return "MonomialOrder%r" % (self.signature(),)


def leading_monomial(p: Polynomial, order: MonomialOrder):
    if p.is_zero():
        raise ValueError("zero polynomial has no leading monomial")
    return max(p.terms, key=order.key)


def leading_term(p: Polynomial, order: MonomialOrder):
    m = leading_monomial(p, order)
    return m, p.terms[m]


def monic(p: Polynomial, order: MonomialOrder) -> Polynomial:
    m, c = leading_term(p, order)
    return p if c == 1 else p * (1 / c)


def exact_quotient(p: Polynomial, d: Polynomial,
                   order: MonomialOrder | None = None):
    """p / d when d divides p exactly in the polynomial ring, else None."""
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p
    if order is None:
        order = MonomialOrder.grlex(len(p.ctx))
    lm, lc = leading_term(d, order)
    q = p.ctx.zero()
    r = p
    while not r.is_zero():
        m, c = leading_term(r, order)
        mm = mono_div(m, lm)
        if mm is None:
            return None
        t = Polynomial(p.ctx, {mm: c / lc})
        q = q + t
        r = r - t * d
    return q


class Ideal:
    """Finitely generated ideal with per-order cached reduced Groebner bases."""

    __slots__ = ("ctx", "gens", "_gb")

    def __init__(self, ctx: Context, gens: Sequence[Polynomial]):
        for g in gens:
            if g.ctx != ctx:
                raise ValueError("generator in wrong context")
        self.ctx = ctx
        self.gens = tuple(g for g in gens if not g.is_zero())
        self._gb: dict = {}

    def __repr__(self):
        return "Ideal(%s)" % "; ".join(str(g) for g in self.gens)

    def groebner(self, order: MonomialOrder, budget=None):
        sig = order.signature()
        if sig not in self._gb:
            self._gb[sig] = buchberger(self.gens, order, budget)
        return self._gb[sig]

    def cache_groebner(self, order: MonomialOrder, basis):
        self._gb[order.signature()] = list(basis)


def nf_against(p: Polynomial, basis, order: MonomialOrder, budget=None) -> Polynomial:
    """Full normal form of p against a list of polynomials."""
    budget = _as_budget(budget)
    lead = [(leading_monomial(g, order), g) for g in basis]
    work = dict(p.terms)
    rem: dict = {}
    while work:
        m = max(work, key=order.key)
        c = work.pop(m)
        if c == 0:
            continue
        hit = None
        for lm, g in lead:
            q = mono_div(m, lm)
            if q is not None:
                hit = (q, lm, g)
                break
        if hit is None:
            rem[m] = rem.get(m, 0) + c
            continue
        budget.step()
        q, lm, g = hit
        fac = c / g.terms[lm]
        for gm, gc in g.terms.items():
            if gm == lm:
                continue
            t = mono_mul(gm, q)
            nv = work.get(t, 0) - fac * gc
            if nv:
                work[t] = nv
            else:
                work.pop(t, None)
    return Polynomial(p.ctx, rem)


def _spoly(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    mf, cf = leading_term(f, order)
    mg, cg = leading_term(g, order)
    l = mono_lcm(mf, mg)
    tf = Polynomial(f.ctx, {mono_div(l, mf): 1 / cf})
    tg = Polynomial(g.ctx, {mono_div(l, mg): 1 / cg})
    return tf * f - tg * g


def buchberger(gens, order: MonomialOrder, budget=None):
    """Reduced Groebner basis (monic, autoreduced, deterministically sorted)."""
    budget = _as_budget(budget)
    basis = []
    for g in gens:
        if not g.is_zero():
            basis.append(monic(g, order))
    if not basis:
        return []
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    while pairs:
        # normal strategy: smallest lcm first
        best = min(
            range(len(pairs)),
            key=lambda k: order.key(mono_lcm(
                leading_monomial(basis[pairs[k][0]], order),
                leading_monomial(basis[pairs[k][1]], order))))
        i, j = pairs.pop(best)
        fi, fj = basis[i], basis[j]
        mi = leading_monomial(fi, order)
        mj = leading_monomial(fj, order)
        if mono_lcm(mi, mj) == mono_mul(mi, mj):
            continue  # coprime leading terms, S-poly reduces to zero
        r = nf_against(_spoly(fi, fj, order), basis, order, budget)
        if not r.is_zero():
            basis.append(monic(r, order))
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))
    return _autoreduce(basis, order, budget)


def _autoreduce(basis, order, budget):
    basis = list(basis)
    # drop redundant leading terms first
    basis.sort(key=lambda g: order.key(leading_monomial(g, order)))
    kept = []
    for g in basis:
        lm = leading_monomial(g, order)
        if not any(mono_div(lm, leading_monomial(h, order)) is not None for h in kept):
            kept.append(g)
    changed = True
    while changed:
        changed = False
        for i in range(len(kept)):
            others = kept[:i] + kept[i + 1:]
            r = nf_against(kept[i], others, order, budget) if others else kept[i]
            if r.is_zero():
                kept.pop(i)
                changed = True
                break
            r = monic(r, order)
            if r != kept[i]:
                kept[i] = r
                changed = True
    kept.sort(key=lambda g: order.key(leading_monomial(g, order)))
    return kept


def normal_form(p: Polynomial, ideal: Ideal, order: MonomialOrder, budget=None) -> Polynomial:
    """Canonical representative of p modulo the ideal, for the given order."""
    gb = ideal.groebner(order, budget)
    if not gb:
        return p
    return nf_against(p, gb, order, budget)


def member(p: Polynomial, ideal: Ideal, order: MonomialOrder | None = None, budget=None) -> bool:
    if order is None:
        order = MonomialOrder.grlex(len(ideal.ctx))
    return normal_form(p, ideal, order, budget).is_zero()


def ideal_equal(a: Ideal, b: Ideal, budget=None) -> bool:
    """Mutual membership of generators."""
    if a.ctx != b.ctx:
        return False
    order = MonomialOrder.grlex(len(a.ctx))
    return (all(member(g, b, order, budget) for g in a.gens)
            and all(member(g, a, order, budget) for g in b.gens))


def eliminate(ideal: Ideal, drop: Sequence[str], budget=None) -> Ideal:
    """Generators of (ideal intersect subring without the dropped variables).

    Uses a lex order with the dropped block in front, which has the
    elimination property.  The result lives in the restricted context.
    """
    drop = list(drop)
    if not drop:
        return ideal
    ctx = ideal.ctx
    drop_idx = [ctx.index(nm) for nm in drop]
    rest_idx = [i for i in range(len(ctx)) if i not in set(drop_idx)]
    order = MonomialOrder.lex(len(ctx), perm=drop_idx + rest_idx)
    gb = ideal.groebner(order, budget)
    small = ctx.without(drop)
    kept = []
    for g in gb:
        if all(all(m[i] == 0 for i in drop_idx) for m in g.terms):
            kept.append(g.restrict(small))
    return Ideal(small, kept)


def saturate(ideal: Ideal, f: Polynomial, budget=None) -> Ideal:
    """ideal : f^infinity, via the usual 1 - t*f trick and elimination."""
    ctx = ideal.ctx
    tname = "_t"
    while tname in ctx:
        tname += "_"
    ext = Context((tname,) + ctx.names)
    gens = [g.lift(ext) for g in ideal.gens]
    gens.append(ext.one() - ext.var(tname) * f.lift(ext))
    out = eliminate(Ideal(ext, gens), [tname], budget)
    return Ideal(ctx, [g.restrict(ctx) for g in out.gens])


def initial_ideal(ideal: Ideal, w: Sequence[int], perm=None, budget=None) -> Ideal:
    """Ideal of w-top forms, computed from a Groebner basis for a
    w-refined order.  The top forms of that basis are again a reduced
    Groebner basis (same leading terms), so it is cached on the result."""
    order = MonomialOrder.weight(w, perm)
    gb = ideal.groebner(order, budget)
    tops = [g.top_form(w) for g in gb]
    out = Ideal(ideal.ctx, tops)
    out.cache_groebner(order, tops)
    return out


def product_of_variables(ctx: Context) -> Polynomial:
    p = ctx.one()
    for g in ctx.gens():
        p = p * g
    return p


@dataclass
class BinomialPrimality:
    """Outcome of the lattice-ideal primality test."""
    status: str  # "prime" | "not-prime" | "inapplicable"
    reason: str = ""
    lattice_rows: list = field(default_factory=list)
    divisors: list = field(default_factory=list)
    saturation_certified: bool = False

    def __bool__(self):
        return self.status == "prime"


def binomial_prime(ideal: Ideal, order: MonomialOrder | None = None, budget=None) -> BinomialPrimality:
    """Decide primality for pure-difference binomial ideals.

    Route: reduced basis must consist of differences of two monomials with
    coefficients +1/-1; the ideal must equal its saturation with respect to
    the product of all variables (lattice-ideal certificate); then the ideal
    is prime exactly when all elementary divisors of the exponent-difference
    lattice are 1.  Anything outside that shape is reported inapplicable,
    never guessed.
    """
    if order is None:
        order = MonomialOrder.grlex(len(ideal.ctx))
    gb = ideal.groebner(order, budget)
    if not gb:
        return BinomialPrimality("prime", "zero ideal", saturation_certified=True)
    rows = []
    for g in gb:
        if len(g.terms) != 2:
            return BinomialPrimality(
                "inapplicable", "generator %s is not a binomial" % g)
        (m1, c1), (m2, c2) = sorted(g.terms.items(), key=lambda mc: order.key(mc[0]), reverse=True)
        if c1 != 1 or c2 != -1:
            return BinomialPrimality(
                "inapplicable", "generator %s is not a pure difference" % g)
        rows.append([a - b for a, b in zip(m1, m2)])
    sat = saturate(ideal, product_of_variables(ideal.ctx), budget)
    if not ideal_equal(sat, ideal, budget):
        return BinomialPrimality(
            "inapplicable", "not saturated with respect to the variables",
            lattice_rows=rows)
    divisors = smith_normal_form(rows)
    if all(d == 1 for d in divisors):
        return BinomialPrimality("prime", "lattice is saturated",
                                 lattice_rows=rows, divisors=divisors,
                                 saturation_certified=True)
    return BinomialPrimality("not-prime",
                             "elementary divisors %r" % (divisors,),
                             lattice_rows=rows, divisors=divisors,
                             saturation_certified=True)
