"""Derivations on finitely presented algebras and nilpotency bookkeeping.

A ring is presented as polynomials modulo an ideal of relations together
with a designated monomial order, so every element has a canonical normal
form.  A derivation is stored by its images on the generators; it is
well-defined on the quotient iff it maps every relation generator into the
relation ideal, which the constructor checks via normal forms.

Local nilpotency is certified on generators: if some power of the derivation
kills every generator, Leibniz makes the whole algebra locally nilpotent.
Degree of an element = number of applications before it vanishes; the zero
element gets NEG_INF.  All iteration is bounded and a missed bound is an
explicit verdict (BoundExceeded / None), never a silent wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ideals import Ideal, MonomialOrder, normal_form
from .poly import NEG_INF, Context, Polynomial


class NotWellDefined(ValueError):
    """Derivation images do not preserve the relation ideal."""


class BoundExceeded(RuntimeError):
    """Iteration bound hit before the iterate vanished."""


class RingPresentation:
    """k[x1..xn]/I together with a designated order for normal forms."""

    __slots__ = ("ctx", "relations", "order")

    def __init__(self, ctx: Context, relations: Ideal | None = None,
                 order: MonomialOrder | None = None):
        self.ctx = ctx
        self.relations = relations if relations is not None else Ideal(ctx, [])
        if self.relations.ctx != ctx:
            raise ValueError("relations in wrong context")
        self.order = order if order is not None else MonomialOrder.grlex(len(ctx))

    def nf(self, p: Polynomial) -> Polynomial:
        if not self.relations.gens:
            return p
        return normal_form(p, self.relations, self.order)

    def eq(self, p: Polynomial, q: Polynomial) -> bool:
        return self.nf(p - q).is_zero()

    def is_zero(self, p: Polynomial) -> bool:
        return self.nf(p).is_zero()

    def __repr__(self):
        return "RingPresentation(%r mod %d relations)" % (self.ctx, len(self.relations.gens))


@dataclass
class NilpotencyCertificate:
    """Per-generator nilpotency orders: name -> smallest i with D^(i+1) = 0."""
    orders: dict
    bound: int

    def max_order(self) -> int:
        return max(self.orders.values(), default=0)


class Derivation:
    """A k-derivation of a presented ring, given by generator images."""

    __slots__ = ("ring", "images", "_var_orders")

    def __init__(self, ring: RingPresentation, images, check: bool = True):
        if len(images) != len(ring.ctx):
            raise ValueError("need one image per generator")
        self.ring = ring
        self.images = tuple(ring.nf(p) for p in images)
        self._var_orders = None
        if check:
            for g in ring.relations.gens:
                v = self._apply_free(g)
                if not ring.is_zero(v):
                    raise NotWellDefined(
                        "derivation does not preserve the relation %s "
                        "(image %s)" % (g, ring.nf(v)))

    def _apply_free(self, p: Polynomial) -> Polynomial:
        out = self.ring.ctx.zero()
        for nm, img in zip(self.ring.ctx.names, self.images):
            if img.is_zero():
                continue
            d = p.partial(nm)
            if not d.is_zero():
                out = out + d * img
        return out

    def apply(self, p: Polynomial) -> Polynomial:
        """Leibniz extension then reduction to normal form."""
        return self.ring.nf(self._apply_free(p))

    def iterate(self, p: Polynomial, k: int) -> Polynomial:
        q = self.ring.nf(p)
        for _ in range(k):
            if q.is_zero():
                return q
            q = self.apply(q)
        return q

    def image_of(self, name: str) -> Polynomial:
        return self.images[self.ring.ctx.index(name)]

    # ------------------------------------------------ nilpotency and degree

    def variable_orders(self, bound: int = 256, term_guard: int | None = None):
        """Nilpotency order per generator, or None when the bound misses."""
        if self._var_orders is not None:
            return self._var_orders
        orders = {}
        for nm in self.ring.ctx.names:
            d = self._deg_reduced(self.ring.nf(self.ring.ctx.var(nm)), bound, term_guard)
            if d is None:
                return None
            orders[nm] = 0 if d == NEG_INF else d
        self._var_orders = orders
        return orders

    def is_locally_nilpotent(self, bound: int = 256, term_guard: int | None = None):
        """NilpotencyCertificate, or None as the no-within-bound verdict."""
        orders = self.variable_orders(bound, term_guard)
        if orders is None:
            return None
        return NilpotencyCertificate(orders, bound)

    def _deg_reduced(self, q: Polynomial, bound: int, term_guard: int | None):
        if q.is_zero():
            return NEG_INF
        for k in range(bound + 1):
            q = self.apply(q)
            if q.is_zero():
                return k
            if term_guard is not None and q.num_terms() > term_guard:
                return None
        return None

    def default_bound(self, p: Polynomial) -> int:
        orders = self.variable_orders()
        if orders is None:
            raise BoundExceeded("no nilpotency certificate for default bound")
        mx = max(orders.values(), default=0)
        return 4 * (mx + 1) * max(p.num_terms(), 1)

    def deg(self, p: Polynomial, bound: int | None = None):
        """deg_D(p): number of applications before extinction; NEG_INF at 0.

        Raises BoundExceeded when the iterate survives the bound, which
        signals either non-nilpotency or a bound chosen too small.
        """
        q = self.ring.nf(p)
        if q.is_zero():
            return NEG_INF
        if bound is None:
            bound = self.default_bound(q)
        d = self._deg_reduced(q, bound, None)
        if d is None:
            raise BoundExceeded("degree iteration exceeded bound %d" % bound)
        return d

    def kernel_member(self, p: Polynomial) -> bool:
        return self.apply(p).is_zero()

    def is_local_slice(self, s: Polynomial) -> bool:
        """D(s) nonzero and D(D(s)) zero, i.e. deg_D(s) = 1."""
        ds = self.apply(s)
        return (not ds.is_zero()) and self.apply(ds).is_zero()

    def __repr__(self):
        ims = ", ".join("%s->%s" % (nm, im)
                        for nm, im in zip(self.ring.ctx.names, self.images))
        return "Derivation(%s)" % ims


def make_derivation(ring: RingPresentation, images, check: bool = True) -> Derivation:
    return Derivation(ring, images, check)


def conjugate(d: Derivation, alpha) -> Derivation:
    """alpha^-1 o d o alpha for an automorphism alpha with a known inverse."""
    if alpha.inverse is None:
        raise ValueError("conjugation needs an automorphism with inverse")
    imgs = []
    for nm in d.ring.ctx.names:
        v = alpha.apply(d.ring.ctx.var(nm))
        v = d.apply(v)
        imgs.append(alpha.inverse.apply(v))
    return Derivation(d.ring, imgs)
