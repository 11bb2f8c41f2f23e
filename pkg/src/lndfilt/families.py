"""Hypersurface families with canonical locally nilpotent derivations.

Three constructors, each returning a fully verified instance:

* make_danielewski(n, P):  k[x,y,z] / (x^n z - P(x,y)) with P monic in y of
  degree m >= 2, derivation x^n d/dy + (dP/dy) d/dz, degrees (0, 1, m).
* make_koras_russell2(n, e, l, Q):  k[x,z,t,y] / (y (x^n+z^e)^l - Q(x,z,t))
  with Q monic in t of degree m >= 2, derivation (dQ/dt) d/dy +
  (x^n+z^e)^l d/dt, degrees (0, 0, 1, m).
* make_new_family(n, e, P, Q):  k[x,y,z] / (x^n y - P(x, s)) where
  s = Q(x,y) - x^e z, derivation x^e P_s d/dy + (Q_y P_s - x^n) d/dz,
  degrees (0, d, m d) and deg s = 1.

Verification means: declared generator degrees match the iteration oracle,
the slice really is a local slice, and the plinth generator equals the
image of the slice and lies in the kernel.  Constructors translate the main
variable by a rational root to put the origin on the hypersurface, and
reject inputs where no rational translation exists.

The module also houses the bounded derivation search (desk-scale evidence
that every locally nilpotent derivation is a kernel multiple of the
canonical one) and the layer-formula checks for the closed-form filtration
descriptions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .derivations import (Derivation, NilpotencyCertificate, RingPresentation)
from .filtration import FiltrationSpec, PreconditionError, _bounded_exponents
from .ideals import Ideal, exact_quotient
from .linalg import SparseSpan, nullspace, rational_roots, solve_combination
from .poly import Context, Polynomial


class FamilyInstance:
    """A presented ring, its canonical derivation and the declared data."""

    def __init__(self, family: str, params: dict, ring: RingPresentation,
                 derivation: Derivation, kernel_gens, slice_elem,
                 plinth_gen, degrees: dict, slice_names=None):
        self.family = family
        self.params = params
        self.ring = ring
        self.derivation = derivation
        self.kernel_gens = list(kernel_gens)
        self.slice_elem = slice_elem
        self.plinth_gen = plinth_gen
        self.degrees = dict(degrees)
        if not ring.eq(derivation.apply(slice_elem), plinth_gen):
            raise PreconditionError("plinth generator is not the slice image")
        if not derivation.kernel_member(plinth_gen):
            raise PreconditionError("plinth generator not in the kernel")
        # validates kernel membership, the slice and all declared degrees
        self.filtration = FiltrationSpec(
            derivation, kernel_gens, [slice_elem], degrees,
            slice_names=slice_names)

    def __repr__(self):
        ps = ", ".join("%s=%s" % (k, v) for k, v in sorted(self.params.items())
                       if isinstance(v, int))
        return "FamilyInstance(%s, %s)" % (self.family, ps)

    def relation(self) -> Polynomial:
        return self.ring.relations.gens[0]

    def expected_graded_relations(self):
        """Closed forms the graded presentation must kill, per family."""
        ctx = self.filtration.ext_ctx
        x = ctx.var("x")
        if self.family == "danielewski":
            n, m = self.params["n"], self.params["m"]
            return [x ** n * ctx.var("z") - ctx.var("y") ** m]
        if self.family == "koras-russell-2":
            n, e, l = self.params["n"], self.params["e"], self.params["l"]
            m = self.params["m"]
            return [ctx.var("y") * (x ** n + ctx.var("z") ** e) ** l
                    - ctx.var("t") ** m]
        n, e = self.params["n"], self.params["e"]
        d, m = self.params["d"], self.params["m"]
        s, y, z = ctx.var("s"), ctx.var("y"), ctx.var("z")
        return [x ** n * y - s ** d, y ** m - x ** e * z]

    def describe(self) -> dict:
        return {
            "family": self.family,
            "parameters": {k: (str(v) if isinstance(v, Polynomial) else v)
                           for k, v in self.params.items()},
            "relation": str(self.relation()),
            "derivation": {nm: str(self.derivation.image_of(nm))
                           for nm in self.ring.ctx.names},
            "degrees": self.degrees,
            "kernel_generators": [str(g) for g in self.kernel_gens],
            "slice": str(self.slice_elem),
            "plinth_generator": str(self.plinth_gen),
        }


def _as_poly(p, ctx: Context, what: str) -> Polynomial:
    if not isinstance(p, Polynomial):
        raise TypeError("%s must be a Polynomial" % what)
    for nm in p.ctx.names:
        if nm not in ctx and p.degree_in(nm) > 0:
            raise PreconditionError(
                "%s may only involve %s" % (what, ", ".join(ctx.names)))
    return p.restrict(ctx) if p.ctx != ctx else p


def _monic_in(p: Polynomial, name: str, what: str) -> int:
    d = p.degree_in(name)
    lead = p.coeffs_in(name).get(d)
    if lead is None or not (lead.is_constant() and lead.constant_value() == 1):
        raise PreconditionError("%s must be monic in %s" % (what, name))
    return d


def _translate_to_root(p: Polynomial, name: str, what: str) -> tuple:
    """Shift `name` by a rational root so p vanishes when all vars are 0."""
    origin = {nm: Fraction(0) for nm in p.ctx.names}
    if p.eval_rational(origin) == 0:
        return p, Fraction(0)
    coeffs = p.coeffs_in(name)
    origin_row = {nm: Fraction(0) for nm in p.ctx.names}
    uni = [coeffs.get(j, p.ctx.zero()).eval_rational(origin_row)
           for j in range(max(coeffs) + 1)]
    roots = rational_roots(uni)
    if not roots:
        raise PreconditionError(
            "%s has no rational root in %s; cannot move the origin onto "
            "the hypersurface" % (what, name))
    c = sorted(roots, key=lambda r: (abs(r), r))[0]
    shifted = p.subs({name: p.ctx.var(name) + c}, p.ctx)
    return shifted, c


def make_danielewski(n: int, P: Polynomial,
                     translate_origin: bool = True) -> FamilyInstance:
    """x^n z = P(x,y) with the triangular derivation (0, x^n, dP/dy).

    translate_origin=False skips the y-translation that puts the origin on
    the hypersurface; callers use it when a different normalization of P
    (such as a vanishing subleading coefficient) must be kept.
    """
    if n < 2:
        raise PreconditionError("need n >= 2")
    ctx_p = Context(["x", "y"])
    P = _as_poly(P, ctx_p, "P")
    m = _monic_in(P, "y", "P")
    if m < 2:
        raise PreconditionError("need deg_y P >= 2")
    if translate_origin:
        P, _ = _translate_to_root(P, "y", "P")
    ctx = Context(["x", "y", "z"])
    x, y, z = ctx.gens()
    rel = x ** n * z - P.lift(ctx)
    ring = RingPresentation(ctx, Ideal(ctx, [rel]))
    D = Derivation(ring, [ctx.zero(), x ** n, P.partial("y").lift(ctx)])
    return FamilyInstance(
        "danielewski", {"n": n, "m": m, "P": P}, ring, D,
        kernel_gens=[x], slice_elem=y, plinth_gen=x ** n,
        degrees={"x": 0, "y": 1, "z": m})


def make_koras_russell2(n: int, e: int, l: int, Q: Polynomial) -> FamilyInstance:
    """y (x^n+z^e)^l = Q(x,z,t) with derivation (dQ/dt) d/dy + (x^n+z^e)^l d/dt."""
    if min(n, e, l) < 2:
        raise PreconditionError("need n, e, l >= 2")
    ctx_q = Context(["x", "z", "t"])
    Q = _as_poly(Q, ctx_q, "Q")
    m = _monic_in(Q, "t", "Q")
    if m < 2:
        raise PreconditionError("need deg_t Q >= 2")
    Q, _ = _translate_to_root(Q, "t", "Q")
    ctx = Context(["x", "z", "t", "y"])
    x, z, t, y = ctx.gens()
    core = (x ** n + z ** e) ** l
    rel = y * core - Q.lift(ctx)
    ring = RingPresentation(ctx, Ideal(ctx, [rel]))
    D = Derivation(ring, [ctx.zero(), ctx.zero(), core,
                          Q.partial("t").lift(ctx)])
    return FamilyInstance(
        "koras-russell-2", {"n": n, "e": e, "l": l, "m": m, "Q": Q}, ring, D,
        kernel_gens=[x, z], slice_elem=t, plinth_gen=core,
        degrees={"x": 0, "z": 0, "t": 1, "y": m})


def make_new_family(n: int, e: int, P: Polynomial, Q: Polynomial) -> FamilyInstance:
    """x^n y = P(x, s) for s = Q(x,y) - x^e z, with deg s = 1.

    The derivation sends y to x^e P_s(x,s) and z to Q_y(x,y) P_s(x,s) - x^n,
    so s maps to x^(n+e) exactly.
    """
    if n < 2 or e < 1:
        raise PreconditionError("need n >= 2 and e >= 1")
    ctx_p = Context(["x", "s"])
    ctx_q = Context(["x", "y"])
    P = _as_poly(P, ctx_p, "P")
    Q = _as_poly(Q, ctx_q, "Q")
    d = _monic_in(P, "s", "P")
    m = _monic_in(Q, "y", "Q")
    if d < 2 or m < 1:
        raise PreconditionError("need deg_s P >= 2 and deg_y Q >= 1")
    # move the origin onto the hypersurface: root-shift y inside Q, then
    # shift the constant of Q over into P so the slice vanishes at 0
    composed = P.subs({"x": ctx_q.zero(), "s": Q.subs({"x": ctx_q.zero()})},
                      ctx_q)
    _, y0 = _translate_to_root(composed, "y", "P(0, Q(0, y))")
    if y0 != 0:
        Q = Q.subs({"y": ctx_q.var("y") + y0}, ctx_q)
    c = Q.eval_rational({"x": Fraction(0), "y": Fraction(0)})
    if c != 0:
        Q = Q - ctx_q.const(c)
        P = P.subs({"s": ctx_p.var("s") + c}, ctx_p)
    ctx = Context(["x", "y", "z"])
    x, y, z = ctx.gens()
    s_elem = Q.lift(ctx) - x ** e * z
    P_s = P.partial("s").subs({"s": s_elem}, ctx)
    rel = x ** n * y - P.subs({"s": s_elem}, ctx)
    ring = RingPresentation(ctx, Ideal(ctx, [rel]))
    D = Derivation(ring, [ctx.zero(), x ** e * P_s,
                          Q.partial("y").lift(ctx) * P_s - x ** n])
    if D._apply_free(s_elem) != x ** (n + e):
        raise PreconditionError("slice image is not x^(n+e); bad input")
    return FamilyInstance(
        "new-family", {"n": n, "e": e, "d": d, "m": m, "P": P, "Q": Q},
        ring, D, kernel_gens=[x], slice_elem=s_elem,
        plinth_gen=x ** (n + e), degrees={"x": 0, "y": d, "z": m * d},
        slice_names=["s"])


def singular_at_origin(relation: Polynomial) -> bool:
    """Jacobian test at 0; requires the origin on the hypersurface."""
    origin = {nm: Fraction(0) for nm in relation.ctx.names}
    if relation.eval_rational(origin) != 0:
        raise ValueError("origin is not on the hypersurface")
    return all(relation.partial(nm).eval_rational(origin) == 0
               for nm in relation.ctx.names)


# ------------------------------------------------------------ bounded search

@dataclass
class LndCandidate:
    derivation: Derivation
    certificate: NilpotencyCertificate
    classification: str        # "multiple-of-canonical" | "other"
    factor: Polynomial | None
    source: str                # "basis" | "sample" | "canonical"


@dataclass
class LndSearchResult:
    solution_dimension: int
    candidates: list = field(default_factory=list)
    rejected: int = 0
    trivial: int = 0           # vectors whose images reduce to 0 mod relations
    notes: list = field(default_factory=list)

    def all_classified_canonical(self) -> bool:
        return all(c.classification == "multiple-of-canonical"
                   for c in self.candidates)


def _monomials_up_to(ctx: Context, degree: int):
    n = len(ctx)
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            expo = [0] * n
            for i in combo:
                expo[i] += 1
            out.append(tuple(expo))
    return out


def bounded_lnd_search(inst: FamilyInstance, image_degree_bound: int,
                       nilp_bound: int, samples: int = 5, seed: int = 3,
                       term_guard: int = 300) -> LndSearchResult:
    """Solve for all derivations with images of bounded degree, then filter
    by bounded nilpotency and classify against the canonical derivation.

    The well-definedness condition D(rel) = h * rel is linear in the image
    coefficients once the cofactor h (degree <= bound - 1) joins the
    unknowns.  Nilpotency is tested on each nullspace basis vector and on a
    few random combinations; nilpotent derivations do not form a linear
    space, so this is evidence, not a classification of the whole space.
    """
    if image_degree_bound < 1 or nilp_bound < 1:
        raise PreconditionError("bounds must be at least 1")
    ring = inst.ring
    ctx = ring.ctx
    rel = inst.relation()
    img_monos = _monomials_up_to(ctx, image_degree_bound)
    cof_monos = _monomials_up_to(ctx, image_degree_bound - 1)
    partials = [rel.partial(nm) for nm in ctx.names]

    columns = []
    for vi in range(len(ctx)):
        for mono in img_monos:
            columns.append(partials[vi] * ctx.monomial(mono))
    for mono in cof_monos:
        columns.append(-(rel * ctx.monomial(mono)))

    row_index: dict = {}
    for p in columns:
        for mm in p.terms:
            row_index.setdefault(mm, len(row_index))
    rows = [[Fraction(0)] * len(columns) for _ in range(len(row_index))]
    for j, p in enumerate(columns):
        for mm, c in p.terms.items():
            rows[row_index[mm]][j] = c
    basis = nullspace(rows, len(columns))

    nimg = len(img_monos)

    def vector_to_derivation(vec):
        images = []
        for vi in range(len(ctx)):
            terms: dict = {}
            for k, mono in enumerate(img_monos):
                c = vec[vi * nimg + k]
                if c:
                    terms[mono] = Fraction(c)
            images.append(Polynomial(ctx, terms))
        return Derivation(ring, images, check=True)

    result = LndSearchResult(solution_dimension=len(basis))
    seen_keys = set()

    def consider(vec, source):
        D = vector_to_derivation(vec)
        if all(img.is_zero() for img in D.images):
            result.trivial += 1
            return None
        key = tuple(img.key() for img in D.images)
        if key in seen_keys:
            return None
        cert = D.is_locally_nilpotent(nilp_bound, term_guard)
        if cert is None:
            result.rejected += 1
            return None
        seen_keys.add(key)
        cls, factor = _classify_against_canonical(inst, D, image_degree_bound)
        result.candidates.append(LndCandidate(D, cert, cls, factor, source))
        return D

    for vec in basis:
        consider(vec, "basis")
    rng = random.Random(seed)
    for _ in range(samples):
        if not basis:
            break
        coeffs = [rng.randint(-2, 2) for _ in basis]
        if not any(coeffs):
            coeffs[rng.randrange(len(basis))] = 1
        vec = [sum(c * b[i] for c, b in zip(coeffs, basis))
               for i in range(len(basis[0]))]
        consider(vec, "sample")

    canonical_images = [ring.nf(inst.derivation.image_of(nm))
                        for nm in ctx.names]
    if all(img.degree() <= image_degree_bound or img.is_zero()
           for img in canonical_images):
        have = any(
            all(ring.eq(c.derivation.image_of(nm), inst.derivation.image_of(nm))
                for nm in ctx.names)
            for c in result.candidates)
        if not have:
            cert = inst.derivation.is_locally_nilpotent(nilp_bound, term_guard)
            if cert is not None:
                cls, factor = _classify_against_canonical(
                    inst, inst.derivation, image_degree_bound)
                result.candidates.append(LndCandidate(
                    inst.derivation, cert, cls, factor, "canonical"))
    else:
        result.notes.append(
            "canonical derivation exceeds the image degree bound")
    return result


def _classify_against_canonical(inst: FamilyInstance, D: Derivation,
                                degree_bound: int):
    """multiple-of-canonical when D = f * canonical for one f in the kernel
    variables; returns (classification, f or None)."""
    ring = inst.ring
    ctx = ring.ctx
    for z in inst.kernel_gens:
        if not ring.is_zero(D.apply(z)):
            return "other", None
    target = ring.nf(D.apply(inst.slice_elem))
    plinth = ring.nf(inst.plinth_gen)
    f = exact_quotient(target, plinth)
    if f is None:
        f = _quotient_by_linear_solve(inst, target, plinth, degree_bound)
        if f is None:
            return "other", None
    kernel_names = {nm for g in inst.kernel_gens for nm in ctx.names
                    if g.degree_in(nm) > 0}
    for nm in ctx.names:
        if nm not in kernel_names and f.degree_in(nm) > 0:
            return "other", None
    for nm in ctx.names:
        if not ring.is_zero(D.image_of(nm) - f * inst.derivation.image_of(nm)):
            return "other", None
    return "multiple-of-canonical", f


def _quotient_by_linear_solve(inst, target, plinth, degree_bound):
    ctx = inst.ring.ctx
    kern_idx = [ctx.index(g.ctx.names[_single_var_index(g)])
                for g in inst.kernel_gens]
    cand = []
    for expo, _ in _bounded_exponents([(i, 1) for i in kern_idx], degree_bound):
        mono = [0] * len(ctx)
        for i, e in expo:
            mono[i] = e
        cand.append(ctx.monomial(mono))
    rows_polys = [inst.ring.nf(c * plinth) for c in cand]
    cols = sorted({m for p in rows_polys for m in p.terms} | set(target.terms))
    ix = {m: j for j, m in enumerate(cols)}
    rows = []
    for p in rows_polys:
        row = [Fraction(0)] * len(cols)
        for m, c in p.terms.items():
            row[ix[m]] = c
        rows.append(row)
    trow = [Fraction(0)] * len(cols)
    for m, c in target.terms.items():
        trow[ix[m]] = c
    sol = solve_combination(rows, trow)
    if sol is None:
        return None
    f = ctx.zero()
    for c, mono in zip(sol, cand):
        if c:
            f = f + mono * c
    return f


def _single_var_index(p: Polynomial) -> int:
    (m, _), = p.terms.items()
    return m.index(1)


def ml_evidence(inst: FamilyInstance, result: LndSearchResult,
                degree_cap: int = 6) -> dict:
    """Intersect the kernels of all found derivations on polynomials of
    bounded degree and compare with the kernel-variable algebra."""
    if not result.candidates:
        raise PreconditionError("empty search result")
    ring = inst.ring
    ctx = ring.ctx
    monos = [ctx.monomial(m) for m in _monomials_up_to(ctx, degree_cap)]
    images = []
    for cand in result.candidates:
        images.append([ring.nf(cand.derivation.apply(m)) for m in monos])

    col_ix: dict = {}
    for row in images:
        for p in row:
            for mm in p.terms:
                col_ix.setdefault(mm, len(col_ix))
    rows = []
    for nf_images in images:
        for mm in col_ix:
            row = [Fraction(0)] * len(monos)
            for j, p in enumerate(nf_images):
                c = p.terms.get(mm)
                if c:
                    row[j] = c
            rows.append(row)
    kernel_vecs = nullspace(rows, len(monos))

    computed = SparseSpan()
    computed_polys = []
    for vec in kernel_vecs:
        p = ctx.zero()
        for c, m in zip(vec, monos):
            if c:
                p = p + m * c
        q = ring.nf(p)
        if computed.add(dict(q.terms)):
            computed_polys.append(q)

    predicted = SparseSpan()
    predicted_polys = []
    kern_idx = [ctx.index(g.ctx.names[_single_var_index(g)])
                for g in inst.kernel_gens]
    for expo, _ in _bounded_exponents([(i, 1) for i in kern_idx], degree_cap):
        mono = [0] * len(ctx)
        for i, e in expo:
            mono[i] = e
        q = ring.nf(ctx.monomial(mono))
        if predicted.add(dict(q.terms)):
            predicted_polys.append(q)

    missing = [str(p) for p in predicted_polys
               if not computed.contains(dict(p.terms))]
    extra = [str(p) for p in computed_polys
             if not predicted.contains(dict(p.terms))]
    return {
        "degree_cap": degree_cap,
        "derivations_used": len(result.candidates),
        "computed_dimension": computed.dim(),
        "predicted_dimension": predicted.dim(),
        "extra": extra,
        "missing": missing,
        "equal": not missing and not extra,
    }


# ------------------------------------------------------------ layer formulas

def _stated_layer_generators(inst: FamilyInstance, weight: int):
    """The closed-form module generators of the layer at a given weight."""
    ctx = inst.ring.ctx
    out = []
    if inst.family == "danielewski":
        m = inst.params["m"]
        y, z = ctx.var("y"), ctx.var("z")
        for j in range(min(m - 1, weight) + 1):
            if (weight - j) % m == 0:
                out.append(y ** j * z ** ((weight - j) // m))
    elif inst.family == "koras-russell-2":
        m = inst.params["m"]
        t, y = ctx.var("t"), ctx.var("y")
        for j in range(min(m - 1, weight) + 1):
            if (weight - j) % m == 0:
                out.append(t ** j * y ** ((weight - j) // m))
    else:
        d, m = inst.params["d"], inst.params["m"]
        s, y, z = inst.slice_elem, ctx.var("y"), ctx.var("z")
        for lo in range(min(d - 1, weight) + 1):
            for j in range(m):
                rest = weight - lo - d * j
                if rest < 0:
                    break
                if rest % (m * d) == 0:
                    out.append(s ** lo * y ** j * z ** (rest // (m * d)))
    return out


def verify_layer_formulas(inst: FamilyInstance, max_degree: int = 12,
                          zero_cap: int = 2, coeff_cap: int | None = None,
                          _retry: bool = True) -> dict:
    """Check each filtration-coordinate monomial against the closed-form
    layer description: in the stated span of its weight, not in the span
    one lower.

    Module coefficients over the kernel variables are enumerated up to
    coeff_cap; on a membership miss with the default cap the check retries
    once with twice the cap before reporting a mismatch.
    """
    fs = inst.filtration
    ring = inst.ring
    if coeff_cap is None:
        # enough kernel-variable degree to express the rewriting chains of
        # the main variable's power reductions, plus the probe decorations
        n = inst.params["n"]
        if inst.family == "danielewski":
            cap = n * (max_degree // inst.params["m"])
        elif inst.family == "koras-russell-2":
            cap = (max(n, inst.params["e"]) * inst.params["l"]
                   * (max_degree // inst.params["m"]))
        else:
            cap = (n + inst.params["e"]) * (max_degree // inst.params["d"])
        coeff_cap = cap + zero_cap + 4

    zero_vars = [(i, 1) for i, w in enumerate(fs.omega) if w == 0]
    probes: dict = {}
    for expo, w in _bounded_exponents(fs._positive_vars(), max_degree):
        for zexpo, _ in _bounded_exponents(zero_vars, zero_cap):
            mono = fs._monomial_from(list(expo) + list(zexpo))
            b = ring.nf(fs.ring_element_of(mono))
            if b.is_zero():
                continue
            probes.setdefault(w, []).append((mono, b))

    kern_idx = [ring.ctx.index(g.ctx.names[_single_var_index(g)])
                for g in inst.kernel_gens]
    coeff_monos = []
    for expo, _ in _bounded_exponents([(i, 1) for i in kern_idx], coeff_cap):
        mono = [0] * len(ring.ctx)
        for i, e in expo:
            mono[i] = e
        coeff_monos.append(ring.ctx.monomial(mono))

    span = SparseSpan()
    mismatches = []
    for w in range(max_degree + 1):
        for mono, b in probes.get(w, []):
            if span.contains(dict(b.terms)):
                mismatches.append((str(mono), w, "already in the layer below"))
        for gen in _stated_layer_generators(inst, w):
            for cm in coeff_monos:
                span.add(dict(ring.nf(cm * gen).terms))
        for mono, b in probes.get(w, []):
            if not span.contains(dict(b.terms)):
                mismatches.append((str(mono), w, "not in the stated layer"))

    if mismatches and _retry and any(kind == "not in the stated layer"
                                     for _, _, kind in mismatches):
        return verify_layer_formulas(inst, max_degree, zero_cap,
                                     coeff_cap * 2, _retry=False)
    return {
        "max_degree": max_degree,
        "coefficient_cap": coeff_cap,
        "probes": sum(len(v) for v in probes.values()),
        "mismatches": mismatches,
    }
