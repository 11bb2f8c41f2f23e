"""Candidate filtrations from derivation data and their associated graded rings.

Given a presented domain B, a locally nilpotent derivation D, generators of
its kernel and a list of local slices with declared generator degrees, we
form the extended polynomial ring (ring generators, plus fresh names for any
kernel generator or slice that is not itself a generator), the ideal J of all
defining relations, and the weight vector
    kernel generators -> 0,  slices -> 1,  ring generator x_i -> declared d_i.
The candidate filtration puts an element in layer r when it has a J-preimage
of weight <= r; the normal form under a weight-refined order realizes the
minimal such weight, so layer membership is computable.  The ideal of top
forms Jhat presents the associated graded ring.

Properness is decided along two routes: the binomial lattice-ideal primality
certificate for Jhat when it applies, otherwise an empirical route that
compares the induced weight degree with the iteration oracle on sampled
elements and random products.  Only an exhausted budget yields "undecided";
a failed probe always carries an explicit witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .derivations import Derivation, RingPresentation
from .ideals import (BudgetExhausted, Ideal, MonomialOrder, binomial_prime,
                     initial_ideal, normal_form)
from .linalg import solve_combination
from .poly import (NEG_INF, Context, Polynomial, mono_wdeg,
                   random_polynomial)


class PreconditionError(ValueError):
    """Input violates a documented precondition."""


class DegreeFunction:
    """Uniform handle for the two degree notions, with a result cache."""

    def __init__(self, kind: str, derivation: Derivation | None = None,
                 weights=None, bound: int | None = None):
        if kind == "lnd":
            if derivation is None:
                raise ValueError("lnd degree function needs a derivation")
        elif kind == "weight":
            if weights is None:
                raise ValueError("weight degree function needs weights")
        else:
            raise ValueError("unknown degree function kind %r" % kind)
        self.kind = kind
        self.derivation = derivation
        self.weights = None if weights is None else tuple(weights)
        self.bound = bound
        self._cache: dict = {}

    def value(self, p: Polynomial):
        k = p.key()
        if k not in self._cache:
            if self.kind == "lnd":
                self._cache[k] = self.derivation.deg(p, self.bound)
            else:
                self._cache[k] = p.weighted_degree(self.weights)
        return self._cache[k]


@dataclass
class LayerGenerator:
    weight: int
    monomial: Polynomial       # in the extended context, positive variables only
    graded_form: Polynomial    # canonical normal form of its symbol mod Jhat


@dataclass
class PropernessResult:
    status: str                # "proper" | "improper" | "undecided"
    method: str                # "binomial-prime" | "empirical"
    reason: str = ""
    certificate: object = None
    witness: object = None     # offending element or pair, when improper
    samples: int = 0

    def __bool__(self):
        return self.status == "proper"


@dataclass
class GradedElement:
    poly: Polynomial
    degree: object             # int or NEG_INF

    def is_zero(self):
        return self.poly.is_zero()


class GradedPresentation:
    """The associated graded ring: extended variables modulo top forms."""

    def __init__(self, ring: RingPresentation, degrees):
        self.ring = ring
        self.degrees = tuple(degrees)

    @property
    def ctx(self):
        return self.ring.ctx

    def nf(self, p: Polynomial) -> Polynomial:
        return self.ring.nf(p)

    def degree_of(self, p: Polynomial):
        return self.ring.nf(p).weighted_degree(self.degrees)

    def is_homogeneous(self, p: Polynomial) -> bool:
        q = self.ring.nf(p)
        if q.is_zero():
            return True
        d = q.weighted_degree(self.degrees)
        return all(mono_wdeg(m, self.degrees) == d for m in q.terms)

    def describe(self):
        return {
            "variables": [
                {"name": nm, "degree": d}
                for nm, d in zip(self.ctx.names, self.degrees)],
            "relations": [str(g) for g in self.ring.relations.gens],
        }


class FiltrationSpec:
    """Derivation, kernel generators, slices and degrees, wired together."""

    def __init__(self, derivation: Derivation, kernel_gens, slices,
                 var_degrees: dict, slice_names=None, kernel_names=None,
                 validate: bool = True, deg_bound: int | None = None):
        self.derivation = derivation
        self.ring = derivation.ring
        ctx = self.ring.ctx
        self.kernel_gens = [self.ring.nf(z) for z in kernel_gens]
        self.slices = [self.ring.nf(s) for s in slices]
        self.var_degrees = dict(var_degrees)
        for nm in ctx.names:
            if nm not in self.var_degrees:
                raise PreconditionError("no declared degree for %s" % nm)

        if validate:
            self._validate(deg_bound)

        # fresh names for non-variable kernel generators and slices
        def fresh(base, taken):
            nm = base
            while nm in taken:
                nm += "_"
            taken.add(nm)
            return nm

        taken = set(ctx.names)
        self.kernel_adjoined = []   # (name, defining poly) for non-variable gens
        for i, z in enumerate(self.kernel_gens):
            if not _is_variable(z):
                want = (kernel_names[i] if kernel_names else "z%d" % (i + 1))
                self.kernel_adjoined.append((fresh(want, taken), z))
        self.slice_adjoined = []
        for j, s in enumerate(self.slices):
            if not _is_variable(s):
                if slice_names:
                    want = slice_names[j]
                elif len(self.slices) == 1 and "s" not in taken:
                    want = "s"
                else:
                    want = "s%d" % (j + 1)
                self.slice_adjoined.append((fresh(want, taken), s))

        names = list(ctx.names) + [nm for nm, _ in self.kernel_adjoined] \
            + [nm for nm, _ in self.slice_adjoined]
        self.ext_ctx = Context(names)

        omega = []
        for nm in ctx.names:
            omega.append(self.var_degrees[nm])
        omega += [0] * len(self.kernel_adjoined)
        omega += [1] * len(self.slice_adjoined)
        self.omega = tuple(omega)

        self.j_order = MonomialOrder.weight(self.omega, self._tiebreak_perm())

        gens = [g.lift(self.ext_ctx) for g in self.ring.relations.gens]
        for nm, z in self.kernel_adjoined:
            gens.append(self.ext_ctx.var(nm) - z.lift(self.ext_ctx))
        for nm, s in self.slice_adjoined:
            gens.append(self.ext_ctx.var(nm) - s.lift(self.ext_ctx))
        self.extended_ideal = Ideal(self.ext_ctx, gens)

        self._jhat = None
        self._properness = None
        self._graded = None

    # ------------------------------------------------------------ plumbing

    def _validate(self, deg_bound):
        D = self.derivation
        for z in self.kernel_gens:
            if z.constant_value() != 0:
                raise PreconditionError("kernel generator %s nonzero at origin" % z)
            if not D.kernel_member(z):
                raise PreconditionError("%s is not in the kernel" % z)
        for s in self.slices:
            if s.constant_value() != 0:
                raise PreconditionError("slice %s nonzero at origin" % s)
            if not D.is_local_slice(s):
                raise PreconditionError("%s is not a local slice" % s)
        for nm in self.ring.ctx.names:
            want = self.var_degrees[nm]
            got = D.deg(self.ring.ctx.var(nm), deg_bound)
            got = 0 if got == NEG_INF else got
            if got != want:
                raise PreconditionError(
                    "declared degree %d of %s disagrees with oracle %s"
                    % (want, nm, got))

    def _tiebreak_perm(self):
        """Slices first, then positive ring variables, then weight zero,
        then adjoined kernel names: normal forms then prefer rewriting into
        kernel variables, which is what the layer dedup wants."""
        ctx = self.ring.ctx
        n_ring = len(ctx)
        n_kern = len(self.kernel_adjoined)
        slice_ring_idx = [ctx.index(s.ctx.names[_var_index(s)])
                          for s in self.slices if _is_variable(s)]
        slice_adj_idx = list(range(n_ring + n_kern,
                                   n_ring + n_kern + len(self.slice_adjoined)))
        first = slice_adj_idx + slice_ring_idx
        used = set(first)
        positive = [i for i in range(n_ring)
                    if self.var_degrees[ctx.names[i]] > 0 and i not in used]
        zero = [i for i in range(n_ring)
                if self.var_degrees[ctx.names[i]] == 0 and i not in used]
        kern_adj = list(range(n_ring, n_ring + n_kern))
        return first + positive + zero + kern_adj

    def min_weight_nf(self, p: Polynomial) -> Polynomial:
        """The omega-minimal J-preimage of p, as a normal form."""
        q = normal_form(p.lift(self.ext_ctx), self.extended_ideal, self.j_order)
        return q

    def omega_b(self, p: Polynomial):
        """Induced filtration degree: weight of the minimal preimage."""
        return self.min_weight_nf(p).weighted_degree(self.omega)

    def initial_ideal_hat(self, budget=None) -> Ideal:
        if self._jhat is None:
            self._jhat = initial_ideal(
                self.extended_ideal, self.omega, self.j_order.perm, budget)
        return self._jhat

    # ------------------------------------------------------------ properness

    def properness_check(self, samples: int = 25, seed: int = 1123,
                         budget=None) -> PropernessResult:
        if self._properness is not None:
            return self._properness
        try:
            jhat = self.initial_ideal_hat(budget)
            cert = binomial_prime(jhat, self.j_order, budget)
        except BudgetExhausted as e:
            return PropernessResult("undecided", "binomial-prime", reason=str(e))
        if cert.status == "prime":
            res = PropernessResult("proper", "binomial-prime",
                                   reason="initial ideal is prime",
                                   certificate=cert)
        elif cert.status == "not-prime":
            witness = self._empirical_witness(samples, seed)
            res = PropernessResult("improper", "binomial-prime",
                                   reason="initial ideal is not prime",
                                   certificate=cert, witness=witness)
        else:
            try:
                res = self._empirical_route(samples, seed)
            except BudgetExhausted as e:
                return PropernessResult("undecided", "empirical", reason=str(e))
        self._properness = res
        return res

    def _probe_monomials(self, max_weight: int = 6):
        out = []
        for expo, w in _bounded_exponents(self._positive_vars(), max_weight):
            if w == 0:
                continue
            out.append((self._monomial_from(expo), w))
        return out

    def _positive_vars(self):
        return [(i, w) for i, w in enumerate(self.omega) if w > 0]

    def _monomial_from(self, expo_pairs) -> Polynomial:
        expo = [0] * len(self.ext_ctx)
        for i, e in expo_pairs:
            expo[i] = e
        return self.ext_ctx.monomial(expo)

    def ring_element_of(self, ext_poly: Polynomial) -> Polynomial:
        """Substitute defining polynomials for adjoined variables."""
        images = {}
        for nm, z in self.kernel_adjoined:
            images[nm] = z
        for nm, s in self.slice_adjoined:
            images[nm] = s
        return ext_poly.subs(images, self.ring.ctx)

    def _empirical_witness(self, samples, seed):
        probe = self._empirical_probe(samples, seed)
        return probe[1] if probe is not None else None

    def _empirical_probe(self, samples, seed):
        """Return (reason, witness) on failure, None when all probes pass."""
        D = self.derivation
        for mono, w in self._probe_monomials():
            b = self.ring_element_of(mono)
            if self.ring.nf(b).is_zero():
                continue
            d_oracle = D.deg(b)
            d_ind = self.omega_b(b)
            if d_oracle != d_ind:
                return ("induced degree %s of %s disagrees with oracle %s"
                        % (d_ind, mono, d_oracle), mono)
        rng = random.Random(seed)
        checked = 0
        while checked < samples:
            a = random_polynomial(self.ring.ctx, rng, max_degree=2, max_terms=3)
            b = random_polynomial(self.ring.ctx, rng, max_degree=2, max_terms=3)
            if self.ring.nf(a).is_zero() or self.ring.nf(b).is_zero():
                continue
            checked += 1
            da, db = self.omega_b(a), self.omega_b(b)
            dab = self.omega_b(a * b)
            if dab != da + db:
                return ("product degree %s != %s + %s" % (dab, da, db), (a, b))
            if checked % 10 == 1:
                if D.deg(a) != da:
                    return ("induced degree %s of %s disagrees with oracle %s"
                            % (da, a, D.deg(a)), a)
        return None

    def _empirical_route(self, samples, seed) -> PropernessResult:
        probe = self._empirical_probe(samples, seed)
        if probe is None:
            return PropernessResult(
                "proper", "empirical",
                reason="degree multiplicativity held on all samples",
                samples=samples)
        return PropernessResult("improper", "empirical", reason=probe[0],
                                witness=probe[1], samples=samples)

    # ------------------------------------------------------------ graded ring

    def graded_presentation(self, budget=None) -> GradedPresentation:
        if self._graded is not None:
            return self._graded
        check = self.properness_check(budget=budget)
        if check.status != "proper":
            raise PreconditionError(
                "graded presentation requires a proper filtration (%s: %s)"
                % (check.status, check.reason))
        jhat = self.initial_ideal_hat(budget)
        ring = RingPresentation(self.ext_ctx, jhat, self.j_order)
        self._graded = GradedPresentation(ring, self.omega)
        return self._graded

    def gr(self, p: Polynomial) -> GradedElement:
        """Symbol of a ring element in the associated graded ring."""
        graded = self.graded_presentation()
        q = self.min_weight_nf(p)
        if q.is_zero():
            return GradedElement(self.ext_ctx.zero(), NEG_INF)
        d = q.weighted_degree(self.omega)
        top = q.top_form(self.omega)
        return GradedElement(graded.nf(top), d)

    # ------------------------------------------------------------ layers

    def candidate_layers(self, r: int):
        """Deduplicated monomial generators of the layers up to weight r.

        Generators are monomials in the positive-weight variables; a
        monomial is dropped when its graded symbol visibly lies in the
        module generated (over the weight-zero variables) by an already
        accepted generator of the same weight.
        """
        graded_nf = self._graded_nf_for_layers()
        cands = []
        for expo, w in _bounded_exponents(self._positive_vars(), r):
            mono = self._monomial_from(expo)
            canon = graded_nf(mono)
            cands.append((w, mono, canon))
        zero_idx = [i for i, wt in enumerate(self.omega) if wt == 0]
        zero_set = set(zero_idx)

        def w0deg(p):
            if p.is_zero():
                return 0
            return max(sum(m[i] for i in zero_idx) for m in p.terms)

        def split_term(p):
            """(positive part, weight-zero exponents) of a one-term form."""
            if p.num_terms() != 1:
                return None
            (m, _), = p.terms.items()
            pos = tuple(0 if i in zero_set else e for i, e in enumerate(m))
            return pos, tuple(m[i] for i in zero_idx)

        cands.sort(key=lambda t: (t[0], w0deg(t[2]), str(t[1])))
        accepted = []
        seen: dict = {}
        for w, mono, canon in cands:
            st = split_term(canon)
            if st is not None:
                pos, zer = st
                reps = seen.setdefault((w, pos), [])
                # drop only when the symbol is a weight-zero monomial times
                # an accepted one, i.e. visibly redundant over layer zero
                if any(all(a <= b for a, b in zip(rep, zer)) for rep in reps):
                    continue
                reps.append(zer)
            accepted.append(LayerGenerator(w, mono, canon))
        return accepted

    def _graded_nf_for_layers(self):
        jhat = self.initial_ideal_hat()
        graded_ring = RingPresentation(self.ext_ctx, jhat, self.j_order)

        def graded_nf(mono):
            q = normal_form(mono, self.extended_ideal, self.j_order)
            if q.is_zero():
                return q
            return graded_ring.nf(q.top_form(self.omega))
        return graded_nf

    def layer_equality_check(self, max_degree: int = 12, zero_cap: int = 2):
        """Compare formal weight, minimal-preimage weight and the iteration
        oracle on monomials in filtration coordinates.

        Monomials run over all positive-weight coordinates with total weight
        up to max_degree, decorated with weight-zero coordinate factors up to
        total degree zero_cap (the weight-zero directions are unbounded, so
        some cap is needed to stay finite).  Returns the list of mismatches.
        """
        D = self.derivation
        zero_vars = [(i, 1) for i, w in enumerate(self.omega) if w == 0]
        mismatches = []
        for expo, w in _bounded_exponents(self._positive_vars(), max_degree):
            for zexpo, _ in _bounded_exponents(zero_vars, zero_cap):
                mono = self._monomial_from(list(expo) + list(zexpo))
                b = self.ring_element_of(mono)
                if self.ring.nf(b).is_zero():
                    continue
                d_oracle = D.deg(b)
                d_ind = self.omega_b(b)
                if not (d_oracle == w == d_ind):
                    mismatches.append((mono, w, d_oracle, d_ind))
        return mismatches

    # ------------------------------------------------------------ gr properties

    def gr_properties_report(self, pairs: int = 200, seed: int = 7,
                             max_degree: int = 2, max_terms: int = 3,
                             oracle_every: int = 10):
        """P1 multiplicativity, P2 domination, P3 additivity, P4 cancellation
        on random pairs; returns a dict report with any counterexample."""
        graded = self.graded_presentation()
        rng = random.Random(seed)
        report = {"pairs": pairs, "P1": 0, "P2": 0, "P3": 0, "P4": 0,
                  "oracle_checks": 0, "counterexample": None}

        def rand_nonzero():
            while True:
                a = random_polynomial(self.ring.ctx, rng, max_degree, max_terms)
                if not self.ring.nf(a).is_zero():
                    return a

        def fail(tag, data):
            report["counterexample"] = (tag, data)
            return report

        for k in range(pairs):
            a, b = rand_nonzero(), rand_nonzero()
            ga, gb = self.gr(a), self.gr(b)
            if k % oracle_every == 0:
                if self.derivation.deg(a) != ga.degree:
                    return fail("degree-oracle", a)
                report["oracle_checks"] += 1
            # P1
            gab = self.gr(a * b)
            if gab.degree != ga.degree + gb.degree:
                return fail("P1-degree", (a, b))
            if graded.nf(gab.poly - ga.poly * gb.poly).is_zero():
                report["P1"] += 1
            else:
                return fail("P1", (a, b))
            # P2: force deg a > deg b by swapping / resampling
            hi, lo, ghi, glo = a, b, ga, gb
            if ghi.degree < glo.degree:
                hi, lo, ghi, glo = b, a, gb, ga
            if ghi.degree > glo.degree:
                gsum = self.gr(hi + lo)
                if gsum.degree == ghi.degree and \
                        graded.nf(gsum.poly - ghi.poly).is_zero():
                    report["P2"] += 1
                else:
                    return fail("P2", (hi, lo))
            # P3/P4 on a same-degree pair built from a
            lam = Fraction(rng.choice([-1, 1, 2, 3, -2]))
            low = random_polynomial(self.ring.ctx, rng, max_degree=1, max_terms=2)
            if self.omega_b(low) >= ga.degree:
                low = self.ring.ctx.zero()
            b2 = lam * a + low
            gb2 = self.gr(b2)
            if gb2.degree == ga.degree:
                s = self.gr(a + b2)
                if s.degree == ga.degree:
                    if graded.nf(s.poly - ga.poly - gb2.poly).is_zero():
                        report["P3"] += 1
                    else:
                        return fail("P3", (a, b2))
                else:
                    if graded.nf(ga.poly + gb2.poly).is_zero():
                        report["P4"] += 1
                    else:
                        return fail("P4", (a, b2))
        return report

    # ------------------------------------------------------------ induced derivation

    def induced_derivation(self, nilp_bound: int = 64):
        """The homogeneous derivation gr(D) on the graded presentation.

        Its degree is max over generators of deg(D(g)) - deg(g); generators
        realizing the max map to the symbol of their image, the others to 0.
        Verified: images homogeneous, relations preserved, locally nilpotent
        within the bound.
        """
        graded = self.graded_presentation()
        D = self.derivation
        gens = []   # (extended var name, element of B)
        for nm in self.ring.ctx.names:
            gens.append((nm, self.ring.ctx.var(nm)))
        for nm, z in self.kernel_adjoined:
            gens.append((nm, z))
        for nm, s in self.slice_adjoined:
            gens.append((nm, s))
        gaps = {}
        for nm, g in gens:
            dg = D.apply(g)
            if dg.is_zero():
                gaps[nm] = None
                continue
            gaps[nm] = self.omega_b(dg) - self.omega_b(g)
        live = [v for v in gaps.values() if v is not None]
        if not live:
            raise PreconditionError("zero derivation induces nothing")
        d = max(live)
        images = []
        for nm, g in gens:
            if gaps[nm] == d:
                images.append(self.gr(D.apply(g)).poly)
            else:
                images.append(self.ext_ctx.zero())
        gr_d = Derivation(graded.ring, images, check=True)
        for (nm, g), img in zip(gens, gr_d.images):
            if img.is_zero():
                continue
            if not graded.is_homogeneous(img):
                raise PreconditionError("induced image of %s not homogeneous" % nm)
            if img.weighted_degree(self.omega) != self.omega_b(g) + d:
                raise PreconditionError("induced image of %s has wrong degree" % nm)
        if gr_d.is_locally_nilpotent(nilp_bound) is None:
            raise PreconditionError(
                "induced derivation not visibly nilpotent within %d" % nilp_bound)
        return gr_d, d

    # ------------------------------------------------------------ slice expansion

    def local_slice_expansion(self, f: Polynomial, slice_index: int = 0,
                              kernel_degree_bound: int = 8):
        """Try to write c^i * f as sum a_k s^k with a_k in the kernel algebra,
        where s is the chosen slice, c = D(s) and i = deg(f).  Returns the
        dict k -> a_k on success, None when the bounded search fails."""
        D = self.derivation
        s = self.slices[slice_index]
        c = D.apply(s)
        i = D.deg(f)
        if i == NEG_INF:
            return {}
        i = int(i)
        target = self.ring.nf((c ** i) * f)
        raw = []
        kg = self.kernel_gens
        for expo, _ in _bounded_exponents([(j, 1) for j in range(len(kg))],
                                          kernel_degree_bound):
            a = self.ring.ctx.one()
            for j, e in expo:
                a = a * kg[j] ** e
            for k in range(i + 1):
                raw.append(((tuple(expo), k), self.ring.nf(a * s ** k)))
        cols = sorted({m for _, p in raw for m in p.terms} | set(target.terms))
        col_ix = {m: j for j, m in enumerate(cols)}
        rows = []
        for _, p in raw:
            row = [Fraction(0)] * len(cols)
            for m, cc in p.terms.items():
                row[col_ix[m]] = cc
            rows.append(row)
        trow = [Fraction(0)] * len(cols)
        for m, cc in target.terms.items():
            trow[col_ix[m]] = cc
        sol = solve_combination(rows, trow)
        if sol is None:
            return None
        out: dict = {}
        for coeff, (tag, _) in zip(sol, raw):
            if coeff:
                out.setdefault(tag[1], []).append((tag[0], coeff))
        return out


def _is_variable(p: Polynomial) -> bool:
    if len(p.terms) != 1:
        return False
    (m, c), = p.terms.items()
    return c == 1 and sum(m) == 1


def _var_index(p: Polynomial) -> int:
    (m, _), = p.terms.items()
    return m.index(1)


def _bounded_exponents(var_weights, bound: int):
    """Yield (list of (var index, exponent>0), total weight) with weight <= bound."""
    out = [([], 0)]
    yield ([], 0)
    for i, w in var_weights:
        new = []
        for expo, total in out:
            e = 1
            while total + e * w <= bound and (w > 0 or e <= bound):
                item = (expo + [(i, e)], total + e * w)
                yield item
                new.append(item)
                e += 1
                if w == 0 and e > bound:
                    break
        out.extend(new)
