"""Fast self-contained sanity battery, shared by the CLI and the tests.

Every check is small enough to run in a couple of seconds total and
exercises one vertical slice of the package: parsing, degree oracles,
the graded presentation with its primality certificate, automorphism
construction, the isomorphism decision and the integer lattice kernel.
"""

from __future__ import annotations

import random

from .families import make_danielewski, make_new_family
from .ideals import Ideal, ideal_equal
from .linalg import smith_normal_form
from .morphisms import (AutomorphismData, build_auto_danielewski, iso_decide,
                        verify_degree_preservation)
from .parser import parse_polynomial
from .poly import Context, random_polynomial


def _check_parser_roundtrip():
    ctx = Context(["x", "y", "z"])
    rng = random.Random(2026)
    for i in range(60):
        p = random_polynomial(ctx, rng, max_degree=4, max_terms=5)
        if i % 3 == 0:
            p = p * rng.choice([1, -1]) / rng.choice([2, 3, 5])
        q = parse_polynomial(str(p), ctx)
        if q != p:
            return "reprint of %s parsed as %s" % (p, q)
    return None


def _toy_instance():
    ctx_p = Context(["x", "s"])
    ctx_q = Context(["x", "y"])
    return make_new_family(2, 1,
                           parse_polynomial("s^2", ctx_p),
                           parse_polynomial("y^2", ctx_q))


def _check_toy_degrees():
    inst = _toy_instance()
    D = inst.derivation
    ctx = inst.ring.ctx
    want = {"x": 0, "y": 2, "z": 4}
    for nm, d in want.items():
        got = D.deg(ctx.var(nm))
        if got != d:
            return "deg %s = %s, wanted %d" % (nm, got, d)
    if D.deg(inst.slice_elem) != 1:
        return "slice degree is not 1"
    if not inst.ring.eq(D.apply(inst.slice_elem), ctx.var("x") ** 3):
        return "slice image is not x^3"
    return None


def _check_toy_graded():
    inst = _toy_instance()
    fs = inst.filtration
    pr = fs.properness_check()
    if pr.status != "proper" or pr.method != "binomial-prime":
        return "properness: %s via %s" % (pr.status, pr.method)
    if list(pr.certificate.divisors) != [1, 1]:
        return "elementary divisors %s" % (pr.certificate.divisors,)
    jhat = fs.initial_ideal_hat()
    expected = Ideal(fs.ext_ctx, inst.expected_graded_relations())
    if not ideal_equal(jhat, expected):
        return "graded relations differ from the closed form"
    return None


def _check_automorphism():
    ctx = Context(["x", "y"])
    inst = make_danielewski(2, parse_polynomial("y^2", ctx))
    a = Context(["x"]).one()
    alpha = build_auto_danielewski(inst, AutomorphismData(3, 2, a))
    if not alpha.verify_inverse():
        return "inverse fails to verify"
    rep = verify_degree_preservation(alpha, inst.derivation, samples=5)
    if not rep["ok"]:
        return "degree not preserved: %s" % rep["failures"][:1]
    return None


def _check_iso():
    ctx = Context(["x", "y"])
    b1 = make_danielewski(2, parse_polynomial("y^2 + x", ctx))
    b2 = make_danielewski(2, parse_polynomial("y^2 + 2*x", ctx))
    b3 = make_danielewski(2, parse_polynomial("y^2", ctx))
    dec = iso_decide(b1, b2)
    if dec.verdict != "isomorphic" or (dec.lam, dec.mu) != (2, 1):
        return "expected isomorphic with lambda=2, mu=1, got %s" % dec.verdict
    if iso_decide(b1, b3).verdict != "not-isomorphic":
        return "y^2 + x against y^2 should not be isomorphic"
    return None


def _check_smith():
    divisors = smith_normal_form([[2, 1, 0, -2], [-1, 2, -1, 0]])
    if list(divisors) != [1, 1]:
        return "divisors %s" % (divisors,)
    return None


CHECKS = [
    ("parser-roundtrip", _check_parser_roundtrip),
    ("degree-oracle", _check_toy_degrees),
    ("graded-presentation", _check_toy_graded),
    ("automorphism", _check_automorphism),
    ("isomorphism", _check_iso),
    ("smith-form", _check_smith),
]


def run_selftest():
    """Run every check; returns a list of {name, ok, detail} dicts."""
    results = []
    for name, fn in CHECKS:
        try:
            detail = fn()
        except Exception as e:                      # noqa: BLE001 - reported
            detail = "%s: %s" % (type(e).__name__, e)
        results.append({"name": name, "ok": detail is None,
                        "detail": detail or ""})
    return results
