import random
from fractions import Fraction

import pytest

from finecover.covers import Obstruction, TaggedPartition
from finecover.exact import Interval, QuadVal, pow2
from finecover.gauges import Verdict, eval_enclosure
from finecover.integral import (
    EvaluationError,
    IntegralCertificate,
    builtin_integrands,
    default_depth,
    default_hints,
    dirichlet_hints,
    integrate,
    poly_integrand,
    riemann_sum,
    stern_brocot_index,
)
from finecover.spaces import UnitPoint

F = Fraction
STAGE = 16


def up(q):
    return UnitPoint.from_rat(F(q))


def test_riemann_sum_frozen():
    ident, _, _ = poly_integrand([0, 1])
    t = TaggedPartition((F(0), F(1)), (up("1/2"),))
    assert riemann_sum(ident, t) == Interval.point(F(1, 2))

    square, _, _ = poly_integrand([0, 0, 1])
    cuts = tuple(F(i, 4) for i in range(5))
    tags = tuple(up(F(2 * i + 1, 8)) for i in range(4))
    s = riemann_sum(square, TaggedPartition(cuts, tags))
    assert s == Interval.point(F(21, 64))


def test_riemann_sum_dirichlet_rational_tags():
    f, _, _ = builtin_integrands()["dirichlet"]
    cuts = tuple(F(i, 4) for i in range(5))
    tags = tuple(up(F(2 * i + 1, 8)) for i in range(4))
    assert riemann_sum(f, TaggedPartition(cuts, tags)) == Interval.point(F(1))


def test_riemann_sum_propagates_evaluator_failure():
    f, _, _ = builtin_integrands()["sqrt-reciprocal"]
    opaque = UnitPoint.from_fn(lambda k: Interval(F(1, 3), F(1, 3)), label="blob")
    t = TaggedPartition((F(0), F(1)), (opaque,))
    with pytest.raises(EvaluationError, match="blob"):
        riemann_sum(f, t)


def test_special_value_overrides_evaluator():
    f, _, _ = builtin_integrands()["sqrt-reciprocal"]
    assert f.at(up(0), 8) == Interval.point(F(0))


def test_integrate_identity():
    f, fam, ref = builtin_integrands()["identity"]
    eps = F(1, 16)
    cert = integrate(f, fam, eps, default_depth("identity", eps), STAGE)
    assert isinstance(cert, IntegralCertificate)
    assert cert.claim.contains(ref)
    assert cert.claim.lo == cert.sum.lo - eps
    assert cert.claim.hi == cert.sum.hi + eps


def test_integrate_rejects_bad_epsilon():
    f, fam, _ = builtin_integrands()["identity"]
    with pytest.raises(ValueError):
        integrate(f, fam, 0, 4, STAGE)


def test_poly_regression():
    rng = random.Random(11)
    for _ in range(6):
        coeffs = [F(rng.randrange(-8, 9), rng.randrange(1, 5)) for _ in range(rng.randrange(1, 5))]
        f, fam, ref = poly_integrand(coeffs)
        slope = max(sum(abs(c) * i for i, c in enumerate(coeffs)), F(1))
        n = 0
        while pow2(n) <= 4 * slope:
            n += 1
        widths = []
        for k in (2, 5):
            eps = pow2(-k)
            cert = integrate(f, fam, eps, k + n + 1, STAGE)
            assert isinstance(cert, IntegralCertificate)
            assert cert.claim.contains(ref)
            widths.append(cert.claim.width)
        assert widths[1] < widths[0]


def test_integrate_step():
    f, fam, ref = builtin_integrands()["step"]
    eps = F(1, 16)
    cert = integrate(f, fam, eps, default_depth("step", eps), STAGE)
    assert cert.claim.contains(ref)


def test_integrate_sqrt_reciprocal():
    f, fam, ref = builtin_integrands()["sqrt-reciprocal"]
    eps = F(1, 32)
    cert = integrate(f, fam, eps, default_depth("sqrt-reciprocal", eps), STAGE)
    assert isinstance(cert, IntegralCertificate)
    assert cert.claim.contains(ref)
    assert cert.claim.width <= pow2(-5 + 3)


def test_integrate_dirichlet_needs_irrational_tags():
    f, fam, _ = builtin_integrands()["dirichlet"]
    eps = F(1, 8)
    blind = integrate(f, fam, eps, 4, STAGE)
    assert isinstance(blind, Obstruction)

    cert = integrate(f, fam, eps, 4, STAGE, hints=default_hints("dirichlet"))
    assert isinstance(cert, IntegralCertificate)
    assert cert.sum == Interval.point(F(0))
    assert cert.claim.contains(F(0))
    assert all(not tag.is_rational for tag in cert.partition.tags)


def test_dirichlet_sum_bound_across_eps():
    f, fam, _ = builtin_integrands()["dirichlet"]
    hints = default_hints("dirichlet")
    for k in range(3, 9):
        eps = pow2(-k)
        cert = integrate(f, fam, eps, 4, STAGE, hints=hints)
        assert isinstance(cert, IntegralCertificate)
        assert cert.sum.hi <= 4 * eps


def test_stern_brocot_index_frozen():
    want = {
        F(0): 1,
        F(1): 2,
        F(1, 2): 3,
        F(1, 3): 4,
        F(2, 3): 5,
        F(1, 4): 6,
        F(2, 5): 7,
        F(3, 5): 8,
        F(3, 4): 9,
    }
    for q, n in want.items():
        assert stern_brocot_index(q, 100) == n
    assert stern_brocot_index(F(3, 5), 8) == 8
    assert stern_brocot_index(F(3, 5), 7) is None
    assert stern_brocot_index(F(1, 1000), 100) is None
    with pytest.raises(ValueError):
        stern_brocot_index(F(3, 2), 100)


def test_dirichlet_gauge_values():
    _, fam, _ = builtin_integrands()["dirichlet"]
    eps = F(1, 8)
    g = fam.at(eps)
    assert eval_enclosure(g, up("1/2"), STAGE) == Interval.point(eps / 8)
    deep = eval_enclosure(g, up(F(1, 1000)), STAGE)
    assert deep.lo == 0 and deep.hi == eps * pow2(-(STAGE + 64))
    quad = UnitPoint.from_quad(QuadVal(F(0), F(1, 2)))
    assert eval_enclosure(g, quad, STAGE) == Interval.point(F(1))


def test_dirichlet_hints_sit_in_their_cells():
    for i, h in enumerate(dirichlet_hints()):
        v = h.exact_value()
        assert F(i, 4) < v < F(i + 1, 4)
        assert not v.is_rational
