import random
from fractions import Fraction as F

import pytest

from finecover.covers import FineCover, find_cover_unit
from finecover.exact import pow2
from finecover.gallery import (
    CauchySpec,
    OpenCoverSpec,
    OracleSpec,
    UnexpectedCover,
    cauchy_gap_gauge,
    check_star,
    default_cauchy_spec,
    default_oracle_spec,
    finite_subcover,
    gap_limit_point,
    gap_obstruction_demo,
    heine_borel_gauge,
    oracle_pin_demo,
    oracle_pin_gauge,
    pin_index,
    tailed_cover,
    two_interval_cover,
)
from finecover.gauges import Verdict, eval_enclosure, verified_above
from finecover.spaces import CantorPoint, UnitPoint


def test_open_cover_spec_rejects_bad_intervals():
    with pytest.raises(ValueError):
        OpenCoverSpec(((F(1, 2), F(1, 2)),))
    with pytest.raises(ValueError):
        OpenCoverSpec(((F(3, 4), F(1, 4)),))
    with pytest.raises(ValueError):
        OpenCoverSpec(((F(0), F(1)),), tail=lambda n: (F(1, 2), F(2)))


def test_series_gauge_two_interval_values():
    g = heine_borel_gauge(two_interval_cover())
    half = eval_enclosure(g, UnitPoint.from_rat(F(1, 2)), 8)
    assert half.lo == half.hi == F(3, 80)
    zero = eval_enclosure(g, UnitPoint.from_rat(F(0)), 8)
    assert zero.lo == zero.hi == F(1, 40)


def test_series_gauge_wide_interval_uncapped():
    g = heine_borel_gauge(OpenCoverSpec(((F(-1), F(2)),)))
    box = eval_enclosure(g, UnitPoint.from_rat(F(1, 2)), 8)
    assert box.lo == box.hi == F(3, 8)


def test_series_gauge_tail_slack_width():
    g = heine_borel_gauge(tailed_cover())
    box = eval_enclosure(g, UnitPoint.from_rat(F(1, 2)), 8)
    # head terms are exact at a rational point; only the tail bound spreads
    assert box.width == pow2(-12)
    assert box.lo > 0


def test_series_gauge_positive_on_covered_points():
    g = heine_borel_gauge(two_interval_cover())
    rng = random.Random(7)
    for _ in range(200):
        p = F(rng.randint(0, 512), 512)
        v = verified_above(g, UnitPoint.from_rat(p), F(0), 8)
        assert v is Verdict.YES


def test_check_star_decides_two_interval():
    cov = two_interval_cover()
    g = heine_borel_gauge(cov)
    # vacuous: gauge at 9/10 is 1/40, premise threshold 1 never beaten
    assert check_star(cov, g, F(9, 10), 0) is Verdict.YES
    rng = random.Random(11)
    for _ in range(200):
        p = F(rng.randint(0, 256), 256)
        k = rng.randint(0, 10)
        assert check_star(cov, g, p, k) is Verdict.YES


def test_check_star_never_no_with_tail():
    cov = tailed_cover()
    g = heine_borel_gauge(cov)
    rng = random.Random(13)
    for _ in range(100):
        p = F(rng.randint(0, 128), 128)
        k = rng.randint(0, 8)
        assert check_star(cov, g, p, k) is not Verdict.NO


def test_finite_subcover_two_interval():
    cov = two_interval_cover()
    g = heine_borel_gauge(cov)
    cover = find_cover_unit(g, 10, 8)
    assert isinstance(cover, FineCover)
    k = finite_subcover(cov, cover)
    assert 1 <= k <= 10
    lo, hi = cov.interval(0)
    a, b = cov.interval(1)
    assert lo < 0 and max(hi, b) > 1  # the verified union really spans [0,1]


def test_finite_subcover_with_tail_rule():
    cov = tailed_cover()
    g = heine_borel_gauge(cov)
    cover = find_cover_unit(g, 11, 8)
    assert isinstance(cover, FineCover)
    k = finite_subcover(cov, cover)
    assert 1 <= k <= 12


def test_gap_sequence_defaults():
    zs = default_cauchy_spec()
    assert zs.term(0) == F(1, 2)
    assert zs.term(2) == F(289, 512)
    assert zs.modulus(9) == 3
    assert zs.modulus(10) == 4
    # declared modulus really is a modulus on sampled pairs
    for j in (2, 5, 9, 16):
        n0 = zs.modulus(j)
        for a in range(n0, n0 + 4):
            for b in range(a, n0 + 4):
                assert abs(zs.term(a) - zs.term(b)) <= pow2(-j)


def test_gap_gauge_bounds_at_endpoints():
    g = cauchy_gap_gauge(default_cauchy_spec())
    at0 = eval_enclosure(g, UnitPoint.from_rat(F(0)), 10)
    assert at0.lo >= F(1, 2)
    at1 = eval_enclosure(g, UnitPoint.from_rat(F(1)), 10)
    assert at1.lo > F(43, 100)


def test_gap_gauge_cauchyness_exact():
    zs = default_cauchy_spec()
    rng = random.Random(17)
    for _ in range(100):
        x = F(rng.randint(0, 64), 64)
        m, n = rng.randint(0, 12), rng.randint(0, 12)
        dm, dn = abs(x - zs.term(m)), abs(x - zs.term(n))
        assert abs(dm - dn) <= abs(zs.term(m) - zs.term(n))


def test_limit_point_verdict_needs_stage():
    g = cauchy_gap_gauge(default_cauchy_spec())
    z = gap_limit_point()
    assert verified_above(g, z, pow2(-20), 10) is Verdict.UNKNOWN
    g2 = cauchy_gap_gauge(default_cauchy_spec())
    assert verified_above(g2, z, pow2(-20), 24) is Verdict.NO


def test_gap_obstruction_closes_on_limit():
    zs = default_cauchy_spec()
    zbox = gap_limit_point().approx(40)
    for depth in (6, 12):
        obs = gap_obstruction_demo(zs, depth, 12)
        run = obs.unresolved[0]
        assert run.lo <= zbox.lo and zbox.hi <= run.hi
        assert run.width <= pow2(-depth + 2)


def test_gap_gauge_without_modulus_stays_unknown():
    zs = CauchySpec(default_cauchy_spec().term, modulus=None, label="blind")
    g = cauchy_gap_gauge(zs)
    z = gap_limit_point()
    assert verified_above(g, z, pow2(-20), 24) is Verdict.UNKNOWN


def test_pin_gauge_values():
    spec = default_oracle_spec()
    g = oracle_pin_gauge(spec)
    x = CantorPoint.from_pattern("1", "0")
    box = eval_enclosure(g, x, 8)
    assert box.lo == box.hi == F(1, 2)
    y = CantorPoint.from_pattern("0100", "0")
    box = eval_enclosure(g, y, 8)
    assert box.lo == box.hi == F(1, 16)
    z = CantorPoint.from_pattern("01", "01")
    box = eval_enclosure(g, z, 8)
    assert box.lo == box.hi == F(1)


def test_pin_demo_hides_then_finds():
    spec = default_oracle_spec()
    cover = oracle_pin_demo(spec, 10, 8)
    assert isinstance(cover, FineCover)
    assert any(p.bits(10) == spec.Z.bits(10) for p in cover.points)


def test_pin_demo_rejects_eventually_constant_pin():
    # the search's constant-tail samples would name such a Z outright
    spec = OracleSpec(CantorPoint.from_pattern("10101", "0"))
    with pytest.raises(ValueError, match="eventually constant"):
        oracle_pin_demo(spec, 6, 8)


def test_pin_index_excludes_oracle_exactly():
    spec = default_oracle_spec()
    rng = random.Random(23)
    seen = 0
    for _ in range(300):
        pre = "".join(rng.choice("01") for _ in range(rng.randint(0, 6)))
        per = "".join(rng.choice("01") for _ in range(rng.randint(1, 4)))
        x = CantorPoint.from_pattern(pre, per)
        if x == spec.Z:
            continue
        f = pin_index(spec, x)
        assert f is not None and f >= 1
        assert x.bits(f - 1) == spec.Z.bits(f - 1)
        assert x.bits(f) != spec.Z.bits(f)
        seen += 1
    assert seen > 250
