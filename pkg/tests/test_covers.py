import random
from fractions import Fraction

import pytest

from finecover.covers import (
    FineCover,
    MalformedPartition,
    NotACover,
    Obstruction,
    TaggedPartition,
    cover_to_partition,
    find_cover_cantor,
    find_cover_unit,
    minimize_cover,
    partition_to_cover,
    transfer_cover_phi,
    transfer_cover_psi,
    uncovered_witness,
    verify_cover,
    verify_partition,
)
from finecover.exact import Interval, QuadVal, pow2
from finecover.gauges import (
    DirectCode,
    Verdict,
    continuous_const,
    continuous_dist_to,
    scale_code,
    transfer_gauge_psi,
    verified_at_least,
)
from finecover.spaces import CantorPoint, UnitPoint

F = Fraction
STAGE = 8


def up(q):
    return UnitPoint.from_rat(F(q))


def const(q):
    return continuous_const(F(q))


def quarters(*tags):
    return TaggedPartition((F(0), F(1, 4), F(1, 2), F(3, 4), F(1)), tuple(map(up, tags)))


# -- partition structure -------------------------------------------------


def test_partition_structure_rejects():
    with pytest.raises(MalformedPartition):
        TaggedPartition((F(0), F(1, 2)), (up("1/4"),))  # last cut not 1
    with pytest.raises(MalformedPartition):
        TaggedPartition((F(0), F(3, 4), F(1, 2), F(1)), (up(0), up("1/2"), up("3/4")))
    with pytest.raises(MalformedPartition):
        TaggedPartition((F(0), F(1, 2), F(1)), (up("7/8"), up("3/4")))  # tag off-cell
    with pytest.raises(MalformedPartition):
        TaggedPartition((F(0), F(1)), ())  # missing tag


def test_partition_accepts_zero_width_cell_and_opaque_tag():
    t = TaggedPartition(
        (F(0), F(1, 2), F(1, 2), F(1)),
        (up("1/4"), up("1/2"), up("3/4")),
    )
    assert len(t.cells) == 3
    # opaque tag straddling its cell boundary is not refutable
    wob = UnitPoint.from_fn(lambda k: Interval(F(1, 2) - pow2(-k - 1), F(1, 2) + pow2(-k - 1)))
    TaggedPartition((F(0), F(1, 2), F(1)), (wob, up("3/4")))
    off = UnitPoint.from_fn(lambda k: Interval(F(7, 8), F(7, 8)))
    with pytest.raises(MalformedPartition):
        TaggedPartition((F(0), F(1, 2), F(1)), (off, up("3/4")))


# -- verify_partition ----------------------------------------------------


def test_verify_partition_quarters_yes():
    t = quarters(0, "1/4", "1/2", "3/4")
    assert verify_partition(const("1/2"), t, STAGE) is Verdict.YES


def test_verify_partition_width_boundary_non_strict():
    t = quarters("1/8", "3/8", "5/8", "7/8")
    assert verify_partition(const("1/4"), t, STAGE) is Verdict.YES


def test_verify_partition_halves_no():
    t = TaggedPartition((F(0), F(1, 2), F(1)), (up("1/4"), up("3/4")))
    assert verify_partition(const("1/8"), t, STAGE) is Verdict.NO


def test_verify_partition_identity_plus_small_no():
    from finecover.gauges import continuous_add, continuous_identity

    g = continuous_add(continuous_identity(), const("1/100"))
    t = TaggedPartition((F(0), F(1, 2), F(1)), (up(0), up("1/2")))
    assert verify_partition(g, t, STAGE) is Verdict.NO


# -- covers, witnesses, verify_cover -------------------------------------


def test_cover_merges_duplicates_keeping_larger_radius():
    c = FineCover([(up("1/2"), F(1, 4)), (up("1/2"), F(1, 2))])
    assert len(c) == 1
    assert c.radii[up("1/2")] == F(1, 2)


def test_cover_rejects_bad_entries():
    with pytest.raises(ValueError):
        FineCover([(up("1/2"), F(0))])
    with pytest.raises(ValueError):
        FineCover([])
    with pytest.raises(ValueError):
        FineCover([(up("1/2"), F(1, 2)), (CantorPoint.from_pattern("", "0"), F(1, 2))])


def test_uncovered_witness_frozen():
    c = FineCover([(up("1/8"), F(1, 4))])
    assert uncovered_witness(c) == F(1, 2)
    full = FineCover([(up("1/4"), F(1, 2)), (up("3/4"), F(1, 2))])
    assert uncovered_witness(full) is None


def test_verify_cover_covering_failure():
    c = FineCover([(up("1/8"), F(1, 4))])
    assert verify_cover(const("1/4"), c, STAGE) is Verdict.NO


def test_verify_cover_radius_failure():
    c = FineCover([(up("1/2"), F(3, 4))])
    assert verify_cover(const("1/4"), c, STAGE) is Verdict.NO


def test_verify_cover_yes():
    c = FineCover([(up("1/4"), F(1, 2)), (up("3/4"), F(1, 2))])
    assert verify_cover(const("1/2"), c, STAGE) is Verdict.YES


def test_verify_cover_cantor():
    zero = CantorPoint.from_pattern("0", "0")
    one = CantorPoint.from_pattern("1", "0")
    both = FineCover([(zero, F(1, 2)), (one, F(1, 2))])
    g = continuous_const(F(1, 2), domain="cantor")
    assert verify_cover(g, both, STAGE) is Verdict.YES
    half = FineCover([(zero, F(1, 2))])
    assert verify_cover(g, half, STAGE) is Verdict.NO
    w = uncovered_witness(half)
    assert w.bit(0) == 1


# -- conversions ---------------------------------------------------------


def test_partition_to_cover_frozen():
    t = TaggedPartition((F(0), F(1, 2), F(1)), (up("1/4"), up("3/4")))
    c = partition_to_cover(t)
    assert c.entries() == [(up("1/4"), F(1)), (up("3/4"), F(1))]

    t2 = TaggedPartition((F(0), F(1)), (up("1/2"),))
    assert partition_to_cover(t2).entries() == [(up("1/2"), F(2))]

    t3 = quarters("1/8", "3/8", "5/8", "7/8")
    c3 = partition_to_cover(t3)
    assert [r for _, r in c3.entries()] == [F(1, 2)] * 4


def test_partition_to_cover_drops_zero_cells():
    t = TaggedPartition((F(0), F(1, 2), F(1, 2), F(1)), (up("1/4"), up("1/2"), up("3/4")))
    c = partition_to_cover(t)
    assert len(c) == 2


def test_minimize_cover_frozen():
    c = FineCover([(up("1/4"), F(1, 2)), (up("1/2"), F(1, 8)), (up("3/4"), F(1, 2))])
    slim = minimize_cover(c)
    assert [p.exact_value() for p in slim.points] == [F(1, 4), F(3, 4)]
    with pytest.raises(NotACover):
        minimize_cover(FineCover([(up("1/8"), F(1, 4))]))


def test_cover_to_partition_frozen():
    c = FineCover([(up("1/4"), F(3, 4)), (up("3/4"), F(3, 4))])
    t = cover_to_partition(c)
    assert t.cuts == (F(0), F(1, 2), F(1))
    assert [x.exact_value() for x in t.tags] == [F(1, 4), F(3, 4)]

    t2 = cover_to_partition(FineCover([(up("1/2"), F(1))]))
    assert t2.cuts == (F(0), F(1))

    c3 = FineCover([(up(F(i, 8)), F(1, 4)) for i in (1, 3, 5, 7)])
    t3 = cover_to_partition(c3)
    assert t3.cuts == (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))


def test_cover_to_partition_quad_points_get_dyadic_cuts():
    r2 = QuadVal(F(0), F(1, 2))  # sqrt(2)/2
    pts = [(up("1/4"), F(1, 2)), (UnitPoint.from_quad(r2), F(1, 2)), (up("7/8"), F(1, 2))]
    t = cover_to_partition(FineCover(pts))
    assert all(isinstance(x, F) for x in t.cuts)
    v = r2
    lo, hi = t.cuts[1], t.cuts[2]
    assert lo < v < hi  # the quad tag sits inside its cell


# -- round trips ---------------------------------------------------------


def _piecewise_const_gauge(rng):
    """Random dyadic-breakpoint step gauge with values in [1/8, 1]."""
    k = rng.randrange(1, 4)
    cuts = sorted(rng.sample([F(i, 16) for i in range(1, 16)], k))
    cuts = [F(0)] + cuts + [F(1)]
    vals = [F(rng.randrange(2, 17), 16) for _ in range(len(cuts) - 1)]

    def f(x):
        for i in range(len(vals)):
            if cuts[i] <= x < cuts[i + 1]:
                return vals[i]
        return vals[-1]

    def at(p: UnitPoint, stage: int) -> Interval:
        return Interval.point(f(p.exact_value()))

    return DirectCode(at, domain="unit", label="step"), min(vals)


def test_round_trip_partition_cover_partition():
    rng = random.Random(7)
    for _ in range(25):
        g, m = _piecewise_const_gauge(rng)
        g2 = scale_code(g, 2)

        # partition with cells thinner than the gauge minimum
        n = 16 if m > F(1, 16) else 32
        cuts = tuple(F(i, n) for i in range(n + 1))
        tags = tuple(up(F(2 * i + 1, 2 * n)) for i in range(n))
        t = TaggedPartition(cuts, tags)
        assert verify_partition(g, t, STAGE) is Verdict.YES
        c = partition_to_cover(t)
        assert verify_cover(g2, c, STAGE) is Verdict.YES

        # cover from the search, back to a partition, against the doubled gauge
        cov = find_cover_unit(g, depth=8, stage=STAGE)
        assert isinstance(cov, FineCover)
        assert verify_cover(g, cov, STAGE) is Verdict.YES
        back = cover_to_partition(cov)
        assert verify_partition(g2, back, STAGE) is Verdict.YES


# -- unit search ---------------------------------------------------------


def test_find_cover_unit_const_quarter_frozen():
    c = find_cover_unit(const("1/4"), depth=8, stage=STAGE)
    assert isinstance(c, FineCover)
    assert len(c) == 8
    assert all(r == F(1, 8) for _, r in c.entries())
    assert [p.exact_value() for p, _ in c.entries()] == [F(2 * i + 1, 16) for i in range(8)]
    assert verify_cover(const("1/4"), c, STAGE) is Verdict.YES


def test_find_cover_unit_big_gauge_single_cell():
    c = find_cover_unit(const(2), depth=4, stage=STAGE)
    assert isinstance(c, FineCover)
    assert c.entries() == [(up("1/2"), F(1))]


def test_find_cover_unit_obstruction_whole_interval():
    r = find_cover_unit(const("1/8"), depth=2, stage=STAGE)
    assert isinstance(r, Obstruction)
    assert r.depth_reached == 2
    assert r.space == "unit"
    assert list(r.unresolved) == [Interval(F(0), F(1))]
    (entry,) = r.trace
    assert entry["last_verdict"] is Verdict.UNKNOWN
    assert entry["stage"] == STAGE


def test_find_cover_unit_obstruction_localizes():
    g = continuous_dist_to([F(1, 3)])
    r = find_cover_unit(g, depth=6, stage=STAGE)
    assert isinstance(r, Obstruction)
    total = sum(iv.width for iv in r.unresolved)
    assert total <= F(1, 8)
    assert any(iv.lo <= F(1, 3) <= iv.hi for iv in r.unresolved)

    deeper = find_cover_unit(g, depth=10, stage=STAGE)
    assert sum(iv.width for iv in deeper.unresolved) < total


def test_find_cover_unit_quad_hint():
    target = QuadVal(F(0), F(1, 2))  # sqrt(2)/2, interior to [1/2, 3/4]

    def at(p: UnitPoint, stage: int) -> Interval:
        if p.is_exact and p.exact_value() == target:
            return Interval.point(F(1))
        return Interval.point(F(1, 64))

    g = DirectCode(at, domain="unit", label="spike")
    miss = find_cover_unit(g, depth=2, stage=STAGE)
    assert isinstance(miss, Obstruction)
    assert list(miss.unresolved) == [Interval(F(0), F(1))]

    hit = find_cover_unit(g, depth=2, stage=STAGE, hints=[UnitPoint.from_quad(target)])
    assert isinstance(hit, Obstruction)
    # the spike value 1 beats the width of [1/2, 1] already at level 1
    assert list(hit.unresolved) == [Interval(F(0), F(1, 2))]


# -- cantor search -------------------------------------------------------


def test_find_cover_cantor_half_frozen():
    g = continuous_const(F(1, 2), domain="cantor")
    c = find_cover_cantor(g, depth=4, stage=STAGE)
    assert isinstance(c, FineCover)
    assert [(p.pattern, r) for p, r in c.entries()] == [
        (("", "0"), F(1, 2)),
        (("1", "0"), F(1, 2)),
    ]
    assert verify_cover(g, c, STAGE) is Verdict.YES


def test_find_cover_cantor_one_root_frozen():
    g = continuous_const(F(1), domain="cantor")
    c = find_cover_cantor(g, depth=4, stage=STAGE)
    assert isinstance(c, FineCover)
    assert c.entries() == [(CantorPoint.from_pattern("", "0"), F(1))]


def test_find_cover_cantor_obstruction():
    g = continuous_const(F(1, 8), domain="cantor")
    r = find_cover_cantor(g, depth=2, stage=STAGE)
    assert isinstance(r, Obstruction)
    assert [cyl.prefix for cyl in r.unresolved] == ["00", "01", "10", "11"]
    assert r.depth_reached == 2
    assert all(t["last_verdict"] is Verdict.UNKNOWN for t in r.trace)


def test_find_cover_cantor_hint_first():
    z = CantorPoint.from_pattern("01", "10")

    def at(p: CantorPoint, stage: int) -> Interval:
        return Interval.point(F(1) if p == z else F(1, 4))

    g = DirectCode(at, domain="cantor", label="pin")
    c = find_cover_cantor(g, depth=4, stage=STAGE, hints=[z])
    assert isinstance(c, FineCover)
    assert c.entries() == [(z, F(1))]
    blind = find_cover_cantor(g, depth=4, stage=STAGE)
    assert len(blind) == 4  # without the hint it must go to width 1/4


# -- transfers -----------------------------------------------------------


def test_transfer_cover_phi_frozen():
    zero = CantorPoint.from_pattern("0", "0")
    one = CantorPoint.from_pattern("1", "0")
    c = FineCover([(zero, F(3, 4)), (one, F(3, 4))])
    pushed = transfer_cover_phi(c)
    assert [(p.exact_value(), r) for p, r in pushed.entries()] == [
        (F(0), F(3, 4)),
        (F(1, 2), F(3, 4)),
    ]


def test_transfer_cover_psi_on_set_points():
    c = FineCover([(up("2/3"), F(1, 9)), (up("1/3"), F(1, 3))])
    back = transfer_cover_psi(c)
    got = {(p.pattern, r) for p, r in back.entries()}
    # 2/3 lifts to 100... with one agreed bit; 1/3 lifts to 0111... at the root
    assert (("1", "0"), F(1, 2)) in got
    assert (("0", "1"), F(1)) in got


def test_transfer_cover_psi_drops_gap_balls():
    c = FineCover([(up("1/2"), F(1, 8)), (up("1/3"), F(1, 2))])
    back = transfer_cover_psi(c)
    assert len(back) == 1
    with pytest.raises(NotACover):
        transfer_cover_psi(FineCover([(up("1/2"), F(1, 8))]))


def test_transfer_cover_psi_anchors_off_set_ball():
    # 5/16 is off the set but its ball [1/4, 3/8] touches it at 1/4
    c = FineCover([(up("5/16"), F(1, 16)), (up("1/2"), F(3, 4))])
    back = transfer_cover_psi(c)
    got = {(p.pattern, r) for p, r in back.entries()}
    assert (("", "01"), F(1, 2)) in got  # anchored at 1/4 = 0.020202... base 3
    assert (("", "0"), F(1)) in got  # huge ball anchors at 0 and covers the root
    assert uncovered_witness(back) is None


def test_psi_pipeline_round_trip():
    # Dyadic samples all but never land on the middle-thirds set, so cells
    # around set points would stall without hints; seed the search with the
    # leftmost set point of every finest-level cell boundary.
    from finecover.spaces import leftmost_cantor_ge

    g = continuous_const(F(1, 4), domain="cantor")
    lifted = transfer_gauge_psi(g)
    hints = sorted({leftmost_cantor_ge(F(i, 256)) for i in range(257)})
    cov = find_cover_unit(
        lifted, depth=8, stage=STAGE, hints=[UnitPoint.from_rat(h) for h in hints]
    )
    assert isinstance(cov, FineCover)
    assert verify_cover(lifted, cov, STAGE) is Verdict.YES
    back = transfer_cover_psi(cov)
    assert verify_cover(g, back, STAGE) is Verdict.YES


def test_phi_pipeline_round_trip():
    from finecover.gauges import pullback_gauge_phi

    g = continuous_const(F(3, 16))
    pulled = pullback_gauge_phi(g)
    cc = find_cover_cantor(pulled, depth=6, stage=STAGE)
    assert isinstance(cc, FineCover)
    assert verify_cover(pulled, cc, STAGE) is Verdict.YES
    pushed = transfer_cover_phi(cc)
    assert verify_cover(g, pushed, STAGE) is Verdict.YES
