"""Tagged partitions, fine covers, the factor-2 conversions, and the
subdivision searches that either find a fine cover or report exactly
where they got stuck.

Fineness conventions, fixed here once: a partition cell [a,b] with tag t
needs the gauge at t to be >= b-a (non-strict); a cover entry (p, r)
needs the gauge at p to be >= r. The searches accept a unit-interval cell
only on the strict verdict "gauge at sample > cell width" and emit the
cell width as the radius, so accepted entries always verify with margin.
On the sequence space the ball B(x, r) IS the cylinder [x restricted to m]
with 2^-m <= r, so the acceptance test is the non-strict "gauge >= 2^-depth".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exact import (
    Interval,
    QuadVal,
    ceil_log_recip,
    pow2,
    simplest_dyadic_between,
)
from .gauges import GaugeCode, Verdict, verified_above, verified_at_least
from .spaces import (
    CantorPoint,
    Cylinder,
    UnitPoint,
    cylinder_for_ball,
    dist_to_cantor,
    leftmost_cantor_ge,
    phi,
    psi_preimage_point,
)


class MalformedPartition(ValueError):
    """Structural invariant of a tagged partition fails."""


class NotACover(ValueError):
    """An operation requiring an exact covering received a non-covering."""


@dataclass(frozen=True)
class TaggedPartition:
    """Cuts 0 = x0 <= x1 <= ... <= xn = 1 with a tag in every cell."""

    cuts: tuple
    tags: tuple

    def __post_init__(self) -> None:
        cuts = tuple(Fraction(c) for c in self.cuts)
        tags = tuple(self.tags)
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "tags", tags)
        if len(cuts) < 2:
            raise MalformedPartition("need at least the two endpoint cuts")
        if cuts[0] != 0 or cuts[-1] != 1:
            raise MalformedPartition(f"cuts must run from 0 to 1, got {cuts[0]}..{cuts[-1]}")
        if any(a > b for a, b in zip(cuts, cuts[1:])):
            raise MalformedPartition("cuts must be nondecreasing")
        if len(tags) != len(cuts) - 1:
            raise MalformedPartition(f"{len(cuts) - 1} cells but {len(tags)} tags")
        for i, tag in enumerate(tags):
            if not isinstance(tag, UnitPoint):
                raise MalformedPartition(f"tag {i} is not a point of [0,1]")
            lo, hi = cuts[i], cuts[i + 1]
            if tag.is_exact:
                v = tag.exact_value()
                if v < lo or v > hi:
                    raise MalformedPartition(f"tag {i} = {v} outside its cell [{lo},{hi}]")
            else:
                box = tag.approx(24)
                if box.hi < lo or box.lo > hi:
                    raise MalformedPartition(f"tag {i} verifiably outside its cell [{lo},{hi}]")

    @property
    def cells(self):
        return [
            (self.cuts[i], self.cuts[i + 1], self.tags[i])
            for i in range(len(self.tags))
        ]


def _unit_sort_key(p: UnitPoint):
    v = p.exact_value()
    return v.as_fraction() if isinstance(v, QuadVal) and v.is_rational else v


def _cantor_sort_key(p: CantorPoint):
    return (p.bits(48), p.pattern or ("", ""))


class FineCover:
    """Finite set of points with a positive radius each.

    Duplicate points are merged keeping the larger radius (covering and
    fineness both survive: the kept ball contains the dropped one). Points
    must be exact (the searches only ever emit exact sample points) and
    all from one space.
    """

    def __init__(self, entries):
        merged: dict = {}
        order: list = []
        space = None
        for p, r in entries:
            r = Fraction(r)
            if r <= 0:
                raise ValueError(f"cover radius must be > 0, got {r} at {p!r}")
            if isinstance(p, UnitPoint):
                here = "unit"
                if not p.is_exact:
                    raise ValueError("cover points must be exact")
            elif isinstance(p, CantorPoint):
                here = "cantor"
            else:
                raise ValueError(f"not a point: {p!r}")
            if space is None:
                space = here
            elif space != here:
                raise ValueError("cover mixes points from both spaces")
            if p in merged:
                merged[p] = max(merged[p], r)
            else:
                merged[p] = r
                order.append(p)
        if space is None:
            raise ValueError("a cover needs at least one point")
        self.space = space
        if space == "unit":
            order.sort(key=_unit_sort_key)
        else:
            order.sort(key=_cantor_sort_key)
        self.points: list = order
        self.radii: dict = merged

    def __len__(self) -> int:
        return len(self.points)

    def entries(self):
        return [(p, self.radii[p]) for p in self.points]

    def balls(self) -> list[Interval]:
        """Unit-interval balls [p-r, p+r], in point order."""
        if self.space != "unit":
            raise ValueError("balls() is for unit-interval covers")
        out = []
        for p in self.points:
            v = p.exact_value()
            r = self.radii[p]
            out.append((v - r, v + r))
        return out

    def __repr__(self) -> str:
        return f"FineCover({self.space}, {len(self.points)} points)"


@dataclass(frozen=True)
class Obstruction:
    """Regions a search could not resolve by its depth limit.

    Every region's acceptance test last answered Unknown: a sample saying
    No never refutes the existential test, so a No verdict here would be
    dishonest.
    """

    unresolved: tuple
    trace: tuple
    depth_reached: int
    space: str


def uncovered_witness(cover: FineCover):
    """An explicit point missed by the cover, or None if it covers everything.

    Unit side: exact sweep over the closed balls; the witness is the
    simplest dyadic rational in the first gap. Cantor side: leftmost
    unresolved branch of the cylinder prefix tree.
    """
    if cover.space == "unit":
        balls = sorted(cover.balls())
        t = Fraction(0)
        i = 0
        n = len(balls)
        while i < n and balls[i][0] <= t:
            t = max(t, balls[i][1])
            i += 1
        if t >= 1:
            return None
        nxt = balls[i][0] if i < n else Fraction(1)
        return simplest_dyadic_between(t, min(nxt, Fraction(1)))
    prefixes = {cylinder_for_ball(p, cover.radii[p]).prefix for p in cover.points}
    maxlen = max(len(s) for s in prefixes)

    def probe(node: str) -> Optional[str]:
        if any(node[:d] in prefixes for d in range(len(node) + 1)):
            return None
        if len(node) >= maxlen:
            return node
        left = probe(node + "0")
        if left is not None:
            return left
        return probe(node + "1")

    bad = probe("")
    if bad is None:
        return None
    return CantorPoint.from_pattern(bad, "0")


def verify_partition(g: GaugeCode, part: TaggedPartition, stage: int) -> Verdict:
    """Is every cell within the gauge at its tag? Yes / No / Unknown."""
    saw_unknown = False
    for lo, hi, tag in part.cells:
        v = verified_at_least(g, tag, hi - lo, stage)
        if v is Verdict.NO:
            return Verdict.NO
        if v is Verdict.UNKNOWN:
            saw_unknown = True
    return Verdict.UNKNOWN if saw_unknown else Verdict.YES


def verify_cover(g: GaugeCode, cover: FineCover, stage: int) -> Verdict:
    """Exact covering check, then per-point radius-below-gauge verdicts."""
    if uncovered_witness(cover) is not None:
        return Verdict.NO
    saw_unknown = False
    for p, r in cover.entries():
        v = verified_at_least(g, p, r, stage)
        if v is Verdict.NO:
            return Verdict.NO
        if v is Verdict.UNKNOWN:
            saw_unknown = True
    return Verdict.UNKNOWN if saw_unknown else Verdict.YES


def partition_to_cover(part: TaggedPartition) -> FineCover:
    """Tags become cover points with twice the cell width as radius."""
    entries = []
    for lo, hi, tag in part.cells:
        if hi == lo:
            continue  # radius would be 0; those cells carry no ball
        entries.append((tag, 2 * (hi - lo)))
    return FineCover(entries)


def minimize_cover(cover: FineCover) -> FineCover:
    """Drop every ball contained in another; the covering must survive intact."""
    if cover.space != "unit":
        raise ValueError("minimize_cover works on unit-interval covers")
    if uncovered_witness(cover) is not None:
        raise NotACover("input does not cover [0,1]")
    rows = []
    for p, r in cover.entries():
        v = p.exact_value()
        rows.append((v - r, -(v + r), p, r))
    rows.sort()
    best_hi = None
    kept = []
    for lo, neg_hi, p, r in rows:
        hi = -neg_hi
        if best_hi is not None and hi <= best_hi:
            continue
        best_hi = hi
        kept.append((p, r))
    return FineCover(kept)


def cover_to_partition(cover: FineCover) -> TaggedPartition:
    """Minimized cover points become tags; cuts split the neighbor overlaps.

    Cut choice: the midpoint of the overlap when it is rational, else the
    simplest dyadic rational strictly inside (cover points may be exact
    quadratic irrationals; cuts must stay rational).
    """
    slim = minimize_cover(cover)
    pts = [(p, p.exact_value(), slim.radii[p]) for p in slim.points]
    cuts = [Fraction(0)]
    for (p0, v0, r0), (p1, v1, r1) in zip(pts, pts[1:]):
        lo = max(v0, v1 - r1)
        hi = min(v1, v0 + r0)
        if lo > hi:
            raise NotACover(f"adjacent balls at {v0} and {v1} fail to overlap")
        if lo == hi:
            if isinstance(lo, QuadVal) and not lo.is_rational:
                raise NotACover(f"overlap degenerates to the irrational point {lo}")
            cut = lo.as_fraction() if isinstance(lo, QuadVal) else lo
        else:
            mid = (lo + hi) * Fraction(1, 2)
            if isinstance(mid, QuadVal):
                cut = mid.as_fraction() if mid.is_rational else simplest_dyadic_between(lo, hi)
            else:
                cut = mid
        cuts.append(Fraction(cut))
    cuts.append(Fraction(1))
    return TaggedPartition(tuple(cuts), tuple(p for p, _, _ in pts))


# -- subdivision searches ------------------------------------------------


def _exact_unit_hints(hints) -> list[UnitPoint]:
    out = []
    for h in hints or ():
        if not isinstance(h, UnitPoint) or not h.is_exact:
            raise ValueError(f"search hints must be exact points, got {h!r}")
        out.append(h)
    out.sort(key=_unit_sort_key)
    return out


def _merge_dyadic_run(cells: list[int], level: int) -> list[Interval]:
    """Maximal runs of adjacent level-`level` cells as closed intervals."""
    if not cells:
        return []
    cells = sorted(cells)
    w = pow2(-level)
    out = []
    start = prev = cells[0]
    for i in cells[1:]:
        if i == prev + 1:
            prev = i
            continue
        out.append(Interval(start * w, (prev + 1) * w))
        start = prev = i
    out.append(Interval(start * w, (prev + 1) * w))
    return out


def find_cover_unit(g: GaugeCode, depth: int, stage: int, hints=()) -> Union[FineCover, Obstruction]:
    """Subdivide [0,1] into dyadic cells until the gauge verifiably beats
    each cell's width at some sample point.

    A cell [a,b] is accepted on the first sample m (in-cell hints in
    ascending order, then midpoint, then endpoints) with the strict verdict
    gauge(m) > b-a; it contributes the entry (m, b-a). Cells still
    unaccepted at `depth` come back as an Obstruction of merged dyadic runs.
    """
    if depth < 1:
        raise ValueError("need depth >= 1")
    hints = _exact_unit_hints(hints)
    entries = []
    frontier = [0]  # cell indices at the current level
    for level in range(depth + 1):
        w = pow2(-level)
        survivors = []
        for i in frontier:
            a, b = i * w, (i + 1) * w
            samples = [h for h in hints if a <= h.exact_value() <= b]
            mid = UnitPoint.from_rat((a + b) / 2)
            for cand in (mid, UnitPoint.from_rat(a), UnitPoint.from_rat(b)):
                if all(s != cand for s in samples):
                    samples.append(cand)
            for m in samples:
                if verified_above(g, m, b - a, stage) is Verdict.YES:
                    entries.append((m, b - a))
                    break
            else:
                survivors.append(i)
        if not survivors:
            return FineCover(entries)
        if level == depth:
            regions = _merge_dyadic_run(survivors, level)
            trace = tuple(
                {"region": reg, "last_verdict": Verdict.UNKNOWN, "stage": stage}
                for reg in regions
            )
            return Obstruction(tuple(regions), trace, depth, "unit")
        frontier = [c for i in survivors for c in (2 * i, 2 * i + 1)]
    raise AssertionError("unreachable")


def find_cover_cantor(g: GaugeCode, depth: int, stage: int, hints=()) -> Union[FineCover, Obstruction]:
    """Breadth-first over cylinders: accept [sigma] once the gauge at some
    sample point of the cylinder is verifiably >= its width 2^-|sigma|.

    Samples are in-cylinder hints first, then the two constant-tail
    extensions. Accepted cylinders contribute (sample, 2^-|sigma|);
    survivors at `depth` form the Obstruction, sorted by prefix.
    """
    if depth < 1:
        raise ValueError("need depth >= 1")
    hints = sorted(hints or (), key=_cantor_sort_key)
    entries = []
    frontier = [""]
    for level in range(depth + 1):
        w = pow2(-level)
        survivors = []
        for prefix in frontier:
            samples = [h for h in hints if h.bits(level) == prefix]
            for bit in (0, 1):
                cand = CantorPoint.from_pattern(prefix, str(bit))
                if all(s != cand for s in samples):
                    samples.append(cand)
            for m in samples:
                if verified_at_least(g, m, w, stage) is Verdict.YES:
                    entries.append((m, w))
                    break
            else:
                survivors.append(prefix)
        if not survivors:
            return FineCover(entries)
        if level == depth:
            regions = tuple(Cylinder(s) for s in sorted(survivors))
            trace = tuple(
                {"region": reg, "last_verdict": Verdict.UNKNOWN, "stage": stage}
                for reg in regions
            )
            return Obstruction(regions, trace, depth, "cantor")
        frontier = [s + c for s in survivors for c in "01"]
    raise AssertionError("unreachable")


# -- transfers of covers between the spaces ------------------------------


def transfer_cover_phi(cover: FineCover) -> FineCover:
    """Push a sequence-space cover through the binary-expansion map.

    phi is 1-Lipschitz onto [0,1], so the image points with unchanged radii
    cover the interval and stay fine for the gauge the pullback was built
    from.
    """
    if cover.space != "cantor":
        raise ValueError("phi transfer pushes sequence-space covers forward")
    return FineCover([(phi(p), r) for p, r in cover.entries()])


def transfer_cover_psi(cover: FineCover) -> FineCover:
    """Pull a unit-interval cover back to the sequence space through psi.

    Entries whose ball verifiably misses the middle-thirds set C are
    dropped (psi's image never meets them). An entry at a point of C with
    radius r yields the cylinder of depth ceil(log3 1/r) - 1 at the psi
    preimage: points of C within r agree with the anchor on that many
    ternary digits, hence on that many bits upstairs. An entry centered
    off C but touching it is anchored at the leftmost C point of its ball,
    with the depth derived from the doubled radius.
    """
    if cover.space != "unit":
        raise ValueError("psi transfer pulls unit-interval covers back")
    entries = []
    for p, r in cover.entries():
        v = p.exact_value()
        if isinstance(v, QuadVal):
            if not v.is_rational:
                raise ValueError(f"psi transfer needs rational cover points, got {v}")
            v = v.as_fraction()
        lo, hi = max(v - r, Fraction(0)), min(v + r, Fraction(1))
        if lo > hi:
            continue  # ball entirely outside [0,1]
        d = dist_to_cantor(min(max(v, Fraction(0)), Fraction(1)))
        if d == 0 and 0 <= v <= 1:
            anchor, reach = v, r
        else:
            w = leftmost_cantor_ge(lo)
            if w > hi:
                continue  # ball misses the set entirely
            anchor, reach = w, 2 * r
        m = ceil_log_recip(min(reach, Fraction(1)), 3)
        entries.append((psi_preimage_point(anchor), pow2(-max(m - 1, 0))))
    if not entries:
        raise NotACover("no cover entry touches the middle-thirds set")
    return FineCover(entries)
