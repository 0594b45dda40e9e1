"""Coded gauges with stage-indexed three-valued evaluation.

Four code strengths: continuous (region evaluator), direct (exact point
evaluator), and pointwise limits at one or two levels (a sequence of
continuous codes, or a sequence of such sequences). Evaluation never
assumes a limit exists: `eval_enclosure` reports an interval consistent
with what has been observed through the stage budget, and `verified_above`
turns that into Yes / No / Unknown with both positive answers permanent.

Permanence is structural, not hoped for. Continuous and monotone direct
codes fold every enclosure they ever produce into a per-point running
intersection; limit codes fold only *certificates* derived from a declared
convergence modulus, because their raw trailing-block hulls may legitimately
jump around before the modulus kicks in. No-verdicts for limit codes come
from the certified interval alone.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Callable, Optional, Union

from .exact import (
    CauchyViolation,
    Interval,
    iv_abs,
    iv_hull,
    iv_intersect,
    iv_pad,
    iv_refine,
    iv_scale,
    iv_sub,
    pow2,
    pow3,
    floor_log_recip,
)
from .spaces import (
    Ball,
    CantorPoint,
    Cylinder,
    UnitPoint,
    dist_to_cantor,
    phi,
    psi_preimage_point,
)

UNIT = Interval(Fraction(0), Fraction(1))


class DomainError(ValueError):
    """A point or region lies outside the code's declared domain."""


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


Point = Union[UnitPoint, CantorPoint]
Region = Union[Interval, Cylinder]


def _point_region(x: Point, k: int, domain: str) -> Region:
    if domain == "unit":
        if not isinstance(x, UnitPoint):
            raise DomainError(f"unit-interval code evaluated at {x!r}")
        box = iv_intersect(x.approx(k), UNIT)
        if box is None:
            raise DomainError(f"point {x!r} verifiably outside [0,1]")
        return box
    if not isinstance(x, CantorPoint):
        raise DomainError(f"sequence-space code evaluated at {x!r}")
    return Cylinder(x.bits(k))


def _ladder(stage: int) -> list[int]:
    """Stages actually evaluated under budget `stage`: powers of two, then the budget."""
    if stage < 0:
        raise ValueError("stage must be >= 0")
    out = []
    s = 1
    while s <= stage:
        out.append(s)
        s *= 2
    if not out or out[-1] != stage:
        out.append(stage)
    return out


def _iv_gap(a: Interval, b: Interval) -> Fraction:
    return max(abs(a.lo - b.lo), abs(a.hi - b.hi))


def _resolvable_j(modulus: Callable[[int], int], stage: int) -> Optional[int]:
    """Largest j with modulus(j) <= stage, i.e. the finest 2^-j certified by now.

    Assumes modulus is nondecreasing in j. The scan cap keeps a constant
    modulus from looping forever.
    """
    best = None
    j = 0
    while j <= 4 * stage + 64 and modulus(j) <= stage:
        best = j
        j += 1
    return best


class ContinuousCode:
    """A coded continuous function via a sound region evaluator.

    region_eval(region, k) must enclose {f(t) : t in region} and tighten as
    the region shrinks and k grows. Point queries go through the point's own
    width <= 2^-k approximant.
    """

    kind = "continuous"

    def __init__(self, region_eval: Callable[[Region, int], Interval], domain: str = "unit", label: str = ""):
        self.region_eval = region_eval
        self.domain = domain
        self.label = label
        self._acc: dict[Point, Interval] = {}

    def _eval(self, x: Point, stage: int) -> Interval:
        raw = self.region_eval(_point_region(x, stage, self.domain), stage)
        got = iv_refine(self._acc.get(x), raw, what=f"continuous code {self.label or id(self)} at {x!r}")
        self._acc[x] = got
        return got

    def __repr__(self) -> str:
        return f"ContinuousCode({self.label or '...'}, domain={self.domain})"


class DirectCode:
    """A gauge whose values are computed outright, no tower of codes.

    `monotone` says the evaluator's enclosures at a fixed point nest as the
    stage grows; only then are they intersected across calls. Evaluators
    whose fallback intervals are stand-ins rather than sound limit
    enclosures must pass monotone=False.
    """

    kind = "direct"

    def __init__(
        self,
        point_eval: Callable[[Point, int], Interval],
        domain: str = "unit",
        monotone: bool = True,
        label: str = "",
    ):
        self.point_eval = point_eval
        self.domain = domain
        self.monotone = monotone
        self.label = label
        self._acc: dict[Point, Interval] = {}

    def _eval(self, x: Point, stage: int) -> Interval:
        raw = self.point_eval(x, stage)
        if not self.monotone:
            return raw
        got = iv_refine(self._acc.get(x), raw, what=f"direct code {self.label or id(self)} at {x!r}")
        self._acc[x] = got
        return got

    def __repr__(self) -> str:
        return f"DirectCode({self.label or '...'}, domain={self.domain})"


def _block(stage: int) -> tuple[int, int]:
    # trailing half-block; below stage 2 peek at the first two terms so a
    # successive gap is always observable
    if stage < 2:
        return 1, 2
    return -(-stage // 2), stage


def _block_enclosure(term_at: Callable[[int], Interval], stage: int) -> Interval:
    lo_n, hi_n = _block(stage)
    boxes = [term_at(n) for n in range(lo_n, hi_n + 1)]
    hull = boxes[0]
    worst = Fraction(0)
    for a, b in zip(boxes, boxes[1:]):
        hull = iv_hull(hull, b)
        worst = max(worst, _iv_gap(a, b))
    return iv_pad(hull, worst)


class Baire1Code:
    """A pointwise limit of continuous codes, known only term by term.

    modulus, when declared, maps j to an index N past which every term sits
    within 2^-j of the limit (nondecreasing in j). It is the only source of
    negative information: without it the trailing-block hull says what the
    limit *could* be, never what it is not.
    """

    kind = "baire1"

    def __init__(
        self,
        terms: Callable[[int], ContinuousCode],
        modulus: Optional[Callable[[int], int]] = None,
        domain: str = "unit",
        label: str = "",
    ):
        self.terms = terms
        self.modulus = modulus
        self.domain = domain
        self.label = label
        self._term_cache: dict[int, ContinuousCode] = {}
        self._cert: dict[Point, Interval] = {}
        self._best_lo: dict[Point, Fraction] = {}

    def term(self, n: int) -> ContinuousCode:
        if n not in self._term_cache:
            code = self.terms(n)
            if code.domain != self.domain:
                raise DomainError(f"term {n} declares domain {code.domain}, code is {self.domain}")
            self._term_cache[n] = code
        return self._term_cache[n]

    def _certificate(self, x: Point, stage: int) -> Optional[Interval]:
        if self.modulus is None:
            return None
        j = _resolvable_j(self.modulus, stage)
        if j is None:
            return None
        n = max(1, self.modulus(j))
        return iv_pad(self.term(n)._eval(x, stage), pow2(-j))

    def _eval(self, x: Point, stage: int) -> Interval:
        hull = _block_enclosure(lambda n: self.term(n)._eval(x, stage), stage)
        cert = self._certificate(x, stage)
        if cert is not None:
            self._cert[x] = iv_refine(self._cert.get(x), cert, what=f"certificate of {self.label or id(self)} at {x!r}")
        known = self._cert.get(x)
        if known is not None:
            got = iv_intersect(hull, known)
            if got is None:
                raise CauchyViolation(
                    f"limit code {self.label or id(self)}: block hull {hull} avoids certified {known} at {x!r}"
                )
        else:
            got = hull
        prev = self._best_lo.get(x)
        self._best_lo[x] = got.lo if prev is None else max(prev, got.lo)
        return got

    def __repr__(self) -> str:
        return f"Baire1Code({self.label or '...'}, domain={self.domain})"


class Baire2Code:
    """A pointwise limit of Baire1Codes; one more level of the same policy."""

    kind = "baire2"

    def __init__(
        self,
        terms: Callable[[int], Baire1Code],
        modulus: Optional[Callable[[int], int]] = None,
        domain: str = "unit",
        label: str = "",
    ):
        self.terms = terms
        self.modulus = modulus
        self.domain = domain
        self.label = label
        self._term_cache: dict[int, Baire1Code] = {}
        self._cert: dict[Point, Interval] = {}
        self._best_lo: dict[Point, Fraction] = {}

    def term(self, n: int) -> Baire1Code:
        if n not in self._term_cache:
            code = self.terms(n)
            if code.domain != self.domain:
                raise DomainError(f"term {n} declares domain {code.domain}, code is {self.domain}")
            self._term_cache[n] = code
        return self._term_cache[n]

    def _certificate(self, x: Point, stage: int) -> Optional[Interval]:
        if self.modulus is None:
            return None
        j = _resolvable_j(self.modulus, stage)
        if j is None:
            return None
        n = max(1, self.modulus(j))
        return iv_pad(self.term(n)._eval(x, stage), pow2(-j))

    def _eval(self, x: Point, stage: int) -> Interval:
        hull = _block_enclosure(lambda n: self.term(n)._eval(x, stage), stage)
        cert = self._certificate(x, stage)
        if cert is not None:
            self._cert[x] = iv_refine(self._cert.get(x), cert, what=f"certificate of {self.label or id(self)} at {x!r}")
        known = self._cert.get(x)
        if known is not None:
            got = iv_intersect(hull, known)
            if got is None:
                raise CauchyViolation(
                    f"limit code {self.label or id(self)}: block hull {hull} avoids certified {known} at {x!r}"
                )
        else:
            got = hull
        prev = self._best_lo.get(x)
        self._best_lo[x] = got.lo if prev is None else max(prev, got.lo)
        return got

    def __repr__(self) -> str:
        return f"Baire2Code({self.label or '...'}, domain={self.domain})"


GaugeCode = Union[ContinuousCode, DirectCode, Baire1Code, Baire2Code]


def eval_enclosure(g: GaugeCode, x: Point, stage: int) -> Interval:
    """Interval consistent with every limit value observable through `stage`."""
    if stage < 0:
        raise ValueError("stage must be >= 0")
    return g._eval(x, stage)


def _decide(lo, hi, q: Fraction, strict: bool, g, x) -> Optional[Verdict]:
    yes = lo is not None and (lo > q if strict else lo >= q)
    no = hi is not None and (hi <= q if strict else hi < q)
    if yes and no:
        op = ">" if strict else ">="
        raise CauchyViolation(f"code {g!r} verifies both sides of {op} {q} at {x!r}")
    if yes:
        return Verdict.YES
    if no:
        return Verdict.NO
    return None


def _verdict(g: GaugeCode, x: Point, q, stage: int, strict: bool) -> Verdict:
    q = Fraction(q)
    if q < 0:
        raise ValueError("need q >= 0")
    aggregated = g.kind in ("baire1", "baire2") or (g.kind == "direct" and not g.monotone)
    best_lo: Optional[Fraction] = None
    min_hi: Optional[Fraction] = None
    for s in _ladder(stage):
        box = eval_enclosure(g, x, s)
        if aggregated:
            best_lo = box.lo if best_lo is None else max(best_lo, box.lo)
            min_hi = box.hi if min_hi is None else min(min_hi, box.hi)
            continue
        # accumulated interval only shrinks, so a decision now is permanent
        # and cannot conflict with later stages (those would fail to refine)
        acc = g._acc[x]
        got = _decide(acc.lo, acc.hi, q, strict, g, x)
        if got is not None:
            return got
    if not aggregated:
        return Verdict.UNKNOWN
    if g.kind in ("baire1", "baire2"):
        cert = g._cert.get(x)
        lo, hi = g._best_lo[x], (cert.hi if cert is not None else None)
    else:
        lo, hi = best_lo, min_hi
    got = _decide(lo, hi, q, strict, g, x)
    return got if got is not None else Verdict.UNKNOWN


def verified_above(g: GaugeCode, x: Point, q, stage: int) -> Verdict:
    """Three-valued answer to "gauge value at x > q", permanent once decided."""
    return _verdict(g, x, q, stage, strict=True)


def verified_at_least(g: GaugeCode, x: Point, q, stage: int) -> Verdict:
    """Like verified_above but for the non-strict "gauge value at x >= q"."""
    return _verdict(g, x, q, stage, strict=False)


# -- continuous-code constructors ---------------------------------------


def continuous_const(q, domain: str = "unit") -> ContinuousCode:
    q = Fraction(q)
    return ContinuousCode(lambda region, k: Interval.point(q), domain=domain, label=str(q))


def continuous_identity() -> ContinuousCode:
    return ContinuousCode(lambda region, k: region, domain="unit", label="x")


def _combine2(op, a: ContinuousCode, b: ContinuousCode, name: str) -> ContinuousCode:
    if a.domain != b.domain:
        raise DomainError(f"cannot combine {a.domain} code with {b.domain} code")
    return ContinuousCode(
        lambda region, k: op(a.region_eval(region, k), b.region_eval(region, k)),
        domain=a.domain,
        label=f"{name}({a.label},{b.label})",
    )


def continuous_add(a: ContinuousCode, b: ContinuousCode) -> ContinuousCode:
    from .exact import iv_add

    return _combine2(iv_add, a, b, "add")


def continuous_sub(a: ContinuousCode, b: ContinuousCode) -> ContinuousCode:
    return _combine2(iv_sub, a, b, "sub")


def continuous_mul(a: ContinuousCode, b: ContinuousCode) -> ContinuousCode:
    from .exact import iv_mul

    return _combine2(iv_mul, a, b, "mul")


def continuous_min(a: ContinuousCode, b: ContinuousCode) -> ContinuousCode:
    from .exact import iv_min

    return _combine2(iv_min, a, b, "min")


def continuous_max(a: ContinuousCode, b: ContinuousCode) -> ContinuousCode:
    from .exact import iv_max

    return _combine2(iv_max, a, b, "max")


def continuous_abs(a: ContinuousCode) -> ContinuousCode:
    return ContinuousCode(
        lambda region, k: iv_abs(a.region_eval(region, k)),
        domain=a.domain,
        label=f"abs({a.label})",
    )


def continuous_scale(q, a: ContinuousCode) -> ContinuousCode:
    q = Fraction(q)
    return ContinuousCode(
        lambda region, k: iv_scale(q, a.region_eval(region, k)),
        domain=a.domain,
        label=f"scale({q},{a.label})",
    )


def continuous_dist_to(points) -> ContinuousCode:
    """x |-> min |x - p| over a finite set of rationals."""
    pts = sorted(Fraction(p) for p in points)
    if not pts:
        raise ValueError("need at least one point")

    def ev(region: Interval, k: int) -> Interval:
        best = None
        for p in pts:
            d = iv_abs(iv_sub(region, Interval.point(p)))
            best = d if best is None else Interval(min(best.lo, d.lo), min(best.hi, d.hi))
        return best

    return ContinuousCode(ev, domain="unit", label=f"dist{tuple(str(p) for p in pts)}")


# -- generic combinators -------------------------------------------------


def scale_code(g: GaugeCode, factor) -> GaugeCode:
    """Pointwise positive rational multiple of a gauge, any code kind."""
    c = Fraction(factor)
    if c <= 0:
        raise ValueError("scaling factor must be > 0")
    shift = 0
    while pow2(shift) < c:
        shift += 1
    if g.kind == "continuous":
        return ContinuousCode(
            lambda region, k: iv_scale(c, g.region_eval(region, k)),
            domain=g.domain,
            label=f"scale({c},{g.label})",
        )
    if g.kind == "direct":
        return DirectCode(
            lambda x, s: iv_scale(c, g.point_eval(x, s)),
            domain=g.domain,
            monotone=g.monotone,
            label=f"scale({c},{g.label})",
        )
    modulus = None if g.modulus is None else (lambda j, _m=g.modulus, _sh=shift: _m(j + _sh))
    if g.kind == "baire1":
        return Baire1Code(
            lambda n: continuous_scale(c, g.term(n)),
            modulus=modulus,
            domain=g.domain,
            label=f"scale({c},{g.label})",
        )
    return Baire2Code(
        lambda n: scale_code(g.term(n), c),
        modulus=modulus,
        domain=g.domain,
        label=f"scale({c},{g.label})",
    )


# -- transfers between the two spaces ------------------------------------


def pullback_gauge_phi(g: GaugeCode) -> GaugeCode:
    """The sequence-space gauge x |-> g(phi(x)), any code kind.

    phi is 1-Lipschitz, so a cover fine for the pullback pushes forward
    (same radii) to a cover fine for g.
    """
    if g.domain != "unit":
        raise DomainError("pullback needs a unit-interval code")
    if g.kind == "continuous":
        return ContinuousCode(
            lambda cyl, k: g.region_eval(cyl.phi_interval(), k),
            domain="cantor",
            label=f"phi*({g.label})",
        )
    if g.kind == "direct":
        return DirectCode(
            lambda x, s: g.point_eval(phi(x), s),
            domain="cantor",
            monotone=g.monotone,
            label=f"phi*({g.label})",
        )
    if g.kind == "baire1":
        return Baire1Code(
            lambda n: pullback_gauge_phi(g.term(n)),
            modulus=g.modulus,
            domain="cantor",
            label=f"phi*({g.label})",
        )
    return Baire2Code(
        lambda n: pullback_gauge_phi(g.term(n)),
        modulus=g.modulus,
        domain="cantor",
        label=f"phi*({g.label})",
    )


def _third_bucket(v: Fraction) -> Fraction:
    # value in (2^-(n+1), 2^-n] maps to 3^-(n+1); nonpositive input gives 0
    if v <= 0:
        return Fraction(0)
    return pow3(-(floor_log_recip(min(v, Fraction(1))) + 1))


def transfer_gauge_psi(g: GaugeCode) -> DirectCode:
    """Unit-interval gauge mirroring a middle-thirds-space gauge through psi.

    At a rational point of the set C the value is the power of three tied to
    the binary bucket of g at the psi-preimage; off C it is the exact
    distance to C, which keeps accepted cells away from the set entirely.
    Non-rational queries get a wide sound stub: cover searches only ever
    sample rationals.
    """
    if g.domain != "cantor":
        raise DomainError("psi transfer needs a sequence-space code")

    def ev(z: Point, stage: int) -> Interval:
        if not isinstance(z, UnitPoint):
            raise DomainError(f"unit-interval gauge evaluated at {z!r}")
        if not z.is_rational:
            return Interval(Fraction(0), Fraction(1, 2))
        zq = z.rational_value()
        if not 0 <= zq <= 1:
            raise DomainError(f"point {zq} outside [0,1]")
        d = dist_to_cantor(zq)
        if d > 0:
            return Interval.point(d)
        box = eval_enclosure(g, psi_preimage_point(zq), stage)
        return Interval(_third_bucket(box.lo), _third_bucket(box.hi))

    return DirectCode(ev, domain="unit", monotone=True, label=f"psi*({g.label})")


# -- verified preimage pieces -------------------------------------------

_GRID = 8  # membership verified on 2^-8 cells


def preimage_pieces(g: Baire1Code, ball: Ball, count: int) -> list[list[Interval]]:
    """Increasing closed pieces of {x : limit of g at x lies in `ball`}.

    Piece k collects grid cells where "within radius r(1 - 2^-(k+1))" is
    Yes-verified at stage 5+k through the declared modulus; each piece is
    returned as a union of maximal closed rational intervals. Without a
    modulus nothing is verifiable and every piece is empty.
    """
    if g.kind != "baire1":
        raise ValueError("preimage pieces are defined for one-level limit codes")
    if g.domain != "unit":
        raise DomainError("preimage pieces run on the unit interval")
    if not isinstance(ball.center, UnitPoint) or not ball.center.is_rational:
        raise ValueError("ball center must be an exact rational point")
    c = Interval.point(ball.center.rational_value())
    member = [False] * (1 << _GRID)
    out: list[list[Interval]] = []
    for k in range(count):
        stage = 5 + k
        s_k = ball.radius * (1 - pow2(-(k + 1)))
        j = None if g.modulus is None else _resolvable_j(g.modulus, stage)
        if j is not None and s_k - pow2(-j) > 0:
            bound = s_k - pow2(-j)
            term = g.term(max(1, g.modulus(j)))
            for i in range(len(member)):
                if member[i]:
                    continue
                cell = Interval(i * pow2(-_GRID), (i + 1) * pow2(-_GRID))
                got = iv_abs(iv_sub(term.region_eval(cell, stage), c))
                if got.hi <= bound:
                    member[i] = True
        out.append(_merge_cells(member))
    return out


def _merge_cells(member: list[bool]) -> list[Interval]:
    runs = []
    start = None
    for i, flag in enumerate(member + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append(Interval(start * pow2(-_GRID), i * pow2(-_GRID)))
            start = None
    return runs
