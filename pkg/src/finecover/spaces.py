"""The two ambient spaces: the unit interval and Cantor space 2^omega.

Points carry exact values where possible (rationals, quadratics a+b*sqrt2,
eventually periodic bit sequences); everything else is an approximant rule
whose successive enclosures are forced to nest. The maps between the spaces
live here too: phi (binary expansion onto [0,1]), psi (onto the middle-thirds
set C), and the exact distance-to-C walk.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .exact import (
    CauchyViolation,
    ExactPoint,
    Interval,
    QuadVal,
    ceil_log_recip,
    iv_refine,
    pow2,
    pow3,
)

THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)


class NotInCantorSet(ValueError):
    """A point asserted to lie on the middle-thirds set verifiably does not."""


def _norm_pattern(prefix: str, period: str) -> tuple[str, str]:
    """Canonical (prefix, period) for an eventually periodic bit sequence.

    Shrinks the period to its primitive root, then rotates trailing prefix
    bits into the period, so equal sequences get equal patterns.
    """
    for d in range(1, len(period) + 1):
        if len(period) % d == 0 and period == period[:d] * (len(period) // d):
            period = period[:d]
            break
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    return prefix, period


class CantorPoint:
    """A point of 2^omega: a total bit rule, optionally eventually periodic.

    Pattern points (finite prefix + repeating period) compare and hash by
    the canonical pattern, so searches can deduplicate them; rule-only
    points compare by identity. Queried bits are cached, which is also what
    enforces that the rule is deterministic.
    """

    __slots__ = ("_rule", "pattern", "label", "_bits")

    def __init__(
        self,
        rule: Callable[[int], int],
        pattern: Optional[tuple[str, str]] = None,
        label: Optional[str] = None,
    ):
        self._rule = rule
        self.pattern = pattern
        self.label = label
        self._bits: list[int] = []

    @classmethod
    def from_pattern(cls, prefix: str, period: str) -> "CantorPoint":
        if period == "" or any(c not in "01" for c in prefix + period):
            raise ValueError(f"bad bit pattern: prefix={prefix!r} period={period!r}")
        prefix, period = _norm_pattern(prefix, period)

        def rule(i: int, _p=prefix, _q=period) -> int:
            if i < len(_p):
                return int(_p[i])
            return int(_q[(i - len(_p)) % len(_q)])

        return cls(rule, pattern=(prefix, period))

    @classmethod
    def from_rule(cls, rule: Callable[[int], int], label: Optional[str] = None) -> "CantorPoint":
        return cls(rule, label=label)

    @property
    def period_hint(self) -> Optional[tuple[int, int]]:
        """(preperiod length, period length) when eventually periodic."""
        if self.pattern is None:
            return None
        return len(self.pattern[0]), len(self.pattern[1])

    def bit(self, i: int) -> int:
        while len(self._bits) <= i:
            b = self._rule(len(self._bits))
            if b not in (0, 1):
                raise ValueError(f"bit rule produced {b!r}")
            self._bits.append(b)
        return self._bits[i]

    def bits(self, n: int) -> str:
        return "".join(str(self.bit(i)) for i in range(n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CantorPoint):
            return NotImplemented
        if self.pattern is not None and other.pattern is not None:
            return self.pattern == other.pattern
        return self is other

    def __hash__(self) -> int:
        if self.pattern is not None:
            return hash(self.pattern)
        return id(self)

    def __repr__(self) -> str:
        if self.pattern is not None:
            return f"CantorPoint(prefix={self.pattern[0]!r}, period={self.pattern[1]!r})"
        return f"CantorPoint(rule, label={self.label!r})"


def first_diff(x: CantorPoint, y: CantorPoint, bound: int) -> Optional[int]:
    """Index of the first differing bit below `bound`, or None if none found."""
    for i in range(bound):
        if x.bit(i) != y.bit(i):
            return i
    return None


def cantor_dist(x: CantorPoint, y: CantorPoint, depth: int) -> Interval:
    """d(x,y) = 2^-(first difference index), resolved through `depth` bits."""
    if depth < 1:
        raise ValueError("need depth >= 1")
    i = first_diff(x, y, depth)
    if i is None:
        return Interval(Fraction(0), pow2(-depth))
    return Interval.point(pow2(-i))


@dataclass(frozen=True)
class Cylinder:
    """The set [sigma] of sequences extending a finite bit string."""

    prefix: str

    def __post_init__(self) -> None:
        if any(c not in "01" for c in self.prefix):
            raise ValueError(f"bad cylinder prefix: {self.prefix!r}")

    @property
    def depth(self) -> int:
        return len(self.prefix)

    @property
    def width(self) -> Fraction:
        return pow2(-self.depth)

    def contains_point(self, x: CantorPoint) -> bool:
        return x.bits(self.depth) == self.prefix

    def contains(self, other: "Cylinder") -> bool:
        return other.prefix.startswith(self.prefix)

    def child(self, bit: int) -> "Cylinder":
        return Cylinder(self.prefix + str(bit))

    def sample(self, bit: int) -> CantorPoint:
        """The constant-tail extension sigma + bit bit bit ..."""
        return CantorPoint.from_pattern(self.prefix, str(bit))

    def phi_interval(self) -> Interval:
        """Image under phi: the dyadic cell [0.sigma, 0.sigma + 2^-|sigma|]."""
        v = sum((Fraction(int(b)) * pow2(-i - 1) for i, b in enumerate(self.prefix)), Fraction(0))
        return Interval(v, v + self.width)

    def __str__(self) -> str:
        return f"[{self.prefix}]" if self.prefix else "[root]"


def cylinder_for_ball(x: CantorPoint, r: Fraction) -> Cylinder:
    """B(x,r) as a cylinder: depth m least with 2^-m <= r."""
    if r <= 0:
        raise ValueError("need r > 0")
    m = ceil_log_recip(min(r, Fraction(1)))
    return Cylinder(x.bits(m))


class UnitPoint:
    """A point of the unit interval, exact or given by a nested approximant.

    Exact points hold a Fraction or a QuadVal and support exact comparison;
    approximant points only promise enclosures of width <= 2^-k. Successive
    approximant queries are intersected, so the published enclosures nest
    even when the underlying rule's do not, and a contradictory rule raises
    CauchyViolation.
    """

    __slots__ = ("exact", "_fn", "label", "_best")

    AMBIENT = Interval(Fraction(-1), Fraction(2))

    def __init__(self, exact=None, fn=None, label: Optional[str] = None):
        self.exact: Union[Fraction, QuadVal, None] = exact
        self._fn = fn
        self.label = label
        self._best: Optional[Interval] = None

    @classmethod
    def from_rat(cls, q) -> "UnitPoint":
        q = Fraction(q)
        if not cls.AMBIENT.contains(q):
            raise ValueError(f"point {q} outside ambient [-1, 2]")
        return cls(exact=q)

    @classmethod
    def from_quad(cls, v: QuadVal) -> "UnitPoint":
        if v.is_rational:
            return cls.from_rat(v.as_fraction())
        if v < cls.AMBIENT.lo or v > cls.AMBIENT.hi:
            raise ValueError(f"point {v} outside ambient [-1, 2]")
        return cls(exact=v)

    @classmethod
    def from_fn(cls, fn: Callable[[int], Interval], label: Optional[str] = None) -> "UnitPoint":
        return cls(fn=fn, label=label)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def is_rational(self) -> bool:
        return isinstance(self.exact, Fraction)

    def rational_value(self) -> Fraction:
        if not isinstance(self.exact, Fraction):
            raise ValueError(f"{self} is not an exact rational")
        return self.exact

    def exact_value(self) -> ExactPoint:
        if self.exact is None:
            raise ValueError(f"{self} has no exact value")
        return self.exact

    def approx(self, k: int) -> Interval:
        """Enclosure of width <= 2^-k; successive calls nest."""
        if isinstance(self.exact, Fraction):
            return Interval.point(self.exact)
        if isinstance(self.exact, QuadVal):
            return self.exact.enclosure(k)
        box = self._fn(k)
        if box.width > pow2(-k):
            raise ValueError(f"approximant returned width {box.width} > 2^-{k}")
        if box.hi < self.AMBIENT.lo or box.lo > self.AMBIENT.hi:
            raise ValueError(f"approximant box {box} outside ambient [-1, 2]")
        self._best = iv_refine(self._best, box, what=str(self))
        return self._best

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitPoint):
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self.exact == other.exact
        return self is other

    def __hash__(self) -> int:
        if self.is_exact:
            return hash(self.exact)
        return id(self)

    def _cmp_value(self, other: "UnitPoint"):
        if not (self.is_exact and other.is_exact):
            raise TypeError("ordering needs exact points on both sides")
        return self.exact, other.exact

    def __lt__(self, other: "UnitPoint") -> bool:
        a, b = self._cmp_value(other)
        return a < b

    def __le__(self, other: "UnitPoint") -> bool:
        a, b = self._cmp_value(other)
        return a <= b

    def __gt__(self, other: "UnitPoint") -> bool:
        a, b = self._cmp_value(other)
        return a > b

    def __ge__(self, other: "UnitPoint") -> bool:
        a, b = self._cmp_value(other)
        return a >= b

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"UnitPoint({self.exact})"
        return f"UnitPoint(approx, label={self.label!r})"


@dataclass(frozen=True)
class Ball:
    center: Union[UnitPoint, CantorPoint]
    radius: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be > 0")


# -- phi: binary expansion 2^omega -> [0,1] ------------------------------


def _pattern_value(prefix: str, period: str, base: int, digit_of: Callable[[str], int]) -> Fraction:
    # sum of digit_of(c) * base^-(i+1) over the eventually periodic expansion
    head = Fraction(0)
    for i, c in enumerate(prefix):
        head += Fraction(digit_of(c)) * Fraction(base) ** -(i + 1)
    unit = Fraction(0)
    for i, c in enumerate(period):
        unit += Fraction(digit_of(c)) * Fraction(base) ** -(i + 1)
    tail = unit / (1 - Fraction(base) ** -len(period))
    return head + Fraction(base) ** -len(prefix) * tail


def phi_value(x: CantorPoint) -> Fraction:
    """Exact phi for pattern points."""
    if x.pattern is None:
        raise ValueError("phi_value needs an eventually periodic point")
    return _pattern_value(*x.pattern, base=2, digit_of=int)


def phi(x: CantorPoint) -> UnitPoint:
    """phi(x) = sum x(n) 2^-(n+1); 1-Lipschitz from (2^omega, d) onto [0,1]."""
    if x.pattern is not None:
        return UnitPoint.from_rat(phi_value(x))

    def fn(k: int) -> Interval:
        v = sum((Fraction(x.bit(n)) * pow2(-n - 1) for n in range(k + 1)), Fraction(0))
        return Interval(v, v + pow2(-k - 1))

    return UnitPoint.from_fn(fn, label=f"phi({x!r})")


def psi_value(x: CantorPoint) -> Fraction:
    if x.pattern is None:
        raise ValueError("psi_value needs an eventually periodic point")
    return _pattern_value(*x.pattern, base=3, digit_of=lambda c: 2 * int(c))


def psi(x: CantorPoint) -> UnitPoint:
    """psi(x) = sum 2 x(n) 3^-(n+1), a bijection onto the middle-thirds set.

    Separation: bits first differing at index j puts images >= 3^-(j+1) apart.
    """
    if x.pattern is not None:
        return UnitPoint.from_rat(psi_value(x))

    def fn(k: int) -> Interval:
        v = sum((Fraction(2 * x.bit(n)) * pow3(-n - 1) for n in range(k)), Fraction(0))
        return Interval(v, v + pow3(-k))

    return UnitPoint.from_fn(fn, label=f"psi({x!r})")


# -- the middle-thirds set ----------------------------------------------


def dist_to_cantor(z: Fraction) -> Fraction:
    """Exact d(z, C) for rational z in [0,1].

    Walks the self-similar structure: zooming a third scales distance by 3;
    a rational orbit either revisits a state (so z is in C) or lands in a
    removed middle third, where the distance is read off directly.
    """
    z = Fraction(z)
    if not 0 <= z <= 1:
        raise ValueError(f"need 0 <= z <= 1, got {z}")
    w = z
    scale = Fraction(1)
    seen = set()
    while True:
        if w in seen:
            return Fraction(0)
        seen.add(w)
        if w <= THIRD:
            w = 3 * w
        elif w >= TWO_THIRDS:
            w = 3 * w - 2
        else:
            return scale * min(w - THIRD, TWO_THIRDS - w)
        scale /= 3


def leftmost_cantor_ge(a: Fraction) -> Fraction:
    """The least point of C that is >= a. Requires a <= 1."""
    a = Fraction(a)
    if a > 1:
        raise ValueError(f"no C point >= {a}")
    if a <= 0:
        return Fraction(0)
    w = a
    lo = Fraction(0)
    scale = Fraction(1)
    seen = set()
    while True:
        if w in seen:
            return a  # orbit cycled without leaving the construction: a is in C
        seen.add(w)
        if w <= THIRD:
            w = 3 * w
        elif w >= TWO_THIRDS:
            lo += TWO_THIRDS * scale
            w = 3 * w - 2
        else:
            # a sits in a removed gap: next C point is the right third's start
            return lo + TWO_THIRDS * scale
        scale /= 3


def _thirds_step(w):
    """One step of the psi-inverse digit walk; returns (bit, next w)."""
    if w <= THIRD:
        return 0, 3 * w
    if w >= TWO_THIRDS:
        return 1, 3 * w - 2
    raise NotInCantorSet(f"point at distance >= {min(w - THIRD, TWO_THIRDS - w)} from C (local scale)")


def psi_preimage_prefix(z: Union[UnitPoint, Fraction, QuadVal], n: int) -> str:
    """First n bits of psi^-1(z) for z on (or asserted on) the set C."""
    if isinstance(z, UnitPoint):
        if not z.is_exact:
            raise ValueError("psi preimage needs an exact point")
        z = z.exact_value()
    w: ExactPoint = Fraction(z) if isinstance(z, int) else z
    if isinstance(w, QuadVal) and w.is_rational:
        w = w.as_fraction()
    if not (0 <= w and w <= 1):
        raise NotInCantorSet(f"{w} outside [0,1]")
    out = []
    for _ in range(n):
        bit, w = _thirds_step(w)
        out.append(str(bit))
    return "".join(out)


def psi_preimage_point(z: Fraction) -> CantorPoint:
    """psi^-1(z) as a pattern point, for rational z in C.

    The digit walk on a rational cycles, so the bit sequence is eventually
    periodic and can be captured exactly.
    """
    z = Fraction(z)
    if not 0 <= z <= 1:
        raise NotInCantorSet(f"{z} outside [0,1]")
    w = z
    seen: dict[Fraction, int] = {}
    bits = []
    while w not in seen:
        seen[w] = len(bits)
        bit, w = _thirds_step(w)
        bits.append(str(bit))
    start = seen[w]
    return CantorPoint.from_pattern("".join(bits[:start]), "".join(bits[start:]))
