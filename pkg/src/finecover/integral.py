"""Gauge integration: Riemann sums over verified-fine tagged partitions.

The engine searches for a cover fine for HALF the requested gauge, converts
it to a partition (cells at most twice the cover radii, hence within the
full gauge), and pads the exact Riemann sum by epsilon on both sides. The
certificate records the partition so every figure is re-checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Optional, Union

from .covers import (
    FineCover,
    Obstruction,
    TaggedPartition,
    cover_to_partition,
    find_cover_unit,
    verify_partition,
)
from .exact import (
    Interval,
    QuadVal,
    ceil_log_recip,
    iv_add,
    iv_mul,
    iv_pad,
    iv_scale,
    pow2,
)
from .gauges import DirectCode, GaugeCode, Verdict, continuous_const, scale_code
from .spaces import UnitPoint


class EvaluationError(ValueError):
    """Integrand evaluator failed; the message names the tag."""


@dataclass(frozen=True)
class Integrand:
    """Pointwise-enclosable function on [0,1].

    evaluator(point, prec) returns an enclosure of width <= 2^-prec;
    special_values (keyed by exact rational) override it outright, for
    functions defined by fiat at isolated points.
    """

    evaluator: Callable[[UnitPoint, int], Interval]
    special_values: dict = None
    label: str = ""

    def at(self, tag: UnitPoint, prec: int) -> Interval:
        if self.special_values and tag.is_exact:
            v = tag.exact_value()
            if isinstance(v, QuadVal) and v.is_rational:
                v = v.as_fraction()
            if isinstance(v, Fraction) and v in self.special_values:
                return Interval.point(self.special_values[v])
        try:
            return self.evaluator(tag, prec)
        except EvaluationError:
            raise
        except Exception as e:
            raise EvaluationError(f"integrand {self.label or '?'} failed at tag {tag}: {e}") from e


@dataclass(frozen=True)
class GaugeFamily:
    """epsilon-indexed gauges: at(eps) is the gauge for accuracy eps."""

    at: Callable[[Fraction], GaugeCode]
    label: str = ""


@dataclass(frozen=True)
class IntegralCertificate:
    epsilon: Fraction
    partition: TaggedPartition
    sum: Interval
    claim: Interval

    def as_record(self, name: str, depth: int, stage: int) -> dict:
        return {
            "function": name,
            "epsilon": str(self.epsilon),
            "cells": len(self.partition.tags),
            "sum_lo": str(self.sum.lo),
            "sum_hi": str(self.sum.hi),
            "claim_lo": str(self.claim.lo),
            "claim_hi": str(self.claim.hi),
            "depth": depth,
            "stage": stage,
        }


def riemann_sum(f: Integrand, part: TaggedPartition, prec: int = 24) -> Interval:
    """Exact enclosure of sum f(tag_i) * (x_{i+1} - x_i), left to right."""
    total = Interval.point(Fraction(0))
    for lo, hi, tag in part.cells:
        w = hi - lo
        if w == 0:
            continue
        box = f.at(tag, prec)
        total = iv_add(total, iv_scale(w, box))
    return total


def integrate(
    f: Integrand,
    fam: GaugeFamily,
    eps,
    depth: int,
    stage: int,
    hints=(),
) -> Union[IntegralCertificate, Obstruction]:
    """Search with the halved gauge, then sum over the resulting partition.

    The cover radii are strictly below half the gauge at their points, so
    the partition cells (at most twice a radius) stay within the full
    gauge. Claim = sum padded by eps on each side.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"need epsilon > 0, got {eps}")
    g = fam.at(eps)
    got = find_cover_unit(scale_code(g, Fraction(1, 2)), depth, stage, hints=hints)
    if isinstance(got, Obstruction):
        return got
    part = cover_to_partition(got)
    check = verify_partition(g, part, stage)
    if check is not Verdict.YES:
        raise AssertionError(f"converted partition failed fineness: {check}")
    prec = ceil_log_recip(eps, 2) + 1
    s = riemann_sum(f, part, prec)
    return IntegralCertificate(eps, part, s, iv_pad(s, eps))


# -- built-in integrands and families ------------------------------------


def _exact_rational(tag: UnitPoint) -> Optional[Fraction]:
    if not tag.is_exact:
        return None
    v = tag.exact_value()
    if isinstance(v, QuadVal):
        return v.as_fraction() if v.is_rational else None
    return v


def poly_integrand(coeffs, label: str = "") -> tuple[Integrand, GaugeFamily, Fraction]:
    """Rational-coefficient polynomial with a constant gauge family.

    The family width eps/(2L) (L a slope bound on [0,1]) makes every fine
    partition's sum land within eps of the closed-form integral.
    """
    coeffs = [Fraction(c) for c in coeffs]
    slope = sum(abs(c) * i for i, c in enumerate(coeffs))

    def ev(tag: UnitPoint, prec: int) -> Interval:
        q = _exact_rational(tag)
        if q is not None:
            acc = Fraction(0)
            for c in reversed(coeffs):
                acc = acc * q + c
            return Interval.point(acc)
        box = tag.approx(prec + 2)
        acc = Interval.point(Fraction(0))
        for c in reversed(coeffs):
            acc = iv_add(iv_mul(acc, box), Interval.point(c))
        return acc

    def fam(eps: Fraction) -> GaugeCode:
        return continuous_const(eps / (2 * slope) if slope else Fraction(1))

    ref = sum(c / (i + 1) for i, c in enumerate(coeffs))
    return Integrand(ev, label=label or "poly"), GaugeFamily(fam, label="const"), ref


def _sqrt_recip_eval(tag: UnitPoint, prec: int) -> Interval:
    q = _exact_rational(tag)
    if q is None or q <= 0:
        raise EvaluationError(f"reciprocal square root needs an exact rational in (0,1], got {tag}")
    # 1/sqrt(a/b) = sqrt(b/a), enclosed by a shifted integer square root
    m = prec
    t = (q.denominator << (2 * m)) // q.numerator
    s = isqrt(t)
    return Interval(Fraction(s, 1 << m), Fraction(s + 1, 1 << m))


def stern_brocot_index(q: Fraction, cap: int) -> Optional[int]:
    """Position of q in the fixed enumeration of rationals in [0,1]:
    0, 1, then breadth-first mediants; None if the index exceeds cap."""
    if q < 0 or q > 1:
        raise ValueError(f"enumeration covers [0,1] only, got {q}")
    if q == 0:
        return 1 if cap >= 1 else None
    if q == 1:
        return 2 if cap >= 2 else None
    ln, ld, rn, rd = 0, 1, 1, 1
    level, path = 0, 0
    while (1 << level) + 2 <= cap:
        mn, md = ln + rn, ld + rd
        if q * md == mn:
            n = (1 << level) + 2 + path
            return n if n <= cap else None
        if q * md < mn:
            rn, rd = mn, md
            path = path * 2
        else:
            ln, ld = mn, md
            path = path * 2 + 1
        level += 1
    return None


def dirichlet_gauge_family() -> GaugeFamily:
    """The classic vanishing-at-rationals gauge: eps * 2^-n at the n-th
    rational of the fixed enumeration, 1 at irrational points.

    At a rational whose index is out of reach for the stage the evaluator
    answers [0, eps*2^-cap]: sound, and never enough to accept a cell.
    """

    def fam(eps: Fraction) -> GaugeCode:
        def at(p: UnitPoint, stage: int) -> Interval:
            q = _exact_rational(p)
            if q is not None:
                cap = stage + 64
                n = stern_brocot_index(q, cap)
                if n is None:
                    return Interval(Fraction(0), eps * pow2(-cap))
                return Interval.point(eps * pow2(-n))
            if p.is_exact:
                return Interval.point(Fraction(1))  # exact quadratic irrational
            return Interval(Fraction(0), Fraction(1))

        return DirectCode(at, domain="unit", label=f"dirichlet-{eps}")

    return GaugeFamily(fam, label="dirichlet")


def _dirichlet_eval(tag: UnitPoint, prec: int) -> Interval:
    q = _exact_rational(tag)
    if q is not None:
        return Interval.point(Fraction(1))
    if tag.is_exact:
        return Interval.point(Fraction(0))
    return Interval(Fraction(0), Fraction(1))


def dirichlet_hints(level: int = 2) -> list[UnitPoint]:
    """One irrational tag per level-`level` dyadic cell: the cell's left
    endpoint plus sqrt(2)/4 of its width. All-rational tag sets cannot be
    fine for this family below eps = 1/4, so searches need these."""
    n = 1 << level
    out = []
    for i in range(n):
        off = QuadVal(Fraction(i, n), Fraction(1, 4 * n))  # i/n + sqrt(2)/(4n)
        out.append(UnitPoint.from_quad(off))
    return out


def _sqrt_recip_family() -> GaugeFamily:
    def fam(eps: Fraction) -> GaugeCode:
        def at(p: UnitPoint, stage: int) -> Interval:
            q = _exact_rational(p)
            if q is None:
                raise EvaluationError(f"gauge needs exact rational points, got {p}")
            if q == 0:
                return Interval.point((eps / 4) ** 2)
            return Interval.point(eps * q / 2)

        return DirectCode(at, domain="unit", label=f"sqrt-recip-{eps}")

    return GaugeFamily(fam, label="sqrt-recip")


def _step_eval(c: Fraction):
    def ev(tag: UnitPoint, prec: int) -> Interval:
        q = _exact_rational(tag)
        if q is not None:
            return Interval.point(Fraction(1 if q >= c else 0))
        if tag.is_exact:
            v = tag.exact_value()
            return Interval.point(Fraction(1 if v >= c else 0))
        box = tag.approx(prec)
        if box.lo >= c:
            return Interval.point(Fraction(1))
        if box.hi < c:
            return Interval.point(Fraction(0))
        return Interval(Fraction(0), Fraction(1))

    return ev


def builtin_integrands() -> dict:
    """name -> (Integrand, GaugeFamily, reference value or None)."""
    ident, ident_fam, _ = poly_integrand([0, 1], label="identity")
    square, square_fam, _ = poly_integrand([0, 0, 1], label="square")
    step_c = Fraction(3, 8)
    return {
        "identity": (ident, ident_fam, Fraction(1, 2)),
        "square": (square, square_fam, Fraction(1, 3)),
        "sqrt-reciprocal": (
            Integrand(_sqrt_recip_eval, special_values={Fraction(0): Fraction(0)}, label="sqrt-reciprocal"),
            _sqrt_recip_family(),
            Fraction(2),
        ),
        "dirichlet": (
            Integrand(_dirichlet_eval, label="dirichlet"),
            dirichlet_gauge_family(),
            Fraction(0),
        ),
        "step": (
            Integrand(_step_eval(step_c), label="step"),
            GaugeFamily(lambda eps: continuous_const(eps / 2), label="const"),
            Fraction(1) - step_c,
        ),
    }


def default_depth(name: str, eps) -> int:
    """Subdivision depth at which the built-in searches complete."""
    k = ceil_log_recip(Fraction(eps), 2)
    if name == "sqrt-reciprocal":
        return 3 * k + 10
    if name == "dirichlet":
        return 4
    return k + 6


def default_hints(name: str) -> list:
    return dirichlet_hints() if name == "dirichlet" else []
