"""Text forms for the artifact types.

Numerics are canonical fractions end to end so that parsing back what was
written reproduces the same exact values. Points of the sequence space
write as prefix/period bit patterns; unit points as "rat:", "quad:" (for
a + b*sqrt(2)) or, for opaque points, an "approx:" enclosure at a stated
precision. Covers and partitions are CSV with a header; obstruction
traces are JSON.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .covers import FineCover, MalformedPartition, Obstruction, TaggedPartition
from .exact import Interval, QuadVal, parse_rat, rat_str
from .spaces import CantorPoint, Cylinder, UnitPoint


def cantor_str(p: CantorPoint) -> str:
    if p.pattern is None:
        raise ValueError(f"{p!r} is not eventually periodic; cannot serialize")
    prefix, period = p.pattern
    return f"prefix={prefix};period={period}"


def parse_cantor(s: str) -> CantorPoint:
    body = s.strip()
    if not body.startswith("prefix=") or ";period=" not in body:
        raise ValueError(f"expected prefix=...;period=..., got {s!r}")
    prefix, period = body[len("prefix="):].split(";period=", 1)
    for part, what in ((prefix, "prefix"), (period, "period")):
        if any(c not in "01" for c in part):
            raise ValueError(f"{what} must be over 0/1, got {part!r}")
    if not period:
        raise ValueError("period must be nonempty")
    return CantorPoint.from_pattern(prefix, period)


def unit_str(p: UnitPoint, prec: int = 24) -> str:
    if p.is_rational:
        return f"rat:{rat_str(p.rational_value())}"
    if isinstance(p.exact, QuadVal):
        return f"quad:{rat_str(p.exact.a)},{rat_str(p.exact.b)}"
    box = p.approx(prec)
    return f"approx:[{rat_str(box.lo)},{rat_str(box.hi)}]@{prec}"


def parse_unit(s: str) -> UnitPoint:
    body = s.strip()
    if body.startswith("rat:"):
        return UnitPoint.from_rat(parse_rat(body[4:]))
    if body.startswith("quad:"):
        a, _, b = body[5:].partition(",")
        if not b:
            raise ValueError(f"quad point needs two components, got {s!r}")
        return UnitPoint.from_quad(QuadVal(parse_rat(a), parse_rat(b)))
    if body.startswith("approx:"):
        rest = body[7:]
        if "]@" not in rest or not rest.startswith("["):
            raise ValueError(f"malformed approx point {s!r}")
        inner, prec_s = rest[1:].rsplit("]@", 1)
        lo, _, hi = inner.partition(",")
        box = Interval(parse_rat(lo), parse_rat(hi))
        prec = int(prec_s)

        def fn(k: int, _box=box, _prec=prec) -> Interval:
            if k > _prec:
                raise ValueError(f"point recorded at precision {_prec}, asked for {k}")
            return _box

        return UnitPoint.from_fn(fn, label=f"approx@{prec}")
    raise ValueError(f"unknown unit point form {s!r}")


def _point_str(p, prec: int = 24) -> str:
    if isinstance(p, CantorPoint):
        return cantor_str(p)
    return unit_str(p, prec)


def cover_csv(cover: FineCover) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["point", "radius"])
    for p, r in cover.entries():
        w.writerow([_point_str(p), rat_str(r)])
    return out.getvalue()


def parse_cover_csv(text: str) -> FineCover:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["point", "radius"]:
        raise ValueError("cover CSV must start with the point,radius header")
    entries = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"row {i}: need point,radius, got {row!r}")
        ps, rs = row
        try:
            p = parse_cantor(ps) if ps.startswith("prefix=") else parse_unit(ps)
            entries.append((p, parse_rat(rs)))
        except ValueError as e:
            raise ValueError(f"row {i}: {e}")
    return FineCover(entries)


def partition_csv(part: TaggedPartition) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["lo", "hi", "tag"])
    for lo, hi, tag in part.cells:
        w.writerow([rat_str(lo), rat_str(hi), unit_str(tag)])
    return out.getvalue()


def parse_partition_csv(text: str) -> TaggedPartition:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["lo", "hi", "tag"]:
        raise ValueError("partition CSV must start with the lo,hi,tag header")
    cuts: list[Fraction] = []
    tags: list[UnitPoint] = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise MalformedPartition(f"row {i}: need lo,hi,tag, got {row!r}")
        try:
            lo, hi = parse_rat(row[0]), parse_rat(row[1])
            tag = parse_unit(row[2])
        except ValueError as e:
            raise MalformedPartition(f"row {i}: {e}")
        if not cuts:
            cuts.append(lo)
        elif cuts[-1] != lo:
            raise MalformedPartition(f"row {i}: cell starts at {row[0]}, previous ended at {rat_str(cuts[-1])}")
        cuts.append(hi)
        tags.append(tag)
    if not tags:
        raise MalformedPartition("no cells")
    return TaggedPartition(tuple(cuts), tuple(tags))


def region_str(region) -> str:
    if isinstance(region, Cylinder):
        return f"[{region.prefix}]"
    return f"[{rat_str(region.lo)},{rat_str(region.hi)}]"


def obstruction_json(obs: Obstruction) -> str:
    doc = {
        "space": obs.space,
        "depth_reached": obs.depth_reached,
        "unresolved": [region_str(r) for r in obs.unresolved],
        "trace": [
            {
                "region": region_str(t["region"]),
                "last_verdict": t["last_verdict"].name,
                "stage": t["stage"],
            }
            for t in obs.trace
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def integral_json(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"
