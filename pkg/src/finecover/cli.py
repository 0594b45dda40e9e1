"""Command line front end.

Four commands: integrate (certified enclosures of the built-in integrals),
cousin (fine-cover search for a gauge given in the spec grammar), verify
(re-check an emitted cover or partition against a gauge), and gallery (the
named demos). Exit codes are a contract: 0 success, 1 bad input, 2
unknown-or-obstruction, 3 a verified failure, 4 a falsified construction.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .covers import (
    FineCover,
    NotACover,
    Obstruction,
    cover_to_partition,
    find_cover_cantor,
    find_cover_unit,
    uncovered_witness,
)
from .exact import CauchyViolation, rat_str
from .gallery import (
    GalleryFalsification,
    OracleSpec,
    UnexpectedCover,
    default_cauchy_spec,
    cauchy_gap_gauge,
    finite_subcover,
    gap_obstruction_demo,
    heine_borel_gauge,
    oracle_pin_demo,
    oracle_pin_gauge,
)
from .gauges import Verdict, verified_at_least
from .gaugespec import SpecError, parse_cover_file, parse_expr_const, parse_gauge, parse_gauge_file
from .integral import builtin_integrands, default_depth, default_hints, integrate
from .serialize import (
    cantor_str,
    cover_csv,
    integral_json,
    obstruction_json,
    parse_cantor,
    parse_cover_csv,
    parse_partition_csv,
    parse_unit,
    partition_csv,
    region_str,
    unit_str,
)
from .spaces import CantorPoint, UnitPoint

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_UNKNOWN = 2
EXIT_FAILED = 3
EXIT_FALSIFIED = 4

_STAGE_ENV = "COUSIN_GAUGE_STAGE_DEFAULT"


def _default_stage() -> int:
    raw = os.environ.get(_STAGE_ENV, "")
    if raw.strip():
        try:
            v = int(raw)
            if v >= 1:
                return v
        except ValueError:
            pass
        print(f"ignoring bad {_STAGE_ENV}={raw!r}", file=sys.stderr)
    return 48


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pin_point(raw: str) -> CantorPoint:
    if "prefix=" in raw:
        return parse_cantor(raw)
    if raw and all(c in "01" for c in raw):
        return CantorPoint.from_pattern("", raw)
    raise ValueError(f"bad bit pattern {raw!r}")


def _build_gauge(args):
    """Gauge plus the pinned point when the preset has one."""
    preset = getattr(args, "preset", None)
    if preset:
        if preset == "cauchy-gap":
            return cauchy_gap_gauge(default_cauchy_spec()), None
        if preset.startswith("oracle-pin:"):
            z = _pin_point(preset.split(":", 1)[1])
            return oracle_pin_gauge(OracleSpec(z)), z
        raise ValueError(f"unknown preset {preset!r}")
    if getattr(args, "gauge_file", None):
        return parse_gauge_file(args.gauge_file), None
    text = getattr(args, "gauge", None)
    if not text:
        raise ValueError("need --gauge, --gauge-file, or --preset")
    if text.startswith("const:"):
        text = text[len("const:"):]
    return parse_gauge(text), None


def _parse_hints(args, g, pinned):
    hints = []
    vals = list(getattr(args, "hint", None) or [])
    path = getattr(args, "hints_file", None)
    if path:
        with open(path) as fh:
            vals.extend(line.strip() for line in fh if line.strip())
    for v in vals:
        if v == "Z":
            if pinned is None:
                raise ValueError("--hint Z only makes sense with an oracle-pin preset")
            hints.append(pinned)
        elif g.domain == "cantor":
            hints.append(parse_cantor(v))
        else:
            hints.append(parse_unit(v))
    return hints


def cmd_integrate(args) -> int:
    table = builtin_integrands()
    if args.preset not in table:
        raise ValueError(f"unknown function preset {args.preset!r}; have {', '.join(sorted(table))}")
    f, fam, _ref = table[args.preset]
    eps = parse_expr_const(args.epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {args.epsilon}")
    stage = args.stage or _default_stage()
    depth = args.depth or default_depth(args.preset, eps)
    got = integrate(f, fam, eps, depth, stage, hints=default_hints(args.preset))
    if isinstance(got, Obstruction):
        _emit(obstruction_json(got), args.out)
        return EXIT_UNKNOWN
    _emit(integral_json(got.as_record(args.preset, depth, stage)), args.out)
    return EXIT_OK


def cmd_cousin(args) -> int:
    g, pinned = _build_gauge(args)
    if args.space and args.space != g.domain:
        raise ValueError(f"gauge lives on {g.domain}, not {args.space}")
    stage = args.stage or _default_stage()
    hints = _parse_hints(args, g, pinned)
    if g.domain == "cantor":
        got = find_cover_cantor(g, args.depth, stage, hints=hints)
    else:
        got = find_cover_unit(g, args.depth, stage, hints=hints)
    if isinstance(got, Obstruction):
        _emit(obstruction_json(got), args.out)
        return EXIT_UNKNOWN
    if args.as_partition:
        if g.domain != "unit":
            raise ValueError("--as-partition applies to unit-interval covers only")
        _emit(partition_csv(cover_to_partition(got)), args.out)
    else:
        _emit(cover_csv(got), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    g, _ = _build_gauge(args)
    stage = args.stage or _default_stage()
    with open(args.artifact) as fh:
        text = fh.read()
    header = text.splitlines()[0].strip() if text.strip() else ""
    if header == "point,radius":
        cover = parse_cover_csv(text)
        if cover.space != g.domain:
            raise ValueError(f"cover is on {cover.space}, gauge on {g.domain}")
        witness = uncovered_witness(cover)
        if witness is not None:
            w = cantor_str(witness) if cover.space == "cantor" else unit_str(witness)
            print(f"not a cover: {w} is uncovered")
            return EXIT_FAILED
        worst = Verdict.YES
        for i, (p, r) in enumerate(cover.entries()):
            v = verified_at_least(g, p, r, stage)
            if v is Verdict.NO:
                w = cantor_str(p) if cover.space == "cantor" else unit_str(p)
                print(f"entry {i}: gauge at {w} is below the radius {rat_str(r)}")
                return EXIT_FAILED
            if v is Verdict.UNKNOWN:
                worst = Verdict.UNKNOWN
        print("cover verified" if worst is Verdict.YES else "cover unresolved at this stage")
        return EXIT_OK if worst is Verdict.YES else EXIT_UNKNOWN
    if header == "lo,hi,tag":
        if g.domain != "unit":
            raise ValueError("partitions live on the unit interval")
        part = parse_partition_csv(text)
        worst = Verdict.YES
        for i, (lo, hi, tag) in enumerate(part.cells):
            v = verified_at_least(g, tag, hi - lo, stage)
            if v is Verdict.NO:
                print(f"cell {i} [{rat_str(lo)},{rat_str(hi)}]: gauge at {unit_str(tag)} is below the width")
                return EXIT_FAILED
            if v is Verdict.UNKNOWN:
                worst = Verdict.UNKNOWN
        print("partition verified" if worst is Verdict.YES else "partition unresolved at this stage")
        return EXIT_OK if worst is Verdict.YES else EXIT_UNKNOWN
    raise ValueError(f"unrecognized artifact header {header!r}")


def cmd_gallery(args) -> int:
    stage = args.stage or _default_stage()
    if args.demo == "heine-borel":
        if not args.cover:
            raise ValueError("heine-borel needs --cover FILE")
        with open(args.cover) as fh:
            cov = parse_cover_file(fh.read())
        g = heine_borel_gauge(cov)
        depth = args.depth or 10
        got = find_cover_unit(g, depth, stage)
        if isinstance(got, Obstruction):
            _emit(obstruction_json(got), args.out)
            return EXIT_UNKNOWN
        k = finite_subcover(cov, got)
        _emit(
            integral_json(
                {
                    "demo": "heine-borel",
                    "cover_size": len(got),
                    "subcover_index": k,
                    "union_verified": True,
                    "depth": depth,
                    "stage": stage,
                }
            ),
            args.out,
        )
        return EXIT_OK
    if args.demo == "cauchy-gap":
        depth = args.depth or 16
        obs = gap_obstruction_demo(default_cauchy_spec(), depth, stage)
        run = obs.unresolved[0]
        _emit(
            integral_json(
                {
                    "demo": "cauchy-gap",
                    "unresolved": region_str(run),
                    "width": rat_str(run.width),
                    "depth": depth,
                    "stage": stage,
                }
            ),
            args.out,
        )
        return EXIT_OK
    if args.demo == "oracle-pin":
        z = _pin_point(args.bits or "01")
        depth = args.depth or 10
        cover = oracle_pin_demo(OracleSpec(z), depth, stage)
        _emit(
            integral_json(
                {
                    "demo": "oracle-pin",
                    "pinned": cantor_str(z),
                    "blind_search": f"obstruction [{z.bits(depth)}]",
                    "hinted_cover_size": len(cover),
                    "depth": depth,
                    "stage": stage,
                }
            ),
            args.out,
        )
        return EXIT_OK
    raise ValueError(f"unknown demo {args.demo!r}")


def _make_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="finecover", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, depth_default=None):
        p.add_argument("--stage", type=int, default=None, help=f"verification stage (default ${_STAGE_ENV} or 48)")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--depth", type=int, default=depth_default, help="dyadic search depth")

    p = sub.add_parser("integrate", help="certified enclosure of a built-in integral")
    p.add_argument("--preset", required=True, help="identity, square, sqrt-reciprocal, dirichlet, step")
    p.add_argument("--epsilon", required=True, help="accuracy, a positive rational like 1/16")
    common(p)
    p.set_defaults(fn=cmd_integrate)

    p = sub.add_parser("cousin", help="search a fine cover for a gauge")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gauge", help="gauge expression, e.g. 'min(x+1/8, 1-x)' or const:1/4")
    src.add_argument("--gauge-file", help="file containing a gauge expression")
    src.add_argument("--preset", help="cauchy-gap or oracle-pin:BITS")
    p.add_argument("--space", choices=("unit", "cantor"), default=None)
    p.add_argument("--as-partition", action="store_true", help="emit the induced tagged partition")
    p.add_argument("--hint", action="append", help="extra sample point (Z means the pinned point)")
    p.add_argument("--hints-file", help="file with one point per line")
    common(p, depth_default=8)
    p.set_defaults(fn=cmd_cousin)

    p = sub.add_parser("verify", help="re-check an emitted cover or partition")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gauge")
    src.add_argument("--gauge-file")
    src.add_argument("--preset")
    p.add_argument("--in", dest="artifact", required=True, help="cover or partition CSV")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gallery", help="run a named demo")
    p.add_argument("demo", choices=("heine-borel", "cauchy-gap", "oracle-pin"))
    p.add_argument("--cover", help="cover file for heine-borel")
    p.add_argument("--bits", help="bit pattern for oracle-pin (default 01)")
    common(p)
    p.set_defaults(fn=cmd_gallery)
    return top


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_BAD_INPUT
    try:
        return args.fn(args)
    except (UnexpectedCover, GalleryFalsification, CauchyViolation) as e:
        print(f"falsified: {e}", file=sys.stderr)
        return EXIT_FALSIFIED
    except NotACover as e:
        print(f"not a cover: {e}", file=sys.stderr)
        return EXIT_FALSIFIED
    except (SpecError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
