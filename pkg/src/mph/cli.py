"""Command-line pipeline: build bifiltrations, compute presentations and
invariants, slice, compare, verify, and serve.

Exit codes: 0 success, 2 parse/usage error, 3 violated math contract,
4 verification failure.
"""

from __future__ import annotations

import argparse
import sys

from . import bifilt, invariants as inv, metrics, oracle
from .bifilt import ParseError
from .present import (FormatError, betti_numbers, minimal_resolution,
                      minimize, presentation, read_mpres, write_mpres)

EXIT_PARSE = 2
EXIT_CONTRACT = 3
EXIT_VERIFY = 4

VERIFY_MAX_ENTITIES = 800
VERIFY_MAX_CELLS = 26 * 26


def _common(sub):
    sub.add_argument("--seed", type=int, default=0,
                     help="seed echoed into reports; all sampling is "
                          "deterministic given it")
    sub.add_argument("--threads", type=int, default=1,
                     help="cap on internal parallelism (output-independent)")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="mph",
        description="Two-parameter persistent homology toolkit")
    sp = ap.add_subparsers(dest="command", required=True)

    b = sp.add_parser("build", help="build a bifiltration chain complex")
    b.add_argument("--points", help="point CSV file")
    b.add_argument("--distances", help="lower-triangular distance file")
    b.add_argument("--function", choices=["last-column"],
                   help="read a vertex function from the last CSV column")
    b.add_argument("--filtration", required=True,
                   choices=["degree-rips", "function-rips-super",
                            "function-rips-sub"])
    b.add_argument("--max-dim", type=int, default=2)
    b.add_argument("--grid", default="64x64",
                   help="coarsening grid NXxNY (degree-rips)")
    b.add_argument("--field", type=int, default=2)
    b.add_argument("-o", "--output", required=True)
    _common(b)

    pr = sp.add_parser("present", help="minimal presentation from a bifcc file")
    pr.add_argument("input")
    pr.add_argument("--hom", type=int, required=True, choices=[0, 1])
    pr.add_argument("--no-minimize", action="store_true")
    pr.add_argument("-o", "--output", required=True)
    _common(pr)

    iv = sp.add_parser("invariants", help="invariants of a presentation")
    iv.add_argument("input")
    iv.add_argument("--hilbert", action="store_true")
    iv.add_argument("--betti", action="store_true")
    iv.add_argument("--rank", action="store_true")
    iv.add_argument("--signed-barcode", action="store_true")
    iv.add_argument("--bounded", action="store_true",
                    help="treat the grade grid as the whole index poset "
                         "(no +inf rectangles)")
    iv.add_argument("-o", "--output")
    _common(iv)

    sl = sp.add_parser("slice", help="barcode of the restriction to a line")
    sl.add_argument("input")
    sl.add_argument("--v", required=True, help="direction VX,VY (each >= 1)")
    sl.add_argument("--b", required=True, help="base point BX,BY")
    sl.add_argument("-o", "--output")
    _common(sl)

    dt = sp.add_parser("dist", help="distances between two presentations")
    dt.add_argument("input_a")
    dt.add_argument("input_b")
    dt.add_argument("--matching", action="store_true",
                    help="sampled matching distance (lower bound)")
    dt.add_argument("--signed", action="store_true",
                    help="generalized bottleneck between signed barcodes")
    dt.add_argument("--lines", type=int, default=8,
                    help="line grid resolution (angles x offsets)")
    dt.add_argument("--bounded", action="store_true")
    dt.add_argument("-o", "--output")
    _common(dt)

    vf = sp.add_parser("verify", help="check a presentation against the "
                                      "brute-force oracle")
    vf.add_argument("input")
    vf.add_argument("-o", "--output")
    _common(vf)

    sv = sp.add_parser("serve", help="HTTP query server for the explorer")
    sv.add_argument("input")
    sv.add_argument("--port", type=int, default=8050)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--allow-origin", default=None)
    sv.add_argument("--bounded", action="store_true")
    _common(sv)

    return ap


def _read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_out(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _config(args, **extra):
    cfg = {"command": args.command, "seed": args.seed,
           "threads": args.threads}
    cfg.update(extra)
    return cfg


def cmd_build(args):
    if bool(args.points) == bool(args.distances):
        raise ParseError("exactly one of --points/--distances is required")
    if args.points:
        cloud = bifilt.load_points(_read(args.points),
                                   function_column=args.function is not None)
        print(f"loaded {len(cloud)} points", file=sys.stderr)
        dm = bifilt.pairwise_distances(cloud)
        values = cloud.values
    else:
        dm = bifilt.load_distances(_read(args.distances))
        print(f"loaded {dm.n}-point distance matrix", file=sys.stderr)
        values = None
    try:
        nx, ny = (int(t) for t in args.grid.lower().split("x"))
    except ValueError:
        raise ParseError(f"bad --grid {args.grid!r}; expected NXxNY") from None

    if args.filtration == "degree-rips":
        bf = bifilt.degree_rips(dm, args.max_dim, grid=(nx, ny))
    else:
        if values is None:
            raise ParseError("function-Rips needs --points with "
                             "--function last-column")
        direction = ("superlevel" if args.filtration == "function-rips-super"
                     else "sublevel")
        bf = bifilt.function_rips(dm, values, direction, args.max_dim)
    bf.p = args.field
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(bifilt.write_bifcc(bf))
    return 0


def cmd_present(args):
    bf = bifilt.read_bifcc(_read(args.input))
    pres = presentation(bf.to_short_complex(args.hom),
                        do_minimize=not args.no_minimize)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(write_mpres(pres))
    return 0


def cmd_invariants(args):
    pres = read_mpres(_read(args.input))
    grid = inv.GradeGrid.from_presentation(pres, sentinel=not args.bounded)
    wanted = {k: getattr(args, k.replace("-", "_"))
              for k in ("hilbert", "betti", "rank", "signed_barcode")}
    if not any(wanted.values()):
        wanted = dict.fromkeys(wanted, True)
    out = {"config": _config(args, input=args.input, bounded=args.bounded,
                             field=pres.p, selected=sorted(
                                 k for k, v in wanted.items() if v))}
    if wanted["hilbert"]:
        out["hilbert"] = inv.hilbert_payload(pres, grid)
    if wanted["betti"]:
        out["betti"] = inv.betti_payload(
            betti_numbers(minimal_resolution(minimize(pres))))
    ri = None
    if wanted["rank"] or wanted["signed_barcode"]:
        ri = inv.rank_invariant(pres, grid)
    if wanted["rank"]:
        out["rank"] = inv.rank_payload(ri)
    if wanted["signed_barcode"]:
        out["signed_barcode"] = inv.signed_payload(inv.signed_barcode(ri))
    _write_out(args, inv.dumps(out))
    return 0


def _parse_pair(text, what):
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise ParseError(f"bad {what} {text!r}; expected two decimals") from None
    return a, b


def cmd_slice(args):
    # bare slice JSON, byte-identical to the service's /slice responses
    pres = read_mpres(_read(args.input))
    vx, vy = _parse_pair(args.v, "--v")
    bx, by = _parse_pair(args.b, "--b")
    _write_out(args, inv.slice_json(pres, vx, vy, bx, by))
    return 0


def cmd_dist(args):
    pa = read_mpres(_read(args.input_a))
    pb = read_mpres(_read(args.input_b))
    if not (args.matching or args.signed):
        raise ParseError("choose --matching and/or --signed")
    out = {"config": _config(args, input_a=args.input_a, input_b=args.input_b,
                             lines=args.lines, bounded=args.bounded)}
    if args.matching:
        value, line = metrics.matching_distance(pa, pb, n_angles=args.lines,
                                                n_offsets=args.lines)
        out["matching"] = {
            "value": value, "lower_bound": True,
            "line": {"vx": line.vx, "vy": line.vy,
                     "bx": line.bx, "by": line.by}}
    if args.signed:
        def barcode(pres):
            grid = inv.GradeGrid.from_presentation(pres,
                                                   sentinel=not args.bounded)
            return inv.signed_barcode(inv.rank_invariant(pres, grid))
        out["signed_bottleneck"] = metrics.bottleneck_signed(barcode(pa),
                                                             barcode(pb))
    _write_out(args, inv.dumps(out))
    return 0


def cmd_verify(args):
    pres = read_mpres(_read(args.input))
    n_entities = pres.matrix.nrows + pres.matrix.ncols
    grid = inv.GradeGrid.from_presentation(pres, sentinel=False)
    if n_entities > VERIFY_MAX_ENTITIES or grid.nx * grid.ny > VERIFY_MAX_CELLS:
        raise ParseError(
            f"verify is a brute-force check; {n_entities} entities on a "
            f"{grid.nx}x{grid.ny} grid is beyond its scale")

    def fail(check, detail):
        _write_out(args, inv.dumps(
            {"status": "fail", "check": check, "detail": detail}))
        return EXIT_VERIFY

    module = oracle.module_from_presentation(pres, grid)
    hil = inv.hilbert_function(pres, grid)
    for cell in grid.cells():
        g = grid.grade(*cell)
        if hil[g] != module.dim(*cell):
            return fail("hilbert", f"dim mismatch at {list(g)}")

    ri = inv.rank_invariant(pres, grid)
    for s in grid.cells():
        for t in grid.cells():
            if s[0] <= t[0] and s[1] <= t[1]:
                if ri.rank(s, t) != oracle.rank_between(module, s, t):
                    return fail("rank", f"rank mismatch at {s} -> {t}")

    sb = inv.signed_barcode(ri)
    sb_oracle = inv.signed_barcode(oracle.rank_invariant_table(module))
    if (sb.positive, sb.negative) != (sb_oracle.positive, sb_oracle.negative):
        return fail("signed-barcode", "inversion differs from oracle path")
    for s in grid.cells():
        for t in grid.cells():
            if s[0] <= t[0] and s[1] <= t[1]:
                sg, tg = grid.grade(*s), grid.grade(*t)
                if sb.counting_rank(sg, tg) != ri.rank(s, t):
                    return fail("reconstruction",
                                f"counting identity fails at {s} -> {t}")

    m1 = minimize(pres)
    m2 = minimize(m1)
    if not (m1.matrix == m2.matrix and m1.is_minimal()):
        return fail("minimize", "not idempotent")
    hil_min = inv.hilbert_function(m1, grid)
    if any(hil[grid.grade(*c)] != hil_min[grid.grade(*c)]
           for c in grid.cells()):
        return fail("minimize", "Hilbert function changed")

    _write_out(args, inv.dumps({
        "status": "ok",
        "checks": ["hilbert", "rank", "signed-barcode", "reconstruction",
                   "minimize"],
        "config": _config(args, input=args.input)}))
    return 0


def cmd_serve(args):
    from . import service
    pres = read_mpres(_read(args.input))
    print(f"serving {args.input} on {args.host}:{args.port}", file=sys.stderr)
    service.serve(pres, host=args.host, port=args.port,
                  bounded=args.bounded, allow_origin=args.allow_origin)
    return 0


_COMMANDS = {
    "build": cmd_build,
    "present": cmd_present,
    "invariants": cmd_invariants,
    "slice": cmd_slice,
    "dist": cmd_dist,
    "verify": cmd_verify,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, FormatError, OSError) as e:
        print(f"mph {args.command}: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, AssertionError) as e:
        print(f"mph {args.command}: contract violation: {e}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
