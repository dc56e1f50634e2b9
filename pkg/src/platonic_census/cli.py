"""Command line driver.

Commands:
  solids      inventory of the fifteen Platonic solids with feasibility
  enumerate   run the census for one solid (search/certify/homology/profiles)
  verify      compare runs against the bundled expected tables
  table       render a cached or fresh census in the published column layout

Exit codes: 0 success (an empty census is a success), 1 verification
failure, 2 resource budget or certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import census
from .coxeter import (CoxeterSymbol, Node, all_solids, edge_divisibility_filter,
                      enumerate_solids, parse_symbol, solid_for_address)
from .errors import BudgetExceeded, CertificationFailure
from .homology import format_h1


def _solid_from_args(args) -> "SolidDescriptor":
    return solid_for_address(f"{args.symbol}:{args.node}")


def _options(args) -> census.CensusOptions:
    return census.CensusOptions(
        threads=getattr(args, "threads", 1),
        backend=getattr(args, "backend", "auto"),
        profile_depth=getattr(args, "profile_depth", 6),
        max_nodes=getattr(args, "max_nodes", None),
        with_profiles=not getattr(args, "no_profiles", False),
    )


def cmd_solids(args) -> int:
    print(f"{'address':12s} {'solid':13s} {'angle':7s} {'geometry':22s} "
          f"{'index':>5s} {'feasible':8s}")
    for s in all_solids():
        feasible = edge_divisibility_filter(s)
        print(f"{s.address():12s} {s.name:13s} 2pi/{s.dihedral_denominator:<3d} "
              f"{s.geometry.value:22s} {s.target_index:5d} "
              f"{'yes' if feasible else 'no (edge count)'}")
    return 0


def _render_text(records) -> str:
    noncompact = records and not records[0].solid.compact
    out = []
    head = ["N", "FI", "EI"] + (["C"] if noncompact else []) + ["H1"]
    rows = [head]
    for k, r in enumerate(records):
        row = [str(k + 1), r.FI, r.EI]
        if noncompact:
            row.append(str(r.cusp_count))
        row.append(format_h1(r.homology))
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
    for row in rows:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    for r in records:
        for note in r.annotations + r.external_flags:
            out.append(f"# {r.id}: {note}")
    return "\n".join(out)


def _render_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["id", "fi", "ei", "cusps", "h1", "annotations", "external_flags"])
    for r in records:
        w.writerow([r.id, r.FI, r.EI, r.cusp_count, format_h1(r.homology),
                    "; ".join(r.annotations), "; ".join(r.external_flags)])
    return buf.getvalue().rstrip("\n")


def _render_json(records) -> str:
    return json.dumps([census.record_to_dict(r) for r in records], indent=1)


def _render(records, fmt: str) -> str:
    return {"text": _render_text, "csv": _render_csv, "json": _render_json}[fmt](records)


def _run_solid(solid, opts, resume: bool):
    if resume:
        cached = census.load_cache(solid, opts)
        if cached is not None:
            return cached, True
    records = census.run_solid(solid, opts)
    census.save_cache(solid, opts, records)
    return records, False


def cmd_enumerate(args) -> int:
    solid = _solid_from_args(args)
    if not edge_divisibility_filter(solid):
        print(f"error: {solid.address()} admits no manifolds "
              f"(p does not divide the edge count)", file=sys.stderr)
        return 2
    opts = _options(args)
    try:
        records, from_cache = _run_solid(solid, opts, args.resume_from_cache)
    except (BudgetExceeded, CertificationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(_render(records, args.format))
    if not records:
        print(f"# no orientable manifolds from {solid.address()}")
    if from_cache:
        print(f"# loaded from cache: {census.cache_path(solid, opts)}", file=sys.stderr)
    else:
        print(f"# cached at {census.cache_path(solid, opts)}", file=sys.stderr)
    return 0


def cmd_table(args) -> int:
    return cmd_enumerate(args)


def cmd_verify(args) -> int:
    addresses = list(census.QUICK_ADDRESSES)
    if args.extended:
        addresses += [a for a in census.EXTENDED_ADDRESSES if a not in addresses]
    if args.address:
        addresses = args.address
    opts = _options(args)
    ok = True
    for address in addresses:
        solid = solid_for_address(address)
        try:
            records, _ = _run_solid(solid, opts, args.resume_from_cache)
        except (BudgetExceeded, CertificationFailure) as exc:
            print(f"FAIL {address}: {exc}")
            ok = False
            continue
        result = census.verify_solid(records, address)
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {address}: {len(records)} records")
        for f in result.failures:
            print(f"  failure: {f}")
        for w in result.warnings:
            print(f"  warning: {w}")
        ok = ok and result.passed
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="platonic-census",
        description="Enumerate and certify the orientable 3-manifolds made by "
                    "identifying faces of Platonic solids.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("solids", help="list the fifteen solids").set_defaults(func=cmd_solids)

    def add_run_args(p):
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--backend", choices=["auto", "python", "numba"], default="auto")
        p.add_argument("--max-nodes", type=int, default=None)
        p.add_argument("--profile-depth", type=int, default=6)
        p.add_argument("--no-profiles", action="store_true",
                       help="skip subgroup-class profiles (faster)")
        p.add_argument("--resume-from-cache", action="store_true")
        p.add_argument("--format", choices=["text", "json", "csv"], default="text")

    for name, help_text in (("enumerate", "run the census for one solid"),
                            ("table", "render a census in the published layout")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("symbol", help="Coxeter symbol, e.g. 4,4,3")
        p.add_argument("node", nargs="?", default="left", choices=["left", "right"])
        add_run_args(p)
        p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="compare against the published tables")
    p.add_argument("--extended", action="store_true",
                   help="include the index-120 solids (takes longer)")
    p.add_argument("--address", action="append",
                   help="verify only these solid addresses")
    add_run_args(p)
    p.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
