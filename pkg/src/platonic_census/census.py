"""The census pipeline: search, fuse, certify, compute invariants, verify.

run_solid drives one feasible solid end to end and returns certified
ManifoldRecords.  For palindromic symbols {p,q,p} the tessellation is
self-dual, so the diagram flip x1<->x4, x2<->x3 is realized by an isometry
normalizing the reflection group; subgroup classes related by it give
isometric manifolds and are fused into one record (the published censuses
count this way: the icosahedral census has 6 rows, not the 7 reflection
group classes).

Verification compares a run against the bundled fixture tables: record
counts, homology multisets modulo abelian-group isomorphism, cusp count
multisets are hard checks; the face/edge identification letter strings are
compared through the canonical code and mismatches only warn, since the
published strings depend on unpublished figure labellings.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import toddcox
from .build import (CellIndexing, ManifoldRecord, certify,
                    canonical_identification_code, side_pairings)
from .coset import CosetTable
from .coxeter import (CoxeterSymbol, GeometryClass, SolidDescriptor,
                      edge_divisibility_filter, presentation, solid_for_address,
                      torsion_representatives)
from .distinguish import (DistinguishReport, InvariantProfile, derived_quotient,
                          distinguish_report, low_index_profile, order_of_K)
from .errors import BudgetExceeded, CertificationFailure
from .fp import simplify
from .homology import (AbelianInvariants, canonical_decomposition, format_h1,
                       h1_of, parse_h1, rewrite_subgroup_presentation)
from .search import (SearchConstraints, SearchReport, SubgroupRecord,
                     low_index_search)

FIXTURE_VERSION = 1

#: solids whose searches run at index 120 (kept behind --extended)
EXTENDED_ADDRESSES = ("3,3,5:left", "5,3,5:left", "3,5,3:left", "5,3,6:right")

QUICK_ADDRESSES = ("3,3,3:left", "4,3,3:right", "3,4,3:left", "4,3,4:left",
                   "4,4,3:left", "4,3,6:right", "3,3,6:right")


@dataclass
class CensusOptions:
    threads: int = 1
    backend: str = "auto"
    profile_depth: int = 6          # low-index profile range for K
    max_nodes: Optional[int] = None
    profile_max_nodes: int = 10**7
    with_profiles: bool = True


def constraints_for(solid: SolidDescriptor) -> SearchConstraints:
    """The census filter set for a solid (spherical ones get the closure)."""
    sym = solid.working_symbol
    ts = torsion_representatives(sym)
    if solid.geometry is GeometryClass.SPHERICAL:
        from .freeness import annotate_spherical_torsion
        ts = annotate_spherical_torsion(sym, ts)
    return SearchConstraints(target_index=solid.target_index,
                             torsion_words=tuple(ts.filter_words()))


def spherical_subgroup_search(solid: SolidDescriptor,
                              threads: int = 1, backend: str = "auto",
                              max_nodes: Optional[int] = None) -> SearchReport:
    """Census search with the fixed-point-restricted spherical filter."""
    if solid.geometry is not GeometryClass.SPHERICAL:
        raise ValueError(f"{solid} is not spherical")
    return low_index_search(presentation(solid.working_symbol),
                            constraints_for(solid), threads=threads,
                            backend=backend, max_nodes=max_nodes)


def canonical_table(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Base-independent canonical form of a census table (the search's own
    normal form: Gamma_v breadth-first renumbering, minimal pairing column)."""
    m = len(rows)
    best = None
    for base in range(m):
        order = [base]
        seen = [False] * m
        seen[base] = True
        head = 0
        while head < len(order):
            a = order[head]
            head += 1
            for j in (1, 2, 3):
                b = rows[a][j]
                if not seen[b]:
                    seen[b] = True
                    order.append(b)
        if not all(seen):
            raise ValueError("not a census table: Gamma_v is not transitive")
        new_of = [0] * m
        for k, a in enumerate(order):
            new_of[a] = k
        cand = tuple(tuple(new_of[rows[order[k]][j]] for j in range(4))
                     for k in range(m))
        if best is None or cand < best:
            best = cand
    return best


def flip_partner(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical table of the subgroup's image under the diagram flip."""
    flipped = [[r[3], r[2], r[1], r[0]] for r in rows]
    return canonical_table(flipped)


def fuse_duality_classes(report: SearchReport, sym: CoxeterSymbol
                         ) -> tuple[list[SubgroupRecord], list[str]]:
    """Merge subgroup classes conjugate under the self-duality isometry.

    Only palindromic symbols have it; the kept representative is the one
    with the smaller canonical table, and a note records each merge.
    """
    if not sym.is_palindromic():
        return list(report.accepted), []
    by_key: dict[tuple, list[SubgroupRecord]] = {}
    for rec in report.accepted:
        key = min(rec.table.rows, flip_partner(rec.table.rows))
        by_key.setdefault(key, []).append(rec)
    kept = []
    notes = []
    for key in sorted(by_key):
        group = sorted(by_key[key], key=lambda r: r.table.rows)
        kept.append(group[0])
        if len(group) > 1:
            notes.append(
                "two reflection-group classes merged: related by the "
                "self-duality isometry of the tessellation")
    kept.sort(key=lambda r: r.table.rows)
    return kept, notes


def run_solid(solid: SolidDescriptor, opts: CensusOptions = CensusOptions()
              ) -> list[ManifoldRecord]:
    """search -> fuse -> certify -> homology -> profiles for one solid."""
    if not edge_divisibility_filter(solid):
        raise ValueError(f"{solid} admits no manifolds: p does not divide the edge count")
    sym = solid.working_symbol
    pres = presentation(sym)
    report = low_index_search(pres, constraints_for(solid), threads=opts.threads,
                              backend=opts.backend, max_nodes=opts.max_nodes)
    kept, fuse_notes = fuse_duality_classes(report, sym)
    records = []
    for k, rec in enumerate(kept):
        record = certify(solid, rec, record_id=f"{solid.address()}#{k + 1}")
        fp = rewrite_subgroup_presentation(pres, rec.table)
        rec.presentation_of_K = simplify(fp)
        record.homology = h1_of(rec, pres)
        records.append(record)
    for record in records:
        if fuse_notes:
            record.annotations.extend(fuse_notes[:1])
        _attach_static_flags(record)
    if opts.with_profiles:
        compute_profiles(records, opts)
        distinguish_records(records, n_max=opts.profile_depth)
    attach_known_names(records)
    return records


def _attach_static_flags(record: ManifoldRecord) -> None:
    addr = record.solid.address()
    if addr == "5,3,6:right":
        record.external_flags.append(
            "classification within the reflection group is complete: the group "
            "is non-arithmetic and maximal, so its commensurator adds no new "
            "conjugacies (external result)")


def attach_known_names(records: list[ManifoldRecord]) -> None:
    """Copy named-space annotations from the fixture onto matching records.

    A fixture row names a record when homology and cusp count match it
    uniquely, or uniquely after the index-3 subgroup count breaks the tie.
    These are published identifications, not computed claims.
    """
    if not records:
        return
    fixture = load_fixture()
    entry = next((e for e in fixture["solids"]
                  if e["address"] == records[0].solid.address()), None)
    if entry is None:
        return
    for row in entry["records"]:
        names = row.get("annotations", [])
        if not names:
            continue
        key = (_fixture_h1(row).key(), row.get("cusps", 0))
        matches = [r for r in records
                   if (r.homology.key(), r.cusp_count) == key]
        if len(matches) > 1 and "low_index_3" in row:
            matches = [r for r in matches if r.invariant_profile is not None and
                       r.invariant_profile.low_index_classes.get(3) == row["low_index_3"]]
        if len(matches) == 1:
            for name in names:
                if name not in matches[0].annotations:
                    matches[0].annotations.append(name)


def compute_profiles(records: list[ManifoldRecord], opts: CensusOptions) -> None:
    for record in records:
        k_pres = record.subgroup.presentation_of_K
        assert k_pres is not None
        h1 = record.homology
        profile = InvariantProfile(
            h1=h1,
            cusp_count=record.cusp_count,
            order=order_of_K(record.solid, record.subgroup),
            low_index_classes=low_index_profile(
                k_pres, n_max=opts.profile_depth, max_nodes=opts.profile_max_nodes),
            derived_quotient=derived_quotient(k_pres, h1),
        )
        record.invariant_profile = profile


def distinguish_records(records: list[ManifoldRecord], n_max: int = 6
                        ) -> DistinguishReport:
    report = distinguish_report(records, n_max=n_max)
    # the Euclidean same-homology pair is identified by an external result
    if records and records[0].solid.geometry is GeometryClass.EUCLIDEAN:
        for group in report.groups:
            if len(group) > 1:
                for i in group:
                    flag = ("identified with its homology twin by a euclidean "
                            "similarity (external result)")
                    if flag not in records[i].external_flags:
                        records[i].external_flags.append(flag)
    return report


# -- serialization ---------------------------------------------------------------

def record_to_dict(record: ManifoldRecord) -> dict:
    prof = record.invariant_profile
    return {
        "id": record.id,
        "solid": record.solid.address(),
        "table_columns": [list(record.subgroup.table.column(i)) for i in range(4)],
        "fi": record.FI,
        "ei": record.EI,
        "cusps": record.cusp_count,
        "canonical_code": record.canonical_code,
        "h1": {"torsion": list(record.homology.torsion),
               "free_rank": record.homology.free_rank},
        "profile": None if prof is None else {
            "order": prof.order,
            "low_index_classes": {str(k): v for k, v in prof.low_index_classes.items()},
            "derived_quotient": None if prof.derived_quotient is None else
                {"torsion": list(prof.derived_quotient.torsion),
                 "free_rank": prof.derived_quotient.free_rank},
        },
        "external_flags": list(record.external_flags),
        "annotations": list(record.annotations),
    }


def record_from_dict(data: dict) -> ManifoldRecord:
    solid = solid_for_address(data["solid"])
    cols = data["table_columns"]
    m = len(cols[0])
    rows = tuple(tuple(cols[i][a] for i in range(4)) for a in range(m))
    table = CosetTable(ngens=4, rows=rows)
    from .coset import parity_orientable, schreier_generators
    rec = SubgroupRecord(table=table, orientable=parity_orientable(table),
                         schreier_gens=schreier_generators(table))
    record = certify(solid, rec, record_id=data["id"])
    record.homology = AbelianInvariants(tuple(data["h1"]["torsion"]),
                                        data["h1"]["free_rank"])
    prof = data.get("profile")
    if prof:
        record.invariant_profile = InvariantProfile(
            h1=record.homology,
            cusp_count=record.cusp_count,
            order=prof["order"],
            low_index_classes={int(k): v for k, v in prof["low_index_classes"].items()},
            derived_quotient=None if prof["derived_quotient"] is None else
                AbelianInvariants(tuple(prof["derived_quotient"]["torsion"]),
                                  prof["derived_quotient"]["free_rank"]),
        )
    record.external_flags = list(data.get("external_flags", []))
    record.annotations = list(data.get("annotations", []))
    return record


# -- cache -----------------------------------------------------------------------

def cache_dir() -> Path:
    env = os.environ.get("CENSUS_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "platonic-census"


def cache_key(solid: SolidDescriptor, opts: CensusOptions) -> str:
    c = constraints_for(solid)
    payload = json.dumps({
        "address": solid.address(),
        "index": c.target_index,
        "words": sorted(c.torsion_words),
        "orientable": c.require_orientable,
        "profile_depth": opts.profile_depth,
        "version": FIXTURE_VERSION,
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def cache_path(solid: SolidDescriptor, opts: CensusOptions) -> Path:
    return cache_dir() / f"{solid.address().replace(',', '_').replace(':', '-')}-{cache_key(solid, opts)}.json"


def save_cache(solid: SolidDescriptor, opts: CensusOptions,
               records: list[ManifoldRecord]) -> Path:
    path = cache_path(solid, opts)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({
        "version": FIXTURE_VERSION,
        "solid": solid.address(),
        "records": [record_to_dict(r) for r in records],
    }, indent=1))
    return path


def load_cache(solid: SolidDescriptor, opts: CensusOptions
               ) -> Optional[list[ManifoldRecord]]:
    path = cache_path(solid, opts)
    if not path.exists():
        return None
    data = json.loads(path.read_text())
    if data.get("version") != FIXTURE_VERSION:
        return None
    return [record_from_dict(d) for d in data["records"]]


# -- fixtures and verification ------------------------------------------------------

def load_fixture() -> dict:
    text = resources.files("platonic_census").joinpath("data/expected_census.json").read_text()
    data = json.loads(text)
    assert data["version"] == FIXTURE_VERSION
    return data


@dataclass
class VerifyResult:
    address: str
    passed: bool
    failures: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _fixture_h1(entry: dict) -> AbelianInvariants:
    return parse_h1(entry["h1"])


def _paper_string_code(solid: SolidDescriptor, fi: str, ei: str) -> Optional[str]:
    """Canonical code of a published FI/EI string pair, interpreted over our
    cell numbering; None when the strings do not define a pairing in it.

    The published numbering comes from unpublished figures, so failure to
    interpret or match is expected for some rows and only ever warns.
    """
    ci = CellIndexing.of(solid)
    # face matching from the FI letters
    part: dict[str, list[int]] = {}
    for f, ch in enumerate(fi):
        part.setdefault(ch, []).append(f)
    if any(len(v) != 2 for v in part.values()) or len(fi) != len(ci.faces):
        return None
    partner = [-1] * len(ci.faces)
    for a, b in part.values():
        partner[a], partner[b] = b, a
    # edge classes from the EI letters
    classes: dict[str, list[int]] = {}
    e = 0
    i = 0
    while i < len(ei):
        ch = ei[i]
        if ch == "(":
            i = ei.index(")", i) + 1
            continue
        classes.setdefault(ch, []).append(e)
        e += 1
        i += 1
    if e != len(ci.edges):
        return None
    edge_class = [-1] * len(ci.edges)
    for k, ch in enumerate(sorted(classes, key=lambda c: min(classes[c]))):
        for ee in classes[ch]:
            edge_class[ee] = k
    fi_canon, classes_canon = _canonical_combinatorics(solid, ci, partner, edge_class)
    return fi_canon + "|" + classes_canon


def _canonical_combinatorics(solid: SolidDescriptor, ci: CellIndexing,
                             partner: list[int], edge_class: list[int]) -> tuple[str, str]:
    """Minimal letter encodings of a face matching and an edge partition over
    the solid's symmetry group (cell-level relabelings)."""
    from .build import _encode_fi, _left_translations, _letters

    best = None
    for perm in _left_translations(solid.working_symbol):
        fmap = [-1] * len(ci.faces)
        emap = [-1] * len(ci.edges)
        for f, chambers in enumerate(ci.faces):
            fmap[f] = ci.face_of[perm[chambers[0]]]
        for e, chambers in enumerate(ci.edges):
            emap[e] = ci.edge_of[perm[chambers[0]]]
        partner2 = [-1] * len(ci.faces)
        for f, f2 in enumerate(partner):
            partner2[fmap[f]] = fmap[f2]
        class_members: dict[int, list[int]] = {}
        for e, k in enumerate(edge_class):
            class_members.setdefault(k, []).append(emap[e])
        letters = [""] * len(ci.edges)
        order = sorted(class_members.values(), key=min)
        for k, members in enumerate(order):
            for e in members:
                letters[e] = _letters(k)
        cand = (_encode_fi(partner2), "".join(letters))
        if best is None or cand < best:
            best = cand
    return best


def record_comparison_code(record: ManifoldRecord) -> str:
    """The record's identification combinatorics in the same letters-only
    canonical form used for published strings."""
    solid = record.solid
    ci = CellIndexing.of(solid)
    sp = side_pairings(solid, record.subgroup, ci)
    from .build import edge_cycles
    cycles = edge_cycles(solid, record.subgroup, sp, ci)
    edge_class = [-1] * len(ci.edges)
    for k, cyc in enumerate(cycles):
        for e, _ in cyc.entries:
            edge_class[e] = k
    fi, letters = _canonical_combinatorics(solid, ci, sp.partner, edge_class)
    return fi + "|" + letters


def verify_records(records: list[ManifoldRecord], fixture_entry: dict) -> VerifyResult:
    address = fixture_entry["address"]
    result = VerifyResult(address=address, passed=True)

    expected_n = fixture_entry["count"]
    if len(records) != expected_n:
        result.failures.append(
            f"record count {len(records)} != expected {expected_n}")
    exp_h1 = sorted(_fixture_h1(e).key() for e in fixture_entry["records"])
    got_h1 = sorted(r.homology.key() for r in records)
    if exp_h1 != got_h1:
        result.failures.append(
            f"H1 multiset {[str(AbelianInvariants(*k)) for k in got_h1]} != "
            f"expected {[str(AbelianInvariants(*k)) for k in exp_h1]}")
    exp_cusps = sorted(e.get("cusps", 0) for e in fixture_entry["records"])
    got_cusps = sorted(r.cusp_count for r in records)
    if exp_cusps != got_cusps:
        result.failures.append(f"cusp multiset {got_cusps} != expected {exp_cusps}")

    solid = records[0].solid if records else None
    expected_codes = {}
    for e in fixture_entry["records"]:
        if "fi" in e and "ei" in e and solid is not None:
            code = _paper_string_code(solid, e["fi"], e["ei"])
            if code is None:
                result.warnings.append(
                    f"published strings for {e.get('ref', '?')} do not embed in "
                    "our cell numbering (figure labelling)")
            else:
                expected_codes[code] = e.get("ref", "?")
    if expected_codes and records:
        got_codes = {record_comparison_code(r): r.id for r in records}
        for code, ref in sorted(expected_codes.items()):
            if code not in got_codes:
                result.warnings.append(
                    f"no record matches the published identification strings of "
                    f"{ref} up to relabeling (figure labelling convention)")

    result.passed = not result.failures
    return result


def verify_solid(records: list[ManifoldRecord], address: str) -> VerifyResult:
    fixture = load_fixture()
    entry = next(e for e in fixture["solids"] if e["address"] == address)
    return verify_records(records, entry)
