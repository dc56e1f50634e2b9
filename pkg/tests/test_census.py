import copy
import json

import pytest

from platonic_census import census
from platonic_census.coxeter import solid_for_address
from platonic_census.homology import format_h1


class TestPipeline:
    def test_records_ordered_and_labelled(self, quick_census):
        for addr, records in quick_census.items():
            for k, r in enumerate(records):
                assert r.id == f"{addr}#{k + 1}"
                assert r.homology is not None
                assert r.invariant_profile is not None

    def test_infeasible_solid_rejected(self):
        with pytest.raises(ValueError):
            census.run_solid(solid_for_address("4,3,3:left"))

    def test_empty_census_is_fine(self, quick_census):
        assert quick_census["3,3,6:right"] == []

    def test_three_torus_annotated(self, quick_census):
        torus = [r for r in quick_census["4,3,4:left"]
                 if r.homology.free_rank == 3]
        assert len(torus) == 1
        assert "3-torus" in torus[0].annotations

    def test_whitehead_annotated(self, quick_census):
        hits = [r for r in quick_census["4,4,3:left"]
                if "Whitehead link complement" in r.annotations]
        assert len(hits) == 1
        assert hits[0].invariant_profile.low_index_classes[3] == 6

    def test_quaternionic_and_octahedral_names(self, quick_census):
        assert any("quaternionic space" in r.annotations
                   for r in quick_census["4,3,3:right"])
        assert any("octahedral space" in r.annotations
                   for r in quick_census["3,4,3:left"])


class TestCache:
    def test_round_trip_preserves_codes(self, quick_census, tmp_path, monkeypatch):
        monkeypatch.setenv("CENSUS_CACHE_DIR", str(tmp_path))
        solid = solid_for_address("4,3,6:right")
        opts = census.CensusOptions()
        records = quick_census["4,3,6:right"]
        census.save_cache(solid, opts, records)
        loaded = census.load_cache(solid, opts)
        assert loaded is not None
        assert [r.canonical_code for r in loaded] == \
            [r.canonical_code for r in records]
        assert [r.homology for r in loaded] == [r.homology for r in records]
        assert [r.invariant_profile.low_index_classes for r in loaded] == \
            [r.invariant_profile.low_index_classes for r in records]

    def test_key_depends_on_constraints(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CENSUS_CACHE_DIR", str(tmp_path))
        solid = solid_for_address("4,4,3:left")
        a = census.cache_path(solid, census.CensusOptions())
        b = census.cache_path(solid, census.CensusOptions(profile_depth=4))
        assert a != b


class TestVerify:
    def test_quick_suite_passes(self, quick_census):
        for addr, records in quick_census.items():
            result = census.verify_solid(records, addr)
            assert result.passed, (addr, result.failures)

    def test_tampered_count_fails(self, quick_census):
        fixture = census.load_fixture()
        entry = copy.deepcopy(
            next(e for e in fixture["solids"] if e["address"] == "4,4,3:left"))
        entry["count"] = 3
        result = census.verify_records(quick_census["4,4,3:left"], entry)
        assert not result.passed
        assert any("count" in f for f in result.failures)

    def test_tampered_h1_fails(self, quick_census):
        fixture = census.load_fixture()
        entry = copy.deepcopy(
            next(e for e in fixture["solids"] if e["address"] == "4,4,3:left"))
        entry["records"][0]["h1"] = "30002"
        result = census.verify_records(quick_census["4,4,3:left"], entry)
        assert not result.passed
        assert any("H1" in f for f in result.failures)

    def test_string_mismatch_only_warns(self, quick_census):
        fixture = census.load_fixture()
        entry = copy.deepcopy(
            next(e for e in fixture["solids"] if e["address"] == "4,4,3:left"))
        entry["records"][0]["fi"] = "abcdabcd"     # some other matching
        result = census.verify_records(quick_census["4,4,3:left"], entry)
        assert result.passed

    def test_fixture_is_well_formed(self):
        fixture = census.load_fixture()
        addresses = {e["address"] for e in fixture["solids"]}
        assert set(census.QUICK_ADDRESSES) <= addresses
        assert set(census.EXTENDED_ADDRESSES) <= addresses
        for entry in fixture["solids"]:
            assert len(entry["records"]) == entry["count"] or "computed_count" in entry
            for row in entry["records"]:
                assert "h1" in row and "ref" in row


class TestFusion:
    def test_flip_partner_round_trip(self, quick_census):
        # flipping twice is the identity on canonical tables
        for addr in ("4,3,4:left",):
            for r in quick_census[addr]:
                rows = r.table_rows if hasattr(r, "table_rows") else r.subgroup.table.rows
                once = census.flip_partner(rows)
                assert census.canonical_table(rows) == census.flip_partner(once)

    def test_palindromic_quick_counts_unchanged(self, quick_census):
        # fusion must not merge anything in the quick palindromic censuses
        assert len(quick_census["3,3,3:left"]) == 1
        assert len(quick_census["3,4,3:left"]) == 3
        assert len(quick_census["4,3,4:left"]) == 6
