import datetime as dt
import json

import pytest

from asat.ingest import (
    GazetteerIndex,
    IngestError,
    build_snapshot,
    parse_demographics,
    parse_disease,
    parse_mobility,
    parse_posts,
    read_snapshot,
    write_snapshot,
)
from asat.ingest.parsers import (
    DEMOGRAPHICS_HEADER,
    DISEASE_HEADER,
    MOBILITY_HEADER,
    demographics_rows,
    disease_rows,
    mobility_rows,
    post_lines,
    write_csv,
)
from asat.ingest.records import RawPost

from conftest import mini_us_demographics

DISEASE_HEAD = ",".join(DISEASE_HEADER)
DEMO_HEAD = ",".join(DEMOGRAPHICS_HEADER)
MOBILITY_HEAD = ",".join(MOBILITY_HEADER)


def write(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestParseDisease:
    def test_worked_example_row(self, tmp_path):
        path = write(tmp_path, "d.csv", [DISEASE_HEAD, "2020-03-22,39035,OH,125,33,1,0.008"])
        result = parse_disease(path)
        assert not result.rejections
        rec = result.records[0]
        assert (rec.confirmed, rec.new_cases, rec.deaths, rec.fatality_rate) == (125, 33, 1, 0.008)
        assert rec.date == dt.date(2020, 3, 22)

    def test_zero_confirmed_zero_rate(self, tmp_path):
        path = write(tmp_path, "d.csv", [DISEASE_HEAD, "2020-03-01,X,OH,0,0,0,0.0"])
        result = parse_disease(path)
        assert result.records[0].fatality_rate == 0.0
        assert not result.rejections

    def test_deaths_exceed_confirmed_rejected(self, tmp_path):
        path = write(tmp_path, "d.csv", [DISEASE_HEAD, "2020-03-01,X,OH,5,0,9,1.0"])
        result = parse_disease(path)
        assert not result.records
        assert len(result.rejections) == 1
        assert "deaths" in result.rejections[0].reason

    def test_inconsistent_rate_rejected(self, tmp_path):
        path = write(tmp_path, "d.csv", [DISEASE_HEAD, "2020-03-01,X,OH,100,0,10,0.5"])
        result = parse_disease(path)
        assert not result.records
        assert "fatality_rate" in result.rejections[0].reason

    def test_unknown_geo_rejected(self, tmp_path):
        path = write(tmp_path, "d.csv", [DISEASE_HEAD, "2020-03-01,NOPE,OH,1,1,0,0.0"])
        result = parse_disease(path, known_ids={"X"})
        assert not result.records
        assert "unknown geo_id" in result.rejections[0].reason

    def test_malformed_row_does_not_abort(self, tmp_path):
        path = write(tmp_path, "d.csv", [
            DISEASE_HEAD,
            "2020-03-01,A,OH,10,2,1,0.1",
            "not-a-date,B,OH,1,1,1,1.0",
            "2020-03-01,C,OH,4,0,0,0.0",
        ])
        result = parse_disease(path)
        assert len(result.records) == 2
        assert len(result.rejections) == 1
        assert result.rejections[0].line_no == 3

    def test_sorted_by_geo_then_date(self, tmp_path):
        path = write(tmp_path, "d.csv", [
            DISEASE_HEAD,
            "2020-03-02,B,OH,1,1,0,0.0",
            "2020-03-01,B,OH,1,1,0,0.0",
            "2020-03-05,A,OH,1,1,0,0.0",
        ])
        result = parse_disease(path)
        assert [(r.geo_id, r.date.day) for r in result.records] == [("A", 5), ("B", 1), ("B", 2)]

    def test_bad_header_raises(self, tmp_path):
        path = write(tmp_path, "d.csv", ["날짜,geo_id", "x,y"])
        with pytest.raises(IngestError):
            parse_disease(path)

    def test_row_accounting(self, tmp_path):
        rows = [DISEASE_HEAD] + [
            f"2020-03-0{i % 9 + 1},G{i},OH,{i},0,0,0.0" for i in range(1, 20)
        ] + ["junk,row", "2020-03-01,H,OH,-3,0,0,0.0"]
        path = write(tmp_path, "d.csv", rows)
        result = parse_disease(path)
        assert len(result.records) + len(result.rejections) == 21


class TestParseDemographics:
    def base_rows(self):
        return [
            DEMO_HEAD,
            "US,nation,United States,,328000000,93.0,0.16,0.508,39.0,-98.0",
            "39,state,Ohio,US,11689100,287.0,0.17,0.51,40.4,-82.9",
            "39035,county,Cuyahoga,39,1235072,2724.0,0.18,0.52,41.43,-81.67",
            "3916000,city,Cleveland,39035,383793,5107.0,0.135,0.518,41.4993,-81.6944",
        ]

    def test_cleveland_fields(self, tmp_path):
        path = write(tmp_path, "g.csv", self.base_rows())
        result = parse_demographics(path)
        assert not result.rejections
        city = {r.geo_id: r for r in result.records}["3916000"]
        assert (city.population, city.pop_density) == (383793, 5107.0)
        assert (city.pct_over_65, city.pct_female) == (0.135, 0.518)

    def test_nation_only_file(self, tmp_path):
        path = write(tmp_path, "g.csv", self.base_rows()[:2])
        result = parse_demographics(path)
        assert len(result.records) == 1
        assert result.records[0].level == "nation"

    def test_orphan_parent_rejected(self, tmp_path):
        rows = self.base_rows() + ["3999,county,Ghost,MISSING,1,1.0,0.1,0.5,40.0,-80.0"]
        path = write(tmp_path, "g.csv", rows)
        result = parse_demographics(path)
        assert len(result.rejections) == 1
        assert "orphan" in result.rejections[0].reason

    def test_duplicate_geo_id_errors_with_both_lines(self, tmp_path):
        rows = self.base_rows() + ["39,state,Ohio Again,US,1,1.0,0.1,0.5,40.0,-80.0"]
        path = write(tmp_path, "g.csv", rows)
        with pytest.raises(IngestError, match=r"lines 3 and 6"):
            parse_demographics(path)

    def test_cycle_errors(self, tmp_path):
        rows = [
            DEMO_HEAD,
            "US,nation,United States,,1,1.0,0.1,0.5,39.0,-98.0",
            "A,county,Alpha,B,1,1.0,0.1,0.5,40.0,-80.0",
            "B,state,Beta,US,1,1.0,0.1,0.5,40.0,-80.0",
            "C,city,Gamma,D,1,1.0,0.1,0.5,40.0,-80.0",
            "D,city,Delta,D,1,1.0,0.1,0.5,40.0,-80.0",
        ]
        path = write(tmp_path, "g.csv", rows)
        with pytest.raises(IngestError, match="cycle"):
            parse_demographics(path)

    def test_two_nations_error(self, tmp_path):
        rows = self.base_rows() + ["ZZ,nation,Other,,1,1.0,0.1,0.5,0.0,0.0"]
        path = write(tmp_path, "g.csv", rows)
        with pytest.raises(IngestError, match="nation"):
            parse_demographics(path)

    def test_wrong_parent_level_rejected(self, tmp_path):
        rows = self.base_rows() + ["9901,city,Skipper,39,1,1.0,0.1,0.5,40.0,-80.0"]
        path = write(tmp_path, "g.csv", rows)
        result = parse_demographics(path)
        assert any("expected 'county'" in r.reason for r in result.rejections)

    def test_latlon_bounds_rejected(self, tmp_path):
        rows = self.base_rows() + ["9902,state,Nowhere,US,1,1.0,0.1,0.5,95.0,-80.0"]
        path = write(tmp_path, "g.csv", rows)
        result = parse_demographics(path)
        assert any("lat" in r.reason for r in result.rejections)


class TestParseMobility:
    def test_level_three(self, tmp_path):
        path = write(tmp_path, "m.csv", [MOBILITY_HEAD, "44106-area,2020-03-24,3"])
        result = parse_mobility(path)
        assert result.records[0].level == 3

    def test_boundary_levels_accepted(self, tmp_path):
        path = write(tmp_path, "m.csv", [MOBILITY_HEAD, "a,2020-03-24,1", "b,2020-03-24,5"])
        result = parse_mobility(path)
        assert [r.level for r in result.records] == [1, 5]
        assert not result.rejections

    def test_level_six_rejected(self, tmp_path):
        path = write(tmp_path, "m.csv", [MOBILITY_HEAD, "a,2020-03-24,6"])
        result = parse_mobility(path)
        assert not result.records
        assert "outside [1,5]" in result.rejections[0].reason

    def test_non_integer_level_rejected(self, tmp_path):
        path = write(tmp_path, "m.csv", [MOBILITY_HEAD, "a,2020-03-24,2.5"])
        result = parse_mobility(path)
        assert "non-integer" in result.rejections[0].reason


class TestParsePosts:
    def post_line(self, **overrides):
        obj = {
            "id": "p1",
            "subreddit": "r/CoronavirusPA",
            "created_utc": 1584200000,
            "author_hash": "CF" + "a" * 62,
            "title": "",
            "body": "I live in Montgomery County, PA and everyone here is acting like there's nothing going on.",
        }
        obj.update(overrides)
        return json.dumps(obj)

    def test_basic_post(self, tmp_path):
        path = write(tmp_path, "p.jsonl", [self.post_line()])
        result = parse_posts(path)
        assert result.records[0].body.startswith("I live in Montgomery County, PA")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text("")
        result = parse_posts(path)
        assert result.records == [] and result.rejections == []

    def test_one_bad_line_of_three(self, tmp_path):
        path = write(tmp_path, "p.jsonl", [
            self.post_line(id="a"),
            "{broken json",
            self.post_line(id="b"),
        ])
        result = parse_posts(path)
        assert len(result.records) == 2
        assert len(result.rejections) == 1
        assert result.rejections[0].line_no == 2

    def test_missing_id_rejected(self, tmp_path):
        path = write(tmp_path, "p.jsonl", [json.dumps({"body": "hello"})])
        result = parse_posts(path)
        assert "missing id" in result.rejections[0].reason

    def test_missing_body_kept_empty(self, tmp_path):
        path = write(tmp_path, "p.jsonl", [json.dumps({"id": "q", "subreddit": "r/x"})])
        result = parse_posts(path)
        assert result.records[0].body == ""

    def test_raw_author_gets_hashed(self, tmp_path):
        path = write(tmp_path, "p.jsonl", [self.post_line(author_hash="some_username")])
        result = parse_posts(path)
        hashed = result.records[0].author_hash
        assert hashed != "some_username"
        assert len(hashed) == 64 and all(c in "0123456789abcdef" for c in hashed)

    def test_already_hashed_author_unchanged(self, tmp_path):
        digest = "ab" * 32
        path = write(tmp_path, "p.jsonl", [self.post_line(author_hash=digest)])
        result = parse_posts(path)
        assert result.records[0].author_hash == digest


class TestRoundTrip:
    def test_disease_round_trip(self, tmp_path):
        path = write(tmp_path, "d.csv", [
            DISEASE_HEAD,
            "2020-03-22,39035,OH,125,33,1,0.008",
            "2020-03-01,39049,OH,0,0,0,0.0",
        ])
        first = parse_disease(path).records
        out = tmp_path / "d2.csv"
        write_csv(out, DISEASE_HEADER, disease_rows(first))
        assert parse_disease(out).records == first

    def test_demographics_round_trip(self, tmp_path):
        records = mini_us_demographics()
        out = tmp_path / "g.csv"
        write_csv(out, DEMOGRAPHICS_HEADER, demographics_rows(records))
        parsed = parse_demographics(out)
        assert not parsed.rejections
        assert sorted(parsed.records, key=lambda r: r.geo_id) == sorted(records, key=lambda r: r.geo_id)

    def test_mobility_round_trip(self, tmp_path):
        path = write(tmp_path, "m.csv", [MOBILITY_HEAD, "a,2020-03-24,3", "b,2020-03-25,1"])
        first = parse_mobility(path).records
        out = tmp_path / "m2.csv"
        write_csv(out, MOBILITY_HEADER, mobility_rows(first))
        assert parse_mobility(out).records == first

    def test_posts_round_trip(self, tmp_path):
        posts = [
            RawPost("p1", "r/CoronavirusOH", 1584000000.0, "ab" * 32, "t", "hello there"),
            RawPost("p2", "r/Coronavirus", 1584000001.0, "cd" * 32, "", ""),
        ]
        out = tmp_path / "p.jsonl"
        out.write_text("\n".join(post_lines(posts)) + "\n")
        assert parse_posts(out).records == posts

    def test_parse_is_deterministic(self, tmp_path):
        path = write(tmp_path, "d.csv", [
            DISEASE_HEAD,
            "2020-03-22,39035,OH,125,33,1,0.008",
            "oops",
        ])
        a = parse_disease(path)
        b = parse_disease(path)
        assert a.records == b.records and a.rejections == b.rejections


class TestExtractLocations:
    def gazetteer(self):
        return GazetteerIndex(mini_us_demographics())

    def post(self, body, subreddit="r/Coronavirus", title=""):
        return RawPost("p", subreddit, 0.0, "ab" * 32, title, body)

    def test_county_and_state_from_text(self):
        idx = self.gazetteer()
        matches = idx.extract(self.post(
            "I live in Montgomery County, PA and everyone here is acting like "
            "there's nothing going on."))
        geo_ids = [m.geo_id for m in matches]
        assert "42091" in geo_ids  # Montgomery county, Pennsylvania
        assert "42" in geo_ids     # the state itself
        assert "39113" not in geo_ids  # Ohio's Montgomery is ruled out by the PA cue
        assert not any(m.ambiguous for m in matches)

    def test_subreddit_fallback(self):
        idx = self.gazetteer()
        matches = idx.extract(self.post("no places mentioned here", subreddit="r/CoronavirusOH"))
        assert [m.geo_id for m in matches] == ["39"]

    def test_ambiguous_county_without_cue(self):
        idx = self.gazetteer()
        matches = idx.extract(self.post("Montgomery county is on lockdown"))
        hits = {m.geo_id: m.ambiguous for m in matches}
        assert set(hits) == {"39113", "42091"}
        assert all(hits.values())

    def test_no_match_empty(self):
        idx = self.gazetteer()
        assert idx.extract(self.post("nothing to see", subreddit="r/gardening")) == []

    def test_output_subset_of_gazetteer(self):
        idx = self.gazetteer()
        known = {r.geo_id for r in mini_us_demographics()}
        for body in ["Cleveland!", "Ohio and Pennsylvania", "Billings MT", "zzz"]:
            for m in idx.extract(self.post(body)):
                assert m.geo_id in known

    def test_city_name_matches(self):
        idx = self.gazetteer()
        matches = idx.extract(self.post("Stores in Cleveland are all closed"))
        assert [m.geo_id for m in matches] == ["3916000"]


class TestSnapshot:
    def test_build_and_round_trip(self, tmp_path):
        from asat.ingest.parsers import write_csv as wc

        demo_path = tmp_path / "demographics.csv"
        wc(demo_path, DEMOGRAPHICS_HEADER, demographics_rows(mini_us_demographics()))
        disease_path = write(tmp_path, "disease.csv", [
            DISEASE_HEAD, "2020-03-22,39035,OH,125,33,1,0.008"])
        mobility_path = write(tmp_path, "mobility.csv", [MOBILITY_HEAD, "3916000,2020-03-22,3"])
        posts_path = write(tmp_path, "posts.jsonl", [json.dumps({
            "id": "p1", "subreddit": "r/CoronavirusOH", "created_utc": 1584000000,
            "author_hash": "ab" * 32, "title": "", "body": "Cleveland is quiet",
        })])
        snap = build_snapshot(disease_path, demo_path, mobility_path, posts_path)
        assert snap.locations_of("p1") == ["3916000"]

        out = tmp_path / "snap"
        write_snapshot(snap, out)
        again = read_snapshot(out)
        assert again.disease == snap.disease
        assert again.demographics == snap.demographics
        assert again.mobility == snap.mobility
        assert again.posts == snap.posts
        assert again.post_locations == snap.post_locations

    def test_snapshot_bytes_deterministic(self, tmp_path):
        demo_path = tmp_path / "demographics.csv"
        write_csv(demo_path, DEMOGRAPHICS_HEADER, demographics_rows(mini_us_demographics()))
        disease_path = write(tmp_path, "disease.csv", [DISEASE_HEAD])
        mobility_path = write(tmp_path, "mobility.csv", [MOBILITY_HEAD])
        posts_path = tmp_path / "posts.jsonl"
        posts_path.write_text("")
        snap = build_snapshot(disease_path, demo_path, mobility_path, posts_path)
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        write_snapshot(snap, out1)
        write_snapshot(snap, out2)
        for name in ["disease.csv", "demographics.csv", "mobility.csv", "posts.jsonl",
                     "post_locations.csv", "rejections.csv"]:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
