import json
import socket
from datetime import datetime, timezone

import numpy as np
import pandas as pd
import pytest

from gridxai.errors import (
    AuthError,
    FixtureMissingError,
    ParseError,
    RateLimitError,
    SchemaMismatchError,
)
from gridxai.ingest import (
    EntsoeClient,
    RawSeries,
    SeriesRequest,
    hourly_points,
    parse_market_document,
    parse_redispatch_csv,
    parse_redispatch_jsonl,
    render_market_document,
    snapshot,
    study_requests,
    write_redispatch_csv,
)
from gridxai.ingest.cache import SeriesCache
from gridxai.synthetic import random_intervention_records, write_fixture_bundle


def _utc(*args):
    return datetime(*args, tzinfo=timezone.utc)


DAY = (_utc(2021, 6, 1), _utc(2021, 6, 2))


def _req(quantity="load_forecast", area="tennet", window=DAY, counterparty=None):
    return SeriesRequest(quantity, area, window[0], window[1], counterparty=counterparty)


@pytest.fixture
def fixture_dir(tmp_path):
    idx = pd.date_range(DAY[0], DAY[1], freq="h", inclusive="left", tz="UTC")
    series = pd.Series(np.arange(24, dtype=float) + 100.0, idx)
    req = _req()
    (tmp_path / req.fixture_name()).write_text(render_market_document(series, "MW"))
    return tmp_path, series


class TestXml:
    def test_fixture_day_roundtrip(self, fixture_dir):
        fixtures, series = fixture_dir
        client = EntsoeClient(fixtures_dir=fixtures)
        got = client.fetch(_req())
        assert got.source == "fixture" and got.unit == "MW"
        assert len(got.points) == 24
        pd.testing.assert_series_equal(got.to_series(), series,
                                       check_names=False, check_freq=False)

    def test_quarter_hour_mean_aggregation(self, tmp_path):
        idx = pd.date_range(DAY[0], periods=8, freq="15min", tz="UTC")
        series = pd.Series([25.0, 50.0, 75.0, 100.0, 30.0, 30.0, 50.0, 50.0], idx)
        window = (DAY[0], _utc(2021, 6, 1, 2))
        req = _req(quantity="solar_fc", window=window)
        (tmp_path / req.fixture_name()).write_text(
            render_market_document(series, "MW", resolution_minutes=15))
        got = EntsoeClient(fixtures_dir=tmp_path).fetch(req)
        assert [v for _, v in got.points] == [62.5, 40.0]

    def test_malformed_xml_reports_byte_offset(self):
        with pytest.raises(ParseError) as err:
            parse_market_document(b"<GL_MarketDocument><TimeSeries></GL_MarketDocument>")
        assert err.value.byte_offset is not None

    def test_acknowledgement_means_empty(self):
        periods, _, no_data = parse_market_document(
            render_market_document(pd.Series(dtype=float), "MW").encode())
        assert periods == [] and no_data

    def test_overlapping_periods_later_wins(self):
        idx1 = pd.date_range(DAY[0], periods=3, freq="h", tz="UTC")
        doc1 = render_market_document(pd.Series([1.0, 2.0, 3.0], idx1), "MW")
        doc2 = render_market_document(pd.Series([9.0], idx1[2:]), "MW")
        body1 = doc1.split("<GL_MarketDocument>")[1].split("</GL_MarketDocument>")[0]
        body2 = doc2.split("<GL_MarketDocument>")[1].split("</GL_MarketDocument>")[0]
        merged = f"<GL_MarketDocument>{body1}{body2}</GL_MarketDocument>"
        periods, _, _ = parse_market_document(merged.encode())
        pts = hourly_points(periods)
        assert pts[2] == (idx1[2], 9.0)


class TestCache:
    def test_second_fetch_from_cache_no_refetch(self, fixture_dir, tmp_path):
        fixtures, _ = fixture_dir
        cache_dir = tmp_path / "cache"
        client = EntsoeClient(fixtures_dir=fixtures, cache_dir=cache_dir)
        first = client.fetch(_req())
        (fixtures / _req().fixture_name()).unlink()  # force cache-only path
        second = client.fetch(_req())
        assert second.source == "cache"
        assert second.to_json().replace('"cache"', '"fixture"') == first.to_json()

    def test_roundtrip_value_exact(self, rng):
        idx = pd.date_range(DAY[0], periods=5, freq="h", tz="UTC")
        pts = [(ts, float(v)) for ts, v in zip(idx, rng.normal(size=5) * 1234.567)]
        s = RawSeries(_req(), pts, "MW", "live", fetched_at="2024-01-01T00:00:00")
        back = RawSeries.from_json(s.to_json())
        assert back.to_json() == s.to_json()
        assert back.points == s.points

    def test_atomic_write(self, tmp_path):
        cache = SeriesCache(tmp_path)
        s = RawSeries(_req(), [], "MW", "fixture")
        cache.put(s)
        assert not list(tmp_path.glob("*.tmp"))
        assert cache.get(_req()) is not None


class _NoNetwork:
    """Guard: any socket creation fails the test."""

    def __enter__(self):
        self._orig = socket.socket

        def boom(*a, **k):
            raise AssertionError("network access attempted in offline mode")

        socket.socket = boom
        return self

    def __exit__(self, *exc):
        socket.socket = self._orig


class TestOffline:
    def test_fixture_mode_performs_zero_network_operations(self, tmp_path):
        window = (_utc(2021, 6, 1), _utc(2021, 6, 3))
        write_fixture_bundle(tmp_path / "fx", window, seed=1)
        with _NoNetwork():
            client = EntsoeClient(fixtures_dir=tmp_path / "fx")
            manifest = snapshot(client, study_requests(window), tmp_path / "bundle")
        assert not manifest["incomplete"]
        assert len(manifest["series"]) == 44

    def test_missing_fixture_is_clear_error(self, tmp_path):
        client = EntsoeClient(fixtures_dir=tmp_path)
        with pytest.raises(FixtureMissingError):
            client.fetch(_req())
        with pytest.raises(FixtureMissingError):
            EntsoeClient(offline=True).fetch(_req())


class TestLiveTransport:
    def test_auth_failure(self):
        client = EntsoeClient(token="t", transport=lambda url, p: (401, b""))
        with pytest.raises(AuthError):
            client.fetch(_req())
        with pytest.raises(AuthError):
            EntsoeClient(token=None, transport=lambda url, p: (200, b"")).fetch(_req())

    def test_rate_limit_retries_then_gives_up(self):
        calls = []
        sleeps = []

        def transport(url, params):
            calls.append(params)
            return 429, b""

        client = EntsoeClient(token="t", transport=transport, max_retries=3,
                              sleeper=sleeps.append)
        with pytest.raises(RateLimitError):
            client.fetch(_req())
        assert len(calls) == 3
        assert sleeps == [1.0, 2.0]  # bounded exponential backoff

    def test_rate_limit_then_success(self, fixture_dir):
        _, series = fixture_dir
        doc = render_market_document(series, "MW").encode()
        state = {"n": 0}

        def transport(url, params):
            state["n"] += 1
            return (429, b"") if state["n"] == 1 else (200, doc)

        client = EntsoeClient(token="t", transport=transport, sleeper=lambda s: None)
        got = client.fetch(_req())
        assert got.source == "live" and len(got.points) == 24

    def test_empty_interval_flagged(self):
        ack = render_market_document(pd.Series(dtype=float), "MW").encode()
        client = EntsoeClient(token="t", transport=lambda url, p: (200, ack))
        got = client.fetch(_req())
        assert got.points == [] and not got.complete

    def test_chunked_requests_cover_window(self):
        seen = []

        def transport(url, params):
            seen.append((params["periodStart"], params["periodEnd"]))
            return 200, render_market_document(pd.Series(dtype=float), "MW").encode()

        window = (_utc(2021, 1, 1), _utc(2021, 8, 1))
        client = EntsoeClient(token="t", transport=transport, chunk_days=90)
        client.fetch(_req(window=window))
        assert len(seen) == 3
        assert seen[0][0] == "202101010000"


CSV_HEADER = ("Beginn;Ende;Grund der Massnahme;Richtung;Mittlere Leistung [MW];"
              "Massnahme;Anfordernder UENB;Betroffene Anlage;Grenzueberschreitend")


class TestRedispatchCsv:
    def test_documented_example_row(self):
        row = ("01.06.2021 10:00;01.06.2021 12:00;Strombedingter Redispatch;"
               "Wirkleistungseinspeisung reduzieren;150,5;Redispatch;"
               "TenneT TSO GmbH;Kraftwerk X;nein")
        records, rejects = parse_redispatch_csv(f"{CSV_HEADER}\n{row}".encode())
        assert rejects == []
        r = records[0]
        assert r.duration_hours == 2.0
        assert r.direction == "decrease"
        assert r.power_mw == 150.5
        assert r.start == _utc(2021, 6, 1, 8)  # CEST is UTC+2
        assert r.requesting_tsos == frozenset({"tennet"}) and r.domestic_request

    def test_fall_back_day_maps_25_distinct_utc_hours(self):
        # 31 Oct 2021: 02:00 happens twice; A/B disambiguate
        lines = [CSV_HEADER]
        local_hours = (["31.10.2021 0%d:00" % h for h in range(2)]
                       + ["31.10.2021 02:00A", "31.10.2021 02:00B"]
                       + ["31.10.2021 0%d:00" % h for h in range(3, 10)]
                       + ["31.10.2021 %d:00" % h for h in range(10, 24)])
        assert len(local_hours) == 25
        for i, t in enumerate(local_hours):
            end = "01.11.2021 00:30" if t.startswith("31.10.2021 23") else "31.10.2021 23:30"
            lines.append(f"{t};{end};Strombedingter Redispatch;"
                         f"Wirkleistungseinspeisung erhoehen;10,0;Redispatch;Amprion GmbH;;nein")
        records, rejects = parse_redispatch_csv("\n".join(lines).encode())
        assert rejects == []
        starts = {r.start for r in records}
        assert len(starts) == 25

    def test_spring_forward_nonexistent_time_rejected(self):
        row = ("28.03.2021 02:30;28.03.2021 04:00;Strombedingter Redispatch;"
               "Wirkleistungseinspeisung reduzieren;10,0;Redispatch;Amprion;;nein")
        records, rejects = parse_redispatch_csv(f"{CSV_HEADER}\n{row}".encode())
        assert records == [] and len(rejects) == 1

    def test_empty_file_with_header(self):
        records, rejects = parse_redispatch_csv(CSV_HEADER.encode())
        assert records == [] and rejects == []

    def test_missing_mandatory_column(self):
        with pytest.raises(SchemaMismatchError):
            parse_redispatch_csv(b"Beginn;Ende\n")

    def test_energy_column_converted_to_power(self):
        header = CSV_HEADER.replace("Mittlere Leistung [MW]", "Gesamte Arbeit [MWh]")
        row = ("01.06.2021 10:00;01.06.2021 12:00;Strombedingter Redispatch;"
               "Wirkleistungseinspeisung reduzieren;301,0;Redispatch;TenneT;;nein")
        records, rejects = parse_redispatch_csv(f"{header}\n{row}".encode())
        assert rejects == []
        assert records[0].power_mw == pytest.approx(150.5)

    def test_bad_rows_collected_not_fatal(self):
        rows = [
            CSV_HEADER,
            "01.06.2021 10:00;01.06.2021 12:00;Strombedingter Redispatch;"
            "Wirkleistungseinspeisung reduzieren;150,5;Redispatch;TenneT;;nein",
            "banana;01.06.2021 12:00;Strombedingter Redispatch;"
            "Wirkleistungseinspeisung reduzieren;1,0;Redispatch;TenneT;;nein",
            "01.06.2021 10:00;01.06.2021 12:00;Strombedingter Redispatch;"
            "sideways;1,0;Redispatch;TenneT;;nein",
        ]
        records, rejects = parse_redispatch_csv("\n".join(rows).encode())
        assert len(records) == 1
        assert [r["row"] for r in rejects] == [3, 4]

    def test_writer_parser_roundtrip(self, tmp_path):
        window = (_utc(2021, 10, 30), _utc(2021, 11, 1))  # spans the DST fall-back
        records = random_intervention_records(80, window, seed=7)
        path = tmp_path / "rd.csv"
        write_redispatch_csv(records, path)
        back, rejects = parse_redispatch_csv(path.read_bytes())
        assert rejects == []
        assert len(back) == len(records)
        for a, b in zip(sorted(records, key=lambda r: (r.start, r.power_mw)),
                        sorted(back, key=lambda r: (r.start, r.power_mw))):
            assert a.start == b.start and a.end == b.end
            assert a.direction == b.direction and a.kind == b.kind
            assert a.power_mw == pytest.approx(b.power_mw, abs=5e-4)
            assert a.cross_border == b.cross_border

    def test_jsonl_alternative(self):
        line = json.dumps({
            "start": "2021-06-01T08:00:00Z", "end": "2021-06-01T10:00:00Z",
            "direction": "decrease", "power_mw": 150.5, "kind": "redispatch",
            "reason": "current", "requesting_tsos": ["tennet"],
        })
        records, rejects = parse_redispatch_jsonl(f"{line}\nnot json\n")
        assert len(records) == 1 and len(rejects) == 1
        assert records[0].domestic_request


class TestSnapshot:
    def test_manifest_hash_stable_and_idempotent(self, tmp_path):
        window = (_utc(2021, 6, 1), _utc(2021, 6, 2))
        write_fixture_bundle(tmp_path / "fx", window, seed=3)
        client = EntsoeClient(fixtures_dir=tmp_path / "fx")
        m1 = snapshot(client, study_requests(window), tmp_path / "b")
        raw_files = sorted(p.name for p in (tmp_path / "b" / "raw").iterdir())
        m2 = snapshot(client, study_requests(window), tmp_path / "b")
        assert m1 == m2
        assert sorted(p.name for p in (tmp_path / "b" / "raw").iterdir()) == raw_files
        assert not m1["incomplete"]

    def test_partial_failure_marks_incomplete(self, tmp_path):
        window = (_utc(2021, 6, 1), _utc(2021, 6, 2))
        write_fixture_bundle(tmp_path / "fx", window, seed=3)
        requests = study_requests(window)
        (tmp_path / "fx" / requests[0][1].fixture_name()).unlink()
        client = EntsoeClient(fixtures_dir=tmp_path / "fx")
        manifest = snapshot(client, requests, tmp_path / "b")
        assert manifest["incomplete"]
        assert len(manifest["gaps"]) == 1
        assert manifest["gaps"][0]["name"] == requests[0][0]
        assert len(manifest["series"]) == len(requests) - 1
