import json
import logging

import numpy as np
import pytest

from graft import Event, GraftError, HeteroGraph, accumulate, parse_events, snapshot_series


def line(ts, attrs):
    return json.dumps({"ts": ts, "attrs": attrs})


class TestParseEvents:
    def test_parses_valid_stream(self):
        evs = parse_events([line(5, {"process": "p1", "file": "f1"}), ""])
        assert evs == [Event(5, {"process": "p1", "file": "f1"})]

    @pytest.mark.parametrize(
        "text,msg",
        [
            ("{not json", "record 1: invalid JSON"),
            ('{"ts": 1}', "exactly the keys"),
            ('{"ts": 1, "attrs": {}, "x": 2}', "exactly the keys"),
            ('{"ts": 1.5, "attrs": {}}', "integer"),
            ('{"ts": true, "attrs": {}}', "integer"),
            ('{"ts": 1, "attrs": []}', "object mapping"),
            ('{"ts": 1, "attrs": {"": "x"}}', "non-empty"),
            ('{"ts": 1, "attrs": {"t": ""}}', "non-empty"),
            ('{"ts": 1, "attrs": {"t": "a b"}}', "whitespace"),
            ('{"ts": 1, "attrs": {"t": 3}}', "non-empty strings"),
        ],
    )
    def test_malformed_records_rejected(self, text, msg):
        with pytest.raises(GraftError, match=msg):
            parse_events([text])

    def test_error_reports_record_index(self):
        good = line(1, {"a": "x", "b": "y"})
        with pytest.raises(GraftError, match="record 3"):
            parse_events([good, good, "{bad"])


class TestAccumulate:
    def test_counts_cooccurrences(self):
        evs = parse_events(
            [
                line(1, {"process": "p1", "file": "f1"}),
                line(2, {"process": "p1", "file": "f1"}),
                line(3, {"process": "p1", "file": "f2"}),
            ]
        )
        g = accumulate(evs)
        assert g.entity_ids == ("f1", "f2", "p1")
        assert g.edge_weight("f1", "p1") == 2.0
        assert g.edge_weight("f2", "p1") == 1.0

    def test_clique_expansion_per_event(self):
        g = accumulate([Event(1, {"a": "x", "b": "y", "c": "z"})])
        assert g.edge_count == 3

    def test_single_attribute_skipped_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="graft.ingest"):
            g = accumulate([Event(1, {"a": "x"}), Event(2, {"a": "x", "b": "y"})])
        assert g.edge_count == 1
        assert "skipped 1" in caplog.text

    def test_type_conflict_rejected(self):
        with pytest.raises(GraftError, match="conflicting types"):
            accumulate([Event(1, {"a": "x", "b": "y"}), Event(2, {"c": "x", "b": "y"})])

    def test_empty_stream(self):
        assert accumulate([]).n == 0


class TestSnapshotSeries:
    def test_three_windows_monotone(self):
        day = 86_400_000
        evs = [
            Event(0 * day, {"a": "x", "b": "y"}),
            Event(1 * day, {"a": "x", "b": "z"}),
            Event(2 * day, {"a": "w", "b": "z"}),
        ]
        snaps = snapshot_series(evs, day)
        assert len(snaps) == 3
        counts = [s.edge_count for s in snaps]
        assert counts == sorted(counts)
        assert snaps[-1] == accumulate(evs)

    def test_window_larger_than_span(self):
        evs = [Event(0, {"a": "x", "b": "y"}), Event(10, {"a": "x", "b": "z"})]
        snaps = snapshot_series(evs, 1_000_000)
        assert snaps == [accumulate(evs)]

    def test_snapshots_equal_prefix_accumulation(self):
        rng = np.random.default_rng(17)
        evs = [
            Event(int(rng.integers(0, 50)), {"p": f"p{rng.integers(3)}", "f": f"f{rng.integers(4)}"})
            for _ in range(40)
        ]
        window = 9
        snaps = snapshot_series(evs, window)
        ordered = sorted(evs, key=lambda e: e.ts)
        start = ordered[0].ts
        for k, snap in enumerate(snaps, 1):
            prefix = [e for e in ordered if e.ts < start + k * window]
            assert snap == accumulate(prefix)

    def test_ties_belong_to_earlier_window(self):
        evs = [Event(0, {"a": "x", "b": "y"}), Event(5, {"a": "x", "b": "z"})]
        # boundary at 5 is exclusive, so the second event lands in window 2
        snaps = snapshot_series(evs, 5)
        assert snaps[0].edge_count == 1
        assert snaps[1].edge_count == 2

    def test_empty_stream_yields_one_empty_graph(self):
        snaps = snapshot_series([], 10)
        assert len(snaps) == 1 and snaps[0].n == 0

    @pytest.mark.parametrize("window", [0, -5, 2.5])
    def test_bad_window_rejected(self, window):
        with pytest.raises(GraftError, match="window"):
            snapshot_series([], window)
