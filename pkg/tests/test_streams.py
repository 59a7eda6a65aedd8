"""Tests for the NDJSON stream file format and truth annotations."""

import json

import numpy as np
import pytest

from glovespot import SensorFrame, StreamOrderError, TruthTag, read_stream, write_stream
from glovespot.streams import frame_to_obj, obj_to_frame


def frames_with_truth(count=5):
    items = []
    for t in range(count):
        f = SensorFrame(t=t, sensors=np.full(22, t / 10), button=t % 2 == 0)
        truth = TruthTag.hold("G1") if t < 3 else TruthTag.transition("G1", "G2")
        items.append((f, truth))
    return items


class TestTruthTag:
    def test_text_forms(self):
        assert TruthTag.warmup().text == "warmup"
        assert TruthTag.hold("G5").text == "hold:G5"
        assert TruthTag.transition("G5", "G6").text == "transition:G5>G6"

    def test_parse_round_trip(self):
        for tag in (TruthTag.warmup(), TruthTag.hold("G10"), TruthTag.transition("G6", "G7")):
            assert TruthTag.parse(tag.text) == tag

    def test_parse_errors(self):
        for bad in ("", "hold", "transition:G5", "transition:G5-G6", "idle"):
            with pytest.raises(ValueError):
                TruthTag.parse(bad)

    def test_construction_errors(self):
        with pytest.raises(ValueError):
            TruthTag("hold")
        with pytest.raises(ValueError):
            TruthTag("transition", "G5")
        with pytest.raises(ValueError):
            TruthTag("nonsense")


class TestFrameObjects:
    def test_round_trip(self):
        f = SensorFrame(t=3, sensors=np.linspace(0, 1, 22), button=True)
        obj = frame_to_obj(f, TruthTag.hold("G2"))
        g, truth = obj_to_frame(obj)
        assert g.t == 3 and g.button is True
        np.testing.assert_array_equal(g.sensors, f.sensors)
        assert truth == TruthTag.hold("G2")

    def test_truth_optional(self):
        f = SensorFrame(t=0, sensors=np.zeros(22))
        obj = frame_to_obj(f)
        assert "truth" not in obj
        _, truth = obj_to_frame(obj)
        assert truth is None

    def test_missing_fields(self):
        with pytest.raises(ValueError):
            obj_to_frame({"t": 0})
        with pytest.raises(ValueError):
            obj_to_frame([1, 2])


class TestStreamFiles:
    def test_round_trip(self, tmp_path):
        items = frames_with_truth()
        path = tmp_path / "session.ndjson"
        count = write_stream(path, items)
        assert count == len(items)
        loaded = read_stream(path)
        assert len(loaded) == len(items)
        for (f0, t0), (f1, t1) in zip(items, loaded):
            assert f0.t == f1.t and f0.button == f1.button and t0 == t1
            np.testing.assert_array_equal(f0.sensors, f1.sensors)

    def test_one_json_object_per_line(self, tmp_path):
        path = tmp_path / "s.ndjson"
        write_stream(path, frames_with_truth(3))
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 3
        for line in lines:
            obj = json.loads(line)
            assert set(obj) <= {"t", "sensors", "button", "truth"}

    def test_order_violation(self, tmp_path):
        path = tmp_path / "bad.ndjson"
        f = SensorFrame(t=0, sensors=np.zeros(22))
        lines = [json.dumps(frame_to_obj(f)), json.dumps(frame_to_obj(f))]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(StreamOrderError):
            read_stream(path)

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "bad.ndjson"
        path.write_text('{"t": 0, "sensors": ' + "\n")
        with pytest.raises(ValueError, match="bad.ndjson:1"):
            read_stream(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "s.ndjson"
        f = SensorFrame(t=0, sensors=np.zeros(22))
        path.write_text(json.dumps(frame_to_obj(f)) + "\n\n")
        assert len(read_stream(path)) == 1
