"""Tests for template sampling, the confusable triplet, stream generation,
and non-gesture harvesting."""

import numpy as np
import pytest

from glovespot import (
    GenerationError,
    HarvestError,
    ScenarioScript,
    ScriptStep,
    generate_stream,
    harvest_non_gestures,
    load_script,
    load_templates,
    make_confusable_triplet,
    make_templates,
    save_script,
    save_templates,
)
from glovespot.synth import transition_segments

SEED = 26  # known to admit the 5-6-7 triplet at both library sizes


def triplet_templates(count=10):
    return make_confusable_triplet(make_templates(count, seed=SEED), 5, 6, 7, 0.2)


def simple_script(**kw):
    defaults = dict(
        steps=(ScriptStep("G5", 10), ScriptStep("G6", 10)),
        transition_frames=(20, 20),
        noise_sigma=0.0,
        seed=3,
    )
    defaults.update(kw)
    return ScenarioScript(**defaults)


class TestMakeTemplates:
    def test_pairwise_separation(self):
        templates = make_templates(10, seed=1)
        assert len(templates) == 10
        poses = [t.pose for t in templates]
        for i in range(10):
            for j in range(i + 1, 10):
                assert np.linalg.norm(poses[i] - poses[j]) >= 1.5

    def test_thirty_templates(self):
        assert len(make_templates(30, seed=SEED)) == 30

    def test_single_template(self):
        templates = make_templates(1, seed=0)
        assert templates[0].label == 1 and templates[0].name == "G1"

    def test_deterministic(self):
        a = make_templates(5, seed=9)
        b = make_templates(5, seed=9)
        for ta, tb in zip(a, b):
            assert np.array_equal(ta.pose, tb.pose)

    def test_infeasible_separation(self):
        with pytest.raises(GenerationError, match="smaller"):
            make_templates(10, seed=0, min_separation=5.0)

    def test_bad_args(self):
        with pytest.raises(GenerationError):
            make_templates(0, seed=0)
        with pytest.raises(GenerationError):
            make_templates(3, seed=0, min_separation=0.0)


class TestConfusableTriplet:
    def test_distance_to_midpoint(self):
        templates = triplet_templates()
        mid = 0.5 * (templates[4].pose + templates[5].pose)
        assert np.linalg.norm(mid - templates[6].pose) == pytest.approx(0.2, abs=1e-12)

    def test_zero_tightness_lands_on_midpoint(self):
        templates = make_confusable_triplet(make_templates(10, seed=SEED), 5, 6, 7, 0.0)
        mid = 0.5 * (templates[4].pose + templates[5].pose)
        np.testing.assert_allclose(templates[6].pose, mid, atol=1e-15)

    def test_other_templates_untouched(self):
        base = make_templates(10, seed=SEED)
        moved = make_confusable_triplet(base, 5, 6, 7, 0.2)
        for i in range(10):
            if i != 6:
                assert np.array_equal(base[i].pose, moved[i].pose)

    def test_transition_midpoint_nearest_is_third(self):
        templates = triplet_templates()
        stream = generate_stream(simple_script(), templates)
        trans = [i for i, tag in enumerate(stream.truth) if tag.kind == "transition"]
        mid_frame = stream.frames[trans[len(trans) // 2]]
        dists = [np.linalg.norm(mid_frame.sensors - t.pose) for t in templates]
        assert int(np.argmin(dists)) == 6  # G7

    def test_separation_violation_raises(self):
        # seed 1 is known to break min_separation on relocation
        with pytest.raises(GenerationError):
            make_confusable_triplet(make_templates(10, seed=1), 5, 6, 7, 0.2)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(GenerationError):
            make_confusable_triplet(make_templates(10, seed=SEED), 5, 5, 7, 0.2)

    def test_tightness_bounds(self):
        templates = make_templates(10, seed=SEED)
        gap = np.linalg.norm(templates[4].pose - templates[5].pose)
        with pytest.raises(GenerationError):
            make_confusable_triplet(templates, 5, 6, 7, gap)


class TestGenerateStream:
    def test_single_step_noiseless_equals_pose(self):
        templates = make_templates(3, seed=2)
        script = ScenarioScript(steps=(ScriptStep("G2", 15),), noise_sigma=0.0, seed=0)
        stream = generate_stream(script, templates)
        assert len(stream) == 15
        for f, tag in zip(stream.frames, stream.truth):
            assert tag.text == "hold:G2"
            np.testing.assert_array_equal(f.sensors, templates[1].pose)

    def test_fixed_transition_length(self):
        stream = generate_stream(simple_script(), triplet_templates())
        kinds = [tag.kind for tag in stream.truth]
        assert kinds.count("transition") == 20
        assert len(stream) == 10 + 20 + 10

    def test_frame_indices_consecutive(self):
        stream = generate_stream(simple_script(noise_sigma=0.01), triplet_templates())
        assert [f.t for f in stream.frames] == list(range(len(stream)))

    def test_deterministic(self):
        templates = triplet_templates()
        a = generate_stream(simple_script(noise_sigma=0.02), templates)
        b = generate_stream(simple_script(noise_sigma=0.02), templates)
        for fa, fb in zip(a.frames, b.frames):
            assert np.array_equal(fa.sensors, fb.sensors)

    def test_transition_frames_on_segment(self):
        templates = triplet_templates()
        stream = generate_stream(simple_script(), templates)
        a, b = templates[4].pose, templates[5].pose
        direction = b - a
        for f, tag in zip(stream.frames, stream.truth):
            if tag.kind != "transition":
                continue
            # residual after projecting onto the segment direction
            rel = f.sensors - a
            coef = rel @ direction / (direction @ direction)
            assert 0.0 < coef < 1.0
            assert np.linalg.norm(rel - coef * direction) < 1e-12

    def test_noise_stays_in_unit_range(self):
        stream = generate_stream(simple_script(noise_sigma=0.5, seed=11), triplet_templates())
        for f in stream.frames:
            assert np.all(f.sensors >= 0.0) and np.all(f.sensors <= 1.0)

    def test_repetitions_multiply_holds(self):
        script = simple_script(repetitions=3)
        stream = generate_stream(script, triplet_templates())
        holds = [tag.label for i, tag in enumerate(stream.truth)
                 if tag.kind == "hold" and (i == 0 or stream.truth[i - 1] != tag)]
        assert holds == ["G5", "G6"] * 3

    def test_button_plan(self):
        script = simple_script(button_plan=(True, False))
        stream = generate_stream(script, triplet_templates())
        for f, tag in zip(stream.frames, stream.truth):
            if tag.kind == "hold":
                assert f.button is (tag.label == "G5")
            else:
                assert f.button is True  # carried from the G5 step

    def test_unknown_label(self):
        with pytest.raises(GenerationError, match="G9"):
            generate_stream(simple_script(steps=(ScriptStep("G9", 5),)), make_templates(3, seed=2))

    def test_transition_duration_range_respected(self):
        script = simple_script(transition_frames=(5, 15), repetitions=20, noise_sigma=0.0, seed=13)
        stream = generate_stream(script, triplet_templates())
        for _, _, first, last in transition_segments(stream):
            assert 5 <= last - first + 1 <= 15


class TestScriptValidation:
    def test_bad_hold(self):
        with pytest.raises(ValueError):
            ScriptStep("G1", 0)

    def test_bad_transition_range(self):
        with pytest.raises(ValueError):
            simple_script(transition_frames=(0, 10))
        with pytest.raises(ValueError):
            simple_script(transition_frames=(10, 5))

    def test_bad_sigma_and_reps(self):
        with pytest.raises(ValueError):
            simple_script(noise_sigma=-0.1)
        with pytest.raises(ValueError):
            simple_script(repetitions=0)

    def test_button_plan_length(self):
        with pytest.raises(ValueError):
            simple_script(button_plan=(True,))

    def test_empty_steps(self):
        with pytest.raises(ValueError):
            ScenarioScript(steps=())


class TestHarvest:
    def make_stream(self):
        script = ScenarioScript(
            steps=(ScriptStep("G5", 10), ScriptStep("G6", 10), ScriptStep("G7", 10)),
            transition_frames=(20, 20),
            noise_sigma=0.0,
            repetitions=2,
            seed=3,
        )
        return generate_stream(script, triplet_templates())

    def test_class_assignment(self):
        harvested = harvest_non_gestures(self.make_stream(), [("G5", "G6", 2), ("G6", "G7", 1)], lag=3)
        classes = sorted(set(c for _, c in harvested))
        assert classes == [1, 2, 3]
        # 2 reps of G5->G6 x 2 positions + 2 reps of G6->G7 x 1 position
        assert len(harvested) == 6
        for feat, _ in harvested:
            assert feat.shape == (44,)

    def test_single_count_picks_midpoint(self):
        stream = self.make_stream()
        harvested = harvest_non_gestures(stream, [("G6", "G7", 1)], lag=1, samples_per_transition=1)
        seg = [s for s in transition_segments(stream) if s[0] == "G6"][0]
        _, _, first, last = seg
        mid = first + (last - first) // 2
        expected = np.concatenate([stream.frames[mid - 1].sensors, stream.frames[mid].sensors])
        np.testing.assert_array_equal(harvested[0][0], expected)

    def test_lag_pairing_uses_stream_frames(self):
        stream = self.make_stream()
        harvested = harvest_non_gestures(stream, [("G5", "G6", 2)], lag=3, samples_per_transition=1)
        segs = [s for s in transition_segments(stream) if s[0] == "G5"]
        first, last = segs[0][2], segs[0][3]
        length = last - first + 1
        for i, (feat, cls) in enumerate(harvested):
            pos = first + ((length - 1) * (i + 1)) // 3
            np.testing.assert_array_equal(feat[22:], stream.frames[pos].sensors)
            np.testing.assert_array_equal(feat[:22], stream.frames[pos - 3].sensors)

    def test_missing_transition(self):
        with pytest.raises(HarvestError, match="G6->G5"):
            harvest_non_gestures(self.make_stream(), [("G6", "G5", 1)], lag=1)

    def test_samples_cap(self):
        harvested = harvest_non_gestures(self.make_stream(), [("G5", "G6", 1)], lag=1,
                                         samples_per_transition=1)
        assert len(harvested) == 1

    def test_midpoint_feature_confused_with_third(self):
        templates = triplet_templates()
        stream = self.make_stream()
        harvested = harvest_non_gestures(stream, [("G5", "G6", 1)], lag=1, samples_per_transition=1)
        now = harvested[0][0][22:]
        dists = [np.linalg.norm(now - t.pose) for t in templates]
        assert int(np.argmin(dists)) == 6  # G7 is the false-alarm magnet


class TestFileFormats:
    def test_template_round_trip(self, tmp_path):
        templates = triplet_templates()
        path = tmp_path / "templates.json"
        save_templates(templates, path, seed=SEED, min_separation=1.5)
        loaded = load_templates(path)
        assert len(loaded) == len(templates)
        for a, b in zip(templates, loaded):
            assert a.label == b.label and a.name == b.name
            np.testing.assert_array_equal(a.pose, b.pose)

    def test_script_round_trip(self, tmp_path):
        script = ScenarioScript(
            steps=(ScriptStep("G8", 30), ScriptStep("G2", 25)),
            transition_frames=(10, 30),
            noise_sigma=0.01,
            repetitions=100,
            seed=42,
            button_plan=(True, False),
        )
        path = tmp_path / "script.json"
        save_script(script, path)
        assert load_script(path) == script

    def test_bad_template_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{notjson")
        with pytest.raises(GenerationError):
            load_templates(path)

    def test_generated_stream_serializes(self, tmp_path):
        from glovespot import read_stream, write_stream

        stream = generate_stream(simple_script(noise_sigma=0.01), triplet_templates())
        path = tmp_path / "stream.ndjson"
        write_stream(path, stream.items())
        loaded = read_stream(path)
        assert len(loaded) == len(stream)
        assert loaded[0][1].text == "hold:G5"
