"""Sliding-window detection: windowing, threshold, stepping, labeling."""
import pytest

from aircontext.detect import DetectorParams, detect_events
from aircontext.fingerprint import featurize, step_counts
from aircontext.forest import RandomForest
from aircontext.model import ConfigError, EventRegistry, PacketKind, PacketRecord
from aircontext.presets import flat_rates
from aircontext.simulate import SimConfig, simulate


def pkt(ts, size, direction=0):
    return PacketRecord(ts, size, direction, 2, PacketKind.DATA, "dev", "hub")


def make_burst(t0, sizes, gap=0.05):
    return [pkt(t0 + i * gap, s) for i, s in enumerate(sizes)]


@pytest.fixture(scope="module")
def two_class():
    """A forest for two unmistakable burst shapes, via the real featurizer."""
    a = make_burst(0.0, (30, 35, 32))
    b = make_burst(0.0, (200, 210))
    samples = []
    for shift in range(8):
        samples.append((1, featurize(make_burst(shift * 10.0, (30, 35, 32)))))
        samples.append((2, featurize(make_burst(shift * 10.0, (200, 210)))))
    clf = RandomForest.train(samples, n_trees=10, seed=1)
    return clf


class TestParams:
    def test_validation(self):
        with pytest.raises(ConfigError):
            DetectorParams(max_packets=0)
        with pytest.raises(ConfigError):
            DetectorParams(window_seconds=0)
        with pytest.raises(ConfigError):
            DetectorParams(threshold=1.5)
        with pytest.raises(ConfigError):
            DetectorParams(step_counts={1: 0})

    def test_json_round_trip(self, tmp_path):
        p = DetectorParams(window_seconds=1.7, threshold=0.62,
                           step_counts={3: 4, 1: 2})
        path = str(tmp_path / "det.json")
        p.to_json(path)
        back = DetectorParams.from_json(path)
        assert back == p


class TestWindowing:
    def test_detects_isolated_bursts(self, two_class):
        trace = make_burst(5.0, (30, 35, 32)) + make_burst(50.0, (200, 210))
        params = DetectorParams(step_counts={1: 3, 2: 2})
        got = detect_events(trace, two_class, params)
        assert [(int(d.event), d.ts) for d in got] == [(1, 5.0), (2, 50.0)]
        assert [d.packet_span for d in got] == [(0, 2), (3, 4)]
        assert all(d.confidence > 0.7 for d in got)

    def test_step_skips_whole_burst(self, two_class):
        # Back-to-back same-type bursts: the step lands exactly on the
        # second burst's first packet.
        trace = make_burst(5.0, (30, 35, 32)) + make_burst(5.2, (30, 35, 32))
        params = DetectorParams(step_counts={1: 3, 2: 2})
        got = detect_events(trace, two_class, params)
        assert [(int(d.event), d.ts) for d in got] == [(1, 5.0), (1, 5.2)]

    def test_missing_step_entry_steps_by_window(self, two_class):
        trace = make_burst(5.0, (30, 35, 32))
        got = detect_events(trace, two_class, DetectorParams(step_counts={}))
        assert len(got) == 1
        assert got[0].packet_span == (0, 2)  # span covers the whole window

    def test_window_time_bound_inclusive(self, two_class):
        # Two packets exactly window_seconds apart belong to one window.
        trace = [pkt(0.0, 200), pkt(2.1, 210)]
        got = detect_events(trace, two_class, DetectorParams(step_counts={2: 2}))
        assert [(int(d.event), d.packet_span) for d in got] == [(2, (0, 1))]

    def test_threshold_strictly_greater(self, two_class):
        trace = make_burst(5.0, (30, 35, 32))
        sure = detect_events(trace, two_class, DetectorParams(threshold=0.99))
        # all 10 trees agree -> confidence exactly 1.0 > 0.99
        assert len(sure) == 1
        none = detect_events(trace, two_class, DetectorParams(threshold=1.0))
        assert none == []  # 1.0 is not strictly greater than 1.0

    def test_noise_frames_ignored(self, two_class):
        trace = make_burst(5.0, (30, 35, 32))
        noise = [PacketRecord(5.01, 12, 0, 0, PacketKind.ACK, "r", "h"),
                 PacketRecord(5.06, 40, 1, 0, PacketKind.BEACON, "h", "b")]
        merged = sorted(trace + noise, key=lambda p: p.ts)
        params = DetectorParams(step_counts={1: 3, 2: 2})
        assert detect_events(merged, two_class, params) == \
            detect_events(trace, two_class, params)

    def test_empty_trace(self, two_class):
        assert detect_events([], two_class, DetectorParams()) == []


class TestLabeling:
    def test_bare_labels_without_registry(self, two_class):
        got = detect_events(make_burst(1.0, (200, 210)), two_class,
                            DetectorParams(step_counts={2: 2}))
        assert got[0].event.label == "event-2"

    def test_registry_labels(self, two_class):
        reg = EventRegistry()
        reg.register("small_1", "motion.active")
        reg.register("big_1", "switch.on()")
        got = detect_events(make_burst(1.0, (200, 210)), two_class,
                            DetectorParams(step_counts={2: 2}), registry=reg)
        assert got[0].event.label == "big_1/switch.on()"


class TestOnSimulatedTraffic:
    def test_recovers_isolated_event_stream(self, testbed_corpus, small_forest):
        registry, templates = testbed_corpus
        clf, steps = small_forest
        cfg = SimConfig(duration=40000.0,
                        trigger_rates=flat_rates(registry, 0.0004),
                        seed=97, background_rate=0.02)
        packets, truth = simulate(templates, [], cfg)
        params = DetectorParams(step_counts=steps)
        got = detect_events(packets, clf, params, registry=registry)

        # greedy one-to-one match on (event id, |dt| <= 0.3)
        unmatched = list(truth)
        hits = 0
        for d in got:
            for k, (eid, t0, _) in enumerate(unmatched):
                if eid == int(d.event) and abs(t0 - d.ts) <= 0.3:
                    hits += 1
                    del unmatched[k]
                    break
        assert len(truth) >= 200
        assert hits / len(truth) >= 0.9
        assert (len(got) - hits) <= 0.02 * len(got)  # near-zero false alarms
