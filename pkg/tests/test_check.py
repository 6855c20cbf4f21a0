"""Compliance checking: graph match, classification, per-occurrence scan."""
import pytest

from aircontext.check import (
    AnomalyKind,
    AnomalyReport,
    CheckerParams,
    check_graphs,
    check_stream,
    classify_anomaly,
    match_graph,
)
from aircontext.mine import MinerParams, collect_pair_stats
from aircontext.model import (
    ConsistencyError,
    EventId,
    EventRegistry,
    EventTransitionGraph,
    GraphNode,
    GraphSource,
    path_graph,
)


def node(i):
    return GraphNode(EventId(i, f"event-{i}"))


def ctx(gid, ids):
    return path_graph(gid, GraphSource.IOT, [node(i) for i in ids])


def wctx(gid, ids, count=None):
    return path_graph(gid, GraphSource.WIRELESS, [node(i) for i in ids], count)


class TestMatchGraph:
    def test_exact_match_ignores_node_order(self):
        mined = EventTransitionGraph("w", GraphSource.WIRELESS,
                                     [node(2), node(1)], [(1, 2)])
        assert match_graph(mined, [ctx("rule-a", [1, 2])]) == "rule-a"

    def test_different_edges_do_not_match(self):
        mined = wctx("w", [2, 1])  # reversed direction
        assert match_graph(mined, [ctx("rule-a", [1, 2])]) is None

    def test_subset_nodes_do_not_match(self):
        assert match_graph(wctx("w", [1, 2]), [ctx("rule-a", [1, 2, 3])]) is None

    def test_registry_consistency_enforced(self):
        reg = EventRegistry()
        reg.register("a", "motion.active")
        with pytest.raises(ConsistencyError):
            match_graph(wctx("w", [1, 9]), [ctx("rule-a", [1])], registry=reg)


class TestClassifyAnomaly:
    CONTEXTS = [ctx("rule-a", [1, 2, 3])]

    def test_suffix_means_spoofed_trigger(self):
        rep = classify_anomaly(wctx("w", [2, 3]), self.CONTEXTS, ts=7.0)
        assert rep.kind is AnomalyKind.SPOOFING
        assert rep.matched_context == "rule-a"
        assert [e.id for e in rep.missing_events] == [1]
        assert rep.ts == 7.0

    def test_prefix_means_missing_action(self):
        rep = classify_anomaly(wctx("w", [1, 2]), self.CONTEXTS)
        assert rep.kind is AnomalyKind.MISBEHAVIOR
        assert [e.id for e in rep.missing_events] == [3]

    def test_extension_means_overprivilege(self):
        rep = classify_anomaly(wctx("w", [1, 2, 3, 4]), self.CONTEXTS)
        assert rep.kind is AnomalyKind.OVERPRIVILEGE
        assert [e.id for e in rep.extra_events] == [4]

    def test_unrelated_is_unknown(self):
        rep = classify_anomaly(wctx("w", [8, 9]), self.CONTEXTS)
        assert rep.kind is AnomalyKind.UNKNOWN
        assert rep.matched_context is None

    def test_priority_spoofing_over_misbehavior(self):
        contexts = [ctx("long", [5, 1, 2]), ctx("short", [1, 2, 9])]
        rep = classify_anomaly(wctx("w", [1, 2]), contexts)
        assert rep.kind is AnomalyKind.SPOOFING  # suffix reading outranks prefix
        assert rep.matched_context == "long"

    def test_and_join_roots_compare_sorted(self):
        join = EventTransitionGraph("j", GraphSource.IOT,
                                    [node(7), node(2), node(3)],
                                    [(7, 3), (2, 3)])
        rep = classify_anomaly(wctx("w", [3]), [join])
        assert rep.kind is AnomalyKind.SPOOFING
        assert [e.id for e in rep.missing_events] == [2, 7]

    def test_report_validation(self):
        with pytest.raises(ValueError):
            AnomalyReport(AnomalyKind.SPOOFING, wctx("w", [1]), "g", (), (), 0.0)
        with pytest.raises(ValueError):
            AnomalyReport(AnomalyKind.OVERPRIVILEGE, wctx("w", [1]), "g", (), (), 0.0)


class TestCheckGraphs:
    def test_only_unmatched_graphs_reported(self):
        contexts = [ctx("rule-a", [1, 2]), ctx("rule-b", [3, 4])]
        wireless = [wctx("w1", [1, 2]), wctx("w2", [4])]
        reports = check_graphs(wireless, contexts)
        assert len(reports) == 1
        assert reports[0].kind is AnomalyKind.SPOOFING
        assert reports[0].ts == 0.0


class TestCheckStreamClean:
    def test_full_occurrences_consume_silently(self):
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (1, 30.0), (2, 30.6)]
        assert check_stream(stream, contexts) == []

    def test_unmodeled_events_ignored(self):
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (9, 3.0), (9, 8.0)]
        assert check_stream(stream, contexts) == []

    def test_and_join_within_window(self):
        join = EventTransitionGraph("j", GraphSource.IOT,
                                    [node(1), node(2), node(3)],
                                    [(1, 3), (2, 3)])
        stream = [(1, 0.0), (2, 1.5), (3, 2.2)]
        assert check_stream(stream, [join]) == []


class TestCheckStreamOverprivilege:
    def _registry(self):
        reg = EventRegistry()
        reg.register("sensor_1", "contact.open")   # 1
        reg.register("outlet_1", "switch.on()")    # 2
        reg.register("siren_1", "alarm.siren()")   # 3
        return reg

    def test_trailing_command_reported(self):
        reg = self._registry()
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (3, 1.2)]
        reports = check_stream(stream, contexts, registry=reg)
        assert len(reports) == 1
        rep = reports[0]
        assert rep.kind is AnomalyKind.OVERPRIVILEGE
        assert rep.matched_context == "rule-a"
        assert [e.id for e in rep.extra_events] == [3]
        assert rep.ts == 1.2
        assert [n.event.id for n in rep.wireless_graph.nodes] == [1, 2, 3]

    def test_trailing_sensor_event_not_linked(self):
        reg = self._registry()
        reg.register("sensor_2", "water.wet")  # 4: an attribute, not a command
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (4, 1.2)]
        assert check_stream(stream, contexts, registry=reg) == []

    def test_without_registry_nothing_extends(self):
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (3, 1.2)]
        assert check_stream(stream, contexts) == []

    def test_beyond_extension_window_not_linked(self):
        reg = self._registry()
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (3, 1.6)]  # 1.1 s after completion end
        assert check_stream(stream, contexts, registry=reg) == []

    def test_repeated_member_falls_back_to_matched_shape(self):
        reg = self._registry()
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (2, 1.2)]  # the rule's own command again
        reports = check_stream(stream, contexts, registry=reg)
        assert len(reports) == 1
        rep = reports[0]
        assert rep.kind is AnomalyKind.OVERPRIVILEGE
        assert [n.event.id for n in rep.wireless_graph.nodes] == [1, 2]
        assert [e.id for e in rep.extra_events] == [2]

    def test_chained_trailing_commands(self):
        reg = self._registry()
        reg.register("lock_1", "lock.lock()")  # 4
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 0.5), (3, 1.2), (4, 2.0)]
        reports = check_stream(stream, contexts, registry=reg)
        assert [(r.kind, r.ts) for r in reports] == \
            [(AnomalyKind.OVERPRIVILEGE, 1.2), (AnomalyKind.OVERPRIVILEGE, 2.0)]


class TestCheckStreamLeftovers:
    CONTEXTS = [ctx("rule-a", [1, 2, 3])]

    def test_suffix_run_is_spoofing(self):
        stream = [(2, 5.0), (3, 5.6)]
        reports = check_stream(stream, self.CONTEXTS)
        assert len(reports) == 1
        rep = reports[0]
        assert rep.kind is AnomalyKind.SPOOFING
        assert [e.id for e in rep.missing_events] == [1]
        assert rep.ts == 5.0
        assert rep.matched_context == "rule-a"

    def test_prefix_run_is_misbehavior(self):
        stream = [(1, 5.0), (2, 5.6)]
        reports = check_stream(stream, self.CONTEXTS)
        assert len(reports) == 1
        assert reports[0].kind is AnomalyKind.MISBEHAVIOR
        assert [e.id for e in reports[0].missing_events] == [3]

    def test_middle_run_is_unknown(self):
        stream = [(2, 5.0)]
        reports = check_stream(stream, self.CONTEXTS)
        assert len(reports) == 1
        assert reports[0].kind is AnomalyKind.UNKNOWN
        assert [e.id for e in reports[0].missing_events] == [1, 3]

    def test_late_full_occurrence_not_reported(self):
        # leftovers that reassemble into the whole pattern are clean
        contexts = [ctx("rule-a", [1, 2]), ctx("rule-b", [2, 9])]
        # event 9 missing entirely: phase 1 skips rule-b, but the leftover
        # scan still finds 1 followed by 2 = all of rule-a
        stream = [(1, 0.0), (2, 0.5)]
        assert check_stream(stream, contexts) == []

    def test_reports_sorted_by_time(self):
        stream = [(2, 5.0), (3, 5.6), (1, 40.0), (2, 40.6)]
        reports = check_stream(stream, self.CONTEXTS)
        assert [r.ts for r in reports] == [5.0, 40.0]
        assert [r.kind for r in reports] == \
            [AnomalyKind.SPOOFING, AnomalyKind.MISBEHAVIOR]


class TestStatsWindows:
    def test_mined_stats_prevent_cross_occurrence_pairing(self):
        contexts = [ctx("rule-a", [1, 2])]
        # 40 well-behaved firings teach the 0.5 s gap, then one broken firing
        # (missing action) right before a healthy one; the orphan steals one
        # 3.5 s pairing but cannot drag the mean out of the healthy band
        stream = []
        t = 0.0
        for k in range(40):
            stream += [(1, t), (2, t + 0.5)]
            t += 20.0 + 1.3 * (k % 3)
        stream += [(1, 1000.0), (1, 1003.0), (2, 1003.5)]
        stats = collect_pair_stats(stream, MinerParams(tau=0.1, min_support=3))

        with_stats = check_stream(stream, contexts, stats=stats)
        assert [(r.kind, r.ts) for r in with_stats] == \
            [(AnomalyKind.MISBEHAVIOR, 1000.0)]

        # fallback windows are loose: the orphan trigger steals the later
        # action and the report lands on the wrong occurrence
        without = check_stream(stream, contexts)
        assert [(r.kind, r.ts) for r in without] == \
            [(AnomalyKind.MISBEHAVIOR, 1003.0)]

    def test_custom_fallback_gap(self):
        contexts = [ctx("rule-a", [1, 2])]
        stream = [(1, 0.0), (2, 8.0)]
        tight = CheckerParams(fallback_gap=5.0)
        reports = check_stream(stream, contexts, params=tight)
        kinds = [r.kind for r in reports]
        assert AnomalyKind.MISBEHAVIOR in kinds  # gap 8 exceeds the 5 s link
