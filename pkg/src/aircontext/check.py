"""Context checking: match mined behavior against expected app graphs and
classify what does not line up.

Two tiers. Graph level: a mined wireless graph either matches a context
graph exactly (same node ids, same edges) or is classified by the prefix/
suffix rules. Occurrence level: the event stream is segmented into complete
occurrences of the context graphs, trailing command events hanging off a
completed occurrence become overprivilege, and leftovers classify by rule
order: observed-suffix-of-context means a spoofed action (trigger never
happened), observed-prefix means a dead action (misbehavior or device
failure), anything else is an unknown mismatch. A single bad firing among
hundreds of good ones is therefore still reported, with its timestamp.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .mine import MinerParams, PairStats
from .model import (
    CapabilityVocabulary,
    ConsistencyError,
    EventId,
    EventRegistry,
    EventTransitionGraph,
    GraphNode,
    GraphShape,
    GraphSource,
    path_graph,
)

log = logging.getLogger(__name__)


class AnomalyKind(str, enum.Enum):
    SPOOFING = "event_spoofing"
    MISBEHAVIOR = "misbehavior_or_device_failure"
    OVERPRIVILEGE = "overprivilege"
    UNKNOWN = "unknown_mismatch"


_PRIORITY = {AnomalyKind.SPOOFING: 0, AnomalyKind.MISBEHAVIOR: 1,
             AnomalyKind.OVERPRIVILEGE: 2, AnomalyKind.UNKNOWN: 3}


@dataclass(frozen=True)
class AnomalyReport:
    kind: AnomalyKind
    wireless_graph: EventTransitionGraph
    matched_context: str | None
    missing_events: tuple[EventId, ...]
    extra_events: tuple[EventId, ...]
    ts: float  # occurrence time; 0.0 for graph-level reports

    def __post_init__(self):
        if self.kind in (AnomalyKind.SPOOFING, AnomalyKind.MISBEHAVIOR) and not self.missing_events:
            raise ValueError(f"{self.kind.value} report needs missing events")
        if self.kind is AnomalyKind.OVERPRIVILEGE and not self.extra_events:
            raise ValueError("overprivilege report needs extra events")


@dataclass
class CheckerParams:
    tau: float = 0.1              # gap window half-width is 3*tau around mu
    join_window: float = 2.1      # AND-trigger root co-occurrence window
    fallback_gap: float = 10.0    # link window when no mined stats exist
    extension_window: float = 1.0  # trailing command linked as overprivilege


def match_graph(d: EventTransitionGraph, contexts: list[EventTransitionGraph],
                registry: EventRegistry | None = None) -> str | None:
    """Exact structural match: identical node-id set and edge set."""
    if registry is not None:
        for g in [d, *contexts]:
            for nid in g.node_ids():
                if nid not in registry:
                    raise ConsistencyError(f"{g.graph_id}: node {nid} not in registry")
    want_nodes = set(d.node_ids())
    want_edges = set(d.edges)
    for g in contexts:
        if set(g.node_ids()) == want_nodes and set(g.edges) == want_edges:
            return g.graph_id
    return None


def _linear(g: EventTransitionGraph) -> list[int] | None:
    try:
        roots, rest = g.linearize()
    except Exception:
        return None
    return sorted(roots) + rest if len(roots) > 1 else roots + rest


def classify_anomaly(observed: EventTransitionGraph, contexts: list[EventTransitionGraph],
                     ts: float = 0.0) -> AnomalyReport:
    """Classify one observed (mined or reconstructed) sequence against the
    expected contexts, in fixed rule order. AND-trigger roots compare in
    sorted-id order."""
    obs = _linear(observed)
    hits: list[tuple[AnomalyKind, str, tuple[int, ...], tuple[int, ...]]] = []
    if obs is not None:
        for g in sorted(contexts, key=lambda x: x.graph_id):
            lin = _linear(g)
            if lin is None or lin == obs:
                continue
            k = len(lin) - len(obs)
            if k > 0 and lin[k:] == obs:
                hits.append((AnomalyKind.SPOOFING, g.graph_id, tuple(lin[:k]), ()))
            elif k > 0 and lin[:len(obs)] == obs:
                hits.append((AnomalyKind.MISBEHAVIOR, g.graph_id, tuple(lin[len(obs):]), ()))
            elif k < 0 and obs[:len(lin)] == lin:
                hits.append((AnomalyKind.OVERPRIVILEGE, g.graph_id, (), tuple(obs[len(lin):])))
    if not hits:
        return AnomalyReport(AnomalyKind.UNKNOWN, observed, None, (), (), ts)
    hits.sort(key=lambda h: (_PRIORITY[h[0]], h[1]))
    if len({h[0] for h in hits}) > 1:
        log.warning("ambiguous classification for %s: %s; rule order picks %s",
                    observed.graph_id, [h[0].value for h in hits], hits[0][0].value)
    kind, gid, missing, extra = hits[0]
    label = {n.event.id: n.event for g in contexts for n in g.nodes}
    for n in observed.nodes:
        label.setdefault(n.event.id, n.event)  # extras live outside the contexts
    return AnomalyReport(kind, observed, gid,
                         tuple(label[i] for i in missing),
                         tuple(label[i] for i in extra), ts)


def check_graphs(wireless: list[EventTransitionGraph], contexts: list[EventTransitionGraph],
                 registry: EventRegistry | None = None) -> list[AnomalyReport]:
    """Graph-level pass: one report per unmatched mined graph (ts = 0)."""
    reports = []
    for d in wireless:
        if match_graph(d, contexts, registry) is None:
            reports.append(classify_anomaly(d, contexts))
    return reports


# ---------------------------------------------------------------------------
# Occurrence-level checking
# ---------------------------------------------------------------------------

@dataclass
class _Pattern:
    graph: EventTransitionGraph
    roots: list[int]
    body: list[int]

    @property
    def sequence(self) -> list[int]:
        return self.roots + self.body


class _Occurrences:
    """Per-type occurrence index with consumption flags."""

    def __init__(self, stream: list[tuple[int, float]]):
        self.times: dict[int, list[float]] = {}
        for eid, ts in stream:
            self.times.setdefault(eid, []).append(ts)
        self.used: dict[int, list[bool]] = {e: [False] * len(v) for e, v in self.times.items()}

    def first_free(self, eid: int, lo: float, hi: float) -> int | None:
        """Index of the first unconsumed occurrence with ts in (lo, hi]."""
        ts = self.times.get(eid, ())
        used = self.used.get(eid, ())
        for j, t in enumerate(ts):
            if t > hi:
                return None
            if t > lo and not used[j]:
                return j
        return None

    def take(self, eid: int, j: int) -> None:
        self.used[eid][j] = True

    def t(self, eid: int, j: int) -> float:
        return self.times[eid][j]

    def leftovers(self) -> list[tuple[float, int, int]]:
        rows = [(t, eid, j) for eid, ts in self.times.items()
                for j, t in enumerate(ts) if not self.used[eid][j]]
        rows.sort()
        return rows


def _pair_window(a: int, b: int, stats: dict[tuple[int, int], PairStats] | None,
                 params: CheckerParams) -> tuple[float, float]:
    st = stats.get((a, b)) if stats else None
    if st is None:
        return 0.0, params.fallback_gap
    return max(st.mean - 3 * params.tau, 0.0), st.mean + 3 * params.tau


def _patterns(contexts: list[EventTransitionGraph]) -> list[_Pattern]:
    pats = []
    for g in contexts:
        shp = g.shape()
        if shp in (GraphShape.PATH, GraphShape.AND_JOIN):
            roots, body = g.linearize()
            pats.append(_Pattern(g, sorted(roots), body))
        else:
            log.warning("context %s has shape %s; occurrence checking skipped for it",
                        g.graph_id, shp.value)
    pats.sort(key=lambda p: (-len(p.sequence), p.graph.graph_id))
    return pats


def check_stream(events, contexts: list[EventTransitionGraph],
                 params: CheckerParams | None = None,
                 stats: dict[tuple[int, int], PairStats] | None = None,
                 registry: EventRegistry | None = None,
                 vocabulary: CapabilityVocabulary | None = None,
                 ) -> list[AnomalyReport]:
    """Per-occurrence checking of an event stream against context graphs.

    stats should be the miner's pair table for this stream; link windows
    fall back to (0, fallback_gap] for pairs it lacks. With a registry and
    vocabulary, only command events can extend an occurrence into an
    overprivilege report; attribute reports never can.
    """
    from .mine import as_stream
    params = params or CheckerParams()
    stream = as_stream(events)
    occ = _Occurrences(stream)
    pats = _patterns(contexts)

    def is_command(eid: int) -> bool:
        # Actuations carry a () suffix ("switch.on()"); attribute reports
        # don't ("motion.active"). Without any naming source every event
        # would look like a command, so stay conservative instead.
        if registry is None:
            return False
        command = registry.pair(eid)[1]
        if vocabulary is not None:
            try:
                return vocabulary.is_command(command)
            except Exception:
                return False
        return command.endswith("()")

    def label(eid: int) -> EventId:
        if registry is not None and eid in registry:
            return registry.lookup(eid)
        for g in contexts:
            for node in g.nodes:
                if node.event.id == eid:
                    return node.event
        return EventId(eid, f"event-{eid}")

    # Phase 1: consume complete occurrences, longest pattern first.
    completed: list[tuple[_Pattern, float, float]] = []  # (pattern, t_start, t_end)
    for pat in pats:
        seq = pat.sequence
        if any(e not in occ.times for e in seq):
            continue
        anchor_type = pat.roots[0]
        for j0 in range(len(occ.times[anchor_type])):
            if occ.used[anchor_type][j0]:
                continue
            t0 = occ.t(anchor_type, j0)
            used = [(anchor_type, j0)]
            ok = True
            t_prev = t0
            for r in pat.roots[1:]:
                j = occ.first_free(r, t0 - params.join_window, t0 + params.join_window)
                if j is None:
                    ok = False
                    break
                used.append((r, j))
                t_prev = max(t_prev, occ.t(r, j))
            if ok:
                prev_type = pat.roots[-1] if len(pat.roots) == 1 else \
                    max(used, key=lambda u: occ.t(*u))[0]
                for b in pat.body:
                    lo, hi = _pair_window(prev_type, b, stats, params)
                    j = occ.first_free(b, t_prev + lo, t_prev + hi)
                    if j is None:
                        ok = False
                        break
                    used.append((b, j))
                    t_prev = occ.t(b, j)
                    prev_type = b
            if ok:
                for eid, j in used:
                    occ.take(eid, j)
                completed.append((pat, t0, t_prev))

    reports: list[AnomalyReport] = []

    # Phase 2: trailing commands right after a completed occurrence.
    completed.sort(key=lambda c: c[2])
    for pat, t0, t_end in completed:
        extended = list(pat.sequence)
        cur_end = t_end
        while True:
            best: tuple[float, int, int] | None = None
            for eid in sorted(occ.times):
                if not is_command(eid):
                    continue
                j = occ.first_free(eid, cur_end, cur_end + params.extension_window)
                if j is not None:
                    t = occ.t(eid, j)
                    if best is None or t < best[0]:
                        best = (t, eid, j)
            if best is None:
                break
            t, eid, j = best
            occ.take(eid, j)
            extended.append(eid)
            # Node ids are event ids, so a run that repeats an event cannot
            # be rendered as a graph; fall back to the matched shape and let
            # extra_events carry the repeat.
            shown = extended if len(set(extended)) == len(extended) else list(pat.sequence)
            obs = path_graph(f"observed-{pat.graph.graph_id}-ext",
                             GraphSource.WIRELESS,
                             [GraphNode(label(e)) for e in shown])
            reports.append(AnomalyReport(AnomalyKind.OVERPRIVILEGE, obs, pat.graph.graph_id,
                                         (), (label(eid),), t))
            cur_end = t

    # Phase 3: classify leftovers by backward/forward reconstruction.
    for t, eid, j in occ.leftovers():
        if occ.used[eid][j]:
            continue  # consumed into an earlier leftover's run
        best = None  # (priority, -len(seq), graph_id, interpretation)
        for pat in pats:
            seq = pat.sequence
            if eid not in seq:
                continue
            pos = seq.index(eid)
            run = [(eid, j)]
            # backward
            t_next = t
            for i in range(pos - 1, -1, -1):
                lo, hi = _window_at(pat, i, stats, params)
                jj = _last_free_before(occ, seq[i], t_next, lo, hi)
                if jj is None:
                    break
                run.insert(0, (seq[i], jj))
                t_next = occ.t(seq[i], jj)
            i0 = pos - (len(run) - 1)
            # forward
            t_prev = t
            i1 = pos
            for i in range(pos + 1, len(seq)):
                lo, hi = _window_at(pat, i - 1, stats, params)
                jj = occ.first_free(seq[i], t_prev + lo, t_prev + hi)
                if jj is None:
                    break
                run.append((seq[i], jj))
                t_prev = occ.t(seq[i], jj)
                i1 = i
            if i0 == 0 and i1 == len(seq) - 1:
                kind = None  # complete; nothing anomalous
            elif i0 > 0 and i1 == len(seq) - 1:
                kind = AnomalyKind.SPOOFING
                missing = tuple(seq[:i0])
                extra: tuple[int, ...] = ()
            elif i0 == 0 and i1 < len(seq) - 1:
                kind = AnomalyKind.MISBEHAVIOR
                missing = tuple(seq[i1 + 1:])
                extra = ()
            else:
                kind = AnomalyKind.UNKNOWN
                missing = tuple(seq[:i0]) + tuple(seq[i1 + 1:])
                extra = ()
            if kind is None:
                # A full occurrence surfacing late outranks any anomaly reading.
                cand = (-1, -len(run), pat.graph.graph_id, None, run)
            else:
                cand = (_PRIORITY[kind], -len(run), pat.graph.graph_id,
                        (kind, missing, extra), run)
            if best is None or cand[:3] < best[:3]:
                best = cand
        if best is None:
            # Events outside every context graph are unmodeled traffic
            # (sensor chatter no rule consumes), not a compliance failure.
            log.debug("leftover event %d at %.3f is in no context graph; ignored", eid, t)
            occ.take(eid, j)
            continue
        _, _, gid, interp, run = best
        for e, jj in run:
            occ.take(e, jj)
        if interp is None:
            continue  # a full occurrence surfaced late; not anomalous
        kind, missing, extra = interp
        run_start = occ.t(run[0][0], run[0][1])
        obs = path_graph(f"observed-{gid}-{run[0][1]}", GraphSource.WIRELESS,
                         [GraphNode(label(e)) for e, _ in run])
        reports.append(AnomalyReport(kind, obs, gid,
                                     tuple(label(e) for e in missing),
                                     tuple(label(e) for e in extra), run_start))

    reports.sort(key=lambda r: (r.ts, _PRIORITY[r.kind]))
    return reports


def _window_at(pat: _Pattern, i: int, stats, params: CheckerParams) -> tuple[float, float]:
    """Window between sequence positions i and i+1; root-root gaps use the
    join window."""
    seq = pat.sequence
    if i + 1 < len(pat.roots):
        return 0.0, params.join_window
    return _pair_window(seq[i], seq[i + 1], stats, params)


def _last_free_before(occ: _Occurrences, eid: int, t_next: float,
                      lo: float, hi: float) -> int | None:
    """Latest unconsumed occurrence with t_next - ts in [lo, hi], ts < t_next."""
    ts = occ.times.get(eid, ())
    used = occ.used.get(eid, ())
    found = None
    for j, t in enumerate(ts):
        if t >= t_next:
            break
        gap = t_next - t
        if lo <= gap <= hi and not used[j]:
            found = j
    return found
