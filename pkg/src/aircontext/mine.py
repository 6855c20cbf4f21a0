"""Temporal dependency mining over an event stream.

Two event types are dependent when the gaps between each occurrence of the
first and the first subsequent occurrence of the second are consistent: the
sample standard deviation of those gaps stays under tau, which is sized to
network-delay noise. Dependent pairs chain into longer sequences when the
skip-pair mean gaps are additive (mu(a,c) close to mu(a,b) + mu(b,c)), and
occurrence counting over the stream decides whether a contiguous subsequence
of a longer chain also stands on its own: it does exactly when it occurs
more often than its enclosing chains, with the surplus as its own count.

The declarative contract, which the brute-force oracle in the test suite
re-implements independently:

  chain      = sequence of distinct types, every adjacent pair dependent,
               every skip pair present in the stats table with
               |mu(skip) - sum(adjacent mus)| <= eps_add
  maximal    = not embeddable in-order (gaps allowed) into another chain
  reinstated = contiguous proper subsequence s of a maximal chain with
               count(s) > sum(count(L)) over enclosing maximal chains L

Counting scans the stream greedily: take the earliest unconsumed occurrence
of the first type, then for each later position the first unconsumed
occurrence whose gap from the previous one lies in [max(mu-3tau, 0), mu+3tau]
(strictly positive); a completed walk consumes its occurrences.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigError, DetectedEvent, EventId, EventRegistry, EventTransitionGraph, \
    GraphNode, GraphSource, path_graph

log = logging.getLogger(__name__)


class InconclusiveError(ConfigError):
    """Not enough paired samples to accept or reject dependence."""


@dataclass
class MinerParams:
    tau: float = 0.1            # dependence bound on gap standard deviation
    max_lag: float = 10.0       # pairing horizon
    min_support: int = 5        # samples needed before a pair is considered
    eps_add: float = 0.3        # additivity tolerance for chain merging

    def __post_init__(self):
        if self.tau <= 0 or self.max_lag <= 0 or self.eps_add <= 0:
            raise ConfigError("tau, max_lag, and eps_add must be > 0")
        if self.min_support < 2:
            raise ConfigError("min_support must be >= 2 (std needs two samples)")


@dataclass(frozen=True)
class PairStats:
    a: int
    b: int
    samples: tuple[float, ...]
    mean: float
    std: float

    @property
    def support(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class DependencySequence:
    events: tuple[int, ...]
    mean_gaps: tuple[float, ...]
    count: int


EventStream = list[tuple[int, float]]


def as_stream(events) -> EventStream:
    """Accept DetectedEvent lists or bare (event_id, ts) tuples."""
    out = []
    for ev in events:
        if isinstance(ev, DetectedEvent):
            out.append((ev.event.id, ev.ts))
        else:
            eid, ts = ev[0], ev[1]
            out.append((int(eid), float(ts)))
    return sorted(out, key=lambda e: (e[1], e[0]))


def collect_pair_stats(events, params: MinerParams) -> dict[tuple[int, int], PairStats]:
    """Gap statistics for every ordered pair of distinct types.

    Each occurrence of a pairs with the first not-yet-consumed occurrence of
    b strictly after it and within max_lag; each b occurrence feeds at most
    one sample. Pairs with fewer than min_support samples are discarded.
    """
    stream = as_stream(events)
    occ: dict[int, list[float]] = {}
    for eid, ts in stream:
        occ.setdefault(eid, []).append(ts)
    types = sorted(occ)
    out: dict[tuple[int, int], PairStats] = {}
    for a in types:
        ta = occ[a]
        for b in types:
            if a == b:
                continue
            tb = occ[b]
            samples = []
            j = 0
            for t0 in ta:
                while j < len(tb) and tb[j] <= t0:
                    j += 1
                if j < len(tb) and tb[j] - t0 <= params.max_lag:
                    samples.append(tb[j] - t0)
                    j += 1
            if len(samples) >= params.min_support:
                arr = np.array(samples)
                out[(a, b)] = PairStats(a, b, tuple(samples),
                                        float(arr.mean()), float(arr.std(ddof=1)))
    return out


def test_dependence(stats: PairStats, tau: float, min_support: int = 2) -> bool:
    """True when the gap spread is delay-sized: std strictly under tau."""
    if stats.support < min_support:
        raise InconclusiveError(
            f"pair ({stats.a},{stats.b}): {stats.support} samples < {min_support}")
    return stats.std < tau


def dependent_pairs(stats: dict[tuple[int, int], PairStats],
                    params: MinerParams) -> dict[tuple[int, int], PairStats]:
    return {k: s for k, s in stats.items()
            if test_dependence(s, params.tau, params.min_support)}


def concatenate(dependent: dict[tuple[int, int], PairStats],
                params: MinerParams,
                all_stats: dict[tuple[int, int], PairStats] | None = None,
                ) -> list[tuple[int, ...]]:
    """Grow dependent pairs into maximal chains.

    A pair extends a chain when the new adjacent pair is dependent and every
    skip pair to the new event exists in the stats table with an additive
    mean. Skip pairs need stats but not dependence: gap spread grows with
    hop count, additivity of the means is the structural signal. A candidate
    that would repeat an event is a cycle; it is logged and skipped.

    Returns maximal chains only (sorted longest first, then lexically);
    pairs embedded in-order inside a longer chain are absorbed by it.
    """
    mu_all = {k: s.mean for k, s in (all_stats or dependent).items()}
    adj: dict[int, list[int]] = {}
    for (a, b) in sorted(dependent):
        adj.setdefault(a, []).append(b)

    chains: set[tuple[int, ...]] = {k for k in dependent}
    frontier = set(chains)
    while frontier:
        grown: set[tuple[int, ...]] = set()
        for seq in frontier:
            tail = seq[-1]
            for y in adj.get(tail, ()):
                if y in seq:
                    log.warning("cyclic merge skipped: %s + (%d,%d)", seq, tail, y)
                    continue
                ok = True
                # adjacent mus along seq, then the new hop
                gaps = [mu_all[(seq[i], seq[i + 1])] for i in range(len(seq) - 1)]
                gaps.append(mu_all[(tail, y)])
                for i in range(len(seq) - 1):
                    skip = (seq[i], y)
                    if skip not in mu_all:
                        ok = False
                        break
                    if abs(mu_all[skip] - sum(gaps[i:])) > params.eps_add:
                        ok = False
                        break
                if ok:
                    grown.add(seq + (y,))
        grown -= chains
        chains |= grown
        frontier = grown

    ordered = sorted(chains, key=lambda c: (-len(c), c))
    maximal = []
    for s in ordered:
        if not any(len(t) > len(s) and _in_order(s, t) for t in ordered):
            maximal.append(s)
    return maximal


def _in_order(s: tuple[int, ...], t: tuple[int, ...]) -> bool:
    """s embeds into t preserving order, gaps allowed."""
    i = 0
    for x in t:
        if i < len(s) and s[i] == x:
            i += 1
    return i == len(s)


def count_sequence(seq: tuple[int, ...], events, stats: dict[tuple[int, int], PairStats],
                   params: MinerParams) -> int:
    """Greedy occurrence count of seq in the stream (see module docstring)."""
    stream = as_stream(events)
    occ: dict[int, list[float]] = {}
    for eid, ts in stream:
        occ.setdefault(eid, []).append(ts)
    for eid in seq:
        if eid not in occ:
            return 0
    times = {eid: np.array(occ[eid]) for eid in set(seq)}
    consumed = {eid: np.zeros(len(occ[eid]), dtype=bool) for eid in set(seq)}
    windows = []
    for i in range(len(seq) - 1):
        st = stats.get((seq[i], seq[i + 1]))
        if st is None:
            return 0
        windows.append((max(st.mean - 3 * params.tau, 0.0), st.mean + 3 * params.tau))

    count = 0
    first = seq[0]
    for i0 in range(len(times[first])):
        if consumed[first][i0]:
            continue
        used = [(first, i0)]
        t_prev = float(times[first][i0])
        ok = True
        for pos in range(1, len(seq)):
            b = seq[pos]
            lo, hi = windows[pos - 1]
            tb = times[b]
            cb = consumed[b]
            j = int(np.searchsorted(tb, t_prev + max(lo, 1e-12), side="left"))
            found = -1
            while j < len(tb) and tb[j] - t_prev <= hi:
                if not cb[j] and tb[j] > t_prev and (b, j) not in used:
                    found = j
                    break
                j += 1
            if found < 0:
                ok = False
                break
            used.append((b, found))
            t_prev = float(tb[found])
        if ok:
            for eid, j in used:
                consumed[eid][j] = True
            count += 1
    return count


def count_subsequences(maximal: list[tuple[int, ...]], events,
                       stats: dict[tuple[int, int], PairStats],
                       params: MinerParams) -> list[DependencySequence]:
    """Counts for maximal chains, plus reinstated standalone subsequences."""
    counts = {L: count_sequence(L, events, stats, params) for L in maximal}
    parents: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for L in maximal:
        for size in range(2, len(L)):
            for start in range(len(L) - size + 1):
                s = L[start:start + size]
                parents.setdefault(s, []).append(L)

    out = [DependencySequence(L, _gaps(L, stats), counts[L]) for L in maximal]
    for s in sorted(parents, key=lambda q: (-len(q), q)):
        ls = parents[s]
        if any(len(L) - len(s) >= 2 for L in ls):
            log.debug("nested subsequence %s inside %s, subtraction rule applied",
                      s, max(ls, key=len))
        explained = sum(counts[L] for L in ls)
        c = count_sequence(s, events, stats, params)
        if c > explained:
            out.append(DependencySequence(s, _gaps(s, stats), c - explained))
    out.sort(key=lambda d: (-len(d.events), d.events))
    return out


def _gaps(seq: tuple[int, ...], stats: dict[tuple[int, int], PairStats]) -> tuple[float, ...]:
    return tuple(stats[(seq[i], seq[i + 1])].mean for i in range(len(seq) - 1))


def build_wireless_context(sequences: list[DependencySequence],
                           registry: EventRegistry | None = None,
                           ) -> list[EventTransitionGraph]:
    """One path graph per dependency sequence, deterministic ids and order."""
    graphs = []
    for dep in sequences:
        nodes = []
        for eid in dep.events:
            ev = registry.lookup(eid) if registry is not None else EventId(eid, f"event-{eid}")
            nodes.append(GraphNode(ev))
        gid = "wireless-" + "-".join(str(e) for e in dep.events)
        graphs.append(path_graph(gid, GraphSource.WIRELESS, nodes, dep.count))
    return graphs


@dataclass
class MinerResult:
    stats: dict[tuple[int, int], PairStats]
    dependent: dict[tuple[int, int], PairStats]
    sequences: list[DependencySequence]
    graphs: list[EventTransitionGraph]


def mine_wireless_context(events, params: MinerParams | None = None,
                          registry: EventRegistry | None = None) -> MinerResult:
    """Full mining pass: stats, dependence, chains, counting, graphs."""
    params = params or MinerParams()
    stats = collect_pair_stats(events, params)
    dep = dependent_pairs(stats, params)
    maximal = concatenate(dep, params, all_stats=stats)
    sequences = count_subsequences(maximal, events, stats, params)
    graphs = build_wireless_context(sequences, registry)
    return MinerResult(stats, dep, sequences, graphs)
