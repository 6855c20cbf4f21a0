"""Hidden inter-app coupling analysis.

Two automation graphs that never share an event can still interact when the
first one's action changes something the second one's trigger measures: a
heater command raises the room temperature, and a temperature-triggered rule
fires next.  The channel map names those shared media.  This module
enumerates (upstream graph, channel, downstream graph) candidates and then
looks for observational evidence in the mined wireless sequences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .model import (
    Channel,
    ChannelMap,
    EventId,
    EventRegistry,
    EventTransitionGraph,
    ValidationError,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CouplingChain:
    """One upstream-channel-downstream candidate, optionally confirmed."""

    upstream: str
    channel: str
    downstream: str
    confirmed: bool = False
    evidence_count: int = 0

    def to_dict(self) -> dict:
        return {
            "upstream": self.upstream,
            "channel": self.channel,
            "downstream": self.downstream,
            "confirmed": self.confirmed,
            "evidence_count": self.evidence_count,
        }

    @classmethod
    def from_dict(cls, row: dict) -> "CouplingChain":
        return cls(
            upstream=str(row["upstream"]),
            channel=str(row["channel"]),
            downstream=str(row["downstream"]),
            confirmed=bool(row.get("confirmed", False)),
            evidence_count=int(row.get("evidence_count", 0)),
        )


@dataclass(frozen=True)
class ChannelUsage:
    """Per-channel rollup of discovered couplings."""

    name: str
    channel_type: str
    graphs: int
    chains: int
    confirmed: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "channel_type": self.channel_type,
            "graphs": self.graphs,
            "chains": self.chains,
            "confirmed": self.confirmed,
        }


def _event_pair(event: EventId, registry: EventRegistry | None) -> tuple[str, str]:
    if registry is not None and int(event) in registry:
        return registry.pair(int(event))
    device, _, command = event.label.partition("/")
    if not command:
        raise ValidationError(f"event {int(event)} has no device/command label")
    return device, command


def _writes(graph: EventTransitionGraph, channel: Channel,
            registry: EventRegistry | None) -> bool:
    for nid in graph.terminals():
        device, command = _event_pair(graph.node_for(nid).event, registry)
        if any(w.matches_pair(device, command) for w in channel.writers):
            return True
    return False


def _reads(graph: EventTransitionGraph, channel: Channel,
           registry: EventRegistry | None) -> bool:
    for nid in graph.roots():
        device, command = _event_pair(graph.node_for(nid).event, registry)
        if any(r.matches_pair(device, command) for r in channel.readers):
            return True
    return False


def discover_chains(
    contexts: list[EventTransitionGraph],
    channels: ChannelMap,
    registry: EventRegistry | None = None,
) -> list[CouplingChain]:
    """Enumerate candidate couplings between distinct automation graphs.

    A triple qualifies when some terminal action of the upstream graph writes
    the channel and some root trigger of the downstream graph reads it.  The
    result is sorted by (channel, upstream, downstream) and carries no
    evidence yet.
    """
    ordered = sorted(contexts, key=lambda g: g.graph_id)
    found: list[CouplingChain] = []
    for channel in sorted(channels.channels, key=lambda c: c.name):
        writers = [g for g in ordered if _writes(g, channel, registry)]
        readers = [g for g in ordered if _reads(g, channel, registry)]
        for up in writers:
            for down in readers:
                if up.graph_id == down.graph_id:
                    continue
                found.append(CouplingChain(up.graph_id, channel.name, down.graph_id))
    found.sort(key=lambda c: (c.channel, c.upstream, c.downstream))
    return found


def confirm_chains(
    chains: list[CouplingChain],
    contexts: list[EventTransitionGraph],
    wireless: list[EventTransitionGraph],
) -> list[CouplingChain]:
    """Mark candidates whose joined event sequence was actually mined.

    A chain is confirmed when some wireless-context sequence equals the
    upstream graph's full event sequence followed immediately by the
    downstream graph's.  The matching sequence's occurrence count becomes the
    evidence count.
    """
    by_id = {g.graph_id: g for g in contexts}
    mined: dict[tuple[int, ...], int] = {}
    for g in wireless:
        key = tuple(g.full_sequence())
        mined[key] = max(mined.get(key, 0), g.occurrence_count or 0)
    out: list[CouplingChain] = []
    for chain in chains:
        up = by_id.get(chain.upstream)
        down = by_id.get(chain.downstream)
        if up is None or down is None:
            raise ValidationError(f"chain references unknown graph "
                                  f"{chain.upstream!r} or {chain.downstream!r}")
        joined = tuple(up.full_sequence()) + tuple(down.full_sequence())
        count = mined.get(joined)
        if count is None:
            out.append(replace(chain, confirmed=False, evidence_count=0))
        else:
            log.info("coupling %s -[%s]-> %s confirmed, %d occurrences",
                     chain.upstream, chain.channel, chain.downstream, count)
            out.append(replace(chain, confirmed=True, evidence_count=count))
    return out


def channel_stats(chains: list[CouplingChain],
                  channels: ChannelMap) -> list[ChannelUsage]:
    """Rollup: per channel, distinct graphs touched plus chain counts.

    Channels with no chains are omitted.  Sorted by chain count descending,
    then name.
    """
    kind = {c.name: c.type.value for c in channels.channels}
    per: dict[str, list[CouplingChain]] = {}
    for chain in chains:
        per.setdefault(chain.channel, []).append(chain)
    rows = []
    for name, group in per.items():
        graphs = {c.upstream for c in group} | {c.downstream for c in group}
        rows.append(ChannelUsage(
            name=name,
            channel_type=kind.get(name, "capability"),
            graphs=len(graphs),
            chains=len(group),
            confirmed=sum(1 for c in group if c.confirmed),
        ))
    rows.sort(key=lambda r: (-r.chains, r.name))
    return rows
