"""Interchange formats: JSONL streams and JSON documents.

Writers emit one canonical form (fixed key order, compact separators) so a
rerun with the same seed produces byte-identical files. Readers raise
ParseError with the failing line number.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .model import (
    Capability,
    CapabilityVocabulary,
    Channel,
    ChannelEndpoint,
    ChannelMap,
    ChannelType,
    ConditionNode,
    DetectedEvent,
    EventId,
    EventRegistry,
    EventTransitionGraph,
    GraphNode,
    GraphSource,
    PacketKind,
    PacketRecord,
    ParseError,
    ValidationError,
)

_KINDS = {k.value: k for k in PacketKind}


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _read_jsonl(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc.msg}", str(path), lineno) from exc


# ---------------------------------------------------------------------------
# Packet traces
# ---------------------------------------------------------------------------

def load_trace(path: str | Path) -> list[PacketRecord]:
    out = []
    last_ts = None
    for lineno, row in _read_jsonl(path):
        try:
            kind = _KINDS[row["kind"]]
            rec = PacketRecord(float(row["ts"]), int(row["size"]), int(row["dir"]),
                               int(row["layer"]), kind, str(row["src"]), str(row["dst"]))
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise ParseError(f"bad packet record: {exc}", str(path), lineno) from exc
        if last_ts is not None and rec.ts < last_ts:
            raise ParseError("timestamps not non-decreasing", str(path), lineno)
        last_ts = rec.ts
        out.append(rec)
    return out


def save_trace(path: str | Path, packets: Iterable[PacketRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in packets:
            fh.write(_dump({"ts": p.ts, "size": p.size, "dir": p.direction,
                            "layer": p.layer, "kind": p.kind.value,
                            "src": p.src, "dst": p.dst}) + "\n")


# ---------------------------------------------------------------------------
# Labels / ground truth (one schema: event_id, t_start, t_end)
# ---------------------------------------------------------------------------

def load_labels(path: str | Path) -> list[tuple[int, float, float]]:
    out = []
    for lineno, row in _read_jsonl(path):
        try:
            out.append((int(row["event_id"]), float(row["t_start"]), float(row["t_end"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad label record: {exc}", str(path), lineno) from exc
    return out


def save_labels(path: str | Path, labels: Iterable[tuple[int, float, float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for eid, t0, t1 in labels:
            fh.write(_dump({"event_id": eid, "t_start": t0, "t_end": t1}) + "\n")


# ---------------------------------------------------------------------------
# Detected event streams
# ---------------------------------------------------------------------------

def load_events(path: str | Path) -> list[tuple[int, float, float]]:
    """Return (event_id, ts, confidence) tuples."""
    out = []
    for lineno, row in _read_jsonl(path):
        try:
            out.append((int(row["event_id"]), float(row["ts"]), float(row["confidence"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad event record: {exc}", str(path), lineno) from exc
    return out


def save_events(path: str | Path, events: Iterable[DetectedEvent | tuple[int, float, float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            if isinstance(ev, DetectedEvent):
                row = {"event_id": ev.event.id, "ts": ev.ts, "confidence": ev.confidence}
            else:
                eid, ts, conf = ev
                row = {"event_id": eid, "ts": ts, "confidence": conf}
            fh.write(_dump(row) + "\n")


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------

def graph_to_dict(g: EventTransitionGraph) -> dict:
    nodes = []
    for n in g.nodes:
        row: dict = {"id": n.event.id, "label": n.event.label}
        if n.condition is not None:
            row["condition"] = {"attribute": n.condition.attribute,
                                "op": n.condition.op,
                                "threshold": n.condition.threshold}
        nodes.append(row)
    doc: dict = {"graph_id": g.graph_id, "source": g.source.value,
                 "nodes": nodes, "edges": [[a, b] for a, b in g.edges]}
    if g.occurrence_count is not None:
        doc["occurrence_count"] = g.occurrence_count
    return doc


def graph_from_dict(doc: dict, path: str = "") -> EventTransitionGraph:
    try:
        nodes = []
        for row in doc["nodes"]:
            cond = None
            if "condition" in row and row["condition"] is not None:
                c = row["condition"]
                cond = ConditionNode(str(c["attribute"]), str(c["op"]), float(c["threshold"]))
            nodes.append(GraphNode(EventId(int(row["id"]), str(row["label"])), cond))
        edges = [(int(a), int(b)) for a, b in doc["edges"]]
        return EventTransitionGraph(str(doc["graph_id"]), GraphSource(doc["source"]),
                                    nodes, edges, doc.get("occurrence_count"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad graph document: {exc}", path, 0) from exc


def load_graph(path: str | Path) -> EventTransitionGraph:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", str(path), exc.lineno) from exc
    return graph_from_dict(doc, str(path))


def save_graph(path: str | Path, g: EventTransitionGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(graph_to_dict(g)) + "\n")


def load_graph_set(path: str | Path) -> list[EventTransitionGraph]:
    """A graph-set file is a JSON array of graph documents."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            docs = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", str(path), exc.lineno) from exc
    if not isinstance(docs, list):
        raise ParseError("graph set must be a JSON array", str(path), 1)
    return [graph_from_dict(d, str(path)) for d in docs]


def save_graph_set(path: str | Path, graphs: Iterable[EventTransitionGraph]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump([graph_to_dict(g) for g in graphs]) + "\n")


def load_graph_dir(path: str | Path) -> list[EventTransitionGraph]:
    """All *.json files in a directory, sorted by filename."""
    graphs = []
    for p in sorted(Path(path).glob("*.json")):
        graphs.append(load_graph(p))
    return graphs


# ---------------------------------------------------------------------------
# Capability vocabulary
# ---------------------------------------------------------------------------

def _vocabulary_from_doc(doc: dict, where: str) -> CapabilityVocabulary:
    try:
        caps = [Capability(str(c["capability"]), str(c["attribute"]),
                           tuple(str(v) for v in c.get("values", [])),
                           tuple(str(x) for x in c.get("commands", [])))
                for c in doc["capabilities"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad vocabulary document: {exc}", where, 0) from exc
    return CapabilityVocabulary(caps)


def load_vocabulary(path: str | Path) -> CapabilityVocabulary:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", str(path), exc.lineno) from exc
    return _vocabulary_from_doc(doc, str(path))


def save_vocabulary(path: str | Path, vocab: CapabilityVocabulary) -> None:
    doc = {"capabilities": [{"capability": c.name, "attribute": c.attribute,
                             "values": list(c.values), "commands": list(c.commands)}
                            for c in vocab.capabilities]}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(doc) + "\n")


# ---------------------------------------------------------------------------
# Channel map
# ---------------------------------------------------------------------------

def _channel_map_from_doc(doc: dict, where: str) -> ChannelMap:
    try:
        channels = [Channel(str(c["name"]), ChannelType(c["type"]),
                            tuple(ChannelEndpoint.parse(w) for w in c["writers"]),
                            tuple(ChannelEndpoint.parse(r) for r in c["readers"]))
                    for c in doc["channels"]]
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ParseError(f"bad channel map: {exc}", where, 0) from exc
    return ChannelMap(channels)


def load_channel_map(path: str | Path) -> ChannelMap:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", str(path), exc.lineno) from exc
    return _channel_map_from_doc(doc, str(path))


def save_channel_map(path: str | Path, cmap: ChannelMap) -> None:
    doc = {"channels": [{"name": c.name, "type": c.type.value,
                         "writers": [w.unparse() for w in c.writers],
                         "readers": [r.unparse() for r in c.readers]}
                        for c in cmap]}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(doc) + "\n")


# ---------------------------------------------------------------------------
# Event registry
# ---------------------------------------------------------------------------

def load_registry(path: str | Path, vocabulary: CapabilityVocabulary | None = None) -> EventRegistry:
    reg = EventRegistry(vocabulary)
    for lineno, row in _read_jsonl(path):
        try:
            eid = reg.register(str(row["device"]), str(row["command"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad registry record: {exc}", str(path), lineno) from exc
        if eid.id != int(row["id"]):
            raise ParseError(f"registry ids not dense/in order: expected {eid.id}, "
                             f"got {row['id']}", str(path), lineno)
    return reg


def save_registry(path: str | Path, registry: EventRegistry) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for eid, (device, command) in registry.items():
            fh.write(_dump({"id": eid.id, "device": device, "command": command}) + "\n")


# ---------------------------------------------------------------------------
# Anomaly reports and coupling chains
# ---------------------------------------------------------------------------

def save_reports(path: str | Path, reports) -> None:
    """One JSONL row per anomaly report, human-readable labels included."""
    def ev(e: EventId) -> dict:
        return {"id": e.id, "label": e.label}

    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(_dump({
                "kind": r.kind.value,
                "ts": r.ts,
                "context": r.matched_context,
                "observed": [ev(n.event) for n in r.wireless_graph.nodes],
                "missing": [ev(e) for e in r.missing_events],
                "extra": [ev(e) for e in r.extra_events],
            }) + "\n")


def load_reports(path: str | Path) -> list[dict]:
    """Report rows as plain dicts (reports do not round-trip to objects)."""
    rows = []
    for lineno, row in _read_jsonl(path):
        for key in ("kind", "ts", "observed"):
            if key not in row:
                raise ParseError(f"report row missing {key!r}", str(path), lineno)
        rows.append(row)
    return rows


def save_chains(path: str | Path, chains, usage) -> None:
    """Single JSON document: coupling chains plus the per-channel rollup."""
    doc = {"chains": [c.to_dict() for c in chains],
           "channels": [u.to_dict() for u in usage]}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(doc) + "\n")


def load_chains(path: str | Path):
    from .vuln import CouplingChain

    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", str(path), exc.lineno) from exc
    try:
        chains = [CouplingChain.from_dict(c) for c in doc["chains"]]
        usage = list(doc.get("channels", []))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad chain document: {exc}", str(path), 0) from exc
    return chains, usage
