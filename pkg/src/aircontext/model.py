"""Core data model: packets, events, graphs, channels, and the event registry.

Everything downstream (simulator, detector, miner, checker) trades in these
types. Identifiers are small and global: an event id is a dense integer
assigned per (device instance, command) pair by :class:`EventRegistry`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class EngineError(Exception):
    """Base class for errors raised by this package."""


class ParseError(EngineError):
    """Malformed interchange file; carries path and 1-based line number."""

    def __init__(self, message: str, path: str = "", line: int = 0):
        self.path = path
        self.line = line
        where = f"{path}:{line}: " if path else ""
        super().__init__(f"{where}{message}")


class ValidationError(EngineError):
    """A value violates a structural contract."""


class VocabularyError(EngineError):
    """Command or attribute not present in the capability vocabulary."""


class ConsistencyError(EngineError):
    """Two artifacts disagree about shared identifiers (registry mismatch)."""


class ConfigError(EngineError):
    """Bad or incomplete configuration."""


class TrainingError(EngineError):
    """Classifier training cannot proceed (empty or degenerate sample set)."""


# Packet direction: 0 = device to hub, 1 = hub to device.
DEVICE_TO_HUB = 0
HUB_TO_DEVICE = 1


class PacketKind(str, enum.Enum):
    DATA = "data"
    BEACON = "beacon"
    ACK = "ack"
    LINK = "link"


@dataclass(frozen=True, slots=True)
class PacketRecord:
    """One sniffed frame. Timestamps are trace-relative seconds (float64)."""

    ts: float
    size: int
    direction: int
    layer: int
    kind: PacketKind
    src: str
    dst: str

    def __post_init__(self):
        if self.size < 1:
            raise ValidationError(f"packet size must be >= 1, got {self.size}")
        if self.direction not in (DEVICE_TO_HUB, HUB_TO_DEVICE):
            raise ValidationError(f"direction must be 0 or 1, got {self.direction}")
        if self.ts < 0:
            raise ValidationError(f"timestamp must be >= 0, got {self.ts}")


def filter_unrelated(packets: list[PacketRecord]) -> list[PacketRecord]:
    """Drop beacon, ack, and link-maintenance frames; keep Data only.

    Order is preserved. Event payloads ride exclusively on Data frames, so
    this is the first step of every consumer.
    """
    return [p for p in packets if p.kind is PacketKind.DATA]


@dataclass(frozen=True, slots=True)
class EventId:
    """Dense global identifier for one (device instance, command) pair."""

    id: int
    label: str

    def __int__(self) -> int:
        return self.id

    def __lt__(self, other: "EventId") -> bool:
        return self.id < other.id


@dataclass(frozen=True, slots=True)
class DetectedEvent:
    event: EventId
    ts: float
    confidence: float
    packet_span: tuple[int, int]


@dataclass(frozen=True, slots=True)
class ConditionNode:
    """Guard on a graph node: attribute compared against a threshold."""

    attribute: str
    op: str
    threshold: float = 0.0

    def __post_init__(self):
        if self.op not in ("<", ">", "="):
            raise ValidationError(f"condition op must be one of < > =, got {self.op!r}")


class GraphSource(str, enum.Enum):
    IOT = "iot"
    WIRELESS = "wireless"


@dataclass(frozen=True, slots=True)
class GraphNode:
    event: EventId
    condition: ConditionNode | None = None


class GraphShape(enum.Enum):
    PATH = "path"
    AND_JOIN = "and_join"     # several roots converge on one successor
    FAN_OUT = "fan_out"       # a path prefix ends in parallel terminal actions
    OTHER = "other"


@dataclass
class EventTransitionGraph:
    """Directed acyclic graph of event ids; edges mean "then leads to".

    IoT-source graphs come from app descriptions and may carry condition
    payloads; wireless-source graphs are mined from traffic and are plain
    paths. Matching compares node-id sets and edge sets only.
    """

    graph_id: str
    source: GraphSource
    nodes: list[GraphNode]
    edges: list[tuple[int, int]]
    occurrence_count: int | None = None

    def __post_init__(self):
        self.validate()

    def node_ids(self) -> list[int]:
        return [n.event.id for n in self.nodes]

    def validate(self) -> None:
        ids = self.node_ids()
        if len(set(ids)) != len(ids):
            raise ValidationError(f"{self.graph_id}: duplicate node ids")
        known = set(ids)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ValidationError(f"{self.graph_id}: edge ({a},{b}) references unknown node")
        if len(set(self.edges)) != len(self.edges):
            raise ValidationError(f"{self.graph_id}: duplicate edges")
        # Kahn's algorithm; leftovers mean a cycle.
        indeg = {i: 0 for i in ids}
        succ: dict[int, list[int]] = {i: [] for i in ids}
        for a, b in self.edges:
            indeg[b] += 1
            succ[a].append(b)
        queue = [i for i in ids if indeg[i] == 0]
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for m in succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
        if seen != len(ids):
            raise ValidationError(f"{self.graph_id}: cycle detected")
        # In a finite DAG every node is reachable from some in-degree-0 node;
        # asserted here to document the contract.
        if ids and not [i for i in ids if not any(b == i for _, b in self.edges)]:
            raise ValidationError(f"{self.graph_id}: no root node")

    def roots(self) -> list[int]:
        targets = {b for _, b in self.edges}
        return [i for i in self.node_ids() if i not in targets]

    def terminals(self) -> list[int]:
        sources = {a for a, _ in self.edges}
        return [i for i in self.node_ids() if i not in sources]

    def node_for(self, event_id: int) -> GraphNode:
        for n in self.nodes:
            if n.event.id == event_id:
                return n
        raise KeyError(event_id)

    def shape(self) -> GraphShape:
        ids = self.node_ids()
        out: dict[int, list[int]] = {i: [] for i in ids}
        inc: dict[int, list[int]] = {i: [] for i in ids}
        for a, b in self.edges:
            out[a].append(b)
            inc[b].append(a)
        roots = self.roots()
        if all(len(out[i]) <= 1 and len(inc[i]) <= 1 for i in ids) and len(roots) == 1:
            return GraphShape.PATH
        if len(roots) > 1:
            # All roots must point at the same join node, rest must be a path.
            heads = {tuple(out[r]) for r in roots}
            if len(heads) == 1 and len(next(iter(heads))) == 1:
                join = next(iter(heads))[0]
                rest = [i for i in ids if i not in roots]
                if all(len(out[i]) <= 1 and len(inc[i]) <= 1 for i in rest if i != join):
                    if len(out[join]) <= 1:
                        return GraphShape.AND_JOIN
            return GraphShape.OTHER
        if len(roots) == 1 and all(len(inc[i]) <= 1 for i in ids):
            branch = [i for i in ids if len(out[i]) > 1]
            if len(branch) == 1 and all(len(out[t]) == 0 for t in out[branch[0]]):
                return GraphShape.FAN_OUT
        return GraphShape.OTHER

    def linearize(self) -> tuple[list[int], list[int]]:
        """Return (roots, ordered remainder) for PATH and AND_JOIN shapes.

        For a path the roots list has one element and the remainder is the
        rest of the chain in order. Raises ValidationError for shapes with
        no single linear spine.
        """
        shp = self.shape()
        succ = {a: b for a, b in self.edges}
        if shp is GraphShape.PATH:
            order = [self.roots()[0]]
            while order[-1] in succ:
                order.append(succ[order[-1]])
            return order[:1], order[1:]
        if shp is GraphShape.AND_JOIN:
            roots = sorted(self.roots())
            chain = [succ[roots[0]]]
            while chain[-1] in succ:
                chain.append(succ[chain[-1]])
            return roots, chain
        raise ValidationError(f"{self.graph_id}: shape {shp.value} has no linearization")

    def full_sequence(self) -> list[int]:
        roots, rest = self.linearize()
        return roots + rest


def path_graph(graph_id: str, source: GraphSource, nodes: list[GraphNode],
               occurrence_count: int | None = None) -> EventTransitionGraph:
    """Convenience constructor: chain the given nodes in order."""
    edges = [(nodes[i].event.id, nodes[i + 1].event.id) for i in range(len(nodes) - 1)]
    return EventTransitionGraph(graph_id, source, nodes, edges, occurrence_count)


# ---------------------------------------------------------------------------
# Capability vocabulary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Capability:
    name: str
    attribute: str
    values: tuple[str, ...]
    commands: tuple[str, ...]


class CapabilityVocabulary:
    """Resolves event strings like "motion.active" or "switch.on()".

    The part before the first dot names an attribute; the remainder is either
    an attribute value ("active", or "value" for numeric reports) or a
    command when it ends with "()".
    """

    def __init__(self, capabilities: list[Capability]):
        self._by_attr: dict[str, Capability] = {}
        for cap in capabilities:
            if cap.attribute in self._by_attr:
                raise ValidationError(f"duplicate attribute {cap.attribute!r} in vocabulary")
            self._by_attr[cap.attribute] = cap
        self.capabilities = list(capabilities)

    def resolve(self, event_str: str) -> tuple[Capability, str]:
        """Return (capability, "command"|"attribute") or raise VocabularyError."""
        if "." not in event_str:
            raise VocabularyError(f"malformed event string {event_str!r}")
        attr, _, tail = event_str.partition(".")
        cap = self._by_attr.get(attr)
        if cap is None:
            raise VocabularyError(f"unknown attribute {attr!r} in {event_str!r}")
        if tail.endswith("()"):
            if tail not in cap.commands:
                raise VocabularyError(f"unknown command {tail!r} for capability {cap.name}")
            return cap, "command"
        if tail not in cap.values:
            raise VocabularyError(f"unknown value {tail!r} for attribute {attr!r}")
        return cap, "attribute"

    def is_command(self, event_str: str) -> bool:
        return self.resolve(event_str)[1] == "command"


# ---------------------------------------------------------------------------
# Event registry
# ---------------------------------------------------------------------------

class EventRegistry:
    """Bijective map between dense integer ids and (device, command) pairs.

    Ids start at 1 and grow by one per new registration; re-registering an
    existing pair returns the existing id. When a vocabulary is attached,
    commands are validated on registration.
    """

    def __init__(self, vocabulary: CapabilityVocabulary | None = None):
        self._vocabulary = vocabulary
        self._by_pair: dict[tuple[str, str], EventId] = {}
        self._by_id: dict[int, tuple[str, str]] = {}

    @property
    def vocabulary(self) -> CapabilityVocabulary | None:
        return self._vocabulary

    def register(self, device: str, command: str) -> EventId:
        key = (device, command)
        if key in self._by_pair:
            return self._by_pair[key]
        if self._vocabulary is not None:
            self._vocabulary.resolve(command)  # raises VocabularyError if unknown
        eid = EventId(len(self._by_pair) + 1, f"{device}/{command}")
        self._by_pair[key] = eid
        self._by_id[eid.id] = key
        return eid

    def lookup(self, event_id: int) -> EventId:
        if event_id not in self._by_id:
            raise ConsistencyError(f"event id {event_id} not in registry")
        device, command = self._by_id[event_id]
        return EventId(event_id, f"{device}/{command}")

    def pair(self, event_id: int) -> tuple[str, str]:
        if event_id not in self._by_id:
            raise ConsistencyError(f"event id {event_id} not in registry")
        return self._by_id[event_id]

    def find(self, device: str, command: str) -> EventId:
        key = (device, command)
        if key not in self._by_pair:
            raise ConsistencyError(f"({device}, {command}) not in registry")
        return self._by_pair[key]

    def __len__(self) -> int:
        return len(self._by_pair)

    def __contains__(self, event_id: int) -> bool:
        return event_id in self._by_id

    def items(self) -> list[tuple[EventId, tuple[str, str]]]:
        return [(self.lookup(i), self._by_id[i]) for i in sorted(self._by_id)]

    def device_kind(self, event_id: int) -> str:
        return device_kind(self.pair(event_id)[0])


# ---------------------------------------------------------------------------
# Channel map
# ---------------------------------------------------------------------------

class ChannelType(str, enum.Enum):
    CAPABILITY = "capability"
    PHYSICAL = "physical"
    SYSTEM = "system"


def device_kind(device: str) -> str:
    """Strip a trailing _<n> instance suffix: "heater_2" -> "heater"."""
    stem, _, suffix = device.rpartition("_")
    return stem if stem and suffix.isdigit() else device


@dataclass(frozen=True)
class ChannelEndpoint:
    """One writer/reader entry: an event string plus optional device kind.

    Serialized as "switch.on()@heater" (kind-qualified) or "temperature.value"
    (any device).
    """

    event_str: str
    device_kind: str | None = None

    @classmethod
    def parse(cls, raw: str) -> "ChannelEndpoint":
        if "@" in raw:
            ev, _, kind = raw.partition("@")
            if not kind:
                raise ValidationError(f"empty device kind in endpoint {raw!r}")
            return cls(ev, kind)
        return cls(raw, None)

    def unparse(self) -> str:
        return f"{self.event_str}@{self.device_kind}" if self.device_kind else self.event_str

    def matches_pair(self, device: str, command: str) -> bool:
        if command != self.event_str:
            return False
        return self.device_kind is None or device_kind(device) == self.device_kind

    def matches(self, event_id: int, registry: EventRegistry) -> bool:
        return self.matches_pair(*registry.pair(event_id))


@dataclass(frozen=True)
class Channel:
    name: str
    type: ChannelType
    writers: tuple[ChannelEndpoint, ...]
    readers: tuple[ChannelEndpoint, ...]


class ChannelMap:
    def __init__(self, channels: list[Channel]):
        names = [c.name for c in channels]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate channel names")
        self.channels = list(channels)

    def validate_against(self, vocabulary: CapabilityVocabulary) -> None:
        """Every endpoint string must resolve in the vocabulary."""
        for ch in self.channels:
            for ep in ch.writers + ch.readers:
                vocabulary.resolve(ep.event_str)

    def __iter__(self):
        return iter(self.channels)

    def __len__(self) -> int:
        return len(self.channels)
