"""Sliding-window event detection over a filtered packet stream.

At each window start the detector takes up to max_packets packets that fall
inside window_seconds, classifies the burst, and emits an event when the top
vote fraction clears the threshold. A hit advances the start by the detected
event's canonical packet count so one transmission is never reported twice;
a miss advances by one packet. Interleaved transmissions are classified as a
whole window, first class over threshold wins.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fingerprint import DEFAULT_MAX_PACKETS, featurize
from .forest import RandomForest
from .model import ConfigError, DetectedEvent, EventRegistry, PacketRecord, filter_unrelated


@dataclass
class DetectorParams:
    max_packets: int = DEFAULT_MAX_PACKETS
    window_seconds: float = 2.1
    threshold: float = 0.7
    step_counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.max_packets < 1:
            raise ConfigError("max_packets must be >= 1")
        if self.window_seconds <= 0:
            raise ConfigError("window_seconds must be > 0")
        if not 0 <= self.threshold <= 1:
            raise ConfigError("threshold must be in [0, 1]")
        if any(c < 1 for c in self.step_counts.values()):
            raise ConfigError("step counts must be >= 1")

    def to_json(self, path: str) -> None:
        doc = {"max_packets": self.max_packets, "window_seconds": self.window_seconds,
               "threshold": self.threshold,
               "step_counts": {str(k): v for k, v in sorted(self.step_counts.items())}}
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")

    @classmethod
    def from_json(cls, path: str) -> "DetectorParams":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(int(doc["max_packets"]), float(doc["window_seconds"]),
                   float(doc["threshold"]),
                   {int(k): int(v) for k, v in doc["step_counts"].items()})


def detect_events(packets: list[PacketRecord], clf: RandomForest,
                  params: DetectorParams,
                  registry: EventRegistry | None = None) -> list[DetectedEvent]:
    """Scan a trace and return the detected event stream, ordered by time.

    Noise frames are filtered here so callers can pass raw traces. Event ids
    missing from the step table step by their window's real packet count.
    """
    data = filter_unrelated(packets)
    n = len(data)
    ts = np.array([p.ts for p in data])
    out: list[DetectedEvent] = []
    i = 0
    while i < n:
        hi = i
        limit = ts[i] + params.window_seconds
        while hi < n and hi - i < params.max_packets and ts[hi] <= limit:
            hi += 1
        fm = featurize(data[i:hi], params.max_packets)
        frac = clf.vote_fractions(fm.flat())
        k = int(np.argmax(frac))
        conf = float(frac[k])
        if conf > params.threshold:
            eid = clf.classes[k]
            step = params.step_counts.get(eid, hi - i)
            span = (i, i + min(step, hi - i) - 1)
            event = registry.lookup(eid) if registry is not None else _bare_event(eid)
            out.append(DetectedEvent(event, float(ts[i]), conf, span))
            i += step
        else:
            i += 1
    return out


def _bare_event(eid: int):
    from .model import EventId
    return EventId(eid, f"event-{eid}")
