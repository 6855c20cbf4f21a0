"""Event fingerprints: fixed-shape feature matrices over packet bursts.

A burst of up to 15 Data packets becomes a 4-row matrix (size, direction,
inter-packet interval, layer tag), one column per packet, zero-padded on the
right. Flattening is packet-major so each packet's four features stay
adjacent in the classifier's input vector.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import PacketRecord, ValidationError, filter_unrelated

log = logging.getLogger(__name__)

FEATURE_ROWS = 4          # size, direction, interval, layer
DEFAULT_MAX_PACKETS = 15


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray   # shape (FEATURE_ROWS, max_packets), float64
    n_real: int

    def flat(self) -> np.ndarray:
        """Packet-major flattening: packet 0's features first."""
        return self.values.flatten(order="F")

    @property
    def max_packets(self) -> int:
        return self.values.shape[1]


def featurize(packets: list[PacketRecord], max_packets: int = DEFAULT_MAX_PACKETS) -> FeatureMatrix:
    """Build the feature matrix for one burst of already-filtered packets.

    The first packet's interval is 0 by convention. Bursts longer than
    max_packets are a contract violation, not silent truncation.
    """
    n = len(packets)
    if n == 0:
        raise ValidationError("cannot featurize an empty burst")
    if n > max_packets:
        raise ValidationError(f"burst of {n} packets exceeds the {max_packets}-packet cap")
    values = np.zeros((FEATURE_ROWS, max_packets), dtype=np.float64)
    prev_ts = packets[0].ts
    for j, p in enumerate(packets):
        values[0, j] = p.size
        values[1, j] = p.direction
        values[2, j] = p.ts - prev_ts
        values[3, j] = p.layer
        prev_ts = p.ts
    return FeatureMatrix(values, n)


def assemble_samples(packets: list[PacketRecord],
                     labels: list[tuple[int, float, float]],
                     max_packets: int = DEFAULT_MAX_PACKETS,
                     ) -> list[tuple[int, FeatureMatrix]]:
    """Cut labeled spans out of a trace and featurize each one.

    Noise frames are dropped first. Spans that are empty or overflow the
    packet cap (overlapping transmissions) are skipped with a warning so one
    bad label cannot poison a training set.
    """
    data = filter_unrelated(packets)
    ts = np.array([p.ts for p in data])
    eps = 1e-9
    out: list[tuple[int, FeatureMatrix]] = []
    skipped = 0
    for eid, t0, t1 in labels:
        lo = int(np.searchsorted(ts, t0 - eps, side="left"))
        hi = int(np.searchsorted(ts, t1 + eps, side="right"))
        burst = data[lo:hi]
        if not burst or len(burst) > max_packets:
            skipped += 1
            continue
        out.append((eid, featurize(burst, max_packets)))
    if skipped:
        log.warning("skipped %d labeled spans (empty or oversized)", skipped)
    return out


def aligned_samples(packets: list[PacketRecord],
                    labels: list[tuple[int, float, float]],
                    max_packets: int = DEFAULT_MAX_PACKETS,
                    window_seconds: float = 2.1,
                    ) -> list[tuple[int, FeatureMatrix]]:
    """Cut training windows the way the detector cuts scan windows.

    Each label yields the window starting at its first surviving packet: up
    to max_packets packets within window_seconds of that packet. On a busy
    trace the tail of a window can hold the next transmission's head, which
    is exactly what the detector will see at that position, so a classifier
    trained on these windows is robust to back-to-back events. Labels whose
    packets were all lost are skipped.

    Do not feed these to step_counts: window packet counts include trailing
    foreign packets. Compute steps from isolated bursts instead.
    """
    data = filter_unrelated(packets)
    ts = np.array([p.ts for p in data])
    eps = 1e-9
    out: list[tuple[int, FeatureMatrix]] = []
    skipped = 0
    for eid, t0, t1 in labels:
        lo = int(np.searchsorted(ts, t0 - eps, side="left"))
        if lo >= len(data) or ts[lo] > t1 + eps:
            skipped += 1
            continue
        hi = lo
        limit = ts[lo] + window_seconds
        while hi < len(data) and hi - lo < max_packets and ts[hi] <= limit:
            hi += 1
        out.append((eid, featurize(data[lo:hi], max_packets)))
    if skipped:
        log.warning("skipped %d labels with no surviving packets", skipped)
    return out


def step_counts(samples: list[tuple[int, FeatureMatrix]]) -> dict[int, int]:
    """Median real-packet count per event id; the detector's step table."""
    lengths: dict[int, list[int]] = {}
    for eid, fm in samples:
        lengths.setdefault(eid, []).append(fm.n_real)
    return {eid: int(round(float(np.median(v)))) for eid, v in sorted(lengths.items())}
