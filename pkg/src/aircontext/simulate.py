"""Event-level traffic simulator with anomaly injection.

Generative model: spontaneous sensor events arrive as independent Poisson
processes; automation rules fire when their trigger events occur (AND-joined
triggers must all land within a join window) and emit condition-report and
action events downstream, each delayed by a Gaussian reaction time from the
end of the previous transmission. Every event occurrence expands to its
template's packet burst with Gaussian jitter on the inter-packet gaps.
Beacon/ack/link-maintenance chatter is overlaid as Poisson noise.

All randomness flows from one seeded generator in a fixed draw order, so a
given (templates, rules, config) triple reproduces byte-identical output.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    DEVICE_TO_HUB,
    HUB_TO_DEVICE,
    ConditionNode,
    ConfigError,
    EventId,
    PacketKind,
    PacketRecord,
    ValidationError,
)

log = logging.getLogger(__name__)

# Longest event burst the detector window can hold, and the window span.
MAX_TEMPLATE_PACKETS = 15
MAX_TEMPLATE_SECONDS = 2.1

_MIN_GAP = 1e-4     # jitter never reorders packets within a burst
_MIN_DELAY = 1e-3   # reaction delays stay strictly positive
_CHAIN_GRACE = 300.0  # cap on how far past the horizon rule cascades may run
_QUIET_MARGIN = 2.5   # spoofing keeps clear of every other occurrence by this much

_NOISE_SIZES = {PacketKind.BEACON: (32, 40, 48), PacketKind.ACK: (12,), PacketKind.LINK: (24, 28)}
_NOISE_KINDS = (PacketKind.BEACON, PacketKind.ACK, PacketKind.LINK)


@dataclass(frozen=True)
class EventTemplate:
    """Packet-burst signature of one event: sizes, directions, gaps, layers.

    base_intervals[i] is the mean gap between packet i-1 and packet i, with
    base_intervals[0] == 0. The sum of gaps is the event's mean duration.
    """

    event: EventId
    sizes: tuple[int, ...]
    directions: tuple[int, ...]
    base_intervals: tuple[float, ...]
    layer_tags: tuple[int, ...]
    jitter_sigma: float = 0.008

    def __post_init__(self):
        n = len(self.sizes)
        if not 1 <= n <= MAX_TEMPLATE_PACKETS:
            raise ValidationError(f"template {self.event.label}: {n} packets, must be 1..{MAX_TEMPLATE_PACKETS}")
        if not (len(self.directions) == len(self.base_intervals) == len(self.layer_tags) == n):
            raise ValidationError(f"template {self.event.label}: field lengths differ")
        if self.base_intervals[0] != 0.0:
            raise ValidationError(f"template {self.event.label}: first interval must be 0")
        if any(g < 0 for g in self.base_intervals):
            raise ValidationError(f"template {self.event.label}: negative interval")
        if self.duration > MAX_TEMPLATE_SECONDS:
            raise ValidationError(f"template {self.event.label}: duration {self.duration:.4f}s "
                                  f"exceeds {MAX_TEMPLATE_SECONDS}s")
        if self.jitter_sigma < 0:
            raise ValidationError(f"template {self.event.label}: negative jitter")
        if any(d not in (DEVICE_TO_HUB, HUB_TO_DEVICE) for d in self.directions):
            raise ValidationError(f"template {self.event.label}: bad direction")

    @property
    def duration(self) -> float:
        return float(sum(self.base_intervals))

    @property
    def device(self) -> str:
        return self.event.label.split("/", 1)[0]


@dataclass(frozen=True)
class AppRule:
    """One automation: trigger event(s), optional condition report, actions.

    Multiple triggers are AND-joined. The condition, when present, names the
    attribute-report event the hub consults; on firing it is transmitted
    between trigger and actions, which is exactly where it shows up on the
    air. reaction_delay_sigma may be 0 for fully deterministic timing.
    """

    app_id: str
    triggers: tuple[int, ...]
    actions: tuple[int, ...]
    condition_event: int | None = None
    condition: ConditionNode | None = None
    reaction_delay_mu: float = 0.5
    reaction_delay_sigma: float = 0.05

    def __post_init__(self):
        if not self.triggers or not self.actions:
            raise ValidationError(f"rule {self.app_id}: needs at least one trigger and one action")
        if self.reaction_delay_mu <= 0:
            raise ValidationError(f"rule {self.app_id}: reaction_delay_mu must be > 0")
        if self.reaction_delay_sigma < 0:
            raise ValidationError(f"rule {self.app_id}: reaction_delay_sigma must be >= 0")
        if self.condition is not None and self.condition_event is None:
            raise ValidationError(f"rule {self.app_id}: condition payload without condition_event")

    def emission_chain(self) -> tuple[int, ...]:
        head = (self.condition_event,) if self.condition_event is not None else ()
        return head + self.actions


@dataclass(frozen=True)
class AnomalySpec:
    """What to inject: kind, optional target app (None = rotate over all),
    how many sites, and for overprivilege an optional explicit extra event."""

    kind: str
    app: str | None = None
    count: int = 1
    extra_event: int | None = None
    seed: int = 0
    lookback: float = 10.0

    def __post_init__(self):
        if self.kind not in ("spoofing", "misbehavior", "overprivilege"):
            raise ValidationError(f"unknown anomaly kind {self.kind!r}")
        if self.count < 1:
            raise ValidationError("anomaly count must be >= 1")


@dataclass(frozen=True)
class AnomalyInjection:
    kind: str
    app: str
    ts: float
    events: tuple[int, ...]


@dataclass
class SimConfig:
    duration: float
    trigger_rates: dict[int, float] = field(default_factory=dict)
    background_rate: float = 0.0
    seed: int = 0
    loss_rate: float = 0.0
    join_window: float = MAX_TEMPLATE_SECONDS

    def __post_init__(self):
        if self.duration <= 0:
            raise ConfigError("duration must be > 0")
        if any(r < 0 for r in self.trigger_rates.values()):
            raise ConfigError("trigger rates must be >= 0")
        if not 0 <= self.loss_rate < 1:
            raise ConfigError("loss_rate must be in [0, 1)")


TruthEntry = tuple[int, float, float]  # (event_id, t_start, t_end)


def _expand(template: EventTemplate, t0: float, rng: np.random.Generator,
            seq_start: int) -> tuple[list[tuple[float, int, PacketRecord]], float]:
    """Expand one event occurrence into jittered packets starting at t0."""
    device = template.device
    rows = []
    t = t0
    for i in range(len(template.sizes)):
        if i > 0:
            gap = template.base_intervals[i]
            if template.jitter_sigma > 0:
                gap += rng.normal(0.0, template.jitter_sigma)
            t += max(gap, _MIN_GAP)
        direction = template.directions[i]
        src, dst = (device, "hub") if direction == DEVICE_TO_HUB else ("hub", device)
        rec = PacketRecord(t, template.sizes[i], direction, template.layer_tags[i],
                           PacketKind.DATA, src, dst)
        rows.append((t, seq_start + i, rec))
    return rows, t


def _check_ids(templates: dict[int, EventTemplate], rules: list[AppRule], config: SimConfig) -> None:
    for eid in config.trigger_rates:
        if eid not in templates:
            raise ConfigError(f"trigger rate for unknown event id {eid}")
    for rule in rules:
        for eid in rule.triggers + rule.emission_chain():
            if eid not in templates:
                raise ConfigError(f"rule {rule.app_id} references event id {eid} with no template")


def simulate(templates: dict[int, EventTemplate], rules: list[AppRule],
             config: SimConfig) -> tuple[list[PacketRecord], list[TruthEntry]]:
    """Run the generative model; returns (sorted packet trace, truth log).

    Truth entries are (event_id, t_start, t_end) with t_start equal to the
    first packet's timestamp, sorted by t_start.
    """
    _check_ids(templates, rules, config)
    rng = np.random.default_rng(config.seed)

    # Spontaneous arrivals, drawn per event id in sorted order.
    heap: list[tuple[float, int, int, tuple]] = []
    seq = 0
    for eid in sorted(config.trigger_rates):
        rate = config.trigger_rates[eid]
        if rate <= 0:
            continue
        t = 0.0
        while True:
            t += rng.exponential(1.0 / rate)
            if t > config.duration:
                break
            heapq.heappush(heap, (t, seq, eid, ()))
            seq += 1

    by_trigger: dict[int, list[AppRule]] = {}
    for rule in rules:
        for eid in rule.triggers:
            by_trigger.setdefault(eid, []).append(rule)
    # AND-join bookkeeping: per rule, last start time seen per trigger type.
    pending: dict[str, dict[int, float]] = {r.app_id: {} for r in rules}

    packets: list[tuple[float, int, PacketRecord]] = []
    truth: list[TruthEntry] = []
    pkt_seq = 0

    while heap:
        t0, _, eid, chain = heapq.heappop(heap)
        tmpl = templates[eid]
        rows, t_end = _expand(tmpl, t0, rng, pkt_seq)
        pkt_seq += len(rows)
        packets.extend(rows)
        truth.append((eid, t0, t_end))

        if chain:
            # Continue a rule cascade: next hop after this transmission ends.
            nxt_ids, mu, sigma = chain
            if nxt_ids:
                delay = rng.normal(mu, sigma) if sigma > 0 else mu
                t_next = t_end + max(delay, _MIN_DELAY)
                if t_next <= config.duration + _CHAIN_GRACE:
                    heapq.heappush(heap, (t_next, seq, nxt_ids[0], (nxt_ids[1:], mu, sigma)))
                    seq += 1
                else:
                    log.warning("cascade past horizon dropped (event %d at %.1f)", nxt_ids[0], t_next)

        for rule in by_trigger.get(eid, ()):  # may fire rules
            seen = pending[rule.app_id]
            seen[eid] = t0
            starts = [seen.get(tr) for tr in rule.triggers]
            if any(s is None for s in starts):
                continue
            if max(starts) - min(starts) > config.join_window:
                continue
            seen.clear()
            ids = rule.emission_chain()
            delay = rng.normal(rule.reaction_delay_mu, rule.reaction_delay_sigma) \
                if rule.reaction_delay_sigma > 0 else rule.reaction_delay_mu
            t_next = t_end + max(delay, _MIN_DELAY)
            if t_next <= config.duration + _CHAIN_GRACE:
                heapq.heappush(heap, (t_next, seq, ids[0],
                                      (ids[1:], rule.reaction_delay_mu, rule.reaction_delay_sigma)))
                seq += 1
            else:
                log.warning("rule %s fired past horizon, dropped", rule.app_id)

    # Background chatter over [0, duration].
    if config.background_rate > 0:
        t = 0.0
        while True:
            t += rng.exponential(1.0 / config.background_rate)
            if t > config.duration:
                break
            kind = _NOISE_KINDS[int(rng.integers(0, len(_NOISE_KINDS)))]
            sizes = _NOISE_SIZES[kind]
            size = sizes[int(rng.integers(0, len(sizes)))]
            direction = int(rng.integers(0, 2))
            src, dst = ("hub", "broadcast") if direction == HUB_TO_DEVICE else ("router", "hub")
            packets.append((t, pkt_seq, PacketRecord(t, size, direction, 0, kind, src, dst)))
            pkt_seq += 1

    if config.loss_rate > 0:
        keep = rng.random(len(packets)) >= config.loss_rate
        packets = [row for row, k in zip(packets, keep) if k]

    packets.sort(key=lambda row: (row[0], row[1]))
    truth.sort(key=lambda e: e[1])
    return [rec for _, _, rec in packets], truth


# ---------------------------------------------------------------------------
# Anomaly injection
# ---------------------------------------------------------------------------

def _firing_sites(truth: list[TruthEntry], rule: AppRule, max_lag: float) -> list[tuple[int, int]]:
    """Indices (trigger_idx, action_idx) of plausible firings of the rule."""
    trigger = rule.triggers[-1]
    action = rule.actions[0]
    sites = []
    for i, (eid, t0, _t1) in enumerate(truth):
        if eid != trigger:
            continue
        for j in range(i + 1, len(truth)):
            ej, tj, _ = truth[j]
            if tj - t0 > max_lag:
                break
            if ej == action:
                sites.append((i, j))
                break
    return sites


def _remove_occurrence(packets: list[PacketRecord], template: EventTemplate,
                       t0: float, t1: float) -> list[PacketRecord] | None:
    """Drop the Data packets of one occurrence; None if the span is tangled."""
    device = template.device
    eps = 1e-9
    hit = [p for p in packets
           if p.kind is PacketKind.DATA and (p.src == device or p.dst == device)
           and t0 - eps <= p.ts <= t1 + eps]
    if len(hit) != len(template.sizes):
        return None
    hit_set = set(id(p) for p in hit)
    return [p for p in packets if id(p) not in hit_set]


def inject_anomaly(packets: list[PacketRecord], truth: list[TruthEntry],
                   templates: dict[int, EventTemplate], rules: list[AppRule],
                   spec: AnomalySpec,
                   ) -> tuple[list[PacketRecord], list[TruthEntry], list[AnomalyInjection]]:
    """Tamper with a simulated trace; returns edited copies plus the injection log.

    Spoofing plants action bursts with no trigger anywhere in the lookback
    window. Misbehavior erases the action of a legitimate firing. Over-
    privilege appends an extra command a reaction delay after a legitimate
    action started.
    """
    if spec.app is not None:
        targets = [r for r in rules if r.app_id == spec.app]
        if not targets:
            raise ConfigError(f"anomaly target app {spec.app!r} not in rules")
    else:
        targets = sorted(rules, key=lambda r: r.app_id)
    rng = np.random.default_rng(spec.seed)
    packets = list(packets)
    truth = list(truth)
    injections: list[AnomalyInjection] = []
    horizon = max((p.ts for p in packets), default=0.0)
    # Sites key on the trigger's (event, time), not its truth index: removals
    # shift indices.
    used_sites: set[tuple[str, int, float]] = set()

    def site_key(rule: AppRule, i: int) -> tuple[str, int, float]:
        return rule.app_id, truth[i][0], truth[i][1]

    pkt_seq = 10_000_000  # tie-break region distinct from the base trace
    made = 0
    attempt = 0
    while made < spec.count:
        rule = targets[made % len(targets)]
        attempt += 1
        if attempt > spec.count * 2000:
            raise ConfigError(f"could not place {spec.kind} injection #{made + 1}; trace too crowded")

        if spec.kind == "spoofing":
            t_star = float(rng.uniform(spec.lookback, max(horizon - 5.0, spec.lookback + 1.0)))
            involved = set(rule.triggers) | set(rule.actions)
            clear = all(not (t_star - spec.lookback <= t0 <= t_star + spec.lookback)
                        for eid, t0, _ in truth if eid in involved)
            if not clear:
                continue
            # Quiet spot: a burst planted right after an unrelated occurrence
            # would read as that occurrence's trailing command, not a spoof.
            burst = sum(templates[a].duration for a in rule.actions) \
                + max(len(rule.actions) - 1, 0) * rule.reaction_delay_mu
            lo, hi = t_star - _QUIET_MARGIN, t_star + burst + _QUIET_MARGIN
            if any(t0 <= hi and t1 >= lo for _, t0, t1 in truth):
                continue
            t = t_star
            new_events = []
            for k, action in enumerate(rule.actions):
                if k > 0:
                    d = rng.normal(rule.reaction_delay_mu, rule.reaction_delay_sigma) \
                        if rule.reaction_delay_sigma > 0 else rule.reaction_delay_mu
                    t += max(d, _MIN_DELAY)
                rows, t_end = _expand(templates[action], t, rng, pkt_seq)
                pkt_seq += len(rows)
                packets.extend(rec for _, _, rec in rows)
                truth.append((action, t, t_end))
                new_events.append(action)
                t = t_end
            injections.append(AnomalyInjection("spoofing", rule.app_id, t_star, tuple(new_events)))
            made += 1

        elif spec.kind == "misbehavior":
            sites = [s for s in _firing_sites(truth, rule, spec.lookback)
                     if site_key(rule, s[0]) not in used_sites]
            if not sites:
                continue
            i, j = sites[int(rng.integers(0, len(sites)))]
            trig_eid, trig_t0, _ = truth[i]
            act_eid, act_t0, act_t1 = truth[j]
            edited = _remove_occurrence(packets, templates[act_eid], act_t0, act_t1)
            used_sites.add(site_key(rule, i))
            if edited is None:
                continue  # overlapping same-device traffic, pick another site
            packets = edited
            del truth[j]
            injections.append(AnomalyInjection("misbehavior", rule.app_id, trig_t0, (act_eid,)))
            made += 1

        else:  # overprivilege
            extra = spec.extra_event
            if extra is None:
                pool = sorted({a for r in rules for a in r.actions if a not in rule.actions})
                if not pool:
                    raise ConfigError("no candidate extra event for overprivilege")
                extra = pool[made % len(pool)]
            if extra not in templates:
                raise ConfigError(f"extra event {extra} has no template")
            sites = [s for s in _firing_sites(truth, rule, spec.lookback)
                     if site_key(rule, s[0]) not in used_sites]
            if not sites:
                continue
            i, j = sites[int(rng.integers(0, len(sites)))]
            used_sites.add(site_key(rule, i))
            act_eid, act_t0, _ = truth[j]
            d = rng.normal(rule.reaction_delay_mu, rule.reaction_delay_sigma) \
                if rule.reaction_delay_sigma > 0 else rule.reaction_delay_mu
            t_extra = act_t0 + max(d, _MIN_DELAY)
            rows, t_end = _expand(templates[extra], t_extra, rng, pkt_seq)
            pkt_seq += len(rows)
            packets.extend(rec for _, _, rec in rows)
            truth.append((extra, t_extra, t_end))
            injections.append(AnomalyInjection("overprivilege", rule.app_id, t_extra, (extra,)))
            made += 1

    packets.sort(key=lambda p: p.ts)
    truth.sort(key=lambda e: e[1])
    return packets, truth, injections
