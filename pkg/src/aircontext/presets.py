"""Ready-made device fleets, rule sets, and scenario corpora.

Everything here is deterministic: burst shapes are fixed tables or derive
from a fixed arithmetic pattern, so repeated calls produce identical
registries and, downstream, byte-identical artifacts.  Three corpora cover
the usual needs: a five-device testbed for classifier work, a 35-rule
populated home for mining and compliance runs, and a six-app home wired
through simulated physics for coupling analysis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .model import (
    CapabilityVocabulary,
    ChannelMap,
    EventRegistry,
    EventTransitionGraph,
    GraphNode,
    GraphSource,
    ValidationError,
)
from .fileio import _channel_map_from_doc, _vocabulary_from_doc
from .simulate import AppRule, EventTemplate, SimConfig


def _data_text(name: str) -> str:
    return resources.files("aircontext.data").joinpath(name).read_text("utf-8")


def default_vocabulary() -> CapabilityVocabulary:
    """The bundled capability list (attributes, values, commands)."""
    return _vocabulary_from_doc(json.loads(_data_text("capabilities.json")), "capabilities.json")


def default_channel_map() -> ChannelMap:
    """The bundled channel map: capability, physical, and system channels."""
    return _channel_map_from_doc(json.loads(_data_text("channels.json")), "channels.json")


# ---------------------------------------------------------------------------
# Template construction
# ---------------------------------------------------------------------------

def _uniform_intervals(n: int, duration: float) -> tuple[float, ...]:
    if n == 1:
        return (0.0,)
    return (0.0,) + (duration / (n - 1),) * (n - 1)


def make_template(registry: EventRegistry, device: str, command: str,
                  sizes: tuple[int, ...], directions: tuple[int, ...],
                  duration: float, jitter: float = 0.008,
                  ) -> tuple[int, EventTemplate]:
    eid = registry.register(device, command)
    n = len(sizes)
    tpl = EventTemplate(
        event=eid,
        sizes=tuple(sizes),
        directions=tuple(directions),
        base_intervals=_uniform_intervals(n, duration),
        layer_tags=(2,) * n,
        jitter_sigma=jitter,
    )
    return eid.id, tpl


_SIZE_PATTERN = (0, 6, -2, 4, -4, 2)


def synth_template(registry: EventRegistry, device: str, command: str,
                   index: int, n_packets: int, duration: float,
                   ) -> tuple[int, EventTemplate]:
    """Arithmetic burst shapes: index k gets base size 40 + 7k, so any two
    templates in a corpus differ in their first packet."""
    base = 40 + 7 * index
    sizes = tuple(base + _SIZE_PATTERN[i % len(_SIZE_PATTERN)] for i in range(n_packets))
    start = 1 if command.endswith(")") else 0  # commands begin hub-side
    dirs = tuple((start + i) % 2 for i in range(n_packets))
    return make_template(registry, device, command, sizes, dirs, duration)


def _assert_distinct(templates: dict[int, EventTemplate]) -> None:
    seen: dict[tuple[int, ...], int] = {}
    for eid, tpl in templates.items():
        if tpl.sizes in seen:
            raise ValidationError(
                f"events {seen[tpl.sizes]} and {eid} share burst sizes {tpl.sizes}")
        seen[tpl.sizes] = eid


# ---------------------------------------------------------------------------
# Five-device testbed: 19 event types
# ---------------------------------------------------------------------------

# device, command, sizes, directions, seconds start-to-finish
_TESTBED = (
    ("motion_sensor_1", "motion.active", (52, 58, 47), (0, 1, 0), 0.32),
    ("motion_sensor_1", "motion.inactive", (54, 60, 49), (0, 1, 0), 0.36),
    ("motion_sensor_1", "temperature.value", (68, 45), (0, 1), 0.21),
    ("outlet_1", "switch.on()", (48, 52, 45, 45), (1, 0, 1, 0), 0.35),
    ("outlet_1", "switch.off()", (50, 54, 45, 47), (1, 0, 1, 0), 0.40),
    ("outlet_1", "power.value", (72, 45), (0, 1), 0.1477),
    ("water_leak_sensor_1", "water.wet", (60, 50, 45), (0, 1, 0), 0.55),
    ("water_leak_sensor_1", "water.dry", (62, 52, 47), (0, 1, 0), 0.50),
    ("water_leak_sensor_1", "temperature.value", (70, 47), (0, 1), 0.25),
    ("hue_1", "switch.on()", (92, 58, 45, 96, 50), (1, 0, 1, 0, 1), 0.80),
    ("hue_1", "switch.off()", (94, 60, 47, 98, 52), (1, 0, 1, 0, 1), 0.85),
    ("hue_1", "color.setColor()",
     (88, 94, 102, 63, 45, 88, 97, 105, 63, 47, 90, 99, 107, 63, 49),
     (1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1), 2.0656),
    ("hue_1", "color.setHue()", (86, 92, 100, 61, 45, 86, 95, 103, 61),
     (1, 0, 1, 0, 1, 0, 1, 0, 1), 1.40),
    ("hue_1", "level.setLevel()", (84, 90, 98, 59, 45, 84, 93),
     (1, 0, 1, 0, 1, 0, 1), 1.10),
    ("hue_1", "colorTemperature.setColorTemperature()",
     (96, 102, 110, 65, 45, 96, 105, 113, 65, 47, 98),
     (1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1), 1.70),
    ("multipurpose_sensor_1", "contact.open", (56, 62, 45), (0, 1, 0), 0.38),
    ("multipurpose_sensor_1", "contact.close", (58, 64, 47), (0, 1, 0), 0.42),
    ("multipurpose_sensor_1", "acceleration.active", (66, 72, 49, 45), (0, 1, 0, 1), 0.60),
    ("multipurpose_sensor_1", "temperature.value", (74, 49), (0, 1), 0.28),
)


def testbed() -> tuple[EventRegistry, dict[int, EventTemplate]]:
    """Five devices, 19 event types; the shortest burst runs 0.1477 s and the
    longest 2.0656 s, bracketing what a 2.1 s window must cover."""
    registry = EventRegistry(default_vocabulary())
    templates: dict[int, EventTemplate] = {}
    for device, command, sizes, dirs, dur in _TESTBED:
        eid, tpl = make_template(registry, device, command, sizes, dirs, dur)
        templates[eid] = tpl
    _assert_distinct(templates)
    return registry, templates


def flat_rates(registry: EventRegistry, rate: float) -> dict[int, float]:
    """The same spontaneous rate for every registered event."""
    return {e.id: rate for e, _ in registry.items()}


# ---------------------------------------------------------------------------
# Rule helpers
# ---------------------------------------------------------------------------

def context_graphs_from_rules(rules: list[AppRule],
                              registry: EventRegistry) -> list[EventTransitionGraph]:
    """One expected-behavior graph per rule: triggers join into the optional
    condition node, then the actions in firing order."""
    graphs = []
    for rule in sorted(rules, key=lambda r: r.app_id):
        spine = ([] if rule.condition_event is None else [rule.condition_event])
        spine += list(rule.actions)
        if not spine:
            raise ValidationError(f"{rule.app_id}: rule has no actions")
        nodes = [GraphNode(registry.lookup(t)) for t in rule.triggers]
        for eid in spine:
            cond = rule.condition if eid == rule.condition_event else None
            nodes.append(GraphNode(registry.lookup(eid), cond))
        edges = [(t, spine[0]) for t in rule.triggers]
        edges += [(spine[i], spine[i + 1]) for i in range(len(spine) - 1)]
        graphs.append(EventTransitionGraph(rule.app_id, GraphSource.IOT, nodes, edges))
    return graphs


@dataclass(frozen=True)
class Corpus:
    """A simulation-ready home: devices, automations, and expectations."""

    registry: EventRegistry
    templates: dict[int, EventTemplate]
    app_rules: list[AppRule]
    env_rules: list[AppRule]          # simulated physics; never part of contexts
    graphs: list[EventTransitionGraph]
    rates: dict[int, float]           # spontaneous occurrence rates

    @property
    def rules(self) -> list[AppRule]:
        return self.app_rules + self.env_rules


# ---------------------------------------------------------------------------
# 35-rule populated home
# ---------------------------------------------------------------------------

def ruleset35(rate: float = 0.003) -> Corpus:
    """35 single-trigger automations over 19 devices.

    Every rule owns a distinct trigger event; actions are shared round-robin
    across 18 actuator events.  Good for recovering the full rule set from
    traffic and for compliance runs with known ground truth.
    """
    registry = EventRegistry(default_vocabulary())
    templates: dict[int, EventTemplate] = {}
    k = 0

    def add(device: str, command: str, n: int, dur: float) -> int:
        nonlocal k
        eid, tpl = synth_template(registry, device, command, k, n, dur)
        templates[eid] = tpl
        k += 1
        return eid

    triggers: list[int] = []
    for i in range(1, 6):
        triggers.append(add(f"motion_sensor_{i}", "motion.active", 3, 0.30))
        triggers.append(add(f"motion_sensor_{i}", "motion.inactive", 3, 0.34))
    for i in range(1, 6):
        triggers.append(add(f"multipurpose_sensor_{i}", "contact.open", 3, 0.36))
        triggers.append(add(f"multipurpose_sensor_{i}", "contact.close", 3, 0.40))
        triggers.append(add(f"multipurpose_sensor_{i}", "acceleration.active", 4, 0.55))
    for i in range(1, 4):
        triggers.append(add(f"water_leak_sensor_{i}", "water.wet", 3, 0.50))
        triggers.append(add(f"water_leak_sensor_{i}", "water.dry", 3, 0.45))
    for i in range(1, 3):
        triggers.append(add(f"outlet_{i}", "power.value", 2, 0.18))
    for i in range(1, 3):
        triggers.append(add(f"illuminance_sensor_{i}", "illuminance.value", 2, 0.22))
    if len(triggers) != 35:
        raise ValidationError(f"expected 35 trigger events, built {len(triggers)}")

    actions: list[int] = []
    for i in range(1, 3):
        actions.append(add(f"hue_{i}", "switch.on()", 5, 0.60))
        actions.append(add(f"hue_{i}", "switch.off()", 5, 0.65))
        actions.append(add(f"hue_{i}", "color.setColor()", 6, 0.90))
        actions.append(add(f"hue_{i}", "color.setHue()", 4, 0.70))
    for i in range(3, 5):
        actions.append(add(f"outlet_{i}", "switch.on()", 4, 0.35))
        actions.append(add(f"outlet_{i}", "switch.off()", 4, 0.38))
    actions.append(add("lock_1", "lock.lock()", 4, 0.45))
    actions.append(add("lock_1", "lock.unlock()", 4, 0.48))
    actions.append(add("valve_1", "valve.open()", 3, 0.33))
    actions.append(add("valve_1", "valve.close()", 3, 0.36))
    actions.append(add("alarm_1", "alarm.siren()", 5, 0.52))
    actions.append(add("camera_1", "camera.take()", 4, 0.48))
    if len(actions) != 18:
        raise ValidationError(f"expected 18 action events, built {len(actions)}")
    _assert_distinct(templates)

    rules = [
        AppRule(
            app_id=f"app{i + 1:02d}",
            triggers=(trig,),
            actions=(actions[i % len(actions)],),
            reaction_delay_mu=0.35 + 0.03 * (i % 10),
            reaction_delay_sigma=0.03,
        )
        for i, trig in enumerate(triggers)
    ]
    graphs = context_graphs_from_rules(rules, registry)
    rates = {t: rate for t in triggers}
    return Corpus(registry, templates, rules, [], graphs, rates)


# ---------------------------------------------------------------------------
# Six-app home with simulated physics
# ---------------------------------------------------------------------------

def six_app_home() -> Corpus:
    """Six automations whose actions feed back through the environment.

    The heater raises the temperature other rules act on, the fan stirs the
    motion sensor, and the humidifier eventually trips the leak sensor; those
    physical couplings are simulated as env rules with seconds-scale delays.
    """
    registry = EventRegistry(default_vocabulary())
    templates: dict[int, EventTemplate] = {}
    k = 0

    def add(device: str, command: str, n: int, dur: float) -> int:
        nonlocal k
        eid, tpl = synth_template(registry, device, command, k, n, dur)
        templates[eid] = tpl
        k += 1
        return eid

    tick = add("clock_1", "time.tick", 2, 0.18)
    heater_on = add("heater_1", "switch.on()", 3, 0.30)
    temp = add("temp_sensor_1", "temperature.value", 2, 0.21)
    shade_open = add("window_1", "shade.open()", 3, 0.35)
    fan_on = add("fan_1", "switch.on()", 3, 0.25)
    motion = add("motion_sensor_1", "motion.active", 3, 0.32)
    hue_on = add("hue_1", "switch.on()", 5, 0.50)
    humidity = add("humidity_sensor_1", "humidity.value", 2, 0.20)
    humidifier_on = add("humidifier_1", "switch.on()", 4, 0.40)
    wet = add("water_leak_sensor_1", "water.wet", 3, 0.30)
    siren = add("alarm_1", "alarm.siren()", 4, 0.45)
    _assert_distinct(templates)

    apps = [
        AppRule("heat-on-schedule", (tick,), (heater_on,),
                reaction_delay_mu=0.30, reaction_delay_sigma=0.03),
        AppRule("vent-window-on-heat", (temp,), (shade_open,),
                reaction_delay_mu=0.40, reaction_delay_sigma=0.08),
        AppRule("fan-on-heat", (temp,), (fan_on,),
                reaction_delay_mu=2.60, reaction_delay_sigma=0.08),
        AppRule("light-on-motion", (motion,), (hue_on,),
                reaction_delay_mu=0.50, reaction_delay_sigma=0.03),
        AppRule("humidify-dry-air", (humidity,), (humidifier_on,),
                reaction_delay_mu=0.45, reaction_delay_sigma=0.03),
        AppRule("leak-alarm", (wet,), (siren,),
                reaction_delay_mu=0.40, reaction_delay_sigma=0.03),
    ]
    env = [
        AppRule("env-heater-warms-room", (heater_on,), (temp,),
                reaction_delay_mu=1.80, reaction_delay_sigma=0.03),
        AppRule("env-fan-stirs-motion", (fan_on,), (motion,),
                reaction_delay_mu=1.40, reaction_delay_sigma=0.03),
        AppRule("env-humidifier-soaks-sensor", (humidifier_on,), (wet,),
                reaction_delay_mu=2.40, reaction_delay_sigma=0.03),
    ]
    graphs = context_graphs_from_rules(apps, registry)
    rates = {tick: 0.010, humidity: 0.008, motion: 0.006}
    return Corpus(registry, templates, apps, env, graphs, rates)


def humidity_coupling_home() -> Corpus:
    """The humidifier/leak-alarm pair alone, for tight coupling checks."""
    base = six_app_home()
    keep = {"humidify-dry-air", "leak-alarm"}
    apps = [r for r in base.app_rules if r.app_id in keep]
    env = [r for r in base.env_rules if r.app_id == "env-humidifier-soaks-sensor"]
    graphs = context_graphs_from_rules(apps, base.registry)
    humidity = next(e.id for e, (_, cmd) in base.registry.items()
                    if cmd == "humidity.value")
    return Corpus(base.registry, base.templates, apps, env, graphs,
                  {humidity: 0.010})


# ---------------------------------------------------------------------------
# Demo home on the testbed devices
# ---------------------------------------------------------------------------

def demo_home() -> Corpus:
    """Four automations over the five-device testbed, plus one env rule:
    turning the outlet on makes it report power, which closes the loop the
    coupling analysis should find."""
    registry, templates = testbed()
    by_pair = {pair: e.id for e, pair in registry.items()}

    def eid(dev: str, cmd: str) -> int:
        return by_pair[(dev, cmd)]

    apps = [
        AppRule("light-on-motion",
                (eid("motion_sensor_1", "motion.active"),),
                (eid("hue_1", "switch.on()"),),
                reaction_delay_mu=0.50, reaction_delay_sigma=0.04),
        AppRule("outlet-on-contact",
                (eid("multipurpose_sensor_1", "contact.open"),),
                (eid("outlet_1", "switch.on()"),),
                reaction_delay_mu=0.45, reaction_delay_sigma=0.04),
        AppRule("outlet-off-on-leak",
                (eid("water_leak_sensor_1", "water.wet"),),
                (eid("outlet_1", "switch.off()"),),
                reaction_delay_mu=0.40, reaction_delay_sigma=0.04),
        AppRule("scene-on-power-report",
                (eid("outlet_1", "power.value"),),
                (eid("hue_1", "color.setColor()"),),
                reaction_delay_mu=0.60, reaction_delay_sigma=0.04),
    ]
    env = [
        AppRule("env-outlet-reports-power",
                (eid("outlet_1", "switch.on()"),),
                (eid("outlet_1", "power.value"),),
                reaction_delay_mu=1.20, reaction_delay_sigma=0.04),
    ]
    graphs = context_graphs_from_rules(apps, registry)
    # One spontaneous event every ~40s overall. Denser homes push more
    # transmissions into shared scan windows and detection decays; see the
    # density sweep in the detection demo.
    rates = {
        eid("motion_sensor_1", "motion.active"): 0.004,
        eid("motion_sensor_1", "motion.inactive"): 0.0027,
        eid("motion_sensor_1", "temperature.value"): 0.002,
        eid("multipurpose_sensor_1", "contact.open"): 0.0033,
        eid("multipurpose_sensor_1", "contact.close"): 0.0027,
        eid("multipurpose_sensor_1", "acceleration.active"): 0.002,
        eid("multipurpose_sensor_1", "temperature.value"): 0.002,
        eid("water_leak_sensor_1", "water.wet"): 0.0013,
        eid("water_leak_sensor_1", "water.dry"): 0.0013,
        eid("water_leak_sensor_1", "temperature.value"): 0.002,
    }
    return Corpus(registry, templates, apps, env, graphs, rates)


PRESETS = {
    "demo": demo_home,
    "ruleset35": ruleset35,
    "six-app": six_app_home,
    "humidity-coupling": humidity_coupling_home,
}


# ---------------------------------------------------------------------------
# Training corpus helper
# ---------------------------------------------------------------------------

def training_samples(templates: dict[int, EventTemplate],
                     per_class: int, seed: int, rate: float = 0.02):
    """Per-class isolated traces, featurized and truncated to per_class each.

    Isolation keeps bursts from different event types from interleaving, so
    labels stay exact.  Occasional same-type overlaps merge into oversized
    spans and are dropped by the featurizer; the sim length carries enough
    slack to absorb that.
    """
    from .fingerprint import assemble_samples
    from .simulate import simulate

    samples = []
    for class_idx, eid in enumerate(sorted(templates)):
        duration = (per_class * 1.25 + 20) / rate
        got = []
        attempt = 0
        while len(got) < per_class:
            if attempt > 4:
                raise ValidationError(f"cannot collect {per_class} samples for event {eid}")
            cfg = SimConfig(duration=duration, trigger_rates={eid: rate},
                            seed=seed + 7919 * class_idx + 104729 * attempt)
            packets, truth = simulate(templates, [], cfg)
            got = assemble_samples(packets, truth)
            attempt += 1
            duration *= 1.5
        samples.extend(got[:per_class])
    return samples


def cascade_samples(corpus: Corpus, per_class: int, seed: int,
                    duration: float | None = None):
    """Detection-aligned windows cut from a rules-active trace of a corpus.

    Where training_samples shows the classifier each burst in isolation,
    these windows carry the head of whatever follows within the scan window,
    matching what the detector sees when automation rules chain events
    back to back. Train on both sets; keep the step table from the isolated
    one.
    """
    from .fingerprint import aligned_samples
    from .simulate import simulate

    if duration is None:
        total_rate = sum(corpus.rates.values()) or 1.0
        duration = per_class * len(corpus.templates) * 1.5 / total_rate
    cfg = SimConfig(duration=duration, trigger_rates=corpus.rates, seed=seed)
    packets, truth = simulate(corpus.templates, corpus.rules, cfg)
    per_eid: dict[int, int] = {}
    keep = []
    for eid, fm in aligned_samples(packets, truth):
        if per_eid.get(eid, 0) >= per_class:
            continue
        per_eid[eid] = per_eid.get(eid, 0) + 1
        keep.append((eid, fm))
    return keep
