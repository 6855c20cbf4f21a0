"""Traffic generator and anomaly injection."""
import pytest

from aircontext.model import EventId, PacketKind, filter_unrelated
from aircontext.simulate import (
    AnomalySpec,
    AppRule,
    ConfigError,
    EventTemplate,
    SimConfig,
    ValidationError,
    inject_anomaly,
    simulate,
)


def template(eid, label, sizes, start_dir=0, duration=0.3, jitter=0.0):
    n = len(sizes)
    intervals = (0.0,) + (duration / (n - 1),) * (n - 1) if n > 1 else (0.0,)
    return EventTemplate(
        event=EventId(eid, label),
        sizes=tuple(sizes),
        directions=tuple((start_dir + i) % 2 for i in range(n)),
        base_intervals=intervals,
        layer_tags=(2,) * n,
        jitter_sigma=jitter,
    )


@pytest.fixture
def trio():
    """Trigger 1 fires rule r1 -> action 2; event 3 is another rule's action
    (r2's trigger never occurs, so r2 exists only to own event 3)."""
    templates = {
        1: template(1, "sensor_1/motion.active", (52, 58, 47)),
        2: template(2, "lamp_1/switch.on()", (92, 58, 45, 96), start_dir=1),
        3: template(3, "plug_1/switch.off()", (70, 60), start_dir=1),
        4: template(4, "sensor_2/water.wet", (61, 55, 49)),
    }
    rules = [AppRule("r1", (1,), (2,), reaction_delay_mu=0.5, reaction_delay_sigma=0.0),
             AppRule("r2", (4,), (3,))]
    return templates, rules


class TestTemplateValidation:
    def test_field_length_mismatch(self):
        with pytest.raises(ValidationError):
            EventTemplate(EventId(1, "a/b"), (50, 60), (0,), (0.0, 0.1), (2, 2))

    def test_first_interval_must_be_zero(self):
        with pytest.raises(ValidationError):
            EventTemplate(EventId(1, "a/b"), (50, 60), (0, 1), (0.1, 0.1), (2, 2))

    def test_duration_cap(self):
        with pytest.raises(ValidationError):
            EventTemplate(EventId(1, "a/b"), (50, 60), (0, 1), (0.0, 2.2), (2, 2))

    def test_duration_property(self):
        t = template(1, "a/b", (50, 60, 70), duration=0.4)
        assert t.duration == pytest.approx(0.4)
        assert t.device == "a"


class TestSimulate:
    def test_deterministic(self, trio):
        templates, rules = trio
        cfg = SimConfig(duration=2000.0, trigger_rates={1: 0.01}, seed=42)
        p1, t1 = simulate(templates, rules, cfg)
        p2, t2 = simulate(templates, rules, cfg)
        assert p1 == p2 and t1 == t2

    def test_truth_sorted_and_consistent_with_packets(self, trio):
        templates, rules = trio
        cfg = SimConfig(duration=3000.0, trigger_rates={1: 0.004}, seed=1)
        packets, truth = simulate(templates, rules, cfg)
        starts = [t0 for _, t0, _ in truth]
        assert starts == sorted(starts)
        data_ts = {p.ts for p in packets if p.kind is PacketKind.DATA}
        for _, t0, t1 in truth:
            assert t0 in data_ts and t1 in data_ts and t0 <= t1

    def test_rule_fires_with_exact_delay(self, trio):
        templates, rules = trio
        cfg = SimConfig(duration=5000.0, trigger_rates={1: 0.004}, seed=7)
        _, truth = simulate(templates, rules, cfg)
        triggers = [(t0, t1) for eid, t0, t1 in truth if eid == 1]
        actions = [t0 for eid, t0, _ in truth if eid == 2]
        assert len(actions) == len(triggers)
        for (t0, t1), a0 in zip(triggers, actions):
            assert a0 - t1 == pytest.approx(0.5)  # sigma 0 makes it exact

    def test_condition_event_emitted_between_trigger_and_action(self):
        templates = {
            1: template(1, "s/contact.open", (52, 58, 47)),
            2: template(2, "s/illuminance.value", (70, 45)),
            3: template(3, "l/switch.on()", (92, 58, 45), start_dir=1),
        }
        rule = AppRule("lit", (1,), (3,), condition_event=2,
                       reaction_delay_mu=0.4, reaction_delay_sigma=0.0)
        cfg = SimConfig(duration=4000.0, trigger_rates={1: 0.003}, seed=3)
        _, truth = simulate(templates, [rule], cfg)
        seq = [eid for eid, _, _ in truth]
        i = seq.index(1)
        assert seq[i:i + 3] == [1, 2, 3]

    def test_and_join_window(self):
        templates = {
            1: template(1, "a/motion.active", (52, 58, 47)),
            2: template(2, "b/contact.open", (56, 62, 45)),
            3: template(3, "l/switch.on()", (92, 58, 45), start_dir=1),
        }
        rule = AppRule("both", (1, 2), (3,), reaction_delay_mu=0.4,
                       reaction_delay_sigma=0.0)
        # Triggers too sparse to co-occur within a tight join window.
        sparse = SimConfig(duration=8000.0, trigger_rates={1: 0.002, 2: 0.002},
                           seed=5, join_window=0.5)
        _, truth = simulate(templates, [rule], sparse)
        assert all(eid != 3 for eid, _, _ in truth)
        # A wide-open window lets the rule fire.
        wide = SimConfig(duration=8000.0, trigger_rates={1: 0.002, 2: 0.002},
                         seed=5, join_window=4000.0)
        _, truth = simulate(templates, [rule], wide)
        assert any(eid == 3 for eid, _, _ in truth)

    def test_background_chatter_kinds(self, trio):
        templates, rules = trio
        quiet = SimConfig(duration=2000.0, trigger_rates={1: 0.01}, seed=9)
        noisy = SimConfig(duration=2000.0, trigger_rates={1: 0.01}, seed=9,
                          background_rate=0.2)
        pq, _ = simulate(templates, rules, quiet)
        pn, _ = simulate(templates, rules, noisy)
        extra = [p for p in pn if p.kind is not PacketKind.DATA]
        assert extra and all(p.kind in (PacketKind.BEACON, PacketKind.ACK,
                                        PacketKind.LINK) for p in extra)
        # noise is drawn after events, so the Data stream is unchanged
        assert filter_unrelated(pn) == filter_unrelated(pq)

    def test_loss_rate_drops_packets(self, trio):
        templates, rules = trio
        full = SimConfig(duration=4000.0, trigger_rates={1: 0.01}, seed=2)
        lossy = SimConfig(duration=4000.0, trigger_rates={1: 0.01}, seed=2,
                          loss_rate=0.4)
        pf, _ = simulate(templates, rules, full)
        pl, _ = simulate(templates, rules, lossy)
        assert 0 < len(pl) < len(pf)

    def test_jitter_never_reorders_bursts(self):
        templates = {1: template(1, "a/motion.active", (50, 60, 70, 80),
                                 duration=0.02, jitter=5.0)}
        cfg = SimConfig(duration=3000.0, trigger_rates={1: 0.002}, seed=4)
        packets, truth = simulate(templates, [], cfg)
        for _, t0, t1 in truth:
            span = [p.ts for p in packets if t0 <= p.ts <= t1]
            assert span == sorted(span) and len(span) == 4

    def test_unknown_ids_rejected(self, trio):
        templates, rules = trio
        with pytest.raises(ConfigError):
            simulate(templates, rules, SimConfig(duration=10.0, trigger_rates={99: 0.1}))
        with pytest.raises(ConfigError):
            simulate({1: templates[1]}, rules, SimConfig(duration=10.0))

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            SimConfig(duration=0.0)
        with pytest.raises(ConfigError):
            SimConfig(duration=1.0, loss_rate=1.0)
        with pytest.raises(ConfigError):
            SimConfig(duration=1.0, trigger_rates={1: -0.1})


class TestInjection:
    def _base(self, trio, seed=21):
        templates, rules = trio
        cfg = SimConfig(duration=20000.0, trigger_rates={1: 0.004, 3: 0.003},
                        seed=seed)
        packets, truth = simulate(templates, rules, cfg)
        return templates, rules, packets, truth

    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            AnomalySpec("teleportation")
        with pytest.raises(ValidationError):
            AnomalySpec("spoofing", count=0)

    def test_spoofing_plants_action_without_trigger(self, trio):
        templates, rules, packets, truth = self._base(trio)
        spec = AnomalySpec("spoofing", app="r1", count=3, seed=5)
        p2, t2, inj = inject_anomaly(packets, truth, templates, rules, spec)
        assert len(inj) == 3
        for rec in inj:
            assert rec.kind == "spoofing" and rec.events == (2,)
            # no trigger occurrence anywhere near the planted burst
            near = [e for e, t0, _ in t2
                    if e == 1 and abs(t0 - rec.ts) <= spec.lookback]
            assert near == []
            assert any(e == 2 and t0 == rec.ts for e, t0, _ in t2)

    def test_misbehavior_erases_action(self, trio):
        templates, rules, packets, truth = self._base(trio)
        n_actions = sum(1 for e, _, _ in truth if e == 2)
        spec = AnomalySpec("misbehavior", app="r1", count=4, seed=6)
        p2, t2, inj = inject_anomaly(packets, truth, templates, rules, spec)
        assert len(inj) == 4
        assert sum(1 for e, _, _ in t2 if e == 2) == n_actions - 4
        assert len(p2) == len(packets) - 4 * len(templates[2].sizes)
        # ts points at the trigger that fired the erased action
        trigger_starts = {t0 for e, t0, _ in truth if e == 1}
        assert all(rec.ts in trigger_starts for rec in inj)

    def test_overprivilege_appends_extra_event(self, trio):
        templates, rules, packets, truth = self._base(trio)
        spec = AnomalySpec("overprivilege", app="r1", count=3, extra_event=3, seed=7)
        p2, t2, inj = inject_anomaly(packets, truth, templates, rules, spec)
        assert len(inj) == 3
        extras_before = sum(1 for e, _, _ in truth if e == 3)
        assert sum(1 for e, _, _ in t2 if e == 3) == extras_before + 3
        for rec in inj:
            assert rec.events == (3,)
            assert any(e == 3 and t0 == rec.ts for e, t0, _ in t2)

    def test_overprivilege_pool_excludes_own_actions(self, trio):
        templates, rules, packets, truth = self._base(trio)
        spec = AnomalySpec("overprivilege", app="r1", count=2, seed=8)
        _, _, inj = inject_anomaly(packets, truth, templates, rules, spec)
        assert all(rec.events == (3,) for rec in inj)  # only other rule's action

    def test_unknown_target_app_rejected(self, trio):
        templates, rules, packets, truth = self._base(trio)
        with pytest.raises(ConfigError):
            inject_anomaly(packets, truth, templates, rules,
                           AnomalySpec("spoofing", app="ghost"))

    def test_injection_deterministic(self, trio):
        templates, rules, packets, truth = self._base(trio)
        spec = AnomalySpec("misbehavior", app="r1", count=2, seed=11)
        out1 = inject_anomaly(packets, truth, templates, rules, spec)
        out2 = inject_anomaly(packets, truth, templates, rules, spec)
        assert out1 == out2

    def test_inputs_not_mutated(self, trio):
        templates, rules, packets, truth = self._base(trio)
        snapshot_p, snapshot_t = list(packets), list(truth)
        inject_anomaly(packets, truth, templates, rules,
                       AnomalySpec("spoofing", app="r1", count=1, seed=1))
        assert packets == snapshot_p and truth == snapshot_t
