"""Inject each anomaly kind into a healthy home and watch the verdicts.

Detection fidelity is covered by the other demos, so here the checker reads
the simulator's ground-truth event stream directly. That isolates the part
under study: given a clean picture of what happened on the air, does the
checker call each tampering by its right name?

Three kinds of tampering, one story each:

  spoofing        an action fires with no trigger anywhere near it,
                  as if someone replayed the actuator's radio burst
  misbehavior     a trigger fires but the action never follows,
                  a dead device or a suppressed rule
  overprivilege   a legitimate firing drags in one extra command
                  the app never declared

    python3 demos/anomaly_clinic.py
"""

from aircontext import (
    AnomalySpec,
    CheckerParams,
    MinerParams,
    SimConfig,
    check_stream,
    collect_pair_stats,
    inject_anomaly,
    simulate,
)
from aircontext.presets import default_vocabulary, demo_home

SEED = 33


def stream_of(truth):
    return [(eid, t0) for eid, t0, _ in sorted(truth, key=lambda e: e[1])]


def main() -> None:
    corpus = demo_home()
    cfg = SimConfig(duration=6000.0, trigger_rates=corpus.rates, seed=SEED)
    miner = MinerParams()
    checker = CheckerParams()
    vocab = default_vocabulary()

    clean_packets, clean_truth = simulate(corpus.templates, corpus.rules, cfg)
    stats = collect_pair_stats(stream_of(clean_truth), miner)
    baseline = check_stream(stream_of(clean_truth), corpus.graphs, checker,
                            stats, corpus.registry, vocab)
    print(f"healthy stream: {len(clean_truth)} events, "
          f"{len(baseline)} anomalies flagged (want 0)\n")

    for kind in ("spoofing", "misbehavior", "overprivilege"):
        spec = AnomalySpec(kind=kind, count=4, seed=SEED + 1)
        _, truth, injections = inject_anomaly(
            list(clean_packets), list(clean_truth),
            corpus.templates, corpus.app_rules, spec)
        reports = check_stream(stream_of(truth), corpus.graphs, checker,
                               stats, corpus.registry, vocab)

        print(f"--- injected {kind} x{len(injections)} ---")
        for inj in injections:
            names = ", ".join(str(corpus.registry.lookup(e)) for e in inj.events)
            print(f"  planted at t={inj.ts:8.2f}s in {inj.app}: {names}")
        for r in reports:
            extras = ", ".join(str(e) for e in r.extra_events) or "-"
            missing = ", ".join(str(e) for e in r.missing_events) or "-"
            print(f"  verdict {r.kind.value} at t={r.ts:8.2f}s"
                  f"  (missing: {missing}; extra: {extras})")
        print()

    print("Each verdict lands within a couple of seconds of its plant site,")
    print("and the clean baseline stays silent. The checker never needs to")
    print("see packet payloads, only who spoke and when.")


if __name__ == "__main__":
    main()
