"""How event density erodes metadata-only detection.

Bursts from different devices that land inside one scan window blur into
each other, so a busier home is strictly harder to read. This sweep trains
one classifier on the standard testbed and then replays the same home at
increasing spontaneous-event rates.

    python3 demos/detection_density.py
"""

from aircontext import DetectorParams, RandomForest, SimConfig, detect_events, simulate, step_counts
from aircontext.presets import flat_rates, testbed, training_samples

SEED = 21
DURATION = 3000.0


def accuracy(events, truth) -> float:
    # greedy 1:1 matching per event type, +/-0.5s
    by_type: dict[int, list[float]] = {}
    for eid, t0, _ in truth:
        by_type.setdefault(eid, []).append(t0)
    cursor: dict[int, int] = {}
    hits = 0
    for ev in events:
        times = by_type.get(ev.event.id, [])
        i = cursor.get(ev.event.id, 0)
        while i < len(times) and times[i] < ev.ts - 0.5:
            i += 1
        if i < len(times) and abs(times[i] - ev.ts) <= 0.5:
            hits += 1
            i += 1
        cursor[ev.event.id] = i
    return hits / len(truth) if truth else 1.0


def main() -> None:
    registry, templates = testbed()
    samples = training_samples(templates, per_class=80, seed=SEED)
    clf = RandomForest.train(samples, n_trees=60, seed=SEED + 1)
    det = DetectorParams(step_counts=step_counts(samples))
    print(f"classifier: {clf.n_trees} trees over {len(samples)} samples, "
          f"{len(templates)} event types\n")

    print(f"{'rate/type':>10} {'mean gap':>9} {'events':>7} {'found':>6} {'accuracy':>9}")
    for rate in (0.001, 0.003, 0.01, 0.03, 0.08):
        cfg = SimConfig(duration=DURATION, trigger_rates=flat_rates(registry, rate),
                        seed=SEED + 2)
        packets, truth = simulate(templates, [], cfg)
        events = detect_events(packets, clf, det, registry)
        gap = DURATION / len(truth) if truth else float("inf")
        acc = accuracy(events, truth)
        print(f"{rate:>10.3f} {gap:>8.1f}s {len(truth):>7} {len(events):>6} "
              f"{acc:>8.1%}")

    print()
    print("Near-perfect while events are sparse enough that bursts rarely")
    print("share a 2.1s window; accuracy falls once the home chatters faster")
    print("than the window can separate.")


if __name__ == "__main__":
    main()
