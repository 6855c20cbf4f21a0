"""Command-line interface.

Subcommands mirror the pipeline stages: simulate a home, train the burst
classifier, detect events in a trace, mine wireless context, pull expected
context from app descriptions, check compliance, and hunt hidden couplings.
`run` chains the whole thing into one output directory.

Exit codes: 0 on success, 1 on any engine error, 2 when --fail-on-anomaly is
set and the check stage found something.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import subprocess
import sys
import tempfile
from importlib import resources
from pathlib import Path

from . import fileio
from .check import CheckerParams, check_graphs, check_stream, match_graph
from .detect import DetectorParams, detect_events
from .fingerprint import aligned_samples, assemble_samples, step_counts
from .forest import RandomForest
from .mine import MinerParams, collect_pair_stats, mine_wireless_context
from .model import EngineError, EventRegistry, ValidationError
from .presets import (PRESETS, cascade_samples, default_channel_map,
                      default_vocabulary, training_samples)
from .simulate import AnomalySpec, SimConfig, inject_anomaly, simulate
from .vuln import channel_stats, confirm_chains, discover_chains

log = logging.getLogger("aircontext")

_ANOMALY_KINDS = ("spoofing", "misbehavior", "overprivilege")


def _setup_logging() -> None:
    level = os.environ.get("AIRCONTEXT_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_registry(path: str) -> EventRegistry:
    return fileio.load_registry(path, default_vocabulary())


def _miner_params(args) -> MinerParams:
    return MinerParams(tau=args.tau, max_lag=args.max_lag,
                       min_support=args.min_support, eps_add=args.eps_add)


def _add_miner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, default=0.1,
                   help="gap deviation bound for dependence (s)")
    p.add_argument("--max-lag", type=float, default=10.0,
                   help="pairing horizon (s)")
    p.add_argument("--min-support", type=int, default=5,
                   help="samples a pair needs before it counts")
    p.add_argument("--eps-add", type=float, default=0.3,
                   help="mean-additivity tolerance when merging chains (s)")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    corpus = PRESETS[args.preset]()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SimConfig(duration=args.duration, trigger_rates=corpus.rates,
                    background_rate=args.background, seed=args.seed,
                    loss_rate=args.loss)
    packets, truth = simulate(corpus.templates, corpus.rules, cfg)
    injections = []
    if args.inject:
        spec = AnomalySpec(kind=args.inject, count=args.inject_count,
                           seed=args.inject_seed)
        packets, truth, injections = inject_anomaly(
            packets, truth, corpus.templates, corpus.app_rules, spec)
    fileio.save_trace(out / "trace.jsonl", packets)
    fileio.save_labels(out / "labels.jsonl", truth)
    fileio.save_registry(out / "registry.jsonl", corpus.registry)
    fileio.save_graph_set(out / "iot_graphs.json", corpus.graphs)
    if injections:
        with open(out / "injections.jsonl", "w", encoding="utf-8") as fh:
            for inj in injections:
                fh.write(json.dumps({"kind": inj.kind, "app": inj.app, "ts": inj.ts,
                                     "events": list(inj.events)},
                                    separators=(",", ":")) + "\n")
    print(f"simulated {len(packets)} packets, {len(truth)} events -> {out}")
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def _cmd_train(args) -> int:
    packets = fileio.load_trace(args.trace)
    labels = fileio.load_labels(args.labels)
    samples = assemble_samples(packets, labels)
    if not samples:
        raise ValidationError("no usable training samples in the trace")
    # Step counts always come from the exact burst spans; aligned windows
    # carry trailing foreign packets and would inflate them.
    train_set = list(samples)
    if args.aligned:
        train_set += aligned_samples(packets, labels,
                                     window_seconds=args.window_seconds)
    clf = RandomForest.train(train_set, n_trees=args.trees, seed=args.seed,
                             max_depth=args.max_depth)
    clf.save(args.out)
    params = DetectorParams(window_seconds=args.window_seconds,
                            threshold=args.threshold,
                            step_counts=step_counts(samples))
    params.to_json(args.params_out)
    print(f"trained {args.trees} trees on {len(train_set)} samples "
          f"({len(clf.classes)} classes) -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------

def _cmd_detect(args) -> int:
    packets = fileio.load_trace(args.trace)
    clf = RandomForest.load(args.model)
    params = DetectorParams.from_json(args.params)
    registry = _load_registry(args.registry) if args.registry else None
    events = detect_events(packets, clf, params, registry)
    fileio.save_events(args.out, events)
    print(f"detected {len(events)} events -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# mine
# ---------------------------------------------------------------------------

def _cmd_mine(args) -> int:
    events = fileio.load_events(args.events)
    registry = _load_registry(args.registry) if args.registry else None
    result = mine_wireless_context(events, _miner_params(args), registry)
    fileio.save_graph_set(args.out, result.graphs)
    print(f"mined {len(result.graphs)} wireless context graphs "
          f"from {len(events)} events -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# extract-context
# ---------------------------------------------------------------------------

def _validated_graphs(paths_dir: str, registry: EventRegistry | None):
    graphs = fileio.load_graph_dir(paths_dir)
    vocab = default_vocabulary()
    for g in graphs:
        g.validate()
        for node in g.nodes:
            if registry is not None and node.event.id not in registry:
                raise ValidationError(f"{g.graph_id}: event {node.event.id} "
                                      f"not in registry")
            if node.condition is not None:
                vocab.resolve(f"{node.condition.attribute}.value")
    return graphs


def _cmd_extract_context(args) -> int:
    registry = _load_registry(args.registry) if args.registry else None
    if args.graphs_dir:
        graphs = _validated_graphs(args.graphs_dir, registry)
    else:
        if not args.descriptions:
            raise ValidationError("need --descriptions or --graphs-dir")
        with tempfile.TemporaryDirectory(prefix="aircontext-nlp-") as tmp:
            cmd = shlex.split(args.runner)
            cmd += ["--descriptions", args.descriptions, "--out-dir", tmp]
            if args.capabilities:
                cmd += ["--capabilities", args.capabilities]
            else:
                caps = resources.files("aircontext.data").joinpath("capabilities.json")
                cmd += ["--capabilities", str(caps)]
            if args.embeddings:
                cmd += ["--embeddings", args.embeddings]
            log.info("running extractor: %s", " ".join(cmd))
            proc = subprocess.run(cmd, capture_output=True, text=True)
            if proc.returncode != 0:
                raise EngineError(f"extractor failed ({proc.returncode}): "
                                  f"{proc.stderr.strip()[:500]}")
            graphs = _validated_graphs(tmp, registry)
    fileio.save_graph_set(args.out, graphs)
    print(f"wrote {len(graphs)} context graphs -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _checker_params(args) -> CheckerParams:
    return CheckerParams(tau=args.tau, join_window=args.join_window,
                         fallback_gap=args.fallback_gap,
                         extension_window=args.extension_window)


def _cmd_check(args) -> int:
    events = fileio.load_events(args.events)
    contexts = fileio.load_graph_set(args.iot)
    registry = _load_registry(args.registry) if args.registry else None
    vocab = default_vocabulary()
    miner = MinerParams(tau=args.tau)
    if args.mined:
        mined = fileio.load_graph_set(args.mined)
    else:
        mined = mine_wireless_context(events, miner, registry).graphs
    params = _checker_params(args)
    stats = collect_pair_stats(events, miner)
    reports = check_graphs(mined, contexts, registry)
    reports += check_stream(events, contexts, params, stats, registry, vocab)
    fileio.save_reports(args.out, reports)
    matched = sum(1 for d in mined if match_graph(d, contexts) is not None)
    print(f"{matched}/{len(mined)} mined graphs matched; "
          f"{len(reports)} anomaly reports -> {args.out}")
    if reports and args.fail_on_anomaly:
        return 2
    return 0


# ---------------------------------------------------------------------------
# vuln
# ---------------------------------------------------------------------------

def _cmd_vuln(args) -> int:
    contexts = fileio.load_graph_set(args.iot)
    mined = fileio.load_graph_set(args.mined) if args.mined else []
    registry = _load_registry(args.registry) if args.registry else None
    channels = (fileio.load_channel_map(args.channels) if args.channels
                else default_channel_map())
    chains = discover_chains(contexts, channels, registry)
    chains = confirm_chains(chains, contexts, mined)
    usage = channel_stats(chains, channels)
    fileio.save_chains(args.out, chains, usage)
    confirmed = sum(1 for c in chains if c.confirmed)
    print(f"{len(chains)} candidate couplings, {confirmed} confirmed -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# run: the whole pipeline
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    corpus = PRESETS[args.preset]()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    log.info("training corpus: %d samples per class", args.per_class)
    samples = training_samples(corpus.templates, args.per_class, args.seed + 1)
    chained = cascade_samples(corpus, args.per_class, args.seed + 4)
    clf = RandomForest.train(samples + chained, n_trees=args.trees,
                             seed=args.seed + 2)
    clf.save(str(out / "model.json"))
    det = DetectorParams(step_counts=step_counts(samples))
    det.to_json(str(out / "detector.json"))

    cfg = SimConfig(duration=args.duration, trigger_rates=corpus.rates,
                    background_rate=args.background, seed=args.seed)
    packets, truth = simulate(corpus.templates, corpus.rules, cfg)
    injections = []
    if args.inject:
        spec = AnomalySpec(kind=args.inject, count=args.inject_count,
                           seed=args.seed + 3)
        packets, truth, injections = inject_anomaly(
            packets, truth, corpus.templates, corpus.app_rules, spec)
    fileio.save_trace(out / "trace.jsonl", packets)
    fileio.save_labels(out / "labels.jsonl", truth)
    fileio.save_registry(out / "registry.jsonl", corpus.registry)
    fileio.save_graph_set(out / "iot_graphs.json", corpus.graphs)

    events = detect_events(packets, clf, det, corpus.registry)
    fileio.save_events(out / "events.jsonl", events)

    hits = 0
    remaining = sorted(truth, key=lambda e: e[1])
    cursor: dict[int, int] = {}
    by_type: dict[int, list[float]] = {}
    for eid, t0, _ in remaining:
        by_type.setdefault(eid, []).append(t0)
    for ev in events:
        times = by_type.get(ev.event.id, [])
        i = cursor.get(ev.event.id, 0)
        while i < len(times) and times[i] < ev.ts - 0.5:
            i += 1
        if i < len(times) and abs(times[i] - ev.ts) <= 0.5:
            hits += 1
            i += 1
        cursor[ev.event.id] = i
    accuracy = hits / len(truth) if truth else 1.0

    miner = MinerParams()
    result = mine_wireless_context(events, miner, corpus.registry)
    fileio.save_graph_set(out / "mined_graphs.json", result.graphs)

    params = CheckerParams()
    reports = check_graphs(result.graphs, corpus.graphs, corpus.registry)
    reports += check_stream(events, corpus.graphs, params, result.stats,
                            corpus.registry, default_vocabulary())
    fileio.save_reports(out / "reports.jsonl", reports)

    channels = default_channel_map()
    chains = discover_chains(corpus.graphs, channels, corpus.registry)
    chains = confirm_chains(chains, corpus.graphs, result.graphs)
    usage = channel_stats(chains, channels)
    fileio.save_chains(out / "chains.json", chains, usage)

    matched = sum(1 for d in result.graphs
                  if match_graph(d, corpus.graphs) is not None)
    by_kind: dict[str, int] = {}
    for r in reports:
        by_kind[r.kind.value] = by_kind.get(r.kind.value, 0) + 1
    summary = {
        "preset": args.preset,
        "seed": args.seed,
        "duration": args.duration,
        "packets": len(packets),
        "true_events": len(truth),
        "detected_events": len(events),
        "detection_accuracy": round(accuracy, 4),
        "mined_graphs": len(result.graphs),
        "matched_graphs": matched,
        "injections": len(injections),
        "reports": by_kind,
        "couplings": len(chains),
        "confirmed_couplings": sum(1 for c in chains if c.confirmed),
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(summary, separators=(",", ":"), sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    if reports and args.fail_on_anomaly:
        return 2
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aircontext",
        description="Wireless-context security pipeline for smart-home traffic.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a packet trace from a preset home")
    p.add_argument("--preset", choices=sorted(PRESETS), default="demo")
    p.add_argument("--duration", type=float, default=4000.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--background", type=float, default=0.05,
                   help="noise frames per second")
    p.add_argument("--loss", type=float, default=0.0, help="packet loss fraction")
    p.add_argument("--inject", choices=_ANOMALY_KINDS)
    p.add_argument("--inject-count", type=int, default=5)
    p.add_argument("--inject-seed", type=int, default=99)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("train", help="fit the burst classifier from a labeled trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True, help="model file (JSON)")
    p.add_argument("--params-out", required=True, help="detector parameter file")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--window-seconds", type=float, default=2.1)
    p.add_argument("--aligned", action="store_true",
                   help="also train on detector-shaped windows so bursts "
                        "chained by automations classify cleanly")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("detect", help="turn a raw trace into an event stream")
    p.add_argument("--trace", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--registry")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("mine", help="mine dependency chains from an event stream")
    p.add_argument("--events", required=True)
    p.add_argument("--registry")
    p.add_argument("--out", required=True)
    _add_miner_flags(p)
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("extract-context",
                       help="expected-behavior graphs from app descriptions "
                            "(via the NLP extractor) or a graph directory")
    p.add_argument("--descriptions", help="JSONL of app descriptions")
    p.add_argument("--runner", default="context-extractor",
                   help="NLP extractor command to invoke")
    p.add_argument("--capabilities", help="capability vocabulary file "
                                          "(default: bundled)")
    p.add_argument("--embeddings", help="word embedding file for the extractor")
    p.add_argument("--graphs-dir", help="skip NLP; validate pre-built graphs")
    p.add_argument("--registry")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract_context)

    p = sub.add_parser("check", help="compare observed behavior to expected contexts")
    p.add_argument("--events", required=True)
    p.add_argument("--iot", required=True, help="expected context graph set")
    p.add_argument("--mined", help="mined graph set (default: mine --events)")
    p.add_argument("--registry")
    p.add_argument("--out", required=True)
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--join-window", type=float, default=2.1)
    p.add_argument("--fallback-gap", type=float, default=10.0)
    p.add_argument("--extension-window", type=float, default=1.0)
    p.add_argument("--fail-on-anomaly", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("vuln", help="discover and confirm hidden inter-app couplings")
    p.add_argument("--iot", required=True)
    p.add_argument("--mined", help="mined graph set for confirmation")
    p.add_argument("--channels", help="channel map file (default: bundled)")
    p.add_argument("--registry")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_vuln)

    p = sub.add_parser("run", help="simulate, train, detect, mine, check, vuln")
    p.add_argument("--preset", choices=sorted(PRESETS), default="demo")
    p.add_argument("--duration", type=float, default=4000.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--background", type=float, default=0.05)
    p.add_argument("--trees", type=int, default=40)
    p.add_argument("--per-class", type=int, default=60)
    p.add_argument("--inject", choices=_ANOMALY_KINDS)
    p.add_argument("--inject-count", type=int, default=5)
    p.add_argument("--fail-on-anomaly", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_run)

    return ap


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
