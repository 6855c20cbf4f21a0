"""Naive re-implementation of the dependency-mining contract, for cross-checks.

Deliberately shares no code or style with the library: pair gaps come from
explicit scan loops and statistics.stdev, chains from enumerating every
permutation of event types up to a length cap, counts from a literal walk
over per-type occurrence lists. Slow on purpose; correctness is the point.

The contract being re-implemented:
  - gap samples: each occurrence of a pairs with the first unconsumed
    occurrence of b strictly after it; the sample counts only when the gap
    is at most max_lag, and then that b occurrence is spent.
  - dependent pair: at least min_support samples and sample stdev < tau.
  - chain: distinct types, every adjacent pair dependent, every skip pair
    present in the stats table with |mu(skip) - sum(adjacent mus)| <= eps_add.
  - maximal: not embeddable in order (gaps allowed) into another chain.
  - counts: greedy earliest-match walks, each hop within
    [max(mu - 3 tau, 0), mu + 3 tau] of the previous event; a finished walk
    spends its occurrences.
  - reinstated: a contiguous proper subsequence s of a maximal chain whose
    own count c exceeds the summed counts of every maximal chain enclosing
    it; reported with count c - sum.
"""
import itertools
import random
import statistics


def pair_stats(stream, max_lag, min_support):
    """(a, b) -> (mean, stdev, samples) for pairs with enough gap samples."""
    by = {}
    for eid, ts in sorted(stream, key=lambda e: (e[1], e[0])):
        by.setdefault(eid, []).append(ts)
    out = {}
    for a, ta in by.items():
        for b, tb in by.items():
            if a == b:
                continue
            spent = [False] * len(tb)
            samples = []
            for t0 in ta:
                pick = None
                for j in range(len(tb)):
                    if not spent[j] and tb[j] > t0:
                        pick = j
                        break
                if pick is not None and tb[pick] - t0 <= max_lag:
                    samples.append(tb[pick] - t0)
                    spent[pick] = True
            if len(samples) >= min_support:
                out[(a, b)] = (statistics.mean(samples),
                               statistics.stdev(samples), tuple(samples))
    return out


def dependent_keys(stats, tau):
    return {k for k, (_, std, _) in stats.items() if std < tau}


def _skips_additive(seq, stats, eps_add):
    for i in range(len(seq)):
        for j in range(i + 2, len(seq)):
            if (seq[i], seq[j]) not in stats:
                return False
            direct = stats[(seq[i], seq[j])][0]
            hops = sum(stats[(seq[x], seq[x + 1])][0] for x in range(i, j))
            if abs(direct - hops) > eps_add:
                return False
    return True


def _embeds(s, t):
    i = 0
    for x in t:
        if i < len(s) and s[i] == x:
            i += 1
    return i == len(s)


def maximal_chains(stats, dependent, eps_add, cap=5):
    """Every valid chain up to the cap, filtered down to the maximal ones."""
    types = sorted({t for pair in dependent for t in pair})
    valid = []
    for k in range(2, cap + 1):
        for seq in itertools.permutations(types, k):
            if not all((seq[i], seq[i + 1]) in dependent for i in range(k - 1)):
                continue
            if _skips_additive(seq, stats, eps_add):
                valid.append(seq)
    out = [s for s in valid
           if not any(len(t) > len(s) and _embeds(s, t) for t in valid)]
    out.sort(key=lambda c: (-len(c), c))
    return out


def greedy_count(seq, stream, stats, tau):
    by = {}
    for eid, ts in sorted(stream, key=lambda e: (e[1], e[0])):
        by.setdefault(eid, []).append(ts)
    if any(e not in by for e in seq):
        return 0
    windows = []
    for i in range(len(seq) - 1):
        if (seq[i], seq[i + 1]) not in stats:
            return 0
        mu = stats[(seq[i], seq[i + 1])][0]
        windows.append((max(mu - 3 * tau, 0.0), mu + 3 * tau))
    spent = {e: [False] * len(by[e]) for e in set(seq)}
    made = 0
    for i0, t0 in enumerate(by[seq[0]]):
        if spent[seq[0]][i0]:
            continue
        walk = [(seq[0], i0)]
        t_prev = t0
        ok = True
        for pos in range(1, len(seq)):
            b = seq[pos]
            lo, hi = windows[pos - 1]
            floor = t_prev + max(lo, 1e-12)
            pick = None
            for j, tb in enumerate(by[b]):
                if tb < floor:
                    continue
                if tb - t_prev > hi:
                    break
                if not spent[b][j] and tb > t_prev:
                    pick = j
                    break
            if pick is None:
                ok = False
                break
            walk.append((b, pick))
            t_prev = by[b][pick]
        if ok:
            for e, j in walk:
                spent[e][j] = True
            made += 1
    return made


def mined_sequences(stream, max_lag, min_support, tau, eps_add, cap=5):
    """Full pass: (events, count) rows sorted longest first, then lexically."""
    stats = pair_stats(stream, max_lag, min_support)
    dep = dependent_keys(stats, tau)
    maximal = maximal_chains(stats, dep, eps_add, cap)
    counts = {L: greedy_count(L, stream, stats, tau) for L in maximal}
    rows = [(L, counts[L]) for L in maximal]
    enclosing = {}
    for L in maximal:
        for size in range(2, len(L)):
            for start in range(len(L) - size + 1):
                enclosing.setdefault(L[start:start + size], set()).add(L)
    for s in sorted(enclosing, key=lambda q: (-len(q), q)):
        explained = sum(counts[L] for L in enclosing[s])
        c = greedy_count(s, stream, stats, tau)
        if c > explained:
            rows.append((s, c - explained))
    rows.sort(key=lambda r: (-len(r[0]), r[0]))
    return rows, stats, dep


# ---------------------------------------------------------------------------
# Seeded stream families for the equivalence check
# ---------------------------------------------------------------------------

def synth_stream(seed, max_events=500):
    """A random mix of noise types, one planted chain, and optional
    standalone occurrences of the chain's tail (reinstatement pressure).
    Planted chains stay at <= 4 types so no maximal chain can outgrow the
    enumeration cap."""
    rng = random.Random(seed)
    n_types = rng.randint(4, 8)
    types = list(range(1, n_types + 1))
    chain_len = rng.randint(2, min(4, n_types))
    chain = types[:chain_len]
    noise_types = types[chain_len:]

    events = []
    t = rng.uniform(0.0, 5.0)
    horizon = rng.uniform(1500.0, 3000.0)
    gaps = [rng.uniform(0.4, 3.0) for _ in range(chain_len - 1)]
    while t < horizon:
        cur = t
        events.append((chain[0], cur))
        for k, g in enumerate(gaps):
            cur += g + rng.gauss(0.0, 0.015)
            events.append((chain[k + 1], cur))
        t += rng.uniform(25.0, 60.0)

    if chain_len >= 3 and rng.random() < 0.7:
        # standalone tail occurrences, spliced between chain anchors
        tail = chain[1:]
        tgaps = gaps[1:]
        t = rng.uniform(10.0, 20.0)
        for _ in range(rng.randint(5, 25)):
            cur = t
            events.append((tail[0], cur))
            for k, g in enumerate(tgaps):
                cur += g + rng.gauss(0.0, 0.015)
                events.append((tail[k + 1], cur))
            t += rng.uniform(40.0, 90.0)

    for nt in noise_types:
        rate = rng.uniform(0.002, 0.02)
        t = 0.0
        while True:
            t += rng.expovariate(rate)
            if t > horizon:
                break
            events.append((nt, t))

    events.sort(key=lambda e: (e[1], e[0]))
    return events[:max_events]
