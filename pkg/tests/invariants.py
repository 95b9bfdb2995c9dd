"""Post-mining invariant checks shared by the unit and acceptance suites.

Each checker returns a list of human-readable violations (empty when clean).
"""
from fractions import Fraction

from rare_temporal.miner import as_fraction, support
from rare_temporal.model import classify_relation, pair_order


def _event_supports(db):
    counts = {}
    for syms in db.symbol_sets():
        for s in syms:
            counts[s] = counts.get(s, 0) + 1
    return counts


def bound_violations(db, cfg, result):
    out = []
    n = len(db)
    ev = _event_supports(db)
    lo, hi, d = as_fraction(cfg.sigma_min), as_fraction(cfg.sigma_max), as_fraction(cfg.delta)
    h2 = result.levels[0] if result.levels else None
    for mp in result.patterns:
        p = mp.pattern
        max_e = max(ev[e] for e in p.events)
        supp = Fraction(mp.support_count, n)
        conf = Fraction(mp.support_count, max_e)
        # output contract
        if p.size < 2 or not (lo <= supp <= hi) or conf < d:
            out.append(f"{mp.key}: outside thresholds")
        if mp.support_count != len(mp.supporting_sequences) or mp.support_frac != mp.support_count / n:
            out.append(f"{mp.key}: inconsistent support fields")
        # pattern support never exceeds a member event's support
        if mp.support_count > min(ev[e] for e in p.events):
            out.append(f"{mp.key}: support above an event's support")
        # the event group itself must clear both thresholds
        g = support(db, p.events)
        if not (Fraction(g, n) >= lo and Fraction(g, max_e) >= d):
            out.append(f"{mp.key}: event group fails support/confidence bounds")
        # confidence bounded by 2-event sub-patterns stored at level 2
        if h2 is not None:
            for i, j in pair_order(p.size):
                sub = p.sub_pattern([i, j])
                if sub.key in h2:
                    sub_conf = Fraction(len(h2.pattern_sequences(sub.key)), max(ev[e] for e in sub.events))
                    if sub_conf < conf:
                        out.append(f"{mp.key}: sub-pattern {sub.key} has lower confidence")
        # transitivity: every witness realizes every recorded relation
        if not mp.witness or set(mp.witness) != set(mp.supporting_sequences):
            out.append(f"{mp.key}: witness missing for some sequence")
            continue
        for sid, bindings in mp.witness.items():
            seq = set(db[sid].instances)
            for b in bindings:
                if not set(b) <= seq or len(set(b)) != len(b):
                    out.append(f"{mp.key}: witness in seq {sid} is not a set of its instances")
                if tuple(i.symbol for i in b) != p.events:
                    out.append(f"{mp.key}: witness symbols out of order")
                if any(x.start > y.start for x, y in zip(b, b[1:])):
                    out.append(f"{mp.key}: witness not chronological")
                    continue
                for (i, j), r in zip(pair_order(p.size), p.relations):
                    if classify_relation(b[i], b[j], cfg.relation) is not r:
                        out.append(f"{mp.key}: witness pair ({i},{j}) in seq {sid} is not {r.name}")
    return out


def monotone_violations(by_mode):
    """``by_mode`` maps a Pruning value to its MiningResult."""
    out = []

    def per_level(r):
        return {s.level: s.candidates for s in r.stats}

    c = {m.value if hasattr(m, "value") else m: per_level(r) for m, r in by_mode.items()}
    for small, big in (("all", "apriori"), ("apriori", "none"), ("all", "trans"), ("trans", "none")):
        if small not in c or big not in c:
            continue
        for level, v in c[small].items():
            if v > c[big].get(level, 0):
                out.append(f"level {level}: {small} has {v} candidates, {big} has {c[big].get(level, 0)}")
    return out
