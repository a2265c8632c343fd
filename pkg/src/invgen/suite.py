"""Acceptance suite: every exit criterion as a function returning a JSON-able record.

Records carry no timings, so two runs of a profile serialize identically;
elapsed times are reported separately by the runner.
"""

import time
from itertools import combinations

from .catalog import catalog, resolve
from .invariable import (
    certificate_to_json,
    check_frattini_invariance,
    check_subadditivity,
    compute_dI,
    generator_rank,
    invariably_generates,
    log2_bound,
    sample_refute,
    verify_certificate_json,
)
from .power import (
    GenMatrix,
    bounds_report,
    three_row_matrix,
    direct_power_cross_check,
    lemma42_check,
    m_exact,
    power_certificate_to_json,
    verify_power_certificate_json,
)
from .structure import all_subgroups, conjugacy_classes, normal_subgroups

SUITE_SCHEMA = "invgen.suite/1"

# m(A5, r) from the exhaustive class-vector orbit count; regression constants
M_EXACT_A5 = {1: 0, 2: 2, 3: 21}

FRATTINI_EXTRA = ["C4", "C12", "Q8", "D8", "S3", "S4", "A4"]


def _record(cid, title, passed, **details):
    return {"id": cid, "title": title, "passed": bool(passed), "details": details}


def criterion_simple_dI(limit_seconds=60.0):
    rows = []
    for name in ["A5", "A6", "PSL(2,7)"]:
        start = time.perf_counter()
        G = resolve(name)
        d = compute_dI(G)
        cert = invariably_generates(G, d.witness_elements())
        doc = certificate_to_json(cert, name)
        problems = verify_certificate_json(doc)
        elapsed = time.perf_counter() - start
        rows.append({
            "group": name,
            "dI": d.value,
            "witness_classes": d.witness,
            "certificate_verdict": doc["verdict"],
            "certificate_replays": not problems,
            "within_time_limit": elapsed <= limit_seconds,
        })
    ok = all(r["dI"] == 2 and r["certificate_verdict"] == "yes" and r["certificate_replays"]
             and r["within_time_limit"] for r in rows)
    return _record(1, "d_I = 2 on A5, A6, PSL(2,7) with replayable certificates", ok, groups=rows)


def criterion_maximal_vs_definition(trials=500, seed=2024):
    violations = []
    cases = yes_cases = 0
    for name in catalog(200):
        G = resolve(name)
        cls = conjugacy_classes(G)
        subsets = [()] + [(c,) for c in range(len(cls))] + list(combinations(range(len(cls)), 2))
        for sub in subsets:
            S = [cls.reps[c] for c in sub]
            cert = invariably_generates(G, S)
            cases += 1
            if not cert.check():
                violations.append({"group": name, "classes": list(sub), "problem": "certificate fails re-check"})
            if cert.verdict:
                yes_cases += 1
                counter = sample_refute(G, S, trials, seed + cases)
                if counter is not None:
                    violations.append({"group": name, "classes": list(sub), "problem": "yes refuted by sampling"})
    return _record(2, "maximal-subgroup verdicts agree with the definition", not violations,
                   cases=cases, yes_cases=yes_cases, trials=trials, violations=violations)


def criterion_class_meeting_subgroups():
    violations = []
    checked = 0
    for name in catalog(200):
        G = resolve(name)
        cls = conjugacy_classes(G)
        full = (1 << G.order) - 1
        for rec in all_subgroups(G).records:
            checked += 1
            if all(rec.mask & cm for cm in cls.masks) and rec.mask != full:
                violations.append({"group": name, "subgroup_order": rec.order})
    return _record(3, "a subgroup meeting every class is the whole group", not violations,
                   subgroups_checked=checked, violations=violations)


def criterion_frattini():
    names = list(dict.fromkeys(FRATTINI_EXTRA + catalog(500)))
    rows = [check_frattini_invariance(resolve(n)) for n in names]
    return _record(4, "d_I(G) = d_I(G / Frattini)", all(r["holds"] for r in rows),
                   groups=[{k: r[k] for k in ("group", "frattini_order", "dI", "dI_quotient", "holds")} for r in rows])


def criterion_log2_bound():
    rows = []
    for name in catalog(500):
        G = resolve(name)
        d = compute_dI(G)
        rank = generator_rank(G)
        witness_generates = G.generates([G.table.perm(x) for x in d.witness_elements()])
        rows.append({"group": name, "dI": d.value, "log2_bound": log2_bound(G), "generator_rank": rank,
                     "holds": d.value <= log2_bound(G) and rank <= d.value and witness_generates})
    return _record(5, "d_I(G) <= floor(log2 |G|)", all(r["holds"] for r in rows), groups=rows)


def criterion_subadditivity():
    rows = []
    for name in catalog(200):
        G = resolve(name)
        for mask in normal_subgroups(G):
            r = check_subadditivity(G, mask)
            rows.append(r)
    violations = [r for r in rows if not r["holds"]]
    return _record(6, "d_I(G) <= d_I(N) + d_I(G/N) for normal N", not violations,
                   pairs_checked=len(rows), violations=violations)


def criterion_sandwich(full=False):
    A5 = resolve("A5")
    rs = [1, 2, 3] if full else [1, 2]
    reports = {r: m_exact(A5, r) for r in rs}
    rows = []
    for r, rep in reports.items():
        rows.append({
            "r": r,
            "m_exact": rep.m_exact,
            "lower": rep.lower,
            "upper": rep.upper,
            "sandwich_holds": rep.sandwich_holds if r >= 2 else None,
            "class_tuple_count": rep.class_tuple_count,
            "element_tuple_orbits": rep.element_tuple_orbits,
            "matches_regression": rep.m_exact == M_EXACT_A5[r],
        })
    values = [reports[r].m_exact for r in rs]
    ok = (
        reports[1].m_exact == 0
        and all(row["sandwich_holds"] for row in rows if row["r"] >= 2)
        and all(row["matches_regression"] for row in rows)
        and values == sorted(values)
        and reports[2].k == 5 and reports[2].out == 2
    )
    return _record(7, "m(A5, r) sandwich, m(A5,1) = 0, nondecreasing in r", ok, profile="full" if full else "quick",
                   reports=rows)


def criterion_three_rows(trials=1000, seed=7):
    A5 = resolve("A5")
    A = three_row_matrix(A5, 2)
    cert = lemma42_check(A)
    doc = power_certificate_to_json(cert, "A5")
    cross = direct_power_cross_check(A, trials, seed)
    rep = bounds_report(A5, 2)
    ok = (cert.verdict and cert.check() and not verify_power_certificate_json(doc) and cross["ok"]
          and cross["counterexample"] is None and rep.extra["three_row_bound_holds"])
    return _record(8, "d_I(A5^2) <= 3 by an explicit three-row matrix", ok, matrix=A.to_cycles(),
                   verdict=doc["verdict"], cross_check=cross, k_over_out=rep.extra["k_over_out"])


def criterion_failure_witnesses():
    A5 = resolve("A5")
    cases = {
        "equal columns": [["(1,2,3,4,5)", "(1,2,3,4,5)"], ["(1,2,3)", "(1,2,3)"]],
        "single-class column": [["(1,2,3,4,5)", "(1,2,3,4,5)"], ["(1,3,5,2,4)", "(1,2,3)"]],
    }
    rows = []
    for label, matrix in cases.items():
        A = GenMatrix.from_cycles(A5, matrix)
        cert = lemma42_check(A)
        report = direct_power_cross_check(A, trials=0)
        doc = power_certificate_to_json(cert, "A5")
        rows.append({"case": label, "failed": cert.failed, "witness_order": report.get("witness_order"),
                     "rows_absorbed": report.get("rows_absorbed"),
                     "ok": (not cert.verdict) and cert.check() and report["ok"]
                     and not verify_power_certificate_json(doc)})
    return _record(9, "power-criterion failure witnesses absorb every row", all(r["ok"] for r in rows), cases=rows)


def run_suite(profile="quick", progress=None):
    """Run criteria 1-9 and return (document, elapsed seconds per criterion)."""
    if profile not in ("quick", "full"):
        raise ValueError(f"unknown profile {profile!r}")
    full = profile == "full"
    steps = [
        criterion_simple_dI,
        criterion_maximal_vs_definition,
        criterion_class_meeting_subgroups,
        criterion_frattini,
        criterion_log2_bound,
        criterion_subadditivity,
        lambda: criterion_sandwich(full),
        criterion_three_rows,
        criterion_failure_witnesses,
    ]
    results = []
    timings = []
    for step in steps:
        start = time.perf_counter()
        rec = step()
        timings.append(time.perf_counter() - start)
        results.append(rec)
        if progress:
            progress(rec, timings[-1])
    doc = {
        "schema": SUITE_SCHEMA,
        "profile": profile,
        "criteria": results,
        "passed": all(r["passed"] for r in results),
    }
    return doc, timings
