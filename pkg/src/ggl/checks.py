"""The thirteen acceptance checks.  Each returns a JSON-ready dict with a
``pass`` verdict; nothing in a report depends on timing or thread count."""

from __future__ import annotations

import json
import math
import random
import time

from ggl import __version__
from ggl.analysis import verify_general_lemma
from ggl.orbits import (delta, orbit_tables, schreier_ball,
                        unmarked_isomorphic)
from ggl.presentations import expand, grig_lpres, k1_lpres, verify, grig_oracle, k1_oracle
from ggl.torsionfree import (germ, h_lower_bound_family, kerxi_probe, torsion_free_probe)
from ggl.tree import ERSCHLER, GRIG, RHO, UNBOUNDED, act_ray, format_ray, order
from ggl.words import (alpha_constants, contraction_check, norm_table, pre_reduced_words,
                       random_word, zeta_companion, zeta_length, zeta_word)
from ggl.wreath import (erschler_embedding_witness, perm_support_check,
                        signature_depth, sinfty_lower_bound_family, support_bound_check,
                        tower, w_ball)


def _result(num, name, ok, details):
    return {"id": num, "name": name, "pass": bool(ok), "details": details}


def check_substitution(seed=0, threads=1, nmax=10, budget=60.0):
    t0 = time.perf_counter()
    rows = []
    ok = True
    for n in range(nmax + 1):
        d = delta(zeta_word(n))
        dp = delta(zeta_companion(n))
        row = {"n": n, "delta_w": d, "expected_w": 2 ** n + 1,
               "delta_w_prime": dp, "expected_w_prime": 2 ** n}
        ok &= d == 2 ** n + 1 and dp == 2 ** n
        rows.append(row)
    fast = time.perf_counter() - t0 < budget
    return _result(1, "substitution family", ok and fast,
                   {"rows": rows, "within_time_budget": fast,
                    "w_identity_holds": all(r["delta_w"] == r["expected_w"] for r in rows),
                    "w_prime_identity_holds": all(r["delta_w_prime"] == r["expected_w_prime"]
                                                  for r in rows)})


def check_lengths(seed=0, threads=1, nmax=12):
    eta = norm_table().eta
    rows = [{"n": n, "formula": zeta_length(n), "word": len(zeta_word(n))}
            for n in range(nmax + 2)]
    exact = all(r["formula"] == r["word"] for r in rows[: nmax + 1])
    ratio = rows[nmax + 1]["word"] / rows[nmax]["word"]
    rel = abs(ratio - 2 / eta) / (2 / eta)
    return _result(2, "substitution lengths", exact and rel < 0.02,
                   {"rows": rows[: nmax + 1], "ratio": round(ratio, 12),
                    "two_over_eta": round(2 / eta, 12), "relative_error": round(rel, 12)})


def check_constants(seed=0, threads=1):
    eta, r, alpha = alpha_constants()
    e1 = abs(eta ** 3 + eta ** 2 + eta - 2)
    e2 = abs(alpha - 0.7674)
    e3 = abs(r - 2 / eta)
    return _result(3, "constants", e1 < 1e-12 and e2 < 5e-4 and e3 < 1e-9,
                   {"eta": round(eta, 15), "alpha": round(alpha, 15), "root": round(r, 15),
                    "poly_residual_ok": e1 < 1e-12, "alpha_ok": e2 < 5e-4, "root_ok": e3 < 1e-9})


def check_contraction(seed=0, threads=1, nmax=12):
    count = 0
    worst = -math.inf
    bad = []
    for w in pre_reduced_words(nmax):
        lhs, rhs, ok = contraction_check(w)
        count += 1
        worst = max(worst, lhs - rhs)
        if not ok:
            bad.append(w)
    return _result(4, "contraction inequality", not bad,
                   {"words": count, "max_lhs_minus_rhs": round(worst, 12), "failures": bad[:10]})


def check_delta_table(seed=0, threads=1, nmax=14):
    D, _ = orbit_tables(nmax, GRIG, threads=threads)
    linear = all(D[n] <= n + 1 for n in range(nmax + 1))
    small = D[1] == 2 and D[2] == 2
    mono = all(D[n] <= D[n + 1] for n in range(nmax))
    sqrt_bound = all(D[n * (n - 1) // 2] >= n for n in range(1, 6))
    lemma = verify_general_lemma(D)
    ok = linear and small and mono and sqrt_bound and lemma["verdict"]
    return _result(5, "Delta table", ok,
                   {"delta": D, "at_most_n_plus_1": linear, "delta_1_2": small,
                    "monotone": mono, "triangular_lower_bound": sqrt_bound,
                    "orbit_growth_bound": {"L": lemma["L"], "verdict": lemma["verdict"],
                                      "constants": lemma["constants"]}})


def check_sigma_envelope(seed=0, threads=1, nmax=14, fit_at=8):
    _, S = orbit_tables(nmax, GRIG, threads=threads)
    alpha = norm_table().alpha
    C = math.log(S[fit_at]) / fit_at ** alpha
    rows = []
    ok = True
    for n in range(fit_at + 1, nmax + 1):
        lhs = math.log(S[n])
        rhs = C * n ** alpha
        rows.append({"n": n, "sigma": S[n], "log_sigma": round(lhs, 12),
                     "envelope": round(rhs, 12), "holds": lhs <= rhs})
        ok &= lhs <= rhs
    return _result(6, "Sigma envelope", ok,
                   {"sigma": S, "C": round(C, 12),
                    "ratios": {str(n): round(math.log(S[n]) / n ** alpha, 12)
                               for n in range(1, nmax + 1)},
                    "rows": rows})


def check_presentations(seed=0, threads=1, budget=300.0):
    t0 = time.perf_counter()
    g = verify(expand(grig_lpres(), 6), grig_oracle)
    k = verify(expand(k1_lpres(), 4), k1_oracle)
    sanity = verify(["ab"], grig_oracle)
    fast = time.perf_counter() - t0 < budget
    ok = g["ok"] and k["ok"] and not sanity["ok"] and fast
    return _result(7, "L-presentations", ok,
                   {"grig": {"relators": g["relators"], "nontrivial": g["nontrivial"]},
                    "k1": {"relators": k["relators"], "nontrivial": k["nontrivial"]},
                    "ab_reported_nontrivial": not sanity["ok"],
                    "within_time_budget": fast})


def check_torsion(seed=0, threads=1, trials=200, wordlen=24, cap=1 << 12):
    rng = random.Random(seed)
    orders = []
    for _ in range(trials):
        w = random_word(rng, rng.randint(0, wordlen))
        k = order(w, cap)
        orders.append(k)
    finite = all(k != UNBOUNDED and k & (k - 1) == 0 and k <= cap for k in orders)
    er = order("ad", cap, ERSCHLER)
    rays = [act_ray("ad" * i, RHO, ERSCHLER) for i in range(65)]
    distinct = len(set(rays)) == 65
    hist = {}
    for k in orders:
        key = "unbounded" if k == UNBOUNDED else str(k)
        hist[key] = hist.get(key, 0) + 1
    return _result(8, "torsion dichotomy", finite and er == UNBOUNDED and distinct,
                   {"seed": seed, "order_histogram": dict(sorted(hist.items())),
                    "all_finite_2_powers": finite,
                    "erschler_ad_unbounded": er == UNBOUNDED,
                    "erschler_orbit_distinct_64": distinct})


def check_exponential_witness(seed=0, threads=1, n=10, radius=8):
    wit = erschler_embedding_witness(n)
    iso = unmarked_isomorphic(schreier_ball(GRIG, RHO, radius), schreier_ball(ERSCHLER, RHO, radius))
    return _result(9, "exponential witness", wit["all_distinct"] and iso,
                   {"witness": wit, "unmarked_balls_isomorphic": iso, "radius": radius})


def check_sinfty(seed=0, threads=1, n=3, trials=500, wordlen=12):
    fam = sinfty_lower_bound_family(n)
    sup = perm_support_check(trials, wordlen, seed)
    ok = fam["all_distinct"] and fam["decoder_recovers_exponents"] and sup["ok"]
    return _result(10, "finitary permutations extension", ok,
                   {"family": fam, "support": {"trials": trials, "failures": sup["failures"]}})


def check_torsion_free(seed=0, threads=1):
    rng = random.Random(seed)
    at_rho = germ("b", RHO)
    ball = sorted(x for x in schreier_ball(GRIG, RHO, 32).vertices if x != RHO)
    taus = sorted(rng.sample(ball, 8))
    off = {format_ray(t): list(germ("b", t)) for t in taus}
    germs_ok = at_rho == (1, 0, 0) and all(v == [0, 0, 0] for v in off.values())
    ker = kerxi_probe(50, seed)
    fam = h_lower_bound_family(2, 2)
    tf = torsion_free_probe(100, 8, 1 << 10, seed)
    ok = germs_ok and ker["ok"] and fam["all_distinct"] and fam["distinct"] == 32 and tf["ok"]
    return _result(11, "torsion-free group", ok,
                   {"germ_b_rho": list(at_rho), "germ_b_elsewhere": off,
                    "kerxi": {"trials": 50, "failures": ker["failures"]},
                    "family": fam, "torsion_free": {"trials": 100, "finite_order": tf["finite_order"]}})


def check_bfs_consistency(seed=0, threads=1, radius=8, trials=500, wordlen=12):
    D = signature_depth(radius)
    s1 = w_ball(tower(1, "Z2", depth=D), radius, threads)
    s2 = w_ball(tower(1, "Z2", depth=D + 2), radius, threads)
    sup = support_bound_check(GRIG, trials, wordlen, seed)
    return _result(12, "BFS self-consistency", s1 == s2 and sup["ok"],
                   {"depth": D, "series": s1, "series_deeper": s2,
                    "support": {"trials": trials, "failures": sup["failures"]}})


CHECKS = [check_substitution, check_lengths, check_constants, check_contraction,
          check_delta_table, check_sigma_envelope, check_presentations, check_torsion,
          check_exponential_witness, check_sinfty, check_torsion_free, check_bfs_consistency]


def _threaded_parts(seed, threads):
    """Everything whose computation is split over worker threads."""
    D, S = orbit_tables(14, GRIG, threads=threads)
    k1 = w_ball(tower(1), 8, threads)
    return json.dumps({"delta": D, "sigma": S, "k1": k1}, sort_keys=True)


def check_determinism(seed=0, threads=1):
    outs = {t: _threaded_parts(seed, t) for t in (1, 2, 8)}
    same = len(set(outs.values())) == 1
    return _result(13, "determinism across thread counts", same,
                   {"thread_counts": [1, 2, 8], "identical": same})


def run_all(seed: int = 0, threads: int = 1) -> list[dict]:
    out = [c(seed=seed, threads=threads) for c in CHECKS]
    out.append(check_determinism(seed, threads))
    return out


def report(seed: int = 0, threads: int = 1) -> dict:
    results = run_all(seed, threads)
    return {
        "command": "check-all",
        "params": {"seed": seed},
        "verdicts": [{"id": r["id"], "name": r["name"], "pass": r["pass"]} for r in results],
        "data": results,
        "seed": seed,
        "version": __version__,
    }
