"""Exponent fits for growth tables and the subadditivity bound verifier."""

from __future__ import annotations

import math

import numpy as np

from ggl.words import norm_table

LOWER_BAND = 0.5153  # known lower exponent for the growth of the Grigorchuk group


class DegenerateSeries(ValueError):
    pass


def _as_pairs(table):
    if isinstance(table, dict):
        return sorted(table.items())
    table = list(table)
    if table and isinstance(table[0], (tuple, list)):
        return [(n, v) for n, v in table]
    return list(enumerate(table))


def fit_exponent(series, kind: str = "delta", window=None) -> dict:
    """Least-squares slope of ``log v`` (``kind='delta'``) or ``log log v``
    (``kind='growth'``) against ``log n``.

    The default window is the upper half ``[ceil(nmax/2), nmax]`` of the
    indices.  Growth points with ``v(n) < 3`` are skipped (``log log`` is not
    meaningful there).  For Delta tables the report includes whether the
    slope is below 1; growth fits carry no verdict.
    """
    pairs = [(n, v) for n, v in _as_pairs(series) if n >= 1]
    if len(pairs) < 3:
        raise DegenerateSeries("need at least 4 entries (n = 0..3)")
    nmax = max(n for n, _ in pairs)
    lo, hi = window if window is not None else (math.ceil(nmax / 2), nmax)
    pts = []
    per_n = {}
    for n, v in pairs:
        if kind == "delta":
            if v <= 0:
                continue
            y = math.log(v)
        elif kind == "growth":
            if v < 3:
                continue
            y = math.log(math.log(v))
        else:
            raise ValueError(f"kind must be 'delta' or 'growth', not {kind!r}")
        if n >= 2:
            per_n[n] = y / math.log(n)
        if lo <= n <= hi:
            pts.append((math.log(n), y))
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        raise DegenerateSeries("fewer than two usable points in the fit window")
    xs, ys = np.array(pts).T
    slope, intercept = np.polyfit(xs, ys, 1)
    slope = float(slope)
    if abs(slope) < 1e-12:
        slope = 0.0
    t = norm_table()
    report = {
        "kind": kind,
        "window": [lo, hi],
        "slope": round(slope, 12),
        "intercept": round(float(intercept), 12),
        "per_n": {str(n): round(b, 12) for n, b in sorted(per_n.items())},
        "reference": {"alpha": round(t.alpha, 12), "lower_band": LOWER_BAND},
    }
    if kind == "delta":
        report["slope_below_one"] = slope < 1
    return report


def general_lemma_constants(eta: float, C: float) -> dict:
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    alpha = math.log(2) / math.log(2 / eta)
    K = C / (2 - eta)
    M = C / (1 - eta)
    N = K / (1 - alpha)
    return {"eta": eta, "C": C, "alpha": alpha, "K": K, "M": M, "N": N}


def delta_star(n: float, L: float, K: float, N: float, alpha: float) -> float:
    if n >= N:
        return L * (n - K) ** alpha
    return 1 + (L * (N - K) ** alpha - 1) * n / N


def verify_general_lemma(table, eta: float | None = None, C: float | None = None,
                         tol: float = 1e-9) -> dict:
    """Build the comparison function ``Delta*`` and check ``Delta <= Delta*``.

    ``L`` is the least constant for which the bound holds at every table
    entry with ``n <= M``; the verdict is whether it then holds on the whole
    table.  Also reports monotonicity of ``Delta*`` and a numerical
    concavity check (on each branch and across the junction at ``N``).
    """
    t = norm_table()
    eta = t.eta if eta is None else eta
    C = t.C if C is None else C
    k = general_lemma_constants(eta, C)
    alpha, K, M, N = k["alpha"], k["K"], k["M"], k["N"]
    pairs = [(n, v) for n, v in _as_pairs(table)]
    base = (N - K) ** alpha
    L = 0.0
    for n, v in pairs:
        if n > M + 1e-9 or n <= 0:  # M = eta + eta^2 + eta^3 = 2 exactly for the norm constants
            continue
        if n >= N:
            need = v / (n - K) ** alpha
        else:
            need = ((v - 1) * N / n + 1) / base
        L = max(L, need)
    if L == 0.0:
        L = 1 / base  # no constraint: smallest L keeping Delta* >= 1
    rows = []
    ok = True
    for n, v in pairs:
        bound = delta_star(n, L, K, N, alpha)
        holds = v <= bound + tol
        ok &= holds
        rows.append({"n": n, "delta": v, "bound": round(bound, 9), "holds": holds})

    hi = max([n for n, _ in pairs] + [2 * N + 1])
    grid = np.linspace(0, hi, 2001)
    vals = np.array([delta_star(x, L, K, N, alpha) for x in grid])
    monotone = bool(np.all(np.diff(vals) >= -1e-12))
    slopes = np.diff(vals) / np.diff(grid)
    concave = bool(np.all(np.diff(slopes) <= 1e-9))
    left = (L * base - 1) / N
    right = L * alpha * (N - K) ** (alpha - 1)
    return {
        "constants": {x: round(y, 12) for x, y in k.items()},
        "L": round(L, 12),
        "rows": rows,
        "verdict": ok,
        "monotone": monotone,
        "concave": concave,
        "junction_slopes": [round(left, 12), round(right, 12)],
    }
