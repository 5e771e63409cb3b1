"""Command-line interface: ``ggl <command> [flags]``.

Every command builds a report ``{command, params, verdicts, data, seed,
version}``.  JSON is the canonical output, CSV is available for series
and DOT for Schreier graphs.  Exit status: 0 if every verdict passes, 1 on
a verification failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from ggl import __version__

BALL_KINDS = ["grig", "erschler", "k1", "k2", "l1", "h", "sinfty-ext"]
WITNESS_KINDS = ["erschler-embedding", "sinfty-family", "h-family"]
PRESENTATIONS = ["grig", "k1", "z2-wreath"]


class UsageError(ValueError):
    pass


def _clean(obj):
    """JSON-safe copy: infinities become the string 'unbounded'."""
    if isinstance(obj, float) and math.isinf(obj):
        return "unbounded"
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_clean(v) for v in obj)
    if isinstance(obj, bytes):
        return obj.hex()
    return obj


def _report(args, verdicts, data, params):
    return {
        "command": args.command,
        "params": params,
        "verdicts": [{"name": n, "pass": bool(ok)} for n, ok in verdicts],
        "data": data,
        "seed": args.seed,
        "version": __version__,
    }


# ---------------------------------------------------------------- commands

def cmd_orbit(args):
    from ggl.orbits import delta, delta_prime, direct_orbit, inverted_orbit
    from ggl.tree import format_ray, parse_ray
    word, x0 = args.word, parse_ray(args.basepoint)
    inv = sorted(inverted_orbit(word, x0, args.group))
    data = {
        "word": word,
        "basepoint": format_ray(x0),
        "inverted_orbit": [format_ray(x) for x in inv],
        "delta": delta(word, x0, args.group),
        "direct_orbit": [format_ray(x) for x in direct_orbit(word, x0, args.group)],
        "delta_prime": delta_prime(word, x0, args.group),
    }
    data["rows"] = [{"ray": x} for x in data["inverted_orbit"]]
    return [("delta_at_most_length_plus_1", data["delta"] <= len(word) + 1)], data, \
        {"word": word, "basepoint": data["basepoint"], "group": args.group}


def _cap(args):
    from ggl.orbits import DEFAULT_CAP
    return DEFAULT_CAP if args.depth_cap is None else args.depth_cap


def cmd_delta_table(args):
    from ggl.analysis import DegenerateSeries, fit_exponent, verify_general_lemma
    from ggl.orbits import delta_norm_table, orbit_tables
    n = args.maxlen
    params = {"group": args.group, "maxlen": n, "mode": args.mode}
    verdicts = []
    if args.mode == "norm":
        table = delta_norm_table(n, args.group, _cap(args))
        rows = [{"norm": a, "delta": b} for a, b in table]
        return verdicts, {"rows": rows}, params
    D, _ = orbit_tables(n, args.group, _cap(args), args.threads)
    rows = [{"n": i, "delta": v} for i, v in enumerate(D)]
    data = {"rows": rows}
    verdicts.append(("delta_at_most_n_plus_1", all(v <= i + 1 for i, v in enumerate(D))))
    try:
        fit = fit_exponent(D, "delta")
        data["fit"] = fit
        if args.group == "grig":
            verdicts.append(("slope_below_one", fit["slope_below_one"]))
    except DegenerateSeries:
        pass
    if args.group == "grig":
        lemma = verify_general_lemma(D)
        data["orbit_growth_bound"] = {k: lemma[k] for k in ("constants", "L", "verdict",
                                                       "monotone", "concave", "junction_slopes")}
        verdicts.append(("orbit_growth_bound", lemma["verdict"]))
    return verdicts, data, params


def cmd_sigma_count(args):
    from ggl.orbits import orbit_tables
    _, S = orbit_tables(args.maxlen, args.group, _cap(args), args.threads)
    rows = [{"n": i, "sigma": v} for i, v in enumerate(S)]
    return [], {"rows": rows}, {"group": args.group, "maxlen": args.maxlen}


def cmd_subst(args):
    from ggl.orbits import delta
    from ggl.words import sigma_iter, zeta_companion, zeta_length, zeta_word
    if args.word is not None:
        w = sigma_iter(args.word, args.n)
        data = {"word": args.word, "n": args.n, "image": w, "length": len(w)}
        return [], data, {"word": args.word, "n": args.n}
    rows = []
    for n in range(args.n + 1):
        w, wp = zeta_word(n), zeta_companion(n)
        row = {"n": n, "length": len(w), "formula_length": zeta_length(n),
               "delta_w": delta(w), "delta_w_prime": delta(wp)}
        if args.words:
            row["w"], row["w_prime"] = w, wp
        rows.append(row)
    ok = all(r["length"] == r["formula_length"] for r in rows)
    return [("length_formula", ok)], {"rows": rows}, {"n": args.n}


def cmd_schreier(args):
    from ggl.orbits import schreier_ball
    from ggl.tree import format_ray, parse_ray
    g = schreier_ball(args.group, parse_ray(args.basepoint), args.radius)
    data = g.to_json()
    data["dot"] = g.to_dot()
    return [], data, {"group": args.group, "radius": args.radius,
                      "basepoint": format_ray(g.x0)}


def cmd_order(args):
    from ggl.tree import H0, UNBOUNDED, as_group, order
    from ggl.torsionfree import h_order
    group = as_group(args.group)
    cap = args.cap
    k = h_order(args.word, cap) if group is H0 else order(args.word, cap, group)
    data = {"word": args.word, "order": k, "bounded": k != UNBOUNDED}
    return [], data, {"word": args.word, "group": args.group, "cap": cap}


def cmd_ball(args):
    from ggl.torsionfree import h_ball
    from ggl.wreath import perm_ext_ball, group_ball, signature_depth, tower, w_ball
    r, kind = args.radius, args.kind
    depth = args.depth_cap if args.depth_cap is not None else signature_depth(r)
    if kind in ("grig", "erschler"):
        series = group_ball(kind, r, depth, args.threads)
    elif kind in ("k1", "k2", "l1"):
        base = "Z" if kind == "l1" else "Z2"
        series = w_ball(tower(int(kind[1]), base, depth=depth), r, args.threads)
    elif kind == "h":
        series = h_ball(r, args.threads)
    else:
        series = perm_ext_ball(r, threads=args.threads, depth=depth)
    rows = [{"n": i, "size": v} for i, v in enumerate(series)]
    return [], {"rows": rows, "signature_depth": depth}, \
        {"kind": kind, "radius": r, "depth": depth}


def cmd_germ(args):
    from ggl.torsionfree import germ, germs
    from ggl.tree import format_ray, parse_ray
    table = germs(args.word)
    data = {"word": args.word,
            "germs": [[format_ray(x), list(v)] for x, v in sorted(table.items())]}
    verdicts = []
    if args.ray is not None:
        x = parse_ray(args.ray)
        g = germ(args.word, x)
        data["ray"] = format_ray(x)
        data["germ"] = list(g)
        verdicts.append(("section_route_matches_cocycle", tuple(g) == table.get(x, (0, 0, 0))))
    else:
        ok = all(germ(args.word, x) == v for x, v in table.items())
        verdicts.append(("section_route_matches_cocycle", ok))
    data["rows"] = [{"ray": x, "b": v[0], "c": v[1], "d": v[2]} for x, v in data["germs"]]
    return verdicts, data, {"word": args.word, "ray": data.get("ray")}


def cmd_verify_presentation(args):
    from ggl.presentations import (expand, grig_lpres, grig_oracle, k1_lpres, k1_oracle,
                                   verify, wreath_lpres, z2_lpres)
    if args.name == "grig":
        p, oracle = grig_lpres(), grig_oracle
    elif args.name == "k1":
        p, oracle = k1_lpres(), k1_oracle
    else:
        p, oracle = wreath_lpres(z2_lpres()), k1_oracle
    rels = expand(p, args.depth)
    res = verify(rels, oracle)
    data = {"presentation": p.to_json(), "relators": res["relators"],
            "nontrivial": res["nontrivial"]}
    return [("all_relators_trivial", res["ok"])], data, {"name": args.name, "depth": args.depth}


def cmd_alpha(args):
    from ggl.words import alpha_constants
    eta, r, alpha = alpha_constants()
    return [], {"eta": eta, "alpha": alpha, "root": r}, {}


def cmd_pairs(args):
    from ggl.orbits import pair_orbit_probe
    res = pair_orbit_probe(args.radius, args.maxlen, group=args.group)
    return [("invariance", res["invariance"]),
            ("transitive_within_explored_ball", res["transitive_within_explored_ball"])], \
        res, {"group": args.group, "radius": args.radius, "wordlen": args.maxlen}


def cmd_witness(args):
    kind = args.kind
    if kind == "erschler-embedding":
        from ggl.wreath import erschler_embedding_witness
        n = 10 if args.n is None else args.n
        res = erschler_embedding_witness(n)
        verdicts = [("all_distinct", res["all_distinct"])]
    elif kind == "sinfty-family":
        from ggl.wreath import sinfty_lower_bound_family
        n = 3 if args.n is None else args.n
        res = sinfty_lower_bound_family(n)
        verdicts = [("all_distinct", res["all_distinct"]),
                    ("decoder_recovers_exponents", res["decoder_recovers_exponents"])]
    else:
        from ggl.torsionfree import h_lower_bound_family
        n = 2 if args.n is None else args.n
        res = h_lower_bound_family(n, args.cap)
        verdicts = [("all_distinct", res["all_distinct"]), ("germ_readout", res["germ_readout"])]
    return verdicts, res, {"kind": kind, "n": n}


def cmd_check_all(args):
    from ggl.checks import run_all
    results = run_all(args.seed, args.threads)
    verdicts = [(f"{r['id']:02d} {r['name']}", r["pass"]) for r in results]
    return verdicts, results, {"seed": args.seed}


COMMANDS = {
    "orbit": cmd_orbit, "delta-table": cmd_delta_table, "sigma-count": cmd_sigma_count,
    "subst": cmd_subst, "schreier": cmd_schreier, "order": cmd_order, "ball": cmd_ball,
    "germ": cmd_germ, "verify-presentation": cmd_verify_presentation, "alpha": cmd_alpha,
    "pairs": cmd_pairs, "witness": cmd_witness, "check-all": cmd_check_all,
}


# ---------------------------------------------------------------- parser

def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive(text):
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global flags")
    g.add_argument("--group", default="grig", choices=["grig", "erschler", "h0"])
    g.add_argument("--radius", type=_nonneg, default=4)
    g.add_argument("--maxlen", type=_nonneg, default=8)
    g.add_argument("--depth-cap", type=_positive, default=None,
                   help="enumeration cap (orbit tables) or signature depth (balls)")
    g.add_argument("--format", default="json", choices=["json", "csv", "dot"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threads", type=_positive, default=1)
    g.add_argument("--out", default=None, help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="ggl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ggl {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("orbit", parents=[common], help="inverted and direct orbit of a word")
    s.add_argument("--word", required=True)
    s.add_argument("--basepoint", default="ρ")

    s = sub.add_parser("delta-table", parents=[common], help="exhaustive Delta table")
    s.add_argument("--mode", default="length", choices=["length", "norm"])

    sub.add_parser("sigma-count", parents=[common], help="number of distinct inverted orbits")

    s = sub.add_parser("subst", parents=[common], help="substitution words and their lengths")
    s.add_argument("--n", type=_nonneg, default=6)
    s.add_argument("--word", default=None, help="apply sigma n times to this word instead")
    s.add_argument("--words", action="store_true", help="include the words in the table")

    s = sub.add_parser("schreier", parents=[common], help="Schreier graph ball (DOT or JSON)")
    s.add_argument("--basepoint", default="ρ")

    s = sub.add_parser("order", parents=[common], help="order of an element")
    s.add_argument("--word", required=True)
    s.add_argument("--cap", type=_positive, default=4096)

    s = sub.add_parser("ball", parents=[common], help="ball growth series")
    s.add_argument("kind", choices=BALL_KINDS)

    s = sub.add_parser("germ", parents=[common], help="germs of an element of H")
    s.add_argument("--word", required=True)
    s.add_argument("--ray", default=None)

    s = sub.add_parser("verify-presentation", parents=[common],
                       help="check the relators of an L-presentation")
    s.add_argument("name", choices=PRESENTATIONS)
    s.add_argument("--depth", type=_nonneg, default=4)

    sub.add_parser("alpha", parents=[common], help="norm constants eta and alpha")
    sub.add_parser("pairs", parents=[common], help="diagonal action on pairs of rays")

    s = sub.add_parser("witness", parents=[common], help="growth lower-bound families")
    s.add_argument("kind", choices=WITNESS_KINDS)
    s.add_argument("--n", type=_nonneg, default=None)
    s.add_argument("--cap", type=_positive, default=2)

    sub.add_parser("check-all", parents=[common], help="run the acceptance suite")
    return p


# ---------------------------------------------------------------- output

def render(report, fmt) -> str:
    data = report["data"]
    if fmt == "json":
        body = dict(report)
        if isinstance(data, dict):  # the DOT text is an alternative view, not data
            body["data"] = {k: v for k, v in data.items() if k != "dot"}
        return json.dumps(_clean(body), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if fmt == "dot":
        if not isinstance(data, dict) or "dot" not in data:
            raise UsageError("--format dot is only available for schreier")
        return data["dot"]
    rows = data.get("rows") if isinstance(data, dict) else None
    if fmt == "csv" and rows is None and report["command"] == "check-all":
        rows = [{"id": r["id"], "name": r["name"], "pass": r["pass"]} for r in data]
    if rows is None and isinstance(data, dict) and all(
            isinstance(v, (int, float, str, bool)) for v in data.values()):
        rows = [data]
    if rows is None:
        raise UsageError(f"--format csv is not available for {report['command']}")
    buf = io.StringIO()
    fields = list(rows[0]) if rows else ["n"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(_clean(row))
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    from ggl.orbits import CapExceededError
    from ggl.wreath import MemoryGuardError
    try:
        verdicts, data, params = COMMANDS[args.command](args)
        report = _report(args, verdicts, data, params)
        text = render(report, args.format)
    except (UsageError, ValueError, CapExceededError, MemoryGuardError) as e:
        print(f"ggl {args.command}: error: {e}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "check-all":
        for name, ok in verdicts:
            print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    return 0 if all(ok for _, ok in verdicts) else 1


if __name__ == "__main__":
    sys.exit(main())
