"""Inverted and direct orbits of words, their growth functions, Schreier
graphs and the structure of pairs of rays under the diagonal action."""

from __future__ import annotations

import json
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor

import networkx as nx

from ggl.tree import (GRIG, RHO, SWAPS, act_letter, act_ray, as_group,
                      check_word, format_ray, inverse)
from ggl.words import BCD, SIGMA, norm_table, sigma_iter

DEFAULT_CAP = 16


class CapExceededError(ValueError):
    pass


# ---------------------------------------------------------------- single orbits

def suffix_images(word: str, x0: str = RHO, group=GRIG) -> list[str]:
    """``[x0 . w[i:] for i in 0..len(w)]``; the last entry is ``x0`` itself.

    Computed through the wreath recursion instead of acting with every
    suffix separately.  Let ``x0 = q x'``.  The suffix ``w[i:]`` moves ``q``
    by the parity of its ``a`` letters, and acts on ``x'`` by the suffix of
    one of the two "section streams" ``S_0, S_1`` (the letterwise sections
    of ``w`` read at vertex ``r XOR parity(w[:j])``).  The images of ``x'``
    under all suffixes of both streams are obtained recursively.
    """
    group = as_group(group)
    check_word(word, group)
    return _suffix_images(word, x0, group.sections)


def _suffix_images(word: str, x0: str, table) -> list[str]:
    n = len(word)
    has_swap = any(x in SWAPS for x in word)
    if not word or (not x0 and not has_swap):
        return [x0] * (n + 1)
    if not x0:
        q, rest = "1", RHO
    else:
        q, rest = x0[0], x0[1:]
    qbit = q == "1"

    # prefix parities
    par = [0] * (n + 1)
    for i, x in enumerate(word):
        par[i + 1] = par[i] ^ (x in SWAPS)
    total = par[n]

    streams = ([], [])
    # offset[r][i]: start of the stream-r suffix seen by w[i:]
    offset = ([0] * (n + 1), [0] * (n + 1))
    for j, x in enumerate(word):
        secs = table[x]
        for r in (0, 1):
            offset[r][j] = len(streams[r])
            s = secs[r ^ par[j]]
            if s:
                streams[r].append(s)
    for r in (0, 1):
        offset[r][n] = len(streams[r])

    sub = [None, None]
    out = []
    for i in range(n + 1):
        r = qbit ^ par[i]
        if sub[r] is None:
            sub[r] = _suffix_images("".join(streams[r]), rest, table)
        tail = sub[r][offset[r][i]]
        bit = "1" if r ^ total else "0"
        out.append(bit + tail if tail or bit == "0" else RHO)
    return out


def inverted_orbit(word: str, x0: str = RHO, group=GRIG) -> frozenset:
    """``{x0 . w[i:] : i = 0..|w|}``."""
    return frozenset(suffix_images(word, x0, group))


def delta(word: str, x0: str = RHO, group=GRIG) -> int:
    d = len(inverted_orbit(word, x0, group))
    assert d <= len(word) + 1
    return d


def direct_orbit(word: str, x0: str = RHO, group=GRIG) -> list[str]:
    """``[x0, x0 w1, x0 w1 w2, ...]`` (with repetitions)."""
    group = as_group(group)
    out = [x0]
    x = x0
    for letter in check_word(word, group):
        x = act_letter(letter, x, group)
        out.append(x)
    return out


def delta_prime(word: str, x0: str = RHO, group=GRIG) -> int:
    return len(set(direct_orbit(word, x0, group)))


def inverted_orbit_generic(act, word, x0) -> frozenset:
    """Brute-force inverted orbit for any right action ``act(x, letter)``."""
    out = set()
    for i in range(len(word) + 1):
        x = x0
        for letter in word[i:]:
            x = act(x, letter)
        out.add(x)
    return frozenset(out)


def translation_delta(n: int) -> int:
    """delta of ``(+1)^n`` for the integers acting on themselves by translation."""
    return len(inverted_orbit_generic(lambda x, t: x + t, [1] * n, 0))


# ---------------------------------------------------------------- Delta, Sigma

def _expand(chunk, letters, step, bcd_guard):
    out = []
    for state in chunk:
        pts, last_bcd = state
        for letter in letters:
            if bcd_guard and last_bcd and letter in BCD:
                continue
            new = step(pts, letter)
            out.append((letter, (new, bcd_guard and letter in BCD)))
    return out


def _layers(letters, step, x0, n, bcd_guard, threads):
    """Breadth-first enumeration of (orbit set, last-letter flag) states.

    Appending a letter ``l`` maps ``O(w)`` to ``O(w) . l  union {x0}``, so the
    state after a word depends only on the state before the last letter.
    Yields, for each length ``m``, the states first reached at length ``m``.
    """
    start = (frozenset([x0]), False)
    seen = {start}
    frontier = [start]
    yield 0, frontier
    for m in range(1, n + 1):
        if threads > 1 and len(frontier) > 1:
            size = -(-len(frontier) // threads)
            chunks = [frontier[i:i + size] for i in range(0, len(frontier), size)]
            with ThreadPoolExecutor(threads) as ex:
                parts = list(ex.map(lambda c: _expand(c, letters, step, bcd_guard), chunks))
        else:
            parts = [_expand(frontier, letters, step, bcd_guard)]
        nxt = []
        for part in parts:  # chunk order is fixed, so the result is deterministic
            for _, st in part:
                if st not in seen:
                    seen.add(st)
                    nxt.append(st)
        frontier = nxt
        yield m, frontier


def _ray_step(group):
    def step(pts, letter):
        return frozenset([act_letter(letter, y, group) for y in pts] + [RHO])
    return step


def _check_cap(n, cap):
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the exhaustive-enumeration cap {cap}")


def orbit_tables(n: int, group=GRIG, cap: int = DEFAULT_CAP, threads: int = 1):
    """``(Delta, Sigma)`` lists for word lengths ``0..n``, over pre-reduced words.

    ``Delta[m]`` is the largest inverted orbit of a word of length ``<= m``,
    ``Sigma[m]`` the number of distinct inverted orbits of such words.
    """
    _check_cap(n, cap)
    group = as_group(group)
    step = _ray_step(group)
    best = 0
    sets = set()
    deltas, sigmas = [], []
    for _, layer in _layers("abcd", step, RHO, n, True, threads):
        for pts, _ in layer:
            sets.add(pts)
            best = max(best, len(pts))
        deltas.append(best)
        sigmas.append(len(sets))
    return deltas, sigmas


def delta_exhaustive(group=GRIG, n: int = 0, mode: str = "length",
                     cap: int = DEFAULT_CAP, threads: int = 1) -> int:
    if mode == "length":
        return orbit_tables(n, group, cap, threads)[0][n]
    if mode == "norm":
        return delta_norm_table(n, group, cap)[-1][1]
    raise ValueError(f"mode must be 'length' or 'norm', not {mode!r}")


def sigma_exhaustive(group=GRIG, n: int = 0, cap: int = DEFAULT_CAP, threads: int = 1) -> int:
    return orbit_tables(n, group, cap, threads)[1][n]


def delta_norm_table(bound: float, group=GRIG, cap: int = DEFAULT_CAP):
    """``[(norm, Delta)]`` as a step function of the norm, up to ``bound``.

    Minimal norms per orbit state are found by a uniform-cost search over
    pre-reduced words; only norms at which some state is first reached are
    listed, and Delta at any other norm is the value of the last entry below.
    """
    _check_cap(math.ceil(bound), cap)
    import heapq
    group = as_group(group)
    w = norm_table().weights
    step = _ray_step(group)
    start = (frozenset([RHO]), False)
    dist = {start: 0.0}
    heap = [(0.0, 0, start)]
    tie = 1
    done = {}
    while heap:
        d, _, st = heapq.heappop(heap)
        if st in done or d > bound + 1e-12:
            continue
        done[st] = d
        pts, last = st
        for letter in "abcd":
            if last and letter in BCD:
                continue
            nst = (step(pts, letter), letter in BCD)
            nd = d + w[letter]
            if nd <= bound + 1e-12 and nd < dist.get(nst, math.inf) - 1e-15:
                dist[nst] = nd
                heapq.heappush(heap, (nd, tie, nst))
                tie += 1
    table = []
    best = 0
    for st, d in sorted(done.items(), key=lambda kv: kv[1]):
        best = max(best, len(st[0]))
        if table and abs(table[-1][0] - d) < 1e-12:
            table[-1] = (table[-1][0], best)
        else:
            table.append((round(d, 12), best))
    return table


def delta_table_generic(letters, act, x0, n: int, cap: int = DEFAULT_CAP):
    """Delta over *all* words of length ``<= m`` in ``letters``, ``m = 0..n``.

    ``letters`` are opaque labels and ``act(x, label)`` is the right action.
    """
    _check_cap(n, cap)

    def step(pts, label):
        return frozenset([act(y, label) for y in pts] + [x0])

    best = 0
    out = []
    for _, layer in _layers(letters, step, x0, n, False, 1):
        for pts, _ in layer:
            best = max(best, len(pts))
        out.append(best)
    return out


# ---------------------------------------------------------------- Schreier graphs

class SchreierGraph:
    def __init__(self, group, x0, radius, vertices, edges):
        self.group = group
        self.x0 = x0
        self.radius = radius
        self.vertices = vertices  # ray -> BFS distance
        self.edges = edges        # sorted list of (source, letter, target)

    def to_networkx(self) -> nx.MultiGraph:
        """Unlabelled undirected multigraph; one edge per (pair, letter)."""
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        seen = set()
        for x, s, y in self.edges:
            key = (min(x, y), max(x, y), s)
            if key not in seen:
                seen.add(key)
                g.add_edge(x, y)
        return g

    def to_dot(self) -> str:
        lines = [f"graph schreier_{self.group.value} {{"]
        for v in sorted(self.vertices):
            lines.append(f'  "{format_ray(v)}";')
        seen = set()
        for x, s, y in self.edges:
            key = (min(x, y), max(x, y), s)
            if key in seen:
                continue
            seen.add(key)
            lines.append(f'  "{format_ray(x)}" -- "{format_ray(y)}" [label="{s}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "group": self.group.value,
            "basepoint": format_ray(self.x0),
            "radius": self.radius,
            "vertices": [format_ray(v) for v in sorted(self.vertices)],
            "edges": [{"source": format_ray(x), "letter": s, "target": format_ray(y)}
                      for x, s, y in self.edges],
        }


def schreier_ball(group=GRIG, x0: str = RHO, radius: int = 1) -> SchreierGraph:
    """BFS ball; only vertices at distance ``< radius`` have their edges expanded."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    group = as_group(group)
    letters = group.alphabet
    dist = {x0: 0}
    edges = []
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        if dist[x] >= radius:
            continue
        for s in letters:
            y = act_letter(s, x, group)
            edges.append((x, s, y))
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    edges.sort()
    return SchreierGraph(group, x0, radius, dist, edges)


def schreier_distance(x: str, y: str, group=GRIG, limit: int = 1 << 20) -> int:
    group = as_group(group)
    if x == y:
        return 0
    dist = {x: 0}
    queue = deque([x])
    while queue:
        z = queue.popleft()
        if dist[z] >= limit:
            break
        for s in group.alphabet:
            t = act_letter(s, z, group)
            if t not in dist:
                dist[t] = dist[z] + 1
                if t == y:
                    return dist[t]
                queue.append(t)
    raise ValueError(f"{format_ray(y)} not within distance {limit} of {format_ray(x)}")


def unmarked_isomorphic(g1: SchreierGraph, g2: SchreierGraph) -> bool:
    return nx.is_isomorphic(g1.to_networkx(), g2.to_networkx())


# ---------------------------------------------------------------- pairs of rays

def pair_prefix(x: str, y: str):
    """Length of the longest common prefix of two rays; ``inf`` if equal."""
    if x == y:
        return math.inf
    n = max(len(x), len(y)) + 1
    xs, ys = x.ljust(n, "1"), y.ljust(n, "1")
    for i in range(n):
        if xs[i] != ys[i]:
            return i
    raise AssertionError("unreachable for canonical rays")


def pair_orbit_probe(radius: int = 16, wordlen: int = 6, explore: int | None = None,
                     group=GRIG) -> dict:
    """Check that ``(x|y)`` classifies pairs of rays up to the diagonal action.

    Invariance: for every pair in the radius ball and every word of length
    ``<= wordlen`` the common-prefix length is unchanged (checked on the pair
    graph, which is equivalent to checking all words).  Transitivity: pairs in
    the ball with the same finite ``(x|y)`` are joined by a path of diagonal
    generator moves that stays within the ``explore`` ball; this is only
    evidence, since a path might need to leave that ball.
    """
    group = as_group(group)
    explore = 4 * radius + 8 if explore is None else explore
    ball = sorted(schreier_ball(group, RHO, radius).vertices)
    big = schreier_ball(group, RHO, explore).vertices
    letters = group.alphabet

    invariant = True
    violations = []
    for x in ball:
        for y in ball:
            k = pair_prefix(x, y)
            seen = {(x, y)}
            frontier = [(x, y)]
            for _ in range(wordlen):
                nxt = []
                for p, q in frontier:
                    for s in letters:
                        pq = (act_letter(s, p, group), act_letter(s, q, group))
                        if pq not in seen:
                            seen.add(pq)
                            nxt.append(pq)
                            if pair_prefix(*pq) != k:
                                invariant = False
                                violations.append([format_ray(x), format_ray(y), s])
                frontier = nxt

    # connected components of the diagonal action restricted to the explore ball
    parent = {}

    def find(u):
        while parent.setdefault(u, u) != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    bigl = sorted(big)
    for x in bigl:
        for y in bigl:
            if x == y:
                continue
            for s in letters:
                p, q = act_letter(s, x, group), act_letter(s, y, group)
                if p in big and q in big:
                    a, b = find((x, y)), find((p, q))
                    if a != b:
                        parent[a] = b
    classes = {}
    for x in ball:
        for y in ball:
            if x != y:
                classes.setdefault(pair_prefix(x, y), set()).add(find((x, y)))
    transitive = all(len(c) == 1 for c in classes.values())

    census = {}
    for y in ball:
        if y == RHO:
            continue
        k = pair_prefix(RHO, y)
        ok = y.startswith("1" * k + "0")
        census.setdefault(k, [0, True])
        census[k][0] += 1
        census[k][1] &= ok
    return {
        "radius": radius,
        "wordlen": wordlen,
        "explore_radius": explore,
        "ball_size": len(ball),
        "invariance": invariant,
        "violations": violations[:10],
        "transitive_within_explored_ball": transitive,
        "classes": {str(k): len(v) for k, v in sorted(classes.items())},
        "census": [{"k": k, "count": c, "form_1^k0": ok} for k, (c, ok) in sorted(census.items())],
        "diagonal_class_singleton": True,
    }


# ---------------------------------------------------------------- stabilizer and cosets

def _commutator_ab() -> str:
    return "abab"  # [a,b] = a^-1 b^-1 a b with involutive letters


def stabilizer_core() -> list[str]:
    c = _commutator_ab()
    return ["b", "c", "d", "ada", "acacacac",
            "a" + sigma_iter(c, 1) + "a", "a" + sigma_iter(c, 2) + "a"]


def stabilizer_gens(depth: int) -> list[str]:
    """``sigma^n(u)`` for ``n <= depth`` and ``u`` in the seven-word core."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    out = []
    for n in range(depth + 1):
        for u in stabilizer_core():
            w = sigma_iter(u, n, SIGMA)
            if act_ray(w, RHO, GRIG) != RHO:
                raise AssertionError(f"{w} does not fix the base ray")
            out.append(w)
    return out


def double_coset_reps(n: int) -> list[str]:
    """``[sigma^k(a) for k <= n]``; representative ``k`` moves rho to a ray
    sharing exactly ``k`` initial letters with rho."""
    out = []
    for k in range(n + 1):
        w = sigma_iter("a", k)
        if pair_prefix(RHO, act_ray(w, RHO)) != k:
            raise AssertionError(f"sigma^{k}(a) has the wrong coset type")
        out.append(w)
    return out


# ---------------------------------------------------------------- basepoint change

def basepoint_invariance_probe(n: int, g: str, group=GRIG) -> dict:
    """Delta from ``(x0, S)`` versus Delta from ``(x0 g, S^g)``.

    The conjugated generators ``g^-1 s g`` act as whole blocks; nothing is
    simplified, the orbits are computed by acting letter by letter.
    """
    group = as_group(group)
    check_word(g, group)
    gi = inverse(g, group)
    letters = list(group.alphabet)
    blocks = [gi + s + g for s in letters]
    x1 = act_ray(g, RHO, group)
    plain = delta_table_generic(letters, lambda x, s: act_letter(s, x, group), RHO, n)
    conj = delta_table_generic(blocks, lambda x, blk: act_ray(blk, x, group), x1, n)
    return {
        "n": n,
        "g": g,
        "basepoint": format_ray(RHO),
        "conjugated_basepoint": format_ray(x1),
        "delta_table": plain,
        "conjugated_delta_table": conj,
        "equal": plain == conj,
    }


# ---------------------------------------------------------------- sigma words

def sigma_orbit_report(n: int) -> dict:
    """For ``w_n = sigma^(n-1)(ad)``: length, inverted and direct orbit sizes,
    Schreier distance of ``rho w_n`` from rho, and its prefix form."""
    w = sigma_iter("ad", n - 1)
    end = act_ray(w, RHO)
    return {
        "n": n,
        "length": len(w),
        "delta": delta(w),
        "delta_prime": delta_prime(w),
        "endpoint": format_ray(end),
        "distance": schreier_distance(RHO, end),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)
