"""Permutational wreath products ``A wr_X G`` and the extension of ``G`` by
finitely supported permutations of ``X``.

``G`` is one of the tree groups of :mod:`ggl.tree` acting on the orbit ``X``
of its basepoint ray.  Elements are stored in the form ``g f`` (group part
first), where the product is

    (g1 f1)(g2 f2) = g1 g2 (g2^-1 . f1) f2,   (g . f)(x) = f(x g),

so moving ``f1`` past ``g2`` just pushes each support point forward by
``g2``.  In this form the support of an evaluated word is contained in the
inverted orbit of its ``G``-letters.  The equivalent ``f g`` form is
``f' = g . f`` (support pulled back by ``g``).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ggl.orbits import inverted_orbit, suffix_images
from ggl.tree import (ERSCHLER, GRIG, RHO, UNBOUNDED, act_letter, act_ray, as_group, equal,
                      format_ray, inverse, is_trivial, level_signature, reduce)
from ggl.words import zeta_word

MEMORY_GUARD = 10_000_000


class MemoryGuardError(RuntimeError):
    pass


def signature_depth(radius: int) -> int:
    return math.ceil(math.log2(radius + 1)) + 3


# ---------------------------------------------------------------- base groups

class Z2:
    """The group of order two, written additively on {0, 1}."""

    name = "Z2"
    identity = 0

    def __init__(self, letter="s"):
        self.letter = letter
        self.generators = [(letter, 1)]

    def multiply(self, x, y):
        return x ^ y

    def inverse(self, x):
        return x

    def equal(self, x, y):
        return x == y

    def is_identity(self, x):
        return x == 0

    def key(self, x):
        return x

    def order(self, x, cap=4096):
        return 1 if x == 0 else 2

    def to_json(self, x):
        return x


class Integers:
    """The infinite cyclic group; generator ``t`` and its inverse ``T``."""

    name = "Z"
    identity = 0

    def __init__(self, letter="t"):
        self.letter = letter
        self.generators = [(letter, 1), (letter.upper(), -1)]

    def multiply(self, x, y):
        return x + y

    def inverse(self, x):
        return -x

    def equal(self, x, y):
        return x == y

    def is_identity(self, x):
        return x == 0

    def key(self, x):
        return x

    def order(self, x, cap=4096):
        return 1 if x == 0 else UNBOUNDED

    def to_json(self, x):
        return x


# ---------------------------------------------------------------- wreath product

@dataclass(frozen=True)
class WreathElement:
    g: str           # reduced word in the acting group
    f: tuple = ()    # sorted ((ray, base value), ...), no identity values


class WreathGroup:
    """``base wr_X group`` with ``X`` the orbit of ``x0``.

    Generators are the base generators placed at ``x0`` (names as in the base,
    wrapped in brackets when the base is itself a wreath product) and the
    letters of ``group``.
    """

    def __init__(self, base, group=GRIG, x0: str = RHO, depth: int = 7):
        self.base = base
        self.group = as_group(group)
        self.x0 = x0
        self.depth = depth
        self.identity = WreathElement("", ())
        nested = isinstance(base, WreathGroup)
        self.base_letters = {}
        for name, val in base.generators:
            self.base_letters[f"[{name}]" if nested else name] = val
        self.generators = [(name, WreathElement("", ((x0, val),)))
                           for name, val in self.base_letters.items()]
        self.generators += [(x, WreathElement(x, ())) for x in self.group.alphabet]
        self.name = f"({base.name})wr{self.group.value}"

    # -- construction
    def _clean(self, f: dict) -> tuple:
        b = self.base
        return tuple(sorted((x, v) for x, v in f.items() if not b.is_identity(v)))

    def _push(self, f, word):
        """Support points pushed forward: the map ``x -> f(x word^-1)``."""
        return {act_ray(word, x, self.group): v for x, v in f}

    def multiply(self, p: WreathElement, q: WreathElement) -> WreathElement:
        b = self.base
        moved = self._push(p.f, q.g) if q.g else dict(p.f)
        for x, v in q.f:
            moved[x] = b.multiply(moved[x], v) if x in moved else v
        return WreathElement(reduce(p.g + q.g, self.group), self._clean(moved))

    def inverse(self, p: WreathElement) -> WreathElement:
        gi = inverse(p.g, self.group)
        # (g f)^-1 = f^-1 g^-1 = g^-1 (g . f^-1)
        f = {act_ray(gi, x, self.group): self.base.inverse(v) for x, v in p.f}
        return WreathElement(reduce(gi, self.group), self._clean(f))

    def letter(self, name: str) -> WreathElement:
        if name in self.base_letters:
            return WreathElement("", ((self.x0, self.base_letters[name]),))
        if name in self.group.alphabet:
            return WreathElement(name, ())
        raise ValueError(f"unknown generator {name!r} of {self.name}")

    def tokens(self, word: str) -> list[str]:
        """Split a word into generator names (``[..]`` groups a nested name)."""
        out, i = [], 0
        while i < len(word):
            if word[i] == "[":
                depth, j = 0, i
                while True:
                    depth += {"[": 1, "]": -1}.get(word[j], 0)
                    if depth == 0:
                        break
                    j += 1
                out.append(word[i:j + 1])
                i = j + 1
            else:
                out.append(word[i])
                i += 1
        return out

    def evaluate(self, word) -> WreathElement:
        """Letter-by-letter evaluation: an A-letter multiplies ``f(x0)`` on
        the right, a G-letter pushes the support forward."""
        names = self.tokens(word) if isinstance(word, str) else list(word)
        f = {}
        g = []
        b = self.base
        for name in names:
            if name in self.base_letters:
                v = self.base_letters[name]
                f[self.x0] = b.multiply(f[self.x0], v) if self.x0 in f else v
            elif name in self.group.alphabet:
                f = {act_letter(name, x, self.group): v for x, v in f.items()}
                g.append(name)
            else:
                raise ValueError(f"unknown generator {name!r} of {self.name}")
        return WreathElement(reduce("".join(g), self.group), self._clean(f))

    # -- comparison
    def equal(self, p: WreathElement, q: WreathElement) -> bool:
        if len(p.f) != len(q.f):
            return False
        for (x, v), (y, u) in zip(p.f, q.f):
            if x != y or not self.base.equal(v, u):
                return False
        return p.g == q.g or equal(p.g, q.g, self.group)

    def is_identity(self, p: WreathElement) -> bool:
        return not p.f and is_trivial(p.g, self.group)

    def key(self, p: WreathElement):
        sig = level_signature(p.g, self.depth, self.group).tobytes()
        return (sig, tuple((x, self.base.key(v)) for x, v in p.f))

    def order(self, p: WreathElement, cap: int = 4096):
        """Least 2-power ``k <= cap`` with ``p^k = 1``, by repeated squaring."""
        k = 1
        while k <= cap:
            if self.is_identity(p):
                return k
            p = self.multiply(p, p)
            k *= 2
        return UNBOUNDED

    def support(self, p: WreathElement) -> list[str]:
        return [x for x, _ in p.f]

    def to_json(self, p: WreathElement):
        return {"g": p.g, "f": [[format_ray(x), self.base.to_json(v)] for x, v in p.f]}


def tower(k: int, base: str = "Z2", group=GRIG, depth: int = 7):
    """``K_k`` (``base='Z2'``) or ``L_k`` (``base='Z'``): ``T_0 = base``,
    ``T_{k+1} = T_k wr_X group``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if base in ("Z2", "z2"):
        t = Z2()
    elif base in ("Z", "z"):
        t = Integers()
    else:
        raise ValueError(f"base must be Z2 or Z, not {base!r}")
    for _ in range(k):
        t = WreathGroup(t, group, RHO, depth)
    return t


# ---------------------------------------------------------------- balls

def ball_series(generators, multiply, key, same, identity, radius: int,
                guard: int = MEMORY_GUARD, threads: int = 1) -> list[int]:
    """Cumulative sizes ``v(0..radius)`` of the word-metric ball.

    Elements are bucketed by ``key`` (a function of the element); two
    elements in the same bucket are compared with ``same``.
    """
    buckets = {key(identity): [identity]}
    frontier = [identity]
    sizes = [1]
    total = 1

    def expand(chunk):
        return [(e, key(e)) for x in chunk for _, s in generators for e in (multiply(x, s),)]

    for _ in range(radius):
        if threads > 1 and len(frontier) > 1:
            size = -(-len(frontier) // threads)
            chunks = [frontier[i:i + size] for i in range(0, len(frontier), size)]
            with ThreadPoolExecutor(threads) as ex:
                parts = list(ex.map(expand, chunks))
        else:
            parts = [expand(frontier)]
        nxt = []
        for part in parts:
            for e, k in part:
                bucket = buckets.get(k)
                if bucket is None:
                    buckets[k] = [e]
                elif any(same(e, o) for o in bucket):
                    continue
                else:
                    bucket.append(e)
                nxt.append(e)
                total += 1
                if total > guard:
                    raise MemoryGuardError(f"ball exceeds {guard} elements")
        frontier = nxt
        sizes.append(total)
    return sizes


def w_ball(oracle, radius: int, threads: int = 1, guard: int = MEMORY_GUARD) -> list[int]:
    return ball_series(oracle.generators, oracle.multiply, oracle.key, oracle.equal,
                       oracle.identity, radius, guard, threads)


class TreeGroup:
    """A tree group itself as an oracle (elements are reduced words)."""

    def __init__(self, group=GRIG, depth: int = 7):
        self.group = as_group(group)
        self.depth = depth
        self.identity = ""
        self.generators = [(x, x) for x in self.group.alphabet]
        self.name = self.group.value

    def multiply(self, p, q):
        return reduce(p + q, self.group)

    def equal(self, p, q):
        return p == q or equal(p, q, self.group)

    def key(self, p):
        return level_signature(p, self.depth, self.group).tobytes()

    def is_identity(self, p):
        return is_trivial(p, self.group)


def group_ball(group=GRIG, radius: int = 4, depth: int | None = None, threads: int = 1):
    depth = signature_depth(radius) if depth is None else depth
    return w_ball(TreeGroup(group, depth), radius, threads)


# ---------------------------------------------------------------- probes

def random_mixed_word(rng: random.Random, oracle: WreathGroup, length: int) -> list[str]:
    names = sorted(oracle.base_letters) + list(oracle.group.alphabet)
    return [rng.choice(names) for _ in range(length)]


def support_bound_check(group=GRIG, trials: int = 500, wordlen: int = 12, seed: int = 0) -> dict:
    """Support of every evaluated random word lies in the inverted orbit of
    its ``G``-letters (based at ``x0``)."""
    w = WreathGroup(Z2(), group)
    rng = random.Random(seed)
    failures = []
    for _ in range(trials):
        word = random_mixed_word(rng, w, rng.randint(0, wordlen))
        e = w.evaluate(word)
        gword = "".join(x for x in word if x in w.group.alphabet)
        orbit = inverted_orbit(gword, w.x0, w.group)
        if not set(w.support(e)) <= orbit:
            failures.append("".join(word))
    return {"group": w.group.value, "trials": trials, "wordlen": wordlen, "seed": seed,
            "failures": failures, "ok": not failures}


def torsion_probe(oracle: WreathGroup, trials: int = 100, wordlen: int = 8,
                  ordercap: int = 4096, seed: int = 0) -> dict:
    rng = random.Random(seed)
    orders = []
    for _ in range(trials):
        word = "".join(random_mixed_word(rng, oracle, rng.randint(1, wordlen)))
        k = oracle.order(oracle.evaluate(word), ordercap)
        orders.append([word, "unbounded" if k == UNBOUNDED else k])
    bad = [o for o in orders if o[1] == "unbounded"]
    return {"trials": trials, "wordlen": wordlen, "ordercap": ordercap, "seed": seed,
            "orders": orders, "cap_exceeded": bad, "ok": not bad}


def erschler_embedding_witness(n: int = 10, cap: int = 14, orbit_span: int = 64) -> dict:
    """The ``2^n`` elements ``s^e1 (ad) s^e2 (ad) ... s^en (ad)`` of
    ``Z2 wr_X' G`` for the group with ``d = <a, d>`` are pairwise distinct."""
    if n > cap:
        raise ValueError(f"n={n} exceeds cap {cap}")
    w = WreathGroup(Z2(), ERSCHLER)
    buckets = {}
    for bits in range(1 << n):
        word = "".join(("s" if bits >> (n - 1 - i) & 1 else "") + "ad" for i in range(n))
        e = w.evaluate(word)
        bucket = buckets.setdefault(w.key(e), [])
        if not any(w.equal(e, o) for o in bucket):
            bucket.append(e)
    distinct = sum(len(v) for v in buckets.values())
    rays = [act_ray("ad" * i, RHO, ERSCHLER) for i in range(orbit_span + 1)]
    return {
        "n": n,
        "elements": 1 << n,
        "distinct": distinct,
        "all_distinct": distinct == 1 << n,
        "free_orbit_span": orbit_span,
        "free_orbit_distinct": len(set(rays)) == len(rays),
    }


# ---------------------------------------------------------------- permutations of X

@dataclass(frozen=True)
class PermElement:
    g: str               # reduced word
    perm: tuple = ()     # sorted ((x, x perm), ...) over moved points


class PermExtension:
    """Finitely supported permutations of ``X`` extended by ``group``.

    Elements ``g p`` act on ``X`` by ``x -> (x g) p``; the product is
    ``(g1 p1)(g2 p2) = g1 g2 (g2^-1 p1 g2) p2``.  The extra generator ``s``
    is the transposition of ``x0`` and ``x0 a``.
    """

    def __init__(self, group=GRIG, x0: str = RHO, depth: int = 7):
        self.group = as_group(group)
        self.x0 = x0
        self.x1 = act_letter("a", x0, self.group)
        self.depth = depth
        self.identity = PermElement("", ())
        self.s = PermElement("", tuple(sorted(((x0, self.x1), (self.x1, x0)))))
        self.generators = [("s", self.s)] + [(x, PermElement(x, ())) for x in self.group.alphabet]
        self.name = f"Sinf.{self.group.value}"

    @staticmethod
    def _compose(p: dict, q: dict) -> dict:
        """``x -> (x p) q``, dropping fixed points."""
        out = {}
        for x in set(p) | set(q):
            y = p.get(x, x)
            y = q.get(y, y)
            if y != x:
                out[x] = y
        return out

    def _conj(self, perm, word) -> dict:
        """``word^-1 perm word``: maps ``x word`` to ``(x perm) word``."""
        return {act_ray(word, x, self.group): act_ray(word, y, self.group) for x, y in perm}

    def multiply(self, p: PermElement, q: PermElement) -> PermElement:
        moved = self._conj(p.perm, q.g) if q.g else dict(p.perm)
        out = self._compose(moved, dict(q.perm))
        return PermElement(reduce(p.g + q.g, self.group), tuple(sorted(out.items())))

    def inverse(self, p: PermElement) -> PermElement:
        gi = inverse(p.g, self.group)
        inv = [(y, x) for x, y in p.perm]
        # (g p)^-1 = p^-1 g^-1 = g^-1 (g p^-1 g^-1)
        out = {act_ray(gi, x, self.group): act_ray(gi, y, self.group) for x, y in inv}
        return PermElement(reduce(gi, self.group), tuple(sorted(out.items())))

    def evaluate(self, word: str) -> PermElement:
        perm = {}
        g = []
        for x in word:
            if x == "s":
                perm = self._compose(perm, dict(self.s.perm))
            elif x in self.group.alphabet:
                perm = {act_letter(x, u, self.group): act_letter(x, v, self.group)
                        for u, v in perm.items()}
                g.append(x)
            else:
                raise ValueError(f"unknown generator {x!r}")
        return PermElement(reduce("".join(g), self.group), tuple(sorted(perm.items())))

    def act(self, p: PermElement, x: str) -> str:
        y = act_ray(p.g, x, self.group)
        return dict(p.perm).get(y, y)

    def equal(self, p: PermElement, q: PermElement) -> bool:
        return p.perm == q.perm and (p.g == q.g or equal(p.g, q.g, self.group))

    def is_identity(self, p: PermElement) -> bool:
        return not p.perm and is_trivial(p.g, self.group)

    def key(self, p: PermElement):
        sig = level_signature(p.g, self.depth, self.group).tobytes()
        return (sig, p.perm)

    def support(self, p: PermElement) -> list[str]:
        return [x for x, _ in p.perm]


def perm_ext_ball(radius: int, group=GRIG, threads: int = 1, depth: int | None = None):
    depth = signature_depth(radius) if depth is None else depth
    return w_ball(PermExtension(group, RHO, depth), radius, threads)


def perm_support_check(trials: int = 500, wordlen: int = 12, seed: int = 0, group=GRIG) -> dict:
    """The permutation part of a random word moves only points of the
    inverted orbits of its ``G``-letters from ``x0`` and ``x0 a``."""
    ext = PermExtension(group)
    rng = random.Random(seed)
    letters = "s" + ext.group.alphabet
    failures = []
    for _ in range(trials):
        word = "".join(rng.choice(letters) for _ in range(rng.randint(0, wordlen)))
        e = ext.evaluate(word)
        gword = word.replace("s", "")
        allowed = inverted_orbit(gword, ext.x0, ext.group) | inverted_orbit(gword, ext.x1, ext.group)
        if not set(ext.support(e)) <= allowed:
            failures.append(word)
    return {"trials": trials, "wordlen": wordlen, "seed": seed, "failures": failures,
            "ok": not failures}


def _growth_positions(word: str, group=GRIG):
    """Indices ``k`` (0-based) where ``S_k`` grows, with the points added.

    ``S_k`` collects ``rho w[k:]`` and ``(0 rho) w[k:]`` for all ``k' <= k``.
    """
    from_rho = suffix_images(word, RHO, group)
    from_zero = suffix_images(word, "0", group)
    seen = set()
    out = []
    for k in range(len(word)):
        new = {from_rho[k], from_zero[k]} - seen
        if new:
            out.append((k, sorted(new)))
            seen |= new
    return out, from_rho, from_zero


def sinfty_lower_bound_family(n: int = 3, cap: int = 4) -> dict:
    """Insert ``s^e_i`` before the first ``2^n`` growth positions of
    ``zeta^n(ad)`` and certify that all ``2^(2^n)`` results differ.

    Two independent certificates: distinct element keys, and a decoder that
    reads the exponents back from the permutation alone by repeatedly
    peeling the transposition whose newest point appears last.
    """
    if n > cap:
        raise ValueError(f"n={n} exceeds cap {cap}")
    ext = PermExtension(GRIG)
    w = zeta_word(n)
    growth, from_rho, from_zero = _growth_positions(w)
    m = 1 << n
    if len(growth) < m:
        raise AssertionError("not enough growth positions")
    positions = [k for k, _ in growth[:m]]
    first_seen = {}
    for k in range(len(w)):
        for x in (from_rho[k], from_zero[k]):
            first_seen.setdefault(x, k)
    transposition = {k: (from_rho[k], from_zero[k]) for k in positions}
    index_of = {k: i for i, k in enumerate(positions)}

    keys = set()
    decoded_ok = True
    for bits in range(1 << m):
        e = [(bits >> i) & 1 for i in range(m)]
        chosen = {positions[i] for i in range(m) if e[i]}
        word = "".join(("s" if k in chosen else "") + w[k] for k in range(len(w)))
        el = ext.evaluate(word)
        keys.add(ext.key(el))
        # decode
        perm = dict(el.perm)
        got = [0] * m
        while perm:
            k = max(first_seen[x] for x in perm)
            if k not in index_of:
                decoded_ok = False
                break
            got[index_of[k]] = 1
            x, y = transposition[k]
            perm = ext._compose(perm, {x: y, y: x})
        if got != e:
            decoded_ok = False
    return {
        "n": n,
        "word_length": len(w),
        "growth_positions": len(growth),
        "positions": positions,
        "elements": 1 << m,
        "distinct_keys": len(keys),
        "all_distinct": len(keys) == 1 << m,
        "decoder_recovers_exponents": decoded_ok,
        "radius_bound": 2 * len(w),
    }
