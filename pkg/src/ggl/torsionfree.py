"""The torsion-free group ``H``: a lift of the first Grigorchuk group in which
``a`` has infinite order and ``b, c, d`` generate a copy of ``Z^3``.

Words use upper case for inverses (``A = a^-1`` and so on).  An element of
``H`` is determined by three invariants: its image in the Grigorchuk group
(forget the signs), its ``a``-exponent sum and its germs, a finitely
supported map from rays to ``Z^3`` (exponents of ``b, c, d``).

Germs follow the right-action section rule ``(gh)_t = g_t h_{t g}``, so the
letter ``w_i`` of ``w`` contributes its own germ at the ray ``t`` with
``t . w_1 ... w_{i-1} = rho``, that is at ``rho . (w_1 ... w_{i-1})^-1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ggl.orbits import inverted_orbit, suffix_images
from ggl.tree import (GRIG, H0, RHO, UNBOUNDED, act_ray, check_word, format_ray, is_trivial,
                      level_signature, reduce, wreath_decompose)
from ggl.tree import equal as grig_equal
from ggl.tree import inverse as word_inverse
from ggl.words import zeta_word

VEC_INDEX = {"b": 0, "c": 1, "d": 2}
ZERO = (0, 0, 0)
SIGNATURE_DEPTH = 12


class GermError(RuntimeError):
    """Section iteration did not land in ``<b, c, d>`` within the cap."""


# ---------------------------------------------------------------- words

def xi(word: str) -> str:
    """Image in the Grigorchuk group (its generators are involutions)."""
    return word.lower()


def a_exponent(word: str) -> int:
    return word.count("a") - word.count("A")


def h_inverse(word: str) -> str:
    return word_inverse(word, H0)


def free_reduce(word: str) -> str:
    return reduce(word, H0)


# ---------------------------------------------------------------- normal forms

@dataclass(frozen=True)
class H0NormalForm:
    k: int          # exponent of the central element a^2
    blocks: tuple   # alternating 'a' and nonzero (nb, nc, nd)

    def is_pure(self) -> bool:
        """No ``a`` content at all: an element of ``<b, c, d>``."""
        return self.k == 0 and all(t != "a" for t in self.blocks)

    def vector(self):
        if not self.is_pure():
            raise ValueError("not in <b, c, d>")
        return self.blocks[0] if self.blocks else ZERO

    def word(self) -> str:
        out = ["a" * (2 * self.k) if self.k >= 0 else "A" * (-2 * self.k)]
        for t in self.blocks:
            if t == "a":
                out.append("a")
            else:
                for x, n in zip("bcd", t):
                    out.append(x * n if n >= 0 else x.upper() * (-n))
        return "".join(out)


def h0_normalize(word: str) -> H0NormalForm:
    """Normal form in ``<a,b,c,d | a^2 central, b,c,d commute>``.

    ``a^-1`` is rewritten as ``a . a^-2``; adjacent ``a``'s are absorbed into
    the central exponent; adjacent ``b,c,d`` letters are summed into vectors.
    """
    check_word(word, H0)
    k = 0
    stack: list = []
    for x in word:
        if x in "aA":
            if x == "A":
                k -= 1
            if stack and stack[-1] == "a":
                stack.pop()
                k += 1
            else:
                stack.append("a")
        else:
            i = VEC_INDEX[x.lower()]
            step = 1 if x.islower() else -1
            if stack and stack[-1] != "a":
                v = list(stack.pop())
            else:
                v = [0, 0, 0]
            v[i] += step
            if any(v):
                stack.append(tuple(v))
    return H0NormalForm(k, tuple(stack))


def h_section(word: str, vertex: str) -> str:
    """Section of ``word`` at a finite vertex, letter by letter; the word is
    brought to normal form before each step."""
    for bit in vertex:
        _, u, v = wreath_decompose(h0_normalize(word).word(), H0)
        word = v if bit == "1" else u
    return word


def sigma_vector(v, n: int = 1):
    """``b -> d, c -> b, d -> c`` on exponent vectors, applied ``n`` times."""
    for _ in range(n % 3):
        v = (v[1], v[2], v[0])
    return v


# ---------------------------------------------------------------- germs

def germ(word: str, x: str = RHO, cap: int | None = None):
    """Germ of ``word`` at the ray ``x`` by iterating sections.

    Consume the prefix of ``x``, then keep following ``1`` until the section
    lies in ``<b, c, d>``; twist back by ``sigma`` once per level.
    """
    check_word(word, H0)
    cap = len(word) + 64 if cap is None else cap
    w = word
    n = 0
    for bit in x:
        w = h_section(w, bit)
        n += 1
    nf = h0_normalize(w)
    while not nf.is_pure():
        if n > cap + len(x):
            raise GermError(f"germ of {word!r} at {format_ray(x)} did not stabilize")
        w = h_section(nf.word(), "1")
        n += 1
        nf = h0_normalize(w)
    return sigma_vector(nf.vector(), n)


def _letter_rays(word: str) -> list[str]:
    """``rho . (w_1 ... w_{i-1})^-1`` for every position ``i``."""
    inv = xi(word)[::-1]
    imgs = suffix_images(inv, RHO, GRIG)
    n = len(word)
    return [imgs[n - i] for i in range(n)]


def germs(word: str) -> dict:
    """All nonzero germs, from the section cocycle (one pass over the word)."""
    check_word(word, H0)
    acc: dict[str, list[int]] = {}
    rays = _letter_rays(word)
    for i, x in enumerate(word):
        if x in "aA":
            continue
        v = acc.setdefault(rays[i], [0, 0, 0])
        v[VEC_INDEX[x.lower()]] += 1 if x.islower() else -1
    return {t: tuple(v) for t, v in acc.items() if any(v)}


def germ_candidates(word: str) -> frozenset:
    """Rays where a germ can be nonzero: where some ``b, c, d`` letter lands."""
    rays = _letter_rays(word)
    return frozenset(rays[i] for i, x in enumerate(word) if x not in "aA")


# ---------------------------------------------------------------- signatures

@dataclass(frozen=True)
class HSignature:
    grig_word: str
    grig_key: bytes
    a_exp: int
    germs: tuple  # sorted ((ray, vector), ...)

    def key(self):
        return (self.grig_key, self.a_exp, self.germs)

    def to_json(self) -> dict:
        return {"grig_word": self.grig_word, "a_exp": self.a_exp,
                "germs": [[format_ray(x), list(v)] for x, v in self.germs]}


def h_signature(word: str, depth: int = SIGNATURE_DEPTH) -> HSignature:
    g = reduce(xi(word), GRIG)
    return HSignature(g, level_signature(g, depth, GRIG).tobytes(), a_exponent(word),
                      tuple(sorted(germs(word).items())))


def h_is_trivial(word: str) -> bool:
    check_word(word, H0)
    if a_exponent(word):
        return False
    if not is_trivial(xi(word), GRIG):
        return False
    return not germs(word)


def h_equal(w1: str, w2: str) -> bool:
    return h_is_trivial(w1 + h_inverse(w2))


def h_order(word: str, cap: int = 1024):
    """Least 2-power ``k <= cap`` with ``word^k = 1`` (repeated squaring)."""
    p = free_reduce(word)
    if a_exponent(p):
        return UNBOUNDED
    k = 1
    while k <= cap:
        if h_is_trivial(p):
            return k
        k *= 2
        p = free_reduce(p + p)
    return UNBOUNDED


# ---------------------------------------------------------------- ball

def h_ball(radius: int, threads: int = 1, guard: int | None = None) -> list[int]:
    from ggl.wreath import MEMORY_GUARD, ball_series, signature_depth
    depth = signature_depth(radius)
    gens = [(x, x) for x in H0.alphabet]
    return ball_series(gens, lambda p, q: free_reduce(p + q),
                       lambda p: h_signature(p, depth).key(),
                       lambda p, q: p == q or h_equal(p, q), "", radius,
                       MEMORY_GUARD if guard is None else guard, threads)


# ---------------------------------------------------------------- probes

C_GENERATORS = {"bb": (2, 0, 0), "cc": (0, 2, 0), "dd": (0, 0, 2), "bcd": (1, 1, 1)}


def _power(word: str, n: int) -> str:
    return word * n if n >= 0 else h_inverse(word) * (-n)


def random_c_element(rng: random.Random, span: int = 2):
    """A random nonzero element of ``C = <b^2, c^2, d^2, bcd>`` and its vector."""
    while True:
        coeffs = [rng.randint(-span, span) for _ in C_GENERATORS]
        if any(coeffs):
            break
    word = "".join(_power(w, n) for w, n in zip(C_GENERATORS, coeffs))
    vec = tuple(sum(n * v[i] for n, v in zip(coeffs, C_GENERATORS.values())) for i in range(3))
    return word, vec


def random_h_word(rng: random.Random, length: int) -> str:
    return "".join(rng.choice(H0.alphabet) for _ in range(length))


def kerxi_probe(trials: int = 50, seed: int = 0, max_terms: int = 4, conj_len: int = 6) -> dict:
    """Products ``y_1^{g_1} ... y_l^{g_l}`` with ``y_i`` in ``C`` and the
    ``g_i`` in distinct cosets of the stabilizer of rho: the germ at
    ``rho g_i`` must be ``y_i``, every other germ zero, and the element
    must lie in the kernel of the projection.  Also checks that ``y`` and
    ``z^g`` commute."""
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        terms = rng.randint(1, max_terms)
        used = set()
        parts = []
        expect = {}
        while len(parts) < terms:
            g = random_h_word(rng, rng.randint(0, conj_len))
            x = act_ray(xi(g), RHO, GRIG)
            if x in used:
                continue
            used.add(x)
            y, vec = random_c_element(rng)
            parts.append(h_inverse(g) + y + g)
            expect[x] = vec
        h = "".join(parts)
        got = germs(h)
        ok = (got == expect and a_exponent(h) == 0 and is_trivial(xi(h), GRIG))
        # commutation of y and z^g
        y, _ = random_c_element(rng)
        z, _ = random_c_element(rng)
        g = random_h_word(rng, rng.randint(0, conj_len))
        zg = h_inverse(g) + z + g
        comm = h_inverse(y) + h_inverse(zg) + y + zg
        ok = ok and h_is_trivial(comm)
        if not ok:
            failures.append(t)
    return {"trials": trials, "seed": seed, "failures": failures, "ok": not failures}


def torsion_free_probe(trials: int = 100, wordlen: int = 8, cap: int = 1024, seed: int = 0) -> dict:
    rng = random.Random(seed)
    finite = []
    done = 0
    while done < trials:
        w = free_reduce(random_h_word(rng, rng.randint(1, wordlen)))
        if h_is_trivial(w):
            continue
        done += 1
        if h_order(w, cap) != UNBOUNDED:
            finite.append(w)
    return {"trials": trials, "wordlen": wordlen, "cap": cap, "seed": seed,
            "finite_order": finite, "ok": not finite}


def h_lower_bound_family(n: int, valuecap: int, limit: int = 10**6) -> dict:
    """Insert ``(bcd)^{a_j}`` before a position ``i_j`` with
    ``rho w_{i_j} ... w_end = x_j``, for every point ``x_j`` of the inverted
    orbit of ``w = zeta^n(ad)`` and every ``a_j`` in ``1..valuecap``.

    Distinctness is certified twice: by the invariant triple of each
    element, and by reading ``(a_j, a_j, a_j)`` off the germ of ``w^-1 v``
    at ``x_j``.
    """
    w = zeta_word(n)
    imgs = suffix_images(w, RHO, GRIG)
    position = {}
    for i in range(len(w), -1, -1):  # shortest suffix reaching each point
        position.setdefault(imgs[i], i)
    points = sorted(position)
    k = len(points)
    total = valuecap ** k
    if total > limit:
        raise ValueError(f"{total} elements exceed the limit {limit}")
    winv = h_inverse(w)
    keys = set()
    readout_ok = True
    length_ok = True
    for idx in range(total):
        vals = []
        r = idx
        for _ in range(k):
            vals.append(r % valuecap + 1)
            r //= valuecap
        insert = {position[x]: "bcd" * a for x, a in zip(points, vals)}
        v = "".join(insert.get(i, "") + (w[i] if i < len(w) else "") for i in range(len(w) + 1))
        length_ok &= len(v) <= len(w) + 3 * k * valuecap
        keys.add(h_signature(v).key())
        g = germs(winv + v)
        readout_ok &= all(g.get(x) == (a, a, a) for x, a in zip(points, vals))
        readout_ok &= len(g) == k
    return {
        "n": n,
        "valuecap": valuecap,
        "insertion_points": k,
        "points": [format_ray(x) for x in points],
        "elements": total,
        "distinct": len(keys),
        "all_distinct": len(keys) == total,
        "germ_readout": readout_ok,
        "length_bound": length_ok,
    }


def germ_support_check(trials: int = 200, wordlen: int = 12, seed: int = 0) -> dict:
    """Germ support lies in the candidate set, whose size is bounded by the
    inverted orbit of the inverse Grigorchuk word."""
    rng = random.Random(seed)
    failures = []
    for _ in range(trials):
        w = random_h_word(rng, rng.randint(0, wordlen))
        support = set(germs(w))
        cand = germ_candidates(w)
        orbit = inverted_orbit(xi(w)[::-1], RHO, GRIG)
        if not (support <= cand <= orbit):
            failures.append(w)
    return {"trials": trials, "failures": failures, "ok": not failures}


def xi_equal(w1: str, w2: str) -> bool:
    return grig_equal(xi(w1), xi(w2), GRIG)
