"""Finite L-presentations ``<S | Q | Phi | R>``: the relators are ``Q`` together
with ``phi(r)`` for ``r`` in ``R`` and ``phi`` in the monoid generated by
``Phi``.

Generators are single characters.  A generator listed in ``involutive`` is
its own inverse; any other generator ``x`` has inverse ``x.swapcase()``.
Relator words are kept literally (no cancellation), so that what is
verified is exactly what was written down.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ggl.words import SIGMA


@dataclass
class LPresentation:
    generators: list
    fixed: list                 # Q
    endomorphisms: list         # Phi: list of {letter: word}
    iterated: list              # R
    involutive: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        for phi in self.endomorphisms:
            missing = set(self.generators) - set(phi)
            if missing:
                raise ValueError(f"endomorphism table misses {sorted(missing)}")
        for r in self.fixed + self.iterated:
            self._check(r)

    def _check(self, word: str):
        ok = set(self.generators) | {x.swapcase() for x in self.generators
                                     if x not in self.involutive}
        bad = set(word) - ok
        if bad:
            raise ValueError(f"relator {word!r} uses unknown letters {sorted(bad)}")

    def inv(self, word: str) -> str:
        return "".join(x if x in self.involutive else x.swapcase() for x in reversed(word))

    def apply(self, phi: dict, word: str) -> str:
        out = []
        for x in word:
            if x in phi:
                out.append(phi[x])
            else:  # inverse letter
                out.append(self.inv(phi[x.swapcase()]))
        return "".join(out)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generators": list(self.generators),
            "involutive": sorted(self.involutive),
            "fixed_relators": list(self.fixed),
            "endomorphisms": [dict(sorted(phi.items())) for phi in self.endomorphisms],
            "iterated_relators": list(self.iterated),
        }


# ---------------------------------------------------------------- notation

def conj(x: str, y: str, inv) -> str:
    """``x^y = y^-1 x y``."""
    return inv(y) + x + y


def comm(x: str, y: str, inv) -> str:
    """``[x, y] = x^-1 y^-1 x y``."""
    return inv(x) + inv(y) + x + y


def _involutive_inv(word: str) -> str:
    return word[::-1]


def _sigma_ext(extra) -> dict:
    table = dict(SIGMA)
    for x in extra:
        table[x] = x
    return table


def _sigma(word: str) -> str:
    return "".join(SIGMA[x] for x in word)


def _grig_iterated(inv=_involutive_inv) -> list:
    return [comm("d", conj("d", "a", inv), inv),
            comm("d", conj("d", "acaca", inv), inv)]


def _stabilizer_relators(s: str, inv) -> list:
    ab = comm("a", "b", inv)
    return [comm(s, "b", inv),
            comm(s, conj("d", "a", inv), inv),
            comm(s, "acacacac", inv),
            comm(s, conj(_sigma(ab), "a", inv), inv),
            comm(s, conj(_sigma(_sigma(ab)), "a", inv), inv)]


# ---------------------------------------------------------------- presentations

def grig_lpres() -> LPresentation:
    """Lysionok's presentation; ``b^2, c^2, d^2`` are implicit because the
    letters are declared involutive."""
    inv = _involutive_inv
    return LPresentation(
        generators=list("abcd"),
        fixed=[],
        endomorphisms=[dict(SIGMA)],
        iterated=["aa", "bcd"] + _grig_iterated(inv),
        involutive=frozenset("abcd"),
        name="grig",
    )


def k1_lpres() -> LPresentation:
    """``Z/2 wr_X G`` with the extra generator ``s``, ``sigma(s) = s``."""
    inv = _involutive_inv
    r = _grig_iterated(inv)
    stab = _stabilizer_relators("s", inv)
    iterated = [r[0], r[1], comm("s", conj("s", "a", inv), inv)] + stab[:3] + stab[3:]
    # order: r1..r8 = [d,d^a], [d,d^((ac)^2 a)], [s,s^a], [s,b], [s,d^a], [s,(ac)^4],
    #                 [s, sigma([a,b])^a], [s, sigma^2([a,b])^a]
    return LPresentation(
        generators=list("abcds"),
        fixed=["aa", "bb", "cc", "dd", "ss", "bcd"],
        endomorphisms=[_sigma_ext("s")],
        iterated=iterated,
        involutive=frozenset("abcds"),
        name="k1",
    )


def wreath_lpres(base: LPresentation) -> LPresentation:
    """Presentation of ``A wr_X G`` from one of ``A``.

    ``Phi`` = the endomorphisms of ``A`` extended by fixing ``a, b, c, d``,
    plus ``sigma`` extended by fixing the generators of ``A``.  ``R`` adds to
    ``R_A`` the two iterated relators of ``G`` and, for all generators
    ``s, s'`` of ``A``, commutators of ``s`` with the generators of the
    stabilizer of rho and ``[s', s^a]``.
    """
    S = list(base.generators)
    clash = set(S) & set("abcd")
    if clash:
        raise ValueError(f"base generators {sorted(clash)} clash with a, b, c, d")
    invol = frozenset(base.involutive) | frozenset("abcd")

    def inv(word):
        return "".join(x if x in invol else x.swapcase() for x in reversed(word))

    phis = []
    for phi in base.endomorphisms:
        ext = dict(phi)
        ext.update({x: x for x in "abcd"})
        phis.append(ext)
    phis.append(_sigma_ext(S))
    extra = []
    for s in S:
        extra += _stabilizer_relators(s, inv)
    for s in S:
        for t in S:
            extra.append(comm(t, conj(s, "a", inv), inv))
    return LPresentation(
        generators=list("abcd") + S,
        fixed=list(base.fixed) + ["aa", "bb", "cc", "dd", "bcd"],
        endomorphisms=phis,
        iterated=list(base.iterated) + _grig_iterated(inv) + extra,
        involutive=invol,
        name=f"({base.name})wr(grig)",
    )


def z2_lpres(letter: str = "s") -> LPresentation:
    return LPresentation([letter], [letter * 2], [], [], frozenset(letter), "Z2")


# ---------------------------------------------------------------- expansion

class ExpansionTooLarge(ValueError):
    pass


def expand(p: LPresentation, depth: int, cap: int = 100_000, dedup: bool = True,
           maxchars: int = 10_000_000) -> list:
    """``Q`` plus ``phi(r)`` for every composition ``phi`` of at most
    ``depth`` endomorphisms; deduplicated as strings, first occurrence kept.

    ``cap`` bounds the number of relators and ``maxchars`` their total length
    (substitutions such as sigma roughly double lengths at every level)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    k = len(p.endomorphisms)
    count = len(p.fixed) + len(p.iterated) * sum(k ** i for i in range(depth + 1))
    if count > cap:
        raise ExpansionTooLarge(f"{count} relators exceed the cap {cap}")
    out = list(p.fixed)
    layer = list(p.iterated)
    out += layer
    size = sum(map(len, out))
    for _ in range(depth):
        layer = [p.apply(phi, r) for r in layer for phi in p.endomorphisms]
        size += sum(map(len, layer))
        if size > maxchars:
            raise ExpansionTooLarge(f"relators exceed {maxchars} letters in total")
        out += layer
    if dedup:
        seen = set()
        out = [r for r in out if not (r in seen or seen.add(r))]
    return out


def verify(relators, oracle) -> dict:
    """Evaluate every relator with ``oracle(word) -> bool`` (True = trivial)."""
    bad = [r for r in relators if not oracle(r)]
    return {"relators": len(relators), "nontrivial": bad, "ok": not bad}


# ---------------------------------------------------------------- oracles

def grig_oracle(word: str) -> bool:
    from ggl.tree import GRIG, is_trivial
    return is_trivial(word, GRIG)


def grig_level_oracle(word: str, depth: int = 12) -> bool:
    import numpy as np
    from ggl.tree import GRIG, level_signature
    return bool(np.array_equal(level_signature(word, depth, GRIG), np.arange(1 << depth)))


def k1_oracle(word: str) -> bool:
    from ggl.wreath import Z2, WreathGroup
    w = _K1.get("w")
    if w is None:
        w = _K1["w"] = WreathGroup(Z2())
    return w.is_identity(w.evaluate(word))


_K1: dict = {}
