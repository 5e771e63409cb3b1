"""Self-similar groups acting on the binary rooted tree.

Three wreath recursions are supported:

* ``GRIG``      the first Grigorchuk group, b=<a,c>, c=<a,d>, d=<1,b>
* ``ERSCHLER``  the group with b=<1,c>, c=<a,b>, d=<a,d>
* ``H0``        the signed lift of ``GRIG`` (upper case letters are inverses)

In all three, ``a`` swaps the two subtrees and has trivial sections.

Words are plain strings, read left to right, acting on the right:
``x . (w1 w2) = (x . w1) . w2``.  Rays are boundary points cofinal with
``1^inf`` and are stored as their canonical finite prefix, i.e. the prefix
with trailing ``1`` letters stripped; ``RHO == ""`` is ``1^inf`` itself.
"""

from __future__ import annotations

import math
import threading
from enum import Enum
from functools import lru_cache

import numpy as np

RHO = ""
UNBOUNDED = math.inf


class ContractionError(RuntimeError):
    """The triviality recursion went deeper than its configured cap."""


class Group(Enum):
    GRIG = "grig"
    ERSCHLER = "erschler"
    H0 = "h0"

    @property
    def sections(self) -> dict[str, tuple[str, str]]:
        return _SECTIONS[self]

    @property
    def alphabet(self) -> str:
        return "aAbBcCdD" if self is Group.H0 else "abcd"

    @property
    def involutive(self) -> bool:
        return self is not Group.H0


GRIG = Group.GRIG
ERSCHLER = Group.ERSCHLER
H0 = Group.H0

SWAPS = frozenset("aA")

_SECTIONS = {
    GRIG: {"a": ("", ""), "b": ("a", "c"), "c": ("a", "d"), "d": ("", "b")},
    ERSCHLER: {"a": ("", ""), "b": ("", "c"), "c": ("a", "b"), "d": ("a", "d")},
    H0: {
        "a": ("", ""), "b": ("a", "c"), "c": ("a", "d"), "d": ("", "b"),
        "A": ("", ""), "B": ("A", "C"), "C": ("A", "D"), "D": ("", "B"),
    },
}

# b, c, d generate a Klein four-group in GRIG and ERSCHLER.
KLEIN = {
    ("b", "b"): "", ("c", "c"): "", ("d", "d"): "",
    ("b", "c"): "d", ("c", "b"): "d",
    ("c", "d"): "b", ("d", "c"): "b",
    ("d", "b"): "c", ("b", "d"): "c",
}


def as_group(group) -> Group:
    if isinstance(group, Group):
        return group
    try:
        return Group(str(group).lower())
    except ValueError:
        raise ValueError(f"unknown group {group!r}; expected one of "
                         f"{[g.value for g in Group]}") from None


def check_word(word: str, group=GRIG) -> str:
    group = as_group(group)
    bad = set(word) - set(group.alphabet)
    if bad:
        raise ValueError(f"letters {sorted(bad)} are not generators of {group.value}")
    return word


# ---------------------------------------------------------------- rays

def canonical_ray(prefix: str) -> str:
    """Strip trailing 1s so that equal rays have equal prefixes."""
    if set(prefix) - {"0", "1"}:
        raise ValueError(f"ray prefix must be binary, got {prefix!r}")
    return prefix.rstrip("1")


def format_ray(x: str) -> str:
    return x + "ρ" if x else "ρ"


def parse_ray(text: str) -> str:
    """Accept ``"0ρ"``, ``"0r"``, ``"01"`` or ``""`` for rays."""
    text = text.strip()
    for tail in ("ρ", "rho", "r"):
        if text.endswith(tail):
            text = text[: -len(tail)]
            break
    return canonical_ray(text)


# ---------------------------------------------------------------- words

def inverse(word: str, group=GRIG) -> str:
    if as_group(group).involutive:
        return word[::-1]
    return word[::-1].swapcase()


def a_parity(word: str) -> int:
    return (word.count("a") + word.count("A")) & 1


def reduce(word: str, group=GRIG) -> str:
    """Group-valid reduction: cancel ``aa`` and merge {b,c,d} pairs.

    For ``H0`` only free cancellation of ``xX`` is applied.
    """
    group = as_group(group)
    stack: list[str] = []
    if group.involutive:
        for x in word:
            if stack:
                top = stack[-1]
                if x == "a":
                    if top == "a":
                        stack.pop()
                        continue
                elif top != "a":
                    stack.pop()
                    merged = KLEIN[top, x]
                    if merged:
                        stack.append(merged)
                    continue
            stack.append(x)
    else:
        for x in word:
            if stack and stack[-1] == x.swapcase():
                stack.pop()
            else:
                stack.append(x)
    return "".join(stack)


def wreath_decompose(word: str, group=GRIG) -> tuple[int, str, str]:
    """Return ``(s, u, v)`` with ``word = eps^s <u, v>``.

    ``u`` and ``v`` are the letterwise sections at the vertices 0 and 1; the
    section index of each letter is the vertex it is read at, before the
    letter's own permutation is applied.
    """
    table = as_group(group).sections
    u: list[str] = []
    v: list[str] = []
    p = 0
    for x in word:
        s0, s1 = table[x]
        if p:
            u.append(s1)
            v.append(s0)
        else:
            u.append(s0)
            v.append(s1)
        if x in SWAPS:
            p ^= 1
    return p, "".join(u), "".join(v)


def section(word: str, vertex: str, group=GRIG) -> str:
    """Section of ``word`` at a finite vertex (a binary string)."""
    for bit in vertex:
        _, u, v = wreath_decompose(word, group)
        word = v if bit == "1" else u
    return word


# ---------------------------------------------------------------- action

def _act_letter(table, x: str, prefix: str) -> str:
    out = []
    i = 0
    n = len(prefix)
    while x:
        if i == n:
            # b, c, d (and their inverses) fix 1^inf in all three recursions
            if x in SWAPS:
                out.append("0")
            break
        bit = prefix[i]
        out.append(("1" if bit == "0" else "0") if x in SWAPS else bit)
        x = table[x][bit == "1"]
        i += 1
    else:
        out.append(prefix[i:])
    return "".join(out).rstrip("1")


def act_ray(word: str, x: str = RHO, group=GRIG) -> str:
    """Image of the ray ``x`` under the right action of ``word``."""
    table = as_group(group).sections
    try:
        for letter in word:
            x = _act_letter(table, letter, x)
    except KeyError as e:
        raise ValueError(f"{e.args[0]!r} is not a generator of {as_group(group).value}") from None
    return x


@lru_cache(maxsize=1 << 18)
def act_letter(letter: str, x: str, group: Group = GRIG) -> str:
    """Memoized single-letter action; rays in a Schreier ball repeat a lot."""
    return _act_letter(group.sections, letter, x)


# ---------------------------------------------------------------- triviality

_memo: dict[tuple[Group, str], bool] = {}
_memo_lock = threading.Lock()


def clear_cache() -> None:
    with _memo_lock:
        _memo.clear()


def _trivial(group: Group, w: str, depth: int, cap: int) -> bool:
    if not w:
        return True
    if depth > cap:
        raise ContractionError(f"depth cap {cap} exceeded; the input does not contract")
    key = (group, w)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    if a_parity(w):
        result = False
    else:
        _, u, v = wreath_decompose(w, group)
        result = (_trivial(group, reduce(u, group), depth + 1, cap)
                  and _trivial(group, reduce(v, group), depth + 1, cap))
    with _memo_lock:
        _memo[key] = result
    return result


def is_trivial(word: str, group=GRIG, depth_cap: int | None = None) -> bool:
    """Decide whether ``word`` is the identity.

    Reduce, reject odd ``a``-parity, then recurse on both sections.  Sections
    of a reduced word of length ``n >= 2`` have length at most ``(n+1)/2``,
    which bounds the recursion depth.  For ``H0`` the question is delegated to
    the torsion-free group ``H`` (see :mod:`ggl.torsionfree`).
    """
    group = as_group(group)
    if group is H0:
        from ggl.torsionfree import h_is_trivial
        return h_is_trivial(word)
    w = reduce(check_word(word, group), group)
    cap = 10 * len(word) + 64 if depth_cap is None else depth_cap
    return _trivial(group, w, 0, cap)


def equal(w1: str, w2: str, group=GRIG, depth_cap: int | None = None) -> bool:
    return is_trivial(w1 + inverse(w2, group), group, depth_cap)


def order(word: str, cap: int = 4096, group=GRIG):
    """Least ``k = 2^j <= cap`` with ``word^k`` trivial, else ``UNBOUNDED``.

    Every finite-order automorphism of the binary tree has 2-power order, so
    only the powers ``w, w^2, w^4, ...`` are tested, each obtained by squaring
    the previous reduced power.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    group = as_group(group)
    if group is H0:
        from ggl.torsionfree import h_order
        return h_order(word, cap)
    p = reduce(check_word(word, group), group)
    k = 1
    while k <= cap:
        if _trivial(group, p, 0, 10 * len(p) + 64):
            return k
        k *= 2
        p = reduce(p + p, group)
    return UNBOUNDED


# ---------------------------------------------------------------- level action

@lru_cache(maxsize=None)
def letter_permutations(group: Group, depth: int) -> dict[str, np.ndarray]:
    """Permutation of level ``depth`` induced by each letter.

    Vertex ``q1 q2 ... qn`` is encoded as an integer with ``q1`` the most
    significant bit; ``perm[x]`` is the index of ``x . letter``.
    """
    table = group.sections
    if depth == 0:
        return {x: np.zeros(1, dtype=np.int32) for x in table}
    below = letter_permutations(group, depth - 1)
    half = 1 << (depth - 1)
    ident = np.arange(half, dtype=np.int32)
    perms = {}
    for x, secs in table.items():
        parts = []
        for bit in (0, 1):
            sub = below[secs[bit]] if secs[bit] else ident
            top = bit ^ (x in SWAPS)
            parts.append(sub + top * half)
        perms[x] = np.concatenate(parts).astype(np.int32)
    return perms


def level_signature(word: str, depth: int, group=GRIG) -> np.ndarray:
    """The permutation of the ``2**depth`` level-``depth`` vertices induced by ``word``.

    Equal elements give equal signatures; the converse can fail, so callers
    must confirm collisions with :func:`equal`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    perms = letter_permutations(as_group(group), depth)
    img = np.arange(1 << depth, dtype=np.int32)
    for x in word:
        img = perms[x][img]
    return img
