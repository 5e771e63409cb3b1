"""Word combinatorics over {a, b, c, d}: pre-reduction, the eta-weighted
norm, the substitutions sigma and zeta, and the contraction inequality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from scipy.optimize import bisect

from ggl.tree import GRIG, KLEIN, wreath_decompose

BCD = frozenset("bcd")

SIGMA = {"a": "aca", "b": "d", "c": "b", "d": "c"}
ZETA = {"ab": "abadac", "ac": "abab", "ad": "acac"}


class NotPreReducedError(ValueError):
    pass


@dataclass(frozen=True)
class NormTable:
    eta: float
    alpha: float
    weights: dict[str, float] = field(hash=False)

    @property
    def C(self) -> float:
        """Additive constant of the contraction inequality, ``eta * |a|``."""
        return self.eta * self.weights["a"]


@lru_cache(maxsize=1)
def norm_table() -> NormTable:
    eta = bisect(lambda x: x**3 + x**2 + x - 2, 0.0, 1.0, xtol=1e-15)
    weights = {"a": 1 - eta**3, "b": eta**3, "c": 1 - eta**2, "d": 1 - eta}
    alpha = math.log(2) / math.log(2 / eta)
    return NormTable(eta=eta, alpha=alpha, weights=weights)


def alpha_constants() -> tuple[float, float, float]:
    """``(eta, r, alpha)`` where r is the positive root of X^3 - X^2 - 2X - 4.

    The growth-matrix root ``r`` is found independently of eta; it must agree
    with ``2/eta``.
    """
    t = norm_table()
    r = bisect(lambda x: x**3 - x**2 - 2 * x - 4, 2.0, 3.0, xtol=1e-15)
    if abs(r - 2 / t.eta) >= 1e-9:
        raise ArithmeticError(f"growth root {r} differs from 2/eta = {2 / t.eta}")
    return t.eta, r, t.alpha


def norm(word: str) -> float:
    w = norm_table().weights
    return sum(w[x] for x in word)


def pre_reduce(word: str) -> str:
    """Delete bb, cc, dd and merge the other {b,c,d} pairs; ``aa`` is kept.

    These rewrites preserve both the group element and the inverted orbit
    of ``1^inf``, which is why ``aa`` is left alone.
    """
    stack: list[str] = []
    for x in word:
        if x in BCD and stack and stack[-1] in BCD:
            merged = KLEIN[stack.pop(), x]
            if merged:
                stack.append(merged)
        else:
            stack.append(x)
    return "".join(stack)


def is_pre_reduced(word: str) -> bool:
    return all(not (x in BCD and y in BCD) for x, y in zip(word, word[1:]))


def pre_reduced_words(n: int, exact: bool = False):
    """Yield every pre-reduced word of length ``<= n`` (``== n`` if exact),
    shortest first, lexicographic within a length."""
    layer = [""]
    if not exact or n == 0:
        yield ""
    for m in range(1, n + 1):
        nxt = []
        for w in layer:
            for x in "abcd":
                if x in BCD and w and w[-1] in BCD:
                    continue
                nxt.append(w + x)
        layer = nxt
        if not exact or m == n:
            yield from layer


def sigma_iter(word: str, n: int, table: dict[str, str] | None = None) -> str:
    """Apply ``a->aca, b->d, c->b, d->c`` n times; letters outside the
    table are fixed."""
    table = SIGMA if table is None else table
    for _ in range(n):
        word = "".join(table.get(x, x) for x in word)
    return word


def _zeta(word: str) -> str:
    return "".join(ZETA[word[i:i + 2]] for i in range(0, len(word), 2))


def zeta_word(n: int) -> str:
    """``zeta^n(ad)``: ad, acac, abababab, (abadac)^4, ..."""
    if n < 0:
        raise ValueError("n must be >= 0")
    w = "ad"
    for _ in range(n):
        w = _zeta(w)
    return w


def zeta_companion(n: int) -> str:
    """``w_n'``: the word ``w_n a`` with its initial ``a`` deleted."""
    w = zeta_word(n)
    return w[1:] + "a"


def zeta_length(n: int) -> int:
    """Exact ``|zeta^n(ad)|`` from the pair-occurrence matrix (Python ints)."""
    m = ((1, 2, 0), (1, 0, 2), (1, 0, 0))
    vec = (0, 0, 1)
    for _ in range(n):
        vec = tuple(sum(m[i][j] * vec[j] for j in range(3)) for i in range(3))
    return 2 * sum(vec)


def contraction_check(word: str, tol: float = 1e-9) -> tuple[float, float, bool]:
    """Check ``|u| + |v| <= eta |w| + eta |a|`` for a pre-reduced word."""
    if not is_pre_reduced(word):
        raise NotPreReducedError(f"{word!r} is not pre-reduced")
    t = norm_table()
    _, u, v = wreath_decompose(word, GRIG)
    lhs = norm(u) + norm(v)
    rhs = t.eta * norm(word) + t.C
    return lhs, rhs, lhs <= rhs + tol


def random_word(rng, length: int, alphabet: str = "abcd") -> str:
    """Uniform letters, then pre-reduced (so the result may be shorter)."""
    return pre_reduce("".join(rng.choice(alphabet) for _ in range(length)))


def all_words(n: int, alphabet: str = "abcd"):
    """Every word of length ``<= n`` over ``alphabet``."""
    for m in range(n + 1):
        for t in product(alphabet, repeat=m):
            yield "".join(t)
