from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ggl.tree import ERSCHLER, GRIG, RHO, UNBOUNDED
from ggl.wreath import (Integers, MemoryGuardError, PermExtension, WreathGroup, Z2,
                        erschler_embedding_witness, group_ball, perm_ext_ball,
                        perm_support_check, signature_depth, sinfty_lower_bound_family,
                        support_bound_check, torsion_probe, tower, w_ball)

from oracles import lamp_configuration, level_permutation, ray_image

k1_words = st.text(alphabet="sabcd", max_size=16)
l1_words = st.text(alphabet="tTabcd", max_size=16)
groups = st.sampled_from(["grig", "erschler"])


def as_dict(e):
    return dict(e.f)


@settings(max_examples=300, deadline=None)
@given(k1_words, groups)
def test_k1_lamps_match_oracle(w, group):
    k = WreathGroup(Z2(), group)
    lamps = {x: v % 2 for x, v in lamp_configuration(w, RHO, group).items() if v % 2}
    assert as_dict(k.evaluate(w)) == lamps


@settings(max_examples=300, deadline=None)
@given(l1_words, groups)
def test_l1_lamps_match_oracle(w, group):
    k = WreathGroup(Integers(), group)
    lamps = lamp_configuration(w, RHO, group, values={"t": 1, "T": -1})
    assert as_dict(k.evaluate(w)) == {x: v for x, v in lamps.items() if v}


@settings(max_examples=200, deadline=None)
@given(k1_words, k1_words, k1_words)
def test_k1_group_axioms(w1, w2, w3):
    k = WreathGroup(Z2())
    a, b, c = k.evaluate(w1), k.evaluate(w2), k.evaluate(w3)
    assert k.equal(k.multiply(a, b), k.evaluate(w1 + w2))
    assert k.equal(k.multiply(k.multiply(a, b), c), k.multiply(a, k.multiply(b, c)))
    assert k.is_identity(k.multiply(a, k.inverse(a)))
    assert k.is_identity(k.multiply(k.inverse(a), a))
    assert k.equal(k.multiply(a, k.identity), a)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["[s]", "a", "b", "c", "d", "s"]), max_size=10),
       st.lists(st.sampled_from(["[s]", "a", "b", "c", "d", "s"]), max_size=10))
def test_k2_nested_products(t1, t2):
    k2 = tower(2)
    names = {"s": "[s]"}
    t1 = [names.get(x, x) for x in t1]
    t2 = [names.get(x, x) for x in t2]
    a, b = k2.evaluate(t1), k2.evaluate(t2)
    assert k2.equal(k2.multiply(a, b), k2.evaluate(t1 + t2))
    assert k2.is_identity(k2.multiply(a, k2.inverse(a)))
    assert k2.evaluate("".join(t1)) == a


def test_tokens_and_unknown_letters():
    k2 = tower(2)
    assert k2.tokens("[s]ab[s]") == ["[s]", "a", "b", "[s]"]
    with pytest.raises(ValueError):
        WreathGroup(Z2()).evaluate("x")
    with pytest.raises(ValueError):
        tower(1, base="Q")


def brute_k1_ball(radius, group="grig", depth=10):
    """Sizes of K1 balls with elements keyed by (level permutation, lamps)."""
    seen = set()
    sizes = []
    for r in range(radius + 1):
        for t in product("sabcd", repeat=r):
            w = "".join(t)
            g = "".join(x for x in w if x != "s")
            lamps = frozenset(x for x, v in lamp_configuration(w, RHO, group).items() if v % 2)
            seen.add((tuple(level_permutation(g, depth, group)), lamps))
        sizes.append(len(seen))
    return sizes


def test_k1_ball_matches_brute_force():
    assert w_ball(tower(1), 4) == brute_k1_ball(4) == [1, 6, 17, 43, 98]


def test_k1_ball_depth_and_threads():
    r = 7
    d = signature_depth(r)
    s1 = w_ball(tower(1, depth=d), r)
    assert s1 == w_ball(tower(1, depth=d + 2), r)
    assert s1 == w_ball(tower(1, depth=d), r, threads=4)
    # sub-multiplicativity of the growth function
    for m in range(r + 1):
        for n in range(r + 1 - m):
            assert s1[m + n] <= s1[m] * s1[n]


def brute_group_ball(radius, group, depth=10):
    seen, sizes = set(), []
    for r in range(radius + 1):
        for t in product("abcd", repeat=r):
            seen.add(tuple(level_permutation("".join(t), depth, group)))
        sizes.append(len(seen))
    return sizes


@pytest.mark.parametrize("group", ["grig", "erschler"])
def test_tree_group_balls(group):
    assert group_ball(group, 5) == brute_group_ball(5, group)


def test_grig_ball_values():
    assert group_ball(GRIG, 6) == [1, 5, 11, 23, 40, 68, 108]


def test_memory_guard():
    with pytest.raises(MemoryGuardError):
        w_ball(tower(1), 6, guard=100)


def test_orders_in_k1_and_l1():
    k = WreathGroup(Z2())
    assert k.order(k.evaluate("s")) == 2
    assert k.order(k.evaluate("sa")) == 4
    rep = torsion_probe(k, trials=40, wordlen=8, seed=1)
    assert rep["ok"]
    l1 = tower(1, "Z")
    assert l1.order(l1.evaluate("t")) == UNBOUNDED


def test_support_bounds():
    assert support_bound_check(GRIG, 300, 12, 0)["ok"]
    assert support_bound_check(ERSCHLER, 300, 12, 0)["ok"]
    assert perm_support_check(300, 12, 0)["ok"]


def perm_oracle(word, x, x0=RHO):
    """x . word acting letter by letter; s swaps x0 and x0 a."""
    x1 = ray_image("a", x0)
    for s in word:
        if s == "s":
            x = x1 if x == x0 else x0 if x == x1 else x
        else:
            x = ray_image(s, x)
    return x


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="sabcd", max_size=14), st.text(alphabet="sabcd", max_size=8))
def test_perm_extension_matches_action(w1, w2):
    ext = PermExtension()
    e1, e2 = ext.evaluate(w1), ext.evaluate(w2)
    pts = [RHO, "0", "00", "10", "010", "110", "0110", "1110"]
    for x in pts:
        assert ext.act(e1, x) == perm_oracle(w1, x)
    prod = ext.multiply(e1, e2)
    assert ext.equal(prod, ext.evaluate(w1 + w2))
    assert ext.is_identity(ext.multiply(e1, ext.inverse(e1)))


def test_perm_extension_ball():
    s = perm_ext_ball(4)
    assert s[:2] == [1, 6]
    assert s == perm_ext_ball(4, threads=3)


def test_erschler_embedding_witness():
    rep = erschler_embedding_witness(10)
    assert rep["distinct"] == 1024 and rep["all_distinct"] and rep["free_orbit_distinct"]
    with pytest.raises(ValueError):
        erschler_embedding_witness(20)


def test_grig_analogue_collapses():
    # the same family in the first Grigorchuk group has far fewer elements,
    # since the orbit of rho under (ad)^i is finite
    k = WreathGroup(Z2(), GRIG)
    seen = set()
    for bits in range(1 << 8):
        word = "".join(("s" if bits >> (7 - i) & 1 else "") + "ad" for i in range(8))
        seen.add(k.evaluate(word))
    assert len(seen) < 1 << 8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sinfty_family(n):
    rep = sinfty_lower_bound_family(n)
    assert rep["all_distinct"] and rep["decoder_recovers_exponents"]
    assert rep["distinct_keys"] == 2 ** (2 ** n)


def test_json_is_plain():
    k = WreathGroup(Z2())
    j = k.to_json(k.evaluate("sas"))
    assert j["g"] == "a" and sorted(x for x, _ in j["f"]) == ["0ρ", "ρ"]
