import random

from hypothesis import given, settings, strategies as st

from ggl.orbits import inverted_orbit
from ggl.tree import GRIG, RHO, UNBOUNDED, act_ray, is_trivial
from ggl.torsionfree import (H0NormalForm, a_exponent, free_reduce, germ, germ_candidates,
                             germ_support_check, germs, h0_normalize, h_ball, h_equal,
                             h_inverse, h_is_trivial, h_lower_bound_family, h_order,
                             h_signature, kerxi_probe, sigma_vector, torsion_free_probe, xi)

hwords = st.text(alphabet="aAbBcCdD", max_size=14)
short_hwords = st.text(alphabet="aAbBcCdD", max_size=8)


def add(u, v):
    return tuple(x + y for x, y in zip(u, v))


@settings(max_examples=300, deadline=None)
@given(hwords)
def test_germ_two_routes_agree(w):
    table = germs(w)
    extra = {RHO, "0", "10", "110", "00"}
    for x in set(germ_candidates(w)) | extra:
        assert germ(w, x) == table.get(x, (0, 0, 0)), x


@settings(max_examples=200, deadline=None)
@given(short_hwords, short_hwords)
def test_germ_cocycle(w1, w2):
    # (g h)_t = g_t + h_{t g}
    g1, g2, g12 = germs(w1), germs(w2), germs(w1 + w2)
    pts = set(g1) | set(g12) | {x for x in inverted_orbit(xi(w1)[::-1], RHO, GRIG)}
    pts |= {act_ray(xi(h_inverse(w1)), y, GRIG) for y in g2}
    for t in pts:
        tg = act_ray(xi(w1), t, GRIG)
        assert g12.get(t, (0, 0, 0)) == add(g1.get(t, (0, 0, 0)), g2.get(tg, (0, 0, 0)))


@settings(max_examples=200, deadline=None)
@given(hwords, hwords)
def test_projection_and_exponent_are_homomorphisms(w1, w2):
    assert is_trivial(xi(w1 + w2) + xi(h_inverse(w2)) + xi(h_inverse(w1)))
    assert a_exponent(w1 + w2) == a_exponent(w1) + a_exponent(w2)


@settings(max_examples=200, deadline=None)
@given(hwords)
def test_inverse_and_free_reduction(w):
    assert h_is_trivial(w + h_inverse(w))
    assert h_is_trivial(h_inverse(w) + w)
    assert h_equal(w, free_reduce(w))
    assert len(free_reduce(w)) <= len(w)


@settings(max_examples=200, deadline=None)
@given(hwords)
def test_normal_form_round_trip(w):
    nf = h0_normalize(w)
    assert h0_normalize(nf.word()) == nf
    assert h_equal(w, nf.word())


def test_normal_form_examples():
    assert h0_normalize("aa") == H0NormalForm(1, ())
    assert h0_normalize("A") == H0NormalForm(-1, ("a",))
    assert h0_normalize("bcB") == H0NormalForm(0, ((0, 1, 0),))
    assert h0_normalize("bcB").vector() == (0, 1, 0)


def test_sigma_on_vectors():
    assert sigma_vector((1, 0, 0)) == (0, 0, 1)  # b -> d
    assert sigma_vector((0, 1, 0)) == (1, 0, 0)  # c -> b
    assert sigma_vector((1, 2, 3), 3) == (1, 2, 3)


def test_germs_of_generators():
    assert germ("b", RHO) == (1, 0, 0)
    assert germ("c", RHO) == (0, 1, 0)
    assert germ("D", RHO) == (0, 0, -1)
    for x in ["0", "10", "00", "110", "0110", "1010"]:
        assert germ("b", x) == (0, 0, 0)
    assert germs("bcd") == {RHO: (1, 1, 1)}


def test_triviality_examples():
    assert h_is_trivial("")
    assert h_is_trivial("aA")
    assert h_is_trivial("bcBC")          # b, c commute
    assert not h_is_trivial("bb")        # b has infinite order
    assert not h_is_trivial("bcd")       # nontrivial, though bcd = 1 in the quotient
    assert not h_is_trivial("aa")
    assert is_trivial(xi("bcd"))


def test_orders():
    assert h_order("") == 1
    assert h_order("a") == UNBOUNDED
    assert h_order("b") == UNBOUNDED
    assert h_order("ab") == UNBOUNDED  # a-exponent 1
    assert h_order("aB") == UNBOUNDED
    assert torsion_free_probe(30, 8, 1 << 10, seed=3)["ok"]


def test_kernel_probe():
    assert kerxi_probe(25, seed=5)["ok"]


def test_germ_support_within_orbit():
    assert germ_support_check(200, 12, 0)["ok"]


def test_lower_bound_family():
    r1 = h_lower_bound_family(1, 2)
    assert r1["insertion_points"] == 3 and r1["distinct"] == 8
    r2 = h_lower_bound_family(2, 2)
    assert r2["distinct"] == 32 and r2["all_distinct"]
    assert r2["germ_readout"] and r2["length_bound"]


def test_signature_separates_small_ball():
    assert h_ball(1) == [1, 9]
    s = h_ball(3)
    assert s == h_ball(3, threads=3)
    # appending a trivial word leaves the signature unchanged
    rng = random.Random(0)
    for _ in range(200):
        w = "".join(rng.choice("aAbBcCdD") for _ in range(rng.randint(0, 6)))
        v = w + "bcBC"
        assert h_signature(w).key() == h_signature(v).key()
