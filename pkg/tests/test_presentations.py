import pytest

from ggl.presentations import (ExpansionTooLarge, LPresentation, expand, grig_level_oracle,
                               grig_lpres, grig_oracle, k1_lpres, k1_oracle, verify,
                               wreath_lpres, z2_lpres)

from oracles import is_trivial_level, lamp_configuration


def k1_brute(word):
    """Trivial in Z2 wr G iff the G-part acts trivially and every lamp is even."""
    g = "".join(x for x in word if x != "s")
    lamps = lamp_configuration(word)
    return is_trivial_level(g, 10) and all(v % 2 == 0 for v in lamps.values())


def test_grig_relators_trivial():
    rels = expand(grig_lpres(), 6)
    assert verify(rels, grig_oracle)["ok"]


def test_grig_relators_oracle_agnostic():
    rels = expand(grig_lpres(), 4)
    assert verify(rels, grig_level_oracle)["ok"]
    assert all(is_trivial_level(r, 10) for r in rels if len(r) < 400)


def test_k1_relators_trivial():
    rels = expand(k1_lpres(), 4)
    assert verify(rels, k1_oracle)["ok"]
    short = expand(k1_lpres(), 2)
    assert all(k1_brute(r) for r in short)


def test_generic_wreath_presentation():
    p = wreath_lpres(z2_lpres())
    rels = expand(p, 3)
    assert verify(rels, k1_oracle)["ok"]
    assert len(p.endomorphisms) == 1


def test_sanity_words_are_nontrivial():
    assert not verify(["ab"], grig_oracle)["ok"]
    assert not verify(["sasa"], k1_oracle)["ok"]
    assert not k1_brute("sasa")
    assert verify(["ab"], grig_oracle)["nontrivial"] == ["ab"]


@pytest.mark.parametrize("make", [grig_lpres, k1_lpres])
def test_expansion_closed_under_endomorphisms(make):
    p = make()
    for d in range(3):
        inner = expand(p, d, dedup=False)[len(p.fixed):]
        outer = set(expand(p, d + 1))
        for phi in p.endomorphisms:
            for r in inner:
                assert p.apply(phi, r) in outer


def test_expand_counts_and_caps():
    p = grig_lpres()
    assert len(expand(p, 0, dedup=False)) == 4
    assert len(expand(p, 2, dedup=False)) == 12
    with pytest.raises(ExpansionTooLarge):
        expand(p, 30, cap=100)
    with pytest.raises(ExpansionTooLarge):
        expand(p, 30)  # total length explodes before the relator count does
    with pytest.raises(ValueError):
        expand(p, -1)


def test_k1_shape():
    p = k1_lpres()
    assert len(p.iterated) == 8 and len(p.fixed) == 6
    assert p.endomorphisms[0]["s"] == "s"
    assert p.to_json()["name"] == "k1"


def test_validation():
    with pytest.raises(ValueError):
        LPresentation(["x"], ["xy"], [], [])
    with pytest.raises(ValueError):
        LPresentation(["x", "y"], [], [{"x": "y"}], [])
    p = LPresentation(["x"], [], [{"x": "xx"}], ["xX"])
    assert p.inv("xX") == "xX" and p.apply(p.endomorphisms[0], "X") == "XX"
    with pytest.raises(ValueError):
        wreath_lpres(grig_lpres())
