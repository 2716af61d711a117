import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from galmckay.cyclo import HEllElt
from galmckay.hecke import (
    HeckeModel,
    LaurentPoly,
    UnsupportedComponent,
    build_H0,
    classify,
    eta_twist,
    gamma_ingredient,
    ind_w,
    verify_component_relations,
)
from galmckay.relweyl import TorusChar, TorusCharacters, enumerate_params
from galmckay.rootsys import build


def models(label, q, ell):
    rs = build(label)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ps = enumerate_params(rs, q, ell)
    return [(lam, HeckeModel(rs, rel, q, table=ps.chars.wlambda_table(rel))) for lam, rel in ps.rel.items()]


def trivial_model(label, q):
    rs = build(label)
    ch = TorusCharacters(rs, q)
    return HeckeModel(rs, ch.rel_weyl(TorusChar((0,) * rs.rank, q - 1)), q)


def test_laurent_arithmetic():
    u = LaurentPoly.var(0, 1)
    one = LaurentPoly.const(1, 1)
    p = (u - one) * (u + one)
    assert p == u * u - one
    assert p.evaluate([3]) == 8
    inv = LaurentPoly({(-1,): 1}, 1)
    assert (u * inv) == one
    assert (u - u).is_zero()


@pytest.mark.parametrize("kind,rank,m,count", [
    ("A", 1, 0, 2), ("A", 2, 0, 3), ("A", 3, 0, 5), ("B", 2, 0, 5), ("B", 3, 0, 10), ("I", 2, 6, 6),
])
def test_component_relations(kind, rank, m, count):
    assert verify_component_relations(kind, rank, m) == count


def test_classify():
    assert [(c.kind, c.rank) for c in classify(build("G2").cartan)] == [("I", 2)]
    assert [(c.kind, c.rank) for c in classify(build("B3").cartan)] == [("B", 3)]
    assert [(c.kind, c.rank) for c in classify([[2, 0], [0, 2]])] == [("A", 1), ("A", 1)]
    with pytest.raises(UnsupportedComponent):
        classify(build("D4").cartan)


@pytest.mark.parametrize("label,dim", [("A1", 2), ("B2", 8), ("A2", 6), ("G2", 12)])
def test_generic_algebra(label, dim):
    M = trivial_model(label, 5)
    H = build_H0(M.R, M.rel.Wlambda)
    assert len(H.R) == dim
    H.check_relations()
    assert H.specialize([1] * H.nvars).is_group_algebra()
    assert H.specialize([5] * H.nvars).trace_form_nondegenerate()
    assert not H.specialize([5] * H.nvars).is_group_algebra()


def test_b2_two_parameters():
    H = build_H0(trivial_model("B2", 5).R)
    assert H.nvars == 2  # short and long reflections are not conjugate


def test_a1_f_point():
    M = trivial_model("A1", 7)
    s = M.R.gens[0]
    assert sorted(v[s] for v in M.r_characters("f").values()) == [-1, 7]
    assert sorted(v[s] for v in M.r_characters("g").values()) == [-1, 1]


def test_b2_f_point():
    q = 5
    M = trivial_model("B2", q)
    chars = M.r_characters("f")
    assert len(chars) == 5
    s, t = M.R.gens
    linear = sorted((v[s], v[t]) for v in chars.values() if v[0] == 1)
    assert linear == sorted((a, b) for a in (q, -1) for b in (q, -1))
    (two,) = [v for v in chars.values() if v[0] == 2]
    assert two[s] == two[t] == q - 1


@pytest.mark.parametrize("label,q,ell", [("G2", 5, 2), ("C2", 5, 2), ("B3", 5, 2), ("B3", 13, 3), ("G2", 11, 5)])
def test_model_checks(label, q, ell):
    for lam, M in models(label, q, ell):
        M.match_dixon()
        assert M.check_r_dixon()
        assert M.check_schur()
        assert M.check_induction()
        for ch in M.characters:
            # the R(lambda)-part of every f-value is rational
            assert all(b == 0 for w, (_, b) in ch.f_values.items() if w in M.R.index)


def test_pairing_degrees():
    M = trivial_model("B2", 5)
    for lab, f in M.r_characters("f").items():
        assert f[0] == M.r_characters("g")[lab][0]


def test_sqrt_q_values_b3_13():
    # lambda of order 2 with R of type A2 and C(lambda) flipping the diagram
    (M,) = [M for lam, M in models("B3", 13, 3) if lam.exps == (0, 0, 6)]
    chars = M.match_dixon()
    surd = [c for c in chars if any(b for _, b in c.f_values.values())]
    assert len(surd) == 2
    a, b = surd
    assert {w: (x, -y) for w, (x, y) in a.f_values.items()} == b.f_values
    # every 3-element fixes sqrt(13) since 3 is a square mod 13; use 2-elements to move it
    moving = HEllElt.from_unit(52, 5, 2)
    fixing = HEllElt.from_unit(52, 3, 3)
    assert gamma_ingredient(1, 13, moving) == -1
    assert gamma_ingredient(1, 13, fixing) == 1
    assert eta_twist(M, a.dixon_index, moving).eta == b.dixon_index
    assert eta_twist(M, b.dixon_index, moving).eta == a.dixon_index
    assert eta_twist(M, a.dixon_index, fixing).eta == a.dixon_index


def test_clifford_pair_differs_by_sign():
    (M,) = [M for lam, M in models("B3", 13, 3) if lam.exps == (0, 0, 6)]
    chars = M.characters
    by_base = {}
    for ch in chars:
        by_base.setdefault(ch.label[0], []).append(ch)
    for pair in by_base.values():
        assert len(pair) == 2
        x, y = pair
        for w in M.rel.Wlambda:
            if w in M.R.index:
                assert x.g_values[w] == y.g_values[w]
            else:
                assert x.g_values[w] == -y.g_values[w]


def test_ind_w():
    assert ind_w((), 5) == 1
    assert ind_w((0, 1, 0), 5) == 125
    params = {0: 3, 1: 7}
    W = build("B2").weyl
    w0 = W.longest
    words = {(0, 1, 0, 1), (1, 0, 1, 0)}
    assert all(W.from_word(w) == w0 for w in words)
    assert {ind_w(w, params) for w in words} == {Fraction(3 * 7 * 3 * 7)}


@pytest.mark.parametrize("q,unit,ell,length,value", [
    (5, 3, 2, 1, -1),   # 3 is a nonresidue mod 5
    (5, 3, 2, 2, 1),
    (9, 5, 2, 1, 1),    # q a square
    (5, 1, 2, 3, 1),
    (13, 3, 3, 1, 1),   # 3 is a residue mod 13
    (11, 3, 2, 1, -1),  # 3 = 3 mod 4 conjugates i while fixing the Gauss sum
])
def test_gamma_ingredient(q, unit, ell, length, value):
    p = next(d for d in range(2, q + 1) if q % d == 0)
    sigma = HEllElt.from_unit(4 * p, unit, ell)
    assert gamma_ingredient(length, q, sigma) == value


def test_eta_twist_regimes():
    odd = eta_twist(None, 3, HEllElt.from_unit(20, 3, 2), degree=3, c_order=2)
    assert odd.eta == 3 and odd.status == "determinate"
    fixed = eta_twist(None, 1, HEllElt.from_unit(36, 5, 2), degree=2, q=9)
    assert fixed.status == "determinate" and fixed.eta == -2
    unknown = eta_twist(None, 1, HEllElt.from_unit(20, 3, 2), degree=2, q=5)
    assert unknown.status == "indeterminate"


def test_eta_twist_a1_component():
    for lam, M in models("C2", 5, 2):
        if [(c.kind, c.rank) for c in M.components] == [("A", 1)]:
            for ch in M.match_dixon():
                sigma = HEllElt.from_unit(20, 3, 2)
                assert eta_twist(M, ch.dixon_index, sigma).eta == ch.dixon_index


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(0, 6))
def test_equal_parameter_ind(q, length):
    assert ind_w(tuple([0] * length), q) == q**length
