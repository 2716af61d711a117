from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from galmckay.charkit import FiniteGroup, dixon_table
from galmckay.chevnorm import ExtWeylElt, build_N
from galmckay.cyclo import Cyclotomic, HEllElt, h_ell_subgroup
from galmckay.extmap import ExtensionMap, element_c_check
from galmckay.relweyl import TorusChar, TorusCharacters
from galmckay.rootsys import build


def ext(label, q, twisted=False):
    return ExtensionMap(build(label), q, twisted)


def v_delta_group(E, delta):
    V = E.V
    stab = E.stabilizer_H(delta)
    els = [ExtWeylElt(mask, w) for w in sorted(stab) for mask in range(V.hsize)]
    els.sort(key=lambda e: (e.w != 0 or e.mask != 0, e.w, e.mask))
    pos = {e: k for k, e in enumerate(els)}
    tab = [[pos[V.mul(a, b)] for b in els] for a in els]
    return FiniteGroup(tab), els


def test_trivial_delta_gives_trivial_character():
    E = ext("C2", 3)
    data = E.lambda0_prime(0)
    assert all(x == 0 for x in data.values.values())
    assert len(data.values) == E.V.order


def test_a1_tie_break_picks_zeta4():
    E = ext("A1", 3)
    data = E.lambda0_prime(1)
    assert data.r_delta == []
    assert data.values[ExtWeylElt(0, 1)] == Fraction(1, 4)
    assert data.values[ExtWeylElt(1, 0)] == Fraction(1, 2)


def test_c2_delta_trivial_on_long_h():
    # delta = -1 on h_{alpha_1}(-1) (short), +1 on h_{alpha_2}(-1) (long)
    E = ext("C2", 3)
    data = E.lambda0_prime(1)
    long_simple = 1
    assert long_simple in data.r_delta
    assert data.values[ExtWeylElt(0, E.W.gens[long_simple])] == 0


@pytest.mark.parametrize("label,q", [("C2", 3), ("G2", 5), ("B3", 3), ("A2", 5)])
def test_step1_against_all_linear_characters(label, q):
    E = ext(label, q)
    V = E.V
    for rep in {E.delta_orbit(d)[0] for d in range(V.hsize)}:
        data = E.lambda0_prime(rep)
        G, els = v_delta_group(E, rep)
        lin = [chi for chi in dixon_table(G).irreducibles if chi.degree == Cyclotomic.rational(1)]
        n_roots = [V.n_root(k) for k in data.r_delta]
        admissible = []
        for chi in lin:
            on_h = all(
                chi(els.index(ExtWeylElt(h, 0))) == Cyclotomic.rational((-1) ** bin(rep & h).count("1"))
                for h in range(V.hsize)
            )
            on_n = all(chi(els.index(n)) == Cyclotomic.rational(1) for n in n_roots)
            if on_h and on_n:
                admissible.append(tuple(chi(k) for k in range(len(els))))
        assert admissible
        chosen = tuple(Cyclotomic.root(x.denominator, x.numerator) for x in (data.values[e] for e in els))
        assert chosen in admissible


@pytest.mark.parametrize("label,q,twisted", [("G2", 5, False), ("C2", 3, False), ("B3", 3, False),
                                             ("C2", 3, True), ("B4", 3, False)])
def test_step2(label, q, twisted):
    res = ext(label, q, twisted).check_step2()
    assert res["equivariance_failures"] == []
    assert res["mu_failures"] == []


@pytest.mark.parametrize("label,q,twisted", [("G2", 5, False), ("C2", 5, False), ("B3", 3, False),
                                             ("C2", 3, True), ("G2", 3, True)])
def test_lift_all_orbits(label, q, twisted):
    E = ext(label, q, twisted)
    for lam in E.chars.orbit_reps:
        assert E.check_lift(lam) == []


def test_lift_trivial():
    E = ext("G2", 5)
    lam = TorusChar((0, 0), 4)
    assert set(E.lift_to_N(lam).values()) == {0}


def _N_lambda_elements(N, chars, lam):
    stab = chars.stabilizer(lam)
    t, w = N.all_elements()
    keep = np.isin(w, stab)
    return t[keep], w[keep]


@pytest.mark.parametrize("label,q", [("G2", 5), ("B3", 3), ("C2", 5)])
def test_lift_is_homomorphism_via_normalizer(label, q):
    E = ext(label, q)
    N = build_N(build(label), q)
    rng = np.random.default_rng(3)
    for lam in E.chars.orbit_reps:
        t, w = _N_lambda_elements(N, E.chars, lam)
        i, j = rng.integers(0, len(w), (2, 40))
        pt, pw = N.mul_arrays(t[i], w[i], t[j], w[j])
        for k in range(40):
            lhs = E.value(lam, pt[k], int(pw[k]))
            rhs = (E.value(lam, t[i[k]], int(w[i[k]])) + E.value(lam, t[j[k]], int(w[j[k]]))) % 1
            assert lhs == rhs
        # restriction to T is lambda
        for k in range(len(w)):
            if w[k] == 0:
                assert E.value(lam, t[k], 0) == E.lam_exponent(lam, t[k])


def test_g2_order_four_product_formula():
    E = ext("G2", 5)
    N = build_N(build("G2"), 5)
    lam = next(l for l in E.chars.orbit_reps if l.order() == 4 and len(E.chars.stabilizer(l)) > 1)
    t, w = _N_lambda_elements(N, E.chars, lam)
    for k in range(len(w)):
        x = E.lam_exponent(lam, t[k]) + E.lambda0(lam.restrict_H(), ExtWeylElt(0, int(w[k])))
        assert E.value(lam, t[k], int(w[k])) == x % 1


@pytest.mark.parametrize("label,q", [("G2", 5), ("C2", 3)])
def test_equivariance_full_transversal(label, q):
    E = ext(label, q)
    N = build_N(build(label), q)
    for lam in E.chars.orbit_reps:
        for wn in range(len(E.W)):
            lam_n = E.chars.act(int(E.W.inverse[wn]), lam)  # lambda^n for n = wn'
            t, w = _N_lambda_elements(N, E.chars, lam_n)
            nt, nw = np.zeros((len(w), N.rank), dtype=np.int64), np.full(len(w), wn)
            it, iw = N.inv_arrays(nt[:1], nw[:1])
            ct, cw = N.mul_arrays(nt, nw, t, w)
            ct, cw = N.mul_arrays(ct, cw, np.repeat(it, len(w), 0), np.full(len(w), iw[0]))
            for k in range(len(w)):
                assert E.value(lam_n, t[k], int(w[k])) == E.value(lam, ct[k], int(cw[k]))


def test_delta_identity_trivial():
    E = ext("C2", 5)
    one = HEllElt.from_unit(E.exp_level, 1, 2)
    for lam in E.chars.orbit_reps:
        assert set(E.delta_sigma(lam, one).values()) <= {0}


@pytest.mark.parametrize("label,q", [("B3", 5), ("B3", 13), ("B4", 5), ("B3", 3)])
def test_delta_trivial_for_type_b_involutions(label, q):
    E = ext(label, q)
    for lam in E.chars.orbit_reps:
        if lam.order() > 2:
            continue
        for u in h_ell_subgroup(2, E.exp_level):
            sigma = HEllElt.from_unit(E.exp_level, u, 2)
            assert set(E.delta_sigma(lam, sigma).values()) <= {0}


@pytest.mark.parametrize("label,q,ell,twisted", [("G2", 5, 2, False), ("C2", 3, 2, True), ("B3", 5, 2, False),
                                                 ("C2", 5, 2, False), ("G2", 7, 3, False)])
def test_delta_properties(label, q, ell, twisted):
    E = ext(label, q, twisted)
    for lam in E.chars.orbit_reps:
        for u in h_ell_subgroup(ell, E.exp_level)[:16]:
            sigma = HEllElt.from_unit(E.exp_level, u, ell)
            assert E.check_delta_sigma(lam, sigma) == []


@pytest.mark.parametrize("q", [3, 5, 7])
def test_element_c_rank4(q):
    res = element_c_check(4, q)
    assert res["ok"]
    assert res["factors"] == [(-1) ** ((q - 1) // 2)] * 2
    assert res["Lambda_c"] in (1, -1)
    assert res["lambda_c_squared"] == 1


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_element_c_rank8(q):
    res = element_c_check(8, q)
    assert res["ok"] and res["formula"] == 1 and len(res["factors"]) == 4


def test_element_c_rejects():
    with pytest.raises(ValueError):
        element_c_check(6, 3)
    with pytest.raises(ValueError):
        element_c_check(4, 4)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([("C2", 5), ("G2", 7), ("B3", 5)]), st.data())
def test_delta_is_linear_random(case, data):
    label, q = case
    E = ext(label, q)
    lam = data.draw(st.sampled_from(E.chars.orbit_reps))
    u = data.draw(st.sampled_from(h_ell_subgroup(2, E.exp_level)))
    sigma = HEllElt.from_unit(E.exp_level, u, 2)
    dlt = E.delta_sigma(lam, sigma)
    stab = list(dlt)
    a, b = data.draw(st.sampled_from(stab)), data.draw(st.sampled_from(stab))
    assert (dlt[a] + dlt[b] - dlt[int(E.W.table[a, b])]) % 1 == 0
