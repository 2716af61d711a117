from collections import Counter
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from galmckay.chevnorm import (
    ExtendedWeylGroup,
    ExtWeylElt,
    HElt,
    NormalizerElt,
    build_N,
    build_torus,
    center_chars,
    embed_H_in_T,
    v_act_on_torus,
    v_mult,
)
from galmckay.rootsys import build


def V_of(label, q_odd=True):
    return ExtendedWeylGroup(build(label), q_odd=q_odd)


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2", "B3", "C3", "D4"])
def test_order(label):
    V = V_of(label)
    assert V.order == 2 ** V.rank * len(V.W)
    assert len(set(V.elements())) == V.order


def test_a1_is_cyclic_of_order_4():
    V = V_of("A1")
    n = V.n_simple(0)
    assert v_mult(V, n, n) == V.h_root(0) == ExtWeylElt(1, 0)
    assert V.power(n, 4) == V.identity()
    assert V.power(n, 2) != V.identity()


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "B3", "F4"])
def test_n_squared_is_h(label):
    V = V_of(label)
    for i in range(V.rank):
        assert V.mul(V.n_simple(i), V.n_simple(i)) == V.h_root(i)
    for k in range(V.rs.npos):
        n = V.n_root(k)
        assert V.mul(n, n) == V.h_root(k)


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2"])
def test_associative_exhaustive(label):
    V = V_of(label)
    els = list(V.elements())
    for a in els:
        for b in els:
            ab = V.mul(a, b)
            for c in els:
                assert V.mul(ab, c) == V.mul(a, V.mul(b, c))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(["B3", "C3", "B4", "D4", "F4"]), st.data())
def test_associative_random(label, data):
    V = V_of(label)
    draw = lambda: ExtWeylElt(data.draw(st.integers(0, V.hsize - 1)), data.draw(st.integers(0, len(V.W) - 1)))
    a, b, c = draw(), draw(), draw()
    assert V.mul(V.mul(a, b), c) == V.mul(a, V.mul(b, c))
    assert V.mul(a, V.inv(a)) == V.identity()


def _reduced_words(W, w):
    """Every reduced word of w, by peeling simple reflections off the right."""
    if w == W.identity:
        return [()]
    out = []
    for i, g in enumerate(W.gens):
        x = W.mul(w, g)
        if W.lengths[x] < W.lengths[w]:
            out += [word + (i,) for word in _reduced_words(W, x)]
    return out


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "A1"])
def test_braid_independence(label):
    V = V_of(label)
    for w in range(len(V.W)):
        words = _reduced_words(V.W, w)
        assert {V.word_product(word) for word in words} == {V.lift(w)}


def test_braid_independence_b3_longest():
    V = V_of("B3")
    w0 = V.W.longest
    words = _reduced_words(V.W, w0)
    assert len(words) > 1
    assert {V.word_product(word) for word in words[:200]} == {V.lift(w0)}


def _matrix_group(gens):
    gens = [np.array(g, dtype=np.int64) for g in gens]
    seen = {np.eye(len(gens[0]), dtype=np.int64).tobytes(): np.eye(len(gens[0]), dtype=np.int64)}
    todo = list(seen.values())
    while todo:
        x = todo.pop()
        for g in gens:
            y = x @ g
            if y.tobytes() not in seen:
                seen[y.tobytes()] = y
                todo.append(y)
    return list(seen.values())


def _matrix_order_profile(els):
    n = len(els[0])
    eye = np.eye(n, dtype=np.int64)
    out = Counter()
    for x in els:
        k, y = 1, x
        while not np.array_equal(y, eye):
            y = y @ x
            k += 1
        out[k] += 1
    return out


def _v_order_profile(V):
    out = Counter()
    for a in V.elements():
        k, y = 1, a
        while y != V.identity():
            y = V.mul(y, a)
            k += 1
        out[k] += 1
    return out


def _sl_n(i, n):
    m = np.eye(n, dtype=np.int64)
    m[i, i] = m[i + 1, i + 1] = 0
    m[i, i + 1], m[i + 1, i] = 1, -1
    return m


@pytest.mark.parametrize("label,n", [("A1", 2), ("A2", 3), ("A3", 4)])
def test_matches_sl_monomial_model(label, n):
    mats = _matrix_group([_sl_n(i, n) for i in range(n - 1)])
    V = V_of(label)
    assert len(mats) == V.order
    assert _matrix_order_profile(mats) == _v_order_profile(V)


def test_matches_sp4_model():
    # basis e1, e2, f2, f1; alpha_1 = e1 - e2 short, alpha_2 = 2 e2 long
    n1 = np.zeros((4, 4), dtype=np.int64)
    n1[0, 1], n1[1, 0], n1[2, 3], n1[3, 2] = 1, -1, 1, -1
    n2 = np.eye(4, dtype=np.int64)
    n2[1, 1] = n2[2, 2] = 0
    n2[1, 2], n2[2, 1] = 1, -1
    mats = _matrix_group([n1, n2])
    V = V_of("C2")
    assert len(mats) == V.order == 32
    assert _matrix_order_profile(mats) == _v_order_profile(V)


def test_longest_square_is_minus_one():
    # in Sp4 the lift of w0 squares to -1, the nontrivial central element
    rs = build("C2")
    V = ExtendedWeylGroup(rs)
    w0 = V.lift(V.W.longest)
    sq = V.mul(w0, w0)
    assert sq.w == V.W.identity and sq.mask != 0
    T = build_torus(rs, 5)
    center = {z.exps for z in center_chars(rs, 5)}
    assert embed_H_in_T(T, sq).exps in center - {(0, 0)}


def test_q_even_degenerates():
    V = V_of("B2", q_odd=False)
    assert V.order == 8
    assert V.mul(V.n_simple(0), V.n_simple(0)) == V.identity()


@pytest.mark.parametrize("label,q,twisted,facs", [
    ("C2", 5, False, (4, 4)),
    ("B3", 3, False, (2, 2, 2)),
    ("C2", 3, True, (4, 4)),
    ("A1", 3, True, (4,)),
    ("G2", 7, True, (8, 8)),
])
def test_build_torus(label, q, twisted, facs):
    T = build_torus(build(label), q, twisted)
    assert T.invariant_factors == facs
    assert T.order == int(np.prod(facs))


def test_twisted_needs_central_w0():
    with pytest.raises(ValueError):
        build_torus(build("A2"), 5, True)


@pytest.mark.parametrize("label,q,twisted,order", [
    ("C2", 3, False, 32), ("G2", 5, False, 192), ("C2", 3, True, 128), ("B3", 3, False, 384),
])
def test_build_N_order(label, q, twisted, order):
    N = build_N(build(label), q, twisted)
    assert N.order == order
    assert sum(N.classes.sizes) == order


def test_build_N_bound():
    with pytest.raises(ValueError):
        build_N(build("F4"), 13)


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13])
@pytest.mark.parametrize("label", ["A1", "C2", "B3", "G2"])
def test_H_in_T(label, q):
    rs = build(label)
    T = build_torus(rs, q)
    V = ExtendedWeylGroup(rs)
    images = {embed_H_in_T(T, HElt(m)).exps for m in range(V.hsize)}
    assert len(images) == 2 ** rs.rank
    for t in images:
        assert all((2 * x) % T.m == 0 for x in t)
    # h_alpha(-1) sits at (q - 1) / 2 in coordinate alpha
    for i in range(rs.rank):
        assert embed_H_in_T(T, HElt(1 << i)).exps == tuple((q - 1) // 2 if j == i else 0 for j in range(rs.rank))


@pytest.mark.parametrize("q", [2, 4])
def test_H_trivial_for_even_q(q):
    V = ExtendedWeylGroup(build("C2"), q_odd=q % 2 == 1)
    assert V.hsize == 1


@pytest.mark.parametrize("label,q", [("C2", 3), ("G2", 5), ("B3", 3)])
def test_V_embeds_homomorphically(label, q):
    N = build_N(build(label), q)
    V = N.V
    els = list(V.elements())
    rng = np.random.default_rng(0)
    for _ in range(300):
        a, b = (els[i] for i in rng.integers(0, len(els), 2))
        assert N.mul(N.from_V(a), N.from_V(b)) == N.from_V(V.mul(a, b))


@pytest.mark.parametrize("label,q", [("C2", 3), ("G2", 5), ("C2", 5)])
def test_T_cap_V_is_H(label, q):
    N = build_N(build(label), q)
    in_T = {N.from_V(v).t for v in N.V.elements() if v.w == 0}
    assert len(in_T) == 2 ** N.rank
    # N/T = W: the projection to w is multiplicative
    t, w = N.all_elements()
    rng = np.random.default_rng(1)
    i, j = rng.integers(0, N.order, (2, 200))
    _, ww = N.mul_arrays(t[i], w[i], t[j], w[j])
    assert np.array_equal(ww, N.W.table[w[i], w[j]])


def test_reflection_inverts_coroot():
    rs = build("A1")
    T = build_torus(rs, 7)
    V = ExtendedWeylGroup(rs)
    for s in range(6):
        assert v_act_on_torus(T, V.n_simple(0), (s,)).exps == ((-s) % 6,)
    assert v_act_on_torus(T, V.identity(), (3,)).exps == (3,)


def test_orthogonal_factors_act_independently():
    rs = build("D4")
    T = build_torus(rs, 5)
    V = ExtendedWeylGroup(rs)
    t = (1, 0, 0, 0)
    img = v_act_on_torus(T, V.n_simple(2), t).exps
    assert img == t


@pytest.mark.parametrize("label,q,size", [
    ("G2", 5, 1), ("G2", 7, 1), ("C2", 3, 2), ("C2", 5, 2), ("B3", 3, 2), ("B3", 5, 2), ("A1", 5, 2),
    ("C3", 3, 2), ("D4", 3, 4), ("A2", 7, 3), ("A2", 5, 1),
])
def test_center(label, q, size):
    assert len(center_chars(build(label), q)) == size


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([("C2", 5), ("G2", 7), ("B3", 3), ("C3", 3)]), st.booleans(), st.data())
def test_normalizer_group_laws(case, twisted, data):
    label, q = case
    N = build_N(build(label), q, twisted and q % 4 == 3)
    draw = lambda: NormalizerElt(
        tuple(data.draw(st.integers(0, N.m - 1)) for _ in range(N.rank)),
        data.draw(st.integers(0, len(N.W) - 1)),
    )
    a, b, c = draw(), draw(), draw()
    assert N.mul(N.mul(a, b), c) == N.mul(a, N.mul(b, c))
    assert N.mul(a, N.inv(a)) == N.identity()
    assert N.mul(N.inv(a), a) == N.identity()
