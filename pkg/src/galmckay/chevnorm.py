"""The extended Weyl group V, the torus T (split) or T1 (twisted by w0 = -1), and N = TV.

Torus elements are exponent vectors in simple-coroot coordinates: the vector
``a`` stands for prod_i h_{alpha_i}(zeta^{a_i}) with zeta a generator of the
cyclic group of order m = q - 1 (split) or m = q + 1 (twisted).  Elements of V
are pairs (mask, w): an element of H = <h_alpha(-1)> in the same coordinates
mod 2, times the canonical lift of w along its canonical reduced word.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

from .rootsys import RootSystem, longest_is_central

N_BOUND = 10**6


@dataclass(frozen=True)
class HElt:
    mask: int

    def bits(self, rank: int) -> tuple:
        return tuple((self.mask >> i) & 1 for i in range(rank))


@dataclass(frozen=True)
class ExtWeylElt:
    mask: int
    w: int


@dataclass(frozen=True)
class TorusElt:
    exps: tuple


@dataclass(frozen=True)
class NormalizerElt:
    t: tuple
    w: int


def _bits_to_mask(bits) -> int:
    return sum((int(b) & 1) << i for i, b in enumerate(bits))


class ExtendedWeylGroup:
    """V = <n_alpha(-1)> as an extension of W by H, with cocycle multiplication."""

    def __init__(self, rs: RootSystem, q_odd: bool = True):
        self.rs = rs
        self.W = rs.weyl
        self.rank = rs.rank
        self.q_odd = q_odd
        self.hsize = 2**self.rank if q_odd else 1

    @cached_property
    def root_masks(self) -> list:
        """Mask of h_beta(-1) for every root beta: coroot coordinates mod 2."""
        return [_bits_to_mask(self.rs.coroot_coords(k)) for k in range(len(self.rs.roots))]

    @cached_property
    def hact(self) -> np.ndarray:
        """hact[w, mask]: the image w(h) in H."""
        mats = self.W.coroot_matrices % 2
        out = np.zeros((len(self.W), self.hsize), dtype=np.int64)
        if not self.q_odd:
            return out
        for w in range(len(self.W)):
            cols = [_bits_to_mask(mats[w][:, i]) for i in range(self.rank)]
            for mask in range(self.hsize):
                v = 0
                for i in range(self.rank):
                    if (mask >> i) & 1:
                        v ^= cols[i]
                out[w, mask] = v
        return out

    @cached_property
    def simple_cocycle(self) -> np.ndarray:
        """cs[w, i] with w' n_i = cs[w, i] (w s_i)' in canonical lifts."""
        W, npos = self.W, self.rs.npos
        out = np.zeros((len(W), self.rank), dtype=np.int64)
        if not self.q_odd:
            return out
        for w in range(len(W)):
            perm = W[w].perm
            for i in range(self.rank):
                if perm[i] >= npos:
                    # length drops: w' = (w s_i)' n_i, and n_i^2 = h_i(-1)
                    ws = W.mul(w, W.gens[i])
                    out[w, i] = self.root_masks[W[ws].perm[i]]
        return out

    @cached_property
    def cocycle(self) -> np.ndarray:
        """c[a, b] with a' b' = c[a, b] (ab)'."""
        W = self.W
        n = len(W)
        tab = W.table
        cs = self.simple_cocycle
        c = np.zeros((n, n), dtype=np.int64)
        if not self.q_odd:
            return c
        for b in range(1, n):
            word = W[b].word
            parent = W.lookup[_prefix_perm(W, word)]
            i = word[-1]
            # a' (parent' n_i) = c[a, parent] (a parent)' n_i
            c[:, b] = c[:, parent] ^ cs[tab[:, parent], i]
        return c

    @property
    def order(self) -> int:
        return self.hsize * len(self.W)

    def identity(self) -> ExtWeylElt:
        return ExtWeylElt(0, 0)

    def n_simple(self, i: int) -> ExtWeylElt:
        return ExtWeylElt(0, self.W.gens[i])

    def h_root(self, k: int) -> ExtWeylElt:
        """h_beta(-1) for the root with index k."""
        return ExtWeylElt(self.root_masks[k] if self.q_odd else 0, 0)

    def lift(self, w: int) -> ExtWeylElt:
        return ExtWeylElt(0, w)

    def mul(self, a: ExtWeylElt, b: ExtWeylElt) -> ExtWeylElt:
        W = self.W
        mask = a.mask ^ int(self.hact[a.w, b.mask]) ^ int(self.cocycle[a.w, b.w])
        return ExtWeylElt(mask, int(W.table[a.w, b.w]))

    def inv(self, a: ExtWeylElt) -> ExtWeylElt:
        wi = int(self.W.inverse[a.w])
        m = a.mask ^ int(self.cocycle[a.w, wi])
        return ExtWeylElt(int(self.hact[wi, m]), wi)

    def power(self, a: ExtWeylElt, e: int) -> ExtWeylElt:
        r = self.identity()
        for _ in range(e):
            r = self.mul(r, a)
        return r

    def word_product(self, word) -> ExtWeylElt:
        r = self.identity()
        for i in word:
            r = self.mul(r, self.n_simple(i))
        return r

    def n_root(self, k: int) -> ExtWeylElt:
        """A lift of s_beta: x' n_i x'^{-1} where beta = x(alpha_i).

        It agrees with n_beta(-1) up to a factor h_beta(-1).
        """
        rs, W = self.rs, self.W
        if k >= rs.npos:
            k = rs.neg(k)
        for x in range(len(W)):
            perm = W[x].perm
            for i in range(self.rank):
                if perm[i] == k:
                    xd = self.lift(x)
                    return self.mul(self.mul(xd, self.n_simple(i)), self.inv(xd))
        raise ValueError("root not in any W-orbit of simple roots")

    def elements(self):
        for w in range(len(self.W)):
            for mask in range(self.hsize):
                yield ExtWeylElt(mask, w)

    def index(self, a: ExtWeylElt) -> int:
        return a.w * self.hsize + a.mask


def _prefix_perm(W, word):
    p = W[0].perm
    gens = W.rs.simple_perms
    for i in word[:-1]:
        p = tuple(p[j] for j in gens[i])
    return p


def v_mult(V: ExtendedWeylGroup, a: ExtWeylElt, b: ExtWeylElt) -> ExtWeylElt:
    return V.mul(a, b)


class Torus:
    """T = (Z/m)^rank in simple-coroot coordinates, with the W-action and H inside."""

    def __init__(self, rs: RootSystem, q: int, twisted: bool = False):
        if twisted and not longest_is_central(rs):
            raise ValueError(f"twisted torus needs w0 = -1; {rs.label} is out of scope")
        self.rs, self.q, self.twisted = rs, q, twisted
        self.rank = rs.rank
        self.m = q + 1 if twisted else q - 1
        self.invariant_factors = self._smith()
        self.order = self.m**self.rank

    def _smith(self) -> tuple:
        r = self.rank
        if self.twisted:
            # vF acts on the cocharacter lattice as q * w0 = -q
            mat = Matrix(-self.q * np.eye(r, dtype=int)) - Matrix.eye(r)
        else:
            mat = Matrix((self.q - 1) * np.eye(r, dtype=int))
        diag = smith_normal_form(mat)
        facs = tuple(sorted(abs(int(diag[i, i])) for i in range(r)))
        if any(f != self.m for f in facs):
            raise ValueError(f"unexpected invariant factors {facs}")
        return facs

    @property
    def h_step(self) -> int:
        return self.m // 2 if self.m % 2 == 0 else 0

    def embed_H(self, mask: int) -> tuple:
        s = self.h_step
        return tuple(((mask >> i) & 1) * s for i in range(self.rank))

    def act(self, w: int, t) -> tuple:
        M = self.rs.weyl.coroot_matrices[w]
        return tuple(int(x) for x in (M @ np.asarray(t, dtype=np.int64)) % self.m)

    def elements(self) -> np.ndarray:
        m, r = self.m, self.rank
        idx = np.arange(m**r)
        return np.stack([(idx // m**i) % m for i in range(r)], axis=1)

    def index_of(self, t) -> np.ndarray:
        t = np.asarray(t) % self.m
        return sum(t[..., i] * self.m**i for i in range(self.rank))

    def root_value(self, root: int, t) -> int:
        """Exponent e with beta(t) = zeta^e, for beta the root with index root."""
        b = self.rs.roots[root]
        return int(sum(t[i] * self.rs.pair_simple(b, i) for i in range(self.rank))) % self.m


def build_torus(rs: RootSystem, q: int, twisted: bool = False) -> Torus:
    return Torus(rs, q, twisted)


def embed_H_in_T(T: Torus, h) -> TorusElt:
    mask = h.mask if isinstance(h, (HElt, ExtWeylElt)) else int(h)
    return TorusElt(T.embed_H(mask))


def v_act_on_torus(T: Torus, v: ExtWeylElt, t) -> TorusElt:
    exps = t.exps if isinstance(t, TorusElt) else t
    return TorusElt(T.act(v.w, exps))


class Normalizer:
    """N = T V (or T1 V), elements (t, w) meaning t * w' with w' the canonical lift."""

    def __init__(self, rs: RootSystem, q: int, twisted: bool = False):
        self.rs, self.q, self.twisted = rs, q, twisted
        self.T = Torus(rs, q, twisted)
        self.V = ExtendedWeylGroup(rs, q_odd=q % 2 == 1)
        self.W = rs.weyl
        self.m = self.T.m
        self.rank = rs.rank
        self.order = self.T.order * len(self.W)

    # vectorised arithmetic on arrays t (k, rank), w (k,)
    @cached_property
    def _cocycle_exps(self) -> np.ndarray:
        hs = self.T.h_step
        masks = np.arange(self.V.hsize)
        return np.stack([((masks >> i) & 1) * hs for i in range(self.rank)], axis=1)

    def mul_arrays(self, t1, w1, t2, w2):
        M = self.W.coroot_matrices[w1]
        c = self.V.cocycle[w1, w2]
        t = t1 + np.einsum("nij,nj->ni", M, t2) + self._cocycle_exps[c]
        return t % self.m, self.W.table[w1, w2]

    def inv_arrays(self, t, w):
        wi = self.W.inverse[w]
        c = self.V.cocycle[w, wi]
        # (t w')^{-1} = w'^{-1} t^{-1}, and w'^{-1} = w^{-1}(c) (w^{-1})'
        Mi = self.W.coroot_matrices[wi]
        s = np.einsum("nij,nj->ni", Mi, -t + self._cocycle_exps[c])
        return s % self.m, wi

    def mul(self, a: NormalizerElt, b: NormalizerElt) -> NormalizerElt:
        t, w = self.mul_arrays(np.array([a.t]), np.array([a.w]), np.array([b.t]), np.array([b.w]))
        return NormalizerElt(tuple(int(x) for x in t[0]), int(w[0]))

    def inv(self, a: NormalizerElt) -> NormalizerElt:
        t, w = self.inv_arrays(np.array([a.t]), np.array([a.w]))
        return NormalizerElt(tuple(int(x) for x in t[0]), int(w[0]))

    def identity(self) -> NormalizerElt:
        return NormalizerElt((0,) * self.rank, 0)

    def from_V(self, v: ExtWeylElt) -> NormalizerElt:
        return NormalizerElt(self.T.embed_H(v.mask), v.w)

    def from_T(self, t) -> NormalizerElt:
        return NormalizerElt(tuple(int(x) % self.m for x in t), 0)

    def all_elements(self):
        tt = self.T.elements()
        nT = len(tt)
        w = np.repeat(np.arange(len(self.W)), nT)
        t = np.tile(tt, (len(self.W), 1))
        return t, w

    def index_arrays(self, t, w):
        return w * self.T.order + self.T.index_of(t)

    def generators(self) -> list:
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            gens.append(self.from_T(e))
        for i in range(self.rank):
            gens.append(NormalizerElt((0,) * self.rank, self.W.gens[i]))
        return gens

    @cached_property
    def classes(self):
        """Conjugacy classes: (labels per element index, representatives, sizes), canonically ordered."""
        if self.order > N_BOUND:
            raise ValueError(f"|N| = {self.order} exceeds the enumeration bound")
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        t, w = self.all_elements()
        src = self.index_arrays(t, w)
        rows, cols = [], []
        for g in self.generators():
            n = len(w)
            gt = np.tile(np.array(g.t), (n, 1))
            gw = np.full(n, g.w)
            it, iw = self.inv_arrays(gt[:1], gw[:1])
            x_t, x_w = self.mul_arrays(gt, gw, t, w)
            y_t, y_w = self.mul_arrays(x_t, x_w, np.tile(it, (n, 1)), np.full(n, iw[0]))
            rows.append(src)
            cols.append(self.index_arrays(y_t, y_w))
        rows, cols = np.concatenate(rows), np.concatenate(cols)
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(self.order, self.order))
        ncomp, labels = connected_components(graph, directed=True, connection="weak")
        sizes = np.bincount(labels, minlength=ncomp)
        reps = np.full(ncomp, self.order)
        np.minimum.at(reps, labels, src)
        order = sorted(range(ncomp), key=lambda c: (sizes[c], reps[c]))
        relabel = np.empty(ncomp, dtype=np.int64)
        relabel[order] = np.arange(ncomp)
        # src enumerates 0..|N|-1 in order, so labels are indexed by element index
        return ClassData(relabel[labels], reps[order], sizes[order], self)

    def element_at(self, idx: int) -> NormalizerElt:
        w, ti = divmod(int(idx), self.T.order)
        t = tuple((ti // self.m**i) % self.m for i in range(self.rank))
        return NormalizerElt(t, w)


@dataclass
class ClassData:
    labels: np.ndarray  # class label of each element index
    reps: np.ndarray  # element index of each class representative
    sizes: np.ndarray
    group: Normalizer

    def __len__(self):
        return len(self.reps)

    def rep_arrays(self):
        T = self.group.T
        w, ti = np.divmod(self.reps, T.order)
        t = np.stack([(ti // T.m**i) % T.m for i in range(T.rank)], axis=1)
        return t, w


def build_N(rs: RootSystem, q: int, twisted: bool = False) -> Normalizer:
    N = Normalizer(rs, q, twisted)
    if N.order > N_BOUND:
        raise ValueError(f"|N| = {N.order} exceeds {N_BOUND}")
    return N


def center_chars(rs: RootSystem, q: int, twisted: bool = False) -> list:
    """Z(G)^F inside T: the torus elements killed by every simple root."""
    T = Torus(rs, q, twisted)
    elems = T.elements()
    cart = np.array([[rs.pair_simple(rs.roots[j], i) for i in range(rs.rank)] for j in range(rs.rank)])
    vals = (elems @ cart.T) % T.m
    keep = np.all(vals == 0, axis=1)
    return [TorusElt(tuple(int(x) for x in row)) for row in elems[keep]]
