"""Root systems, Weyl groups as permutation groups on roots, and structure-constant signs."""
from collections import deque
from fractions import Fraction
from functools import cached_property
import re

import numpy as np

SUPPORTED = ("A", "B", "C", "D", "G", "F")
WEYL_BOUND = 2000


def _unit(n, i, scale=1):
    v = [Fraction(0)] * n
    v[i] = Fraction(scale)
    return v


def _simple_vectors(kind: str, rank: int):
    """Euclidean simple roots: a_i = e_i - e_{i+1}, B ends with e_n, C with 2e_n."""
    if kind == "A":
        n = rank + 1
        return [[a - b for a, b in zip(_unit(n, i), _unit(n, i + 1))] for i in range(rank)]
    if kind in "BCD":
        n = rank
        simple = [[a - b for a, b in zip(_unit(n, i), _unit(n, i + 1))] for i in range(rank - 1)]
        if kind == "B":
            simple.append(_unit(n, n - 1))
        elif kind == "C":
            simple.append(_unit(n, n - 1, 2))
        else:
            simple.append([a + b for a, b in zip(_unit(n, n - 2), _unit(n, n - 1))])
        return simple
    if kind == "G":
        return [[Fraction(1), Fraction(-1), Fraction(0)], [Fraction(-2), Fraction(1), Fraction(1)]]
    if kind == "F":
        h = Fraction(1, 2)
        return [
            [Fraction(0), Fraction(1), Fraction(-1), Fraction(0)],
            [Fraction(0), Fraction(0), Fraction(1), Fraction(-1)],
            [Fraction(0), Fraction(0), Fraction(0), Fraction(1)],
            [h, -h, -h, -h],
        ]
    raise ValueError(kind)


def parse_label(label):
    if isinstance(label, tuple):
        kind, rank = label
    else:
        m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", str(label))
        if not m:
            raise ValueError(f"unsupported label {label!r}")
        kind, rank = m.group(1).upper(), int(m.group(2))
    ok = (
        (kind == "A" and 1 <= rank <= 8)
        or (kind in "BC" and 2 <= rank <= 8)
        or (kind == "D" and 3 <= rank <= 8)
        or (kind == "G" and rank == 2)
        or (kind == "F" and rank == 4)
    )
    if not ok:
        raise ValueError(f"unsupported label {kind}{rank}")
    return kind, rank


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


class RootSystem:
    """A crystallographic root system with roots stored in the simple-root basis.

    Positive roots come first, ordered by height and then by decreasing
    coordinates, so root i is the simple root alpha_i for i < rank;
    root ``k + npos`` is the negative of root ``k``.
    """

    def __init__(self, kind: str, rank: int):
        self.kind, self.rank = kind, rank
        self.label = f"{kind}{rank}"
        self.simple_vectors = _simple_vectors(kind, rank)
        self.gram = [[_dot(a, b) for b in self.simple_vectors] for a in self.simple_vectors]
        # cartan[i][j] = <alpha_i, alpha_j^vee>
        self.cartan = [
            [int(2 * self.gram[i][j] / self.gram[j][j]) for j in range(rank)] for i in range(rank)
        ]
        self._close_roots()

    def _close_roots(self):
        r = self.rank
        simple = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
        seen = set(simple)
        todo = deque(simple)
        while todo:
            b = todo.popleft()
            for i in range(r):
                c = self.pair_simple(b, i)
                nb = tuple(x - (c if j == i else 0) for j, x in enumerate(b))
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        pos = sorted((b for b in seen if sum(b) > 0), key=lambda b: (sum(b), tuple(-x for x in b)))
        self.positive = pos
        self.npos = len(pos)
        self.roots = pos + [tuple(-x for x in b) for b in pos]
        self.index = {b: k for k, b in enumerate(self.roots)}

    # inner products
    def inner(self, a, b) -> Fraction:
        a, b = self.coords(a), self.coords(b)
        return sum(a[i] * b[j] * self.gram[i][j] for i in range(self.rank) for j in range(self.rank) if a[i] and b[j])

    def norm2(self, a) -> Fraction:
        return self.inner(a, a)

    def pair_simple(self, b, i) -> int:
        """<b, alpha_i^vee> for b in the simple-root basis."""
        return int(sum(b[j] * self.cartan[j][i] for j in range(self.rank)))

    def pairing(self, b, a) -> int:
        """<b, a^vee>."""
        return int(2 * self.inner(b, a) / self.norm2(a))

    def coords(self, a):
        return self.roots[a] if isinstance(a, (int, np.integer)) else tuple(a)

    def neg(self, k: int) -> int:
        return k + self.npos if k < self.npos else k - self.npos

    def is_root(self, b) -> bool:
        return tuple(b) in self.index

    def height(self, a) -> int:
        return sum(self.coords(a))

    def vector(self, a):
        c = self.coords(a)
        n = len(self.simple_vectors[0])
        return [sum(c[i] * self.simple_vectors[i][t] for i in range(self.rank)) for t in range(n)]

    def coroot_coords(self, gamma):
        """Coefficients c_i with gamma^vee = sum c_i alpha_i^vee."""
        c = self.coords(gamma)
        if c not in self.index:
            raise ValueError(f"{c} is not a root")
        n2 = self.norm2(c)
        return tuple(int(c[i] * self.gram[i][i] / n2) for i in range(self.rank))

    def is_long(self, a) -> bool:
        return self.norm2(a) == max(self.gram[i][i] for i in range(self.rank))

    def reflect(self, b, a):
        """s_a(b) in the simple-root basis."""
        b, av = self.coords(b), self.coords(a)
        c = self.pairing(b, av)
        return tuple(x - c * y for x, y in zip(b, av))

    @cached_property
    def simple_perms(self):
        return [
            tuple(self.index[self.reflect(b, self.roots[i])] for b in self.roots) for i in range(self.rank)
        ]

    def reflection_perm(self, a) -> tuple:
        av = self.coords(a)
        cache = self.__dict__.setdefault("_refl_cache", {})
        if av not in cache:
            cache[av] = tuple(self.index[self.reflect(b, av)] for b in self.roots)
        return cache[av]

    @cached_property
    def weyl(self) -> "WeylGroup":
        return WeylGroup(self)

    # structure constants
    def structure_constant(self, a, b) -> int:
        a, b = self.coords(a), self.coords(b)
        s = tuple(x + y for x, y in zip(a, b))
        if a not in self.index or b not in self.index or s not in self.index:
            raise ValueError(f"{a} + {b} is not a root")
        return self._N(a, b)

    @cached_property
    def _extraspecial(self):
        """For each non-simple positive root, its extraspecial pair (alpha, beta)."""
        out = {}
        for xi in self.positive:
            if sum(xi) == 1:
                continue
            for a in self.positive:
                b = tuple(x - y for x, y in zip(xi, a))
                if b in self.index and sum(b) > 0 and self._order(a) < self._order(b):
                    out[xi] = (a, b)
                    break
        return out

    def _order(self, a):
        return self.index[a]

    def _p(self, a, b) -> int:
        """Largest p with b - p a a root."""
        p = 0
        while tuple(y - (p + 1) * x for x, y in zip(a, b)) in self.index:
            p += 1
        return p

    def _N(self, a, b) -> int:
        key = (a, b)
        cache = self.__dict__.setdefault("_ncache", {})
        if key in cache:
            return cache[key]
        cache[key] = val = self._compute_N(a, b)
        return val

    def _compute_N(self, a, b) -> int:
        ha, hb = sum(a), sum(b)
        neg = lambda v: tuple(-x for x in v)
        add = lambda u, v: tuple(x + y for x, y in zip(u, v))
        if ha > 0 and hb > 0:
            if self._order(a) > self._order(b):
                return -self._N(b, a)
            xi = add(a, b)
            a1, b1 = self._extraspecial[xi]
            if (a, b) == (a1, b1):
                return self._p(a, b) + 1
            total = Fraction(0)
            d = add(b, neg(a1))
            if d in self.index:
                total += Fraction(self._N(b, neg(a1)) * self._N(a, neg(b1)), self.norm2(d))
            d = add(a, neg(a1))
            if d in self.index:
                total += Fraction(self._N(neg(a1), a) * self._N(b, neg(b1)), self.norm2(d))
            val = self.norm2(xi) / self._N(a1, b1) * total
            return int(val)
        if ha < 0 and hb < 0:
            return -self._N(neg(a), neg(b))
        g = neg(add(a, b))
        # a + b + g = 0; rotate onto the same-sign pair
        if sum(g) * ha > 0:
            return int(self._N(g, a) * self.norm2(g) / self.norm2(b))
        return int(self._N(b, g) * self.norm2(g) / self.norm2(a))

    def structure_sign(self, a, b) -> int:
        return 1 if self.structure_constant(a, b) > 0 else -1

    def __repr__(self):
        return f"RootSystem({self.label})"


class WeylElt:
    __slots__ = ("perm", "word", "index")

    def __init__(self, perm, word, index):
        self.perm, self.word, self.index = perm, word, index

    @property
    def length(self) -> int:
        return len(self.word)

    def __repr__(self):
        return f"WeylElt({''.join(map(str, (i + 1 for i in self.word))) or 'e'})"


class WeylGroup:
    """All elements of W, indexed 0..|W|-1 in shortlex order of canonical words."""

    def __init__(self, rs: RootSystem, bound: int = WEYL_BOUND):
        self.rs = rs
        npos = rs.npos
        gens = rs.simple_perms
        ident = tuple(range(len(rs.roots)))
        elems = [WeylElt(ident, (), 0)]
        lookup = {ident: 0}
        layer = [0]
        while layer:
            nxt = []
            for k in layer:
                w = elems[k]
                for i in range(rs.rank):
                    if w.perm[i] >= npos:
                        continue  # w(alpha_i) < 0, length would drop
                    p = tuple(w.perm[j] for j in gens[i])
                    if p not in lookup:
                        if len(elems) >= bound:
                            raise ValueError(f"|W| exceeds {bound}")
                        lookup[p] = len(elems)
                        elems.append(WeylElt(p, w.word + (i,), len(elems)))
                        nxt.append(lookup[p])
            layer = nxt
        self.elements = elems
        self.lookup = lookup
        self.order = len(elems)
        self.identity = 0
        self.gens = [lookup[g] for g in gens]

    def __len__(self):
        return self.order

    def __getitem__(self, k) -> WeylElt:
        return self.elements[k]

    def mul(self, a: int, b: int) -> int:
        pa, pb = self.elements[a].perm, self.elements[b].perm
        return self.lookup[tuple(pa[j] for j in pb)]

    @cached_property
    def table(self) -> np.ndarray:
        perms = np.array([e.perm for e in self.elements], dtype=np.int32)
        # encode perms by the images of the simple roots, which determine w
        key = {tuple(p[: self.rs.rank]): k for k, p in enumerate(perms.tolist())}
        out = np.empty((self.order, self.order), dtype=np.int32)
        simple_imgs = perms[:, : self.rs.rank]
        for a in range(self.order):
            comp = perms[a][simple_imgs]
            out[a] = [key[tuple(r)] for r in comp.tolist()]
        return out

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int32)
        for k, e in enumerate(self.elements):
            p = e.perm
            q = [0] * len(p)
            for i, j in enumerate(p):
                q[j] = i
            inv[k] = self.lookup[tuple(q)]
        return inv

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([len(e.word) for e in self.elements], dtype=np.int32)

    def from_word(self, word) -> int:
        k = 0
        for i in word:
            k = self.mul(k, self.gens[i])
        return k

    def act(self, w: int, root: int) -> int:
        return self.elements[w].perm[root]

    def inversions(self, w: int) -> int:
        npos = self.rs.npos
        return sum(1 for j in self.elements[w].perm[:npos] if j >= npos)

    @cached_property
    def longest(self) -> int:
        return int(np.argmax(self.lengths))

    def reflection(self, root) -> int:
        return self.lookup[self.rs.reflection_perm(root)]

    @cached_property
    def coroot_matrices(self) -> np.ndarray:
        """M[w] with columns coroot_coords(w alpha_i): the action on simple-coroot coordinates."""
        rs = self.rs
        cc = np.array([rs.coroot_coords(k) for k in range(len(rs.roots))], dtype=np.int64)
        perms = np.array([e.perm[: rs.rank] for e in self.elements])
        return np.transpose(cc[perms], (0, 2, 1)).copy()

    def conjugacy_classes(self):
        t = self.table
        inv = self.inverse
        seen = np.full(self.order, -1)
        classes = []
        for g in range(self.order):
            if seen[g] >= 0:
                continue
            cls = sorted(set(int(t[t[x, g], inv[x]]) for x in range(self.order)))
            for c in cls:
                seen[c] = len(classes)
            classes.append(cls)
        return classes


def build(label) -> RootSystem:
    kind, rank = parse_label(label)
    return _build_cached(kind, rank)


_CACHE = {}


def _build_cached(kind, rank):
    if (kind, rank) not in _CACHE:
        _CACHE[(kind, rank)] = RootSystem(kind, rank)
    return _CACHE[(kind, rank)]


def weyl_enumerate(rs: RootSystem) -> list:
    return rs.weyl.elements


def longest_is_central(rs: RootSystem) -> bool:
    """Whether w0 acts as -1, i.e. is central in W."""
    w0 = rs.weyl[rs.weyl.longest]
    return all(w0.perm[k] == rs.neg(k) for k in range(len(rs.roots)))


def structure_sign(rs: RootSystem, alpha, beta) -> int:
    return rs.structure_sign(alpha, beta)


def coroot_coords(rs: RootSystem, gamma):
    return rs.coroot_coords(gamma)
