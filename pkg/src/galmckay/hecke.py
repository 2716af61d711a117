"""Generic Iwahori-Hecke algebras of R(lambda), their two specializations, and the bijection f.

Irreducible representations are written down explicitly over Q(u):

* type A: Young's seminormal form, deformed;
* type B/C: Hoefsmit's seminormal form on pairs of tableaux;
* dihedral (G2): two-dimensional models, rational for equal parameters;

and products of these.  The same formulas are evaluated at u = q (the f-point)
and at u = 1 (the g-point), so pairing characters by label is the double
specialization of one generic character.  All parameters of a principal-series
algebra specialize to q, so a single indeterminate u is used for the models.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import lcm

import numpy as np
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .charkit import CharTable, ClassFunction, FiniteGroup, dixon_table, induce
from .cyclo import sqrt_fixed


class UnsupportedComponent(ValueError):
    pass


# Laurent polynomials ------------------------------------------------------

class LaurentPoly:
    """Integer Laurent polynomial in several parameters: {exponent tuple: coefficient}."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict, nvars: int):
        self.terms = {k: v for k, v in terms.items() if v}
        self.nvars = nvars

    @classmethod
    def const(cls, c: int, nvars: int) -> "LaurentPoly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "LaurentPoly":
        return cls({tuple(int(j == i) for j in range(nvars)): 1}, nvars)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out, self.nvars)

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({k: v * other for k, v in self.terms.items()}, self.nvars)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return LaurentPoly(out, self.nvars)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for k, v in self.terms.items():
            term = Fraction(v)
            for x, e in zip(point, k):
                term *= Fraction(x) ** e
            total += term
        return total

    def __repr__(self):
        return f"LaurentPoly({self.terms})"


# Coxeter data of R(lambda) ------------------------------------------------

def _bond_order(a: int, b: int) -> int:
    return {0: 2, 1: 3, 2: 4, 3: 6}[a * b]


@dataclass
class Component:
    kind: str  # "A", "B" or "I" (dihedral)
    nodes: list  # positions in Delta, in chain order; for "B" the special node first
    m: int = 0  # dihedral order

    @property
    def rank(self) -> int:
        return len(self.nodes)


def classify(cartan) -> list:
    """Split a Cartan matrix into components and name them."""
    n = len(cartan)
    seen, comps = set(), []
    for i in range(n):
        if i in seen:
            continue
        stack, comp = [i], []
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            comp.append(x)
            stack += [j for j in range(n) if j != x and cartan[x][j]]
        comps.append(sorted(comp))
    out = []
    for comp in comps:
        nbrs = {a: [b for b in comp if b != a and cartan[a][b]] for a in comp}
        if any(len(v) > 2 for v in nbrs.values()):
            raise UnsupportedComponent("branched Dynkin diagram (type D or E)")
        if len(comp) == 1:
            out.append(Component("A", comp))
            continue
        leaves = [a for a in comp if len(nbrs[a]) == 1]
        chain = [min(leaves)]
        while len(chain) < len(comp):
            chain.append(next(b for b in nbrs[chain[-1]] if b not in chain))
        orders = [_bond_order(cartan[a][b], cartan[b][a]) for a, b in zip(chain, chain[1:])]
        if all(o == 3 for o in orders):
            out.append(Component("A", chain))
        elif len(comp) == 2 and orders[0] == 6:
            out.append(Component("I", chain, 6))
        elif orders.count(4) == 1 and orders[-1] == 4 and len(comp) > 2:
            out.append(Component("B", chain[::-1]))
        elif orders.count(4) == 1 and orders[0] == 4:
            out.append(Component("B", chain))
        else:
            raise UnsupportedComponent(f"bond pattern {orders}")
    return out


# tableaux ------------------------------------------------------------------

def _partitions(n: int, maxpart: int = None):
    maxpart = n if maxpart is None else maxpart
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _standard_tableaux(shapes):
    """Standard fillings of a tuple of shapes: tuple of (component, row, col) for entries 1..n."""
    n = sum(sum(s) for s in shapes)
    out = []

    def rec(filled, pos):
        if len(pos) == n:
            out.append(tuple(pos))
            return
        for c, shape in enumerate(shapes):
            for r, length in enumerate(shape):
                col = filled[c][r] if r < len(filled[c]) else 0
                if col >= length:
                    continue
                if r > 0 and filled[c][r - 1] <= col:
                    continue
                new = [list(f) for f in filled]
                new[c][r] += 1
                rec(new, pos + [(c, r, col)])

    rec([[0] * len(s) for s in shapes], [])
    return out


def _qint(u, k: int):
    return sum(u**j for j in range(k))


def _diag_same(u, d: int):
    """(u - 1)/(1 - u^-d) without the removable pole at u = 1."""
    return u**d / _qint(u, d) if d > 0 else -1 / _qint(u, -d)


def _diag_cross(u, e: int):
    """(u - 1)/(1 - rho^-1) for rho = -u^e."""
    return (u - 1) * u**e / (u**e + 1) if e >= 0 else (u - 1) / (1 + u ** (-e))


@dataclass
class IrrRep:
    label: tuple
    dim: int
    matrices: object  # callable u -> list of matrices (object arrays), one per node of the component


def _seminormal(basis, u, gens, diag, swap):
    """Matrices of a seminormal form; diag(t, i) returns ('eig', value) or ('pair', a)."""
    index = {t: k for k, t in enumerate(basis)}
    mats = []
    for i in gens:
        M = np.full((len(basis), len(basis)), 0, dtype=object)
        for t in basis:
            k = index[t]
            kind, a = diag(t, i)
            M[k, k] = a
            if kind == "pair":
                t2 = swap(t, i)
                k2 = index[t2]
                a2 = diag(t2, i)[1]
                # orientation: coefficient 1 from the tableau with i+1 in the later position
                if t[i] < t[i - 1]:
                    M[k2, k] = 1
                else:
                    M[k2, k] = a * a2 + u
        mats.append(M)
    return mats


def _swap(t, i):
    """Exchange entries i and i+1 (positions are 0-based: entries i-1, i)."""
    t = list(t)
    t[i - 1], t[i] = t[i], t[i - 1]
    return tuple(t)


def _is_standard(t) -> bool:
    pos = {p: k for k, p in enumerate(t)}
    for (c, r, col), k in pos.items():
        if col > 0 and pos[(c, r, col - 1)] > k:
            return False
        if r > 0 and pos[(c, r - 1, col)] > k:
            return False
    return True


def type_a_reps(rank: int) -> list:
    n = rank + 1
    reps = []
    for lam in _partitions(n):
        basis = _standard_tableaux((lam,))

        def mats(u, basis=basis):
            def diag(t, i):
                (_, r1, c1), (_, r2, c2) = t[i - 1], t[i]
                if r1 == r2:
                    return "eig", u
                if c1 == c2:
                    return "eig", -1
                return "pair", _diag_same(u, (c2 - r2) - (c1 - r1))

            return _seminormal(basis, u, range(1, n), diag, _swap)

        reps.append(IrrRep(("A", lam), len(basis), mats))
    return reps


def type_b_reps(rank: int) -> list:
    n = rank
    reps = []
    for k in range(n + 1):
        for lam in _partitions(k):
            for mu in _partitions(n - k):
                shapes = (lam, mu)
                basis = _standard_tableaux(shapes)

                def mats(u, basis=basis):
                    def diag(t, i):
                        (a1, r1, c1), (a2, r2, c2) = t[i - 1], t[i]
                        if a1 == a2:
                            if r1 == r2:
                                return "eig", u
                            if c1 == c2:
                                return "eig", -1
                            return "pair", _diag_same(u, (c2 - r2) - (c1 - r1))
                        # contents Q u^c in lambda, -u^c in mu, with Q = u
                        e = (c2 - r2) - (c1 - r1) + (1 if a2 == 0 else -1)
                        return "pair", _diag_cross(u, e)

                    M0 = np.full((len(basis), len(basis)), 0, dtype=object)
                    for j, t in enumerate(basis):
                        M0[j, j] = u if t[0][0] == 0 else -1
                    return [M0] + _seminormal(basis, u, range(1, n), diag, _swap)

                reps.append(IrrRep(("B", lam, mu), len(basis), mats))
    return reps


def dihedral_reps(m: int) -> list:
    reps = []
    signs = [(1, 1), (0, 0)] + ([(1, 0), (0, 1)] if m % 2 == 0 else [])
    for a, b in signs:
        def mats(u, a=a, b=b):
            one = lambda x: np.array([[u if x else -1]], dtype=object)
            return [one(a), one(b)]

        reps.append(IrrRep(("I", "lin", a, b), 1, mats))
    for j in range(1, (m - 1) // 2 + 1):
        # x y = 2u (1 + cos(2 pi j / m)); rational for m in {3, 4, 6}
        twice = {(6, 1): 3, (6, 2): 1, (4, 1): 2, (3, 1): 1}[(m, j)]

        def mats(u, twice=twice):
            s = np.array([[-1, 0], [twice * u, u]], dtype=object)
            t = np.array([[u, 1], [0, -1]], dtype=object)
            return [s, t]

        reps.append(IrrRep(("I", "two", j), 2, mats))
    return reps


@lru_cache(maxsize=None)
def component_reps(kind: str, rank: int, m: int = 0) -> list:
    if kind == "A":
        return type_a_reps(rank)
    if kind == "B":
        return type_b_reps(rank)
    if kind == "I":
        return dihedral_reps(m)
    raise UnsupportedComponent(kind)


@lru_cache(maxsize=None)
def verify_component_relations(kind: str, rank: int, m: int = 0) -> int:
    """Quadratic and braid relations over Q(u), checked symbolically; returns the number of reps checked."""
    u = sympy.Symbol("u")
    reps = component_reps(kind, rank, m)
    if kind == "I":
        coxeter = [[1, m], [m, 1]]
    else:
        coxeter = [[1 if i == j else (3 if abs(i - j) == 1 else 2) for j in range(rank)] for i in range(rank)]
        if kind == "B" and rank > 1:
            coxeter[0][1] = coxeter[1][0] = 4
    for rep in reps:
        mats = [sympy.Matrix(M.tolist()) for M in rep.matrices(u)]
        I = sympy.eye(rep.dim)
        for M in mats:
            if (M - u * I) * (M + I) != sympy.zeros(rep.dim):
                if ((M - u * I) * (M + I)).applyfunc(sympy.cancel) != sympy.zeros(rep.dim):
                    raise ArithmeticError(f"quadratic relation fails for {rep.label}")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                k = coxeter[i][j]
                lhs, rhs = I, I
                for step in range(k):
                    lhs = lhs * (mats[i] if step % 2 == 0 else mats[j])
                    rhs = rhs * (mats[j] if step % 2 == 0 else mats[i])
                diff = (lhs - rhs).applyfunc(sympy.cancel)
                if diff != sympy.zeros(rep.dim):
                    raise ArithmeticError(f"braid relation fails for {rep.label} at nodes {i}, {j}")
    return len(reps)


# generic algebra on the basis R(lambda) ----------------------------------------

class CoxeterSubgroup:
    """R(lambda) inside W with generators the reflections in Delta_lambda; shortlex words."""

    def __init__(self, W, delta_roots: list, rs):
        self.W, self.rs = W, rs
        self.delta = list(delta_roots)
        self.gens = [W.reflection(k) for k in self.delta]
        words = {0: ()}
        order = [0]
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for j, g in enumerate(self.gens):
                    y = int(W.table[x, g])
                    if y not in words:
                        words[y] = words[x] + (j,)
                        order.append(y)
                        nxt.append(y)
            frontier = nxt
        self.elements = order
        self.words = words
        self.index = {w: k for k, w in enumerate(order)}

    @cached_property
    def cartan(self) -> list:
        roots = self.rs.roots
        return [[self.rs.pairing(roots[a], roots[b]) for b in self.delta] for a in self.delta]

    @cached_property
    def components(self) -> list:
        return classify(self.cartan)

    def length(self, w: int) -> int:
        return len(self.words[w])

    def __len__(self):
        return len(self.elements)

    @cached_property
    def group(self) -> FiniteGroup:
        return FiniteGroup.subgroup_of(self.W.table, self.elements, name="R(lambda)")


class GenericHecke:
    """Free module on {a_w : w in R(lambda)} with a_w a_s = a_ws or u_s a_ws + (u_s - 1) a_w."""

    def __init__(self, R: CoxeterSubgroup, param_of_node: list):
        self.R = R
        self.param_of_node = list(param_of_node)
        self.nvars = max(param_of_node) + 1 if param_of_node else 1
        self.one = LaurentPoly.const(1, self.nvars)

    def u(self, node: int) -> LaurentPoly:
        return LaurentPoly.var(self.param_of_node[node], self.nvars)

    def basis(self, w: int) -> dict:
        return {w: self.one}

    def times_gen(self, a: dict, node: int) -> dict:
        W, R = self.R.W, self.R
        s = R.gens[node]
        us = self.u(node)
        out = {}
        for x, c in a.items():
            y = int(W.table[x, s])
            if R.length(y) > R.length(x):
                out[y] = out.get(y, LaurentPoly.const(0, self.nvars)) + c
            else:
                out[y] = out.get(y, LaurentPoly.const(0, self.nvars)) + c * us
                out[x] = out.get(x, LaurentPoly.const(0, self.nvars)) + c * (us - self.one)
        return {k: v for k, v in out.items() if not v.is_zero()}

    def mul(self, a: dict, b: dict) -> dict:
        out = {}
        for y, c in b.items():
            part = a
            for node in self.R.words[y]:
                part = self.times_gen(part, node)
            for k, v in part.items():
                out[k] = out.get(k, LaurentPoly.const(0, self.nvars)) + v * c
        return {k: v for k, v in out.items() if not v.is_zero()}

    def check_relations(self) -> None:
        R = self.R
        n = len(R.gens)
        for i in range(n):
            sq = self.times_gen(self.basis(R.gens[i]), i)
            expected = {0: self.u(i), R.gens[i]: self.u(i) - self.one}
            if sq != expected:
                raise ArithmeticError("quadratic relation fails")
        for i in range(n):
            for j in range(i + 1, n):
                k = _bond_order(R.cartan[i][j], R.cartan[j][i])
                lhs, rhs = self.basis(0), self.basis(0)
                for step in range(k):
                    lhs = self.times_gen(lhs, i if step % 2 == 0 else j)
                    rhs = self.times_gen(rhs, j if step % 2 == 0 else i)
                if lhs != rhs:
                    raise ArithmeticError("braid relation fails")
        for x in R.elements:
            for i in range(n):
                for j in range(n):
                    left = self.times_gen(self.times_gen(self.basis(x), i), j)
                    st = self.times_gen(self.basis(R.gens[i]), j)
                    right = self.mul(self.basis(x), st)
                    if left != right:
                        raise ArithmeticError("associativity fails")

    def specialize(self, point) -> "SpecializedAlgebra":
        return SpecializedAlgebra(self, [Fraction(x) for x in point])


class SpecializedAlgebra:
    def __init__(self, H: GenericHecke, point: list):
        self.H, self.point = H, point
        self.dim = len(H.R)

    def structure(self, x: int, y: int) -> dict:
        prod_ = self.H.mul(self.H.basis(x), self.H.basis(y))
        return {k: v.evaluate(self.point) for k, v in prod_.items() if v.evaluate(self.point)}

    def is_group_algebra(self) -> bool:
        W = self.H.R.W
        for x in self.H.R.elements:
            for node, s in enumerate(self.H.R.gens):
                prod_ = self.H.times_gen(self.H.basis(x), node)
                vals = {k: v.evaluate(self.point) for k, v in prod_.items() if v.evaluate(self.point)}
                if vals != {int(W.table[x, s]): 1}:
                    return False
        return True

    def trace_form_nondegenerate(self, prime: int = 1_000_000_007) -> bool:
        """Regular trace form Tr(L_{a_x a_y}); full rank mod a prime proves nondegeneracy."""
        R = self.H.R
        idx = R.index
        n = self.dim
        prods = {}
        for x in R.elements:
            for y in R.elements:
                prods[x, y] = self.structure(x, y)
        tr = {}
        for z in R.elements:
            tr[z] = sum(prods[z, b].get(b, 0) for b in R.elements)
        G = np.zeros((n, n), dtype=object)
        for x in R.elements:
            for y in R.elements:
                G[idx[x], idx[y]] = sum(c * tr[z] for z, c in prods[x, y].items())
        return _rank_mod(G, prime) == n


def _rank_mod(A, p: int) -> int:
    M = [[int(Fraction(x).numerator * pow(Fraction(x).denominator, -1, p)) % p for x in row] for row in A]
    rank, rows, cols = 0, len(M), len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for r in range(rows):
            if r != rank and M[r][c]:
                f = M[r][c]
                M[r] = [(a - f * b) % p for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def build_H0(R: CoxeterSubgroup, Wlambda: list = None) -> GenericHecke:
    """One parameter per W(lambda)-conjugacy class of the generating reflections."""
    W = R.W
    Wl = Wlambda if Wlambda is not None else R.elements
    labels = []
    for i, g in enumerate(R.gens):
        found = None
        for j in range(i):
            if any(int(W.table[W.table[w, R.gens[j]], W.inverse[w]]) == g for w in Wl):
                found = labels[j]
                break
        labels.append(found if found is not None else (max(labels) + 1 if labels else 0))
    return GenericHecke(R, labels)


def ind_w(word, params) -> Fraction:
    """Product of the specialized parameters along a reduced word; params maps generator -> value."""
    out = Fraction(1)
    for s in word:
        out *= Fraction(params[s] if not isinstance(params, (int, Fraction)) else params)
    return out


def gamma_ingredient(length: int, q: int, sigma) -> int:
    """sqrt(ind(w))^sigma / sqrt(ind(w)) for ind(w) = q^length, as +1 or -1."""
    if length % 2 == 0:
        return 1
    p, f = _prime_power(q)
    if f % 2 == 0:
        return 1
    return 1 if sqrt_fixed(p, sigma) else -1


def _prime_power(q: int):
    p = next(d for d in range(2, q + 1) if q % d == 0)
    f, x = 0, q
    while x % p == 0:
        x //= p
        f += 1
    if x != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, f


# characters of R(lambda) and W(lambda) at the two points --------------------------

def _int_matrix(M):
    """Write a Fraction matrix as (integer matrix, common denominator)."""
    den = 1
    for x in M.flat:
        den = lcm(den, Fraction(x).denominator)
    A = np.array([[int(Fraction(x) * den) for x in row] for row in M], dtype=object)
    return A, den


@dataclass
class HeckeCharacter:
    label: tuple
    degree: int
    f_values: dict  # element of W(lambda) -> (a, b) meaning a + b sqrt(q) at u = q
    g_values: dict  # same at u = 1
    dixon_index: int = -1


class HeckeModel:
    """All algebra data attached to W(lambda) = R(lambda) x| C(lambda), with |C(lambda)| <= 2."""

    def __init__(self, rs, rel, q: int, table: CharTable = None):
        self.rs, self.rel, self.q = rs, rel, q
        self.W = rs.weyl
        self.R = CoxeterSubgroup(self.W, rel.DeltaLambda, rs)
        if sorted(self.R.elements) != sorted(rel.Rlambda):
            raise ArithmeticError("reflections in Delta_lambda do not generate R(lambda)")
        if len(rel.Clambda) > 2:
            raise UnsupportedComponent("C(lambda) of order > 2")
        self.components = self.R.components
        self.c = next((c for c in rel.Clambda if c != 0), None)
        self.table = table
        self.flags = []

    # per-component representations, tensored together
    @cached_property
    def reps(self) -> list:
        per = []
        for comp in self.components:
            per.append([(comp, rep) for rep in component_reps(comp.kind, comp.rank, comp.m)])
        return list(product(*per)) if per else [()]

    def rep_label(self, rep) -> tuple:
        return tuple(r.label for _, r in rep)

    def rep_matrices(self, rep, u) -> list:
        """Matrices of the generators of R (in Delta order) on the tensor product."""
        n = len(self.R.gens)
        dims = [r.dim for _, r in rep]
        total = int(np.prod(dims)) if dims else 1
        mats = [None] * n
        for pos, (comp, r) in enumerate(rep):
            local = r.matrices(u)
            for k, node in enumerate(comp.nodes):
                M = np.array([[1]], dtype=object)
                for pos2, (_, r2) in enumerate(rep):
                    factor = local[k] if pos2 == pos else np.identity(r2.dim, dtype=object) * 1
                    M = np.kron(M, factor)
                mats[node] = M
        if not rep:
            mats = [np.array([[1]], dtype=object)] * n
        return mats, total

    def _rep_values(self, rep, u) -> dict:
        """trace(rho(a_w)) for all w in R, and rho(a_w) as (int matrix, denominator)."""
        mats, dim = self.rep_matrices(rep, Fraction(u))
        gens = [_int_matrix(M) for M in mats]
        W = self.W
        out = {0: (np.identity(dim, dtype=object) * 1, 1)}
        for w in self.R.elements[1:]:
            word = self.R.words[w]
            parent = self.R.elements[0]
            for j in word[:-1]:
                parent = int(W.table[parent, self.R.gens[j]])
            A, d = out[parent]
            B, e = gens[word[-1]]
            out[w] = (A.dot(B), d * e)
        return out

    def _values_at(self, u) -> dict:
        res = {}
        for rep in self.reps:
            mats = self._rep_values(rep, u)
            res[self.rep_label(rep)] = mats
        return res

    @cached_property
    def f_matrices(self) -> dict:
        return self._values_at(self.q)

    @cached_property
    def g_matrices(self) -> dict:
        return self._values_at(1)

    @staticmethod
    def _trace(entry) -> Fraction:
        A, d = entry
        return Fraction(int(sum(A[i, i] for i in range(A.shape[0]))), d)

    @cached_property
    def c_action(self) -> list:
        """c s_alpha c^{-1} = s_{c(alpha)}: permutation of the Delta nodes."""
        if self.c is None:
            return list(range(len(self.R.gens)))
        W = self.W
        perm = []
        for g in self.R.gens:
            img = int(W.table[W.table[self.c, g], W.inverse[self.c]])
            perm.append(self.R.gens.index(img))
        return perm

    def _conj_R(self, w: int) -> int:
        W = self.W
        return int(W.table[W.table[self.c, w], W.inverse[self.c]])

    def r_characters(self, point: str) -> dict:
        mats = self.f_matrices if point == "f" else self.g_matrices
        return {lab: {w: self._trace(m[w]) for w in self.R.elements} for lab, m in mats.items()}

    @cached_property
    def characters(self) -> list:
        """Irreducible characters of the W(lambda)-algebra at both points, paired by label."""
        fchars, gchars = self.r_characters("f"), self.r_characters("g")
        Wl = list(self.rel.Wlambda)
        if self.c is None:
            return [HeckeCharacter(lab, int(gchars[lab][0]), {w: (x, Fraction(0)) for w, x in fchars[lab].items()},
                                   gchars[lab]) for lab in fchars]
        # c-conjugate of each label, decided at both points
        conj = {}
        for lab in fchars:
            fc = {w: fchars[lab][self._conj_R(w)] for w in self.R.elements}
            gc = {w: gchars[lab][self._conj_R(w)] for w in self.R.elements}
            hits_f = [l2 for l2 in fchars if fchars[l2] == fc]
            hits_g = [l2 for l2 in gchars if gchars[l2] == gc]
            if len(hits_f) != 1 or hits_f != hits_g:
                raise ArithmeticError("c-conjugation does not match labels at both points")
            conj[lab] = hits_f[0]
        out, done = [], set()
        W = self.W
        cinv = int(W.inverse[self.c])
        for lab in fchars:
            if lab in done:
                continue
            if conj[lab] == lab:
                Pf_rat, Pf_surd, Pg = self._intertwiner(lab)
                for eps in (1, -1):
                    fv, gv = {}, {}
                    for w in Wl:
                        if w in self.R.index:
                            fv[w], gv[w] = (fchars[lab][w], Fraction(0)), gchars[lab][w]
                        else:
                            r = int(W.table[w, cinv])
                            fm = self.f_matrices[lab][r]
                            fv[w] = (eps * _trace_prod(fm, Pf_rat), eps * _trace_prod(fm, Pf_surd))
                            gv[w] = eps * _trace_prod(self.g_matrices[lab][r], Pg)
                    out.append(HeckeCharacter((lab, eps), int(gchars[lab][0]), fv, gv))
                done.add(lab)
            else:
                other = conj[lab]
                fv, gv = {}, {}
                for w in Wl:
                    if w in self.R.index:
                        fv[w] = (fchars[lab][w] + fchars[other][w], Fraction(0))
                        gv[w] = gchars[lab][w] + gchars[other][w]
                    else:
                        fv[w], gv[w] = (Fraction(0), Fraction(0)), Fraction(0)
                out.append(HeckeCharacter((lab, other), 2 * int(gchars[lab][0]), fv, gv))
                done.update({lab, other})
        return out

    def _intertwiner(self, lab):
        """Generic P over Q(t), u = t^2, with P rho(a_s) = rho(a_{c s c^-1}) P and P^2 = 1.

        Returns P at the f-point split as A + sqrt(q) B, and P at the g-point.
        The square root of the scalar P_0^2 is taken as one fixed rational
        function of t, so both specializations come from the same generic P.
        """
        t = sympy.Symbol("t", positive=True)
        rep = next(r for r in self.reps if self.rep_label(r) == lab)
        mats, dim = self.rep_matrices(rep, t**2)
        perm = self.c_action
        K = QQ.frac_field(t)
        rows = []
        for s, A in enumerate(mats):
            B = mats[perm[s]]
            # P A - B P = 0, unknowns P[i, j] in row-major order
            for i in range(dim):
                for j in range(dim):
                    row = [sympy.Integer(0)] * (dim * dim)
                    for k in range(dim):
                        row[i * dim + k] += A[k, j]
                        row[k * dim + j] -= B[i, k]
                    rows.append([K.from_sympy(sympy.cancel(x)) for x in row])
        null = DomainMatrix(rows, (len(rows), dim * dim), K).nullspace()
        if null.shape[0] != 1:
            raise ArithmeticError(f"intertwiner space of dimension {null.shape[0]} for {lab}")
        vec = [K.to_sympy(x) for x in null.to_Matrix().row(0)]
        pivot = next(x for x in vec if x != 0)
        P = sympy.Matrix(dim, dim, [sympy.cancel(x / pivot) for x in vec])
        sq = (P * P).applyfunc(sympy.cancel)
        kappa = sq[0, 0]
        if (sq - kappa * sympy.eye(dim)).applyfunc(sympy.cancel) != sympy.zeros(dim):
            raise ArithmeticError("intertwiner does not square to a scalar")
        P = (P / _rational_sqrt(kappa, t)).applyfunc(sympy.cancel)
        rt = sympy.sqrt(self.q)
        even = P.applyfunc(lambda x: sympy.cancel((x + x.subs(t, -t)) / 2).subs(t, rt))
        odd = P.applyfunc(lambda x: sympy.cancel((x - x.subs(t, -t)) / (2 * t)).subs(t, rt))
        at_one = P.applyfunc(lambda x: x.subs(t, 1))
        conv = lambda Mx: np.array([[_frac(Mx[i, j]) for j in range(dim)] for i in range(dim)], dtype=object)
        return conv(even), conv(odd), conv(at_one)

    # comparisons with the group side
    def g_class_function(self, ch: HeckeCharacter, group: FiniteGroup) -> ClassFunction:
        vals = []
        for r in group.class_reps:
            vals.append(ch.g_values[group.labels[r]])
        cf = ClassFunction(group, vals)
        for k in range(group.order):
            if ch.g_values[group.labels[k]] != cf.values[int(group.class_of[k])].to_rational():
                raise ArithmeticError("g-point character is not a class function")
        return cf

    @cached_property
    def wlambda_group(self) -> FiniteGroup:
        return FiniteGroup.subgroup_of(self.W.table, self.rel.Wlambda, name="W(lambda)")

    def match_dixon(self) -> list:
        """Attach Dixon-table indices of W(lambda) to the characters; the match must be a bijection."""
        G = self.wlambda_group
        table = self.table or dixon_table(G)
        self.table = table
        seen = set()
        for ch in self.characters:
            cf = self.g_class_function(ch, G)
            k = table.index_of(cf)
            if k in seen:
                raise ArithmeticError("two algebra characters give the same group character")
            seen.add(k)
            ch.dixon_index = k
        if len(seen) != len(table):
            raise ArithmeticError("algebra characters miss part of the character table")
        return self.characters

    def check_r_dixon(self) -> bool:
        """g-point characters of the R(lambda)-algebra equal the Dixon table of R(lambda)."""
        G = self.R.group
        table = dixon_table(G)
        found = set()
        for lab, vals in self.r_characters("g").items():
            cf = ClassFunction(G, [vals[G.labels[r]] for r in G.class_reps])
            found.add(table.index_of(cf))
        return len(found) == len(table) == len(self.reps)

    def check_schur(self) -> bool:
        """Sum over characters of chi(a_w)/c_chi equals the trace form tau(a_w) = delta_{w,1} at u = q."""
        q = self.q
        chars = self.r_characters("f")
        inv = self.W.inverse
        totals = {w: Fraction(0) for w in self.R.elements}
        for lab, vals in chars.items():
            deg = vals[0]
            schur = sum(vals[w] * vals[int(inv[w])] / Fraction(q) ** self.R.length(w) for w in self.R.elements) / deg
            if schur == 0:
                return False
            for w in self.R.elements:
                totals[w] += vals[w] / schur
        return all(totals[w] == (1 if w == 0 else 0) for w in self.R.elements)

    def check_induction(self) -> bool:
        """Orbit-sum induction at the g-point agrees with group induction from R(lambda) to W(lambda)."""
        if self.c is None:
            return True
        G = self.wlambda_group
        Rg = FiniteGroup.subgroup_of(self.W.table, self.R.elements)
        gchars = self.r_characters("g")
        for ch in self.characters:
            if not isinstance(ch.label[1], tuple):
                continue
            lab = ch.label[0]
            psi = ClassFunction(Rg, [gchars[lab][Rg.labels[r]] for r in Rg.class_reps])
            if induce(psi, G) != self.g_class_function(ch, G):
                return False
        return True

    def f_values_rational(self) -> bool:
        return all(b == 0 for ch in self.characters for _, b in ch.f_values.values())

    def f_bijection(self) -> list:
        """(label, f-character, g-character, Dixon index of the g-character) for W(lambda)."""
        self.match_dixon()
        return [(ch.label, ch.f_values, ch.g_values, ch.dixon_index) for ch in self.characters]


def _frac(x) -> Fraction:
    x = sympy.nsimplify(x)
    if not x.is_rational:
        raise ArithmeticError(f"expected a rational number, got {x}")
    return Fraction(int(x.p), int(x.q))


def _rational_sqrt(kappa, t):
    """A square root of kappa inside Q(t); fails when kappa is not a square there."""
    num, den = sympy.fraction(sympy.cancel(kappa))
    out = sympy.Integer(1)
    for part, sign in ((num, 1), (den, -1)):
        c, factors = sympy.factor_list(part, t)
        rc = sympy.sqrt(c)
        if not rc.is_rational:
            raise ArithmeticError("extension needs a square root of a constant")
        out *= rc**sign
        for f, e in factors:
            if e % 2:
                raise ArithmeticError("extension is not defined over Q(sqrt(u))")
            out *= f ** (sign * e // 2)
    return out


def _trace_prod(entry, P) -> Fraction:
    A, d = entry
    n = A.shape[0]
    return sum(Fraction(A[i, k]) * P[k, i] for i in range(n) for k in range(n)) / d


def clifford_extend_and_induce(model: HeckeModel) -> list:
    return model.characters


def f_bijection(model: HeckeModel) -> list:
    return model.f_bijection()


@dataclass
class TwistResult:
    eta: int = -1  # index in the character table of W(lambda)
    status: str = "determinate"  # or "indeterminate"
    reason: str = ""


def eta_twist(model, eta: int, sigma, degree: int = None, q: int = None, c_order: int = None) -> TwistResult:
    """eta^(sigma) = f((f^{-1} eta)^sigma).

    ``model`` is a HeckeModel, or None when R(lambda) has a component without
    a model; then only the proven regimes apply.
    """
    if model is not None:
        chars = model.match_dixon()
        ch = next(c for c in chars if c.dixon_index == eta)
        if all(b == 0 for _, b in ch.f_values.values()) or gamma_ingredient(1, model.q, sigma) == 1:
            return TwistResult(eta)
        target = {w: (a, -b) for w, (a, b) in ch.f_values.items()}
        hits = [c for c in chars if c.f_values == target]
        if len(hits) != 1:
            raise ArithmeticError("Galois conjugate of an f-character is not an f-character")
        return TwistResult(hits[0].dixon_index, reason="sigma moves sqrt(q)")
    if degree is not None and degree % 2 == 1 and c_order is not None and c_order <= 2:
        return TwistResult(eta, reason="odd degree, C(lambda) elementary abelian 2-group")
    if q is not None:
        p, f = _prime_power(q)
        if f % 2 == 0 or sqrt_fixed(p, sigma):
            return TwistResult(-2, reason="sigma fixes sqrt(q): eta^sigma")
    return TwistResult(status="indeterminate", reason="no model and sigma moves sqrt(q)")
