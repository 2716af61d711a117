"""Extension maps with respect to T in N (and T1 in N1), built in three steps.

1. For each W-orbit representative delta of Irr(H), a linear character of
   V_delta extending delta and trivial on n_alpha(-1) for alpha in R(delta).
2. Transport along the orbit by conjugation.
3. Lambda(lambda)(t w') = lambda(t) * Lambda0(lambda on H)(w').

Values are kept as exponents in [0, 1): the value exp(2 pi i x) is stored as x.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import lcm

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .chevnorm import ExtendedWeylGroup, ExtWeylElt, Torus
from .cyclo import Cyclotomic
from .relweyl import TorusChar, TorusCharacters, _closure, _unit_mod
from .rootsys import RootSystem, build


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass
class Lambda0Data:
    delta: int
    r_delta: list  # positive roots alpha with delta(h_alpha(-1)) = 1
    w_delta: list  # stabilizer of delta in W
    generators: list  # canonical generating tuple of V_delta
    gen_values: tuple  # chosen values on the generators
    values: dict  # (mask, w) -> Fraction


class _Lattice:
    """Integer row echelon form, grown one relation at a time."""

    def __init__(self, k: int):
        self.k = k
        self.rows = {}

    def add(self, v) -> None:
        v = [int(x) for x in v]
        for j in range(self.k):
            if v[j] == 0:
                continue
            if j not in self.rows:
                if v[j] < 0:
                    v = [-x for x in v]
                self.rows[j] = v
                return
            r = self.rows[j]
            a, b = r[j], v[j]
            g, x, y = _egcd(a, b)
            new = [x * ri + y * vi for ri, vi in zip(r, v)]
            v = [(a // g) * vi - (b // g) * ri for ri, vi in zip(r, v)]
            if new[j] < 0:
                new = [-x for x in new]
            self.rows[j] = new
        # v is now zero

    def matrix(self) -> Matrix:
        if len(self.rows) < self.k:
            raise ArithmeticError("relation lattice has infinite index")
        return Matrix([self.rows[j] for j in range(self.k)])


def _egcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        qt, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - qt * x1
        y0, y1 = y1, y0 - qt * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class ExtensionMap:
    """The extension map Lambda for T in N (split) or T1 in N1 (twisted)."""

    def __init__(self, rs: RootSystem, q: int, twisted: bool = False, chars: TorusCharacters = None):
        self.rs, self.q, self.twisted = rs, q, twisted
        self.V = ExtendedWeylGroup(rs, q_odd=q % 2 == 1)
        self.W = rs.weyl
        self.T = chars.T if chars else Torus(rs, q, twisted)
        self.chars = chars or TorusCharacters(rs, q, twisted)
        self.m = self.T.m
        self._step1 = {}
        self.flags = []

    # Irr(H) as masks: delta(h) = (-1)^{popcount(delta & h)}
    def delta_conj(self, delta: int, w: int) -> int:
        """delta^(w'): h -> delta(w' h w'^{-1})."""
        if not self.V.q_odd:
            return 0
        row = self.V.hact[w]
        return sum(_parity(delta & int(row[1 << j])) << j for j in range(self.rs.rank))

    @cached_property
    def _delta_orbits(self) -> dict:
        out = {}
        for d in range(self.V.hsize):
            if d in out:
                continue
            for w in range(len(self.W)):
                e = self.delta_conj(d, w)
                if e not in out:
                    out[e] = (d, w)
        return out

    def delta_orbit(self, delta: int):
        """(rep, w) with delta = rep^(w') and rep the least mask of the orbit."""
        return self._delta_orbits[delta]

    def stabilizer_H(self, delta: int) -> list:
        return [w for w in range(len(self.W)) if self.delta_conj(delta, w) == delta]

    def r_delta(self, delta: int) -> list:
        masks = self.V.root_masks
        return [k for k in range(self.rs.npos) if not _parity(delta & masks[k])]

    def lambda0_prime(self, delta: int) -> Lambda0Data:
        if delta in self._step1:
            return self._step1[delta]
        V, W, rank = self.V, self.W, self.rs.rank
        stab = self.stabilizer_H(delta)
        rdel = self.r_delta(delta)
        gens = [ExtWeylElt(1 << i, 0) for i in range(rank)] if V.q_odd else []
        targets = [Fraction((delta >> i) & 1, 2) for i in range(rank)] if V.q_odd else []
        for k in rdel:
            gens.append(V.n_root(k))
            targets.append(Fraction(0))
        n_fixed = len(gens)
        for w in _greedy_generators(W, stab):
            gens.append(V.lift(w))
        values, gen_values = self._abelian_extension(stab, gens, targets, n_fixed)
        data = Lambda0Data(delta, rdel, stab, gens, gen_values, values)
        self._step1[delta] = data
        return data

    def _abelian_extension(self, stab, gens, targets, n_fixed):
        """Linear characters of V_delta through its abelianization; lexicographically least admissible one."""
        V = self.V
        k = len(gens)
        stab_set = set(stab)
        vec = {V.identity(): np.zeros(k, dtype=np.int64)}
        frontier = [V.identity()]
        lat = _Lattice(k)
        seen = set()
        while frontier:
            nxt = []
            for x in frontier:
                for j, g in enumerate(gens):
                    y = V.mul(x, g)
                    v = vec[x].copy()
                    v[j] += 1
                    if y in vec:
                        rel = v - vec[y]
                        key = rel.tobytes()
                        if key not in seen and np.any(rel):
                            seen.add(key)
                            lat.add(rel)
                    else:
                        vec[y] = v
                        nxt.append(y)
            frontier = nxt
        if len(vec) != V.hsize * len(stab_set):
            raise ArithmeticError("generators do not span V_delta")
        M = lat.matrix()
        smf, _, t = smith_normal_decomp(M, domain=ZZ)
        d = [abs(int(smf[i, i])) for i in range(k)]
        D = 1
        for di in d:
            D = lcm(D, di)
        tmat = np.array([[int(t[i, j]) * (D // d[j]) for j in range(k)] for i in range(k)], dtype=object)
        best = None
        for a in product(*[range(di) for di in d]):
            x = [int(sum(tmat[i, j] * a[j] for j in range(k))) % D for i in range(k)]
            if any(Fraction(x[i], D) != targets[i] for i in range(n_fixed)):
                continue
            if best is None or x < best:
                best = x
        if best is None:
            raise ArithmeticError("no extension trivial on the n_alpha(-1), alpha in R(delta)")
        values = {el: Fraction(int(np.dot(v, best)) % D, D) for el, v in vec.items()}
        return values, tuple(Fraction(x, D) for x in best)

    def lambda0(self, delta: int, v: ExtWeylElt) -> Fraction:
        """Lambda0(delta)(v) for v in V_delta, transported from the orbit representative."""
        rep, w = self.delta_orbit(delta)
        data = self.lambda0_prime(rep)
        if w == 0:
            return data.values[v]
        x = self.V.lift(w)
        # delta = rep^x, so Lambda0(delta)(v) = Lambda0'(rep)(x v x^{-1})
        y = self.V.mul(self.V.mul(x, v), self.V.inv(x))
        return data.values[y]

    def check_step2(self) -> dict:
        """Well-definedness, V-equivariance on generators, and mu_{x,i} of order <= 2."""
        V = self.V
        gens = [V.n_simple(i) for i in range(self.rs.rank)]
        bad_equiv, bad_mu = [], []
        for delta in range(V.hsize):
            stab = self.stabilizer_H(delta)
            rep, _ = self.delta_orbit(delta)
            own = self.lambda0_prime(delta)
            for w in stab:
                for mask in range(V.hsize):
                    v = ExtWeylElt(mask, w)
                    mu = self.lambda0(delta, v) - own.values[v]
                    if (2 * mu).denominator != 1:
                        bad_mu.append((delta, v))
            for g in gens:
                d2 = self.delta_conj(delta, g.w)  # delta^g on V_{delta^g} = g^{-1} V_delta g
                ginv = V.inv(g)
                for w in self.stabilizer_H(d2):
                    for mask in range(V.hsize):
                        v = ExtWeylElt(mask, w)
                        conj = V.mul(V.mul(g, v), ginv)
                        if self.lambda0(d2, v) != self.lambda0(delta, conj):
                            bad_equiv.append((delta, g, v))
        not_fixed = [d for d in range(V.hsize)
                     if any((2 * x).denominator != 1 for x in self.lambda0_prime(self.delta_orbit(d)[0]).values.values())]
        return {"equivariance_failures": bad_equiv, "mu_failures": bad_mu, "non_rational_deltas": sorted(set(not_fixed))}

    # step 3
    def lam_exponent(self, lam: TorusChar, t) -> Fraction:
        return Fraction(sum(int(a) * b for a, b in zip(t, lam.exps)) % self.m, self.m)

    def value(self, lam: TorusChar, t, w: int) -> Fraction:
        """Lambda(lambda)(t w') for w in W(lambda)."""
        delta = lam.restrict_H() if self.V.q_odd else 0
        return (self.lam_exponent(lam, t) + self.lambda0(delta, ExtWeylElt(0, w))) % 1

    def lift_to_N(self, lam: TorusChar) -> dict:
        """Lambda(lambda) on the lifts w' of W(lambda): {w: exponent}; combine with lambda on T."""
        return {w: self.value(lam, (0,) * self.rs.rank, w) for w in self.chars.stabilizer(lam)}

    def check_lift(self, lam: TorusChar) -> list:
        """Homomorphism on N_lambda and N-equivariance, both on generators."""
        rank = self.rs.rank
        N_t = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
        errors = []
        stab = self.chars.stabilizer(lam)
        V = self.V
        for a in stab:
            for b in stab:
                c = V.cocycle[a, b]
                t = self.T.embed_H(int(c))
                lhs = self.value(lam, (0,) * rank, a) + self.value(lam, (0,) * rank, b)
                rhs = self.value(lam, t, int(self.W.table[a, b]))
                if (lhs - rhs) % 1:
                    errors.append(("hom", a, b))
            for t in N_t:
                # w' t w'^{-1} = w(t); lambda must be w-stable
                wt = self.T.act(a, t)
                if self.lam_exponent(lam, wt) != self.lam_exponent(lam, t):
                    errors.append(("stab", a, t))
        for i in range(rank):
            s = self.W.gens[i]
            lam2 = self.chars.act(int(self.W.inverse[s]), lam)  # lambda^(n_i)
            n = V.n_simple(i)
            ninv = V.inv(n)
            for w in self.chars.stabilizer(lam2):
                g = ExtWeylElt(0, w)
                conj = V.mul(V.mul(n, g), ninv)
                t = self.T.embed_H(conj.mask)
                if (self.value(lam, t, conj.w) - self.value(lam2, (0,) * rank, w)) % 1:
                    errors.append(("equivariance", i, w))
        return errors

    def delta_sigma(self, lam: TorusChar, sigma) -> dict:
        """delta_{lambda,sigma} on W(lambda) as exponents: Lambda(lambda)^sigma / Lambda(lambda^sigma)."""
        u = _unit_mod(sigma, self.exp_level) if self.V.q_odd else 1
        delta = lam.restrict_H() if self.V.q_odd else 0
        out = {}
        for w in self.chars.stabilizer(lam):
            x = self.lambda0(delta, ExtWeylElt(0, w))
            out[w] = (x * (u - 1)) % 1
        return out

    @cached_property
    def exp_level(self) -> int:
        """A level covering every value of Lambda: lcm of m and the step-1 denominators."""
        L = self.m
        for d in range(self.V.hsize):
            rep, _ = self.delta_orbit(d)
            for x in self.lambda0_prime(rep).gen_values:
                L = lcm(L, x.denominator)
        return L

    def check_delta_sigma(self, lam: TorusChar, sigma, data=None) -> list:
        data = data or self.chars.rel_weyl(lam)
        dlt = self.delta_sigma(lam, sigma)
        errors = []
        for w in data.Rlambda:
            if dlt[w]:
                errors.append(("nontrivial_on_R", w))
        for w, x in dlt.items():
            if (2 * x) % 1:
                errors.append(("square", w))
        tab = self.W.table
        for a in data.Wlambda:
            for b in data.Wlambda:
                if (dlt[a] + dlt[b] - dlt[int(tab[a, b])]) % 1:
                    errors.append(("not_linear", a, b))
                    break
        return errors


def _greedy_generators(W, elements) -> list:
    gens, span = [], {0}
    for w in elements:
        if w not in span:
            gens.append(w)
            span = set(_closure(W, gens))
    return gens


def to_cyclotomic(x: Fraction) -> Cyclotomic:
    return Cyclotomic.root(x.denominator, x.numerator)


def element_c_check(n: int, q: int) -> dict:
    """The order-2 element c = prod n_{e_i - e_{n/2+i}}(-1) in type B_n, n in {4, 8}.

    Checks lambda(h_{e_i - e_{n/2+i}}(-1)) = (-1)^{(q-1)/2} for every factor and
    Lambda(lambda)(c)^2 = lambda(c^2) = 1.  For n = 4 the value Lambda(lambda)(c)
    is computed with the extension map itself; for n = 8 only the torus-level
    product is evaluated, since W(B8) is beyond the enumeration bound.
    """
    if n not in (4, 8) or q % 2 == 0:
        raise ValueError("n must be 4 or 8 and q odd")
    rs = build(f"B{n}")
    m = q - 1
    exps = [0] * n
    exps[n // 2 - 1] = m // 2
    lam = TorusChar(tuple(exps), m)
    half = n // 2
    factors, cmasks = [], []
    for i in range(half):
        vec = [0] * n
        vec[i], vec[half + i] = 1, -1
        k = next(j for j in range(rs.npos) if tuple(rs.vector(j)) == tuple(vec))
        c = rs.coroot_coords(k)
        e = sum(ci * (m // 2) * bi for ci, bi in zip(c, exps)) % m
        factors.append(-1 if e else 1)
        cmasks.append((k, c))
    expected = -1 if ((q - 1) // 2) % 2 else 1
    square = 1
    for f in factors:
        square *= f
    out = {
        "n": n, "q": q, "factors": factors,
        "factors_ok": all(f == expected for f in factors),
        "lambda_c_squared": square,
        "formula": (-1) ** ((n * (q - 1) // 4) % 2),
    }
    if n == 4:
        ext = ExtensionMap(rs, q)
        V = ext.V
        c = V.identity()
        for k, _ in cmasks:
            c = V.mul(c, V.n_root(k))
        c2 = V.mul(c, c)
        if c2.w != 0:
            raise ArithmeticError("c does not square into H")
        t2 = ext.T.embed_H(c2.mask)
        lam_c2 = ext.lam_exponent(lam, t2)
        if c.w not in ext.chars.stabilizer(lam):
            raise ArithmeticError("c does not stabilize lambda")
        val = ext.value(lam, ext.T.embed_H(c.mask), c.w)
        out["Lambda_c"] = 1 if val == 0 else (-1 if val == Fraction(1, 2) else str(val))
        out["Lambda_c_squared_matches"] = (2 * val - lam_c2) % 1 == 0
        out["lambda_c2_value"] = 1 if lam_c2 == 0 else -1
    out["ok"] = out["factors_ok"] and out["lambda_c_squared"] == 1 and out.get("Lambda_c_squared_matches", True) \
        and out.get("Lambda_c", 1) in (1, -1)
    return out
