"""Characters of the torus, relative Weyl groups W(lambda) = R(lambda) x| C(lambda), and parameter sets."""
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .charkit import CharTable, FiniteGroup, dixon_table
from .chevnorm import Torus
from .cyclo import HEllElt, crt, d_ell, ell_split
from .rootsys import RootSystem


@dataclass(frozen=True)
class TorusChar:
    """lambda(t) = zeta_m^(sum a_i b_i) for t with coroot exponents a."""

    exps: tuple
    m: int

    def order(self) -> int:
        from math import gcd

        g = self.m
        for b in self.exps:
            g = gcd(g, b)
        return self.m // g

    def restrict_H(self) -> int:
        """lambda on H as a mask: bit i is set when lambda(h_{alpha_i}(-1)) = -1."""
        if self.m % 2:
            return 0
        return sum((b & 1) << i for i, b in enumerate(self.exps))


@dataclass
class RelWeylData:
    lam: TorusChar
    Wlambda: list
    Rlambda: list
    Clambda: list
    PhiLambda: list  # positive roots alpha with lambda o alpha^vee = 1
    DeltaLambda: list

    @property
    def index(self) -> int:
        return self._w_order // len(self.Wlambda)

    _w_order: int = 0


@dataclass(frozen=True)
class HCParam:
    lam: TorusChar
    eta: int  # index into the character table of W(lambda)


@dataclass(frozen=True)
class CuspidalParam:
    """A non-principal series label for Sp: a cuspidal token of Sp2 times a torus character."""

    token: str  # "psi1" or "psi2"
    lam: TorusChar


class TorusCharacters:
    """Irr(T) (or Irr(T1)) with the W-action, orbits and relative Weyl groups."""

    def __init__(self, rs: RootSystem, q: int, twisted: bool = False):
        self.rs, self.q, self.twisted = rs, q, twisted
        self.T = Torus(rs, q, twisted)
        self.m = self.T.m
        self.rank = rs.rank
        self.W = rs.weyl
        self._tables = {}
        self._rel = {}

    # indices are lexicographic in the exponent vector
    def encode(self, b) -> np.ndarray:
        b = np.asarray(b) % self.m
        return sum(b[..., i] * self.m ** (self.rank - 1 - i) for i in range(self.rank))

    def decode(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        return np.stack([(idx // self.m ** (self.rank - 1 - i)) % self.m for i in range(self.rank)], axis=-1)

    @cached_property
    def char_matrices(self) -> np.ndarray:
        """Row-vector action: (w.lambda) has exponents b @ M_{w^{-1}}."""
        M = self.W.coroot_matrices
        return M[self.W.inverse]

    def act(self, w: int, lam) -> TorusChar:
        b = np.asarray(lam.exps if isinstance(lam, TorusChar) else lam)
        return TorusChar(tuple(int(x) for x in (b @ self.char_matrices[w]) % self.m), self.m)

    @cached_property
    def orbit_rep_index(self) -> np.ndarray:
        allb = self.decode(np.arange(self.m**self.rank))
        best = np.arange(self.m**self.rank)
        for w in range(len(self.W)):
            best = np.minimum(best, self.encode(allb @ self.char_matrices[w]))
        return best

    @cached_property
    def orbit_reps(self) -> list:
        reps = np.unique(self.orbit_rep_index)
        return [TorusChar(tuple(int(x) for x in self.decode(r)), self.m) for r in reps]

    def canonical(self, lam: TorusChar) -> TorusChar:
        r = self.orbit_rep_index[int(self.encode(lam.exps))]
        return TorusChar(tuple(int(x) for x in self.decode(r)), self.m)

    def transporter(self, lam: TorusChar, target: TorusChar) -> int:
        """Least w (in canonical order) with w.lam = target."""
        b = np.asarray(lam.exps)
        imgs = np.einsum("j,wjk->wk", b, self.char_matrices) % self.m
        hits = np.nonzero(np.all(imgs == np.asarray(target.exps), axis=1))[0]
        if len(hits) == 0:
            raise ValueError("characters are not W-conjugate")
        return int(hits[0])

    def stabilizer(self, lam: TorusChar) -> list:
        b = np.asarray(lam.exps)
        imgs = np.einsum("j,wjk->wk", b, self.char_matrices) % self.m
        return np.nonzero(np.all(imgs == b, axis=1))[0].tolist()

    def kills_coroot(self, lam: TorusChar, root: int) -> bool:
        c = self.rs.coroot_coords(root)
        return sum(ci * bi for ci, bi in zip(c, lam.exps)) % self.m == 0

    def rel_weyl(self, lam: TorusChar) -> RelWeylData:
        if lam in self._rel:
            return self._rel[lam]
        rs, W = self.rs, self.W
        stab = self.stabilizer(lam)
        phi_pos = [k for k in range(rs.npos) if self.kills_coroot(lam, k)]
        phi_set = set(phi_pos)
        # simple roots of Phi_lambda: s_alpha sends only alpha negative among Phi_lambda^+
        delta = []
        for k in phi_pos:
            perm = rs.reflection_perm(k)
            if sum(1 for j in phi_pos if perm[j] >= rs.npos) == 1:
                delta.append(k)
        R = _closure(W, [W.reflection(k) for k in delta])
        C = [w for w in stab if all(W[w].perm[j] in phi_set for j in phi_pos)]
        data = RelWeylData(lam, stab, R, C, phi_pos, delta, len(W))
        _check_semidirect(W, data)
        self._rel[lam] = data
        return data

    def wlambda_group(self, data: RelWeylData) -> FiniteGroup:
        return FiniteGroup.subgroup_of(self.W.table, data.Wlambda, name="W(lambda)")

    def wlambda_table(self, data: RelWeylData) -> CharTable:
        key = tuple(data.Wlambda)
        if key not in self._tables:
            self._tables[key] = dixon_table(self.wlambda_group(data))
        return self._tables[key]

    def subgroup_table(self, elements) -> CharTable:
        key = tuple(sorted(elements))
        if key not in self._tables:
            self._tables[key] = dixon_table(FiniteGroup.subgroup_of(self.W.table, key))
        return self._tables[key]


def _closure(W, gens) -> list:
    elems = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(W.table[x, g])
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(elems)


def _check_semidirect(W, data: RelWeylData) -> None:
    R, C, Wl = set(data.Rlambda), set(data.Clambda), set(data.Wlambda)
    if not R <= Wl or not C <= Wl:
        raise ArithmeticError("R(lambda) or C(lambda) is not inside W(lambda)")
    if R & C != {0}:
        raise ArithmeticError("R(lambda) and C(lambda) intersect nontrivially")
    if len(R) * len(C) != len(Wl):
        raise ArithmeticError("W(lambda) is not R(lambda) C(lambda)")
    inv = W.inverse
    for w in data.Wlambda:
        for r in data.Rlambda:
            if int(W.table[W.table[w, r], inv[w]]) not in R:
                raise ArithmeticError("R(lambda) is not normal in W(lambda)")


def stabilizer_W(chars: TorusCharacters, lam: TorusChar) -> list:
    return chars.stabilizer(lam)


def r_lambda(chars: TorusCharacters, lam: TorusChar):
    data = chars.rel_weyl(lam)
    return data.Rlambda, data.PhiLambda


def c_lambda(chars: TorusCharacters, data: RelWeylData):
    return data.Clambda, data.DeltaLambda


def exclusion_reason(kind: str, q: int, ell: int):
    """Cases the main theorem leaves out; computation still runs but is flagged."""
    if kind == "G" and ell == 3 and q % 9 in (4, 7):
        return "G2 with ell = 3 and q = 4, 7 mod 9"
    if kind == "C" and ell == 2 and q % 8 != 1:
        return "type C with ell = 2 needs q = 1 mod 8 for the principal-series bijection"
    return None


@dataclass
class ParamSet:
    chars: TorusCharacters
    ell: int
    params: list = field(default_factory=list)
    rel: dict = field(default_factory=dict)  # lambda -> RelWeylData
    flags: list = field(default_factory=list)


def enumerate_params(rs: RootSystem, q: int, ell: int, twisted: bool = False, chars=None) -> ParamSet:
    """One lambda per W-orbit with ell not dividing [W:W(lambda)], and eta of ell'-degree."""
    d = d_ell(q, ell)
    if twisted:
        if not (ell == 2 and d == 2):
            raise ValueError("the twisted torus is used for ell = 2 with q = 3 mod 4")
    elif d != 1:
        raise ValueError(f"d_ell(q) = {d}; the split torus covers d = 1 only")
    chars = chars or TorusCharacters(rs, q, twisted)
    out = ParamSet(chars, ell)
    reason = exclusion_reason(rs.kind, q, ell)
    if reason and not twisted:
        warnings.warn(reason)
        out.flags.append(reason)
    order = len(rs.weyl)
    for lam in chars.orbit_reps:
        stab = chars.stabilizer(lam)
        if (order // len(stab)) % ell == 0:
            continue
        data = chars.rel_weyl(lam)
        out.rel[lam] = data
        table = chars.wlambda_table(data)
        for k, deg in enumerate(table.degrees):
            if deg % ell:
                out.params.append(HCParam(lam, k))
    return out


def _unit_mod(sigma, m: int) -> int:
    if isinstance(sigma, HEllElt):
        if sigma.level % m:
            sigma = sigma.extend(m)
        return sigma.unit % m
    if sigma.level % m:
        raise ValueError("automorphism level does not cover the torus exponent")
    return sigma.unit % m


def galois_on_lambda(sigma, lam: TorusChar) -> TorusChar:
    u = _unit_mod(sigma, lam.m)
    return TorusChar(tuple(b * u % lam.m for b in lam.exps), lam.m)


def semisimple_label_action(sigma: HEllElt, lam: TorusChar) -> TorusChar:
    """Raise the ell'-part to ell^r and the ell-part to the unit's ell-component."""
    m = lam.m
    m_ell, m_rest = ell_split(m, sigma.ell)
    u = _unit_mod(sigma, m)
    b = u % m_ell
    power = pow(sigma.ell, sigma.r, m_rest) if m_rest > 1 else 0
    exps = tuple(crt([x * b % m_ell, x * power % m_rest], [m_ell, m_rest]) for x in lam.exps)
    return TorusChar(exps, m)
