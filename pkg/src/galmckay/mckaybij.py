"""The Galois action on principal-series parameters, the map Omega to Irr(N), and the checks tying them together.

Omega(lambda, eta) = Ind_{N_lambda}^N(Lambda(lambda) eta) is stored as an
integer count matrix: row c holds the multiplicities of zeta_L^k in the value
at the c-th class of N, with L a multiple of exp(N).  Galois automorphisms
act on such matrices by a column permutation, so equivariance, injectivity
and rationality all reduce to comparisons of reduced integer arrays.
"""
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import __version__
from .charkit import ClassFunction, FiniteGroup, dixon_table
from .chevnorm import N_BOUND, ExtWeylElt, Normalizer, center_chars
from .cyclo import Cyclotomic, HEllElt, act, d_ell, h_ell_generators, h_ell_subgroup, lcm, reduce_counts
from .extmap import ExtensionMap
from .hecke import HeckeModel, UnsupportedComponent, _prime_power, eta_twist, gamma_ingredient
from .relweyl import HCParam, TorusChar, TorusCharacters, enumerate_params, galois_on_lambda
from .rootsys import build

STATUSES = ("pass", "fail", "flagged", "indeterminate")


@dataclass
class VerificationReport:
    meta: dict
    params: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def add(self, name: str, status: str, witness=None) -> None:
        if status not in STATUSES:
            raise ValueError(status)
        self.checks.append({"name": name, "status": status, "witness": witness})

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def status_of(self, name: str) -> str:
        states = [c["status"] for c in self.checks if c["name"] == name]
        if not states:
            return "missing"
        for s in ("fail", "indeterminate", "flagged"):
            if s in states:
                return s
        return "pass"

    def to_dict(self) -> dict:
        return {"meta": self.meta, "params": self.params, "checks": self.checks}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kw)


def _jsonable(x):
    if isinstance(x, Cyclotomic):
        return x.to_json()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, TorusChar):
        return list(x.exps)
    if isinstance(x, HEllElt):
        return {"level": x.level, "unit": x.unit, "r": x.r}
    raise TypeError(type(x))


def sigma_level(q: int, base: int) -> int:
    """A level covering base and sqrt(p), so the action on sqrt(q) is pinned down."""
    p, _ = _prime_power(q)
    return lcm(base, 4 * p)


def _param_json(p: HCParam) -> dict:
    return {"lambda": list(p.lam.exps), "eta": p.eta}


def _weyl_exponent(W) -> int:
    e = 1
    for w in range(len(W)):
        k, x = 1, w
        while x != 0:
            x = int(W.table[x, w])
            k += 1
        e = lcm(e, k)
    return e


class Context:
    """Everything attached to (type, q, ell): N, Irr(T), the extension map and the parameters."""

    def __init__(self, label: str, q: int, ell: int, twisted: bool = False):
        self.label, self.q, self.ell, self.twisted = label, q, ell, twisted
        self.rs = build(label)
        self.N = Normalizer(self.rs, q, twisted)
        self.chars = TorusCharacters(self.rs, q, twisted)
        self.ext = ExtensionMap(self.rs, q, twisted, self.chars)
        self.W = self.rs.weyl
        self.m = self.chars.m
        self._models = {}

    @cached_property
    def params(self):
        return enumerate_params(self.rs, self.q, self.ell, self.twisted, self.chars)

    @cached_property
    def classes(self):
        return self.N.classes

    @cached_property
    def exponent(self) -> int:
        """exp(N) from the orders of class representatives; past the class bound, the multiple m * exp(W)."""
        N = self.N
        if N.order > N_BOUND:
            return self.m * _weyl_exponent(self.W)
        t0, w0 = self.classes.rep_arrays()
        t, w = t0.copy(), w0.copy()
        orders = np.zeros(len(w0), dtype=np.int64)
        k = 1
        while (orders == 0).any():
            done = (w == 0) & np.all(t == 0, axis=1) & (orders == 0)
            orders[done] = k
            t, w = N.mul_arrays(t, w, t0, w0)
            k += 1
            if k > 4 * N.order:
                raise ArithmeticError("element order search did not terminate")
        e = 1
        for o in set(orders.tolist()):
            e = lcm(e, o)
        return e

    @cached_property
    def level(self) -> int:
        return lcm(self.exponent, self.ext.exp_level)

    @cached_property
    def galois_level(self) -> int:
        return sigma_level(self.q, self.level)

    def sigmas(self) -> list:
        return h_ell_generators(self.ell, self.galois_level)

    def model(self, lam: TorusChar):
        """HeckeModel of W(lambda), or None when a component of R(lambda) has no model."""
        if lam not in self._models:
            rel = self.params.rel[lam] if lam in self.params.rel else self.chars.rel_weyl(lam)
            try:
                self._models[lam] = HeckeModel(self.rs, rel, self.q, table=self.chars.wlambda_table(rel))
            except UnsupportedComponent:
                self._models[lam] = None
        return self._models[lam]


# the correction characters and the action on parameters ---------------------------

def gamma(ctx: Context, lam: TorusChar, sigma) -> dict:
    """gamma_{lambda,sigma} on W(lambda) as +-1 values: the sign of sqrt(q^l(w_c)) under sigma."""
    rel = ctx.chars.rel_weyl(lam)
    R = set(rel.Rlambda)
    W = ctx.W
    out = {}
    for w in rel.Wlambda:
        c = next(c for c in rel.Clambda if int(W.table[w, W.inverse[c]]) in R)
        out[w] = gamma_ingredient(W[c].length, ctx.q, sigma)
    return out


def _eta_sigma(table, eta: int, sigma) -> int:
    chi = table[eta]
    return table.index_of(ClassFunction(chi.group, [act(sigma, v) for v in chi.values]))


@dataclass
class ActionResult:
    param: HCParam
    status: str = "determinate"
    twisted_eta: int = -1  # eta^(sigma) as an index
    reason: str = ""


def param_action(ctx: Context, sigma, param: HCParam) -> ActionResult:
    """(lambda, eta) -> (lambda^sigma, gamma delta eta^(sigma)), moved to the canonical orbit representative."""
    lam = param.lam
    rel = ctx.chars.rel_weyl(lam)
    table = ctx.chars.wlambda_table(rel)
    G = table.group
    if gamma_ingredient(1, ctx.q, sigma) == 1:
        tw = eta_twist(None, param.eta, sigma, q=ctx.q)
    else:
        model = ctx.model(lam)
        tw = eta_twist(model, param.eta, sigma, degree=table.degrees[param.eta], q=ctx.q,
                       c_order=len(rel.Clambda))
    if tw.status == "indeterminate":
        return ActionResult(param, "indeterminate", reason=tw.reason)
    eta_s = _eta_sigma(table, param.eta, sigma) if tw.eta == -2 else tw.eta
    gam = gamma(ctx, lam, sigma)
    dlt = ctx.ext.delta_sigma(lam, sigma)
    twisted_chi = table[eta_s]
    vals = []
    for r in G.class_reps:
        w = G.labels[r]
        d = dlt[w]
        corr = Cyclotomic.root(d.denominator, d.numerator) * gam[w]
        vals.append(twisted_chi.values[int(G.class_of[r])] * corr)
    eta1 = table.index_of(ClassFunction(G, vals))
    lam_s = galois_on_lambda(sigma, lam)
    target = ctx.chars.canonical(lam_s)
    if target == lam_s:
        return ActionResult(HCParam(target, eta1), twisted_eta=eta_s, reason=tw.reason)
    x = ctx.chars.transporter(lam_s, target)
    W = ctx.W
    xi = int(W.inverse[x])
    rel2 = ctx.chars.rel_weyl(target)
    table2 = ctx.chars.wlambda_table(rel2)
    G2 = table2.group
    chi1 = table[eta1]
    vals2 = []
    for r in G2.class_reps:
        v = G2.labels[r]
        back = int(W.table[W.table[xi, v], x])
        vals2.append(chi1(G.label_index[back]))
    eta2 = table2.index_of(ClassFunction(G2, vals2))
    return ActionResult(HCParam(target, eta2), twisted_eta=eta_s, reason=tw.reason)


# Omega ------------------------------------------------------------------------------

class OmegaEngine:
    """Induced characters Ind_{N_lambda}^N(Lambda(lambda) eta) as count matrices at level L."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.N = ctx.N
        self.L = ctx.level
        self.classes = ctx.classes
        self.t_reps, self.w_reps = self.classes.rep_arrays()
        self._conj = {}
        self._cache = {}

    def _cosets(self, wl: list) -> list:
        W = self.ctx.W
        seen, reps = set(), []
        for y in range(len(W)):
            if y in seen:
                continue
            reps.append(y)
            seen.update(int(W.table[y, x]) for x in wl)
        return reps

    def _conjugates(self, lam: TorusChar):
        """Per coset rep y: (classes c with y'^-1 g_c y' in N_lambda, torus exponent, Weyl part)."""
        if lam in self._conj:
            return self._conj[lam]
        ctx, N, L = self.ctx, self.N, self.L
        rel = ctx.chars.rel_weyl(lam)
        inW = np.zeros(len(ctx.W), dtype=bool)
        inW[rel.Wlambda] = True
        delta = lam.restrict_H() if ctx.ext.V.q_odd else 0
        lam0 = np.zeros(len(ctx.W), dtype=np.int64)
        for w in rel.Wlambda:
            x = ctx.ext.lambda0(delta, ExtWeylElt(0, w)) * L
            if x.denominator != 1:
                raise ArithmeticError("extension value outside the working level")
            lam0[w] = int(x) % L
        b = np.asarray(lam.exps, dtype=np.int64)
        n = len(self.w_reps)
        zero_t = np.zeros((n, N.rank), dtype=np.int64)
        out = []
        for y in self._cosets(rel.Wlambda):
            yw = np.full(n, y)
            it, iw = N.inv_arrays(zero_t, yw)
            t1, w1 = N.mul_arrays(it, iw, self.t_reps, self.w_reps)
            t2, w2 = N.mul_arrays(t1, w1, zero_t, yw)
            sel = np.nonzero(inW[w2])[0]
            e = ((t2[sel] @ b) % ctx.m) * (L // ctx.m) + lam0[w2[sel]]
            out.append((sel, e % L, w2[sel]))
        self._conj[lam] = (out, rel)
        return self._conj[lam]

    def _eta_counts(self, rel, eta: int) -> np.ndarray:
        ctx, L = self.ctx, self.L
        table = ctx.chars.wlambda_table(rel)
        G = table.group
        chi = table[eta]
        rows = np.zeros((len(ctx.W), L), dtype=np.int64)
        for k in range(G.order):
            rows[G.labels[k]] = cyclo_counts(chi(k), L)
        return rows

    def counts(self, param: HCParam) -> np.ndarray:
        if param in self._cache:
            return self._cache[param]
        L = self.L
        pieces, rel = self._conjugates(param.lam)
        eta_rows = self._eta_counts(rel, param.eta)
        out = np.zeros((len(self.w_reps), L), dtype=np.int64)
        cols = np.arange(L)
        for sel, e, w in pieces:
            if len(sel):
                src = eta_rows[w]
                idx = (cols[None, :] - e[:, None]) % L
                out[sel] += np.take_along_axis(src, idx, axis=1)
        self._cache[param] = out
        return out

    def reduced(self, counts: np.ndarray) -> np.ndarray:
        return reduce_counts(self.L, counts)

    def galois(self, counts: np.ndarray, unit: int) -> np.ndarray:
        out = np.zeros_like(counts)
        out[:, (np.arange(self.L) * unit) % self.L] = counts
        return out

    def norm(self, counts: np.ndarray) -> np.ndarray:
        """|N| <chi, chi> as a reduced vector."""
        L = self.L
        sizes = np.asarray(self.classes.sizes, dtype=np.int64)
        P = (counts * sizes[:, None]).T @ counts
        j, k = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
        acc = np.zeros(L, dtype=np.int64)
        np.add.at(acc, (j - k) % L, P)
        return reduce_counts(L, acc)

    def values(self, param: HCParam) -> list:
        red = self.reduced(self.counts(param))
        return [Cyclotomic(self.L, [int(c) for c in row]).descend() for row in red]

    def class_of_torus(self, t) -> int:
        idx = int(self.N.index_arrays(np.array([t]), np.array([0]))[0])
        return int(self.classes.labels[idx])

    @cached_property
    def identity_class(self) -> int:
        return int(self.classes.labels[0])


def cyclo_counts(x: Cyclotomic, L: int) -> np.ndarray:
    """Counts at level L of an integral cyclotomic value of level dividing L."""
    if L % x.level:
        x = x.descend()
    if L % x.level or x.den != 1:
        raise ValueError("value is not an integral element of Q(zeta_L)")
    out = np.zeros(L, dtype=np.int64)
    step = L // x.level
    for j, c in enumerate(x.nums):
        out[j * step] += c
    return out


# independent Clifford count ---------------------------------------------------------

def clifford_count(ctx: Context) -> dict:
    """Orbits of W on Irr(T) from the simple reflections alone, then |Irr(W_lambda)| per orbit."""
    chars, W, ell = ctx.chars, ctx.W, ctx.ell
    size = ctx.m ** ctx.rs.rank
    allb = chars.decode(np.arange(size))
    rows, cols = [], []
    for s in W.gens:
        rows.append(np.arange(size))
        cols.append(chars.encode(allb @ chars.char_matrices[s]))
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    ncomp, labels = connected_components(graph, directed=True, connection="weak")
    orbit_sizes = np.bincount(labels, minlength=ncomp)
    first = np.full(ncomp, size)
    np.minimum.at(first, labels, np.arange(size))
    total, ell_prime, bad = 0, 0, []
    mats = chars.char_matrices
    for c in range(ncomp):
        b = allb[first[c]]
        imgs = np.einsum("j,wjk->wk", b, mats) % ctx.m
        stab = np.nonzero(np.all(imgs == b, axis=1))[0].tolist()
        if len(stab) * orbit_sizes[c] != len(W):
            bad.append(int(first[c]))
        G = FiniteGroup.subgroup_of(W.table, stab)
        total += len(G.classes)
        if orbit_sizes[c] % ell:
            degs = dixon_table(G).degrees
            ell_prime += sum(1 for d in degs if d % ell)
    return {"orbits": int(ncomp), "irr_N": total, "irr_ell_prime": ell_prime, "orbit_stabilizer_failures": bad}


# drivers ----------------------------------------------------------------------------

def _meta(ctx: Context) -> dict:
    d = d_ell(ctx.q, ctx.ell)
    return {"type": ctx.label, "q": ctx.q, "ell": ctx.ell, "d": d, "twisted": ctx.twisted, "version": __version__}


def _sigma_json(s) -> dict:
    return {"level": s.level, "unit": s.unit, "r": s.r}


def verify_equivariance(label: str, q: int, ell: int, twisted: bool = False, sigmas=None,
                        jobs: int = 1) -> VerificationReport:
    ctx = Context(label, q, ell, twisted)
    report = VerificationReport(_meta(ctx))
    ps = ctx.params
    for flag in ps.flags:
        report.add("exclusion", "flagged", {"reason": flag})
    report.params = [_param_json(p) for p in ps.params]
    eng = OmegaEngine(ctx)
    L = eng.L

    # irreducibility, degrees, injectivity
    seen = {}
    injective = []
    order = ctx.N.order
    ident = eng.identity_class
    for p in ps.params:
        cnt = eng.counts(p)
        nrm = eng.norm(cnt)
        target = np.zeros_like(nrm)
        target[0] = order
        if not np.array_equal(nrm, target):
            report.add("irreducible", "fail", {"param": _param_json(p)})
            continue
        red = eng.reduced(cnt)
        deg_row = red[ident]
        rel = ps.rel[p.lam]
        expect = rel.index * ps.chars.wlambda_table(rel).degrees[p.eta]
        if deg_row[0] != expect or deg_row[1:].any():
            report.add("degree", "fail", {"param": _param_json(p), "expected": expect})
        elif expect % ell == 0:
            report.add("ell_prime_degree", "fail", {"param": _param_json(p), "degree": int(expect)})
        key = red.tobytes()
        if key in seen:
            injective.append((seen[key], p))
        seen[key] = p
    report.add("irreducible", "pass" if report.status_of("irreducible") != "fail" else "fail",
               {"count": len(ps.params)})
    report.add("degree", "pass" if report.status_of("degree") != "fail" else "fail", None)
    report.add("ell_prime_degree", "pass" if report.status_of("ell_prime_degree") != "fail" else "fail", None)
    report.add("injective", "fail" if injective else "pass",
               [[_param_json(a), _param_json(b)] for a, b in injective[:3]] or None)

    # central characters
    zs = center_chars(ctx.rs, q, twisted)
    bad_z = []
    for p in ps.params:
        red = eng.reduced(eng.counts(p))
        deg = int(red[ident][0])
        for z in zs:
            c = eng.class_of_torus(z.exps)
            e = sum(a * b for a, b in zip(z.exps, p.lam.exps)) % ctx.m
            want = reduce_counts(L, _delta_vec(L, e * (L // ctx.m), deg))
            if not np.array_equal(red[c], want):
                bad_z.append({"param": _param_json(p), "z": list(z.exps)})
    report.add("central_characters", "fail" if bad_z else "pass", bad_z[:3] or {"center_order": len(zs)})

    # exhaustion
    cl = clifford_count(ctx)
    nclasses = len(ctx.classes)
    ok_total = cl["irr_N"] == nclasses and not cl["orbit_stabilizer_failures"]
    report.add("clifford_total", "pass" if ok_total else "fail",
               {"irr_N_from_orbits": cl["irr_N"], "classes_of_N": nclasses})
    report.add("exhaustion", "pass" if cl["irr_ell_prime"] == len(ps.params) else "fail",
               {"params": len(ps.params), "irr_ell_prime_N": cl["irr_ell_prime"]})

    # equivariance over generators of the Galois subgroup
    sigmas = sigmas or ctx.sigmas()
    for p in ps.params:
        eng.counts(p)  # fill the cache before any threads start

    def cell(s, p):
        res = param_action(ctx, s, p)
        if res.status == "indeterminate":
            return "indeterminate", {"param": _param_json(p), "sigma": _sigma_json(s), "reason": res.reason}
        lhs = eng.reduced(eng.counts(res.param))
        rhs = eng.reduced(eng.galois(eng.counts(p), s.unit % L))
        if np.array_equal(lhs, rhs):
            return "pass", None
        return "fail", {"param": _param_json(p), "image": _param_json(res.param), "sigma": _sigma_json(s)}

    cells = [(s, p) for s in sigmas for p in ps.params]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda sp: cell(*sp), cells))
    else:
        results = [cell(s, p) for s, p in cells]
    bad = [w for st, w in results if st == "fail"]
    indet = [w for st, w in results if st == "indeterminate"]
    report.add("equivariance", "fail" if bad else "pass",
               bad[:3] or {"sigmas": [_sigma_json(s) for s in sigmas], "level": L})
    if indet:
        report.add("eta_twist", "indeterminate", indet[:3])
    return report


def _delta_vec(L: int, k: int, mult: int) -> np.ndarray:
    v = np.zeros(L, dtype=np.int64)
    v[k % L] = mult
    return v


def verify_rationality_N1(label: str, q: int) -> VerificationReport:
    """Irr_{2'}(N1) for the twisted torus (q = 3 mod 4): irreducible, odd degree, rational."""
    if q % 4 != 3:
        raise ValueError("the twisted normalizer is used for q = 3 mod 4")
    ctx = Context(label, q, 2, twisted=True)
    report = VerificationReport(_meta(ctx))
    ps = ctx.params
    report.params = [_param_json(p) for p in ps.params]
    eng = OmegaEngine(ctx)
    order = ctx.N.order
    irr_bad, rat_bad = [], []
    for p in ps.params:
        cnt = eng.counts(p)
        nrm = eng.norm(cnt)
        if nrm[0] != order or nrm[1:].any():
            irr_bad.append(_param_json(p))
        red = eng.reduced(cnt)
        if red[:, 1:].any():
            row = int(np.nonzero(red[:, 1:].any(axis=1))[0][0])
            rat_bad.append({"param": _param_json(p), "class": row,
                            "value": Cyclotomic(eng.L, [int(c) for c in red[row]]).descend().to_json()})
    cl = clifford_count(ctx)
    report.add("irreducible", "fail" if irr_bad else "pass", irr_bad[:3] or {"count": len(ps.params)})
    report.add("exhaustion", "pass" if cl["irr_ell_prime"] == len(ps.params) else "fail",
               {"params": len(ps.params), "irr_odd_N1": cl["irr_ell_prime"]})
    if rat_bad:
        # outside the types covered by the rationality statement this is expected
        status = "flagged" if ctx.rs.kind == "C" else "fail"
        report.add("rational", status, rat_bad[:3] + [{"nonrational": len(rat_bad)}])
    else:
        report.add("rational", "pass", {"count": len(ps.params)})
    return report


# gamma * delta on C(lambda) in type C ------------------------------------------------

def gamma_delta_table(label: str, q: int) -> list:
    """For each lambda of order 2 with C(lambda) != 1 and each sigma in the 2-subgroup,
    the value of gamma * delta at the nontrivial element of C(lambda)."""
    rs = build(label)
    chars = TorusCharacters(rs, q)
    ext = ExtensionMap(rs, q, chars=chars)
    ctx = _LiteContext(rs, q, chars)
    m = chars.m
    half = m // 2
    lams = set()
    for bits in range(1, 2 ** rs.rank):
        exps = tuple(half * ((bits >> i) & 1) for i in range(rs.rank))
        lams.add(chars.canonical(TorusChar(exps, m)))
    level = sigma_level(q, lcm(ext.exp_level, 8))
    units = h_ell_subgroup(2, level)
    rows = []
    for lam in sorted(lams, key=lambda x: x.exps):
        rel = chars.rel_weyl(lam)
        cs = [c for c in rel.Clambda if c != 0]
        if not cs:
            continue
        for u in units:
            s = HEllElt.from_unit(level, u, 2)
            gam = gamma(ctx, lam, s)
            dlt = ext.delta_sigma(lam, s)
            for c in cs:
                d = dlt[c]
                if (2 * d).denominator != 1:
                    raise ArithmeticError("delta has order > 2")
                val = gam[c] * (-1 if d else 1)
                expect = 1 if q % 8 in (1, 7) else (-1) ** s.r
                rows.append({"lambda": lam.exps, "c": c, "unit": u, "level": level, "r": s.r,
                             "value": val, "expected": expect,
                             "sqrt_omega_q_moved": not _sqrt_omega_q_fixed(q, s)})
    return rows


@dataclass
class _LiteContext:
    rs: object
    q: int
    chars: TorusCharacters

    @property
    def W(self):
        return self.rs.weyl


def _sqrt_omega_q_fixed(q: int, sigma) -> bool:
    """Whether sigma fixes sqrt(omega q), omega = (-1)^((q-1)/2).

    For q = p^f with f odd, sqrt(omega q) is a rational multiple of the
    quadratic Gauss sum at p; for f even it is rational.
    """
    p, f = _prime_power(q)
    if f % 2 == 0:
        return True
    counts = [0] + [1 if pow(t, (p - 1) // 2, p) == 1 else -1 for t in range(1, p)]
    g = Cyclotomic.from_counts(p, counts)
    return act(sigma, g) == g


# the symplectic pairing at parameter level -------------------------------------------

def binary_digits(n: int) -> list:
    return [j for j in range(n.bit_length()) if (n >> j) & 1]


@dataclass(frozen=True)
class SpLabel:
    """An odd-degree character of Sp_2n(q): unipotent, or one member of a pair."""

    n: int
    series: frozenset  # subset of the binary digits of n; empty for unipotent
    index: int
    side: int = 0  # 0 or 1 within a pair
    kind: str = "unip"  # "unip", "ps" (principal series) or "cusp" (psi1/psi2 token)


def g_side(n: int, q: int) -> list:
    """Odd-degree characters of Sp_2n(q), q odd, grouped by Lusztig series over the binary digits J of n.

    Every series (subset I of J) holds 2^(sum_{j in J}(j+1)) characters; the
    non-unipotent ones pair up under eta -> (-1_C) eta.
    """
    J = binary_digits(n)
    size = 2 ** sum(j + 1 for j in J)
    out = []
    for mask in range(2 ** len(J)):
        I = frozenset(J[i] for i in range(len(J)) if (mask >> i) & 1)
        if not I:
            out += [SpLabel(n, I, k) for k in range(size)]
            continue
        kind = "cusp" if q % 4 == 3 and 0 in I else "ps"
        for k in range(size // 2):
            out += [SpLabel(n, I, k, 0, kind), SpLabel(n, I, k, 1, kind)]
    return out


@dataclass(frozen=True)
class WreathLabel:
    mu: SpLabel
    beta: int  # 0 for Xi(mu), 1 for Xi(mu) beta


@dataclass(frozen=True)
class ProductLabel:
    left: object  # label of Sp_2(n-m)
    right: object  # label of Sp_2m


def m_side(n: int, q: int) -> list:
    J = binary_digits(n)
    if len(J) == 1:
        half = n // 2
        return [WreathLabel(mu, b) for mu in g_side(half, q) for b in (0, 1)]
    top = 2 ** max(J)
    return [ProductLabel(a, b) for a in g_side(n - top, q) for b in g_side(top, q)]


def m_series(x) -> frozenset:
    if isinstance(x, WreathLabel):
        return frozenset(j + 1 for j in x.mu.series)
    return x.left.series | x.right.series


def m_involution(x):
    """The M-side counterpart of eta -> (-1_C) eta: flip every non-unipotent factor."""
    flip = lambda y: y if y.kind == "unip" else SpLabel(y.n, y.series, y.index, 1 - y.side, y.kind)
    if isinstance(x, WreathLabel):
        return WreathLabel(flip(x.mu), x.beta)
    return ProductLabel(flip(x.left), flip(x.right))


class SpRules:
    """The sigma-action on odd-degree labels: unipotent fixed, pairs swapped by gamma * delta or the psi tokens."""

    def __init__(self, q: int):
        self.q = q
        self._gd = {}
        self._data = {}

    def _setup(self, n: int):
        if n not in self._data:
            rs = build("A1" if n == 1 else f"C{n}")
            chars = TorusCharacters(rs, self.q)
            ext = ExtensionMap(rs, self.q, chars=chars)
            half = chars.m // 2
            cells = []
            for bits in range(1, 2 ** rs.rank):
                lam = TorusChar(tuple(half * ((bits >> i) & 1) for i in range(rs.rank)), chars.m)
                cs = [c for c in chars.rel_weyl(lam).Clambda if c != 0]
                if len(cs) == 1:
                    cells.append((lam, cs[0]))
            self._data[n] = (_LiteContext(rs, self.q, chars), ext, cells)
        return self._data[n]

    def gd_value(self, n: int, sigma) -> int:
        """gamma * delta at c for type C_n (A1 when n = 1), computed; all order-2 lambda must agree."""
        key = (n, sigma.unit, sigma.level)
        if key not in self._gd:
            ctx, ext, cells = self._setup(n)
            s = sigma if sigma.level % ext.exp_level == 0 else sigma.extend(lcm(sigma.level, ext.exp_level))
            vals = set()
            for lam, c in cells:
                d = ext.delta_sigma(lam, s)[c]
                vals.add(gamma(ctx, lam, s)[c] * (-1 if d else 1))
            if len(vals) != 1:
                raise ArithmeticError(f"gamma * delta depends on lambda for C{n}: {vals}")
            self._gd[key] = vals.pop()
        return self._gd[key]

    def swaps(self, y: SpLabel, sigma) -> bool:
        if y.kind == "unip":
            return False
        if y.kind == "cusp":
            return not _sqrt_omega_q_fixed(self.q, sigma)
        return self.gd_value(y.n, sigma) == -1

    def act_g(self, y: SpLabel, sigma) -> SpLabel:
        if self.swaps(y, sigma):
            return SpLabel(y.n, y.series, y.index, 1 - y.side, y.kind)
        return y

    def act_m(self, x, sigma):
        if isinstance(x, WreathLabel):
            return WreathLabel(self.act_g(x.mu, sigma), x.beta)
        return ProductLabel(self.act_g(x.left, sigma), self.act_g(x.right, sigma))


def sp_matching(n: int, q: int) -> dict:
    """A bijection G-side -> M-side sending unipotent to unipotent and pairs to involution orbits, series by series."""
    gs, ms = g_side(n, q), m_side(n, q)
    by_series = {}
    for x in ms:
        by_series.setdefault(m_series(x), []).append(x)
    match = {}
    for I in sorted({y.series for y in gs}, key=sorted):
        gl = [y for y in gs if y.series == I]
        ml = sorted(by_series.get(I, []), key=repr)
        if len(gl) != len(ml):
            raise ValueError(f"series {sorted(I)}: {len(gl)} labels for G, {len(ml)} for M")
        if not I:
            if any(m_involution(x) != x for x in ml):
                raise ValueError("unipotent M-side labels are not fixed by the involution")
            match.update(zip(gl, ml))
            continue
        orbits, done = [], set()
        for x in ml:
            if x in done:
                continue
            y = m_involution(x)
            if y == x:
                raise ValueError("non-unipotent M-side label fixed by the involution")
            done |= {x, y}
            orbits.append((x, y))
        for y in gl:
            a, b = orbits[y.index]
            match[y] = a if y.side == 0 else b
    return match


def sp_pairing(n: int, q: int, sigmas=None) -> VerificationReport:
    if q % 2 == 0 or q % 8 == 1:
        raise ValueError("the pairing is set up for odd q with q != 1 mod 8")
    if n < 2:
        raise ValueError("n >= 2")
    report = VerificationReport({"type": f"C{n}", "q": q, "ell": 2, "d": d_ell(q, 2), "twisted": False,
                                 "version": __version__})
    rules = SpRules(q)
    p, _ = _prime_power(q)
    level = lcm(8, 4 * p)
    for k in range(1, n + 1):
        level = lcm(level, rules._setup(k)[1].exp_level)
    if sigmas is None:
        sigmas = [HEllElt.from_unit(level, u, 2) for u in h_ell_subgroup(2, level)]
    try:
        match = sp_matching(n, q)
    except ValueError as exc:
        report.add("matching", "fail", {"reason": str(exc)})
        return report
    report.params = [{"g": repr(a), "m": repr(b)} for a, b in match.items()]
    report.add("matching", "pass", {"size": len(match)})
    inverse = {b: a for a, b in match.items()}
    if len(inverse) != len(match) or set(inverse) != set(m_side(n, q)):
        report.add("bijective", "fail", None)
        return report
    report.add("bijective", "pass", None)
    bad_eq, bad_count, bad_rule = [], [], []
    for s in sigmas:
        fixed_g = fixed_m = 0
        for y, x in match.items():
            gy = rules.act_g(y, s)
            mx = rules.act_m(x, s)
            if match[gy] != mx:
                bad_eq.append({"sigma": _sigma_json(s), "label": repr(y)})
            fixed_g += gy == y
            fixed_m += mx == x
        if fixed_g != fixed_m:
            bad_count.append({"sigma": _sigma_json(s), "fixed_g": fixed_g, "fixed_m": fixed_m})
        # pairs swap exactly when sqrt(omega q) moves
        moved = not _sqrt_omega_q_fixed(q, s)
        if rules.gd_value(n, s) != (-1 if moved else 1):
            bad_rule.append({"sigma": _sigma_json(s), "moved": moved})
    report.add("equivariance", "fail" if bad_eq else "pass", bad_eq[:3] or {"sigmas": len(sigmas)})
    report.add("fixed_counts", "fail" if bad_count else "pass", bad_count[:3] or None)
    report.add("swap_rule", "fail" if bad_rule else "pass", bad_rule[:3] or None)
    return report


def hecke_suite(label: str, q: int, ell: int, sigmas=None) -> VerificationReport:
    """For each R(lambda) of the parameter set: g-point vs Dixon, f-point rationality, eta^(sigma), induction."""
    ctx = Context(label, q, ell)
    report = VerificationReport(_meta(ctx))
    sigmas = sigmas or ctx.sigmas()
    for lam, rel in ctx.params.rel.items():
        model = ctx.model(lam)
        w = {"lambda": list(lam.exps)}
        if model is None:
            report.add("model", "flagged", w)
            continue
        report.add("r_dixon", "pass" if model.check_r_dixon() else "fail", w)
        report.add("schur", "pass" if model.check_schur() else "fail", w)
        report.add("induction", "pass" if model.check_induction() else "fail", w)
        rat = all(isinstance(x, Fraction) for vals in model.r_characters("f").values() for x in vals.values())
        report.add("f_rational", "pass" if rat else "fail", w)
        # with C(lambda) acting, the extension may need sqrt(q) on the c-coset
        report.add("f_rational_wlambda", "pass" if model.f_values_rational() else "flagged", w)
        table = ctx.chars.wlambda_table(rel)
        model.match_dixon()
        for s in sigmas:
            for k in range(len(table)):
                tw = eta_twist(model, k, s)
                want = _eta_sigma(table, k, s)
                if tw.status != "determinate":
                    report.add("eta_twist", "indeterminate", w)
                elif tw.eta != want:
                    report.add("eta_twist", "fail", {**w, "eta": k, "sigma": _sigma_json(s)})
    if report.status_of("eta_twist") in ("missing", "pass"):
        report.add("eta_twist", "pass", None)
    return report
