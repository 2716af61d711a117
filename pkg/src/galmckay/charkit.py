"""Characters of small finite groups given by multiplication tables.

Character tables come from the Dixon-Schneider method: central characters are
found as common eigenvectors of the class matrices over a prime field F_p with
p = 1 mod exp(G), and every value is then recovered exactly from eigenvalue
multiplicities, which are small integers.  Results are checked against the
orthogonality relations in exact arithmetic before they are returned.
"""
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt

import numpy as np
from sympy import isprime, primitive_root

from .cyclo import Cyclotomic, act, lcm

DIXON_ORDER_BOUND = 20000
DIXON_CLASS_BOUND = 60


class FiniteGroup:
    """A finite group on 0..n-1 with identity 0, given by its multiplication table."""

    def __init__(self, table, labels=None, name: str = ""):
        self.table = np.asarray(table, dtype=np.int64)
        self.order = len(self.table)
        self.labels = list(labels) if labels is not None else list(range(self.order))
        self.name = name
        if not np.array_equal(self.table[0], np.arange(self.order)):
            raise ValueError("element 0 must be the identity")

    @classmethod
    def subgroup_of(cls, parent_table, elements, name: str = "") -> "FiniteGroup":
        """Restrict a parent table to a subgroup; labels are the parent indices."""
        elements = sorted(set(int(e) for e in elements))
        pos = {e: k for k, e in enumerate(elements)}
        sub = np.asarray(parent_table)[np.ix_(elements, elements)]
        try:
            table = np.vectorize(pos.__getitem__)(sub) if len(elements) > 1 else np.zeros((1, 1), dtype=np.int64)
        except KeyError:
            raise ValueError("elements do not form a subgroup") from None
        return cls(table, labels=elements, name=name)

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(self.table == 0)
        inv[rows] = cols
        return inv

    @cached_property
    def label_index(self) -> dict:
        return {lab: k for k, lab in enumerate(self.labels)}

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def power(self, a: int, e: int) -> int:
        r = 0
        for _ in range(e % self.element_orders[a] if self.element_orders[a] else e):
            r = int(self.table[r, a])
        return r

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        for g in range(self.order):
            x, k = g, 1
            while x != 0:
                x = int(self.table[x, g])
                k += 1
            orders[g] = k
        return orders

    @cached_property
    def exponent(self) -> int:
        e = 1
        for o in set(self.element_orders.tolist()):
            e = lcm(e, o)
        return e

    @cached_property
    def _classes(self):
        seen = np.full(self.order, -1)
        raw = []
        idx = np.arange(self.order)
        for g in range(self.order):
            if seen[g] >= 0:
                continue
            conj = np.unique(self.table[self.table[idx, g], self.inverse])
            seen[conj] = len(raw)
            raw.append(conj)
        # canonical order: size, then smallest member (shortlex word for Weyl-group labels)
        order = sorted(range(len(raw)), key=lambda c: (len(raw[c]), self.labels[raw[c][0]]))
        classes = [raw[c].tolist() for c in order]
        class_of = np.empty(self.order, dtype=np.int64)
        for k, c in enumerate(classes):
            class_of[c] = k
        return classes, class_of

    @property
    def classes(self) -> list:
        return self._classes[0]

    @property
    def class_of(self) -> np.ndarray:
        return self._classes[1]

    @property
    def class_sizes(self) -> list:
        return [len(c) for c in self.classes]

    @property
    def class_reps(self) -> list:
        return [c[0] for c in self.classes]

    def power_map(self, e: int) -> list:
        return [int(self.class_of[self.power(r, e)]) for r in self.class_reps]

    def is_abelian(self) -> bool:
        return np.array_equal(self.table, self.table.T)


class ClassFunction:
    """Values on the conjugacy classes of a group, in its canonical class order."""

    def __init__(self, group: FiniteGroup, values):
        self.group = group
        self.values = [v if isinstance(v, Cyclotomic) else Cyclotomic.rational(v) for v in values]

    def __call__(self, g: int) -> Cyclotomic:
        return self.values[int(self.group.class_of[g])]

    @property
    def degree(self) -> Cyclotomic:
        return self.values[0]

    def __add__(self, other):
        return ClassFunction(self.group, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        return ClassFunction(self.group, [a - b for a, b in zip(self.values, other.values)])

    def __mul__(self, other):
        if isinstance(other, ClassFunction):
            return ClassFunction(self.group, [a * b for a, b in zip(self.values, other.values)])
        return ClassFunction(self.group, [a * other for a in self.values])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ClassFunction) and self.group is other.group and self.values == other.values

    def __hash__(self):
        return hash(tuple(self.values))

    def conjugate(self) -> "ClassFunction":
        return ClassFunction(self.group, [v.conjugate() for v in self.values])

    def inner(self, other: "ClassFunction") -> Fraction:
        total = Cyclotomic.rational(0)
        for size, a, b in zip(self.group.class_sizes, self.values, other.values):
            total = total + a * b.conjugate() * size
        return (total / self.group.order).to_rational()

    def is_rational(self) -> bool:
        return all(v.is_rational() for v in self.values)

    def __repr__(self):
        return f"ClassFunction({self.values})"


class CharTable:
    def __init__(self, group: FiniteGroup, irreducibles: list):
        self.group = group
        self.irreducibles = irreducibles

    def __len__(self):
        return len(self.irreducibles)

    def __getitem__(self, k) -> ClassFunction:
        return self.irreducibles[k]

    @property
    def degrees(self) -> list:
        return [int(chi.degree.to_rational()) for chi in self.irreducibles]

    def index_of(self, chi: ClassFunction) -> int:
        for k, psi in enumerate(self.irreducibles):
            if psi.values == chi.values:
                return k
        raise KeyError("not an irreducible character of this group")


# linear algebra over F_p -------------------------------------------------

def _nullspace_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Basis (as columns) of the kernel of A over F_p."""
    A = A.copy() % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        others = np.nonzero(A[:, c])[0]
        for i in others:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-A[i, f]) % p
    return basis


def _solve_mod(B: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """X with B X = Y over F_p, B of full column rank."""
    k, d = B.shape
    aug = np.concatenate([B, Y], axis=1) % p
    r = 0
    piv = []
    for c in range(d):
        nz = np.nonzero(aug[r:, c])[0]
        k0 = r + nz[0]
        aug[[r, k0]] = aug[[k0, r]]
        aug[r] = aug[r] * pow(int(aug[r, c]), -1, p) % p
        for i in range(aug.shape[0]):
            if i != r and aug[i, c]:
                aug[i] = (aug[i] - aug[i, c] * aug[r]) % p
        piv.append(c)
        r += 1
    return aug[:d, d:]


def _charpoly_mod(X: np.ndarray, p: int) -> list:
    """Characteristic polynomial coefficients (leading first), Faddeev-LeVerrier mod p."""
    n = X.shape[0]
    coeffs = [1]
    M = np.zeros_like(X)
    ident = np.eye(n, dtype=np.int64)
    for k in range(1, n + 1):
        M = (X @ M + coeffs[-1] * ident) % p
        c = (-int(np.trace(X @ M % p)) * pow(k, -1, p)) % p
        coeffs.append(c)
    return coeffs


def _roots_mod(coeffs: list, p: int) -> list:
    xs = np.arange(p, dtype=np.int64)
    val = np.zeros(p, dtype=np.int64)
    for c in coeffs:
        val = (val * xs + c) % p
    return np.nonzero(val == 0)[0].tolist()


def _dixon_prime(exponent: int, order: int, nclasses: int = 0) -> int:
    # p > k keeps the Faddeev-LeVerrier divisions invertible
    p = exponent + 1
    while not (isprime(p) and p > 2 * isqrt(order) + 2 and p > nclasses):
        p += exponent
    return p


def dixon_table(G: FiniteGroup) -> CharTable:
    """Exact character table of G."""
    if G.order > DIXON_ORDER_BOUND:
        raise ValueError(f"|G| = {G.order} exceeds {DIXON_ORDER_BOUND}")
    k = len(G.classes)
    if k > DIXON_CLASS_BOUND:
        raise ValueError(f"{k} classes exceed {DIXON_CLASS_BOUND}")
    e = G.exponent
    p = _dixon_prime(e, G.order, k)
    sizes = G.class_sizes
    reps = G.class_reps
    cls = G.class_of
    inv = G.inverse

    # M_j[k, l] = #{x in C_j : x^{-1} g_l in C_k}
    mats = []
    for j in range(k):
        Mj = np.zeros((k, k), dtype=np.int64)
        xs = np.array(G.classes[j])
        for l, g in enumerate(reps):
            targets = cls[G.table[inv[xs], g]]
            np.add.at(Mj[:, l], targets, 1)
        mats.append(Mj % p)

    spaces = [np.eye(k, dtype=np.int64)]
    for Mj in mats:
        nxt = []
        for B in spaces:
            if B.shape[1] == 1:
                nxt.append(B)
                continue
            X = _solve_mod(B, Mj @ B % p, p)
            found = 0
            for r in _roots_mod(_charpoly_mod(X, p), p):
                Nsp = _nullspace_mod((X - r * np.eye(X.shape[0], dtype=np.int64)) % p, p)
                if Nsp.shape[1]:
                    nxt.append(B @ Nsp % p)
                    found += Nsp.shape[1]
            if found != B.shape[1]:
                raise ArithmeticError("eigenspace decomposition failed to split")
        spaces = nxt
        if all(B.shape[1] == 1 for B in spaces):
            break
    if len(spaces) != k or any(B.shape[1] != 1 for B in spaces):
        raise ArithmeticError("class matrices did not separate the characters")

    inv_class = [int(cls[inv[g]]) for g in reps]
    z = pow(int(primitive_root(p)), (p - 1) // e, p)
    orders = [int(G.element_orders[g]) for g in reps]
    chars = []
    for B in spaces:
        w = B[:, 0] * pow(int(B[0, 0]), -1, p) % p
        s = sum(int(w[l]) * int(w[inv_class[l]]) * pow(sizes[l], -1, p) for l in range(k)) % p
        d2 = G.order * pow(s, -1, p) % p
        deg = next(d for d in range(1, isqrt(G.order) + 1) if d * d % p == d2)
        modvals = [deg * int(w[l]) * pow(sizes[l], -1, p) % p for l in range(k)]
        values = []
        for l in range(k):
            o = orders[l]
            zo = pow(z, e // o, p)
            pm = [int(cls[G.power(reps[l], j)]) for j in range(o)]
            counts = []
            inv_o = pow(o, -1, p)
            for t in range(o):
                m_t = sum(modvals[pm[j]] * pow(zo, (-j * t) % o, p) for j in range(o)) * inv_o % p
                if m_t > deg:
                    raise ArithmeticError("eigenvalue multiplicity out of range; prime too small")
                counts.append(m_t)
            values.append(Cyclotomic.from_counts(o, counts))
        chars.append(ClassFunction(G, values))
    chars.sort(key=lambda c: (int(c.degree.to_rational()), [_sort_key(v) for v in c.values]))
    table = CharTable(G, chars)
    check_orthogonality(table)
    return table


def _sort_key(v: Cyclotomic):
    d = v.descend()
    return (0 if d.is_rational() else 1, [-x for x in d.coeffs], d.level)


def check_orthogonality(table: CharTable) -> None:
    G = table.group
    chars = table.irreducibles
    if sum(int(c.degree.to_rational()) ** 2 for c in chars) != G.order:
        raise ArithmeticError("degrees do not add up")
    for a, b in product(range(len(chars)), repeat=2):
        if a > b:
            continue
        ip = chars[a].inner(chars[b])
        if ip != (1 if a == b else 0):
            raise ArithmeticError(f"orthogonality fails for characters {a}, {b}")


def linear_chars(invariant_factors) -> list:
    """All characters of prod Z/d_i as exponent vectors b (value zeta_{d_i}^{b_i a_i})."""
    ranges = [range(d) for d in invariant_factors]
    return [tuple(b) for b in product(*ranges)]


def linear_char_value(invariant_factors, b, a) -> Cyclotomic:
    e = 1
    for d in invariant_factors:
        e = lcm(e, d)
    k = sum(bi * ai * (e // d) for bi, ai, d in zip(b, a, invariant_factors)) % e if invariant_factors else 0
    return Cyclotomic.root(e, k)


def restrict(chi: ClassFunction, H: FiniteGroup) -> ClassFunction:
    """Restriction to a subgroup whose labels are element indices of chi's group."""
    G = chi.group
    return ClassFunction(H, [chi(_to_parent(G, H.labels[r])) for r in H.class_reps])


def induce(psi: ClassFunction, G: FiniteGroup) -> ClassFunction:
    """Frobenius induction from a subgroup H (labels = element indices of G)."""
    H = psi.group
    sums = [Cyclotomic.rational(0) for _ in G.classes]
    for h in range(H.order):
        g = _to_parent(G, H.labels[h])
        c = int(G.class_of[g])
        sums[c] = sums[c] + psi(h)
    vals = [s * Fraction(G.order, size * H.order) for s, size in zip(sums, G.class_sizes)]
    return ClassFunction(G, vals)


def _to_parent(G: FiniteGroup, label) -> int:
    if G.labels == list(range(G.order)):
        return int(label)
    return G.label_index[label]


def act_classfunction(sigma, chi: ClassFunction) -> ClassFunction:
    return ClassFunction(chi.group, [act(sigma, v) for v in chi.values])


def rationality(chi: ClassFunction) -> bool:
    return chi.is_rational()


def det_canonical_extension(H: FiniteGroup, R: list, complement: list, theta: dict) -> ClassFunction:
    """The extension of theta from R to H = R C whose determinant is 1 on the complement C.

    ``theta`` maps elements of R to values; H/R must be an elementary abelian
    2-group with complement C.  For linear theta the extension is theta(r) on
    r c; for odd degree it is the unique extension whose determinant is the
    linear extension of det(theta) trivial on C.
    """
    table = dixon_table(H)
    Rset = set(R)
    deg = theta[0]
    candidates = []
    for chi in table.irreducibles:
        if chi.degree != deg:
            continue
        if all(chi(r) == theta[r] for r in R):
            candidates.append(chi)
    if not candidates:
        raise ValueError("theta does not extend")
    if deg == 1:
        for chi in candidates:
            if all(chi(c) == 1 for c in complement):
                return chi
        raise ValueError("no extension is trivial on the complement")
    for chi in candidates:
        if all(determinant(H, chi, c) == 1 for c in complement if c not in Rset):
            return chi
    raise ValueError("no extension has the canonical determinant")


def eigen_multiplicities(G: FiniteGroup, chi: ClassFunction, g: int) -> list:
    """Multiplicity of zeta_o^t as an eigenvalue of g in a representation affording chi."""
    o = int(G.element_orders[g])
    out = []
    for t in range(o):
        s = Cyclotomic.rational(0)
        for j in range(o):
            s = s + chi(G.power(g, j)) * Cyclotomic.root(o, -j * t)
        out.append(int((s / o).to_rational()))
    return out


def determinant(G: FiniteGroup, chi: ClassFunction, g: int) -> Cyclotomic:
    o = int(G.element_orders[g])
    mult = eigen_multiplicities(G, chi, g)
    return Cyclotomic.root(o, sum(t * m for t, m in enumerate(mult)) % o)
