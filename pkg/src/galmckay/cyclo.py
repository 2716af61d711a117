"""Exact arithmetic in cyclotomic fields and the Galois groups acting on them.

Elements of Q(zeta_n) are stored in the power basis 1, z, ..., z^(phi(n)-1)
modulo the n-th cyclotomic polynomial, as integer numerators over one common
denominator.  Mixed-level arithmetic lifts both operands to the lcm.
"""
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import cyclotomic_poly, factorint, primitive_root, totient
from sympy.abc import x as _x


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def _table(n: int) -> np.ndarray:
    """Row k holds zeta_n^k in the power basis (integer entries, Phi_n monic)."""
    deg = phi(n)
    poly = [int(c) for c in reversed(cyclotomic_poly(n, _x, polys=True).all_coeffs())]
    rows = np.zeros((n, deg), dtype=np.int64)
    cur = [0] * deg
    cur[0] = 1
    for k in range(n):
        rows[k] = cur
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * poly[i]
    return rows


def reduce_counts(n: int, counts) -> np.ndarray:
    """Integer power-basis vector of sum_k counts[k] * zeta_n^k."""
    return np.asarray(counts, dtype=np.int64) @ _table(n)


def _norm(nums, den):
    g = den
    for c in nums:
        if c:
            g = gcd(g, c)
            if g == 1:
                break
    if den < 0:
        g = -g
    if g != 1:
        nums = tuple(c // g for c in nums)
        den //= g
    return tuple(nums), den


class Cyclotomic:
    __slots__ = ("level", "nums", "den")

    def __init__(self, level: int, coeffs, den: int = 1):
        deg = phi(level)
        if den == 1 and any(isinstance(c, Fraction) for c in coeffs):
            fr = [Fraction(c) for c in coeffs]
            den = 1
            for c in fr:
                den = lcm(den, c.denominator)
            coeffs = [int(c * den) for c in fr]
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) != deg:
            raise ValueError(f"level {level} needs {deg} coefficients, got {len(coeffs)}")
        self.level = level
        self.nums, self.den = _norm(coeffs, den)

    # constructors
    @classmethod
    def rational(cls, value, level: int = 1) -> "Cyclotomic":
        v = Fraction(value)
        nums = [0] * phi(level)
        nums[0] = v.numerator
        return cls(level, nums, v.denominator)

    @classmethod
    def root(cls, n: int, k: int = 1) -> "Cyclotomic":
        return cls(n, [int(c) for c in _table(n)[k % n]])

    @classmethod
    def from_counts(cls, n: int, counts, den: int = 1) -> "Cyclotomic":
        return cls(n, [int(c) for c in reduce_counts(n, counts)], den)

    @property
    def coeffs(self) -> list:
        return [Fraction(c, self.den) for c in self.nums]

    def lift(self, level: int) -> "Cyclotomic":
        if level == self.level:
            return self
        if level % self.level:
            raise ValueError(f"cannot lift level {self.level} to {level}")
        step = level // self.level
        tab = _table(level)
        acc = np.zeros(phi(level), dtype=object)
        for j, c in enumerate(self.nums):
            if c:
                acc += c * tab[(j * step) % level].astype(object)
        return Cyclotomic(level, list(acc), self.den)

    def _coerce(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        n = lcm(self.level, other.level)
        return self.lift(n), other.lift(n)

    def __add__(self, other):
        if not isinstance(other, (Cyclotomic, int, Fraction)):
            return NotImplemented
        a, b = self._coerce(other)
        den = lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyclotomic(a.level, [x * fa + y * fb for x, y in zip(a.nums, b.nums)], den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.level, [-c for c in self.nums], self.den)

    def __sub__(self, other):
        if not isinstance(other, (Cyclotomic, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return Cyclotomic(self.level, [c * f.numerator for c in self.nums], self.den * f.denominator)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._coerce(other)
        n = a.level
        deg = phi(n)
        prod = [0] * (2 * deg - 1)
        for i, x in enumerate(a.nums):
            if x:
                for j, y in enumerate(b.nums):
                    if y:
                        prod[i + j] += x * y
        out = prod[:deg]
        tab = _table(n)
        for k in range(deg, len(prod)):
            c = prod[k]
            if c:
                row = tab[k % n]
                for i in range(deg):
                    if row[i]:
                        out[i] += c * int(row[i])
        return Cyclotomic(n, out, a.den * b.den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclotomic.rational(1, self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, u: int) -> "Cyclotomic":
        n = self.level
        if gcd(u, n) != 1:
            raise ValueError(f"{u} is not a unit mod {n}")
        counts = [0] * n
        for j, c in enumerate(self.nums):
            if c:
                counts[(j * u) % n] += c
        tab = _table(n).astype(object)
        return Cyclotomic(n, list(np.asarray(counts, dtype=object) @ tab), self.den)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1)

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.level
        others = Cyclotomic.rational(1, n)
        for u in range(2, n):
            if gcd(u, n) == 1:
                others = others * self.galois(u)
        norm = (self * others).to_rational()
        return others * (1 / norm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return Fraction(self.nums[0], self.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.nums[0], self.den) == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._coerce(other)
        return a.den == b.den and a.nums == b.nums

    def descend(self) -> "Cyclotomic":
        """The same value written at its conductor (the least level containing it)."""
        cur = self
        changed = True
        while changed and cur.level > 1:
            changed = False
            for p in factorint(cur.level):
                down = _descend_once(cur, p)
                if down is not None:
                    cur = down
                    changed = True
                    break
        return cur

    def __hash__(self):
        d = self.descend()
        return hash((d.level, d.nums, d.den))

    def to_complex(self) -> complex:
        """Floating-point image under zeta_n -> exp(2 pi i / n); for debugging only."""
        import cmath

        z = cmath.exp(2j * cmath.pi / self.level)
        return sum(c * z**j for j, c in enumerate(self.nums)) / self.den

    def to_json(self):
        return [self.level, [str(c) for c in self.coeffs]]

    @classmethod
    def from_json(cls, data) -> "Cyclotomic":
        n, coeffs = data
        return cls(int(n), [Fraction(c) for c in coeffs])

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if j == 0 else f"{c}*z{self.level}^{j}")
        return " + ".join(terms) if terms else "0"


def _descend_once(x: Cyclotomic, p: int):
    """Write x at level n/p if it lies there, using the relative trace."""
    n = x.level
    m = n // p
    counts = [0] * max(m, 1)
    if m % p == 0:
        if x.galois(1 + m) != x:
            return None
        # the trace over {1 + i m} keeps exactly the exponents divisible by p
        for j, c in enumerate(x.nums):
            if c and j % p == 0:
                counts[j // p] += c
        scale = 1
    else:
        if p > 2 and x.galois(_crt(1, m, int(primitive_root(p)), p)) != x:
            return None
        # zeta_n^j = zeta_m^a zeta_p^b and the trace of zeta_p^b is known
        inv_p, inv_m = pow(p, -1, m) if m > 1 else 0, pow(m, -1, p)
        for j, c in enumerate(x.nums):
            if c:
                a, b = (j * inv_p) % m if m > 1 else 0, (j * inv_m) % p
                if p == 2:
                    counts[a] += -c if b else c
                else:
                    counts[a] += c * (p - 1) if b == 0 else -c
        scale = 1 if p == 2 else p - 1
    y = Cyclotomic.from_counts(m, counts, x.den * scale)
    return Cyclotomic(1, list(y.nums), y.den) if m == 2 else y


def _crt(a: int, m: int, b: int, n: int) -> int:
    return (a + m * ((b - a) * pow(m, -1, n) % n)) % (m * n)


def crt(residues, moduli) -> int:
    r, m = 0, 1
    for a, n in zip(residues, moduli):
        r = _crt(r, m, a % n, n)
        m *= n
    return r


class GaloisElt:
    """The automorphism zeta_n -> zeta_n^unit of Q(zeta_n)."""

    __slots__ = ("level", "unit")

    def __init__(self, level: int, unit: int):
        unit %= level
        if gcd(unit, level) != 1:
            raise ValueError(f"{unit} is not a unit mod {level}")
        self.level = level
        self.unit = unit if level > 1 else 1

    def __mul__(self, other: "GaloisElt") -> "GaloisElt":
        n = lcm(self.level, other.level)
        return GaloisElt(n, _crt_lift(self.unit, self.level, n) * _crt_lift(other.unit, other.level, n))

    def __eq__(self, other):
        return isinstance(other, GaloisElt) and (self.level, self.unit) == (other.level, other.unit)

    def __hash__(self):
        return hash((self.level, self.unit))

    def __repr__(self):
        return f"GaloisElt({self.level}, {self.unit})"


def _crt_lift(u: int, n: int, big: int) -> int:
    """A unit mod big that reduces to u mod n (n divides big)."""
    if big % n:
        raise ValueError(f"{n} does not divide {big}")
    for k in range(big // n):
        v = u + k * n
        if gcd(v, big) == 1:
            return v % big
    raise ValueError("no unit lift")


def ell_split(n: int, ell: int):
    """Return (ell-part, ell'-part) of n."""
    a = 1
    while n % ell == 0:
        n //= ell
        a *= ell
    return a, n


class HEllElt:
    """An element of the Galois subgroup acting as zeta -> zeta^(ell^r) on ell'-roots of unity."""

    __slots__ = ("base", "ell", "r")

    def __init__(self, base: GaloisElt, ell: int, r: int):
        _, rest = ell_split(base.level, ell)
        if (base.unit - pow(ell, r, rest)) % rest:
            raise ValueError(f"unit {base.unit} is not ell^{r} on the {ell}'-part of level {base.level}")
        self.base = base
        self.ell = ell
        self.r = r

    @classmethod
    def from_unit(cls, level: int, unit: int, ell: int) -> "HEllElt":
        base = GaloisElt(level, unit)
        _, rest = ell_split(level, ell)
        order = 1
        if rest > 1:
            v = ell % rest
            while v != 1:
                v = v * ell % rest
                order += 1
        for r in range(order):
            if (base.unit - pow(ell, r, rest)) % rest == 0:
                return cls(base, ell, r)
        raise ValueError(f"unit {unit} mod {level} does not lie in the {ell}-subgroup")

    @property
    def level(self) -> int:
        return self.base.level

    @property
    def unit(self) -> int:
        return self.base.unit

    def extend(self, level: int) -> "HEllElt":
        """Same automorphism seen at a larger level; ell'-part extended by ell^r."""
        big = lcm(level, self.level)
        pa, _ = ell_split(big, self.ell)
        _, rest = ell_split(big, self.ell)
        own_pa, _ = ell_split(self.level, self.ell)
        ell_unit = self.unit % own_pa if own_pa > 1 else 1
        ell_unit = _crt_lift(ell_unit, own_pa, pa) if pa > 1 else 0
        rest_unit = pow(self.ell, self.r, rest) if rest > 1 else 0
        unit = crt([ell_unit, rest_unit], [pa, rest])
        return HEllElt(GaloisElt(big, unit), self.ell, self.r)

    def __mul__(self, other: "HEllElt") -> "HEllElt":
        if self.ell != other.ell:
            raise ValueError("different primes")
        big = lcm(self.level, other.level)
        a, b = self.extend(big), other.extend(big)
        return HEllElt(GaloisElt(big, a.unit * b.unit), self.ell, a.r + b.r)

    def __repr__(self):
        return f"HEllElt(level={self.level}, unit={self.unit}, ell={self.ell}, r={self.r})"


def act(sigma, x: Cyclotomic) -> Cyclotomic:
    """Apply a Galois automorphism (GaloisElt or HEllElt) to a cyclotomic value."""
    if isinstance(sigma, HEllElt):
        if sigma.level % x.level:
            sigma = sigma.extend(x.level)
        sigma = sigma.base
    if sigma.level % x.level:
        x = x.descend()
        if sigma.level % x.level:
            raise ValueError(f"level {x.level} is not covered by the automorphism of level {sigma.level}")
    return x.galois(sigma.unit % x.level if x.level > 1 else 1)


def d_ell(q: int, ell: int) -> int:
    """Multiplicative order of q mod ell (mod 4 when ell = 2)."""
    if q % ell == 0:
        raise ValueError(f"{ell} divides q={q}")
    mod = 4 if ell == 2 else ell
    v, d = q % mod, 1
    while v != 1:
        v = v * q % mod
        d += 1
    return d


@lru_cache(maxsize=None)
def sqrt_as_cyclotomic(p: int) -> Cyclotomic:
    """The positive square root of the prime p, via quadratic Gauss sums."""
    if p == 2:
        return Cyclotomic.root(8, 1) + Cyclotomic.root(8, 7)
    counts = [0] * p
    for t in range(1, p):
        counts[t] = 1 if pow(t, (p - 1) // 2, p) == 1 else -1
    g = Cyclotomic.from_counts(p, counts)
    if p % 4 == 1:
        return g
    return -Cyclotomic.root(4, 1) * g


def _is_square_mod(a: int, ell: int) -> bool:
    a %= ell
    return a == 0 or pow(a, (ell - 1) // 2, ell) == 1


def sqrt_fixed(p: int, sigma: HEllElt) -> bool:
    """Whether sigma fixes sqrt(p)."""
    if p == sigma.ell:
        raise ValueError("p must differ from ell")
    if sigma.ell == 2:
        # the 2-part of the unit matters; act directly
        s = sqrt_as_cyclotomic(p)
        return act(sigma, s) == s
    return sigma.r % 2 == 0 or _is_square_mod(p, sigma.ell)


def _unit_group_gens(pa: int, ell: int) -> list:
    """Generators of (Z/pa)^x for a prime power pa = ell^a."""
    if pa <= 2:
        return []
    if ell == 2:
        return [pa - 1, 5] if pa >= 8 else [pa - 1]
    return [int(primitive_root(pa))]


def h_ell_generators(ell: int, n: int) -> list:
    """Generators of the image at level n of the ell-subgroup of the Galois group."""
    pa, rest = ell_split(n, ell)
    gens = []
    for g in _unit_group_gens(pa, ell):
        unit = crt([g, 1], [pa, rest])
        gens.append(HEllElt(GaloisElt(n, unit), ell, 0))
    if rest > 1 and ell % rest != 1:
        unit = crt([1, ell % rest], [pa, rest])
        gens.append(HEllElt(GaloisElt(n, unit), ell, 1))
    if not gens:
        gens.append(HEllElt(GaloisElt(n, 1), ell, 0))
    return gens


def h_ell_subgroup(ell: int, n: int) -> list:
    """All units mod n lying in the ell-subgroup (by CRT enumeration)."""
    pa, rest = ell_split(n, ell)
    powers = set()
    if rest > 1:
        v = 1
        while v not in powers:
            powers.add(v)
            v = v * ell % rest
    else:
        powers = {0}
    return sorted(u for u in range(n) if gcd(u, n) == 1 and (rest == 1 or u % rest in powers)) or [0]


def is_rational(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return True
    return x.is_rational()


def root_of_unity(n: int, k: int) -> Cyclotomic:
    return Cyclotomic.root(n, k)
