"""Exact scalar rings: rationals, cyclotomic extensions, truncated parameter rings.

Every coefficient in the algebra engine lives in one of these rings.  All
arithmetic is exact; there is no floating point anywhere in this module.
Rings expose a small uniform protocol (``zero``, ``one``, ``coerce``,
``is_zero``, ``to_str``/``from_str``) plus a finite Q-basis so that linear
algebra elsewhere can expand any element into rational coordinates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def _frac_from_str(s: str) -> Fraction:
    return Fraction(s.strip())


def frac_to_str(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class Rationals:
    """The field Q, with elements represented by ``fractions.Fraction``."""

    kind = "rationals"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return _frac_from_str(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def is_zero(self, c) -> bool:
        return c == 0

    def inv(self, c):
        return 1 / Fraction(c)

    # Q-basis protocol (dimension 1)
    def qq_dim(self) -> int:
        return 1

    def qq_coords(self, c):
        return [Fraction(c)]

    def from_qq_coords(self, coords):
        return Fraction(coords[0])

    def to_str(self, c) -> str:
        return frac_to_str(c)

    def from_str(self, s: str):
        return _frac_from_str(s)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = Rationals()


def _poly_divmod(num, den):
    """Divide rational coefficient lists (lowest degree first)."""
    num = list(num)
    out = [Fraction(0)] * (len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        q = num[i + len(den) - 1] / den[-1]
        out[i] = q
        for j, d in enumerate(den):
            num[i + j] -= q * d
    return out, num[: len(den) - 1]


def cyclotomic_polynomial(m: int):
    """Coefficients of the m-th cyclotomic polynomial, lowest degree first."""
    # x^m - 1 divided by the product of Phi_d over proper divisors d of m
    poly = [Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)]
    for d in range(1, m):
        if m % d == 0:
            phi_d = cyclotomic_polynomial(d)
            poly, rem = _poly_divmod(poly, phi_d)
            assert all(r == 0 for r in rem)
    return poly


class CycElement:
    """Element of Q(zeta_m), stored as a tuple of rational coordinates."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    def __add__(self, other):
        other = self.ring.coerce(other)
        return CycElement(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycElement(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self.ring.coerce(other))

    def __rsub__(self, other):
        return self.ring.coerce(other) - self

    def __mul__(self, other):
        other = self.ring.coerce(other)
        return self.ring._mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self.ring.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring.m, self.coeffs))

    def __repr__(self):
        return self.ring.to_str(self)


class CyclotomicRing:
    """Q(zeta_m) as Q[z]/Phi_m(z); supports exact inversion via xgcd."""

    kind = "cyclotomic"

    def __init__(self, m: int):
        self.m = m
        self.modulus = cyclotomic_polynomial(m)
        self.degree = len(self.modulus) - 1

    def zero(self):
        return CycElement(self, [0] * self.degree)

    def one(self):
        return self.coerce(1)

    def zeta(self, power: int = 1):
        """zeta_m^power reduced mod Phi_m."""
        coeffs = [Fraction(0)] * (power % self.m + 1)
        coeffs[-1] = Fraction(1)
        return CycElement(self, self._reduce(coeffs))

    def coerce(self, x):
        if isinstance(x, CycElement):
            if x.ring.m != self.m:
                raise TypeError("cyclotomic order mismatch")
            return x
        if isinstance(x, (int, Fraction)):
            coeffs = [Fraction(x)] + [Fraction(0)] * (self.degree - 1)
            return CycElement(self, coeffs)
        if isinstance(x, str):
            return self.from_str(x)
        raise TypeError(f"cannot coerce {x!r} into Q(zeta_{self.m})")

    def _reduce(self, coeffs):
        # modulus is monic, so z^deg = -(lower coefficients of Phi_m)
        coeffs = list(coeffs) + [Fraction(0)] * max(0, self.degree - len(coeffs))
        while len(coeffs) > self.degree:
            top = coeffs.pop()
            if top:
                for j in range(self.degree):
                    coeffs[len(coeffs) - self.degree + j] -= top * self.modulus[j]
        return coeffs

    def _mul(self, a: CycElement, b: CycElement):
        prod = [Fraction(0)] * (2 * self.degree - 1)
        for i, ai in enumerate(a.coeffs):
            if not ai:
                continue
            for j, bj in enumerate(b.coeffs):
                if bj:
                    prod[i + j] += ai * bj
        return CycElement(self, self._reduce(prod))

    def is_zero(self, c) -> bool:
        return all(x == 0 for x in c.coeffs)

    def inv(self, c: CycElement):
        """Inverse via extended Euclid in Q[z] against the modulus."""
        if self.is_zero(c):
            raise ZeroDivisionError("inverse of zero in cyclotomic ring")
        # maintain s*c + t*modulus = r
        r0, s0 = list(self.modulus), [Fraction(0)]
        r1, s1 = list(c.coeffs), [Fraction(1)]
        while len(r1) > 1 or r1[0] != 0:
            while len(r1) > 1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 1 and r1[0] == 0:
                break
            if len(r0) < len(r1):
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            q, rem = _poly_divmod(r0, r1)
            s_new = list(s0)
            s_new += [Fraction(0)] * max(0, len(q) + len(s1) - 1 - len(s_new))
            for i, qi in enumerate(q):
                for j, sj in enumerate(s1):
                    s_new[i + j] -= qi * sj
            r0, s0 = r1, s1
            r1 = rem if rem else [Fraction(0)]
            s1 = s_new
        # r0 is the gcd, a nonzero constant
        while len(r0) > 1 and r0[-1] == 0:
            r0.pop()
        assert len(r0) == 1 and r0[0] != 0, "modulus not coprime to element"
        g = r0[0]
        inv_coeffs = self._reduce([si / g for si in s0])
        return CycElement(self, inv_coeffs)

    def qq_dim(self) -> int:
        return self.degree

    def qq_coords(self, c):
        return list(c.coeffs)

    def from_qq_coords(self, coords):
        return CycElement(self, coords)

    def to_str(self, c) -> str:
        return "[" + ",".join(frac_to_str(x) for x in c.coeffs) + "]"

    def from_str(self, s: str):
        body = s.strip().strip("[]")
        parts = [p for p in body.split(",") if p.strip()]
        return CycElement(self, [Fraction(p) for p in parts])

    def __eq__(self, other):
        return isinstance(other, CyclotomicRing) and other.m == self.m

    def __hash__(self):
        return hash(("cyc", self.m))

    def __repr__(self):
        return f"QQ(zeta_{self.m})"


class TPoly:
    """Element of a truncated polynomial ring R[t_1..t_k]/m^(T+1).

    Terms of total degree above the truncation order are dropped on every
    product; the representation maps exponent tuples to base-ring elements.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if not ring.base.is_zero(c)}

    def __add__(self, other):
        other = self.ring.coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, self.ring.base.zero()) + c
            if self.ring.base.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return TPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return TPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self.ring.coerce(other))

    def __rsub__(self, other):
        return self.ring.coerce(other) - self

    def __mul__(self, other):
        other = self.ring.coerce(other)
        out = {}
        order = self.ring.order
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if sum(e) > order:
                    continue
                p = c1 * c2
                s = out.get(e)
                s = p if s is None else s + p
                out[e] = s
        return TPoly(self.ring, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self.ring.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.nvars, self.ring.order, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        return self.ring.to_str(self)


class TruncatedPolyRing:
    """R[t_1..t_nvars] modulo the (T+1)-st power of the maximal ideal (t_1..t_nvars)."""

    kind = "truncated_poly"

    def __init__(self, base, nvars: int, order: int):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.base = base
        self.nvars = nvars
        self.order = order
        self._monomials = None

    def zero(self):
        return TPoly(self, {})

    def one(self):
        return self.coerce(1)

    def t(self, i: int):
        """The i-th parameter t_i (1-based)."""
        if not 1 <= i <= self.nvars:
            raise ValueError("parameter index out of range")
        e = tuple(1 if j == i - 1 else 0 for j in range(self.nvars))
        if self.order < 1:
            return self.zero()
        return TPoly(self, {e: self.base.one()})

    def coerce(self, x):
        if isinstance(x, TPoly):
            if x.ring is self or x.ring == self:
                return x
            raise TypeError("truncated ring mismatch")
        if isinstance(x, str):
            return self.from_str(x)
        c = self.base.coerce(x)
        zero_e = (0,) * self.nvars
        if self.base.is_zero(c):
            return self.zero()
        return TPoly(self, {zero_e: c})

    def is_zero(self, c) -> bool:
        return not c.terms

    def inv(self, c: TPoly):
        """Inverse of a unit (invertible constant term) by Neumann series."""
        zero_e = (0,) * self.nvars
        c0 = c.terms.get(zero_e)
        if c0 is None or self.base.is_zero(c0):
            raise ZeroDivisionError("non-unit in truncated polynomial ring")
        c0_inv = self.base.inv(c0)
        n = self.coerce(c0_inv) * (self.coerce(c0) - c)  # nilpotent part, scaled
        acc = self.one()
        power = self.one()
        for _ in range(self.order):
            power = power * n
            if self.is_zero(power):
                break
            acc = acc + power
        return self.coerce(c0_inv) * acc

    def partial_t(self, c: TPoly, i: int):
        """Formal derivative with respect to t_i (1-based)."""
        out = {}
        for e, coeff in c.terms.items():
            if e[i - 1] == 0:
                continue
            e2 = tuple(v - 1 if j == i - 1 else v for j, v in enumerate(e))
            out[e2] = coeff * e[i - 1]
        return TPoly(self, out)

    def eval_zero(self, c: TPoly):
        """Set all parameters to zero, landing in the base ring."""
        return c.terms.get((0,) * self.nvars, self.base.zero())

    def monomials(self):
        """All exponent tuples of total degree <= order, sorted degree-lex."""
        if self._monomials is None:
            monos = []
            for total in range(self.order + 1):
                for e in _compositions(total, self.nvars):
                    monos.append(e)
            self._monomials = sorted(monos, key=lambda e: (sum(e), e))
        return self._monomials

    def qq_dim(self) -> int:
        return len(self.monomials()) * self.base.qq_dim()

    def qq_coords(self, c):
        b = self.base
        out = []
        for e in self.monomials():
            coeff = c.terms.get(e)
            if coeff is None:
                out.extend([Fraction(0)] * b.qq_dim())
            else:
                out.extend(b.qq_coords(coeff))
        return out

    def from_qq_coords(self, coords):
        b = self.base
        d = b.qq_dim()
        terms = {}
        for idx, e in enumerate(self.monomials()):
            chunk = coords[idx * d : (idx + 1) * d]
            if any(x != 0 for x in chunk):
                terms[e] = b.from_qq_coords(chunk)
        return TPoly(self, terms)

    def to_str(self, c) -> str:
        if not c.terms:
            return "0"
        parts = []
        for e in sorted(c.terms, key=lambda e: (sum(e), e)):
            parts.append("(" + ",".join(map(str, e)) + "):" + self.base.to_str(c.terms[e]))
        return "{" + "; ".join(parts) + "}"

    def from_str(self, s: str):
        s = s.strip()
        if s == "0":
            return self.zero()
        body = s.strip("{}")
        terms = {}
        for part in body.split(";"):
            part = part.strip()
            if not part:
                continue
            epart, cpart = part.split("):")
            e = tuple(int(x) for x in epart.strip("(").split(","))
            terms[e] = self.base.from_str(cpart)
        return TPoly(self, terms)

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedPolyRing)
            and other.base == self.base
            and other.nvars == self.nvars
            and other.order == self.order
        )

    def __hash__(self):
        return hash(("tpoly", self.base, self.nvars, self.order))

    def __repr__(self):
        return f"{self.base!r}[t1..t{self.nvars}]/m^{self.order + 1}"


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def ring_to_json(ring):
    if isinstance(ring, Rationals):
        return {"kind": "rationals"}
    if isinstance(ring, CyclotomicRing):
        return {"kind": "cyclotomic", "m": ring.m}
    if isinstance(ring, TruncatedPolyRing):
        return {"kind": "truncated_poly", "base": ring_to_json(ring.base), "nvars": ring.nvars, "order": ring.order}
    raise TypeError(f"unknown ring {ring!r}")


def ring_from_json(data):
    kind = data["kind"]
    if kind == "rationals":
        return QQ
    if kind == "cyclotomic":
        return CyclotomicRing(data["m"])
    if kind == "truncated_poly":
        return TruncatedPolyRing(ring_from_json(data["base"]), data["nvars"], data["order"])
    raise ValueError(f"unknown ring kind {kind}")
