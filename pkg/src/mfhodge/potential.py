"""Polynomial potentials and their singularity data.

A potential W in x_1..x_N doubles as a constant-coefficient polyvector field
via x_j <-> d/d(eps_j).  This module computes the Jacobian ring by truncated
row reduction (basis, Milnor number, normal forms, Hessian class), the
residue pairing with socle normalization, and mini-versal deformations over a
truncated parameter ring.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction

from .linalg import Echelon
from .scalars import QQ, TruncatedPolyRing


class NotIsolatedError(ValueError):
    """The Jacobian quotient fails to stabilize at the given truncation."""


class Potential:
    """Polynomial in x_1..x_N with exponent-vector term map.

    The base potential of a singularity carries no constant or linear terms;
    deformed potentials may (see ``DeformedPotential``), controlled by the
    ``allow_low_terms`` flag.
    """

    def __init__(self, N: int, terms=None, ring=QQ, allow_low_terms=False):
        self.N = N
        self.ring = ring
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(v) for v in e)
                if len(e) != N or any(v < 0 for v in e):
                    raise ValueError(f"bad exponent vector {e} for N={N}")
                c = ring.coerce(c)
                if not ring.is_zero(c):
                    clean[e] = c
        self.terms = clean
        if not allow_low_terms:
            for e in clean:
                if sum(e) < 2:
                    raise ValueError("potential must have no constant or linear terms")

    @property
    def max_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Potential"):
        if other.N != self.N or other.ring != self.ring:
            raise ValueError("potential mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, self.ring.zero()) + c
            if self.ring.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return Potential(self.N, out, self.ring, allow_low_terms=True)

    def scale(self, c):
        c = self.ring.coerce(c)
        return Potential(self.N, {e: c * v for e, v in self.terms.items()}, self.ring, allow_low_terms=True)

    def multiply(self, other: "Potential"):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, self.ring.zero()) + c1 * c2
                out[e] = s
        return Potential(self.N, out, self.ring, allow_low_terms=True)

    def partial(self, j: int) -> "Potential":
        """d/dx_j, 1-based."""
        out = {}
        for e, c in self.terms.items():
            k = e[j - 1]
            if k == 0:
                continue
            e2 = tuple(v - 1 if i == j - 1 else v for i, v in enumerate(e))
            out[e2] = c * self.ring.coerce(k)
        return Potential(self.N, out, self.ring, allow_low_terms=True)

    def hessian_determinant(self) -> "Potential":
        """det(d^2 W / dx_i dx_j) as a polynomial."""
        n = self.N
        second = [[self.partial(i + 1).partial(j + 1) for j in range(n)] for i in range(n)]
        zero = Potential(n, {}, self.ring, allow_low_terms=True)
        total = zero
        for perm in itertools.permutations(range(n)):
            sgn = _perm_sign(perm)
            prod = Potential(n, {tuple([0] * n): self.ring.one()}, self.ring, allow_low_terms=True)
            for i in range(n):
                prod = prod.multiply(second[i][perm[i]])
            total = total + (prod if sgn > 0 else prod.scale(-1))
        return total

    def substitute_linear(self, matrix):
        """W(M x) for an N x N matrix over the same ring."""
        n = self.N
        # images of x_i as linear potentials
        out = Potential(n, {}, self.ring, allow_low_terms=True)
        for e, c in self.terms.items():
            prod = Potential(n, {tuple([0] * n): c}, self.ring, allow_low_terms=True)
            for i in range(n):
                img = Potential(
                    n,
                    {tuple(1 if k == j else 0 for k in range(n)): matrix[i][j] for j in range(n)},
                    self.ring,
                    allow_low_terms=True,
                )
                for _ in range(e[i]):
                    prod = prod.multiply(img)
            out = out + prod
        return out

    def truncate(self, max_total_degree: int) -> "Potential":
        return Potential(
            self.N,
            {e: c for e, c in self.terms.items() if sum(e) <= max_total_degree},
            self.ring,
            allow_low_terms=True,
        )

    def derivative_at_zero(self, gens) -> object:
        """Coefficient of prod x_{gens} in W times the matching multinomial count."""
        counts = [0] * self.N
        for j in gens:
            counts[j - 1] += 1
        e = tuple(counts)
        c = self.terms.get(e)
        if c is None:
            return self.ring.zero()
        scale = 1
        for k in counts:
            scale *= math.factorial(k)
        return c * self.ring.coerce(scale)

    def __eq__(self, other):
        return (
            isinstance(other, Potential)
            and other.N == self.N
            and other.ring == self.ring
            and other.terms == self.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            mono = "*".join(f"x{i + 1}^{k}" if k > 1 else f"x{i + 1}" for i, k in enumerate(e) if k)
            mono = mono or "1"
            bits.append(f"({self.ring.to_str(self.terms[e])})*{mono}")
        return " + ".join(bits)

    def to_json(self):
        return {
            "N": self.N,
            "terms": [
                {"e": list(e), "c": self.ring.to_str(c)}
                for e, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))
            ],
        }


_TERM_RE = re.compile(r"\s*([+-])?\s*([0-9]+(?:/[0-9]+)?)?\s*((?:\*?\s*x[0-9]+(?:\^[0-9]+)?)*)\s*")


def parse_potential(text: str, N=None, ring=QQ, allow_low_terms=False) -> Potential:
    """Parse strings like ``x1^3 + x2^3`` or ``2*x1^2*x2 - x2^4``."""
    text = text.strip()
    if not text:
        raise ValueError("empty potential string")
    pos = 0
    terms = {}
    seen_vars = 0
    raw = []
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse potential at: {text[pos:]!r}")
        sign, coeff, monos = m.group(1), m.group(2), m.group(3)
        if sign is None and pos > 0:
            raise ValueError(f"missing +/- between terms near: {text[pos:]!r}")
        c = Fraction(coeff) if coeff else Fraction(1)
        if sign == "-":
            c = -c
        powers = {}
        for vm in re.finditer(r"x([0-9]+)(?:\^([0-9]+))?", monos):
            idx = int(vm.group(1))
            p = int(vm.group(2)) if vm.group(2) else 1
            powers[idx] = powers.get(idx, 0) + p
            seen_vars = max(seen_vars, idx)
        raw.append((c, powers))
        pos = m.end()
    n = N if N is not None else seen_vars
    if n == 0:
        raise ValueError("potential mentions no variables")
    for c, powers in raw:
        if any(i > n for i in powers):
            raise ValueError("variable index exceeds N")
        e = tuple(powers.get(i + 1, 0) for i in range(n))
        prev = terms.get(e, Fraction(0))
        terms[e] = prev + c
    return Potential(n, {e: ring.coerce(c) for e, c in terms.items()}, ring, allow_low_terms=allow_low_terms)


def _perm_sign(perm) -> int:
    sgn = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sgn = -sgn
    return sgn


def monomials_up_to(N: int, X: int):
    """Exponent tuples of total degree <= X, degree-lex ascending."""
    out = []
    for total in range(X + 1):
        out.extend(sorted(_fixed_degree(N, total)))
    return out


def _fixed_degree(N, total):
    if N == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _fixed_degree(N - 1, total - first):
            yield (first,) + rest


def symmetrize_component(W: Potential, l: int):
    """Degree-l component of the symmetrized tensor operator of W.

    Returns {word: coefficient} where a word (j_1..j_l) stands for the tensor
    d/d(eps_{j_1}) x ... x d/d(eps_{j_l}); each degree-l monomial of W with
    exponents a contributes every distinct arrangement scaled by prod(a_i!).
    """
    out = {}
    for e, c in W.terms.items():
        if sum(e) != l:
            continue
        scale = 1
        for k in e:
            scale *= math.factorial(k)
        base = []
        for j, k in enumerate(e, start=1):
            base.extend([j] * k)
        for word in set(itertools.permutations(base)):
            coeff = c * W.ring.coerce(scale)
            prev = out.get(word)
            out[word] = coeff if prev is None else prev + coeff
    return out


class JacobianData:
    """Linear-algebra presentation of Jac(W) = Q[[x]]/(dW) at truncation X."""

    def __init__(self, W, X, monomial_basis, milnor, echelon, hessian_class, stabilization_certificate):
        self.W = W
        self.X = X
        self.monomial_basis = monomial_basis
        self.milnor = milnor
        self._echelon = echelon
        self.hessian_class = hessian_class
        self.stabilization_certificate = stabilization_certificate

    def to_json(self):
        return {
            "milnor": self.milnor,
            "basis": [list(e) for e in self.monomial_basis],
            "truncation": self.X,
            "stabilized": self.stabilization_certificate,
            "hessian_class": {str(list(e)): str(c) for e, c in self.hessian_class.items()},
        }


def _jacobian_echelon(W: Potential, X: int):
    """Echelon of the ideal image (m * dW) inside Q[x]/m^(X+1)."""
    monos = monomials_up_to(W.N, X)
    index = {e: i for i, e in enumerate(monos)}
    # priority: eliminate high degree-lex monomials first, keep low ones as basis
    prio = {e: (sum(e), e) for e in monos}
    ech =Echelon(priority=lambda e: prio[e])
    partials = [W.partial(j) for j in range(1, W.N + 1)]
    for e in monos:
        for dW in partials:
            vec = {}
            for e2, c in dW.terms.items():
                tot = tuple(a + b for a, b in zip(e, e2))
                if sum(tot) > X:
                    continue
                vec[tot] = vec.get(tot, Fraction(0)) + Fraction(c)
            vec = {k: v for k, v in vec.items() if v}
            if vec:
                ech.insert(vec)
    basis = [e for e in monos if e not in ech.rows]
    return ech, basis


def jacobian_data(W: Potential, X=None) -> JacobianData:
    """Compute Jac(W) data, certifying stabilization against truncation X+1.

    Raises NotIsolatedError when the basis does not stabilize or when basis
    monomials of degree >= X remain (the quotient then still sees m^X).
    """
    if W.is_zero():
        raise ValueError("potential must be nonzero")
    if W.ring != QQ:
        raise ValueError("jacobian data is computed over the rationals")
    if X is None:
        X = 2 * W.max_degree
    ech, basis = _jacobian_echelon(W, X)
    ech2, basis2 = _jacobian_echelon(W, X + 1)
    if basis != basis2:
        raise NotIsolatedError(f"not isolated at this truncation (X={X})")
    if any(sum(e) >= X for e in basis):
        raise NotIsolatedError(f"not isolated at this truncation (X={X})")
    hess = W.hessian_determinant().truncate(X)
    hess_vec = {e: Fraction(c) for e, c in hess.terms.items()}
    residue_vec, _ = ech.reduce(hess_vec)
    if not residue_vec:
        raise AssertionError("hessian class vanished for an isolated singularity")
    data = JacobianData(W, X, basis, len(basis), ech, dict(residue_vec), True)
    return data


def normal_form(p: Potential, data: JacobianData):
    """Coordinates of p modulo the Jacobian ideal, on data.monomial_basis."""
    if p.max_degree > data.X:
        p = p.truncate(data.X)
    vec = {e: Fraction(c) for e, c in p.terms.items()}
    residue, _ = data._echelon.reduce(vec)
    return {e: residue.get(e, Fraction(0)) for e in data.monomial_basis}


def normal_form_vector(p: Potential, data: JacobianData):
    return [normal_form(p, data)[e] for e in data.monomial_basis]


def _socle_monomial(data: JacobianData):
    return max(data.monomial_basis, key=lambda e: (sum(e), e))


def residue_pairing(f: Potential, g: Potential, data: JacobianData) -> Fraction:
    """Grothendieck residue of f g dx / (d_1 W ... d_N W).

    Normal-forms the product, reads off its component along the Hessian
    class, and applies the socle normalization Res(hess) = milnor.
    """
    if not data.stabilization_certificate:
        raise ValueError("jacobian data must carry a stabilization certificate")
    prod = f.multiply(g).truncate(data.X)
    coords = normal_form(prod, data)
    socle = _socle_monomial(data)
    h_top = data.hessian_class.get(socle, Fraction(0))
    if h_top == 0:
        raise AssertionError("hessian class has no socle component")
    return coords[socle] / h_top * data.milnor


def residue_series_oracle(f: Potential, g: Potential, W: Potential, order=40) -> Fraction:
    """Independent N=1 oracle: coefficient of x^(-1) in f g / W' by series inversion."""
    if W.N != 1:
        raise ValueError("series oracle is univariate")
    dW = W.partial(1)
    k = min(e[0] for e in dW.terms)
    lead = Fraction(dW.terms[(k,)])
    # v = W'/(lead x^k) = 1 + higher; invert the series exactly
    v = {e[0] - k: Fraction(c) / lead for e, c in dW.terms.items()}
    inv = [Fraction(0)] * (order + 1)
    inv[0] = Fraction(1)
    for n in range(1, order + 1):
        s = Fraction(0)
        for m in range(1, n + 1):
            if m in v:
                s += v[m] * inv[n - m]
        inv[n] = -s
    prod = f.multiply(g)
    total = Fraction(0)
    for e, c in prod.terms.items():
        # x^e / (lead x^k v) contributes when e + j - k == -1
        j = k - 1 - e[0]
        if 0 <= j <= order:
            total += Fraction(c) * inv[j] / lead
    return total


class DeformedPotential(Potential):
    """Mini-versal deformation W + t_1 phi_1 + ... + t_mu phi_mu.

    Lives over a truncated parameter ring; may acquire constant and linear
    terms in x, which is recorded by construction.
    """

    def __init__(self, base: Potential, basis_monomials, tring: TruncatedPolyRing):
        self.base = base
        self.basis_monomials = list(basis_monomials)
        terms = {e: tring.coerce(c) for e, c in base.terms.items()}
        for i, e in enumerate(self.basis_monomials, start=1):
            prev = terms.get(e, tring.zero())
            terms[e] = prev + tring.t(i)
        super().__init__(base.N, terms, tring, allow_low_terms=True)

    def at_t_zero(self) -> Potential:
        tring = self.ring
        out = {}
        for e, c in self.terms.items():
            c0 = tring.eval_zero(c)
            if not tring.base.is_zero(c0):
                out[e] = c0
        return Potential(self.N, out, tring.base, allow_low_terms=True)

    def partial_t(self, i: int) -> Potential:
        """d(script W)/dt_i as a polynomial over the truncated ring."""
        tring = self.ring
        out = {}
        for e, c in self.terms.items():
            d = tring.partial_t(c, i)
            if not tring.is_zero(d):
                out[e] = d
        return Potential(self.N, out, tring, allow_low_terms=True)


def deform(W: Potential, data: JacobianData, T: int) -> DeformedPotential:
    """Deform W by its Jacobian basis monomials over Q[t_1..t_mu]/m^(T+1)."""
    tring = TruncatedPolyRing(W.ring, data.milnor, T)
    return DeformedPotential(W, data.monomial_basis, tring)
