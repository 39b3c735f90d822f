"""Z/2-graded exterior algebra K[eps_1..eps_N] over an exact scalar ring.

Basis elements are indexed by subsets of {1..N} stored as bitmasks; the empty
subset is the unit.  The module provides the super-commutative wedge, the
signed n-fold product operator M, left odd derivations, the trace picking the
top coefficient, and linear symmetry actions through the dual representation.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import QQ


class DimensionError(ValueError):
    """Raised when operands disagree on generator count or scalar ring."""


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_to_indices(mask: int):
    """Ascending 1-based generator indices present in the mask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def indices_to_mask(indices) -> int:
    mask = 0
    for i in indices:
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValueError(f"repeated generator index {i}")
        mask |= bit
    return mask


def wedge_masks(m1: int, m2: int):
    """Product of two basis elements: (mask, sign), or (0, 0) when they collide.

    The sign counts the transpositions needed to merge the two ascending
    index words, i.e. pairs (i in m1, j in m2) with i > j.
    """
    if m1 & m2:
        return 0, 0
    swaps = 0
    rest = m1
    while rest:
        low = rest & -rest
        swaps += popcount(m2 & (low - 1))
        rest ^= low
    return m1 | m2, -1 if swaps & 1 else 1


def derivation_mask(j: int, mask: int):
    """Left action of the odd derivation d/d(eps_j): (new mask, sign) or (0, 0)."""
    bit = 1 << (j - 1)
    if not mask & bit:
        return 0, 0
    preceding = popcount(mask & (bit - 1))
    return mask ^ bit, -1 if preceding & 1 else 1


class Multivector:
    """Element of K[eps_1..eps_N]; immutable in spirit, canonical (no zero terms)."""

    __slots__ = ("N", "ring", "terms")

    def __init__(self, N: int, terms=None, ring=QQ):
        self.N = N
        self.ring = ring
        clean = {}
        if terms:
            for mask, c in terms.items():
                if not ring.is_zero(c):
                    clean[mask] = c
        self.terms = clean

    @classmethod
    def unit(cls, N: int, ring=QQ):
        return cls(N, {0: ring.one()}, ring)

    @classmethod
    def generator(cls, N: int, j: int, ring=QQ):
        if not 1 <= j <= N:
            raise DimensionError(f"generator index {j} out of range for N={N}")
        return cls(N, {1 << (j - 1): ring.one()}, ring)

    @classmethod
    def basis_element(cls, N: int, indices, ring=QQ):
        return cls(N, {indices_to_mask(indices): ring.one()}, ring)

    def _check(self, other: "Multivector"):
        if self.N != other.N or self.ring != other.ring:
            raise DimensionError("multivectors over different algebras")

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self):
        """Common Z/2 degree of the support, or None if mixed/zero."""
        degs = {popcount(m) & 1 for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def degree(self) -> int:
        d = self.is_homogeneous()
        if d is None:
            raise ValueError("degree of a non-homogeneous multivector")
        return d

    def __add__(self, other: "Multivector"):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if self.ring.is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return Multivector(self.N, out, self.ring)

    def __neg__(self):
        return Multivector(self.N, {m: -c for m, c in self.terms.items()}, self.ring)

    def __sub__(self, other: "Multivector"):
        return self + (-other)

    def scale(self, c):
        c = self.ring.coerce(c)
        if self.ring.is_zero(c):
            return Multivector(self.N, {}, self.ring)
        return Multivector(self.N, {m: c * x for m, x in self.terms.items()}, self.ring)

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.N == other.N and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.N, tuple(sorted((m, repr(c)) for m, c in self.terms.items()))))

    def coefficient(self, indices):
        return self.terms.get(indices_to_mask(indices), self.ring.zero())

    def map_ring(self, target_ring, fn):
        return Multivector(self.N, {m: fn(c) for m, c in self.terms.items()}, target_ring)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=lambda m: (popcount(m), m)):
            name = "1" if m == 0 else "e" + "".join(str(i) for i in mask_to_indices(m))
            bits.append(f"{self.ring.to_str(self.terms[m])}*{name}")
        return " + ".join(bits)

    def to_json(self):
        return {
            "N": self.N,
            "terms": [
                {"I": mask_to_indices(m), "c": self.ring.to_str(c)}
                for m, c in sorted(self.terms.items(), key=lambda kv: (popcount(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data, ring=QQ):
        terms = {}
        for t in data["terms"]:
            terms[indices_to_mask(t["I"])] = ring.from_str(t["c"])
        return cls(data["N"], terms, ring)


def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Super-commutative product; eps_i ^ eps_i = 0."""
    a._check(b)
    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            m, sgn = wedge_masks(m1, m2)
            if sgn == 0:
                continue
            c = c1 * c2
            if sgn < 0:
                c = -c
            s = out.get(m)
            s = c if s is None else s + c
            out[m] = s
    return Multivector(a.N, out, a.ring)


def m_multiply(inputs) -> Multivector:
    """Signed product of n >= 1 multivectors.

    The sign on basis terms is
    (-1)^(n(n-1)/2 + (n-1)|a_1| + (n-2)|a_2| + ... + |a_{n-1}|)
    with |.| the Z/2 degree; the result is extended multilinearly.
    """
    inputs = list(inputs)
    if not inputs:
        raise ValueError("m_multiply needs at least one input")
    n = len(inputs)
    N, ring = inputs[0].N, inputs[0].ring
    for a in inputs[1:]:
        inputs[0]._check(a)
    # expand over basis terms of each slot
    acc = [((), ring.one())]
    for a in inputs:
        nxt = []
        for masks, c in acc:
            for m, cm in a.terms.items():
                nxt.append((masks + (m,), c * cm))
        acc = nxt
    out = Multivector(N, {}, ring)
    base = (n * (n - 1) // 2) & 1
    for masks, c in acc:
        exp = base
        for i in range(n - 1):
            exp ^= ((n - 1 - i) * popcount(masks[i])) & 1
        mask, sgn = 0, 1
        ok = True
        for m in masks:
            mask, s = wedge_masks(mask, m)
            if s == 0:
                ok = False
                break
            sgn *= s
        if not ok:
            continue
        if exp:
            sgn = -sgn
        term = Multivector(N, {mask: c if sgn > 0 else -c}, ring)
        out = out + term
    return out


def shifted_product(a: Multivector, b: Multivector) -> Multivector:
    """The arity-2 coderivation delta(a, b) = (-1)^|a| a^b (strictly unital)."""
    a._check(b)
    out = Multivector(a.N, {}, a.ring)
    for m1, c1 in a.terms.items():
        sgn0 = -1 if popcount(m1) & 1 else 1
        for m2, c2 in b.terms.items():
            m, sgn = wedge_masks(m1, m2)
            if sgn == 0:
                continue
            c = c1 * c2
            if sgn * sgn0 < 0:
                c = -c
            out = out + Multivector(a.N, {m: c}, a.ring)
    return out


def derivation(j: int, a: Multivector) -> Multivector:
    """Odd derivation d/d(eps_j) acting from the left."""
    if not 1 <= j <= a.N:
        raise DimensionError(f"generator index {j} out of range for N={a.N}")
    out = {}
    for m, c in a.terms.items():
        m2, sgn = derivation_mask(j, m)
        if sgn == 0:
            continue
        out[m2] = c if sgn > 0 else -c
    return Multivector(a.N, out, a.ring)


def trace(a: Multivector):
    """Coefficient of eps_1...eps_N; every other basis element traces to zero."""
    top = (1 << a.N) - 1
    return a.terms.get(top, a.ring.zero())


def exterior_degree_operator(a: Multivector) -> Multivector:
    """T(eps_I) = |I| eps_I, the integer exterior degree made a ring scalar."""
    out = {}
    for m, c in a.terms.items():
        k = popcount(m)
        if k:
            out[m] = c * a.ring.coerce(k)
    return Multivector(a.N, out, a.ring)


class LinearSymmetry:
    """Invertible N x N matrix acting on the x-coordinates.

    The action on generators is by the contragredient (inverse transpose), so
    fixing W(g x) = W(x) matches equivariance of the graph products.
    """

    def __init__(self, matrix, ring=QQ):
        self.ring = ring
        self.matrix = tuple(tuple(ring.coerce(x) for x in row) for row in matrix)
        self.N = len(self.matrix)
        for row in self.matrix:
            if len(row) != self.N:
                raise DimensionError("symmetry matrix must be square")
        self.inverse_matrix = _invert(self.matrix, ring)
        self.determinant = _det(self.matrix, ring)
        # dual action matrix B with eps_j -> sum_k B[j][k] eps_k
        self.dual = tuple(
            tuple(self.inverse_matrix[k][j] for k in range(self.N)) for j in range(self.N)
        )

    def is_special(self) -> bool:
        return self.determinant == self.ring.one()

    def act(self, a: Multivector) -> Multivector:
        """Algebra automorphism induced by the dual action on generators."""
        if a.N != self.N:
            raise DimensionError("symmetry size does not match multivector")
        ring = a.ring
        gen_images = []
        for j in range(1, self.N + 1):
            img = Multivector(a.N, {1 << (k - 1): self.dual[j - 1][k - 1] for k in range(1, self.N + 1)}, ring)
            gen_images.append(img)
        out = Multivector(a.N, {}, ring)
        for m, c in a.terms.items():
            word = Multivector.unit(a.N, ring)
            for j in mask_to_indices(m):
                word = wedge(word, gen_images[j - 1])
            out = out + word.scale(c)
        return out

    def compose(self, other: "LinearSymmetry") -> "LinearSymmetry":
        n = self.N
        prod = [
            [sum((self.matrix[i][k] * other.matrix[k][j] for k in range(n)), self.ring.zero()) for j in range(n)]
            for i in range(n)
        ]
        return LinearSymmetry(prod, self.ring)

    def __eq__(self, other):
        return isinstance(other, LinearSymmetry) and self.matrix == other.matrix and self.ring == other.ring

    def __hash__(self):
        return hash((self.ring, tuple(tuple(repr(x) for x in row) for row in self.matrix)))


def group_act(g: LinearSymmetry, a: Multivector) -> Multivector:
    return g.act(a)


def _det(matrix, ring):
    n = len(matrix)
    rows = [list(r) for r in matrix]
    det = ring.one()
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not ring.is_zero(rows[r][col]):
                pivot = r
                break
        if pivot is None:
            return ring.zero()
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det = det * rows[col][col]
        inv = ring.inv(rows[col][col])
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if ring.is_zero(factor):
                continue
            for c in range(col, n):
                rows[r][c] = rows[r][c] - factor * rows[col][c]
    return det


def _invert(matrix, ring):
    n = len(matrix)
    rows = [list(r) + [ring.one() if i == j else ring.zero() for j in range(n)] for i, r in enumerate(matrix)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not ring.is_zero(rows[r][col]):
                pivot = r
                break
        if pivot is None:
            raise ZeroDivisionError("singular symmetry matrix")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = ring.inv(rows[col][col])
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r == col:
                continue
            factor = rows[r][col]
            if ring.is_zero(factor):
                continue
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return tuple(tuple(row[n:]) for row in rows)
