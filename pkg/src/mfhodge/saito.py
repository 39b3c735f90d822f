"""Twisted de Rham complexes on both sides of Koszul duality.

S-side: forms over Q[x]/m^(X+1) with odd dx's, twisted differential
dW^ + u d_DR.  A-side: the exterior algebra with even dE's (polynomial
degree capped at X), twisted differential L_W + u d_DR where the Lie
operator comes from the graded commutator of d with the contraction by the
constant-coefficient polyvector field.  The monomial-wise dualization
    eps_j -> (dx_j)^dual,  dE_j -> (x_j)^dual
carries factorial weights and a parity sign pinned by the requirement that
it intertwine the two twisted differentials (checked exhaustively in the
tests); the u-extension is sesquilinear, u -> -u.

Cohomology, connection matrices, the residue Gram pairing and the VSHS
axioms are computed by exact row reduction over Q after expanding the u and
parameter directions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .exterior import mask_to_indices, popcount, wedge_masks
from .linalg import Echelon, nullspace, vec_add
from .potential import Potential, monomials_up_to, residue_pairing
from .scalars import QQ, TPoly, TruncatedPolyRing


class SForm:
    """Element of Q[x]/m^(X+1) (x) Lambda[dx], keyed by (exponents, dx mask)."""

    __slots__ = ("N", "ring", "X", "terms")

    def __init__(self, N, X, terms=None, ring=QQ):
        self.N = N
        self.X = X
        self.ring = ring
        clean = {}
        if terms:
            for (e, mask), c in terms.items():
                if sum(e) > X:
                    continue
                if not ring.is_zero(c):
                    clean[(tuple(e), mask)] = c
        self.terms = clean

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if self.ring.is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return SForm(self.N, self.X, out, self.ring)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = self.ring.coerce(c)
        return SForm(self.N, self.X, {k: c * v for k, v in self.terms.items()}, self.ring)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, SForm) and self.terms == other.terms

    def __repr__(self):
        bits = []
        for (e, mask), c in sorted(self.terms.items()):
            mono = "".join(f"x{i+1}^{p}" for i, p in enumerate(e) if p) or "1"
            dxs = "".join(f"dx{i}" for i in mask_to_indices(mask))
            bits.append(f"{self.ring.to_str(c)}*{mono}{dxs}")
        return " + ".join(bits) or "0"


def s_multiply(poly: Potential, form: SForm) -> SForm:
    """Multiply by a polynomial, truncating above the x-degree cap."""
    out = {}
    for e1, c1 in poly.terms.items():
        for (e2, mask), c2 in form.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if sum(e) > form.X:
                continue
            key = (e, mask)
            s = out.get(key)
            v = c1 * c2
            s = v if s is None else s + v
            out[key] = s
    return SForm(form.N, form.X, out, form.ring)


def s_wedge_dW(W: Potential, form: SForm) -> SForm:
    """dW ^ form, with dW = sum d_j W dx_j."""
    out = SForm(form.N, form.X, {}, form.ring)
    for j in range(1, form.N + 1):
        dj = W.partial(j)
        part = {}
        for (e, mask), c in s_multiply(dj, form).terms.items():
            m2, sgn = wedge_masks(1 << (j - 1), mask)
            if sgn == 0:
                continue
            part[(e, m2)] = c if sgn > 0 else -c
        out = out + SForm(form.N, form.X, part, form.ring)
    return out


def s_de_rham(form: SForm) -> SForm:
    out = {}
    ring = form.ring
    for (e, mask), c in form.terms.items():
        for j in range(1, form.N + 1):
            k = e[j - 1]
            if k == 0:
                continue
            e2 = tuple(v - 1 if i == j - 1 else v for i, v in enumerate(e))
            m2, sgn = wedge_masks(1 << (j - 1), mask)
            if sgn == 0:
                continue
            v = c * ring.coerce(k)
            if sgn < 0:
                v = -v
            key = (e2, m2)
            s = out.get(key)
            s = v if s is None else s + v
            out[key] = s
    return SForm(form.N, form.X, out, ring)


class AForm:
    """Element of K[eps] (x) Q[dE], keyed by (eps mask, dE exponents)."""

    __slots__ = ("N", "ring", "X", "terms")

    def __init__(self, N, X, terms=None, ring=QQ):
        self.N = N
        self.X = X
        self.ring = ring
        clean = {}
        if terms:
            for (mask, b), c in terms.items():
                if sum(b) > X:
                    continue
                if not ring.is_zero(c):
                    clean[(mask, tuple(b))] = c
        self.terms = clean

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if self.ring.is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return AForm(self.N, self.X, out, self.ring)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = self.ring.coerce(c)
        return AForm(self.N, self.X, {k: c * v for k, v in self.terms.items()}, self.ring)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, AForm) and self.terms == other.terms

    def __repr__(self):
        bits = []
        for (mask, b), c in sorted(self.terms.items()):
            eps = "".join(f"e{i}" for i in mask_to_indices(mask)) or "1"
            des = "".join(f"dE{i+1}^{p}" for i, p in enumerate(b) if p)
            bits.append(f"{self.ring.to_str(c)}*{eps}{des}")
        return " + ".join(bits) or "0"


def a_de_rham(form: AForm) -> AForm:
    """d_DR: eps_j -> dE_j as a left odd derivation; kills dE's."""
    out = {}
    ring = form.ring
    for (mask, b), c in form.terms.items():
        for j in mask_to_indices(mask):
            bit = 1 << (j - 1)
            below = popcount(mask & (bit - 1))
            sgn = -1 if below & 1 else 1
            b2 = tuple(v + 1 if i == j - 1 else v for i, v in enumerate(b))
            if sum(b2) > form.X:
                continue
            key = (mask ^ bit, b2)
            v = c if sgn > 0 else -c
            s = out.get(key)
            s = v if s is None else s + v
            out[key] = s
    return AForm(form.N, form.X, out, ring)


def a_contract(W: Potential, form: AForm) -> AForm:
    """iota_W for the constant-coefficient polyvector field of W.

    Each monomial acts by honest partial derivatives in the dE variables;
    this is the convention whose commutator with d_DR dualizes to dW^.
    """
    out = {}
    ring = form.ring
    for e, coeff in W.terms.items():
        for (mask, b), c in form.terms.items():
            factor = 1
            ok = True
            b2 = list(b)
            for j in range(form.N):
                for _ in range(e[j]):
                    if b2[j] == 0:
                        ok = False
                        break
                    factor *= b2[j]
                    b2[j] -= 1
                if not ok:
                    break
            if not ok or factor == 0:
                continue
            key = (mask, tuple(b2))
            v = coeff * c * ring.coerce(factor)
            s = out.get(key)
            s = v if s is None else s + v
            out[key] = s
    return AForm(form.N, form.X, out, ring)


def a_lie(W: Potential, form: AForm) -> AForm:
    """L_W = iota_W d - d iota_W, the graded commutator pinned by duality.

    Computed with one level of dE headroom so the inner de Rham step does
    not clip; the result is re-truncated to the form's window.
    """
    wide = AForm(form.N, form.X + 1, form.terms, form.ring)
    out = a_contract(W, a_de_rham(wide)) - a_de_rham(a_contract(W, wide))
    return AForm(form.N, form.X, out.terms, form.ring)


def koszul_pair(aform: AForm, sform: SForm):
    """<eps_I dE^b, x^a dx_J> = (-1)^(|I|+1) b! delta_(ab) delta_(IJ).

    The parity sign makes d_A adjoint to -d_S while the contraction stays
    adjoint to multiplication, which is what the sesquilinear u-extension
    needs to intertwine the twisted differentials.
    """
    ring = aform.ring
    total = ring.zero()
    for (mask, b), c in aform.terms.items():
        v = sform.terms.get((b, mask))
        if v is None:
            continue
        weight = 1
        for p in b:
            for q in range(2, p + 1):
                weight *= q
        sgn = -1 if (popcount(mask) + 1) & 1 else 1
        total = total + c * v * ring.coerce(sgn * weight)
    return total


def koszul_dualize(aform: AForm):
    """Functional coordinates of an A-form in the S-monomial dual basis."""
    ring = aform.ring
    out = {}
    for (mask, b), c in aform.terms.items():
        weight = 1
        for p in b:
            for q in range(2, p + 1):
                weight *= q
        sgn = -1 if (popcount(mask) + 1) & 1 else 1
        out[(b, mask)] = c * ring.coerce(sgn * weight)
    return out


class TruncationError(ValueError):
    """Raised when the truncated twisted complex cannot see the full rank."""


def _s_columns(N, X, M, tring):
    monos = monomials_up_to(N, X)
    tmonos = tring.monomials() if tring is not None else [()]
    cols = []
    for m in range(M):
        for e in monos:
            for mask in range(1 << N):
                for tm in tmonos:
                    cols.append((m, tm, (e, mask)))
    return cols


def s_form_to_vector(form, m, tring):
    vec = {}
    for key, c in form.terms.items():
        if tring is not None:
            for tm, q in c.terms.items():
                vec[(m, tm, key)] = vec.get((m, tm, key), Fraction(0)) + Fraction(q)
        else:
            vec[(m, (), key)] = vec.get((m, (), key), Fraction(0)) + Fraction(c)
    return {k: v for k, v in vec.items() if v}


def _column_form(col, N, X, ring, tring):
    m, tm, key = col
    if tring is not None:
        coeff = TPoly(tring, {tm: tring.base.one()})
    else:
        coeff = ring.one()
    return m, SForm(N, X, {key: coeff}, ring)


class STwistedComplex:
    """The S-side twisted complex over Q[u]/u^M as exact linear algebra.

    The x-degree cap must absorb the full u-window: the class of
    u^k (m dx_1..dx_N) reduces through x-degrees that climb by deg W per
    u-power, so the default cap is deg W * M plus slack.
    """

    def __init__(self, W: Potential, X=None, M=5):
        self.W = W
        self.N = W.N
        self.ring = W.ring
        self.tring = W.ring if isinstance(W.ring, TruncatedPolyRing) else None
        D = max(2, W.max_degree)
        self.X = D * M + D if X is None else X
        self.M = M
        self.columns = _s_columns(self.N, self.X, self.M, self.tring)
        self._dcache = {}
        top = (1 << self.N) - 1

        def prio(col):
            m, tm, (e, mask) = col
            return (mask != top, sum(e), m, sum(tm), str(col))

        self.priority = prio

    def differential_column(self, col):
        hit = self._dcache.get(col)
        if hit is not None:
            return hit
        m, form = _column_form(col, self.N, self.X, self.ring, self.tring)
        out = {}
        for k, v in s_form_to_vector(s_wedge_dW(self.W, form), m, self.tring).items():
            out[k] = out.get(k, Fraction(0)) + v
        if m + 1 < self.M:
            for k, v in s_form_to_vector(s_de_rham(form), m + 1, self.tring).items():
                out[k] = out.get(k, Fraction(0)) + v
        out = {k: v for k, v in out.items() if v}
        self._dcache[col] = out
        return out

    def element_vector(self, forms_by_power):
        vec = {}
        for m, form in forms_by_power.items():
            if not 0 <= m < self.M:
                raise TruncationError(f"u-power {m} outside [0, {self.M})")
            for k, v in s_form_to_vector(form, m, self.tring).items():
                vec[k] = vec.get(k, Fraction(0)) + v
        return {k: v for k, v in vec.items() if v}

    def parity(self, col):
        return popcount(col[2][1]) & 1


class TwistedModule:
    """Basis, connections and pairing of the S-side twisted cohomology.

    The basis is u^k t^e (m_i dx_1..dx_N) with m_i the Jacobian monomial
    basis of the undeformed potential; freeness over Q[u]/u^M is certified
    by matching the stabilized homology dimension.
    """

    def __init__(self, W, base_W, jac_data, X=None, M=5):
        self.W = W
        self.base_W = base_W
        self.jac = jac_data
        self.complex = STwistedComplex(W, X, M)
        self.N = W.N
        self.M = M
        self.X = self.complex.X
        self.ring = W.ring
        self.tring = self.complex.tring
        self.rank = None
        self.free_certificate = False
        self._build()

    def basis_forms(self):
        """Monomial-times-volume representatives at each u power and t monomial."""
        top = (1 << self.N) - 1
        out = []
        for m_i in self.jac.monomial_basis:
            form = SForm(self.N, self.X, {(m_i, top): self.ring.one()}, self.ring)
            out.append(form)
        return out

    def _build(self):
        cx = self.complex
        par = self.N & 1
        same = [c for c in cx.columns if cx.parity(c) == par]
        other = [c for c in cx.columns if cx.parity(c) != par]
        bnd = Echelon(priority=cx.priority, track=True)
        for c in other:
            bnd.insert(cx.differential_column(c))
        self._membership = bnd
        # candidate basis: u^k t^e (m_i dx_top); independence mod boundaries
        tags = []
        count = 0
        tmonos = self.tring.monomials() if self.tring is not None else [()]
        for k in range(self.M):
            for i, form in enumerate(self.basis_forms()):
                for tm in tmonos:
                    if self.tring is not None:
                        scaled = form.scale(TPoly(self.tring, {tm: self.tring.base.one()}))
                    else:
                        scaled = form
                    vec = cx.element_vector({k: scaled})
                    pivot = bnd.insert(vec, ("rep", (k, i, tm)))
                    if pivot is None:
                        raise TruncationError("candidate volume-form class is a boundary; enlarge X")
                    tags.append((k, i, tm))
                    count += 1
        # stabilized total dimension must match the candidate count
        stable = self._stable_dim(same, other)
        self.rank = self.jac.milnor
        self.free_certificate = stable == count
        if not self.free_certificate:
            raise TruncationError(
                f"rank deficit: stable dimension {stable} != {count}; enlarge X={self.X}"
            )

    def _stable_dim(self, same, other):
        cx = self.complex
        bnd_rank_base = Echelon(priority=cx.priority)
        for c in other:
            bnd_rank_base.insert(cx.differential_column(c))
        seen = None
        stable = None
        for cap in range(self.X - 1, -1, -1):
            sub = [c for c in same if sum(c[2][0]) <= cap]
            kernel, _ = nullspace([(c, cx.differential_column(c)) for c in sub], priority=cx.priority)
            ech = Echelon(priority=cx.priority)
            for c in other:
                ech.insert(cx.differential_column(c))
            rank = 0
            for vec in kernel:
                if ech.insert(vec) is not None:
                    rank += 1
            if seen == rank:
                return rank
            seen = rank
            stable = rank
        return stable

    def reduce(self, forms_by_power):
        """Coordinates of a cycle on the basis mod boundaries; None if outside."""
        vec = self.complex.element_vector(forms_by_power)
        residue, combo = self._membership.reduce(dict(vec), {})
        if residue:
            return None
        return {tag[1]: -v for tag, v in combo.items() if isinstance(tag, tuple) and tag[0] == "rep" and v}

    def gram_matrix(self):
        """Residue pairing of the basis monomials (the u^0 pairing term)."""
        basis = self.jac.monomial_basis
        out = []
        for e1 in basis:
            row = []
            for e2 in basis:
                p1 = Potential(self.N, {e1: Fraction(1)}, QQ, allow_low_terms=True)
                p2 = Potential(self.N, {e2: Fraction(1)}, QQ, allow_low_terms=True)
                row.append(residue_pairing(p1, p2, self.jac))
            out.append(row)
        return out


def s_connection_u(module: TwistedModule, forms_by_power):
    """nabla_u = d/du - (N/2) u^{-1} + u^{-2} (multiplication by script W)."""
    ring = module.ring
    half_n = Fraction(module.N, 2)
    out = {}
    for m, form in forms_by_power.items():
        if m != 0:
            _acc(out, m - 1, form.scale(ring.coerce(m)))
        _acc(out, m - 1, form.scale(ring.coerce(-half_n)))
        _acc(out, m - 2, s_multiply(module.W, form))
    return out


def s_connection_t(module: TwistedModule, j, forms_by_power):
    """nabla_(t_j) = d/dt_j - u^{-1} (multiplication by phi_j)."""
    tring = module.tring
    if tring is None:
        raise ValueError("t-direction connection needs a deformed module")
    phi_e = module.jac.monomial_basis[j - 1]
    phi = Potential(module.N, {phi_e: tring.one()}, tring, allow_low_terms=True)
    out = {}
    for m, form in forms_by_power.items():
        dt = SForm(form.N, form.X, {k: tring.partial_t(c, j) for k, c in form.terms.items()}, tring)
        _acc(out, m, dt)
        _acc(out, m - 1, s_multiply(phi, form).scale(-1))
    return out


def _acc(store, m, form):
    if form.is_zero():
        return
    store[m] = store[m] + form if m in store else form


def connection_matrices(module: TwistedModule, directions=("u",)):
    """Connection matrices on the basis classes, entries as u-Laurent dicts.

    Entries record nabla(e_a) = sum_b Gamma[b][a] e_b with Gamma[b][a] a map
    from u-exponent to a scalar; pole orders at most 2 for u, 1 for t.
    """
    cx = module.complex
    tmonos = module.tring.monomials() if module.tring is not None else [()]
    basis_tags = [(k, i, tm) for k in range(module.M)
                  for i in range(len(module.jac.monomial_basis)) for tm in tmonos]

    # membership echelon over the u-widened complex [-2, M)
    wide = _WidenedComplex(module, lo=2)
    ech = Echelon(priority=wide.priority, track=True)
    for c in wide.columns:
        ech.insert(wide.differential_column(c))
    forms = module.basis_forms()
    tmono_list = tmonos

    def rep_forms(k, i, tm):
        if module.tring is not None:
            return {k: forms[i].scale(TPoly(module.tring, {tm: module.tring.base.one()}))}
        return {k: forms[i]}

    reps = {tag: rep_forms(*tag) for tag in basis_tags}
    # insert basis reps at every u shift of the widened window, so that
    # connection images resolve into u-Laurent coordinates on the basis
    for k in range(-wide.lo, module.M):
        for i in range(len(forms)):
            for tm in tmono_list:
                vec = wide.element_vector(rep_forms(k, i, tm))
                ech.insert(vec, ("rep", (k, i, tm)))

    matrices = {}
    for direction in directions:
        rows = {}
        for tag in basis_tags:
            if direction == "u":
                image = s_connection_u(module, reps[tag])
            else:
                image = s_connection_t(module, direction, reps[tag])
            vec = wide.element_vector(image)
            residue, combo = ech.reduce(dict(vec), {})
            if residue:
                raise TruncationError(f"connection image leaves the window for {tag}")
            rows[tag] = {t[1]: -v for t, v in combo.items() if isinstance(t, tuple) and t[0] == "rep" and v}
        matrices[direction] = rows
    return matrices


class _WidenedComplex:
    """The S-side complex extended to u-powers [-lo, M): a window subquotient."""

    def __init__(self, module: TwistedModule, lo=2):
        self.module = module
        self.lo = lo
        cx = module.complex
        self.N, self.X, self.M = cx.N, cx.X, cx.M
        self.ring, self.tring = cx.ring, cx.tring
        monos = monomials_up_to(self.N, self.X)
        tmonos = self.tring.monomials() if self.tring is not None else [()]
        self.columns = [
            (m, tm, (e, mask))
            for m in range(-lo, self.M)
            for e in monos
            for mask in range(1 << self.N)
            for tm in tmonos
        ]
        top = (1 << self.N) - 1

        def prio(col):
            m, tm, (e, mask) = col
            return (mask != top, sum(e), m, sum(tm), str(col))

        self.priority = prio
        self._dcache = {}

    def differential_column(self, col):
        hit = self._dcache.get(col)
        if hit is not None:
            return hit
        m, form = _column_form(col, self.N, self.X, self.ring, self.tring)
        out = {}
        for k, v in s_form_to_vector(s_wedge_dW(self.module.W, form), m, self.tring).items():
            out[k] = out.get(k, Fraction(0)) + v
        if m + 1 < self.M:
            for k, v in s_form_to_vector(s_de_rham(form), m + 1, self.tring).items():
                out[k] = out.get(k, Fraction(0)) + v
        self._dcache[col] = out
        return out

    def element_vector(self, forms_by_power):
        vec = {}
        for m, form in forms_by_power.items():
            if not -self.lo <= m < self.M:
                continue
            for k, v in s_form_to_vector(form, m, self.tring).items():
                vec[k] = vec.get(k, Fraction(0)) + v
        return {k: v for k, v in vec.items() if v}


def vshs_verify(module: TwistedModule):
    """Check the VSHS axioms on the module within the truncation window.

    Returns a report dict: flatness residuals for [nabla_u, nabla_t] and
    [nabla_ti, nabla_tj] on every basis class, pole-order bookkeeping, and
    the u^0 residue pairing symmetry and nondegeneracy.
    """
    report = {"flatness": [], "pole_orders_ok": True, "pairing_symmetric": True,
              "pairing_nondegenerate": True, "ok": True}
    cx = module.complex
    wide = _WidenedComplex(module, lo=4)
    ech = Echelon(priority=wide.priority, track=False)
    for c in wide.columns:
        ech.insert(wide.differential_column(c))

    # flatness and pole orders are R-module statements: evaluate on the
    # R-basis representatives (t-degree zero); t-monomials only tag coordinates
    zero_tm = module.tring.monomials()[0] if module.tring is not None else ()
    basis_tags = [(k, i, zero_tm) for k in range(module.M)
                  for i in range(len(module.jac.monomial_basis))]
    forms = module.basis_forms()

    def rep(tag):
        k, i, tm = tag
        if module.tring is not None:
            return {k: forms[i].scale(TPoly(module.tring, {tm: module.tring.base.one()}))}
        return {k: forms[i]}

    directions = list(range(1, module.jac.milnor + 1)) if module.tring is not None else []

    def nab(direction, el):
        if direction == "u":
            out = s_connection_u(module, el)
        else:
            out = s_connection_t(module, direction, el)
        return {m: f for m, f in out.items() if not f.is_zero()}

    # pole orders
    for tag in basis_tags:
        el = rep(tag)
        k = tag[0]
        out_u = nab("u", el)
        if any(m < k - 2 for m in out_u):
            report["pole_orders_ok"] = False
        for j in directions:
            out_t = nab(j, el)
            if any(m < k - 1 for m in out_t):
                report["pole_orders_ok"] = False

    # flatness [nabla_u, nabla_t_j] and [nabla_t_i, nabla_t_j]
    pairs = [("u", j) for j in directions]
    pairs += [(i, j) for i in directions for j in directions if i < j]
    for a, b in pairs:
        for tag in basis_tags:
            el = rep(tag)
            one = nab(a, nab(b, el))
            two = nab(b, nab(a, el))
            diff = dict(one)
            for m, f in two.items():
                diff[m] = diff[m] - f if m in diff else f.scale(-1)
            vec = wide.element_vector(diff)
            residue, _ = ech.reduce(dict(vec), {})
            resid_norm = sum(abs(v) for v in residue.values())
            report["flatness"].append({"pair": (a, b), "tag": tag, "residual": str(resid_norm)})
            if residue:
                report["ok"] = False

    # u^0 pairing: symmetry with sign (-1)^(N + |s1||s2|) and nondegeneracy
    gram = module.gram_matrix()
    mu = len(gram)
    for i in range(mu):
        for j in range(mu):
            # basis classes are N-forms, so (-1)^(N + |s1||s2|) = (-1)^(N+N^2) = +1
            if gram[i][j] != gram[j][i]:
                report["pairing_symmetric"] = False
                report["ok"] = False
    dets = Echelon()
    for row in gram:
        dets.insert({j: v for j, v in enumerate(row) if v})
    if dets.rank != mu:
        report["pairing_nondegenerate"] = False
        report["ok"] = False
    if not (report["pole_orders_ok"] and report["pairing_symmetric"]):
        report["ok"] = False
    return report


def twisted_differential(side, W: Potential, form, u_window=None):
    """One application of the twisted differential, split by u-power.

    Input and output are {u_power: form} maps; S-side applies dW^ + u d_DR,
    A-side applies L_W + u d_DR with the window projection.
    """
    if not isinstance(form, dict):
        form = {0: form}
    out = {}
    for m, f in form.items():
        if side == "S":
            _acc(out, m, s_wedge_dW(W, f))
            _acc(out, m + 1, s_de_rham(f))
        elif side == "A":
            la = a_lie(W, f)
            if not la.is_zero():
                out[m] = out[m] + la if m in out else la
            da = a_de_rham(f)
            if not da.is_zero():
                out[m + 1] = out[m + 1] + da if m + 1 in out else da
        else:
            raise ValueError("side must be 'S' or 'A'")
    return {m: f for m, f in out.items() if not f.is_zero()}


def cohomology_module(W: Potential, X=None, M=5, jac_data=None, base_W=None) -> TwistedModule:
    """Construct the S-side twisted cohomology module with its certificates."""
    from .potential import jacobian_data as jd

    if base_W is None:
        base_W = W if not isinstance(W.ring, TruncatedPolyRing) else None
    if base_W is None:
        raise ValueError("deformed potentials need base_W (the t = 0 fiber)")
    if jac_data is None:
        jac_data = jd(base_W)
    return TwistedModule(W, base_W, jac_data, X=X, M=M)
