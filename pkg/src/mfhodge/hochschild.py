"""Reduced Hochschild chains, the cyclic calculus, and truncated homology.

Chains are cyclic words a_0|a_1|...|a_s with a_0 any basis multivector and
the bar entries reduced (never the unit).  All operator signs use shifted
parities ||a|| = |a| + 1: the differential b applies a product to every
cyclic block with the Koszul sign of moving the (odd) product past the
prefix, or of rotating a tail to the front; the Connes operator B prefixes a
unit to every rotation.  The contraction operators b^{1|1} and B^{1|1} nest
one cochain inside a block; their placement and signs are pinned behaviorally
by the Cartan relation
    [b + uB, iota(phi)] = u L_phi - iota([mu, phi])
which the test suite checks exactly (both parities of phi).

Reported homology parities use |a_0| + sum ||a_i||, which puts the classes of
an N-variable model in parity N mod 2.

Truncation: a chain cap L bounds lengths; negative cyclic computations run on
the subcomplex spanned by u^m (x) (chains of length <= L + m), which the
differential b + uB preserves, tensored over a truncated parameter ring when
the model is deformed.  Homology is stabilized by shrinking the cap and
keeping the eventual image, which kills classes supported near the cap.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .ainfty import AInftyModel, HochschildCochain
from .exterior import Multivector, popcount
from .linalg import Echelon, nullspace, vec_add
from .scalars import QQ, TPoly, TruncatedPolyRing


def shifted_parity(mask: int) -> int:
    return (popcount(mask) + 1) & 1


def chain_parity(key) -> int:
    """Reporting parity |a_0| + sum ||a_i||."""
    a0, bars = key
    p = popcount(a0) & 1
    for b in bars:
        p ^= shifted_parity(b)
    return p


class Chain:
    """Linear combination of reduced tensors, keyed by (a0 mask, bar masks)."""

    __slots__ = ("N", "ring", "terms")

    def __init__(self, N, ring, terms=None):
        self.N = N
        self.ring = ring
        clean = {}
        if terms:
            for key, c in terms.items():
                if not ring.is_zero(c):
                    clean[key] = c
        self.terms = clean

    @classmethod
    def basis(cls, N, ring, a0, bars=()):
        bars = tuple(bars)
        if any(b == 0 for b in bars):
            raise ValueError("reduced chains cannot carry the unit in bar slots")
        return cls(N, ring, {(a0, bars): ring.one()})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if self.ring.is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return Chain(self.N, self.ring, out)

    def __neg__(self):
        return Chain(self.N, self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.ring.coerce(c)
        if self.ring.is_zero(c):
            return Chain(self.N, self.ring)
        return Chain(self.N, self.ring, {k: c * v for k, v in self.terms.items()})

    def scale_map(self, fn):
        return Chain(self.N, self.ring, {k: fn(v) for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def max_length(self):
        return max((len(bars) for _, bars in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, Chain) and self.terms == other.terms and self.N == other.N

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (a0, bars), c in sorted(self.terms.items()):
            word = "|".join(str(m) for m in (a0,) + bars)
            bits.append(f"{self.ring.to_str(c)}*[{word}]")
        return " + ".join(bits)


def _prefix_parities(key):
    """E(0..i) = ||a_0|| + ... + ||a_i|| for i = 0..s, shifted parities."""
    a0, bars = key
    out = []
    acc = shifted_parity(a0)
    out.append(acc)
    for b in bars:
        acc ^= shifted_parity(b)
        out.append(acc)
    return out


def _add_term(terms, ring, key, c):
    s = terms.get(key)
    s = c if s is None else s + c
    if ring.is_zero(s):
        terms.pop(key, None)
    else:
        terms[key] = s


def _emit_multivector(terms, ring, value, make_key, sign):
    for mask, c in value.terms.items():
        key = make_key(mask)
        if key is None:
            continue
        _add_term(terms, ring, key, -c if sign else c)


def lie_derivative(phi: HochschildCochain, chain: Chain) -> Chain:
    """L_phi: insert phi into every bar block, plus all wrap-around blocks."""
    ring, N = chain.ring, chain.N
    out = {}
    p_phi = phi.parity
    arities = [a for a in phi.arities()]
    for key, coeff in chain.terms.items():
        a0, bars = key
        s = len(bars)
        pref = _prefix_parities(key)
        total = pref[-1]
        # interior insertions: phi eats bars i+1..i+l, result stays a bar
        for l in arities:
            if l == 0 or l > s:
                continue
            for i in range(0, s - l + 1):
                val = phi.eval_basis(l, bars[i : i + l])
                if val.is_zero():
                    continue
                sign = (p_phi * pref[i]) & 1
                new_tail = bars[i + l :]
                head = bars[:i]

                def mk(mask, head=head, new_tail=new_tail):
                    if mask == 0:
                        return None
                    return (a0, head + (mask,) + new_tail)

                _emit_multivector(out, ring, val.scale(coeff), mk, sign)
        # wrap blocks: phi eats (a_{s-p+1}..a_s, a_0, a_1..a_q), lands in slot 0
        for l in arities:
            if l == 0 or l - 1 > s:
                continue
            for p in range(0, l):
                q = l - 1 - p
                if p + q > s:
                    continue
                block = bars[s - p :] + (a0,) + bars[:q]
                val = phi.eval_basis(l, block)
                if val.is_zero():
                    continue
                e_tail = 0
                for b in bars[s - p :]:
                    e_tail ^= shifted_parity(b)
                e_rest = total ^ e_tail
                sign = (e_tail * e_rest) & 1
                mid = bars[q : s - p]

                def mk(mask, mid=mid):
                    return (mask, mid)

                _emit_multivector(out, ring, val.scale(coeff), mk, sign)
    return Chain(N, ring, out)


def hochschild_b(model: AInftyModel, chain: Chain, length_cap=None, truncating=False) -> Chain:
    """The reduced differential b = L_mu for the model's structure maps.

    Strict unitality plus curvature proportional to the unit make this square
    to zero on the reduced complex; arity-0 insertions drop out by reduction.
    """
    mu0 = model.mu_basis(0, ())
    if not mu0.is_zero() and any(m != 0 for m in mu0.terms):
        raise ValueError("curvature must be a multiple of the unit")
    out = lie_derivative(model.structure_cochain(), chain)
    if length_cap is not None and out.max_length() > length_cap:
        if not truncating:
            raise ValueError(f"length overflow beyond cap {length_cap}")
        out = Chain(
            chain.N, chain.ring, {k: c for k, c in out.terms.items() if len(k[1]) <= length_cap}
        )
    return out


def connes_B(chain: Chain) -> Chain:
    """B(a_0|..|a_s) = sum of unit-headed cyclic rotations with Koszul signs."""
    ring, N = chain.ring, chain.N
    out = {}
    for (a0, bars), coeff in chain.terms.items():
        if a0 == 0:
            continue  # rotations put the unit into a bar slot
        s = len(bars)
        total = shifted_parity(a0)
        for b in bars:
            total ^= shifted_parity(b)
        for j in range(0, s + 1):
            # rotate so a_j..a_s come first (j = 0: no rotation)
            e_tail = 0
            word = (a0,) + bars
            for m in word[j:]:
                e_tail ^= shifted_parity(m)
            e_head = total ^ e_tail
            sign = (e_tail * e_head) & 1
            new_bars = word[j:] + word[:j]
            key = (0, new_bars)
            _add_term(out, ring, key, -coeff if sign else coeff)
    return Chain(N, ring, out)


def _phi_runs(block_len, w0_pos, arities):
    """(start, f) runs inside a block that avoid covering position w0_pos."""
    for f in arities:
        for start in range(0, block_len - f + 1):
            if f > 0 and start <= w0_pos < start + f:
                continue
            yield start, f


def contraction_b(model: AInftyModel, phi: HochschildCochain, chain: Chain) -> Chain:
    """b^{1|1}(phi): one phi block nested in the product block through slot 0."""
    ring, N = chain.ring, chain.N
    mu = model.structure_cochain()
    out = {}
    p_phi = phi.parity
    phi_arities = phi.arities()
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        word = (a0,) + bars
        spar = [shifted_parity(m) for m in word]
        total = 0
        for p in spar:
            total ^= p
        for p in range(0, s + 1):  # tail length
            e_tail = 0
            for m in bars[s - p :]:
                e_tail ^= shifted_parity(m)
            e_rest = total ^ e_tail
            rot_sign = (e_tail * e_rest) & 1
            for q in range(0, s - p + 1):  # head length
                block = bars[s - p :] + (a0,) + bars[:q]
                mid = bars[q : s - p]
                blen = p + 1 + q
                for start, f in _phi_runs(blen, p, phi_arities):
                    inner = phi.eval_basis(f, block[start : start + f])
                    if inner.is_zero():
                        continue
                    e_before = 0
                    for m in block[:start]:
                        e_before ^= shifted_parity(m)
                    sign = rot_sign ^ (p_phi & e_before)
                    args = []
                    for idx in range(start):
                        args.append(Multivector(N, {block[idx]: ring.one()}, ring))
                    args.append(inner)
                    for idx in range(start + f, blen):
                        args.append(Multivector(N, {block[idx]: ring.one()}, ring))
                    val = mu.eval(blen - f + 1, args)
                    if val.is_zero():
                        continue

                    def mk(mask, mid=mid):
                        return (mask, mid)

                    _emit_multivector(out, ring, val.scale(coeff), mk, sign)
    return Chain(N, ring, out)


def contraction_B(model: AInftyModel, phi: HochschildCochain, chain: Chain) -> Chain:
    """B^{1|1}(phi): unit-headed rotations with one phi block applied inside."""
    ring, N = chain.ring, chain.N
    out = {}
    p_phi = phi.parity
    phi_arities = phi.arities()
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        word = (a0,) + bars
        spar = [shifted_parity(m) for m in word]
        total = 0
        for p in spar:
            total ^= p
        for j in range(0, s + 1):
            e_tail = 0
            for m in word[j:]:
                e_tail ^= shifted_parity(m)
            e_head = total ^ e_tail
            rot_sign = (e_tail * e_head) & 1
            rotated = word[j:] + word[:j]
            w0_pos = (s + 1 - j) % (s + 1)
            for f in phi_arities:
                for start in range(0, s + 2 - f):
                    run = rotated[start : start + f]
                    inner = phi.eval_basis(f, run)
                    if inner.is_zero():
                        continue
                    e_before = 0
                    for m in rotated[:start]:
                        e_before ^= shifted_parity(m)
                    sign = rot_sign ^ (p_phi & e_before)
                    prefix = rotated[:start]
                    suffix = rotated[start + f :]
                    for mask, c in inner.terms.items():
                        # every output slot is a bar; units anywhere kill the term
                        new_word = prefix + (mask,) + suffix
                        if any(m == 0 for m in new_word):
                            continue
                        key = (0, new_word)
                        _add_term(out, ring, key, -coeff * c if sign else coeff * c)
    return Chain(N, ring, out)


class NegativeCyclicElement:
    """Map from u-exponent to chain, with a bounded Laurent window."""

    def __init__(self, N, ring, data=None, window=(-2, 4)):
        self.N = N
        self.ring = ring
        self.window = tuple(window)
        self.data = {}
        if data:
            for m, c in data.items():
                if not c.is_zero():
                    if not self.window[0] <= m < self.window[1]:
                        raise ValueError(f"u-power {m} outside window {self.window}")
                    self.data[m] = c

    def widen(self, lo_extra, hi_extra=0):
        return NegativeCyclicElement(
            self.N, self.ring, self.data, (self.window[0] - lo_extra, self.window[1] + hi_extra)
        )

    def shift_u(self, k):
        return NegativeCyclicElement(
            self.N,
            self.ring,
            {m + k: c for m, c in self.data.items()},
            (self.window[0] + min(k, 0), self.window[1] + max(k, 0)),
        )

    def __add__(self, other):
        window = (min(self.window[0], other.window[0]), max(self.window[1], other.window[1]))
        data = dict(self.data)
        for m, c in other.data.items():
            data[m] = data[m] + c if m in data else c
        return NegativeCyclicElement(self.N, self.ring, data, window)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return NegativeCyclicElement(
            self.N, self.ring, {m: ch.scale(c) for m, ch in self.data.items()}, self.window
        )

    def map_chains(self, fn, u_shift=0):
        data = {}
        for m, c in self.data.items():
            v = fn(c)
            if not v.is_zero():
                data[m + u_shift] = data[m + u_shift] + v if m + u_shift in data else v
        window = (self.window[0] + min(u_shift, 0), self.window[1] + max(u_shift, 0))
        return NegativeCyclicElement(self.N, self.ring, data, window)

    def is_zero(self):
        return all(c.is_zero() for c in self.data.values())

    def min_pole(self):
        powers = [m for m, c in self.data.items() if not c.is_zero()]
        return min(powers, default=0)


def contraction(model: AInftyModel, phi: HochschildCochain, element) -> NegativeCyclicElement:
    """iota(phi) = b^{1|1}(phi) + u B^{1|1}(phi) on chains or cyclic elements."""
    if isinstance(element, Chain):
        element = NegativeCyclicElement(element.N, element.ring, {0: element}, (0, 2))
    low = element.map_chains(lambda c: contraction_b(model, phi, c))
    high = element.map_chains(lambda c: contraction_B(model, phi, c), u_shift=1)
    return low + high


def cyclic_differential(model: AInftyModel, element: NegativeCyclicElement, u_max=None) -> NegativeCyclicElement:
    """b + uB, quotienting above the window top when u_max is given."""
    cap = element.window[1] if u_max is None else u_max
    low = element.map_chains(lambda c: hochschild_b(model, c))
    high = element.map_chains(connes_B, u_shift=1)
    total = low + high
    data = {m: c for m, c in total.data.items() if m < cap}
    return NegativeCyclicElement(element.N, element.ring, data, (total.window[0], cap))


class TruncatedComplexSlice:
    """Q-basis presentation of a truncated (negative cyclic) chain complex.

    Columns are (u_power, t_monomial, chain key) triples subject to a length
    bound len <= length_cap + (u - u_min); the differential b + uB preserves
    the span and drops above the u ceiling (a quotient of the honest complex).
    For Hochschild-only complexes pass u_levels = 1; B is then omitted.
    """

    def __init__(self, model, length_cap, u_levels=1, u_min=0, with_B=None, slope=1):
        self.model = model
        self.N = model.N
        self.ring = model.ring
        self.length_cap = length_cap
        self.u_min = u_min
        self.u_levels = u_levels
        self.with_B = (u_levels > 1) if with_B is None else with_B
        # lengths grow by `slope` per u-power: the transfer homotopy for a
        # degree-D potential lengthens chains by up to D per B-step
        self.slope = slope
        if isinstance(model.ring, TruncatedPolyRing):
            self.tring = model.ring
            self.tmonos = list(self.tring.monomials())
            self.base = self.tring.base
        else:
            self.tring = None
            self.tmonos = [()]
            self.base = model.ring
        self.columns = None
        self._d_cache = {}

    def chain_keys_up_to(self, cap):
        pool = [m for m in range(1, 1 << self.N)]
        keys = []
        for a0 in range(1 << self.N):
            keys.append((a0, ()))
            for s in range(1, cap + 1):
                for bars in itertools.product(pool, repeat=s):
                    keys.append((a0, bars))
        return keys

    def column_ids(self):
        if self.columns is None:
            cols = []
            for rel_u in range(self.u_levels):
                m = self.u_min + rel_u
                cap = self.length_cap + self.slope * rel_u
                for key in self.chain_keys_up_to(cap):
                    for e in self.tmonos:
                        cols.append((m, e, key))
            self.columns = cols
        return self.columns

    def parity(self, col) -> int:
        return chain_parity(col[2])

    def in_slice(self, col) -> bool:
        m, e, key = col
        if not self.u_min <= m < self.u_min + self.u_levels:
            return False
        return len(key[1]) <= self.length_cap + self.slope * (m - self.u_min)

    def chain_to_vector(self, m, chain):
        """Expand a Chain at u-power m over the Q-basis columns."""
        vec = {}
        for key, c in chain.terms.items():
            if self.tring is not None:
                for e, coeff in c.terms.items():
                    for i, q in enumerate(self.base.qq_coords(coeff)):
                        if q:
                            col = (m, e, key) if self.base.qq_dim() == 1 else (m, (e, i), key)
                            vec[col] = vec.get(col, Fraction(0)) + q
            else:
                for i, q in enumerate(self.base.qq_coords(c)):
                    if q:
                        col = (m, (), key) if self.base.qq_dim() == 1 else (m, ((), i), key)
                        vec[col] = vec.get(col, Fraction(0)) + q
        return {k: v for k, v in vec.items() if v}

    def element_to_vector(self, element) -> dict:
        vec = {}
        for m, chain in element.data.items():
            for k, v in self.chain_to_vector(m, chain).items():
                vec[k] = vec.get(k, Fraction(0)) + v
        return {k: v for k, v in vec.items() if v}

    def column_chain(self, col):
        m, e, key = col
        if self.tring is not None:
            coeff = TPoly(self.tring, {e: self.base.one()})
        else:
            coeff = self.base.one()
        return m, Chain(self.N, self.ring, {key: coeff})

    def vector_to_element(self, vec, window=None):
        data = {}
        for col, q in vec.items():
            m, chain = self.column_chain(col)
            chain = chain.scale(q)
            data[m] = data[m] + chain if m in data else chain
        if window is None:
            window = (self.u_min, self.u_min + self.u_levels)
        return NegativeCyclicElement(self.N, self.ring, data, window)

    def differential_column(self, col):
        hit = self._d_cache.get(col)
        if hit is not None:
            return hit
        m, chain = self.column_chain(col)
        out = {}
        bc = hochschild_b(self.model, chain)
        for k, v in self.chain_to_vector(m, bc).items():
            out[k] = out.get(k, Fraction(0)) + v
        if self.with_B and m + 1 < self.u_min + self.u_levels:
            Bc = connes_B(chain)
            for k, v in self.chain_to_vector(m + 1, Bc).items():
                out[k] = out.get(k, Fraction(0)) + v
        out = {k: v for k, v in out.items() if v and self.in_slice(k)}
        self._d_cache[col] = out
        return out


class HomologyData:
    def __init__(self, dims, stable_dims, representatives, boundary_echelon, slice_, stabilized):
        self.dims = dims
        self.stable_dims = stable_dims
        self.representatives = representatives
        self.boundary_echelon = boundary_echelon
        self.slice = slice_
        self.stabilized = stabilized

    def reduce_against(self, vec):
        """Coordinates of a cycle vector on the stable representatives mod boundaries."""
        residue, combo = self._rep_echelon.reduce(dict(vec), {})
        if residue:
            return None
        return {tag: -v for tag, v in combo.items() if isinstance(tag, tuple) and tag[0] == "rep"}


def _column_priority(col):
    m, e, key = col
    return (len(key[1]), m, sum(e) if isinstance(e, tuple) and e and isinstance(e[0], int) else 0, str(col))


def homology(slice_, parity=None, smaller_caps=None):
    """Homology of the sliced complex, with eventual-image stabilization.

    ``smaller_caps`` lists decreasing length caps; the stable dimension is the
    first repeated rank of im(H_cap -> H) and representatives are drawn from
    the matching kernel vectors.
    """
    from .linalg import Echelon

    cols = [c for c in slice_.column_ids() if parity is None or slice_.parity(c) == parity]
    other = [c for c in slice_.column_ids() if parity is None or slice_.parity(c) != parity]
    prio = _column_priority
    # boundaries into this parity come from the opposite-parity columns
    bnd = Echelon(priority=prio)
    for c in other:
        bnd.insert(slice_.differential_column(c))
    rank_b = bnd.rank
    # kernel dimension from this parity's differential
    img = Echelon(priority=prio)
    for c in cols:
        img.insert(slice_.differential_column(c))
    dim_z = len(cols) - img.rank
    dim_h = dim_z - rank_b

    caps = smaller_caps if smaller_caps is not None else list(range(slice_.length_cap - 1, -1, -1))
    stable_dim = dim_h
    reps = []
    seen = None
    stabilized = False
    for cap in caps:
        sub_cols = [c for c in cols if len(c[2][1]) <= cap + slice_.slope * (c[0] - slice_.u_min)]
        kernel, _ = nullspace([(c, slice_.differential_column(c)) for c in sub_cols], priority=prio)
        ech = Echelon(priority=prio, track=True)
        for c in other:
            ech.insert(slice_.differential_column(c))
        new_reps = []
        for i, vec in enumerate(kernel):
            pivot = ech.insert(vec, ("rep", i))
            if pivot is not None:
                new_reps.append(vec)
        rank = len(new_reps)
        stable_dim = rank
        reps = new_reps
        if seen == rank:
            stabilized = True
            break
        seen = rank
    data = HomologyData({"dim": dim_h}, stable_dim, reps, bnd, slice_, stabilized)
    # echelon for reducing cycles against representatives mod boundaries
    rep_ech = Echelon(priority=prio, track=True)
    for c in other:
        rep_ech.insert(slice_.differential_column(c))
    for i, vec in enumerate(reps):
        rep_ech.insert(vec, ("rep", i))
    data._rep_echelon = rep_ech
    return data


class _ScaledArityComponent:
    def __init__(self, model, n, factor):
        self.model = model
        self.n = n
        self.factor = factor

    def eval_basis(self, masks):
        val = self.model.mu_basis(self.n, masks)
        if self.factor == 1:
            return val
        return val.scale(self.model.ring.coerce(self.factor))


def euler_scaled_cochain(model, arity_cap) -> HochschildCochain:
    """The cochain with arity-n component (2 - n) mu_n (an exact cocycle)."""
    comps = {}
    for n in range(0, arity_cap + 1):
        if n == 2:
            continue
        comps[n] = _ScaledArityComponent(model, n, 2 - n)
    return HochschildCochain(model.N, model.ring, comps, parity=1)


def getzler_connection(model: AInftyModel, j: int, element: NegativeCyclicElement) -> NegativeCyclicElement:
    """nabla_j = d/dt_j - u^{-1} iota(d mu / dt_j); widens the window by one."""
    if not isinstance(model.ring, TruncatedPolyRing):
        raise ValueError("Getzler connection needs a model over a parameter ring")
    tring = model.ring
    ks = model.kodaira_spencer_cochain(j, model.arity_max)
    dt = element.map_chains(lambda c: c.scale_map(lambda v: tring.partial_t(v, j)))
    cap = contraction(model, ks, element).shift_u(-1)
    return dt - cap


def u_connection(model: AInftyModel, element: NegativeCyclicElement, arity_cap=None) -> NegativeCyclicElement:
    """d/du + Gamma/2u + iota(prod (2-n) mu_n)/(2 u^2); widens the window by two."""
    cap = model.arity_max if arity_cap is None else arity_cap
    ring = model.ring
    half = ring.coerce(Fraction(1, 2))
    ddu = NegativeCyclicElement(
        element.N,
        element.ring,
        {m - 1: c.scale(ring.coerce(m)) for m, c in element.data.items() if m != 0},
        (element.window[0] - 1, element.window[1]),
    )
    gamma = element.map_chains(lambda c: _length_scale(c, ring), u_shift=-1).scale(half)
    nu = euler_scaled_cochain(model, cap)
    iota_term = contraction(model, nu, element).shift_u(-2).scale(half)
    return ddu + gamma + iota_term


def _length_scale(chain: Chain, ring) -> Chain:
    out = {}
    for key, c in chain.terms.items():
        n = len(key[1])
        if n:
            out[key] = c * ring.coerce(-n)
    return Chain(chain.N, chain.ring, out)
