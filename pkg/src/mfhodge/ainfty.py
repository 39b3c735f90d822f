"""Assembly of the cyclic minimal A-infinity model mu = delta + graph expansion.

The arity-n product is
    mu_n = delta_(n=2) + sum_k (1/k!) sum_Gamma w_Gamma U_Gamma
with Gamma running over contributing type-(k, n) graphs.  Evaluation goes
through per-arity symbol tables: every (graph, word) pair reduces to an
assignment of a derivation subset to each input slot together with an exact
coefficient; the input-independent Koszul bookkeeping is folded into the
coefficient once, so products on arbitrary tuples are table lookups.

Also here: the A-infinity and cyclicity verifiers, the Euler identity, the
tangent map of the graph expansion, equivariance checks, and the smash
product with a finite linear symmetry group.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .exterior import (
    LinearSymmetry,
    Multivector,
    exterior_degree_operator,
    popcount,
    shifted_product,
    trace,
    wedge,
)
from .graphs import enumerate_star_lists, m_sign_mask, shuffle_count, temporal_sequence
from .potential import Potential, symmetrize_component
from .scalars import QQ, TruncatedPolyRing


def _star_list_weight(stars, n) -> Fraction:
    from .graphs import AdmissibleGraph, weight

    return weight(AdmissibleGraph(len(stars), n, tuple(stars)))


def _sequence_cross_sign(seq) -> int:
    """Parity of pairs (later application at a larger slot, earlier at smaller)."""
    cross = 0
    for i in range(len(seq)):
        slot_i = seq[i][0]
        for j in range(i):
            if seq[j][0] < slot_i:
                cross ^= 1
    return cross


def _slot_canonicalize(seq, n):
    """Per-slot sorted derivation tuples plus the sorting parity; None on repeats."""
    arrivals = [[] for _ in range(n)]
    for slot, gen in seq:
        arrivals[slot - 1].append(gen)
    sign = 0
    assignment = []
    for lst in arrivals:
        if len(set(lst)) != len(lst):
            return None
        # parity of the permutation sorting the arrival order ascending
        for i in range(len(lst)):
            for j in range(i + 1, len(lst)):
                if lst[i] > lst[j]:
                    sign ^= 1
        assignment.append(tuple(sorted(lst)))
    return tuple(assignment), sign


def table_for_vertices(n: int, vertices, ring, factor):
    """Symbol table of sum_Gamma w_Gamma U_Gamma with fixed vertex potentials.

    ``vertices`` lists one polyvector potential per interior vertex; the star
    size menu at a vertex is the set of degrees its potential supports.
    """
    table = {}
    menus_sizes = []
    word_cache = []
    for V in vertices:
        sizes = sorted({sum(e) for e in V.terms})
        menus_sizes.append(sizes)
        word_cache.append({sz: symmetrize_component(V, sz) for sz in sizes})
    if any(not sizes for sizes in menus_sizes):
        return table
    target = 2 * len(vertices) + n - 2
    if target < 0:
        return table
    for stars in enumerate_star_lists(n, menus_sizes, target):
        w = _star_list_weight(stars, n)
        if w == 0:
            continue
        base = ring.coerce(w) * ring.coerce(factor)
        menus = [list(word_cache[v][len(s)].items()) for v, s in enumerate(stars)]
        for words in itertools.product(*menus):
            coeff = base
            for _, c in words:
                coeff = coeff * c
            seq = temporal_sequence(stars, [wd for wd, _ in words])
            canon = _slot_canonicalize(seq, n)
            if canon is None:
                continue
            assignment, sort_sign = canon
            if (_sequence_cross_sign(seq) ^ sort_sign) & 1:
                coeff = -coeff
            prev = table.get(assignment)
            coeff = coeff if prev is None else prev + coeff
            if ring.is_zero(coeff):
                table.pop(assignment, None)
            else:
                table[assignment] = coeff
    return table


def k_bound(n: int, N: int) -> int:
    """Interior vertices beyond this act by zero: 2k+n-2 <= n N derivations."""
    return max(1, (n * (N - 1) + 2) // 2)


def mu_symbol_table(W: Potential, n: int, euler_weighted=False):
    """Aggregated table over k >= 1 with 1/k! prefactors (optionally Euler-weighted)."""
    ring = W.ring
    total = {}
    for k in range(1, k_bound(n, W.N) + 1):
        factor = Fraction(1, math.factorial(k))
        if euler_weighted:
            factor *= 2 * k + n - 2
        if factor == 0:
            continue
        part = table_for_vertices(n, [W] * k, ring, factor)
        for key, c in part.items():
            prev = total.get(key)
            s = c if prev is None else prev + c
            if ring.is_zero(s):
                total.pop(key, None)
            else:
                total[key] = s
    return total


def tangent_symbol_table(W: Potential, h: Potential, n: int):
    """Table of the tangent map sum_k 1/k! U_(k+1)(W..W, h) at arity n."""
    ring = W.ring
    total = {}
    cap = k_bound(n, W.N)
    for k in range(1, cap + 2):
        factor = Fraction(1, math.factorial(k - 1))
        part = table_for_vertices(n, [W] * (k - 1) + [h], ring, factor)
        for key, c in part.items():
            prev = total.get(key)
            s = c if prev is None else prev + c
            if ring.is_zero(s):
                total.pop(key, None)
            else:
                total[key] = s
    return total


def evaluate_table(table, masks, N, ring) -> Multivector:
    """Apply a symbol table to a tuple of basis masks."""
    out = {}
    n = len(masks)
    for assignment, coeff in table.items():
        sign = 1
        pref = 0
        for s in range(n):
            if len(assignment[s]) & 1 and pref & 1:
                sign = -sign
            pref ^= popcount(masks[s]) & 1
        finals = []
        dead = False
        for s in range(n):
            m = masks[s]
            for gen in assignment[s]:
                bit = 1 << (gen - 1)
                if not m & bit:
                    dead = True
                    break
                below = popcount(m & (bit - 1))
                if below & 1:
                    sign = -sign
                m ^= bit
            if dead:
                break
            finals.append(m)
        if dead:
            continue
        ms = m_sign_mask(finals)
        if ms is None:
            continue
        total_sign = sign * ms[0]
        c = coeff if total_sign > 0 else -coeff
        prev = out.get(ms[1])
        s2 = c if prev is None else prev + c
        if ring.is_zero(s2):
            out.pop(ms[1], None)
        else:
            out[ms[1]] = s2
    return Multivector(N, out, ring)


class ModelBase:
    """Shared verification suites over any cyclic product family."""

    def basis_tokens(self):
        raise NotImplementedError

    def token_vector(self, token):
        raise NotImplementedError

    def token_shifted_parity(self, token) -> int:
        raise NotImplementedError

    def zero_vector(self):
        raise NotImplementedError

    def mu(self, n, inputs):
        raise NotImplementedError

    def wedge(self, a, b):
        raise NotImplementedError

    def trace(self, a):
        raise NotImplementedError

    def mu_tokens(self, n, tokens):
        key = (n, tuple(tokens))
        cache = getattr(self, "_token_cache", None)
        if cache is None:
            cache = self._token_cache = {}
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = self.mu(n, [self.token_vector(t) for t in tokens])
        return hit

    def split_terms(self, a):
        """Yield (Z/2 parity, single-term element) over the terms of a."""
        raise NotImplementedError

    def shifted_pairing(self, a, b):
        """<a, b> = (-1)^|a| Tr(a ^ b), the trace pairing read on A[1].

        On the shifted complex this twist is what makes the printed cyclicity
        rotation signs close up on tuples involving the unit.
        """
        total = self.ring.zero()
        for parity, single in self.split_terms(a):
            v = self.trace(self.wedge(single, b))
            if parity:
                v = -v
            total = total + v
        return total

    def has_curvature(self) -> bool:
        return not self.mu(0, []).is_zero()

    def verify_ainfty(self, n_max: int, max_reports=10):
        """Quadratic relations on all basis tuples with arities <= n_max.

        Returns a list of violation records; empty means the relations hold.
        For curved models the s = 0 insertions are included, so n_max must
        stay below the arity cap.
        """
        violations = []
        curved = self.has_curvature()
        tokens = list(self.basis_tokens())
        for n in range(0, n_max + 1):
            for combo in itertools.product(tokens, repeat=n):
                total = self.zero_vector()
                for s in range(0, n + 1):
                    if s == 0 and not curved:
                        continue
                    for r in range(0, n - s + 1):
                        inner = self.mu_tokens(s, combo[r : r + s])
                        if inner.is_zero():
                            continue
                        args = [self.token_vector(t) for t in combo[:r]]
                        args.append(inner)
                        args.extend(self.token_vector(t) for t in combo[r + s :])
                        term = self.mu(n - s + 1, args)
                        sign = sum(self.token_shifted_parity(t) for t in combo[:r]) & 1
                        total = total + (-term if sign else term)
                if not total.is_zero():
                    violations.append({"n": n, "inputs": combo, "residual": total})
                    if len(violations) >= max_reports:
                        return violations
        return violations

    def verify_cyclic(self, n_max: int, max_reports=10):
        """Trace cyclicity of mu_n for n <= n_max on all basis tuples."""
        violations = []
        tokens = list(self.basis_tokens())
        for n in range(1, n_max + 1):
            for combo in itertools.product(tokens, repeat=n + 1):
                lhs = self.shifted_pairing(self.mu_tokens(n, combo[:n]), self.token_vector(combo[n]))
                rotated = (combo[n],) + combo[: n - 1]
                rhs = self.shifted_pairing(self.mu_tokens(n, rotated), self.token_vector(combo[n - 1]))
                sgn = (self.token_shifted_parity(combo[n]) * sum(self.token_shifted_parity(t) for t in combo[:n])) & 1
                if sgn:
                    rhs = -rhs
                if lhs != rhs:
                    violations.append({"n": n, "inputs": combo, "lhs": lhs, "rhs": rhs})
                    if len(violations) >= max_reports:
                        return violations
        return violations


class AInftyModel(ModelBase):
    """Minimal cyclic model on K[eps_1..eps_N] built from a potential.

    Products are evaluated lazily through cached symbol tables; hand-specified
    basis tables are supported for fixture algebras.
    """

    def __init__(self, N, ring, arity_max, potential=None, hand_tables=None):
        self.N = N
        self.ring = ring
        self.arity_max = arity_max
        self.potential = potential
        self.hand_tables = hand_tables
        self._tables = {}
        self._euler_tables = {}
        self._mu_cache = {}
        self._fault = None

    @classmethod
    def from_potential(cls, W: Potential, arity_max=6):
        return cls(W.N, W.ring, arity_max, potential=W)

    @classmethod
    def from_hand_tables(cls, N, ring, tables, arity_max=6):
        """tables: {(n, mask tuple): Multivector}; must already be strictly unital."""
        return cls(N, ring, arity_max, hand_tables=tables)

    def basis_tokens(self):
        return range(1 << self.N)

    def token_vector(self, mask):
        return Multivector(self.N, {mask: self.ring.one()}, self.ring)

    def token_shifted_parity(self, mask):
        return (popcount(mask) + 1) & 1

    def zero_vector(self):
        return Multivector(self.N, {}, self.ring)

    def wedge(self, a, b):
        return wedge(a, b)

    def trace(self, a):
        return trace(a)

    def split_terms(self, a):
        for m, c in a.terms.items():
            yield popcount(m) & 1, Multivector(self.N, {m: c}, self.ring)

    def table(self, n, euler=False):
        store = self._euler_tables if euler else self._tables
        if n not in store:
            if self.potential is None:
                store[n] = {}
            else:
                store[n] = mu_symbol_table(self.potential, n, euler_weighted=euler)
            if not euler and self._fault is not None and self._fault[0] == n:
                key, delta = self._fault[1], self._fault[2]
                tab = dict(store[n])
                tab[key] = tab.get(key, self.ring.zero()) + self.ring.coerce(delta)
                store[n] = tab
        return store[n]

    def inject_table_fault(self, n, assignment, delta=1):
        """Perturb one aggregated graph coefficient (checker sensitivity tests)."""
        self._fault = (n, assignment, delta)
        self._tables.pop(n, None)
        self._mu_cache.clear()

    def clear_fault(self):
        self._fault = None
        self._tables.clear()
        self._mu_cache.clear()

    def mu_basis(self, n, masks) -> Multivector:
        masks = tuple(masks)
        key = (n, masks)
        hit = self._mu_cache.get(key)
        if hit is not None:
            return hit
        if self.hand_tables is not None:
            out = self.hand_tables.get(key)
            if out is None:
                out = self.zero_vector()
        else:
            out = evaluate_table(self.table(n), masks, self.N, self.ring)
            if n == 2:
                a = self.token_vector(masks[0])
                b = self.token_vector(masks[1])
                out = out + shifted_product(a, b)
        self._mu_cache[key] = out
        return out

    def mu(self, n, inputs) -> Multivector:
        """mu_n on arbitrary multivectors, by multilinear expansion."""
        if n > self.arity_max:
            raise ValueError(f"arity {n} above arity_max={self.arity_max}")
        if n == 0:
            return self.mu_basis(0, ())
        out = self.zero_vector()
        expansions = [list(a.terms.items()) for a in inputs]
        for combo in itertools.product(*expansions):
            coeff = self.ring.one()
            for _, c in combo:
                coeff = coeff * c
            part = self.mu_basis(n, tuple(m for m, _ in combo))
            if not part.is_zero():
                out = out + part.scale(coeff)
        return out

    def euler_residual(self, n):
        """LHS - RHS of the Euler identity at arity n, on all basis tuples."""
        bad = {}
        euler_table = {} if self.potential is None else mu_symbol_table(self.potential, n, euler_weighted=True)
        for masks in itertools.product(range(1 << self.N), repeat=n):
            lhs = evaluate_table(euler_table, masks, self.N, self.ring)
            rhs = self.zero_vector()
            for i in range(n):
                scaled = exterior_degree_operator(self.token_vector(masks[i]))
                if scaled.is_zero():
                    continue
                args = [self.token_vector(m) for m in masks]
                args[i] = scaled
                rhs = rhs + self.mu(n, args)
            rhs = rhs - exterior_degree_operator(self.mu_basis(n, masks))
            res = lhs - rhs
            if not res.is_zero():
                bad[masks] = res
        return bad

    def structure_cochain(self, arity_cap=None):
        """The full product family as a Hochschild cochain (odd)."""
        cap = self.arity_max if arity_cap is None else arity_cap
        comps = {}
        for n in range(0, cap + 1):
            comps[n] = _TableComponent(self, n)
        return HochschildCochain(self.N, self.ring, comps, parity=1)

    def kodaira_spencer_cochain(self, j, arity_cap=None):
        """d(mu)/dt_j for a model over a truncated parameter ring."""
        if not isinstance(self.ring, TruncatedPolyRing):
            raise ValueError("Kodaira-Spencer classes need a parameter ring")
        cap = self.arity_max if arity_cap is None else arity_cap
        tring = self.ring

        def diff(vec):
            return vec.map_ring(tring, lambda c: tring.partial_t(c, j))

        comps = {}
        for n in range(0, cap + 1):
            comps[n] = _DerivedComponent(self, n, diff)
        return HochschildCochain(self.N, self.ring, comps, parity=1)

    def verify_equivariance(self, g: LinearSymmetry, n_max, max_reports=10):
        """g mu_n(a..) = mu_n(g a..) on all basis tuples, n <= n_max."""
        if self.potential is not None and self.ring == QQ:
            moved = self.potential.substitute_linear(g.matrix)
            if moved != self.potential:
                raise ValueError("symmetry does not fix the potential")
        violations = []
        for n in range(1, n_max + 1):
            for masks in itertools.product(range(1 << self.N), repeat=n):
                args = [g.act(self.token_vector(m)) for m in masks]
                lhs = self.mu(n, args)
                rhs = g.act(self.mu_basis(n, masks))
                if lhs != rhs:
                    violations.append({"n": n, "inputs": masks})
                    if len(violations) >= max_reports:
                        return violations
        return violations


class _TableComponent:
    """Arity-n component of the structure cochain, delegating to the model."""

    def __init__(self, model, n):
        self.model = model
        self.n = n

    def eval_basis(self, masks):
        return self.model.mu_basis(self.n, masks)


class _DerivedComponent:
    def __init__(self, model, n, transform):
        self.model = model
        self.n = n
        self.transform = transform

    def eval_basis(self, masks):
        return self.transform(self.model.mu_basis(self.n, masks))


class _DictComponent:
    def __init__(self, N, ring, table):
        self.N = N
        self.ring = ring
        self.table = table

    def eval_basis(self, masks):
        out = self.table.get(tuple(masks))
        if out is None:
            return Multivector(self.N, {}, self.ring)
        return out


class HochschildCochain:
    """Arity-indexed family of multilinear maps on the shifted algebra."""

    def __init__(self, N, ring, components, parity):
        self.N = N
        self.ring = ring
        self.components = components
        self.parity = parity & 1

    @classmethod
    def from_tables(cls, N, ring, tables, parity):
        comps = {n: _DictComponent(N, ring, tab) for n, tab in tables.items()}
        return cls(N, ring, comps, parity)

    @classmethod
    def from_symbol_tables(cls, N, ring, symbol_tables, parity):
        comps = {n: _SymbolComponent(N, ring, tab) for n, tab in symbol_tables.items()}
        return cls(N, ring, comps, parity)

    def arities(self):
        return sorted(self.components)

    def eval_basis(self, n, masks) -> Multivector:
        comp = self.components.get(n)
        if comp is None:
            return Multivector(self.N, {}, self.ring)
        return comp.eval_basis(tuple(masks))

    def eval(self, n, inputs) -> Multivector:
        out = Multivector(self.N, {}, self.ring)
        comp = self.components.get(n)
        if comp is None:
            return out
        expansions = [list(a.terms.items()) for a in inputs]
        for combo in itertools.product(*expansions):
            coeff = self.ring.one()
            for _, c in combo:
                coeff = coeff * c
            part = comp.eval_basis(tuple(m for m, _ in combo))
            if not part.is_zero():
                out = out + part.scale(coeff)
        return out


class _SymbolComponent:
    def __init__(self, N, ring, symbol_table):
        self.N = N
        self.ring = ring
        self.symbol_table = symbol_table

    def eval_basis(self, masks):
        return evaluate_table(self.symbol_table, masks, self.N, self.ring)


def exterior_degree_cochain(N, ring) -> HochschildCochain:
    """T(eps_I) = |I| eps_I as an arity-one even cochain."""
    comps = {1: _FunctionComponent(lambda masks: _degree_scale(N, ring, masks[0]))}
    return HochschildCochain(N, ring, comps, parity=0)


class _FunctionComponent:
    def __init__(self, fn):
        self.fn = fn

    def eval_basis(self, masks):
        return self.fn(masks)


def _degree_scale(N, ring, mask):
    k = popcount(mask)
    if k == 0:
        return Multivector(N, {}, ring)
    return Multivector(N, {mask: ring.coerce(k)}, ring)


def unit_cochain(N, ring) -> HochschildCochain:
    """Arity-zero cochain with value the unit (odd in the shifted convention)."""
    comps = {0: _FunctionComponent(lambda masks: Multivector.unit(N, ring))}
    return HochschildCochain(N, ring, comps, parity=1)


def cochain_compose(phi: HochschildCochain, psi: HochschildCochain, arity_cap: int) -> HochschildCochain:
    """Gerstenhaber circle product phi o psi up to the arity cap."""
    N, ring = phi.N, phi.ring

    def build(n):
        def fn(masks):
            total = Multivector(N, {}, ring)
            for s in psi.arities():
                if s > n:
                    continue
                m_out = n - s + 1
                if m_out not in phi.components:
                    continue
                for r in range(0, n - s + 1):
                    inner = psi.eval_basis(s, masks[r : r + s])
                    if inner.is_zero():
                        continue
                    sign = (psi.parity * sum((popcount(m) + 1) for m in masks[:r])) & 1
                    args = [Multivector(N, {m: ring.one()}, ring) for m in masks[:r]]
                    args.append(inner)
                    args.extend(Multivector(N, {m: ring.one()}, ring) for m in masks[r + s :])
                    term = phi.eval(m_out, args)
                    total = total + (-term if sign else term)
            return total

        return fn

    comps = {n: _FunctionComponent(build(n)) for n in range(0, arity_cap + 1)}
    return HochschildCochain(N, ring, comps, parity=(phi.parity + psi.parity) & 1)


def gerstenhaber_bracket(phi, psi, arity_cap: int) -> HochschildCochain:
    left = cochain_compose(phi, psi, arity_cap)
    right = cochain_compose(psi, phi, arity_cap)
    sign = (phi.parity * psi.parity) & 1
    N, ring = phi.N, phi.ring

    def build(n):
        def fn(masks):
            a = left.eval_basis(n, masks)
            b = right.eval_basis(n, masks)
            return a - b if not sign else a + b

        return fn

    comps = {n: _FunctionComponent(build(n)) for n in range(0, arity_cap + 1)}
    return HochschildCochain(N, ring, comps, parity=(phi.parity + psi.parity) & 1)


def cochain_differential(model: AInftyModel, phi: HochschildCochain, arity_cap: int) -> HochschildCochain:
    """[mu, phi] with mu the structure cochain of the model."""
    mu = model.structure_cochain(arity_cap + 1)
    return gerstenhaber_bracket(mu, phi, arity_cap)


def tangent_map(model: AInftyModel, h: Potential, arity_bound: int) -> HochschildCochain:
    """dU_W(h) = sum_k 1/k! U_(k+1)(W..W, h), supported on arities <= bound."""
    if model.potential is None:
        raise ValueError("tangent map needs a potential-backed model")
    tables = {n: tangent_symbol_table(model.potential, h, n) for n in range(0, arity_bound + 1)}
    return HochschildCochain.from_symbol_tables(model.N, model.ring, tables, parity=1)


def is_cocycle(model: AInftyModel, phi: HochschildCochain, arity_bound: int) -> bool:
    d = cochain_differential(model, phi, arity_bound)
    for n in range(0, arity_bound + 1):
        for masks in itertools.product(range(1 << model.N), repeat=n):
            if not d.eval_basis(n, masks).is_zero():
                return False
    return True


def coboundary_solve(model: AInftyModel, phi: HochschildCochain, arity_bound: int):
    """Find psi supported on arities <= arity_bound-1 with [mu, psi] = phi.

    Works over the rationals by solving the sparse linear system on basis
    tables; returns the cochain or None when phi is not exact within bound.
    """
    from .linalg import solve

    if model.ring != QQ:
        raise ValueError("coboundary solve implemented over the rationals")
    N = model.N
    masks_all = list(range(1 << N))
    unknowns = []
    for n in range(0, arity_bound):
        for masks in itertools.product(masks_all, repeat=n):
            for out_mask in masks_all:
                unknowns.append((n, masks, out_mask))

    columns = []
    parity_psi = phi.parity  # [mu, psi] shifts parity by one
    for tag in unknowns:
        n0, masks0, out0 = tag
        basis_tables = {n0: {masks0: Multivector(N, {out0: Fraction(1)}, QQ)}}
        psi = HochschildCochain.from_tables(N, QQ, basis_tables, parity=(parity_psi + 1) & 1)
        dpsi = cochain_differential(model, psi, arity_bound)
        col = {}
        for n in range(0, arity_bound + 1):
            for masks in itertools.product(masks_all, repeat=n):
                val = dpsi.eval_basis(n, masks)
                for m, c in val.terms.items():
                    col[(n, masks, m)] = Fraction(c)
        columns.append((tag, col))

    target = {}
    for n in range(0, arity_bound + 1):
        for masks in itertools.product(masks_all, repeat=n):
            val = phi.eval_basis(n, masks)
            for m, c in val.terms.items():
                target[(n, masks, m)] = Fraction(c)
    sol = solve(columns, target)
    if sol is None:
        return None
    tables = {}
    for (n, masks, out_mask), c in sol.items():
        if c == 0:
            continue
        tab = tables.setdefault(n, {})
        vec = tab.get(masks, Multivector(N, {}, QQ))
        tab[masks] = vec + Multivector(N, {out_mask: c}, QQ)
    return HochschildCochain.from_tables(N, QQ, tables, parity=(parity_psi + 1) & 1)


class SmashVector:
    """Element of A tensor K[G]; terms keyed by (mask, group index)."""

    __slots__ = ("N", "ring", "terms")

    def __init__(self, N, ring, terms=None):
        self.N = N
        self.ring = ring
        self.terms = {k: c for k, c in (terms or {}).items() if not ring.is_zero(c)}

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if self.ring.is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return SmashVector(self.N, self.ring, out)

    def __neg__(self):
        return SmashVector(self.N, self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SmashVector(self.N, self.ring, {k: c * v for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, SmashVector) and self.terms == other.terms

    def __repr__(self):
        return " + ".join(f"{self.ring.to_str(c)}*(m{m},g{g})" for (m, g), c in sorted(self.terms.items()))


class SmashModel(ModelBase):
    """Cyclic model on A^W smash G, for G in SL_N fixing W.

    Products twist later arguments by the accumulated group element; the
    trace only sees the top exterior class paired with the identity.
    """

    def __init__(self, base: AInftyModel, group):
        if base.potential is None:
            raise ValueError("smash products need a potential-backed model")
        self.base = base
        self.N = base.N
        self.ring = base.ring
        self.group = list(group)
        W = base.potential
        for g in self.group:
            if not g.is_special():
                raise ValueError("group elements must have determinant one")
            if W.substitute_linear(g.matrix) != W:
                raise ValueError("symmetry error: group element does not fix W")
        self.mul_table = {}
        self.identity_index = None
        for i, g in enumerate(self.group):
            for j, h in enumerate(self.group):
                prod = g.compose(h)
                idx = self._find(prod)
                if idx is None:
                    raise ValueError("group is not closed under composition")
                self.mul_table[(i, j)] = idx
        for i, g in enumerate(self.group):
            if all(self.mul_table[(i, j)] == j for j in range(len(self.group))):
                self.identity_index = i
                break
        if self.identity_index is None:
            raise ValueError("group has no identity element")

    def _find(self, g: LinearSymmetry):
        for i, h in enumerate(self.group):
            if h.matrix == g.matrix:
                return i
        return None

    def basis_tokens(self):
        for gi in range(len(self.group)):
            for mask in range(1 << self.N):
                yield (mask, gi)

    def token_vector(self, token):
        return SmashVector(self.N, self.ring, {token: self.ring.one()})

    def token_shifted_parity(self, token):
        return (popcount(token[0]) + 1) & 1

    def zero_vector(self):
        return SmashVector(self.N, self.ring)

    def wedge(self, a: SmashVector, b: SmashVector) -> SmashVector:
        out = self.zero_vector()
        for (m1, g1), c1 in a.terms.items():
            for (m2, g2), c2 in b.terms.items():
                moved = self.group[g1].act(Multivector(self.N, {m2: self.ring.one()}, self.ring))
                prod = wedge(Multivector(self.N, {m1: c1 * c2}, self.ring), moved)
                gi = self.mul_table[(g1, g2)]
                out = out + SmashVector(self.N, self.ring, {(m, gi): c for m, c in prod.terms.items()})
        return out

    def trace(self, a: SmashVector):
        top = (1 << self.N) - 1
        return a.terms.get((top, self.identity_index), self.ring.zero())

    def split_terms(self, a: SmashVector):
        for key, c in a.terms.items():
            yield popcount(key[0]) & 1, SmashVector(self.N, self.ring, {key: c})

    def mu(self, n, inputs) -> SmashVector:
        if n == 0:
            return self.zero_vector()
        out = self.zero_vector()
        expansions = [list(a.terms.items()) for a in inputs]
        for combo in itertools.product(*expansions):
            coeff = self.ring.one()
            for _, c in combo:
                coeff = coeff * c
            args = []
            acc = self.identity_index
            for idx, ((mask, gi), _) in enumerate(combo):
                vec = Multivector(self.N, {mask: self.ring.one()}, self.ring)
                if idx > 0:
                    vec = self.group[acc].act(vec)
                args.append(vec)
                acc = self.mul_table[(acc, gi)]
            base_val = self.base.mu(n, args)
            if base_val.is_zero():
                continue
            out = out + SmashVector(
                self.N, self.ring, {(m, acc): coeff * c for m, c in base_val.terms.items()}
            )
        return out


def smash_product(model: AInftyModel, group) -> SmashModel:
    return SmashModel(model, group)
