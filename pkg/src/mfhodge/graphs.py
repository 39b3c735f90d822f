"""Admissible graphs, their rational weights, and the induced operators.

A type-(k, n) graph is an ordered list of k stars, each a subset of the n
boundary labels; every edge runs from an interior vertex to a boundary
vertex.  A graph contributes only when its edge count matches the moduli
dimension 2k + n - 2 and every boundary vertex receives an edge; otherwise
its weight is zero.  Weights follow the shuffle decomposition
    w = (1 / #shuffles) * prod_i 1/|Star(i)|!
where a shuffle is a permutation restricting order-preservingly to each star.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .exterior import Multivector, derivation_mask, popcount, wedge_masks
from .potential import Potential, symmetrize_component

SHUFFLE_ARITY_CAP = 10


@dataclass(frozen=True)
class AdmissibleGraph:
    k: int
    n: int
    stars: tuple

    def __post_init__(self):
        stars = tuple(tuple(sorted(set(s))) for s in self.stars)
        object.__setattr__(self, "stars", stars)
        if len(stars) != self.k:
            raise ValueError("star count must equal k")
        for s in stars:
            for v in s:
                if not 1 <= v <= self.n:
                    raise ValueError(f"star endpoint {v} outside 1..{self.n}")

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.stars)

    def covers_boundary(self) -> bool:
        covered = set()
        for s in self.stars:
            covered.update(s)
        return covered == set(range(1, self.n + 1))

    def is_contributing(self) -> bool:
        return self.edge_count == 2 * self.k + self.n - 2 and self.covers_boundary()

    def to_json(self):
        return {"k": self.k, "n": self.n, "stars": [list(s) for s in self.stars]}

    @classmethod
    def from_json(cls, data):
        return cls(data["k"], data["n"], tuple(tuple(s) for s in data["stars"]))


def enumerate_star_lists(n: int, allowed_sizes, target_edges: int, required_cover=None):
    """Ordered star lists with prescribed per-vertex size menus and total edges.

    ``allowed_sizes`` is one iterable of sizes per interior vertex; stars are
    subsets of {1..n}; only lists covering ``required_cover`` (default all of
    {1..n}) are produced, in deterministic lexicographic order.
    """
    if required_cover is None:
        required_cover = frozenset(range(1, n + 1))
    else:
        required_cover = frozenset(required_cover)
    menus = [sorted(set(sz for sz in sizes if 0 <= sz <= n)) for sizes in allowed_sizes]
    k = len(menus)

    def size_splits(idx, remaining):
        if idx == k:
            if remaining == 0:
                yield ()
            return
        tail_min = sum(menu[0] for menu in menus[idx + 1 :] if menu)
        tail_max = sum(menu[-1] for menu in menus[idx + 1 :] if menu)
        for sz in menus[idx]:
            rest = remaining - sz
            if tail_min <= rest <= tail_max:
                for tail in size_splits(idx + 1, rest):
                    yield (sz,) + tail

    labels = list(range(1, n + 1))
    for sizes in size_splits(0, target_edges):
        pools = [list(itertools.combinations(labels, sz)) for sz in sizes]
        for stars in itertools.product(*pools):
            covered = set()
            for s in stars:
                covered.update(s)
            if required_cover <= covered:
                yield stars


def enumerate_graphs(k: int, n: int, d_max: int):
    """All contributing type-(k, n) graphs with 2 <= |Star(i)| <= min(n, d_max)."""
    if k < 1 or n < 1 or d_max < 2:
        raise ValueError("need k >= 1, n >= 1, d_max >= 2")
    target = 2 * k + n - 2
    sizes = [range(2, min(n, d_max) + 1)] * k
    return [AdmissibleGraph(k, n, stars) for stars in enumerate_star_lists(n, sizes, target)]


def shuffle_count_bruteforce(g: AdmissibleGraph) -> int:
    count = 0
    for perm in itertools.permutations(range(1, g.n + 1)):
        ok = True
        for star in g.stars:
            vals = [perm[v - 1] for v in star]
            if any(vals[i] >= vals[i + 1] for i in range(len(vals) - 1)):
                ok = False
                break
        if ok:
            count += 1
    return count


def shuffle_count_fast(g: AdmissibleGraph) -> int:
    """Linear-extension count of the union-of-chains poset, by subset DP."""
    n = g.n
    preds = [0] * (n + 1)
    for star in g.stars:
        for idx in range(1, len(star)):
            for e in star[:idx]:
                preds[star[idx]] |= 1 << (e - 1)
    dp = {0: 1}
    for _ in range(n):
        nxt = {}
        for filled, cnt in dp.items():
            for p in range(1, n + 1):
                bit = 1 << (p - 1)
                if filled & bit or preds[p] & ~filled:
                    continue
                key = filled | bit
                nxt[key] = nxt.get(key, 0) + cnt
        dp = nxt
    return dp.get((1 << n) - 1, 0)


def shuffle_count(g: AdmissibleGraph) -> int:
    if g.n > SHUFFLE_ARITY_CAP:
        raise ValueError("arity too large for shuffle counting")
    if g.n <= 6:
        return shuffle_count_bruteforce(g)
    return shuffle_count_fast(g)


def weight(g: AdmissibleGraph) -> Fraction:
    """Exact rational weight; zero for non-contributing graphs."""
    if not g.is_contributing():
        return Fraction(0)
    w = Fraction(1, shuffle_count(g))
    for star in g.stars:
        w /= math.factorial(len(star))
    return w


def temporal_sequence(stars, words):
    """Edge applications in composition order: last vertex first, slots descending.

    Within one vertex the descending-slot order with running Koszul signs
    reproduces the simultaneous tensor-operator convention.
    """
    seq = []
    for v in range(len(stars) - 1, -1, -1):
        star, word = stars[v], words[v]
        for pos in range(len(star) - 1, -1, -1):
            seq.append((star[pos], word[pos]))
    return seq


def apply_sequence(seq, masks):
    """Apply (slot, generator) derivations in order; (sign, masks) or None."""
    masks = list(masks)
    sign = 1
    for slot, gen in seq:
        par = 0
        for s in range(slot - 1):
            par ^= popcount(masks[s])
        if par & 1:
            sign = -sign
        m2, s2 = derivation_mask(gen, masks[slot - 1])
        if s2 == 0:
            return None
        sign *= s2
        masks[slot - 1] = m2
    return sign, masks


def m_sign_mask(masks):
    """Product-operator sign and merged mask on basis inputs, or None."""
    n = len(masks)
    exp = (n * (n - 1) // 2) & 1
    for i in range(n - 1):
        if popcount(masks[i]) & 1 and (n - 1 - i) & 1:
            exp ^= 1
    mask, sgn = 0, 1
    for m in masks:
        mask, s = wedge_masks(mask, m)
        if s == 0:
            return None
        sgn *= s
    if exp:
        sgn = -sgn
    return sgn, mask


def word_menu(W: Potential, sizes):
    """Per-vertex symmetrized-word tables for the requested star sizes."""
    return [symmetrize_component(W, sz) for sz in sizes]


def graph_action(g: AdmissibleGraph, W: Potential, inputs) -> Multivector:
    """U_Gamma: thread the symmetrized tensors of W through the stars, then multiply.

    Multilinear in the inputs; the weight is not applied here.
    """
    if len(inputs) != g.n:
        raise ValueError(f"graph expects {g.n} inputs, got {len(inputs)}")
    ring = W.ring
    N = W.N
    menus = word_menu(W, [len(s) for s in g.stars])
    out = Multivector(N, {}, ring)
    if any(not menu for menu in menus):
        return out
    # expand inputs over their basis terms
    expansions = [list(a.terms.items()) for a in inputs]
    for combo in itertools.product(*expansions):
        masks = [m for m, _ in combo]
        coeff = ring.one()
        for _, c in combo:
            coeff = coeff * c
        for words in itertools.product(*[list(menu.items()) for menu in menus]):
            wcoeff = coeff
            for _, c in words:
                wcoeff = wcoeff * c
            seq = temporal_sequence(g.stars, [w for w, _ in words])
            applied = apply_sequence(seq, masks)
            if applied is None:
                continue
            sign, final = applied
            ms = m_sign_mask(final)
            if ms is None:
                continue
            sign *= ms[0]
            term = wcoeff if sign > 0 else -wcoeff
            out = out + Multivector(N, {ms[1]: term}, ring)
    return out
