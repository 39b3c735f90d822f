"""Sigma0-parametrized calculus: slot-0 parity honest vs shifted."""
import itertools, random
from fractions import Fraction
from mfhodge.potential import parse_potential
from mfhodge.ainfty import AInftyModel, HochschildCochain, exterior_degree_cochain, unit_cochain, gerstenhaber_bracket
from mfhodge.hochschild import Chain
from mfhodge.exterior import Multivector, popcount
from mfhodge.scalars import QQ
from mfhodge.linalg import nullspace

SP = lambda m: (popcount(m) + 1) & 1   # shifted parity (bars)

def P0(mask, mode):
    return popcount(mask) & 1 if mode == "honest" else SP(mask)

def b_gen(model, chain, mode):
    """Differential with slot-0 parity mode."""
    ring, N = chain.ring, chain.N
    mu = model.structure_cochain()
    out = {}
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        p0 = P0(a0, mode)
        # interior blocks
        for l in mu.arities():
            if l == 0 or l > s: continue
            for i in range(0, s - l + 1):
                val = mu.eval_basis(l, bars[i:i+l])
                if val.is_zero(): continue
                pref = p0
                for b in bars[:i]: pref ^= SP(b)
                sign = pref & 1
                head, tail = bars[:i], bars[i+l:]
                for mask, c in val.terms.items():
                    if mask == 0: continue
                    key = (a0, head + (mask,) + tail)
                    v = coeff * c
                    if sign: v = -v
                    out[key] = out.get(key, ring.zero()) + v
                    if ring.is_zero(out[key]): del out[key]
        # wrap blocks
        total_bars = 0
        for b in bars: total_bars ^= SP(b)
        for l in mu.arities():
            if l == 0 or l - 1 > s: continue
            for p in range(0, l):
                q = l - 1 - p
                if p + q > s: continue
                block = bars[s-p:] + (a0,) + bars[:q]
                val = mu.eval_basis(l, block)
                if val.is_zero(): continue
                e_tail = 0
                for b in bars[s-p:]: e_tail ^= SP(b)
                e_rest = p0 ^ total_bars ^ e_tail
                sign = (e_tail * e_rest) & 1
                mid = bars[q:s-p]
                for mask, c in val.terms.items():
                    key = (mask, mid)
                    v = coeff * c
                    if sign: v = -v
                    out[key] = out.get(key, ring.zero()) + v
                    if ring.is_zero(out[key]): del out[key]
    return Chain(N, ring, out)

def B_gen(chain, mode):
    ring, N = chain.ring, chain.N
    out = {}
    for (a0, bars), coeff in chain.terms.items():
        if a0 == 0: continue
        s = len(bars)
        p0 = P0(a0, mode)
        total_bars = 0
        for b in bars: total_bars ^= SP(b)
        word = (a0,) + bars
        for j in range(0, s + 1):
            e_tail = 0
            for m in word[j:]:
                e_tail ^= (p0 if m is word[0] and j == 0 else 0)
            # recompute: tail = word[j:]; its parity: includes a0 only when j == 0
            e_tail = 0
            for idx in range(j, s + 1):
                e_tail ^= (p0 if idx == 0 else SP(word[idx]))
            e_head = (p0 ^ total_bars) ^ e_tail
            sign = (e_tail * e_head) & 1
            new_bars = word[j:] + word[:j]
            key = (0, new_bars)
            v = coeff if not sign else -coeff
            out[key] = out.get(key, ring.zero()) + v
            if ring.is_zero(out[key]): del out[key]
    return Chain(N, ring, out)

random.seed(2)
N = 1
M = AInftyModel.from_potential(parse_potential("x1^3"), arity_max=9)

def all_keys(N, L):
    pool = list(range(1, 1 << N))
    for a0 in range(1 << N):
        for s in range(L + 1):
            for bars in itertools.product(pool, repeat=s):
                yield (a0, bars)

for mode in ("shifted", "honest"):
    bad_b = bad_B = bad_mix = 0
    for key in all_keys(1, 4):
        c = Chain.basis(1, QQ, key[0], key[1])
        if not b_gen(M, b_gen(M, c, mode), mode).is_zero(): bad_b += 1
        if not B_gen(B_gen(c, mode), mode).is_zero(): bad_B += 1
        if not (b_gen(M, B_gen(c, mode), mode) + B_gen(b_gen(M, c, mode), mode)).is_zero(): bad_mix += 1
    print(mode, "b^2:", bad_b, "B^2:", bad_B, "bB+Bb:", bad_mix)
