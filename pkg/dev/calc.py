"""Mode-parametrized cyclic calculus for convention pinning."""
import itertools
from fractions import Fraction
from mfhodge.hochschild import Chain
from mfhodge.exterior import Multivector, popcount
from mfhodge.scalars import QQ

SP = lambda m: (popcount(m) + 1) & 1

def P0(mask, mode):
    return popcount(mask) & 1 if mode == "honest" else SP(mask)

def word_parities(a0, bars, mode):
    return [P0(a0, mode)] + [SP(b) for b in bars]

def b_gen(model, chain, mode):
    ring, N = chain.ring, chain.N
    mu = model.structure_cochain()
    out = {}
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = word_parities(a0, bars, mode)
        total = 0
        for p in pars: total ^= p
        for l in mu.arities():
            if l == 0: continue
            if l <= s:
                for i in range(0, s - l + 1):
                    val = mu.eval_basis(l, bars[i:i+l])
                    if val.is_zero(): continue
                    pref = pars[0]
                    for t in range(1, i + 1): pref ^= pars[t]
                    sign = pref & 1
                    head, tail = bars[:i], bars[i+l:]
                    for mask, c in val.terms.items():
                        if mask == 0: continue
                        key = (a0, head + (mask,) + tail)
                        v = coeff * c
                        if sign: v = -v
                        out[key] = out.get(key, ring.zero()) + v
                        if ring.is_zero(out[key]): del out[key]
            if l - 1 <= s:
                for p in range(0, l):
                    q = l - 1 - p
                    if p + q > s: continue
                    block = bars[s-p:] + (a0,) + bars[:q]
                    val = mu.eval_basis(l, block)
                    if val.is_zero(): continue
                    e_tail = 0
                    for t in range(s - p + 1, s + 1): e_tail ^= pars[t]
                    e_rest = total ^ e_tail
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
        pars = word_parities(a0, bars, mode)
        total = 0
        for p in pars: total ^= p
        word = (a0,) + bars
        for j in range(0, s + 1):
            e_tail = 0
            for t in range(j, s + 1): e_tail ^= pars[t]
            sign = (e_tail * (total ^ e_tail)) & 1
            key = (0, word[j:] + word[:j])
            v = coeff if not sign else -coeff
            out[key] = out.get(key, ring.zero()) + v
            if ring.is_zero(out[key]): del out[key]
    return Chain(N, ring, out)

def lie_parts(phi, chain, mode):
    """(interior, wrap) pieces of the Lie derivative."""
    ring, N = chain.ring, chain.N
    p_phi = phi.parity
    out_i, out_w = {}, {}
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = word_parities(a0, bars, mode)
        total = 0
        for p in pars: total ^= p
        for l in phi.arities():
            if l == 0: continue
            if l <= s:
                for i in range(0, s - l + 1):
                    val = phi.eval_basis(l, bars[i:i+l])
                    if val.is_zero(): continue
                    pref = pars[0]
                    for t in range(1, i + 1): pref ^= pars[t]
                    sign = (p_phi * pref) & 1
                    head, tail = bars[:i], bars[i+l:]
                    for mask, c in val.terms.items():
                        if mask == 0: continue
                        key = (a0, head + (mask,) + tail)
                        v = coeff * c
                        if sign: v = -v
                        out_i[key] = out_i.get(key, ring.zero()) + v
                        if ring.is_zero(out_i[key]): del out_i[key]
            if l - 1 <= s:
                for p in range(0, l):
                    q = l - 1 - p
                    if p + q > s: continue
                    block = bars[s-p:] + (a0,) + bars[:q]
                    val = phi.eval_basis(l, block)
                    if val.is_zero(): continue
                    e_tail = 0
                    for t in range(s - p + 1, s + 1): e_tail ^= pars[t]
                    sign = (e_tail * (total ^ e_tail)) & 1
                    mid = bars[q:s-p]
                    for mask, c in val.terms.items():
                        key = (mask, mid)
                        v = coeff * c
                        if sign: v = -v
                        out_w[key] = out_w.get(key, ring.zero()) + v
                        if ring.is_zero(out_w[key]): del out_w[key]
    return Chain(N, ring, out_i), Chain(N, ring, out_w)

def b11_configs(model, phi, chain, mode):
    ring, N = chain.ring, chain.N
    mu = model.structure_cochain()
    p_phi = phi.parity
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = word_parities(a0, bars, mode)
        total = 0
        for p in pars: total ^= p
        for p in range(0, s + 1):
            e_tail = 0
            for t in range(s - p + 1, s + 1): e_tail ^= pars[t]
            rot_sign = (e_tail * (total ^ e_tail)) & 1
            for q in range(0, s - p + 1):
                block = bars[s-p:] + (a0,) + bars[:q]
                bpars = [pars[t] for t in range(s - p + 1, s + 1)] + [pars[0]] + [pars[t] for t in range(1, q + 1)]
                mid = bars[q:s-p]
                blen = p + 1 + q
                w0pos = p
                for f in phi.arities():
                    for start in range(0, blen - f + 1):
                        covers = f > 0 and start <= w0pos < start + f
                        inner = phi.eval_basis(f, block[start:start+f])
                        if inner.is_zero(): continue
                        e_before = 0
                        for t in range(start): e_before ^= bpars[t]
                        sign = rot_sign ^ (p_phi & e_before)
                        args = [Multivector(N, {block[i]: ring.one()}, ring) for i in range(start)]
                        args.append(inner)
                        args += [Multivector(N, {block[i]: ring.one()}, ring) for i in range(start + f, blen)]
                        val = mu.eval(blen - f + 1, args)
                        if val.is_zero(): continue
                        tags = set()
                        tags.add("cov" if covers else "pln")
                        if start == 0: tags.add("bs")
                        if start + f == blen: tags.add("be")
                        if not covers and start + f <= w0pos: tags.add("tside")
                        if not covers and start > w0pos: tags.add("hside")
                        res = {}
                        for mask, cc in val.terms.items():
                            v = coeff * cc
                            if sign: v = -v
                            res[(mask, mid)] = res.get((mask, mid), Fraction(0)) + v
                        yield frozenset(tags), res

def B11_configs(phi, chain, mode):
    ring, N = chain.ring, chain.N
    p_phi = phi.parity
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = word_parities(a0, bars, mode)
        total = 0
        for p in pars: total ^= p
        word = (a0,) + bars
        for j in range(0, s + 1):
            e_tail = 0
            for t in range(j, s + 1): e_tail ^= pars[t]
            rot_sign = (e_tail * (total ^ e_tail)) & 1
            rotated = word[j:] + word[:j]
            rpars = pars[j:] + pars[:j]
            orig = list(range(j, s + 1)) + list(range(0, j))
            w0pos = orig.index(0)
            for f in phi.arities():
                for start in range(0, s + 2 - f):
                    covers = f > 0 and start <= w0pos < start + f
                    inner = phi.eval_basis(f, rotated[start:start+f])
                    if inner.is_zero(): continue
                    e_before = 0
                    for t in range(start): e_before ^= rpars[t]
                    sign = rot_sign ^ (p_phi & e_before)
                    tags = set()
                    tags.add("cov" if covers else "pln")
                    if start + f == s + 1: tags.add("we")
                    if start == 0: tags.add("ws")
                    if not covers and (start + f == w0pos): tags.add("adjL")
                    if not covers and (start == w0pos + 1): tags.add("adjR")
                    res = {}
                    for mask, cc in inner.terms.items():
                        nw = rotated[:start] + (mask,) + rotated[start+f:]
                        if any(m == 0 for m in nw): continue
                        v = coeff * cc
                        if sign: v = -v
                        res[(0, nw)] = res.get((0, nw), Fraction(0)) + v
                    if res:
                        yield frozenset(tags), res
