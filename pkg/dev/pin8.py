"""Mode-resolved (R/O/P) family search for the contraction operators."""
import itertools, random
from fractions import Fraction
import sys
sys.path.insert(0, "dev")
from mfhodge.potential import parse_potential
from mfhodge.ainfty import AInftyModel, HochschildCochain, exterior_degree_cochain, unit_cochain, gerstenhaber_bracket
from mfhodge.hochschild import Chain
from mfhodge.exterior import Multivector, popcount
from mfhodge.scalars import QQ
from mfhodge.linalg import nullspace

SP = lambda m: (popcount(m) + 1) & 1
random.seed(5)
N = 2

from calc import b_gen, B_gen   # shifted-mode generators
MODE = "shifted"
bfun = lambda model, c: b_gen(model, c, MODE)
Bfun = lambda c: B_gen(c, MODE)

def b11_cfg(model, phi, chain):
    ring = chain.ring
    mu = model.structure_cochain()
    p_phi = phi.parity
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = [SP(a0)] + [SP(b) for b in bars]
        total = 0
        for p in pars: total ^= p
        for p in range(0, s + 1):
            e_tail = 0
            for t in range(s - p + 1, s + 1): e_tail ^= pars[t]
            e_rest = total ^ e_tail
            rot = (e_tail * e_rest) & 1
            for q in range(0, s - p + 1):
                block = bars[s-p:] + (a0,) + bars[:q]
                bpars = [pars[t] for t in range(s-p+1, s+1)] + [pars[0]] + [pars[t] for t in range(1, q+1)]
                origpos = list(range(s-p+1, s+1)) + [0] + list(range(1, q+1))
                mid = bars[q:s-p]
                blen = p + 1 + q
                w0pos = p
                for f in phi.arities():
                    for start in range(0, blen - f + 1):
                        covers = f > 0 and start <= w0pos < start + f
                        in_tail = f > 0 and start + f <= w0pos
                        inner = phi.eval_basis(f, block[start:start+f])
                        if inner.is_zero(): continue
                        e_before_R = 0
                        for t in range(start): e_before_R ^= bpars[t]
                        # original-linear passage: parities of original positions < first run pos
                        if f > 0:
                            fo = origpos[start]
                            e_before_O = 0
                            for t in range(0, fo): e_before_O ^= pars[t]
                        else:
                            e_before_O = e_before_R
                        sign_R = rot ^ (p_phi & e_before_R)
                        altO = (p_phi & (e_before_R ^ e_before_O)) & 1
                        altP = altO ^ (p_phi & (e_rest if in_tail else e_tail))
                        args = [Multivector(N, {block[i]: ring.one()}, ring) for i in range(start)]
                        args.append(inner)
                        args += [Multivector(N, {block[i]: ring.one()}, ring) for i in range(start+f, blen)]
                        val = mu.eval(blen - f + 1, args)
                        if val.is_zero(): continue
                        tags = set()
                        tags.add("cov" if covers else ("ts" if in_tail else "hs"))
                        if f == 0:
                            tags.discard("hs"); tags.add("u0")
                        res = {}
                        for mask, cc in val.terms.items():
                            v = coeff * cc
                            if sign_R: v = -v
                            res[(mask, mid)] = res.get((mask, mid), Fraction(0)) + v
                        yield tags, altO, altP, res

def B11_cfg(phi, chain):
    ring = chain.ring
    p_phi = phi.parity
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = [SP(a0)] + [SP(b) for b in bars]
        total = 0
        for p in pars: total ^= p
        word = (a0,) + bars
        for j in range(0, s + 1):
            e_tail = 0
            for t in range(j, s + 1): e_tail ^= pars[t]
            e_head = total ^ e_tail
            rot = (e_tail * e_head) & 1
            rotated = word[j:] + word[:j]
            rpars = pars[j:] + pars[:j]
            orig = list(range(j, s + 1)) + list(range(0, j))
            w0pos = orig.index(0)
            ntail = s + 1 - j
            for f in phi.arities():
                for start in range(0, s + 2 - f):
                    covers = f > 0 and start <= w0pos < start + f
                    crosses = f > 0 and start < ntail < start + f
                    in_tail = f > 0 and start + f <= ntail
                    inner = phi.eval_basis(f, rotated[start:start+f])
                    if inner.is_zero(): continue
                    e_before_R = 0
                    for t in range(start): e_before_R ^= rpars[t]
                    if f > 0 and not crosses:
                        fo = orig[start]
                        e_before_O = 0
                        for t in range(0, fo): e_before_O ^= pars[t]
                    else:
                        e_before_O = e_before_R
                    sign_R = rot ^ (p_phi & e_before_R)
                    altO = (p_phi & (e_before_R ^ e_before_O)) & 1
                    if crosses:
                        altP = altO
                    else:
                        altP = altO ^ (p_phi & (e_head if in_tail else e_tail))
                    tags = set()
                    tags.add("cov" if covers else "pln")
                    if start + f == s + 1: tags.add("we")
                    if start == 0: tags.add("ws")
                    if f == 0: tags.add("u0")
                    res = {}
                    for mask, cc in inner.terms.items():
                        nw = rotated[:start] + (mask,) + rotated[start+f:]
                        if any(m == 0 for m in nw): continue
                        v = coeff * cc
                        if sign_R: v = -v
                        res[(0, nw)] = res.get((0, nw), Fraction(0)) + v
                    if res:
                        yield tags, altO, altP, res

def lie_cfg(phi, chain):
    """interior + wrap configs with modes."""
    ring = chain.ring
    p_phi = phi.parity
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        pars = [SP(a0)] + [SP(b) for b in bars]
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
                    res = {}
                    for mask, cc in val.terms.items():
                        if mask == 0: continue
                        v = coeff * cc
                        if sign: v = -v
                        res[(a0, head + (mask,) + tail)] = res.get((a0, head + (mask,) + tail), Fraction(0)) + v
                    if res: yield {"int"}, 0, 0, res
            if l - 1 <= s:
                for p in range(0, l):
                    q = l - 1 - p
                    if p + q > s: continue
                    block = bars[s-p:] + (a0,) + bars[:q]
                    val = phi.eval_basis(l, block)
                    if val.is_zero(): continue
                    e_tail = 0
                    for t in range(s - p + 1, s + 1): e_tail ^= pars[t]
                    e_rest = total ^ e_tail
                    rot = (e_tail * e_rest) & 1
                    # O-mode: phi passage from front in original order = parities before tail start... 
                    e_before_O = 0
                    for t in range(0, s - p + 1): e_before_O ^= 0  # phi block starts at tail or w0
                    altO = (p_phi & e_tail) & 1  # passage to reach w0-position crossing nothing vs tail
                    altP = (p_phi & e_rest) & 1  # post-rotation difference
                    mid = bars[q:s-p]
                    res = {}
                    for mask, cc in val.terms.items():
                        v = coeff * cc
                        if rot: v = -v
                        res[(mask, mid)] = res.get((mask, mid), Fraction(0)) + v
                    if res: yield {"wrap"}, altO, altP, res

F_TAGS = ["cov", "ts", "hs", "u0"]
G_TAGS = ["cov", "pln", "we", "ws", "u0"]

def collect(gen, tagnames, modes=("R", "O", "P")):
    out = {}
    for tags, altO, altP, res in gen:
        for tag in tagnames:
            if tag in tags:
                for mode in modes:
                    alt = 0 if mode == "R" else (altO if mode == "O" else altP)
                    key = tag + mode
                    tgt = out.setdefault(key, {})
                    for k, x in res.items():
                        tgt[k] = tgt.get(k, Fraction(0)) + (-x if alt else x)
    return {k: Chain(N, QQ, v) for k, v in out.items()}

def rand_cochain(parity, arity_max=3, density=0.35):
    tables = {}
    for n in range(0, arity_max + 1):
        tab = {}
        for masks in itertools.product(range(1, 1 << N), repeat=n):
            terms = {}
            for out_mask in range(1 << N):
                want = (parity + sum(SP(m) for m in masks)) & 1
                if SP(out_mask) != want: continue
                if random.random() < density:
                    terms[out_mask] = Fraction(random.randint(-3, 3))
            if terms: tab[masks] = Multivector(N, terms, QQ)
        if tab: tables[n] = tab
    return HochschildCochain.from_tables(N, QQ, tables, parity)

M3 = AInftyModel.from_potential(parse_potential("x1^3 + x2^3"), arity_max=9)
M2 = AInftyModel.from_potential(parse_potential("x1^2 + x2^2"), arity_max=9)

phis = [("T", exterior_degree_cochain(N, QQ)), ("e", unit_cochain(N, QQ)),
        ("re0", rand_cochain(0, 2)), ("ro0", rand_cochain(1, 2)),
        ("re1", rand_cochain(0, 3, 0.25)), ("ro1", rand_cochain(1, 3, 0.25))]

keys = []
for a0 in range(1 << N):
    keys.append((a0, ()))
    for b1 in range(1, 1 << N):
        keys.append((a0, (b1,)))
        for b2 in range(1, 1 << N):
            keys.append((a0, (b1, b2)))
random.shuffle(keys)
keys = keys[:14] + [(1, (2, 1, 3)), (3, (1, 2, 2))]

rows = {}
eqcount = 0
for model in (M3, M2):
    mu_cochain = model.structure_cochain(9)
    for pname, phi in phis:
        br = gerstenhaber_bracket(mu_cochain, phi, 8)
        sgn_phi = (-1) ** ((phi.parity + 1) & 1)
        sfx = 'e' if phi.parity == 0 else 'o'
        for key in keys:
            c = Chain.basis(N, QQ, key[0], key[1])
            F = collect(b11_cfg(model, phi, c), F_TAGS)
            G = collect(B11_cfg(phi, c), G_TAGS)
            Dc_b = bfun(model, c); Dc_B = Bfun(c)
            FD = collect(b11_cfg(model, phi, Dc_b), F_TAGS)
            GD = collect(B11_cfg(phi, Dc_b), G_TAGS)
            FDB = collect(b11_cfg(model, phi, Dc_B), F_TAGS)
            GDB = collect(B11_cfg(phi, Dc_B), G_TAGS)
            Fbr = collect(b11_cfg(model, br, c), F_TAGS)
            Gbr = collect(B11_cfg(br, c), G_TAGS)
            Lc = collect(lie_cfg(phi, c), ["int", "wrap"])
            comp = {0: {}, 1: {}, 2: {}}
            for tag, val in Lc.items():
                comp[1]["L_" + tag + sfx] = val.scale(-1)
            for tag, val in F.items():
                comp[0]["F_" + tag + sfx] = comp[0].get("F_" + tag + sfx, Chain(N, QQ)) + bfun(model, val)
                comp[1]["F_" + tag + sfx] = comp[1].get("F_" + tag + sfx, Chain(N, QQ)) + Bfun(val)
            for tag, val in G.items():
                comp[1]["G_" + tag + sfx] = comp[1].get("G_" + tag + sfx, Chain(N, QQ)) + bfun(model, val)
                comp[2]["G_" + tag + sfx] = comp[2].get("G_" + tag + sfx, Chain(N, QQ)) + Bfun(val)
            for tag, val in FD.items():
                comp[0]["F_" + tag + sfx] = comp[0].get("F_" + tag + sfx, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in GD.items():
                comp[1]["G_" + tag + sfx] = comp[1].get("G_" + tag + sfx, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in FDB.items():
                comp[1]["F_" + tag + sfx] = comp[1].get("F_" + tag + sfx, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in GDB.items():
                comp[2]["G_" + tag + sfx] = comp[2].get("G_" + tag + sfx, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in Fbr.items():
                comp[0]["F_" + tag + sfx] = comp[0].get("F_" + tag + sfx, Chain(N, QQ)) + val
            for tag, val in Gbr.items():
                comp[1]["G_" + tag + sfx] = comp[1].get("G_" + tag + sfx, Chain(N, QQ)) + val
            for upow in (0, 1, 2):
                chainkeys = set()
                for tag, val in comp[upow].items(): chainkeys.update(val.terms)
                for ck in chainkeys:
                    eq = {}
                    for tag, val in comp[upow].items():
                        v = val.terms.get(ck)
                        if v: eq[tag] = eq.get(tag, Fraction(0)) + v
                    if not eq: continue
                    rows[("eq", eqcount)] = eq; eqcount += 1

allu = sorted({u for eq in rows.values() for u in eq})
cols = {u: {} for u in allu}
for eqid, eq in rows.items():
    for u, v in eq.items():
        if v: cols[u][eqid] = v
kernel, _ = nullspace([(u, cols[u]) for u in allu])
print("unknowns:", len(allu), "equations:", len(rows), "kernel dim:", len(kernel))
for vec in kernel:
    has_L = any(k.startswith("L") and vec[k] != 0 for k in vec)
    print(("L! " if has_L else "    "), {k: str(v) for k, v in sorted(vec.items()) if v != 0})
