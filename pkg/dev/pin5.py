"""Position-resolved family search for the contraction operators."""
import itertools, random
from fractions import Fraction
import sys
sys.path.insert(0, "dev")
from pin3 import lie_interior, lie_wrap
from mfhodge.potential import parse_potential
from mfhodge.ainfty import AInftyModel, HochschildCochain, exterior_degree_cochain, unit_cochain, gerstenhaber_bracket
from mfhodge.hochschild import Chain, hochschild_b, connes_B, shifted_parity
from mfhodge.exterior import Multivector
from mfhodge.scalars import QQ
from mfhodge.linalg import nullspace

random.seed(5)
N = 2

def rand_cochain(parity, arity_max=2, density=0.4):
    tables = {}
    for n in range(0, arity_max + 1):
        tab = {}
        for masks in itertools.product(range(1, 1 << N), repeat=n):
            terms = {}
            for out_mask in range(1 << N):
                want = (parity + sum(shifted_parity(m) for m in masks)) & 1
                if shifted_parity(out_mask) != want: continue
                if random.random() < density:
                    terms[out_mask] = Fraction(random.randint(-3, 3))
            if terms:
                tab[masks] = Multivector(N, terms, QQ)
        if tab:
            tables[n] = tab
    return HochschildCochain.from_tables(N, QQ, tables, parity)

def b11_configs(model, phi, chain):
    """Yield (tags, Chain) per configuration for b11-type shapes."""
    ring = chain.ring
    mu = model.structure_cochain()
    p_phi = phi.parity
    out = {}
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        spars = [shifted_parity(a0)] + [shifted_parity(b) for b in bars]
        total = 0
        for p in spars: total ^= p
        for p in range(0, s + 1):
            e_tail = 0
            for m in bars[s - p:]: e_tail ^= shifted_parity(m)
            rot_sign = (e_tail * (total ^ e_tail)) & 1
            for q in range(0, s - p + 1):
                block = bars[s - p:] + (a0,) + bars[:q]
                mid = bars[q:s - p]
                blen = p + 1 + q
                w0pos = p
                for f in phi.arities():
                    for start in range(0, blen - f + 1):
                        covers = f > 0 and start <= w0pos < start + f
                        inner = phi.eval_basis(f, block[start:start + f])
                        if inner.is_zero(): continue
                        e_before_R = 0
                        for m in block[:start]: e_before_R ^= shifted_parity(m)
                        # original-order passage: elements originally before the run
                        if f == 0 or start >= p:  # run in head (orig idx >= w0)
                            e_before_O = 0
                            for m in block[:start]:
                                e_before_O ^= shifted_parity(m)
                            e_before_O ^= e_tail if start >= p else 0
                            e_before_O ^= 0
                        # simpler: compute via original indices
                        if f > 0:
                            if start < p:  # run within tail: orig indices s-p+start..   
                                first_orig = s - p + start + 1  # 1-based bar index
                                e_before_O = spars[0]
                                for t in range(1, first_orig): e_before_O ^= spars[t]
                            else:  # run within head (after w0): block idx start>=p+1 -> bar index start-p
                                first_orig = start - p  # number of bars before run among head
                                e_before_O = spars[0]
                                for t in range(1, first_orig + 1): e_before_O ^= spars[t]
                                e_before_O ^= spars[first_orig] if False else 0
                        else:
                            e_before_O = e_before_R  # arity-0: no passage anyway... keep R
                        base_sign = rot_sign ^ (p_phi & e_before_R)
                        alt_factor = (p_phi & (e_before_R ^ e_before_O)) & 1
                        args = [Multivector(N, {block[i]: ring.one()}, ring) for i in range(start)]
                        args.append(inner)
                        args += [Multivector(N, {block[i]: ring.one()}, ring) for i in range(start + f, blen)]
                        val = mu.eval(blen - f + 1, args)
                        if val.is_zero(): continue
                        tags = {"cover" if covers else "plain"}
                        if start == 0: tags.add("blockstart")
                        if start + f == blen: tags.add("blockend")
                        if not covers and start + f == p: tags.add("tailend")
                        if not covers and start == p + 1: tags.add("headstart")
                        if f == 0 and start == p: tags.add("justbefore0")
                        if f == 0 and start == p + 1: tags.add("justafter0")
                        res = {}
                        for mask, cc in val.terms.items():
                            v = coeff * cc
                            if base_sign: v = -v
                            res[(mask, mid)] = res.get((mask, mid), Fraction(0)) + v
                        yield frozenset(tags), alt_factor, res
    return

def B11_configs(phi, chain):
    ring = chain.ring
    p_phi = phi.parity
    for (a0, bars), coeff in chain.terms.items():
        s = len(bars)
        word = (a0,) + bars
        spars = [shifted_parity(m) for m in word]
        total = 0
        for p in spars: total ^= p
        for j in range(0, s + 1):
            e_tail = 0
            for m in word[j:]: e_tail ^= shifted_parity(m)
            rot_sign = (e_tail * (total ^ e_tail)) & 1
            rotated = word[j:] + word[:j]
            orig_idx = list(range(j, s + 1)) + list(range(0, j))
            w0pos = orig_idx.index(0)
            for f in phi.arities():
                for start in range(0, s + 2 - f):
                    covers = f > 0 and start <= w0pos < start + f
                    inner = phi.eval_basis(f, rotated[start:start + f])
                    if inner.is_zero(): continue
                    e_before_R = 0
                    for m in rotated[:start]: e_before_R ^= shifted_parity(m)
                    if f > 0:
                        first_orig = orig_idx[start]
                        e_before_O = 0
                        for t in range(0, first_orig): e_before_O ^= spars[t]
                    else:
                        e_before_O = e_before_R
                    base_sign = rot_sign ^ (p_phi & e_before_R)
                    alt_factor = (p_phi & (e_before_R ^ e_before_O)) & 1
                    tags = {"cover" if covers else "plain"}
                    if start + f == s + 1: tags.add("wordend")
                    if start == 0: tags.add("wordstart")
                    res = {}
                    ok = True
                    for mask, cc in inner.terms.items():
                        nw = rotated[:start] + (mask,) + rotated[start + f:]
                        if any(m == 0 for m in nw): continue
                        v = coeff * cc
                        if base_sign: v = -v
                        res[(0, nw)] = res.get((0, nw), Fraction(0)) + v
                    if res:
                        yield frozenset(tags), alt_factor, res

# families = (kind, predicate on tags, mode)
F_FAMS = [
    ("Fany", lambda t: "plain" in t),
    ("Fcov", lambda t: "cover" in t),
    ("Fbs", lambda t: "plain" in t and "blockstart" in t),
    ("Fbe", lambda t: "plain" in t and "blockend" in t),
    ("Fte", lambda t: "tailend" in t),
    ("Fhs", lambda t: "headstart" in t),
    ("Fjb", lambda t: "justbefore0" in t),
    ("Fja", lambda t: "justafter0" in t),
]
G_FAMS = [
    ("Gany", lambda t: "plain" in t),
    ("Gcov", lambda t: "cover" in t),
    ("Gend", lambda t: "plain" in t and "wordend" in t),
    ("Gcovend", lambda t: "cover" in t and "wordend" in t),
    ("Gstart", lambda t: "plain" in t and "wordstart" in t),
]

def family_values(model, phi, chain):
    sfx = 'e' if phi.parity == 0 else 'o'
    lows, highs = {}, {}
    for tags, alt, res in b11_configs(model, phi, chain):
        for name, pred in F_FAMS:
            if pred(tags):
                for mode in ("R", "O"):
                    v = res if (mode == "R" or not alt) else {k: -x for k, x in res.items()}
                    key = name + mode + sfx
                    tgt = lows.setdefault(key, {})
                    for k, x in v.items():
                        tgt[k] = tgt.get(k, Fraction(0)) + x
    for tags, alt, res in B11_configs(phi, chain):
        for name, pred in G_FAMS:
            if pred(tags):
                for mode in ("R", "O"):
                    v = res if (mode == "R" or not alt) else {k: -x for k, x in res.items()}
                    key = name + mode + sfx
                    tgt = highs.setdefault(key, {})
                    for k, x in v.items():
                        tgt[k] = tgt.get(k, Fraction(0)) + x
    to_chain = lambda d: Chain(N, QQ, d)
    return {k: to_chain(v) for k, v in lows.items()}, {k: to_chain(v) for k, v in highs.items()}

# cap family separately (no outer mu)
def cap_values(phi, chain):
    sfx = 'e' if phi.parity == 0 else 'o'
    return {"F2" + sfx: lie_wrap(phi, chain)}

M3 = AInftyModel.from_potential(parse_potential("x1^3 + x2^3"), arity_max=9)
M2 = AInftyModel.from_potential(parse_potential("x1^2 + x2^2"), arity_max=9)

phis = [("T", exterior_degree_cochain(N, QQ)), ("e", unit_cochain(N, QQ))]
for i in range(2):
    phis.append((f"re{i}", rand_cochain(0)))
    phis.append((f"ro{i}", rand_cochain(1)))

keys = []
for a0 in range(1 << N):
    keys.append((a0, ()))
    for b1 in range(1, 1 << N):
        keys.append((a0, (b1,)))
        for b2 in range(1, 1 << N):
            keys.append((a0, (b1, b2)))
random.shuffle(keys)
keys = keys[:16]

rows = {}
eqcount = 0
for mname, model in [("a", M3), ("b", M2)]:
    mu_cochain = model.structure_cochain(9)
    for pname, phi in phis:
        br = gerstenhaber_bracket(mu_cochain, phi, 8)
        sgn_phi = (-1) ** ((phi.parity + 1) & 1)
        sfx = 'e' if phi.parity == 0 else 'o'
        for key in keys:
            c = Chain.basis(N, QQ, key[0], key[1])
            def ops(ch, ph):
                lo, hi = family_values(model, ph, ch)
                lo.update(cap_values(ph, ch))
                return lo, hi
            lows, highs = ops(c, phi)
            Dc_b = hochschild_b(model, c); Dc_B = connes_B(c)
            lowsD, highsD = ops(Dc_b, phi)
            lowsDB, highsDB = ops(Dc_B, phi)
            brlows, brhighs = ops(c, br)
            comp = {0: {}, 1: {}, 2: {}}
            comp[1]["Li" + sfx] = lie_interior(phi, c).scale(-1)
            comp[1]["Lw" + sfx] = lie_wrap(phi, c).scale(-1)
            for tag, val in lows.items():
                comp[0][tag] = comp[0].get(tag, Chain(N, QQ)) + hochschild_b(model, val)
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) + connes_B(val)
            for tag, val in highs.items():
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) + hochschild_b(model, val)
                comp[2][tag] = comp[2].get(tag, Chain(N, QQ)) + connes_B(val)
            for tag, val in lowsD.items():
                comp[0][tag] = comp[0].get(tag, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in highsD.items():
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in lowsDB.items():
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in highsDB.items():
                comp[2][tag] = comp[2].get(tag, Chain(N, QQ)) - val.scale(sgn_phi)
            for tag, val in brlows.items():
                comp[0][tag] = comp[0].get(tag, Chain(N, QQ)) + val
            for tag, val in brhighs.items():
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) + val
            for upow in (0, 1, 2):
                chainkeys = set()
                for tag, val in comp[upow].items():
                    chainkeys.update(val.terms)
                for ck in chainkeys:
                    eq = {}
                    for tag, val in comp[upow].items():
                        v = val.terms.get(ck)
                        if v: eq[tag] = eq.get(tag, Fraction(0)) + v
                    if not eq: continue
                    eqid = ("eq", eqcount); eqcount += 1
                    rows[eqid] = eq

allu = sorted({u for eq in rows.values() for u in eq})
print("unknowns:", len(allu), "equations:", len(rows))
cols = {u: {} for u in allu}
for eqid, eq in rows.items():
    for u, v in eq.items():
        if v: cols[u][eqid] = v
kernel, ech = nullspace([(u, cols[u]) for u in allu])
print("kernel dimension:", len(kernel))
for vec in kernel:
    has_L = any(k.startswith("L") and vec[k] != 0 for k in vec)
    print(("L! " if has_L else "    "), {k: str(v) for k, v in sorted(vec.items()) if v != 0})
