import itertools, random
from fractions import Fraction
import sys
sys.path.insert(0, "dev")
from calc import b_gen, B_gen, lie_parts, b11_configs, B11_configs, SP
from mfhodge.potential import parse_potential
from mfhodge.ainfty import AInftyModel, HochschildCochain, exterior_degree_cochain, unit_cochain, gerstenhaber_bracket
from mfhodge.hochschild import Chain
from mfhodge.exterior import Multivector
from mfhodge.scalars import QQ
from mfhodge.linalg import nullspace

random.seed(5)
N = 2
MODE = sys.argv[1] if len(sys.argv) > 1 else "honest"

M3 = AInftyModel.from_potential(parse_potential("x1^3 + x2^3"), arity_max=9)
M2 = AInftyModel.from_potential(parse_potential("x1^2 + x2^2"), arity_max=9)

# sanity: contracts at N=2, lengths <= 2
bad = 0
pool = list(range(1, 1 << N))
for a0 in range(1 << N):
    for s in range(3):
        for bars in itertools.product(pool, repeat=s):
            c = Chain.basis(N, QQ, a0, bars)
            if not b_gen(M3, b_gen(M3, c, MODE), MODE).is_zero(): bad += 1
            if not B_gen(B_gen(c, MODE), MODE).is_zero(): bad += 1
            if not (b_gen(M3, B_gen(c, MODE), MODE) + B_gen(b_gen(M3, c, MODE), MODE)).is_zero(): bad += 1
print(MODE, "contract violations at N=2:", bad)

def rand_cochain(parity, arity_max=2, density=0.4):
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
            if terms:
                tab[masks] = Multivector(N, terms, QQ)
        if tab: tables[n] = tab
    return HochschildCochain.from_tables(N, QQ, tables, parity)

F_FAMS = [("Fany", lambda t: "pln" in t), ("Fcov", lambda t: "cov" in t),
          ("Fbs", lambda t: "pln" in t and "bs" in t), ("Fbe", lambda t: "pln" in t and "be" in t),
          ("Fts", lambda t: "tside" in t), ("Fhs", lambda t: "hside" in t)]
G_FAMS = [("Gany", lambda t: "pln" in t), ("Gcov", lambda t: "cov" in t),
          ("Gend", lambda t: "pln" in t and "we" in t), ("Gcend", lambda t: "cov" in t and "we" in t),
          ("GadjL", lambda t: "adjL" in t), ("GadjR", lambda t: "adjR" in t)]

def family_values(model, phi, chain):
    sfx = 'e' if phi.parity == 0 else 'o'
    lows, highs = {}, {}
    for tags, res in b11_configs(model, phi, chain, MODE):
        for name, pred in F_FAMS:
            if pred(tags):
                tgt = lows.setdefault(name + sfx, {})
                for k, x in res.items(): tgt[k] = tgt.get(k, Fraction(0)) + x
    for tags, res in B11_configs(phi, chain, MODE):
        for name, pred in G_FAMS:
            if pred(tags):
                tgt = highs.setdefault(name + sfx, {})
                for k, x in res.items(): tgt[k] = tgt.get(k, Fraction(0)) + x
    return ({k: Chain(N, QQ, v) for k, v in lows.items()},
            {k: Chain(N, QQ, v) for k, v in highs.items()})

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
for model in (M3, M2):
    mu_cochain = model.structure_cochain(9)
    for pname, phi in phis:
        br = gerstenhaber_bracket(mu_cochain, phi, 8)
        sgn_phi = (-1) ** ((phi.parity + 1) & 1)
        sfx = 'e' if phi.parity == 0 else 'o'
        for key in keys:
            c = Chain.basis(N, QQ, key[0], key[1])
            lows, highs = family_values(model, phi, c)
            Dc_b = b_gen(model, c, MODE); Dc_B = B_gen(c, MODE)
            lowsD, highsD = family_values(model, phi, Dc_b)
            lowsDB, highsDB = family_values(model, phi, Dc_B)
            brlows, brhighs = family_values(model, br, c)
            li, lw = lie_parts(phi, c, MODE)
            comp = {0: {}, 1: {}, 2: {}}
            comp[1]["Li" + sfx] = li.scale(-1)
            comp[1]["Lw" + sfx] = lw.scale(-1)
            for tag, val in lows.items():
                comp[0][tag] = comp[0].get(tag, Chain(N, QQ)) + b_gen(model, val, MODE)
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) + B_gen(val, MODE)
            for tag, val in highs.items():
                comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) + b_gen(model, val, MODE)
                comp[2][tag] = comp[2].get(tag, Chain(N, QQ)) + B_gen(val, MODE)
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
