import itertools, random
from fractions import Fraction
import sys
sys.path.insert(0, "dev")
import pin_cartan as P
from mfhodge.potential import parse_potential
from mfhodge.ainfty import AInftyModel, HochschildCochain, exterior_degree_cochain, unit_cochain, gerstenhaber_bracket
from mfhodge.hochschild import Chain, hochschild_b, connes_B, shifted_parity, _prefix_parities, _emit_multivector, _add_term
from mfhodge.exterior import Multivector
from mfhodge.scalars import QQ
from mfhodge.linalg import solve

random.seed(5)
N = 2
P.N = 2

def lie_interior(phi, chain):
    ring = chain.ring
    out = {}
    p_phi = phi.parity
    for key, coeff in chain.terms.items():
        a0, bars = key
        s = len(bars)
        pref = _prefix_parities(key)
        for l in phi.arities():
            if l == 0 or l > s: continue
            for i in range(0, s - l + 1):
                val = phi.eval_basis(l, bars[i:i+l])
                if val.is_zero(): continue
                sign = (p_phi * pref[i]) & 1
                head, tail = bars[:i], bars[i+l:]
                def mk(mask, head=head, tail=tail):
                    if mask == 0: return None
                    return (a0, head + (mask,) + tail)
                _emit_multivector(out, ring, val.scale(coeff), mk, sign)
    return Chain(chain.N, ring, out)

def lie_wrap(phi, chain):
    ring = chain.ring
    out = {}
    for key, coeff in chain.terms.items():
        a0, bars = key
        s = len(bars)
        total = shifted_parity(a0)
        for b in bars: total ^= shifted_parity(b)
        for l in phi.arities():
            if l == 0 or l - 1 > s: continue
            for p in range(0, l):
                q = l - 1 - p
                if p + q > s: continue
                block = bars[s-p:] + (a0,) + bars[:q]
                val = phi.eval_basis(l, block)
                if val.is_zero(): continue
                e_tail = 0
                for b in bars[s-p:]: e_tail ^= shifted_parity(b)
                sign = (e_tail * (total ^ e_tail)) & 1
                mid = bars[q:s-p]
                def mk(mask, mid=mid):
                    return (mask, mid)
                _emit_multivector(out, ring, val.scale(coeff), mk, sign)
    return Chain(chain.N, ring, out)

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
keys = keys[:24]

rows, rhs = {}, {}
eqcount = 0
for mname, model in [("a", M3), ("b", M2)]:
    mu_cochain = model.structure_cochain(9)
    for pname, phi in phis:
        br = gerstenhaber_bracket(mu_cochain, phi, 8)
        sgn_phi = (-1) ** ((phi.parity + 1) & 1)
        sfx = 'e' if phi.parity == 0 else 'o'
        for key in keys:
            c = Chain.basis(N, QQ, key[0], key[1])
            lows, highs = P.apply_ops(model, phi, c)
            Dc_b = hochschild_b(model, c); Dc_B = connes_B(c)
            lowsD, highsD = P.apply_ops(model, phi, Dc_b)
            lowsDB, highsDB = P.apply_ops(model, phi, Dc_B)
            brlows, brhighs = P.apply_ops(model, br, c)
            comp = {0: {}, 1: {}, 2: {}}
            # L unknowns enter at u^1 with negative sign: ... - u(Li*Lint + Lw*Lwrap)
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
                    rhs[eqid] = Fraction(0)

# homogeneous system: pin normalization Li_e = 1, Li_o = 1 by adding equations
allu = sorted({u for eq in rows.values() for u in eq})
print("unknowns:", allu, "equations:", len(rows))
cols = {u: {} for u in allu}
for eqid, eq in rows.items():
    for u, v in eq.items():
        if v: cols[u][eqid] = v
# solve the homogeneous system's nullspace
from mfhodge.linalg import nullspace
kernel, ech = nullspace([(u, cols[u]) for u in allu])
print("kernel dimension:", len(kernel))
for vec in kernel:
    print({k: str(v) for k, v in sorted(vec.items())})
