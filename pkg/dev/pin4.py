import itertools, random
from fractions import Fraction
import sys
sys.path.insert(0, "dev")
import pin_cartan as P
from pin3 import lie_interior, lie_wrap, rand_cochain
from mfhodge.potential import parse_potential
from mfhodge.ainfty import AInftyModel, exterior_degree_cochain, unit_cochain, gerstenhaber_bracket
from mfhodge.hochschild import Chain, hochschild_b, connes_B, shifted_parity
from mfhodge.scalars import QQ
from mfhodge.linalg import nullspace

random.seed(5)
N = 2
P.N = 2

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
keys = keys[:20]

def build_kernel(kappa, comm_mode):
    rows = {}
    eqcount = 0
    for mname, model in [("a", M3), ("b", M2)]:
        mu_cochain = model.structure_cochain(9)
        for pname, phi in phis:
            br = gerstenhaber_bracket(mu_cochain, phi, 8)
            if comm_mode == "graded":
                sgn_phi = (-1) ** ((phi.parity + 1) & 1)
            elif comm_mode == "flip":
                sgn_phi = (-1) ** (phi.parity & 1)
            elif comm_mode == "plus":
                sgn_phi = -1   # D iota + iota D
            else:
                sgn_phi = 1    # D iota - iota D
            sfx = 'e' if phi.parity == 0 else 'o'
            for key in keys:
                c = Chain.basis(N, QQ, key[0], key[1])
                lows, highs = P.apply_ops(model, phi, c)
                Dc_b = hochschild_b(model, c); Dc_B = connes_B(c)
                lowsD, highsD = P.apply_ops(model, phi, Dc_b)
                lowsDB, highsDB = P.apply_ops(model, phi, Dc_B)
                brlows, brhighs = P.apply_ops(model, br, c)
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
                    comp[0][tag] = comp[0].get(tag, Chain(N, QQ)) + val.scale(kappa)
                for tag, val in brhighs.items():
                    comp[1][tag] = comp[1].get(tag, Chain(N, QQ)) + val.scale(kappa)
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
    cols = {u: {} for u in allu}
    for eqid, eq in rows.items():
        for u, v in eq.items():
            if v: cols[u][eqid] = v
    kernel, ech = nullspace([(u, cols[u]) for u in allu])
    return allu, kernel

for kappa in (1, -1):
    for mode in ("graded", "flip", "plus", "minus"):
        allu, kernel = build_kernel(kappa, mode)
        interesting = [v for v in kernel if any(k.startswith("L") and v[k] != 0 for k in v)]
        print(f"kappa={kappa} mode={mode}: kernel dim {len(kernel)}, with L: {len(interesting)}")
        for v in interesting:
            print("   ", {k: str(x) for k, x in sorted(v.items())})
