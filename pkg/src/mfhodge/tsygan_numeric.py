"""Floating-point configuration-space integrals as an independent oracle.

Upper half-plane: the angle of an edge from an interior point z to a real
point x is twice the argument of x - z; weights are Monte-Carlo estimates of
the wedge of edge-angle differentials over the moduli of k interior and n
real points, gauge-fixed by pinning the first interior point at i.  They
cross-check the exact shuffle-product weights.

Unit disk: the adopted angle function for an edge (z -> w) is
    theta(z, w) = arg((w - z) / (1 - conj(z) w)) / 2pi,
the hyperbolic angle in the disk model, normalized to unit total variation
around the boundary; edges from the marked center reduce to the boundary
position angle, which is what makes the zero-interior-vertex term of the
deformed chain-to-form map exact.  The adopted formula is validated by the
chain-map residual test, not asserted.

Floats never leak into the exact modules; every exact quantity used here is
converted one way only.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .exterior import Multivector, popcount
from .graphs import AdmissibleGraph, apply_sequence, enumerate_star_lists, m_sign_mask, weight
from .hochschild import Chain
from .potential import Potential, symmetrize_component
from .saito import AForm

TWO_PI = 2.0 * math.pi


class KontsevichHalfPlane:
    """Edge angle 2 arg(x - z) for interior z in H, boundary x on R."""

    kind = "kontsevich_half_plane"

    def d_angle(self, z, x):
        """Partial derivatives of the angle wrt (x, Re z, Im z).

        arg(w) has dArg = (-Im w, Re w)/|w|^2 against (Re w, Im w); here
        w = x - z, so dx enters with +1 and dz with -1.
        """
        w = x - z
        denom = (w.real ** 2 + w.imag ** 2)
        darg_re = -w.imag / denom
        darg_im = w.real / denom
        return 2.0 * darg_re, -2.0 * darg_re, -2.0 * darg_im


class ShoikhetDisk:
    """Edge angle arg((w - z)/(1 - conj(z) w))/2pi on the unit disk."""

    kind = "shoikhet_disk"

    def theta_boundary(self, z, psi):
        w = complex(math.cos(psi), math.sin(psi))
        val = (w - z) / (1.0 - z.conjugate() * w)
        return math.atan2(val.imag, val.real) / TWO_PI

    def d_theta(self, z, psi):
        """Partials of theta wrt (psi, Re z, Im z) for w = e^(i psi)."""
        w = complex(math.cos(psi), math.sin(psi))
        a = w - z
        b = 1.0 - z.conjugate() * w
        # theta = (arg a - arg b)/2pi; d arg(f) = Im(df / f)
        dw = 1j * w
        d_psi = ((dw / a).imag - ((-z.conjugate() * dw) / b).imag) / TWO_PI
        # dz = dx + i dy: da = -dz, db = -conj(dz) w
        d_re = ((-1.0 / a).imag - ((-w) / b).imag) / TWO_PI
        d_im = ((-1j / a).imag - ((1j * w) / b).imag) / TWO_PI
        return d_psi, d_re, d_im


class NumericWeight:
    def __init__(self, value, stderr, samples, method="MonteCarlo", resampled=0):
        self.value = value
        self.stderr = stderr
        self.samples = samples
        self.method = method
        self.resampled = resampled

    def __repr__(self):
        return f"{self.value:.6f} +- {self.stderr:.6f} ({self.samples} samples)"

    def to_json(self):
        return {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples,
            "method": self.method,
            "resampled": self.resampled,
        }


def _half_plane_batch(graph, rng, count):
    """One batch of signed integrand samples for a half-plane graph weight."""
    k, n = graph.k, graph.n
    edges = []
    for i, star in enumerate(graph.stars):
        for tgt in star:
            edges.append((i, tgt))
    E = len(edges)
    # boundary points: Cauchy, sorted ascending; density of the order statistic
    xs = rng.standard_cauchy((count, n))
    xs.sort(axis=1)
    dens = math.factorial(n) / np.prod(np.pi * (1.0 + xs ** 2), axis=1)
    # interior points: z_1 = i fixed; others x ~ Cauchy, y ~ half-Cauchy
    zs = np.empty((count, k), dtype=complex)
    zs[:, 0] = 1j
    for j in range(1, k):
        zr = rng.standard_cauchy(count)
        zi = np.abs(rng.standard_cauchy(count))
        zs[:, j] = zr + 1j * zi
        dens *= 1.0 / (np.pi * (1.0 + zr ** 2)) * 2.0 / (np.pi * (1.0 + zi ** 2))
    # Jacobian of (phi_e) against coordinates (x_1..x_n, Re z_2, Im z_2, ...)
    J = np.zeros((count, E, E))
    prop = KontsevichHalfPlane()
    for e_idx, (i, tgt) in enumerate(edges):
        z = zs[:, i]
        x = xs[:, tgt - 1]
        w = x - z
        denom = w.real ** 2 + w.imag ** 2
        darg_re = -w.imag / denom
        darg_im = w.real / denom
        J[:, e_idx, tgt - 1] += 2.0 * darg_re
        if i > 0:
            J[:, e_idx, n + 2 * (i - 1)] += -2.0 * darg_re
            J[:, e_idx, n + 2 * (i - 1) + 1] += -2.0 * darg_im
    dets = np.linalg.det(J)
    vals = dets / dens / (TWO_PI ** E)
    return vals


def numeric_graph_weight(graph: AdmissibleGraph, propagator=None, samples=200_000, seed=0) -> NumericWeight:
    """Monte-Carlo estimate of the configuration-space weight of a graph.

    Degree-mismatched or uncovered graphs return exactly zero without any
    sampling; non-finite integrand samples are replaced and counted.
    """
    if propagator is None:
        propagator = KontsevichHalfPlane()
    if not graph.is_contributing():
        return NumericWeight(0.0, 0.0, 0, method="exact-zero")
    rng = np.random.default_rng(seed)
    chunks = []
    resampled = 0
    remaining = samples
    while remaining > 0:
        count = min(remaining, 200_000)
        vals = _half_plane_batch(graph, rng, count)
        bad = ~np.isfinite(vals)
        nbad = int(bad.sum())
        if nbad:
            resampled += nbad
            redo = _half_plane_batch(graph, rng, nbad)
            redo[~np.isfinite(redo)] = 0.0
            vals = vals.copy()
            vals[bad] = redo
        chunks.append(vals)
        remaining -= count
    allv = np.concatenate(chunks)
    mean = float(allv.mean())
    stderr = float(allv.std(ddof=1) / math.sqrt(len(allv)))
    return NumericWeight(mean, stderr, samples, resampled=resampled)


def _center_sequences(center_star, N):
    """All generator assignments for the center's edges."""
    return itertools.product(range(1, N + 1), repeat=len(center_star))


def tsygan_term_exact_k0(W: Potential, chain: Chain) -> AForm:
    """The zero-interior-vertex term: an HKR-type map, computed exactly.

    The center hits every moving boundary point once; the weight is 1/n!.
    """
    ring = W.ring
    N = W.N
    Xcap = N  # dE degree never exceeds n <= needed; cap generously below
    out = AForm(N, 10 ** 6, {}, ring)
    for key, coeff in chain.terms.items():
        a0, bars = key
        n = len(bars)
        word = (a0,) + bars
        wgt = ring.coerce(Fraction(1, math.factorial(n)))
        for gens in itertools.product(range(1, N + 1), repeat=n):
            seq = [(slot, gens[slot - 2]) for slot in range(n + 1, 1, -1)]
            applied = apply_sequence(seq, list(word))
            if applied is None:
                continue
            sign, masks = applied
            ms = m_sign_mask(masks)
            if ms is None:
                continue
            sign *= ms[0]
            if n & 1:
                sign = -sign  # orientation factor per center edge
            de = [0] * N
            for g in gens:
                de[g - 1] += 1
            val = coeff * wgt
            if sign < 0:
                val = -val
            out = out + AForm(N, 10 ** 6, {(ms[1], tuple(de)): val}, ring)
    return out


def _disk_weight_batch(stars_all, n, rng, count):
    """Signed integrand batch for a disk graph; vertex 0 is the fixed center."""
    edges = []
    for i, star in enumerate(stars_all):
        for tgt in star:
            edges.append((i, tgt))
    E = len(edges)
    k_free = len(stars_all) - 1
    psis = rng.uniform(0.0, TWO_PI, (count, n))
    psis.sort(axis=1)
    dens = np.full(count, math.factorial(n) / (TWO_PI ** n))
    zs = np.empty((count, len(stars_all)), dtype=complex)
    zs[:, 0] = 0.0
    for j in range(1, k_free + 1):
        r = np.sqrt(rng.uniform(0.0, 1.0, count))
        th = rng.uniform(0.0, TWO_PI, count)
        zs[:, j] = r * np.exp(1j * th)
        dens *= 1.0 / math.pi  # uniform on the unit disk
    J = np.zeros((count, E, E))
    for e_idx, (i, tgt) in enumerate(edges):
        z = zs[:, i]
        if tgt == 0:
            w = np.ones(count, dtype=complex)
            psi_col = None
        else:
            psi = psis[:, tgt - 1]
            w = np.exp(1j * psi)
            psi_col = tgt - 1
        a = w - z
        b = 1.0 - np.conj(z) * w
        if psi_col is not None:
            dw = 1j * w
            J[:, e_idx, psi_col] += ((dw / a).imag - ((-np.conj(z) * dw) / b).imag) / TWO_PI
        if i > 0:
            J[:, e_idx, n + 2 * (i - 1)] += ((-1.0 / a).imag - ((-w) / b).imag) / TWO_PI
            J[:, e_idx, n + 2 * (i - 1) + 1] += ((-1j / a).imag - ((1j * w) / b).imag) / TWO_PI
    dets = np.linalg.det(J)
    return dets / dens


def disk_numeric_weight(stars_all, n, samples=200_000, seed=0, propagator_sign=1) -> NumericWeight:
    """MC weight of a disk graph with the normalized angle function.

    ``propagator_sign=-1`` negates the angle function (each of the E edge
    differentials flips), an oracle-sensitivity corruption.
    """
    E = sum(len(s) for s in stars_all)
    k_free = len(stars_all) - 1
    if E != 2 * k_free + n:
        return NumericWeight(0.0, 0.0, 0, method="exact-zero")
    moving_cover = set()
    for s in stars_all:
        moving_cover.update(t for t in s if t >= 1)
    if moving_cover != set(range(1, n + 1)):
        return NumericWeight(0.0, 0.0, 0, method="exact-zero")
    rng = np.random.default_rng(seed)
    chunks = []
    resampled = 0
    remaining = samples
    while remaining > 0:
        count = min(remaining, 200_000)
        vals = _disk_weight_batch(stars_all, n, rng, count)
        bad = ~np.isfinite(vals)
        if bad.any():
            resampled += int(bad.sum())
            redo = _disk_weight_batch(stars_all, n, rng, int(bad.sum()))
            redo[~np.isfinite(redo)] = 0.0
            vals = vals.copy()
            vals[bad] = redo
        chunks.append(vals)
        remaining -= count
    allv = np.concatenate(chunks)
    flip = 1.0 if propagator_sign >= 0 else (-1.0) ** E
    return NumericWeight(flip * float(allv.mean()), float(allv.std(ddof=1) / math.sqrt(len(allv))),
                         samples, resampled=resampled)


class FloatForm:
    """A-side form with float coefficients and per-key standard errors."""

    def __init__(self, N):
        self.N = N
        self.values = {}
        self.errors = {}

    def add(self, key, value, err=0.0):
        self.values[key] = self.values.get(key, 0.0) + value
        self.errors[key] = math.hypot(self.errors.get(key, 0.0), err)

    def add_exact(self, aform: AForm, scale=1.0):
        for key, c in aform.terms.items():
            self.add(key, float(Fraction(c)) * scale)

    def max_residual(self, other=None):
        keys = set(self.values)
        if other is not None:
            keys |= set(other.values)
        worst = 0.0
        err = 0.0
        for k in keys:
            v = self.values.get(k, 0.0) - (other.values.get(k, 0.0) if other else 0.0)
            e = math.hypot(self.errors.get(k, 0.0), other.errors.get(k, 0.0) if other else 0.0)
            if abs(v) > worst:
                worst, err = abs(v), e
        return worst, err

    def __repr__(self):
        bits = [f"{k}: {v:.6g}+-{self.errors[k]:.2g}" for k, v in sorted(self.values.items())]
        return "{" + ", ".join(bits) + "}"


def tsygan_map_term(W: Potential, k: int, chain: Chain, samples=100_000, seed=0,
                    propagator_sign=1) -> FloatForm:
    """The k-interior-vertex term of the deformed chain-to-form map.

    k = 0 is exact; k >= 1 sums disk graphs with W at every free interior
    vertex, weighting the exact operator action by Monte-Carlo integrals.
    Graphs whose operator action vanishes are skipped without sampling.
    """
    N = W.N
    out = FloatForm(N)
    if k == 0:
        out.add_exact(tsygan_term_exact_k0(W, chain))
        return out
    degrees = sorted({sum(e) for e in W.terms})
    factor = 1.0 / math.factorial(k)
    seed_base = seed
    for key, coeff in chain.terms.items():
        a0, bars = key
        n = len(bars)
        dim = 2 * k + n
        # center star: subset of {0..n}; W stars: subsets of {0..n} with W degrees
        slots = list(range(0, n + 1))
        for center_size in range(0, min(N * (n + 1), dim) + 1):
            w_budget = dim - center_size
            for center_star in itertools.combinations(slots, center_size):
                for w_stars in enumerate_star_lists(
                    n + 1, [degrees] * k, w_budget, required_cover=frozenset()
                ):
                    stars_shift = [tuple(t - 1 for t in s) for s in w_stars]
                    # enumerate_star_lists labels 1..n+1; shift to 0..n
                    all_stars = [tuple(center_star)] + stars_shift
                    moving = set()
                    for s in all_stars:
                        moving.update(t for t in s if t >= 1)
                    if moving != set(range(1, n + 1)):
                        continue
                    # exact operator part, summed over center generator words
                    op_total = {}
                    for gens in _center_sequences(center_star, N):
                        menus = [symmetrize_component(W, len(s)) for s in stars_shift]
                        for words in itertools.product(*[list(m.items()) for m in menus]):
                            c2 = coeff
                            for _, c in words:
                                c2 = c2 * c
                            seq = []
                            for v in range(len(stars_shift) - 1, -1, -1):
                                star, wd = stars_shift[v], words[v][0]
                                for pos in range(len(star) - 1, -1, -1):
                                    seq.append((star[pos] + 1, wd[pos]))
                            for pos in range(len(center_star) - 1, -1, -1):
                                seq.append((center_star[pos] + 1, gens[pos]))
                            applied = apply_sequence(seq, list((a0,) + bars))
                            if applied is None:
                                continue
                            sign, masks = applied
                            ms = m_sign_mask(masks)
                            if ms is None:
                                continue
                            sign *= ms[0]
                            if len(center_star) & 1:
                                sign = -sign  # orientation factor per center edge
                            de = [0] * N
                            for g in gens:
                                de[g - 1] += 1
                            fkey = (ms[1], tuple(de))
                            val = c2 if sign > 0 else -c2
                            op_total[fkey] = op_total.get(fkey, W.ring.zero()) + val
                    op_total = {kk: v for kk, v in op_total.items() if not W.ring.is_zero(v)}
                    if not op_total:
                        continue
                    wnum = disk_numeric_weight(all_stars, n, samples=samples, seed=seed_base,
                                               propagator_sign=propagator_sign)
                    seed_base += 1
                    if wnum.samples == 0:
                        continue
                    for fkey, v in op_total.items():
                        out.add(fkey, float(Fraction(v)) * wnum.value * factor,
                                abs(float(Fraction(v))) * wnum.stderr * factor)
    return out


def tsygan_map(W: Potential, chain: Chain, k_max=1, samples=100_000, seed=0,
               propagator_sign=1) -> FloatForm:
    out = FloatForm(W.N)
    for k in range(0, k_max + 1):
        term = tsygan_map_term(W, k, chain, samples=samples, seed=seed + 977 * k,
                               propagator_sign=propagator_sign)
        for key, v in term.values.items():
            out.add(key, v, term.errors[key])
    return out


def chain_map_residual(model, W: Potential, k_max=1, length_max=2, samples=100_000, seed=0,
                       flip_propagator_sign=False):
    """Max residual of the chain-map identity, compared per u-power.

    u^0: U(b c) = L_W(U c); u^1: U(B c) = d_DR(U c).  Returns a dict with
    the worst absolute residual and the combined standard error.
    """
    from .hochschild import connes_B, hochschild_b
    from .saito import AForm, a_de_rham, a_lie

    N = W.N
    psign = -1 if flip_propagator_sign else 1
    worst = {"u0": (0.0, 0.0), "u1": (0.0, 0.0)}
    bar_pool = [m for m in range(1, 1 << N)]
    keys = []
    for a0 in range(1 << N):
        for s in range(length_max + 1):
            for bars in itertools.product(bar_pool, repeat=s):
                keys.append((a0, bars))
    for key in keys:
        c = Chain.basis(N, W.ring, key[0], key[1])
        Uc = tsygan_map(W, c, k_max=k_max, samples=samples, seed=seed, propagator_sign=psign)
        bc = hochschild_b(model, c)
        Bc = connes_B(c)
        Ubc = tsygan_map(W, bc, k_max=k_max, samples=samples, seed=seed + 13, propagator_sign=psign)
        UBc = tsygan_map(W, Bc, k_max=k_max, samples=samples, seed=seed + 29, propagator_sign=psign)
        LUc = _apply_exactish(lambda f: a_lie(W, f), Uc, N)
        dUc = _apply_exactish(a_de_rham, Uc, N)
        r0, e0 = Ubc.max_residual(LUc)
        r1, e1 = UBc.max_residual(dUc)
        if r0 > worst["u0"][0]:
            worst["u0"] = (r0, e0)
        if r1 > worst["u1"][0]:
            worst["u1"] = (r1, e1)
    return worst


def _apply_exactish(op, fform: FloatForm, N):
    """Apply an exact A-side operator to a float form, key by key."""
    out = FloatForm(N)
    for (mask, de), v in fform.values.items():
        base = AForm(N, 10 ** 6, {(mask, de): Fraction(1)})
        img = op(base)
        for key2, c in img.terms.items():
            out.add(key2, float(Fraction(c)) * v, abs(float(Fraction(c))) * fform.errors[(mask, de)])
    return out
