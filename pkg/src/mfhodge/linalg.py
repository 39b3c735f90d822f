"""Sparse exact linear algebra over Q.

Vectors are dicts {column_key: Fraction}.  The central object is a forward
echelon with a caller-chosen column priority: each stored row is normalized so
its highest-priority surviving column (the pivot) has coefficient one, and a
vector reduces by repeatedly cancelling its highest-priority pivot column.
Optional tracking records each reduction as a combination of the inserted
vectors, which is how nullspaces and membership certificates are produced.
"""

from __future__ import annotations

from fractions import Fraction


class Echelon:
    """Incremental echelon form with pivot-priority reduction.

    ``priority(col)`` must return a sortable key; larger keys are eliminated
    first, so the quotient-space basis prefers columns with small keys.
    """

    def __init__(self, priority=None, track=False):
        self.rows = {}  # pivot col -> row dict (pivot coefficient 1)
        self.combos = {}  # pivot col -> combination dict over inserted tags
        self.priority = priority or (lambda col: col)
        self.track = track

    def _pick_pivot(self, vec):
        return max(vec, key=self.priority)

    def reduce(self, vec, combo=None):
        """Reduce vec against the echelon; returns (residue, combo)."""
        vec = dict(vec)
        if combo is None:
            combo = {}
        while vec:
            # cancel the highest-priority column that is a pivot
            cols = [c for c in vec if c in self.rows]
            if not cols:
                break
            col = max(cols, key=self.priority)
            coeff = vec[col]
            row = self.rows[col]
            for c2, v2 in row.items():
                s = vec.get(c2, Fraction(0)) - coeff * v2
                if s:
                    vec[c2] = s
                else:
                    vec.pop(c2, None)
            if self.track:
                for tag, v2 in self.combos[col].items():
                    s = combo.get(tag, Fraction(0)) - coeff * v2
                    if s:
                        combo[tag] = s
                    else:
                        combo.pop(tag, None)
        return vec, combo

    def insert(self, vec, tag=None):
        """Reduce and insert; returns None if vec was dependent, else the pivot.

        With tracking on, a dependent vector's combination (over previously
        inserted tags, plus its own) is available via ``last_combo``.
        """
        combo = {tag: Fraction(1)} if (self.track and tag is not None) else {}
        residue, combo = self.reduce(vec, combo)
        self.last_combo = combo
        if not residue:
            return None
        pivot = self._pick_pivot(residue)
        inv = 1 / residue[pivot]
        row = {c: v * inv for c, v in residue.items()}
        self.rows[pivot] = row
        if self.track:
            self.combos[pivot] = {t: v * inv for t, v in combo.items()}
        return pivot

    @property
    def rank(self):
        return len(self.rows)

    def pivots(self):
        return set(self.rows)


def rank(vectors, priority=None) -> int:
    ech = Echelon(priority)
    for v in vectors:
        ech.insert(v)
    return ech.rank


def nullspace(columns, priority=None):
    """Kernel basis of the map sending unit vector j to columns[j].

    ``columns`` is a list of (tag, vector) pairs; each kernel element is a
    dict over tags.  Also returns the echelon of the column space.
    """
    ech = Echelon(priority, track=True)
    kernel = []
    for tag, vec in columns:
        pivot = ech.insert(vec, tag)
        if pivot is None:
            # dependent: the tracked combination already sums to zero
            kernel.append(dict(ech.last_combo))
    return kernel, ech


def solve(columns, target, priority=None):
    """Solve sum_j x_j columns[j] = target; returns {tag: coeff} or None."""
    ech = Echelon(priority, track=True)
    for tag, vec in columns:
        ech.insert(vec, tag)
    residue, combo = ech.reduce(dict(target), {})
    if residue:
        return None
    return {t: -v for t, v in combo.items()}


def vec_add(a, b, scale=Fraction(1)):
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, Fraction(0)) + scale * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_scale(a, c):
    if not c:
        return {}
    return {k: c * v for k, v in a.items()}
