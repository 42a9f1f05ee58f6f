"""Exact sparse elimination over the integers and over prime fields.

Everything here works on plain ``dict`` sparse data: a matrix is a
``dict[(row, col)] -> value`` with absent positions meaning zero.  The
integer path never leaves arbitrary-precision ``int``; the prime-field
path stores residues in ``range(p)``.
"""

from __future__ import annotations

from dataclasses import dataclass


def xgcd(a, b):
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class _SparseRows:
    """Row-major sparse matrix with a column index, for elimination."""

    def __init__(self, nrows, ncols, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = [dict() for _ in range(nrows)]
        self.col_rows = [set() for _ in range(ncols)]
        if entries:
            for (i, j), val in entries.items():
                if val:
                    self.rows[i][j] = val
                    self.col_rows[j].add(i)

    def get(self, i, j):
        return self.rows[i].get(j, 0)

    def set(self, i, j, val):
        if val:
            self.rows[i][j] = val
            self.col_rows[j].add(i)
        elif j in self.rows[i]:
            del self.rows[i][j]
            self.col_rows[j].discard(i)

    def add_multiple_of_row(self, target, source, coeff, reduce_mod=None):
        # R_target += coeff * R_source
        if not coeff:
            return
        row_s = self.rows[source]
        for j, val in list(row_s.items()):
            new = self.get(target, j) + coeff * val
            if reduce_mod:
                new %= reduce_mod
            self.set(target, j, new)

    def swap_rows(self, a, b):
        if a == b:
            return
        for j in set(self.rows[a]) | set(self.rows[b]):
            self.col_rows[j].discard(a)
            self.col_rows[j].discard(b)
        self.rows[a], self.rows[b] = self.rows[b], self.rows[a]
        for j in self.rows[a]:
            self.col_rows[j].add(a)
        for j in self.rows[b]:
            self.col_rows[j].add(b)

    def scale_row(self, i, coeff, reduce_mod=None):
        row = self.rows[i]
        for j in list(row):
            val = row[j] * coeff
            if reduce_mod:
                val %= reduce_mod
            self.set(i, j, val)

    def add_multiple_of_col(self, target, source, coeff, reduce_mod=None):
        if not coeff:
            return
        for i in list(self.col_rows[source]):
            new = self.get(i, target) + coeff * self.rows[i][source]
            if reduce_mod:
                new %= reduce_mod
            self.set(i, target, new)

    def swap_cols(self, a, b):
        if a == b:
            return
        touched = self.col_rows[a] | self.col_rows[b]
        for i in touched:
            va = self.rows[i].pop(a, 0)
            vb = self.rows[i].pop(b, 0)
            if vb:
                self.rows[i][a] = vb
            if va:
                self.rows[i][b] = va
        self.col_rows[a], self.col_rows[b] = (
            {i for i in touched if a in self.rows[i]},
            {i for i in touched if b in self.rows[i]},
        )

    def to_dict(self):
        out = {}
        for i, row in enumerate(self.rows):
            for j, val in row.items():
                out[(i, j)] = val
        return out


@dataclass
class SmithResult:
    """u * A * v == d for the input A, with u, v unimodular.

    ``d`` is the list of diagonal entries (length min(nrows, ncols)).
    The four transforms are sparse dicts; ``uinv``/``vinv`` are the exact
    inverses, tracked during elimination rather than inverted after.
    """

    nrows: int
    ncols: int
    d: list
    u: dict
    uinv: dict
    v: dict
    vinv: dict

    @property
    def rank(self):
        return sum(1 for x in self.d if x)


def _pivot_integer(mat, t):
    best = None
    for j in range(t, mat.ncols):
        for i in mat.col_rows[j]:
            if i < t:
                continue
            val = abs(mat.rows[i][j])
            key = (val, i, j)
            if best is None or key < best:
                best = key
    return None if best is None else (best[1], best[2])


def _pivot_field(mat, t):
    best = None
    for j in range(t, mat.ncols):
        for i in mat.col_rows[j]:
            if i < t:
                continue
            key = (i, j)
            if best is None or key < best:
                best = key
    return best


def smith_normal_form_sparse(entries, nrows, ncols, p=None):
    """Diagonalize an integer (or GF(p)) matrix by unimodular transforms.

    Over the integers the pivot is the nonzero entry of minimal absolute
    value, ties broken by (row, col); the result satisfies the usual
    divisibility chain d1 | d2 | ... with nonnegative entries and zeros
    last.  Over GF(p) the diagonal is normalized to ones.  Deterministic
    for a fixed input.
    """
    if p is not None:
        entries = {pos: val % p for pos, val in entries.items() if val % p}
    mat = _SparseRows(nrows, ncols, entries)
    u = _SparseRows(nrows, nrows, {(i, i): 1 for i in range(nrows)})
    uinv = _SparseRows(nrows, nrows, {(i, i): 1 for i in range(nrows)})
    v = _SparseRows(ncols, ncols, {(i, i): 1 for i in range(ncols)})
    vinv = _SparseRows(ncols, ncols, {(i, i): 1 for i in range(ncols)})

    def row_op(target, source, coeff):
        # A += coeff on rows; u gets the same row op, uinv the inverse col op
        mat.add_multiple_of_row(target, source, coeff, p)
        u.add_multiple_of_row(target, source, coeff, p)
        uinv.add_multiple_of_col(source, target, -coeff if p is None else (-coeff) % p, p)

    def col_op(target, source, coeff):
        mat.add_multiple_of_col(target, source, coeff, p)
        v.add_multiple_of_col(target, source, coeff, p)
        vinv.add_multiple_of_row(source, target, -coeff if p is None else (-coeff) % p, p)

    def row_swap(a, b):
        mat.swap_rows(a, b)
        u.swap_rows(a, b)
        uinv.swap_cols(a, b)

    def col_swap(a, b):
        mat.swap_cols(a, b)
        v.swap_cols(a, b)
        vinv.swap_rows(a, b)

    def row_scale(i, c, cinv):
        # A <- S A with S = diag(.., c, ..); uinv picks up S^-1 on column i
        mat.scale_row(i, c, p)
        u.scale_row(i, c, p)
        for r in list(uinv.col_rows[i]):
            val = uinv.rows[r][i] * cinv
            uinv.set(r, i, val % p if p else val)

    t = 0
    limit = min(nrows, ncols)
    while t < limit:
        pos = _pivot_field(mat, t) if p is not None else _pivot_integer(mat, t)
        if pos is None:
            break
        row_swap(t, pos[0])
        col_swap(t, pos[1])
        if p is not None:
            inv = pow(mat.get(t, t), p - 2, p)
            row_scale(t, inv, mat.get(t, t))
            for i in sorted(mat.col_rows[t]):
                if i != t:
                    row_op(i, t, (-mat.get(i, t)) % p)
            for j in sorted(mat.rows[t]):
                if j != t:
                    col_op(j, t, (-mat.get(t, j)) % p)
            t += 1
            continue
        # Integer mode: clear the pivot row and column, restarting whenever a
        # division leaves a remainder (the remainder becomes a smaller pivot).
        while True:
            if mat.get(t, t) < 0:
                row_scale(t, -1, -1)
            pivot = mat.get(t, t)
            dirty = False
            for i in sorted(mat.col_rows[t]):
                if i == t:
                    continue
                q = mat.get(i, t) // pivot
                row_op(i, t, -q)
                if mat.get(i, t):
                    row_swap(t, i)
                    dirty = True
                    break
            if dirty:
                continue
            for j in sorted(mat.rows[t]):
                if j == t:
                    continue
                q = mat.get(t, j) // pivot
                col_op(j, t, -q)
                if mat.get(t, j):
                    col_swap(t, j)
                    dirty = True
                    break
            if dirty:
                continue
            # Pivot must divide the remaining submatrix for the chain.
            offender = None
            for i in range(t + 1, nrows):
                for j, val in sorted(mat.rows[i].items()):
                    if j > t and val % pivot:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, 1)
        t += 1

    d = [mat.get(i, i) for i in range(limit)]
    return SmithResult(nrows, ncols, d, mat_and_transforms_to_dict(u),
                       mat_and_transforms_to_dict(uinv),
                       mat_and_transforms_to_dict(v),
                       mat_and_transforms_to_dict(vinv))


def mat_and_transforms_to_dict(sparse_rows):
    return sparse_rows.to_dict()


def matmul_sparse(a, b, a_shape, b_shape, p=None):
    """Multiply two dict-sparse matrices; shapes are (rows, cols)."""
    if a_shape[1] != b_shape[0]:
        raise ValueError("shape mismatch")
    b_rows = {}
    for (i, j), val in b.items():
        b_rows.setdefault(i, {})[j] = val
    out = {}
    a_rows = {}
    for (i, j), val in a.items():
        a_rows.setdefault(i, {})[j] = val
    for i, row in a_rows.items():
        acc = {}
        for k, aval in row.items():
            brow = b_rows.get(k)
            if not brow:
                continue
            for j, bval in brow.items():
                acc[j] = acc.get(j, 0) + aval * bval
        for j, val in acc.items():
            if p is not None:
                val %= p
            if val:
                out[(i, j)] = val
    return out


def matvec_sparse(a, vec, nrows, p=None):
    """Apply a dict-sparse matrix to a dict vector {index: value}."""
    out = {}
    cols = {}
    for (i, j), val in a.items():
        cols.setdefault(j, []).append((i, val))
    for j, x in vec.items():
        if not x:
            continue
        for i, val in cols.get(j, ()):
            out[i] = out.get(i, 0) + val * x
    if p is not None:
        out = {i: v % p for i, v in out.items() if v % p}
    else:
        out = {i: v for i, v in out.items() if v}
    return out


def solve_via_smith(smith, b, p=None):
    """Solve A x = b given the Smith data of A; returns a dict or None.

    ``b`` is a dict vector on row indices.  Returns one particular
    solution; the full set is x + ker(A).
    """
    y = matvec_sparse(smith.u, b, smith.nrows, p)
    x_prime = {}
    for i, val in y.items():
        if i < len(smith.d) and smith.d[i]:
            di = smith.d[i]
            if p is not None:
                x_prime[i] = (val * pow(di, p - 2, p)) % p
            else:
                if val % di:
                    return None
                x_prime[i] = val // di
        elif val:
            return None
    return matvec_sparse(smith.v, x_prime, smith.ncols, p)


def kernel_basis_via_smith(smith, p=None):
    """Columns of v past the rank span ker(A); returned as dict vectors."""
    r = smith.rank
    v_cols = {}
    for (i, j), val in smith.v.items():
        v_cols.setdefault(j, {})[i] = val
    return [v_cols.get(j, {}) for j in range(r, smith.ncols)]


def hnf_columns(vectors, nrows):
    """Canonical (column-style Hermite) basis of the lattice the given
    independent columns span.

    Unimodular column operations only: pivots appear in increasing row
    order, each pivot is positive, and entries of earlier columns in a
    pivot row are reduced into [0, pivot).  Unique for a given lattice,
    which makes downstream generator matrices reproducible.
    """
    cols = [dict(v) for v in vectors]
    k = len(cols)
    placed = 0
    for r in range(nrows):
        active = [j for j in range(placed, k) if cols[j].get(r, 0)]
        if not active:
            continue
        # Combine the active columns until only one hits row r.
        jmain = active[0]
        for j in active[1:]:
            a = cols[jmain].get(r, 0)
            b = cols[j].get(r, 0)
            x, y, g = xgcd(a, b)
            ca, cb = dict(cols[jmain]), dict(cols[j])
            new_main, new_other = {}, {}
            for idx in set(ca) | set(cb):
                va, vb = ca.get(idx, 0), cb.get(idx, 0)
                m = x * va + y * vb
                o = (-b // g) * va + (a // g) * vb
                if m:
                    new_main[idx] = m
                if o:
                    new_other[idx] = o
            cols[jmain], cols[j] = new_main, new_other
        cols[placed], cols[jmain] = cols[jmain], cols[placed]
        if cols[placed].get(r, 0) < 0:
            cols[placed] = {i: -v for i, v in cols[placed].items()}
        piv = cols[placed][r]
        for j in range(placed):
            q = cols[j].get(r, 0) // piv
            if q:
                for idx, val in cols[placed].items():
                    new = cols[j].get(idx, 0) - q * val
                    if new:
                        cols[j][idx] = new
                    else:
                        cols[j].pop(idx, None)
        placed += 1
    return cols


def field_reduce_columns(vectors, nrows, p):
    """Reduced column echelon form over GF(p): canonical pivot-1 basis."""
    cols = [{i: v % p for i, v in vec.items() if v % p} for vec in vectors]
    placed = 0
    for r in range(nrows):
        pivot_col = None
        for j in range(placed, len(cols)):
            if cols[j].get(r, 0):
                pivot_col = j
                break
        if pivot_col is None:
            continue
        cols[placed], cols[pivot_col] = cols[pivot_col], cols[placed]
        inv = pow(cols[placed][r], p - 2, p)
        cols[placed] = {i: (v * inv) % p for i, v in cols[placed].items() if (v * inv) % p}
        for j in range(len(cols)):
            if j == placed:
                continue
            c = cols[j].get(r, 0)
            if c:
                merged = dict(cols[j])
                for idx, val in cols[placed].items():
                    nv = (merged.get(idx, 0) - c * val) % p
                    if nv:
                        merged[idx] = nv
                    else:
                        merged.pop(idx, None)
                cols[j] = merged
        placed += 1
    return [c for c in cols if c]
