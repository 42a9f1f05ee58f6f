"""Finite abstract simplicial complexes, integer boundary matrices, Smith
normal form, and direct simplicial homology with a tracked cycle basis.

The homology computed here is the reference the rest of the pipeline is
checked against, so it stays deliberately direct: boundary matrices,
Smith normal form, done.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exact


class SolveFailure(Exception):
    """A cycle could not be expressed in a tracked homology basis."""


@dataclass(frozen=True)
class Ring:
    """Coefficient ring tag: integers, rationals, or a prime field."""

    kind: str  # "Z", "Q", or "Zp"
    p: int | None = None

    @classmethod
    def parse(cls, text):
        t = text.strip().lower()
        if t == "z":
            return cls("Z")
        if t == "q":
            return cls("Q")
        if t.startswith("zp:"):
            p = int(t[3:])
            if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
                raise ValueError(f"not a prime: {p}")
            return cls("Zp", p)
        raise ValueError(f"unknown coefficient ring {text!r} (use z, q, or zp:<p>)")

    @property
    def is_field(self):
        return self.kind != "Z"

    def __str__(self):
        return f"Z/{self.p}" if self.kind == "Zp" else self.kind


RING_Z = Ring("Z")
RING_Q = Ring("Q")


@dataclass(frozen=True)
class Violation:
    kind: str
    simplex: tuple
    detail: tuple | None = None

    def __str__(self):
        if self.kind == "missing-face":
            return f"simplex {list(self.simplex)}: face {list(self.detail)} missing"
        if self.kind == "not-sorted":
            return f"simplex {list(self.simplex)} is not strictly increasing"
        if self.kind == "duplicate":
            return f"simplex {list(self.simplex)} listed more than once"
        return f"{self.kind}: {list(self.simplex)}"


class SimplicialComplex:
    """A finite abstract simplicial complex.

    Simplices are tuples of vertex identifiers; identifiers carry a single
    global total order and every tuple must be strictly increasing in it.
    The constructor sorts each tuple and stores simplices per dimension in
    lexicographic order; it does not close under faces (see
    :func:`validate_complex` and :meth:`closure`).
    """

    def __init__(self, simplices=()):
        by_dim = {}
        for s in simplices:
            t = tuple(sorted(s))
            if len(set(t)) != len(t):
                raise ValueError(f"repeated vertex in simplex {s}")
            by_dim.setdefault(len(t) - 1, set()).add(t)
        self._by_dim = {q: sorted(ss) for q, ss in sorted(by_dim.items())}
        self._index = {
            q: {s: i for i, s in enumerate(ss)} for q, ss in self._by_dim.items()
        }

    @classmethod
    def closure(cls, generators):
        """The smallest complex containing the given simplices."""
        seen = set()
        for s in generators:
            t = tuple(sorted(s))
            for mask in range(1, 1 << len(t)):
                face = tuple(v for k, v in enumerate(t) if mask >> k & 1)
                seen.add(face)
        return cls(seen)

    @property
    def dim(self):
        return max(self._by_dim) if self._by_dim else -1

    @property
    def vertices(self):
        return [s[0] for s in self._by_dim.get(0, [])]

    def simplices(self, q):
        return self._by_dim.get(q, [])

    def all_simplices(self):
        for q in sorted(self._by_dim):
            yield from self._by_dim[q]

    def index_of(self, simplex):
        s = tuple(sorted(simplex))
        return self._index[len(s) - 1][s]

    def has_simplex(self, simplex):
        s = tuple(sorted(simplex))
        return s in self._index.get(len(s) - 1, {})

    def counts(self):
        return {q: len(ss) for q, ss in self._by_dim.items()}

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self._by_dim == other._by_dim

    def __repr__(self):
        c = self.counts()
        return f"SimplicialComplex({c})" if c else "SimplicialComplex(empty)"


def validate_complex(c):
    """Return None if the complex invariants hold, else the first Violation.

    Checked: tuples strictly increasing in the vertex order, no duplicates
    within a dimension (both enforced structurally by the constructor),
    and closure under faces, reported with the first missing face.
    """
    for q in sorted(c._by_dim):
        if q == 0:
            continue
        for s in c.simplices(q):
            for k in range(len(s)):
                face = s[:k] + s[k + 1:]
                if not c.has_simplex(face):
                    return Violation("missing-face", s, face)
    return None


class IntegerMatrix:
    """Sparse exact integer matrix; absent positions are zero."""

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), val in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ValueError(f"entry {(i, j)} outside {rows}x{cols}")
                if val:
                    self.entries[(i, j)] = int(val)

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, r in enumerate(data)
                                for j, v in enumerate(r) if v})

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def get(self, i, j):
        return self.entries.get((i, j), 0)

    def to_rows(self):
        return [[self.get(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def column(self, j):
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def transpose(self):
        return IntegerMatrix(self.cols, self.rows,
                             {(j, i): v for (i, j), v in self.entries.items()})

    def mul(self, other):
        prod = exact.matmul_sparse(self.entries, other.entries,
                                   (self.rows, self.cols), (other.rows, other.cols))
        return IntegerMatrix(self.rows, other.cols, prod)

    def apply(self, vec):
        return exact.matvec_sparse(self.entries, vec, self.rows)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, IntegerMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"IntegerMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


@dataclass
class SmithDecomposition:
    """u * a * v == d with u, v unimodular and d diagonal.

    Diagonal entries are nonnegative, satisfy the divisibility chain
    d1 | d2 | ..., and zeros come last.  ``uinv``/``vinv`` are exact
    inverses tracked during elimination; they are what make change of
    basis and solving cheap downstream.
    """

    d: IntegerMatrix
    u: IntegerMatrix
    v: IntegerMatrix
    uinv: IntegerMatrix
    vinv: IntegerMatrix
    shape: tuple

    def diagonal(self):
        n = min(self.shape)
        return [self.d.get(i, i) for i in range(n)]

    @property
    def rank(self):
        return sum(1 for x in self.diagonal() if x)


def smith_normal_form(a):
    """Smith normal form of an IntegerMatrix.

    Pivoting picks the entry of minimal absolute value, ties broken by
    (row, col), so the output is deterministic for a fixed input.
    """
    res = exact.smith_normal_form_sparse(a.entries, a.rows, a.cols)
    n = min(a.rows, a.cols)
    return SmithDecomposition(
        d=IntegerMatrix(a.rows, a.cols, {(i, i): x for i, x in enumerate(res.d) if x}),
        u=IntegerMatrix(a.rows, a.rows, res.u),
        v=IntegerMatrix(a.cols, a.cols, res.v),
        uinv=IntegerMatrix(a.rows, a.rows, res.uinv),
        vinv=IntegerMatrix(a.cols, a.cols, res.vinv),
        shape=(a.rows, a.cols),
    )


def boundary_matrix(c, q):
    """Boundary map from q-chains to (q-1)-chains of the complex.

    Columns run over the q-simplices and rows over the (q-1)-simplices,
    both in lexicographic order; the face omitting position i of the
    sorted tuple carries sign (-1)^i.  q = 0 is rejected: callers use the
    convention that the boundary of a vertex is zero.
    """
    if q < 1:
        raise ValueError("boundary_matrix needs q >= 1; the degree-0 boundary is zero")
    rows = c.simplices(q - 1)
    cols = c.simplices(q)
    row_index = {s: i for i, s in enumerate(rows)}
    entries = {}
    for j, s in enumerate(cols):
        for k in range(len(s)):
            face = s[:k] + s[k + 1:]
            entries[(row_index[face], j)] = -1 if k % 2 else 1
    return IntegerMatrix(len(rows), len(cols), entries)


@dataclass(frozen=True)
class BasisCycle:
    """A tracked generator: a cycle vector plus its order (0 means free)."""

    vector: dict
    order: int


@dataclass
class HomologyPresentation:
    ring: Ring
    q: int
    free_rank: int
    torsion: tuple
    basis: tuple
    _expressor: object = field(default=None, repr=False, compare=False)

    @property
    def generator_count(self):
        return len(self.torsion) + self.free_rank

    def express(self, chain_vec):
        """Coordinates of a cycle's class in the tracked basis.

        Torsion coordinates come reduced modulo their order.  Raises
        SolveFailure when the vector is not a cycle or cannot be reduced
        into the tracked decomposition (an internal invariant breach).
        """
        return self._expressor(chain_vec)

    def describe(self):
        return group_name(self.free_rank, self.torsion)


def group_name(rank, torsion):
    parts = []
    if rank == 1:
        parts.append("Z")
    elif rank > 1:
        parts.append(f"Z^{rank}")
    parts.extend(f"Z/{t}" for t in torsion)
    return "+".join(parts) if parts else "0"


def _h0_presentation(c, ring, p):
    verts = c.simplices(0)
    n = len(verts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (a, b) in c.simplices(1):
        ia, ib = c.index_of((a,)), c.index_of((b,))
        ra, rb = find(ia), find(ib)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    comp_of = [find(i) for i in range(n)]
    reps = sorted(set(comp_of))
    comp_index = {r: k for k, r in enumerate(reps)}

    def expressor(vec):
        coords = [0] * len(reps)
        for i, val in vec.items():
            coords[comp_index[comp_of[i]]] += val
        if p is not None:
            coords = [x % p for x in coords]
        return coords

    basis = tuple(BasisCycle({r: 1}, 0) for r in reps)
    return HomologyPresentation(ring, 0, len(reps), (), basis, expressor)


def _invert_unimodular(cols, k, p):
    # cols: list of dict columns forming a k x k unimodular (or GF(p)
    # invertible) matrix; returns the inverse in the same format.
    entries = {(i, j): v for j, col in enumerate(cols) for i, v in col.items()}
    res = exact.smith_normal_form_sparse(entries, k, k, p)
    if any(x != 1 for x in res.d):
        raise SolveFailure("basis transform is not invertible")
    # u T v = I  =>  T^-1 = v u
    inv = exact.matmul_sparse(res.v, res.u, (k, k), (k, k), p)
    out = [dict() for _ in range(k)]
    for (i, j), v in inv.items():
        out[j][i] = v
    return out


def homology(c, q, ring=RING_Z):
    """Homology of the complex in degree q with a tracked cycle basis.

    free_rank is rank ker d_q minus rank im d_{q+1} over the chosen ring;
    over the integers the torsion list is read off the Smith normal form
    of d_{q+1} expressed in kernel coordinates.  The basis is canonical
    for a fixed input: degree 0 uses one component representative per
    class, free parts are Hermite-reduced, torsion generators keep the
    divisibility order, and every generator's leading coefficient is
    positive.
    """
    if q < 0:
        raise ValueError("negative degree")
    p = ring.p if ring.kind == "Zp" else None
    if q == 0:
        return _h0_presentation(c, ring, p)
    n_q = len(c.simplices(q))
    if n_q == 0:
        return HomologyPresentation(ring, q, 0, (), (), lambda vec: [])

    dq = boundary_matrix(c, q)
    snf_dq = exact.smith_normal_form_sparse(dq.entries, dq.rows, dq.cols, p)
    r = snf_dq.rank
    kernel = exact.kernel_basis_via_smith(snf_dq, p)
    k = len(kernel)

    def kernel_coords(vec):
        full = exact.matvec_sparse(snf_dq.vinv, vec, n_q, p)
        if any(i < r for i in full):
            raise SolveFailure("vector is not a cycle")
        return {i - r: v for i, v in full.items()}

    n_up = len(c.simplices(q + 1))
    y_entries = {}
    if n_up:
        dq1 = boundary_matrix(c, q + 1)
        for j in range(n_up):
            col = kernel_coords(dq1.column(j))
            for i, v in col.items():
                y_entries[(i, j)] = v
    snf_y = exact.smith_normal_form_sparse(y_entries, k, max(n_up, 0), p)
    dprime = list(snf_y.d) + [0] * (k - len(snf_y.d))

    uinv_cols = [dict() for _ in range(k)]
    for (i, j), v in snf_y.uinv.items():
        uinv_cols[j][i] = v
    # Generators in chain coordinates: kernel basis times uinv.
    gen_chain = []
    for j in range(k):
        acc = {}
        for i, coeff in uinv_cols[j].items():
            for idx, val in kernel[i].items():
                acc[idx] = acc.get(idx, 0) + coeff * val
        if p is not None:
            acc = {idx: v % p for idx, v in acc.items() if v % p}
        else:
            acc = {idx: v for idx, v in acc.items() if v}
        gen_chain.append(acc)

    torsion_pos = [j for j in range(k) if p is None and dprime[j] > 1]
    free_pos = [j for j in range(k) if dprime[j] == 0]

    # Canonicalize the free block; track the inverse transform so that
    # expressing a cycle stays a solve in the new coordinates.
    if free_pos:
        free_cols = [gen_chain[j] for j in free_pos]
        if p is None:
            canon = exact.hnf_columns(free_cols, n_q)
        else:
            canon = exact.field_reduce_columns(free_cols, n_q, p)
        # T solves old_free * T = canon, coordinates transform by T^-1.
        old_entries = {(i, jj): v for jj, col in enumerate(free_cols)
                       for i, v in col.items()}
        snf_old = exact.smith_normal_form_sparse(old_entries, n_q, len(free_pos), p)
        t_cols = []
        for col in canon:
            sol = exact.solve_via_smith(snf_old, col, p)
            if sol is None:
                raise SolveFailure("free basis renormalization failed")
            t_cols.append(sol)
        t_inv = _invert_unimodular(t_cols, len(free_pos), p)
        free_chain = canon
    else:
        t_inv = []
        free_chain = []

    tors_chain = []
    tors_sign = []
    for j in torsion_pos:
        vec = gen_chain[j]
        lead = min(vec)
        if vec[lead] < 0:
            vec = {i: -v for i, v in vec.items()}
            tors_sign.append(-1)
        else:
            tors_sign.append(1)
        tors_chain.append(vec)

    torsion = tuple(dprime[j] for j in torsion_pos)
    basis = tuple(
        [BasisCycle(vec, t) for vec, t in zip(tors_chain, torsion)]
        + [BasisCycle(vec, 0) for vec in free_chain]
    )

    n_tors = len(torsion_pos)
    n_free = len(free_pos)

    def expressor(vec):
        kc = kernel_coords(vec)
        tilde = exact.matvec_sparse(snf_y.u, kc, k, p)
        coords_t = []
        for pos, j in enumerate(torsion_pos):
            val = tilde.get(j, 0) * tors_sign[pos]
            coords_t.append(val % torsion[pos])
        raw_free = [tilde.get(j, 0) for j in free_pos]
        # coords_f = T^-1 @ raw_free  (t_inv stored column-wise)
        coords_f = [0] * n_free
        for b in range(n_free):
            x = raw_free[b]
            if not x:
                continue
            for i, coeff in t_inv[b].items():
                coords_f[i] += coeff * x
        if p is not None:
            coords_f = [x % p for x in coords_f]
        return coords_t + coords_f

    free_rank = n_free
    return HomologyPresentation(ring, q, free_rank,
                                torsion if ring.kind == "Z" else (),
                                basis, expressor)


def homology_over(c, q, ring):
    """Ring dispatch: Q rides on the integer computation's free part."""
    if ring.kind == "Q":
        pres = homology(c, q, RING_Z)
        free = tuple(b for b in pres.basis if b.order == 0)
        n_tors = len(pres.torsion)

        def expressor(vec, _inner=pres):
            return _inner.express(vec)[n_tors:]

        return HomologyPresentation(RING_Q, q, pres.free_rank, (), free, expressor)
    return homology(c, q, ring)
