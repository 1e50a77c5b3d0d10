"""Matrices over truncated series rings, plus exact solving over the field.

Three layers:

* solve_linear -- Gauss-Jordan over the coefficient field k with the fixed
  deterministic pivot order (leftmost column, then lowest row index);
  returns a particular solution and a kernel basis.
* Matrix -- rectangular matrices with uniform Series or Laurent entries;
  inversion over k[[s]] requires a unit determinant (residue-invertible)
  and is exact at precision.
* smith -- Smith normal form over the truncated DVR k[[s]]: M = U*D*W with
  U, W unimodular, D diagonal with entries of increasing valuation.  The
  divisor valuations feed the is_induced diagnostic; the U factor is the
  deterministic unimodular completion used by the invariants functor.
"""

from dataclasses import dataclass

from .errors import DomainError, NotInvertibleError, StructuralError
from .series import Laurent, Series


@dataclass
class LinearSolution:
    consistent: bool
    particular: list          # None iff not consistent
    kernel: list              # list of basis vectors
    rank: int
    pivot_cols: list


def solve_linear(field, rows, rhs=None):
    """Solve M x = rhs over the field; rhs defaults to zero.

    Returns a LinearSolution with one particular solution plus a kernel
    basis, via exact elimination with deterministic pivots.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    if rhs is None:
        rhs = [0] * m
    if len(rhs) != m:
        raise StructuralError("rhs length mismatch")
    ctx = field.ctx
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivot_cols = []
    r = 0
    for col in range(n):
        sel = None
        for i in range(r, m):
            if aug[i][col]:
                sel = i
                break
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        inv_p = ctx.inv(aug[r][col])
        aug[r] = [ctx.mul(inv_p, v) for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [ctx.sub(v, ctx.mul(f, w)) for v, w in zip(aug[i], aug[r])]
        pivot_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n]:
            return LinearSolution(False, None, [], r, pivot_cols)
    particular = [0] * n
    for row_i, col in enumerate(pivot_cols):
        particular[col] = aug[row_i][n]
    free_cols = [c for c in range(n) if c not in pivot_cols]
    kernel = []
    for f in free_cols:
        vec = [0] * n
        vec[f] = 1
        for row_i, col in enumerate(pivot_cols):
            vec[col] = ctx.neg(aug[row_i][f])
        kernel.append(vec)
    return LinearSolution(True, particular, kernel, r, pivot_cols)


def residue_det(field, rows):
    """Determinant of a square matrix over k, by elimination."""
    ctx = field.ctx
    n = len(rows)
    a = [list(r) for r in rows]
    det = 1
    for col in range(n):
        sel = None
        for i in range(col, n):
            if a[i][col]:
                sel = i
                break
        if sel is None:
            return 0
        if sel != col:
            a[col], a[sel] = a[sel], a[col]
            det = ctx.neg(det)
        det = ctx.mul(det, a[col][col])
        inv_p = ctx.inv(a[col][col])
        for i in range(col + 1, n):
            if a[i][col]:
                f = ctx.mul(a[i][col], inv_p)
                a[i] = [ctx.sub(v, ctx.mul(f, w)) for v, w in zip(a[i], a[col])]
    return det


class Matrix:
    """Rectangular matrix with uniform Series or Laurent entries."""

    def __init__(self, entries):
        rows = [tuple(r) for r in entries]
        if not rows or not rows[0]:
            raise StructuralError("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise StructuralError("ragged matrix")
        first = rows[0][0]
        self.kind = Laurent if isinstance(first, Laurent) else Series
        for r in rows:
            for e in r:
                if not isinstance(e, self.kind):
                    raise StructuralError("mixed entry kinds")
                if e.field != first.field:
                    raise StructuralError("mixed fields in matrix")
        self.entries = tuple(rows)
        self.rows = len(rows)
        self.cols = ncols
        self.field = first.field

    # -- constructors --

    @classmethod
    def identity(cls, field, n, prec):
        return cls([[Series.monomial(field, 1 if i == j else 0, 0, prec)
                     for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, field, rows, cols, prec):
        z = Series.zero(field, prec)
        return cls([[z] * cols for _ in range(rows)])

    @classmethod
    def from_residue(cls, field, rows, prec):
        return cls([[Series.constant(field, c, prec) for c in r] for r in rows])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def map(self, fn):
        return Matrix([[fn(e) for e in row] for row in self.entries])

    def __add__(self, other):
        self._shape_check(other)
        return Matrix([[a + b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._shape_check(other)
        return Matrix([[a - b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.map(lambda e: -e)

    def _shape_check(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise StructuralError("shape mismatch")

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise StructuralError("inner dimension mismatch")
            a, b = self, other
            if a.kind is Laurent and b.kind is Series:
                b = b.to_laurent()
            elif a.kind is Series and b.kind is Laurent:
                a = a.to_laurent()
            out = []
            for i in range(a.rows):
                row = []
                for j in range(b.cols):
                    acc = None
                    for t in range(a.cols):
                        term = a.entries[i][t] * b.entries[t][j]
                        acc = term if acc is None else acc + term
                    row.append(acc)
                out.append(row)
            return Matrix(out)
        raise StructuralError("can only multiply by Matrix")

    def scale(self, c):
        return self.map(lambda e: e.scale(c))

    def transpose(self):
        return Matrix([[self.entries[i][j] for i in range(self.rows)]
                       for j in range(self.cols)])

    def substitute(self, act: Series):
        """Apply the ring map s -> act(s) to every entry."""
        if self.kind is Series:
            return self.map(lambda e: e.compose(act))
        return self.map(lambda e: e.substitute(act))

    def to_laurent(self):
        if self.kind is Laurent:
            return self
        return self.map(Laurent.from_series)

    def to_series(self, prec):
        if self.kind is Series:
            return self.map(lambda e: e.truncate(prec))
        return self.map(lambda e: e.to_series(prec))

    def residue(self):
        """Constant-term matrix over k (Laurent entries must have no pole on window)."""
        if self.kind is Series:
            return [[e.coeffs[0] for e in row] for row in self.entries]
        out = []
        for row in self.entries:
            r = []
            for e in row:
                for k in range(e.val_floor, 0):
                    if e.coeff(k):
                        raise DomainError("residue of a Laurent value with a pole")
                r.append(e.coeff(0))
            out.append(r)
        return out

    def is_residue_invertible(self):
        if self.rows != self.cols:
            return False
        return residue_det(self.field, self.residue()) != 0

    def inverse(self):
        """Inverse over k[[s]] (Series entries, unit determinant) by Gauss-Jordan."""
        if self.kind is Laurent:
            return laurent_inverse(self)
        if self.rows != self.cols:
            raise StructuralError("inverse of a non-square matrix")
        n = self.rows
        prec = self.entries[0][0].prec
        a = [list(row) for row in self.entries]
        inv_rows = [list(Matrix.identity(self.field, n, prec).entries[i]) for i in range(n)]
        for col in range(n):
            sel = None
            for i in range(col, n):
                if a[i][col].coeffs[0] != 0:
                    sel = i
                    break
            if sel is None:
                raise NotInvertibleError(
                    "matrix is not invertible over the series ring (non-unit determinant)",
                    valuation=None)
            a[col], a[sel] = a[sel], a[col]
            inv_rows[col], inv_rows[sel] = inv_rows[sel], inv_rows[col]
            piv_inv = a[col][col].inverse()
            a[col] = [e * piv_inv for e in a[col]]
            inv_rows[col] = [e * piv_inv for e in inv_rows[col]]
            for i in range(n):
                if i != col and not a[i][col].is_zero():
                    f = a[i][col]
                    a[i] = [e - f * g for e, g in zip(a[i], a[col])]
                    inv_rows[i] = [e - f * g for e, g in zip(inv_rows[i], inv_rows[col])]
        return Matrix(inv_rows)

    def first_mismatch(self, other):
        """(i, j, exponent) of the lowest-index difference, or None if equal.

        Series matrices compare exactly; Laurent matrices compare on common
        validity windows.
        """
        if self.rows != other.rows or self.cols != other.cols:
            raise StructuralError("shape mismatch in comparison")
        a, b = self, other
        if a.kind is not b.kind:
            a, b = a.to_laurent(), b.to_laurent()
        for i in range(a.rows):
            for j in range(a.cols):
                x, y = a.entries[i][j], b.entries[i][j]
                if a.kind is Series:
                    if x.coeffs != y.coeffs:
                        for k, (c1, c2) in enumerate(zip(x.coeffs, y.coeffs)):
                            if c1 != c2:
                                return (i, j, k)
                else:
                    k = x.first_mismatch(y)
                    if k is not None:
                        return (i, j, k)
        return None

    def agrees_with(self, other):
        return self.first_mismatch(other) is None

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over {self.field.describe()})"


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product, row-major index convention (i1, i2) -> i1*r2 + i2."""
    out = []
    for i1 in range(a.rows):
        for i2 in range(b.rows):
            row = []
            for j1 in range(a.cols):
                for j2 in range(b.cols):
                    row.append(a.entries[i1][j1] * b.entries[i2][j2])
            out.append(row)
    return Matrix(out)


@dataclass
class SmithForm:
    U: Matrix
    D: Matrix
    W: Matrix
    divisors: list        # valuations, None meaning >= trust
    trust: int            # valuations below this bound are exact


def smith(m: Matrix) -> SmithForm:
    """Smith normal form over truncated k[[s]]: m = U * D * W.

    Pivots are chosen by minimal valuation, then lowest row, then lowest
    column; U and W stay unimodular (their updates are elementary).  Every
    division by a pivot of valuation v > 0 costs v coefficients of trust,
    tracked conservatively in the result.
    """
    if m.kind is Laurent:
        raise StructuralError("smith expects Series entries; shift Laurent matrices first")
    field = m.field
    prec = m.entries[0][0].prec
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.entries]
    u = [list(r) for r in Matrix.identity(field, rows, prec).entries]
    w = [list(r) for r in Matrix.identity(field, cols, prec).entries]
    trust = prec
    divisors = []
    steps = min(rows, cols)

    def shift_down(e, v):
        return Series(field, prec, e.coeffs[v:] + (0,) * v)

    for t in range(steps):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j].valuation()
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            divisors.extend([None] * (steps - t))
            break
        v, bi, bj = best
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            for row in u:                       # U <- U * swap(t, bi)
                row[t], row[bi] = row[bi], row[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
            w[t], w[bj] = w[bj], w[t]           # W <- swap(t, bj) * W
        unit_inv = shift_down(a[t][t], v).inverse()
        for i in range(t + 1, rows):
            e = a[i][t]
            if e.valuation() is None:
                continue
            f = shift_down(e, v) * unit_inv     # e / pivot, exact: val(e) >= v
            a[i] = [x - f * y for x, y in zip(a[i], a[t])]
            for row in u:                       # U <- U * (I + f E_{it}): col t += f * col i
                row[t] = row[t] + f * row[i]
        for j in range(t + 1, cols):
            e = a[t][j]
            if e.valuation() is None:
                continue
            f = shift_down(e, v) * unit_inv
            for row in a:
                row[j] = row[j] - f * row[t]
            w[t] = [x + f * y for x, y in zip(w[t], w[j])]   # W <- (I + f E_{tj}) * W
        divisors.append(v)
        if v:
            trust -= v
    d = Matrix(a)
    return SmithForm(U=Matrix(u), D=d, W=Matrix(w), divisors=divisors, trust=max(trust, 0))


def laurent_inverse(m: Matrix) -> Matrix:
    """Inverse of an invertible Laurent matrix via Smith on its series part."""
    if m.kind is Series:
        m = m.to_laurent()
    if m.rows != m.cols:
        raise StructuralError("inverse of a non-square matrix")
    shift = min(e.val_floor for row in m.entries for e in row)
    p = min(e.val_floor + len(e.coeffs) for row in m.entries for e in row) - shift
    if p <= 0:
        raise StructuralError("no common validity window for inversion")
    ser = Matrix([[e.shift(-shift).to_series(p) for e in row] for row in m.entries])
    sf = smith(ser)
    if any(dv is None for dv in sf.divisors):
        raise NotInvertibleError("Laurent matrix is singular to stored precision",
                                 valuation=None)
    d_inv_entries = []
    for i in range(m.rows):
        row = []
        for j in range(m.rows):
            if i == j:
                row.append(Laurent.from_series(sf.D.entries[i][i]).inverse())
            else:
                row.append(Laurent.zero(m.field, p))
        d_inv_entries.append(row)
    d_inv = Matrix(d_inv_entries)
    out = sf.W.inverse().to_laurent() * d_inv * sf.U.inverse().to_laurent()
    return out.map(lambda e: e.shift(-shift))
