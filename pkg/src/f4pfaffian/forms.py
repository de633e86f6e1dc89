"""Matrices of rational functions and matrix-valued differential forms.

Only two-coordinate bases are supported: a :class:`MatrixOneForm` is
``A1 d<c1> + A2 d<c2>`` for an ordered coordinate pair ``(c1, c2)`` such as
``("x1", "x2")`` or ``("y1", "y2")``, and a :class:`MatrixTwoForm` is a
single coefficient matrix of ``d<c1> ^ d<c2>``.  The orientation is fixed by
the coordinate order; all signs below follow from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

from .algebra import Polynomial, RationalFunction, _coerce_rf

Entry = Union[RationalFunction, Polynomial, int, Fraction]


class SingularMatrixError(ArithmeticError):
    """Raised when inverting a matrix whose determinant vanishes."""

    def __init__(self, det: RationalFunction):
        super().__init__(f"singular matrix, det = {det}")
        self.det = det


class CoordinateMismatchError(ValueError):
    """Raised when combining forms written in different coordinate pairs."""


class FMatrix:
    """Dense matrix of rational functions."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[Entry]]):
        self.rows: tuple[tuple[RationalFunction, ...], ...] = tuple(
            tuple(_coerce_rf(e) for e in row) for row in rows
        )
        if self.rows:
            width = len(self.rows[0])
            if any(len(r) != width for r in self.rows):
                raise ValueError("ragged matrix")

    # -- construction ---------------------------------------------------

    @staticmethod
    def zero(n: int, m: int | None = None) -> "FMatrix":
        m = n if m is None else m
        z = RationalFunction.zero()
        return FMatrix([[z] * m for _ in range(n)])

    @staticmethod
    def identity(n: int) -> "FMatrix":
        z = RationalFunction.zero()
        o = RationalFunction.one()
        return FMatrix([[o if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def diagonal(entries: Sequence[Entry]) -> "FMatrix":
        z = RationalFunction.zero()
        es = [_coerce_rf(e) for e in entries]
        n = len(es)
        return FMatrix([[es[i] if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def row_vector(entries: Sequence[Entry]) -> "FMatrix":
        return FMatrix([list(entries)])

    @staticmethod
    def column_vector(entries: Sequence[Entry]) -> "FMatrix":
        return FMatrix([[e] for e in entries])

    # -- shape and access --------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij: tuple[int, int]) -> RationalFunction:
        i, j = ij
        return self.rows[i][j]

    def with_entry(self, i: int, j: int, value: Entry) -> "FMatrix":
        rows = [list(r) for r in self.rows]
        rows[i][j] = _coerce_rf(value)
        return FMatrix(rows)

    # -- algebra ---------------------------------------------------------

    def __add__(self, other: "FMatrix") -> "FMatrix":
        return FMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "FMatrix") -> "FMatrix":
        return FMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def __neg__(self) -> "FMatrix":
        return FMatrix([[-a for a in r] for r in self.rows])

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        cols = list(zip(*other.rows))
        out = []
        for row in self.rows:
            new_row = []
            for col in cols:
                acc = RationalFunction.zero()
                for a, b in zip(row, col):
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                new_row.append(acc)
            out.append(new_row)
        return FMatrix(out)

    def scaled(self, c: Entry) -> "FMatrix":
        c = _coerce_rf(c)
        return FMatrix([[a * c for a in r] for r in self.rows])

    def transpose(self) -> "FMatrix":
        return FMatrix(list(zip(*self.rows)))

    def map(self, fn: Callable[[RationalFunction], RationalFunction]) -> "FMatrix":
        return FMatrix([[fn(a) for a in r] for r in self.rows])

    def partial(self, v: str) -> "FMatrix":
        return self.map(lambda a: a.partial(v))

    def negate_lambda(self) -> "FMatrix":
        return self.map(lambda a: a.negate_lambda())

    def substitute(self, bindings: Mapping[str, RationalFunction]) -> "FMatrix":
        return self.map(lambda a: a.substitute(bindings))

    def trace(self) -> RationalFunction:
        acc = RationalFunction.zero()
        for i in range(self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def __eq__(self, other):
        if not isinstance(other, FMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def first_difference(self, other: "FMatrix") -> tuple[int, int] | None:
        """1-based index of the first entry where the matrices differ."""
        for i in range(self.nrows):
            for j in range(self.ncols):
                if self.rows[i][j] != other.rows[i][j]:
                    return (i + 1, j + 1)
        return None

    # -- elimination-based operations -------------------------------------

    def det(self) -> RationalFunction:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        m = [list(r) for r in self.rows]
        det = RationalFunction.one()
        for k in range(n):
            pivot = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
            if pivot is None:
                return RationalFunction.zero()
            if pivot != k:
                m[k], m[pivot] = m[pivot], m[k]
                det = -det
            det = det * m[k][k]
            inv = m[k][k].reciprocal()
            for i in range(k + 1, n):
                if m[i][k].is_zero():
                    continue
                factor = m[i][k] * inv
                for j in range(k, n):
                    m[i][j] = m[i][j] - factor * m[k][j]
        return det

    def inverse(self) -> "FMatrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        m = [list(r) + list(FMatrix.identity(n).rows[i]) for i, r in enumerate(self.rows)]
        det = RationalFunction.one()
        for k in range(n):
            pivot = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
            if pivot is None:
                raise SingularMatrixError(RationalFunction.zero())
            if pivot != k:
                m[k], m[pivot] = m[pivot], m[k]
                det = -det
            det = det * m[k][k]
            inv = m[k][k].reciprocal()
            m[k] = [e * inv for e in m[k]]
            for i in range(n):
                if i == k or m[i][k].is_zero():
                    continue
                factor = m[i][k]
                m[i] = [a - factor * b for a, b in zip(m[i], m[k])]
        return FMatrix([row[n:] for row in m])

    def left_nullspace(self) -> list[tuple[RationalFunction, ...]]:
        """Basis of row vectors v with v @ self = 0."""
        return self.transpose().right_nullspace()

    def right_nullspace(self) -> list[tuple[RationalFunction, ...]]:
        """Basis of vectors w (as tuples) with self @ w = 0, via RREF."""
        n, m = self.nrows, self.ncols
        rows = [list(r) for r in self.rows]
        pivots: list[int] = []
        r = 0
        for c in range(m):
            pivot = next((i for i in range(r, n) if not rows[i][c].is_zero()), None)
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            inv = rows[r][c].reciprocal()
            rows[r] = [e * inv for e in rows[r]]
            for i in range(n):
                if i != r and not rows[i][c].is_zero():
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == n:
                break
        basis = []
        free = [c for c in range(m) if c not in pivots]
        zero = RationalFunction.zero()
        one = RationalFunction.one()
        for c in free:
            vec = [zero] * m
            vec[c] = one
            for i, pc in enumerate(pivots):
                vec[pc] = -rows[i][c]
            basis.append(tuple(vec))
        return basis

    def charpoly(self) -> list[RationalFunction]:
        """Trace-recursion characteristic polynomial, monic, highest power first.

        Returns ``[1, c1, ..., cn]`` with ``det(tI - M) = t^n + c1 t^(n-1) + ... + cn``.
        """
        if self.nrows != self.ncols:
            raise ValueError("characteristic polynomial of a non-square matrix")
        n = self.nrows
        coeffs = [RationalFunction.one()]
        N = FMatrix.identity(n)
        for k in range(1, n + 1):
            M = self @ N
            ck = -M.trace() / k
            coeffs.append(ck)
            if k < n:
                N = M + FMatrix.identity(n).scaled(ck)
        return coeffs

    # -- serialization and display ------------------------------------

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.rows]

    @staticmethod
    def from_json(data) -> "FMatrix":
        return FMatrix(
            [[RationalFunction.from_json(e) for e in row] for row in data]
        )

    def latex(self) -> str:
        body = r" \\ ".join(
            " & ".join(e.latex() for e in row) for row in self.rows
        )
        return r"\begin{pmatrix} %s \end{pmatrix}" % body

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.rows) + "]"

    def __repr__(self) -> str:
        return f"FMatrix({self})"


Coords = tuple[str, str]


@dataclass(frozen=True)
class MatrixOneForm:
    """Matrix-valued 1-form  d1*d<coords[0]> + d2*d<coords[1]>."""

    coords: Coords
    d1: FMatrix
    d2: FMatrix

    def __post_init__(self):
        if (self.d1.nrows, self.d1.ncols) != (self.d2.nrows, self.d2.ncols):
            raise ValueError("coefficient matrices differ in shape")

    def parts(self) -> tuple[FMatrix, FMatrix]:
        return (self.d1, self.d2)

    def __add__(self, other: "MatrixOneForm") -> "MatrixOneForm":
        _same_coords(self, other)
        return MatrixOneForm(self.coords, self.d1 + other.d1, self.d2 + other.d2)

    def __sub__(self, other: "MatrixOneForm") -> "MatrixOneForm":
        _same_coords(self, other)
        return MatrixOneForm(self.coords, self.d1 - other.d1, self.d2 - other.d2)

    def __neg__(self) -> "MatrixOneForm":
        return MatrixOneForm(self.coords, -self.d1, -self.d2)

    def scaled(self, c: Entry) -> "MatrixOneForm":
        return MatrixOneForm(self.coords, self.d1.scaled(c), self.d2.scaled(c))

    def is_zero(self) -> bool:
        return self.d1.is_zero() and self.d2.is_zero()

    def to_json(self) -> dict:
        return {
            "coords": list(self.coords),
            "d1": self.d1.to_json(),
            "d2": self.d2.to_json(),
        }

    @staticmethod
    def from_json(data) -> "MatrixOneForm":
        return MatrixOneForm(
            tuple(data["coords"]),
            FMatrix.from_json(data["d1"]),
            FMatrix.from_json(data["d2"]),
        )


@dataclass(frozen=True)
class MatrixTwoForm:
    """Matrix-valued 2-form  part * d<coords[0]> ^ d<coords[1]>."""

    coords: Coords
    part: FMatrix

    def is_zero(self) -> bool:
        return self.part.is_zero()

    def __sub__(self, other: "MatrixTwoForm") -> "MatrixTwoForm":
        _same_coords(self, other)
        return MatrixTwoForm(self.coords, self.part - other.part)


def _same_coords(a, b) -> None:
    if a.coords != b.coords:
        raise CoordinateMismatchError(f"coordinates {a.coords} vs {b.coords}")


def mat_inverse(m: FMatrix) -> FMatrix:
    """Exact inverse; raises :class:`SingularMatrixError` carrying det(M)."""
    det = m.det()
    if det.is_zero():
        raise SingularMatrixError(det)
    return m.inverse()


def exterior_derivative(xi: MatrixOneForm) -> MatrixTwoForm:
    """d(A1 dc1 + A2 dc2) = (-dA1/dc2 + dA2/dc1) dc1^dc2, entrywise."""
    c1, c2 = xi.coords
    return MatrixTwoForm(xi.coords, -xi.d1.partial(c2) + xi.d2.partial(c1))


def wedge(xi: MatrixOneForm, eta: MatrixOneForm) -> MatrixTwoForm:
    _same_coords(xi, eta)
    return MatrixTwoForm(xi.coords, xi.d1 @ eta.d2 - xi.d2 @ eta.d1)


def gauge_transform(g: FMatrix, xi: MatrixOneForm) -> MatrixOneForm:
    """Frame change: G xi G^-1 + (dG) G^-1."""
    ginv = mat_inverse(g)
    c1, c2 = xi.coords
    d1 = g @ xi.d1 @ ginv + g.partial(c1) @ ginv
    d2 = g @ xi.d2 @ ginv + g.partial(c2) @ ginv
    return MatrixOneForm(xi.coords, d1, d2)


@dataclass(frozen=True)
class PullbackMap:
    """Coordinate substitution with an explicit Jacobian.

    ``bindings`` sends each source coordinate to its expression in the
    target coordinates; ``jacobian[i][j]`` is the coefficient of
    d<target[j]> in the pull-back of d<source[i]>.
    """

    source: Coords
    target: Coords
    bindings: Mapping[str, RationalFunction]
    jacobian: FMatrix

    @staticmethod
    def from_bindings(
        source: Coords, target: Coords, bindings: Mapping[str, RationalFunction]
    ) -> "PullbackMap":
        rows = []
        for src in source:
            expr = _coerce_rf(bindings[src])
            rows.append([expr.partial(t) for t in target])
        return PullbackMap(source, target, dict(bindings), FMatrix(rows))

    @staticmethod
    def identity(coords: Coords) -> "PullbackMap":
        binds = {c: RationalFunction.variable(c) for c in coords}
        return PullbackMap.from_bindings(coords, coords, binds)


def pullback(xi: MatrixOneForm, pmap: PullbackMap) -> MatrixOneForm:
    """Substitute coordinates and transform the differentials by the Jacobian."""
    if xi.coords != pmap.source:
        raise CoordinateMismatchError(
            f"form in coordinates {xi.coords}, map from {pmap.source}"
        )
    subbed = [p.substitute(pmap.bindings) for p in xi.parts()]
    j = pmap.jacobian
    d1 = subbed[0].scaled(j[0, 0]) + subbed[1].scaled(j[1, 0])
    d2 = subbed[0].scaled(j[0, 1]) + subbed[1].scaled(j[1, 1])
    return MatrixOneForm(pmap.target, d1, d2)
