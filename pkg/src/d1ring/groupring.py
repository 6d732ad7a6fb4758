"""Group rings k[G] and M_n(k)[G]: finitely supported coefficient maps
with convolution product, plus the entry-shuffle isomorphism
M_n(k)[G] ~ M_n(k[G]).

Coefficients come in two shapes, selected at runtime: scalars (shape
``None``) and n x n matrices stored as nested tuples (shape ``n``).
Mixing shapes is a hard error, never a coercion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import FormatError, UsageError
from .exactalg import FieldSpec
from .groups import Element, FiniteSubset, GroupSpec

Shape = Optional[int]  # None = scalar, n = matrix n x n


# -- coefficient arithmetic (scalar or small matrix) --------------------------

def coeff_zero(field: FieldSpec, shape: Shape):
    if shape is None:
        return field.zero
    return tuple((field.zero,) * shape for _ in range(shape))


def coeff_one(field: FieldSpec, shape: Shape):
    if shape is None:
        return field.one
    return tuple(
        tuple(field.one if i == j else field.zero for j in range(shape))
        for i in range(shape)
    )


def coeff_is_zero(c) -> bool:
    if isinstance(c, tuple):
        return all(x == 0 for row in c for x in row)
    return c == 0


def coeff_add(field: FieldSpec, a, b):
    if isinstance(a, tuple):
        return tuple(
            tuple(field.add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
        )
    return field.add(a, b)


def coeff_neg(field: FieldSpec, a):
    if isinstance(a, tuple):
        return tuple(tuple(field.neg(x) for x in row) for row in a)
    return field.neg(a)


def coeff_mul(field: FieldSpec, a, b):
    """Scalar product or matrix product, depending on shape."""
    if isinstance(a, tuple):
        n = len(a)
        return tuple(
            tuple(
                _dot(field, a[i], tuple(b[t][j] for t in range(n)))
                for j in range(n)
            )
            for i in range(n)
        )
    return field.mul(a, b)


def _dot(field: FieldSpec, xs, ys):
    acc = field.zero
    for x, y in zip(xs, ys):
        acc = field.add(acc, field.mul(x, y))
    return acc


def coeff_scale(field: FieldSpec, c, a):
    """Multiply a coefficient by a field scalar c."""
    if isinstance(a, tuple):
        return tuple(tuple(field.mul(c, x) for x in row) for row in a)
    return field.mul(c, a)


def coeff_encode(field: FieldSpec, c):
    if isinstance(c, tuple):
        return [[field.encode_scalar(x) for x in row] for row in c]
    return field.encode_scalar(c)


def coeff_parse(field: FieldSpec, shape: Shape, value) -> tuple:
    """Parse a JSON coefficient; returns (coeff, repaired)."""
    if shape is None:
        return field.parse_scalar(value)
    if not isinstance(value, list) or len(value) != shape:
        raise FormatError(f"expected a {shape}x{shape} coefficient matrix: {value!r}")
    repaired = False
    rows = []
    for row in value:
        if not isinstance(row, list) or len(row) != shape:
            raise FormatError(f"expected a {shape}x{shape} coefficient matrix: {value!r}")
        parsed = []
        for x in row:
            v, rep = field.parse_scalar(x)
            parsed.append(v)
            repaired = repaired or rep
        rows.append(tuple(parsed))
    return tuple(rows), repaired


def shape_label(shape: Shape) -> str:
    return "scalar" if shape is None else f"{shape}x{shape} matrix"


def coerce_coeff(field: FieldSpec, shape: Shape, c):
    """Validate a coefficient against the shape and bring it to canonical
    form (residue in range / reduced fraction)."""
    if shape is None:
        if isinstance(c, (tuple, list)):
            raise UsageError("expected a scalar coefficient, got a matrix")
        return field.coerce(c)
    try:
        square = len(c) == shape and all(len(row) == shape for row in c)
    except TypeError:
        square = False
    if not square:
        raise UsageError(f"expected a {shape_label(shape)} coefficient")
    return tuple(tuple(field.coerce(x) for x in row) for row in c)


# -- group ring elements -------------------------------------------------------

@dataclass(frozen=True)
class GroupRingElement:
    """A finitely supported map G -> coefficients, in canonical form:
    terms sorted under the group's total order, zero coefficients dropped."""

    group: GroupSpec
    field: FieldSpec
    shape: Shape
    terms: tuple[tuple[Element, object], ...]

    @staticmethod
    def from_terms(
        group: GroupSpec,
        field: FieldSpec,
        shape: Shape,
        terms: Iterable[tuple[Element, object]],
    ) -> "GroupRingElement":
        """Canonicalize: sum duplicate sites, drop zeros, sort."""
        acc: dict[Element, object] = {}
        for g, c in terms:
            group.check(g)
            c = coerce_coeff(field, shape, c)
            if g in acc:
                acc[g] = coeff_add(field, acc[g], c)
            else:
                acc[g] = c
        items = [(g, c) for g, c in acc.items() if not coeff_is_zero(c)]
        items.sort(key=lambda t: group.key(t[0]))
        return GroupRingElement(group, field, shape, tuple(items))

    @staticmethod
    def zero(group: GroupSpec, field: FieldSpec, shape: Shape = None) -> "GroupRingElement":
        return GroupRingElement(group, field, shape, ())

    @staticmethod
    def one(group: GroupSpec, field: FieldSpec, shape: Shape = None) -> "GroupRingElement":
        return GroupRingElement.monomial(group, field, shape, group.identity, coeff_one(field, shape))

    @staticmethod
    def monomial(
        group: GroupSpec, field: FieldSpec, shape: Shape, g: Element, coeff
    ) -> "GroupRingElement":
        group.check(g)
        coeff = coerce_coeff(field, shape, coeff)
        if coeff_is_zero(coeff):
            return GroupRingElement(group, field, shape, ())
        return GroupRingElement(group, field, shape, ((g, coeff),))

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def support(self) -> FiniteSubset:
        return FiniteSubset(self.group, tuple(g for g, _ in self.terms))

    def coefficient(self, g: Element):
        for h, c in self.terms:
            if h == g:
                return c
        return coeff_zero(self.field, self.shape)

    def _check_compatible(self, other: "GroupRingElement") -> None:
        if self.group != other.group:
            raise UsageError("group mismatch")
        if self.field != other.field:
            raise UsageError("field mismatch")
        if self.shape != other.shape:
            raise UsageError(
                f"coefficient shape mismatch: {shape_label(self.shape)} vs {shape_label(other.shape)}"
            )

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check_compatible(other)
        return GroupRingElement.from_terms(
            self.group, self.field, self.shape, self.terms + other.terms
        )

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(
            self.group,
            self.field,
            self.shape,
            tuple((g, coeff_neg(self.field, c)) for g, c in self.terms),
        )

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def scale(self, c) -> "GroupRingElement":
        c = self.field.coerce(c)
        return GroupRingElement.from_terms(
            self.group,
            self.field,
            self.shape,
            ((g, coeff_scale(self.field, c, a)) for g, a in self.terms),
        )

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        """Convolution: (ab)(g) = sum_t a(t) b(t^-1 g)."""
        self._check_compatible(other)
        grp, field = self.group, self.field
        acc: dict[Element, object] = {}
        for g, a in self.terms:
            for h, b in other.terms:
                k = grp.compose(g, h)
                c = coeff_mul(field, a, b)
                if k in acc:
                    acc[k] = coeff_add(field, acc[k], c)
                else:
                    acc[k] = c
        items = [(g, c) for g, c in acc.items() if not coeff_is_zero(c)]
        items.sort(key=lambda t: grp.key(t[0]))
        return GroupRingElement(grp, field, self.shape, tuple(items))

    def translate(self, g: Element) -> "GroupRingElement":
        """Left multiplication by the basis element g (coefficient 1)."""
        grp = self.group
        return GroupRingElement.from_terms(
            grp, self.field, self.shape, ((grp.compose(g, h), c) for h, c in self.terms)
        )


def matrix_shuffle(a: GroupRingElement) -> list[list[GroupRingElement]]:
    """M_n(k)[G] -> M_n(k[G]): entry (i,j) collects the (i,j) slots of
    every coefficient.  A ring isomorphism; inverse is matrix_unshuffle."""
    if a.shape is None:
        raise UsageError("matrix_shuffle requires matrix-shaped coefficients")
    n = a.shape
    grid = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(
                GroupRingElement.from_terms(
                    a.group, a.field, None, ((g, c[i][j]) for g, c in a.terms)
                )
            )
        grid.append(row)
    return grid


def matrix_unshuffle(grid: list[list[GroupRingElement]]) -> GroupRingElement:
    """Inverse of matrix_shuffle: reassemble matrix coefficients."""
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        raise UsageError("expected a square grid of elements")
    first = grid[0][0]
    sites: set[Element] = set()
    for row in grid:
        for e in row:
            if e.group != first.group or e.field != first.field:
                raise UsageError("grid entries disagree on group or field")
            if e.shape is not None:
                raise UsageError("grid entries must be scalar-shaped")
            sites.update(g for g, _ in e.terms)
    field = first.field
    terms = []
    for g in sites:
        coeff = tuple(
            tuple(grid[i][j].coefficient(g) for j in range(n)) for i in range(n)
        )
        terms.append((g, coeff))
    return GroupRingElement.from_terms(first.group, field, n, terms)
