"""Linear cellular automata with finitely many exceptional local rules.

A map tau on V^G (V = k^n) is stored as a twisted ring element with
matrix coefficients: the regular part holds the constant rule, the
singular part the sitewise corrections.  The action is

    tau(x)(g) = sum_h regular(h) x(gh) + sum_h singular(g)(h) x(gh),

composition of maps is ring multiplication, and the identity map is the
ring unit.  Configurations are restricted to base-plus-finite-deviation
points of V^G, which is enough for every procedure in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import UsageError
from .exactalg import FieldSpec, Matrix
from .groupring import GroupRingElement, coeff_zero
from .groups import Element, FiniteSubset, GroupSpec
from .twisted import TwistedElement, TwistedMatrix, f_shuffle_inv

Vector = tuple


def _vec_zero(field: FieldSpec, n: int) -> Vector:
    return (field.zero,) * n


def _vec_add(field: FieldSpec, a: Vector, b: Vector) -> Vector:
    return tuple(field.add(x, y) for x, y in zip(a, b))


def _vec_sub(field: FieldSpec, a: Vector, b: Vector) -> Vector:
    return tuple(field.sub(x, y) for x, y in zip(a, b))


def _vec_scale(field: FieldSpec, c, a: Vector) -> Vector:
    return tuple(field.mul(c, x) for x in a)


def _vec_is_zero(a: Vector) -> bool:
    return all(x == 0 for x in a)


def _mat_vec(field: FieldSpec, m, v: Vector) -> Vector:
    out = []
    for row in m:
        acc = field.zero
        for x, y in zip(row, v):
            acc = field.add(acc, field.mul(x, y))
        out.append(acc)
    return tuple(out)


def _mat_add(field: FieldSpec, a, b):
    return tuple(tuple(field.add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


@dataclass(frozen=True)
class Configuration:
    """An asymptotically constant point of V^G: x(g) = base + deviation(g),
    with finitely supported deviation (no stored zero vectors, keys sorted)."""

    group: GroupSpec
    field: FieldSpec
    n: int
    base: Vector
    deviation: tuple[tuple[Element, Vector], ...]

    @staticmethod
    def make(
        group: GroupSpec,
        field: FieldSpec,
        n: int,
        base: Sequence,
        deviation: Mapping[Element, Sequence] | Iterable[tuple[Element, Sequence]] = (),
    ) -> "Configuration":
        base = tuple(field.coerce(x) for x in base)
        if len(base) != n:
            raise UsageError(f"base vector must have length {n}")
        items = deviation.items() if isinstance(deviation, Mapping) else deviation
        acc: dict[Element, Vector] = {}
        for g, v in items:
            group.check(g)
            v = tuple(field.coerce(x) for x in v)
            if len(v) != n:
                raise UsageError(f"deviation vector at {g!r} must have length {n}")
            acc[g] = _vec_add(field, acc[g], v) if g in acc else v
        pairs = [(g, v) for g, v in acc.items() if not _vec_is_zero(v)]
        pairs.sort(key=lambda t: group.key(t[0]))
        return Configuration(group, field, n, base, tuple(pairs))

    @staticmethod
    def zero(group: GroupSpec, field: FieldSpec, n: int) -> "Configuration":
        return Configuration(group, field, n, _vec_zero(field, n), ())

    def is_zero(self) -> bool:
        return _vec_is_zero(self.base) and not self.deviation

    def value_at(self, g: Element) -> Vector:
        for h, v in self.deviation:
            if h == g:
                return _vec_add(self.field, self.base, v)
        return self.base

    def deviation_support(self) -> FiniteSubset:
        return FiniteSubset(self.group, tuple(g for g, _ in self.deviation))

    def translate(self, g: Element) -> "Configuration":
        """The standard shift: (g x)(h) = x(g^-1 h)."""
        grp = self.group
        return Configuration.make(
            grp,
            self.field,
            self.n,
            self.base,
            ((grp.compose(g, h), v) for h, v in self.deviation),
        )

    def restrict(self, sites: FiniteSubset) -> "Pattern":
        return Pattern(
            self.group,
            self.field,
            self.n,
            sites,
            tuple(self.value_at(g) for g in sites),
        )

    def _check_compatible(self, other: "Configuration") -> None:
        if (self.group, self.field, self.n) != (other.group, other.field, other.n):
            raise UsageError("configuration group/field/dimension mismatch")

    def __add__(self, other: "Configuration") -> "Configuration":
        self._check_compatible(other)
        return Configuration.make(
            self.group,
            self.field,
            self.n,
            _vec_add(self.field, self.base, other.base),
            self.deviation + other.deviation,
        )

    def scale(self, c) -> "Configuration":
        c = self.field.coerce(c)
        return Configuration.make(
            self.group,
            self.field,
            self.n,
            _vec_scale(self.field, c, self.base),
            ((g, _vec_scale(self.field, c, v)) for g, v in self.deviation),
        )


@dataclass(frozen=True)
class Pattern:
    """A total assignment of vectors to a finite window of sites."""

    group: GroupSpec
    field: FieldSpec
    n: int
    domain: FiniteSubset
    values: tuple[Vector, ...]

    def value_at(self, g: Element) -> Vector:
        return self.values[self.domain.position(g)]

    def flatten(self) -> tuple:
        return tuple(x for v in self.values for x in v)


@dataclass(frozen=True)
class LocalRule:
    """A linear map V^M -> V given by one n x n block per memory site:
    rule(w) = sum_h block(h) w(h)."""

    group: GroupSpec
    field: FieldSpec
    n: int
    memory: FiniteSubset
    blocks: tuple  # one n x n nested tuple per memory site, aligned

    @staticmethod
    def make(
        group: GroupSpec,
        field: FieldSpec,
        n: int,
        blocks: Mapping[Element, Sequence],
    ) -> "LocalRule":
        mem = FiniteSubset.make(group, blocks.keys())
        coerced = tuple(
            tuple(tuple(field.coerce(x) for x in row) for row in blocks[g])
            for g in mem
        )
        for b in coerced:
            if len(b) != n or any(len(row) != n for row in b):
                raise UsageError(f"rule blocks must be {n}x{n}")
        return LocalRule(group, field, n, mem, coerced)

    def block(self, h: Element):
        if h in self.memory:
            return self.blocks[self.memory.position(h)]
        return coeff_zero(self.field, self.n)

    def with_memory(self, memory: FiniteSubset) -> "LocalRule":
        """Re-express over a (larger) memory set, zero-filling new sites."""
        return LocalRule(
            self.group,
            self.field,
            self.n,
            memory,
            tuple(self.block(h) for h in memory),
        )

    def evaluate(self, window: Pattern) -> Vector:
        """Apply to a pattern whose domain contains the memory."""
        acc = _vec_zero(self.field, self.n)
        for h, b in zip(self.memory, self.blocks):
            acc = _vec_add(self.field, acc, _mat_vec(self.field, b, window.value_at(h)))
        return acc

    def __sub__(self, other: "LocalRule") -> "LocalRule":
        mem = self.memory.union(other.memory)
        field = self.field
        blocks = tuple(
            _mat_add(
                field,
                self.block(h),
                tuple(tuple(field.neg(x) for x in row) for row in other.block(h)),
            )
            for h in mem
        )
        return LocalRule(self.group, field, self.n, mem, blocks)


@dataclass(frozen=True)
class InducedLocalMap:
    """The exact matrix of the restricted action V^{EM} -> V^{E}.

    Block layout: row block i is the i-th site of the codomain window in
    canonical order, column block j the j-th site of the domain window;
    block (g, q) equals the local rule block at h = g^-1 q when h is in
    the memory, else zero.
    """

    group: GroupSpec
    field: FieldSpec
    n: int
    domain_set: FiniteSubset
    codomain_set: FiniteSubset
    matrix: Matrix

    def apply_pattern(self, p: Pattern) -> Pattern:
        if p.domain != self.domain_set:
            raise UsageError("pattern domain differs from the map's domain window")
        out = self.matrix.mul_vector(p.flatten())
        n = self.n
        values = tuple(
            tuple(out[i * n : (i + 1) * n]) for i in range(len(self.codomain_set))
        )
        return Pattern(self.group, self.field, n, self.codomain_set, values)


class Nuca:
    """A linear cellular automaton with finitely many exceptional rules,
    stored as its twisted ring element (matrix-shaped coefficients)."""

    __slots__ = ("element", "memory", "exceptional_set")

    def __init__(self, element: TwistedElement):
        if element.shape is None:
            raise UsageError("a NUCA needs matrix-shaped coefficients (n >= 1)")
        self.element = element
        self.memory = element.memory()
        self.exceptional_set = element.singular_support()

    @property
    def group(self) -> GroupSpec:
        return self.element.group

    @property
    def field(self) -> FieldSpec:
        return self.element.field

    @property
    def n(self) -> int:
        return self.element.shape

    @staticmethod
    def identity(group: GroupSpec, field: FieldSpec, n: int) -> "Nuca":
        return Nuca(TwistedElement.one(group, field, n))

    @staticmethod
    def zero(group: GroupSpec, field: FieldSpec, n: int) -> "Nuca":
        return Nuca(TwistedElement.zero(group, field, n))

    @staticmethod
    def from_matrix(m: TwistedMatrix) -> "Nuca":
        """View a matrix over the scalar twisted ring as a NUCA on V^G."""
        return Nuca(f_shuffle_inv(m))

    def __eq__(self, other) -> bool:
        return isinstance(other, Nuca) and self.element == other.element

    def __hash__(self):
        return hash(self.element)

    def __repr__(self):
        return (
            f"Nuca(n={self.n}, memory={len(self.memory)} sites, "
            f"exceptional={len(self.exceptional_set)} sites)"
        )

    def rule_at(self, g: Element) -> LocalRule:
        """The local rule used at site g, over this NUCA's memory set."""
        field, n = self.field, self.n
        reg = dict(self.element.regular.terms)
        sing = dict(self.element.singular_part(g).terms)
        blocks = []
        for h in self.memory:
            b = reg.get(h, coeff_zero(field, n))
            if h in sing:
                b = _mat_add(field, b, sing[h])
            blocks.append(b)
        return LocalRule(self.group, field, n, self.memory, tuple(blocks))

    # -- the action on configurations ------------------------------------------

    def apply(self, x: Configuration) -> Configuration:
        """tau(x)(g) = sum_h regular(h) x(gh) + sum_h singular(g)(h) x(gh)."""
        if (x.group, x.field, x.n) != (self.group, self.field, self.n):
            raise UsageError("configuration incompatible with this NUCA")
        grp, field, n = self.group, self.field, self.n

        total = coeff_zero(field, n)
        for _, c in self.element.regular.terms:
            total = _mat_add(field, total, c)
        new_base = _mat_vec(field, total, x.base)

        # candidate output sites: where a deviation is visible or a rule differs
        candidates: set[Element] = set(self.exceptional_set)
        for u, _ in x.deviation:
            for h in self.memory:
                candidates.add(grp.compose(u, grp.inverse(h)))

        dev = dict(x.deviation)
        out: list[tuple[Element, Vector]] = []
        for g in candidates:
            acc = _vec_zero(field, n)
            for h, c in self.element.regular.terms:
                acc = _vec_add(field, acc, _mat_vec(field, c, _value(field, x, dev, grp.compose(g, h))))
            for h, c in self.element.singular_part(g).terms:
                acc = _vec_add(field, acc, _mat_vec(field, c, _value(field, x, dev, grp.compose(g, h))))
            delta = _vec_sub(field, acc, new_base)
            if not _vec_is_zero(delta):
                out.append((g, delta))
        return Configuration.make(grp, field, n, new_base, out)

    def compose(self, other: "Nuca") -> "Nuca":
        """Ring product; equals map composition self after other."""
        return Nuca(self.element * other.element)

    def shift(self, g: Element) -> "Nuca":
        """Shift the rule configuration: the exceptional site u moves to g u."""
        grp = self.group
        grp.check(g)
        moved = [(grp.compose(g, u), part) for u, part in self.element.singular]
        return Nuca(TwistedElement.make(self.element.regular, moved))

    # -- local-rule views ----------------------------------------------------------

    def to_local_rules(self) -> tuple[LocalRule, dict[Element, LocalRule]]:
        """The constant rule and the map of exceptional rules."""
        field, n = self.field, self.n
        reg = dict(self.element.regular.terms)
        constant = LocalRule(
            self.group,
            field,
            n,
            self.memory,
            tuple(reg.get(h, coeff_zero(field, n)) for h in self.memory),
        )
        exceptions = {g: self.rule_at(g) for g in self.exceptional_set}
        return constant, exceptions

    @staticmethod
    def from_local_rules(
        constant: LocalRule, exceptions: Mapping[Element, LocalRule] | None = None
    ) -> "Nuca":
        """Assemble a NUCA from a constant rule plus sitewise exceptions."""
        exceptions = exceptions or {}
        group, field, n = constant.group, constant.field, constant.n
        memory = constant.memory
        for rule in exceptions.values():
            if (rule.group, rule.field, rule.n) != (group, field, n):
                raise UsageError("exception rules disagree with the constant rule")
            memory = memory.union(rule.memory)
        constant = constant.with_memory(memory)
        regular = GroupRingElement.from_terms(
            group, field, n, zip(memory, constant.blocks)
        )
        sing = []
        for g, rule in exceptions.items():
            delta = rule.with_memory(memory) - constant
            part = GroupRingElement.from_terms(group, field, n, zip(memory, delta.blocks))
            if not part.is_zero():
                sing.append((g, part))
        return Nuca(TwistedElement.make(regular, sing))

    # -- finite windows --------------------------------------------------------------

    def induced_local_map(self, window: FiniteSubset) -> InducedLocalMap:
        """The matrix of the action restricted to a finite window E, with
        domain EM; block (g, q) is the rule-at-g block at h = g^-1 q."""
        if window.group != self.group:
            raise UsageError("window lives in a different group")
        grp, field, n = self.group, self.field, self.n
        domain = window.product(self.memory) if len(self.memory) else FiniteSubset.make(grp, ())
        mat = Matrix.zeros(field, n * len(window), n * len(domain))
        for gi, g in enumerate(window):
            rule = self.rule_at(g)
            for h, block in zip(rule.memory, rule.blocks):
                q = grp.compose(g, h)
                qi = domain.position(q)
                for i in range(n):
                    for j in range(n):
                        mat.data[gi * n + i, qi * n + j] = block[i][j]
        return InducedLocalMap(grp, field, n, domain, window, mat)


def _value(field: FieldSpec, x: Configuration, dev: dict, g: Element) -> Vector:
    v = dev.get(g)
    return x.base if v is None else _vec_add(field, x.base, v)


def constant_part(t: Nuca) -> Nuca:
    """The NUCA of the constant rule alone (singular part dropped)."""
    return Nuca(TwistedElement(t.element.regular, ()))


def basis_configuration(
    group: GroupSpec, field: FieldSpec, n: int, g: Element, j: int
) -> Configuration:
    """Zero base, a single standard basis vector e_j at site g."""
    v = tuple(field.one if i == j else field.zero for i in range(n))
    return Configuration.make(group, field, n, _vec_zero(field, n), [(g, v)])
