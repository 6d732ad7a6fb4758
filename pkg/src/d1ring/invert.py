"""Invertibility and injectivity procedures for linear NUCA.

Four complementary tools:

* exact one-sided-inverse solving over a finite support window (the
  defining identity is linear in the unknown coefficients, and every
  product support is computable, so the search is a finite linear system);
* identity verification by ring equality (sound and complete because the
  NUCA <-> ring-element correspondence is injective over infinite groups);
* finitely supported kernel search (a witness refutes pre-injectivity,
  hence injectivity);
* the kernel tower over box exhaustions of Z^d, whose stabilized
  projections detect global kernel configurations.

Certificates and witnesses are re-verified before they are returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import UsageError
from .exactalg import Matrix, Subspace, kernel_basis, solve
from .groupring import GroupRingElement
from .groups import FiniteSubset
from .nuca import Configuration, Nuca, constant_part
from .twisted import TwistedElement


@dataclass(frozen=True)
class SearchBudget:
    """Caps for the verdict procedure; defaults are configuration, not theory."""

    max_radius: int = 3
    depth: int = 3
    window: int = 2

    def __post_init__(self):
        if self.max_radius < 0 or self.depth < 0 or self.window < 1:
            raise UsageError("budget fields out of range")


@dataclass(frozen=True)
class InverseSearchParams:
    """Support window for the unknown inverse: regular support inside
    memory_set, singular sites inside exceptional_set (each singular part
    again supported inside memory_set)."""

    side: str
    memory_set: FiniteSubset
    exceptional_set: FiniteSubset

    @staticmethod
    def make(side: str, memory_set: FiniteSubset, exceptional_set: FiniteSubset) -> "InverseSearchParams":
        if side not in ("left", "right"):
            raise UsageError(f"side must be 'left' or 'right', got {side!r}")
        grp = memory_set.group
        ident = FiniteSubset.make(grp, [grp.identity])
        memory_set = memory_set.union(ident)
        if len(exceptional_set) == 0:
            exceptional_set = ident
        return InverseSearchParams(side, memory_set, exceptional_set)


@dataclass(frozen=True)
class KernelTowerLevel:
    level: int
    kernel_dim: int
    stable_dim: Optional[int]
    stabilized_at: Optional[int]


@dataclass(frozen=True)
class KernelTowerReport:
    depth: int
    window: int
    levels: tuple[KernelTowerLevel, ...]

    def stabilized(self) -> bool:
        return all(lv.stabilized_at is not None for lv in self.levels)

    def all_stable_dims_zero(self) -> bool:
        return self.stabilized() and all(lv.stable_dim == 0 for lv in self.levels)


@dataclass(frozen=True)
class InjectivityVerdict:
    """One of: a left-inverse certificate (stable injectivity proven), a
    finitely supported kernel witness (injectivity refuted, for the map
    itself or for its constant part), or bounded tower evidence."""

    kind: str  # "proven_stably_injective" | "proven_not_injective" | "bounded_evidence"
    budget: SearchBudget
    certificate: Optional[Nuca] = None
    certificate_radius: Optional[int] = None
    witness: Optional[Configuration] = None
    witness_scope: Optional[str] = None  # "self" | "constant_part"
    witness_radius: Optional[int] = None
    tower: Optional[KernelTowerReport] = None


def verify_identity(u: Nuca, v: Nuca) -> bool:
    """True iff composing u after v is the identity map; decided exactly
    as ring equality of the product with the unit."""
    return (u.element * v.element).is_one()


def _matrix_unit(fld, n: int, i: int, j: int):
    return tuple(
        tuple(fld.one if (a, b) == (i, j) else fld.zero for b in range(n))
        for a in range(n)
    )


def _elementary_unknowns(t: Nuca, params: InverseSearchParams):
    """One single-slot ring element per unknown coefficient of the inverse."""
    grp, fld, n = t.group, t.field, t.n
    unknowns = []
    for g in params.memory_set:
        for i in range(n):
            for j in range(n):
                reg = GroupRingElement.monomial(grp, fld, n, g, _matrix_unit(fld, n, i, j))
                unknowns.append(TwistedElement(reg, ()))
    for e in params.exceptional_set:
        for g in params.memory_set:
            for i in range(n):
                for j in range(n):
                    part = GroupRingElement.monomial(grp, fld, n, g, _matrix_unit(fld, n, i, j))
                    unknowns.append(
                        TwistedElement.make(GroupRingElement.zero(grp, fld, n), [(e, part)])
                    )
    return unknowns


def _coordinates(t: Nuca, elem: TwistedElement):
    """Nonzero scalar slots of a twisted element, as (key, value) pairs."""
    grp, n = t.group, t.n
    out = []
    for g, c in elem.regular.terms:
        for i in range(n):
            for j in range(n):
                if c[i][j] != 0:
                    out.append((("r", grp.key(g), i, j), c[i][j]))
    for e, part in elem.singular:
        for g, c in part.terms:
            for i in range(n):
                for j in range(n):
                    if c[i][j] != 0:
                        out.append((("s", grp.key(e), grp.key(g), i, j), c[i][j]))
    return out


def solve_one_sided_inverse(t: Nuca, params: InverseSearchParams) -> Optional[Nuca]:
    """Exact search for an inverse supported in the given window.

    The identity (unknown * t = one, or t * unknown = one) is linear in the
    unknown's coefficients; the constraint set is finite because every
    product's support lies inside computable finite sets.  Free variables
    are set to zero, so the output is deterministic.
    """
    fld = t.field
    unknowns = _elementary_unknowns(t, params)
    if params.side == "left":
        products = [u * t.element for u in unknowns]
    else:
        products = [t.element * u for u in unknowns]
    target = TwistedElement.one(t.group, fld, t.n)

    coord_index: dict = {}
    prod_coords = []
    for p in products:
        coords = _coordinates(t, p)
        prod_coords.append(coords)
        for key, _ in coords:
            coord_index.setdefault(key, None)
    target_coords = _coordinates(t, target)
    for key, _ in target_coords:
        coord_index.setdefault(key, None)
    for row, key in enumerate(sorted(coord_index)):
        coord_index[key] = row

    a = Matrix.zeros(fld, len(coord_index), len(unknowns))
    for k, coords in enumerate(prod_coords):
        for key, value in coords:
            a.data[coord_index[key], k] = value
    b = [fld.zero] * len(coord_index)
    for key, value in target_coords:
        b[coord_index[key]] = value

    x = solve(a, b)
    if x is None:
        return None

    # reassemble the solution element from the elementary basis
    grp, n = t.group, t.n
    acc = TwistedElement.zero(grp, fld, n)
    for coeff, u in zip(x, unknowns):
        if coeff != 0:
            acc = acc + u.scale(coeff)
    candidate = Nuca(acc)
    ok = (
        verify_identity(candidate, t)
        if params.side == "left"
        else verify_identity(t, candidate)
    )
    if not ok:
        raise AssertionError("inverse solver produced a non-inverse; this is a bug")
    return candidate


def search_one_sided_inverse(t: Nuca, side: str, max_radius: int) -> Optional[tuple[Nuca, int]]:
    """Grow support balls until a one-sided inverse appears.  None is not
    a proof of non-invertibility; the needed radius has no a-priori bound."""
    if max_radius < 0:
        raise UsageError("max_radius must be >= 0")
    for r in range(max_radius + 1):
        ball = FiniteSubset.ball(t.group, r)
        cert = solve_one_sided_inverse(t, InverseSearchParams.make(side, ball, ball))
        if cert is not None:
            return cert, r
    return None


def search_left_inverse(t: Nuca, max_radius: int) -> Optional[tuple[Nuca, int]]:
    return search_one_sided_inverse(t, "left", max_radius)


def finitely_supported_kernel(t: Nuca, radius: int) -> Optional[Configuration]:
    """A nonzero configuration with zero base, support inside ball(radius),
    mapped to zero; None means no such witness exists AT THIS RADIUS.

    A witness refutes pre-injectivity: two asymptotic configurations with
    equal images differ exactly by such an element.
    """
    if radius < 0:
        raise UsageError("radius must be >= 0")
    grp, fld, n = t.group, t.field, t.n
    support = FiniteSubset.ball(grp, radius)
    window = support.product(t.memory.inverse()) if len(t.memory) else FiniteSubset.make(grp, ())
    window = window.union(t.exceptional_set)

    if len(window) == 0:
        # nothing constrains anything: the first basis probe is a witness
        vec = tuple(fld.one if i == 0 else fld.zero for i in range(n))
        return Configuration.make(grp, fld, n, (fld.zero,) * n, [(support.elements[0], vec)])

    local = t.induced_local_map(window)
    a = Matrix.zeros(fld, local.matrix.rows, n * len(support))
    for col_site, u in enumerate(support):
        if u in local.domain_set:
            src = local.domain_set.position(u)
            a.data[:, col_site * n : (col_site + 1) * n] = local.matrix.data[
                :, src * n : (src + 1) * n
            ]
    ker = kernel_basis(a)
    if ker.dim == 0:
        return None
    first = ker.vectors()[0]
    dev = [
        (u, tuple(first[i * n : (i + 1) * n]))
        for i, u in enumerate(support)
    ]
    witness = Configuration.make(grp, fld, n, (fld.zero,) * n, dev)
    if witness.is_zero() or not t.apply(witness).is_zero():
        raise AssertionError("kernel search produced a non-witness; this is a bug")
    return witness


def kernel_tower(t: Nuca, depth: int, stabilization_window: int, max_extra_levels: int = 8) -> KernelTowerReport:
    """Kernels of the induced maps over the box exhaustion of Z^d, with
    their projections to lower levels tracked until they sit still.

    Stationarity is guaranteed eventually (the projections form a
    decreasing chain of subspaces) but carries no effective bound, so the
    detection is heuristic: a level stabilizes once its projected subspace
    is unchanged for `stabilization_window` consecutive steps.
    """
    if t.group.kind != "Zd":
        raise UsageError("kernel_tower needs the box exhaustion of Z^d")
    if depth < 0 or stabilization_window < 1:
        raise UsageError("depth must be >= 0 and window >= 1")
    fld, n = t.field, t.n

    max_level = depth + stabilization_window + max_extra_levels
    windows: list[FiniteSubset] = []
    kernels: list[Subspace] = []
    domains: list[FiniteSubset] = []

    def ensure_level(m: int) -> None:
        while len(kernels) <= m:
            box = FiniteSubset.ball(t.group, len(kernels))
            local = t.induced_local_map(box)
            windows.append(box)
            domains.append(local.domain_set)
            kernels.append(kernel_basis(local.matrix))

    def project(level: int, m: int) -> Subspace:
        """Restrict kernel vectors at level m to the coordinates of level `level`."""
        cols = []
        for site in domains[level]:
            base = domains[m].position(site) * n
            cols.extend(range(base, base + n))
        vectors = [tuple(v[c] for c in cols) for v in kernels[m].vectors()]
        return Subspace.from_vectors(fld, n * len(domains[level]), vectors)

    levels = []
    for lv in range(depth + 1):
        ensure_level(lv)
        current = kernels[lv]
        run = 0
        stabilized_at = None
        stable: Optional[Subspace] = None
        for m in range(lv + 1, max_level + 1):
            ensure_level(m)
            nxt = project(lv, m)
            if nxt == current:
                run += 1
                if run >= stabilization_window:
                    stabilized_at = m - stabilization_window
                    stable = current
                    break
            else:
                run = 0
            current = nxt
        levels.append(
            KernelTowerLevel(
                level=lv,
                kernel_dim=kernels[lv].dim,
                stable_dim=None if stable is None else stable.dim,
                stabilized_at=stabilized_at,
            )
        )
    return KernelTowerReport(depth=depth, window=stabilization_window, levels=tuple(levels))


def stable_injectivity_verdict(t: Nuca, budget: SearchBudget = SearchBudget()) -> InjectivityVerdict:
    """Interleaved certificate/witness search, then tower evidence.

    A left-inverse certificate proves stable injectivity; a finitely
    supported kernel witness (for the map or for its constant part alone)
    refutes it; otherwise the verdict carries bounded tower evidence only.
    """
    const = constant_part(t)
    for r in range(budget.max_radius + 1):
        ball = FiniteSubset.ball(t.group, r)
        cert = solve_one_sided_inverse(t, InverseSearchParams.make("left", ball, ball))
        if cert is not None:
            if not verify_identity(cert, t):
                raise AssertionError("certificate failed re-verification; this is a bug")
            return InjectivityVerdict(
                kind="proven_stably_injective",
                budget=budget,
                certificate=cert,
                certificate_radius=r,
            )
        witness = finitely_supported_kernel(t, r)
        if witness is not None:
            return InjectivityVerdict(
                kind="proven_not_injective",
                budget=budget,
                witness=witness,
                witness_scope="self",
                witness_radius=r,
            )
        cwitness = finitely_supported_kernel(const, r)
        if cwitness is not None:
            return InjectivityVerdict(
                kind="proven_not_injective",
                budget=budget,
                witness=cwitness,
                witness_scope="constant_part",
                witness_radius=r,
            )
    tower = (
        kernel_tower(t, budget.depth, budget.window) if t.group.kind == "Zd" else None
    )
    return InjectivityVerdict(kind="bounded_evidence", budget=budget, tower=tower)
