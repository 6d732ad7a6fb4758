"""Seeded randomized suites over the supported universes.

Units of the matrix ring over the twisted group ring are built as random
products of three generator families, each with a known inverse:

* monomial diagonals (c * g, 0) with c a nonzero scalar,
* unipotent diagonals 1 + v with v a pure singular element whose twisted
  square vanishes (a single exceptional site whose part avoids the
  identity), inverse 1 - v,
* elementary matrices J + E_ij * w for i != j, inverse J - E_ij * w.

Each trial is reconstructible from the suite seed alone: the trial index
derives a private RNG, and the drawn generator word is recorded in the
report.  Over the supported universes every one-sided unit is expected to
be two-sided; the suites verify that implication on random units and
record any counterexample in full.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Optional

from .errors import UsageError
from .exactalg import FieldSpec
from .groupring import GroupRingElement
from .groups import Element, GroupSpec
from .invert import SearchBudget, search_left_inverse, verify_identity
from .nuca import Nuca
from .twisted import TwistedElement, TwistedMatrix, f_shuffle_inv


# -- random draws ----------------------------------------------------------------

def rand_scalar(rng: random.Random, field: FieldSpec, nonzero: bool = False):
    if field.kind == "Fp":
        lo = 1 if nonzero else 0
        return rng.randrange(lo, field.p)
    num = rng.randint(1, 3) if nonzero else rng.randint(-3, 3)
    if nonzero and rng.random() < 0.5:
        num = -num
    return Fraction(num, rng.randint(1, 3))


def rand_coeff(rng: random.Random, field: FieldSpec, shape, nonzero: bool = False):
    if shape is None:
        return rand_scalar(rng, field, nonzero)
    while True:
        m = tuple(
            tuple(rand_scalar(rng, field) for _ in range(shape)) for _ in range(shape)
        )
        if not nonzero or any(x != 0 for row in m for x in row):
            return m


def rand_groupring(
    rng: random.Random,
    group: GroupSpec,
    field: FieldSpec,
    shape,
    radius: int,
    max_terms: int = 3,
    sites: Optional[tuple[Element, ...]] = None,
) -> GroupRingElement:
    pool = sites if sites is not None else group.ball(radius)
    k = rng.randint(0, max_terms)
    terms = [(rng.choice(pool), rand_coeff(rng, field, shape)) for _ in range(k)]
    return GroupRingElement.from_terms(group, field, shape, terms)


def rand_twisted(
    rng: random.Random,
    group: GroupSpec,
    field: FieldSpec,
    shape,
    radius: int,
    max_sites: int = 2,
    max_terms: int = 2,
) -> TwistedElement:
    reg = rand_groupring(rng, group, field, shape, radius, max_terms + 1)
    pool = group.ball(radius)
    sing = {}
    for _ in range(rng.randint(0, max_sites)):
        g = rng.choice(pool)
        part = rand_groupring(rng, group, field, shape, radius, max_terms)
        if not part.is_zero():
            sing[g] = part
    return TwistedElement.make(reg, sing)


# -- suite plumbing -----------------------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    seed: int
    trials: int
    group: GroupSpec
    field: FieldSpec
    n: int
    support_radius: int = 1
    budget: SearchBudget = dataclass_field(default_factory=SearchBudget)
    max_factors: int = 2
    rediscover_inverse: bool = False
    decoy_every: int = 0  # pipeline: every k-th trial runs the non-injective control

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if self.support_radius < 0:
            raise UsageError("support_radius must be >= 0")
        if self.n < 1:
            raise UsageError("n must be >= 1")


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    config: SuiteConfig
    note: str
    outcomes: tuple[dict, ...]
    passes: int
    failures: int
    wall_clock_s: Optional[float]

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _trial_rng(config: SuiteConfig, index: int) -> random.Random:
    return random.Random(config.seed * 1_000_000_007 + index)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("D1_THREADS", "1")))
    except ValueError:
        return 1


def _run_trials(config: SuiteConfig, trial_fn) -> list[dict]:
    indices = range(config.trials)
    threads = min(_thread_count(), config.trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(trial_fn, indices))
    else:
        outcomes = [trial_fn(i) for i in indices]
    return outcomes  # trial_fn is pure per index, so order is by construction


# -- unit generation ------------------------------------------------------------------

def _unipotent_part(
    rng: random.Random, group: GroupSpec, field: FieldSpec, radius: int
) -> TwistedElement:
    """(0, b) with b at a single site and no identity term, so (0,b)^2 = 0."""
    site = rng.choice(group.ball(radius))
    pool = tuple(g for g in group.ball(max(radius, 1)) if g != group.identity)
    part = rand_groupring(rng, group, field, None, radius, max_terms=2, sites=pool)
    return TwistedElement.make(
        GroupRingElement.zero(group, field, None), [(site, part)] if part else []
    )


def gen_unit(
    rng: random.Random, config: SuiteConfig, n_factors: Optional[int] = None
) -> tuple[TwistedMatrix, TwistedMatrix, list]:
    """A two-sided unit of the n x n matrix ring with its known inverse,
    as a random product of invertible generators (an empty product is the
    identity pair).  The product with the inverse is re-verified before
    returning; degenerate draws are retried.
    """
    group, field, n = config.group, config.field, config.n
    for _ in range(20):
        factors: list[tuple[TwistedMatrix, TwistedMatrix, dict]] = []
        count = n_factors if n_factors is not None else rng.randint(1, max(1, config.max_factors))
        for _ in range(count):
            kinds = ["monomial", "unipotent"] + (["elementary"] if n >= 2 else [])
            kind = rng.choice(kinds)
            if kind == "monomial":
                sites = [rng.choice(group.ball(config.support_radius)) for _ in range(n)]
                coeffs = [rand_scalar(rng, field, nonzero=True) for _ in range(n)]
                fwd = TwistedMatrix.diagonal(
                    [
                        TwistedElement(
                            GroupRingElement.monomial(group, field, None, g, c), ()
                        )
                        for g, c in zip(sites, coeffs)
                    ]
                )
                bwd = TwistedMatrix.diagonal(
                    [
                        TwistedElement(
                            GroupRingElement.monomial(
                                group, field, None, group.inverse(g), field.inv(c)
                            ),
                            (),
                        )
                        for g, c in zip(sites, coeffs)
                    ]
                )
                word = {
                    "kind": "monomial",
                    "sites": [group.encode_element(g) for g in sites],
                    "coeffs": [field.encode_scalar(c) for c in coeffs],
                }
            elif kind == "unipotent":
                slot = rng.randrange(n)
                nil = _unipotent_part(rng, group, field, config.support_radius)
                one = TwistedElement.one(group, field, None)
                diag_fwd = [one] * n
                diag_bwd = [one] * n
                diag_fwd[slot] = one + nil
                diag_bwd[slot] = one - nil
                fwd = TwistedMatrix.diagonal(diag_fwd)
                bwd = TwistedMatrix.diagonal(diag_bwd)
                word = {"kind": "unipotent", "slot": slot}
            else:
                i = rng.randrange(n)
                j = rng.choice([x for x in range(n) if x != i])
                w = rand_twisted(rng, group, field, None, config.support_radius)
                ident = TwistedMatrix.identity(n, group, field, None)
                bump = [
                    [
                        w if (a, b) == (i, j) else TwistedElement.zero(group, field, None)
                        for b in range(n)
                    ]
                    for a in range(n)
                ]
                bump_m = TwistedMatrix(n, tuple(tuple(r) for r in bump))
                neg_m = TwistedMatrix(
                    n, tuple(tuple(-e for e in row) for row in bump_m.entries)
                )
                fwd = ident + bump_m
                bwd = ident + neg_m
                word = {"kind": "elementary", "i": i, "j": j}
            factors.append((fwd, bwd, word))

        unit = TwistedMatrix.identity(n, group, field, None)
        inverse = TwistedMatrix.identity(n, group, field, None)
        for fwd, _, _ in factors:
            unit = unit @ fwd
        for _, bwd, _ in reversed(factors):
            inverse = bwd @ inverse
        if (unit @ inverse).is_identity():
            return unit, inverse, [w for _, _, w in factors]
    raise AssertionError("unit generator kept producing degenerate draws; this is a bug")


def element_radius(u: TwistedElement) -> int:
    """Radius of the smallest ball containing all supports of u."""
    grp = u.group
    r = max((grp.norm(g) for g, _ in u.regular.terms), default=0)
    for g, part in u.singular:
        r = max(r, grp.norm(g))
        r = max(r, max((grp.norm(h) for h, _ in part.terms), default=0))
    return r


def decoy_nuca(group: GroupSpec, field: FieldSpec, n: int) -> Nuca:
    """The standard non-injective control: identity blocks at the identity
    and at one generator.  Its kernel holds no finitely supported point,
    and no finite-window left inverse exists."""
    from .groupring import coeff_one

    step: Element = (1,) + (0,) * (group.dim - 1) if group.kind == "Zd" else (1,)
    reg = GroupRingElement.from_terms(
        group, field, n, [(group.identity, coeff_one(field, n)), (step, coeff_one(field, n))]
    )
    return Nuca(TwistedElement(reg, ()))


# -- suites ----------------------------------------------------------------------------

_NOTE = (
    "Over the supported universes every one-sided unit is expected to be "
    "two-sided; each trial verifies that implication on a random unit and "
    "any counterexample is recorded in full."
)


def run_direct_finiteness(config: SuiteConfig) -> SuiteReport:
    """Per trial: build (u, v) with u*v = 1 and assert v*u = 1.

    With rediscover_inverse set, the left inverse is recomputed by the
    exact solver instead of taken from the construction.
    """
    from .envelope import twisted_matrix_payload  # local import to avoid a cycle

    start = time.monotonic()

    def trial(index: int) -> dict:
        rng = _trial_rng(config, index)
        unit, inverse, word = gen_unit(rng, config)
        outcome: dict = {"trial": index, "word": word}
        if config.rediscover_inverse:
            tau = Nuca.from_matrix(unit)
            radius = max(
                config.budget.max_radius, element_radius(f_shuffle_inv(inverse))
            )
            hit = search_left_inverse(tau, radius)
            if hit is None:
                outcome["ok"] = False
                outcome["reason"] = "no left inverse found within budget"
                outcome["unit"] = twisted_matrix_payload(unit)
                return outcome
            cert, r = hit
            outcome["radius"] = r
            ok = verify_identity(tau, cert)
            fwd_ok = True
        else:
            ok = (inverse @ unit).is_identity()
            fwd_ok = (unit @ inverse).is_identity()
        outcome["ok"] = bool(ok and fwd_ok)
        if not outcome["ok"]:
            outcome["reason"] = "one-sided unit failed the two-sided check"
            outcome["unit"] = twisted_matrix_payload(unit)
            outcome["inverse"] = twisted_matrix_payload(inverse)
        return outcome

    outcomes = _run_trials(config, trial)
    failures = sum(1 for o in outcomes if not o["ok"])
    return SuiteReport(
        suite="direct_finiteness",
        config=config,
        note=_NOTE,
        outcomes=tuple(outcomes),
        passes=config.trials - failures,
        failures=failures,
        wall_clock_s=time.monotonic() - start,
    )


def run_surjunctivity_pipeline(config: SuiteConfig) -> SuiteReport:
    """Per trial: build a stably injective NUCA from a unit, strip the
    known inverse, rediscover a left inverse by blind search, then assert
    the same candidate is also a right inverse.

    Decoy trials (when configured) run the non-injective control and are
    expected to end in bounded evidence, not in a certificate.
    """
    from .envelope import twisted_payload  # local import to avoid a cycle
    from .invert import stable_injectivity_verdict

    start = time.monotonic()

    def trial(index: int) -> dict:
        rng = _trial_rng(config, index)
        is_decoy = config.decoy_every > 0 and index % config.decoy_every == config.decoy_every - 1
        if is_decoy:
            tau = decoy_nuca(config.group, config.field, config.n)
            verdict = stable_injectivity_verdict(tau, config.budget)
            ok = verdict.kind == "bounded_evidence"
            out = {"trial": index, "decoy": True, "verdict": verdict.kind, "ok": ok}
            if not ok:
                out["reason"] = "control produced an unexpected verdict"
            return out
        unit, inverse, word = gen_unit(rng, config)
        tau = Nuca.from_matrix(unit)
        radius = max(config.budget.max_radius, element_radius(f_shuffle_inv(inverse)))
        outcome: dict = {"trial": index, "decoy": False, "word": word}
        hit = search_left_inverse(tau, radius)
        if hit is None:
            outcome["ok"] = False
            outcome["reason"] = "no left inverse found within budget"
            outcome["unit"] = twisted_payload(tau.element)
            return outcome
        cert, r = hit
        outcome["radius"] = r
        left_ok = verify_identity(cert, tau)
        right_ok = verify_identity(tau, cert)
        outcome["ok"] = bool(left_ok and right_ok)
        if not outcome["ok"]:
            outcome["reason"] = "certificate failed an identity check"
            outcome["unit"] = twisted_payload(tau.element)
            outcome["certificate"] = twisted_payload(cert.element)
        return outcome

    outcomes = _run_trials(config, trial)
    failures = sum(1 for o in outcomes if not o["ok"])
    return SuiteReport(
        suite="surjunctivity_pipeline",
        config=config,
        note=_NOTE,
        outcomes=tuple(outcomes),
        passes=config.trials - failures,
        failures=failures,
        wall_clock_s=time.monotonic() - start,
    )
