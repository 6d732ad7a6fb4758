import random

import pytest

from d1ring.errors import UsageError
from d1ring.exactalg import Matrix
from d1ring.experiments import rand_twisted
from d1ring.groups import FiniteSubset
from d1ring.nuca import Configuration, LocalRule, Nuca, basis_configuration
from d1ring.twisted import TwistedElement

from conftest import (
    F2,
    F2FREE,
    F3,
    F5,
    GROUPS,
    Q,
    Z1,
    Z2,
    f3_example_nuca,
    f3_nuca_pair,
    gre,
)
from oracles import field_modulus, naive_apply_at, plain_twisted


def rand_nuca(rng, group, field, n, radius=1, max_sites=2):
    return Nuca(rand_twisted(rng, group, field, n, radius, max_sites=max_sites))


def rand_config(rng, group, field, n, radius=1, max_dev=3, with_base=True):
    pool = group.ball(radius)
    base = [
        (rng.randrange(field.p) if field.kind == "Fp" else rng.randint(-2, 2))
        if with_base
        else 0
        for _ in range(n)
    ]
    dev = []
    for _ in range(rng.randint(0, max_dev)):
        vec = [
            rng.randrange(field.p) if field.kind == "Fp" else rng.randint(-2, 2)
            for _ in range(n)
        ]
        dev.append((rng.choice(pool), vec))
    return Configuration.make(group, field, n, base, dev)


def assert_apply_matches_oracle(t, x, extra_sites=()):
    """Compare apply() against the independent windowed evaluator on every
    site where either side could be nonzero, plus a margin."""
    y = t.apply(x)
    omega = plain_twisted(t.element)
    p = field_modulus(t.field)
    sites = set(extra_sites)
    sites.update(g for g, _ in y.deviation)
    sites.update(t.exceptional_set)
    for u, _ in x.deviation:
        for h in t.memory:
            sites.add(t.group.compose(u, t.group.inverse(h)))
    dev = {g: v for g, v in x.deviation}
    for g in sites:
        assert y.value_at(g) == naive_apply_at(
            t.group.kind, p, omega, x.base, dev, g
        ), f"mismatch at {g}"


class TestApply:
    def test_zero_map(self):
        t = Nuca.zero(Z1, F3, 1)
        x = Configuration.make(Z1, F3, 1, [2], [((0,), [1])])
        assert t.apply(x).is_zero()

    def test_exceptional_example_deviation(self):
        t = f3_example_nuca()
        x = Configuration.make(Z1, F3, 1, [0], [((0,), [1])])
        y = t.apply(x)
        assert y.base == (0,)
        assert y.deviation == (((-1,), (1,)), ((0,), (2,)))
        assert_apply_matches_oracle(t, x)

    def test_exceptional_example_base(self):
        t = f3_example_nuca()
        x = Configuration.make(Z1, F3, 1, [1], [])
        y = t.apply(x)
        assert y.base == (2,)
        assert y.deviation == (((0,), (1,)),)
        assert_apply_matches_oracle(t, x)

    @pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
    @pytest.mark.parametrize("field", [F2, F5, Q], ids=lambda f: f.label())
    def test_matches_oracle(self, group, field):
        rng = random.Random(f"{group.label()}|{field.label()}|apply")
        for _ in range(25):
            t = rand_nuca(rng, group, field, rng.choice([1, 2]))
            x = rand_config(rng, group, field, t.n)
            margin = group.ball(1)
            assert_apply_matches_oracle(t, x, extra_sites=margin)

    def test_linearity(self, rng):
        for _ in range(25):
            t = rand_nuca(rng, Z2, F5, 2)
            x = rand_config(rng, Z2, F5, 2)
            y = rand_config(rng, Z2, F5, 2)
            a, b = rng.randrange(5), rng.randrange(5)
            lhs = t.apply(x.scale(a) + y.scale(b))
            rhs = t.apply(x).scale(a) + t.apply(y).scale(b)
            assert lhs == rhs

    def test_incompatible_config(self):
        t = f3_example_nuca()
        x = Configuration.make(Z1, F5, 1, [0], [])
        with pytest.raises(UsageError):
            t.apply(x)


class TestCompose:
    def test_identity_neutral(self, rng):
        t = rand_nuca(rng, Z1, F3, 2)
        ident = Nuca.identity(Z1, F3, 2)
        assert t.compose(ident) == t
        assert ident.compose(t) == t

    def test_shift_monomials(self):
        shift = Nuca(TwistedElement.make(gre(Z1, F2, 1, [((1,), ((1,),))]), []))
        composed = shift.compose(shift)
        assert composed.element.regular.terms == (((2,), ((1,),)),)

    def test_f3_pair_compose_is_identity(self, rng):
        u, v = f3_nuca_pair()
        assert v.compose(u) == Nuca.identity(Z1, F3, 1)
        for _ in range(50):
            x = rand_config(rng, Z1, F3, 1, radius=2)
            assert v.apply(u.apply(x)) == x

    @pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
    def test_transport(self, group):
        # ring product realizes map composition, exactly
        rng = random.Random(f"{group.label()}|transport")
        for _ in range(20):
            n = rng.choice([1, 2])
            t1 = rand_nuca(rng, group, F5, n)
            t2 = rand_nuca(rng, group, F5, n)
            x = rand_config(rng, group, F5, n)
            assert t1.compose(t2).apply(x) == t1.apply(t2.apply(x))


class TestLocalRules:
    def test_no_exceptions(self):
        rule = LocalRule.make(Z1, F3, 1, {(0,): [[1]], (1,): [[1]]})
        t = Nuca.from_local_rules(rule)
        assert not t.element.singular

    def test_f3_construction(self):
        constant = LocalRule.make(Z1, F3, 1, {(0,): [[1]], (1,): [[1]]})
        exception = LocalRule.make(Z1, F3, 1, {(0,): [[2]], (1,): [[1]]})
        t = Nuca.from_local_rules(constant, {(0,): exception})
        assert t == f3_example_nuca()

    def test_round_trip(self, rng):
        for _ in range(20):
            t = rand_nuca(rng, Z2, F5, 2)
            constant, exceptions = t.to_local_rules()
            assert Nuca.from_local_rules(constant, exceptions) == t

    def test_agrees_with_direct_rule_evaluation(self, rng):
        for _ in range(15):
            t = rand_nuca(rng, Z1, F5, 2)
            x = rand_config(rng, Z1, F5, 2)
            y = t.apply(x)
            sites = set(t.exceptional_set)
            for u, _ in x.deviation:
                for h in t.memory:
                    sites.add(Z1.compose(u, Z1.inverse(h)))
            for g in sites:
                window = t.memory.translate(g)
                rule = t.rule_at(g)
                shifted = rule.with_memory(t.memory)
                pattern_values = [x.value_at(Z1.compose(g, h)) for h in t.memory]
                acc = tuple(
                    sum(
                        (b[i][j] * v[j]) % 5
                        for b, v in zip(shifted.blocks, pattern_values)
                        for j in range(2)
                    )
                    % 5
                    for i in range(2)
                )
                assert y.value_at(g) == acc


class TestInducedLocalMap:
    def test_constant_rule_window_one(self):
        t = Nuca(TwistedElement.make(gre(Z1, F2, 1, [((0,), ((1,),)), ((1,), ((1,),))]), []))
        local = t.induced_local_map(FiniteSubset.make(Z1, [(0,)]))
        assert local.matrix == Matrix.from_rows(F2, [[1, 1]])

    def test_identity_selection(self):
        t = Nuca.identity(Z2, F5, 2)
        window = FiniteSubset.make(Z2, [(0, 0), (1, 1)])
        local = t.induced_local_map(window)
        assert local.domain_set == window
        assert local.matrix == Matrix.identity(F5, 4)

    def test_f3_exceptional_window(self):
        t = f3_example_nuca()
        local = t.induced_local_map(FiniteSubset.make(Z1, [(0,), (1,)]))
        assert local.domain_set.elements == ((0,), (1,), (2,))
        assert local.matrix == Matrix.from_rows(F3, [[2, 1, 0], [0, 1, 1]])

    @pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
    def test_consistency_with_apply(self, group):
        rng = random.Random(f"{group.label()}|induced")
        for _ in range(15):
            n = rng.choice([1, 2])
            t = rand_nuca(rng, group, F3, n)
            x = rand_config(rng, group, F3, n)
            window = FiniteSubset.make(
                group, [rng.choice(group.ball(1)) for _ in range(rng.randint(1, 3))]
            )
            local = t.induced_local_map(window)
            lhs = local.apply_pattern(x.restrict(local.domain_set))
            rhs = t.apply(x).restrict(window)
            assert lhs == rhs

    def test_blocks_vanish_off_translated_memory(self, rng):
        t = rand_nuca(rng, Z1, F5, 1)
        window = FiniteSubset.ball(Z1, 1)
        local = t.induced_local_map(window)
        mem = set(t.memory)
        for gi, g in enumerate(window):
            for qi, q in enumerate(local.domain_set):
                if Z1.compose(Z1.inverse(g), q) not in mem:
                    assert local.matrix.data[gi, qi] == 0


class TestShift:
    def test_identity_shift(self, rng):
        t = rand_nuca(rng, Z2, F3, 1)
        assert t.shift(Z2.identity) == t

    def test_action_law(self, rng):
        t = rand_nuca(rng, F2FREE, F3, 1)
        g, h = (1,), (2, -1)
        assert t.shift(g).shift(h) == t.shift(F2FREE.compose(h, g))

    def test_exception_moves(self):
        t = f3_example_nuca()
        shifted = t.shift((1,))
        assert shifted.exceptional_set.elements == ((1,),)
        assert shifted.element.regular == t.element.regular

    def test_equivariance(self, rng):
        t = f3_example_nuca()
        for _ in range(20):
            g = rng.choice(Z1.ball(2))
            x = rand_config(rng, Z1, F3, 1, radius=2)
            assert t.shift(g).apply(x.translate(g)) == t.apply(x).translate(g)


class TestLocality:
    def test_output_window_reads_only_translated_window(self, rng):
        for _ in range(15):
            t = rand_nuca(rng, Z1, F5, 1)
            x = rand_config(rng, Z1, F5, 1)
            window = FiniteSubset.ball(Z1, 1)
            domain = (
                window.product(t.memory) if len(t.memory) else FiniteSubset.make(Z1, ())
            )
            # perturb x outside the translated window only
            far = [g for g in Z1.ball(4) if g not in domain]
            bump = Configuration.make(Z1, F5, 1, [0], [(rng.choice(far), [1 + rng.randrange(4)])])
            assert t.apply(x).restrict(window) == t.apply(x + bump).restrict(window)


class TestInjectivityWitness:
    @pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
    def test_nonzero_map_moves_some_probe(self, group):
        # single-site probes inside a computable ball separate every
        # nonzero map from zero
        rng = random.Random(f"{group.label()}|probe")
        found_all = True
        for _ in range(35):
            n = rng.choice([1, 2])
            t = rand_nuca(rng, group, F3, n)
            if t.element.is_zero():
                continue
            probe_origins = list(t.exceptional_set)
            for g in group.ball(2):
                if g not in t.exceptional_set:
                    probe_origins.append(g)
                    break
            hit = False
            for origin in probe_origins:
                for h in t.memory:
                    for j in range(n):
                        probe = basis_configuration(group, t.field, n, group.compose(origin, h), j)
                        if not t.apply(probe).is_zero():
                            hit = True
                            break
                    if hit:
                        break
                if hit:
                    break
            found_all = found_all and hit
        assert found_all
