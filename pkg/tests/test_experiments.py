import os
import random
from unittest import mock

import pytest

from d1ring.errors import UsageError
from d1ring.experiments import (
    SuiteConfig,
    decoy_nuca,
    element_radius,
    gen_unit,
    run_direct_finiteness,
    run_surjunctivity_pipeline,
)
from d1ring.groupring import GroupRingElement
from d1ring.twisted import TwistedElement, TwistedMatrix

from conftest import F2, F2FREE, F3, F5, Q, Z1, Z2, f3_pair, gre


def cfg(**kw):
    defaults = dict(seed=42, trials=4, group=Z1, field=F3, n=1)
    defaults.update(kw)
    return SuiteConfig(**defaults)


class TestGenUnit:
    def test_empty_word_is_identity_pair(self):
        unit, inverse, word = gen_unit(random.Random(0), cfg(), n_factors=0)
        ident = TwistedMatrix.identity(1, Z1, F3)
        assert unit == ident and inverse == ident and word == []

    def test_unipotent_factor_matches_f3_pair(self):
        # the generator recipe applied to the fixed singular part gives
        # exactly the known inverse pair
        u, v = f3_pair()
        one = TwistedElement.one(Z1, F3)
        nil = TwistedElement.make(
            GroupRingElement.zero(Z1, F3), [((0,), gre(Z1, F3, None, [((1,), 1)]))]
        )
        assert (nil * nil).is_zero()
        assert one + nil == u
        assert one - nil == v

    def test_two_monomials_invert_to_negated_sum(self):
        # [1] * [2] has inverse [-3]
        m1 = TwistedElement(GroupRingElement.monomial(Z1, F2, None, (1,), 1), ())
        m2 = TwistedElement(GroupRingElement.monomial(Z1, F2, None, (2,), 1), ())
        inv = TwistedElement(GroupRingElement.monomial(Z1, F2, None, (-3,), 1), ())
        assert ((m1 * m2) * inv).is_one()

    @pytest.mark.parametrize("field", [F2, F5, Q], ids=lambda f: f.label())
    @pytest.mark.parametrize("n", [1, 2])
    def test_random_units_verify(self, field, n):
        config = cfg(field=field, n=n, group=Z2)
        for i in range(10):
            unit, inverse, word = gen_unit(random.Random(i), config)
            assert (unit @ inverse).is_identity()
            assert (inverse @ unit).is_identity()
            assert word


class TestDirectFiniteness:
    def test_single_trial_deterministic(self):
        config = cfg(trials=1)
        rep = run_direct_finiteness(config)
        assert rep.passes == 1 and rep.failures == 0
        again = run_direct_finiteness(config)
        assert rep.outcomes == again.outcomes

    def test_trials_must_be_positive(self):
        with pytest.raises(UsageError):
            cfg(trials=0)

    def test_many_trials_all_pass(self):
        rep = run_direct_finiteness(cfg(trials=40, group=Z2, field=F5, n=2))
        assert rep.failures == 0
        assert len(rep.outcomes) == 40
        assert [o["trial"] for o in rep.outcomes] == list(range(40))

    def test_rediscovery_route(self):
        rep = run_direct_finiteness(cfg(trials=4, rediscover_inverse=True))
        assert rep.failures == 0
        assert all("radius" in o for o in rep.outcomes)

    def test_threaded_run_matches_sequential(self):
        config = cfg(trials=6, group=Z1, field=F2, n=2)
        sequential = run_direct_finiteness(config)
        with mock.patch.dict(os.environ, {"D1_THREADS": "4"}):
            threaded = run_direct_finiteness(config)
        assert sequential.outcomes == threaded.outcomes


class TestPipeline:
    def test_fixed_f3_style_config(self):
        rep = run_surjunctivity_pipeline(cfg(trials=5))
        assert rep.failures == 0
        assert all(o["ok"] for o in rep.outcomes)

    def test_decoy_flags_bounded_evidence(self):
        rep = run_surjunctivity_pipeline(cfg(trials=3, decoy_every=3, field=F2))
        decoys = [o for o in rep.outcomes if o.get("decoy")]
        assert len(decoys) == 1
        assert decoys[0]["verdict"] == "bounded_evidence"
        assert decoys[0]["ok"]
        assert rep.failures == 0

    def test_free_group_trials(self):
        rep = run_surjunctivity_pipeline(cfg(trials=4, group=F2FREE, field=F5))
        assert rep.failures == 0


class TestReportDeterminism:
    def test_bitwise_replay_modulo_timing(self):
        from d1ring.envelope import suite_report_payload

        config = cfg(trials=5, group=Z2, field=F2, n=2)
        a = suite_report_payload(run_direct_finiteness(config), omit_timing=True)
        b = suite_report_payload(run_direct_finiteness(config), omit_timing=True)
        assert a == b


def test_element_radius():
    u, _ = f3_pair()
    assert element_radius(u) == 1
    assert element_radius(TwistedElement.one(Z1, F3)) == 0


def test_decoy_has_expected_shape():
    t = decoy_nuca(Z2, F5, 2)
    assert t.n == 2
    assert len(t.element.regular.terms) == 2
    assert not t.element.singular
