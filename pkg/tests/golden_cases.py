"""Shared fixture definitions for the CLI golden-file tests.

`write_inputs` materializes the input envelopes; CASES maps each
subcommand invocation to its expected-stdout file.  Regenerate the
expected outputs with `python3 tests/make_golden.py` after an intentional
format change, and review the diff before committing.
"""

from __future__ import annotations

import json
from pathlib import Path

from d1ring.envelope import envelope_for, serialize_envelope
from d1ring.exactalg import FieldSpec
from d1ring.experiments import decoy_nuca
from d1ring.groupring import GroupRingElement
from d1ring.groups import GroupSpec
from d1ring.nuca import Configuration, Nuca
from d1ring.twisted import TwistedElement

GOLDEN = Path(__file__).parent / "golden"
INPUTS = GOLDEN / "inputs"
EXPECTED = GOLDEN / "expected"

Z1 = GroupSpec.zd(1)
F2 = FieldSpec.fp(2)
F3 = FieldSpec.fp(3)


def _gre(group, field, shape, terms):
    return GroupRingElement.from_terms(group, field, shape, terms)


def build_inputs() -> dict[str, str]:
    """Name -> serialized envelope for every fixture file."""
    alpha = _gre(Z1, F3, None, [((0,), 1)])
    u = TwistedElement.make(alpha, [((0,), _gre(Z1, F3, None, [((1,), 1)]))])
    v = TwistedElement.make(alpha, [((0,), _gre(Z1, F3, None, [((1,), 2)]))])

    alpha1 = _gre(Z1, F3, 1, [((0,), ((1,),))])
    nuca_u = Nuca(TwistedElement.make(alpha1, [((0,), _gre(Z1, F3, 1, [((1,), ((1,),))]))]))
    nuca_v = Nuca(TwistedElement.make(alpha1, [((0,), _gre(Z1, F3, 1, [((1,), ((2,),))]))]))

    apply_alpha = _gre(Z1, F3, 1, [((0,), ((1,),)), ((1,), ((1,),))])
    nuca_apply = Nuca(
        TwistedElement.make(apply_alpha, [((0,), _gre(Z1, F3, 1, [((0,), ((1,),))]))])
    )

    a_f2 = _gre(Z1, F2, None, [((0,), 1), ((1,), 1)])

    shuffle_x = TwistedElement.make(
        _gre(Z1, F2, 2, [((0,), ((1, 0), (0, 0)))]),
        [((1,), _gre(Z1, F2, 2, [((0,), ((0, 1), (0, 0)))]))],
    )

    x0 = Configuration.make(Z1, F3, 1, [0], [((0,), [1])])

    nilpotent = Nuca(
        TwistedElement.make(_gre(Z1, F2, 2, [((0,), ((0, 1), (0, 0)))]), [])
    )

    files = {
        "u_f3.json": serialize_envelope(envelope_for(u)),
        "v_f3.json": serialize_envelope(envelope_for(v)),
        "nuca_u_f3.json": serialize_envelope(envelope_for(nuca_u)),
        "nuca_v_f3.json": serialize_envelope(envelope_for(nuca_v)),
        "nuca_apply_f3.json": serialize_envelope(envelope_for(nuca_apply)),
        "a_f2.json": serialize_envelope(envelope_for(a_f2)),
        "x_shuffle_f2.json": serialize_envelope(envelope_for(shuffle_x)),
        "x0_f3.json": serialize_envelope(envelope_for(x0)),
        "decoy_f2.json": serialize_envelope(envelope_for(decoy_nuca(Z1, F2, 1))),
        "nilpotent_f2.json": serialize_envelope(envelope_for(nilpotent)),
    }

    # a legal but non-canonical file: stored zero coefficient, unsorted terms
    doc = json.loads(files["u_f3.json"])
    doc["payload"]["regular"]["terms"] = [[[5], 0], [[0], 1]]
    files["noncanonical.json"] = json.dumps(doc, indent=2) + "\n"
    return files


def write_inputs() -> None:
    INPUTS.mkdir(parents=True, exist_ok=True)
    for name, text in build_inputs().items():
        (INPUTS / name).write_text(text)


def path(name: str) -> str:
    return str(INPUTS / name)


# (expected stdout file, argv, expected exit code)
CASES = [
    ("mul.json", ["mul", "-a", path("u_f3.json"), "-b", path("v_f3.json"), "-o", "-"], 0),
    ("add.json", ["add", "-a", path("u_f3.json"), "-b", path("v_f3.json"), "-o", "-"], 0),
    ("embed.json", ["embed", "-a", path("a_f2.json"), "-o", "-"], 0),
    ("f_shuffle.json", ["f-shuffle", "-a", path("x_shuffle_f2.json"), "-o", "-"], 0),
    ("apply.json", ["apply", "-t", path("nuca_apply_f3.json"), "-x", path("x0_f3.json"), "-o", "-"], 0),
    ("compose.json", ["compose", "-a", path("nuca_v_f3.json"), "-b", path("nuca_u_f3.json"), "-o", "-"], 0),
    ("verify_identity.txt", ["verify-identity", path("nuca_u_f3.json"), path("nuca_v_f3.json")], 0),
    ("local_map.json", ["local-map", "-t", path("nuca_apply_f3.json"), "--sites", "[[0],[1]]", "-o", "-"], 0),
    ("invert.json", ["invert", path("nuca_u_f3.json"), "--side", "left", "--max-radius", "3", "-o", "-"], 0),
    ("kernel_tower.json", ["kernel-tower", path("decoy_f2.json"), "--depth", "5", "--window", "3", "-o", "-"], 0),
    ("verdict.json", ["verdict", path("nilpotent_f2.json"), "--max-radius", "2", "-o", "-"], 0),
    (
        "experiment_direct_finiteness.json",
        ["experiment", "direct-finiteness", "--group", "Zd:1", "--field", "Fp:2",
         "--n", "1", "--seed", "7", "--trials", "3", "--omit-timing", "-o", "-"],
        0,
    ),
    (
        "experiment_pipeline.json",
        ["experiment", "pipeline", "--group", "Zd:1", "--field", "Fp:3", "--n", "1",
         "--seed", "7", "--trials", "3", "--decoy-every", "3", "--omit-timing", "-o", "-"],
        0,
    ),
    ("fmt.json", ["fmt", path("noncanonical.json"), "-o", "-"], 0),
]
