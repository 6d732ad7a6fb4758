"""Canonical JSON serialization for all artifact objects.

Every file is an envelope: a header (format version, group, field,
coefficient shape, payload kind) plus a payload.  Serialization of a
canonical-form object round-trips byte-for-byte; parsing a legal but
non-canonical payload (stored zeros, unsorted terms, unreduced words,
out-of-range residues) repairs it and flags the envelope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import FormatError
from .exactalg import FieldSpec
from .experiments import SuiteConfig, SuiteReport
from .groupring import GroupRingElement, Shape, coeff_encode, coeff_parse
from .groups import GroupSpec
from .invert import (
    InjectivityVerdict,
    KernelTowerReport,
    SearchBudget,
)
from .nuca import Configuration, InducedLocalMap, Nuca
from .twisted import TwistedElement, TwistedMatrix

FORMAT_VERSION = 1

_PARSEABLE_KINDS = ("groupring", "twisted", "twisted_matrix", "configuration")
_WRITE_ONLY_KINDS = (
    "local_map",
    "kernel_tower_report",
    "verdict",
    "inverse_search",
    "suite_report",
)


# -- payload encoders ---------------------------------------------------------------

def groupring_payload(a: GroupRingElement) -> dict:
    return {
        "terms": [
            [a.group.encode_element(g), coeff_encode(a.field, c)] for g, c in a.terms
        ]
    }


def twisted_payload(u: TwistedElement) -> dict:
    return {
        "regular": groupring_payload(u.regular),
        "singular": [
            [u.group.encode_element(g), groupring_payload(part)]
            for g, part in u.singular
        ],
    }


def twisted_matrix_payload(m: TwistedMatrix) -> dict:
    return {
        "size": m.n,
        "entries": [[twisted_payload(e) for e in row] for row in m.entries],
    }


def configuration_payload(x: Configuration) -> dict:
    enc = x.field.encode_scalar
    return {
        "base": [enc(v) for v in x.base],
        "deviation": [
            [x.group.encode_element(g), [enc(c) for c in v]] for g, v in x.deviation
        ],
    }


def local_map_payload(m: InducedLocalMap) -> dict:
    enc = m.field.encode_scalar
    return {
        "domain": [m.group.encode_element(g) for g in m.domain_set],
        "codomain": [m.group.encode_element(g) for g in m.codomain_set],
        "matrix": [[enc(x) for x in row] for row in m.matrix.to_lists()],
    }


def budget_payload(b: SearchBudget) -> dict:
    return {"max_radius": b.max_radius, "depth": b.depth, "window": b.window}


def tower_report_payload(r: KernelTowerReport) -> dict:
    return {
        "depth": r.depth,
        "window": r.window,
        "levels": [
            {
                "level": lv.level,
                "kernel_dim": lv.kernel_dim,
                "stable_dim": lv.stable_dim,
                "stabilized_at": lv.stabilized_at,
            }
            for lv in r.levels
        ],
    }


def verdict_payload(v: InjectivityVerdict) -> dict:
    return {
        "verdict": v.kind,
        "budget": budget_payload(v.budget),
        "certificate": None if v.certificate is None else twisted_payload(v.certificate.element),
        "certificate_radius": v.certificate_radius,
        "witness": None if v.witness is None else configuration_payload(v.witness),
        "witness_scope": v.witness_scope,
        "witness_radius": v.witness_radius,
        "tower": None if v.tower is None else tower_report_payload(v.tower),
    }


def inverse_search_payload(side: str, hit: Optional[tuple[Nuca, int]]) -> dict:
    return {
        "found": hit is not None,
        "side": side,
        "radius": None if hit is None else hit[1],
        "certificate": None if hit is None else twisted_payload(hit[0].element),
    }


def suite_config_payload(c: SuiteConfig) -> dict:
    return {
        "seed": c.seed,
        "trials": c.trials,
        "group": c.group.label(),
        "field": c.field.label(),
        "n": c.n,
        "support_radius": c.support_radius,
        "budget": budget_payload(c.budget),
        "max_factors": c.max_factors,
        "rediscover_inverse": c.rediscover_inverse,
        "decoy_every": c.decoy_every,
    }


def suite_report_payload(r: SuiteReport, omit_timing: bool = False) -> dict:
    return {
        "suite": r.suite,
        "config": suite_config_payload(r.config),
        "note": r.note,
        "passes": r.passes,
        "failures": r.failures,
        "wall_clock_s": None if omit_timing else r.wall_clock_s,
        "outcomes": list(r.outcomes),
    }


# -- payload parsers -------------------------------------------------------------------

def parse_groupring(
    group: GroupSpec, field: FieldSpec, shape: Shape, payload
) -> GroupRingElement:
    if not isinstance(payload, dict) or "terms" not in payload:
        raise FormatError("group ring payload needs a 'terms' list")
    if not isinstance(payload["terms"], list):
        raise FormatError("'terms' must be a list")
    terms = []
    for entry in payload["terms"]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise FormatError(f"bad term {entry!r}: expected [element, coefficient]")
        g, _ = group.parse_element(entry[0])
        c, _ = coeff_parse(field, shape, entry[1])
        terms.append((g, c))
    return GroupRingElement.from_terms(group, field, shape, terms)


def parse_twisted(
    group: GroupSpec, field: FieldSpec, shape: Shape, payload
) -> TwistedElement:
    if not isinstance(payload, dict) or "regular" not in payload or "singular" not in payload:
        raise FormatError("twisted payload needs 'regular' and 'singular'")
    regular = parse_groupring(group, field, shape, payload["regular"])
    sing = []
    if not isinstance(payload["singular"], list):
        raise FormatError("'singular' must be a list")
    for entry in payload["singular"]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise FormatError(f"bad singular pair {entry!r}")
        g, _ = group.parse_element(entry[0])
        part = parse_groupring(group, field, shape, entry[1])
        sing.append((g, part))
    return TwistedElement.make(regular, sing)


def parse_twisted_matrix(
    group: GroupSpec, field: FieldSpec, shape: Shape, payload
) -> TwistedMatrix:
    if not isinstance(payload, dict) or "size" not in payload or "entries" not in payload:
        raise FormatError("twisted matrix payload needs 'size' and 'entries'")
    size = payload["size"]
    entries = payload["entries"]
    if not isinstance(size, int) or size < 1:
        raise FormatError(f"bad matrix size {size!r}")
    if not isinstance(entries, list) or len(entries) != size or any(
        not isinstance(row, list) or len(row) != size for row in entries
    ):
        raise FormatError("'entries' must be a size x size grid")
    rows = tuple(
        tuple(parse_twisted(group, field, shape, e) for e in row) for row in entries
    )
    return TwistedMatrix(size, rows)


def parse_configuration(
    group: GroupSpec, field: FieldSpec, n: int, payload
) -> Configuration:
    if not isinstance(payload, dict) or "base" not in payload or "deviation" not in payload:
        raise FormatError("configuration payload needs 'base' and 'deviation'")
    base_raw = payload["base"]
    if not isinstance(base_raw, list) or len(base_raw) != n:
        raise FormatError(f"'base' must be a vector of length {n}")
    base = [field.parse_scalar(x)[0] for x in base_raw]
    dev = []
    if not isinstance(payload["deviation"], list):
        raise FormatError("'deviation' must be a list")
    for entry in payload["deviation"]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise FormatError(f"bad deviation pair {entry!r}")
        g, _ = group.parse_element(entry[0])
        vec_raw = entry[1]
        if not isinstance(vec_raw, list) or len(vec_raw) != n:
            raise FormatError(f"deviation vectors must have length {n}")
        dev.append((g, [field.parse_scalar(x)[0] for x in vec_raw]))
    return Configuration.make(group, field, n, base, dev)


# -- envelopes -----------------------------------------------------------------------------

@dataclass
class Envelope:
    group: GroupSpec
    field: FieldSpec
    n: Shape
    kind: str
    payload: object  # the live object
    canonicalized: bool = False  # True when parsing had to repair the payload

    def payload_obj(self, omit_timing: bool = False):
        kind, value = self.kind, self.payload
        if kind == "groupring":
            return groupring_payload(value)
        if kind == "twisted":
            return twisted_payload(value)
        if kind == "twisted_matrix":
            return twisted_matrix_payload(value)
        if kind == "configuration":
            return configuration_payload(value)
        if kind == "local_map":
            return local_map_payload(value)
        if kind == "kernel_tower_report":
            return tower_report_payload(value)
        if kind == "verdict":
            return verdict_payload(value)
        if kind == "inverse_search":
            side, hit = value
            return inverse_search_payload(side, hit)
        if kind == "suite_report":
            return suite_report_payload(value, omit_timing=omit_timing)
        raise FormatError(f"unknown payload kind {self.kind!r}")


def serialize_envelope(env: Envelope, omit_timing: bool = False) -> str:
    doc = {
        "header": {
            "format_version": FORMAT_VERSION,
            "group": env.group.label(),
            "field": env.field.label(),
            "n": env.n,
            "kind": env.kind,
        },
        "payload": env.payload_obj(omit_timing=omit_timing),
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_envelope(text: str) -> Envelope:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "header" not in doc or "payload" not in doc:
        raise FormatError("envelope needs 'header' and 'payload'")
    header = doc["header"]
    if not isinstance(header, dict):
        raise FormatError("'header' must be an object")
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(
            f"format_version mismatch: expected {FORMAT_VERSION}, got {version!r}"
        )
    for key in ("group", "field", "kind"):
        if key not in header:
            raise FormatError(f"header is missing {key!r}")
    group = GroupSpec.from_label(header["group"])
    field = FieldSpec.from_label(header["field"])
    n = header.get("n")
    if n is not None and (not isinstance(n, int) or isinstance(n, bool) or n < 1):
        raise FormatError(f"header 'n' must be null or a positive integer, got {n!r}")
    kind = header["kind"]
    if kind in _WRITE_ONLY_KINDS:
        raise FormatError(f"payload kind {kind!r} is write-only")
    if kind not in _PARSEABLE_KINDS:
        raise FormatError(f"unknown payload kind {kind!r}")

    payload = doc["payload"]
    if kind == "groupring":
        value = parse_groupring(group, field, n, payload)
    elif kind == "twisted":
        value = parse_twisted(group, field, n, payload)
    elif kind == "twisted_matrix":
        value = parse_twisted_matrix(group, field, n, payload)
    else:
        if n is None:
            raise FormatError("configurations need an integer 'n' in the header")
        value = parse_configuration(group, field, n, payload)

    env = Envelope(group, field, n, kind, value)
    env.canonicalized = env.payload_obj() != payload
    return env


def envelope_for(value, n: Shape = None) -> Envelope:
    """Wrap a live object in an envelope with the right header."""
    if isinstance(value, GroupRingElement):
        return Envelope(value.group, value.field, value.shape, "groupring", value)
    if isinstance(value, TwistedElement):
        return Envelope(value.group, value.field, value.shape, "twisted", value)
    if isinstance(value, TwistedMatrix):
        return Envelope(value.group, value.field, value.shape, "twisted_matrix", value)
    if isinstance(value, Nuca):
        return Envelope(value.group, value.field, value.n, "twisted", value.element)
    if isinstance(value, Configuration):
        return Envelope(value.group, value.field, value.n, "configuration", value)
    if isinstance(value, InducedLocalMap):
        return Envelope(value.group, value.field, value.n, "local_map", value)
    raise FormatError(f"cannot wrap {type(value).__name__} in an envelope")
