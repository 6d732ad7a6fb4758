"""Exact arithmetic and finite-subset algebra for the universe groups.

Two families are supported: Z^d (elements are integer coordinate tuples)
and free groups F_r (elements are reduced words, stored as tuples of
signed 1-based generator indices: +1 = 'a', -1 = 'A' = a^-1, +2 = 'b', ...).

Both representations are plain tuples, so elements are hashable and
immutable; a GroupSpec carries the operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import FormatError, UsageError

Element = tuple

_MAX_FREE_RANK = 26
_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def reduce_word(letters: Sequence[int]) -> Element:
    """Freely reduce a word, cancelling adjacent inverse pairs."""
    out: list[int] = []
    for c in letters:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def _letter_key(c: int) -> int:
    # a < a^-1 < b < b^-1 < ...
    return 2 * abs(c) - (2 if c > 0 else 1)


@dataclass(frozen=True)
class GroupSpec:
    """Which group the elements live in: Z^d ("Zd") or F_rank ("free")."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("Zd", "free"):
            raise UsageError(f"unknown group kind {self.kind!r}")
        if self.dim < 1:
            raise UsageError("group dimension/rank must be >= 1")
        if self.kind == "free" and self.dim > _MAX_FREE_RANK:
            raise UsageError(f"free rank capped at {_MAX_FREE_RANK}")

    @staticmethod
    def zd(d: int) -> "GroupSpec":
        return GroupSpec("Zd", d)

    @staticmethod
    def free(rank: int) -> "GroupSpec":
        return GroupSpec("free", rank)

    # -- element algebra ---------------------------------------------------

    @property
    def identity(self) -> Element:
        return (0,) * self.dim if self.kind == "Zd" else ()

    def check(self, g: Element) -> None:
        """Validate that g is a well-formed element of this group."""
        if not isinstance(g, tuple):
            raise UsageError(f"group element must be a tuple, got {type(g).__name__}")
        if self.kind == "Zd":
            if len(g) != self.dim or not all(isinstance(c, int) for c in g):
                raise UsageError(f"expected an integer vector of length {self.dim}: {g!r}")
        else:
            for c in g:
                if not isinstance(c, int) or c == 0 or abs(c) > self.dim:
                    raise UsageError(f"letter {c!r} out of range for free rank {self.dim}")
            for a, b in zip(g, g[1:]):
                if a == -b:
                    raise UsageError(f"word {g!r} is not reduced")

    def compose(self, g: Element, h: Element) -> Element:
        if self.kind == "Zd":
            return tuple(a + b for a, b in zip(g, h))
        out = list(g)
        for c in h:
            if out and out[-1] == -c:
                out.pop()
            else:
                out.append(c)
        return tuple(out)

    def inverse(self, g: Element) -> Element:
        if self.kind == "Zd":
            return tuple(-a for a in g)
        return tuple(-c for c in reversed(g))

    def key(self, g: Element):
        """Sort key realizing the canonical total order.

        Z^d: lexicographic on coordinates.  Free: shortlex with
        a < a^-1 < b < b^-1 < ...
        """
        if self.kind == "Zd":
            return g
        return (len(g), tuple(_letter_key(c) for c in g))

    def canonical_cmp(self, g: Element, h: Element) -> int:
        kg, kh = self.key(g), self.key(h)
        return (kg > kh) - (kg < kh)

    def sort(self, elems: Iterable[Element]) -> tuple[Element, ...]:
        """Deduplicate and sort under the canonical order."""
        return tuple(sorted(set(elems), key=self.key))

    def norm(self, g: Element) -> int:
        """Radius of the smallest ball containing g (Chebyshev / word length)."""
        if self.kind == "Zd":
            return max((abs(c) for c in g), default=0)
        return len(g)

    def ball(self, radius: int) -> tuple[Element, ...]:
        """Canonically ordered ball: the centered box [-r, r]^d for Z^d,
        all reduced words of length <= r for free groups."""
        if radius < 0:
            raise UsageError("radius must be >= 0")
        if self.kind == "Zd":
            rng = range(-radius, radius + 1)
            return self.sort(itertools.product(rng, repeat=self.dim))
        words: list[Element] = [()]
        frontier: list[Element] = [()]
        for _ in range(radius):
            nxt = []
            for w in frontier:
                for c in range(1, self.dim + 1):
                    for s in (c, -c):
                        if not w or w[-1] != -s:
                            nxt.append(w + (s,))
            words.extend(nxt)
            frontier = nxt
        return self.sort(words)

    # -- serialization ------------------------------------------------------

    def label(self) -> str:
        return f"{self.kind}:{self.dim}"

    @staticmethod
    def from_label(label: str) -> "GroupSpec":
        try:
            kind, dim = label.split(":")
            return GroupSpec(kind, int(dim))
        except (ValueError, UsageError) as exc:
            raise FormatError(f"bad group label {label!r}: {exc}") from None

    def encode_element(self, g: Element):
        """JSON value for g: integer array for Z^d, letter string for free."""
        if self.kind == "Zd":
            return list(g)
        return "".join(
            _LETTERS[c - 1] if c > 0 else _LETTERS[-c - 1].upper() for c in g
        )

    def parse_element(self, value) -> tuple[Element, bool]:
        """Parse a JSON value into an element.

        Returns (element, repaired); repaired is True when the input was
        legal but not canonical (an unreduced free word).
        """
        if self.kind == "Zd":
            if not isinstance(value, list) or len(value) != self.dim:
                raise FormatError(f"expected an integer array of length {self.dim}: {value!r}")
            if not all(isinstance(c, int) and not isinstance(c, bool) for c in value):
                raise FormatError(f"non-integer coordinate in {value!r}")
            return tuple(value), False
        if not isinstance(value, str):
            raise FormatError(f"expected a word string: {value!r}")
        letters = []
        for ch in value:
            idx = _LETTERS.find(ch.lower())
            if idx < 0 or idx >= self.dim:
                raise FormatError(f"letter {ch!r} out of range for free rank {self.dim}")
            letters.append(-(idx + 1) if ch.isupper() else idx + 1)
        word = reduce_word(letters)
        return word, len(word) != len(letters)


@dataclass(frozen=True)
class FiniteSubset:
    """A finite subset of a group, canonically ordered and duplicate-free."""

    group: GroupSpec
    elements: tuple[Element, ...]

    @staticmethod
    def make(group: GroupSpec, elems: Iterable[Element]) -> "FiniteSubset":
        elems = tuple(elems)
        for g in elems:
            group.check(g)
        return FiniteSubset(group, group.sort(elems))

    @staticmethod
    def ball(group: GroupSpec, radius: int) -> "FiniteSubset":
        return FiniteSubset(group, group.ball(radius))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: Element) -> bool:
        return g in self._index

    @cached_property
    def _index(self) -> dict[Element, int]:
        return {g: i for i, g in enumerate(self.elements)}

    def position(self, g: Element) -> int:
        return self._index[g]

    def union(self, other: "FiniteSubset") -> "FiniteSubset":
        self._check_group(other)
        return FiniteSubset(self.group, self.group.sort(self.elements + other.elements))

    def product(self, other: "FiniteSubset") -> "FiniteSubset":
        """The product set {e*f : e in self, f in other}."""
        self._check_group(other)
        grp = self.group
        prods = {grp.compose(e, f) for e in self.elements for f in other.elements}
        return FiniteSubset(grp, grp.sort(prods))

    def translate(self, g: Element) -> "FiniteSubset":
        """Left translate g * self."""
        grp = self.group
        return FiniteSubset(grp, grp.sort(grp.compose(g, e) for e in self.elements))

    def inverse(self) -> "FiniteSubset":
        grp = self.group
        return FiniteSubset(grp, grp.sort(grp.inverse(e) for e in self.elements))

    def _check_group(self, other: "FiniteSubset") -> None:
        if self.group != other.group:
            raise UsageError("finite subsets live in different groups")


def product_set(E: FiniteSubset, F: FiniteSubset) -> FiniteSubset:
    return E.product(F)
