"""Mode theories: names, structural properties, and the preorder between modes.

A mode theory assigns every mode a subset of the structural properties
{W, C} (weakening and contraction) and orders modes by a preorder that
must respect those properties: whenever m >= k, the properties of m
must include those of k.  Exchange is always available and therefore
not represented.

Only the generating pairs of the order are declared; the reflexive
transitive closure is computed here once and queried everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

WEAKENING = "W"
CONTRACTION = "C"
PROPERTIES = frozenset({WEAKENING, CONTRACTION})


class ModeError(Exception):
    """A malformed mode declaration: duplicates or references to unknown modes."""


@dataclass(frozen=True)
class ModeTheory:
    modes: tuple[str, ...]
    sigma: Mapping[str, frozenset[str]]
    declared_order: tuple[tuple[str, str], ...]
    # Reflexive-transitive closure of declared_order, as a set of (m, k) pairs.
    closure: frozenset[tuple[str, str]] = field(repr=False)

    def geq(self, m: str, k: str) -> bool:
        """True iff m >= k in the closure of the declared order."""
        self._require(m)
        self._require(k)
        return (m, k) in self.closure

    def geq_all(self, ms: Iterable[str], k: str) -> bool:
        return all(self.geq(m, k) for m in ms)

    def props(self, m: str) -> frozenset[str]:
        self._require(m)
        return self.sigma[m]

    def has_weakening(self, m: str) -> bool:
        return WEAKENING in self.props(m)

    def has_contraction(self, m: str) -> bool:
        return CONTRACTION in self.props(m)

    def multiplicity_ok(self, n: int, m: str) -> bool:
        """The |S| ~ m relation: 0 needs W, 1 is always fine, >= 2 needs C."""
        if n < 0:
            raise ValueError("multiplicity must be nonnegative")
        if n == 1:
            return True
        if n == 0:
            return self.has_weakening(m)
        return self.has_contraction(m)

    def validate(self) -> list[str]:
        """Check sigma-monotonicity along the closed order.

        Returns one message per offending pair (m, k); an empty list
        means the theory is usable.
        """
        violations = []
        for m, k in sorted(self.closure):
            if not self.sigma[m] >= self.sigma[k]:
                violations.append(
                    f"mode {m} >= {k} but sigma({m}) = {set(self.sigma[m]) or '{}'} "
                    f"does not include sigma({k}) = {set(self.sigma[k]) or '{}'}"
                )
        return violations

    def _require(self, m: str):
        if m not in self.sigma:
            raise ModeError(f"undeclared mode: {m}")


def make_theory(
    modes: Iterable[tuple[str, Iterable[str]]],
    order: Iterable[tuple[str, str]] = (),
) -> ModeTheory:
    """Build a theory from (name, properties) pairs and generating order pairs.

    Raises ModeError for duplicate mode names, unknown property letters,
    or order pairs mentioning undeclared modes.  Monotonicity of sigma is
    *not* enforced here; call validate() for that, so that violations can
    be reported rather than raised.
    """
    names: list[str] = []
    sigma: dict[str, frozenset[str]] = {}
    for name, props in modes:
        if name in sigma:
            raise ModeError(f"duplicate mode name: {name}")
        props = frozenset(props)
        bad = props - PROPERTIES
        if bad:
            raise ModeError(f"unknown structural properties for {name}: {sorted(bad)}")
        names.append(name)
        sigma[name] = props
    pairs = []
    for m, k in order:
        if m not in sigma:
            raise ModeError(f"order mentions undeclared mode: {m}")
        if k not in sigma:
            raise ModeError(f"order mentions undeclared mode: {k}")
        pairs.append((m, k))
    closure = _closure(names, pairs)
    return ModeTheory(tuple(names), sigma, tuple(pairs), closure)


def _closure(names: list[str], pairs: list[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    geq = {(n, n) for n in names}
    geq.update(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(geq):
            for c, d in list(geq):
                if b == c and (a, d) not in geq:
                    geq.add((a, d))
                    changed = True
    return frozenset(geq)


def context_geq(theory: ModeTheory, context: Iterable[tuple[str, object]], k: str) -> bool:
    """The declaration of independence: every antecedent's mode is >= k.

    Context entries are (channel, type) pairs where the type exposes its
    mode through a ``mode`` attribute.
    """
    return all(theory.geq(t.mode, k) for _, t in context)
