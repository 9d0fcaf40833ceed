"""Minimal closed shape language: minCount, maxCount, valueIn, datatypeIs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .rdf.terms import IRI, Literal, Term, term_key
from .store import Store

VIOLATION = "violation"
WARNING = "warning"


@dataclass(frozen=True)
class MinCount:
    path: IRI
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("minCount must be >= 0")

    def holds(self, values: list[Term]) -> bool:
        return len(values) >= self.n


@dataclass(frozen=True)
class MaxCount:
    path: IRI
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("maxCount must be >= 0")

    def holds(self, values: list[Term]) -> bool:
        return len(values) <= self.n


@dataclass(frozen=True)
class ValueIn:
    path: IRI
    allowed: frozenset

    def holds(self, values: list[Term]) -> bool:
        return all(v in self.allowed for v in values)


@dataclass(frozen=True)
class DatatypeIs:
    path: IRI
    datatype: str

    def holds(self, values: list[Term]) -> bool:
        return all(isinstance(v, Literal) and v.datatype == self.datatype for v in values)


Constraint = Union[MinCount, MaxCount, ValueIn, DatatypeIs]


@dataclass(frozen=True)
class RuleInstance:
    """One evaluation of a rule against one focus node."""

    rule_id: str
    focus_node: Term
    satisfied: bool
    severity: str
    message: str


@dataclass(frozen=True)
class Violation:
    rule_id: str
    focus_node: Term
    severity: str
    message: str

    def as_dict(self) -> dict:
        return {
            "ruleId": self.rule_id,
            "focusNode": _term_text(self.focus_node),
            "severity": self.severity,
            "message": self.message,
        }


def _term_text(term: Term) -> str:
    return term.value if isinstance(term, IRI) else term_key(term)


@dataclass(frozen=True)
class ShapeRule:
    id: str
    target_class: IRI
    constraint: Constraint
    message: str
    severity: str = VIOLATION

    def __post_init__(self):
        if not self.message:
            raise ValueError("shape rule message must be non-empty")
        if self.severity not in (VIOLATION, WARNING):
            raise ValueError(f"unknown severity {self.severity!r}")

    def evaluate(self, store: Store) -> list[RuleInstance]:
        out = []
        for focus in store.instances(self.target_class):
            values = store.objects(focus, self.constraint.path)
            out.append(RuleInstance(self.id, focus, self.constraint.holds(values), self.severity, self.message))
        return out


def violations_of(instances: Iterable[RuleInstance]) -> list[Violation]:
    seen = set()
    out = []
    for inst in instances:
        if inst.satisfied:
            continue
        key = (inst.rule_id, inst.focus_node, inst.message)
        if key in seen:
            continue
        seen.add(key)
        out.append(Violation(inst.rule_id, inst.focus_node, inst.severity, inst.message))
    out.sort(key=lambda v: (v.rule_id, term_key(v.focus_node), v.message))
    return out


def check_shapes(store: Store, rules: Iterable) -> list[Violation]:
    """One violation per (rule, focus node) breach; empty means conformant."""
    instances: list[RuleInstance] = []
    for rule in rules:
        instances.extend(rule.evaluate(store))
    return violations_of(instances)


__all__ = [
    "Constraint",
    "DatatypeIs",
    "MaxCount",
    "MinCount",
    "RuleInstance",
    "ShapeRule",
    "VIOLATION",
    "ValueIn",
    "Violation",
    "WARNING",
    "check_shapes",
    "violations_of",
]
