"""Conformance checking against the loop-free, array-free target grammar.

A conformant program contains no ``for`` statements (degenerate single-trip
loops kept by the break/continue optimization are whitelisted via their
construction flag), no array accesses anywhere, and starts with a prefix of
statements that initialize every witness index from ``nd(lo, hi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .astnodes import (
    ArrayAccess,
    Assign,
    Block,
    ChainAssign,
    For,
    NdRange,
    Program,
    Var,
    walk,
)


@dataclass
class Violation:
    loc: int
    message: str


@dataclass
class ConformanceReport:
    conformant: bool
    violations: list[Violation] = field(default_factory=list)
    loop_count: int = 0
    array_access_count: int = 0


def _init_prefix_targets(p: Program) -> set[str]:
    """Identifiers assigned nd(lo, hi) in the leading run of init statements."""
    targets: set[str] = set()
    for s in p.body.stmts:
        match s:
            case ChainAssign(ts, NdRange()):
                targets.update(ts)
            case Assign(Var(name), NdRange()):
                targets.add(name)
            case _:
                break
    return targets


def validate_output_grammar(
    p: Program, witness_indices: Iterable[str] | None = None
) -> ConformanceReport:
    """Report every target-grammar violation in ``p``.

    ``witness_indices`` names the witness-index variables whose initialization
    must lead the program; when omitted (e.g. for a standalone file) only the
    structural loop/array conditions are checked.
    """
    violations: list[Violation] = []
    loops = 0
    accesses = 0
    for node in walk(p.body):
        match node:
            case For(loc=loc, single_trip=single):
                loops += 1
                if not single:
                    violations.append(Violation(loc, "loop statement in output program"))
            case ArrayAccess(array=name, loc=loc):
                accesses += 1
                violations.append(Violation(loc, f"array access to {name!r} in output program"))
            case Block():
                # Blocks may only appear as statement bodies; nothing to check.
                pass
    if witness_indices is not None:
        initialized = _init_prefix_targets(p)
        for name in witness_indices:
            if name not in initialized:
                violations.append(
                    Violation(
                        p.body.loc,
                        f"witness index {name!r} is not initialized by a leading nd(lo, hi)",
                    )
                )
    return ConformanceReport(
        conformant=not violations,
        violations=violations,
        loop_count=loops,
        array_access_count=accesses,
    )
