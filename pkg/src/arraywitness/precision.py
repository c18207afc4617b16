"""Classifies assertions for which the transformation is exact.

For a qualifying assertion the transformed program fails if and only if the
original does, so a bounded model checker's verdict transfers back. The check
works by showing that no nondeterministically chosen value introduced by the
transformation can reach the assertion: the enclosing loop and every loop
feeding it must be full-access (rule l1), dependent array reads must use the
loop iterator as index (a2) on arrays that keep their witness variable intact
(a3), and dependent scalars must not be clobbered by the nd brackets (s4),
with matching conditions d5/d6 on the defining assignments. Rules s4 and d6
admit a relaxation when the scalar is re-defined from a constant or the loop
iterator before every use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import LoopSummary, analyze_program
from .astnodes import (
    ArrayAccess,
    Assert,
    Assign,
    BinOp,
    Block,
    Break,
    Const,
    Continue,
    For,
    If,
    IfElse,
    Input,
    Program,
    Read,
    Var,
    asserts_of,
    children,
    find_node,
    walk,
)

RULE_IDS = ("l1", "a2", "a3", "s4", "d5", "d6")


class AssertionOutsideLoop(Exception):
    pass


@dataclass
class DependenceClosure:
    v_imp: set[str]
    e_imp: set[int]  # location ids of dependent array access expressions
    s_def: set[int]  # location ids of loops whose definitions reach the assertion


@dataclass
class RuleViolation:
    rule: str
    loc: int
    note: str

    def to_json_dict(self) -> dict:
        return {"rule": self.rule, "location": self.loc, "note": self.note}


@dataclass
class PrecisionVerdict:
    assertion_loc: int
    precise: bool
    violated_rules: list[RuleViolation] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "location": self.assertion_loc,
            "precise": self.precise,
            "violated_rules": [v.to_json_dict() for v in self.violated_rules],
        }


# ---------------------------------------------------------------------------
# expression helpers


def _scalar_reads(e) -> set[str]:
    return {
        n.lv.name for n in walk(e) if isinstance(n, Read) and isinstance(n.lv, Var)
    }


def _array_reads(e) -> list[ArrayAccess]:
    return [n for n in walk(e) if isinstance(n, ArrayAccess)]


def _is_iter_read(e, iterator: str) -> bool:
    return isinstance(e, Read) and isinstance(e.lv, Var) and e.lv.name == iterator


def _const_or_iterator_only(e, iterator: str) -> bool:
    """RHS shapes whose value survives the transformation exactly: built from
    constants, the loop iterator and environment inputs (which the transform
    retains verbatim)."""
    for n in walk(e):
        match n:
            case Const() | BinOp() | Input():
                pass
            case Read(Var(name)) | Var(name):
                if name != iterator:
                    return False
            case _:
                return False
    return True


# ---------------------------------------------------------------------------
# context maps: enclosing loops and guarding conditions per node


class _Context:
    def __init__(self, p: Program):
        self.loops: dict[int, tuple[For, ...]] = {}
        self.guards: dict[int, tuple] = {}
        self._visit(p.body, (), ())

    def _visit(self, node, loops, guards) -> None:
        self.loops[id(node)] = loops
        self.guards[id(node)] = guards
        match node:
            case For():
                for c in children(node):
                    self._visit(c, loops + (node,), guards)
            case If(cond, then):
                self._visit(cond, loops, guards)
                self._visit(then, loops, guards + (cond,))
            case IfElse(cond, then, orelse):
                self._visit(cond, loops, guards)
                self._visit(then, loops, guards + (cond,))
                self._visit(orelse, loops, guards + (cond,))
            case _:
                for c in children(node):
                    self._visit(c, loops, guards)


# ---------------------------------------------------------------------------
# dependence closure


def _enclosing_loop(ctx: _Context, node) -> For:
    loops = ctx.loops[id(node)]
    if not loops:
        raise AssertionOutsideLoop(
            f"assertion at location {node.loc} is not inside a loop"
        )
    return loops[-1]


def dependence_closure(p: Program, assertion_loc: int) -> DependenceClosure:
    """Variables, array accesses and defining loops the assertion depends on.

    v_imp/e_imp are the data and control dependences within the enclosing
    loop; s_def collects every loop (anywhere) whose body defines a name the
    assertion transitively depends on. All three sets over-approximate.
    """
    ctx = _Context(p)
    assertion = find_node(p, assertion_loc)
    if not isinstance(assertion, Assert):
        raise ValueError(f"location {assertion_loc} is not an assertion")
    s_a = _enclosing_loop(ctx, assertion)

    v_imp, e_imp = _loop_dependences(ctx, s_a, assertion)
    s_def = _defining_loops(p, ctx, v_imp, {acc.array for acc in e_imp})
    return DependenceClosure(
        v_imp=v_imp,
        e_imp={acc.loc for acc in e_imp},
        s_def={loop.loc for loop in s_def},
    )


def _loop_dependences(
    ctx: _Context, s_a: For, assertion: Assert
) -> tuple[set[str], list[ArrayAccess]]:
    v_imp: set[str] = set()
    e_imp: list[ArrayAccess] = []
    seen_exprs: set[int] = set()

    def absorb(e) -> None:
        if id(e) in seen_exprs:
            return
        seen_exprs.add(id(e))
        v_imp.update(_scalar_reads(e))
        for acc in _array_reads(e):
            if acc.loc not in {a.loc for a in e_imp}:
                e_imp.append(acc)

    def guards_within_loop(node):
        return [g for g in ctx.guards[id(node)] if s_a in ctx.loops[id(g)]]

    absorb(assertion.cond)
    for g in guards_within_loop(assertion):
        absorb(g)

    changed = True
    while changed:
        changed = False
        before = (len(v_imp), len(e_imp), len(seen_exprs))
        rel_arrays = {acc.array for acc in e_imp}
        for node in walk(s_a.body):
            match node:
                case Assign(Var(name), rhs) if name in v_imp:
                    absorb(rhs)
                    for g in guards_within_loop(node):
                        absorb(g)
                case Assign(ArrayAccess(arr, idx), rhs) if arr in rel_arrays:
                    absorb(idx)
                    absorb(rhs)
                    for g in guards_within_loop(node):
                        absorb(g)
        if (len(v_imp), len(e_imp), len(seen_exprs)) != before:
            changed = True
    return v_imp, e_imp


def _defining_loops(
    p: Program, ctx: _Context, seed_scalars: set[str], seed_arrays: set[str]
) -> list[For]:
    rel_s = set(seed_scalars)
    rel_a = set(seed_arrays)
    changed = True
    while changed:
        changed = False
        for node in walk(p.body):
            match node:
                case Assign(Var(name), rhs) if name in rel_s:
                    sources = [rhs, *ctx.guards[id(node)]]
                case Assign(ArrayAccess(arr, idx), rhs) if arr in rel_a:
                    sources = [idx, rhs, *ctx.guards[id(node)]]
                case _:
                    continue
            for e in sources:
                s = _scalar_reads(e)
                a = {acc.array for acc in _array_reads(e)}
                if not (s <= rel_s and a <= rel_a):
                    rel_s |= s
                    rel_a |= a
                    changed = True
    loops: list[For] = []
    for loop in (n for n in walk(p.body) if isinstance(n, For)):
        for node in walk(loop.body):
            match node:
                case Assign(Var(name)) if name in rel_s:
                    loops.append(loop)
                    break
                case Assign(ArrayAccess(arr)) if arr in rel_a:
                    loops.append(loop)
                    break
    return loops


def _outside_loop_reads(
    p: Program, ctx: _Context, seed_scalars: set[str], seed_arrays: set[str]
) -> list[ArrayAccess]:
    """Dependent array reads located outside every loop.

    Such reads are transformed into guarded witness reads without a matching
    iterator pin, so no precision claim is possible for them.
    """
    rel_s = set(seed_scalars)
    reads: list[ArrayAccess] = []
    changed = True
    while changed:
        changed = False
        for node in walk(p.body):
            match node:
                case Assign(Var(name), rhs) if name in rel_s and not ctx.loops[id(node)]:
                    extra = _scalar_reads(rhs)
                    if not extra <= rel_s:
                        rel_s |= extra
                        changed = True
                    for acc in _array_reads(rhs):
                        if acc.loc not in {r.loc for r in reads}:
                            reads.append(acc)
                            changed = True
    return reads


# ---------------------------------------------------------------------------
# the s4/d6 relaxation: definition before use from a constant or the iterator


def _def_before_use_ok(loop: For, x: str) -> bool:
    """Every path through one body iteration re-defines ``x`` from a constant
    or the loop iterator before each of its uses. Anything unclear (nested
    loops touching ``x``) counts as a failure."""

    def uses(e) -> bool:
        return x in _scalar_reads(e)

    def stmt_ok(s, defined: bool) -> tuple[bool, bool]:
        # Returns (defined after s, still ok).
        match s:
            case Block(stmts):
                for sub in stmts:
                    defined, ok = stmt_ok(sub, defined)
                    if not ok:
                        return defined, False
                return defined, True
            case Assign(Var(name), rhs):
                if uses(rhs) and not defined:
                    return defined, False
                if name == x:
                    defined = _const_or_iterator_only(rhs, loop.iterator)
                return defined, True
            case Assign(ArrayAccess(_, idx), rhs):
                if (uses(idx) or uses(rhs)) and not defined:
                    return defined, False
                return defined, True
            case Assert(cond):
                return defined, defined or not uses(cond)
            case If(cond, then):
                if uses(cond) and not defined:
                    return defined, False
                d1, ok = stmt_ok(then, defined)
                return defined and d1, ok
            case IfElse(cond, then, orelse):
                if uses(cond) and not defined:
                    return defined, False
                d1, ok1 = stmt_ok(then, defined)
                d2, ok2 = stmt_ok(orelse, defined)
                return d1 and d2, ok1 and ok2
            case For(iterator=it):
                mentioned = it == x or any(
                    isinstance(n, Var) and n.name == x for n in walk(s)
                )
                if mentioned:
                    return False, False
                return defined, True
            case Break() | Continue():
                return defined, True
        return defined, True

    _, ok = stmt_ok(loop.body, False)
    return ok


# ---------------------------------------------------------------------------
# classification


def classify(p: Program, assertion_loc: int) -> PrecisionVerdict:
    """Apply the precision rules to one assertion.

    The verdict is conservative: a precise result guarantees the transformed
    program preserves the assertion's verdict, an imprecise result only means
    no guarantee is made.
    """
    ctx = _Context(p)
    assertion = find_node(p, assertion_loc)
    if not isinstance(assertion, Assert):
        raise ValueError(f"location {assertion_loc} is not an assertion")
    s_a = _enclosing_loop(ctx, assertion)
    _, summaries = analyze_program(p)

    v_imp, e_imp = _loop_dependences(ctx, s_a, assertion)
    rel_arrays = {acc.array for acc in e_imp}
    s_def = _defining_loops(p, ctx, v_imp, rel_arrays)
    involved = [s_a] + [s for s in s_def if s is not s_a]
    involved.sort(key=lambda s: s.loc)

    violations: list[RuleViolation] = []

    def summary(loop: For) -> LoopSummary:
        return summaries[loop.loc]

    # l1: the assertion loop and every defining loop covers its arrays fully.
    for loop in involved:
        if not summary(loop).full_access:
            violations.append(
                RuleViolation("l1", loop.loc, "loop is not a full-access loop")
            )

    # a2: dependent array reads are indexed by the assertion loop's iterator
    # and sit inside loops (reads outside any loop lose their iterator pin).
    for acc in e_imp:
        if not _is_iter_read(acc.index, s_a.iterator):
            violations.append(
                RuleViolation(
                    "a2",
                    acc.loc,
                    f"index of {acc.array}[...] is not the loop iterator "
                    f"{s_a.iterator!r}",
                )
            )
    for acc in _outside_loop_reads(p, ctx, v_imp, rel_arrays):
        violations.append(
            RuleViolation(
                "a2", acc.loc, f"dependent read of {acc.array!r} outside any loop"
            )
        )

    # a3: those arrays keep their witness variable across the involved loops.
    for arr in sorted(rel_arrays):
        for loop in involved:
            if arr in summary(loop).defs:
                violations.append(
                    RuleViolation(
                        "a3",
                        loop.loc,
                        f"array {arr!r} is nd-bracketed by the loop",
                    )
                )

    # s4: dependent scalars escape the nd brackets, or are re-defined from a
    # constant or the iterator before every use (relaxation).
    other_iterators = {
        loop.iterator for loop in walk(p.body)
        if isinstance(loop, For) and loop is not s_a
    }
    for x in sorted(v_imp):
        if x == s_a.iterator:
            continue  # pinned by the i = i_a the full-access form inserts
        clobbered = [loop for loop in involved if x in summary(loop).defs]
        if not clobbered and x in other_iterators:
            # Another loop's iterator is nd-assigned when that loop is
            # removed, which loop_defs does not record.
            clobbered = [s_a]
        if clobbered and not _def_before_use_ok(s_a, x):
            violations.append(
                RuleViolation(
                    "s4",
                    clobbered[0].loc,
                    f"scalar {x!r} may carry a nondeterministic value into "
                    "the assertion",
                )
            )

    # d5/d6: right-hand sides of array writes in defining loops.
    for loop in s_def:
        for node in walk(loop.body):
            match node:
                case Assign(ArrayAccess(), rhs):
                    for acc in _array_reads(rhs):
                        if not _is_iter_read(acc.index, loop.iterator):
                            violations.append(
                                RuleViolation(
                                    "d5",
                                    acc.loc,
                                    f"array read {acc.array}[...] not indexed "
                                    "by the defining loop's iterator",
                                )
                            )
                    for x in sorted(_scalar_reads(rhs) - {loop.iterator}):
                        if x in summary(loop).defs and not _def_before_use_ok(loop, x):
                            violations.append(
                                RuleViolation(
                                    "d6",
                                    node.loc,
                                    f"scalar {x!r} in the right-hand side is "
                                    "nd-bracketed without a dominating "
                                    "re-definition",
                                )
                            )

    return PrecisionVerdict(
        assertion_loc=assertion_loc,
        precise=not violations,
        violated_rules=violations,
    )


def classify_all(p: Program) -> list[PrecisionVerdict]:
    """One verdict per assertion, in program order. Assertions outside loops
    get an imprecise verdict (no precision claim is made for them)."""
    verdicts = []
    for a in asserts_of(p):
        try:
            verdicts.append(classify(p, a.loc))
        except AssertionOutsideLoop:
            verdicts.append(
                PrecisionVerdict(
                    assertion_loc=a.loc,
                    precise=False,
                    violated_rules=[
                        RuleViolation("l1", a.loc, "assertion is not inside a loop")
                    ],
                )
            )
    return verdicts


def classify_program(p: Program) -> bool | None:
    """True when every assertion classifies precise, None when there is no
    assertion, False otherwise (including assertions outside loops)."""
    assertions = asserts_of(p)
    if not assertions:
        return None
    try:
        return all(classify(p, a.loc).precise for a in assertions)
    except AssertionOutsideLoop:
        return False
