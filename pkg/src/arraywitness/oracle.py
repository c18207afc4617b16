"""Exhaustive small-scale interpreter for both program forms.

Enumerates every combination of nondeterministic choices (``nd()``,
``nd(l,u)`` and ``input()``) depth-first with choice values ascending, so the
first failure found is the lexicographically smallest witness. Serves as the
ground truth for the differential soundness and precision checks.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .analysis import ARRAY_INT, BoundKind, loop_bound
from .astnodes import (
    ArrayAccess,
    Assert,
    Assign,
    BinOp,
    Block,
    Break,
    ChainAssign,
    Const,
    Continue,
    For,
    If,
    IfElse,
    Input,
    Nd,
    NdRange,
    Program,
    Read,
    Ternary,
    TernaryAssign,
    Var,
    children,
    walk,
)


class OracleError(Exception):
    pass


class BudgetExceeded(OracleError):
    pass


class NonConstantBound(OracleError):
    pass


class _Failure(Exception):
    def __init__(self, loc: int, choices: list[int], state: dict[str, int]):
        self.loc = loc
        self.choices = choices
        self.state = state


@dataclass
class OracleConfig:
    value_domain: tuple[int, int] = (0, 3)
    max_steps: int = 5_000_000  # total across the whole enumeration
    array_size_override: int | None = None

    def __post_init__(self) -> None:
        if self.value_domain[0] > self.value_domain[1]:
            raise ValueError("value_domain must be non-empty")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class Trace:
    nd_choices: list[int]
    failing_assert: int
    final_state: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "nd_choices": list(self.nd_choices),
            "failing_assert": self.failing_assert,
            "final_state": dict(self.final_state),
        }


@dataclass
class Verdict:
    outcome: str  # "safe" | "unsafe"
    witness: Trace | None = None

    @property
    def safe(self) -> bool:
        return self.outcome == "safe"


@dataclass
class DifferentialResult:
    orig_verdict: Verdict
    trans_verdict: Verdict
    precise: bool | None  # None: program has no classifiable assertion
    sound: bool = field(init=False)
    precise_consistent: bool | None = field(init=False)

    def __post_init__(self) -> None:
        self.sound = self.orig_verdict.safe or not self.trans_verdict.safe
        if self.precise:
            self.precise_consistent = self.orig_verdict.safe == self.trans_verdict.safe
        else:
            self.precise_consistent = None


def _c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _c_mod(a: int, b: int) -> int:
    return a - b * _c_div(a, b)


def scale_arrays(p: Program, new_size: int) -> Program:
    """Copy of ``p`` with every array resized to ``new_size``.

    Constants equal to an original array size (or size minus one) are
    rewritten accordingly, so constant loop bounds and last-index literals
    track the new size. Ambiguous constant mappings are rejected.
    """
    q = copy.deepcopy(p)
    mapping: dict[int, int] = {}
    for d in q.decls:
        if d.kind != ARRAY_INT:
            continue
        for old, new in ((d.size, new_size), (d.size - 1, new_size - 1)):
            if old in mapping and mapping[old] != new:
                raise OracleError(
                    f"ambiguous size override: constant {old} maps to both "
                    f"{mapping[old]} and {new}"
                )
            mapping[old] = new
        d.size = new_size
    for node in walk(q.body):
        if isinstance(node, Const) and node.value in mapping:
            node.value = mapping[node.value]
    return q


def _check_constant_bounds(p: Program) -> None:
    for node in walk(p.body):
        if isinstance(node, For) and loop_bound(node).kind == BoundKind.UNKNOWN:
            raise NonConstantBound(
                f"loop at location {node.loc} has a non-constant bound"
            )


def _initial_state(p: Program) -> dict:
    state: dict = {}
    for d in p.decls:
        state[d.name] = [0] * d.size if d.kind == ARRAY_INT else 0
    return state


def _flatten(state: dict) -> dict[str, int]:
    flat: dict[str, int] = {}
    for name, value in state.items():
        if isinstance(value, list):
            for i, v in enumerate(value):
                flat[f"{name}[{i}]"] = v
        else:
            flat[name] = value
    return flat


def _copy_state(state: dict) -> dict:
    return {k: (list(v) if isinstance(v, list) else v) for k, v in state.items()}


class _Machine:
    def __init__(
        self,
        p: Program,
        cfg: OracleConfig,
        on_complete: Callable[[dict], None] | None = None,
        script: list[int] | None = None,
        on_array_access: Callable[[str, int], None] | None = None,
    ):
        self.cfg = cfg
        self.on_complete = on_complete
        # When set, choice points consume prescribed values instead of
        # enumerating: replays one run from a recorded trace.
        self.script = script
        self.on_array_access = on_array_access
        self.steps = 0
        self._choiceful: dict[int, bool] = {}
        self._mark_choiceful(p.body)

    def _mark_choiceful(self, node) -> bool:
        has = isinstance(node, (Nd, NdRange, Input))
        for c in children(node):
            if self._mark_choiceful(c):
                has = True
        self._choiceful[id(node)] = has
        return has

    def has_choice(self, node) -> bool:
        return self._choiceful.get(id(node), True)

    def _scripted(self, choices: list[int], lo: int, hi: int, loc: int):
        pos = len(choices)
        if pos >= len(self.script):
            raise OracleError(f"trace exhausted at choice {pos} (location {loc})")
        v = self.script[pos]
        if not lo <= v <= hi:
            raise OracleError(
                f"scripted value {v} outside [{lo}, {hi}] at location {loc}"
            )
        return v, choices + [v]

    # -- expression evaluation --------------------------------------------

    def eval_det(self, e, state) -> int:
        """Evaluate a choice-free expression."""
        match e:
            case Const(value):
                return value
            case Read(Var(name)):
                return state[name]
            case Read(ArrayAccess(array, index)):
                i = self.eval_det(index, state)
                arr = state[array]
                if not 0 <= i < len(arr):
                    raise OracleError(
                        f"index {i} out of bounds for {array}[{len(arr)}] "
                        f"at location {e.loc}"
                    )
                if self.on_array_access is not None:
                    self.on_array_access(array, i)
                return arr[i]
            case BinOp(op, lhs, rhs):
                a = self.eval_det(lhs, state)
                if op == "&&":
                    return 1 if a != 0 and self.eval_det(rhs, state) != 0 else 0
                if op == "||":
                    return 1 if a != 0 or self.eval_det(rhs, state) != 0 else 0
                b = self.eval_det(rhs, state)
                return self._apply(op, a, b, e.loc)
            case Ternary(cond, then, orelse):
                taken = then if self.eval_det(cond, state) != 0 else orelse
                return self.eval_det(taken, state)
        raise OracleError(f"cannot evaluate {type(e).__name__} deterministically")

    def _apply(self, op: str, a: int, b: int, loc: int) -> int:
        match op:
            case "+":
                return a + b
            case "-":
                return a - b
            case "*":
                return a * b
            case "/" | "%":
                if b == 0:
                    raise _DivByZero(loc)
                return _c_div(a, b) if op == "/" else _c_mod(a, b)
            case "==":
                return 1 if a == b else 0
            case "!=":
                return 1 if a != b else 0
            case "<":
                return 1 if a < b else 0
            case "<=":
                return 1 if a <= b else 0
            case ">":
                return 1 if a > b else 0
            case ">=":
                return 1 if a >= b else 0
        raise OracleError(f"unknown operator {op!r}")

    def eval(self, e, state, choices: list[int]) -> Iterator[tuple[int, list[int]]]:
        """Enumerate the possible values of ``e``, threading choice lists."""
        if not self.has_choice(e):
            yield self.eval_det(e, state), choices
            return
        match e:
            case Nd() | Input():
                lo, hi = self.cfg.value_domain
                if self.script is not None:
                    yield self._scripted(choices, lo, hi, e.loc)
                    return
                for v in range(lo, hi + 1):
                    yield v, choices + [v]
            case NdRange(lo_e, hi_e):
                for lo, ch1 in self.eval(lo_e, state, choices):
                    for hi, ch2 in self.eval(hi_e, state, ch1):
                        if self.script is not None:
                            yield self._scripted(ch2, lo, hi, e.loc)
                            return
                        for v in range(lo, hi + 1):
                            yield v, ch2 + [v]
            case BinOp("&&", lhs, rhs):
                for a, ch in self.eval(lhs, state, choices):
                    if a == 0:
                        yield 0, ch
                    else:
                        for b, ch2 in self.eval(rhs, state, ch):
                            yield (1 if b != 0 else 0), ch2
            case BinOp("||", lhs, rhs):
                for a, ch in self.eval(lhs, state, choices):
                    if a != 0:
                        yield 1, ch
                    else:
                        for b, ch2 in self.eval(rhs, state, ch):
                            yield (1 if b != 0 else 0), ch2
            case BinOp(op, lhs, rhs):
                for a, ch in self.eval(lhs, state, choices):
                    for b, ch2 in self.eval(rhs, state, ch):
                        try:
                            yield self._apply(op, a, b, e.loc), ch2
                        except _DivByZero as d:
                            # Carry this branch's choice list so replaying the
                            # trace reproduces the division failure.
                            raise _Failure(d.loc, ch2, _flatten(state)) from None
            case Ternary(cond, then, orelse):
                for c, ch in self.eval(cond, state, choices):
                    taken = then if c != 0 else orelse
                    yield from self.eval(taken, state, ch)
            case Read(ArrayAccess(array, index)):
                for i, ch in self.eval(index, state, choices):
                    arr = state[array]
                    if not 0 <= i < len(arr):
                        raise OracleError(
                            f"index {i} out of bounds for {array}[{len(arr)}] "
                            f"at location {e.loc}"
                        )
                    if self.on_array_access is not None:
                        self.on_array_access(array, i)
                    yield arr[i], ch
            case _:
                yield self.eval_det(e, state), choices

    # -- statement execution ----------------------------------------------

    def run(self, work: list, state: dict, choices: list[int]) -> None:
        """Execute the work stack to completion; raises _Failure on the first
        failing run, returns after all runs completed safely."""
        while work:
            self.steps += 1
            if self.steps > self.cfg.max_steps:
                raise BudgetExceeded(
                    f"enumeration exceeded {self.cfg.max_steps} steps"
                )
            item = work.pop()
            try:
                if isinstance(item, tuple):
                    if self._exec_marker(item, work, state, choices):
                        return
                elif self._exec_stmt(item, work, state, choices):
                    return
            except _DivByZero as d:
                raise _Failure(d.loc, choices, _flatten(state)) from None
        if self.on_complete is not None:
            self.on_complete(_flatten(state))

    # The _exec helpers return True when they handled the rest of the
    # execution through recursion (i.e. the caller must stop this frame).

    def _exec_marker(self, item, work, state, choices) -> bool:
        kind, loop = item
        if kind == "inc":
            return self._assign_scalar(loop.iterator, loop.step, work, state, choices)
        # kind == "test": a true test queues one iteration then retests.
        if not self.has_choice(loop.test):
            if self.eval_det(loop.test, state) != 0:
                work += [item, ("inc", loop), loop.body]
            return False
        for v, ch in self.eval(loop.test, state, choices):
            w = list(work)
            if v != 0:
                w += [item, ("inc", loop), loop.body]
            self.run(w, _copy_state(state), ch)
        return True

    def _assign_scalar(self, name, e, work, state, choices) -> bool:
        if not self.has_choice(e):
            state[name] = self.eval_det(e, state)
            return False
        for v, ch in self.eval(e, state, choices):
            st = _copy_state(state)
            st[name] = v
            self.run(list(work), st, ch)
        return True

    def _exec_stmt(self, s, work, state, choices) -> bool:
        match s:
            case Block(stmts):
                work.extend(reversed(stmts))
                return False
            case Assign(Var(name), value):
                return self._assign_scalar(name, value, work, state, choices)
            case Assign(ArrayAccess(array, index), value):
                if not self.has_choice(index) and not self.has_choice(value):
                    i = self.eval_det(index, state)
                    arr = state[array]
                    if not 0 <= i < len(arr):
                        raise OracleError(
                            f"index {i} out of bounds for {array}[{len(arr)}] "
                            f"at location {s.loc}"
                        )
                    arr[i] = self.eval_det(value, state)
                    if self.on_array_access is not None:
                        self.on_array_access(array, i)
                    return False
                for i, ch1 in self.eval(index, state, choices):
                    for v, ch2 in self.eval(value, state, ch1):
                        arr = state[array]
                        if not 0 <= i < len(arr):
                            raise OracleError(
                                f"index {i} out of bounds for {array}[{len(arr)}] "
                                f"at location {s.loc}"
                            )
                        st = _copy_state(state)
                        st[array][i] = v
                        if self.on_array_access is not None:
                            self.on_array_access(array, i)
                        self.run(list(work), st, ch2)
                return True
            case ChainAssign(targets, value):
                if not self.has_choice(value):
                    v = self.eval_det(value, state)
                    for t in targets:
                        state[t] = v
                    return False
                for v, ch in self.eval(value, state, choices):
                    st = _copy_state(state)
                    for t in targets:
                        st[t] = v
                    self.run(list(work), st, ch)
                return True
            case TernaryAssign(cond, Var(name), value, discard):
                for c, ch1 in self.eval(cond, state, choices):
                    if c != 0:
                        for v, ch2 in self.eval(value, state, ch1):
                            st = _copy_state(state)
                            st[name] = v
                            self.run(list(work), st, ch2)
                    else:
                        # Discarded side: evaluated for its choices and
                        # possible division failure only.
                        for _, ch2 in self.eval(discard, state, ch1):
                            self.run(list(work), _copy_state(state), ch2)
                return True
            case Assert(cond):
                if not self.has_choice(cond):
                    if self.eval_det(cond, state) == 0:
                        raise _Failure(s.loc, choices, _flatten(state))
                    return False
                for v, ch in self.eval(cond, state, choices):
                    if v == 0:
                        raise _Failure(s.loc, ch, _flatten(state))
                    self.run(list(work), _copy_state(state), ch)
                return True
            case If(cond, then):
                if not self.has_choice(cond):
                    if self.eval_det(cond, state) != 0:
                        work.append(then)
                    return False
                for v, ch in self.eval(cond, state, choices):
                    w = list(work)
                    if v != 0:
                        w.append(then)
                    self.run(w, _copy_state(state), ch)
                return True
            case IfElse(cond, then, orelse):
                if not self.has_choice(cond):
                    work.append(then if self.eval_det(cond, state) != 0 else orelse)
                    return False
                for v, ch in self.eval(cond, state, choices):
                    w = list(work)
                    w.append(then if v != 0 else orelse)
                    self.run(w, _copy_state(state), ch)
                return True
            case For(iterator=it, init=init):
                if self._assign_scalar(it, init, work + [("test", s)], state, choices):
                    return True
                work.append(("test", s))
                return False
            case Break():
                while work:
                    item = work.pop()
                    if isinstance(item, tuple) and item[0] == "test":
                        break
                return False
            case Continue():
                while work:
                    top = work[-1]
                    if isinstance(top, tuple) and top[0] == "inc":
                        break
                    work.pop()
                return False
        raise OracleError(f"cannot execute {type(s).__name__}")


class _DivByZero(Exception):
    def __init__(self, loc: int):
        self.loc = loc


def _prepare(p: Program, cfg: OracleConfig) -> Program:
    if cfg.array_size_override is not None:
        p = scale_arrays(p, cfg.array_size_override)
    _check_constant_bounds(p)
    return p


def enumerate_runs(
    p: Program,
    cfg: OracleConfig | None = None,
    on_complete: Callable[[dict], None] | None = None,
    on_array_access: Callable[[str, int], None] | None = None,
) -> Verdict:
    """Explore every run of ``p`` under ``cfg``.

    Returns Safe, or Unsafe with the lexicographically first failing trace.
    Division or modulo by zero makes the offending run unsafe at that
    location. ``on_array_access`` observes every in-bounds array read and
    write as ``(array_name, index)``.
    """
    cfg = cfg or OracleConfig()
    p = _prepare(p, cfg)
    machine = _Machine(p, cfg, on_complete=on_complete, on_array_access=on_array_access)
    try:
        machine.run([p.body], _initial_state(p), [])
    except _Failure as f:
        return Verdict("unsafe", Trace(f.choices, f.loc, f.state))
    return Verdict("safe")


def replay_trace(
    p: Program, choices: list[int], cfg: OracleConfig | None = None
) -> Verdict:
    """Re-run ``p`` feeding ``choices`` to the nondeterministic sources.

    A trace recorded from :func:`enumerate_runs` deterministically reproduces
    its verdict, including the failing assertion location.
    """
    cfg = cfg or OracleConfig()
    p = _prepare(p, cfg)
    machine = _Machine(p, cfg, script=list(choices))
    try:
        machine.run([p.body], _initial_state(p), [])
    except _Failure as f:
        return Verdict("unsafe", Trace(f.choices, f.loc, f.state))
    return Verdict("safe")


def collect_final_states(p: Program, cfg: OracleConfig | None = None) -> list[dict]:
    """Final states of all completed runs (the program must be safe)."""
    states: list[dict] = []
    verdict = enumerate_runs(p, cfg, on_complete=states.append)
    if not verdict.safe:
        raise OracleError("program is unsafe; no complete run census available")
    return states


def differential_check(
    original: Program,
    transformed: Program | None = None,
    cfg: OracleConfig | None = None,
) -> DifferentialResult:
    """Compare oracle verdicts of a program and its transformation.

    When ``cfg.array_size_override`` is set, the override is applied to the
    original first and the transformation re-derived from the scaled program,
    keeping the pair consistent.
    """
    from .precision import classify_program
    from .transform import transform_program

    cfg = cfg or OracleConfig()
    if cfg.array_size_override is not None:
        original = scale_arrays(original, cfg.array_size_override)
        transformed = transform_program(original)
        cfg = OracleConfig(cfg.value_domain, cfg.max_steps, None)
    elif transformed is None:
        transformed = transform_program(original)
    return DifferentialResult(
        orig_verdict=enumerate_runs(original, cfg),
        trans_verdict=enumerate_runs(transformed, cfg),
        precise=classify_program(original),
    )
