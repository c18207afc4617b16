"""Rewrites array-manipulating loop programs into loop-free, array-free form.

Every array gets a witness pair: a witness index fixed once per run by
``nd(0, size-1)`` and a witness variable standing for the element at that
index. Array accesses become guarded uses of the witness variable; loop
bodies are kept (once) while loop headers are dropped, with nondeterministic
re-assignments over-approximating the effect of the removed iterations.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

from .analysis import (
    ArrayInfo,
    BoundKind,
    LoopSummary,
    analyze_program,
)
from .astnodes import (
    ARRAY_INT,
    SCALAR_INT,
    ArrayAccess,
    Assert,
    Assign,
    BinOp,
    Block,
    Break,
    ChainAssign,
    Const,
    Continue,
    Decl,
    For,
    If,
    IfElse,
    Nd,
    NdRange,
    Program,
    Read,
    Stmt,
    Ternary,
    TernaryAssign,
    Var,
    assign_locs,
    walk,
)


class TransformError(Exception):
    pass


@dataclass
class TransformContext:
    arrays: dict[str, ArrayInfo]
    summaries: dict[int, LoopSummary]
    decl_order: dict[str, int]
    aux_decls: list[Decl]
    taken_names: set[str]
    trailing_nds: set[int]  # ids of the iterator nd-assigns added after loops


@dataclass
class TransformResult:
    program: Program
    arrays: list[ArrayInfo]
    summaries: dict[int, LoopSummary]

    @property
    def witness_indices(self) -> list[str]:
        return [a.witness_idx for a in self.arrays]


def _read(name: str):
    return Read(Var(name))


def transform_expr(e, ctx: TransformContext):
    match e:
        case BinOp(op, lhs, rhs):
            return BinOp(op, transform_expr(lhs, ctx), transform_expr(rhs, ctx))
        case Read(ArrayAccess(array, index)):
            info = ctx.arrays[array]
            return Ternary(
                BinOp("==", transform_expr(index, ctx), _read(info.witness_idx)),
                _read(info.witness_var),
                Nd(),
            )
        case _:
            return e


def _nd_assign(name: str, ctx: TransformContext) -> Assign:
    """u = nd(); array members target their witness variable."""
    if name in ctx.arrays:
        return Assign(Var(ctx.arrays[name].witness_var), Nd())
    return Assign(Var(name), Nd())


def _defs_in_order(summary: LoopSummary, ctx: TransformContext) -> list[str]:
    return sorted(summary.defs, key=lambda n: ctx.decl_order.get(n, len(ctx.decl_order)))


def _iterator_nd_bound(summary: LoopSummary, ctx: TransformContext):
    """nd range for the iterator of a non-full-access loop."""
    bound = summary.bound
    if bound.kind == BoundKind.KNOWN:
        return NdRange(Const(bound.lo), Const(bound.hi))
    if bound.kind == BoundKind.EMPTY:
        # Unsatisfiable range: the guarded body contributes no behavior,
        # matching the zero-trip original.
        lo = summary.init_const if summary.init_const is not None else 0
        return NdRange(Const(lo), Const(lo - 1))
    if len(summary.accessed_arrays) == 1:
        info = ctx.arrays[summary.accessed_arrays[0]]
        return NdRange(Const(0), Const(info.lastof))
    return Nd()


def _fresh_scalar(base: str, ctx: TransformContext) -> str:
    name = base
    n = 0
    while name in ctx.taken_names:
        n += 1
        name = f"{base}_{n}"
    ctx.taken_names.add(name)
    ctx.aux_decls.append(Decl(name, SCALAR_INT))
    return name


def transform_loop(s: For, ctx: TransformContext) -> list[Stmt]:
    summary = ctx.summaries[s.loc]
    defs = _defs_in_order(summary, ctx)
    pre = [_nd_assign(u, ctx) for u in defs]
    post = [_nd_assign(u, ctx) for u in defs]
    # The original header always runs its init and leaves the iterator at its
    # exit value; nd() after the body keeps later reads over-approximated.
    trailing = Assign(Var(s.iterator), Nd())
    ctx.trailing_nds.add(id(trailing))
    post.append(trailing)
    body = transform_stmt(s.body, ctx)

    if summary.has_break_or_continue:
        # Keep a degenerate header so break/continue still bind to a loop
        # that runs the body at most once.
        once = _fresh_scalar("once", ctx)
        trip = For(
            once,
            Const(0),
            BinOp("<", _read(once), Const(1)),
            BinOp("+", _read(once), Const(1)),
            Block(body),
            single_trip=True,
        )
        guarded = Block(
            pre + [Assign(Var(s.iterator), _iterator_nd_bound(summary, ctx)), trip]
        )
        return [If(NdRange(Const(0), Const(1)), guarded)] + post

    if summary.full_access:
        iter_init = [
            Assign(Var(s.iterator), _read(ctx.arrays[a].witness_idx))
            for a in summary.accessed_arrays
        ]
        return pre + iter_init + body + post

    inner: list[Stmt] = body
    if (
        summary.bound.kind == BoundKind.KNOWN
        and summary.step_const is not None
        and summary.step_const > 1
    ):
        # Non-unit monotone increment: only iterator values congruent to the
        # start value modulo the step occur in the original loop.
        c3 = summary.step_const
        aligned = BinOp(
            "==",
            BinOp("%", _read(s.iterator), Const(c3)),
            Const(summary.bound.lo % c3),
        )
        inner = [If(aligned, Block(body))]
    guarded = Block(
        pre + [Assign(Var(s.iterator), _iterator_nd_bound(summary, ctx))] + inner
    )
    return [If(NdRange(Const(0), Const(1)), guarded)] + post


def transform_stmt(s, ctx: TransformContext) -> list[Stmt]:
    match s:
        case Block(stmts):
            out: list[Stmt] = []
            for sub in stmts:
                out.extend(transform_stmt(sub, ctx))
            return out
        case Assign(ArrayAccess(array, index), value):
            info = ctx.arrays[array]
            rhs = transform_expr(value, ctx)
            return [
                TernaryAssign(
                    BinOp("==", transform_expr(index, ctx), _read(info.witness_idx)),
                    Var(info.witness_var),
                    rhs,
                    copy.deepcopy(rhs),
                )
            ]
        case Assign(Var() as target, value):
            return [Assign(target, transform_expr(value, ctx))]
        case For():
            return transform_loop(s, ctx)
        case IfElse(cond, then, orelse):
            return [
                IfElse(
                    transform_expr(cond, ctx),
                    _as_stmt(transform_stmt(then, ctx)),
                    _as_stmt(transform_stmt(orelse, ctx)),
                )
            ]
        case If(cond, then):
            return [If(transform_expr(cond, ctx), _as_stmt(transform_stmt(then, ctx)))]
        case Assert(cond):
            return [Assert(transform_expr(cond, ctx))]
        case Break() | Continue():
            return [s]
        case _:
            raise TransformError(f"unsupported statement: {type(s).__name__}")


def _as_stmt(stmts: list[Stmt]) -> Stmt:
    if len(stmts) == 1:
        return stmts[0]
    return Block(stmts)


def _check_source_grammar(p: Program) -> None:
    for node in walk(p.body):
        if isinstance(node, (Nd, NdRange, Ternary, TernaryAssign, ChainAssign)):
            raise TransformError(
                f"construct {type(node).__name__} at location {node.loc} is only "
                "valid in already-transformed programs"
            )


def _witness_inits(arrays: list[ArrayInfo]) -> list[Stmt]:
    """One nd(0, lastof) initialization per size class; same-size witness
    indices are equated so one run tracks the same position in each array."""
    by_size: dict[int, list[ArrayInfo]] = {}
    for a in arrays:
        by_size.setdefault(a.size, []).append(a)
    inits: list[Stmt] = []
    for size, group in by_size.items():
        rng = NdRange(Const(0), Const(size - 1))
        if len(group) == 1:
            inits.append(Assign(Var(group[0].witness_idx), rng))
        else:
            inits.append(ChainAssign([a.witness_idx for a in group], rng))
    return inits


def _mentions_var(node, name: str) -> bool:
    return any(isinstance(n, Var) and n.name == name for n in walk(node))


def _prune_dead_nd(root: Block, prunable: set[int]) -> None:
    """Drop the trailing iterator nd-assigns that are certainly overwritten
    before any read (e.g. the next full-access loop re-pins the iterator).
    Keeps the enumeration small without changing behavior; the nd brackets
    for loop defs are never touched."""
    blocks = [b for b in walk(root) if isinstance(b, Block)]
    for b in blocks:
        kept: list[Stmt] = []
        for idx, s in enumerate(b.stmts):
            if id(s) in prunable and _overwritten_before_read(
                b.stmts[idx + 1 :], s.target.name
            ):
                continue
            kept.append(s)
        b.stmts[:] = kept


def _overwritten_before_read(rest: list[Stmt], x: str) -> bool:
    for t in rest:
        match t:
            case Assign(Var(name), value) if name == x:
                return not _mentions_var(value, x)
            case ChainAssign(targets, value) if x in targets:
                return not _mentions_var(value, x)
        if _mentions_var(t, x):
            return False
    return False


def transform_with_info(p: Program) -> TransformResult:
    _check_source_grammar(p)
    arrays, summaries = analyze_program(p)
    source = copy.deepcopy(p)  # transformed nodes get renumbered locations
    ctx = TransformContext(
        arrays={a.name: a for a in arrays},
        summaries=summaries,
        decl_order={d.name: n for n, d in enumerate(p.decls)},
        aux_decls=[],
        taken_names={d.name for d in p.decls}
        | {a.witness_var for a in arrays}
        | {a.witness_idx for a in arrays},
        trailing_nds=set(),
    )
    block = Block(_witness_inits(arrays) + transform_stmt(source.body, ctx))
    _prune_dead_nd(block, ctx.trailing_nds)
    body = block.stmts
    decls: list[Decl] = []
    for a in arrays:
        decls.append(Decl(a.witness_var, SCALAR_INT))
        decls.append(Decl(a.witness_idx, SCALAR_INT))
    decls.extend(d for d in source.decls if d.kind != ARRAY_INT)
    decls.extend(ctx.aux_decls)
    out = assign_locs(Program(decls, Block(body)))
    return TransformResult(program=out, arrays=arrays, summaries=summaries)


def transform_program(p: Program) -> Program:
    """Transform a source-grammar program into target-grammar form."""
    return transform_with_info(p).program
