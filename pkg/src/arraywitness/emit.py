"""Renders transformed programs as verifier-ready C and writes the JSON report.

Three nondeterminism styles are supported: ``cbmc`` (nondet_int and
__CPROVER_assume), ``svcomp`` (__VERIFIER_nondet_int and __VERIFIER_assume)
and ``stub`` (self-contained helpers reading choices from the ND_CHOICES
environment variable, so the file compiles and runs standalone).

``strip_scaffolding`` inverts the lowering: the emitted text, with prototypes
and stub bodies removed and the nd temporaries folded back, re-parses to the
same AST that was emitted.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .analysis import ArrayInfo, BoundKind, LoopSummary
from .astnodes import (
    ARRAY_INT,
    Assert,
    Assign,
    Block,
    Break,
    ChainAssign,
    Continue,
    For,
    If,
    IfElse,
    Input,
    Nd,
    NdRange,
    Program,
    TernaryAssign,
    Var,
    walk,
)
from .grammar import validate_output_grammar
from .precision import PrecisionVerdict
from .printer import _print_step, print_expr

ND_STYLES = ("cbmc", "svcomp", "stub")

_BEGIN = "/* --- begin program --- */"
_END = "/* --- end program --- */"


class EmitError(Exception):
    pass


@dataclass
class EmitConfig:
    nd_style: str = "cbmc"
    header_comment: bool = True

    def __post_init__(self) -> None:
        if self.nd_style not in ND_STYLES:
            raise ValueError(f"nd_style must be one of {ND_STYLES}")


_STYLE_CALLS = {
    "cbmc": ("nondet_int()", "__CPROVER_assume"),
    "svcomp": ("__VERIFIER_nondet_int()", "__VERIFIER_assume"),
    "stub": ("__stub_nd()", "__stub_assume"),
}

_PREAMBLES = {
    "cbmc": [
        "#include <assert.h>",
        "int nondet_int(void);",
        "void __CPROVER_assume(int cond);",
    ],
    "svcomp": [
        "#include <assert.h>",
        "extern int __VERIFIER_nondet_int(void);",
        "extern void __VERIFIER_assume(int cond);",
    ],
    "stub": [
        "#include <assert.h>",
        "#include <stdio.h>",
        "#include <stdlib.h>",
        "#include <string.h>",
        "static const char *__stub_cursor;",
        "static int __stub_nd(void) {",
        "  if (__stub_cursor == NULL) {",
        '    const char *env = getenv("ND_CHOICES");',
        '    __stub_cursor = env == NULL ? "" : env;',
        "  }",
        "  if (*__stub_cursor == '\\0') return 0;",
        "  char *end;",
        "  long v = strtol(__stub_cursor, &end, 10);",
        "  __stub_cursor = (*end == ',') ? end + 1 : end;",
        "  return (int)v;",
        "}",
        "static void __stub_assume(int cond) {",
        "  if (!cond) exit(0);  /* infeasible path */",
        "}",
    ],
}

_INPUT_DECLS = {
    "cbmc": "int input(void);",
    "svcomp": "extern int input(void);",
    "stub": "static int input(void) { return __stub_nd(); }",
}


class _CEmitter:
    """Mirrors the pretty printer's layout while lowering nd constructs."""

    def __init__(self, style: str):
        self.nd_call, self.assume = _STYLE_CALLS[style]
        self.temp_count = 0
        self.temp_names: dict[int, str] = {}  # id(NdRange node) -> temp name

    def expr(self, e, parent_prec: int = 0) -> str:
        match e:
            case Nd():
                return self.nd_call
            case NdRange():
                return self.temp_names[id(e)]
            case Input():
                return "input()"
            case _:
                pass
        # Delegate structure to the round-trip printer, but keep lowering
        # nested occurrences by overriding its dispatch through recursion.
        return _lowered_print_expr(self, e, parent_prec)

    def hoist(self, exprs, indent: int, out: list[str]) -> None:
        """Emit a temp + assume line for every nd(lo, hi) in ``exprs``."""
        pad = "  " * indent
        for root in exprs:
            for node in walk(root):
                if isinstance(node, NdRange):
                    name = f"__nd_{self.temp_count}"
                    self.temp_count += 1
                    self.temp_names[id(node)] = name
                    lo = self.expr(node.lo)
                    hi = self.expr(node.hi)
                    out.append(
                        f"{pad}int {name} = {self.nd_call}; "
                        f"{self.assume}({name} >= {lo} && {name} <= {hi});"
                    )

    def stmt(self, s, indent: int, out: list[str]) -> None:
        pad = "  " * indent
        match s:
            case Block(stmts):
                out.append(pad + "{")
                for sub in stmts:
                    self.stmt(sub, indent + 1, out)
                out.append(pad + "}")
            case Assign(target, value):
                self.hoist([value], indent, out)
                lhs = target.name if isinstance(target, Var) else None
                if lhs is None:
                    raise EmitError("array access in output program")
                out.append(f"{pad}{lhs} = {self.expr(value)};")
            case ChainAssign(targets, value):
                self.hoist([value], indent, out)
                chain = " = ".join(targets)
                out.append(f"{pad}{chain} = {self.expr(value)};")
            case TernaryAssign(cond, Var(name), value, discard):
                self.hoist([cond, value, discard], indent, out)
                out.append(
                    f"{pad}if ({self.expr(cond)}) {{ {name} = "
                    f"{self.expr(value)}; }} else {{ "
                    f"(void)({self.expr(discard)}); }}"
                )
            case Assert(cond):
                self.hoist([cond], indent, out)
                out.append(f"{pad}assert({self.expr(cond)});")
            case If(cond, then):
                self.hoist([cond], indent, out)
                out.append(f"{pad}if ({self.expr(cond)})")
                self.body(then, indent, out)
            case IfElse(cond, then, orelse):
                self.hoist([cond], indent, out)
                out.append(f"{pad}if ({self.expr(cond)})")
                self.body(then, indent, out)
                out.append(pad + "else")
                self.body(orelse, indent, out)
            case For(iterator, init, test, step, body):
                self.hoist([init, test, step], indent, out)
                out.append(
                    f"{pad}for ({iterator} = {self.expr(init)}; "
                    f"{self.expr(test)}; {_print_step(iterator, step)})"
                )
                self.body(body, indent, out)
            case Break():
                out.append(pad + "break;")
            case Continue():
                out.append(pad + "continue;")
            case _:
                raise EmitError(f"cannot emit {type(s).__name__}")

    def body(self, s, indent: int, out: list[str]) -> None:
        if isinstance(s, Block):
            self.stmt(s, indent, out)
        else:
            self.stmt(s, indent + 1, out)


def _lowered_print_expr(emitter: _CEmitter, e, parent_prec: int) -> str:
    from .astnodes import ArrayAccess, BinOp, Const, Read, Ternary
    from .printer import _PREC

    match e:
        case Const(value):
            return str(value)
        case Read(Var(name)):
            return name
        case Read(ArrayAccess()):
            raise EmitError("array access in output program")
        case BinOp(op, lhs, rhs):
            prec = _PREC[op]
            text = f"{emitter.expr(lhs, prec)} {op} {emitter.expr(rhs, prec + 1)}"
            return f"({text})" if prec < parent_prec else text
        case Ternary(cond, then, orelse):
            return (
                f"({emitter.expr(cond, 1)} ? {emitter.expr(then)} : "
                f"{emitter.expr(orelse)})"
            )
    raise EmitError(f"cannot emit expression {type(e).__name__}")


def emit_verifiable(p: Program, cfg: EmitConfig | None = None) -> str:
    """C text for an output-grammar program under the configured nd style."""
    cfg = cfg or EmitConfig()
    report = validate_output_grammar(p)
    if not report.conformant:
        first = report.violations[0]
        raise EmitError(
            f"program is not in the output grammar: {first.message} "
            f"(location {first.loc})"
        )
    lines: list[str] = []
    if cfg.header_comment:
        lines.append("/* loop-free, array-free harness; verify the asserts */")
    lines.extend(_PREAMBLES[cfg.nd_style])
    if any(isinstance(n, Input) for n in walk(p.body)):
        lines.append(_INPUT_DECLS[cfg.nd_style])
    lines.append(_BEGIN)
    for d in p.decls:
        if d.kind == ARRAY_INT:
            raise EmitError("array declaration in output program")
        lines.append(f"int {d.name};")
    lines.append("int main(void)")
    emitter = _CEmitter(cfg.nd_style)
    emitter.stmt(p.body, 0, lines)
    lines.append(_END)
    return "\n".join(lines) + "\n"


_ND_NAMES = ("nondet_int\\(\\)", "__VERIFIER_nondet_int\\(\\)", "__stub_nd\\(\\)")
_TEMP_RE = re.compile(
    r"^\s*int (__nd_\d+) = nd\(\); "
    r"(?:__CPROVER_assume|__VERIFIER_assume|__stub_assume)"
    r"\(\1 >= (.+) && \1 <= (.+)\);$"
)
_GUARDED_RE = re.compile(
    r"^(\s*)if \((.*)\) \{ (\w+) = (.*); \} else \{ \(void\)\((.*)\); \}$"
)


def strip_scaffolding(text: str) -> str:
    """Undo the C lowering so the program region re-parses with ``parse``."""
    try:
        start = text.index(_BEGIN) + len(_BEGIN)
        end = text.index(_END)
    except ValueError:
        raise EmitError("emitted markers not found") from None
    body = text[start:end]
    body = re.sub("|".join(_ND_NAMES), "nd()", body)

    temps: dict[str, str] = {}
    out_lines: list[str] = []
    for line in body.splitlines():
        m = _TEMP_RE.match(line)
        if m:
            temps[m.group(1)] = f"nd({m.group(2)}, {m.group(3)})"
            continue
        g = _GUARDED_RE.match(line)
        if g:
            indent, cond, name, value, discard = g.groups()
            line = f"{indent}({cond}) ? {name} = {value} : {discard};"
        for temp, call in temps.items():
            if temp in line:
                line = line.replace(temp, call)
        out_lines.append(line)
    stripped = "\n".join(out_lines)
    stripped = stripped.replace("int main(void)", "main()")
    return stripped.strip() + "\n"


# ---------------------------------------------------------------------------
# JSON report


REPORT_SCHEMA = {
    "type": "object",
    "required": ["arrays", "loops", "assertions"],
    "additionalProperties": False,
    "properties": {
        "arrays": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "size", "witness_var", "witness_idx"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "size": {"type": "integer", "minimum": 1},
                    "witness_var": {"type": "string"},
                    "witness_idx": {"type": "string"},
                },
            },
        },
        "loops": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["location", "full_access", "defs", "bound"],
                "additionalProperties": False,
                "properties": {
                    "location": {"type": "integer"},
                    "full_access": {"type": "boolean"},
                    "defs": {"type": "array", "items": {"type": "string"}},
                    "bound": {
                        "type": "object",
                        "required": ["kind"],
                        "additionalProperties": False,
                        "properties": {
                            "kind": {"enum": ["known", "empty", "unknown"]},
                            "lo": {"type": "integer"},
                            "hi": {"type": "integer"},
                        },
                    },
                },
            },
        },
        "assertions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["location", "precise", "violated_rules"],
                "additionalProperties": False,
                "properties": {
                    "location": {"type": "integer"},
                    "precise": {"type": "boolean"},
                    "violated_rules": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["rule", "location", "note"],
                            "additionalProperties": False,
                            "properties": {
                                "rule": {
                                    "enum": ["l1", "a2", "a3", "s4", "d5", "d6"]
                                },
                                "location": {"type": "integer"},
                                "note": {"type": "string"},
                            },
                        },
                    },
                },
            },
        },
    },
}


def _bound_dict(summary: LoopSummary) -> dict:
    b = summary.bound
    if b.kind == BoundKind.KNOWN:
        return {"kind": "known", "lo": b.lo, "hi": b.hi}
    return {"kind": b.kind.value}


def emit_report(
    arrays: list[ArrayInfo],
    summaries: dict[int, LoopSummary],
    verdicts: list[PrecisionVerdict],
) -> str:
    """Deterministic JSON report over the analysis and classification facts."""
    doc = {
        "arrays": [
            {
                "name": a.name,
                "size": a.size,
                "witness_var": a.witness_var,
                "witness_idx": a.witness_idx,
            }
            for a in arrays
        ],
        "loops": [
            {
                "location": loc,
                "full_access": s.full_access,
                "defs": sorted(s.defs),
                "bound": _bound_dict(s),
            }
            for loc, s in sorted(summaries.items())
        ],
        "assertions": [
            v.to_json_dict() for v in sorted(verdicts, key=lambda v: v.assertion_loc)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
