"""Textual IR: parser and canonical printer for .scifr files.

Grammar (UTF-8, LF line endings, `//` line comments, whitespace free
between tokens):

    func    := "func" "@" IDENT "(" [ args ] ")" "->" typelist "{" stmts ret "}"
    args    := arg { "," arg }            arg := VALUE ":" type
    stmt    := results "=" opname [ operands ] [ attrs ] ":" type
    results := VALUE { "," VALUE }        operands := VALUE { "," VALUE }
    attrs   := "{" attr { "," attr } "}"  attr := IDENT "=" attrval
    attrval := INT | "[" INT { "," INT } "]"
    ret     := "return" [ operands ] ":" typelist
    type    := "!lwe" | "!ct" | "!pt"

The typelist is empty for zero-return functions (printed `return :`).
Value names accept both identifiers and bare numbers after `%` (the
examples use `%0`-style result names).  Duplicate attributes are an
error.  Parsing collects at most 20 diagnostics, each carrying a
1-based line/column span inside the offending token, then raises
ParseError.  The canonical printer emits one statement per line with
two-space indentation and alphabetically sorted attributes; its output
reparses to an isomorphic graph and is a fixed point of parse+print.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field

from .ir import (
    BOOL_TAGS,
    CircuitGraph,
    OpKind,
    Operator,
    OpTag,
    REQUIRED_ATTRS,
    ValueType,
    lut_mask_bound,
    validate,
)

MAX_DIAGNOSTICS = 20

_TAG_BY_OPNAME = {tag.opname: tag for tag in OpTag}
_TYPE_BY_SPELLING = {vt.value: vt for vt in ValueType}

_LIST_ATTRS = ("coeffs", "luts")
_INT_ATTRS = ("lut", "offset", "index", "section")


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a token in the source text."""

    line: int
    column: int
    length: int


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.message}"


class ParseError(Exception):
    """Raised when parsing fails; carries every collected diagnostic."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<comment>//[^\n]*)
    | (?P<arrow>->)
    | (?P<punct>[(){}\[\],=:])
    | (?P<value>%[A-Za-z0-9_]+)
    | (?P<at>@[A-Za-z_][A-Za-z0-9_]*)
    | (?P<type>![A-Za-z_]+)
    | (?P<int>-?[0-9]+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # arrow | punct | value | at | type | int | ident | eof
    text: str
    span: SourceSpan


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.line_starts.append(i + 1)

    def span_at(self, offset: int, length: int) -> SourceSpan:
        line = bisect_right(self.line_starts, offset)
        column = offset - self.line_starts[line - 1] + 1
        return SourceSpan(line, column, max(length, 1))

    def tokens(self, diagnostics: list[Diagnostic]) -> list[_Token]:
        toks: list[_Token] = []
        pos = 0
        n = len(self.text)
        while pos < n:
            m = _TOKEN_RE.match(self.text, pos)
            if m is None:
                if len(diagnostics) < MAX_DIAGNOSTICS:
                    diagnostics.append(
                        Diagnostic(
                            f"unexpected character {self.text[pos]!r}",
                            self.span_at(pos, 1),
                        )
                    )
                pos += 1
                continue
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                toks.append(_Token(kind, m.group(), self.span_at(pos, len(m.group()))))
            pos = m.end()
        toks.append(_Token("eof", "", self.span_at(n, 1)))
        return toks


# ---------------------------------------------------------------------------
# Raw parse records (built before name resolution)


@dataclass
class _RawOp:
    results: list[tuple[str, SourceSpan]]
    opname: str
    opname_span: SourceSpan
    operands: list[tuple[str, SourceSpan]]
    attrs: dict[str, tuple[object, SourceSpan]]
    type_text: str
    type_span: SourceSpan


@dataclass
class _RawFunc:
    name: str
    args: list[tuple[str, SourceSpan, str, SourceSpan]]  # name, span, type, type span
    arrow_types: list[tuple[str, SourceSpan]]
    ops: list[_RawOp] = field(default_factory=list)
    ret_operands: list[tuple[str, SourceSpan]] = field(default_factory=list)
    ret_types: list[tuple[str, SourceSpan]] = field(default_factory=list)
    name_span: SourceSpan = SourceSpan(1, 1, 1)


class _Abort(Exception):
    """Internal: statement-level or fatal parse abort."""


class _Parser:
    def __init__(self, tokens: list[_Token], diagnostics: list[Diagnostic]):
        self.toks = tokens
        self.pos = 0
        self.diags = diagnostics

    # -- token helpers

    @property
    def cur(self) -> _Token:
        return self.toks[self.pos]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    def advance(self) -> _Token:
        t = self.cur
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, span: SourceSpan | None = None) -> None:
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(Diagnostic(message, span or self.cur.span))

    def full(self) -> bool:
        return len(self.diags) >= MAX_DIAGNOSTICS

    def expect(self, kind: str, text: str | None, what: str) -> _Token:
        if self.at(kind, text):
            return self.advance()
        got = self.cur.text or "end of input"
        self.error(f"expected {what}, found {got!r}")
        raise _Abort()

    # -- grammar

    def parse_function(self) -> _RawFunc | None:
        try:
            self.expect("ident", "func", "'func'")
            name_tok = self.expect("at", None, "function name ('@name')")
            func = _RawFunc(name_tok.text[1:], [], [], name_span=name_tok.span)
            self.expect("punct", "(", "'('")
            if self.at("value"):
                while True:
                    vt = self.advance()
                    self.expect("punct", ":", "':' after argument name")
                    ty = self.expect("type", None, "argument type")
                    func.args.append((vt.text[1:], vt.span, ty.text, ty.span))
                    if self.at("punct", ","):
                        self.advance()
                        continue
                    break
            self.expect("punct", ")", "')'")
            self.expect("arrow", None, "'->'")
            func.arrow_types = self.parse_typelist(stop="{")
            self.expect("punct", "{", "'{'")
        except _Abort:
            return None

        while not self.at("ident", "return") and not self.at("punct", "}"):
            if self.cur.kind == "eof" or self.full():
                self.error("expected 'return' before end of function")
                return func
            try:
                func.ops.append(self.parse_stmt())
            except _Abort:
                self.resync()
        try:
            self.expect("ident", "return", "'return'")
            if self.at("value"):
                tok = self.advance()
                func.ret_operands.append((tok.text[1:], tok.span))
                while self.at("punct", ","):
                    self.advance()
                    tok = self.expect("value", None, "a value after ','")
                    func.ret_operands.append((tok.text[1:], tok.span))
            self.expect("punct", ":", "':' after return operands")
            func.ret_types = self.parse_typelist(stop="}")
            self.expect("punct", "}", "'}'")
            if self.cur.kind != "eof":
                self.error("trailing input after function body")
        except _Abort:
            pass
        return func

    def parse_typelist(self, stop: str) -> list[tuple[str, SourceSpan]]:
        types: list[tuple[str, SourceSpan]] = []
        if self.at("punct", stop):
            return types
        while True:
            ty = self.expect("type", None, "a type")
            types.append((ty.text, ty.span))
            if self.at("punct", ","):
                self.advance()
                continue
            return types

    def parse_stmt(self) -> _RawOp:
        results = []
        tok = self.expect("value", None, "a result value")
        results.append((tok.text[1:], tok.span))
        while self.at("punct", ","):
            self.advance()
            tok = self.expect("value", None, "a result value")
            results.append((tok.text[1:], tok.span))
        self.expect("punct", "=", "'='")
        opname_tok = self.expect("ident", None, "an operation name")
        operands = []
        if self.at("value"):
            while True:
                tok = self.advance()
                operands.append((tok.text[1:], tok.span))
                if self.at("punct", ","):
                    self.advance()
                    continue
                break
        attrs: dict[str, tuple[object, SourceSpan]] = {}
        if self.at("punct", "{"):
            self.advance()
            while True:
                name_tok = self.expect("ident", None, "an attribute name")
                self.expect("punct", "=", "'=' in attribute")
                value, vspan = self.parse_attrval()
                if name_tok.text in attrs:
                    self.error(f"duplicate attribute '{name_tok.text}'", name_tok.span)
                else:
                    attrs[name_tok.text] = (value, vspan)
                if self.at("punct", ","):
                    self.advance()
                    continue
                self.expect("punct", "}", "'}' after attributes")
                break
        self.expect("punct", ":", "':' before the result type")
        ty = self.expect("type", None, "a result type")
        return _RawOp(results, opname_tok.text, opname_tok.span, operands, attrs, ty.text, ty.span)

    def parse_attrval(self) -> tuple[object, SourceSpan]:
        if self.at("int"):
            tok = self.advance()
            return int(tok.text), tok.span
        if self.at("punct", "["):
            open_tok = self.advance()
            items: list[int] = []
            while True:
                tok = self.expect("int", None, "an integer in the list")
                items.append(int(tok.text))
                if self.at("punct", ","):
                    self.advance()
                    continue
                close = self.expect("punct", "]", "']'")
                break
            length = close.span.column - open_tok.span.column + close.span.length
            span = SourceSpan(open_tok.span.line, open_tok.span.column, max(length, 1))
            return tuple(items), span
        self.error("expected an integer or integer list")
        raise _Abort()

    def resync(self) -> None:
        """After a bad statement, skip to the next plausible boundary."""
        self.advance()
        while self.cur.kind != "eof":
            if self.at("value") or self.at("ident", "return") or self.at("punct", "}"):
                return
            self.advance()


# ---------------------------------------------------------------------------
# Semantic construction


class _Builder:
    def __init__(self, func: _RawFunc, diagnostics: list[Diagnostic]):
        self.func = func
        self.diags = diagnostics

    def error(self, message: str, span: SourceSpan) -> None:
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(Diagnostic(message, span))

    def build(self) -> CircuitGraph | None:
        func = self.func
        ids: dict[str, int] = {}
        names: dict[int, str] = {}
        next_id = 0

        def define(name: str, span: SourceSpan) -> int:
            nonlocal next_id
            if name in ids:
                self.error(f"value %{name} defined more than once", span)
                return ids[name]
            ids[name] = next_id
            names[next_id] = name
            next_id += 1
            return ids[name]

        arguments: list[tuple[int, ValueType]] = []
        for name, span, type_text, type_span in func.args:
            vt = _TYPE_BY_SPELLING.get(type_text)
            if vt is None:
                self.error(f"unknown type {type_text}", type_span)
                vt = ValueType.LWE_CIPHERTEXT
            arguments.append((define(name, span), vt))

        # Pass one: define every result so forward references resolve.
        for raw in func.ops:
            for name, span in raw.results:
                define(name, span)

        operators: list[Operator] = []
        op_spans: list[SourceSpan] = []
        for raw in func.ops:
            op = self.build_op(raw, ids, len(operators))
            if op is not None:
                operators.append(op)
                op_spans.append(raw.opname_span)

        returns: list[int] = []
        for name, span in func.ret_operands:
            vid = ids.get(name)
            if vid is None:
                self.error(f"use-before-def %{name}", span)
            else:
                returns.append(vid)

        if self.diags:
            return None
        graph = CircuitGraph(
            func.name, tuple(arguments), tuple(operators), tuple(returns), names
        )
        self.check_return_types(graph)
        if self.diags:
            return None
        for violation in validate(graph):
            span = func.name_span
            if violation.op_id is not None and violation.op_id < len(op_spans):
                span = op_spans[violation.op_id]
            self.error(violation.message, span)
        if self.diags:
            return None
        return graph

    def build_op(self, raw: _RawOp, ids: dict[str, int], op_id: int) -> Operator | None:
        tag = _TAG_BY_OPNAME.get(raw.opname)
        if tag is None:
            self.error(f"unknown operation '{raw.opname}'", raw.opname_span)
            return None

        allowed = REQUIRED_ATTRS.get(tag, ()) + ("section",)
        fields: dict[str, object] = {}
        section = None
        ok = True
        for name, (value, vspan) in raw.attrs.items():
            if name not in allowed:
                self.error(f"{raw.opname} does not take attribute '{name}'", vspan)
                ok = False
                continue
            if name in _LIST_ATTRS and not isinstance(value, tuple):
                self.error(f"attribute '{name}' must be an integer list", vspan)
                ok = False
                continue
            if name in _INT_ATTRS and not isinstance(value, int):
                self.error(f"attribute '{name}' must be an integer", vspan)
                ok = False
                continue
            if name == "section":
                if value < 0:
                    self.error("section must be non-negative", vspan)
                    ok = False
                else:
                    section = value
            else:
                fields[name] = value
        for name in REQUIRED_ATTRS.get(tag, ()):
            if name not in fields:
                self.error(f"{raw.opname} requires attribute '{name}'", raw.opname_span)
                ok = False
        if not ok:
            return None

        kind = OpKind(tag, **fields)

        # Range checks against the attribute value spans.
        arity = kind.arity
        if arity is not None:
            bound = lut_mask_bound(arity)
            if kind.lut is not None and not 0 <= kind.lut < bound:
                self.error(
                    f"LUT mask out of range: {kind.lut} not in [0, {bound})",
                    raw.attrs["lut"][1],
                )
                ok = False
            if kind.luts is not None:
                for i, mask in enumerate(kind.luts):
                    if not 0 <= mask < bound:
                        self.error(
                            f"LUT mask out of range: luts[{i}] = {mask} not in [0, {bound})",
                            raw.attrs["luts"][1],
                        )
                        ok = False
        if kind.index is not None and kind.index < 0:
            self.error("extract index must be non-negative", raw.attrs["index"][1])
            ok = False
        if kind.coeffs is not None and len(kind.coeffs) == 0:
            self.error("coeffs must be non-empty", raw.attrs["coeffs"][1])
            ok = False

        if arity is not None and len(raw.operands) != arity:
            self.error(
                f"{raw.opname} expects {arity} operands, got {len(raw.operands)}",
                raw.opname_span,
            )
            ok = False
        nres = kind.num_results
        if nres is not None and len(raw.results) != nres:
            self.error(
                f"{raw.opname} produces {nres} results, got {len(raw.results)}",
                raw.opname_span,
            )
            ok = False

        want_type = tag.result_type.value
        if raw.type_text != want_type:
            self.error(
                f"type mismatch: {raw.opname} produces {want_type}, not {raw.type_text}",
                raw.type_span,
            )
            ok = False

        operands: list[int] = []
        for name, span in raw.operands:
            vid = ids.get(name)
            if vid is None:
                self.error(f"use-before-def %{name}", span)
                ok = False
            else:
                operands.append(vid)
        if not ok:
            return None
        results = tuple(ids[name] for name, _ in raw.results)
        return Operator(op_id, kind, tuple(operands), results, section)

    def check_return_types(self, graph: CircuitGraph) -> None:
        func = self.func
        types = graph.value_types
        actual = [types[v].value for v in graph.returns]
        if len(func.ret_types) != len(actual):
            span = func.ret_types[0][1] if func.ret_types else func.name_span
            self.error(
                f"return lists {len(func.ret_types)} types for {len(actual)} values", span
            )
            return
        for want, (got, span) in zip(actual, func.ret_types):
            if got != want:
                self.error(f"return type mismatch: value has type {want}, not {got}", span)
        if len(func.arrow_types) != len(actual):
            self.error(
                f"function signature declares {len(func.arrow_types)} results, returns {len(actual)}",
                func.name_span,
            )
            return
        for want, (got, span) in zip(actual, func.arrow_types):
            if got != want:
                self.error(f"declared result type {got} does not match returned {want}", span)


def parse(text: str) -> CircuitGraph:
    """Parse one function; raise ParseError with diagnostics on failure."""
    diagnostics: list[Diagnostic] = []
    tokens = _Lexer(text).tokens(diagnostics)
    func = _Parser(tokens, diagnostics).parse_function()
    if func is not None and not diagnostics:
        graph = _Builder(func, diagnostics).build()
        if graph is not None:
            return graph
    if not diagnostics:  # pragma: no cover - builder always explains failure
        diagnostics.append(Diagnostic("parse failed", SourceSpan(1, 1, 1)))
    raise ParseError(diagnostics[:MAX_DIAGNOSTICS])


# ---------------------------------------------------------------------------
# Printer


def _format_attr_value(value: int | tuple[int, ...]) -> str:
    if isinstance(value, tuple):
        return "[" + ", ".join(str(v) for v in value) + "]"
    return str(value)


def print_circuit(graph: CircuitGraph) -> str:
    """Render a graph in canonical textual form (ends with a newline)."""
    name = graph.display_name
    args = ", ".join(f"%{name(vid)}: {vt.value}" for vid, vt in graph.arguments)
    ret_types = ", ".join(graph.value_types[v].value for v in graph.returns)
    header_types = f"{ret_types} " if ret_types else ""
    lines = [f"func @{graph.name}({args}) -> {header_types}{{"]
    for op in graph.operators:
        results = ", ".join(f"%{name(r)}" for r in op.results)
        operands = ", ".join(f"%{name(v)}" for v in op.operands)
        attrs = dict(op.kind.attrs())
        if op.section is not None:
            attrs["section"] = op.section
        parts = [results, "=", op.kind.tag.opname]
        if operands:
            parts.append(operands)
        if attrs:
            body = ", ".join(
                f"{k} = {_format_attr_value(attrs[k])}" for k in sorted(attrs)
            )
            parts.append("{" + body + "}")
        parts.append(f": {op.kind.tag.result_type.value}")
        lines.append("  " + " ".join(parts))
    ret_vals = ", ".join(f"%{name(v)}" for v in graph.returns)
    if ret_vals:
        lines.append(f"  return {ret_vals} : {ret_types}")
    else:
        lines.append("  return :")
    lines.append("}")
    return "\n".join(lines) + "\n"
