"""Core circuit IR: typed SSA operator graphs and a plaintext evaluator.

A CircuitGraph models a single function: typed arguments, a list of
operators in SSA form, and the values it returns.  Two operator families
share the representation: Boolean gate circuits over encrypted-bit
stand-ins (scifr_bool) and CKKS-style circuits over fixed-length slot
vectors (scifr_ckks).  Evaluation runs on plaintext values -- bits for
the Boolean dialect, float vectors for CKKS -- and serves as the
semantics oracle for transforms and fixture generators.  No cryptography
is involved anywhere.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum, unique
from functools import cached_property
from typing import Iterable, Mapping, Sequence

ValueId = int

# A plaintext stand-in: a bit for !lwe values, a slot vector for !ct/!pt.
PlainValue = "int | tuple[float, ...]"


@unique
class ValueType(Enum):
    """Types a graph value can carry; values are the IR spellings."""

    LWE_CIPHERTEXT = "!lwe"
    CKKS_CIPHERTEXT = "!ct"
    CKKS_PLAINTEXT = "!pt"


@unique
class OpTag(Enum):
    """Operator mnemonics of both dialects; values match the textual IR
    and the cost-config keys."""

    # Boolean dialect (scifr_bool)
    AND = "and"
    NAND = "nand"
    NOR = "nor"
    OR = "or"
    XOR = "xor"
    XNOR = "xnor"
    NOT = "not"
    PACKED = "packed"
    LUT2 = "lut2"
    LUT3 = "lut3"
    LUT_LINCOMB = "lut_lincomb"
    MULTI_LUT_LINCOMB = "multi_lut_lincomb"
    # CKKS dialect (scifr_ckks)
    ADD = "add"
    ADD_PLAIN = "add_plain"
    SUB = "sub"
    SUB_PLAIN = "sub_plain"
    MUL = "mul"
    MUL_PLAIN = "mul_plain"
    ROTATE = "rotate"
    EXTRACT = "extract"
    NEGATE = "negate"
    RELINEARIZE = "relinearize"
    RESCALE = "rescale"

    @property
    def dialect(self) -> str:
        return "bool" if self in BOOL_TAGS else "ckks"

    @property
    def opname(self) -> str:
        prefix = "scifr_bool" if self in BOOL_TAGS else "scifr_ckks"
        return f"{prefix}.{self.value}"

    @property
    def result_type(self) -> ValueType:
        if self in BOOL_TAGS:
            return ValueType.LWE_CIPHERTEXT
        return ValueType.CKKS_CIPHERTEXT


BOOL_TAGS = frozenset(
    {
        OpTag.AND,
        OpTag.NAND,
        OpTag.NOR,
        OpTag.OR,
        OpTag.XOR,
        OpTag.XNOR,
        OpTag.NOT,
        OpTag.PACKED,
        OpTag.LUT2,
        OpTag.LUT3,
        OpTag.LUT_LINCOMB,
        OpTag.MULTI_LUT_LINCOMB,
    }
)
CKKS_TAGS = frozenset(OpTag) - BOOL_TAGS

TWO_INPUT_GATES = frozenset(
    {OpTag.AND, OpTag.NAND, OpTag.NOR, OpTag.OR, OpTag.XOR, OpTag.XNOR}
)
CKKS_BINARY = frozenset(
    {OpTag.ADD, OpTag.ADD_PLAIN, OpTag.SUB, OpTag.SUB_PLAIN, OpTag.MUL, OpTag.MUL_PLAIN}
)
# Binary CKKS ops whose second operand is a plaintext vector.
PLAIN_OPERAND_TAGS = frozenset({OpTag.ADD_PLAIN, OpTag.SUB_PLAIN, OpTag.MUL_PLAIN})

# Attribute names each tag requires (every listed attribute is mandatory).
REQUIRED_ATTRS: dict[OpTag, tuple[str, ...]] = {
    OpTag.LUT2: ("lut",),
    OpTag.LUT3: ("lut",),
    OpTag.LUT_LINCOMB: ("coeffs", "lut"),
    OpTag.MULTI_LUT_LINCOMB: ("coeffs", "luts"),
    OpTag.ROTATE: ("offset",),
    OpTag.EXTRACT: ("index",),
}


def lut_mask_bound(arity: int) -> int:
    """Exclusive upper bound for a LUT mask over `arity` inputs."""
    return 1 << (1 << arity)


@dataclass(frozen=True)
class OpKind:
    """An operator kind: a tag plus the attributes that tag requires.

    Attribute use by tag: lut2/lut3 take `lut`; lut_lincomb takes
    `coeffs` and `lut`; multi_lut_lincomb takes `coeffs` and `luts`
    (one mask per result); rotate takes a signed `offset`; extract a
    non-negative `index`.  All other tags take no attributes.
    """

    tag: OpTag
    lut: int | None = None
    coeffs: tuple[int, ...] | None = None
    luts: tuple[int, ...] | None = None
    offset: int | None = None
    index: int | None = None

    def __post_init__(self) -> None:
        if self.coeffs is not None and not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.luts is not None and not isinstance(self.luts, tuple):
            object.__setattr__(self, "luts", tuple(self.luts))

    @property
    def arity(self) -> int | None:
        """Operand count, or None when it cannot be derived (bad attrs)."""
        tag = self.tag
        if tag in (OpTag.NOT, OpTag.PACKED):
            return 1
        if tag in TWO_INPUT_GATES or tag is OpTag.LUT2:
            return 2
        if tag is OpTag.LUT3:
            return 3
        if tag in (OpTag.LUT_LINCOMB, OpTag.MULTI_LUT_LINCOMB):
            return len(self.coeffs) if self.coeffs else None
        if tag in CKKS_BINARY:
            return 2
        return 1  # rotate, extract, negate, relinearize, rescale

    @property
    def num_results(self) -> int | None:
        if self.tag is OpTag.MULTI_LUT_LINCOMB:
            return len(self.luts) if self.luts else None
        return 1

    def attrs(self) -> dict[str, int | tuple[int, ...]]:
        """The attributes actually set, keyed by IR attribute name."""
        out: dict[str, int | tuple[int, ...]] = {}
        for name in ("coeffs", "index", "lut", "luts", "offset"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        return out


@dataclass(frozen=True)
class Operator:
    """One SSA operator: ordinal id, kind, operand/result values, and an
    optional section index assigned by the sectioning transform."""

    id: int
    kind: OpKind
    operands: tuple[ValueId, ...]
    results: tuple[ValueId, ...]
    section: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.operands, tuple):
            object.__setattr__(self, "operands", tuple(self.operands))
        if not isinstance(self.results, tuple):
            object.__setattr__(self, "results", tuple(self.results))


@dataclass(frozen=True, eq=False)
class CircuitGraph:
    """A single function: arguments, operators, returned values.

    Operator storage order need not be topological; the only structural
    requirements (checked by validate()) are SSA single definition and
    acyclicity.  `value_names` carries the textual names used when
    printing; missing entries fall back to the numeric id.
    """

    name: str
    arguments: tuple[tuple[ValueId, ValueType], ...]
    operators: tuple[Operator, ...]
    returns: tuple[ValueId, ...]
    value_names: Mapping[ValueId, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "arguments", tuple(tuple(a) for a in self.arguments))
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "returns", tuple(self.returns))
        object.__setattr__(self, "value_names", dict(self.value_names))

    @cached_property
    def argument_ids(self) -> tuple[ValueId, ...]:
        return tuple(vid for vid, _ in self.arguments)

    @cached_property
    def producers(self) -> dict[ValueId, Operator]:
        """Producing operator per result value (first definition wins)."""
        prod: dict[ValueId, Operator] = {}
        for op in self.operators:
            for r in op.results:
                prod.setdefault(r, op)
        return prod

    @cached_property
    def consumers(self) -> dict[ValueId, tuple[int, ...]]:
        """Consuming operator ids per value, sorted and deduplicated."""
        cons: dict[ValueId, set[int]] = {}
        for op in self.operators:
            for v in op.operands:
                cons.setdefault(v, set()).add(op.id)
        return {v: tuple(sorted(s)) for v, s in cons.items()}

    @cached_property
    def sink_op_ids(self) -> frozenset[int]:
        """Operators none of whose results another operator consumes."""
        sinks = set()
        for op in self.operators:
            if not any(self.consumers.get(r) for r in op.results):
                sinks.add(op.id)
        return frozenset(sinks)

    @cached_property
    def value_types(self) -> dict[ValueId, ValueType]:
        types = {vid: vt for vid, vt in self.arguments}
        for op in self.operators:
            for r in op.results:
                types.setdefault(r, op.kind.tag.result_type)
        return types

    @cached_property
    def _ops_by_id(self) -> dict[int, Operator]:
        return {op.id: op for op in self.operators}

    def operator(self, op_id: int) -> Operator:
        return self._ops_by_id[op_id]

    def display_name(self, vid: ValueId) -> str:
        return self.value_names.get(vid, str(vid))


class GraphBuilder:
    """Incremental CircuitGraph constructor; assigns value ids and
    default textual names (arguments a0, a1, ...; results 0, 1, ...)."""

    def __init__(self, name: str):
        self.name = name
        self._arguments: list[tuple[ValueId, ValueType]] = []
        self._operators: list[Operator] = []
        self._returns: list[ValueId] = []
        self._names: dict[ValueId, str] = {}
        self._used_names: set[str] = set()
        self._next_id = 0
        self._arg_counter = 0
        self._result_counter = 0

    def _fresh_value(self, name: str | None, default: str) -> ValueId:
        vid = self._next_id
        self._next_id += 1
        chosen = name if name is not None else default
        if chosen in self._used_names:
            if name is not None:
                raise ValueError(f"duplicate value name %{chosen}")
            while chosen in self._used_names:
                self._result_counter += 1
                chosen = str(self._result_counter)
        self._used_names.add(chosen)
        self._names[vid] = chosen
        return vid

    def argument(self, vtype: ValueType, name: str | None = None) -> ValueId:
        default = f"a{self._arg_counter}"
        self._arg_counter += 1
        vid = self._fresh_value(name, default)
        self._arguments.append((vid, vtype))
        return vid

    def op(self, kind: OpKind, *operands: ValueId, name: str | None = None) -> ValueId:
        """Append a single-result operator and return its result value."""
        if kind.num_results != 1:
            raise ValueError(f"{kind.tag.opname} is not single-result")
        return self.multi_op(kind, *operands, names=(name,))[0]

    def multi_op(
        self,
        kind: OpKind,
        *operands: ValueId,
        names: Sequence[str | None] | None = None,
    ) -> tuple[ValueId, ...]:
        n = kind.num_results
        if n is None:
            raise ValueError(f"{kind.tag.opname} has underspecified attributes")
        if names is None:
            names = (None,) * n
        results = []
        for nm in names:
            default = str(self._result_counter)
            self._result_counter += 1
            results.append(self._fresh_value(nm, default))
        self._operators.append(
            Operator(len(self._operators), kind, tuple(operands), tuple(results))
        )
        return tuple(results)

    def ret(self, *values: ValueId) -> None:
        self._returns = list(values)

    def build(self) -> CircuitGraph:
        return CircuitGraph(
            self.name,
            tuple(self._arguments),
            tuple(self._operators),
            tuple(self._returns),
            dict(self._names),
        )


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    """One structural problem found by validate()."""

    code: str
    message: str
    op_id: int | None = None


def kind_attr_problems(kind: OpKind) -> list[tuple[str, str]]:
    """(code, message) pairs for attribute problems on one kind."""
    problems: list[tuple[str, str]] = []
    tag = kind.tag
    allowed = REQUIRED_ATTRS.get(tag, ())
    for attr in ("lut", "coeffs", "luts", "offset", "index"):
        val = getattr(kind, attr)
        if val is not None and attr not in allowed:
            problems.append(("attr", f"{tag.opname} does not take attribute '{attr}'"))
        if val is None and attr in allowed:
            problems.append(("attr", f"{tag.opname} requires attribute '{attr}'"))
    if kind.coeffs is not None and len(kind.coeffs) == 0:
        problems.append(("attr", f"{tag.opname} requires a non-empty 'coeffs'"))
    if kind.luts is not None and len(kind.luts) == 0:
        problems.append(("attr", f"{tag.opname} requires a non-empty 'luts'"))
    arity = kind.arity
    if arity is not None:
        bound = lut_mask_bound(arity)
        if tag in (OpTag.LUT2, OpTag.LUT3, OpTag.LUT_LINCOMB) and kind.lut is not None:
            if not 0 <= kind.lut < bound:
                problems.append(
                    ("lut-range", f"LUT mask out of range: {kind.lut} not in [0, {bound})")
                )
        if tag is OpTag.MULTI_LUT_LINCOMB and kind.luts:
            for i, mask in enumerate(kind.luts):
                if not 0 <= mask < bound:
                    problems.append(
                        (
                            "lut-range",
                            f"LUT mask out of range: luts[{i}] = {mask} not in [0, {bound})",
                        )
                    )
    if kind.index is not None and kind.index < 0:
        problems.append(("attr", f"{tag.opname} index must be non-negative"))
    return problems


def operator_topo_order(graph: CircuitGraph) -> list[int] | None:
    """Kahn's algorithm over operators, ready set popped in id order.

    Returns the operator ids in dependency order, or None when the
    operand edges contain a cycle.
    """
    producer_id: dict[ValueId, int] = {}
    for op in graph.operators:
        for r in op.results:
            producer_id.setdefault(r, op.id)
    succs: dict[int, list[int]] = {op.id: [] for op in graph.operators}
    indeg: dict[int, int] = {op.id: 0 for op in graph.operators}
    for op in graph.operators:
        for v in op.operands:
            p = producer_id.get(v)
            if p is not None and p != op.id:
                succs[p].append(op.id)
                indeg[op.id] += 1
    ready = [oid for oid, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        oid = heapq.heappop(ready)
        order.append(oid)
        for succ in succs[oid]:
            indeg[succ] -= 1
            if indeg[succ] == 0:
                heapq.heappush(ready, succ)
    if len(order) != len(graph.operators):
        return None
    return order


def validate(graph: CircuitGraph) -> list[Violation]:
    """Return every structural violation; an empty list means valid.

    Checked: single definition per value (double-def), defined operands
    and returns (use-before-def), operand/result arity, attribute
    presence and LUT mask ranges, operand types per dialect, and
    acyclicity.
    """
    violations: list[Violation] = []
    defined: set[ValueId] = set()

    def define(vid: ValueId, op_id: int | None) -> None:
        if vid in defined:
            violations.append(
                Violation(
                    "double-def",
                    f"value %{graph.display_name(vid)} defined more than once",
                    op_id,
                )
            )
        defined.add(vid)

    for vid, _ in graph.arguments:
        define(vid, None)
    for op in graph.operators:
        for r in op.results:
            define(r, op.id)

    for op in graph.operators:
        opname = op.kind.tag.opname
        for code, message in kind_attr_problems(op.kind):
            violations.append(Violation(code, message, op.id))
        arity = op.kind.arity
        if arity is not None and len(op.operands) != arity:
            violations.append(
                Violation(
                    "arity-mismatch",
                    f"{opname} expects {arity} operands, got {len(op.operands)}",
                    op.id,
                )
            )
        nres = op.kind.num_results
        if nres is not None and len(op.results) != nres:
            violations.append(
                Violation(
                    "arity-mismatch",
                    f"{opname} produces {nres} results, got {len(op.results)}",
                    op.id,
                )
            )
        for v in op.operands:
            if v not in defined:
                violations.append(
                    Violation(
                        "use-before-def", f"use-before-def %{graph.display_name(v)}", op.id
                    )
                )
    for v in graph.returns:
        if v not in defined:
            violations.append(
                Violation("use-before-def", f"use-before-def %{graph.display_name(v)}")
            )

    types = graph.value_types
    for op in graph.operators:
        tag = op.kind.tag
        opname = tag.opname
        for slot, v in enumerate(op.operands):
            vt = types.get(v)
            if vt is None:
                continue  # undefined operand already reported
            if tag in BOOL_TAGS:
                want = ValueType.LWE_CIPHERTEXT
            elif tag in PLAIN_OPERAND_TAGS and slot == 1:
                want = ValueType.CKKS_PLAINTEXT
            else:
                want = ValueType.CKKS_CIPHERTEXT
            if vt is not want:
                violations.append(
                    Violation(
                        "type-mismatch",
                        f"operand {slot} of {opname} has type {vt.value}, expected {want.value}",
                        op.id,
                    )
                )

    if operator_topo_order(graph) is None:
        violations.append(
            Violation("cycle", "dependency cycle among operators")
        )
    return violations


# ---------------------------------------------------------------------------
# Evaluation


class EvaluationError(Exception):
    """Raised for bad evaluator inputs or out-of-range LUT indices."""


def _as_bit(x: object, what: str) -> int:
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int) and x in (0, 1):
        return x
    raise EvaluationError(f"{what} must be a bit (0 or 1), got {x!r}")


def _as_vector(x: object, what: str) -> tuple[float, ...]:
    if isinstance(x, (list, tuple)) and len(x) > 0:
        return tuple(float(s) for s in x)
    raise EvaluationError(f"{what} must be a non-empty number vector, got {x!r}")


def gate_output(tag: OpTag, a: int, b: int) -> int:
    """Truth-table output of a two-input named gate."""
    if tag is OpTag.AND:
        return a & b
    if tag is OpTag.NAND:
        return 1 - (a & b)
    if tag is OpTag.NOR:
        return 1 - (a | b)
    if tag is OpTag.OR:
        return a | b
    if tag is OpTag.XOR:
        return a ^ b
    if tag is OpTag.XNOR:
        return 1 - (a ^ b)
    raise EvaluationError(f"{tag.opname} is not a two-input gate")


def _lincomb_index(kind: OpKind, bits: Sequence[int]) -> int:
    idx = sum(c * b for c, b in zip(kind.coeffs, bits))
    limit = 1 << len(kind.coeffs)
    if not 0 <= idx < limit:
        raise EvaluationError(
            f"{kind.tag.opname} index {idx} out of range [0, {limit})"
        )
    return idx


def _apply_op(op: Operator, args: list) -> tuple:
    """Evaluate one operator; returns one plain value per result."""
    kind = op.kind
    tag = kind.tag
    if tag in TWO_INPUT_GATES:
        return (gate_output(tag, args[0], args[1]),)
    if tag is OpTag.NOT:
        return (1 - args[0],)
    if tag is OpTag.PACKED:
        return (args[0],)
    if tag is OpTag.LUT2:
        return ((kind.lut >> (args[0] + 2 * args[1])) & 1,)
    if tag is OpTag.LUT3:
        return ((kind.lut >> (args[0] + 2 * args[1] + 4 * args[2])) & 1,)
    if tag is OpTag.LUT_LINCOMB:
        return ((kind.lut >> _lincomb_index(kind, args)) & 1,)
    if tag is OpTag.MULTI_LUT_LINCOMB:
        idx = _lincomb_index(kind, args)
        return tuple((mask >> idx) & 1 for mask in kind.luts)
    if tag in (OpTag.ADD, OpTag.ADD_PLAIN):
        return (tuple(x + y for x, y in zip(args[0], args[1])),)
    if tag in (OpTag.SUB, OpTag.SUB_PLAIN):
        return (tuple(x - y for x, y in zip(args[0], args[1])),)
    if tag in (OpTag.MUL, OpTag.MUL_PLAIN):
        return (tuple(x * y for x, y in zip(args[0], args[1])),)
    if tag is OpTag.ROTATE:
        v = args[0]
        k = kind.offset % len(v)
        return (v[k:] + v[:k],)
    if tag is OpTag.EXTRACT:
        v = args[0]
        if kind.index >= len(v):
            raise EvaluationError(
                f"extract index {kind.index} out of range for {len(v)} slots"
            )
        return ((v[kind.index],) * len(v),)
    if tag is OpTag.NEGATE:
        return (tuple(-x for x in args[0]),)
    if tag in (OpTag.RELINEARIZE, OpTag.RESCALE):
        return (args[0],)
    raise EvaluationError(f"no semantics for {tag.opname}")


def evaluate(graph: CircuitGraph, inputs: Mapping[ValueId, object]) -> dict[ValueId, object]:
    """Evaluate a valid graph on plaintext inputs.

    `inputs` must cover exactly the graph arguments: bits for !lwe
    arguments, equal-length number vectors for !ct/!pt arguments.
    Returns the computed plain value for every value id in the graph.
    """
    arg_ids = set(graph.argument_ids)
    missing = arg_ids - set(inputs)
    extra = set(inputs) - arg_ids
    if missing:
        names = ", ".join(f"%{graph.display_name(v)}" for v in sorted(missing))
        raise EvaluationError(f"missing inputs for arguments: {names}")
    if extra:
        raise EvaluationError(f"inputs given for non-argument values: {sorted(extra)}")

    values: dict[ValueId, object] = {}
    vec_len: int | None = None
    for vid, vt in graph.arguments:
        label = f"argument %{graph.display_name(vid)}"
        if vt is ValueType.LWE_CIPHERTEXT:
            values[vid] = _as_bit(inputs[vid], label)
        else:
            vec = _as_vector(inputs[vid], label)
            if vec_len is None:
                vec_len = len(vec)
            elif len(vec) != vec_len:
                raise EvaluationError(
                    f"{label} has {len(vec)} slots, expected {vec_len}"
                )
            values[vid] = vec

    order = operator_topo_order(graph)
    if order is None:
        raise EvaluationError("cannot evaluate a cyclic graph")
    for oid in order:
        op = graph.operator(oid)
        args = [values[v] for v in op.operands]
        outs = _apply_op(op, args)
        for r, val in zip(op.results, outs):
            values[r] = val
    return values
