"""Hardware-level simulation state, effectful functions and the cycle scheduler.

A :class:`Simulator` owns one instance tree.  Each cycle it stimulates the
top module, evaluates every pending operation once its operands are defined
(dataflow order, ties broken by source position or by a seeded RNG), and then
finishes the cycle: nonblocking assignments, then register and memory
commits, then the ``curr`` to ``last`` move.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable

from .bits import Bit4, BitVec4, bit2int
from .coverage import CoverageRecorder
from .errors import (
    ArityMismatch, CirctSimError, Deadlock, DoubleWrite, DuplicateName,
    EvalStepLimit, MultiBlockRegion, PrematureFinish, TypeMismatch,
    UnknownName, UnknownOperation, UnknownSymbol, WidthMismatch,
)
from .mlir.syntax import DictAttr, IntegerType, ModuleType, TypeAttr
from .static import CanonOp, CanonRegion, MlirState, Phase, rop
from .values import Ref, TypedValue, check_type, is_bits_type, types_compatible, x_of

RECURSION_LIMIT = 64
SCHEDULER = "<scheduler>"

# ---------------------------------------------------------------------------
# dispatch table
# ---------------------------------------------------------------------------


@dataclass
class OpDef:
    name: str
    handler: Callable | None
    attrs: frozenset[str] | None = None
    errors: tuple[str, ...] = ()
    deps: Callable | None = None          # (sim, inst, op) -> ids to wait for
    preprocess: Callable | None = None    # (sim, op) -> None
    evaluates: bool = True
    validate: Callable | None = None      # (op) -> None, static checks


REGISTRY: dict[str, OpDef] = {}
_STATE_FACTORIES: dict[str, Callable[[], object]] = {}


_FINISH_HOOKS: list[Callable] = []


def register(name: str, *, attrs=None, errors=(), deps=None, preprocess=None,
             evaluates=True, validate=None):
    def deco(fn):
        REGISTRY[name] = OpDef(name, fn, None if attrs is None
                               else frozenset(attrs), tuple(errors), deps,
                               preprocess, evaluates, validate)
        return fn
    return deco


def register_state(dialect: str, factory: Callable[[], object]) -> None:
    _STATE_FACTORIES[dialect] = factory


def register_finish_hook(fn: Callable) -> None:
    """``fn(sim)`` runs at finish before register and memory commits."""
    _FINISH_HOOKS.append(fn)


REGISTRY[SCHEDULER] = OpDef(SCHEDULER, None, errors=(
    "Deadlock", "UnknownOperation", "UnknownSymbol", "EvalStepLimit"),
    evaluates=False)


def load_dialects() -> None:
    from .dialects import comb, hw, seq, sv  # noqa: F401


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CRop:
    symbol: str


@dataclass(frozen=True)
class Debug:
    message: str


@dataclass(frozen=True)
class DialectCmd:
    op: CanonOp


# ---------------------------------------------------------------------------
# instance state
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Evaluation:
    op: CanonOp
    seq: tuple
    deps: tuple[str, ...] | None       # None: ask the OpDef each time
    writes: frozenset = frozenset()   # storage cells written with blocking
    reads: frozenset = frozenset()    # storage cells read
    block: bool = False               # procedural block

    @property
    def result_ids(self) -> tuple[str, ...]:
        return self.op.result_ids


@dataclass(eq=False)
class InstanceState:
    cid: tuple[str, ...]
    mod: str
    pa: tuple[str, ...] | None = None
    exec: list[Evaluation] = field(default_factory=list)
    last: dict[str, TypedValue] = field(default_factory=dict)
    curr: dict[str, TypedValue] = field(default_factory=dict)
    out: dict[str, str] = field(default_factory=dict)
    reg: dict[str, str] = field(default_factory=dict)
    wire: dict[str, str] = field(default_factory=dict)
    children: dict[str, InstanceState] = field(default_factory=dict)
    inputs: list[TypedValue] = field(default_factory=list)
    stimulated: bool = False
    module: CanonOp | None = None
    info: ModuleInfo | None = None

    @property
    def path(self) -> str:
        return ".".join(self.cid)

    def walk(self):
        yield self
        for c in self.children.values():
            yield from c.walk()


# ---------------------------------------------------------------------------
# static per-module analysis for the scheduler
# ---------------------------------------------------------------------------

STORAGE_DECLS = ("sv.reg", "sv.logic", "sv.wire")
PROCEDURAL_BLOCKS = ("sv.initial", "sv.always", "sv.alwayscomb", "sv.alwaysff")
BLOCKING_WRITES = ("sv.bpassign", "sv.force", "sv.release")


def walk_ops(ops):
    for op in ops:
        yield op
        for reg in op.regions:
            for b in reg.blocks:
                yield from walk_ops(b.ops)


def region_ops(op: CanonOp):
    for reg in op.regions:
        for b in reg.blocks:
            yield from walk_ops(b.ops)


def free_ids(op: CanonOp) -> tuple[str, ...]:
    """Operand ids of ``op`` and its nested ops not defined inside ``op``."""
    used: list[str] = list(op.operands)
    defined: set[str] = set()
    for reg in op.regions:
        for b in reg.blocks:
            defined.update(a for a, _ in b.args)
    for inner in region_ops(op):
        used.extend(inner.operands)
        defined.update(inner.result_ids)
        for reg in inner.regions:
            for b in reg.blocks:
                defined.update(a for a, _ in b.args)
    seen: dict[str, None] = {}
    for u in used:
        if u not in defined:
            seen.setdefault(u)
    return tuple(seen)


class ModuleInfo:
    """Storage-cell aliasing and per-op read/write cell sets of one module."""

    def __init__(self, module: CanonOp):
        self.base: dict[str, str] = {}
        index_ops = []
        for op in walk_ops([module]):
            if op.name in STORAGE_DECLS and op.result_ids:
                self.base[op.result_ids[0]] = op.result_ids[0]
            elif op.name == "sv.array_index_inout" and op.result_ids:
                index_ops.append(op)
        # index ops may precede the decl they index; iterate to a fixpoint
        changed = True
        while changed:
            changed = False
            for op in index_ops:
                b = self.base.get(op.operands[0])
                if b is not None and op.result_ids[0] not in self.base:
                    self.base[op.result_ids[0]] = b
                    changed = True
        self._cache: dict[int, tuple[frozenset, frozenset, tuple]] = {}

    def _cell(self, ref_id: str):
        return self.base.get(ref_id)

    def analyse(self, op: CanonOp) -> tuple[frozenset, frozenset, tuple]:
        key = id(op)
        hit = self._cache.get(key)
        if hit is not None and hit[3] is op:
            return hit[:3]
        writes: set[str] = set()
        reads: set[str] = set()
        if op.name == "sv.assign":
            c = self._cell(op.operands[0])
            if c:
                writes.add(c)
        elif op.name == "sv.read_inout":
            c = self._cell(op.operands[0])
            if c:
                reads.add(c)
        for inner in region_ops(op):
            if inner.name in BLOCKING_WRITES or inner.name == "sv.assign":
                c = self._cell(inner.operands[0])
                if c:
                    writes.add(c)
            elif inner.name == "sv.read_inout":
                c = self._cell(inner.operands[0])
                if c:
                    reads.add(c)
        deps = free_ids(op) if op.regions else op.operands
        result = (frozenset(writes), frozenset(reads), deps)
        self._cache[key] = result + (op,)
        return result


# ---------------------------------------------------------------------------
# evaluation environments
# ---------------------------------------------------------------------------


class Env:
    """Graph context: values live in the instance's ``curr`` map."""

    procedural = False

    def __init__(self, sim: Simulator, inst: InstanceState, seq: tuple = ()):
        self.sim = sim
        self.inst = inst
        self.seq = seq

    def read(self, vid: str) -> TypedValue:
        try:
            return self.inst.curr[vid]
        except KeyError:
            raise Deadlock(f"value %{vid} is not defined") from None

    def has(self, vid: str) -> bool:
        return vid in self.inst.curr

    def write(self, vid: str, v: TypedValue) -> None:
        self.sim.write_curr(self.inst, [vid], [v])

    def operands(self, op: CanonOp) -> list[TypedValue]:
        vals = [self.read(i) for i in op.operands]
        for i, (declared, v) in enumerate(zip(op.operand_types, vals)):
            if not types_compatible(declared, v.ty):
                check_type(declared, v, f"operand #{i}")
        return vals


class Frame(Env):
    """Procedural context: SSA results are local and may be rebound (loops)."""

    procedural = True

    def __init__(self, sim: Simulator, inst: InstanceState):
        super().__init__(sim, inst)
        self.local: dict[str, TypedValue] = {}

    def read(self, vid: str) -> TypedValue:
        v = self.local.get(vid)
        if v is not None:
            return v
        return super().read(vid)

    def has(self, vid: str) -> bool:
        return vid in self.local or vid in self.inst.curr

    def write(self, vid: str, v: TypedValue) -> None:
        self.local[vid] = v


# ---------------------------------------------------------------------------
# edge helpers
# ---------------------------------------------------------------------------


def _bit(tv: TypedValue | None) -> Bit4:
    if tv is None or not isinstance(tv.val, BitVec4):
        return Bit4.BX
    return tv.val[0]


def posedge(prev: Bit4, cur: Bit4) -> bool:
    """IEEE 1364 posedge: 0->1, 0->x/z, x/z->1."""
    if prev is Bit4.B0:
        return cur is not Bit4.B0
    if prev is Bit4.B1:
        return False
    return cur is Bit4.B1


def negedge(prev: Bit4, cur: Bit4) -> bool:
    if prev is Bit4.B1:
        return cur is not Bit4.B1
    if prev is Bit4.B0:
        return False
    return cur is Bit4.B0


def any_edge(prev: Bit4, cur: Bit4) -> bool:
    return posedge(prev, cur) or negedge(prev, cur)


EDGE_FUNCS = (posedge, negedge, any_edge)


# ---------------------------------------------------------------------------
# pure effectful functions
# ---------------------------------------------------------------------------


def bits(vals, widths) -> list[BitVec4]:
    """Unwrap integer-typed values, checking each against its width."""
    if len(vals) != len(widths):
        raise ArityMismatch(f"{len(vals)} values for {len(widths)} widths")
    out = []
    for v, w in zip(vals, widths):
        b = v.bits
        if b.width != w:
            raise WidthMismatch(f"value has width {b.width}, expected {w}")
        out.append(b)
    return out


def canonicalize_hw(op: CanonOp) -> CanonOp:
    """Hardware-domain form: drop attributes the owning handler ignores."""
    d = REGISTRY.get(op.name)
    attrs = op.attrs
    if d is not None and d.attrs is not None:
        attrs = DictAttr(tuple((k, v) for k, v in op.attrs.entries
                               if k in d.attrs))
    regions = tuple(CanonRegion(tuple(replace(b, ops=tuple(
        canonicalize_hw(o) for o in b.ops)) for b in reg.blocks))
        for reg in op.regions)
    if attrs == op.attrs and regions == op.regions:
        return op
    return replace(op, attrs=attrs, regions=regions)


def module_type(op: CanonOp) -> ModuleType:
    mt = op.attr("module_type")
    if not isinstance(mt, TypeAttr) or not isinstance(mt.type, ModuleType):
        raise TypeMismatch(f"'{op.symbol}' has no module type")
    return mt.type


# ---------------------------------------------------------------------------
# the simulator
# ---------------------------------------------------------------------------


class Simulator:
    def __init__(self, mlir: MlirState, top: str, *, seed: int | None = None,
                 max_eval_steps: int | None = None,
                 coverage: CoverageRecorder | None = None, output=None,
                 sinks: dict[int, object] | None = None):
        load_dialects()
        self.mlir = mlir
        self.top = top
        self.rng = random.Random(seed) if seed is not None else None
        self.max_eval_steps = max_eval_steps
        self.coverage = coverage
        self.output = output
        self.sinks = dict(sinks or {})
        self.cmds: deque = deque()
        self.debug_messages: list[str] = []
        self.diagnostics: list[str] = []
        self.log: list[tuple[str, str]] = []
        self.failed = False
        self.halt: str | None = None
        self.cycle = 0
        self.steps = 0
        self.state = {k: f() for k, f in _STATE_FACTORIES.items()}
        self.deferred: list[Callable[[], Callable[[], None] | None]] = []
        self.snapshot: dict[tuple[str, ...], dict[str, TypedValue]] = {}
        self._modules: dict[str, CanonOp] = {}
        self._infos: dict[str, ModuleInfo] = {}
        self.root = InstanceState(cid=(top,), mod=top)
        self._setup()

    # -- setup and commands ----------------------------------------------------

    def _setup(self) -> None:
        for op in sorted(self.mlir.table.values(),
                         key=lambda o: o.pos or (0, 0)):
            d = REGISTRY.get(op.name)
            if d is not None and d.preprocess is not None:
                self._preprocess(d, op)
        for op in self.mlir.moved:
            self.move_op(op)
        self.process_commands()
        if self.mlir.phase is Phase.DEBUG:
            if self.coverage is not None:
                self.coverage.error(SCHEDULER, "UnknownSymbol")
            raise UnknownSymbol("; ".join(self.debug_messages))
        for op in list(self.mlir.table.values()):
            if op.name == "hw.module":
                self.validate(op)

    def validate(self, module: CanonOp) -> None:
        for op in walk_ops([module]):
            d = REGISTRY.get(op.name)
            if d is not None and d.validate is not None:
                self._guard(op.name, lambda: d.validate(op), op)

    def _preprocess(self, d: OpDef, op: CanonOp) -> None:
        if self.coverage is not None:
            self.coverage.hit(op.name)
        self._guard(op.name, lambda: d.preprocess(self, op), op)

    def move_op(self, op: CanonOp) -> None:
        self.cmds.append(DialectCmd(op))

    def process_commands(self):
        fetched = None
        while self.cmds and self.mlir.phase is not Phase.DEBUG:
            fetched = self.exec_command(self.cmds.popleft()) or fetched
        return fetched

    def exec_command(self, cmd):
        if isinstance(cmd, CRop):
            try:
                return self.fetch_module(cmd.symbol)
            except UnknownSymbol as e:
                self.cmds.appendleft(Debug(e.message))
                return None
        if isinstance(cmd, Debug):
            self.mlir.phase = Phase.DEBUG
            self.debug_messages.append(cmd.message)
            self.cmds.clear()
            return None
        if isinstance(cmd, DialectCmd):
            d = REGISTRY.get(cmd.op.name)
            if d is None or d.preprocess is None:
                self.cmds.appendleft(Debug(
                    f"operation '{cmd.op.name}' is not allowed at top level"))
                return None
            self._preprocess(d, cmd.op)
            return None
        raise TypeError(f"unknown command {cmd!r}")

    def fetch_module(self, symbol: str) -> CanonOp:
        op = self._modules.get(symbol)
        if op is None:
            op = rop(self.mlir, symbol)
            if op.name != "hw.module":
                raise UnknownSymbol(f"symbol '{symbol}' is not an hw.module")
            op = canonicalize_hw(op)
            self._modules[symbol] = op
            self._infos[symbol] = ModuleInfo(op)
        return op

    def _guard(self, opname: str, fn, op: CanonOp | None = None,
               inst: InstanceState | None = None):
        try:
            return fn()
        except CirctSimError as e:
            if self.coverage is not None:
                self.coverage.error(opname, type(e).__name__)
            raise e.located(op=op.name if op else None,
                            path=inst.cid if inst else None,
                            pos=op.pos if op else None)

    def diag(self, op: CanonOp, kind: str, message: str,
             inst: InstanceState | None = None) -> None:
        """Record a non-fatal diagnostic (also an error path for coverage)."""
        where = f" in {inst.path}" if inst else ""
        self.diagnostics.append(f"cycle {self.cycle}{where}: {op.name}: "
                                f"{kind}: {message}")
        if self.coverage is not None:
            self.coverage.error(op.name, kind)

    def dialect(self, name: str):
        return self.state[name]

    def observe(self, tv: TypedValue) -> TypedValue:
        """Plain bit value for tracing: storage refs read through."""
        if isinstance(tv.val, Ref):
            return self.state["sv"].read_ref(tv)
        return tv

    # -- state access ------------------------------------------------------------

    def read_curr(self, inst: InstanceState, ids) -> list[TypedValue]:
        try:
            return [inst.curr[i] for i in ids]
        except KeyError as e:
            raise Deadlock(f"value %{e.args[0]} is not defined") from None

    def write_curr(self, inst: InstanceState, ids, vals) -> None:
        for i, v in zip(ids, vals):
            if i in inst.curr:
                raise DoubleWrite(f"value %{i} written twice in one cycle")
            inst.curr[i] = v

    def read_last(self, inst: InstanceState, ids, types) -> list[TypedValue]:
        return [inst.last[i] if i in inst.last else x_of(t)
                for i, t in zip(ids, types)]

    def write_args(self, inst: InstanceState, args, vals) -> None:
        if len(args) != len(vals):
            raise ArityMismatch(f"{len(vals)} values for {len(args)} block "
                                "arguments")
        for (aid, ty), v in zip(args, vals):
            if not types_compatible(ty, v.ty):
                raise TypeMismatch(f"argument %{aid} expects {ty}, got {v.ty}")
            self.write_curr(inst, [aid], [v])

    def _register(self, table: dict, what: str, sym: str, vid: str) -> None:
        have = table.get(sym)
        if have is not None and have != vid:
            raise DuplicateName(f"{what} symbol '{sym}' already registered")
        table[sym] = vid

    def write_reg(self, inst, sym, vid):
        self._register(inst.reg, "register", sym, vid)

    def write_wire(self, inst, sym, vid):
        self._register(inst.wire, "wire", sym, vid)

    def read_reg(self, inst, sym) -> str:
        if sym not in inst.reg:
            raise UnknownName(f"no register named '{sym}'")
        return inst.reg[sym]

    def read_wire(self, inst, sym) -> str:
        if sym not in inst.wire:
            raise UnknownName(f"no wire named '{sym}'")
        return inst.wire[sym]

    def write_out(self, inst, port, vid):
        if port in inst.out:
            raise DuplicateName(f"output '{port}' driven twice")
        inst.out[port] = vid

    def split_region(self, inst, region: CanonRegion) -> tuple[CanonOp, ...]:
        if len(region.blocks) > 1:
            raise MultiBlockRegion(f"region has {len(region.blocks)} blocks")
        return region.blocks[0].ops if region.blocks else ()

    def parallelize(self, inst, ops, seq: tuple = ()) -> None:
        for j, op in enumerate(ops):
            self.add_eval(inst, op, seq + (j,))

    def add_eval(self, inst, op: CanonOp, seq: tuple) -> None:
        info = inst.info
        if info is not None:
            writes, reads, deps = info.analyse(op)
        else:
            writes, reads = frozenset(), frozenset()
            deps = free_ids(op) if op.regions else op.operands
        d = REGISTRY.get(op.name)
        if d is not None and d.deps is not None:
            deps = None
        inst.exec.append(Evaluation(op, seq, deps, writes, reads,
                                    op.name in PROCEDURAL_BLOCKS))

    def write_results(self, env: Env, ev_op: CanonOp, signals) -> None:
        ids = ev_op.result_ids
        if len(signals) != len(ids):
            raise ArityMismatch(f"{len(signals)} results for {len(ids)} ids")
        for vid, ty, v in zip(ids, ev_op.result_types, signals):
            if is_bits_type(ty) and not types_compatible(ty, v.ty):
                check_type(ty, v, f"result %{vid}")
            env.write(vid, v)

    def stimulate(self, inst: InstanceState, inputs) -> None:
        self.cmds.append(CRop(inst.mod))
        op = self.process_commands()
        if self.mlir.phase is Phase.DEBUG:
            raise UnknownSymbol("; ".join(self.debug_messages))
        ports = module_type(op).inputs
        if len(inputs) != len(ports):
            raise ArityMismatch(f"module '{inst.mod}' takes {len(ports)} "
                                f"inputs, got {len(inputs)}")
        if inst.exec:
            raise PrematureFinish(f"instance {inst.path} stimulated twice")
        inst.module = op
        inst.info = self._infos[inst.mod]
        inst.inputs = list(inputs)
        inst.stimulated = True
        self.add_eval(inst, op, ())

    # -- scheduling ---------------------------------------------------------------

    def _deps(self, inst, ev: Evaluation):
        if ev.deps is not None:
            return ev.deps
        return REGISTRY[ev.op.name].deps(self, inst, ev.op)

    def _ready(self, inst: InstanceState, ev: Evaluation) -> bool:
        curr = inst.curr
        for d in self._deps(inst, ev):
            if d not in curr:
                return False
        if ev.reads or ev.block:
            for other in inst.exec:
                if other is ev:
                    continue
                if ev.block and other.block and other.seq < ev.seq:
                    return False
                if ev.reads & other.writes:
                    if ev.block and other.block and other.seq > ev.seq:
                        continue
                    return False
        return True

    def settle(self, inst: InstanceState) -> None:
        while inst.exec:
            ready = [ev for ev in inst.exec if self._ready(inst, ev)]
            if not ready:
                raise self._deadlock(inst)
            if self.rng is None:
                ev = min(ready, key=lambda e: e.seq)
            else:
                ev = self.rng.choice(ready)
            inst.exec.remove(ev)
            self.evaluate(inst, ev)

    def _deadlock(self, inst: InstanceState) -> Deadlock:
        parts = []
        for ev in sorted(inst.exec, key=lambda e: e.seq):
            missing = [d for d in self._deps(inst, ev) if d not in inst.curr]
            what = (", missing " + ", ".join("%" + m for m in missing)
                    if missing else ", waiting on storage writers")
            res = ",".join("%" + r for r in ev.op.result_ids)
            parts.append(f"{res + ' = ' if res else ''}{ev.op.name}{what}")
        err = Deadlock("no operation ready; stuck: " + "; ".join(parts),
                       path=inst.cid)
        if self.coverage is not None:
            self.coverage.error(SCHEDULER, "Deadlock")
        return err

    def evaluate(self, inst: InstanceState, ev: Evaluation) -> None:
        self.dispatch(Env(self, inst, ev.seq), ev.op)

    def dispatch(self, env: Env, op: CanonOp) -> None:
        d = REGISTRY.get(op.name)
        if d is None or d.handler is None:
            if self.coverage is not None:
                self.coverage.error(SCHEDULER, "UnknownOperation")
            raise UnknownOperation(f"no semantics for '{op.name}'",
                                   op=op.name, path=env.inst.cid, pos=op.pos)
        self.steps += 1
        if self.max_eval_steps is not None and self.steps > self.max_eval_steps:
            if self.coverage is not None:
                self.coverage.error(SCHEDULER, "EvalStepLimit")
            raise EvalStepLimit(f"more than {self.max_eval_steps} evaluation "
                                "steps in one cycle", op=op.name,
                                path=env.inst.cid, pos=op.pos)
        if self.coverage is not None:
            self.coverage.hit(op.name)
        try:
            results = d.handler(self, env, op)
            self.write_results(env, op, results or [])
        except CirctSimError as e:
            if self.coverage is not None and e.op is None:
                self.coverage.error(op.name, type(e).__name__)
            raise e.located(op=op.name, path=env.inst.cid, pos=op.pos)
        except ValueError as e:
            # tuple unpacking of operands: wrong operand count for the op
            if "values to unpack" not in str(e):
                raise
            raise ArityMismatch(f"wrong number of operands or results "
                                f"({e})", op=op.name, path=env.inst.cid,
                                pos=op.pos) from None

    def expand(self, env: Env, region: CanonRegion) -> None:
        """Run a region: sequentially in procedural context, else queue its
        ops for dataflow evaluation."""
        ops = self.split_region(env.inst, region)
        if env.procedural:
            for op in ops:
                self.dispatch(env, op)
        else:
            self.parallelize(env.inst, ops, env.seq)

    def run_procedural(self, inst: InstanceState, region: CanonRegion,
                       frame: Frame | None = None) -> Frame:
        frame = frame or Frame(self, inst)
        for op in self.split_region(inst, region):
            self.dispatch(frame, op)
        return frame

    # -- cycles ----------------------------------------------------------------------

    def defer(self, sample: Callable[[], Callable[[], None] | None]) -> None:
        """Queue an end-of-cycle commit.  All samples run before any apply."""
        self.deferred.append(sample)

    def edge(self, inst: InstanceState, vid: str) -> tuple[Bit4, Bit4]:
        return _bit(inst.last.get(vid)), _bit(inst.curr.get(vid))

    def finish(self, root: InstanceState | None = None) -> None:
        root = root or self.root
        active = [i for i in root.walk() if i.stimulated]
        for inst in root.walk():
            if inst.exec:
                raise PrematureFinish(f"instance {inst.path} has "
                                      f"{len(inst.exec)} pending operations")
        for hook in _FINISH_HOOKS:
            hook(self)
        applies = [s() for s in self.deferred]
        self.deferred = []
        for a in applies:
            if a is not None:
                a()
        for inst in active:
            inst.last = inst.curr
            inst.curr = {}
            inst.out = {}
            inst.stimulated = False

    def input_values(self, inputs) -> list[TypedValue]:
        op = self.fetch_module(self.top)
        ports = module_type(op).inputs
        if isinstance(inputs, dict):
            unknown = set(inputs) - {p.name for p in ports}
            if unknown:
                raise ArityMismatch(f"unknown input port(s) {sorted(unknown)}")
            vals = []
            for p in ports:
                v = inputs.get(p.name)
                if v is None:
                    v = x_of(p.type)
                elif isinstance(v, int):
                    v = TypedValue(p.type, BitVec4.from_int(v, bit_width_of(p.type)))
                elif isinstance(v, BitVec4):
                    v = TypedValue(p.type, v)
                vals.append(v)
            return vals
        return list(inputs)

    def run_cycle(self, inputs) -> dict[str, TypedValue]:
        self.steps = 0
        try:
            vals = self.input_values(inputs)
            self.stimulate(self.root, vals)
            self.settle(self.root)
        except CirctSimError as e:
            if self.coverage is not None and e.op is None:
                self.coverage.error(SCHEDULER, type(e).__name__)
            raise
        root = self.root
        outputs = {}
        for p in module_type(root.module).outputs:
            if p.name not in root.out:
                raise UnknownName(f"output '{p.name}' was never driven",
                                  path=root.cid)
            outputs[p.name] = root.curr[root.out[p.name]]
        self.snapshot = {i.cid: {k: self.observe(v) for k, v in i.curr.items()}
                         for i in root.walk() if i.stimulated}
        self.outputs = outputs
        self.finish()
        self.cycle += 1
        return outputs


def bit_width_of(ty) -> int:
    from .mlir.syntax import bit_width
    return bit_width(ty)


def to_int(v: TypedValue):
    """Unsigned value of a defined vector, else the UNKNOWN marker."""
    return bit2int(v.bits)


def i1(b: bool) -> TypedValue:
    return TypedValue(IntegerType(1), BitVec4.from_int(int(b), 1))
