"""Synchronous execution of a validated model.

One tick: external inputs and delayed-channel buffers are placed on their
ports, then channel copies and atomic instances run in topological order.
Each atomic instance fires one enabled transition or stutters (state and
locals unchanged, every output Absent).  Delayed channels latch their source
port at the end of the tick.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EvalError, NondeterminismInStrictMode, StepError
from . import syntax as S
from .decisions import transition_owner
from .evaluator import DEFAULT_FUEL, Ctx, Evaluator, compile_pattern
from .network import flatten
from .validate import ensure_valid
from .values import ABSENT, format_value

STUTTER = -1
SUCCESSOR_MEMO = 200_000


@dataclass(frozen=True)
class SystemState:
    control: tuple  # per atomic instance
    locals: tuple  # per atomic instance: tuple of values
    # value carried by each channel during the last tick; an observation only,
    # so it takes no part in equality (instantaneous channels hold nothing
    # between ticks)
    channels: tuple = field(compare=False)
    buffers: tuple = ()  # pending value of each delayed channel

    def key(self):
        return (self.control, self.locals, self.buffers)


@dataclass(frozen=True)
class TraceStep:
    inputs: dict
    state: SystemState
    outputs: dict
    choices: tuple = ()


class _Trans:
    __slots__ = ("index", "dst", "matchers", "guard", "outputs", "assigns", "source")

    def __init__(self, index, dst, matchers, guard, outputs, assigns, source):
        self.index = index
        self.dst = dst
        self.matchers = matchers
        self.guard = guard
        self.outputs = outputs
        self.assigns = assigns
        self.source = source


class _Atomic:
    """Compiled form of one atomic instance."""

    def __init__(self, inst, slots, ev):
        comp = inst.component
        self.label = inst.label
        self.path = inst.path
        self.component = comp
        efsm = comp.efsm
        ins = [p for p in comp.ports if p.direction == "in"]
        outs = [p for p in comp.ports if p.direction == "out"]
        self.in_names = [p.name for p in ins]
        self.in_slots = [slots[(inst.path, p.name)] for p in ins]
        self.out_names = [p.name for p in outs]
        self.out_slots = [slots[(inst.path, p.name)] for p in outs]
        self.local_names = [l.name for l in efsm.locals]
        lidx = {n: i for i, n in enumerate(self.local_names)}
        oidx = {n: i for i, n in enumerate(self.out_names)}
        iidx = {n: i for i, n in enumerate(self.in_names)}
        self.by_state = {}
        for i, t in enumerate(efsm.transitions):
            owner = transition_owner(comp.name, i)
            pats = dict(t.inputs)
            matchers = [compile_pattern(pats[n]) if n in pats else None for n in self.in_names]
            guard = ev.compile(t.guard, owner, "g", decision=True) if t.guard is not None else None
            outputs = [(oidx[p], ev.compile(x, owner, f"o{k}")) for k, (p, x) in enumerate(t.outputs)]
            assigns = [(lidx[n], ev.compile(x, owner, f"a{k}")) for k, (n, x) in enumerate(t.assigns)]
            assert all(n in iidx for n in pats)
            self.by_state.setdefault(t.src, []).append(
                _Trans(i, t.dst, matchers, guard, outputs, assigns, t)
            )

    def enabled(self, ctrl, locvals, ins, ctx):
        cands = self.by_state.get(ctrl)
        if not cands:
            return []
        base = None
        out = []
        for t in cands:
            binds = None
            ok = True
            for m, v in zip(t.matchers, ins):
                if m is None:
                    if v is not ABSENT:
                        ok = False
                        break
                    continue
                b = m(v)
                if b is None:
                    ok = False
                    break
                if b:
                    if binds is None:
                        binds = dict(b)
                    else:
                        binds.update(b)
            if not ok:
                continue
            if base is None:
                base = dict(zip(self.local_names, locvals))
            env = {**base, **binds} if binds else base
            if t.guard is not None:
                ctx.fuel = ctx.budget
                if not t.guard(env, ctx):
                    continue
            out.append((t, env))
        return out

    def fire(self, t, env, locvals, ctx):
        outs = [ABSENT] * len(self.out_slots)
        for k, fn in t.outputs:
            ctx.fuel = ctx.budget
            outs[k] = fn(env, ctx)
        if t.assigns:
            new = list(locvals)
            for k, fn in t.assigns:
                ctx.fuel = ctx.budget
                new[k] = fn(env, ctx)
            locvals = tuple(new)
        return t.dst, locvals, outs


def _fmt_inputs(names, vals):
    return {n: format_value(v) for n, v in zip(names, vals)}


class Runtime:
    """Executable form of a model.  Immutable; executions only share it."""

    def __init__(self, model, fuel=DEFAULT_FUEL, instrument=False, check=True):
        if check:
            ensure_valid(model)
        self.model = model
        self.fuel = fuel
        self.instrument = instrument
        self.net = net = flatten(model)
        self.evaluator = ev = Evaluator(model.functions, instrument=instrument)
        self.atomics = [_Atomic(inst, net.slots, ev) for inst in net.atomic]
        self.n_slots = len(net.slots)
        self.in_ports = [n for n, _ in net.ext_inputs]
        self.out_ports = [n for n, _ in net.ext_outputs]
        self._in_slot = dict(net.ext_inputs)
        self.channel_names = [c[0] for c in net.channels]
        self.delayed = [(k, c[1], c[2]) for k, c in enumerate(net.channels) if c[3]]
        self.ops = []
        for kind, idx in net.ops:
            if kind == "chan":
                self.ops.append((0, net.channels[idx][1], net.channels[idx][2]))
            else:
                self.ops.append((1, idx, None))
        self.observable = self.in_ports + self.out_ports + self.channel_names
        self._init = None
        self._succ = {}  # memo of successors() for uninstrumented calls

    # -- state -------------------------------------------------------------

    def initial_state(self):
        if self._init is None:
            ctx = Ctx(self.fuel)
            plain = Evaluator(self.model.functions)  # initial values are not coverage sites
            locs = []
            for a in self.atomics:
                efsm = a.component.efsm
                vals = []
                for l in efsm.locals:
                    fn = plain.compile(l.init)
                    ctx.fuel = ctx.budget
                    vals.append(fn({}, ctx))
                locs.append(tuple(vals))
            self._init = SystemState(
                tuple(a.component.efsm.init for a in self.atomics),
                tuple(locs),
                tuple(ABSENT for _ in self.channel_names),
                tuple(ABSENT for _ in self.delayed),
            )
        return self._init

    def local(self, state, path, name):
        for i, a in enumerate(self.atomics):
            if a.path == path:
                return state.locals[i][a.local_names.index(name)]
        raise KeyError(f"{path}.{name}")

    def control_of(self, state, label):
        for i, a in enumerate(self.atomics):
            if a.label == label:
                return state.control[i]
        raise KeyError(label)

    def control_labels(self, state):
        return tuple(f"{a.label}={c}" for a, c in zip(self.atomics, state.control))

    # -- one tick ----------------------------------------------------------

    def _prepare(self, state, inputs):
        slots = [ABSENT] * self.n_slots
        for name, v in inputs.items():
            s = self._in_slot.get(name)
            if s is None:
                raise StepError(f"unknown input port {name}")
            slots[s] = v
        for (k, _, dst), v in zip(self.delayed, state.buffers):
            slots[dst] = v
        return slots

    def _finish(self, slots, control, locs, state):
        chans = tuple(slots[c[2]] for c in self.net.channels)
        bufs = tuple(slots[src] for _, src, _ in self.delayed)
        outputs = {n: slots[s] for n, s in self.net.ext_outputs}
        return SystemState(tuple(control), tuple(locs), chans, bufs), outputs

    def step(self, state, inputs, mode="strict", rng=None, cov=None, with_choices=False):
        """Advance one tick.  Returns (state, outputs) or (state, outputs, choices)."""
        ctx = Ctx(self.fuel, cov)
        slots = self._prepare(state, inputs)
        control = list(state.control)
        locs = list(state.locals)
        choices = [STUTTER] * len(self.atomics)
        for kind, a, b in self.ops:
            if kind == 0:
                slots[b] = slots[a]
                continue
            at = self.atomics[a]
            ins = [slots[s] for s in at.in_slots]
            en = at.enabled(control[a], locs[a], ins, ctx)
            if not en:
                continue
            if len(en) > 1:
                if mode == "strict":
                    raise NondeterminismInStrictMode(
                        at.label, control[a], _fmt_inputs(at.in_names, ins),
                        [t.index for t, _ in en],
                    )
                t, env = en[rng.randrange(len(en))]
            else:
                t, env = en[0]
            control[a], locs[a], outs = at.fire(t, env, locs[a], ctx)
            choices[a] = t.index
            for s, v in zip(at.out_slots, outs):
                slots[s] = v
        new, outputs = self._finish(slots, control, locs, state)
        if with_choices:
            return new, outputs, tuple(choices)
        return new, outputs

    def successors(self, state, inputs, cov=None):
        """Every (choices, state, outputs) reachable in one tick, any resolution."""
        if cov is None:
            key = (state.key(), tuple(inputs.get(p, ABSENT) for p in self.in_ports))
            hit = self._succ.get(key)
            if hit is None:
                if len(self._succ) >= SUCCESSOR_MEMO:
                    self._succ.clear()
                hit = self._succ[key] = self._successors(state, inputs, None)
            return hit
        return self._successors(state, inputs, cov)

    def _successors(self, state, inputs, cov):
        ctx = Ctx(self.fuel, cov)
        branches = [(self._prepare(state, inputs), list(state.control), list(state.locals),
                     [STUTTER] * len(self.atomics))]
        for kind, a, b in self.ops:
            if kind == 0:
                for slots, *_ in branches:
                    slots[b] = slots[a]
                continue
            at = self.atomics[a]
            nxt = []
            for slots, control, locs, choices in branches:
                ins = [slots[s] for s in at.in_slots]
                en = at.enabled(control[a], locs[a], ins, ctx)
                if not en:
                    nxt.append((slots, control, locs, choices))
                    continue
                for j, (t, env) in enumerate(en):
                    if j < len(en) - 1:
                        br = (list(slots), list(control), list(locs), list(choices))
                    else:
                        br = (slots, control, locs, choices)
                    s2, c2, l2, ch2 = br
                    c2[a], l2[a], outs = at.fire(t, env, l2[a], ctx)
                    ch2[a] = t.index
                    for s, v in zip(at.out_slots, outs):
                        s2[s] = v
                    nxt.append(br)
            branches = nxt
        out = []
        for slots, control, locs, choices in branches:
            new, outputs = self._finish(slots, control, locs, state)
            out.append((tuple(choices), new, outputs))
        return out

    def step_with_choices(self, state, inputs, choices, cov=None):
        """Replay a tick forcing the given transition choice per instance.

        Returns (state, outputs) or None when the choices are not realisable.
        """
        ctx = Ctx(self.fuel, cov)
        slots = self._prepare(state, inputs)
        control = list(state.control)
        locs = list(state.locals)
        for kind, a, b in self.ops:
            if kind == 0:
                slots[b] = slots[a]
                continue
            at = self.atomics[a]
            ins = [slots[s] for s in at.in_slots]
            en = at.enabled(control[a], locs[a], ins, ctx)
            want = choices[a]
            if want == STUTTER:
                if en:
                    return None
                continue
            pick = next(((t, env) for t, env in en if t.index == want), None)
            if pick is None:
                return None
            control[a], locs[a], outs = at.fire(pick[0], pick[1], locs[a], ctx)
            for s, v in zip(at.out_slots, outs):
                slots[s] = v
        return self._finish(slots, control, locs, state)

    # -- whole runs ---------------------------------------------------------

    def run(self, inputs, state=None, mode="strict", rng=None, cov=None):
        """Trace of executing the per-tick input valuations from ``state``."""
        state = state or self.initial_state()
        trace = []
        for tick, inp in enumerate(inputs):
            try:
                state, outputs, choices = self.step(state, inp, mode, rng, cov, True)
            except StepError as exc:
                raise exc.at_tick(tick)
            except (EvalError, RecursionError) as exc:
                raise StepError(f"evaluation failed: {exc}", tick) from exc
            trace.append(TraceStep(dict(inp), state, outputs, choices))
        return trace

    def observed(self, step):
        """Values of all observable names (open ports and channels) at a trace step."""
        out = {n: step.inputs.get(n, ABSENT) for n in self.in_ports}
        out.update(step.outputs)
        out.update(zip(self.channel_names, step.state.channels))
        return out


def run(model, inputs, fuel=DEFAULT_FUEL):
    return Runtime(model, fuel).run(inputs)


def step(model, state, inputs, fuel=DEFAULT_FUEL):
    return Runtime(model, fuel).step(state, inputs)


def enabled(efsm, control, local_values, inputs, functions=(), fuel=DEFAULT_FUEL):
    """Transitions of ``efsm`` enabled in ``control`` with the given locals and inputs.

    ``inputs`` maps in-port names to values; ports that are omitted are
    treated as Absent.  Result keeps declaration order.
    """
    if isinstance(functions, S.Model):
        functions = functions.functions
    ev = Evaluator(functions)
    ctx = Ctx(fuel)
    out = []
    for t in efsm.transitions:
        if t.src != control:
            continue
        env = dict(local_values)
        pats = dict(t.inputs)
        ok = True
        for name, v in inputs.items():
            if name not in pats and v is not ABSENT:
                ok = False
        for name, p in pats.items():
            b = compile_pattern(p)(inputs.get(name, ABSENT))
            if b is None:
                ok = False
                break
            env.update(b)
        if not ok:
            continue
        if t.guard is not None:
            ctx.reset()
            if not ev.compile(t.guard)(env, ctx):
                continue
        out.append(t)
    return out
