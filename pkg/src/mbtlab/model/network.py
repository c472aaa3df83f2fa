"""Flattening of a hierarchical component network into port slots and tick ops.

Every port of every instance (composite or atomic) gets a slot.  A tick fills
slots in a topological order of *producers*: external inputs and delayed
channel buffers first, then instantaneous channel copies and atomic
instances.  A cycle among producers is a zero-delay causality cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Instance:
    path: str  # "" for the root, "a.b" for nested instances
    component: object
    parent: "Instance | None" = None

    @property
    def label(self):
        return self.path or self.component.name


@dataclass
class Network:
    instances: list  # every instance, pre-order
    atomic: list  # atomic instances in declaration (pre-)order
    slots: dict  # (path, port) -> slot index
    ext_inputs: list  # (root in-port name, slot)
    ext_outputs: list  # (root out-port name, slot)
    channels: list  # (observable name, src slot, dst slot, delayed)
    ops: list = field(default_factory=list)  # ("chan", k) | ("inst", i) in tick order
    cycle: list = field(default_factory=list)  # labels in a zero-delay cycle, if any
    problems: list = field(default_factory=list)  # (message, loc) structural issues


def _join(path, name):
    return name if not path else f"{path}.{name}"


def flatten(model, root=None):
    root = root or model.root()
    comps = {c.name: c for c in model.components}
    problems = []
    instances, atomic = [], []

    def visit(comp, path, parent, stack):
        inst = Instance(path, comp, parent)
        instances.append(inst)
        if comp.efsm is not None:
            atomic.append(inst)
        for s in comp.subs:
            child = comps.get(s.component)
            if child is None:
                continue
            if s.component in stack:
                problems.append((f"component {s.component} instantiates itself", s.loc))
                continue
            visit(child, _join(path, s.name), inst, stack | {s.component})

    visit(root, "", None, {root.name})

    slots = {}
    for inst in instances:
        for p in inst.component.ports:
            slots[(inst.path, p.name)] = len(slots)

    ext_inputs = [(p.name, slots[("", p.name)]) for p in root.ports if p.direction == "in"]
    ext_outputs = [(p.name, slots[("", p.name)]) for p in root.ports if p.direction == "out"]

    channels = []
    for inst in instances:
        subs = {s.name for s in inst.component.subs}
        for ch in inst.component.channels:
            ends = []
            for ep in (ch.src, ch.dst):
                if ep.inst is not None and ep.inst not in subs:
                    ends.append(None)
                    continue
                key = (inst.path if ep.inst is None else _join(inst.path, ep.inst), ep.port)
                ends.append(slots.get(key))
            if None in ends:
                continue
            channels.append((_join(inst.path, ch.name), ends[0], ends[1], ch.delayed))

    net = Network(instances, atomic, slots, ext_inputs, ext_outputs, channels, problems=problems)
    _schedule(net)
    return net


def _schedule(net):
    # producer of each slot: ("ext",), ("buf", k), ("chan", k) or ("inst", i)
    producer = {}
    for _, s in net.ext_inputs:
        producer[s] = ("ext",)
    for k, (_, src, dst, delayed) in enumerate(net.channels):
        producer.setdefault(dst, ("buf", k) if delayed else ("chan", k))
    for i, inst in enumerate(net.atomic):
        for p in inst.component.ports:
            if p.direction == "out":
                producer.setdefault(net.slots[(inst.path, p.name)], ("inst", i))

    nodes = [("chan", k) for k, c in enumerate(net.channels) if not c[3]]
    nodes += [("inst", i) for i in range(len(net.atomic))]

    def deps(node):
        if node[0] == "chan":
            srcs = [net.channels[node[1]][1]]
        else:
            inst = net.atomic[node[1]]
            srcs = [net.slots[(inst.path, p.name)] for p in inst.component.ports if p.direction == "in"]
        out = []
        for s in srcs:
            pr = producer.get(s)
            if pr is not None and pr[0] in ("chan", "inst"):
                out.append(pr)
        return out

    # depth-first topological sort, declaration order as tie-break
    state, order = {}, []
    cycle = []

    def visit(node, trail):
        st = state.get(node)
        if st == 2:
            return
        if st == 1:
            if not cycle:
                start = trail.index(node)
                cycle.extend(trail[start:])
            return
        state[node] = 1
        trail.append(node)
        for d in deps(node):
            visit(d, trail)
        trail.pop()
        state[node] = 2
        order.append(node)

    for node in nodes:
        visit(node, [])
    net.ops = order
    labels = []
    for kind, idx in cycle:
        if kind == "inst":
            labels.append(net.atomic[idx].label)
    net.cycle = labels or [net.channels[idx][0] for kind, idx in cycle]
    if not cycle:
        net.cycle = []
