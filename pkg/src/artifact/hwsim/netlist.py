"""Two-valued combinational netlists.

Net values are ints in {0, 1} or integer numpy arrays of 0/1, so one
evaluation can push a whole row of blocks through the same net.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter


def _and(*xs):
    out = xs[0]
    for x in xs[1:]:
        out = out & x
    return out


def _or(*xs):
    out = xs[0]
    for x in xs[1:]:
        out = out | x
    return out


def _xor(*xs):
    out = xs[0]
    for x in xs[1:]:
        out = out ^ x
    return out


def _not(x):
    return x ^ 1


def _nand(*xs):
    return _and(*xs) ^ 1


def _full_adder(a, b, c):
    t = a ^ b
    return t ^ c, (a & b) | (t & c)


def _half_adder(a, b):
    return a ^ b, a & b


# kind -> (evaluator, input arity or None for variadic >= 2, output count)
CELLS = {
    "AND": (lambda *x: (_and(*x),), None, 1),
    "OR": (lambda *x: (_or(*x),), None, 1),
    "XOR": (lambda *x: (_xor(*x),), None, 1),
    "NAND": (lambda *x: (_nand(*x),), None, 1),
    "NOT": (lambda x: (_not(x),), 1, 1),
    "FA": (_full_adder, 3, 2),  # outputs: sum, carry
    "HA": (_half_adder, 2, 2),
}


class NetlistError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    name: str
    kind: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


class GateNet:
    """Acyclic netlist of primitive gates and FA/HA cells."""

    def __init__(self, name: str, inputs):
        self.name = name
        self.inputs = tuple(inputs)
        if len(set(self.inputs)) != len(self.inputs):
            raise NetlistError("duplicate input port")
        self.outputs: dict[str, str] = {}
        self.gates: list[Gate] = []
        self._drivers: dict[str, Gate | None] = {n: None for n in self.inputs}
        self._order: list[Gate] | None = None

    def add(self, kind: str, *inputs: str, out=None) -> tuple[str, ...]:
        if kind not in CELLS:
            raise NetlistError(f"unknown cell kind {kind!r}")
        _, arity, n_out = CELLS[kind]
        if arity is None and len(inputs) < 2:
            raise NetlistError(f"{kind} needs at least two inputs")
        if arity is not None and len(inputs) != arity:
            raise NetlistError(f"{kind} takes {arity} inputs, got {len(inputs)}")
        gname = f"{kind.lower()}{sum(g.kind == kind for g in self.gates)}"
        if out is None:
            outs = tuple(f"{gname}.{k}" for k in range(n_out))
        else:
            outs = (out,) if isinstance(out, str) else tuple(out)
            if len(outs) != n_out:
                raise NetlistError(f"{kind} drives {n_out} nets")
        for net in outs:
            if net in self._drivers:
                raise NetlistError(f"net {net!r} has two drivers")
        gate = Gate(gname, kind, tuple(inputs), outs)
        for net in outs:
            self._drivers[net] = gate
        self.gates.append(gate)
        self._order = None
        return outs

    def gate(self, kind: str, *inputs: str, out=None) -> str:
        """Single-output convenience wrapper around :meth:`add`."""
        return self.add(kind, *inputs, out=out)[0]

    def expose(self, port: str, net: str) -> None:
        if net not in self._drivers:
            raise NetlistError(f"output {port!r} refers to undriven net {net!r}")
        self.outputs[port] = net

    def topo_order(self) -> list[Gate]:
        if self._order is None:
            for g in self.gates:
                for net in g.inputs:
                    if net not in self._drivers:
                        raise NetlistError(f"{g.name} reads undriven net {net!r}")
            deps = {
                g.name: {self._drivers[n].name for n in g.inputs if self._drivers[n] is not None}
                for g in self.gates
            }
            by_name = {g.name: g for g in self.gates}
            try:
                self._order = [by_name[n] for n in TopologicalSorter(deps).static_order()]
            except CycleError as exc:
                raise NetlistError(f"combinational loop: {exc.args[1]}") from None
        return self._order

    def evaluate(self, values: dict) -> dict:
        """Evaluate all gates; returns the output port values."""
        missing = set(self.inputs) - set(values)
        if missing:
            raise NetlistError(f"unassigned inputs {sorted(missing)}")
        nets = {n: values[n] for n in self.inputs}
        for g in self.topo_order():
            fn = CELLS[g.kind][0]
            for net, v in zip(g.outputs, fn(*(nets[n] for n in g.inputs))):
                nets[net] = v
        return {port: nets[net] for port, net in self.outputs.items()}

    def cell_counts(self) -> Counter:
        return Counter(g.kind for g in self.gates)

    def dump(self) -> str:
        """One gate per line: ``name KIND in,in -> out,out``."""
        lines = [f"# netlist {self.name}", "input " + " ".join(self.inputs)]
        for g in self.topo_order():
            lines.append(f"{g.name} {g.kind} {','.join(g.inputs)} -> {','.join(g.outputs)}")
        for port, net in self.outputs.items():
            lines.append(f"output {port} = {net}")
        return "\n".join(lines) + "\n"
