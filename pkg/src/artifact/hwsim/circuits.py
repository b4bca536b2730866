"""Congestion analyzer and embedding datapath as gate netlists."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .netlist import GateNet

SUM_BITS = 4


@lru_cache(maxsize=None)
def compressor_net() -> GateNet:
    """9-to-4 compressor from 5 full adders and 2 half adders.

    Three FAs reduce the inputs to three weight-1 and three weight-2 bits. A
    fourth FA folds the weight-1 bits into s0 and one more carry, the fifth
    FA and a HA reduce the four weight-2 bits to s1 plus two weight-4 bits,
    and the last HA produces s2 and s3.
    """
    net = GateNet("compressor_9_4", [f"x{k}" for k in range(9)])
    s_a, c_a = net.add("FA", "x0", "x1", "x2")
    s_b, c_b = net.add("FA", "x3", "x4", "x5")
    s_c, c_c = net.add("FA", "x6", "x7", "x8")
    s0, c_d = net.add("FA", s_a, s_b, s_c)
    t, d4 = net.add("FA", c_a, c_b, c_c)
    s1, e4 = net.add("HA", t, c_d)
    s2, s3 = net.add("HA", d4, e4)
    for k, n in enumerate((s0, s1, s2, s3)):
        net.expose(f"s{k}", n)
    return net


@lru_cache(maxsize=None)
def type_indicator_net() -> GateNet:
    """1 for sums 4, 5, 6: s2 AND NOT s3 AND NAND(s1, s0). Sums 10..15 are don't-care."""
    net = GateNet("type_indicator", [f"s{k}" for k in range(SUM_BITS)])
    n3 = net.gate("NOT", "s3")
    n10 = net.gate("NAND", "s1", "s0")
    net.expose("disordered", net.gate("AND", "s2", n3, n10))
    return net


def _mux(net: GateNet, sel: str, when_1: str, when_0: str, nsel: str | None = None) -> str:
    nsel = nsel or net.gate("NOT", sel)
    a = net.gate("AND", sel, when_1)
    b = net.gate("AND", nsel, when_0)
    return net.gate("OR", a, b)


@lru_cache(maxsize=None)
def embed_mux_net() -> GateNet:
    """Per-pixel embedding datapath.

    type=0 routes w to plane 3, type=1 routes w to plane 5. With ``enh`` set,
    w_inv goes to the plane just below. Untouched bits are wired through.
    """
    net = GateNet("embed_mux", [f"p{k}" for k in range(8)] + ["w", "w_inv", "type", "enh"])
    ntype = net.gate("NOT", "type")
    lo_sel = net.gate("AND", ntype, "enh")
    hi_sel = net.gate("AND", "type", "enh")
    routed = {
        2: _mux(net, ntype, "w", "p2", nsel="type"),
        4: _mux(net, "type", "w", "p4", nsel=ntype),
        1: _mux(net, lo_sel, "w_inv", "p1"),
        3: _mux(net, hi_sel, "w_inv", "p3"),
    }
    for k in range(8):
        net.expose(f"q{k}", routed.get(k, f"p{k}"))
    return net


def _bits(value, width: int) -> list:
    return [(value >> k) & 1 for k in range(width)]


def compressor_9_4(bits) -> int | np.ndarray:
    """Sum of 9 input bits as read from the compressor's 4 output nets.

    ``bits`` is a length-9 sequence of 0/1 ints or equally shaped arrays.
    """
    bits = list(bits)
    if len(bits) != 9:
        raise ValueError(f"compressor takes 9 bits, got {len(bits)}")
    out = compressor_net().evaluate({f"x{k}": b for k, b in enumerate(bits)})
    return sum(out[f"s{k}"] << k for k in range(SUM_BITS))


def type_indicator(s) -> int | np.ndarray:
    out = type_indicator_net().evaluate({f"s{k}": b for k, b in enumerate(_bits(s, SUM_BITS))})
    return out["disordered"]


def embed_mux(pixel, w, w_inv, type_bit, enhanced) -> int | np.ndarray:
    values = {f"p{k}": b for k, b in enumerate(_bits(pixel, 8))}
    values.update(w=w, w_inv=w_inv, type=type_bit, enh=int(enhanced) if isinstance(enhanced, bool) else enhanced)
    out = embed_mux_net().evaluate(values)
    return sum(out[f"q{k}"] << k for k in range(8))
