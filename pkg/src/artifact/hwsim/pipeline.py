"""Clock-stepped model of the row-streaming embedding pipeline.

One image row enters per clock. Timing of a block row whose last line is
read on cycle t:

    t+1  ANALYZE  9-to-4 compressors over the latched MSBs
    t+2  CLASSIFY type indicators
    t+3  EMBED    per-pixel multiplexers, three rows into the write FIFO
    t+4..t+6      rows leave the FIFO, one per clock

The first embedded rows are ready on cycle 6 and an N x N image finishes on
cycle N + 6. Trailing rows that do not fill a block row travel the same
stages without being modified.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..codec import as_message
from ..imagecore import BLOCK, GrayImage, as_image
from .circuits import compressor_net, embed_mux_net, type_indicator_net

FILL_CYCLES = 6


@dataclass
class RowGroup:
    index: int  # block row, or -1 for the trailing partial group
    first_row: int
    rows: np.ndarray  # (k, width) uint8
    msb_sum: np.ndarray | None = None
    disordered: np.ndarray | None = None

    @property
    def full(self) -> bool:
        return self.index >= 0


@dataclass
class PipelineTrace:
    total_cycles: int = 0
    events: list[tuple[int, str, int]] = field(default_factory=list)

    def log(self, cycle: int, kind: str, index: int) -> None:
        self.events.append((cycle, kind, index))

    def cycles_of(self, kind: str) -> list[int]:
        return [c for c, k, _ in self.events if k == kind]

    def first(self, kind: str) -> int | None:
        cycles = self.cycles_of(kind)
        return min(cycles) if cycles else None

    def timeline(self) -> str:
        by_cycle: dict[int, list[str]] = {}
        for cycle, kind, index in self.events:
            by_cycle.setdefault(cycle, []).append(f"{kind}[{index}]")
        lines = [f"{c:6d}  {' '.join(by_cycle.get(c, []))}".rstrip() for c in range(1, self.total_cycles + 1)]
        lines.append(f"total {self.total_cycles} cycles")
        return "\n".join(lines) + "\n"


class PipelineError(ValueError):
    pass


class EmbeddingPipeline:
    """Registers and FIFOs of the datapath. Call :meth:`tick` once per clock."""

    def __init__(self, image, message, enhanced: bool = False):
        image = as_image(image)
        if image.width != image.height:
            raise PipelineError(f"pipeline model needs a square image, got {image.width}x{image.height}")
        if image.width < BLOCK:
            raise PipelineError("image smaller than one block")
        self.n = image.width
        self.blocks_x = self.n // BLOCK
        bits = as_message(message)
        if bits.size != self.blocks_x**2:
            raise PipelineError(f"message has {bits.size} bits, image has {self.blocks_x ** 2} blocks")
        self.enhanced = enhanced
        self.source = image.pixels
        self.message = bits.reshape(self.blocks_x, self.blocks_x)
        self.output = np.zeros_like(self.source)
        self.written = np.zeros(self.n, dtype=bool)

        self.cycle = 0
        self.next_row = 0
        self.staging: list[np.ndarray] = []
        self.reg_analyze: RowGroup | None = None
        self.reg_classify: RowGroup | None = None
        self.reg_embed: RowGroup | None = None
        self.fifo: deque[tuple[int, np.ndarray]] = deque()
        self.trace = PipelineTrace()

    @property
    def done(self) -> bool:
        return bool(self.written.all())

    def _stage_write(self) -> None:
        if self.fifo:
            r, row = self.fifo.popleft()
            self.output[r] = row
            self.written[r] = True
            self.trace.log(self.cycle, "write", r)

    def _stage_embed(self) -> RowGroup | None:
        g = self.reg_embed
        if g is None:
            return None
        rows = g.rows
        if g.full:
            w = np.repeat(self.message[g.index], BLOCK)
            t = np.repeat(g.disordered, BLOCK)
            cols = BLOCK * self.blocks_x
            core = rows[:, :cols]
            ins = {f"p{k}": (core >> k) & 1 for k in range(8)}
            ins.update(
                w=np.broadcast_to(w, core.shape),
                w_inv=np.broadcast_to(w ^ 1, core.shape),
                type=np.broadcast_to(t, core.shape),
                enh=np.full(core.shape, int(self.enhanced), dtype=np.uint8),
            )
            out = embed_mux_net().evaluate(ins)
            rows = rows.copy()
            rows[:, :cols] = sum((out[f"q{k}"].astype(np.uint8) << k) for k in range(8))
            self.trace.log(self.cycle, "embed", g.index)
        for k in range(rows.shape[0]):
            self.fifo.append((g.first_row + k, rows[k]))
        return g

    def _stage_classify(self) -> RowGroup | None:
        g = self.reg_classify
        if g is not None and g.full:
            s = g.msb_sum
            g.disordered = type_indicator_net().evaluate({f"s{k}": (s >> k) & 1 for k in range(4)})["disordered"]
            self.trace.log(self.cycle, "classify", g.index)
        return g

    def _stage_analyze(self) -> RowGroup | None:
        g = self.reg_analyze
        if g is not None and g.full:
            msb = (g.rows[:, : BLOCK * self.blocks_x] >> 7) & 1
            blocks = msb.reshape(BLOCK, self.blocks_x, BLOCK).transpose(1, 0, 2).reshape(self.blocks_x, 9)
            out = compressor_net().evaluate({f"x{k}": blocks[:, k] for k in range(9)})
            g.msb_sum = sum(out[f"s{k}"].astype(np.int64) << k for k in range(4))
            self.trace.log(self.cycle, "analyze", g.index)
        return g

    def _stage_read(self) -> RowGroup | None:
        if self.next_row >= self.n:
            return None
        r = self.next_row
        self.staging.append(self.source[r].copy())
        self.next_row += 1
        self.trace.log(self.cycle, "read", r)
        complete = len(self.staging) == BLOCK
        if complete or self.next_row == self.n:
            first = r + 1 - len(self.staging)
            index = first // BLOCK if complete else -1
            group = RowGroup(index, first, np.stack(self.staging))
            self.staging = []
            return group
        return None

    def tick(self) -> None:
        """Advance one clock. Stages run back to front so each sees last cycle's register."""
        self.cycle += 1
        self._stage_write()
        self._stage_embed()
        self.reg_embed = self._stage_classify()
        self.reg_classify = self._stage_analyze()
        self.reg_analyze = self._stage_read()

    def run(self, max_cycles: int | None = None) -> tuple[GrayImage, PipelineTrace]:
        limit = max_cycles if max_cycles is not None else self.n + 4 * FILL_CYCLES
        while not self.done:
            if self.cycle >= limit:
                raise PipelineError(f"pipeline did not drain within {limit} cycles")
            self.tick()
        self.trace.total_cycles = self.cycle
        return GrayImage(self.output), self.trace


def pipeline_run(image, message, enhanced: bool = False) -> tuple[GrayImage, PipelineTrace]:
    """Stream an N x N image through the pipeline model."""
    return EmbeddingPipeline(image, message, enhanced).run()
