"""Gate-level and cycle-level model of the embedding hardware."""

from .circuits import (
    compressor_9_4,
    compressor_net,
    embed_mux,
    embed_mux_net,
    type_indicator,
    type_indicator_net,
)
from .netlist import GateNet, NetlistError
from .pipeline import EmbeddingPipeline, PipelineError, PipelineTrace, pipeline_run

__all__ = [
    "EmbeddingPipeline",
    "GateNet",
    "NetlistError",
    "PipelineError",
    "PipelineTrace",
    "compressor_9_4",
    "compressor_net",
    "embed_mux",
    "embed_mux_net",
    "pipeline_run",
    "type_indicator",
    "type_indicator_net",
]
