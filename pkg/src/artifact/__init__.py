"""Adaptive MSB-congestion image watermarking with a hardware pipeline model."""

__version__ = "0.1.0"
