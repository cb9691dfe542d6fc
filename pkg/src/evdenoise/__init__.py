"""Constant-memory denoising for event-camera streams."""

from .baselines import Bs1Filter, Bs2Filter, Bs3Filter, PassAll, passed, run_filter, verdicts
from .events import Event, Label, LabeledEvent, Polarity, SensorGeometry, ValidationReport, validate_stream
from .seqx import (
    Aggregation,
    OpCount,
    PastEventWindow,
    ScaledSeqXFilter,
    SeqXConfig,
    SeqXFilter,
    aggregate,
    op_count,
    scaled_threshold,
    spatial_distance,
    state_size_bits,
)

__version__ = "0.1.0"
