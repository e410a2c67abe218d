"""procnet: process networks over rendezvous channels, with a deterministic
cycle simulator, stream/vector data refinements, and five matrix-multiply
network designs benchmarked against a functional reference.

The layers, bottom up:

  words        fixed-width two's-complement arithmetic
  runtime      channels, processes, the cycle-stepped scheduler
  constructs   shapes (item/stream/vector), ports, producers and consumers
  combinators  process refinements of map, zip, fold, pipelines, systolic cells
  oracle       the pure functional reference (list-of-lists matrices)
  designs      the five multiplier networks, d1..d5
  bench        seeded benchmark harness, reports, serializers
  service/cli  FastAPI wrapper and its thin command-line client
"""

__version__ = "0.1.0"

from .words import DEFAULT_WIDTH, MAX_WIDTH, MIN_WIDTH, word_range, wrap
from .runtime import (EOT, Alt, Channel, CycleBudgetError, DeadlockError,
                      DEFAULT_MAX_CYCLES, Network, Par, ProtocolError, Read,
                      StreamMonitor, TraceMetrics, WiringError, Write)
from .constructs import (ItemPort, StreamPort, VectorPort, bank_sink,
                         bank_source, broadcast, feed, item, new_port,
                         produce, sink, store, stream_of, vector_of)
from .combinators import (ScalarProduct, adder, apply_elementwise,
                          apply_pairwise, mac_cell, multiplier, pipeline,
                          pipelined_map, repeat_item, stream_map,
                          stream_zip_with, systolic_drain, systolic_row,
                          systolic_source, turnout_pipeline, vector_fold_right,
                          vector_map, vector_zip_with)
from .designs import (DESIGN_IDS, DESIGN_LABELS, K_INDEPENDENT, build_design,
                      run_design)
from .bench import Config, RunReport, UsageError, cmd_compare, cmd_run, cmd_sweep_k

__all__ = [name for name in dir() if not name.startswith("_")]
