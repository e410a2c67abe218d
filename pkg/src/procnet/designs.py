"""Five process-network designs for matrix multiplication.

All five take the left matrix by rows (n x m) and the right matrix by
columns (k columns of length m) and compute the n x k result, checked
against the functional reference in `oracle`. They trade parallel area for
streaming depth:

  d1  data-parallel: every scalar product gets its own cell bank
  d2  streamed: one dot-product subnetwork, everything sequential
  d3  pipeline: one stage per left-matrix row, the result stream grows
      as it travels
  d4  turnout pipeline: like d3 but each stage drops its result onto a
      private turnout stream
  d5  systolic: an n x m grid of multiply-accumulate cells

d3, d4 and d5 are column-count independent: their process and channel
counts depend only on (n, m), and their cycle counts grow affinely in k
once the pipeline is full.
"""

from .combinators import (ScalarProduct, pipeline, repeat_item,
                          systolic_drain, systolic_row, systolic_source,
                          turnout_pipeline, vector_fold_right,
                          vector_zip_with)
from .constructs import (bank_sink, broadcast, consume_gen,
                         initial_read_channels, item, new_port, produce,
                         produce_gen, sink, store, stream_of, vector_of)
from .runtime import (EOT, Alt, CycleBudgetError, DeadlockError,
                      DEFAULT_MAX_CYCLES, Network, Read, WiringError, Write)
from .words import DEFAULT_WIDTH
from . import oracle


DESIGN_IDS = ("d1", "d2", "d3", "d4", "d5")

DESIGN_LABELS = {
    "d1": "data-parallel cell banks",
    "d2": "streamed single dot-product",
    "d3": "row pipeline with growing result stream",
    "d4": "row pipeline with turnout streams",
    "d5": "systolic multiply-accumulate grid",
}

K_INDEPENDENT = ("d3", "d4", "d5")


class DesignBuild:
    """A constructed, not-yet-run network plus how to read its result."""

    def __init__(self, net, dims, collect, handles=None, raw_note=""):
        self.net = net
        self.dims = dims
        self.collect = collect  # () -> css by columns, after the run
        self.handles = handles or {}
        self.raw_note = raw_note


class DesignRun:
    def __init__(self, design, dims, css_cols, metrics, warnings, raw_note):
        self.design = design
        self.dims = dims
        self.css_cols = css_cols
        self.metrics = metrics
        self.warnings = list(warnings)
        self.raw_note = raw_note


def _check_operands(ass_rows, bss_cols):
    n = len(ass_rows)
    if n < 1:
        raise WiringError("designs need at least one row in the left matrix")
    m = len(ass_rows[0])
    if m < 1:
        raise WiringError("designs need at least one column in the left matrix")
    for row in ass_rows:
        if len(row) != m:
            raise WiringError("left matrix is ragged")
    k = len(bss_cols)
    if k < 1:
        raise WiringError("designs need at least one column in the right matrix")
    for col in bss_cols:
        if len(col) != m:
            raise WiringError(f"right-matrix column length {len(col)} does not "
                              f"match left-matrix row length {m}")
    return n, m, k


def _stream_guard(port):
    """Alt list opening a stream port: EOT first, then the element guard."""
    return [Read(port.eot)] + [Read(c) for c in initial_read_channels(port.element)]


# -- d1: data-parallel ----------------------------------------------------

def build_d1(ass_rows, bss_cols, width=DEFAULT_WIDTH, shared_broadcast=True):
    """Full cell bank: per result column, the left matrix is replicated to
    n dot-product rows, each a multiplier bank feeding a fold chain.

    With shared_broadcast the left matrix is produced once and replayed by
    a broadcast process; without it every column gets a private producer.
    Both give the same result and the same traffic inside the columns.
    """
    n, m, k = _check_operands(ass_rows, bss_cols)
    net = Network(width)
    mat_shape = vector_of(n, vector_of(m, item()))

    bss_src = new_port(net, vector_of(k, vector_of(m, item())), "bss")
    produce(net, bss_src, [list(c) for c in bss_cols], "feed:bss")
    css = new_port(net, vector_of(k, vector_of(n, item())), "css")

    ass_copies = [new_port(net, mat_shape, f"ass_c{j}") for j in range(k)]
    if shared_broadcast:
        ass_src = new_port(net, mat_shape, "ass")
        produce(net, ass_src, [list(r) for r in ass_rows], "feed:ass")
        broadcast(net, ass_src, ass_copies, "replay:ass")
    else:
        for j in range(k):
            produce(net, ass_copies[j], [list(r) for r in ass_rows],
                    f"feed:ass{j}")

    column_channels = []
    for j in range(k):
        first = len(net.channels)
        bs_copies = [new_port(net, vector_of(m, item()), f"col{j}.bs{i}")
                     for i in range(n)]
        broadcast(net, bss_src.parts[j], bs_copies, f"col{j}.replay")
        for i in range(n):
            prods = new_port(net, vector_of(m, item()), f"col{j}.r{i}.p")
            vector_zip_with(net, lambda a, b: a * b, ass_copies[j].parts[i],
                            bs_copies[i], prods, f"col{j}.r{i}.mul")
            vector_fold_right(net, lambda a, b: a + b, 0, prods,
                              css.parts[j].parts[i], f"col{j}.r{i}.sum")
        ids = [c.id for c in net.channels[first:]]
        ids += [c.id for c in ass_copies[j].channels()]
        column_channels.append(ids)

    result = store(net, css, "store:css")
    return DesignBuild(net, (n, m, k), lambda: result.value,
                       handles={"column_channels": column_channels},
                       raw_note="columns gathered in parallel")


# -- d2: streamed -----------------------------------------------------------

def build_d2(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    """One dot-product subnetwork reused for every entry.

    The right matrix arrives as a stream of columns; for each column the
    driver replays the left-matrix rows through the dot-product wiring and
    emits one inner result stream, so the result is a stream of column
    streams. Minimal area, no overlap between entries.
    """
    n, m, k = _check_operands(ass_rows, bss_cols)
    net = Network(width)

    bss_in = new_port(net, stream_of(vector_of(m, item())), "bss")
    produce(net, bss_in, [list(c) for c in bss_cols], "feed:bss")
    css = new_port(net, stream_of(stream_of(item())), "css")
    unit = ScalarProduct(net, m, "dot", out_chan=css.element.element.chan)

    def driver():
        while True:
            alts = _stream_guard(bss_in)
            idx, val = yield Alt(alts)
            if idx == 0:
                yield Write(css.eot, EOT)
                return
            box = [None]
            yield from consume_gen(bss_in.element, box, (alts[idx].chan, val))
            bs = box[0]
            for row in ass_rows:
                yield from unit.run(row, bs)
            yield Write(css.element.eot, EOT)

    net.add("mmult", driver(),
            reads=bss_in.channels() + unit.claim_reads(),
            writes=[css.eot, css.element.eot] + unit.claim_writes())
    result = store(net, css, "store:css")
    return DesignBuild(net, (n, m, k), lambda: result.value,
                       raw_note="columns emitted in arrival order")


# -- d3: pipeline with growing result stream ---------------------------------

class _PairPort:
    """The through-line of d3: a stream of right-matrix columns beside a
    stream of (re-transmitted, growing) result streams."""

    __slots__ = ("name", "bs", "cs")

    def __init__(self, net, m, name):
        self.name = name
        self.bs = new_port(net, stream_of(vector_of(m, item())), f"{name}.bs")
        self.cs = new_port(net, stream_of(stream_of(item())), f"{name}.cs")

    def channels(self):
        return self.bs.channels() + self.cs.channels()


def build_d3(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    """One stage per left-matrix row. Each stage takes a column vector and
    the result stream built so far, appends its own scalar product, and
    re-transmits both. A distinct initial stage injects the empty stream.
    """
    n, m, k = _check_operands(ass_rows, bss_cols)
    net = Network(width)

    bss_in = new_port(net, stream_of(vector_of(m, item())), "bss")
    produce(net, bss_in, [list(c) for c in bss_cols], "feed:bss")
    out_pair = _PairPort(net, m, "out")

    def initial_stage(net_, left, right, _c):
        def gen():
            while True:
                alts = _stream_guard(left)
                idx, val = yield Alt(alts)
                if idx == 0:
                    yield Write(right.bs.eot, EOT)
                    yield Write(right.cs.eot, EOT)
                    return
                box = [None]
                yield from consume_gen(left.element, box, (alts[idx].chan, val))
                yield from produce_gen(right.bs.element, box[0], width)
                yield Write(right.cs.element.eot, EOT)  # the empty stream

        net_.add("pipe.init", gen(), reads=left.channels(),
                 writes=right.channels())

    def compute_stage(net_, left, right, c):
        row = ass_rows[c - 1]
        unit = ScalarProduct(net_, m, f"pipe.s{c}.dot")

        def gen():
            while True:
                alts = _stream_guard(left.bs)
                idx, val = yield Alt(alts)
                if idx == 0:
                    yield Read(left.cs.eot)
                    yield Write(right.bs.eot, EOT)
                    yield Write(right.cs.eot, EOT)
                    return
                bs_box = [None]
                yield from consume_gen(left.bs.element, bs_box,
                                       (alts[idx].chan, val))
                ys_box = [None]
                yield from consume_gen(left.cs.element, ys_box)
                entry = yield from unit.run(row, bs_box[0])
                yield from produce_gen(right.bs.element, bs_box[0], width)
                yield from produce_gen(right.cs.element,
                                       ys_box[0] + [entry], width)

        net_.add(f"pipe.s{c}", gen(),
                 reads=left.channels() + unit.claim_reads(),
                 writes=right.channels() + unit.claim_writes())

    def stage(net_, left, right, c):
        if c == 0:
            initial_stage(net_, left, right, c)
        else:
            compute_stage(net_, left, right, c)

    pipeline(net, n + 1, stage, bss_in, out_pair,
             mid_factory=lambda i: _PairPort(net, m, f"t{i}"), name="pipe")
    sink(net, out_pair.bs, "sink:through")
    result = store(net, out_pair.cs, "store:css")
    return DesignBuild(net, (n, m, k), lambda: result.value,
                       raw_note="result entries appended in row order, "
                                "columns in arrival order")


# -- d4: turnout pipeline -----------------------------------------------------

def build_d4(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    """Like d3, but each stage forwards the column vector untouched and
    drops its scalar product onto a private turnout stream, one per row.
    The turnouts are collected as result rows and transposed afterwards.
    """
    n, m, k = _check_operands(ass_rows, bss_cols)
    net = Network(width)

    bss_in = new_port(net, stream_of(vector_of(m, item())), "bss")
    produce(net, bss_in, [list(c) for c in bss_cols], "feed:bss")
    through_out = new_port(net, stream_of(vector_of(m, item())), "through")
    css_rows = new_port(net, vector_of(n, stream_of(item())), "css_rows")

    def stage(net_, left, right, tout, i):
        unit = ScalarProduct(net_, m, f"turn{i}.dot",
                             out_chan=tout.element.chan)

        def gen():
            while True:
                alts = _stream_guard(left)
                idx, val = yield Alt(alts)
                if idx == 0:
                    yield Write(right.eot, EOT)
                    yield Write(tout.eot, EOT)
                    return
                box = [None]
                yield from consume_gen(left.element, box, (alts[idx].chan, val))
                yield from produce_gen(right.element, box[0], width)
                yield from unit.run(ass_rows[i], box[0])

        net_.add(f"turn{i}", gen(),
                 reads=left.channels() + unit.claim_reads(),
                 writes=right.channels() + [tout.eot] + unit.claim_writes())

    turnout_pipeline(net, n, stage, bss_in, through_out, css_rows.parts,
                     name="turn")
    sink(net, through_out, "sink:through")
    result = bank_sink(net, css_rows, "store:css_rows")

    def collect():
        rows = result.value
        return [[rows[i][j] for i in range(n)] for j in range(k)]

    return DesignBuild(net, (n, m, k), collect,
                       raw_note="turnout streams carry result rows; "
                                "transposed to columns after the run")


# -- d5: systolic grid --------------------------------------------------------

def build_d5(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    """An n x m grid of multiply-accumulate cells.

    Column values flow down through the grid wire-by-wire with an in-band
    end token; partial sums enter each row as zero and leave at the right
    edge, forming one result column per input column. A drain under the
    grid turns the end tokens into the single outer EOT of the result.
    """
    n, m, k = _check_operands(ass_rows, bss_cols)
    net = Network(width)

    vert = [new_port(net, vector_of(m, item()), f"v{i}") for i in range(n + 1)]
    css = new_port(net, stream_of(vector_of(n, item())), "css")

    systolic_source(net, vert[0], [list(c) for c in bss_cols], "feed:bss")
    for i in range(n):
        seed = new_port(net, item(), f"zero{i}")
        repeat_item(net, seed, 0, k, f"seed{i}")
        systolic_row(net, ass_rows[i], seed, vert[i],
                     css.element.parts[i], vert[i + 1],
                     name=f"row{i}", looping=True)
    systolic_drain(net, vert[n], css, "drain")
    result = store(net, css, "store:css")
    return DesignBuild(net, (n, m, k), lambda: result.value,
                       raw_note="one result column per grid wave")


# -- running ------------------------------------------------------------------

_BUILDERS = {
    "d1": build_d1,
    "d2": build_d2,
    "d3": build_d3,
    "d4": build_d4,
    "d5": build_d5,
}


def build_design(design, ass_rows, bss_cols, width=DEFAULT_WIDTH, **kwargs):
    if design not in _BUILDERS:
        raise ValueError(f"unknown design {design!r}; choose from "
                         f"{', '.join(DESIGN_IDS)}")
    return _BUILDERS[design](ass_rows, bss_cols, width=width, **kwargs)


def run_design(design, ass_rows, bss_cols, *, width=DEFAULT_WIDTH,
               max_cycles=DEFAULT_MAX_CYCLES, **kwargs):
    """Build and run one design; returns a DesignRun with css by columns.

    Deadlocks and budget blowups propagate with .design set so callers can
    attribute them.
    """
    build = build_design(design, ass_rows, bss_cols, width=width, **kwargs)
    n, _m, k = build.dims
    try:
        metrics = build.net.run(max_cycles=max_cycles)
    except (DeadlockError, CycleBudgetError) as exc:
        exc.design = design
        exc.partial_metrics = build.net.metrics()
        exc.net_warnings = list(build.net.warnings)
        raise
    return DesignRun(design, build.dims, build.collect(),
                     metrics.with_items_out(n * k), build.net.warnings,
                     build.raw_note)


def expected_css(ass_rows, bss_cols, width=DEFAULT_WIDTH):
    return oracle.matrix_product(ass_rows, bss_cols, width)
