"""Process refinements of the usual higher-order functions.

Every builder here registers processes on a network and wires them to
ports. The naming follows what the process does to the data: mapping,
zipping, folding, piping. Stream variants loop until the EOT arrives and
forward it; vector variants are one-shot and parallel per element. The
multiply-accumulate cell and row builders are the systolic counterparts.

Builders taking a plain function refine it into processes that communicate
every operand: a two-input cell reads its operands in parallel, in either
arrival order, then emits the wrapped result.
"""

from .constructs import (ItemPort, StreamPort, VectorPort, feed,  # noqa: F401
                         initial_read_channels, consume_gen, new_port,
                         produce_gen, item, stream_of, vector_of)
from .runtime import (EOT, Alt, Par, ProtocolError, Read, WiringError, Write)
from .words import wrap


# -- primitive cells --------------------------------------------------------

def _read_into(chan, box):
    box[0] = yield Read(chan)


def _write_one(chan, value):
    yield Write(chan, value)


def _apply1_body(fn, cin, cout, width):
    v = yield Read(cin)
    yield Write(cout, wrap(fn(v), width))


def _apply2_body(fn, cin1, cin2, cout, width):
    a, b = [None], [None]
    yield Par([("in1", _read_into(cin1, a)), ("in2", _read_into(cin2, b))])
    yield Write(cout, wrap(fn(a[0], b[0]), width))


def _expect_item(port, what):
    if not isinstance(port, ItemPort):
        raise WiringError(f"{what}: expected an item port, got {port.shape}")


def _expect_item_stream(port, what):
    if not (isinstance(port, StreamPort) and isinstance(port.element, ItemPort)):
        raise WiringError(f"{what}: expected a stream-of-items port, "
                          f"got {port.shape}")


def _expect_item_vector(port, what, n=None):
    if not (isinstance(port, VectorPort)
            and all(isinstance(p, ItemPort) for p in port.parts)):
        raise WiringError(f"{what}: expected a vector-of-items port, "
                          f"got {port.shape}")
    if n is not None and len(port.parts) != n:
        raise WiringError(f"{what}: expected width {n}, got {len(port.parts)}")


def apply_elementwise(net, fn, pin, pout, name):
    """One process: read an item, write fn(item)."""
    _expect_item(pin, name)
    _expect_item(pout, name)
    return net.add(name, _apply1_body(fn, pin.chan, pout.chan, net.width),
                   reads=[pin.chan], writes=[pout.chan])


def apply_pairwise(net, fn, pin1, pin2, pout, name):
    """One process: read two items in parallel, write fn(a, b)."""
    for p in (pin1, pin2, pout):
        _expect_item(p, name)
    return net.add(name,
                   _apply2_body(fn, pin1.chan, pin2.chan, pout.chan, net.width),
                   reads=[pin1.chan, pin2.chan], writes=[pout.chan])


def adder(net, pin1, pin2, pout, name="add"):
    return apply_pairwise(net, lambda a, b: a + b, pin1, pin2, pout, name)


def multiplier(net, pin1, pin2, pout, name="mul"):
    return apply_pairwise(net, lambda a, b: a * b, pin1, pin2, pout, name)


# -- mapping and zipping -----------------------------------------------------

def stream_map(net, fn, sin, sout, name="stream_map"):
    """Refines map over a stream: one looping process, EOT forwarded last."""
    _expect_item_stream(sin, name)
    _expect_item_stream(sout, name)
    width = net.width

    def gen():
        while True:
            idx, val = yield Alt([Read(sin.eot), Read(sin.element.chan)])
            if idx == 0:
                yield Write(sout.eot, EOT)
                return
            yield Write(sout.element.chan, wrap(fn(val), width))

    return net.add(name, gen(), reads=sin.channels(), writes=sout.channels())


def vector_map(net, fn, vin, vout, name="vector_map"):
    """Refines map over a vector: one independent process per element."""
    _expect_item_vector(vin, name)
    _expect_item_vector(vout, name, n=len(vin.parts))
    procs = []
    for i, (pi, po) in enumerate(zip(vin.parts, vout.parts)):
        procs.append(apply_elementwise(net, fn, pi, po, f"{name}[{i}]"))
    return procs


def stream_zip_with(net, fn, sin1, sin2, sout, name="stream_zip"):
    """Refines zipWith over two streams.

    Elements are taken first-stream-first; the second stream's EOT must
    directly follow the first's, so a length mismatch raises a
    ProtocolError at the earlier EOT rather than truncating.
    """
    for s in (sin1, sin2, sout):
        _expect_item_stream(s, name)
    width = net.width

    def gen():
        while True:
            idx, val = yield Alt([Read(sin1.eot), Read(sin1.element.chan)])
            if idx == 0:
                jdx, _ = yield Alt([Read(sin2.eot), Read(sin2.element.chan)])
                if jdx != 0:
                    raise ProtocolError("zipped streams differ in length "
                                        "(second stream is longer)")
                yield Write(sout.eot, EOT)
                return
            jdx, other = yield Alt([Read(sin2.eot), Read(sin2.element.chan)])
            if jdx == 0:
                raise ProtocolError("zipped streams differ in length "
                                    "(second stream is shorter)")
            yield Write(sout.element.chan, wrap(fn(val, other), width))

    reads = sin1.channels() + sin2.channels()
    return net.add(name, gen(), reads=reads, writes=sout.channels())


def vector_zip_with(net, fn, vin1, vin2, vout, name="vector_zip"):
    """Refines zipWith over two vectors: one two-input cell per element."""
    _expect_item_vector(vin1, name)
    n = len(vin1.parts)
    _expect_item_vector(vin2, name, n=n)
    _expect_item_vector(vout, name, n=n)
    procs = []
    for i in range(n):
        procs.append(apply_pairwise(net, fn, vin1.parts[i], vin2.parts[i],
                                    vout.parts[i], f"{name}[{i}]"))
    return procs


# -- folding -----------------------------------------------------------------

def _fold_bodies(fn, seed, elem_chans, carry_chans, out_chan, width):
    """Bodies for a right-fold chain: cell t combines element t with the
    carry from cell t+1; the last cell folds the seed in directly."""
    m = len(elem_chans)
    bodies = []
    for t in range(m):
        wout = out_chan if t == 0 else carry_chans[t - 1]
        if t == m - 1:
            bodies.append((f"fold{t}", _apply1_body(
                lambda v, _fn=fn, _s=seed: _fn(v, _s), elem_chans[t], wout,
                width)))
        else:
            bodies.append((f"fold{t}", _apply2_body(
                fn, elem_chans[t], carry_chans[t], wout, width)))
    return bodies


def vector_fold_right(net, fn, seed, vin, pout, name="fold"):
    """Refines foldr fn seed over a vector: a linear chain of cells."""
    _expect_item_vector(vin, name)
    _expect_item(pout, name)
    m = len(vin.parts)
    carries = [net.new_channel(f"{name}.carry{t}") for t in range(m - 1)]
    elem_chans = [p.chan for p in vin.parts]
    bodies = _fold_bodies(fn, seed, elem_chans, carries, pout.chan, net.width)
    procs = []
    for t, (suffix, body) in enumerate(bodies):
        reads = [elem_chans[t]]
        if t < m - 1:
            reads.append(carries[t])
        writes = [pout.chan if t == 0 else carries[t - 1]]
        procs.append(net.add(f"{name}.{suffix}", body, reads=reads,
                             writes=writes))
    return procs


# -- a reusable dot-product subnetwork ---------------------------------------

class ScalarProduct:
    """A dot-product subnetwork allocated once and driven per activation.

    The channels are static; each activation forks fresh one-shot cells
    over them (two operand feeders, the multiplier bank, the fold chain),
    so a looping driver can evaluate many dot products through the same
    wiring. With `out_chan` the result is written to an external channel,
    otherwise run() returns it.
    """

    def __init__(self, net, m, name, out_chan=None):
        if m < 1:
            raise WiringError(f"{name}: dot product needs width >= 1")
        self.net = net
        self.m = m
        self.name = name
        self.in_a = new_port(net, vector_of(m, item()), f"{name}.a")
        self.in_b = new_port(net, vector_of(m, item()), f"{name}.b")
        self.prod = new_port(net, vector_of(m, item()), f"{name}.p")
        self.carries = [net.new_channel(f"{name}.carry{t}")
                        for t in range(m - 1)]
        self._external = out_chan is not None
        self.out_chan = out_chan if self._external else net.new_channel(
            f"{name}.out")

    def claim_reads(self):
        chans = (self.in_a.channels() + self.in_b.channels()
                 + self.prod.channels() + list(self.carries))
        if not self._external:
            chans.append(self.out_chan)
        return chans

    def claim_writes(self):
        return (self.in_a.channels() + self.in_b.channels()
                + self.prod.channels() + list(self.carries)
                + [self.out_chan])

    def run(self, a_vals, b_vals):
        """One activation; a generator to be driven with `yield from`."""
        width = self.net.width
        kids = [
            ("feed_a", produce_gen(self.in_a, list(a_vals), width)),
            ("feed_b", produce_gen(self.in_b, list(b_vals), width)),
        ]
        for t in range(self.m):
            kids.append((f"mul{t}", _apply2_body(
                lambda a, b: a * b, self.in_a.parts[t].chan,
                self.in_b.parts[t].chan, self.prod.parts[t].chan, width)))
        kids.extend(_fold_bodies(lambda a, b: a + b, 0,
                                 [p.chan for p in self.prod.parts],
                                 self.carries, self.out_chan, width))
        box = [None]
        if not self._external:
            kids.append(("res", _read_into(self.out_chan, box)))
        yield Par(kids)
        return box[0]


# -- pipelines ----------------------------------------------------------------

def pipeline(net, n, stage, pin, pout, mid_factory, name="pipe"):
    """Chain n stages over hidden intermediate ports.

    `stage(net, left, right, index)` builds stage `index`; `mid_factory(i)`
    makes intermediate port i. At least two stages, so the first can differ
    from the rest.
    """
    if n < 2:
        raise WiringError(f"{name}: pipeline needs at least 2 stages, got {n}")
    mids = [mid_factory(i) for i in range(n - 1)]
    ends = [pin, *mids, pout]
    for c in range(n):
        stage(net, ends[c], ends[c + 1], c)
    return mids


def turnout_pipeline(net, n, stage, pin, pout, turnouts, name="turnout"):
    """Chain n stages that each also own a private turnout output port.

    The through-line ports all share pin's shape; `stage(net, left, right,
    turnout, index)` builds each stage.
    """
    if n < 1:
        raise WiringError(f"{name}: needs at least 1 stage, got {n}")
    turnouts = list(turnouts)
    if len(turnouts) != n:
        raise WiringError(f"{name}: {n} stages need {n} turnouts, "
                          f"got {len(turnouts)}")
    mids = [new_port(net, pin.shape, f"{name}.mid{i}") for i in range(n - 1)]
    ends = [pin, *mids, pout]
    for c in range(n):
        stage(net, ends[c], ends[c + 1], turnouts[c], c)
    return mids


def pipelined_map(net, fn3, seed, args, sin, sout, name="pmap"):
    """Refine `map (h args)` into a pipeline, where

        h []     x = seed
        h (a:s)  x = fn3(a, x, h s x)

    Stage order is reversed(args) so the innermost application happens
    first. Each stage carries the pair (x, running value) on a two-wide
    vector under one stream; a distinct initial stage injects the seed and
    a final stage keeps only the result.
    """
    args = list(args)
    if not args:
        raise WiringError(f"{name}: needs at least one stage argument")
    _expect_item_stream(sin, name)
    _expect_item_stream(sout, name)
    width = net.width
    pair_shape = stream_of(vector_of(2, item()))
    mids = [new_port(net, pair_shape, f"{name}.t{i}")
            for i in range(len(args) + 1)]

    def initial():
        while True:
            idx, val = yield Alt([Read(sin.eot), Read(sin.element.chan)])
            if idx == 0:
                yield Write(mids[0].eot, EOT)
                return
            yield Par([
                ("x", _write_one(mids[0].element.parts[0].chan, val)),
                ("y", _write_one(mids[0].element.parts[1].chan,
                                 wrap(seed, width))),
            ])

    def stage_gen(a, left, right):
        while True:
            idx, val = yield Alt([Read(left.eot),
                                  Read(left.element.parts[0].chan)])
            if idx == 0:
                yield Write(right.eot, EOT)
                return
            x = val
            y = yield Read(left.element.parts[1].chan)
            y2 = wrap(fn3(a, x, y), width)
            yield Par([
                ("x", _write_one(right.element.parts[0].chan, x)),
                ("y", _write_one(right.element.parts[1].chan, y2)),
            ])

    def final(left):
        while True:
            idx, _ = yield Alt([Read(left.eot),
                                Read(left.element.parts[0].chan)])
            if idx == 0:
                yield Write(sout.eot, EOT)
                return
            y = yield Read(left.element.parts[1].chan)
            yield Write(sout.element.chan, y)

    net.add(f"{name}.init", initial(), reads=sin.channels(),
            writes=mids[0].channels())
    for c, a in enumerate(reversed(args)):
        net.add(f"{name}.s{c}", stage_gen(a, mids[c], mids[c + 1]),
                reads=mids[c].channels(), writes=mids[c + 1].channels())
    net.add(f"{name}.fin", final(mids[-1]), reads=mids[-1].channels(),
            writes=sout.channels())


# -- systolic cells and rows ---------------------------------------------------

def mac_cell(net, a, up, left, right, down, name="cell", looping=False):
    """Multiply-accumulate cell holding coefficient `a`.

    One activation reads u from above and l from the left, emits u*a + l to
    the right and forwards u downward. The looping variant forwards u down
    first and keeps going until u is the EOT token, which it propagates and
    then stops.
    """
    for p in (up, left, right, down):
        _expect_item(p, name)
    width = net.width

    def once():
        u = yield Read(up.chan)
        l = yield Read(left.chan)
        yield Write(right.chan, wrap(u * a + l, width))
        yield Write(down.chan, u)

    def loop():
        while True:
            u = yield Read(up.chan)
            yield Write(down.chan, u)
            if u is EOT:
                return
            l = yield Read(left.chan)
            yield Write(right.chan, wrap(u * a + l, width))

    return net.add(name, loop() if looping else once(),
                   reads=[up.chan, left.chan],
                   writes=[right.chan, down.chan])


def systolic_row(net, row, left_in, ups, right_out, downs, name="row",
                 looping=False):
    """A chain of multiply-accumulate cells over hidden partial-sum wires.

    Cell t holds row[t], takes its vertical input from ups[t] and forwards
    it to downs[t]; the partial sum enters at left_in, threads the chain,
    and leaves at right_out. With one cell the row degenerates to that cell.
    """
    m = len(row)
    if m < 1:
        raise WiringError(f"{name}: needs at least one cell")
    _expect_item(left_in, name)
    _expect_item(right_out, name)
    _expect_item_vector(ups, name, n=m)
    _expect_item_vector(downs, name, n=m)
    mids = [ItemPort(item(), f"{name}.m{t}", net.new_channel(f"{name}.m{t}"))
            for t in range(m - 1)]
    lefts = [left_in, *mids]
    rights = [*mids, right_out]
    cells = []
    for t in range(m):
        cells.append(mac_cell(net, row[t], ups.parts[t], lefts[t], rights[t],
                              downs.parts[t], name=f"{name}.c{t}",
                              looping=looping))
    return cells


def systolic_source(net, ups, columns, name="syst_src"):
    """Feed vectors down into a systolic grid, one writer per column wire.

    Writers run independently, so later columns enter as soon as the cells
    below can take them; each wire ends with an in-band EOT token.
    """
    _expect_item_vector(ups, name)
    m = len(ups.parts)
    for col in columns:
        if len(col) != m:
            raise WiringError(f"{name}: column width {len(col)} != {m}")
    width = net.width

    def wire_writer(chan, vals):
        for v in vals:
            yield Write(chan, wrap(v, width))
        yield Write(chan, EOT)

    def gen():
        yield Par([(f"w{t}", wire_writer(ups.parts[t].chan,
                                         [col[t] for col in columns]))
                   for t in range(m)])

    return net.add(name, gen(), writes=ups.channels())


def repeat_item(net, port, value, count, name="seed"):
    """Write the same item `count` times, then stop."""
    _expect_item(port, name)
    width = net.width

    def gen():
        for _ in range(count):
            yield Write(port.chan, wrap(value, width))

    return net.add(name, gen(), writes=[port.chan])


def systolic_drain(net, bottoms, out_stream, name="syst_drain"):
    """Absorb a grid's bottom edge; when every wire has delivered its EOT
    token, emit the single outer EOT of the result stream and stop."""
    _expect_item_vector(bottoms, name)
    m = len(bottoms.parts)

    def gen():
        while True:
            boxes = [[None] for _ in range(m)]
            yield Par([(f"r{t}", _read_into(bottoms.parts[t].chan, boxes[t]))
                       for t in range(m)])
            ended = sum(1 for b in boxes if b[0] is EOT)
            if ended == m:
                yield Write(out_stream.eot, EOT)
                return
            if ended:
                raise ProtocolError("systolic columns ended unevenly")

    return net.add(name, gen(), reads=bottoms.channels(),
                   writes=[out_stream.eot])
