"""Data shapes, ports, and the processes that drive or drain them.

A shape says how a composite value is carried over channels:

  item()            one value on one channel
  stream_of(s)      the element port transmitted any number of times,
                    terminated by one token on a dedicated EOT channel
  vector_of(n, s)   n element ports transmitted in parallel, no EOT

Shapes nest freely. A port is the channel bundle for a shape; the plain
Python value travelling through it (int, list of ints, list of lists...)
is called a value tree. `produce` turns a value tree into channel traffic,
`store` collects traffic back into a value tree, `sink` discards it, and
`broadcast` replays one port onto several. Stream ports get a protocol
monitor so an EOT is always final for that transmission.
"""

from dataclasses import dataclass

from .runtime import (EOT, Alt, Par, Read, StreamMonitor, WiringError, Write)
from .words import wrap


# -- shapes ---------------------------------------------------------------

@dataclass(frozen=True)
class ItemShape:
    def __str__(self):
        return "item"


@dataclass(frozen=True)
class StreamShape:
    element: object

    def __str__(self):
        return f"stream_of({self.element})"


@dataclass(frozen=True)
class VectorShape:
    n: int
    element: object

    def __str__(self):
        return f"vector_of({self.n}, {self.element})"


def item():
    return ItemShape()


def stream_of(element):
    return StreamShape(element)


def vector_of(n, element):
    if not isinstance(n, int) or n < 1:
        raise WiringError(f"vector width must be a positive int, got {n!r}")
    return VectorShape(n, element)


# -- ports ----------------------------------------------------------------

class ItemPort:
    __slots__ = ("shape", "name", "chan")

    def __init__(self, shape, name, chan):
        self.shape = shape
        self.name = name
        self.chan = chan

    def channels(self):
        return [self.chan]


class StreamPort:
    __slots__ = ("shape", "name", "element", "eot")

    def __init__(self, shape, name, element, eot):
        self.shape = shape
        self.name = name
        self.element = element
        self.eot = eot

    def channels(self):
        return self.element.channels() + [self.eot]


class VectorPort:
    __slots__ = ("shape", "name", "parts")

    def __init__(self, shape, name, parts):
        self.shape = shape
        self.name = name
        self.parts = parts

    def channels(self):
        out = []
        for p in self.parts:
            out.extend(p.channels())
        return out


def new_port(net, shape, name, _inside_stream=False):
    """Allocate the channel bundle for `shape`, registering stream monitors."""
    if isinstance(shape, ItemShape):
        return ItemPort(shape, name, net.new_channel(name))
    if isinstance(shape, VectorShape):
        parts = tuple(
            new_port(net, shape.element, f"{name}[{i}]", _inside_stream)
            for i in range(shape.n))
        return VectorPort(shape, name, parts)
    if isinstance(shape, StreamShape):
        element = new_port(net, shape.element, f"{name}.e", True)
        eot = net.new_channel(f"{name}.eot", kind="eot")
        port = StreamPort(shape, name, element, eot)
        monitor = StreamMonitor(name, eot, reusable=_inside_stream)
        net.add_monitor(monitor, element.channels())
        return port
    raise WiringError(f"not a shape: {shape!r}")


def initial_read_channels(port):
    """Channels on which a consumer may first see this construct.

    A vector is guarded by its first element; a stream may open with its
    element's first channel or go straight to EOT (empty stream).
    """
    if isinstance(port, ItemPort):
        return [port.chan]
    if isinstance(port, VectorPort):
        return initial_read_channels(port.parts[0])
    if isinstance(port, StreamPort):
        return initial_read_channels(port.element) + [port.eot]
    raise WiringError(f"not a port: {port!r}")


def check_value(shape, value, what="value"):
    if isinstance(shape, ItemShape):
        if not isinstance(value, int) or isinstance(value, bool):
            raise WiringError(f"{what}: expected an int for item, got {value!r}")
    elif isinstance(shape, VectorShape):
        if not isinstance(value, (list, tuple)) or len(value) != shape.n:
            raise WiringError(
                f"{what}: expected a sequence of {shape.n} for {shape}, "
                f"got {value!r}")
        for i, v in enumerate(value):
            check_value(shape.element, v, f"{what}[{i}]")
    elif isinstance(shape, StreamShape):
        if not isinstance(value, (list, tuple)):
            raise WiringError(f"{what}: expected a sequence for {shape}, "
                              f"got {value!r}")
        for i, v in enumerate(value):
            check_value(shape.element, v, f"{what}[{i}]")
    else:
        raise WiringError(f"not a shape: {shape!r}")


# -- producing and consuming ----------------------------------------------

def produce_gen(port, value, width):
    """Generator emitting `value` over `port`: streams sequential with a
    final EOT, vector elements forked in parallel."""
    if isinstance(port, ItemPort):
        yield Write(port.chan, wrap(value, width))
    elif isinstance(port, VectorPort):
        yield Par([(f"[{i}]", produce_gen(p, v, width))
                   for i, (p, v) in enumerate(zip(port.parts, value))])
    else:
        for v in value:
            yield from produce_gen(port.element, v, width)
        yield Write(port.eot, EOT)


def consume_gen(port, box, prefired=None):
    """Generator reading one construct from `port` into box[0].

    `prefired` is a (channel, value) pair for a transfer that a surrounding
    guard already took; it is routed to the sub-port that owns the channel.
    """
    if isinstance(port, ItemPort):
        if prefired is not None:
            box[0] = prefired[1]
        else:
            box[0] = yield Read(port.chan)
    elif isinstance(port, VectorPort):
        slots = [[None] for _ in port.parts]
        branches = []
        for i, p in enumerate(port.parts):
            pf = None
            if prefired is not None and _owns(p, prefired[0]):
                pf = prefired
            branches.append((f"[{i}]", consume_gen(p, slots[i], pf)))
        yield Par(branches)
        box[0] = [s[0] for s in slots]
    else:
        items = []
        pending = prefired
        while True:
            if pending is None:
                alts = [Read(port.eot)]
                alts += [Read(c) for c in initial_read_channels(port.element)]
                idx, val = yield Alt(alts)
                fired = (alts[idx].chan, val)
            else:
                fired, pending = pending, None
            if fired[0] is port.eot:
                break
            slot = [None]
            yield from consume_gen(port.element, slot, fired)
            items.append(slot[0])
        box[0] = items


def _owns(port, chan):
    if isinstance(port, ItemPort):
        return port.chan is chan
    if isinstance(port, VectorPort):
        return any(_owns(p, chan) for p in port.parts)
    return chan is port.eot or _owns(port.element, chan)


class StoreHandle:
    """Handle onto a store process; .value is the collected value tree."""

    def __init__(self, proc, box):
        self.proc = proc
        self._box = box

    @property
    def value(self):
        return self._box[0]


def produce(net, port, value, name=None):
    """One process that drives `port` with `value`."""
    check_value(port.shape, value, f"produce({port.name})")
    return net.add(name or f"produce:{port.name}",
                   produce_gen(port, value, net.width),
                   writes=port.channels())


def store(net, port, name=None):
    """One process that drains `port`, keeping the value tree."""
    box = [None]
    proc = net.add(name or f"store:{port.name}", consume_gen(port, box),
                   reads=port.channels())
    return StoreHandle(proc, box)


def sink(net, port, name=None):
    """Like store but the value is discarded."""
    box = [None]
    return net.add(name or f"sink:{port.name}", consume_gen(port, box),
                   reads=port.channels())


def feed(net, shape, producer, consumer, name="mid"):
    """Compose a producing builder with a consuming builder over a hidden port.

    Both arguments are callables taking the freshly made port; returns
    whatever the consumer builder returns (typically a StoreHandle).
    """
    port = new_port(net, shape, name)
    producer(port)
    return consumer(port)


# -- replication ----------------------------------------------------------

def _broadcast_gen(pin, pouts, prefired=None):
    if isinstance(pin, ItemPort):
        if prefired is not None:
            v = prefired[1]
        else:
            v = yield Read(pin.chan)
        yield Par([(f"fan{i}", _write_one(o.chan, v))
                   for i, o in enumerate(pouts)])
    elif isinstance(pin, VectorPort):
        branches = []
        for i in range(len(pin.parts)):
            pf = prefired if prefired and _owns(pin.parts[i], prefired[0]) else None
            branches.append((f"[{i}]", _broadcast_gen(
                pin.parts[i], [o.parts[i] for o in pouts], pf)))
        yield Par(branches)
    else:
        pending = prefired
        while True:
            if pending is None:
                alts = [Read(pin.eot)]
                alts += [Read(c) for c in initial_read_channels(pin.element)]
                idx, val = yield Alt(alts)
                fired = (alts[idx].chan, val)
            else:
                fired, pending = pending, None
            if fired[0] is pin.eot:
                yield Par([(f"fan{i}", _write_one(o.eot, EOT))
                           for i, o in enumerate(pouts)])
                return
            yield from _broadcast_gen(pin.element, [o.element for o in pouts],
                                      fired)


def _write_one(chan, value):
    yield Write(chan, value)


def broadcast(net, pin, pouts, name=None):
    """Relay every transfer on `pin` to all of `pouts` (same shape each)."""
    pouts = list(pouts)
    if not pouts:
        raise WiringError("broadcast needs at least one output port")
    for o in pouts:
        if o.shape != pin.shape:
            raise WiringError(f"broadcast: {o.name} has shape {o.shape}, "
                              f"input is {pin.shape}")
    writes = []
    for o in pouts:
        writes.extend(o.channels())
    return net.add(name or f"broadcast:{pin.name}",
                   _broadcast_gen(pin, pouts),
                   reads=pin.channels(), writes=writes)


# -- memory-bank models ---------------------------------------------------

BANK_LIMIT = 4  # concurrent single-port banks available on the modeled board


def bank_source(net, data, name="bank"):
    """A single-port memory read out sequentially, one word per cycle.

    Returns (proc, StreamPort) carrying the words followed by an EOT.
    """
    port = new_port(net, stream_of(item()), name)
    proc = produce(net, port, list(data), name=f"{name}.read")
    return proc, port


def bank_sink(net, port, name=None):
    """Store a port's traffic as if written to memory banks.

    Vector-of-stream ports wider than the bank count raise a construction
    warning on the network; the run itself is not throttled.
    """
    if (isinstance(port, VectorPort)
            and all(isinstance(p, StreamPort) for p in port.parts)
            and len(port.parts) > BANK_LIMIT):
        net.warn(f"bank fan-out {len(port.parts)} exceeds the {BANK_LIMIT} "
                 "concurrent memory banks modeled for result storage")
    return store(net, port, name=name or f"bank_sink:{port.name}")
