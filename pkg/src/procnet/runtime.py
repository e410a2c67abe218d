"""Cycle-stepped scheduler for networks of rendezvous-communicating processes.

A process is a Python generator that yields communication offers. A channel
is unbuffered: a transfer happens only in a cycle where the channel's writer
and reader both offer it, and every transfer matched in a cycle commits
atomically before any process resumes. Local computation between
communications is free, so the cycle counter advances one tick per scheduler
step and each sequential process completes at most one communication per
cycle. This mirrors the statement-level clocking of synchronous hardware
languages: arithmetic is combinational, communication takes the clock edge.

Offer kinds a process may yield:

  Write(chan, value)   block until the reader takes `value`
  Read(chan)           block until a value arrives; resumes with the value
  Alt([ev, ...])       prioritized choice over Read/Write events; resumes
                       with (index, value) where value is None for a Write
  Par([(name, gen)])   fork child processes and block until all finish

Matching is deterministic. Each cycle the scheduler repeatedly commits all
pairs of processes whose highest-priority mutually-available events agree,
and on a standstill with offers still pairable it fires the event whose
reading process has the lowest process id. Ties inside one process are
decided by the order of its alternative list, earliest first.
"""

from collections import deque

from .words import DEFAULT_WIDTH, check_width


class WiringError(Exception):
    """A network was assembled incorrectly (bad claims, shapes, or offers)."""


class ProtocolError(Exception):
    """A run violated a stream protocol, e.g. data after EOT."""


class DeadlockError(Exception):
    def __init__(self, message, blocked=(), cycle=0):
        super().__init__(message)
        self.blocked = list(blocked)
        self.cycle = cycle
        self.design = None


class CycleBudgetError(Exception):
    def __init__(self, message, cycle=0):
        super().__init__(message)
        self.cycle = cycle
        self.design = None


class _EotToken:
    """End-of-transmission marker; a singleton so identity checks work."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EOT"


EOT = _EotToken()


class Channel:
    __slots__ = ("id", "name", "kind", "writer", "reader")

    def __init__(self, id, name, kind="data"):
        self.id = id
        self.name = name
        self.kind = kind  # "data" or "eot"; eot channels carry the EOT token
        self.writer = None  # Proc that claimed the writing end
        self.reader = None

    def __repr__(self):
        return f"Channel({self.name!r})"


class Write:
    __slots__ = ("chan", "value")

    def __init__(self, chan, value):
        self.chan = chan
        self.value = value


class Read:
    __slots__ = ("chan",)

    def __init__(self, chan):
        self.chan = chan


class Alt:
    __slots__ = ("events",)

    def __init__(self, events):
        events = list(events)
        if not events:
            raise WiringError("alternative list must not be empty")
        self.events = events


class Par:
    __slots__ = ("branches",)

    def __init__(self, branches):
        self.branches = list(branches)


class Proc:
    """A statically registered process. The process-count metric counts these."""

    __slots__ = ("pid", "name", "gen")

    def __init__(self, pid, name, gen):
        self.pid = pid
        self.name = name
        self.gen = gen

    def __repr__(self):
        return f"Proc({self.name!r})"


class _Task:
    """Execution node: a root Proc or a forked child."""

    __slots__ = ("tid", "name", "gen", "proc", "parent", "waiting", "offer",
                 "is_alt", "done")

    def __init__(self, tid, name, gen, proc, parent):
        self.tid = tid
        self.name = name
        self.gen = gen
        self.proc = proc  # owning root Proc, for channel-claim checks
        self.parent = parent
        self.waiting = 0
        self.offer = None
        self.is_alt = False
        self.done = False


class StreamMonitor:
    """Watches one stream port: data must stop once the EOT has passed.

    Ports nested under an enclosing stream are transmitted repeatedly, so
    they are `reusable`: data arriving after an EOT opens the next
    transmission instead of being an error. Every monitor must be in the
    closed state when the network terminates, and a non-reusable port must
    have delivered exactly one EOT. A reusable port that carried no traffic
    at all is fine — its enclosing stream was empty, so the wire never ran.
    """

    __slots__ = ("name", "eot_chan", "reusable", "closed", "eots", "datas")

    def __init__(self, name, eot_chan, reusable):
        self.name = name
        self.eot_chan = eot_chan
        self.reusable = reusable
        self.closed = False
        self.eots = 0
        self.datas = 0

    def on_event(self, chan):
        if chan is self.eot_chan:
            if self.closed and not self.reusable:
                raise ProtocolError(f"stream {self.name}: second EOT")
            self.closed = True
            self.eots += 1
        else:
            if self.closed:
                if not self.reusable:
                    raise ProtocolError(
                        f"stream {self.name}: data on {chan.name} after EOT")
                self.closed = False
            self.datas += 1

    def final_check(self):
        if self.reusable and self.eots == 0 and self.datas == 0:
            return
        if not self.closed:
            raise ProtocolError(f"stream {self.name}: never delivered an EOT")
        if not self.reusable and self.eots != 1:
            raise ProtocolError(
                f"stream {self.name}: delivered {self.eots} EOTs, expected 1")


class TraceMetrics:
    __slots__ = ("cycles", "communications", "process_count", "channel_count",
                 "items_out")

    def __init__(self, cycles, communications, process_count, channel_count,
                 items_out=0):
        self.cycles = cycles
        self.communications = communications
        self.process_count = process_count
        self.channel_count = channel_count
        self.items_out = items_out

    @property
    def throughput(self):
        """Items emitted per cycle; None when no cycle has elapsed."""
        if self.cycles == 0:
            return None
        return self.items_out / self.cycles

    def with_items_out(self, items_out):
        return TraceMetrics(self.cycles, self.communications,
                            self.process_count, self.channel_count, items_out)

    def __repr__(self):
        return (f"TraceMetrics(cycles={self.cycles}, "
                f"communications={self.communications}, "
                f"process_count={self.process_count}, "
                f"channel_count={self.channel_count}, "
                f"items_out={self.items_out})")


DEFAULT_MAX_CYCLES = 1_000_000


class Network:
    """A closed set of processes and channels stepped under one clock."""

    def __init__(self, width=DEFAULT_WIDTH):
        self.width = check_width(width)
        self.channels = []
        self.procs = []
        self.warnings = []
        self.cycle = 0
        self.communications = 0
        self.channel_comms = []
        self.trace = []  # (cycle, channel id, value) per transfer
        self.monitors = []
        self._monitors_by_chan = {}
        self._tasks = []
        self._next_tid = 0
        self._live = 0
        self._started = False
        self._resume_queue = deque()

    # -- construction ----------------------------------------------------

    def new_channel(self, name, kind="data"):
        ch = Channel(len(self.channels), name, kind)
        self.channels.append(ch)
        self.channel_comms.append(0)
        return ch

    def add(self, name, gen, *, reads=(), writes=()):
        """Register a process and claim its channel endpoints.

        Claiming is exclusive: a channel takes exactly one writing and one
        reading process, checked here so miswiring fails at construction.
        """
        if self._started:
            raise WiringError("cannot add processes to a started network")
        proc = Proc(len(self.procs), name, gen)
        for ch in writes:
            if ch.writer is not None:
                raise WiringError(
                    f"channel {ch.name}: writer already claimed by "
                    f"{ch.writer.name}, cannot add {name}")
            ch.writer = proc
        for ch in reads:
            if ch.reader is not None:
                raise WiringError(
                    f"channel {ch.name}: reader already claimed by "
                    f"{ch.reader.name}, cannot add {name}")
            ch.reader = proc
        self.procs.append(proc)
        return proc

    def add_monitor(self, monitor, data_chans):
        self.monitors.append(monitor)
        self._monitors_by_chan.setdefault(monitor.eot_chan.id, []).append(monitor)
        for ch in data_chans:
            self._monitors_by_chan.setdefault(ch.id, []).append(monitor)

    def warn(self, message):
        if message not in self.warnings:
            self.warnings.append(message)

    # -- execution -------------------------------------------------------

    def _check_closed(self):
        dangling = []
        for ch in self.channels:
            if ch.writer is None:
                dangling.append(f"{ch.name}: no writer")
            if ch.reader is None:
                dangling.append(f"{ch.name}: no reader")
        if dangling:
            raise WiringError("network is not closed: " + "; ".join(dangling))

    def _start(self):
        if self._started:
            return
        self._check_closed()
        self._started = True
        for proc in self.procs:
            task = _Task(self._next_tid, proc.name, proc.gen, proc, None)
            self._next_tid += 1
            self._tasks.append(task)
            self._live += 1
            self._resume_queue.append((task, None))
        self._drain_resumes()

    def _spawn(self, parent, branches):
        children = []
        for branch in branches:
            if isinstance(branch, tuple):
                name, gen = branch
                name = f"{parent.name}/{name}"
            else:
                name, gen = f"{parent.name}/par{len(children)}", branch
            task = _Task(self._next_tid, name, gen, parent.proc, parent)
            self._next_tid += 1
            self._tasks.append(task)
            self._live += 1
            children.append(task)
        parent.waiting = len(children)
        if not children:
            self._resume_queue.append((parent, None))
        for child in children:
            self._resume_queue.append((child, None))

    def _finish(self, task):
        task.done = True
        task.offer = None
        self._live -= 1
        parent = task.parent
        if parent is not None:
            parent.waiting -= 1
            if parent.waiting == 0:
                self._resume_queue.append((parent, None))

    def _check_event(self, task, ev):
        if isinstance(ev, Write):
            owner = ev.chan.writer
            side = "write"
        elif isinstance(ev, Read):
            owner = ev.chan.reader
            side = "read"
        else:
            raise WiringError(f"{task.name}: alternatives must be Read/Write, "
                              f"got {type(ev).__name__}")
        if owner is not task.proc:
            raise WiringError(
                f"{task.name}: {side} on {ev.chan.name} not claimed by its "
                f"process (claimed by {owner.name if owner else 'nobody'})")

    def _drain_resumes(self):
        """Run resumable tasks until each blocks on an offer, forks, or ends.

        This is the combinational part of a cycle: it costs no time.
        """
        queue = self._resume_queue
        while queue:
            task, value = queue.popleft()
            try:
                yielded = task.gen.send(value)
            except StopIteration:
                self._finish(task)
                continue
            except ProtocolError as exc:
                raise ProtocolError(f"{task.name}: {exc}") from None
            if isinstance(yielded, Par):
                self._spawn(task, yielded.branches)
            elif isinstance(yielded, Alt):
                for ev in yielded.events:
                    self._check_event(task, ev)
                task.offer = yielded.events
                task.is_alt = True
            elif isinstance(yielded, (Read, Write)):
                self._check_event(task, yielded)
                task.offer = [yielded]
                task.is_alt = False
            else:
                raise WiringError(
                    f"{task.name}: yielded {type(yielded).__name__}, expected "
                    "Read/Write/Alt/Par")

    def _match(self):
        """Pick the transfers that fire this cycle; see the module docstring."""
        offering = [t for t in self._tasks if not t.done and t.offer is not None]
        committed = set()
        fires = []

        def commit(writer, w_idx, value, reader, r_idx, chan):
            committed.add(writer.tid)
            committed.add(reader.tid)
            fires.append((chan, writer, w_idx, reader, r_idx, value))

        while True:
            writers = {}
            readers = {}
            for t in offering:
                if t.tid in committed:
                    continue
                for i, ev in enumerate(t.offer):
                    table = writers if isinstance(ev, Write) else readers
                    prev = table.get(ev.chan.id)
                    if prev is None:
                        table[ev.chan.id] = (t, i, ev)
                    elif prev[0] is not t:
                        kind = "writes" if isinstance(ev, Write) else "reads"
                        raise WiringError(
                            f"channel {ev.chan.name}: simultaneous {kind} "
                            f"offered by {prev[0].name} and {t.name}")
            choices = {}
            for t in offering:
                if t.tid in committed:
                    continue
                for i, ev in enumerate(t.offer):
                    table = readers if isinstance(ev, Write) else writers
                    other = table.get(ev.chan.id)
                    if other is not None and other[0] is not t:
                        choices[t.tid] = (i, ev)
                        break
            progressed = False
            for t in offering:
                if t.tid in committed or t.tid not in choices:
                    continue
                i, ev = choices[t.tid]
                table = readers if isinstance(ev, Write) else writers
                entry = table.get(ev.chan.id)
                if entry is None or entry[0].tid in committed:
                    continue
                other = entry[0]
                other_choice = choices.get(other.tid)
                if other_choice is None or other_choice[1].chan is not ev.chan:
                    continue
                j = other_choice[0]
                if isinstance(ev, Write):
                    commit(t, i, ev.value, other, j, ev.chan)
                else:
                    commit(other, j, other_choice[1].value, t, i, ev.chan)
                progressed = True
            if progressed:
                continue
            # Standstill with pairable offers left: a preference cycle. Fire
            # the pairable event whose reader has the lowest process id.
            best = None
            for chan_id, (r, ri, _rev) in readers.items():
                if r.tid in committed:
                    continue
                w_entry = writers.get(chan_id)
                if w_entry is None or w_entry[0].tid in committed:
                    continue
                if w_entry[0] is r:
                    continue
                key = (r.tid, ri)
                if best is None or key < best[0]:
                    best = (key, r, ri, w_entry)
            if best is None:
                break
            _key, r, ri, (w, wi, wev) = best
            commit(w, wi, wev.value, r, ri, wev.chan)
        return fires

    def _commit(self, fires):
        self.cycle += 1
        for chan, writer, w_idx, reader, r_idx, value in sorted(
                fires, key=lambda f: f[0].id):
            self.communications += 1
            self.channel_comms[chan.id] += 1
            self.trace.append((self.cycle, chan.id, value))
            for mon in self._monitors_by_chan.get(chan.id, ()):
                try:
                    mon.on_event(chan)
                except ProtocolError as exc:
                    raise ProtocolError(f"cycle {self.cycle}: {exc}") from None
            writer.offer = None
            reader.offer = None
            self._resume_queue.append(
                (writer, (w_idx, None) if writer.is_alt else None))
            self._resume_queue.append(
                (reader, (r_idx, value) if reader.is_alt else value))

    def step(self):
        """Advance one cycle; returns the number of transfers that fired.

        A cycle with zero transfers is legal here; judging it a deadlock is
        run_to_completion's job.
        """
        self._start()
        fires = self._match()
        self._commit(fires)
        self._drain_resumes()
        return len(fires)

    @property
    def live_processes(self):
        return self._live

    def blocked_report(self):
        lines = []
        names = []
        for t in self._tasks:
            if t.done:
                continue
            if t.offer is not None:
                wants = []
                for ev in t.offer:
                    side = "write" if isinstance(ev, Write) else "read"
                    wants.append(f"{side} {ev.chan.name}")
                lines.append(f"  {t.name}: offering " + " | ".join(wants))
                names.append(t.name)
            elif t.waiting:
                lines.append(f"  {t.name}: joining {t.waiting} parallel branch(es)")
                names.append(t.name)
        return lines, names

    def run(self, max_cycles=DEFAULT_MAX_CYCLES):
        """Step until every process has terminated; returns TraceMetrics.

        Raises DeadlockError if a cycle passes with no transfer while
        processes remain, and CycleBudgetError once the cycle counter would
        pass max_cycles. Stream monitors are checked after termination.
        """
        self._start()
        while self._live:
            if self.cycle >= max_cycles:
                raise CycleBudgetError(
                    f"cycle budget exhausted: {self.cycle} cycles elapsed "
                    f"with {self._live} process(es) still live "
                    f"(budget {max_cycles})", cycle=self.cycle)
            fired = self.step()
            if fired == 0 and self._live:
                lines, names = self.blocked_report()
                msg = (f"deadlock at cycle {self.cycle}: no transfer possible; "
                       f"{len(names)} process(es) blocked\n" + "\n".join(lines))
                raise DeadlockError(msg, blocked=names, cycle=self.cycle)
        for mon in self.monitors:
            mon.final_check()
        return self.metrics()

    def metrics(self, items_out=0):
        m = TraceMetrics(self.cycle, self.communications, len(self.procs),
                         len(self.channels), items_out)
        assert m.communications <= max(1, m.cycles) * max(1, m.channel_count)
        return m
