"""Shared helpers: tiny network harnesses and functional references."""

import random

from procnet.runtime import Network
from procnet.constructs import new_port, produce, store
from procnet.words import DEFAULT_WIDTH, wrap


def roundtrip(shape, value, width=DEFAULT_WIDTH):
    """produce -> store over one port; returns (stored value, metrics, net)."""
    net = Network(width)
    port = new_port(net, shape, "p")
    produce(net, port, value)
    handle = store(net, port)
    metrics = net.run()
    return handle.value, metrics, net


def run_unary(build, shape_in, shape_out, value, width=DEFAULT_WIDTH):
    """Wire produce(value) -> combinator -> store and run it.

    `build(net, pin, pout)` registers the combinator under test.
    """
    net = Network(width)
    pin = new_port(net, shape_in, "in")
    pout = new_port(net, shape_out, "out")
    produce(net, pin, value)
    build(net, pin, pout)
    handle = store(net, pout)
    metrics = net.run()
    return handle.value, metrics, net


def run_binary(build, shape_in, shape_out, a, b, width=DEFAULT_WIDTH):
    net = Network(width)
    pa = new_port(net, shape_in, "a")
    pb = new_port(net, shape_in, "b")
    pout = new_port(net, shape_out, "out")
    produce(net, pa, a)
    produce(net, pb, b)
    build(net, pa, pb, pout)
    handle = store(net, pout)
    metrics = net.run()
    return handle.value, metrics, net


# functional references the combinator networks are checked against

def ref_map(fn, xs, width=DEFAULT_WIDTH):
    return [wrap(fn(wrap(x, width)), width) for x in xs]


def ref_zip(fn, xs, ys, width=DEFAULT_WIDTH):
    return [wrap(fn(wrap(x, width), wrap(y, width)), width)
            for x, y in zip(xs, ys)]


def ref_foldr(fn, seed, xs, width=DEFAULT_WIDTH):
    acc = seed
    for x in reversed([wrap(x, width) for x in xs]):
        acc = wrap(fn(x, acc), width)
    return acc


def ref_decomposed(fn3, seed, args, xs, width=DEFAULT_WIDTH):
    """map (h args) over xs, h folding fn3 right over args with seed."""
    out = []
    for x in xs:
        x = wrap(x, width)
        y = wrap(seed, width)
        for a in reversed(args):
            y = wrap(fn3(a, x, y), width)
        out.append(y)
    return out


# small deterministic function families for property sweeps

def unary_family(rng):
    c = rng.randint(-6, 6)
    return rng.choice([
        lambda v, c=c: v + c,
        lambda v, c=c: v * c,
        lambda v, c=c: c - v,
    ])


def binary_family(rng):
    c = rng.randint(-5, 5)
    return rng.choice([
        lambda a, b: a + b,
        lambda a, b: a - b,
        lambda a, b: a * b,
        lambda a, b, c=c: a * c + b,
    ])


def ternary_family(rng):
    c = rng.randint(-4, 4)
    return rng.choice([
        lambda a, x, y: y + a * x,
        lambda a, x, y: a + x * y,
        lambda a, x, y, c=c: a * x + c * y,
        lambda a, x, y: a - x + y,
    ])


def rand_values(rng, nmax=8, lo=-40, hi=40, nmin=0):
    return [rng.randint(lo, hi) for _ in range(rng.randint(nmin, nmax))]
