"""Fixed-width two's-complement word arithmetic.

Values travel through the simulator as plain Python ints; these helpers
fold them back into the signed range of a given bit width. Wrapping on
overflow is silent, like hardware registers.
"""

MIN_WIDTH = 4
MAX_WIDTH = 64
DEFAULT_WIDTH = 16


def check_width(width):
    if not isinstance(width, int) or not MIN_WIDTH <= width <= MAX_WIDTH:
        raise ValueError(f"word width must be an int in [{MIN_WIDTH}, {MAX_WIDTH}], got {width!r}")
    return width


def wrap(value, width=DEFAULT_WIDTH):
    """Reduce an int to the signed two's-complement range of `width` bits."""
    half = 1 << (width - 1)
    return ((value + half) % (1 << width)) - half


def wrap_add(a, b, width=DEFAULT_WIDTH):
    return wrap(a + b, width)


def wrap_mul(a, b, width=DEFAULT_WIDTH):
    return wrap(a * b, width)


def word_range(width=DEFAULT_WIDTH):
    """Inclusive (lo, hi) range representable at this width."""
    half = 1 << (width - 1)
    return -half, half - 1
