"""The five matrix-multiply networks, checked against the functional oracle."""

import random

import pytest

from procnet.designs import (DESIGN_IDS, K_INDEPENDENT, build_design,
                             expected_css, run_design)
from procnet.runtime import EOT, CycleBudgetError, WiringError
from procnet.words import wrap


def _rand_matrices(rng, n, m, k, lo=-40, hi=40):
    ass = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)]
    bss = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(k)]
    return ass, bss


def _fields(metrics):
    return (metrics.cycles, metrics.communications, metrics.process_count,
            metrics.channel_count, metrics.items_out)


# -- correctness ---------------------------------------------------------------

def test_every_design_matches_the_oracle_on_random_instances():
    rng = random.Random(7)
    for _ in range(20):
        n, m, k = (rng.randint(1, 5) for _ in range(3))
        ass, bss = _rand_matrices(rng, n, m, k)
        want = expected_css(ass, bss)
        for d in DESIGN_IDS:
            run = run_design(d, ass, bss)
            assert run.css_cols == want, (d, n, m, k)
            assert run.dims == (n, m, k)


def test_identity_left_matrix_passes_columns_through():
    rng = random.Random(11)
    n, k = 4, 3
    ass = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    bss = [[rng.randint(-99, 99) for _ in range(n)] for _ in range(k)]
    for d in DESIGN_IDS:
        assert run_design(d, ass, bss).css_cols == bss, d


def test_zero_right_matrix_gives_zero_columns():
    ass = [[3, -4], [5, 6], [7, 8]]
    bss = [[0, 0], [0, 0]]
    for d in DESIGN_IDS:
        assert run_design(d, ass, bss).css_cols == [[0, 0, 0], [0, 0, 0]], d


def test_frozen_two_by_two_instance():
    ass = [[1, 2], [3, 4]]
    bss = [[5, 7], [6, 8]]  # columns of [[5,6],[7,8]]
    for d in DESIGN_IDS:
        assert run_design(d, ass, bss).css_cols == [[19, 43], [22, 50]], d


def test_designs_wrap_like_the_oracle():
    ass = [[30000, 25000]]
    bss = [[29000, -31000]]
    want = expected_css(ass, bss)
    for d in DESIGN_IDS:
        assert run_design(d, ass, bss).css_cols == want, d


def test_repeated_runs_are_identical():
    ass = [[2, 3], [4, 5]]
    bss = [[6, 7], [8, 9], [1, 1]]
    for d in DESIGN_IDS:
        first = run_design(d, ass, bss)
        second = run_design(d, ass, bss)
        assert first.css_cols == second.css_cols
        assert _fields(first.metrics) == _fields(second.metrics)
        assert first.warnings == second.warnings


# -- d1's two wirings ------------------------------------------------------------

def _run_d1_variant(ass, bss, shared):
    build = build_design("d1", ass, bss, shared_broadcast=shared)
    build.net.run()
    css = build.collect()
    per_col = [sum(build.net.channel_comms[cid] for cid in chans)
               for chans in build.handles["column_channels"]]
    return css, per_col, build.net.metrics()


def test_d1_shared_and_private_feeds_agree():
    rng = random.Random(23)
    for _ in range(5):
        ass, bss = _rand_matrices(rng, 3, 3, 3)
        shared_css, shared_cols, shared_m = _run_d1_variant(ass, bss, True)
        private_css, private_cols, private_m = _run_d1_variant(ass, bss, False)
        assert shared_css == private_css == expected_css(ass, bss)
        # the traffic that lands in each result column is the same either way
        assert shared_cols == private_cols == [33, 33, 33]
        # sharing the feed replaces k producers with one producer + broadcast
        assert shared_m.process_count == 61
        assert private_m.process_count == 62


# -- size and speed shape -----------------------------------------------------------

def test_d2_uses_one_unit_where_d1_uses_a_bank():
    ass, bss = _rand_matrices(random.Random(3), 3, 3, 3)
    d1 = run_design("d1", ass, bss)
    d2 = run_design("d2", ass, bss)
    assert d2.metrics.process_count == 3
    assert d2.metrics.process_count < d1.metrics.process_count
    assert d2.metrics.cycles > d1.metrics.cycles  # sequencing costs time


def test_pipelined_designs_have_k_independent_footprints():
    rng = random.Random(31)
    for n, m in ((3, 3), (5, 4)):
        ass = [[rng.randint(-9, 9) for _ in range(m)] for _ in range(n)]
        small = [[rng.randint(-9, 9) for _ in range(m)] for _ in range(3)]
        large = small + [[rng.randint(-9, 9) for _ in range(m)]
                         for _ in range(3)]
        for d in K_INDEPENDENT:
            a = run_design(d, ass, small).metrics
            b = run_design(d, ass, large).metrics
            assert (a.process_count, a.channel_count) == \
                   (b.process_count, b.channel_count), (d, n, m)


def test_d3_outruns_d2_on_a_long_job():
    ass, bss = _rand_matrices(random.Random(5), 3, 3, 16)
    d2 = run_design("d2", ass, bss)
    d3 = run_design("d3", ass, bss)
    assert d3.metrics.throughput > d2.metrics.throughput
    assert d3.metrics.cycles < d2.metrics.cycles


# -- d4 specifics ---------------------------------------------------------------------

def test_d4_turnouts_terminate_once_each():
    ass, bss = _rand_matrices(random.Random(13), 3, 2, 4)
    build = build_design("d4", ass, bss)
    build.net.run()
    assert build.collect() == expected_css(ass, bss)
    eots = [ch for ch in build.net.channels
            if ch.name.startswith("css_rows[") and ch.kind == "eot"]
    assert len(eots) == 3
    assert all(build.net.channel_comms[ch.id] == 1 for ch in eots)


def test_d4_warns_past_the_bank_limit_but_still_verifies():
    ass, bss = _rand_matrices(random.Random(17), 5, 2, 2)
    run = run_design("d4", ass, bss)
    assert run.css_cols == expected_css(ass, bss)
    assert any("memory banks" in w for w in run.warnings)
    four, _ = _rand_matrices(random.Random(17), 4, 2, 2)
    assert run_design("d4", four, bss).warnings == []


# -- d5 specifics ----------------------------------------------------------------------

def test_d5_grid_footprint():
    ass, bss = _rand_matrices(random.Random(19), 3, 3, 2)
    run = run_design("d5", ass, bss)
    # 9 cells + column feed + 3 zero seeds + drain + result store
    assert run.metrics.process_count == 15


def test_d5_columns_pass_down_unchanged():
    rng = random.Random(29)
    n, m, k = 3, 3, 2
    ass, bss = _rand_matrices(rng, n, m, k)
    build = build_design("d5", ass, bss)
    build.net.run()
    assert build.collect() == expected_css(ass, bss)
    seen = {}
    for cyc, cid, val in build.net.trace:
        seen.setdefault(build.net.channels[cid].name, []).append(val)
    for t in range(m):
        want = [wrap(col[t]) for col in bss] + [EOT]
        for i in range(n + 1):
            assert seen[f"v{i}[{t}]"] == want, (i, t)


# -- failure attribution and wiring checks --------------------------------------------

def test_budget_blowups_name_the_design():
    ass, bss = _rand_matrices(random.Random(37), 2, 2, 2)
    with pytest.raises(CycleBudgetError) as exc_info:
        run_design("d2", ass, bss, max_cycles=1)
    exc = exc_info.value
    assert exc.design == "d2"
    assert exc.partial_metrics.cycles == 1
    assert exc.cycle == 1


def test_operand_validation():
    with pytest.raises(WiringError, match="at least one row"):
        build_design("d1", [], [[1]])
    with pytest.raises(WiringError, match="ragged"):
        build_design("d2", [[1, 2], [3]], [[1, 2]])
    with pytest.raises(WiringError, match="does not match"):
        build_design("d3", [[1, 2]], [[1, 2, 3]])
    with pytest.raises(WiringError, match="at least one column in the right"):
        build_design("d4", [[1]], [])


def test_unknown_design_is_rejected():
    with pytest.raises(ValueError, match="unknown design"):
        build_design("d9", [[1]], [[1]])
