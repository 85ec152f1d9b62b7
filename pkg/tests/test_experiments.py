import csv
import json
import math
import statistics
from fractions import Fraction

import numpy as np
import pytest

from nwmix import (
    ExperimentConfig,
    QuietArc,
    UndirectedGraph,
    build_ring,
    connected_set_bound_check,
    constants_for,
    quiet_arc,
    quiet_arc_threshold,
    run_conductance,
    run_constants,
    run_quiet_arc,
    run_scaling,
    run_subtree_verification,
)
from nwmix.experiments import (
    SCALING_HEADER,
    VERSION,
    scaling_starts,
    expected_volume_windows,
)

import oracles


def test_config_defaults_and_overrides():
    cfg = ExperimentConfig()
    assert cfg.n_values == (512, 1024, 2048, 4096)
    assert cfg.c == 5 and cfg.reps == 20 and cfg.mode == "auto"
    over = cfg.overridden(n="16, 32", seed=7, cap=100, budget=5000, c="5/2")
    assert over.n_values == (16, 32)
    assert over.master_seed == 7
    assert over.step_cap == 100
    assert over.enum_budget == 5000
    assert over.c == Fraction(5, 2)
    assert cfg.n_values == (512, 1024, 2048, 4096)  # original untouched
    assert cfg.overridden(k=None).k == cfg.k
    with pytest.raises(ValueError, match="unknown config key"):
        cfg.overridden(walrus=1)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=())
    with pytest.raises(ValueError):
        ExperimentConfig(reps=0)
    with pytest.raises(ValueError):
        ExperimentConfig(c=Fraction(-1))


def test_config_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# scaling study\n"
        "n = 16,32\n"
        "c = 3/2   # rational is fine\n"
        "seed = 9\n"
        "\n"
        "mode = sampled\n"
    )
    cfg = ExperimentConfig.from_file(path)
    assert cfg.n_values == (16, 32)
    assert cfg.c == Fraction(3, 2)
    assert cfg.master_seed == 9 and cfg.mode == "sampled"
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    with pytest.raises(ValueError, match="key = value"):
        ExperimentConfig.from_file(bad)


def test_quiet_arc_pure_ring():
    arc = quiet_arc(build_ring(12, 1))
    assert (arc.start, arc.length) == (0, 12)
    assert arc.center == 6
    assert set(arc.vertices().tolist()) == set(range(12))


def test_quiet_arc_single_shortcut():
    base = build_ring(12, 1).edge_array()
    g = UndirectedGraph.from_edges(12, np.vstack([base, [[0, 6]]]), ring_k=1)
    arc = quiet_arc(g)
    # vertices 0 and 6 are loud; both remaining runs have length 5
    assert arc.length == 5
    assert set(arc.vertices().tolist()) in ({1, 2, 3, 4, 5}, {7, 8, 9, 10, 11})
    assert arc.center in arc.vertices()


def test_quiet_arc_wraps_around():
    base = build_ring(8, 1).edge_array()
    g = UndirectedGraph.from_edges(8, np.vstack([base, [[2, 5]]]), ring_k=1)
    arc = quiet_arc(g)
    assert (arc.start, arc.length) == (6, 4)
    assert set(arc.vertices().tolist()) == {6, 7, 0, 1}
    assert arc.center == 0


def test_quiet_arc_short_runs_vanish():
    base = build_ring(8, 1).edge_array()
    extra = [[0, 2], [1, 5], [4, 6], [5, 7]]  # leaves only vertex 3 quiet
    g = UndirectedGraph.from_edges(8, np.vstack([base, extra]), ring_k=1)
    arc = quiet_arc(g)
    assert arc.length == 0
    with pytest.raises(ValueError, match="ring"):
        quiet_arc(UndirectedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)]))


def test_quiet_arc_threshold():
    assert quiet_arc_threshold(100, 0) is None
    assert math.isclose(quiet_arc_threshold(100, 2), math.log(100) / 16)


def test_scaling_starts_include_arc_center():
    cfg = ExperimentConfig(n_values=(128,), c=Fraction(2), reps=1)
    g = build_ring(128, 1)
    starts = scaling_starts(cfg, g, 128, 0)
    assert starts == sorted(set(starts))
    arc = quiet_arc(g)
    assert arc.center in starts
    assert len(starts) <= 65


def test_run_scaling_writes_and_verifies(tmp_path):
    out = tmp_path / "scaling.csv"
    cfg = ExperimentConfig(n_values=(16, 32), c=Fraction(2), reps=3,
                           master_seed=1, out=str(out))
    records, summaries = run_scaling(cfg)
    assert len(records) == 6
    assert all(not r.censored for r in records)
    assert all(r.mode == "all" for r in records)  # auto picks all-starts here
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert list(rows[0].keys()) == SCALING_HEADER
    assert all(row["version"] == VERSION for row in rows)
    for (n, reps, cens, med), want_n in zip(summaries, (16, 32)):
        assert n == want_n and reps == 3 and cens == 0
        ratios = [float(r["ratio"]) for r in rows if int(r["n"]) == n]
        assert med == statistics.median(ratios)
    assert (tmp_path / "scaling.csv.summary.csv").exists()
    timing = (tmp_path / "scaling.csv.timing.csv").read_text().splitlines()
    assert timing[0] == "n,rep,seconds" and len(timing) == 7


def test_run_scaling_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        run_scaling(ExperimentConfig(n_values=(16, 32), c=Fraction(2), reps=2,
                                     master_seed=5, out=str(out)))
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.summary.csv").read_bytes() == \
        (tmp_path / "b.csv.summary.csv").read_bytes()


def test_run_scaling_censoring(tmp_path):
    out = tmp_path / "cens.csv"
    cfg = ExperimentConfig(n_values=(64,), c=Fraction(0), reps=1, step_cap=2,
                           out=str(out))
    records, summaries = run_scaling(cfg)
    assert records[0].censored and records[0].tau is None
    assert records[0].ratio is None
    assert summaries[0][2] == 1 and summaries[0][3] is None
    row = list(csv.DictReader(out.read_text().splitlines()))[0]
    assert row["censored"] == "true" and row["tau"] == "" and row["ratio"] == ""


def test_run_scaling_sampled_is_lower_bound():
    cfg_all = ExperimentConfig(n_values=(48,), c=Fraction(2), reps=2, mode="all")
    cfg_s = ExperimentConfig(n_values=(48,), c=Fraction(2), reps=2, mode="sampled")
    rec_all, _ = run_scaling(cfg_all)
    rec_s, _ = run_scaling(cfg_s)
    for a, s in zip(rec_all, rec_s):
        assert a.seed == s.seed  # same graphs
        assert s.tau <= a.tau
    with pytest.raises(ValueError, match="mode"):
        run_scaling(ExperimentConfig(n_values=(16,), mode="psychic"))


def test_run_quiet_arc_ring_censors(tmp_path):
    out = tmp_path / "qa.csv"
    cfg = ExperimentConfig(n_values=(32,), c=Fraction(0), reps=1,
                           escape_trials=3, step_cap=50, out=str(out))
    rows = run_quiet_arc(cfg)
    (row,) = rows
    # whole ring is quiet; no shortcut threshold; escape can never happen
    assert row[6] == 32 and row[7] is None and row[8] is None
    assert row[9] == 3 and row[10] is None and row[11] == 3
    rec = list(csv.DictReader(out.read_text().splitlines()))[0]
    assert rec["arc_len"] == "32" and rec["threshold"] == ""
    assert rec["escape_censored"] == "3"


def test_run_quiet_arc_with_shortcuts():
    cfg = ExperimentConfig(n_values=(64,), c=Fraction(2), reps=2,
                           escape_trials=8, step_cap=100_000)
    rows = run_quiet_arc(cfg)
    assert len(rows) == 2
    for row in rows:
        n, arc_len, thr = row[2], row[6], row[7]
        assert n == 64 and thr == quiet_arc_threshold(64, 2)
        assert isinstance(row[8], bool)
        if arc_len > 0:
            assert row[10] is not None and row[10] >= 1.0
            assert row[11] == 0  # escapes comfortably within the cap


def test_expected_volume_windows():
    wins = expected_volume_windows(20, Fraction(3), 1, 3)
    unit = 20 * (Fraction(3) / 2 + 1)
    assert wins == [
        (unit / 4, 2 * unit),
        (unit / 8, unit),
        (unit / 16, unit / 2),
    ]


def test_run_conductance_exact_cycle(tmp_path):
    out = tmp_path / "c16"
    cfg = ExperimentConfig(n_values=(16,), c=Fraction(0), master_seed=0,
                           out=str(out))
    results = run_conductance(cfg)
    (pair,) = results
    n, bound = pair
    assert n == 16 and bound.total == 85 and bound.certified
    payload = json.loads((tmp_path / "c16.fr.json").read_text())
    assert payload["sum"] == 85.0
    profile = (tmp_path / "c16.profile.csv").read_text().splitlines()
    assert profile[0].startswith("i,x,phi")
    assert len(profile) == 5


def test_run_conductance_expected_volume_caps_witnesses():
    cfg = ExperimentConfig(n_values=(16,), c=Fraction(2), master_seed=3)
    (pair,) = run_conductance(cfg, variant="expected-volume")
    _, bound = pair
    consts = constants_for(2, 1)
    cap = math.floor((1 - consts.beta) * 16)
    g_m = bound.profile.m
    wins = expected_volume_windows(16, Fraction(2), 1, len(bound.profile.entries))
    for entry, (lo, hi) in zip(bound.profile.entries, wins):
        assert (entry.vol_lo, entry.vol_hi) == (lo, hi)
        if entry.witness is not None:
            assert len(entry.witness) <= cap
    with pytest.raises(ValueError, match="variant"):
        run_conductance(cfg, variant="bogus")


def test_run_subtree_verification(tmp_path):
    out = tmp_path / "battery.txt"
    cfg = ExperimentConfig(c=Fraction(2), samples=400, master_seed=0,
                           out=str(out))
    report = run_subtree_verification(cfg, J=12)
    names = [name for name, _, _ in report]
    assert len(report) == 18
    assert sum(1 for name in names if name.startswith("series-identity")) == 6
    assert all(ok for name, ok, _ in report if not name.startswith("mc "))
    lines = out.read_text().splitlines()
    assert len(lines) == 18 and all(l.startswith(("PASS", "FAIL")) for l in lines)


def test_connected_set_bound_check():
    out = connected_set_bound_check(n=12, k=1, c=Fraction(1), reps=60, j_max=4)
    assert [row["j"] for row in out] == [1, 2, 3, 4]
    for row in out:
        assert row["below_mu"] and row["below_crude"]
        assert row["mean"] <= row["crude_bound"]
    assert out[0]["mean"] == 1.0  # the singleton {v} is the only 1-set


def test_run_constants(tmp_path):
    out = tmp_path / "constants.json"
    payload = json.loads(run_constants(Fraction(1), 1, out=str(out)))
    assert payload["regime"] == "small-c"
    assert json.loads(out.read_text()) == payload
