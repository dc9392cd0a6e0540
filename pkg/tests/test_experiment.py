import math

import numpy as np
import pytest

from termforge.evaluation import GoldStandard
from termforge.experiment import (
    Selection,
    SweepConfig,
    SweepResult,
    SweepRow,
    combined_curve,
    derive_seed,
    run_sweep,
    select_k,
    thread_count,
)
from termforge.matrices import NP_VPC
from util import make_rep

# ------------------------------------------------------------------- seeds


def test_derive_seed_is_stable_and_frozen():
    # sha256 of "0:NP_VPC:2:0", first 8 bytes little-endian; platform-free
    assert derive_seed(0, "NP_VPC", 2, 0) == 7434500639385176304
    assert derive_seed(0, "NP_VPC", 2, 0) == derive_seed(0, "NP_VPC", 2, 0)


def test_derive_seed_separates_contexts():
    seeds = {derive_seed(0, "NP_VPC", k, r) for k in range(5) for r in range(5)}
    assert len(seeds) == 25
    assert derive_seed(0, "a", "b") != derive_seed(0, "b", "a")
    assert derive_seed(0, "x") != derive_seed(1, "x")


def test_thread_count_env(monkeypatch):
    monkeypatch.delenv("TERMFORGE_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("TERMFORGE_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("TERMFORGE_THREADS", "0")
    assert thread_count() == 1
    monkeypatch.setenv("TERMFORGE_THREADS", "lots")
    with pytest.raises(ValueError, match="must be an integer"):
        thread_count()


# ------------------------------------------------------------------ config


def test_sweep_config_validation():
    with pytest.raises(ValueError, match="2 <= k_min <= k_max"):
        SweepConfig(k_min=1)
    with pytest.raises(ValueError, match="2 <= k_min <= k_max"):
        SweepConfig(k_min=5, k_max=4)
    with pytest.raises(ValueError, match="repetitions"):
        SweepConfig(repetitions=0)
    with pytest.raises(ValueError, match="peak_floor"):
        SweepConfig(peak_floor=0.0)
    with pytest.raises(ValueError, match="unknown representations"):
        SweepConfig(representations=("NP_VPC", "bogus"))


# ------------------------------------------------------------------ sweeps


def sweep_rep(n=8, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    return make_rep(rng.random((n, dim)) + 0.05,
                    keys=tuple(f"t{i}" for i in range(n)))


def sweep_gold(n=8):
    return GoldStandard(mapping={f"t{i}": f"L{i % 3}" for i in range(n)},
                        labels=frozenset({"L0", "L1", "L2"}))


def small_config(**kw):
    defaults = dict(k_min=2, k_max=4, repetitions=3, master_seed=0)
    defaults.update(kw)
    return SweepConfig(**defaults)


def test_run_sweep_shape_and_grid():
    result = run_sweep(sweep_rep(), sweep_gold(), small_config())
    assert result.representation == NP_VPC
    assert [row.k for row in result.rows] == [2, 3, 4]
    assert len(result.cells) == 9
    assert [(c.k, c.repetition) for c in result.cells] == [
        (k, r) for k in (2, 3, 4) for r in range(3)]
    assert result.warnings == ()
    for cell in result.cells:
        assert cell.seed == derive_seed(0, NP_VPC, cell.k, cell.repetition)
        assert cell.n_clusters == cell.k


def test_run_sweep_deterministic():
    a = run_sweep(sweep_rep(), sweep_gold(), small_config())
    b = run_sweep(sweep_rep(), sweep_gold(), small_config())
    assert a == b


def test_run_sweep_thread_pool_matches_serial(monkeypatch):
    monkeypatch.delenv("TERMFORGE_THREADS", raising=False)
    serial = run_sweep(sweep_rep(), sweep_gold(), small_config())
    monkeypatch.setenv("TERMFORGE_THREADS", "3")
    pooled = run_sweep(sweep_rep(), sweep_gold(), small_config())
    assert pooled == serial


def test_run_sweep_means_recompute_from_cells():
    result = run_sweep(sweep_rep(), sweep_gold(), small_config())
    for row in result.rows:
        batch = [c for c in result.cells if c.k == row.k]
        assert row.repetitions == len(batch)
        purities = [c.purity for c in batch]
        assert row.purity == pytest.approx(sum(purities) / len(purities))
        finite_dunns = [c.dunn2 for c in batch if math.isfinite(c.dunn2)]
        assert row.dunn2_defined == len(finite_dunns)
        if finite_dunns:
            assert row.dunn2 == pytest.approx(sum(finite_dunns) / len(finite_dunns))
        else:
            assert row.dunn2 is None


def test_run_sweep_clips_k_max_with_warning():
    result = run_sweep(sweep_rep(n=5), sweep_gold(5),
                       small_config(k_max=50, repetitions=1))
    assert [row.k for row in result.rows] == [2, 3, 4, 5]
    assert result.warnings == (
        "NP_VPC: k_max 50 clipped to 5 (only 5 distinct rows)",)


def test_run_sweep_without_gold_leaves_external_columns_none():
    result = run_sweep(sweep_rep(), None, small_config(repetitions=1))
    for cell in result.cells:
        assert cell.purity is None and cell.ari is None
        assert cell.silhouette is not None


def test_run_sweep_too_few_distinct_rows():
    rep = make_rep([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])  # 2 distinct
    with pytest.raises(ValueError, match="cannot sweep k >= 3 with only 2"):
        run_sweep(rep, None, small_config(k_min=3, k_max=4))


def test_run_sweep_disjoint_gold_fails_early():
    gold = GoldStandard(mapping={"zzz": "L"}, labels=frozenset({"L"}))
    with pytest.raises(ValueError, match="no clustered term appears"):
        run_sweep(sweep_rep(), gold, small_config())


# ---------------------------------------------------------------- select_k


def curve_result(purities, k_min=2):
    """SweepResult whose combined curve is the min-max image of `purities`
    (all other index columns undefined)."""
    rows = tuple(
        SweepRow(k=k_min + t, repetitions=1, purity=p, ari=None, dunn2=None,
                 silhouette=None, dunn2_defined=0, silhouette_defined=1)
        for t, p in enumerate(purities))
    return SweepResult(representation=NP_VPC, rows=rows, cells=(), warnings=())


def test_select_k_first_peak_interior_maximum():
    result = curve_result([0.2, 0.9, 0.5, 0.8])
    assert select_k(result, Selection.FIRST_PEAK) == 3
    assert select_k(result, Selection.GLOBAL) == 3


def test_select_k_monotone_curve_falls_back_to_global():
    result = curve_result([0.1, 0.2, 0.3, 0.4])
    assert select_k(result, Selection.FIRST_PEAK) == 5   # k_max
    assert select_k(result, Selection.GLOBAL) == 5


def test_select_k_first_peak_respects_the_floor():
    # the early bump at k=3 sits below 0.9 x global max, so it is skipped
    result = curve_result([0.2, 0.5, 0.3, 1.0, 0.9])
    assert select_k(result, Selection.FIRST_PEAK, peak_floor=0.9) == 5
    # a permissive floor accepts the early bump
    assert select_k(result, Selection.FIRST_PEAK, peak_floor=0.3) == 3


def test_select_k_plateau_counts_at_its_first_k():
    result = curve_result([0.1, 0.8, 0.8, 0.1])
    assert select_k(result, Selection.FIRST_PEAK) == 3


def test_select_k_leading_plateau_is_not_a_peak():
    result = curve_result([0.8, 0.8, 0.1])
    assert select_k(result, Selection.FIRST_PEAK) == 2   # global fallback


def test_select_k_global_tie_takes_smallest_k():
    result = curve_result([0.3, 0.9, 0.1, 0.9])
    assert select_k(result, Selection.GLOBAL) == 3


def test_select_k_constant_curve_is_flat_half():
    result = curve_result([0.4, 0.4, 0.4])
    assert combined_curve(result) == [0.5, 0.5, 0.5]
    assert select_k(result, Selection.FIRST_PEAK) == 2


def test_select_k_needs_two_rows():
    with pytest.raises(ValueError, match="at least 2 sweep rows"):
        select_k(curve_result([0.5]))


def test_combined_curve_sums_normalized_indices():
    rows = (
        SweepRow(k=2, repetitions=1, purity=0.0, ari=None, dunn2=None,
                 silhouette=1.0, dunn2_defined=0, silhouette_defined=1),
        SweepRow(k=3, repetitions=1, purity=1.0, ari=None, dunn2=None,
                 silhouette=3.0, dunn2_defined=0, silhouette_defined=1),
        SweepRow(k=4, repetitions=1, purity=0.5, ari=None, dunn2=None,
                 silhouette=2.0, dunn2_defined=0, silhouette_defined=1),
    )
    result = SweepResult(representation=NP_VPC, rows=rows, cells=(), warnings=())
    assert combined_curve(result) == [0.0 + 0.0, 1.0 + 1.0, 0.5 + 0.5]


def test_combined_curve_imputes_missing_points_at_half():
    rows = (
        SweepRow(k=2, repetitions=1, purity=0.0, ari=None, dunn2=None,
                 silhouette=None, dunn2_defined=0, silhouette_defined=0),
        SweepRow(k=3, repetitions=1, purity=1.0, ari=None, dunn2=None,
                 silhouette=None, dunn2_defined=0, silhouette_defined=0),
        SweepRow(k=4, repetitions=1, purity=None, ari=None, dunn2=None,
                 silhouette=None, dunn2_defined=0, silhouette_defined=0),
    )
    result = SweepResult(representation=NP_VPC, rows=rows, cells=(), warnings=())
    assert combined_curve(result) == [0.0, 1.0, 0.5]


def test_combined_curve_with_nothing_defined():
    rows = (
        SweepRow(k=2, repetitions=1, purity=None, ari=None, dunn2=None,
                 silhouette=None, dunn2_defined=0, silhouette_defined=0),
        SweepRow(k=3, repetitions=1, purity=None, ari=None, dunn2=None,
                 silhouette=None, dunn2_defined=0, silhouette_defined=0),
    )
    result = SweepResult(representation=NP_VPC, rows=rows, cells=(), warnings=())
    with pytest.raises(ValueError, match="every index value is undefined"):
        combined_curve(result)
