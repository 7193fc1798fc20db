import numpy as np
import pytest

from conftest import plateau_field
from topofold import synthetic
from topofold.critical import classify_all
from topofold.field import FieldState, less
from topofold.grid import build_hierarchy, level_parents, level_tables
from topofold.traversal import REGULAR, FoldingPolicy, polarity_bits, sweep, ti_statistics


def run(values, pct=0.0, eps_abs=None, threads=1):
    s = FieldState.from_values(values)
    h = build_hierarchy(s.dims)
    if eps_abs is None:
        policy = FoldingPolicy.from_percent(pct, s.value_range)
    else:
        policy = FoldingPolicy.from_absolute(eps_abs, s.value_range)
    folded, pol = sweep(h, s, policy, threads=threads)
    return h, s, folded, pol


def brute_force_non_monotonic(h, s, level):
    """New vertices of ``level`` not strictly inside their parent edge."""
    out = []
    for n, a, b in zip(*level_parents(h, level)):
        ka, kn, kb = s.key(a), s.key(n), s.key(b)
        if not (min(ka, kb) < kn < max(ka, kb)):
            out.append(int(n))
    return out


FIELDS = [
    ("uniform-noise", (17, 17)),
    ("bump-noise", (17, 17)),
    ("uniform-noise", (9, 9, 9)),
    ("bump-noise", (9, 9, 9)),
]


def test_policy_validation():
    with pytest.raises(ValueError):
        FoldingPolicy.from_percent(-1, (0, 1))
    with pytest.raises(ValueError):
        FoldingPolicy.from_percent(101, (0, 1))
    with pytest.raises(ValueError):
        FoldingPolicy.from_absolute(-0.5, (0, 1))
    assert FoldingPolicy.from_percent(5, (2.0, 12.0)).epsilon_abs == pytest.approx(0.5)


@pytest.mark.parametrize("name,shape", FIELDS)
def test_zero_epsilon_folds_nothing(name, shape):
    _, s, folded, pol = run(synthetic.generate(name, shape, 3))
    assert not folded.folded.any()
    assert np.array_equal(folded.f_hat, s.f)
    assert sum(st.folded for st in pol.levels) == 0


def test_ramp_has_no_non_monotonic_vertices():
    vals = np.fromfunction(lambda x, y: x + 2 * y, (5, 5))
    h, s, folded, pol = run(vals, pct=5)
    for level in range(1, h.depth + 1):
        assert brute_force_non_monotonic(h, s, level) == []
    for st in pol.levels:
        assert st.non_monotonic == 0 and st.ti_new == st.n_new
    ti = ti_statistics(h, pol)
    assert ti.new_ti_percent == 100.0
    assert not folded.folded.any()


@pytest.mark.parametrize("pct", [0, 2, 10])
def test_non_monotonic_counts_match_brute_force(pct):
    vals = synthetic.generate("bump-noise", (17, 17), 8)
    h, _, folded, pol = run(vals, pct=pct)
    for st in pol.levels:
        assert st.non_monotonic == len(brute_force_non_monotonic(h, folded, st.level))


def test_single_level_hierarchy_has_zero_statistics():
    h, _, _, pol = run(np.random.default_rng(0).random((6, 5)), pct=5)
    assert h.depth == 0
    ti = ti_statistics(h, pol)
    assert ti.total_vertices == 0 and ti.ti_vertices == 0
    assert ti.ti_percent == 0.0 and ti.per_level == ()


def test_fold_threshold_is_strict():
    vals = np.zeros((3, 3))
    vals[0, 0], vals[0, 1], vals[0, 2] = 0.0, 10.0, 4.0
    delta = 8.0
    _, _, folded, _ = run(vals, eps_abs=delta)
    assert not folded.folded[1]
    _, _, folded, _ = run(vals, eps_abs=delta + 1e-9)
    assert folded.folded[1] and folded.f_hat[1] == 2.0


@pytest.mark.parametrize("name,shape", FIELDS)
def test_full_epsilon_folds_every_non_monotonic_vertex(name, shape):
    h, _, folded, pol = run(synthetic.generate(name, shape, 1), pct=100)
    for st in pol.levels:
        assert st.non_monotonic == 0
        assert st.ti_new == st.n_new and st.ti_old == st.n_old
    coarse = level_tables(h, 0)[0]
    assert pol.n_needs_criticality == coarse.size
    assert set(np.flatnonzero(pol.needs_criticality)) == set(coarse.tolist())


@pytest.mark.parametrize("name,shape", FIELDS)
@pytest.mark.parametrize("pct", [0, 1, 5, 20, 100])
def test_incremental_polarity_matches_recomputation(name, shape, pct):
    h, _, folded, pol = run(synthetic.generate(name, shape, 5), pct=pct)
    ids, _, nbr = level_tables(h, h.depth)
    assert np.array_equal(pol.polarity[ids], polarity_bits(folded, ids, nbr))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("pct", [0, 5, 100])
def test_regular_flag_is_sound(seed, pct):
    shape = (17, 17) if seed % 2 else (9, 9, 9)
    vals = synthetic.uniform_noise(shape, seed) if seed < 3 else plateau_field(shape, seed)
    h, _, folded, pol = run(vals, pct=pct)
    critical = set(classify_all(h, folded).ids.tolist())
    regular = set(np.flatnonzero(pol.state == REGULAR).tolist())
    assert not regular & critical


def test_integer_folds_stay_between_parents():
    vals = plateau_field((17, 17), 4, levels=3)
    h, _, folded, _ = run(vals, pct=100)
    for level in range(1, h.depth + 1):
        new_ids, o0, o1 = level_parents(h, level)
        sel = folded.folded[new_ids]
        n, a, b = new_ids[sel], o0[sel], o1[sel]
        inside = (less(folded, a, n) & less(folded, n, b)) | (less(folded, b, n) & less(folded, n, a))
        assert inside.all()


@pytest.mark.parametrize("threads", [2, 4, 8])
def test_sweep_is_thread_independent(threads):
    vals = synthetic.generate("bump-noise", (33, 33), 2)
    _, _, ref, pref = run(vals, pct=5)
    _, _, got, pgot = run(vals, pct=5, threads=threads)
    assert np.array_equal(ref.f_hat, got.f_hat)
    assert np.array_equal(ref.monotony, got.monotony)
    assert np.array_equal(pref.polarity, pgot.polarity)
    assert np.array_equal(pref.state, pgot.state)


def test_ti_percent_counts_every_level():
    vals = synthetic.generate("bump-noise", (17, 17), 0)
    h, _, _, pol = run(vals, pct=5)
    ti = ti_statistics(h, pol)
    sizes = [int(np.prod(d.dims)) for d in h.level_dims]
    assert ti.total_vertices == sum(sizes)
    assert ti.ti_percent == pytest.approx(100.0 * ti.ti_vertices / sum(sizes))
