import pytest

from cexforge.scc import build_hierarchy, build_view
from cexforge.subsystem import Subsystem, induce, is_critical, probability, stats
from conftest import prop_le, prop_lt


def concrete_view(model, targets):
    h = build_hierarchy(model, targets)
    return build_view(model, h, set(h.nodes))


def test_induce_redirects_missing_mass(d1):
    view = concrete_view(d1, {3})
    sub = Subsystem(view).add_walk((0, 1, 3)).add_walk((1, 0))
    induced, members = induce(view, sub, {3})
    assert members == [0, 1, 3]
    rows = {members[i] if i < len(members) else "sink": row for i, row in enumerate(induced.rows)}
    assert rows[0] == ((1, 0.5), (3, 0.5))  # index 3 is the sink here
    assert rows[1] == ((0, 0.5), (2, 0.5))
    assert rows[3] == ((2, 1.0),)  # target absorbing
    assert induced.rows[3] == ((3, 1.0),)  # sink absorbing


def test_induce_whole_view_keeps_sink_unreachable(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk(tuple(range(5)))
    induced, members = induce(view, sub, {4})
    # no member row feeds the sink
    sink = len(members)
    assert all(t != sink for i in range(len(members)) for t, _p in induced.rows[i])


def test_induce_requires_initial(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk((2, 4))
    with pytest.raises(ValueError, match="initial"):
        induce(view, sub, {4})


def test_probability_d1(d1):
    view = concrete_view(d1, {3})
    sub = Subsystem(view).add_walk((0, 1, 3))
    assert probability(view, sub, {3}) == pytest.approx(1 / 3, abs=1e-8)


def test_probability_d2_single_path(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk((0, 2, 4))
    assert probability(view, sub, {4}) == pytest.approx(0.4, abs=1e-12)


def test_probability_initial_only(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk((0,))
    assert probability(view, sub, {4}) == 0.0


def test_is_critical_boundaries(d1, d2):
    view1 = concrete_view(d1, {3})
    sub1 = Subsystem(view1).add_walk((0, 1, 3))
    assert is_critical(view1, sub1, prop_le(0.25, "goal"), {3})

    view2 = concrete_view(d2, {4})
    sub2 = Subsystem(view2).add_walk((0, 2, 4))
    assert not is_critical(view2, sub2, prop_le(0.4, "b"), {4})
    assert is_critical(view2, sub2, prop_lt(0.4, "b"), {4})


def test_add_walk_idempotent(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk((0, 2, 4))
    assert sub.vertices == {0, 2, 4}
    assert sub.edges == {(0, 2), (2, 4)}
    sub.add_walk((0, 2, 4))
    assert sub.vertices == {0, 2, 4}
    assert len(sub.edges) == 2
    sub.add_walk((0, 1, 4))
    assert sub.vertices == {0, 1, 2, 4}
    assert len(sub.edges) == 4


def test_add_walk_invalidates_cache(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk((0, 2, 4))
    probability(view, sub, {4})
    assert sub.cached_prob is not None
    sub.add_walk((0, 1, 4))
    assert sub.cached_prob is None


def test_add_walk_rejects_foreign_vertices(d2):
    view = concrete_view(d2, {4})
    with pytest.raises(ValueError):
        Subsystem(view).add_walk((0, 99))


def test_monotone_under_growth(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk((0, 2, 4))
    before = probability(view, sub, {4})
    sub.add_walk((0, 1, 4))
    assert probability(view, sub, {4}) >= before - 1e-12


def test_whole_view_probability_matches_model(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk(tuple(range(5)))
    assert probability(view, sub, {4}) == pytest.approx(0.7, abs=1e-8)


def test_stats_abstract_coverage(d1):
    h = build_hierarchy(d1, {3})
    view = build_view(d1, h, set())
    root = h.roots[0]
    sub = Subsystem(view).add_walk(((root, 0), 3))
    probability(view, sub, {3})
    report = stats(sub, view)
    assert report.covered_concrete_states == 3  # {0, 1} via the abstract vertex, plus 3
    assert report.view_vertices == 2
    assert report.probability == pytest.approx(1 / 3, abs=1e-8)


def test_stats_empty(d1):
    view = concrete_view(d1, {3})
    report = stats(Subsystem(view), view)
    assert report == stats(Subsystem(view), view)
    assert report.covered_concrete_states == 0
    assert report.view_edges == 0
    assert report.probability == 0.0


def test_stats_full_view_d2(d2):
    view = concrete_view(d2, {4})
    sub = Subsystem(view).add_walk(tuple(range(5)))
    report = stats(sub, view)
    assert report.covered_concrete_states == 5
    assert report.view_edges == 7


def test_edges_only_mode_is_stricter(d1):
    view = concrete_view(d1, {3})
    sub = Subsystem(view).add_walk((0, 1, 3))
    closed = probability(view, sub, {3})
    strict = probability(view, sub, {3}, edges_only=True)
    assert strict == pytest.approx(0.25, abs=1e-12)  # loop edge 1->0 not justified
    assert closed == pytest.approx(1 / 3, abs=1e-8)
