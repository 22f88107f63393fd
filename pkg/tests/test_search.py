import pytest

from ndknight import corpus
from ndknight.errors import DomainError, InputError
from ndknight.lattice import Shape, symmetries, transform_index_map
from ndknight.magic import magic_report
from ndknight.search import (
    Heuristic,
    Mode,
    SearchConfig,
    Status,
    count_tours,
    exhaustive_closed_count,
    find_magic_tour,
    find_tour,
    replay_pruner,
)
from ndknight.tour import Closure, Tour, grid_from_tour, tour_from_grid, validate

from oracles import count_hamiltonian


def S(text):
    return Shape.parse(text)


@pytest.mark.parametrize(
    "shape, mode, status, closure",
    [
        ("3x4", "open", Status.FOUND, None),
        ("2x3", "open", Status.EXHAUSTED, None),
        ("3x3", "open", Status.EXHAUSTED, None),
        ("3x4x2", "closed", Status.FOUND, Closure.CLOSED),
        ("3x4x2x2", "closed", Status.FOUND, Closure.CLOSED),
        ("4x4", "closed", Status.EXHAUSTED, None),
        ("3x4x2x2x2", "closed", Status.FOUND, Closure.CLOSED),
        ("3x4x2x2", "open", Status.FOUND, None),
        ("8x8", "closed", Status.FOUND, Closure.CLOSED),
    ],
)
def test_find_tour_examples(shape, mode, status, closure):
    out = find_tour(S(shape), SearchConfig(mode=mode, exhaustive=True, time_limit=60))
    assert out.status is status
    if out.found:
        report = validate(out.tour)
        assert report.valid
        if closure is not None:
            assert report.closure is closure
    else:
        assert out.tour is None


def test_single_cell_board():
    assert find_tour(S("1x1")).found
    assert find_tour(S("1x1"), SearchConfig(mode="closed")).status is Status.EXHAUSTED


def test_outcome_kv():
    out = find_tour(S("2x3"), SearchConfig(exhaustive=True))
    assert out.as_kv().startswith("status=exhausted_no_solution nodes=")
    out = find_tour(S("3x4x2"), SearchConfig(mode="closed"))
    assert " closure=closed " in out.as_kv()


@pytest.mark.parametrize(
    "dims",
    [(2, 3), (3, 3), (3, 4), (4, 4), (3, 5), (2, 2, 3), (2, 3, 3), (1, 1), (1, 2), (1, 4), (2, 2, 2)],
)
def test_open_counts_match_oracle(dims):
    out = count_tours(Shape(dims), "open")
    assert out.count == count_hamiltonian(dims, closed=False)
    assert out.status is (Status.FOUND if out.count else Status.EXHAUSTED)


@pytest.mark.parametrize(
    "dims",
    [(3, 4), (4, 4), (3, 6), (4, 5), (3, 5), (5, 5), (2, 3, 3), (2, 2, 4), (2, 3, 4), (1, 3, 4)],
)
def test_closed_counts_match_oracle(dims):
    assert exhaustive_closed_count(Shape(dims)).count == count_hamiltonian(dims, closed=True)


@pytest.mark.slow
def test_closed_count_3x4x2_matches_oracle():
    assert exhaustive_closed_count(S("3x4x2")).count == count_hamiltonian((3, 4, 2), closed=True) == 24264


def test_closed_counts_known_values():
    # directed closed tours from a fixed cell: twice the undirected count
    assert exhaustive_closed_count(S("5x6")).count == 2 * 8
    assert exhaustive_closed_count(S("3x10")).count == 2 * 16
    assert exhaustive_closed_count(S("2x2x2")).count == 0
    assert exhaustive_closed_count(S("2x2x3x3")).count == 0


def test_count_budget_is_flagged():
    out = count_tours(S("3x4x2"), "closed", node_limit=500)
    assert out.status is Status.BUDGET


def test_counting_rejects_magic():
    with pytest.raises(InputError):
        count_tours(S("4x4x4"), "magic")


def test_parallel_count_equals_serial():
    serial = count_tours(S("5x6"), "closed")
    parallel = count_tours(S("5x6"), "closed", jobs=2)
    assert serial.count == parallel.count > 0
    assert count_tours(S("3x4"), "open", jobs=2).count == 16


def test_parallel_find():
    out = find_tour(S("3x4x2x2"), SearchConfig(mode="closed", jobs=2))
    assert out.found and validate(out.tour).closed


def test_determinism():
    cfg = SearchConfig(mode="closed")
    a = find_tour(S("3x4x2x2"), cfg)
    b = find_tour(S("3x4x2x2"), cfg)
    assert a.tour == b.tour and a.nodes_expanded == b.nodes_expanded


def test_seed_changes_order_but_stays_valid():
    tours = set()
    for seed in range(1, 6):
        out = find_tour(S("5x6"), SearchConfig(mode="closed", seed=seed))
        assert out.found and validate(out.tour).closed
        again = find_tour(S("5x6"), SearchConfig(mode="closed", seed=seed))
        assert again.tour == out.tour
        tours.add(out.tour.sequence)
    assert len(tours) > 1


def test_lexicographic_heuristic():
    out = find_tour(S("3x4"), SearchConfig(heuristic=Heuristic.LEXICOGRAPHIC))
    assert out.found and validate(out.tour).valid


def test_prefix_is_extended():
    s = S("3x4x2")
    base = find_tour(s, SearchConfig(mode="closed")).tour
    prefix = base.sequence[:5]
    out = find_tour(s, SearchConfig(mode="closed", prefix=prefix))
    assert out.found and out.tour.sequence[:5] == prefix


@pytest.mark.parametrize(
    "prefix, error",
    [((0, 0), InputError), ((0, 1), InputError), ((0, 99), InputError)],
)
def test_bad_prefix(prefix, error):
    with pytest.raises(error):
        find_tour(S("3x4"), SearchConfig(prefix=prefix))


def test_config_errors():
    with pytest.raises(DomainError):
        find_tour(S("3x4"), SearchConfig(mode="magic"))
    with pytest.raises(InputError):
        find_tour(S("6x6"), SearchConfig(mode="magic", quartile_pruning=True))
    with pytest.raises(InputError):
        find_tour(S("3x4"), SearchConfig(require_closed=True))
    with pytest.raises(InputError):
        find_tour(S("3x4"), SearchConfig(jobs=0))
    with pytest.raises(ValueError):
        SearchConfig(mode="sideways")


def test_magic_rejects_odd_order_and_cuboids():
    with pytest.raises(DomainError, match="odd"):
        find_magic_tour(S("3x3x3"))
    with pytest.raises(DomainError):
        find_magic_tour(S("3x4x4"))


def fig2_tour():
    return tour_from_grid(corpus.load("fig2").grid)


def test_magic_completion_from_fig2_prefix():
    prefix = fig2_tour().sequence[:16]
    out = find_magic_tour(S("4x4x4"), SearchConfig(prefix=prefix, time_limit=60))
    assert out.found
    assert out.tour.sequence[:16] == prefix
    assert magic_report(grid_from_tour(out.tour)).is_magic


def test_magic_full_prefix_needs_no_search():
    t = fig2_tour()
    out = find_magic_tour(S("4x4x4"), SearchConfig(prefix=t.sequence, time_limit=5))
    assert out.found and out.tour == t
    assert out.nodes_expanded <= 1


def test_magic_closed_requirement():
    t = fig2_tour()
    out = find_magic_tour(S("4x4x4"), SearchConfig(prefix=t.sequence[:24], require_closed=True, time_limit=60))
    assert out.found and validate(out.tour).closed


def test_magic_budget():
    out = find_magic_tour(S("4x4x4"), SearchConfig(node_limit=2000))
    assert out.status in (Status.BUDGET, Status.FOUND)
    if out.found:
        assert magic_report(grid_from_tour(out.tour)).is_magic


@pytest.mark.parametrize("entry_id", ["fig2", "fig3", "fig9", "fig10"])
def test_pruner_replay_on_magic_tours(entry_id):
    assert replay_pruner(corpus.load(entry_id).grid) == []


@pytest.mark.parametrize("entry_id", ["fig9", "fig10"])
def test_quartile_pruner_replay(entry_id):
    assert replay_pruner(corpus.load(entry_id).grid, quartile_pruning=True) == []


def test_quartile_pruner_fires_on_unbalanced_tour():
    # fig2 is magic but not quartile balanced, so the optional rule must object
    assert replay_pruner(corpus.load("fig2").grid, quartile_pruning=True)


def test_pruner_replay_on_closed_tours():
    for entry_id in ("fig6", "fig8"):
        assert replay_pruner(corpus.load(entry_id).grid, closed=True) == []
    assert replay_pruner(corpus.load("fig7").grid) == []
    fig1b = corpus.load("fig1b").grid
    assert replay_pruner(fig1b, closed=True, magic=False) == []
    # its columns are not magic, so the magic rules reject it
    assert replay_pruner(fig1b)


def test_pruner_replay_on_symmetric_images():
    t = fig2_tour()
    for perm, flips in list(symmetries(t.shape))[::5]:
        new_shape, mapping = transform_index_map(t.shape, perm, flips)
        image = Tour(new_shape, [mapping[i] for i in t.sequence])
        assert replay_pruner(image) == []
        assert replay_pruner(image.reversed()) == []
        assert replay_pruner(image, closed=True) == []


def test_progress_callback():
    seen = []
    out = count_tours(S("3x4x2"), "closed", node_limit=3_000_000, progress=seen.append)
    assert out.count == 24264 or out.status is Status.BUDGET
    if out.elapsed > 1.5:
        assert seen and seen[-1].nodes > 0 and sum(seen[-1].depth_histogram) == seen[-1].nodes
