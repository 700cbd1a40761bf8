from collections import Counter

import pytest

from simplex_fssp.engine import SystemConfiguration, is_halted, run
from simplex_fssp.fssp import (
    ALPHABET, FIRED, QUIESCENT, build_fssp_program, check_synchronization, initial_configuration,
)
from simplex_fssp.multiset import Multiset
from simplex_fssp.symbols import sym
from simplex_fssp.topology import (
    Digraph, TopologyError, depths, family, golden, metrics, random_strongly_connected, ring,
)

from oracles import observe

PROG = build_fssp_program()

TOPOLOGIES = {
    "ring-7": ring(7),
    "rings2-8": family("rings2", 8),
    "rings3-10": family("rings3", 10),
    "increasing-9": family("increasing", 9),
    "example-10": golden("example-10"),
    # chain with back arcs: two reports with different payloads meet in one step
    "chain-5": Digraph.build([(1, 2), (2, 3), (3, 4), (4, 5), (3, 1), (4, 1), (4, 2), (4, 3), (5, 4)], 1),
    # a first-wave message reaches a cell after its convergecast is done
    "random-10": random_strongly_connected(10, 0.02, seed=0),
    "random-25": random_strongly_connected(25, 0.1, seed=3),
}


@pytest.fixture(scope="module", params=sorted(TOPOLOGIES))
def observed(request):
    d = TOPOLOGIES[request.param]
    return d, observe(d)


def test_fires(observed):
    d, (trace, *_rest) = observed
    rep = check_synchronization(trace)
    assert rep.fired, rep.reason
    assert set(rep.per_cell_firing_step.values()) == {rep.firing_step}
    assert all(s == FIRED for s in trace.final.states().values())


def test_depths_are_bfs_distances(observed):
    d, (_, seen_depth, *_rest) = observed
    assert seen_depth == depths(d)


def test_parent_pointers_are_bfs_dag_arcs(observed):
    d, (_, _, parents, *_rest) = observed
    dist = depths(d)
    for i, ps in parents.items():
        for j in ps:
            assert (j, i) in d.arcs
            assert dist[j] == dist[i] - 1
    # every non-general cell found at least one dag parent
    assert set(parents) == set(d.nodes) - {d.general}


def test_general_launches_countdown_with_its_eccentricity(observed):
    d, (_, _, _, _, launched) = observed
    assert launched == [(d.general, metrics(d).eccentricity)]


def test_each_arc_is_reported_exactly_once(observed):
    d, (_, _, _, accepted, _) = observed
    assert accepted == Counter({(p, c): 1 for p, c in d.arcs})


@pytest.mark.parametrize("name", ["ring-7", "example-10", "chain-5", "random-25"])
def test_firing_step_does_not_depend_on_seed(name):
    d = TOPOLOGIES[name]
    steps = {check_synchronization(observe(d, seed)[0]).firing_step for seed in (0, 1, 2, 3, 4)}
    assert len(steps) == 1 and None not in steps


def test_quiescence_without_start_order():
    d = golden("example-10")
    cfg = initial_configuration(d)
    cells = {cid: (c.state, [s for s in c.contents if s != sym("a")]) for cid, c in cfg.cells.items()}
    assert is_halted(SystemConfiguration.initial(cells), PROG)


def test_no_s0_rule_fires_on_id_and_arc_counters():
    for k in range(0, 5):
        contents = Multiset([sym("iota", 3)] + [sym("c")] * k)
        cfg = SystemConfiguration.initial({3: (QUIESCENT, contents)})
        assert is_halted(cfg, PROG)


def test_initial_configuration():
    d = golden("example-10")
    cfg = initial_configuration(d)
    assert cfg.cells[1].contents == Multiset([sym("iota", 1), sym("a")] + [sym("c")] * 3)
    assert cfg.cells[4].contents == Multiset([sym("iota", 4)] + [sym("c")] * 3)
    assert set(cfg.states().values()) == {QUIESCENT}
    other = initial_configuration(d, general=5)
    assert sym("a") in other.cells[5].contents and sym("a") not in other.cells[1].contents
    with pytest.raises(TopologyError):
        initial_configuration(d, general=99)


def test_program_shape():
    names = [r.name for r in PROG]
    assert len(names) == len(set(names))
    assert PROG.rule("1.1").state == "S1" and PROG.rule("1.2").state == "S1"
    assert str(PROG.rule("M.1").mode) == "max.max"
    assert PROG.rule("M.2").consumed == () and PROG.rule("M.2").target == "S3"
    for r in PROG:
        for p in r.consumed + r.produced + r.broadcast + r.promoters:
            assert p.functor in ALPHABET and p.arity in ALPHABET[p.functor], (r.name, str(p))


def test_example_run_events():
    d = golden("example-10")
    emitted = {}

    def on_step(config, logs):
        for cid, entries in logs.items():
            for e in entries:
                for s in e.ground.broadcast:
                    emitted.setdefault((cid, str(s)), config.step_index)

    trace = run(initial_configuration(d), PROG, d, 1000, on_step=on_step)
    rep = check_synchronization(trace)
    assert rep.fired
    # the general opens with x(1,1) and later counts down from f(3)
    assert emitted[(1, "x(1,1)")] == 1
    assert (1, "f(3)") in emitted
    assert emitted[(1, "f(3)")] < rep.firing_step
    # cell 10 reports its depth 4 to its parent 9
    assert (10, "a(9,10,4)") in emitted


def test_check_synchronization_verdicts():
    ok = [{1: "S0", 2: "S0"}, {1: "S1", 2: "S1"}, {1: "Sf", 2: "Sf"}]
    rep = check_synchronization(ok, halted=True)
    assert rep.fired and rep.firing_step == 2 and rep.summary() == "fired=true step=2"

    never = [{1: "S0", 2: "S0"}, {1: "Sf", 2: "S1"}]
    rep = check_synchronization(never, halted=True)
    assert not rep.fired and rep.reason == "not all cells fired"

    split = [{1: "S0", 2: "S0"}, {1: "Sf", 2: "S1"}, {1: "Sf", 2: "Sf"}]
    rep = check_synchronization(split, halted=True)
    assert not rep.simultaneous and not rep.fired
    assert rep.per_cell_firing_step == {1: 1, 2: 2}

    left = [{1: "Sf", 2: "Sf"}, {1: "S1", 2: "Sf"}, {1: "Sf", 2: "Sf"}]
    assert check_synchronization(left, halted=True).reason == "a cell left the firing state"

    assert check_synchronization(ok, halted=False).reason == "incomplete"
    with pytest.raises(ValueError):
        check_synchronization([])
