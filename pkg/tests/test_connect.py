import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kisin.battery import Instance, cochar_for
from kisin.checks import fiber_instance, random_point
from kisin.connect import (
    RULES,
    TAGS,
    BallDescription,
    Context,
    Empty,
    build_graph,
    chi_family,
    chi_targets,
    components,
    construct_MQ,
    fiber_reduce,
    mainstep_family,
    refine,
    replay_edge,
    two_ball_reduce,
    witness_index,
)
from kisin.errors import DetMismatch, NoWitness, PreconditionViolated
from kisin.gf import field
from kisin.lattice import Lattice, Mat2, VertexClass, hnf, neighbors, vertex_dist
from kisin.oracles import chain_scan
from kisin.phimod import PhiModule, fixed_point, standard_module
from kisin.tree import BuildingPoint, ball, dist, midpoint, on_geodesic
from kisin.variety import Cochar, KisinPoint, enumerate_points, is_member, radius_bound, window_classes


def cls(F, e1, e2):
    return hnf(Mat2.diag(F, e1, e2)).vertex()


def brute_two_ball(x1, r1, x2, r2, det):
    return sorted(v for v in ball(x1, r1, parity=det) if dist(v, x2) <= r2)


# -- two balls ------------------------------------------------------------------------

@pytest.mark.parametrize("pm", [(2, 1), (3, 1)])
def test_concentric_balls(pm):
    F = field(*pm)
    base = VertexClass.base(F)
    desc = two_ball_reduce(base, 2, base, 2, 0)
    assert desc.center == BuildingPoint(base) and desc.radius == 2
    assert len(desc.points()) == F.q**2 + F.q + 1


def test_far_balls_are_empty(F2):
    base = VertexClass.base(F2)
    assert two_ball_reduce(base, 2, cls(F2, 6, 0), 2, 0) is Empty
    assert not Empty and Empty.points() == [] and Empty.to_json() is None


def test_parity_refinement_branch(F2):
    base, far = VertexClass.base(F2), cls(F2, 2, 0)
    desc = two_ball_reduce(base, 1, far, 1, 0)
    # the metric intersection is the single vertex at distance 1, of odd parity
    assert desc is Empty
    desc = two_ball_reduce(base, 1, far, 1, 1)
    assert desc.classes() == brute_two_ball(base, 1, far, 1, 1) == [cls(F2, 1, 0)]


def test_refine_interior_centre(F2):
    base, w = VertexClass.base(F2), cls(F2, 1, 0)
    c = BuildingPoint.on_edge(base, w, Fraction(1, 3))
    for r in [Fraction(k, 6) for k in range(0, 20)]:
        for det in (0, 1):
            got = refine(c, r, det)
            assert got.classes() == ball(c, r, parity=det)


def test_ball_description_contains(F2):
    desc = BallDescription(BuildingPoint(VertexClass.base(F2)), Fraction(2), 0)
    for L in desc.points():
        assert desc.contains(L)
    assert not desc.contains(cls(F2, 3, 0).lattice(3))
    with pytest.raises(ValueError):
        BallDescription(BuildingPoint(VertexClass.base(F2)), Fraction(-1), 0)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_two_ball_matches_brute_force(seed):
    rng = random.Random(seed)
    F = field(*rng.choice([(2, 1), (3, 1), (2, 2)]))
    x1, x2 = random_point(rng, F), random_point(rng, F)
    r1, r2 = Fraction(rng.randint(0, 8), 2), Fraction(rng.randint(0, 8), 2)
    det = rng.randint(-3, 3)
    assert two_ball_reduce(x1, r1, x2, r2, det).classes() == brute_two_ball(x1, r1, x2, r2, det)


# -- fibres ------------------------------------------------------------------------------

def test_three_slot_fibre_is_a_two_ball_intersection(F2):
    """With s = 3 the middle slot lies within r_2 of the image of the first
    slot and has image within r_3 of the last: a two-ball set."""
    M = standard_module(2, 1, 2, 1)
    first = VertexClass.base(F2).lattice()
    last = cls(F2, 2, 0).lattice()
    desc = fiber_reduce(M, 0, first, last, [2, 3], [1])
    assert desc.points() == chain_scan(M, 0, first, last, [2, 3], [1])
    assert isinstance(desc, BallDescription)


def test_vacuous_constraints_give_the_full_ball(F2):
    M = standard_module(2, 1, 1, 1)
    first = VertexClass.base(F2).lattice()
    img = M.phibar_vertex(0, first.vertex())
    last = M.phibar_vertex(0, img).lattice()
    desc = fiber_reduce(M, 0, first, last, [3, 6], [img.d + 1])
    assert desc.classes() == ball(img, 3, parity=img.d + 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_fiber_matches_chain_scan(seed):
    M, start, first, last, radii, dets = fiber_instance(random.Random(seed))
    got = fiber_reduce(M, start, first, last, radii, dets)
    assert got.points() == chain_scan(M, start, first, last, radii, dets)


def fiber_move_graph_is_connected(M, start, first, last, radii, dets):
    """Chains through the fibre, linked when they differ in one slot."""
    s = len(radii) + 1
    chains = []

    def rec(prev, f, chain):
        img = M.phibar_vertex(f, prev)
        if len(chain) == s - 2:
            if dist(img, last.vertex()) <= radii[-1]:
                chains.append(tuple(chain))
            return
        k = len(chain)
        for v in ball(img, radii[k], parity=dets[k]):
            rec(v, f + 1, chain + [v])

    rec(first.vertex(), start, [])
    if not chains:
        return True
    parent = list(range(len(chains)))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a in range(len(chains)):
        for b in range(a + 1, len(chains)):
            if sum(x != y for x, y in zip(chains[a], chains[b])) == 1:
                parent[find(a)] = find(b)
    return len({find(a) for a in range(len(chains))}) == 1


@pytest.mark.parametrize("seed", range(30))
def test_fibres_are_connected_by_single_moves(seed):
    M, start, first, last, radii, dets = fiber_instance(random.Random(1000 + seed))
    assert fiber_move_graph_is_connected(M, start, first, last, radii, dets)


# -- chi families ----------------------------------------------------------------------

def test_chi_constant_family(F2):
    L = cls(F2, 2, 0).lattice(2)
    assert chi_family(L, L) == [L] * 3


def test_chi_sphere_example():
    for pm in [(2, 1), (3, 1), (2, 2)]:
        F = field(*pm)
        N1 = Lattice.standard(F)
        N2 = hnf(Mat2.diag(F, 2, -2))
        fam = chi_family(N1, N2)
        y = cls(F, 1, -1)
        assert len(fam) == F.q + 1
        assert fam[0] == N1 and fam[-1] == N2
        assert len(set(fam)) == F.q + 1
        assert all(vertex_dist(Lt.vertex(), y) == 2 and Lt.detval == 0 for Lt in fam)


def test_chi_needs_equal_determinants(F2):
    with pytest.raises(DetMismatch):
        chi_family(Lattice.standard(F2), cls(F2, 2, 0).lattice(4))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_chi_contract(seed):
    rng = random.Random(seed)
    F = field(*rng.choice([(2, 1), (3, 1), (2, 2)]))
    a = random_point(rng, F, 4).v
    b = random_point(rng, F, 4).v
    if (a.d - b.d) % 2:
        b = rng.choice(neighbors(b))
    det = a.d + 2 * rng.randint(-2, 2)
    N1, N2 = a.lattice(det), b.lattice(det)
    fam = chi_family(N1, N2)
    y, half = midpoint(a, b), dist(a, b) / 2
    assert fam[0] == N1 and fam[-1] == N2
    assert all(Lt.detval == det and dist(Lt.vertex(), y) == half for Lt in fam)
    if N1 != N2:
        assert len(set(fam)) == F.q + 1


# -- witnesses and main steps -------------------------------------------------------

def test_single_factor_witness_is_zero():
    M = standard_module(2, 1, 1, 1)
    nu = Cochar([(3, -2)])
    for x in enumerate_points(M, nu).points:
        assert witness_index(M, x) == 0


def test_no_witness_on_a_split_module(F2):
    """Control: a split module and a tuple whose image geodesic misses P.

    diag(1, u) moves the whole apartment and has no fixed point, so the
    identity (split, fixing the base vertex) is used.
    """
    M = PhiModule(F2, [Mat2.identity(F2)])
    P = fixed_point(M).P[0]
    found = None
    for v in window_classes(F2, 3):
        if not on_geodesic(P, v, M.phibar_vertex(0, v)):
            found = KisinPoint([v.lattice()])
            break
    assert found is not None
    with pytest.raises(NoWitness):
        witness_index(M, found)


def load(inst_json):
    inst = Instance(inst_json["p"], inst_json["m_ext"], inst_json["n"], inst_json["s"], Cochar(inst_json["nu"]))
    M = inst.module()
    return M, inst.nu, enumerate_points(M, inst.nu).points


SINGLE = {"p": 2, "m_ext": 1, "n": 2, "s": 1, "nu": [[0, -2], [1, -1]]}
CHAINED = {"p": 2, "m_ext": 1, "n": 2, "s": 1, "nu": [[0, -1], [3, -2]]}


def test_mainstep_constant_family():
    M, nu, pts = load(SINGLE)
    x = pts[0]
    i = witness_index(M, x)
    assert mainstep_family(M, nu, x, i, x[i]) == [x] * (M.field.q + 1)


def test_mainstep_single_slot_branch():
    M, nu, pts = load(SINGLE)
    x = pts[0]
    N = Lattice(0, -1, Lattice.standard(M.field).f)
    fam = mainstep_family(M, nu, x, 0, N)
    assert fam[0] == x and fam[-1][0] == N
    assert all(is_member(M, nu, t) for t in fam)
    assert len({t[1] for t in fam}) == 1
    assert len({t[0] for t in fam}) == M.field.q + 1


def test_mainstep_chained_branch():
    M, nu, pts = load(CHAINED)
    x = pts[3]
    N = Lattice(0, -1, Lattice.standard(M.field).f)
    fam = mainstep_family(M, nu, x, 1, N)
    assert fam[0] == x and fam[-1][1] == N
    assert all(is_member(M, nu, t) for t in fam)
    assert len({t[0] for t in fam}) > 1


def test_mainstep_preconditions():
    M, nu, pts = load(SINGLE)
    x = pts[0]
    i = witness_index(M, x)
    with pytest.raises(PreconditionViolated):
        mainstep_family(M, nu, x, i, x[i].scaled(1))


def test_mainstep_families_on_battery_instances():
    for spec in [(2, 1, 1, 1, [4]), (2, 1, 2, -1, [2, 2]), (3, 1, 2, 1, [1, 2]), (2, 2, 1, 1, [3])]:
        p, m, n, s, r = spec
        M = standard_module(p, m, n, s)
        nu = cochar_for(M, r)
        ctx = Context.of(M, nu)
        R = radius_bound(M, nu)
        for x in enumerate_points(M, nu).points:
            i = witness_index(M, x, ctx)
            for N in chi_targets(M, nu, x, i, R[i], ctx):
                fam = mainstep_family(M, nu, x, i, N, ctx)
                assert len(fam) == M.field.q + 1
                assert all(is_member(M, nu, t) for t in fam)


# -- M(Q_i) --------------------------------------------------------------------------

def test_single_factor_MQ():
    M = standard_module(2, 1, 1, 1)
    for r in range(0, 6):
        nu = cochar_for(M, [r])
        ctx = Context.of(M, nu)
        hub = construct_MQ(M, nu, 0, ctx)
        assert hub[0] == ctx.Q[0].lattice(ctx.s[0])
        Q = ctx.Q[0]
        expected = vertex_dist(M.phibar_vertex(0, Q), Q) <= nu.r[0]
        assert bool(is_member(M, nu, hub)) == expected


# -- certificate graph -------------------------------------------------------------

def test_single_point_graph():
    M = standard_module(2, 1, 1, 1)
    nu = Cochar([(2, -1)])
    pts = enumerate_points(M, nu).points
    assert len(pts) == 1
    g = build_graph(pts, M, nu)
    assert components(g) == [[0]]


def test_identity_graph(F2):
    M = PhiModule(F2, [Mat2.identity(F2)])
    nu = Cochar([(0, 0)])
    pts = enumerate_points(M, nu).points
    g = build_graph(pts, M, nu, rules=["single"])
    assert len(components(g)) == len(pts)
    assert build_graph([], M, nu).to_json()["components"] == []


def test_unknown_rule():
    M = standard_module(2, 1, 1, 1)
    with pytest.raises(ValueError):
        build_graph([], M, Cochar([(2, -1)]), rules=["single", "bogus"])


@pytest.mark.parametrize(
    "spec", [(2, 1, 1, 1, [5]), (2, 1, 2, 1, [2, 3]), (3, 1, 1, 2, [4]), (2, 2, 1, 1, [3])], ids=str
)
def test_graph_connected_and_replayable(spec):
    p, m, n, s, r = spec
    M = standard_module(p, m, n, s)
    nu = cochar_for(M, r)
    pts = enumerate_points(M, nu).points
    g = build_graph(pts, M, nu)
    assert len(components(g)) == 1
    ctx = Context.of(M, nu)
    for edge, cert in zip(g.edges, g.certs):
        assert edge[2] in TAGS.values()
        assert replay_edge(pts, M, nu, edge, cert, ctx)
    data = json.loads(json.dumps(g.to_json()))
    assert set(data) == {"nodes", "edges", "certificates", "components"}
    dot = g.to_dot()
    assert dot.startswith("graph certificates {")
    assert dot.count("--") == len(g.edges)


def test_replay_rejects_a_forged_edge():
    M = standard_module(2, 1, 2, 1)
    nu = cochar_for(M, [2, 3])
    pts = enumerate_points(M, nu).points
    pair = next((a, b) for a in range(len(pts)) for b in range(a + 1, len(pts)) if pts[a][0] != pts[b][0] and pts[a][1] != pts[b][1])
    assert not replay_edge(pts, M, nu, (*pair, TAGS["single"]), {"slot": 0})
    assert not replay_edge(pts, M, nu, (*pair, "unknown-tag"), {})


def test_graph_is_deterministic():
    M = standard_module(2, 1, 2, -1)
    nu = cochar_for(M, [2, 2])
    pts = enumerate_points(M, nu).points
    one = json.dumps(build_graph(pts, M, nu).to_json(), sort_keys=True)
    two = json.dumps(build_graph(list(reversed(pts))[::-1], M, nu).to_json(), sort_keys=True)
    assert one == two
