"""Self-contained verification suites behind ``kisin check``.

Each suite draws its own instances from a seeded RNG, recomputes its oracle
and returns a ``CheckResult``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .battery import Instance, connectivity_battery, enumeration_battery, fixed_point_battery
from .gf import field
from .lattice import Lattice, Mat2, VertexClass, hnf, neighbors
from .phimod import PhiModule, apartment_coordinate, fixed_point, standard_module
from .series import LaurentElement
from .tree import BuildingPoint, ball, dist, midpoint


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        self.failures.append(msg)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({len(self.failures)} failing)" if self.failures else ""
        return f"{status}  {self.name:<28} {self.cases:>6} cases  {self.seconds:7.2f}s{extra}"


# -- random instances ---------------------------------------------------------------

def random_vertex(rng: random.Random, F, steps: int) -> VertexClass:
    v = VertexClass.base(F)
    for _ in range(steps):
        v = rng.choice(neighbors(v))
    return v


def random_point(rng: random.Random, F, steps: int = 4) -> BuildingPoint:
    v = random_vertex(rng, F, rng.randint(0, steps))
    if rng.random() < 0.5:
        return BuildingPoint(v)
    w = rng.choice(neighbors(v))
    return BuildingPoint.on_edge(v, w, Fraction(rng.randint(1, 5), 6))


def random_laurent(rng: random.Random, F, lo: int = -1, hi: int = 1, width: int = 3) -> LaurentElement:
    return LaurentElement(F, rng.randint(lo, hi), [rng.randrange(F.q) for _ in range(rng.randint(1, width))])


def random_module(rng: random.Random, F, n: int) -> PhiModule:
    A = []
    for _ in range(n):
        while True:
            m = Mat2(*(random_laurent(rng, F) for _ in range(4)))
            if not m.det().is_zero():
                break
        A.append(m)
    return PhiModule(F, A)


# -- suites -----------------------------------------------------------------------------

def check_fixpoint(seed: int = 0, pairs: int = 500) -> CheckResult:
    """Fixed-point formula on the standard battery plus distance scaling."""
    res = CheckResult("fixed point + scaling")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    for p, n, s in fixed_point_battery():
        M = standard_module(p, 1, n, s)
        fp = fixed_point(M)
        res.cases += 1
        coord = apartment_coordinate(fp.P[0])
        if coord is None or (coord - Fraction(s, p**n + 1)).denominator != 1:
            res.fail(f"p={p} n={n} s={s}: P_0 at {coord}")
        if any(x.is_vertex for x in fp.P):
            res.fail(f"p={p} n={n} s={s}: vertex in P")
        for i in range(n):
            if M.phibar(i, fp.P[i]) != fp.P[(i + 1) % n]:
                res.fail(f"p={p} n={n} s={s}: not fixed at {i}")
        for _ in range(pairs // 50):
            i = rng.randrange(n)
            x = random_vertex(rng, M.field, rng.randint(0, 5))
            y = random_vertex(rng, M.field, rng.randint(0, 5))
            if dist(M.phibar_vertex(i, x), M.phibar_vertex(i, y)) != p * dist(x, y):
                res.fail(f"p={p} n={n} s={s}: scaling fails")
    res.seconds = time.perf_counter() - t0
    return res


def check_schubert(seed: int = 0, count: int = 200) -> CheckResult:
    from .connect import two_ball_reduce

    res = CheckResult("two-ball reduction")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    for q_p in (2, 3):
        F = field(q_p, 1)
        got = len(two_ball_reduce(VertexClass.base(F), 2, VertexClass.base(F), 2, 0).points())
        res.cases += 1
        if got != q_p**2 + q_p + 1:
            res.fail(f"radius-2 ball over F_{q_p}: {got}")
    for _ in range(count):
        F = field(*rng.choice([(2, 1), (3, 1), (2, 2)]))
        x1, x2 = random_point(rng, F), random_point(rng, F)
        r1, r2 = Fraction(rng.randint(0, 8), 2), Fraction(rng.randint(0, 8), 2)
        det = rng.randint(-3, 3)
        got = two_ball_reduce(x1, r1, x2, r2, det).classes()
        brute = sorted(v for v in ball(x1, r1, parity=det) if dist(v, x2) <= r2)
        res.cases += 1
        if got != brute:
            res.fail(f"{x1} r={r1}, {x2} r={r2}, det {det}: {len(got)} vs {len(brute)}")
    res.seconds = time.perf_counter() - t0
    return res


def fiber_instance(rng: random.Random):
    p = rng.choice([2, 3])
    F = field(p, 1)
    if rng.random() < 0.5:
        M = random_module(rng, F, rng.randint(1, 3))
    else:
        M = standard_module(p, 1, rng.randint(1, 2), rng.choice([1, -1, 2, 4]))
    s = rng.choice([3, 4])
    radii = [rng.randint(0, 3) for _ in range(s - 1)]
    dets = [rng.randint(-2, 2) for _ in range(s - 2)]
    start = rng.randrange(M.n)
    first = random_vertex(rng, F, rng.randint(0, 2)).lattice()
    # bias the far end toward the forward image so that many fibres are nonempty
    v = first.vertex()
    for k in range(s - 1):
        v = M.phibar_vertex(start + k, v)
    last = random_vertex(rng, F, 0) if rng.random() < 0.3 else v
    for _ in range(rng.randint(0, 3)):
        last = rng.choice(neighbors(last))
    return M, start, first, last.lattice(), radii, dets


def base_change(obj, F2):
    """Re-read a series, matrix, lattice or module over F_p as one over F2 (same p)."""
    if isinstance(obj, LaurentElement):
        if obj.field.m != 1:
            raise ValueError("base change is only implemented from a prime field")
        return LaurentElement(F2, obj.val, obj.coeffs, obj.horizon)
    if isinstance(obj, Mat2):
        return Mat2(*(base_change(x, F2) for x in obj.entries()))
    if isinstance(obj, Lattice):
        return Lattice(obj.a, obj.b, base_change(obj.f, F2))
    if isinstance(obj, PhiModule):
        return PhiModule(F2, [base_change(A, F2) for A in obj.A])
    raise TypeError(f"cannot base change {type(obj).__name__}")


def check_fiber(seed: int = 0, count: int = 150) -> CheckResult:
    from .connect import fiber_reduce
    from .oracles import chain_scan

    res = CheckResult("fiber reduction")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    nonempty = 0
    for _ in range(count):
        M, start, first, last, radii, dets = fiber_instance(rng)
        got = fiber_reduce(M, start, first, last, radii, dets).points()
        brute = chain_scan(M, start, first, last, radii, dets)
        res.cases += 1
        nonempty += bool(brute)
        if got != brute:
            res.fail(f"s={len(radii) + 1} radii={radii} dets={dets}: {len(got)} vs {len(brute)}")
    res.notes.append(f"{nonempty} nonempty fibres")
    res.seconds = time.perf_counter() - t0
    return res


def check_chi(seed: int = 0, count: int = 200) -> CheckResult:
    from .connect import chi_family

    res = CheckResult("chi families")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    for _ in range(count):
        F = field(*rng.choice([(2, 1), (3, 1), (2, 2)]))
        a = random_vertex(rng, F, rng.randint(0, 4))
        b = random_vertex(rng, F, rng.randint(0, 4))
        if (a.d - b.d) % 2:
            b = rng.choice(neighbors(b))
        det = a.d + 2 * rng.randint(-2, 2)
        N1, N2 = a.lattice(det), b.lattice(det)
        fam = chi_family(N1, N2)
        y, half = midpoint(a, b), dist(a, b) / 2
        res.cases += 1
        ok = len(fam) == F.q + 1 and fam[0] == N1 and fam[-1] == N2
        ok = ok and all(L.detval == det and dist(L.vertex(), y) == half for L in fam)
        if N1 != N2:
            ok = ok and len(set(fam)) == F.q + 1
        if not ok:
            res.fail(f"{N1} / {N2}")
    res.seconds = time.perf_counter() - t0
    return res


def enumeration_counts(instances: list[Instance]) -> dict:
    from .variety import enumerate_points

    out = {}
    for inst in instances:
        E = enumerate_points(inst.module(), inst.nu)
        out[inst.label()] = len(E.points)
    return out


def check_enumeration(full: bool = False) -> CheckResult:
    from .oracles import window_oracle
    from .variety import enumerate_points, radius_bound

    res = CheckResult("enumeration vs window")
    t0 = time.perf_counter()
    for inst in enumeration_battery(full=full):
        M = inst.module()
        E = enumerate_points(M, inst.nu)
        O = window_oracle(M, inst.nu, E.s, E.fixed, E.R)
        res.cases += 1
        if [x.key() for x in E.points] != [x.key() for x in O]:
            res.fail(f"{inst.label()}: {len(E.points)} vs {len(O)}")
        R = radius_bound(M, inst.nu)
        for x in E.points:
            if [L.detval for L in x] != E.s:
                res.fail(f"{inst.label()}: det classes")
            if any(dist(x[i].vertex(), E.fixed.P[i]) > R[i] for i in range(M.n)):
                res.fail(f"{inst.label()}: radius bound")
    res.seconds = time.perf_counter() - t0
    return res


@dataclass
class ConnectivityReport:
    label: str
    points: int
    components: int
    single_components: int
    escalated: bool = False
    escalated_components: int | None = None


def escalate(inst: Instance) -> Instance:
    return Instance(inst.p, inst.m_ext * 2, inst.n, inst.s, inst.nu)


def connectivity_reports(instances=None) -> list[ConnectivityReport]:
    from .connect import build_graph, components
    from .variety import enumerate_points

    out = []
    for inst in instances if instances is not None else connectivity_battery():
        M = inst.module()
        E = enumerate_points(M, inst.nu)
        if not E.points:
            continue
        g = build_graph(E.points, M, inst.nu)
        c = len(components(g))
        cs = len(components(build_graph(E.points, M, inst.nu, rules=["single"])))
        rep = ConnectivityReport(inst.label(), len(E.points), c, cs)
        if c != 1:
            big = escalate(inst)
            M2 = big.module()
            E2 = enumerate_points(M2, big.nu)
            rep.escalated = True
            rep.escalated_components = len(components(build_graph(E2.points, M2, big.nu)))
        out.append(rep)
    return out


def check_connectivity(instances=None) -> CheckResult:
    res = CheckResult("connectivity shadow")
    t0 = time.perf_counter()
    reports = connectivity_reports(instances)
    for rep in reports:
        res.cases += 1
        final = rep.escalated_components if rep.escalated else rep.components
        if final != 1:
            res.fail(f"{rep.label}: {final} components")
        if rep.escalated:
            res.notes.append(f"escalated: {rep.label}")
    split = sum(1 for r in reports if r.single_components > 1)
    res.notes.append(f"single-coordinate edges alone leave {split} instance(s) disconnected")
    res.seconds = time.perf_counter() - t0
    return res


def check_structure(instances=None) -> CheckResult:
    """Witness indices, main-step families and the two M(Q_i) lemmas."""
    from .connect import Context, chi_targets, construct_MQ, mainstep_family, witness_index
    from .errors import ConstraintEmpty
    from .variety import enumerate_points, is_member, radius_bound

    res = CheckResult("witness / mainstep / MQ")
    t0 = time.perf_counter()
    for inst in instances if instances is not None else connectivity_battery():
        M, nu = inst.module(), inst.nu
        E = enumerate_points(M, nu)
        if not E.points:
            continue
        ctx = Context.of(M, nu)
        R = radius_bound(M, nu)
        for x in E.points:
            res.cases += 1
            i = witness_index(M, x, ctx)
            for N in chi_targets(M, nu, x, i, R[i], ctx):
                fam = mainstep_family(M, nu, x, i, N, ctx)
                if fam[0] != x or fam[-1][i] != N:
                    res.fail(f"{inst.label()}: family endpoints")
        hubs = {}
        for i in range(M.n):
            try:
                h = construct_MQ(M, nu, i, ctx)
            except ConstraintEmpty:
                continue
            if is_member(M, nu, h):
                hubs[i] = h
            elif any(x[i].vertex() == ctx.Q[i] for x in E.points):
                res.fail(f"{inst.label()}: M(Q_{i}) not a member although the premise holds")
        for i in hubs:
            for j in hubs:
                if i < j and not (hubs[i][j] == hubs[j][j] or hubs[j][i] == hubs[i][i]):
                    res.fail(f"{inst.label()}: hubs {i}, {j} share no slot")
    res.seconds = time.perf_counter() - t0
    return res
