"""Reproducible instance batteries over standard modules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .phimod import PhiModule, standard_module
from .variety import Cochar, solve_det_classes


@dataclass
class Instance:
    p: int
    m_ext: int
    n: int
    s: int
    nu: Cochar

    @property
    def q(self) -> int:
        return self.p**self.m_ext

    def module(self) -> PhiModule:
        return standard_module(self.p, self.m_ext, self.n, self.s)

    def label(self) -> str:
        return f"p={self.p} q={self.q} n={self.n} s={self.s} nu={list(self.nu.pairs)}"

    def to_json(self):
        return {"p": self.p, "m_ext": self.m_ext, "n": self.n, "s": self.s, "nu": self.nu.to_json()}


def cochar_for(M: PhiModule, r: list[int], span: int = 4) -> Cochar | None:
    """A cocharacter with the given r_i whose determinant classes are integral;
    among candidates the one with the smallest sum |m_i| (then lexicographic)."""
    choices = []
    for m in itertools.product(range(-span, span + 1), repeat=len(r)):
        if any((mi - ri) % 2 for mi, ri in zip(m, r)):
            continue
        nu = Cochar([((mi + ri) // 2, (mi - ri) // 2) for mi, ri in zip(m, r)])
        if solve_det_classes(M, nu) is not None:
            choices.append((sum(abs(x) for x in m), m, nu))
    if not choices:
        return None
    choices.sort(key=lambda c: (c[0], c[1]))
    return choices[0][2]


def fixed_point_battery():
    """Standard modules p in {2,3}, n in {1,2,3}, s in [-6, 6], p^n + 1 not dividing s."""
    out = []
    for p in (2, 3):
        for n in (1, 2, 3):
            for s in range(-6, 7):
                if s % (p**n + 1):
                    out.append((p, n, s))
    return out


def enumeration_battery(max_r: int = 3, full: bool = False) -> list[Instance]:
    """Simple standard modules over F_2 and F_4 with r_i <= max_r.

    Sized so the brute-force window scan stays fast: n = 1 over both fields,
    n = 2 over F_2 for all r, and over F_4 for r_i <= 1 unless ``full``.
    """
    out = []
    for m_ext in (1, 2):
        for n in (1, 2):
            for s in (1, -1, 2):
                if s % (2**n + 1) == 0:
                    continue
                M = standard_module(2, m_ext, n, s)
                for r in itertools.product(range(max_r + 1), repeat=n):
                    if n == 2 and m_ext == 2 and max(r) > 1 and not full:
                        continue
                    nu = cochar_for(M, list(r))
                    if nu is not None:
                        out.append(Instance(2, m_ext, n, s, nu))
    return out


def connectivity_battery(max_r: int = 5) -> list[Instance]:
    """Simple standard modules for the connectedness shadow, including p = 3 and n = 3."""
    out = []
    specs = [
        (2, 1, 1, (1, -1, 2), max_r + 2),
        (2, 2, 1, (1, 2), max_r),
        (3, 1, 1, (1, 2, 3), max_r),
        (2, 1, 2, (1, -1, 2), max_r),
        (2, 2, 2, (1,), 3),
        (3, 1, 2, (1, 3), 3),
        (2, 1, 3, (1, 2), 3),
    ]
    for p, m_ext, n, ss, rmax in specs:
        for s in ss:
            if s % (p**n + 1) == 0:
                continue
            M = standard_module(p, m_ext, n, s)
            for r in itertools.product(range(rmax + 1), repeat=n):
                if n == 3 and sorted(r) != list(r):
                    continue
                nu = cochar_for(M, list(r))
                if nu is not None:
                    out.append(Instance(p, m_ext, n, s, nu))
    return out
