"""Invariant suites run by ``nbhd selftest``.

Each suite returns a :class:`SuiteResult`; quick mode keeps sizes small,
exhaustive mode widens the sweeps.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from . import lab
from . import syntax as sx
from .algebra import (FiniteModalAlgebra, check_algebra_properties, enumerate_prime_filters,
                      separate)
from .duality import build_J, build_Jbar, build_K, stone_map
from .epsets import EPSet, ParametricFamily, ep_principal_ultrafilter_is_q, ep_separate
from .frames import check_frame_properties, enumerate_frames, is_frame_homomorphism
from .semantics import frame_valid


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    seconds: float
    failure: str | None = None

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "cases": self.cases,
                "seconds": round(self.seconds, 3), "failure": self.failure}


def default_jobs() -> int:
    env = os.environ.get("NBHD_DUALITY_JOBS")
    if env:
        return max(1, int(env))
    return 1


def parallel_map(fn: Callable, items: Sequence, jobs: int | None = None) -> list:
    """``map`` over ``items``, in order, with up to ``jobs`` worker processes."""
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _algebras(n: int) -> Iterable[FiniteModalAlgebra]:
    size = 1 << n
    for table in itertools.product(range(size), repeat=size):
        yield FiniteModalAlgebra(n, table)


def suite_algebra(exhaustive: bool) -> tuple[int, str | None]:
    cases = 0
    ns = (1, 2, 3) if exhaustive else (1, 2)
    for n in ns:
        A = FiniteModalAlgebra(n, tuple(range(1 << n)))
        for a in A.elements():
            for b in A.elements():
                if A.leq(a, b):
                    continue
                F = separate(A, a, b)
                cases += 1
                if a not in F or b in F or not F.is_prime():
                    return cases, f"separate({a},{b}) on {n} atoms"
        if len(enumerate_prime_filters(A)) != n:
            return cases, f"prime filter count on {n} atoms"
    return cases, None


def suite_epsets(exhaustive: bool) -> tuple[int, str | None]:
    rng = random.Random(0)
    n = 20000 if exhaustive else 2000
    cases = 0
    for _ in range(n):
        x, y = _random_epset(rng), _random_epset(rng)
        w = 24
        a, b = x.window(w), y.window(w)
        meet = "".join("1" if s == t == "1" else "0" for s, t in zip(a, b))
        if (x & y).window(w) != meet or ~(x | y) != (~x & ~y):
            return cases, f"Boolean law on {x}, {y}"
        cases += 1
    for k in range(50 if exhaustive else 20):
        for S in (ParametricFamily.co_singleton(), ParametricFamily.tail()):
            if not ep_principal_ultrafilter_is_q(k, [S]):
                return cases, f"principal ultrafilter {k}"
            cases += 1
    x, y = EPSet("", "10"), EPSet("", "1")
    if ep_separate(x, y - x, []) is None:
        return cases, "ep_separate"
    return cases, None


def _random_epset(rng: random.Random) -> EPSet:
    ell, p = rng.randint(0, 5), rng.randint(1, 4)
    return EPSet("".join(rng.choice("01") for _ in range(ell)),
                 "".join(rng.choice("01") for _ in range(p)))


def suite_frames(exhaustive: bool) -> tuple[int, str | None]:
    cases = 0
    for m in (1, 2):
        for Z in enumerate_frames(m):
            props = check_frame_properties(Z)
            if check_algebra_properties(build_K(Z)).flags() != props.flags():
                return cases, f"property transfer through K on {Z}"
            if not is_frame_homomorphism(list(Z.worlds), Z, Z):
                return cases, f"identity homomorphism on {Z}"
            cases += 1
    return cases, None


def suite_duality(exhaustive: bool) -> tuple[int, str | None]:
    cases = 0
    ns = (1, 2) if exhaustive else (1,)
    for n in ns:
        for A in _algebras(n):
            props = check_algebra_properties(A)
            variant = "J" if props.monotonic else "Jbar"
            _, report = stone_map(A, None, variant)
            if not report.monomorphism:
                return cases, f"stone_map on {A.to_json()}"
            Z = build_J(A) if props.monotonic else build_Jbar(A)
            if not check_frame_properties(Z).satisfies(props.flags()):
                return cases, f"flags lost on {A.to_json()}"
            cases += 1
    return cases, None


def suite_syntax(exhaustive: bool) -> tuple[int, str | None]:
    texts = ["[](p & q) -> []p & []q", "<>p <-> ~[]~p", "A x. E y. P(x, y) | T",
             "/\\{p, q, r}", "(p -> q) -> r", "p -> q -> r", "~~[]F"]
    for i, text in enumerate(texts):
        phi = sx.parse(text)
        if sx.parse(sx.to_text(phi)) != phi:
            return i, f"round trip of {text!r}"
    return len(texts), None


def suite_semantics(exhaustive: bool) -> tuple[int, str | None]:
    cases = 0
    for m in (1, 2) if exhaustive else (1,):
        for Z in enumerate_frames(m):
            mono = check_frame_properties(Z).monotonic
            if mono and not frame_valid(Z, lab.M_AXIOM):
                return cases, f"M axiom on monotonic frame {Z}"
            cases += 1
    return cases, None


def suite_lab(exhaustive: bool) -> tuple[int, str | None]:
    cases = 0
    for phi in (lab.M_AXIOM, lab.N_AXIOM, lab.C_AXIOM):
        flag = {lab.M_AXIOM: "monotonic", lab.N_AXIOM: "topped", lab.C_AXIOM: "cufi"}[phi]
        for L in lab.ALL_CLASSES:
            if lab.decide_valid(phi, L).valid != (flag in L.flags):
                return cases, f"{sx.to_text(phi)} in {L}"
            cases += 1
    if not lab.bf_countermodel()["refuted"]:
        return cases, "Barcan countermodel"
    return cases + 1, None


SUITES: dict[str, Callable[[bool], tuple[int, str | None]]] = {
    "algebra": suite_algebra,
    "epsets": suite_epsets,
    "frames": suite_frames,
    "duality": suite_duality,
    "syntax": suite_syntax,
    "semantics": suite_semantics,
    "lab": suite_lab,
}


def _run_one(args: tuple[str, bool]) -> SuiteResult:
    name, exhaustive = args
    start = time.perf_counter()
    try:
        cases, failure = SUITES[name](exhaustive)
    except Exception as e:  # a crash is a failed suite
        cases, failure = 0, f"{type(e).__name__}: {e}"
    return SuiteResult(name, failure is None, cases, time.perf_counter() - start, failure)


def run_selftest(exhaustive: bool = False, jobs: int | None = None) -> list[SuiteResult]:
    return parallel_map(_run_one, [(name, exhaustive) for name in SUITES], jobs)
