"""Acceptance criteria 1 to 10.

Each test records one PASS/FAIL line (shown in the terminal summary and
printed to stdout) together with its elapsed time and budget. Budgets are
part of each criterion and are asserted.
"""

import contextlib
import itertools
import random
import time
from math import lcm

from conftest import ACCEPTANCE_LINES
from nbhd_duality import lab
from nbhd_duality import syntax as sx
from nbhd_duality.algebra import (
    FiniteModalAlgebra,
    check_algebra_properties,
    separate,
)
from nbhd_duality.duality import build_J, build_Jbar, build_K, stone_map
from nbhd_duality.epsets import EPSet, ParametricFamily, canonicalize, ep_principal_ultrafilter_is_q, ep_separate
from nbhd_duality.frames import NeighborhoodFrame, check_frame_properties, enumerate_frames
from nbhd_duality.lab import ALL_CLASSES
from nbhd_duality.semantics import frame_valid, model_valid


@contextlib.contextmanager
def criterion(number, title, budget):
    start = time.perf_counter()
    info = {}
    status = "FAIL"
    try:
        yield info
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        if status == "PASS" and elapsed >= budget:
            status = "FAIL"
        detail = f" [{info['detail']}]" if "detail" in info else ""
        line = f"{status} criterion {number}: {title} ({elapsed:.2f}s, budget {budget:g}s){detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert elapsed < budget, f"criterion {number} exceeded its {budget}s budget"


def algebras(n):
    size = 1 << n
    for table in itertools.product(range(size), repeat=size):
        yield FiniteModalAlgebra(n, table)


def small_families(n, max_size=2):
    elements = range(1 << n)
    return [X for k in range(max_size + 1) for X in itertools.combinations(elements, k)]


FAMILIES_2 = small_families(2)
FLAGS = ("injective", "boolean_homomorphism", "box_preserved", "meets_preserved")


def all_flags(report):
    return all(getattr(report, name) for name in FLAGS)


# 1 and 2: representation sweeps

def test_criterion_1_representation_monotonic_tables():
    with criterion(1, "representation via J on monotonic 2-atom tables", 10) as info:
        count = 0
        for A in algebras(2):
            if not check_algebra_properties(A).monotonic:
                continue
            _, report = stone_map(A, FAMILIES_2, "J")
            assert all_flags(report), (A.box_table, report.witnesses)
            count += 1
        assert count == 36
        info["detail"] = f"{count} tables, {len(FAMILIES_2)} families"


def test_criterion_2_representation_all_tables():
    with criterion(2, "representation via Jbar on all 2-atom tables", 10) as info:
        count = 0
        for A in algebras(2):
            _, report = stone_map(A, FAMILIES_2, "Jbar")
            assert all_flags(report), (A.box_table, report.witnesses)
            count += 1
        assert count == 256
        info["detail"] = f"{count} tables"


# 3: property transfer

def test_criterion_3_property_transfer():
    with criterion(3, "property transfer between algebras and frames", 60) as info:
        algebra_cases = 0
        for n in (1, 2):
            for A in algebras(n):
                flags = check_algebra_properties(A).flags()
                assert check_frame_properties(build_Jbar(A)).flags() == flags
                if "monotonic" in flags:
                    assert check_frame_properties(build_J(A)).flags() == flags
                algebra_cases += 1
        frame_cases = 0
        for m in (1, 2):
            for Z in enumerate_frames(m):
                assert check_algebra_properties(build_K(Z)).flags() == check_frame_properties(Z).flags()
                frame_cases += 1
        rng = random.Random(3)
        for _ in range(10 ** 5):
            Z = NeighborhoodFrame.from_family_codes(3, [rng.getrandbits(8) for _ in range(3)])
            assert check_algebra_properties(build_K(Z)).flags() == check_frame_properties(Z).flags()
        info["detail"] = f"{algebra_cases} algebras, {frame_cases} small frames, 100000 random m=3 frames"


# 4: separation

def brute_q_filter(n, members, S):
    """Direct check of the definitions over the listed elements."""
    elements = range(1 << n)
    F = set(members)
    top = (1 << n) - 1
    if top not in F or 0 in F:
        return False
    for x in F:
        for y in elements:
            if x & y == x and y not in F:
                return False
    for x, y in itertools.product(F, F):
        if x & y not in F:
            return False
    for x, y in itertools.product(elements, elements):
        if x | y in F and x not in F and y not in F:
            return False
    for X in S:
        meet = top
        for x in X:
            meet &= x
        if all(x in F for x in X) and meet not in F:
            return False
    return True


def check_separation(A, S, verdicts):
    pairs = 0
    for a, b in itertools.product(A.elements(), repeat=2):
        if A.leq(a, b):
            continue
        F = separate(A, a, b, S)
        key = F.elements
        if key not in verdicts:
            verdicts[key] = brute_q_filter(A.atom_count, key, S)
        assert verdicts[key], (A.box_table, a, b)
        assert a in F and b not in F
        pairs += 1
    return pairs


def test_criterion_4_separation():
    with criterion(4, "separation by Q-filters for n <= 3", 30) as info:
        pairs = 0
        # n <= 2: every Box table
        for n in (1, 2):
            S = small_families(n)
            verdicts = {}
            for A in algebras(n):
                pairs += check_separation(A, S, verdicts)
        # n = 3: separation never reads the Box table, so the Boolean reduct
        # covers all 8**8 tables; a random sample confirms output independence
        S3 = small_families(3)
        reduct = FiniteModalAlgebra(3, tuple(range(8)))
        pairs += check_separation(reduct, S3, {})
        rng = random.Random(4)
        pairs_list = [(a, b) for a in range(8) for b in range(8) if a & ~b]
        expected = {(a, b): separate(reduct, a, b, S3).elements for a, b in pairs_list}
        for _ in range(300):
            A = FiniteModalAlgebra(3, tuple(rng.randrange(8) for _ in range(8)))
            for a, b in pairs_list:
                assert separate(A, a, b, S3).elements == expected[(a, b)]
        info["detail"] = f"{pairs} separated pairs, 300 random n=3 tables"


# 5: EP showcase

def random_epset(rng, max_prefix=6, max_period=6):
    ell = rng.randint(0, max_prefix)
    p = rng.randint(1, max_period)
    prefix = format(rng.getrandbits(ell), f"0{ell}b") if ell else ""
    return EPSet(prefix, format(rng.getrandbits(p), f"0{p}b"))


def horizon(*xs):
    return max(len(x.prefix) for x in xs) + 2 * lcm(*(len(x.period) for x in xs))


def test_criterion_5_ep_q_filters_and_separation():
    with criterion(5, "principal ultrafilters are Q and EP separation", 10) as info:
        S = [ParametricFamily.co_singleton(), ParametricFamily.tail()]
        for n in range(101):
            assert ep_principal_ultrafilter_is_q(n, S)
            # each family has a member missing n, so the Q condition is vacuous
            for F in S:
                assert n not in F.member(F.member_excluding(n))
        rng = random.Random(5)
        separated = 0
        for _ in range(10 ** 4):
            a, b = random_epset(rng), random_epset(rng)
            if a <= b:
                continue
            n = ep_separate(a, b, S)
            assert n in a and n not in b
            assert all(not (k in a and k not in b) for k in range(n))
            assert ep_principal_ultrafilter_is_q(n, S)
            separated += 1
        info["detail"] = f"{separated} separable random pairs"


# 6: axioms and classes

AXIOMS = [(lab.M_AXIOM, "monotonic"), (lab.N_AXIOM, "topped"), (lab.C_AXIOM, "cufi")]


def test_criterion_6_axioms_separate_classes():
    with criterion(6, "M/N/C valid exactly on classes with their flag, m <= 3", 60) as info:
        frames_checked = 0
        for phi, flag in AXIOMS:
            sweeps = {m: lab.class_sweep(phi, m) for m in (1, 2, 3)}
            for L in ALL_CLASSES:
                valid = all(sweeps[m][L].valid for m in (1, 2, 3))
                assert valid == (flag in L.flags), (sx.to_text(phi), str(L))
                frames_checked += sum(sweeps[m][L].frames_in_class for m in (1, 2, 3))
            # direct evaluation agrees with the vectorized sweep for m <= 2
            for m in (1, 2):
                for Z in enumerate_frames(m):
                    flags = check_frame_properties(Z).flags()
                    assert frame_valid(Z, phi) or flag not in flags
        info["detail"] = f"{frames_checked} frame/class checks"


# 7: fragment model existence

CORPUS = """
[]p -> p
p -> <>p
[]T
~[]F
[][]p -> []p
[]p -> [][]p
<>T
[][]T
[]p | ~[]p
[]p & ~[]p
[](p & p) -> []p
[](p | p) <-> []p
<>p -> []T
[](p -> p)
[](p | ~p)
[]p -> <>p
<>p -> []p
[](p & q)
[]p -> [](p & p)
[]F -> []p
[]p -> []T
[][]F -> []F
[](p & q) -> q
<>(p | q)
p -> [](p | T)
""".strip().splitlines()


def test_criterion_7_model_existence():
    with criterion(7, "fragment model existence biconditional", 300) as info:
        formulas = [sx.parse(t) for t in CORPUS]
        assert len(formulas) >= 20
        assert all(len(sx.subformulas(phi)) <= 5 for phi in formulas)
        in_logic = 0
        for phi in formulas:
            for L in ALL_CLASSES:
                M = lab.model_existence([phi], L)
                assert check_frame_properties(M.frame).satisfies(L.flags)
                expected = lab.decide_valid(phi, L).valid
                assert model_valid(M, phi) == expected, (sx.to_text(phi), str(L))
                in_logic += expected
        info["detail"] = f"{len(formulas)} formulas x 8 classes, {in_logic} valid pairs"


# 8 and 9: infinite countermodels

def test_criterion_8_bf_failure():
    with criterion(8, "Barcan formula fails on a monotonic topped cufi frame", 1):
        r = lab.bf_countermodel()
        assert r["world"] == 0
        assert r["premise"] == "holds" and r["conclusion"] == "fails" and r["refuted"]
        flags = r["frame_flags"]
        assert flags["monotonic"] and flags["topped"] and flags["cufi"]


def test_criterion_9_omega_bf_failure():
    with criterion(9, "infinitary Barcan formula refuted, finite instances valid", 30) as info:
        r = lab.omega_bf_countermodel(finite_k=3, finite_m=3)
        assert r["premise"] == "holds" and r["conclusion"] == "fails" and r["refuted"]
        instances = r["finite_instances_valid_on_cufi"]
        assert len(instances) == 9 and all(instances.values())
        assert r["finite_contrast_holds"]
        # independent check of the finite contrast on every cufi frame
        for k in (1, 2, 3):
            phi = lab.finite_bf_instance(k)
            for m in (1, 2):
                assert all(frame_valid(Z, phi) for Z in enumerate_frames(m, ["cufi"]))
        info["detail"] = "k <= 3, m <= 3"


# 10: EP algebra

def window_bits(x, n):
    return int(x.window(n), 2)


def law_meet_assoc(x, y, z):
    n = horizon(x, y, z)
    left = (x & y) & z
    return left == x & (y & z) and window_bits(left, n) == window_bits(x, n) & window_bits(y, n) & window_bits(z, n)


def law_join_assoc(x, y, z):
    n = horizon(x, y, z)
    left = (x | y) | z
    return left == x | (y | z) and window_bits(left, n) == window_bits(x, n) | window_bits(y, n) | window_bits(z, n)


def law_distributive(x, y, z):
    n = horizon(x, y, z)
    left = x & (y | z)
    return (left == (x & y) | (x & z)
            and window_bits(left, n) == window_bits(x, n) & (window_bits(y, n) | window_bits(z, n)))


def law_de_morgan(x, y, z):
    n = horizon(x, y)
    left = ~(x & y)
    return left == ~x | ~y and window_bits(left, n) == ((1 << n) - 1) ^ (window_bits(x, n) & window_bits(y, n))


def law_complement(x, y, z):
    n = horizon(x)
    return (~~x == x and (x & ~x).is_empty() and (x | ~x) == EPSet.full()
            and window_bits(~x, n) == ((1 << n) - 1) ^ window_bits(x, n))


def law_canonical(x, y, z):
    # canonical forms are fixed points, and equality matches sampled membership
    n = horizon(x, y)
    fixed = canonicalize(x.prefix, x.period) == (x.prefix, x.period)
    return fixed and (x.window(n) == y.window(n)) == (x == y)


def law_padding(x, y, z):
    # unrolling the period and the prefix does not change the canonical set
    padded = EPSet(x.prefix + x.period, x.period * 2)
    return padded == x and padded.window(horizon(x)) == x.window(horizon(x))


LAWS = [law_meet_assoc, law_join_assoc, law_distributive, law_de_morgan,
        law_complement, law_canonical, law_padding]


def test_criterion_10_ep_algebra_laws():
    with criterion(10, "EP Boolean laws and canonicalization", 10) as info:
        rng = random.Random(10)
        for i in range(10 ** 5):
            law = LAWS[i % len(LAWS)]
            x, y, z = random_epset(rng), random_epset(rng), random_epset(rng)
            assert law(x, y, z), (law.__name__, x, y, z)
        info["detail"] = f"100000 cases over {len(LAWS)} laws"
