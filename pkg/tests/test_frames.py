import itertools

import pytest
from hypothesis import given, strategies as st

from nbhd_duality.errors import FrameError
from nbhd_duality.frames import (
    FLAG_NAMES,
    NeighborhoodFrame,
    check_frame_properties,
    enumerate_frames,
    family_members,
    is_frame_homomorphism,
    upward_closure,
)


def brute_flags(Z):
    """Definitions quantified over all subfamilies, not just pairs."""
    m, full = Z.world_count, Z.full
    mono = all(Y in fam for fam in Z.families for X in fam
               for Y in range(full + 1) if X & ~Y == 0)
    topped = all(full in fam for fam in Z.families)
    cufi = True
    for fam in Z.families:
        members = sorted(fam)
        for r in range(1, len(members) + 1):
            for sub in itertools.combinations(members, r):
                meet = full
                for X in sub:
                    meet &= X
                cufi &= meet in fam
    return mono, topped, cufi


def test_construction_validates():
    with pytest.raises(FrameError):
        NeighborhoodFrame(0, ())
    with pytest.raises(FrameError):
        NeighborhoodFrame(1, ((0,), (1,)))
    with pytest.raises(FrameError, match="out of range"):
        NeighborhoodFrame(1, ((2,),))
    with pytest.raises(FrameError, match="duplicate"):
        NeighborhoodFrame(1, ((1, 1),))
    assert NeighborhoodFrame(2, ((3, 1), ())).nbhd == ((1, 3), ())


def test_json_round_trip():
    Z = NeighborhoodFrame(2, ((0, 3), (1,)))
    assert Z.to_json() == {"worlds": 2, "nbhd": [[0, 3], [1]]}
    assert NeighborhoodFrame.from_json(Z.to_json()) == Z
    with pytest.raises(FrameError, match="missing"):
        NeighborhoodFrame.from_json({"worlds": 1})


def test_upward_closure_examples():
    assert upward_closure(set(), 2) == frozenset()
    assert upward_closure({1}, 2) == {1, 3}
    assert upward_closure({1, 2}, 2) == {1, 2, 3}


@given(st.integers(1, 4), st.data())
def test_upward_closure_extensive_idempotent_and_matches_brute_force(m, data):
    fam = set(data.draw(st.sets(st.integers(0, (1 << m) - 1), max_size=5)))
    up = upward_closure(fam, m)
    assert fam <= up
    assert upward_closure(up, m) == up
    assert up == {Y for Y in range(1 << m) if any(X & ~Y == 0 for X in fam)}


def test_property_examples():
    full_powerset = NeighborhoodFrame(2, (tuple(range(4)),) * 2)
    assert check_frame_properties(full_powerset).to_json() == \
        {"monotonic": True, "topped": True, "cufi": True}
    empty = NeighborhoodFrame(2, ((), ()))
    assert check_frame_properties(empty).to_json() == \
        {"monotonic": True, "topped": False, "cufi": True}
    bottom_only = NeighborhoodFrame(1, ((0,),))
    assert check_frame_properties(bottom_only).to_json() == \
        {"monotonic": False, "topped": False, "cufi": True}


@pytest.mark.parametrize("m", [1, 2])
def test_pairwise_flags_match_full_definitions(m):
    for Z in enumerate_frames(m):
        p = check_frame_properties(Z)
        assert (p.monotonic, p.topped, p.cufi) == brute_flags(Z)
        assert p.monotonic == all(upward_closure(f, m) == f for f in Z.families)


def test_enumeration_examples():
    assert len(list(enumerate_frames(1))) == 4
    topped = list(enumerate_frames(1, ["topped"]))
    assert len(topped) == 2 and all(1 in Z.families[0] for Z in topped)
    assert list(enumerate_frames(2, budget=0)) == []
    assert len(list(enumerate_frames(2, budget=7))) == 7
    with pytest.raises(FrameError):
        list(enumerate_frames(5))
    with pytest.raises(FrameError):
        list(enumerate_frames(1, ["reflexive"]))


def test_enumeration_order_is_deterministic():
    first = [Z.nbhd for Z in enumerate_frames(2, budget=20)]
    assert first == [Z.nbhd for Z in enumerate_frames(2, budget=20)]
    assert first[0] == ((), ()) and first[1] == ((), (0,))


# class sizes on two worlds: squares of the per-world family counts
# 6 up-sets, 8 topped, 14 cufi, 5 mt, 5 mc, 7 tc, 4 filters out of 16 families
M2_COUNTS = {(): 256, ("monotonic",): 36, ("topped",): 64, ("cufi",): 196,
             ("monotonic", "topped"): 25, ("monotonic", "cufi"): 25,
             ("topped", "cufi"): 49, ("monotonic", "topped", "cufi"): 16}


@pytest.mark.parametrize("flags", list(M2_COUNTS))
def test_enumeration_matches_filtered_brute_force(flags):
    every = [Z for Z in enumerate_frames(2)]
    want = [Z for Z in every if check_frame_properties(Z).satisfies(flags)]
    got = list(enumerate_frames(2, flags))
    assert got == want
    assert len(got) == M2_COUNTS[flags]


def test_homomorphism_examples():
    Z = NeighborhoodFrame(2, ((1, 3), (2,)))
    assert is_frame_homomorphism([0, 1], Z, Z)
    empty2 = NeighborhoodFrame(2, ((), ()))
    empty1 = NeighborhoodFrame(1, ((),))
    assert is_frame_homomorphism([0, 0], empty2, empty1)
    own = NeighborhoodFrame(2, ((1,), (2,)))
    target = NeighborhoodFrame(1, ((1,),))
    assert not is_frame_homomorphism([0, 0], own, target)
    assert not is_frame_homomorphism([0], own, target)
    assert not is_frame_homomorphism([0, 3], own, target)


def test_family_members_decoding():
    assert family_members(0b1010, 2) == (1, 3)
    assert FLAG_NAMES == ("monotonic", "topped", "cufi")
