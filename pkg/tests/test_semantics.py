import itertools

import pytest
from hypothesis import given, settings, strategies as st

from nbhd_duality import syntax as sx
from nbhd_duality.errors import AssignmentError, FrameError, LanguageError
from nbhd_duality.frames import NeighborhoodFrame, check_frame_properties, enumerate_frames
from nbhd_duality.semantics import (
    PredicateModel,
    PropositionalModel,
    class_valid,
    eval_pred,
    eval_prop,
    frame_valid,
    model_valid,
)
from nbhd_duality.syntax import And, Box, Diamond, Forall, Implies, Not, Or, Pred, Prop, Top

M_AXIOM = sx.parse("[](p & q) -> []p & []q")
N_AXIOM = sx.parse("[]T")
C_AXIOM = sx.parse("[]p & []q -> [](p & q)")


def frames_st(max_worlds=3):
    def build(m, codes):
        return NeighborhoodFrame.from_family_codes(m, codes[:m])
    return st.integers(1, max_worlds).flatmap(
        lambda m: st.lists(st.integers(0, (1 << (1 << m)) - 1), min_size=m, max_size=m)
        .map(lambda codes: build(m, codes)))


@st.composite
def prop_models(draw):
    Z = draw(frames_st())
    val = {a: draw(st.integers(0, Z.full)) for a in ("p", "q")}
    return PropositionalModel(Z, val)


prop_formulas = st.recursive(
    st.sampled_from([Prop("p"), Prop("q"), Top(), sx.Bot()]),
    lambda c: st.one_of(st.builds(Not, c), st.builds(Box, c), st.builds(Diamond, c),
                        st.builds(lambda a, b: And((a, b)), c, c),
                        st.builds(lambda a, b: Or((a, b)), c, c),
                        st.builds(Implies, c, c), st.builds(sx.Iff, c, c)),
    max_leaves=8)


def oracle_truth(M, phi):
    """World-by-world evaluation of the desugared formula over Python sets."""
    Z = M.frame
    worlds = set(Z.worlds)

    def code(S):
        return sum(1 << w for w in S)

    def ev(psi):
        if isinstance(psi, Prop):
            return {w for w in worlds if M.valuation.get(psi.name, 0) >> w & 1}
        if isinstance(psi, Top):
            return set(worlds)
        if isinstance(psi, sx.Bot):
            return set()
        if isinstance(psi, Not):
            return worlds - ev(psi.sub)
        if isinstance(psi, And):
            out = set(worlds)
            for x in psi.items:
                out &= ev(x)
            return out
        if isinstance(psi, Box):
            X = code(ev(psi.sub))
            return {w for w in worlds if X in Z.nbhd[w]}
        raise AssertionError(psi)

    return code(ev(sx.desugar(phi)))


def test_prop_examples():
    topped = NeighborhoodFrame(2, ((3,), (1, 3)))
    M = PropositionalModel(topped, {})
    assert eval_prop(M, Top()) == 3
    assert eval_prop(M, N_AXIOM) == 3
    one = NeighborhoodFrame(1, ((0,),))
    assert eval_prop(PropositionalModel(one, {"p": 0}), sx.parse("[]p")) == 1


def test_unknown_atoms_are_false_and_predicates_rejected():
    M = PropositionalModel(NeighborhoodFrame(1, ((0,),)), {})
    assert eval_prop(M, sx.parse("[]zz")) == 1
    with pytest.raises(LanguageError):
        eval_prop(M, sx.parse("P(x)"))
    with pytest.raises(LanguageError):
        eval_prop(M, sx.parse("/\\ i. p_i"))


def test_valuation_range_checked():
    with pytest.raises(FrameError):
        PropositionalModel(NeighborhoodFrame(1, ((),)), {"p": 2})


@settings(max_examples=300)
@given(prop_models(), prop_formulas)
def test_eval_prop_matches_pointwise_oracle(M, phi):
    assert eval_prop(M, phi) == oracle_truth(M, phi)


def test_m_axiom_refuted_on_bottom_frame():
    Z = NeighborhoodFrame(1, ((0,),))
    M = PropositionalModel(Z, {"p": 1, "q": 0})
    assert not model_valid(M, sx.parse("[](p & q) -> []p"))
    assert not frame_valid(Z, M_AXIOM)


@pytest.mark.parametrize("m", [1, 2])
def test_soundness_of_axioms_on_their_classes(m):
    for Z in enumerate_frames(m):
        flags = check_frame_properties(Z).flags()
        if "monotonic" in flags:
            assert frame_valid(Z, M_AXIOM)
        if "topped" in flags:
            assert frame_valid(Z, N_AXIOM)
        if "cufi" in flags:
            assert frame_valid(Z, C_AXIOM)
    assert class_valid(enumerate_frames(m, ["topped"]), N_AXIOM)
    assert not class_valid(enumerate_frames(m), N_AXIOM)
    assert class_valid(enumerate_frames(m), Top())


@given(prop_models(), prop_formulas, prop_formulas)
def test_congruence_pointwise(M, phi, psi):
    if eval_prop(M, phi) == eval_prop(M, psi):
        assert eval_prop(M, Box(phi)) == eval_prop(M, Box(psi))


def test_json_round_trips():
    M = PropositionalModel(NeighborhoodFrame(2, ((0, 1), ())), {"p": 2})
    assert PropositionalModel.from_json(M.to_json()) == M
    P = PredicateModel(NeighborhoodFrame(1, ((1,),)), 2, {(0, "P"): frozenset({(0,), (1,)})})
    assert PredicateModel.from_json(P.to_json()).interp == P.interp


# predicate semantics

def one_world(interp, d=2, nbhd=((1,),)):
    return PredicateModel(NeighborhoodFrame(1, nbhd), d, interp)


def test_pred_examples():
    M = one_world({(0, "P"): frozenset({(0,)})}, d=1)
    assert eval_pred(M, {"x": 0}, sx.parse("P(x)")) == 1
    M = one_world({(0, "P"): frozenset({(0,), (1,)})})
    assert eval_pred(M, {}, sx.parse("A x. P(x)")) == 1
    closed = sx.parse("A x. [] P(x) -> E y. P(y)")
    assert eval_pred(M, {"z": 0}, closed) == eval_pred(M, {"z": 1}, closed)


def test_pred_errors():
    M = one_world({(0, "P"): frozenset({(0,)})})
    with pytest.raises(AssignmentError, match="free variables"):
        eval_pred(M, {}, sx.parse("P(x)"))
    with pytest.raises(AssignmentError, match="arity"):
        eval_pred(M, {"x": 0, "y": 1}, sx.parse("P(x, y)"))
    with pytest.raises(AssignmentError):
        eval_pred(M, {"x": 5}, sx.parse("P(x)"))
    with pytest.raises(FrameError):
        one_world({(0, "P"): frozenset({(0,), (0, 1)})})
    with pytest.raises(FrameError):
        one_world({(3, "P"): frozenset()})


pred_bodies = st.recursive(
    st.builds(Pred, st.just("P"), st.tuples(st.sampled_from(["x", "y", "z"]))),
    lambda c: st.one_of(st.builds(Not, c), st.builds(Box, c),
                        st.builds(lambda a, b: And((a, b)), c, c),
                        st.builds(Forall, st.sampled_from(["x", "y"]), c),
                        st.builds(sx.Exists, st.sampled_from(["x", "y"]), c)),
    max_leaves=6)


@st.composite
def pred_models(draw):
    m = draw(st.integers(1, 2))
    Z = NeighborhoodFrame.from_family_codes(
        m, [draw(st.integers(0, (1 << (1 << m)) - 1)) for _ in range(m)])
    d = 2
    interp = {(c, "P"): frozenset((e,) for e in range(d) if draw(st.booleans()))
              for c in range(m)}
    return PredicateModel(Z, d, interp)


@settings(max_examples=200)
@given(pred_models(), pred_bodies, st.sampled_from(["x", "y", "z"]), st.sampled_from(["x", "y", "z"]),
       st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)))
def test_substitution_matches_updated_assignment(M, phi, x, y, values):
    A = dict(zip(["x", "y", "z"], values))
    updated = {**A, x: A[y]}
    assert eval_pred(M, A, sx.substitute(phi, x, y)) == eval_pred(M, updated, phi)


@settings(max_examples=200)
@given(pred_models(), pred_bodies, st.tuples(*[st.integers(0, 1)] * 6))
def test_free_variable_irrelevance(M, phi, values):
    A = dict(zip(["x", "y", "z"], values[:3]))
    B = dict(zip(["x", "y", "z"], values[3:]))
    for v in sx.free_vars(phi):
        B[v] = A[v]
    assert eval_pred(M, A, phi) == eval_pred(M, B, phi)


def test_predicate_frame_validity_is_bounded_and_detects_barcan_failure_needs_infinity():
    bf = sx.parse("(A x. []P(x)) -> []A x. P(x)")
    # on finite domains the formula holds on cufi frames; no small countermodel exists
    for Z in enumerate_frames(1, ["cufi"]):
        assert frame_valid(Z, bf, max_domain=2)
    # on a non-cufi frame it fails already with two elements
    Z = NeighborhoodFrame(2, ((1, 2), (1, 2)))
    assert not frame_valid(Z, bf, max_domain=2)
