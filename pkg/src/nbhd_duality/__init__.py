"""Neighborhood frames, modal algebras, their duality, and a decision
procedure for the eight congruential logic classes."""

from .algebra import (FiniteModalAlgebra, Filter, MeetFamilySet, check_algebra_properties,
                      enumerate_prime_filters, is_q_filter, q_filters, separate)
from .duality import EmbeddingReport, build_J, build_Jbar, build_K, stone_map
from .epsets import EPSet, ParametricFamily
from .frames import NeighborhoodFrame, check_frame_properties, enumerate_frames
from .lab import (LogicClass, Verdict, bf_countermodel, decide_valid, find_countermodel,
                  lindenbaum_fragment, model_existence, omega_bf_countermodel)
from .semantics import PredicateModel, PropositionalModel, eval_pred, eval_prop, frame_valid
from .syntax import parse, to_text

__all__ = [
    "FiniteModalAlgebra", "Filter", "MeetFamilySet", "check_algebra_properties",
    "enumerate_prime_filters", "is_q_filter", "q_filters", "separate",
    "EmbeddingReport", "build_J", "build_Jbar", "build_K", "stone_map",
    "EPSet", "ParametricFamily",
    "NeighborhoodFrame", "check_frame_properties", "enumerate_frames",
    "LogicClass", "Verdict", "bf_countermodel", "decide_valid", "find_countermodel",
    "lindenbaum_fragment", "model_existence", "omega_bf_countermodel",
    "PredicateModel", "PropositionalModel", "eval_pred", "eval_prop", "frame_valid",
    "parse", "to_text",
]
