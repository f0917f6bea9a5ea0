"""Labelled tableau prover for interpretability logics with Horn frame conditions."""

from .formula import BoxAt, Box, Imp, Neg, Rhd, Var, closure_set, parse, render
from .frames import FrameCondition, HornClause, parse_horn, preset
from .labels import Label, extend_r, extend_s, is_strict_prefix, parse_label, root
from .semantics import Model, check_frame, evaluate, extract_model, random_model, verify_hintikka
from .structure import LabelStructure, close
from .tableau import Bounds, ProverResult, Status, apply_rule, prove, run

__version__ = "0.1.0"
