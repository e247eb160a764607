"""Synchronisation problems for pushdown automata with an observable stack."""
from .errors import (
    BudgetExceeded, CapExceeded, InvalidSubset, MalformedTree, NotAnApsRunOfAP,
    NotDeterministic, NotEnabled, NotNormalized, ParseError, PdsyncError, PullBackFailure,
    ValidationError,
)
from .pda import Pda, PseudoConfig, Rule, complete, is_deterministic, obs_classes, succ
from .witness import (
    HomingWord, Node, SuperSynchroniser, Synchroniser, check_witness, deserialize_tree,
    serialize_tree,
)
from .aps import Aps, ApsRule, Nps, NpsRule, aps_emptiness, build_aps, nondet_special_sync
from .sparse import det_special_sync, enumerate_structured, prestar, sparse_empty
from .reductions import ProblemInstance, pull_back_witness
from .formats import load_instance, parse_instance
from .pipeline import decide

__version__ = "0.1.0"
