"""Many-valued conditional logic toolkit.

Exact evaluation over the m-valued chain, a formula language with
graded operators, possible-worlds models with proposition-keyed
accessibility, bounded countermodel search, filtration, and a
Hilbert-style derivation checker.
"""

from .truthvalues import TruthValue, chain, tv_imp, tv_neg
from .syntax import (
    Formula,
    Var,
    Top,
    Bot,
    Not,
    Imp,
    Cond,
    And,
    Or,
    OPlus,
    OTimes,
    OMinus,
    Iff,
    J,
    I,
    mk_I,
    mk_J,
    normalize,
    subformula_closure,
)
from .parser import ParseError, parse, print_formula
from .semantics import (
    Evaluator,
    KripkeModel,
    Proposition,
    check_fid,
    entails_in_model,
    eval_formula,
    load_model,
    model_from_json,
    model_to_json,
    proposition_of,
    save_model,
    valid_in_model,
    validate_model,
)
from .search import (
    SearchBounds,
    SearchOutcome,
    check_preservation,
    countermodel_search,
    filtrate,
    is_L_tautology,
    random_model,
)
from .proof import (
    Derivation,
    check_derivation,
    check_line,
    load_derivation,
    match_axiom,
)

__version__ = "0.1.0"
