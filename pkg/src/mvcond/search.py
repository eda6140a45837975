"""Decision procedures at desk scale.

is_L_tautology decides truth-table validity on the m-valued chain by
exhaustive valuation, optionally abstracting conditional subformulas to
fresh shared atoms first. countermodel_search enumerates finite models
in a canonical order (world count ascending; valuations in ascending
lexicographic numerator order over sorted variables; relation matrices
row-major with entries descending from 1), so a given query always
returns the same countermodel. A "none" outcome certifies only that no
model within the given bounds refutes the formula.

filtrate quotients a model by agreement on a subformula-closed set,
taking the pointwise supremum of relation entries across classes, and
check_preservation verifies value agreement formula by formula.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .semantics import (
    Evaluator,
    KripkeModel,
    Matrix,
    Proposition,
    check_fid,
)
from .syntax import (
    And,
    Bot,
    Cond,
    Formula,
    I,
    Iff,
    Imp,
    J,
    Not,
    OMinus,
    OPlus,
    OTimes,
    Or,
    Top,
    Var,
    children,
    free_vars,
    index_numerator,
)
from .truthvalues import (
    TruthValue,
    chain,
    tv_imp,
    tv_join,
    tv_meet,
    tv_neg,
    tv_odot,
    tv_ominus,
    tv_oplus,
)

__all__ = [
    "SearchError",
    "ConditionalPresentError",
    "SigmaNotClosedError",
    "SearchBounds",
    "SearchOutcome",
    "Discrepancy",
    "value_under",
    "abstract_conditionals",
    "falsifying_assignment",
    "is_L_tautology",
    "countermodel_search",
    "filtrate",
    "check_preservation",
    "random_model",
]


class SearchError(ValueError):
    """A search request outside what the enumeration supports."""


class ConditionalPresentError(ValueError):
    """Truth-table evaluation reached a conditional; abstraction was off."""


class SigmaNotClosedError(ValueError):
    """The formula set handed to filtrate is not closed under subformulas."""


def value_under(phi: Formula, env: Mapping[str, TruthValue], m: int) -> TruthValue:
    """Truth-table value of a conditional-free formula under an assignment."""
    if isinstance(phi, Var):
        value = env.get(phi.name)
        if value is None:
            raise ValueError(f"assignment has no value for {phi.name!r}")
        return value
    if isinstance(phi, Top):
        return TruthValue.top(m)
    if isinstance(phi, Bot):
        return TruthValue.bottom(m)
    if isinstance(phi, Not):
        return tv_neg(value_under(phi.child, env, m))
    if isinstance(phi, Cond):
        raise ConditionalPresentError(
            "formula contains a conditional; abstract it first"
        )
    if isinstance(phi, J):
        hit = value_under(phi.child, env, m).numerator == index_numerator(phi.index, m)
        return TruthValue.top(m) if hit else TruthValue.bottom(m)
    if isinstance(phi, I):
        hit = value_under(phi.child, env, m).numerator >= index_numerator(phi.index, m)
        return TruthValue.top(m) if hit else TruthValue.bottom(m)
    left = value_under(phi.left, env, m)  # type: ignore[attr-defined]
    right = value_under(phi.right, env, m)  # type: ignore[attr-defined]
    if isinstance(phi, Imp):
        return tv_imp(left, right)
    if isinstance(phi, And):
        return tv_meet(left, right)
    if isinstance(phi, Or):
        return tv_join(left, right)
    if isinstance(phi, OPlus):
        return tv_oplus(left, right)
    if isinstance(phi, OTimes):
        return tv_odot(left, right)
    if isinstance(phi, OMinus):
        return tv_ominus(left, right)
    if isinstance(phi, Iff):
        return tv_meet(tv_imp(left, right), tv_imp(right, left))
    raise TypeError(f"not a formula node: {phi!r}")


def abstract_conditionals(phi: Formula) -> tuple[Formula, dict[Formula, Var]]:
    """Replace each maximal conditional subformula with a fresh shared atom.

    Structurally equal conditionals share one atom; fresh names _c0,
    _c1, ... cannot collide with parseable variables. Returns the
    rewritten formula and the conditional-to-atom mapping.
    """
    mapping: dict[Formula, Var] = {}

    def walk(node: Formula) -> Formula:
        if isinstance(node, Cond):
            var = mapping.get(node)
            if var is None:
                var = Var(f"_c{len(mapping)}")
                mapping[node] = var
            return var
        if isinstance(node, (Var, Top, Bot)):
            return node
        if isinstance(node, Not):
            return Not(walk(node.child))
        if isinstance(node, J):
            return J(node.index, walk(node.child))
        if isinstance(node, I):
            return I(node.index, walk(node.child))
        return type(node)(walk(node.left), walk(node.right))  # type: ignore[attr-defined]

    return walk(phi), mapping


def _contains_cond(phi: Formula) -> bool:
    if isinstance(phi, Cond):
        return True
    return any(_contains_cond(child) for child in children(phi))


def falsifying_assignment(
    phi: Formula, m: int, abstract: bool = False
) -> dict[str, TruthValue] | None:
    """First assignment (ascending lexicographic order over sorted
    variables) giving a non-designated value, or None."""
    if abstract:
        phi, _ = abstract_conditionals(phi)
    elif _contains_cond(phi):
        raise ConditionalPresentError(
            "formula contains a conditional; enable abstraction"
        )
    names = sorted(free_vars(phi))
    values = chain(m)
    for combo in product(values, repeat=len(names)):
        env = dict(zip(names, combo))
        if not value_under(phi, env, m).is_designated:
            return env
    return None


def is_L_tautology(phi: Formula, m: int, abstract_conditionals: bool = False) -> bool:
    """True when phi evaluates designated under every chain assignment."""
    return falsifying_assignment(phi, m, abstract=abstract_conditionals) is None


@dataclass(frozen=True)
class SearchBounds:
    """Limits for countermodel enumeration.

    relation_values restricts matrix entries to the given numerators
    (None means the full chain); max_candidates is a step budget counted
    in fully built candidate models.
    """

    max_worlds: int = 2
    relation_values: tuple[int, ...] | None = None
    max_candidates: int | None = None

    def __post_init__(self) -> None:
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")
        if self.relation_values is not None and not self.relation_values:
            raise ValueError("relation_values must be non-empty when given")
        if self.max_candidates is not None and self.max_candidates < 0:
            raise ValueError("max_candidates must be non-negative")


@dataclass
class SearchOutcome:
    """found is (model, witness world) or None; exhausted means the step
    budget ran out with candidates still unexplored."""

    found: tuple[KripkeModel, str] | None
    value: TruthValue | None
    exhausted: bool
    candidates: int


def _cond_depth(phi: Formula) -> int:
    deepest = max((_cond_depth(child) for child in children(phi)), default=0)
    return deepest + (1 if isinstance(phi, Cond) else 0)


def _cond_subformulas(phi: Formula) -> list[Cond]:
    seen: set[Formula] = set()
    out: list[Cond] = []

    def visit(node: Formula) -> None:
        if isinstance(node, Cond) and node not in seen:
            seen.add(node)
            out.append(node)
        for child in children(node):
            visit(child)

    visit(phi)
    return out


def _prop_key(prop: Proposition, index: Mapping[str, int]):
    return tuple(tuple(index[w] for w in cell) for cell in prop.cells)


def _relation_candidates(
    model: KripkeModel,
    conds: Sequence[Cond],
    values_desc: Sequence[TruthValue],
    rounds_left: int = 6,
):
    """Yield models with relations assigned for every antecedent proposition.

    Antecedent propositions are recomputed per candidate: an antecedent
    containing a conditional may denote a different proposition once the
    inner relation is fixed, so newly appearing propositions get their
    own enumeration round until a fixed point is reached.
    """
    ev = Evaluator(model)
    fresh: list[Proposition] = []
    seen: set[Proposition] = set(model.relations)
    for cond in conds:
        prop = ev.proposition(cond.left)
        if prop not in seen:
            seen.add(prop)
            fresh.append(prop)
    if not fresh:
        yield model
        return
    if rounds_left == 0:
        raise SearchError("relation assignment did not stabilize")
    index = model.world_index()
    fresh.sort(key=lambda prop: _prop_key(prop, index))
    n = len(model.worlds)
    cells = n * n
    for combo in product(values_desc, repeat=cells * len(fresh)):
        relations = dict(model.relations)
        for k, prop in enumerate(fresh):
            chunk = combo[k * cells : (k + 1) * cells]
            relations[prop] = tuple(
                tuple(chunk[i * n + j] for j in range(n)) for i in range(n)
            )
        candidate = KripkeModel(
            m=model.m,
            worlds=model.worlds,
            vars=model.vars,
            valuation=model.valuation,
            relations=relations,
            default_policy=model.default_policy,
        )
        yield from _relation_candidates(candidate, conds, values_desc, rounds_left - 1)


def countermodel_search(
    phi: Formula,
    m: int,
    bounds: SearchBounds | None = None,
    require_fid: bool = False,
) -> SearchOutcome:
    """Enumerate models up to the bounds, returning the first refutation.

    Relations are assigned exactly for the antecedent propositions the
    formula mentions; everything else falls to the constant-0 default.
    With require_fid, candidates violating the identity frame condition
    are skipped (they still count against the budget).
    """
    if bounds is None:
        bounds = SearchBounds()
    if _cond_depth(phi) > 3:
        raise SearchError("conditional nesting deeper than 3 is not supported")
    conds = _cond_subformulas(phi)
    names = tuple(sorted(free_vars(phi)))
    if bounds.relation_values is None:
        values_desc = [TruthValue(i, m) for i in range(m - 1, -1, -1)]
    else:
        numerators = sorted(set(bounds.relation_values), reverse=True)
        for numerator in numerators:
            if not 0 <= numerator <= m - 1:
                raise ValueError(
                    f"relation value numerator {numerator} not in [0, {m - 1}]"
                )
        values_desc = [TruthValue(i, m) for i in numerators]
    count = 0
    for n in range(1, bounds.max_worlds + 1):
        worlds = tuple(f"w{i}" for i in range(n))
        for assignment in product(range(m), repeat=n * len(names)):
            valuation = {
                v: {
                    w: TruthValue(assignment[vi * n + wi], m)
                    for wi, w in enumerate(worlds)
                }
                for vi, v in enumerate(names)
            }
            base = KripkeModel(
                m=m,
                worlds=worlds,
                vars=names,
                valuation=valuation,
                relations={},
                default_policy=TruthValue.bottom(m),
            )
            for candidate in _relation_candidates(base, conds, values_desc):
                if (
                    bounds.max_candidates is not None
                    and count >= bounds.max_candidates
                ):
                    return SearchOutcome(None, None, True, count)
                count += 1
                if require_fid and check_fid(candidate):
                    continue
                hit = Evaluator(candidate).failing_world(phi)
                if hit is not None:
                    return SearchOutcome((candidate, hit[0]), hit[1], False, count)
    return SearchOutcome(None, None, False, count)


@dataclass(frozen=True)
class Discrepancy:
    """A formula whose value differs between a model and its quotient."""

    formula: Formula
    world: str
    value_original: TruthValue
    value_quotient: TruthValue


def filtrate(
    model: KripkeModel, sigma: Sequence[Formula]
) -> tuple[KripkeModel, dict[str, str]]:
    """Quotient the model by agreement on a subformula-closed set.

    Worlds agreeing on every member of sigma collapse to one class
    (id "c<k>" where k is the index of the class's first world in the
    model's order); quotient relation entries are the supremum across
    class members; the quotient keeps the model's default policy.
    Returns the quotient and the world-to-class map.
    """
    ordered: list[Formula] = []
    seen_formulas: set[Formula] = set()
    for phi in sigma:
        if phi not in seen_formulas:
            seen_formulas.add(phi)
            ordered.append(phi)
    if not ordered:
        raise SigmaNotClosedError("sigma must be non-empty")
    for phi in ordered:
        for child in children(phi):
            if child not in seen_formulas:
                raise SigmaNotClosedError(
                    "sigma is not closed under subformulas: "
                    f"missing a direct subformula of {phi!r}"
                )

    ev = Evaluator(model)
    signatures = {
        w: tuple(ev.value(w, phi).numerator for phi in ordered)
        for w in model.worlds
    }
    class_of: dict[tuple[int, ...], str] = {}
    members: dict[str, list[str]] = {}
    class_ids: list[str] = []
    class_map: dict[str, str] = {}
    for i, w in enumerate(model.worlds):
        sig = signatures[w]
        cid = class_of.get(sig)
        if cid is None:
            cid = f"c{i}"
            class_of[sig] = cid
            class_ids.append(cid)
            members[cid] = []
        members[cid].append(w)
        class_map[w] = cid
    reps = {cid: members[cid][0] for cid in class_ids}

    names = sorted({name for phi in ordered for name in free_vars(phi)})
    valuation = {
        v: {cid: ev.value(reps[cid], Var(v)) for cid in class_ids} for v in names
    }

    index = model.world_index()
    relations: dict[Proposition, Matrix] = {}
    handled: set[Proposition] = set()
    antecedents = [phi.left for phi in ordered if isinstance(phi, Cond)]
    for alpha in antecedents:
        prop = ev.proposition(alpha)
        if prop in handled:
            continue
        handled.add(prop)
        matrix = model.relations.get(prop)
        if matrix is None:
            continue  # default policy covers it in the quotient too
        cells: list[list[str]] = [[] for _ in range(model.m)]
        for cid in class_ids:
            cells[ev.value(reps[cid], alpha).numerator].append(cid)
        quotient_prop = Proposition(tuple(tuple(cell) for cell in cells))
        rows = []
        for xc in class_ids:
            row = []
            for yc in class_ids:
                best = TruthValue.bottom(model.m)
                for x in members[xc]:
                    for y in members[yc]:
                        best = tv_join(best, matrix[index[x]][index[y]])
                row.append(best)
            rows.append(tuple(row))
        relations[quotient_prop] = tuple(rows)

    quotient = KripkeModel(
        m=model.m,
        worlds=tuple(class_ids),
        vars=tuple(names),
        valuation=valuation,
        relations=relations,
        default_policy=model.default_policy,
    )
    return quotient, class_map


def check_preservation(
    model: KripkeModel,
    quotient: KripkeModel,
    class_map: Mapping[str, str],
    sigma: Sequence[Formula],
) -> list[Discrepancy]:
    """Every sigma formula must take the same value at a world and its class."""
    ev_model = Evaluator(model)
    ev_quotient = Evaluator(quotient)
    out: list[Discrepancy] = []
    for phi in sigma:
        for w in model.worlds:
            original = ev_model.value(w, phi)
            mapped = ev_quotient.value(class_map[w], phi)
            if original.numerator != mapped.numerator:
                out.append(Discrepancy(phi, w, original, mapped))
    return out


def random_model(
    seed: int,
    m: int,
    n_worlds: int,
    var_names: Sequence[str],
    n_extra_relations: int = 0,
) -> KripkeModel:
    """Seeded random model; equal arguments give an identical model.

    Relations are stored for each variable's proposition plus
    n_extra_relations random partitions (a repeated partition replaces
    the earlier matrix); the default policy is the constant 0.
    """
    rng = random.Random(seed)
    worlds = tuple(f"w{i}" for i in range(n_worlds))
    names = tuple(var_names)
    valuation = {
        v: {w: TruthValue(rng.randrange(m), m) for w in worlds} for v in names
    }
    skeleton = KripkeModel(
        m=m,
        worlds=worlds,
        vars=names,
        valuation=valuation,
        relations={},
        default_policy=TruthValue.bottom(m),
    )
    ev = Evaluator(skeleton)

    def matrix() -> Matrix:
        return tuple(
            tuple(TruthValue(rng.randrange(m), m) for _ in worlds) for _ in worlds
        )

    relations: dict[Proposition, Matrix] = {}
    for v in names:
        relations[ev.proposition(Var(v))] = matrix()
    for _ in range(n_extra_relations):
        assigned = [rng.randrange(m) for _ in worlds]
        cells: list[list[str]] = [[] for _ in range(m)]
        for w, value in zip(worlds, assigned):
            cells[value].append(w)
        prop = Proposition(tuple(tuple(cell) for cell in cells))
        relations[prop] = matrix()
    return KripkeModel(
        m=m,
        worlds=worlds,
        vars=names,
        valuation=valuation,
        relations=relations,
        default_policy=TruthValue.bottom(m),
    )
