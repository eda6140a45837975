"""Possible-worlds models over the m-valued chain and their evaluator.

A proposition is the m-tuple of world sets a formula induces: cell i
holds the worlds where the formula has value i/(m-1). Accessibility
relations are keyed by proposition, not by formula, so two formulas with
the same denotation share a relation by construction. The conditional
phi => psi evaluates at x to the meet over all worlds y of
R(x,y) -> value(psi, y), where R is the relation keyed by phi's
proposition; a missing relation either raises (default policy "error")
or falls back to a constant from the chain.

Models are treated as immutable once built; mutating one invalidates
any Evaluator already holding it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

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
    RESERVED_VAR,
    Top,
    Var,
    index_numerator,
)
from .truthvalues import (
    TruthValue,
    tv_imp,
    tv_join,
    tv_meet,
    tv_neg,
    tv_odot,
    tv_ominus,
    tv_oplus,
)

__all__ = [
    "Proposition",
    "KripkeModel",
    "Matrix",
    "ModelError",
    "UndeclaredVariableError",
    "MissingRelationError",
    "UnknownWorldError",
    "ModelFormatError",
    "FidViolation",
    "Evaluator",
    "eval_formula",
    "proposition_of",
    "valid_in_model",
    "entails_in_model",
    "check_fid",
    "validate_model",
    "model_to_json",
    "model_from_json",
    "load_model",
    "save_model",
]


class ModelError(ValueError):
    """Base class for evaluation-time model errors."""


class UndeclaredVariableError(ModelError):
    pass


class MissingRelationError(ModelError):
    pass


class UnknownWorldError(ModelError):
    pass


class ModelFormatError(ValueError):
    """A model document is structurally malformed or fails validation."""


@dataclass(frozen=True)
class Proposition:
    """m cells of world ids; cell i holds the worlds with value i/(m-1).

    Cells keep ids in the owning model's world order, so structurally
    equal propositions denote the same partition.
    """

    cells: tuple[tuple[str, ...], ...]

    @property
    def scale(self) -> int:
        return len(self.cells)


Matrix = tuple[tuple[TruthValue, ...], ...]


@dataclass
class KripkeModel:
    """A finite model: worlds, an exact valuation, and keyed relations.

    default_policy None means a lookup of an unkeyed proposition raises
    MissingRelationError; a TruthValue means every absent relation is
    that constant.
    """

    m: int
    worlds: tuple[str, ...]
    vars: tuple[str, ...]
    valuation: dict[str, dict[str, TruthValue]]
    relations: dict[Proposition, Matrix]
    default_policy: TruthValue | None = None

    def world_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}


@dataclass(frozen=True)
class FidViolation:
    """A relation entry exceeding what the target world's cell permits."""

    prop: Proposition
    source: str
    target: str
    degree: TruthValue
    target_cell: int | None  # 1-based cell of target, None if in no cell


class Evaluator:
    """Evaluates formulas in one model, caching per (world, formula).

    The cache makes repeated antecedent lookups cheap when one formula
    is evaluated at every world; build a fresh Evaluator after any
    change to the model.
    """

    def __init__(self, model: KripkeModel):
        self.model = model
        self._index = model.world_index()
        self._values: dict[tuple[str, Formula], TruthValue] = {}
        self._props: dict[Formula, Proposition] = {}

    def value(self, world: str, phi: Formula) -> TruthValue:
        if world not in self._index:
            raise UnknownWorldError(f"unknown world {world!r}")
        key = (world, phi)
        cached = self._values.get(key)
        if cached is not None:
            return cached
        result = self._compute(world, phi)
        self._values[key] = result
        return result

    def _relation_entry(self, prop: Proposition, xi: int, yi: int) -> TruthValue:
        matrix = self.model.relations.get(prop)
        if matrix is not None:
            return matrix[xi][yi]
        if self.model.default_policy is None:
            raise MissingRelationError(
                "no relation stored for antecedent proposition and "
                "default policy is 'error'"
            )
        return self.model.default_policy

    def _compute(self, world: str, phi: Formula) -> TruthValue:
        m = self.model.m
        if isinstance(phi, Var):
            if phi.name == RESERVED_VAR:
                # only reachable through constant expansion, where the
                # surrounding _t -> _t makes the value irrelevant
                return TruthValue.bottom(m)
            per_world = self.model.valuation.get(phi.name)
            if per_world is None or world not in per_world:
                raise UndeclaredVariableError(
                    f"variable {phi.name!r} has no value at world {world!r}"
                )
            return per_world[world]
        if isinstance(phi, Top):
            return TruthValue.top(m)
        if isinstance(phi, Bot):
            return TruthValue.bottom(m)
        if isinstance(phi, Not):
            return tv_neg(self.value(world, phi.child))
        if isinstance(phi, Imp):
            return tv_imp(self.value(world, phi.left), self.value(world, phi.right))
        if isinstance(phi, And):
            return tv_meet(self.value(world, phi.left), self.value(world, phi.right))
        if isinstance(phi, Or):
            return tv_join(self.value(world, phi.left), self.value(world, phi.right))
        if isinstance(phi, OPlus):
            return tv_oplus(self.value(world, phi.left), self.value(world, phi.right))
        if isinstance(phi, OTimes):
            return tv_odot(self.value(world, phi.left), self.value(world, phi.right))
        if isinstance(phi, OMinus):
            return tv_ominus(self.value(world, phi.left), self.value(world, phi.right))
        if isinstance(phi, Iff):
            left = self.value(world, phi.left)
            right = self.value(world, phi.right)
            return tv_meet(tv_imp(left, right), tv_imp(right, left))
        if isinstance(phi, J):
            k = index_numerator(phi.index, m)
            hit = self.value(world, phi.child).numerator == k
            return TruthValue.top(m) if hit else TruthValue.bottom(m)
        if isinstance(phi, I):
            k = index_numerator(phi.index, m)
            hit = self.value(world, phi.child).numerator >= k
            return TruthValue.top(m) if hit else TruthValue.bottom(m)
        if isinstance(phi, Cond):
            prop = self.proposition(phi.left)
            xi = self._index[world]
            result = TruthValue.top(m)
            for yi, y in enumerate(self.model.worlds):
                entry = self._relation_entry(prop, xi, yi)
                result = tv_meet(result, tv_imp(entry, self.value(y, phi.right)))
            return result
        raise TypeError(f"not a formula node: {phi!r}")

    def proposition(self, phi: Formula) -> Proposition:
        cached = self._props.get(phi)
        if cached is not None:
            return cached
        cells: list[list[str]] = [[] for _ in range(self.model.m)]
        for w in self.model.worlds:
            cells[self.value(w, phi).numerator].append(w)
        prop = Proposition(tuple(tuple(cell) for cell in cells))
        self._props[phi] = prop
        return prop

    def failing_world(self, phi: Formula) -> tuple[str, TruthValue] | None:
        """First world (in model order) where phi is not designated."""
        for w in self.model.worlds:
            v = self.value(w, phi)
            if not v.is_designated:
                return w, v
        return None

    def entailment_witness(
        self, sigma: Iterable[Formula], phi: Formula
    ) -> tuple[str, TruthValue] | None:
        """First world where every member of sigma is designated but phi is not."""
        sigma = list(sigma)
        for w in self.model.worlds:
            if all(self.value(w, psi).is_designated for psi in sigma):
                v = self.value(w, phi)
                if not v.is_designated:
                    return w, v
        return None


def eval_formula(model: KripkeModel, world: str, phi: Formula) -> TruthValue:
    return Evaluator(model).value(world, phi)


def proposition_of(model: KripkeModel, phi: Formula) -> Proposition:
    return Evaluator(model).proposition(phi)


def valid_in_model(model: KripkeModel, phi: Formula) -> bool:
    return Evaluator(model).failing_world(phi) is None


def entails_in_model(
    model: KripkeModel, sigma: Iterable[Formula], phi: Formula
) -> bool:
    return Evaluator(model).entailment_witness(sigma, phi) is None


def _prop_sort_key(prop: Proposition, index: Mapping[str, int]):
    return tuple(tuple(index.get(w, len(index)) for w in cell) for cell in prop.cells)


def _sorted_relations(model: KripkeModel) -> list[tuple[Proposition, Matrix]]:
    index = model.world_index()
    return sorted(model.relations.items(), key=lambda kv: _prop_sort_key(kv[0], index))


def check_fid(model: KripkeModel) -> list[FidViolation]:
    """Violations of the identity frame condition, in canonical order.

    A relation entry of degree (i-1)/(m-1) from x to y demands that y
    lie in cell j of the keying proposition for some j >= i; degree-0
    entries demand nothing.
    """
    violations: list[FidViolation] = []
    for prop, matrix in _sorted_relations(model):
        cell_of: dict[str, int] = {}
        for j, cell in enumerate(prop.cells, start=1):
            for w in cell:
                cell_of.setdefault(w, j)
        for xi, x in enumerate(model.worlds):
            for yi, y in enumerate(model.worlds):
                degree = matrix[xi][yi]
                if degree.numerator == 0:
                    continue
                j = cell_of.get(y)
                if j is None or j < degree.numerator + 1:
                    violations.append(FidViolation(prop, x, y, degree, j))
    return violations


def validate_model(model: KripkeModel) -> list[str]:
    """Structural diagnostics; an empty list means the model is well formed."""
    out: list[str] = []
    if model.m < 2:
        out.append(f"m must be at least 2, got {model.m}")
        return out
    if not model.worlds:
        out.append("model has no worlds")
    if len(set(model.worlds)) != len(model.worlds):
        out.append("duplicate world ids")
    if len(set(model.vars)) != len(model.vars):
        out.append("duplicate variable names")
    world_set = set(model.worlds)
    for v in model.vars:
        per_world = model.valuation.get(v)
        if per_world is None:
            out.append(f"variable {v!r} missing from valuation")
            continue
        for w in model.worlds:
            tv = per_world.get(w)
            if tv is None:
                out.append(f"variable {v!r} has no value at world {w!r}")
            elif tv.scale != model.m:
                out.append(
                    f"variable {v!r} at world {w!r} has scale "
                    f"{tv.scale}, expected {model.m}"
                )
        extra = set(per_world) - world_set
        for w in sorted(extra):
            out.append(f"variable {v!r} valued at unknown world {w!r}")
    for v in sorted(set(model.valuation) - set(model.vars)):
        out.append(f"valuation mentions undeclared variable {v!r}")
    n = len(model.worlds)
    for k, (prop, matrix) in enumerate(_sorted_relations(model)):
        label = f"relation {k}"
        if len(prop.cells) != model.m:
            out.append(
                f"{label}: proposition has {len(prop.cells)} cells, expected {model.m}"
            )
            continue
        seen: set[str] = set()
        for cell in prop.cells:
            for w in cell:
                if w not in world_set:
                    out.append(f"{label}: proposition mentions unknown world {w!r}")
                elif w in seen:
                    out.append(f"{label}: world {w!r} appears in two cells")
                seen.add(w)
        for w in model.worlds:
            if w not in seen:
                out.append(f"{label}: proposition cells do not cover world {w!r}")
        if len(matrix) != n or any(len(row) != n for row in matrix):
            out.append(f"{label}: matrix is not {n}x{n}")
            continue
        for row in matrix:
            for entry in row:
                if entry.scale != model.m:
                    out.append(
                        f"{label}: matrix entry has scale {entry.scale}, "
                        f"expected {model.m}"
                    )
                    break
    if model.default_policy is not None and model.default_policy.scale != model.m:
        out.append(
            f"default policy has scale {model.default_policy.scale}, "
            f"expected {model.m}"
        )
    return out


def model_to_json(model: KripkeModel) -> dict:
    """Deterministic document: relations sorted by proposition, worlds in order."""
    relations = []
    for prop, matrix in _sorted_relations(model):
        relations.append(
            {
                "prop": [list(cell) for cell in prop.cells],
                "matrix": {
                    x: {
                        y: matrix[xi][yi].numerator
                        for yi, y in enumerate(model.worlds)
                    }
                    for xi, x in enumerate(model.worlds)
                },
            }
        )
    policy = (
        "error" if model.default_policy is None else model.default_policy.numerator
    )
    return {
        "m": model.m,
        "worlds": list(model.worlds),
        "vars": list(model.vars),
        "valuation": {
            v: {w: model.valuation[v][w].numerator for w in model.worlds}
            for v in model.vars
        },
        "relations": relations,
        "default_relation": policy,
    }


def _format_error(message: str) -> ModelFormatError:
    return ModelFormatError(f"bad model document: {message}")


def model_from_json(data: object) -> KripkeModel:
    """Build a model from a document; unknown top-level keys are ignored.

    Raises ModelFormatError for structural problems. Partition and
    totality checks live in validate_model, not here.
    """
    if not isinstance(data, dict):
        raise _format_error("top level must be an object")
    try:
        m = data["m"]
        worlds = data["worlds"]
        vars_ = data["vars"]
        valuation = data["valuation"]
        relations = data["relations"]
    except KeyError as missing:
        raise _format_error(f"missing key {missing.args[0]!r}") from None
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise _format_error("'m' must be an integer >= 2")
    if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
        raise _format_error("'worlds' must be a list of strings")
    if not isinstance(vars_, list) or not all(isinstance(v, str) for v in vars_):
        raise _format_error("'vars' must be a list of strings")
    if not isinstance(valuation, dict):
        raise _format_error("'valuation' must be an object")
    if not isinstance(relations, list):
        raise _format_error("'relations' must be a list")

    def to_tv(raw: object, where: str) -> TruthValue:
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise _format_error(f"{where}: numerator must be an integer")
        try:
            return TruthValue(raw, m)
        except ValueError as exc:
            raise _format_error(f"{where}: {exc}") from None

    val: dict[str, dict[str, TruthValue]] = {}
    for v, per_world in valuation.items():
        if not isinstance(per_world, dict):
            raise _format_error(f"valuation of {v!r} must be an object")
        val[v] = {
            w: to_tv(raw, f"valuation of {v!r} at {w!r}")
            for w, raw in per_world.items()
        }

    rels: dict[Proposition, Matrix] = {}
    for k, entry in enumerate(relations):
        if not isinstance(entry, dict) or "prop" not in entry or "matrix" not in entry:
            raise _format_error(f"relation {k} must have 'prop' and 'matrix'")
        cells_raw = entry["prop"]
        if not isinstance(cells_raw, list) or not all(
            isinstance(cell, list) and all(isinstance(w, str) for w in cell)
            for cell in cells_raw
        ):
            raise _format_error(f"relation {k}: 'prop' must be a list of world lists")
        prop = Proposition(tuple(tuple(cell) for cell in cells_raw))
        matrix_raw = entry["matrix"]
        if not isinstance(matrix_raw, dict):
            raise _format_error(f"relation {k}: 'matrix' must be an object")
        rows = []
        for x in worlds:
            row_raw = matrix_raw.get(x)
            if not isinstance(row_raw, dict):
                raise _format_error(f"relation {k}: matrix row for {x!r} missing")
            row = []
            for y in worlds:
                if y not in row_raw:
                    raise _format_error(
                        f"relation {k}: matrix entry {x!r} -> {y!r} missing"
                    )
                row.append(to_tv(row_raw[y], f"relation {k} entry {x!r} -> {y!r}"))
            rows.append(tuple(row))
        rels[prop] = tuple(rows)

    policy_raw = data.get("default_relation", "error")
    if policy_raw == "error":
        policy = None
    else:
        policy = to_tv(policy_raw, "default_relation")

    return KripkeModel(
        m=m,
        worlds=tuple(worlds),
        vars=tuple(vars_),
        valuation=val,
        relations=rels,
        default_policy=policy,
    )


def load_model(path: str) -> KripkeModel:
    """Read, build, and validate; raises ModelFormatError on any defect."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"bad model document: {exc}") from None
    model = model_from_json(data)
    problems = validate_model(model)
    if problems:
        raise ModelFormatError("; ".join(problems))
    return model


def save_model(model: KripkeModel, path: str, extra: dict | None = None) -> None:
    """Write the model document, with optional extra top-level keys."""
    doc = model_to_json(model)
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")
