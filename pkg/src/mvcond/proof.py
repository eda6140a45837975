"""Hilbert-style derivation checking for the conditional calculus.

A derivation is a numbered list of lines, each carrying a formula and a
justification: a premise reference, a chain tautology (decided by truth
table with conditionals abstracted), an axiom schema, or a rule
application citing earlier lines. The congruence rules RCEA/RCEC and
the graded rules Ra/RaGen are, by default, restricted to lines that do
not depend on premises, since they preserve theoremhood rather than
consequence; pass rules_on_premises=True to lift the restriction.

Rule and axiom matching is structural. rule_eq treats T as p -> p over
the reserved variable (and F as its negation), so constant spelling
never blocks a match; nothing else is normalized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .parser import ParseError, parse, print_formula
from .search import falsifying_assignment
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
    Top,
    Var,
    RESERVED_VAR,
    UnrepresentableIndexError,
    imp_chain,
)
from .truthvalues import TruthValue, tv_odot

__all__ = [
    "Premise",
    "LTaut",
    "Ax",
    "MP",
    "RCEA",
    "RCEC",
    "Ra",
    "RaGen",
    "Line",
    "Derivation",
    "LineError",
    "Verdict",
    "DerivationFormatError",
    "rule_eq",
    "match_axiom",
    "check_line",
    "check_derivation",
    "derivation_from_json",
    "load_derivation",
]


class DerivationFormatError(ValueError):
    """A derivation document is structurally malformed."""


@dataclass(frozen=True)
class Premise:
    index: int  # 1-based into the premise list


@dataclass(frozen=True)
class LTaut:
    pass


@dataclass(frozen=True)
class Ax:
    name: str  # A1, A2, A3, or LID


@dataclass(frozen=True)
class MP:
    i: int  # line holding phi
    j: int  # line holding phi -> psi


@dataclass(frozen=True)
class RCEA:
    i: int  # line holding an equivalence between antecedents


@dataclass(frozen=True)
class RCEC:
    i: int  # line holding an equivalence between consequents


@dataclass(frozen=True)
class Ra:
    """Graded rule at threshold a: exactly m premise lines, one per
    chain value b in descending order."""

    a: Fraction
    phi: Formula
    gammas: tuple[Formula, ...]
    gamma: Formula
    premise_lines: tuple[int, ...]


@dataclass(frozen=True)
class RaGen:
    """Generalized graded rule: thresholds a_list over formulas chis,
    still one premise line per chain value b in descending order."""

    a: Fraction
    a_list: tuple[Fraction, ...]
    phi: Formula
    chis: tuple[Formula, ...]
    chi: Formula
    premise_lines: tuple[int, ...]


Justification = Union[Premise, LTaut, Ax, MP, RCEA, RCEC, Ra, RaGen]


@dataclass(frozen=True)
class Line:
    formula: Formula
    rule: Justification


@dataclass(frozen=True)
class Derivation:
    m: int
    premises: tuple[Formula, ...]
    lines: tuple[Line, ...]


@dataclass(frozen=True)
class LineError:
    line: int  # 1-based
    rule: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line} ({self.rule}): {self.message}"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    line: int | None = None
    message: str | None = None


_RESERVED = Var(RESERVED_VAR)


def _expand_constants(phi: Formula) -> Formula:
    if isinstance(phi, Top):
        return Imp(_RESERVED, _RESERVED)
    if isinstance(phi, Bot):
        return Not(Imp(_RESERVED, _RESERVED))
    if isinstance(phi, (Var,)):
        return phi
    if isinstance(phi, Not):
        return Not(_expand_constants(phi.child))
    if isinstance(phi, J):
        return J(phi.index, _expand_constants(phi.child))
    if isinstance(phi, I):
        return I(phi.index, _expand_constants(phi.child))
    return type(phi)(
        _expand_constants(phi.left), _expand_constants(phi.right)  # type: ignore[attr-defined]
    )


def rule_eq(x: Formula, y: Formula) -> bool:
    """Structural equality modulo the spelling of T and F."""
    return _expand_constants(x) == _expand_constants(y)


def _match_a1(phi: Formula) -> bool:
    # (a => (b & c)) -> ((a => b) & (a => c))
    if not isinstance(phi, Imp):
        return False
    left, right = phi.left, phi.right
    if not (isinstance(left, Cond) and isinstance(left.right, And)):
        return False
    if not (
        isinstance(right, And)
        and isinstance(right.left, Cond)
        and isinstance(right.right, Cond)
    ):
        return False
    a, b, c = left.left, left.right.left, left.right.right
    return (
        right.left.left == a
        and right.left.right == b
        and right.right.left == a
        and right.right.right == c
    )


def _match_a2(phi: Formula) -> bool:
    # ((a => b) & (a => c)) -> (a => (b & c))
    if not isinstance(phi, Imp):
        return False
    left, right = phi.left, phi.right
    if not (
        isinstance(left, And)
        and isinstance(left.left, Cond)
        and isinstance(left.right, Cond)
    ):
        return False
    if not (isinstance(right, Cond) and isinstance(right.right, And)):
        return False
    a, b, c = left.left.left, left.left.right, left.right.right
    return (
        left.right.left == a
        and right.left == a
        and right.right.left == b
        and right.right.right == c
    )


def _match_a3(phi: Formula) -> bool:
    # a => T, with T the constant node
    return isinstance(phi, Cond) and isinstance(phi.right, Top)


def _match_lid(phi: Formula) -> bool:
    # a => a
    return isinstance(phi, Cond) and phi.left == phi.right


_SCHEMAS = [("A1", _match_a1), ("A2", _match_a2), ("A3", _match_a3)]


def match_axiom(phi: Formula, allow_lid: bool = False) -> str | None:
    """Name of the first axiom schema phi instantiates, if any."""
    for name, matcher in _SCHEMAS:
        if matcher(phi):
            return name
    if allow_lid and _match_lid(phi):
        return "LID"
    return None


def _odot_fraction(a: Fraction, b: Fraction, m: int) -> Fraction:
    left = TruthValue.from_fraction(a, m)
    right = TruthValue.from_fraction(b, m)
    return tv_odot(left, right).as_fraction()


def _chain_fractions_desc(m: int) -> list[Fraction]:
    return [Fraction(m - 1 - t, m - 1) for t in range(m)]


def _graded_premise(
    m: int,
    a: Fraction,
    b: Fraction,
    thresholds: Sequence[Fraction],
    parts: Sequence[Formula],
    target: Formula,
) -> Formula:
    antecedents = [
        I(_odot_fraction(threshold, b, m), part)
        for threshold, part in zip(thresholds, parts)
    ]
    return imp_chain(antecedents, I(_odot_fraction(a, b, m), target))


def _graded_conclusion(
    a: Fraction,
    phi: Formula,
    thresholds: Sequence[Fraction],
    parts: Sequence[Formula],
    target: Formula,
) -> Formula:
    antecedents = [
        I(threshold, Cond(phi, part))
        for threshold, part in zip(thresholds, parts)
    ]
    return imp_chain(antecedents, I(a, Cond(phi, target)))


def _cited_lines(rule: Justification) -> tuple[int, ...]:
    if isinstance(rule, MP):
        return (rule.i, rule.j)
    if isinstance(rule, (RCEA, RCEC)):
        return (rule.i,)
    if isinstance(rule, (Ra, RaGen)):
        return rule.premise_lines
    return ()


def _rule_name(rule: Justification) -> str:
    if isinstance(rule, Ax):
        return rule.name
    return type(rule).__name__


def _premise_dependence(derivation: Derivation) -> list[bool]:
    """dependent[k] is True when line k+1 transitively cites a premise.

    Citations out of range count as independent here; check_line
    rejects them with a proper error before dependence matters.
    """
    dependent: list[bool] = []
    for k, line in enumerate(derivation.lines):
        if isinstance(line.rule, Premise):
            dependent.append(True)
            continue
        cited = _cited_lines(line.rule)
        dependent.append(
            any(1 <= c <= k and dependent[c - 1] for c in cited)
        )
    return dependent


def _check_thresholds_on_chain(
    values: Sequence[Fraction], m: int
) -> str | None:
    for value in values:
        try:
            TruthValue.from_fraction(value, m)
        except ValueError:
            return f"threshold {value} is not on the {m}-element chain"
    return None


def check_line(
    derivation: Derivation, index: int, rules_on_premises: bool = False
) -> LineError | None:
    """Check the 1-based line index; None means the line is in order."""
    if not 1 <= index <= len(derivation.lines):
        raise IndexError(f"no line {index}")
    line = derivation.lines[index - 1]
    rule = line.rule
    name = _rule_name(rule)
    m = derivation.m

    def err(message: str) -> LineError:
        return LineError(index, name, message)

    for cited in _cited_lines(rule):
        if not 1 <= cited < index:
            return err(
                f"cites line {cited}, which does not precede line {index}"
            )

    if not rules_on_premises and isinstance(rule, (RCEA, RCEC, Ra, RaGen)):
        dependent = _premise_dependence(derivation)
        for cited in _cited_lines(rule):
            if dependent[cited - 1]:
                return err(
                    f"applies only to premise-independent lines, but line "
                    f"{cited} depends on a premise"
                )

    if isinstance(rule, Premise):
        if not 1 <= rule.index <= len(derivation.premises):
            return err(f"no premise {rule.index}")
        expected = derivation.premises[rule.index - 1]
        if not rule_eq(line.formula, expected):
            return err(
                f"expected {print_formula(expected)}, "
                f"found {print_formula(line.formula)}"
            )
        return None

    if isinstance(rule, LTaut):
        try:
            witness = falsifying_assignment(line.formula, m, abstract=True)
        except UnrepresentableIndexError as exc:
            return err(str(exc))
        if witness is not None:
            shown = ", ".join(
                f"{v}={witness[v].text()}" for v in sorted(witness)
            )
            return err(f"not a chain tautology; falsified by {shown}")
        return None

    if isinstance(rule, Ax):
        matchers = {
            "A1": _match_a1,
            "A2": _match_a2,
            "A3": _match_a3,
            "LID": _match_lid,
        }
        matcher = matchers.get(rule.name)
        if matcher is None:
            return err(f"unknown axiom {rule.name!r}")
        if not matcher(line.formula):
            return err(
                f"{print_formula(line.formula)} does not instantiate {rule.name}"
            )
        return None

    if isinstance(rule, MP):
        minor = derivation.lines[rule.i - 1].formula
        major = derivation.lines[rule.j - 1].formula
        expected = Imp(minor, line.formula)
        if not rule_eq(major, expected):
            return err(
                f"line {rule.j} is {print_formula(major)}, "
                f"expected {print_formula(expected)}"
            )
        return None

    if isinstance(rule, (RCEA, RCEC)):
        cited = derivation.lines[rule.i - 1].formula
        if not isinstance(cited, Iff):
            return err(
                f"line {rule.i} is {print_formula(cited)}, "
                "expected an equivalence"
            )
        if not isinstance(line.formula, Iff) or not (
            isinstance(line.formula.left, Cond)
            and isinstance(line.formula.right, Cond)
        ):
            return err(
                f"{print_formula(line.formula)} is not an equivalence "
                "of conditionals"
            )
        first, second = line.formula.left, line.formula.right
        if isinstance(rule, RCEA):
            pattern_ok = (
                rule_eq(first.left, cited.left)
                and rule_eq(second.left, cited.right)
                and rule_eq(first.right, second.right)
            )
        else:
            pattern_ok = (
                rule_eq(first.right, cited.left)
                and rule_eq(second.right, cited.right)
                and rule_eq(first.left, second.left)
            )
        if not pattern_ok:
            return err(
                f"{print_formula(line.formula)} does not follow from "
                f"{print_formula(cited)} by {name}"
            )
        return None

    if isinstance(rule, Ra):
        if len(rule.gammas) != m:
            return err(f"needs exactly {m} indexed formulas, got {len(rule.gammas)}")
        if len(rule.premise_lines) != m:
            return err(
                f"needs exactly {m} premise lines, got {len(rule.premise_lines)}"
            )
        thresholds = [Fraction(m - i, m - 1) for i in range(1, m + 1)]
        problem = _check_thresholds_on_chain([rule.a], m)
        if problem:
            return err(problem)
        for t, b in enumerate(_chain_fractions_desc(m)):
            cited = derivation.lines[rule.premise_lines[t] - 1].formula
            expected = _graded_premise(
                m, rule.a, b, thresholds, rule.gammas, rule.gamma
            )
            if not rule_eq(cited, expected):
                return err(
                    f"premise for b={b} (line {rule.premise_lines[t]}) is "
                    f"{print_formula(cited)}, expected {print_formula(expected)}"
                )
        expected = _graded_conclusion(
            rule.a, rule.phi, thresholds, rule.gammas, rule.gamma
        )
        if not rule_eq(line.formula, expected):
            return err(
                f"conclusion is {print_formula(line.formula)}, "
                f"expected {print_formula(expected)}"
            )
        return None

    if isinstance(rule, RaGen):
        if len(rule.a_list) != len(rule.chis):
            return err(
                f"{len(rule.a_list)} thresholds for {len(rule.chis)} formulas"
            )
        if len(rule.premise_lines) != m:
            return err(
                f"needs exactly {m} premise lines, got {len(rule.premise_lines)}"
            )
        problem = _check_thresholds_on_chain([rule.a, *rule.a_list], m)
        if problem:
            return err(problem)
        for t, b in enumerate(_chain_fractions_desc(m)):
            cited = derivation.lines[rule.premise_lines[t] - 1].formula
            expected = _graded_premise(
                m, rule.a, b, rule.a_list, rule.chis, rule.chi
            )
            if not rule_eq(cited, expected):
                return err(
                    f"premise for b={b} (line {rule.premise_lines[t]}) is "
                    f"{print_formula(cited)}, expected {print_formula(expected)}"
                )
        expected = _graded_conclusion(
            rule.a, rule.phi, rule.a_list, rule.chis, rule.chi
        )
        if not rule_eq(line.formula, expected):
            return err(
                f"conclusion is {print_formula(line.formula)}, "
                f"expected {print_formula(expected)}"
            )
        return None

    return err(f"unknown rule {rule!r}")


def check_derivation(
    derivation: Derivation, goal: Formula, rules_on_premises: bool = False
) -> Verdict:
    """Accept when every line checks and the last line equals the goal."""
    if not derivation.lines:
        return Verdict(False, None, "derivation has no lines")
    for index in range(1, len(derivation.lines) + 1):
        problem = check_line(derivation, index, rules_on_premises)
        if problem is not None:
            return Verdict(False, problem.line, str(problem))
    last = derivation.lines[-1].formula
    if last != goal:
        return Verdict(
            False,
            len(derivation.lines),
            f"final line is {print_formula(last)}, which is not the goal "
            f"{print_formula(goal)}",
        )
    return Verdict(True)


def _parse_formula(text: object, where: str) -> Formula:
    if not isinstance(text, str):
        raise DerivationFormatError(f"{where}: formula must be a string")
    try:
        return parse(text)
    except ParseError as exc:
        raise DerivationFormatError(f"{where}: {exc}") from None


def _parse_fraction(raw: object, where: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise DerivationFormatError(f"{where}: threshold must be a string or int")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise DerivationFormatError(f"{where}: {exc}") from None


def _parse_int_list(raw: object, where: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in raw
    ):
        raise DerivationFormatError(f"{where}: expected a list of integers")
    return tuple(raw)


def _justification_from_json(
    rule_name: object, args: dict, where: str
) -> Justification:
    if rule_name == "Premise":
        index = args.get("index")
        if not isinstance(index, int) or isinstance(index, bool):
            raise DerivationFormatError(f"{where}: Premise needs integer 'index'")
        return Premise(index)
    if rule_name == "LTaut":
        return LTaut()
    if rule_name in ("A1", "A2", "A3", "LID"):
        return Ax(rule_name)
    if rule_name == "MP":
        i, j = args.get("i"), args.get("j")
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (i, j)):
            raise DerivationFormatError(f"{where}: MP needs integer 'i' and 'j'")
        return MP(i, j)
    if rule_name in ("RCEA", "RCEC"):
        i = args.get("i")
        if not isinstance(i, int) or isinstance(i, bool):
            raise DerivationFormatError(f"{where}: {rule_name} needs integer 'i'")
        return (RCEA if rule_name == "RCEA" else RCEC)(i)
    if rule_name == "Ra":
        gammas_raw = args.get("gammas")
        if not isinstance(gammas_raw, list):
            raise DerivationFormatError(f"{where}: Ra needs a list 'gammas'")
        return Ra(
            a=_parse_fraction(args.get("a"), where),
            phi=_parse_formula(args.get("phi"), where),
            gammas=tuple(
                _parse_formula(g, f"{where} gamma {k+1}")
                for k, g in enumerate(gammas_raw)
            ),
            gamma=_parse_formula(args.get("gamma"), where),
            premise_lines=_parse_int_list(args.get("premise_lines"), where),
        )
    if rule_name == "RaGen":
        chis_raw = args.get("chis")
        a_list_raw = args.get("a_list")
        if not isinstance(chis_raw, list) or not isinstance(a_list_raw, list):
            raise DerivationFormatError(
                f"{where}: RaGen needs lists 'chis' and 'a_list'"
            )
        return RaGen(
            a=_parse_fraction(args.get("a"), where),
            a_list=tuple(
                _parse_fraction(x, f"{where} a_list {k+1}")
                for k, x in enumerate(a_list_raw)
            ),
            phi=_parse_formula(args.get("phi"), where),
            chis=tuple(
                _parse_formula(c, f"{where} chi {k+1}")
                for k, c in enumerate(chis_raw)
            ),
            chi=_parse_formula(args.get("chi"), where),
            premise_lines=_parse_int_list(args.get("premise_lines"), where),
        )
    raise DerivationFormatError(f"{where}: unknown rule {rule_name!r}")


def derivation_from_json(data: object) -> Derivation:
    if not isinstance(data, dict):
        raise DerivationFormatError("top level must be an object")
    m = data.get("m")
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise DerivationFormatError("'m' must be an integer >= 2")
    premises_raw = data.get("premises", [])
    if not isinstance(premises_raw, list):
        raise DerivationFormatError("'premises' must be a list")
    premises = tuple(
        _parse_formula(p, f"premise {k+1}") for k, p in enumerate(premises_raw)
    )
    lines_raw = data.get("lines")
    if not isinstance(lines_raw, list):
        raise DerivationFormatError("'lines' must be a list")
    lines = []
    for k, entry in enumerate(lines_raw):
        where = f"line {k+1}"
        if not isinstance(entry, dict):
            raise DerivationFormatError(f"{where}: must be an object")
        formula = _parse_formula(entry.get("formula"), where)
        args = entry.get("args", {})
        if not isinstance(args, dict):
            raise DerivationFormatError(f"{where}: 'args' must be an object")
        rule = _justification_from_json(entry.get("rule"), args, where)
        lines.append(Line(formula, rule))
    return Derivation(m=m, premises=premises, lines=tuple(lines))


def load_derivation(path: str) -> Derivation:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DerivationFormatError(f"bad derivation document: {exc}") from None
    return derivation_from_json(data)
