"""Formula trees for the conditional language.

The core connectives are ~, ->, and the conditional =>; everything else
(&, |, (+), (*), (-), <->, T, F, and the graded operators J/I) is
definable from the core and can be expanded away by normalize(). The
graded operator J{a} is the exact-value test "the argument has value a";
I{a} is the threshold test "the argument has value at least a". mk_J and
mk_I build core-level formulas realising those tests on a given chain,
so the operators add no expressive power, only convenience.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Formula",
    "Var",
    "Top",
    "Bot",
    "Not",
    "Imp",
    "Cond",
    "And",
    "Or",
    "OPlus",
    "OTimes",
    "OMinus",
    "Iff",
    "J",
    "I",
    "RESERVED_VAR",
    "UnrepresentableIndexError",
    "children",
    "free_vars",
    "subformula_closure",
    "imp_chain",
    "strong_product",
    "strong_sum",
    "mk_J",
    "mk_I",
    "normalize",
    "index_numerator",
]

# Target of Top/Bot expansion. Starts with an underscore, which the
# tokenizer rejects, so user input can never collide with it.
RESERVED_VAR = "_t"


class UnrepresentableIndexError(ValueError):
    """A J/I index does not lie on the chain for the requested scale."""


class Formula:
    """Base class for formula nodes; all concrete nodes are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Cond(Formula):
    """The conditional; left is the antecedent, right the consequent."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class OPlus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class OTimes(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class OMinus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


def _check_index(index: Fraction) -> None:
    if not 0 <= index <= 1:
        raise ValueError(f"graded operator index {index} outside [0, 1]")


@dataclass(frozen=True)
class J(Formula):
    """Exact-value test: value 1 where the child has value index, else 0."""

    index: Fraction
    child: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", Fraction(self.index))
        _check_index(self.index)


@dataclass(frozen=True)
class I(Formula):
    """Threshold test: value 1 where the child has value >= index, else 0."""

    index: Fraction
    child: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", Fraction(self.index))
        _check_index(self.index)


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (Var, Top, Bot)):
        return ()
    if isinstance(phi, Not):
        return (phi.child,)
    if isinstance(phi, (J, I)):
        return (phi.child,)
    return (phi.left, phi.right)  # type: ignore[attr-defined]


def free_vars(phi: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        else:
            stack.extend(children(node))
    return frozenset(out)


def subformula_closure(phi: Formula) -> list[Formula]:
    """All subformulas of phi, deduplicated, in post-order of first occurrence."""
    seen: set[Formula] = set()
    order: list[Formula] = []

    def visit(node: Formula) -> None:
        if node in seen:
            return
        for child in children(node):
            visit(child)
        seen.add(node)
        order.append(node)

    visit(phi)
    return order


def imp_chain(antecedents: Sequence[Formula], psi: Formula) -> Formula:
    """Nested implication with the last antecedent outermost.

    imp_chain([a1, a2], b) is a2 -> (a1 -> b); an empty antecedent list
    gives back psi itself.
    """
    out = psi
    for phi in antecedents:
        out = Imp(phi, out)
    return out


def strong_product(phis: Sequence[Formula]) -> Formula:
    """Left-associated (*) over one or more operands."""
    if not phis:
        raise ValueError("strong product needs at least one operand")
    out = phis[0]
    for phi in phis[1:]:
        out = OTimes(out, phi)
    return out


def strong_sum(phis: Sequence[Formula]) -> Formula:
    """Left-associated (+) over one or more operands."""
    if not phis:
        raise ValueError("strong sum needs at least one operand")
    out = phis[0]
    for phi in phis[1:]:
        out = OPlus(out, phi)
    return out


def index_numerator(index: Fraction | int, scale: int) -> int:
    """Numerator of index on the scale-element chain; rejects off-chain values."""
    as_num = Fraction(index) * (scale - 1)
    if not 0 <= Fraction(index) <= 1 or as_num.denominator != 1:
        raise UnrepresentableIndexError(
            f"index {index} is not on the {scale}-element chain"
        )
    return int(as_num)


# Core-level builders used by the J construction. These expand the
# derived connective immediately instead of emitting an And/Or/... node.


def _odot_core(x: Formula, y: Formula) -> Formula:
    return Not(Imp(x, Not(y)))


def _or_core(x: Formula, y: Formula) -> Formula:
    return Imp(Imp(x, y), y)


def _and_core(x: Formula, y: Formula) -> Formula:
    return Not(_or_core(Not(x), Not(y)))


def _iff_core(x: Formula, y: Formula) -> Formula:
    return _and_core(Imp(x, y), Imp(y, x))


def _product_core(phi: Formula, n: int) -> Formula:
    out = phi
    for _ in range(n - 1):
        out = _odot_core(out, phi)
    return out


def mk_J(a: Fraction | int, phi: Formula, m: int) -> Formula:
    """Core formula with value 1 where phi has value a, and 0 elsewhere.

    The construction recurses on the index: a = 1 is the (m-1)-fold strong
    product; a < 1/2 reduces to the complementary index on ~phi; for
    1/2 <= a < 1 let n be the largest k with k*(1-a) < 1 and either
    (when n = a/(1-a) exactly) close out via the index-1 test of
    ~(phi (*) ... (*) phi) <-> phi, or recurse at the strictly larger
    index n*(1-a). Each step raises the numerator, so it terminates.
    """
    a = Fraction(a)
    k = index_numerator(a, m)
    if k == m - 1:
        return _product_core(phi, m - 1)
    if 2 * k < m - 1:
        return mk_J(1 - a, Not(phi), m)
    n = (m - 2) // ((m - 1) - k)
    if n == a / (1 - a):
        return mk_J(Fraction(1), _iff_core(Not(_product_core(phi, n)), phi), m)
    return mk_J(n * (1 - a), Not(_product_core(phi, n)), m)


def mk_I(a: Fraction | int, phi: Formula, m: int) -> Formula:
    """Disjunction of the exact-value tests for every chain value >= a.

    Left-associated, ascending; the threshold a itself is included, so
    the result has value 1 exactly where phi has value at least a.
    """
    a = Fraction(a)
    k = index_numerator(a, m)
    parts = [mk_J(Fraction(i, m - 1), phi, m) for i in range(k, m)]
    out = parts[0]
    for part in parts[1:]:
        out = Or(out, part)
    return out


def normalize(phi: Formula, m: int) -> Formula:
    """Expand every derived connective; the result uses only Var, Not, Imp, Cond.

    Top becomes p -> p and Bot its negation, over the reserved variable.
    J/I expand through mk_J/mk_I for the given chain, so the result (and
    hence normalize's idempotence) depends on m.
    """
    if isinstance(phi, Var):
        return phi
    if isinstance(phi, Top):
        return Imp(Var(RESERVED_VAR), Var(RESERVED_VAR))
    if isinstance(phi, Bot):
        return Not(Imp(Var(RESERVED_VAR), Var(RESERVED_VAR)))
    if isinstance(phi, Not):
        return Not(normalize(phi.child, m))
    if isinstance(phi, Imp):
        return Imp(normalize(phi.left, m), normalize(phi.right, m))
    if isinstance(phi, Cond):
        return Cond(normalize(phi.left, m), normalize(phi.right, m))
    if isinstance(phi, Or):
        left, right = normalize(phi.left, m), normalize(phi.right, m)
        return Imp(Imp(left, right), right)
    if isinstance(phi, And):
        return normalize(Not(Or(Not(phi.left), Not(phi.right))), m)
    if isinstance(phi, OPlus):
        return Imp(Not(normalize(phi.left, m)), normalize(phi.right, m))
    if isinstance(phi, OTimes):
        return Not(Imp(normalize(phi.left, m), Not(normalize(phi.right, m))))
    if isinstance(phi, OMinus):
        return normalize(OTimes(phi.left, Not(phi.right)), m)
    if isinstance(phi, Iff):
        return normalize(And(Imp(phi.left, phi.right), Imp(phi.right, phi.left)), m)
    if isinstance(phi, J):
        return normalize(mk_J(phi.index, phi.child, m), m)
    if isinstance(phi, I):
        return normalize(mk_I(phi.index, phi.child, m), m)
    raise TypeError(f"not a formula node: {phi!r}")
