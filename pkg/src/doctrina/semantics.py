"""Finite structures, Tarski evaluation, and countermodel enumeration.

A finite structure interprets function symbols by explicit tables and
predicate symbols by sets of tuples; equality is interpreted as identity.
Formulas-in-context can also be interpreted as sets of assignment tuples,
which is the powerset-doctrine reading of a formula and is what ties the
calculus to set semantics in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .lang import App, Context, CtxMorphism, Signature, Term, Var
from .formula import (
    And,
    Bot,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaInContext,
    Imp,
    Not,
    Or,
    Pred,
    Top,
)
from .calculus import Sequent


class SemanticsError(Exception):
    pass


@dataclass
class FiniteStructure:
    carrier: tuple
    functions: dict[str, dict[tuple, object]] = field(default_factory=dict)
    predicates: dict[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if not self.carrier:
            for name, table in self.functions.items():
                if () in table:
                    raise SemanticsError(
                        f"constant {name} cannot be interpreted in the empty structure"
                    )

    def pred(self, name: str) -> frozenset:
        if name not in self.predicates:
            raise SemanticsError(f"predicate {name} has no interpretation")
        return self.predicates[name]

    def describe(self) -> str:
        bits = [f"carrier={list(self.carrier)}"]
        for name in sorted(self.functions):
            bits.append(f"{name}={dict(sorted(self.functions[name].items(), key=repr))}")
        for name in sorted(self.predicates):
            bits.append(f"{name}={sorted(self.predicates[name], key=repr)}")
        return "; ".join(bits)


def eval_term(t: Term, m: FiniteStructure, assignment: dict[str, object]):
    if isinstance(t, Var):
        if t.name not in assignment:
            raise SemanticsError(f"variable {t.name} unassigned")
        return assignment[t.name]
    assert isinstance(t, App)
    args = tuple(eval_term(a, m, assignment) for a in t.args)
    table = m.functions.get(t.symbol)
    if table is None or args not in table:
        raise SemanticsError(f"function {t.symbol} undefined at {args}")
    return table[args]


def eval_in_structure(phi, m: FiniteStructure, assignment: Optional[dict] = None) -> bool:
    """Tarski semantics; quantifiers range over the carrier, so both are
    decided vacuously in the empty structure."""
    if isinstance(phi, FormulaInContext):
        phi = phi.formula
    assignment = assignment or {}
    if isinstance(phi, Pred):
        args = tuple(eval_term(t, m, assignment) for t in phi.args)
        return args in m.pred(phi.name)
    if isinstance(phi, Eq):
        return eval_term(phi.left, m, assignment) == eval_term(phi.right, m, assignment)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not eval_in_structure(phi.body, m, assignment)
    if isinstance(phi, And):
        return eval_in_structure(phi.left, m, assignment) and eval_in_structure(phi.right, m, assignment)
    if isinstance(phi, Or):
        return eval_in_structure(phi.left, m, assignment) or eval_in_structure(phi.right, m, assignment)
    if isinstance(phi, Imp):
        return (not eval_in_structure(phi.left, m, assignment)) or eval_in_structure(
            phi.right, m, assignment
        )
    if isinstance(phi, Forall):
        return all(
            eval_in_structure(phi.body, m, {**assignment, phi.var: e}) for e in m.carrier
        )
    if isinstance(phi, Exists):
        return any(
            eval_in_structure(phi.body, m, {**assignment, phi.var: e}) for e in m.carrier
        )
    raise SemanticsError(f"not a formula: {phi!r}")


def interpret_tuples(fic: FormulaInContext, m: FiniteStructure) -> frozenset[tuple]:
    """The powerset-doctrine interpretation: the set of context assignments
    (as tuples, in context order) satisfying the formula."""
    ctx = fic.context
    out = []
    for values in itertools.product(m.carrier, repeat=len(ctx)):
        if eval_in_structure(fic.formula, m, dict(zip(ctx.vars, values))):
            out.append(values)
    return frozenset(out)


def reindex_tuples(
    f: CtxMorphism, m: FiniteStructure, subset: frozenset[tuple]
) -> frozenset[tuple]:
    """Preimage along the map induced by a tuple of terms: the reindexing of
    the powerset doctrine."""
    out = []
    for values in itertools.product(m.carrier, repeat=len(f.source)):
        assignment = dict(zip(f.source.vars, values))
        image = tuple(eval_term(t, m, assignment) for t in f.components)
        if image in subset:
            out.append(values)
    return frozenset(out)


def sequent_valid_in_structure(s: Sequent, m: FiniteStructure) -> bool:
    """True when every assignment satisfying all antecedents satisfies some
    succedent."""
    for values in itertools.product(m.carrier, repeat=len(s.context)):
        assignment = dict(zip(s.context.vars, values))
        if all(eval_in_structure(a, m, assignment) for a in s.antecedent) and not any(
            eval_in_structure(b, m, assignment) for b in s.succedent
        ):
            return False
    return True


def falsifying_assignment(s: Sequent, m: FiniteStructure) -> Optional[dict]:
    for values in itertools.product(m.carrier, repeat=len(s.context)):
        assignment = dict(zip(s.context.vars, values))
        if all(eval_in_structure(a, m, assignment) for a in s.antecedent) and not any(
            eval_in_structure(b, m, assignment) for b in s.succedent
        ):
            return assignment
    return None


def enumerate_structures(
    signature: Signature,
    size: int,
    predicates: Optional[list[tuple[str, int]]] = None,
) -> Iterator[FiniteStructure]:
    """All structures with carrier {0, .., k-1} for k <= size, in a fixed
    order (smaller carriers first, interpretations lexicographic).  The
    empty carrier is included unless the signature has constants.
    `predicates` restricts/extends the interpreted predicate symbols, which
    matters for signatures with infinite predicate families."""
    preds = list(signature.predicates) if predicates is None else list(predicates)
    funcs = list(signature.functions)
    start = 0 if not signature.constants() else 1
    for k in range(start, size + 1):
        carrier = tuple(range(k))
        fn_choices = []
        for name, arity in funcs:
            domain = list(itertools.product(carrier, repeat=arity))
            tables = [
                dict(zip(domain, images))
                for images in itertools.product(carrier, repeat=len(domain))
            ]
            if not tables:
                tables = [{}]
            fn_choices.append((name, tables))
        pr_choices = []
        for name, arity in preds:
            domain = list(itertools.product(carrier, repeat=arity))
            subsets = [
                frozenset(t for t, keep in zip(domain, bits) if keep)
                for bits in itertools.product((False, True), repeat=len(domain))
            ]
            pr_choices.append((name, subsets))
        for fn_pick in itertools.product(*(tables for _, tables in fn_choices)):
            for pr_pick in itertools.product(*(subsets for _, subsets in pr_choices)):
                yield FiniteStructure(
                    carrier,
                    {name: table for (name, _), table in zip(fn_choices, fn_pick)},
                    {name: s for (name, _), s in zip(pr_choices, pr_pick)},
                )


def countermodel_search(
    s: Sequent,
    axioms: Iterable[Formula],
    signature: Signature,
    size: int,
    predicates: Optional[list[tuple[str, int]]] = None,
) -> Optional[tuple[FiniteStructure, dict]]:
    """First structure (in enumeration order) satisfying the bounded axiom
    set and falsifying the sequent, with a falsifying assignment."""
    axioms = list(axioms)
    for m in enumerate_structures(signature, size, predicates):
        if not all(eval_in_structure(ax, m, {}) for ax in axioms):
            continue
        assignment = falsifying_assignment(s, m)
        if assignment is not None:
            return m, assignment
    return None
