"""Finite Boolean algebras as powersets of atom sets, elements as bitmasks.

Every finite Boolean algebra is isomorphic to the powerset of its atoms, so
an algebra is just an atom count and an element is an int below 2**n; the
lattice operations are bitwise.  Homomorphisms between powerset algebras are
induced by maps going the other way on atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator


class BoolAlgError(Exception):
    pass


@dataclass(frozen=True)
class BoolAlg:
    atoms: int

    def __post_init__(self):
        if self.atoms < 0:
            raise BoolAlgError("atom count must be >= 0")

    @property
    def top(self) -> int:
        return (1 << self.atoms) - 1

    @property
    def bot(self) -> int:
        return 0

    @property
    def size(self) -> int:
        return 1 << self.atoms

    def elements(self) -> Iterator[int]:
        return iter(range(1 << self.atoms))

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def neg(self, a: int) -> int:
        return self.top & ~a

    def leq(self, a: int, b: int) -> bool:
        return a & ~b == 0

    def imp(self, a: int, b: int) -> int:
        return self.neg(a) | b

    def join_all(self, xs: Iterable[int]) -> int:
        out = 0
        for x in xs:
            out |= x
        return out

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.top
        for x in xs:
            out &= x
        return out


@dataclass(frozen=True)
class BAHom:
    """A Boolean homomorphism between powerset algebras.

    Induced by `atom_map`, which sends each atom of the *target* to an atom
    of the *source*; the homomorphism takes a to the set of target atoms
    whose image lies in a.  Every homomorphism between finite powerset
    algebras arises this way.
    """

    source: BoolAlg
    target: BoolAlg
    atom_map: tuple[int, ...]

    def __post_init__(self):
        if len(self.atom_map) != self.target.atoms:
            raise BoolAlgError("atom_map must assign every atom of the target")
        for i in self.atom_map:
            if not 0 <= i < self.source.atoms:
                raise BoolAlgError(f"atom index {i} out of range")

    def __call__(self, a: int) -> int:
        out = 0
        for j, i in enumerate(self.atom_map):
            if (a >> i) & 1:
                out |= 1 << j
        return out

    def table(self) -> tuple[int, ...]:
        """The homomorphism as an element-indexed lookup table."""
        return tuple(self(a) for a in self.source.elements())

    def compose(self, other: "BAHom") -> "BAHom":
        """self after other (other: A -> B, self: B -> C gives A -> C)."""
        if other.target != self.source:
            raise BoolAlgError("homomorphisms not composable")
        return BAHom(other.source, self.target, tuple(other.atom_map[i] for i in self.atom_map))


def identity_hom(alg: BoolAlg) -> BAHom:
    return BAHom(alg, alg, tuple(range(alg.atoms)))


def is_hom_table(src: BoolAlg, dst: BoolAlg, table) -> list[str]:
    """All Boolean-homomorphism law violations of an element table."""
    out = []
    if len(table) != src.size:
        return [f"table has {len(table)} entries for an algebra of size {src.size}"]
    if table[src.top] != dst.top:
        out.append("top not preserved")
    if table[src.bot] != dst.bot:
        out.append("bottom not preserved")
    for a in src.elements():
        if table[src.neg(a)] != dst.neg(table[a]):
            out.append(f"negation not preserved at {a}")
    for a in src.elements():
        for b in src.elements():
            if table[a & b] != table[a] & table[b]:
                out.append(f"meet not preserved at ({a}, {b})")
            if table[a | b] != table[a] | table[b]:
                out.append(f"join not preserved at ({a}, {b})")
    return out


def right_adjoint_of(src: BoolAlg, dst: BoolAlg, f: Callable[[int], int]) -> tuple[int, ...]:
    """The right adjoint of a join-preserving map f: src -> dst, as a table
    indexed by dst elements: R(b) = join of all a with f(a) <= b."""
    return tuple(src.join_all(a for a in src.elements() if dst.leq(f(a), b)) for b in dst.elements())


def monotone_maps(src: BoolAlg, dst: BoolAlg) -> Iterator[tuple[int, ...]]:
    """All monotone maps src -> dst, as element tables.  Exponential; meant
    for adjoint-uniqueness sweeps on small fibers."""
    elems = list(src.elements())

    def extend(par: list[int]) -> Iterator[tuple[int, ...]]:
        i = len(par)
        if i == len(elems):
            yield tuple(par)
            return
        for v in dst.elements():
            ok = True
            for j in range(i):
                if src.leq(elems[j], elems[i]) and not dst.leq(par[j], v):
                    ok = False
                    break
                if src.leq(elems[i], elems[j]) and not dst.leq(v, par[j]):
                    ok = False
                    break
            if ok:
                par.append(v)
                yield from extend(par)
                par.pop()

    yield from extend([])


def boolean_closure(alg: BoolAlg, seed: Iterable[int]) -> frozenset[int]:
    """The smallest Boolean subalgebra of alg containing `seed`."""
    out = {alg.bot, alg.top} | set(seed)
    frontier = list(out)
    while frontier:
        x = frontier.pop()
        for y in (alg.neg(x),):
            if y not in out:
                out.add(y)
                frontier.append(y)
        for z in list(out):
            for y in (x & z, x | z):
                if y not in out:
                    out.add(y)
                    frontier.append(y)
    return frozenset(out)


def subalgebra_atoms(alg: BoolAlg, members: frozenset[int]) -> list[int]:
    """The atoms (minimal nonzero elements) of a Boolean subalgebra."""
    out = []
    for x in sorted(members):
        if x == 0:
            continue
        if all(y == 0 or y == x or (y & x) != y for y in members):
            out.append(x)
    return out
