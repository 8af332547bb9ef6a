"""SMILES parsing and writing over a practical organic-chemistry subset.

Supported notation: organic-subset atoms (B C N O P S F Cl Br I), aromatic
lowercase atoms (b c n o p s), bracket atoms with isotope / chirality /
H-count / charge, bond symbols ``- = # : / \\``, ring closures (digits and
``%nn``), branches, and dot-separated components.  Reaction SMILES,
wildcards, atom classes, and quadruple bonds are rejected.

Parsing is total: every input string either yields a ``MolecularGraph`` or
raises a ``SmilesError`` subclass carrying the byte offset of the problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .elements import (
    AROMATIC_BRACKET,
    AROMATIC_ORGANIC,
    ATOMIC_MASS,
    HYDROGEN_MASS,
    KNOWN_ELEMENTS,
    ORGANIC_SUBSET,
    VALENCES,
)
from .errors import (
    AromaticBondError,
    DanglingBond,
    EmptyInput,
    EmptyMolecule,
    InvalidBracketAtom,
    UnbalancedParenthesis,
    UnknownElement,
    UnmatchedRingClosure,
    ValenceError,
)

# Chirality marks
CHI_NONE = 0
CHI_AT = 1       # @
CHI_AT_AT = 2    # @@

# Bond orders
SINGLE = 1
DOUBLE = 2
TRIPLE = 3
AROMATIC = 4

# Bond stereo marks (direction is relative to the bond's endpoint order)
STEREO_NONE = 0
STEREO_UP = 1    # '/'
STEREO_DOWN = 2  # '\'

_BOND_CHAR_ORDER = {"-": SINGLE, "=": DOUBLE, "#": TRIPLE, ":": AROMATIC,
                    "/": SINGLE, "\\": SINGLE}
_BOND_CHAR_STEREO = {"/": STEREO_UP, "\\": STEREO_DOWN}
_ORDER_CHAR = {SINGLE: "-", DOUBLE: "=", TRIPLE: "#", AROMATIC: ":"}


@dataclass(slots=True)
class Atom:
    element: str
    aromatic: bool = False
    formal_charge: int = 0
    explicit_h: int | None = None
    chirality: int = CHI_NONE
    isotope: int = 0
    index: int = 0

    @property
    def is_heavy(self) -> bool:
        return self.element != "H"


@dataclass(slots=True)
class Bond:
    a: int
    b: int
    order: int = SINGLE
    stereo: int = STEREO_NONE

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


@dataclass(slots=True)
class MolecularGraph:
    """Immutable-by-convention molecular graph.

    ``atoms`` are stored in input order; treat graphs as frozen after
    construction so they can be shared freely across worker processes.
    """

    atoms: list[Atom] = field(default_factory=list)
    bonds: list[Bond] = field(default_factory=list)
    source: str = ""
    _adj: list | None = field(default=None, repr=False, compare=False)

    def neighbors(self) -> list[list[tuple[int, int]]]:
        """Adjacency as ``adj[i] = [(neighbor_index, bond_index), ...]``.

        Built lazily and memoised; safe because graphs never change after
        construction.
        """
        if self._adj is None:
            adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
            for bi, bond in enumerate(self.bonds):
                adj[bond.a].append((bond.b, bi))
                adj[bond.b].append((bond.a, bi))
            self._adj = adj
        return self._adj

    def heavy_indices(self) -> list[int]:
        return [a.index for a in self.atoms if a.element != "H"]


def parse_smiles(text: str) -> MolecularGraph:
    """Parse ``text`` into a MolecularGraph or raise a SmilesError."""
    if not text:
        raise EmptyInput("empty SMILES", 0)
    if not text.isascii():
        for off, ch in enumerate(text):
            if ord(ch) > 127:
                raise UnknownElement(f"non-ASCII byte {ch!r}", off)

    atoms: list[Atom] = []
    bonds: list[Bond] = []
    atom_offsets: list[int] = []
    bond_pairs: set[tuple[int, int]] = set()
    # open ring closures: digit -> (atom index, pending order, pending stereo, offset)
    open_rings: dict[int, tuple[int, int, int, int]] = {}
    stack: list[int] = []
    paren_offsets: list[int] = []
    prev = -1
    pend_order = 0      # 0 = no pending bond symbol
    pend_stereo = STEREO_NONE
    pend_offset = -1

    n = len(text)
    i = 0

    def add_bond(a_idx: int, b_idx: int, order: int, stereo: int, offset: int) -> None:
        if a_idx == b_idx:
            raise UnmatchedRingClosure("ring closure bonds an atom to itself", offset)
        key = (a_idx, b_idx) if a_idx < b_idx else (b_idx, a_idx)
        if key in bond_pairs:
            raise UnmatchedRingClosure("duplicate bond between atom pair", offset)
        bond_pairs.add(key)
        if order == 0:
            if atoms[a_idx].aromatic and atoms[b_idx].aromatic:
                order = AROMATIC
            else:
                order = SINGLE
        if order == AROMATIC and not (atoms[a_idx].aromatic and atoms[b_idx].aromatic):
            raise AromaticBondError("aromatic bond on non-aromatic atom", offset)
        bonds.append(Bond(a_idx, b_idx, order, stereo))

    def attach(atom: Atom, offset: int) -> None:
        nonlocal prev, pend_order, pend_stereo
        atom.index = len(atoms)
        atoms.append(atom)
        atom_offsets.append(offset)
        if prev >= 0:
            add_bond(prev, atom.index, pend_order, pend_stereo, offset)
        elif pend_order:
            raise DanglingBond("bond symbol with no preceding atom", pend_offset)
        prev = atom.index
        pend_order = 0
        pend_stereo = STEREO_NONE

    while i < n:
        c = text[i]
        if c == "C":
            if i + 1 < n and text[i + 1] == "l":
                attach(Atom("Cl"), i)
                i += 2
            else:
                attach(Atom("C"), i)
                i += 1
        elif c in "NOPSFI" or c == "B":
            if c == "B" and i + 1 < n and text[i + 1] == "r":
                attach(Atom("Br"), i)
                i += 2
            else:
                attach(Atom(c), i)
                i += 1
        elif c in "bcnops":
            attach(Atom(c.upper(), aromatic=True), i)
            i += 1
        elif c == "(":
            if pend_order:
                raise DanglingBond("bond symbol before branch open", pend_offset)
            if prev < 0:
                raise UnbalancedParenthesis("branch opened before any atom", i)
            stack.append(prev)
            paren_offsets.append(i)
            i += 1
        elif c == ")":
            if pend_order:
                raise DanglingBond("bond symbol before branch close", pend_offset)
            if not stack:
                raise UnbalancedParenthesis("unmatched ')'", i)
            prev = stack.pop()
            paren_offsets.pop()
            i += 1
        elif c in _BOND_CHAR_ORDER:
            if pend_order:
                raise DanglingBond("two bond symbols in a row", i)
            pend_order = _BOND_CHAR_ORDER[c]
            pend_stereo = _BOND_CHAR_STEREO.get(c, STEREO_NONE)
            pend_offset = i
            i += 1
        elif c.isdigit() or c == "%":
            if c == "%":
                if i + 2 >= n or not (text[i + 1].isdigit() and text[i + 2].isdigit()):
                    raise UnmatchedRingClosure("'%' needs two digits", i)
                num = int(text[i + 1 : i + 3])
                width = 3
            else:
                num = int(c)
                width = 1
            if prev < 0:
                raise UnmatchedRingClosure("ring closure before any atom", i)
            if num in open_rings:
                o_atom, o_order, o_stereo, _ = open_rings.pop(num)
                if o_order and pend_order and o_order != pend_order:
                    raise UnmatchedRingClosure("ring closure bond order conflict", i)
                order = pend_order or o_order
                stereo = pend_stereo or o_stereo
                add_bond(o_atom, prev, order, stereo, i)
            else:
                open_rings[num] = (prev, pend_order, pend_stereo, i)
            pend_order = 0
            pend_stereo = STEREO_NONE
            i += width
        elif c == ".":
            if pend_order:
                raise DanglingBond("bond symbol before '.'", pend_offset)
            prev = -1
            i += 1
        elif c == "[":
            atom, i2 = _parse_bracket(text, i)
            attach(atom, i)
            i = i2
        else:
            raise UnknownElement(f"unexpected character {c!r}", i)

    if pend_order:
        raise DanglingBond("bond symbol at end of input", pend_offset)
    if stack:
        raise UnbalancedParenthesis("unclosed '('", paren_offsets[0])
    if open_rings:
        off = min(v[3] for v in open_rings.values())
        raise UnmatchedRingClosure("unclosed ring bond", off)
    if not atoms:
        raise EmptyInput("no atoms in SMILES", 0)

    graph = MolecularGraph(atoms, bonds, text)
    _check_valences(graph, atom_offsets)
    return graph


def _parse_bracket(text: str, start: int) -> tuple[Atom, int]:
    """Parse a bracket atom beginning at ``text[start] == '['``."""
    n = len(text)
    i = start + 1
    isotope = 0
    ndig = 0
    while i < n and text[i].isdigit():
        isotope = isotope * 10 + int(text[i])
        i += 1
        ndig += 1
        if ndig > 3:
            raise InvalidBracketAtom("isotope longer than 3 digits", start)
    if i >= n:
        raise InvalidBracketAtom("unterminated bracket atom", start)

    aromatic = False
    c = text[i]
    if c.islower():
        two = text[i : i + 2]
        if two in AROMATIC_BRACKET:
            symbol = two.capitalize()
            i += 2
        elif c in AROMATIC_ORGANIC:
            symbol = c.upper()
            i += 1
        else:
            raise UnknownElement(f"unknown aromatic symbol {c!r}", i)
        aromatic = True
    elif c.isupper():
        if i + 1 < n and text[i + 1].islower() and text[i : i + 2] in KNOWN_ELEMENTS:
            symbol = text[i : i + 2]
            i += 2
        else:
            symbol = c
            i += 1
        if symbol not in KNOWN_ELEMENTS:
            raise UnknownElement(f"unknown element {symbol!r}", start + 1)
    else:
        raise InvalidBracketAtom(f"expected element symbol, got {c!r}", i)

    chirality = CHI_NONE
    if i < n and text[i] == "@":
        if i + 1 < n and text[i + 1] == "@":
            chirality = CHI_AT_AT
            i += 2
        else:
            chirality = CHI_AT
            i += 1

    hcount = 0
    if i < n and text[i] == "H":
        i += 1
        if i < n and text[i].isdigit():
            hcount = int(text[i])
            i += 1
        else:
            hcount = 1

    charge = 0
    if i < n and text[i] in "+-":
        sign = 1 if text[i] == "+" else -1
        mark = text[i]
        i += 1
        if i < n and text[i].isdigit():
            charge = sign * int(text[i])
            i += 1
        else:
            charge = sign
            while i < n and text[i] == mark:
                charge += sign
                i += 1
    if not -4 <= charge <= 4:
        raise InvalidBracketAtom(f"charge {charge:+d} out of range [-4, +4]", start)

    if i >= n or text[i] != "]":
        raise InvalidBracketAtom("expected ']'", i if i < n else start)
    return (
        Atom(symbol, aromatic=aromatic, formal_charge=charge, explicit_h=hcount,
             chirality=chirality, isotope=isotope),
        i + 1,
    )


def _explicit_valences(graph: MolecularGraph) -> list[int]:
    """Sum of bond orders per atom, counting aromatic bonds as one."""
    val = [0] * len(graph.atoms)
    for bond in graph.bonds:
        o = bond.order if bond.order != AROMATIC else 1
        val[bond.a] += o
        val[bond.b] += o
    return val


def _check_valences(graph: MolecularGraph, offsets: list[int]) -> None:
    """Reject unbracketed atoms whose bonds exceed the valence table.

    Bracket atoms carry explicit hydrogen counts and charges, which shift
    valence in ways the neutral table cannot capture, so they are accepted
    as written.  Aromatic atoms are granted one extra unit to cover the
    delocalised bond.
    """
    val = _explicit_valences(graph)
    for atom in graph.atoms:
        if atom.explicit_h is not None:
            continue
        allowed = VALENCES[atom.element]
        limit = allowed[-1] + (1 if atom.aromatic else 0)
        if val[atom.index] > limit:
            raise ValenceError(
                f"{atom.element} with valence {val[atom.index]} exceeds {limit}",
                offsets[atom.index],
            )


def implicit_hydrogens(graph: MolecularGraph) -> list[int]:
    """Implicit H count per atom under the standard valence model.

    Bracket atoms use their explicit count.  For aromatic atoms, aromatic
    bonds count one each and one hydrogen is withheld for the delocalised
    electron, which reproduces the usual counts (benzene CH, pyridine N).
    """
    val = _explicit_valences(graph)
    out = [0] * len(graph.atoms)
    for atom in graph.atoms:
        if atom.explicit_h is not None:
            out[atom.index] = atom.explicit_h
            continue
        ev = val[atom.index]
        h = 0
        for v in VALENCES[atom.element]:
            if ev <= v:
                h = v - ev
                break
        if atom.aromatic and h > 0:
            h -= 1
        out[atom.index] = h
    return out


def molecular_weight(graph: MolecularGraph) -> float:
    """Molecular weight in Da, implicit hydrogens included."""
    hs = implicit_hydrogens(graph)
    mass = 0.0
    for atom in graph.atoms:
        mass += ATOMIC_MASS[atom.element] + HYDROGEN_MASS * hs[atom.index]
    return mass


def _atom_token(atom: Atom) -> str:
    symbol = atom.element.lower() if atom.aromatic else atom.element
    if (
        atom.formal_charge == 0
        and atom.explicit_h is None
        and atom.chirality == CHI_NONE
        and atom.isotope == 0
        and atom.element in ORGANIC_SUBSET
        and (not atom.aromatic or symbol in AROMATIC_ORGANIC)
    ):
        return symbol
    parts = ["["]
    if atom.isotope:
        parts.append(str(atom.isotope))
    parts.append(symbol)
    if atom.chirality == CHI_AT:
        parts.append("@")
    elif atom.chirality == CHI_AT_AT:
        parts.append("@@")
    h = atom.explicit_h or 0
    if h == 1:
        parts.append("H")
    elif h > 1:
        parts.append(f"H{h}")
    q = atom.formal_charge
    if q == 1:
        parts.append("+")
    elif q == -1:
        parts.append("-")
    elif q > 0:
        parts.append(f"+{q}")
    elif q < 0:
        parts.append(f"-{-q}")
    parts.append("]")
    return "".join(parts)


def _bond_token(bond: Bond, src: int, both_aromatic: bool) -> str:
    if bond.stereo == STEREO_UP:
        return "/" if src == bond.a else "\\"
    if bond.stereo == STEREO_DOWN:
        return "\\" if src == bond.a else "/"
    if bond.order == SINGLE:
        # explicit '-' so two adjacent aromatic atoms don't fuse on re-parse
        return "-" if both_aromatic else ""
    if bond.order == AROMATIC:
        return "" if both_aromatic else ":"
    return _ORDER_CHAR[bond.order]


def write_smiles_mapped(graph: MolecularGraph) -> tuple[str, list[int]]:
    """Serialize to SMILES; also return the emission order of atom indices.

    The order list maps output position -> input atom index, which gives
    round-trip tests an explicit isomorphism instead of a graph-matching
    search.
    """
    if not graph.atoms:
        raise EmptyMolecule("cannot write an empty graph")
    adj = graph.neighbors()
    natoms = len(graph.atoms)
    visited = [False] * natoms
    order: list[int] = []
    pieces: list[str] = []
    digit_free: list[int] = list(range(99, 0, -1))

    for root in range(natoms):
        if visited[root]:
            continue
        if pieces:
            pieces.append(".")

        # spanning tree + back edges for this component
        tree_children: dict[int, list[tuple[int, int]]] = {}
        back_edges_at: dict[int, list[int]] = {}
        seen_bonds: set[int] = set()
        visited[root] = True
        stack = [root]
        while stack:
            a = stack.pop()
            children: list[tuple[int, int]] = []
            for nb, bi in adj[a]:
                if bi in seen_bonds:
                    continue
                seen_bonds.add(bi)
                if not visited[nb]:
                    visited[nb] = True
                    children.append((nb, bi))
                    stack.append(nb)
                else:
                    bond = graph.bonds[bi]
                    back_edges_at.setdefault(bond.a, []).append(bi)
                    back_edges_at.setdefault(bond.b, []).append(bi)
            tree_children[a] = children

        # emit; all children but the last are parenthesised
        opened_digit: dict[int, int] = {}
        emit: list[tuple[str, int, int]] = [("atom", root, -1)]
        while emit:
            kind, a, bi = emit.pop()
            if kind == "text":
                pieces.append(")" if a else "(")
                continue
            if bi >= 0:
                bond = graph.bonds[bi]
                both = graph.atoms[bond.a].aromatic and graph.atoms[bond.b].aromatic
                src = bond.a if a == bond.b else bond.b
                pieces.append(_bond_token(bond, src, both))
            pieces.append(_atom_token(graph.atoms[a]))
            order.append(a)
            for rbi in back_edges_at.get(a, ()):
                rbond = graph.bonds[rbi]
                if rbi not in opened_digit:
                    both = (
                        graph.atoms[rbond.a].aromatic and graph.atoms[rbond.b].aromatic
                    )
                    digit = digit_free.pop()
                    opened_digit[rbi] = digit
                    pieces.append(_bond_token(rbond, a, both))
                else:
                    digit = opened_digit[rbi]
                    digit_free.append(digit)
                pieces.append(str(digit) if digit < 10 else f"%{digit:02d}")
            children = tree_children.get(a, [])
            if children:
                last, last_bi = children[-1]
                emit.append(("atom", last, last_bi))
                for child, cbi in reversed(children[:-1]):
                    emit.append(("text", 1, -1))
                    emit.append(("atom", child, cbi))
                    emit.append(("text", 0, -1))
    return "".join(pieces), order


def write_smiles(graph: MolecularGraph) -> str:
    """Serialize a graph back to SMILES (re-parses to an isomorphic graph)."""
    return write_smiles_mapped(graph)[0]
