"""Formal schema-set model: components, relations, subset and union.

A schema set is the tuple ``S = (T, E, A, MG, AG, R)``: five sets of
schema components and five binary relations between them.  Components are
identified by :class:`ComponentRef` values, which are either *global*
(identified by a qualified name) or *inner* (an element or attribute
declared inside a type, model group or attribute group, written
``Container:local`` in dumps).

:class:`SchemaSet` values are immutable.  Bulk construction goes through
:class:`SchemaSetBuilder`, which enforces the relation signatures and the
left-uniqueness / acyclicity invariants as pairs are added.
"""
from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .errors import SchemaSetError

XSD_NS = "http://www.w3.org/2001/XMLSchema"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
XML_NS = "http://www.w3.org/XML/1998/namespace"
ANON_NS_PREFIX = "urn:xsdprune:anonymous:"

_NCNAME_RE = re.compile(r"^[^\W\d][\w.\-\u00B7\u0300-\u036F\u203F-\u2040]*$")


def is_ncname(value: str) -> bool:
    return bool(value) and ":" not in value and _NCNAME_RE.match(value) is not None


@dataclass(frozen=True, order=True)
class QualifiedName:
    namespace: str
    local: str

    def __post_init__(self) -> None:
        if not is_ncname(self.local):
            raise ValueError(f"not a valid NCName: {self.local!r}")

    def __str__(self) -> str:
        return f"{{{self.namespace}}}{self.local}" if self.namespace else self.local

    @classmethod
    def from_clark(cls, text: str) -> QualifiedName:
        if text.startswith("{"):
            ns, _, local = text[1:].partition("}")
            return cls(ns, local)
        return cls("", text)

    @property
    def clark(self) -> str:
        return f"{{{self.namespace}}}{self.local}" if self.namespace else self.local


def xsd_name(local: str) -> QualifiedName:
    return QualifiedName(XSD_NS, local)


ANY_TYPE = xsd_name("anyType")


class Kind(enum.Enum):
    TYPE = "T"
    ELEMENT = "E"
    ATTRIBUTE = "A"
    MODEL_GROUP = "MG"
    ATTRIBUTE_GROUP = "AG"


class Scope(enum.Enum):
    GLOBAL = "global"
    INNER = "inner"


class Relation(enum.Enum):
    IS_OF_TYPE = "isOfType"
    REFERENCE = "reference"
    CONTAINS = "contains"
    IS_DERIVED_FROM = "isDerivedFrom"
    IS_IN_SUBSTITUTION_GROUP = "isInSubstitutionGroup"


_CONTAINER_KINDS = frozenset({Kind.TYPE, Kind.MODEL_GROUP, Kind.ATTRIBUTE_GROUP})
_INNER_KINDS = frozenset({Kind.ELEMENT, Kind.ATTRIBUTE})
_CONTAINER_TAG = {Kind.MODEL_GROUP: "group", Kind.ATTRIBUTE_GROUP: "attributeGroup"}


@dataclass(frozen=True)
class ComponentRef:
    """Typed reference to a global or inner schema component.

    Use :meth:`global_` and :meth:`inner` rather than the raw constructor.
    """

    kind: Kind
    name: QualifiedName | None = None
    container: ComponentRef | None = None
    local: str | None = None
    ordinal: int = 0
    _text: str = field(default="", init=False, repr=False, compare=False, hash=False)
    _hash: int = field(default=0, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.container is None:
            if self.name is None or self.local is not None or self.ordinal:
                raise ValueError("global component needs a name and nothing else")
            text = str(self.name)
        else:
            if self.kind not in _INNER_KINDS:
                raise ValueError(f"inner scope is illegal for kind {self.kind.name}")
            c = self.container
            if c.kind not in _CONTAINER_KINDS or c.container is not None:
                raise ValueError("inner container must be a global type or group")
            if self.name is not None or not self.local or self.ordinal < 0:
                raise ValueError("inner component needs a local name and ordinal >= 0")
            tag = _CONTAINER_TAG.get(c.kind)
            text = f"{tag}({c})" if tag else str(c)
            text = f"{text}:{self.local}"
            if self.ordinal:
                text = f"{text}#{self.ordinal}"
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash((self.kind, text)))

    # (kind, text) identifies a component; hashing it once keeps set algebra cheap
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComponentRef):
            return NotImplemented
        return self._hash == other._hash and self.kind is other.kind and self._text == other._text

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def global_(cls, kind: Kind, name: QualifiedName) -> ComponentRef:
        return cls(kind, name=name)

    @classmethod
    def inner(cls, kind: Kind, container: ComponentRef, local: str, ordinal: int = 0) -> ComponentRef:
        return cls(kind, container=container, local=local, ordinal=ordinal)

    @property
    def scope(self) -> Scope:
        return Scope.GLOBAL if self.container is None else Scope.INNER

    @property
    def is_global(self) -> bool:
        return self.container is None

    @property
    def is_builtin(self) -> bool:
        return self.name is not None and self.name.namespace == XSD_NS

    @property
    def is_anonymous(self) -> bool:
        return self.name is not None and self.name.namespace.startswith(ANON_NS_PREFIX)

    def __str__(self) -> str:
        return self._text

    @property
    def label(self) -> str:
        """Kind-tagged text form, unambiguous across symbol spaces."""
        return f"{self.kind.value} {self._text}"

    def __lt__(self, other: ComponentRef) -> bool:
        return (self.kind.value, self._text) < (other.kind.value, other._text)


def type_ref(name: QualifiedName) -> ComponentRef:
    return ComponentRef.global_(Kind.TYPE, name)


def element_ref(name: QualifiedName) -> ComponentRef:
    return ComponentRef.global_(Kind.ELEMENT, name)


Pair = tuple[ComponentRef, ComponentRef]


@dataclass(frozen=True)
class Violation:
    invariant: str
    subject: str

    def __str__(self) -> str:
        return f"{self.invariant}: {self.subject}"


class SchemaSet:
    """Immutable schema set.

    The raw constructor performs no validation, so it can represent
    inconsistent sets; :func:`consistency_check` reports what is wrong.
    """

    __slots__ = ("_components", "_relations")

    def __init__(
        self,
        components: Mapping[Kind, Iterable[ComponentRef]] | None = None,
        relations: Mapping[Relation, Iterable[Pair]] | None = None,
    ):
        components = components or {}
        relations = relations or {}
        self._components = {k: frozenset(components.get(k, ())) for k in Kind}
        self._relations = {r: frozenset(relations.get(r, ())) for r in Relation}

    def components(self, kind: Kind) -> frozenset[ComponentRef]:
        return self._components[kind]

    def relation(self, relation: Relation) -> frozenset[Pair]:
        return self._relations[relation]

    @property
    def types(self) -> frozenset[ComponentRef]:
        return self._components[Kind.TYPE]

    @property
    def elements(self) -> frozenset[ComponentRef]:
        return self._components[Kind.ELEMENT]

    @property
    def attributes(self) -> frozenset[ComponentRef]:
        return self._components[Kind.ATTRIBUTE]

    @property
    def model_groups(self) -> frozenset[ComponentRef]:
        return self._components[Kind.MODEL_GROUP]

    @property
    def attribute_groups(self) -> frozenset[ComponentRef]:
        return self._components[Kind.ATTRIBUTE_GROUP]

    def all_components(self) -> Iterator[ComponentRef]:
        for kind in Kind:
            yield from self._components[kind]

    def all_pairs(self) -> Iterator[tuple[Relation, ComponentRef, ComponentRef]]:
        for rel in Relation:
            for x, y in self._relations[rel]:
                yield rel, x, y

    def __contains__(self, ref: object) -> bool:
        return isinstance(ref, ComponentRef) and ref in self._components[ref.kind]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SchemaSet):
            return NotImplemented
        return self._components == other._components and self._relations == other._relations

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        sizes = ", ".join(f"{k.value}={len(v)}" for k, v in self._components.items())
        rels = sum(len(v) for v in self._relations.values())
        return f"<SchemaSet {sizes} pairs={rels}>"

    def is_empty(self) -> bool:
        return not any(self._components.values()) and not any(self._relations.values())


class SchemaSetBuilder:
    """Mutable accumulator enforcing the relation invariants on every add."""

    def __init__(self, base: SchemaSet | None = None):
        self._components: dict[Kind, set[ComponentRef]] = {k: set() for k in Kind}
        self._relations: dict[Relation, set[Pair]] = {r: set() for r in Relation}
        self._type_of: dict[ComponentRef, ComponentRef] = {}
        self._base_of: dict[ComponentRef, ComponentRef] = {}
        if base is not None:
            self.update(base)

    def __contains__(self, ref: object) -> bool:
        return isinstance(ref, ComponentRef) and ref in self._components[ref.kind]

    def add_component(self, c: ComponentRef) -> None:
        if c.kind is Kind.TYPE and c.name == ANY_TYPE:
            raise SchemaSetError("the built-in anyType is never stored in a schema set")
        self._components[c.kind].add(c)

    def add_relation(self, relation: Relation, x: ComponentRef, y: ComponentRef) -> None:
        pair = (x, y)
        if pair in self._relations[relation]:
            return
        _check_signature(relation, x, y)
        if relation is Relation.IS_OF_TYPE:
            known = self._type_of.get(x)
            if known is not None and known != y:
                raise SchemaSetError(f"isOfType conflict for {x.label}: {known} vs {y}")
        elif relation is Relation.IS_DERIVED_FROM:
            known = self._base_of.get(x)
            if known is not None and known != y:
                raise SchemaSetError(f"isDerivedFrom conflict for {x}: {known} vs {y}")
            cursor: ComponentRef | None = y
            while cursor is not None:
                if cursor == x:
                    raise SchemaSetError(f"isDerivedFrom({x}, {y}) would introduce a cycle")
                cursor = self._base_of.get(cursor)
        self.add_component(x)
        self.add_component(y)
        self._relations[relation].add(pair)
        if relation is Relation.IS_OF_TYPE:
            self._type_of[x] = y
        elif relation is Relation.IS_DERIVED_FROM:
            self._base_of[x] = y

    def update(self, other: SchemaSet | SchemaSetBuilder) -> None:
        if isinstance(other, SchemaSetBuilder):
            other = other.build()
        for kind in Kind:
            for c in other.components(kind):
                self.add_component(c)
        for rel in Relation:
            mine = self._relations[rel]
            for x, y in other.relation(rel):
                if (x, y) not in mine:
                    self.add_relation(rel, x, y)

    def type_of(self, x: ComponentRef) -> ComponentRef | None:
        return self._type_of.get(x)

    def build(self) -> SchemaSet:
        return SchemaSet(self._components, self._relations)


def _check_signature(relation: Relation, x: ComponentRef, y: ComponentRef) -> None:
    ok = True
    if relation is Relation.IS_OF_TYPE:
        ok = x.kind in _INNER_KINDS and y.kind is Kind.TYPE
    elif relation is Relation.REFERENCE:
        ok = (
            x.kind in _CONTAINER_KINDS
            and x.is_global
            and y.kind in (Kind.ELEMENT, Kind.ATTRIBUTE, Kind.MODEL_GROUP, Kind.ATTRIBUTE_GROUP)
            and y.is_global
        )
    elif relation is Relation.CONTAINS:
        ok = x.kind in _CONTAINER_KINDS and y.kind in _INNER_KINDS and y.container == x
    elif relation is Relation.IS_DERIVED_FROM:
        ok = x.kind is Kind.TYPE and y.kind is Kind.TYPE and x != y
    elif relation is Relation.IS_IN_SUBSTITUTION_GROUP:
        ok = (
            x.kind is Kind.ELEMENT and y.kind is Kind.ELEMENT and x.is_global and y.is_global
        )
    if not ok:
        raise SchemaSetError(f"{relation.value}({x.label}, {y.label}) violates the relation signature")


def empty_set() -> SchemaSet:
    return SchemaSet()


def add_component(s: SchemaSet, c: ComponentRef) -> SchemaSet:
    b = SchemaSetBuilder(s)
    b.add_component(c)
    return b.build()


def add_value_to_relation(s: SchemaSet, relation: Relation, x: ComponentRef, y: ComponentRef) -> SchemaSet:
    """Return ``s`` with ``relation(x, y)`` added; both endpoints join their sets."""
    b = SchemaSetBuilder(s)
    b.add_relation(relation, x, y)
    return b.build()


def union(s1: SchemaSet, s2: SchemaSet) -> SchemaSet:
    b = SchemaSetBuilder(s1)
    b.update(s2)
    return b.build()


def is_subset_of(s1: SchemaSet, s2: SchemaSet) -> bool:
    return all(s1.components(k) <= s2.components(k) for k in Kind) and all(
        s1.relation(r) <= s2.relation(r) for r in Relation
    )


def copy_relations(target: SchemaSet, source: SchemaSet, components: Iterable[ComponentRef]) -> SchemaSet:
    """Copy every pair of ``source`` whose two endpoints both lie in ``components``."""
    chosen = set(components)
    if not chosen:
        return target
    b = SchemaSetBuilder(target)
    copy_relations_into(b, source, chosen)
    return b.build()


def copy_relations_into(b: SchemaSetBuilder, source: SchemaSet, chosen: set[ComponentRef]) -> None:
    for rel, x, y in source.all_pairs():
        if x in chosen and y in chosen:
            b.add_relation(rel, x, y)


def consistency_check(s: SchemaSet) -> list[Violation]:
    """List every broken invariant of ``s``; an empty list means consistent."""
    out: list[Violation] = []
    for kind in Kind:
        for c in sorted(s.components(kind)):
            if c.kind is not kind:
                out.append(Violation("membership", f"{c.label} stored in {kind.value}"))
            if c.kind is Kind.TYPE and c.name == ANY_TYPE:
                out.append(Violation("anyType", c.label))
    for rel in Relation:
        for x, y in sorted(s.relation(rel)):
            subject = f"{rel.value}({x.label}, {y.label})"
            try:
                _check_signature(rel, x, y)
            except SchemaSetError:
                out.append(Violation("signature", subject))
            for end in (x, y):
                if end not in s:
                    out.append(Violation("closure", f"{subject} endpoint {end.label} missing"))
    for rel, name in ((Relation.IS_OF_TYPE, "isOfType left-unique"),
                      (Relation.IS_DERIVED_FROM, "isDerivedFrom left-unique")):
        seen: dict[ComponentRef, ComponentRef] = {}
        for x, y in sorted(s.relation(rel)):
            if x in seen:
                out.append(Violation(name, f"{x.label} -> {seen[x]}, {y}"))
            else:
                seen[x] = y
    for cycle in _derivation_cycles(s.relation(Relation.IS_DERIVED_FROM)):
        out.append(Violation("isDerivedFrom acyclic", " -> ".join(str(c) for c in cycle)))
    return out


def _derivation_cycles(pairs: Iterable[Pair]) -> list[list[ComponentRef]]:
    edges: dict[ComponentRef, list[ComponentRef]] = {}
    for x, y in sorted(pairs):
        edges.setdefault(x, []).append(y)
    state: dict[ComponentRef, int] = {}
    cycles = []
    for start in sorted(edges):
        if start in state:
            continue
        stack = [(start, iter(edges.get(start, ())))]
        path = [start]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                state[node] = 2
            elif state.get(nxt) == 1:
                cycles.append(path[path.index(nxt):] + [nxt])
            elif nxt not in state:
                state[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(edges.get(nxt, ()))))
    return cycles


def canonical_lines(s: SchemaSet) -> list[str]:
    lines = [c.label for c in s.all_components()]
    for rel, x, y in s.all_pairs():
        lines.append(f"{rel.value} {x.label} {y.label}")
    return sorted(lines)


def canonical_dump(s: SchemaSet) -> str:
    """Sorted one-line-per-fact text form; equal sets give identical bytes."""
    return "".join(line + "\n" for line in canonical_lines(s))


def dump_diff(left: SchemaSet, right: SchemaSet) -> list[str]:
    a, b = set(canonical_lines(left)), set(canonical_lines(right))
    return sorted([f"- {x}" for x in a - b] + [f"+ {x}" for x in b - a], key=lambda t: (t[2:], t[0]))
