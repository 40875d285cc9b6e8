"""Instance-driven subsetting: which part of a schema set a corpus exercises.

The central routine is :func:`schema_subset_used_in`, a recursive walk of
one instance tree.  For every node it records the matched element
declaration, the node's dynamic type (``xsi:type`` aware) with all of its
ancestors, the attributes used, and the ``contains``/``reference`` pairs
that link each child declaration to the type or model group that textually
holds it.  :func:`subset_schemas` folds the per-document results with
set union.
"""
from __future__ import annotations

import enum
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

from lxml import etree

from .errors import AnalysisError
from .loader import (
    AttributeUse,
    Particle,
    SchemaCatalog,
    SourceIndex,
    UnknownComponentError,
    resolve_type,
)
from .model import (
    ANY_TYPE,
    XSD_NS,
    XSI_NS,
    ComponentRef,
    Kind,
    QualifiedName,
    Relation,
    SchemaSet,
    SchemaSetBuilder,
    element_ref,
    type_ref,
)

_BUILTIN_BASE = {
    "normalizedString": "string", "token": "normalizedString", "language": "token",
    "Name": "token", "NCName": "Name", "ID": "NCName", "IDREF": "NCName", "ENTITY": "NCName",
    "NMTOKEN": "token", "integer": "decimal", "nonPositiveInteger": "integer",
    "negativeInteger": "nonPositiveInteger", "long": "integer", "int": "long", "short": "int",
    "byte": "short", "nonNegativeInteger": "integer", "unsignedLong": "nonNegativeInteger",
    "unsignedInt": "unsignedLong", "unsignedShort": "unsignedInt", "unsignedByte": "unsignedShort",
    "positiveInteger": "nonNegativeInteger",
}


class Mode(enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class InstanceNode:
    name: QualifiedName
    attributes: tuple[tuple[QualifiedName, str], ...] = ()
    xsi_type: QualifiedName | None = None
    children: tuple[InstanceNode, ...] = ()
    text: str = ""
    line: int | None = None

    @property
    def leaf(self) -> bool:
        return not self.children

    @property
    def nil(self) -> bool:
        return any(n == QualifiedName(XSI_NS, "nil") and v.strip() in ("true", "1") for n, v in self.attributes)


def _qname_of(tag: str) -> QualifiedName:
    return QualifiedName.from_clark(tag)


def _convert(el: etree._Element) -> InstanceNode:
    attrs = []
    xsi_type = None
    for key, value in el.attrib.items():
        qn = _qname_of(key)
        attrs.append((qn, value))
        if qn.namespace == XSI_NS and qn.local == "type":
            prefix, sep, local = value.strip().rpartition(":")
            if sep:
                ns = el.nsmap.get(prefix)
                if ns is None:
                    raise AnalysisError(f"undeclared prefix {prefix!r} in xsi:type", file=None)
            else:
                ns = el.nsmap.get(None, "")
            xsi_type = QualifiedName(ns, local)
    children = tuple(_convert(c) for c in el if isinstance(c.tag, str))
    text = "".join(el.itertext()) if not children else (el.text or "")
    return InstanceNode(_qname_of(el.tag), tuple(attrs), xsi_type, children, text, el.sourceline)


def root_of(doc: str | os.PathLike | bytes | etree._ElementTree | etree._Element) -> InstanceNode:
    """Parse an instance document (path, bytes or lxml tree) and return its root node."""
    try:
        if isinstance(doc, bytes):
            el = etree.fromstring(doc, etree.XMLParser(resolve_entities=False, no_network=True))
        elif isinstance(doc, etree._ElementTree):
            el = doc.getroot()
        elif isinstance(doc, etree._Element):
            el = doc
        else:
            el = etree.parse(os.fspath(doc), etree.XMLParser(resolve_entities=False, no_network=True)).getroot()
    except etree.XMLSyntaxError as exc:
        raise AnalysisError(f"malformed XML: {exc.msg}", file=str(doc) if not isinstance(doc, bytes) else None) from None
    except OSError as exc:
        raise AnalysisError(f"cannot read instance: {exc}", file=str(doc)) from None
    return _convert(el)


@dataclass(frozen=True)
class ParticleMatch:
    """An element particle reachable from a type's effective content model."""

    particle: Particle
    container: ComponentRef
    groups: tuple[tuple[ComponentRef, ComponentRef], ...]
    index: int


@dataclass(frozen=True)
class AttributeMatch:
    use: AttributeUse
    container: ComponentRef
    groups: tuple[tuple[ComponentRef, ComponentRef], ...]


@dataclass(frozen=True)
class ChildMatch:
    decl: ComponentRef
    via: ParticleMatch | None
    chain: tuple[ComponentRef, ...] = ()  # substitution chain member -> ... -> declared head


class AnalysisContext:
    """Full schema set plus indexes; immutable once built and safe to share."""

    def __init__(self, schema: SchemaSet, catalog: SchemaCatalog, source: SourceIndex,
                 mode: Mode | str = Mode.STRICT):
        self.schema = schema
        self.catalog = catalog
        self.source = source
        self.mode = Mode(mode)
        self._particle_cache: dict[ComponentRef, list[ParticleMatch]] = {}
        self._attribute_cache: dict[ComponentRef, tuple[list[AttributeMatch], set[QualifiedName], bool]] = {}

    @classmethod
    def from_load(cls, loaded, mode: Mode | str = Mode.STRICT) -> AnalysisContext:
        return cls(loaded.schema, loaded.catalog, loaded.source, mode)

    @property
    def strict(self) -> bool:
        return self.mode is Mode.STRICT

    @cached_property
    def declared_types(self) -> dict[ComponentRef, ComponentRef]:
        return dict(self.schema.relation(Relation.IS_OF_TYPE))

    @cached_property
    def pairs_from(self) -> dict[ComponentRef, list[tuple[Relation, ComponentRef]]]:
        index: dict[ComponentRef, list[tuple[Relation, ComponentRef]]] = {}
        for rel, x, y in self.schema.all_pairs():
            index.setdefault(x, []).append((rel, y))
        return index

    @cached_property
    def substitution_heads(self) -> dict[QualifiedName, QualifiedName]:
        return {e.ref.name: e.substitution_head for e in self.source.entries.values()
                if e.ref.kind is Kind.ELEMENT and e.substitution_head is not None}

    def declared_type(self, decl: ComponentRef) -> ComponentRef:
        return self.declared_types.get(decl, type_ref(ANY_TYPE))

    def element_particles(self, t: ComponentRef) -> list[ParticleMatch]:
        cached = self._particle_cache.get(t)
        if cached is None:
            cached = self._particle_cache[t] = self._build_particles(t)
        return cached

    def _build_particles(self, t: ComponentRef) -> list[ParticleMatch]:
        entry = self.source.entries.get(t)
        if entry is None or entry.simple:
            return []
        out: list[ParticleMatch] = []
        if entry.derivation == "extension" and entry.base is not None and not entry.base.is_builtin:
            out.extend(self.element_particles(entry.base))
        self._expand(t, entry.particles, (), out, set())
        return [ParticleMatch(m.particle, m.container, m.groups, i) for i, m in enumerate(out)]

    def _expand(self, holder: ComponentRef, particles: Sequence[Particle],
                groups: tuple, out: list[ParticleMatch], seen: set[ComponentRef]) -> None:
        for p in particles:
            if p.kind == "group":
                if p.target in seen:
                    continue
                group_entry = self.source.entries[p.target]
                self._expand(p.target, group_entry.particles, groups + ((holder, p.target),),
                             out, seen | {p.target})
            else:
                out.append(ParticleMatch(p, holder, groups, 0))

    def attribute_model(self, t: ComponentRef) -> tuple[list[AttributeMatch], set[QualifiedName], bool]:
        """Effective attribute uses of ``t``: (matches, prohibited names, has wildcard)."""
        cached = self._attribute_cache.get(t)
        if cached is None:
            cached = self._attribute_cache[t] = self._build_attributes(t)
        return cached

    def _build_attributes(self, t: ComponentRef) -> tuple[list[AttributeMatch], set[QualifiedName], bool]:
        entry = self.source.entries.get(t)
        if entry is None:
            return [], set(), False
        own: list[AttributeMatch] = []
        wildcard = self._expand_attributes(t, entry.attribute_uses, (), own, set())
        prohibited = {m.use.qname for m in own if m.use.use == "prohibited"}
        matches = [m for m in own if m.use.use != "prohibited"]
        names = {m.use.qname for m in matches} | prohibited
        if entry.base is not None and not entry.base.is_builtin:
            base_matches, base_prohibited, base_wild = self.attribute_model(entry.base)
            matches.extend(m for m in base_matches if m.use.qname not in names)
            if entry.derivation == "extension":
                wildcard = wildcard or base_wild
                prohibited |= base_prohibited - names
        return matches, prohibited, wildcard

    def _expand_attributes(self, holder: ComponentRef, uses: Sequence[AttributeUse], groups: tuple,
                           out: list[AttributeMatch], seen: set[ComponentRef]) -> bool:
        wildcard = False
        for u in uses:
            if u.kind == "anyAttribute":
                wildcard = True
            elif u.kind == "attributeGroup":
                if u.target in seen:
                    continue
                group_entry = self.source.entries[u.target]
                wildcard |= self._expand_attributes(u.target, group_entry.attribute_uses,
                                                    groups + ((holder, u.target),), out, seen | {u.target})
            else:
                out.append(AttributeMatch(u, holder, groups))
        return wildcard

    def type_closure(self, t: ComponentRef) -> list[ComponentRef]:
        """``t``, its ancestors, and every type its simple content depends on."""
        out: list[ComponentRef] = []
        seen: set[ComponentRef] = set()
        stack = [t]
        while stack:
            cur = stack.pop()
            if cur in seen or cur.name == ANY_TYPE:
                continue
            seen.add(cur)
            out.append(cur)
            stack.extend(ancestors(self, cur))
            for dep in self.catalog.type_dependencies.get(cur.name, ()):
                stack.append(type_ref(dep))
        return out


def ancestors(ctx: AnalysisContext, t: ComponentRef) -> list[ComponentRef]:
    """Transitive base types of ``t``, nearest first, without ``anyType``."""
    out = []
    seen = {t.name}
    cursor = ctx.catalog.derivation_index.get(t.name)
    while cursor is not None:
        base = cursor[0]
        if base == ANY_TYPE or base in seen:
            break
        seen.add(base)
        out.append(type_ref(base))
        cursor = ctx.catalog.derivation_index.get(base)
    return out


def _derives_from(ctx: AnalysisContext, t: ComponentRef, base: ComponentRef) -> bool:
    if base.name == ANY_TYPE or t == base:
        return True
    chain = [t, *ancestors(ctx, t)]
    if base in chain:
        return True
    last = chain[-1].name
    if base.name.namespace == XSD_NS:
        if base.name.local == "anySimpleType":
            entry = ctx.source.entries.get(chain[-1])
            return last.namespace == XSD_NS or (entry is not None and entry.simple)
        cursor = last.local if last.namespace == XSD_NS else None
        while cursor is not None:
            if cursor == base.name.local:
                return True
            cursor = _BUILTIN_BASE.get(cursor)
    return False


def _node_path(path: str, node: InstanceNode, position: int | None) -> str:
    step = node.name.local if position is None else f"{node.name.local}[{position}]"
    return f"{path}/{step}"


def _match_global(ctx: AnalysisContext, node: InstanceNode) -> ComponentRef | None:
    if ctx.catalog.has_global(Kind.ELEMENT, node.name):
        return element_ref(node.name)
    return None


def _substitution_chain(ctx: AnalysisContext, member: QualifiedName, head: QualifiedName) -> tuple[ComponentRef, ...]:
    chain = [element_ref(member)]
    cursor = member
    heads = ctx.substitution_heads
    while cursor != head:
        cursor = heads[cursor]
        chain.append(element_ref(cursor))
    return tuple(chain)


def _match_child(ctx: AnalysisContext, parent_type: ComponentRef, node: InstanceNode,
                 cursor: int) -> ChildMatch | str | None:
    """Match ``node`` inside ``parent_type``; returns a match, ``"any"`` for a wildcard, or None."""
    particles = ctx.element_particles(parent_type)
    candidates = [m for m in particles if m.particle.kind == "element" and m.particle.qname == node.name]
    if candidates:
        chosen = next((m for m in candidates if m.index >= cursor), candidates[0])
        return ChildMatch(chosen.particle.target, chosen)
    for m in particles:
        p = m.particle
        if p.kind == "element" and p.is_ref:
            members = ctx.catalog.substitution_index.get(p.qname, ())
            if node.name in members:
                return ChildMatch(element_ref(node.name), m, _substitution_chain(ctx, node.name, p.qname))
    if any(m.particle.kind == "any" for m in particles):
        return "any"
    return None


def element_decl(ctx: AnalysisContext, node: InstanceNode,
                 parent_type: ComponentRef | None = None) -> ComponentRef:
    """Element declaration matching ``node``: a global one for roots, else one in ``parent_type``."""
    if parent_type is None:
        decl = _match_global(ctx, node)
        if decl is None:
            raise AnalysisError(f"no global element declaration for {node.name}", f"/{node.name.local}")
        return decl
    match = _match_child(ctx, parent_type, node, 0)
    if match == "any":
        raise AnalysisError(f"{node.name} only matches a wildcard in {parent_type}")
    if match is None:
        raise AnalysisError(f"no declaration for {node.name} in the content model of {parent_type}")
    return match.decl


def type_of(ctx: AnalysisContext, node: InstanceNode, decl: ComponentRef) -> ComponentRef:
    declared = ctx.declared_type(decl)
    if node.xsi_type is None:
        return declared
    try:
        dynamic = resolve_type(ctx.catalog, node.xsi_type)
    except UnknownComponentError:
        raise AnalysisError(f"xsi:type names unknown type {node.xsi_type}") from None
    if not _derives_from(ctx, dynamic, declared):
        raise AnalysisError(f"xsi:type {node.xsi_type} is not derived from declared type {declared}")
    return dynamic


def container_of(ctx: AnalysisContext, decl: ComponentRef, dynamic_type: ComponentRef) -> ComponentRef:
    """Type or model group whose text declares or references ``decl``."""
    if decl.kind is Kind.ATTRIBUTE:
        for m in ctx.attribute_model(dynamic_type)[0]:
            if m.use.target == decl:
                return m.container
    else:
        for m in ctx.element_particles(dynamic_type):
            if m.particle.target == decl:
                return m.container
    raise AnalysisError(f"{decl} is not reachable from {dynamic_type}")


@dataclass
class FileReport:
    path: str
    components: int = 0
    relations: int = 0
    warnings: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"path": self.path, "components": self.components, "relations": self.relations,
                "warnings": list(self.warnings), "skipped": list(self.skipped)}


@dataclass
class AnalysisReport:
    files: list[FileReport] = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        return [f"{f.path}:{w}" if f.path else w for f in self.files for w in f.warnings]

    def as_dict(self) -> dict:
        return {"files": [f.as_dict() for f in self.files]}


class _Walker:
    def __init__(self, ctx: AnalysisContext, report: FileReport):
        self.ctx = ctx
        self.report = report
        self.b = SchemaSetBuilder()

    def problem(self, message: str, path: str) -> None:
        if self.ctx.strict:
            raise AnalysisError(message, path, self.report.path or None)
        self.report.warnings.append(f"{path}: {message}")
        self.report.skipped.append(path)

    def add_type(self, t: ComponentRef) -> None:
        if t.name == ANY_TYPE:
            return
        closure = self.ctx.type_closure(t)
        for c in closure:
            self.b.add_component(c)
        chosen = set(closure)
        for c in closure:
            for rel, y in self.ctx.pairs_from.get(c, ()):
                if y in chosen:
                    self.b.add_relation(rel, c, y)

    def add_decl(self, decl: ComponentRef) -> None:
        self.b.add_component(decl)
        declared = self.ctx.declared_type(decl)
        if declared.name != ANY_TYPE:
            self.b.add_relation(Relation.IS_OF_TYPE, decl, declared)
            self.add_type(declared)
        if decl.kind is Kind.ELEMENT and decl.is_global:
            head = self.ctx.substitution_heads.get(decl.name)
            if head is not None and (head_ref := element_ref(head)) not in self.b:
                self.b.add_relation(Relation.IS_IN_SUBSTITUTION_GROUP, decl, head_ref)
                self.add_decl(head_ref)
            elif head is not None:
                self.b.add_relation(Relation.IS_IN_SUBSTITUTION_GROUP, decl, head_ref)

    def link(self, container: ComponentRef, groups: Iterable[tuple[ComponentRef, ComponentRef]],
             target: ComponentRef, is_ref: bool) -> None:
        for holder, group in groups:
            self.b.add_relation(Relation.REFERENCE, holder, group)
            container = group
        self.b.add_relation(Relation.REFERENCE if is_ref else Relation.CONTAINS, container, target)

    def visit(self, node: InstanceNode, decl: ComponentRef, path: str) -> bool:
        ctx = self.ctx
        try:
            dynamic = type_of(ctx, node, decl)
        except AnalysisError as exc:
            self.problem(str(exc), path)
            return False
        self.add_decl(decl)
        self.add_type(dynamic)
        any_type = dynamic.name == ANY_TYPE
        entry = ctx.source.entries.get(dynamic)
        simple = dynamic.is_builtin or (entry is not None and entry.simple)
        for qn, _value in node.attributes:
            if qn.namespace == XSI_NS:
                continue
            apath = f"{path}/@{qn.local}"
            if any_type:
                self.report.warnings.append(f"{apath}: attribute under anyType content skipped")
                continue
            matches, prohibited, wildcard = ctx.attribute_model(dynamic)
            found = next((m for m in matches if m.use.qname == qn), None) if qn not in prohibited else None
            if found is None:
                if wildcard and qn not in prohibited:
                    self.report.warnings.append(f"{apath}: matched attribute wildcard, skipped")
                else:
                    self.problem(f"no attribute declaration for {qn} in {dynamic}", apath)
                continue
            self.add_decl(found.use.target)
            self.link(found.container, found.groups, found.use.target, found.use.is_ref)
        if node.leaf:
            return True
        if any_type or simple:
            if any_type:
                self.report.warnings.append(f"{path}: children of anyType content skipped")
                self.report.skipped.append(path)
            else:
                self.problem(f"element children under simple type {dynamic}", path)
            return True
        counts: dict[QualifiedName, int] = {}
        cursor = 0
        for child in node.children:
            counts[child.name] = counts.get(child.name, 0) + 1
            cpath = _node_path(path, child, counts[child.name])
            match = _match_child(ctx, dynamic, child, cursor)
            if match == "any":
                self.report.warnings.append(f"{cpath}: matched element wildcard, subtree skipped")
                self.report.skipped.append(cpath)
                continue
            if match is None:
                self.problem(f"no declaration for {child.name} in the content model of {dynamic}", cpath)
                continue
            cursor = match.via.index
            if not self.visit(child, match.decl, cpath):
                continue
            particle = match.via.particle
            self.link(match.via.container, match.via.groups, particle.target, particle.is_ref)
            for member, head in zip(match.chain, match.chain[1:]):
                self.b.add_relation(Relation.IS_IN_SUBSTITUTION_GROUP, member, head)
        return True

    def mirror_restrictions(self) -> None:
        """Keep base-type counterparts of content retained in restriction-derived types."""
        ctx = self.ctx
        changed = True
        while changed:
            changed = False
            built = self.b.build()
            for t in sorted(built.types):
                entry = ctx.source.entries.get(t)
                if entry is None or entry.derivation != "restriction" or entry.base is None or entry.base.is_builtin:
                    continue
                base = entry.base
                if not entry.simple:
                    base_particles = ctx.element_particles(base)
                    for m in ctx.element_particles(t):
                        if m.particle.kind != "element" or not self._retained(built, m):
                            continue
                        for bm in base_particles:
                            if bm.particle.kind == "element" and bm.particle.qname == m.particle.qname:
                                if not self._retained(built, bm):
                                    self.add_decl(bm.particle.target)
                                    self.link(bm.container, bm.groups, bm.particle.target, bm.particle.is_ref)
                                    changed = True
                                break
                base_attrs = ctx.attribute_model(base)[0]
                for m in ctx.attribute_model(t)[0]:
                    own = m.container == t or (m.groups and m.groups[0][0] == t)
                    if not own or m.use.target not in built:
                        continue
                    for bm in base_attrs:
                        if bm.use.qname == m.use.qname and bm.use.target != m.use.target:
                            if bm.use.target not in built:
                                self.add_decl(bm.use.target)
                                self.link(bm.container, bm.groups, bm.use.target, bm.use.is_ref)
                                changed = True
                            break

    @staticmethod
    def _retained(built: SchemaSet, m: ParticleMatch) -> bool:
        p = m.particle
        container = m.groups[-1][1] if m.groups else m.container
        rel = Relation.REFERENCE if p.is_ref else Relation.CONTAINS
        return (container, p.target) in built.relation(rel)


def schema_subset_used_in(ctx: AnalysisContext, node: InstanceNode, decl: ComponentRef | None = None,
                          report: FileReport | None = None) -> SchemaSet:
    """Subset of the schema set needed by the instance fragment rooted at ``node``."""
    report = report if report is not None else FileReport("")
    path = f"/{node.name.local}"
    if decl is None:
        decl = _match_global(ctx, node)
        if decl is None:
            if ctx.strict:
                raise AnalysisError(f"no global element declaration for {node.name}", path, report.path or None)
            report.warnings.append(f"{path}: no global element declaration for {node.name}, document skipped")
            report.skipped.append(path)
            return SchemaSet()
    walker = _Walker(ctx, report)
    walker.visit(node, decl, path)
    walker.mirror_restrictions()
    result = walker.b.build()
    report.components = sum(1 for _ in result.all_components())
    report.relations = sum(1 for _ in result.all_pairs())
    return result


def _analyze_one(ctx: AnalysisContext, doc) -> tuple[SchemaSet, FileReport]:
    name = doc if isinstance(doc, (str, os.PathLike)) else "<instance>"
    report = FileReport(os.fspath(name) if not isinstance(name, str) else name)
    node = doc if isinstance(doc, InstanceNode) else root_of(doc)
    try:
        return schema_subset_used_in(ctx, node, report=report), report
    except AnalysisError as exc:
        if exc.file is None:
            exc.file = report.path
            exc.args = (f"{report.path} {exc.args[0]}",)
        raise


def subset_schemas(ctx: AnalysisContext, corpus: Sequence, jobs: int = 1) -> tuple[SchemaSet, AnalysisReport]:
    """Union of the per-document subsets of ``corpus`` (paths, bytes or InstanceNodes)."""
    if not corpus:
        raise AnalysisError("the instance corpus is empty")
    if jobs > 1 and len(corpus) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda d: _analyze_one(ctx, d), corpus))
    else:
        results = [_analyze_one(ctx, d) for d in corpus]
    b = SchemaSetBuilder()
    report = AnalysisReport()
    for subset, file_report in results:
        b.update(subset)
        report.files.append(file_report)
    return b.build(), report
