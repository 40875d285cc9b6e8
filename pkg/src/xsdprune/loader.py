"""Load a multi-document XSD 1.0 schema set into the component model.

Loading happens in two passes.  The first pass walks ``include`` and
``import`` statements from the entry files and registers every global
definition; the second pass visits each global definition (in a fixed
kind order) and records inner components and relation pairs.  Alongside
the :class:`~xsdprune.model.SchemaSet` the loader returns a
:class:`SourceIndex`, which keeps the original XSD subtree of every
component so the emitter can write pruned copies, and a
:class:`SchemaCatalog` with the lookup indexes used during analysis.
"""
from __future__ import annotations

import logging
import math
import os
import urllib.parse
import urllib.request
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from lxml import etree

from .errors import LoadError, XsdPruneError
from .model import (
    ANON_NS_PREFIX,
    ANY_TYPE,
    XML_NS,
    XSD_NS,
    ComponentRef,
    Kind,
    QualifiedName,
    Relation,
    SchemaSet,
    SchemaSetBuilder,
)

log = logging.getLogger(__name__)

UNBOUNDED = math.inf

_XS = f"{{{XSD_NS}}}"
XS_SCHEMA = _XS + "schema"
XS_ELEMENT = _XS + "element"
XS_ATTRIBUTE = _XS + "attribute"
XS_COMPLEX_TYPE = _XS + "complexType"
XS_SIMPLE_TYPE = _XS + "simpleType"
XS_GROUP = _XS + "group"
XS_ATTRIBUTE_GROUP = _XS + "attributeGroup"
XS_SEQUENCE = _XS + "sequence"
XS_CHOICE = _XS + "choice"
XS_ALL = _XS + "all"
XS_ANY = _XS + "any"
XS_ANY_ATTRIBUTE = _XS + "anyAttribute"
XS_ANNOTATION = _XS + "annotation"
XS_INCLUDE = _XS + "include"
XS_IMPORT = _XS + "import"
XS_REDEFINE = _XS + "redefine"
XS_NOTATION = _XS + "notation"
XS_SIMPLE_CONTENT = _XS + "simpleContent"
XS_COMPLEX_CONTENT = _XS + "complexContent"
XS_EXTENSION = _XS + "extension"
XS_RESTRICTION = _XS + "restriction"
XS_LIST = _XS + "list"
XS_UNION = _XS + "union"
IDENTITY_TAGS = frozenset({_XS + "key", _XS + "keyref", _XS + "unique"})
COMPOSITOR_TAGS = frozenset({XS_SEQUENCE, XS_CHOICE, XS_ALL})

# XSD 1.1 or otherwise outside the supported feature matrix.
_UNSUPPORTED = {
    XS_REDEFINE: "redefine",
    XS_NOTATION: "notation",
    _XS + "override": "override (XSD 1.1)",
    _XS + "assert": "assert (XSD 1.1)",
    _XS + "assertion": "assertion (XSD 1.1)",
    _XS + "openContent": "openContent (XSD 1.1)",
    _XS + "defaultOpenContent": "defaultOpenContent (XSD 1.1)",
    _XS + "alternative": "alternative (XSD 1.1)",
}

BUILTIN_TYPES = frozenset("""
anyType anySimpleType string normalizedString token language Name NCName ID IDREF
IDREFS ENTITY ENTITIES NMTOKEN NMTOKENS boolean base64Binary hexBinary float
double decimal integer nonPositiveInteger negativeInteger long int short byte
nonNegativeInteger unsignedLong unsignedInt unsignedShort unsignedByte
positiveInteger duration dateTime time date gYearMonth gYear gMonthDay gDay
gMonth anyURI QName NOTATION
""".split())

_KIND_TAGS = {
    XS_COMPLEX_TYPE: Kind.TYPE,
    XS_SIMPLE_TYPE: Kind.TYPE,
    XS_ELEMENT: Kind.ELEMENT,
    XS_ATTRIBUTE: Kind.ATTRIBUTE,
    XS_GROUP: Kind.MODEL_GROUP,
    XS_ATTRIBUTE_GROUP: Kind.ATTRIBUTE_GROUP,
}
_KIND_ORDER = [Kind.TYPE, Kind.ELEMENT, Kind.ATTRIBUTE, Kind.MODEL_GROUP, Kind.ATTRIBUTE_GROUP]


class UnknownComponentError(XsdPruneError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown component"


@dataclass
class LoadOptions:
    catalog: dict[str, str] = field(default_factory=dict)
    allow_network: bool = False


def read_catalog(path: str | os.PathLike) -> dict[str, str]:
    """Parse a ``namespaceURI<TAB>path`` catalog; relative paths resolve against it."""
    base = Path(path).resolve().parent
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise LoadError("catalog line must be 'namespaceURI<TAB>path'", str(path), lineno)
        key, _, target = line.partition("\t")
        target = target.strip()
        if "://" not in target:
            target = str((base / target).resolve())
        mapping[key.strip()] = target
    return mapping


@dataclass(eq=False)
class SchemaDocument:
    location: str
    root: etree._Element
    target_namespace: str
    chameleon: bool = False
    element_qualified: bool = False
    attribute_qualified: bool = False
    block_default: str | None = None
    final_default: str | None = None

    def resolve_qname(self, node: etree._Element, value: str) -> QualifiedName:
        value = value.strip()
        prefix, sep, local = value.rpartition(":")
        nsmap = node.nsmap
        if sep:
            if prefix == "xml":
                ns = XML_NS
            elif prefix in nsmap:
                ns = nsmap[prefix]
            else:
                raise LoadError(f"undeclared namespace prefix {prefix!r} in {value!r}",
                                self.location, node.sourceline)
        else:
            ns = nsmap.get(None, "")
        if self.chameleon and ns == "":
            ns = self.target_namespace
        try:
            return QualifiedName(ns or "", local)
        except ValueError as exc:
            raise LoadError(str(exc), self.location, node.sourceline) from None

    @property
    def namespace_prefixes(self) -> dict[str, str]:
        return {k or "": v for k, v in self.root.nsmap.items()}


@dataclass(eq=False)
class Particle:
    """One element-bearing particle of a type or model group, in document order.

    ``kind`` is ``"element"``, ``"group"`` or ``"any"``.  For element
    particles ``qname`` is the name instances use; ``target`` is the inner
    declaration, or the referenced global element/group when ``is_ref``.
    """

    kind: str
    target: ComponentRef | None
    is_ref: bool
    qname: QualifiedName | None
    min_occurs: int
    max_occurs: float
    compositor: str
    node: etree._Element


@dataclass(eq=False)
class AttributeUse:
    kind: str  # "attribute", "attributeGroup" or "anyAttribute"
    target: ComponentRef | None
    is_ref: bool
    qname: QualifiedName | None
    use: str
    node: etree._Element


@dataclass(eq=False)
class SourceEntry:
    """Original definition of one global (or anonymous) component."""

    ref: ComponentRef
    document: SchemaDocument
    fragment: etree._Element
    owner: ComponentRef | None = None
    particles: list[Particle] = field(default_factory=list)
    attribute_uses: list[AttributeUse] = field(default_factory=list)
    base: ComponentRef | None = None
    derivation: str | None = None
    simple: bool = False
    element_only: bool = False
    abstract: bool = False
    substitution_head: QualifiedName | None = None

    @property
    def source_file(self) -> str:
        return self.document.location

    @property
    def target_namespace(self) -> str:
        return self.document.target_namespace

    @property
    def particle_info(self) -> list[tuple[ComponentRef | None, int, float, str]]:
        return [(p.target, p.min_occurs, p.max_occurs, p.compositor) for p in self.particles]


@dataclass(eq=False)
class InnerEntry:
    ref: ComponentRef
    document: SchemaDocument
    node: etree._Element
    qname: QualifiedName


@dataclass
class SourceIndex:
    entries: dict[ComponentRef, SourceEntry] = field(default_factory=dict)
    inner: dict[ComponentRef, InnerEntry] = field(default_factory=dict)
    node_refs: dict[etree._Element, ComponentRef] = field(default_factory=dict)
    documents: list[SchemaDocument] = field(default_factory=list)

    def __getitem__(self, ref: ComponentRef) -> SourceEntry:
        return self.entries[ref]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def namespace_prefixes(self) -> dict[str, dict[str, str]]:
        return {d.location: d.namespace_prefixes for d in self.documents}


@dataclass
class SchemaCatalog:
    entry_files: list[str]
    loaded: dict[str, str]
    substitution_index: dict[QualifiedName, frozenset[QualifiedName]]
    derivation_index: dict[QualifiedName, tuple[QualifiedName, str]]
    type_dependencies: dict[QualifiedName, tuple[QualifiedName, ...]]
    globals: dict[Kind, frozenset[QualifiedName]]

    def has_global(self, kind: Kind, name: QualifiedName) -> bool:
        return name in self.globals[kind]


@dataclass
class LoadResult:
    schema: SchemaSet
    source: SourceIndex
    catalog: SchemaCatalog
    warnings: list[str]

    def __iter__(self):
        return iter((self.schema, self.source, self.catalog, self.warnings))


def _occurs(doc: SchemaDocument, node: etree._Element) -> tuple[int, float]:
    try:
        lo = int(node.get("minOccurs", "1"))
        hi_text = node.get("maxOccurs", "1")
        hi = UNBOUNDED if hi_text == "unbounded" else int(hi_text)
    except ValueError:
        raise LoadError("bad occurrence bound", doc.location, node.sourceline) from None
    return lo, hi


def _children(node: etree._Element) -> list[etree._Element]:
    return [c for c in node if isinstance(c.tag, str)]


class _Loader:
    def __init__(self, options: LoadOptions):
        self.options = options
        self.documents: dict[tuple[str, str], SchemaDocument] = {}
        self._parsed: dict[str, tuple[str, str]] = {}
        self.globals: dict[tuple[Kind, QualifiedName], tuple[SchemaDocument, etree._Element]] = {}
        self.pending_imports: list[tuple[str, SchemaDocument, etree._Element]] = []
        self.warnings: list[str] = []
        self._tolerated: dict[tuple[str, str], int] = defaultdict(int)
        self.builder = SchemaSetBuilder()
        self.source = SourceIndex()
        self.anon_counters: dict[tuple[str, str], int] = defaultdict(int)
        self.derivations: dict[QualifiedName, tuple[QualifiedName, str]] = {}
        self.type_deps: dict[QualifiedName, list[QualifiedName]] = defaultdict(list)
        self.subst_heads: dict[QualifiedName, QualifiedName] = {}
        self.references: list[tuple[SchemaDocument, etree._Element, Kind, QualifiedName]] = []

    # pass 1: documents ---------------------------------------------------

    def _fetch(self, location: str) -> etree._Element:
        parser = etree.XMLParser(remove_blank_text=False, resolve_entities=False, no_network=True)
        try:
            if "://" in location:
                if not self.options.allow_network:
                    raise LoadError("network fetch disabled; map this location in a catalog", location)
                with urllib.request.urlopen(location, timeout=30) as resp:
                    data = resp.read()
                return etree.fromstring(data, parser, base_url=location)
            return etree.parse(location, parser).getroot()
        except OSError as exc:
            raise LoadError(f"cannot read schema document: {exc}", location) from None
        except etree.XMLSyntaxError as exc:
            raise LoadError(f"malformed XML: {exc.msg}", location, exc.lineno) from None

    def _locate(self, doc: SchemaDocument, node: etree._Element, namespace: str | None) -> str | None:
        loc = node.get("schemaLocation")
        catalog = self.options.catalog
        if namespace is not None and namespace in catalog:
            return catalog[namespace]
        if loc is None:
            return None
        loc = loc.strip()
        if loc in catalog:
            return catalog[loc]
        if "://" in doc.location and "://" not in loc:
            return urllib.parse.urljoin(doc.location, loc)
        if "://" in loc:
            return loc
        return os.path.realpath(os.path.join(os.path.dirname(doc.location), loc))

    def load_document(self, location: str, chameleon_ns: str | None = None,
                      expected_ns: str | None = None, origin: tuple[SchemaDocument, etree._Element] | None = None) -> None:
        if "://" not in location:
            location = os.path.realpath(location)
        if chameleon_ns is not None and (location, chameleon_ns) in self.documents:
            return
        if chameleon_ns is None and location in self._parsed:
            if self._parsed[location] in self.documents:
                return
        root = self._fetch(location)
        if root.tag != XS_SCHEMA:
            raise LoadError("root element is not xs:schema", location, root.sourceline)
        declared = root.get("targetNamespace")
        chameleon = False
        if chameleon_ns is not None:
            if declared is None and chameleon_ns != "":
                tns, chameleon = chameleon_ns, True
            elif (declared or "") != chameleon_ns:
                d, n = origin if origin else (None, None)
                raise LoadError(f"included document namespace {declared!r} differs from {chameleon_ns!r}",
                                d.location if d else location, n.sourceline if n is not None else None)
            else:
                tns = declared or ""
        else:
            tns = declared or ""
            if expected_ns is not None and tns != expected_ns:
                d, n = origin if origin else (None, None)
                raise LoadError(f"imported document has targetNamespace {tns!r}, expected {expected_ns!r}",
                                d.location if d else location, n.sourceline if n is not None else None)
        key = (location, tns)
        if chameleon_ns is None:
            self._parsed[location] = key
        if key in self.documents:
            return
        doc = SchemaDocument(
            location=location,
            root=root,
            target_namespace=tns,
            chameleon=chameleon,
            element_qualified=root.get("elementFormDefault") == "qualified",
            attribute_qualified=root.get("attributeFormDefault") == "qualified",
            block_default=root.get("blockDefault"),
            final_default=root.get("finalDefault"),
        )
        self.documents[key] = doc
        self.source.documents.append(doc)
        self._scan_unsupported(doc)
        for child in _children(root):
            tag = child.tag
            if tag == XS_INCLUDE:
                target = self._locate(doc, child, None)
                if target is None:
                    raise LoadError("include without schemaLocation", location, child.sourceline)
                self.load_document(target, chameleon_ns=tns, origin=(doc, child))
            elif tag == XS_IMPORT:
                ns = child.get("namespace", "")
                if ns == XSD_NS:
                    continue
                target = self._locate(doc, child, ns)
                if target is None:
                    self.pending_imports.append((ns, doc, child))
                else:
                    self.load_document(target, expected_ns=ns, origin=(doc, child))
            elif tag in _KIND_TAGS:
                name = child.get("name")
                if not name:
                    raise LoadError(f"global {etree.QName(tag).localname} without a name", location, child.sourceline)
                qn = QualifiedName(tns, name)
                kind = _KIND_TAGS[tag]
                prev = self.globals.get((kind, qn))
                if prev is not None:
                    pdoc, pnode = prev
                    raise LoadError(f"duplicate global {kind.name.lower()} {qn} (first defined at "
                                    f"{pdoc.location}:{pnode.sourceline})", location, child.sourceline)
                self.globals[(kind, qn)] = (doc, child)
            elif tag == XS_ANNOTATION:
                self._tolerate(doc, "annotation")
            elif tag in _UNSUPPORTED:
                raise LoadError(f"unsupported construct: {_UNSUPPORTED[tag]}", location, child.sourceline)
            else:
                raise LoadError(f"unexpected top-level element {child.tag}", location, child.sourceline)

    def _scan_unsupported(self, doc: SchemaDocument) -> None:
        for node in doc.root.iter(*_UNSUPPORTED):
            raise LoadError(f"unsupported construct: {_UNSUPPORTED[node.tag]}", doc.location, node.sourceline)

    def _tolerate(self, doc: SchemaDocument, what: str) -> None:
        self._tolerated[(doc.location, what)] += 1

    # pass 2: components ---------------------------------------------------

    def build(self) -> None:
        for ns, doc, node in self.pending_imports:
            if not any(d.target_namespace == ns for d in self.documents.values()):
                raise LoadError(f"unresolved import of namespace {ns!r} (no schemaLocation or catalog entry)",
                                doc.location, node.sourceline)
        ordered = sorted(self.globals.items(),
                         key=lambda kv: (_KIND_ORDER.index(kv[0][0]), kv[0][1].namespace, kv[0][1].local))
        for (kind, qn), (doc, node) in ordered:
            ref = ComponentRef.global_(kind, qn)
            if kind is Kind.TYPE:
                self._type(ref, doc, node)
            elif kind is Kind.ELEMENT:
                self._global_decl(ref, doc, node)
            elif kind is Kind.ATTRIBUTE:
                self._global_decl(ref, doc, node)
            elif kind is Kind.MODEL_GROUP:
                self._model_group(ref, doc, node)
            else:
                self._attribute_group(ref, doc, node)
        for doc, node, kind, qn in self.references:
            if not self._exists(kind, qn):
                what = {Kind.TYPE: "type", Kind.ELEMENT: "element", Kind.ATTRIBUTE: "attribute",
                        Kind.MODEL_GROUP: "group", Kind.ATTRIBUTE_GROUP: "attributeGroup"}[kind]
                raise LoadError(f"unresolved {what} reference {qn}", doc.location, node.sourceline)
        self._implicit_substitution_types()
        for (location, what), count in sorted(self._tolerated.items()):
            if what == "annotation":
                continue
            self.warnings.append(f"{location}: {count} {what} construct(s) kept verbatim, outside the relation model")

    def _exists(self, kind: Kind, qn: QualifiedName) -> bool:
        if kind is Kind.TYPE and qn.namespace == XSD_NS:
            return qn.local in BUILTIN_TYPES
        return (kind, qn) in self.globals

    def _need(self, doc: SchemaDocument, node: etree._Element, kind: Kind, qn: QualifiedName) -> ComponentRef:
        self.references.append((doc, node, kind, qn))
        return ComponentRef.global_(kind, qn)

    def _type_value(self, doc: SchemaDocument, node: etree._Element, attr: str = "type") -> ComponentRef | None:
        value = node.get(attr)
        if value is None:
            return None
        qn = doc.resolve_qname(node, value)
        return self._need(doc, node, Kind.TYPE, qn)

    def _anon_name(self, doc: SchemaDocument, owner: str) -> QualifiedName:
        key = (doc.target_namespace, owner)
        self.anon_counters[key] += 1
        return QualifiedName(ANON_NS_PREFIX + doc.target_namespace, f"{owner}..anon{self.anon_counters[key]}")

    def _relate(self, relation: Relation, x: ComponentRef, y: ComponentRef) -> None:
        if y.kind is Kind.TYPE and y.name == ANY_TYPE:
            return
        self.builder.add_relation(relation, x, y)

    def _decl_type(self, decl: ComponentRef, doc: SchemaDocument, node: etree._Element, owner: str) -> None:
        """Record isOfType for an element/attribute declaration, named or inline."""
        named = self._type_value(doc, node)
        inline = [c for c in _children(node) if c.tag in (XS_COMPLEX_TYPE, XS_SIMPLE_TYPE)]
        if named is not None and inline:
            raise LoadError("declaration has both a type attribute and an inline type", doc.location, node.sourceline)
        if named is not None:
            self._relate(Relation.IS_OF_TYPE, decl, named)
        elif inline:
            anon = ComponentRef.global_(Kind.TYPE, self._anon_name(doc, owner))
            self._type(anon, doc, inline[0], owner=decl)
            self._relate(Relation.IS_OF_TYPE, decl, anon)

    def _global_decl(self, ref: ComponentRef, doc: SchemaDocument, node: etree._Element) -> None:
        entry = SourceEntry(ref, doc, node, abstract=node.get("abstract") in ("true", "1"))
        self.source.entries[ref] = entry
        self.builder.add_component(ref)
        if node.get("ref") is not None:
            raise LoadError("global declaration cannot use ref", doc.location, node.sourceline)
        owner = ref.name.local if ref.kind is Kind.ELEMENT else f"{ref.name.local}..attribute"
        self._decl_type(ref, doc, node, owner)
        if ref.kind is Kind.ELEMENT:
            head = node.get("substitutionGroup")
            if head:
                head_qn = doc.resolve_qname(node, head)
                entry.substitution_head = head_qn
                self.subst_heads[ref.name] = head_qn
                self._relate(Relation.IS_IN_SUBSTITUTION_GROUP, ref, self._need(doc, node, Kind.ELEMENT, head_qn))
            self._identity_constraints(doc, node)

    def _identity_constraints(self, doc: SchemaDocument, node: etree._Element) -> None:
        for c in _children(node):
            if c.tag in IDENTITY_TAGS:
                self._tolerate(doc, "identity-constraint")

    def _implicit_substitution_types(self) -> None:
        # A member declared without a type takes its head's type.
        for member, head in sorted(self.subst_heads.items()):
            ref = ComponentRef.global_(Kind.ELEMENT, member)
            if self.builder.type_of(ref) is not None:
                continue
            node = self.globals[(Kind.ELEMENT, member)][1]
            if any(c.tag in (XS_COMPLEX_TYPE, XS_SIMPLE_TYPE) for c in _children(node)):
                continue
            seen = {member}
            cursor = head
            while cursor is not None and cursor not in seen:
                seen.add(cursor)
                t = self.builder.type_of(ComponentRef.global_(Kind.ELEMENT, cursor))
                if t is not None:
                    self._relate(Relation.IS_OF_TYPE, ref, t)
                    break
                cursor = self.subst_heads.get(cursor)

    def _type(self, ref: ComponentRef, doc: SchemaDocument, node: etree._Element,
              owner: ComponentRef | None = None) -> None:
        entry = SourceEntry(ref, doc, node, owner=owner, abstract=node.get("abstract") in ("true", "1"))
        self.source.entries[ref] = entry
        if ref.is_anonymous:
            self.source.node_refs[node] = ref
        self.builder.add_component(ref)
        if node.tag == XS_SIMPLE_TYPE:
            entry.simple = True
            self._simple_type(ref, entry, doc, node)
            return
        ords: dict[tuple[Kind, str], int] = defaultdict(int)
        body = node
        for child in _children(node):
            if child.tag in (XS_SIMPLE_CONTENT, XS_COMPLEX_CONTENT):
                deriv = [c for c in _children(child) if c.tag in (XS_EXTENSION, XS_RESTRICTION)]
                if len(deriv) != 1:
                    raise LoadError("content needs exactly one extension or restriction", doc.location, child.sourceline)
                body = deriv[0]
                entry.simple = child.tag == XS_SIMPLE_CONTENT
                entry.derivation = "extension" if body.tag == XS_EXTENSION else "restriction"
                base = self._type_value(doc, body, "base")
                if base is None:
                    raise LoadError("derivation without base", doc.location, body.sourceline)
                if base.name != ANY_TYPE:
                    entry.base = base
                    self.derivations[ref.name] = (base.name, entry.derivation)
                    self._relate(Relation.IS_DERIVED_FROM, ref, base)
                for c in _children(body):
                    if c.tag == XS_SIMPLE_TYPE:
                        anon = ComponentRef.global_(Kind.TYPE, self._anon_name(doc, f"{ref.name.local}..type"))
                        self._type(anon, doc, c, owner=ref)
                        self.type_deps[ref.name].append(anon.name)
        self._content(ref, entry, doc, body, ords)

    def _content(self, ref: ComponentRef, entry: SourceEntry, doc: SchemaDocument,
                 body: etree._Element, ords: dict) -> None:
        for child in _children(body):
            tag = child.tag
            if tag in COMPOSITOR_TAGS or tag == XS_GROUP:
                entry.element_only = True
                self._particles(ref, entry, doc, child, tag, ords)
            elif tag in (XS_ATTRIBUTE, XS_ATTRIBUTE_GROUP, XS_ANY_ATTRIBUTE):
                self._attribute_use(ref, entry, doc, child, ords)
            elif tag == XS_ANNOTATION:
                self._tolerate(doc, "annotation")

    def _simple_type(self, ref: ComponentRef, entry: SourceEntry, doc: SchemaDocument, node: etree._Element) -> None:
        owner = f"{ref.name.local}..type"
        for child in _children(node):
            if child.tag == XS_RESTRICTION:
                entry.derivation = "restriction"
                base = self._type_value(doc, child, "base")
                inline = [c for c in _children(child) if c.tag == XS_SIMPLE_TYPE]
                if inline:
                    base = ComponentRef.global_(Kind.TYPE, self._anon_name(doc, owner))
                    self._type(base, doc, inline[0], owner=ref)
                if base is None:
                    raise LoadError("simpleType restriction without base", doc.location, child.sourceline)
                entry.base = base
                self.derivations[ref.name] = (base.name, "restriction")
                self._relate(Relation.IS_DERIVED_FROM, ref, base)
            elif child.tag == XS_LIST:
                item = self._type_value(doc, child, "itemType")
                if item is not None:
                    self.builder.add_component(item)
                    self.type_deps[ref.name].append(item.name)
                for c in _children(child):
                    if c.tag == XS_SIMPLE_TYPE:
                        anon = ComponentRef.global_(Kind.TYPE, self._anon_name(doc, owner))
                        self._type(anon, doc, c, owner=ref)
                        self.type_deps[ref.name].append(anon.name)
            elif child.tag == XS_UNION:
                for value in (child.get("memberTypes") or "").split():
                    qn = doc.resolve_qname(child, value)
                    member = self._need(doc, child, Kind.TYPE, qn)
                    if member.name != ANY_TYPE:
                        self.builder.add_component(member)
                    self.type_deps[ref.name].append(qn)
                for c in _children(child):
                    if c.tag == XS_SIMPLE_TYPE:
                        anon = ComponentRef.global_(Kind.TYPE, self._anon_name(doc, owner))
                        self._type(anon, doc, c, owner=ref)
                        self.type_deps[ref.name].append(anon.name)

    def _inner_owner(self, container: ComponentRef, local: str, ordinal: int) -> str:
        stem = container.name.local
        if container.kind is Kind.MODEL_GROUP:
            stem += "..group"
        elif container.kind is Kind.ATTRIBUTE_GROUP:
            stem += "..attributeGroup"
        return f"{stem}.{local}" + (f".{ordinal}" if ordinal else "")

    def _particles(self, container: ComponentRef, entry: SourceEntry, doc: SchemaDocument,
                   node: etree._Element, compositor: str, ords: dict) -> None:
        tag = node.tag
        if compositor not in COMPOSITOR_TAGS:
            compositor = XS_SEQUENCE
        comp_name = etree.QName(compositor).localname
        if tag in COMPOSITOR_TAGS:
            _occurs(doc, node)
            for child in _children(node):
                if child.tag in (XS_ELEMENT, XS_GROUP, XS_ANY) or child.tag in COMPOSITOR_TAGS:
                    self._particles(container, entry, doc, child, child.tag if child.tag in COMPOSITOR_TAGS else tag, ords)
            return
        lo, hi = _occurs(doc, node)
        if tag == XS_ELEMENT:
            ref_value = node.get("ref")
            if ref_value is not None:
                qn = doc.resolve_qname(node, ref_value)
                target = self._need(doc, node, Kind.ELEMENT, qn)
                self.builder.add_relation(Relation.REFERENCE, container, target)
                entry.particles.append(Particle("element", target, True, qn, lo, hi, comp_name, node))
                return
            name = node.get("name")
            if not name:
                raise LoadError("local element needs name or ref", doc.location, node.sourceline)
            form = node.get("form")
            qualified = form == "qualified" if form else doc.element_qualified
            qn = QualifiedName(doc.target_namespace if qualified else "", name)
            ordinal = ords[(Kind.ELEMENT, name)]
            ords[(Kind.ELEMENT, name)] += 1
            inner = ComponentRef.inner(Kind.ELEMENT, container, name, ordinal)
            self.builder.add_relation(Relation.CONTAINS, container, inner)
            self.source.inner[inner] = InnerEntry(inner, doc, node, qn)
            self.source.node_refs[node] = inner
            entry.particles.append(Particle("element", inner, False, qn, lo, hi, comp_name, node))
            self._decl_type(inner, doc, node, self._inner_owner(container, name, ordinal))
            self._identity_constraints(doc, node)
        elif tag == XS_GROUP:
            ref_value = node.get("ref")
            if ref_value is None:
                raise LoadError("group particle needs ref", doc.location, node.sourceline)
            target = self._need(doc, node, Kind.MODEL_GROUP, doc.resolve_qname(node, ref_value))
            self.builder.add_relation(Relation.REFERENCE, container, target)
            entry.particles.append(Particle("group", target, True, None, lo, hi, comp_name, node))
        elif tag == XS_ANY:
            self._tolerate(doc, "wildcard")
            entry.particles.append(Particle("any", None, False, None, lo, hi, comp_name, node))

    def _attribute_use(self, container: ComponentRef, entry: SourceEntry, doc: SchemaDocument,
                       node: etree._Element, ords: dict) -> None:
        tag = node.tag
        if tag == XS_ANY_ATTRIBUTE:
            self._tolerate(doc, "wildcard")
            entry.attribute_uses.append(AttributeUse("anyAttribute", None, False, None, "optional", node))
            return
        ref_value = node.get("ref")
        if tag == XS_ATTRIBUTE_GROUP:
            if ref_value is None:
                raise LoadError("attributeGroup use needs ref", doc.location, node.sourceline)
            target = self._need(doc, node, Kind.ATTRIBUTE_GROUP, doc.resolve_qname(node, ref_value))
            self.builder.add_relation(Relation.REFERENCE, container, target)
            entry.attribute_uses.append(AttributeUse("attributeGroup", target, True, None, "optional", node))
            return
        use = node.get("use", "optional")
        if ref_value is not None:
            qn = doc.resolve_qname(node, ref_value)
            target = self._need(doc, node, Kind.ATTRIBUTE, qn)
            self.builder.add_relation(Relation.REFERENCE, container, target)
            entry.attribute_uses.append(AttributeUse("attribute", target, True, qn, use, node))
            return
        name = node.get("name")
        if not name:
            raise LoadError("local attribute needs name or ref", doc.location, node.sourceline)
        form = node.get("form")
        qualified = form == "qualified" if form else doc.attribute_qualified
        qn = QualifiedName(doc.target_namespace if qualified else "", name)
        ordinal = ords[(Kind.ATTRIBUTE, name)]
        ords[(Kind.ATTRIBUTE, name)] += 1
        inner = ComponentRef.inner(Kind.ATTRIBUTE, container, name, ordinal)
        self.builder.add_relation(Relation.CONTAINS, container, inner)
        self.source.inner[inner] = InnerEntry(inner, doc, node, qn)
        self.source.node_refs[node] = inner
        entry.attribute_uses.append(AttributeUse("attribute", inner, False, qn, use, node))
        self._decl_type(inner, doc, node, self._inner_owner(container, name, ordinal))

    def _model_group(self, ref: ComponentRef, doc: SchemaDocument, node: etree._Element) -> None:
        entry = SourceEntry(ref, doc, node)
        self.source.entries[ref] = entry
        self.builder.add_component(ref)
        bodies = [c for c in _children(node) if c.tag in COMPOSITOR_TAGS]
        if len(bodies) != 1:
            raise LoadError("model group definition needs exactly one compositor", doc.location, node.sourceline)
        self._particles(ref, entry, doc, bodies[0], bodies[0].tag, defaultdict(int))

    def _attribute_group(self, ref: ComponentRef, doc: SchemaDocument, node: etree._Element) -> None:
        entry = SourceEntry(ref, doc, node)
        self.source.entries[ref] = entry
        self.builder.add_component(ref)
        ords: dict = defaultdict(int)
        for child in _children(node):
            if child.tag in (XS_ATTRIBUTE, XS_ATTRIBUTE_GROUP, XS_ANY_ATTRIBUTE):
                self._attribute_use(ref, entry, doc, child, ords)

    # catalog -----------------------------------------------------------------

    def catalog(self, entry_files: Sequence[str]) -> SchemaCatalog:
        heads: dict[QualifiedName, set[QualifiedName]] = defaultdict(set)
        for member, head in self.subst_heads.items():
            seen = {member}
            cursor: QualifiedName | None = head
            while cursor is not None and cursor not in seen:
                heads[cursor].add(member)
                seen.add(cursor)
                cursor = self.subst_heads.get(cursor)
        by_kind: dict[Kind, set[QualifiedName]] = {k: set() for k in Kind}
        for kind, qn in self.globals:
            by_kind[kind].add(qn)
        loaded = {f"{tns}|{loc}": "loaded" for (loc, tns) in self.documents}
        return SchemaCatalog(
            entry_files=list(entry_files),
            loaded=loaded,
            substitution_index={h: frozenset(m) for h, m in heads.items()},
            derivation_index=dict(self.derivations),
            type_dependencies={k: tuple(v) for k, v in self.type_deps.items()},
            globals={k: frozenset(v) for k, v in by_kind.items()},
        )


def load_schema_set(entry_files: Iterable[str | os.PathLike], options: LoadOptions | None = None) -> LoadResult:
    """Load every document reachable from ``entry_files``.

    Returns the full schema set, its source index, the lookup catalog and a
    list of warnings for constructs kept verbatim but not modelled
    (wildcards, identity constraints).
    """
    options = options or LoadOptions()
    files = [str(f) for f in entry_files]
    loader = _Loader(options)
    for f in files:
        loader.load_document(f if "://" in f else os.path.realpath(f))
    loader.build()
    return LoadResult(loader.builder.build(), loader.source, loader.catalog(files), loader.warnings)


def resolve_type(catalog: SchemaCatalog, name: QualifiedName) -> ComponentRef:
    if name.namespace == XSD_NS:
        if name.local in BUILTIN_TYPES:
            return ComponentRef.global_(Kind.TYPE, name)
    elif catalog.has_global(Kind.TYPE, name):
        return ComponentRef.global_(Kind.TYPE, name)
    raise UnknownComponentError(f"unknown type {name}")


def substitution_members(catalog: SchemaCatalog, head: QualifiedName) -> frozenset[QualifiedName]:
    if not catalog.has_global(Kind.ELEMENT, head):
        raise UnknownComponentError(f"{head} is not a global element")
    return catalog.substitution_index.get(head, frozenset())
