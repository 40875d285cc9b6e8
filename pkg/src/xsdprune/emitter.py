"""Write a retained schema set back out as XSD files, one per namespace.

Every retained global component is re-emitted from its original subtree
in the :class:`~xsdprune.loader.SourceIndex`.  Particles and attribute
uses whose declaration (or reference) did not survive are removed, which
is only legal when they are optional; dropping a required particle is an
:class:`~xsdprune.errors.EmitError`.  QName-valued attributes are rewritten
against one prefix map per output file, so fragments from many source
documents can share an output document.
"""
from __future__ import annotations

import copy
import datetime as _dt
import json
import os
import re
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from lxml import etree

from .errors import EmitError
from .loader import (
    COMPOSITOR_TAGS,
    IDENTITY_TAGS,
    UNBOUNDED,
    XS_ALL,
    XS_ANNOTATION,
    XS_ANY,
    XS_ANY_ATTRIBUTE,
    XS_ATTRIBUTE,
    XS_ATTRIBUTE_GROUP,
    XS_CHOICE,
    XS_COMPLEX_CONTENT,
    XS_COMPLEX_TYPE,
    XS_ELEMENT,
    XS_EXTENSION,
    XS_GROUP,
    XS_RESTRICTION,
    XS_SEQUENCE,
    XS_SIMPLE_CONTENT,
    XS_SIMPLE_TYPE,
    SchemaDocument,
    SourceIndex,
    _occurs,
)
from .model import (
    ANY_TYPE,
    XML_NS,
    XSD_NS,
    ComponentRef,
    Kind,
    QualifiedName,
    Relation,
    SchemaSet,
    consistency_check,
    element_ref,
)

_XS = f"{{{XSD_NS}}}"
_QNAME_ATTRS = frozenset({"type", "ref", "base", "substitutionGroup", "itemType", "refer"})
_KIND_ORDER = [Kind.TYPE, Kind.ELEMENT, Kind.ATTRIBUTE, Kind.MODEL_GROUP, Kind.ATTRIBUTE_GROUP]
_XPATH_NAME = re.compile(r"(@?)(?:([A-Za-z_][\w.\-]*):)?([A-Za-z_][\w.\-]*|\*)")


@dataclass
class EmitOptions:
    manifest: bool = True
    timestamp: bool = False


@dataclass
class EmitPlan:
    per_namespace: dict[str, str]
    retained: SchemaSet
    pruned_particles: list[tuple[ComponentRef, str, str]] = field(default_factory=list)
    required_drop_warnings: list[str] = field(default_factory=list)

    def manifest(self, timestamp: bool = False) -> dict:
        reasons = Counter(reason for _, _, reason in self.pruned_particles)
        data = {
            "files": [{"file": f, "namespace": ns} for ns, f in sorted(self.per_namespace.items(), key=lambda kv: kv[1])],
            "namespaces": sorted(self.per_namespace),
            "pruned": {"total": len(self.pruned_particles), "by_reason": dict(sorted(reasons.items()))},
            "warnings": list(self.required_drop_warnings),
        }
        if timestamp:
            data["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        return data


def _sanitize(prefix: str) -> str:
    cleaned = re.sub(r"[^\w.\-]", "_", prefix)
    return cleaned if cleaned and not cleaned[0].isdigit() else f"ns_{cleaned}"


class _Emitter:
    def __init__(self, retained: SchemaSet, source: SourceIndex):
        self.r = retained
        self.src = source
        self.contains = retained.relation(Relation.CONTAINS)
        self.refs = retained.relation(Relation.REFERENCE)
        self.of_type = retained.relation(Relation.IS_OF_TYPE)
        self.subst = retained.relation(Relation.IS_IN_SUBSTITUTION_GROUP)
        self.prefixes = self._choose_prefixes()
        self.used: set[str] = set()
        self.plan = EmitPlan({}, retained)
        self.element_names, self.attribute_names = self._retained_names()
        self.kept_identity: set[QualifiedName] = set()

    # naming ------------------------------------------------------------------

    def _namespaces(self) -> set[str]:
        out = set()
        for c in self.r.all_components():
            if c.is_global and not c.is_builtin and not c.is_anonymous:
                out.add(c.name.namespace)
        return out

    def _choose_prefixes(self) -> dict[str, str]:
        wanted: dict[str, str] = {XML_NS: "xml"}
        for doc in self.src.documents:
            for prefix, uri in doc.namespace_prefixes.items():
                if prefix and uri not in wanted and uri != XSD_NS and prefix not in ("xs", "xml"):
                    wanted[uri] = _sanitize(prefix)
        taken = {"xs", "xml"}
        out = {XSD_NS: "xs", XML_NS: "xml"}
        counter = 0
        for uri in sorted(set(wanted) | self._namespaces() - {""}):
            if uri in out:
                continue
            prefix = wanted.get(uri)
            if prefix is None or prefix in taken:
                counter += 1
                prefix = f"ns{counter}"
                while prefix in taken:
                    counter += 1
                    prefix = f"ns{counter}"
            taken.add(prefix)
            out[uri] = prefix
        return out

    def file_names(self) -> dict[str, str]:
        names: dict[str, str] = {}
        used = set()
        for ns in sorted(self._namespaces()):
            stem = "no-namespace" if ns == "" else self.prefixes[ns]
            name = f"{stem}.xsd"
            k = 1
            while name in used:
                k += 1
                name = f"{stem}-{k}.xsd"
            used.add(name)
            names[ns] = name
        return names

    def _retained_names(self) -> tuple[set[QualifiedName], set[QualifiedName]]:
        elems, attrs = set(), set()
        for c in self.r.elements:
            elems.add(c.name if c.is_global else self.src.inner[c].qname)
        for c in self.r.attributes:
            attrs.add(c.name if c.is_global else self.src.inner[c].qname)
        return elems, attrs

    def q(self, qn: QualifiedName) -> str:
        if qn.namespace == "":
            return qn.local
        self.used.add(qn.namespace)
        return f"{self.prefixes[qn.namespace]}:{qn.local}"

    # copying -------------------------------------------------------------------

    def shallow(self, doc: SchemaDocument, node: etree._Element) -> etree._Element:
        new = etree.Element(node.tag)
        for key, value in node.attrib.items():
            if key in _QNAME_ATTRS:
                value = self.q(doc.resolve_qname(node, value))
            elif key == "memberTypes":
                value = " ".join(self.q(doc.resolve_qname(node, v)) for v in value.split())
            elif key == "xpath":
                value = self._rewrite_xpath(doc, node, value)
            new.set(key, value)
        return new

    def _rewrite_xpath(self, doc: SchemaDocument, node: etree._Element, xpath: str) -> str:
        def repl(m: re.Match) -> str:
            at, prefix, local = m.groups()
            if prefix is None:
                return m.group(0)
            qn = doc.resolve_qname(node, f"{prefix}:{local if local != '*' else 'x'}")
            out = self.q(qn)
            if local == "*":
                out = out[:-1] + "*"
            return at + out
        return _XPATH_NAME.sub(repl, xpath)

    def verbatim(self, doc: SchemaDocument, node: etree._Element) -> etree._Element:
        if node.tag == XS_ANNOTATION:
            dup = copy.deepcopy(node)
            dup.tail = None
            return dup
        new = self.shallow(doc, node)
        if len(node) == 0 and node.text and node.text.strip():
            new.text = node.text
        for child in node:
            if isinstance(child.tag, str):
                new.append(self.verbatim(doc, child))
        return new

    # particles ---------------------------------------------------------------

    def _element_kept(self, doc: SchemaDocument, node: etree._Element, container: ComponentRef) -> bool:
        ref = node.get("ref")
        if ref is not None:
            return (container, element_ref(doc.resolve_qname(node, ref))) in self.refs
        return (container, self.src.node_refs[node]) in self.contains

    def _group_kept(self, doc: SchemaDocument, node: etree._Element, container: ComponentRef) -> bool:
        target = ComponentRef.global_(Kind.MODEL_GROUP, doc.resolve_qname(node, node.get("ref")))
        return (container, target) in self.refs

    def _used(self, doc: SchemaDocument, node: etree._Element, container: ComponentRef) -> bool:
        tag = node.tag
        if tag == XS_ELEMENT:
            return self._element_kept(doc, node, container)
        if tag == XS_GROUP:
            return self._group_kept(doc, node, container)
        if tag in COMPOSITOR_TAGS:
            return any(self._used(doc, c, container) for c in node if isinstance(c.tag, str))
        return False

    def _emptiable(self, doc: SchemaDocument, node: etree._Element) -> bool:
        lo, _ = _occurs(doc, node)
        if lo == 0:
            return True
        tag = node.tag
        kids = [c for c in node if isinstance(c.tag, str) and c.tag != XS_ANNOTATION]
        if tag in (XS_SEQUENCE, XS_ALL):
            return all(self._emptiable(doc, c) for c in kids)
        if tag == XS_CHOICE:
            return any(self._emptiable(doc, c) for c in kids)
        return False

    def _drop(self, container: ComponentRef, what: str, reason: str) -> None:
        self.plan.pruned_particles.append((container, what, reason))

    def particle(self, doc: SchemaDocument, node: etree._Element, container: ComponentRef,
                 droppable: bool) -> etree._Element | None:
        tag = node.tag
        lo, _ = _occurs(doc, node)
        if tag == XS_ANY:
            return self.verbatim(doc, node)
        if tag in (XS_ELEMENT, XS_GROUP):
            kept = self._element_kept(doc, node, container) if tag == XS_ELEMENT else self._group_kept(doc, node, container)
            label = node.get("ref") or node.get("name")
            if kept:
                return self.local_element(doc, node, container) if tag == XS_ELEMENT else self.shallow_with_annotation(doc, node)
            if lo == 0 or droppable:
                self._drop(container, label, "optional particle not used by the corpus")
                return None
            raise EmitError(f"pruning would remove required particle {label!r} from {container}")
        if tag not in COMPOSITOR_TAGS:
            return None
        kids = [c for c in node if isinstance(c.tag, str)]
        has_wildcard = next(node.iter(XS_ANY), None) is not None
        if not has_wildcard and not self._used(doc, node, container):
            if lo == 0 or droppable or self._emptiable(doc, node):
                self._drop(container, etree.QName(tag).localname, "compositor with no used content")
                return None
        new = self.shallow(doc, node)
        if tag == XS_CHOICE:
            for c in kids:
                if c.tag == XS_ANNOTATION:
                    new.append(self.verbatim(doc, c))
                    continue
                r = self.particle(doc, c, container, droppable=True)
                if r is not None:
                    new.append(r)
            if not any(c.tag != XS_ANNOTATION for c in new):
                if lo == 0 or droppable:
                    return None
                emptiable = [c for c in kids if c.tag != XS_ANNOTATION and self._emptiable(doc, c)]
                if not emptiable:
                    raise EmitError(f"choice in {container} would lose every branch")
                new.append(etree.Element(XS_SEQUENCE))
            return new
        for c in kids:
            if c.tag == XS_ANNOTATION:
                new.append(self.verbatim(doc, c))
                continue
            r = self.particle(doc, c, container, droppable=False)
            if r is not None:
                new.append(r)
        if not any(c.tag != XS_ANNOTATION for c in new) and (lo == 0 or droppable):
            return None
        return new

    def shallow_with_annotation(self, doc: SchemaDocument, node: etree._Element) -> etree._Element:
        new = self.shallow(doc, node)
        for c in node:
            if isinstance(c.tag, str) and c.tag == XS_ANNOTATION:
                new.append(self.verbatim(doc, c))
        return new

    # declarations ------------------------------------------------------------

    def _decl_attrs(self, doc: SchemaDocument, node: etree._Element, decl: ComponentRef, new: etree._Element,
                    local: bool) -> None:
        if node.get("type") is not None:
            declared = next((t for x, t in self.of_type if x == decl), None) if decl in self._typed else None
            if declared is None:
                del new.attrib["type"]
        if local and node.get("ref") is None and node.get("form") is None:
            qualified = doc.element_qualified if node.tag == XS_ELEMENT else doc.attribute_qualified
            if qualified != self._form_default(node.tag):
                new.set("form", "qualified" if qualified else "unqualified")
        if not local:
            for attr, default in (("block", doc.block_default), ("final", doc.final_default)):
                if default and node.get(attr) is None and self._schema_defaults.get(attr) != default:
                    if node.tag in (XS_ELEMENT, XS_COMPLEX_TYPE) or attr == "final":
                        new.set(attr, default)

    def local_element(self, doc: SchemaDocument, node: etree._Element, container: ComponentRef) -> etree._Element:
        new = self.shallow(doc, node)
        if node.get("ref") is not None:
            for c in node:
                if isinstance(c.tag, str) and c.tag == XS_ANNOTATION:
                    new.append(self.verbatim(doc, c))
            return new
        decl = self.src.node_refs[node]
        self._decl_attrs(doc, node, decl, new, local=True)
        self._decl_children(doc, node, decl, new)
        return new

    def _decl_children(self, doc: SchemaDocument, node: etree._Element, decl: ComponentRef,
                       new: etree._Element) -> None:
        for c in node:
            if not isinstance(c.tag, str):
                continue
            if c.tag == XS_ANNOTATION:
                new.append(self.verbatim(doc, c))
            elif c.tag in (XS_COMPLEX_TYPE, XS_SIMPLE_TYPE):
                anon = self.src.node_refs[c]
                if (decl, anon) not in self.of_type:
                    continue
                new.append(self.type_body(doc, c, anon))
            elif c.tag in IDENTITY_TAGS:
                kept = self.identity(doc, c)
                if kept is not None:
                    new.append(kept)

    def identity(self, doc: SchemaDocument, node: etree._Element) -> etree._Element | None:
        name = QualifiedName(doc.target_namespace, node.get("name"))
        if name not in self.kept_identity:
            self.plan.required_drop_warnings.append(
                f"identity constraint {name} dropped: its paths name components that were pruned")
            return None
        return self.verbatim(doc, node)

    def _identity_ok(self, doc: SchemaDocument, node: etree._Element) -> bool:
        for part in node:
            if not isinstance(part.tag, str) or part.tag == XS_ANNOTATION:
                continue
            for alt in (part.get("xpath") or "").split("|"):
                for m in _XPATH_NAME.finditer(alt):
                    at, prefix, local = m.groups()
                    if local == "*":
                        continue
                    ns = ""
                    if prefix is not None:
                        try:
                            ns = doc.resolve_qname(part, f"{prefix}:{local}").namespace
                        except Exception:
                            return False
                    qn = QualifiedName(ns, local)
                    if qn not in (self.attribute_names if at else self.element_names):
                        return False
        refer = node.get("refer")
        if refer is not None and doc.resolve_qname(node, refer) not in self.kept_identity:
            return False
        return True

    def _compute_identity(self) -> None:
        nodes = []
        for c in sorted(self.r.elements):
            if c.is_global:
                entry = self.src.entries.get(c)
                if entry is None:
                    continue
                doc, el = entry.document, entry.fragment
            else:
                inner = self.src.inner[c]
                doc, el = inner.document, inner.node
            for ic in el:
                if isinstance(ic.tag, str) and ic.tag in IDENTITY_TAGS:
                    nodes.append((doc, ic))
        changed = True
        while changed:
            changed = False
            for doc, ic in nodes:
                name = QualifiedName(doc.target_namespace, ic.get("name"))
                if name not in self.kept_identity and self._identity_ok(doc, ic):
                    self.kept_identity.add(name)
                    changed = True

    def attribute_use(self, doc: SchemaDocument, node: etree._Element, container: ComponentRef) -> etree._Element | None:
        tag = node.tag
        if tag == XS_ANY_ATTRIBUTE:
            return self.verbatim(doc, node)
        ref = node.get("ref")
        if tag == XS_ATTRIBUTE_GROUP:
            target = ComponentRef.global_(Kind.ATTRIBUTE_GROUP, doc.resolve_qname(node, ref))
            if (container, target) in self.refs:
                return self.shallow_with_annotation(doc, node)
            self._drop(container, ref, "attribute group not used by the corpus")
            return None
        use = node.get("use", "optional")
        if ref is not None:
            target = ComponentRef.global_(Kind.ATTRIBUTE, doc.resolve_qname(node, ref))
            kept = (container, target) in self.refs
        else:
            kept = (container, self.src.node_refs[node]) in self.contains
        label = ref or node.get("name")
        if kept:
            new = self.shallow(doc, node)
            if ref is None:
                decl = self.src.node_refs[node]
                self._decl_attrs(doc, node, decl, new, local=True)
                self._decl_children(doc, node, decl, new)
            else:
                for c in node:
                    if isinstance(c.tag, str) and c.tag == XS_ANNOTATION:
                        new.append(self.verbatim(doc, c))
            return new
        if use == "required":
            raise EmitError(f"pruning would remove required attribute {label!r} from {container}")
        self._drop(container, label, "optional attribute not used by the corpus")
        return None

    # types -----------------------------------------------------------------

    def type_body(self, doc: SchemaDocument, node: etree._Element, ref: ComponentRef) -> etree._Element:
        if node.tag == XS_SIMPLE_TYPE:
            self._check_simple_deps(ref)
            return self.verbatim(doc, node)
        base_pair = [(x, y) for x, y in self.r.relation(Relation.IS_DERIVED_FROM) if x == ref]
        new = self.shallow(doc, node)
        for c in node:
            if not isinstance(c.tag, str):
                continue
            if c.tag in (XS_SIMPLE_CONTENT, XS_COMPLEX_CONTENT):
                content = self.shallow(doc, c)
                for d in c:
                    if not isinstance(d.tag, str):
                        continue
                    if d.tag == XS_ANNOTATION:
                        content.append(self.verbatim(doc, d))
                        continue
                    base = doc.resolve_qname(d, d.get("base"))
                    if base != ANY_TYPE and not base_pair:
                        raise EmitError(f"base type {base} of {ref} is not retained")
                    content.append(self._derivation(doc, d, ref, simple=c.tag == XS_SIMPLE_CONTENT))
                new.append(content)
            else:
                self._content_item(doc, c, ref, new)
        return new

    def _derivation(self, doc: SchemaDocument, node: etree._Element, ref: ComponentRef, simple: bool) -> etree._Element:
        new = self.shallow(doc, node)
        for c in node:
            if not isinstance(c.tag, str):
                continue
            if simple and c.tag not in (XS_ATTRIBUTE, XS_ATTRIBUTE_GROUP, XS_ANY_ATTRIBUTE):
                if c.tag == XS_SIMPLE_TYPE:
                    self._check_simple_deps(self.src.node_refs[c])
                new.append(self.verbatim(doc, c))
            else:
                self._content_item(doc, c, ref, new)
        return new

    def _content_item(self, doc: SchemaDocument, c: etree._Element, ref: ComponentRef, new: etree._Element) -> None:
        if c.tag == XS_ANNOTATION:
            new.append(self.verbatim(doc, c))
        elif c.tag in COMPOSITOR_TAGS or c.tag == XS_GROUP:
            r = self.particle(doc, c, ref, droppable=False)
            if r is not None:
                new.append(r)
        elif c.tag in (XS_ATTRIBUTE, XS_ATTRIBUTE_GROUP, XS_ANY_ATTRIBUTE):
            r = self.attribute_use(doc, c, ref)
            if r is not None:
                new.append(r)
        else:
            new.append(self.verbatim(doc, c))

    def _check_simple_deps(self, ref: ComponentRef) -> None:
        entry = self.src.entries.get(ref)
        if entry is None:
            return
        for node in entry.fragment.iter(_XS + "list", _XS + "union", XS_RESTRICTION):
            names = []
            if node.get("itemType"):
                names.append(node.get("itemType"))
            if node.get("base"):
                names.append(node.get("base"))
            names.extend((node.get("memberTypes") or "").split())
            for value in names:
                qn = entry.document.resolve_qname(node, value)
                if qn.namespace == XSD_NS:
                    continue
                if ComponentRef.global_(Kind.TYPE, qn) not in self.r:
                    raise EmitError(f"simple type {ref} depends on {qn}, which is not retained")

    # top level ---------------------------------------------------------------

    def component(self, ref: ComponentRef) -> etree._Element:
        entry = self.src.entries.get(ref)
        if entry is None:
            raise EmitError(f"no source definition for {ref.label}")
        doc, node = entry.document, entry.fragment
        if ref.kind is Kind.TYPE:
            new = self.type_body(doc, node, ref)
            self._decl_attrs(doc, node, ref, new, local=False)
            return new
        if ref.kind in (Kind.ELEMENT, Kind.ATTRIBUTE):
            new = self.shallow(doc, node)
            self._decl_attrs(doc, node, ref, new, local=False)
            if node.get("substitutionGroup") is not None and ref not in self._substituting:
                del new.attrib["substitutionGroup"]
            self._decl_children(doc, node, ref, new)
            return new
        if ref.kind is Kind.MODEL_GROUP:
            new = self.shallow(doc, node)
            for c in node:
                if not isinstance(c.tag, str):
                    continue
                if c.tag == XS_ANNOTATION:
                    new.append(self.verbatim(doc, c))
                else:
                    r = self.particle(doc, c, ref, droppable=False)
                    new.append(r if r is not None else etree.Element(c.tag))
            return new
        new = self.shallow(doc, node)
        for c in node:
            if isinstance(c.tag, str):
                if c.tag == XS_ANNOTATION:
                    new.append(self.verbatim(doc, c))
                else:
                    r = self.attribute_use(doc, c, ref)
                    if r is not None:
                        new.append(r)
        return new

    def _form_default(self, tag: str) -> bool:
        return self._schema_defaults.get("elementFormDefault" if tag == XS_ELEMENT else "attributeFormDefault") == "qualified"

    def document(self, namespace: str, files: dict[str, str]) -> bytes:
        self.used = set()
        docs = [d for d in self.src.documents if d.target_namespace == namespace]
        defaults: dict[str, str] = {}
        for key, getter in (
            ("elementFormDefault", lambda d: "qualified" if d.element_qualified else "unqualified"),
            ("attributeFormDefault", lambda d: "qualified" if d.attribute_qualified else "unqualified"),
            ("blockDefault", lambda d: d.block_default),
            ("finalDefault", lambda d: d.final_default),
        ):
            values = {getter(d) for d in docs}
            if len(values) == 1:
                value = values.pop()
                if value is not None:
                    defaults[key] = value
        self._schema_defaults = {
            "elementFormDefault": defaults.get("elementFormDefault", "unqualified"),
            "attributeFormDefault": defaults.get("attributeFormDefault", "unqualified"),
            "block": defaults.get("blockDefault"),
            "final": defaults.get("finalDefault"),
        }
        members = sorted(
            (c for c in self.r.all_components()
             if c.is_global and not c.is_builtin and not c.is_anonymous and c.name.namespace == namespace),
            key=lambda c: (_KIND_ORDER.index(c.kind), c.name.local),
        )
        body = [self.component(c) for c in members]
        imports = sorted(ns for ns in self.used if ns not in (namespace, XSD_NS))
        nsmap = {"xs": XSD_NS}
        for ns in sorted(self.used | ({namespace} - {""})):
            if ns not in (XSD_NS, XML_NS):
                nsmap[self.prefixes[ns]] = ns
        root = etree.Element(_XS + "schema", nsmap=nsmap)
        if namespace:
            root.set("targetNamespace", namespace)
        for key in ("elementFormDefault", "attributeFormDefault", "blockDefault", "finalDefault"):
            if key in defaults and not (key.endswith("FormDefault") and defaults[key] == "unqualified"):
                root.set(key, defaults[key])
        for ns in imports:
            if ns not in files:
                raise EmitError(f"{namespace or 'no namespace'} references {ns}, which has no retained components")
            imp = etree.SubElement(root, _XS + "import")
            if ns:
                imp.set("namespace", ns)
            imp.set("schemaLocation", files[ns])
        root.extend(body)
        etree.cleanup_namespaces(root, top_nsmap=nsmap, keep_ns_prefixes=list(nsmap))
        etree.indent(root, space="  ")
        return etree.tostring(root, xml_declaration=True, encoding="UTF-8", pretty_print=True)

    def run(self) -> dict[str, bytes]:
        self._typed = {x for x, _ in self.of_type}
        self._substituting = {x for x, _ in self.subst}
        self._compute_identity()
        files = self.file_names()
        self.plan.per_namespace = dict(files)
        return {files[ns]: self.document(ns, files) for ns in sorted(files)}


def _write_atomic(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(retained: SchemaSet, source: SourceIndex) -> tuple[EmitPlan, dict[str, bytes]]:
    """Build the output documents in memory without touching the filesystem."""
    problems = consistency_check(retained)
    if problems:
        raise EmitError(f"retained set is inconsistent: {problems[0]}")
    emitter = _Emitter(retained, source)
    files = emitter.run()
    return emitter.plan, files


def emit(retained: SchemaSet, source: SourceIndex, out_dir: str | os.PathLike,
         options: EmitOptions | None = None) -> tuple[EmitPlan, list[Path]]:
    """Write pruned XSD files (and a JSON manifest) for ``retained`` into ``out_dir``."""
    options = options or EmitOptions()
    plan, files = render(retained, source)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise EmitError(f"cannot create output directory {out}: {exc}") from None
    written = []
    for name, data in sorted(files.items()):
        target = out / name
        try:
            _write_atomic(target, data)
        except OSError as exc:
            raise EmitError(f"cannot write {target}: {exc}") from None
        written.append(target)
    if options.manifest:
        manifest = json.dumps(plan.manifest(options.timestamp), indent=2, sort_keys=True) + "\n"
        _write_atomic(out / "manifest.json", manifest.encode("utf-8"))
    return plan, written
