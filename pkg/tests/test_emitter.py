from __future__ import annotations

import json
import os
import textwrap

import pytest
from conftest import CORPORA, FIGURE1, FIXTURES, STRING, E, T, corpus_files, example_subset, inner_e
from lxml import etree

from xsdprune.analyzer import AnalysisContext, subset_schemas
from xsdprune.emitter import EmitOptions, emit, render
from xsdprune.errors import EmitError
from xsdprune.loader import load_schema_set
from xsdprune.model import Kind, QualifiedName, Relation, SchemaSet, is_subset_of

XS = "{http://www.w3.org/2001/XMLSchema}"


def both_ways(a: SchemaSet, b: SchemaSet) -> bool:
    return is_subset_of(a, b) and is_subset_of(b, a)


def pruned(name: str, loaded_corpora):
    lr = loaded_corpora[name]
    s, _ = subset_schemas(AnalysisContext.from_load(lr), corpus_files(name))
    return lr, s


def schema_for(out_dir, plan, doc_path) -> etree.XMLSchema:
    ns = etree.QName(etree.parse(str(doc_path)).getroot()).namespace or ""
    return etree.XMLSchema(etree.parse(os.path.join(out_dir, plan.per_namespace[ns])))


class TestFigure1:
    def test_example_subset_emission(self, fig1, tmp_path):
        plan, files = emit(example_subset(), fig1.source, tmp_path)
        assert [f.name for f in files] == ["no-namespace.xsd"]
        root = etree.parse(str(files[0])).getroot()
        base = root.find(f"{XS}complexType[@name='Base']")
        assert [e.get("name") for e in base.iter(f"{XS}element")] == ["baseElem"]
        assert root.find(f"{XS}complexType[@name='Child']") is None
        assert root.find(f"{XS}element[@name='baseElem2']") is None
        assert ("Base", "baseElem2") in {(c.name.local, w) for c, w, _ in plan.pruned_particles}
        again = load_schema_set(files)
        assert both_ways(again.schema, example_subset())

    def test_full_identity(self, fig1, tmp_path):
        _, files = emit(fig1.schema, fig1.source, tmp_path)
        assert both_ways(load_schema_set(files).schema, fig1.schema)

    def test_required_drop(self, fig1):
        # Base is retained but its required baseElem is not
        s = SchemaSet({Kind.TYPE: {T("Base"), T("ContainerType")},
                       Kind.ELEMENT: {E("Container"), inner_e(T("ContainerType"), "item")}},
                      {Relation.IS_OF_TYPE: {(E("Container"), T("ContainerType")),
                                             (inner_e(T("ContainerType"), "item"), T("Base"))},
                       Relation.CONTAINS: {(T("ContainerType"), inner_e(T("ContainerType"), "item"))}})
        with pytest.raises(EmitError, match="baseElem") as info:
            render(s, fig1.source)
        assert "Base" in str(info.value)

    def test_inconsistent_input_rejected(self, fig1):
        s = SchemaSet({Kind.ELEMENT: {E("baseElem2")}}, {Relation.IS_OF_TYPE: {(E("baseElem2"), STRING)}})
        with pytest.raises(EmitError, match="inconsistent"):
            render(s, fig1.source)

    def test_output_format(self, fig1):
        _, files = render(fig1.schema, fig1.source)
        data = files["no-namespace.xsd"]
        assert data.startswith(b"<?xml version='1.0' encoding='UTF-8'?>\n")
        assert b"\r" not in data
        assert b"\n  <xs:complexType" in data

    def test_unwritable_out_dir(self, fig1, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(EmitError):
            emit(fig1.schema, fig1.source, blocker / "sub")


class TestManifest:
    def test_manifest_contents(self, fig1, tmp_path):
        emit(example_subset(), fig1.source, tmp_path)
        m = json.loads((tmp_path / "manifest.json").read_text())
        assert m["files"] == [{"file": "no-namespace.xsd", "namespace": ""}]
        assert m["pruned"]["total"] >= 1
        assert "timestamp" not in m

    def test_timestamp_optional(self, fig1, tmp_path):
        emit(example_subset(), fig1.source, tmp_path, EmitOptions(timestamp=True))
        assert "timestamp" in json.loads((tmp_path / "manifest.json").read_text())

    def test_no_manifest(self, fig1, tmp_path):
        emit(example_subset(), fig1.source, tmp_path, EmitOptions(manifest=False))
        assert not (tmp_path / "manifest.json").exists()


@pytest.mark.parametrize("name", sorted(CORPORA))
def test_oracle_validity(name, loaded_corpora, tmp_path):
    lr, s = pruned(name, loaded_corpora)
    plan, _ = emit(s, lr.source, tmp_path)
    for doc in corpus_files(name):
        xs = schema_for(tmp_path, plan, doc)
        assert xs.validate(etree.parse(doc)), (doc, xs.error_log.last_error)


@pytest.mark.parametrize("name", sorted(CORPORA))
def test_pruned_roundtrip(name, loaded_corpora, tmp_path):
    lr, s = pruned(name, loaded_corpora)
    _, files = emit(s, lr.source, tmp_path)
    assert both_ways(load_schema_set(files).schema, s)


@pytest.mark.parametrize("name", sorted(CORPORA))
def test_deterministic_bytes(name, loaded_corpora):
    lr, s = pruned(name, loaded_corpora)
    _, a = render(s, lr.source)
    _, b = render(s, lr.source)
    assert a == b


def test_multinamespace_layout(loaded_corpora, tmp_path):
    lr, s = pruned("multins", loaded_corpora)
    plan, files = emit(s, lr.source, tmp_path)
    assert sorted(plan.per_namespace) == ["urn:example:app", "urn:example:geo"]
    app = etree.parse(str(tmp_path / plan.per_namespace["urn:example:app"])).getroot()
    imports = app.findall(f"{XS}import")
    assert [(i.get("namespace"), i.get("schemaLocation")) for i in imports] == [
        ("urn:example:geo", plan.per_namespace["urn:example:geo"])]
    # import precedes every component definition
    assert list(app)[0].tag == f"{XS}import"
    # EnvelopeType was never used, so the geo output drops it
    geo = etree.parse(str(tmp_path / plan.per_namespace["urn:example:geo"])).getroot()
    assert geo.find(f"{XS}complexType[@name='EnvelopeType']") is None


def test_identity_constraint_kept(loaded_corpora, tmp_path):
    lr, s = pruned("multins", loaded_corpora)
    plan, _ = emit(s, lr.source, tmp_path)
    app = etree.parse(str(tmp_path / plan.per_namespace["urn:example:app"])).getroot()
    assert app.find(f".//{XS}unique[@name='uniqueSiteName']") is not None


def test_identity_constraint_dropped(tmp_path):
    xsd = tmp_path / "s.xsd"
    xsd.write_text(textwrap.dedent("""\
        <xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
          <xs:element name="root">
            <xs:complexType>
              <xs:sequence>
                <xs:element name="a" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
                <xs:element name="b" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
              </xs:sequence>
            </xs:complexType>
            <xs:key name="keyB">
              <xs:selector xpath="b"/>
              <xs:field xpath="."/>
            </xs:key>
          </xs:element>
        </xs:schema>
        """), encoding="utf-8")
    lr = load_schema_set([xsd])
    s, _ = subset_schemas(AnalysisContext.from_load(lr), [b"<root><a>1</a></root>"])
    plan, files = render(s, lr.source)
    assert b"keyB" not in files["no-namespace.xsd"]
    assert any("keyB" in w for w in plan.required_drop_warnings)


def test_choice_keeps_used_branches(loaded_corpora, tmp_path):
    lr, s = pruned("groups", loaded_corpora)
    plan, _ = emit(s, lr.source, tmp_path)
    root = etree.parse(str(tmp_path / plan.per_namespace["urn:example:groups"])).getroot()
    contact = root.find(f"{XS}group[@name='Contact']")
    names = [e.get("name") or e.get("ref") for e in contact.iter(f"{XS}element")]
    assert names == ["email", "g:address"]
    assert root.find(f"{XS}group[@name='Unused']") is None


def test_choice_all_branches_lost_in_required_particle(tmp_path):
    xsd = tmp_path / "s.xsd"
    xsd.write_text(textwrap.dedent("""\
        <xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
          <xs:complexType name="R">
            <xs:sequence>
              <xs:choice>
                <xs:element name="x" type="xs:string"/>
                <xs:element name="y" type="xs:string"/>
              </xs:choice>
            </xs:sequence>
          </xs:complexType>
          <xs:element name="root" type="R"/>
        </xs:schema>
        """), encoding="utf-8")
    lr = load_schema_set([xsd])
    from xsdprune.model import SchemaSetBuilder, type_ref
    b = SchemaSetBuilder()
    b.add_relation(Relation.IS_OF_TYPE, E("root"), type_ref(QualifiedName("", "R")))
    with pytest.raises(EmitError, match="choice"):
        render(b.build(), lr.source)


def test_required_attribute_drop(loaded_corpora):
    lr = loaded_corpora["derivation"]
    ns = "urn:example:derivation"
    from xsdprune.model import SchemaSetBuilder
    b = SchemaSetBuilder()
    b.add_relation(Relation.IS_DERIVED_FROM, T("Measured", ns), T("Length", ns))
    b.add_relation(Relation.IS_DERIVED_FROM, T("Length", ns), T("decimal", "http://www.w3.org/2001/XMLSchema"))
    with pytest.raises(EmitError, match="unit"):
        render(b.build(), lr.source)
