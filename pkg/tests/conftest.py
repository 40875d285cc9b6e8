from __future__ import annotations

import glob
from pathlib import Path

import pytest

from xsdprune import AnalysisContext, Mode, load_schema_set
from xsdprune.model import (XSD_NS, ComponentRef, Kind, QualifiedName, Relation, SchemaSet)

FIXTURES = Path(__file__).parent / "fixtures"
FIGURE1 = FIXTURES / "figure1"

# name -> entry schema; each directory has a corpus/ of valid instances
CORPORA = {
    "derivation": "schema.xsd",
    "substitution": "schema.xsd",
    "groups": "schema.xsd",
    "attributes": "schema.xsd",
    "multins": "main.xsd",
}


def corpus_files(name: str) -> list[str]:
    return sorted(glob.glob(str(FIXTURES / name / "corpus" / "*.xml")))


def T(local: str, ns: str = "") -> ComponentRef:
    return ComponentRef.global_(Kind.TYPE, QualifiedName(ns, local))


def E(local: str, ns: str = "") -> ComponentRef:
    return ComponentRef.global_(Kind.ELEMENT, QualifiedName(ns, local))


def inner_e(container: ComponentRef, local: str, ordinal: int = 0) -> ComponentRef:
    return ComponentRef.inner(Kind.ELEMENT, container, local, ordinal)


STRING = T("string", XSD_NS)


def figure1_listing() -> SchemaSet:
    """Reference listing of the full schema set of the figure1 fixture."""
    base, child, ctype = T("Base"), T("Child"), T("ContainerType")
    be, ce, item = inner_e(base, "baseElem"), inner_e(child, "chdElem"), inner_e(ctype, "item")
    return SchemaSet(
        {Kind.TYPE: {base, child, STRING, ctype},
         Kind.ELEMENT: {E("Container"), E("baseElem2"), be, ce, item}},
        {Relation.IS_OF_TYPE: {(E("Container"), ctype), (E("baseElem2"), STRING), (be, STRING),
                               (ce, STRING), (item, base)},
         Relation.IS_DERIVED_FROM: {(child, base)},
         Relation.REFERENCE: {(base, E("baseElem2"))},
         Relation.CONTAINS: {(base, be), (child, ce), (ctype, item)}},
    )


def example_subset() -> SchemaSet:
    """The example subset given right after the subset definition."""
    base, ctype = T("Base"), T("ContainerType")
    be, item = inner_e(base, "baseElem"), inner_e(ctype, "item")
    return SchemaSet(
        {Kind.TYPE: {base, STRING, ctype}, Kind.ELEMENT: {E("Container"), be, item}},
        {Relation.IS_OF_TYPE: {(E("Container"), ctype), (be, STRING), (item, base)},
         Relation.CONTAINS: {(base, be), (ctype, item)}},
    )


@pytest.fixture(scope="session")
def fig1():
    return load_schema_set([FIGURE1 / "schema.xsd"])


@pytest.fixture(scope="session")
def fig1_ctx(fig1):
    return AnalysisContext.from_load(fig1, Mode.STRICT)


@pytest.fixture(scope="session")
def loaded_corpora():
    return {name: load_schema_set([FIXTURES / name / entry]) for name, entry in CORPORA.items()}
