"""Instance-driven XML Schema subsetting.

Load an XSD schema set, find the components a corpus of instance documents
actually uses, and write a pruned schema set that still validates the corpus.
"""
from .analyzer import (AnalysisContext, AnalysisReport, InstanceNode, Mode, ancestors, container_of,
                       element_decl, root_of, schema_subset_used_in, subset_schemas, type_of)
from .emitter import EmitOptions, EmitPlan, emit, render
from .errors import AnalysisError, EmitError, LoadError, SchemaSetError, XsdPruneError
from .loader import (LoadOptions, LoadResult, SchemaCatalog, SourceIndex, load_schema_set, read_catalog,
                     resolve_type, substitution_members)
from .metrics import SchemaMetrics, compare_metrics, compute_metrics, render_comparison, render_metrics
from .model import (ComponentRef, Kind, QualifiedName, Relation, SchemaSet, SchemaSetBuilder,
                    add_component, add_value_to_relation, canonical_dump, consistency_check,
                    copy_relations, empty_set, is_subset_of, union)

__version__ = "0.1.0"

__all__ = [
    "AnalysisContext", "AnalysisError", "AnalysisReport", "ComponentRef", "EmitError", "EmitOptions",
    "EmitPlan", "InstanceNode", "Kind", "LoadError", "LoadOptions", "LoadResult", "Mode",
    "QualifiedName", "Relation", "SchemaCatalog", "SchemaMetrics", "SchemaSet", "SchemaSetBuilder",
    "SchemaSetError", "SourceIndex", "XsdPruneError", "add_component", "add_value_to_relation",
    "ancestors", "canonical_dump", "compare_metrics", "compute_metrics", "consistency_check",
    "container_of", "copy_relations", "element_decl", "emit", "empty_set", "is_subset_of",
    "load_schema_set", "read_catalog", "render", "render_comparison", "render_metrics",
    "resolve_type", "root_of", "schema_subset_used_in", "subset_schemas", "substitution_members",
    "type_of", "union",
]
