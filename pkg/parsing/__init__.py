from .corpus import parse_corpus, read_source_tree
from .resolve import TypeResolver, find_methods, locate_method, resolve_types

__all__ = [
    "parse_corpus",
    "read_source_tree",
    "resolve_types",
    "locate_method",
    "find_methods",
    "TypeResolver",
]
