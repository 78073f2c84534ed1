"""Fix-pattern mining and ranked patch prediction for tree-shaped code."""

from ._fixpat import (
    FixpatParseError,
    FixpatUsageError,
    Tree,
    anti_unify,
    evaluate,
    learn,
    lint,
    parse_pattern_json,
    parse_source,
    parse_tree_json,
    pattern_equal,
    predict,
    print_tree,
    serialize_tree,
    top_patches,
)

__all__ = [
    "FixpatParseError",
    "FixpatUsageError",
    "Tree",
    "anti_unify",
    "evaluate",
    "learn",
    "lint",
    "parse_pattern_json",
    "parse_source",
    "parse_tree_json",
    "pattern_equal",
    "predict",
    "print_tree",
    "serialize_tree",
    "top_patches",
]
