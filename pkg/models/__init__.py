from .source import (
    ClassDecl,
    Diagnostic,
    Expr,
    FieldDecl,
    LocalVar,
    MethodDecl,
    SourceCorpus,
    Span,
    Stmt,
    TypeRef,
)
from .graph import FieldEdge, Label, LabelSet, TypeGraph, TypeNode
from .coverage import CoverageResult, FieldAccess, OracleCoverage, OracleSpec, ReachableCode
from .harness import CoverageMatrix, KillMatrix, OrderingResult, PrefixMetrics, TestRecord
from .run_config import RunConfig, load_run_config
from .errors import (
    ConfigError,
    FormatError,
    MethodNotFound,
    NoDetectableFaults,
    NoOraclesFound,
    ParseFailure,
    RootNotFound,
    SfcovError,
    UnknownFixture,
    UnknownOutcomeCode,
    UnknownTestId,
)

__all__ = [
    "ClassDecl",
    "Diagnostic",
    "Expr",
    "FieldDecl",
    "LocalVar",
    "MethodDecl",
    "SourceCorpus",
    "Span",
    "Stmt",
    "TypeRef",
    "FieldEdge",
    "Label",
    "LabelSet",
    "TypeGraph",
    "TypeNode",
    "CoverageResult",
    "FieldAccess",
    "OracleCoverage",
    "OracleSpec",
    "ReachableCode",
    "CoverageMatrix",
    "KillMatrix",
    "OrderingResult",
    "PrefixMetrics",
    "TestRecord",
    "RunConfig",
    "load_run_config",
    "ConfigError",
    "FormatError",
    "MethodNotFound",
    "NoDetectableFaults",
    "NoOraclesFound",
    "ParseFailure",
    "RootNotFound",
    "SfcovError",
    "UnknownFixture",
    "UnknownOutcomeCode",
    "UnknownTestId",
]
