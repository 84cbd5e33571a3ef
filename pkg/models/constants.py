"""
Constants for sfcov: tool identity, type vocabulary, outcome codes, exit codes,
and defaults used by the config layer.
"""

TOOL_NAME = "sfcov"
TOOL_VERSION = "1.0.0"

# Java primitive types plus boxed wrappers and String; all modeled as leaf "primitive" nodes.
# Object and Number stay unresolved opaque leaves.
PRIMITIVE_TYPES = frozenset({
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
})
BOXED_TYPES = frozenset({
    "Boolean", "Byte", "Character", "Short", "Integer", "Long", "Float", "Double",
    "String",
})

# Library containers whose elements are reached by iteration.
CONTAINER_TYPES = frozenset({
    "List", "ArrayList", "LinkedList", "Set", "HashSet", "Map", "Collection", "Iterable",
})

# Calls on a container receiver that hand back an element.
CONTAINER_ELEMENT_METHODS = frozenset({
    "get", "getFirst", "getLast", "peek", "poll", "pop", "remove", "element", "first", "last",
    "next", "previous",
})

# TypeRef kinds
KIND_PRIMITIVE = "primitive"
KIND_CLASS = "class"
KIND_TYPE_PARAMETER = "type-parameter"
KIND_ARRAY = "array"
KIND_CONTAINER = "container"
KIND_UNRESOLVED = "unresolved"

# Label kinds
LABEL_PLAIN = "plain"
LABEL_PLUS = "plus"

# Oracle modes
MODE_INVARIANTS = "invariants"
MODE_TESTS = "tests"
ORACLE_MODES = (MODE_INVARIANTS, MODE_TESTS)

DEFAULT_INVARIANT_PATTERN = r"repOK|inv.*|check.*"
DEFAULT_TEST_PATTERN = r"test.*"
DEFAULT_ASSERT_PREFIXES = ("assert",)
TEST_ANNOTATIONS = frozenset({"Test", "ParameterizedTest", "RepeatedTest"})

# Kill matrix cells
OUTCOME_KILLED = "K"
OUTCOME_SURVIVED = "S"
OUTCOME_TRIVIAL = "T"
OUTCOME_CODES = frozenset({OUTCOME_KILLED, OUTCOME_SURVIVED, OUTCOME_TRIVIAL})

# Ordering strategies
STRATEGY_SFC = "sfc-greedy"
STRATEGY_RANDOM = "random"
STRATEGY_RANDOM_MEAN = "random-mean"
STRATEGY_STATEMENT = "statement-greedy"

DEFAULT_SEED = 1
DEFAULT_REPETITIONS = 10
DEFAULT_PERCENTAGES = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100)
DEFAULT_SIMILARITY_TOLERANCE = 0.10

# Process exit codes
EXIT_OK = 0
EXIT_PARSE_FAILURE = 1
EXIT_ROOT_NOT_FOUND = 2
EXIT_NO_ORACLES = 3
EXIT_MATRIX_FORMAT = 4
EXIT_USAGE = 64

OUTPUT_FORMATS = ("json", "csv", "text")
