"""Seeded bottom-up synthesis of 3-qubit circuit blocks."""
from .canonical import CanonicalUnitary, canonicalize, feature_vector
from .circuit import Circuit, Gate, QubitTopology, cx, evaluate, u3
from .errors import DimensionError, NoSolutionError, NumericalError, QasmError
from .instantiate import InstantiationConfig, InstantiationResult, count_calls
from .kernels import BACKEND
from .linalg import hs_distance, phase_invariant_distance, random_unitary
from .partition import reassemble, verify_bound
from .qasm import emit_qasm, parse_qasm
from .synth import SearchConfig, SynthesisResult, seeded_synthesize, synthesize
from .templates import TemplateCatalog, enumerate_templates

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CanonicalUnitary", "Circuit", "DimensionError", "Gate", "InstantiationConfig",
    "InstantiationResult", "NoSolutionError", "NumericalError", "QasmError", "QubitTopology",
    "SearchConfig", "SynthesisResult", "TemplateCatalog", "canonicalize", "count_calls", "cx",
    "emit_qasm", "enumerate_templates", "evaluate", "feature_vector", "hs_distance",
    "parse_qasm", "phase_invariant_distance", "random_unitary", "reassemble",
    "seeded_synthesize", "synthesize", "u3", "verify_bound",
]
