from degrade.model import (
    DEFAULT_EPS,
    EPS_T,
    DegradationMatrices,
    apply_model,
    compose,
    invert_model,
)
from degrade.scenes import cosine_field, generate_clean
from degrade.sidecar import decode_matrices, encode_matrices, read_matrices, write_matrices
from degrade.simulate import (
    DegradationKind,
    HazeParams,
    LowLightParams,
    RainParams,
    SimParams,
    simulate,
    simulate_matrices,
    synthetic_case,
)
