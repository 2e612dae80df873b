from priors.operators import (
    TV,
    BoxClamp,
    Identity,
    PriorOperator,
    SoftThreshold,
    Tikhonov,
    grid_laplacian,
    prox,
    total_variation,
)
from priors.profiles import PriorTable, TaskPriorProfile, apply_prior_B, apply_prior_TD
