from estimate.classify import (
    atmospheric_light,
    classify,
    dark_channel,
    directional_energy_ratio,
    luminance,
)
from estimate.initial import estimate_initial, init_state
