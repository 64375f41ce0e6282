from .distances import (
    compose_hellinger,
    fair_shift_joint,
    gaussian_shift_distances,
    hellinger_discrete,
    mass_vector,
    mixture_shift_distance,
    sensitive_shift_distance,
)

__all__ = [
    "compose_hellinger",
    "fair_shift_joint",
    "gaussian_shift_distances",
    "hellinger_discrete",
    "mass_vector",
    "mixture_shift_distance",
    "sensitive_shift_distance",
]
