"""Exact rotation sets of locally constant potentials over shifts of finite type."""
from .errors import *  # noqa: F401,F403
from .shift import Cycle, Sft, enumerate_cycles, full_shift, golden_mean_shift, word_distance
from .potential import (LocallyConstantPotential, birkhoff_average, circle_potential,
                        cycle_average, mane_time, potential_from_json, sup_distance)
from .geometry import (ConvexBody, affine_hull, body_from_json, convex_hull,
                       hausdorff_distance, shrink, support_function)
from .rotation import (brute_force_rotation, max_mean_cycle, periodic_rotation_points,
                       rotation_polytope)
from .realization import (adjust_into_interior, contraction_step, enlarge_potential,
                          realize, realize_interior, split_singleton)
from .analysis import cone_experiment, detect_corners, fish, genericity_probe

__version__ = "0.1.0"
