"""relucell: exact enumeration of ReLU network activation regions.

A trained MLP with ReLU activations partitions its bounded input domain
into convex cells, one per activation pattern. This package enumerates
every such cell exactly -- serially, through an in-process work pool, or
across machines -- and computes the census statistics that make the
region structure legible.
"""

from .geometry import (Arrangement, BoundedDomain, Hyperplane, SignVector,
                       side_of, sign_vector, unit_box)
from .witness import (SignedConstraint, SolverError, WitnessResult,
                      find_witness, witness_in_domain)
from .cellenum import CellSet, bound_cell_enum, bound_exh_enum, bound_inc_enum
from .network import (MLP, ActivationPattern, EffectiveAffine,
                      NetworkSignVector, cell_constraints,
                      conditioned_arrangement, effective_affine, forward)
from .engine import Task, expand_task, layerwise_serial, par_layerwise1
from .reporting import EnumerationReport, TaskRecord, read_report
from .analysis import (DecayFit, RegionStats, accuracy_eval, fit_decay,
                       region_dimension, schlafli_bound, subcell_histogram,
                       task_time_stats)
from .generators import concurrent_first_layer_mlp, random_arrangement, random_mlp

__version__ = "0.1.0"
