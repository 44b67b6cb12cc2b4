"""Canonical products over zero sequences and finite-range invertibility checks."""

from .errors import (ConfigError, ContainsOriginError, CoverageError, EmptyClusterError,
                     NonConvergenceError, NonFiniteError, NonMonotoneWeightError, OverlapError,
                     ParseError, ZeroRealPartError, ZeroSetError)
from .invertibility import (Prop1Witness, SDWitness, SlowDecreaseReport, fit_a, prop1_witness,
                            sd_scan, sd_witness)
from .product_engine import (LineEvaluator, LogModulusResult, ProductEvaluator, ProductVariant,
                             eval_grid, log_abs_canonical, log_abs_partial, make_modified_variant,
                             type_estimate)
from .weights import Weight, WeightReport, check_weight
from .zero_model import (ClusterSpec, ComplexPoint, NearRealPartition, ZeroSequence,
                         gen_cluster_counterexample, gen_clustered, gen_integer_lattice,
                         gen_one_sided, gen_perturbed_lattice, partition_near_real,
                         project_real_parts, validate_sequence)
from .zero_stats import RatioProfile, m_re, ratio_profile, theorem1_check

__version__ = "0.1.0"
