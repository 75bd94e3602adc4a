"""Species sampling predictions under Gnedin's model.

Gnedin's model is the exchangeable partition obtained by mixing the
finite-type partitions PD(-1, xi) over the number of types ``xi``. The package
provides the model's weights and EPPF, its sequential prediction rule and
samplers, posterior predictive laws for a further sample, exact and Monte
Carlo oracles, and a command line front end.
"""

from .combinatorics import (binomial, factorial, falling_factorial, lah_number, noncentral_lah,
                            rising_factorial)
from .io import AbundanceDataset, ingest
from .model import (ModelParams, OccupancyVector, eppf_gnedin, eppf_pd_minus1, gibbs_weight,
                    mixing_pmf, mixing_sf)
from .numeric import EXACT, LOG, LogReal
from .posterior import (DiscretePmf, TypesPosterior, UndefinedConditionalError, avoid_subset_prob,
                        conditional_gibbs_pmf, discovery_prob, joint_km_s_pmf, km_mean, km_pmf,
                        km_pmf_limit, kn_pmf, new_config_pmf, s_given_km_pmf, s_mean, s_pmf,
                        total_types_posterior)
from .report import ValidationReport, reconcile
from .sampler import (AllocationOutcome, extend_partition, group_allocation_pmf, one_step_gnedin,
                      one_step_pd, sample_partition, stick_breaking_sample)

__version__ = "0.1.0"

__all__ = [
    "AbundanceDataset", "AllocationOutcome", "DiscretePmf", "EXACT", "LOG", "LogReal", "ModelParams",
    "OccupancyVector", "TypesPosterior", "UndefinedConditionalError", "ValidationReport",
    "avoid_subset_prob", "binomial", "conditional_gibbs_pmf", "discovery_prob", "eppf_gnedin",
    "eppf_pd_minus1", "extend_partition", "factorial", "falling_factorial", "gibbs_weight",
    "group_allocation_pmf", "ingest", "joint_km_s_pmf", "km_mean", "km_pmf", "km_pmf_limit", "kn_pmf",
    "lah_number", "mixing_pmf", "mixing_sf", "new_config_pmf", "noncentral_lah", "one_step_gnedin",
    "one_step_pd", "reconcile", "rising_factorial", "s_given_km_pmf", "s_mean", "s_pmf",
    "sample_partition", "stick_breaking_sample", "total_types_posterior",
]
