"""Exponential-decay certificates for viscously damped Timoshenko beams."""

from .certificate import (EXAMPLE_WEIGHTS, Certificate, Certifier, LyapunovWeights, StateFunction,
                          certify, certify_constant, coefficient_fields, energy, eta, kappa1,
                          lyapunov_value, wirtinger_constants)
from .discretize import DiscreteSystem, build_system, discrete_energy, power_balance_residual
from .params import (BeamParameters, Constant, ParameterField, Sinusoid, Tabulated, constant_beam,
                     example_beam, validate)
from .simulate import (EXAMPLE_IC, InitialCondition, Profile, Trajectory, check_bound, integrate,
                       sample_initial_condition)
from .weight_search import FeasibilityNotFound, SearchConfig, feasible_seed, maximize_kappa2

__version__ = "0.1.0"
