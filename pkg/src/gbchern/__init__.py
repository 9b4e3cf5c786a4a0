"""Double forms, Pfaffians and Gauss-Bonnet-Chern boundary formulas."""
from .combinat import PiRational, double_factorial, sphere_volume
from .double_forms import DoubleForm, FormVector, make_metric_form, owedge
from .gauss_bonnet import euler_estimate, gb_density
from .geometry_models import build_model
from .errors import ConfigError, CostGuardError, DomainError, MetricError, ScalarModeError

__version__ = "0.1.0"

__all__ = ["ConfigError", "CostGuardError", "DomainError", "DoubleForm", "FormVector",
           "MetricError", "PiRational", "ScalarModeError", "build_model", "double_factorial",
           "euler_estimate", "gb_density", "make_metric_form", "owedge", "sphere_volume"]
