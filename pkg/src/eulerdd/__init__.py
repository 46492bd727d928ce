"""eulerdd: Eulerian dynamical decoupling with bounded controls.

Compiles finite decoupling groups into bounded-strength Eulerian pulse
schedules, simulates the resulting joint system-environment dynamics, and
verifies the symmetrization, fault-robustness, and noiseless-subsystem
structure numerically.
"""

from .analysis import (Scenario, builtin_scenarios, get_scenario,
                       noise_suppression_check, robustness_report,
                       scaling_study, verify_theorem)
from .cayley import (CayleyGraph, EulerPath, build_cayley, eulerian_cycle,
                     validate_path)
from .dynamics import (DriftModel, average_hamiltonian, control_propagator,
                       decoupling_distance, f_map, q_map, residual_error,
                       simulate_cycles, time_ordered_exp)
from .group_theory import (Group, UnitaryRep, center_basis, close_group,
                           commutant_basis, decompose_irreps, pi_G,
                           quotient_check)
from .pulses import (ControlSchedule, FaultModel, PulseProfile, apply_fault,
                     bangbang_schedule, constant_profile, eulerian_schedule,
                     piecewise_profile)

__version__ = "0.1.0"
