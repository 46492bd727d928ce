"""High-level verifications: symmetrization-theorem checks, fault-robustness
reports, noiseless-subsystem identification, error-scaling studies, and the
built-in decoupling scenarios (Carr-Purcell, Pauli, collective spin-flip,
symmetric-group decoupling on three qubits).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cayley, dynamics, group_theory, pulses
from .cayley import CayleyGraph, EulerPath, build_cayley, eulerian_cycle
from .dynamics import (DriftModel, average_hamiltonian, decoupling_distance,
                       f_map, q_map, residual_error, simulate_cycles)
from .group_theory import (Group, IrrepDecomposition, UnitaryRep, center_basis,
                           commutant_basis, decompose_irreps, pi_G, _vec)
from .pulses import (ControlSchedule, FaultModel, PulseProfile, apply_fault,
                     bangbang_schedule, constant_profile, eulerian_schedule,
                     piecewise_profile)

SIGMA = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_on(n: int, k: int, u: str) -> np.ndarray:
    """Single-qubit Pauli u on qubit k (0-based) of an n-qubit register."""
    ops = [SIGMA["i"]] * n
    ops[k] = SIGMA[u]
    out = ops[0]
    for m in ops[1:]:
        out = np.kron(out, m)
    return out


def collective(n: int, u: str) -> np.ndarray:
    """Tensor power sigma_u ⊗ ... ⊗ sigma_u on n qubits."""
    out = SIGMA[u]
    for _ in range(n - 1):
        out = np.kron(out, SIGMA[u])
    return out


def heisenberg(n: int, k: int, l: int) -> np.ndarray:
    """Exchange coupling sigma_k . sigma_l on an n-qubit register."""
    return sum(pauli_on(n, k, u) @ pauli_on(n, l, u) for u in "xyz")


def swap_gate(n: int, k: int, l: int) -> np.ndarray:
    """swap of qubits k and l; equals (I + sigma_k . sigma_l) / 2."""
    return (np.eye(2 ** n) + heisenberg(n, k, l)) / 2.0


def random_hermitian(dim: int, rng) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2.0


def random_state(dim: int, rng) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@dataclass
class Scenario:
    """One built-in decoupling scheme with everything needed to run it."""

    name: str
    description: str
    n_qubits: int
    group: Group
    rep: UnitaryRep
    graph: CayleyGraph
    path: EulerPath
    profiles: dict                  # color -> PulseProfile
    reference_path: tuple = None        # explicit color sequence when stated
    noise_generators: tuple = ()    # (name, traceless system operator)
    expected_cycle_length: int = 0
    default_delta_t: float = 0.01

    def schedule(self, delta_t: float = None) -> ControlSchedule:
        return eulerian_schedule(self.path, self.profiles,
                                 delta_t or self.default_delta_t, self.rep)

    def bangbang(self, delta_t: float = None) -> ControlSchedule:
        return bangbang_schedule(self.group, self.rep,
                                 delta_t or self.default_delta_t)

    def generic_drift(self, env_dim: int = 2, seed: int = 0) -> DriftModel:
        """Random unit-norm drift coupling every noise generator (or a
        random traceless operator if none is declared) to the environment."""
        d = self.rep.dimension
        rng = np.random.default_rng(seed)
        H_S = random_hermitian(d, rng)
        H_E = random_hermitian(env_dim, rng) if env_dim > 1 else np.zeros((1, 1))
        couplings = []
        gens = [m for _, m in self.noise_generators]
        if not gens:
            s = random_hermitian(d, rng)
            gens = [s - np.trace(s) / d * np.eye(d)]
        for S in gens:
            E = random_hermitian(env_dim, rng) if env_dim > 1 else np.ones((1, 1))
            couplings.append((S, E))
        drift = DriftModel(H_S=H_S, H_E=H_E, couplings=tuple(couplings))
        norm = np.linalg.norm(drift.total(), 2)
        return DriftModel(H_S=H_S / norm, H_E=H_E / norm,
                          couplings=tuple((S / np.sqrt(norm), E / np.sqrt(norm))
                                          for S, E in couplings))


def _scenario_from_generators(name, description, n_qubits, gen_mats,
                              profile_builders, reference_colors=None,
                              noise_generators=(), max_order=512):
    group, rep = group_theory.close_group(gen_mats, max_order=max_order)
    graph = build_cayley(group)
    path = eulerian_cycle(graph)
    profiles = {c: build(c, rep, group) for c, build in enumerate(profile_builders)}
    return Scenario(
        name=name, description=description, n_qubits=n_qubits,
        group=group, rep=rep, graph=graph, path=path, profiles=profiles,
        reference_path=tuple(reference_colors) if reference_colors else None,
        noise_generators=tuple(noise_generators),
        expected_cycle_length=group.order * len(group.generators),
    )


def carr_purcell_scenario() -> Scenario:
    """Single decohering qubit, spin-flip group {I, sigma_x}, L = 2."""
    def prof(color, rep, group):
        return constant_profile(group.generators[color], rep, SIGMA["x"])

    return _scenario_from_generators(
        "carr-purcell",
        "single-qubit spin-flip decoupling with one bounded sigma-x pulse",
        1, [SIGMA["x"]], [prof],
        reference_colors=(0, 0),
        noise_generators=(("sz", SIGMA["z"]),),
    )


# Eulerian cycle colors of the two-generator order-4 graph, as stated for
# the qubit error-basis scheme: (g1, g2, g1, g2, g2, g1, g2, g1).
_TWO_GEN_PATH = (0, 1, 0, 1, 1, 0, 1, 0)


def pauli_scenario(n: int = 1) -> Scenario:
    """Qubit error-basis decoupling; for n qubits the cycle has length
    n * 2^(2n+1), so n is capped at 3."""
    if not 1 <= n <= 3:
        raise ValueError("pauli scenario supports 1 <= n <= 3 qubits")
    gen_mats, builders = [], []
    for k in range(n):
        for u in ("x", "z"):
            axis = pauli_on(n, k, u)
            gen_mats.append(axis)
            builders.append(lambda c, rep, group, a=axis:
                            constant_profile(group.generators[c], rep, a))
    noise = tuple((f"s{u}{k}", pauli_on(n, k, u))
                  for k in range(n) for u in "xyz")
    return _scenario_from_generators(
        "pauli",
        "maximal averaging over the qubit error basis (robust to any "
        "systematic in-algebra fault)",
        n, gen_mats, builders,
        reference_colors=_TWO_GEN_PATH if n == 1 else None,
        noise_generators=noise, max_order=4 ** n + 1,
    )


def spin_flip_scenario(n: int = 2) -> Scenario:
    """Collective spin-flip decoupling on n qubits; removes arbitrary
    single-qubit (linear) noise."""
    if n < 1:
        raise ValueError("spin-flip scenario needs n >= 1")
    X, Z = collective(n, "x"), collective(n, "z")

    def prof(color, rep, group, axes=(X, Z)):
        return constant_profile(group.generators[color], rep, axes[color])

    noise = tuple((f"s{u}{k}", pauli_on(n, k, u))
                  for k in range(n) for u in "xyz")
    return _scenario_from_generators(
        "spin-flip",
        "collective spin-flip decoupling averaging out arbitrary linear noise",
        n, [X, Z], [prof, prof],
        reference_colors=_TWO_GEN_PATH,
        noise_generators=noise,
    )


def symmetric_s3_scenario() -> Scenario:
    """Permutation-symmetrizing decoupling on three qubits via Heisenberg
    exchange pulses; generates a two-dimensional noiseless subsystem."""
    n = 3
    g1 = swap_gate(n, 0, 1)
    g2 = swap_gate(n, 0, 1) @ swap_gate(n, 1, 2)

    def prof1(color, rep, group):
        return constant_profile(group.generators[color], rep, heisenberg(n, 0, 1))

    def prof2(color, rep, group):
        # two half-interval exchange pulses: h(2,3) then h(1,2), each at
        # angle-rate pi/2 (amplitude pi / (2 delta_t))
        segments = [(0.5, (np.pi / 2) * heisenberg(n, 1, 2)),
                    (0.5, (np.pi / 2) * heisenberg(n, 0, 1))]
        return piecewise_profile(group.generators[color], rep, segments)

    noise = tuple((f"collective-{u}", sum(pauli_on(n, k, u) for k in range(n)))
                  for u in "xyz")
    reference = (1, 1, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0)
    return _scenario_from_generators(
        "symmetric-s3",
        "S3 symmetrization of three qubits with bounded Heisenberg exchange",
        n, [g1, g2], [prof1, prof2],
        reference_colors=reference, noise_generators=noise,
    )


def builtin_scenarios() -> list:
    """The four built-in scenarios at their default parameters."""
    return [carr_purcell_scenario(), pauli_scenario(1),
            spin_flip_scenario(2), symmetric_s3_scenario()]


_FACTORIES = {
    "carr-purcell": lambda n=None: carr_purcell_scenario(),
    "pauli": lambda n=None: pauli_scenario(n or 1),
    "spin-flip": lambda n=None: spin_flip_scenario(n or 2),
    "symmetric-s3": lambda n=None: symmetric_s3_scenario(),
}


def get_scenario(name: str, n: int = None) -> Scenario:
    if name not in _FACTORIES:
        raise KeyError(f"unknown scenario '{name}'; see builtin_scenarios()")
    return _FACTORIES[name](n)


@dataclass
class TheoremReport:
    scenario: str
    hypothesis_ok: bool
    skipped: bool
    trials: int
    max_deviation: float
    tolerance: float
    passed: bool


def verify_theorem(scenario: Scenario, trials: int = 100, tol: float = 1e-7,
                   quad_points: int = dynamics.DEFAULT_QUAD_POINTS,
                   seed: int = 0) -> TheoremReport:
    """Check the symmetrization identity q_map = pi_G on random Hermitian
    inputs.  Skipped (with a notice) when any profile leaves the group
    algebra, since the hypothesis then fails."""
    hypothesis = all(p.in_algebra for p in scenario.profiles.values())
    if not hypothesis:
        return TheoremReport(scenario=scenario.name, hypothesis_ok=False,
                             skipped=True, trials=0, max_deviation=float("nan"),
                             tolerance=tol, passed=False)
    rng = np.random.default_rng(seed)
    d = scenario.rep.dimension
    worst = 0.0
    for _ in range(trials):
        X = random_hermitian(d, rng)
        dev = np.linalg.norm(
            q_map(scenario.rep, scenario.profiles, X, quad_points)
            - pi_G(scenario.rep, X))
        worst = max(worst, float(dev))
    return TheoremReport(scenario=scenario.name, hypothesis_ok=True,
                         skipped=False, trials=trials, max_deviation=worst,
                         tolerance=tol, passed=worst <= tol)


@dataclass
class BlockReport:
    label: int
    multiplicity: int
    dimension: int
    action_norm: float
    classification: str


@dataclass
class SubsystemReport:
    scenario: str
    decomposition: IrrepDecomposition
    residual: np.ndarray
    residual_norm: float
    commutant_residual: float   # distance of the residual from the commutant
    center_residual: float      # distance of the residual from the center
    blocks: list


PROTECTED_TOL = 1e-8


def _subspace_distance(X: np.ndarray, basis) -> float:
    """Distance of X from the span of an orthonormal matrix basis."""
    if not basis:
        return float(np.linalg.norm(X))
    B = np.array([_vec(b) for b in basis])
    v = _vec(X)
    return float(np.linalg.norm(v - B.T @ (B.conj() @ v)))


def _classify_block(B: np.ndarray, n_J: int, d_J: int, scale: float) -> tuple:
    """Classify the action of a commutant-valued residual on one block."""
    norm = float(np.linalg.norm(B))
    tol = PROTECTED_TOL * max(scale, 1.0)
    if norm <= tol:
        return norm, "noiseless"
    c = np.trace(B) / (n_J * d_J)
    if np.linalg.norm(B - c * np.eye(n_J * d_J)) <= tol:
        return norm, "protected subspace"
    # best N ⊗ I fit: partial trace over the dimension factor
    N = B.reshape(n_J, d_J, n_J, d_J).trace(axis1=1, axis2=3) / d_J
    if np.linalg.norm(B - np.kron(N, np.eye(d_J))) <= tol:
        return norm, "protected dimension factor"
    return norm, "unprotected"


def robustness_report(scenario: Scenario, fault: FaultModel,
                      quad_points: int = dynamics.DEFAULT_QUAD_POINTS,
                      seed: int = 0) -> SubsystemReport:
    """Residual control error of a systematic fault and its per-block action.

    The residual always lands in the commutant, so the dimension factors of
    every block stay clean; if the fault is in the group algebra the
    residual is central and every block sees at most a scalar."""
    res = residual_error(scenario.rep, scenario.profiles, fault, quad_points)
    decomp = decompose_irreps(scenario.rep, seed=seed)
    com = commutant_basis(scenario.rep)
    cen = center_basis(scenario.rep)
    scale = float(np.linalg.norm(res))
    blocks = []
    for blk in decomp.blocks:
        B = decomp.block_of(res, blk)
        norm, cls = _classify_block(B, blk.multiplicity, blk.dimension, scale)
        blocks.append(BlockReport(label=blk.label, multiplicity=blk.multiplicity,
                                  dimension=blk.dimension, action_norm=norm,
                                  classification=cls))
    return SubsystemReport(
        scenario=scenario.name, decomposition=decomp, residual=res,
        residual_norm=scale,
        commutant_residual=_subspace_distance(res, com),
        center_residual=_subspace_distance(res, cen),
        blocks=blocks,
    )


@dataclass
class SuppressionEntry:
    name: str
    projected_norm: float
    central: bool
    block_norms: list


@dataclass
class SuppressionReport:
    scenario: str
    entries: list
    full_suppression: bool
    central_suppression: bool


def noise_suppression_check(scenario: Scenario,
                            seed: int = 0) -> SuppressionReport:
    """Per noise generator: norm of the group average and its block
    structure.  Flags full suppression (all averages vanish) or central
    suppression (averages land in the center)."""
    decomp = decompose_irreps(scenario.rep, seed=seed)
    cen = center_basis(scenario.rep)
    entries = []
    for name, S in scenario.noise_generators:
        avg = pi_G(scenario.rep, S)
        norm = float(np.linalg.norm(avg))
        central = _subspace_distance(avg, cen) <= PROTECTED_TOL * max(norm, 1.0)
        block_norms = [float(np.linalg.norm(decomp.block_of(avg, blk)))
                       for blk in decomp.blocks]
        entries.append(SuppressionEntry(name=name, projected_norm=norm,
                                        central=central, block_norms=block_norms))
    full = all(e.projected_norm <= 1e-12 for e in entries)
    central = all(e.central for e in entries)
    return SuppressionReport(scenario=scenario.name, entries=entries,
                             full_suppression=full, central_suppression=central)


@dataclass
class ScalingRow:
    delta_t: float
    cycle_time: float
    cycles: int
    distance: float
    per_cycle: float
    quad_error: float


@dataclass
class ScalingStudy:
    scenario: str
    rows: list
    slope: float        # log-log slope of per-cycle error vs T_c; nan if n/a
    monotonic: bool
    notice: str = ""


def scaling_study(scenario: Scenario, delta_t_values, cycles: int = 1,
                  slices: int = dynamics.DEFAULT_SLICES,
                  quad_points: int = dynamics.DEFAULT_QUAD_POINTS,
                  drift: DriftModel = None, env_dim: int = 2,
                  seed: int = 0, kind: str = "eulerian") -> ScalingStudy:
    """Per-cycle decoupling error against the cycle time, with the fitted
    log-log slope (first-order decoupling gives slope 2)."""
    if drift is None:
        drift = scenario.generic_drift(env_dim=env_dim, seed=seed)
    rows = []
    for dt in delta_t_values:
        sched = scenario.schedule(dt) if kind == "eulerian" else scenario.bangbang(dt)
        hbar, qerr = average_hamiltonian(sched, drift.total(), quad_points,
                                         return_error=True)
        dist = decoupling_distance(drift, sched, cycles, slices, quad_points)
        rows.append(ScalingRow(delta_t=float(dt), cycle_time=sched.cycle_time,
                               cycles=cycles, distance=dist,
                               per_cycle=dist / cycles, quad_error=qerr))
    rows.sort(key=lambda r: -r.cycle_time)
    notice = ""
    per_cycle = [r.per_cycle for r in rows]
    monotonic = all(a >= b * 0.999 for a, b in zip(per_cycle, per_cycle[1:]))
    if not monotonic:
        notice = "non-monotonic data: quadrature or slicing too coarse"
    if all(p <= 1e-13 for p in per_cycle):
        notice = "errors at numerical noise floor; slope not meaningful"
    if len(rows) >= 2 and all(p > 0 for p in per_cycle):
        slope = float(np.polyfit(np.log([r.cycle_time for r in rows]),
                                 np.log(per_cycle), 1)[0])
    else:
        slope = float("nan")
        notice = notice or "slope undefined (need >= 2 nonzero points)"
    return ScalingStudy(scenario=scenario.name, rows=rows, slope=slope,
                        monotonic=monotonic, notice=notice)


def fidelity_error(drift: DriftModel, unitary: np.ndarray,
                   state: np.ndarray) -> float:
    """1 - fidelity of a pure system state under a joint propagator, with a
    maximally mixed environment."""
    d, de = drift.system_dim, drift.env_dim
    rho = np.kron(np.outer(state, state.conj()), np.eye(de) / de)
    rho = unitary @ rho @ unitary.conj().T
    rho_s = rho.reshape(d, de, d, de).trace(axis1=1, axis2=3)
    return float(1.0 - np.real(state.conj() @ rho_s @ state))


def fault_fidelity_comparison(scenario: Scenario, fault: FaultModel,
                              delta_t: float, cycles: int,
                              env_dim: int = 2, seed: int = 0) -> tuple:
    """(decoupled error, free-evolution error) for a random system state
    under a unit-norm generic drift; the decoupled run carries the fault."""
    rng = np.random.default_rng(seed)
    drift = scenario.generic_drift(env_dim=env_dim, seed=seed)
    sched = apply_fault(scenario.schedule(delta_t), fault)
    u_dd = simulate_cycles(drift, sched, cycles)
    t_total = cycles * sched.cycle_time
    u_free = pulses._expm_herm(drift.total(), t_total)
    psi = random_state(scenario.rep.dimension, rng)
    return (fidelity_error(drift, u_dd, psi),
            fidelity_error(drift, u_free, psi))
