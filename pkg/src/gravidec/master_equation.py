"""Centre-of-mass master equation with time-dilation dephasing.

The internal thermal bath couples to the centre of mass through the position-
dependent clock rate, which at second order produces a double-commutator
dephasing term in x on top of whatever Hamiltonian the centre of mass has.
Two integrators are provided:

* :func:`evolve_markovian` - the time-local equation

      drho/dt = -(i/hbar)[H, rho] - Lambda * t * [x, [x, rho]],

  whose dephasing coefficient grows linearly in t. In the position basis the
  dephasing is elementwise, so each step applies the exact factor
  exp(-Lambda (x_i - x_j)^2 * (t + dt/2) * dt); summed over steps this
  telescopes to the exact exp(-Lambda (x_i - x_j)^2 t^2 / 2), and for a
  two-point superposition of separation dx the visibility is the Gaussian
  law exp(-(t/tau_dec)^2) with Lambda dx^2 = 2 / tau_dec^2.

* :func:`evolve_full_memory` - the second-order time-convolutionless form

      drho/dt = -(i/hbar)[H, rho] - Lambda * int_0^t ds [x, U_s [x, rho(t)] U_s+],

  with U_s = exp(-i H s / hbar) the centre-of-mass propagator alone. The
  s-integral is evaluated in closed form in the eigenbasis of H (the
  sandwich is elementwise there), and the time stepping is classic RK4, a
  genuinely different numerical path from the Markovian exponential. With no
  centre-of-mass Hamiltonian the propagators are the identity, the integral
  collapses to t * [x, [x, rho]], and both integrators must agree.

Lambda carries units 1/(m^2 s^2). For N high-temperature modes it is
N (k_B T g / (hbar c^2))^2; the general kernel is parameterized by the
internal energy variance through :func:`memory_kernel_coefficients`.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants
from .errors import DomainError, NumericalInstabilityError
from .internal_state import InternalStateSpec, internal_energy_variance, mean_internal_energy

HAMILTONIAN_KINDS = ("none", "free", "free_plus_linear")
EVOLUTION_FORMS = ("markovian", "full_memory")

#: Hard cap on stored snapshots (bytes); keeps long runs from exhausting RAM.
MAX_SNAPSHOT_BYTES = 1 << 30

_SNAPSHOT_MAGIC = b"GDSNAP01"


@dataclass(frozen=True)
class DensityMatrixGrid:
    """Position-basis density matrix rho(x_i, x_j) on a uniform grid.

    Discrete normalization sum_i rho_ii = 1 (entries are dimensionless, not
    densities). ``pair`` optionally marks the (i, j) element whose decay is
    the interferometric signal.
    """

    x: np.ndarray
    rho: np.ndarray
    pair: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        rho = np.asarray(self.rho, dtype=complex)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "rho", rho)
        if x.ndim != 1 or x.size < 2:
            raise DomainError("grid needs at least two points")
        dx = np.diff(x)
        if not np.all(dx > 0) or not np.allclose(dx, dx[0], rtol=1e-9, atol=0):
            raise DomainError("grid must be uniform and increasing")
        if rho.shape != (x.size, x.size):
            raise DomainError("rho must be square on the grid")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise DomainError("rho must be Hermitian")
        if abs(float(np.sum(rho.diagonal()).real) - 1.0) > 1e-10:
            raise DomainError("trace(rho) must equal 1")
        if np.min(rho.diagonal().real) < -1e-12:
            raise DomainError("diagonal of rho must be nonnegative")
        if self.pair is not None:
            i, j = self.pair
            if not (0 <= i < x.size and 0 <= j < x.size):
                raise DomainError("pair indices outside the grid")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def index_of(self, position: float) -> int:
        """Grid index of ``position``; off-grid positions are an error."""
        idx = int(round((position - self.x[0]) / self.dx))
        if not 0 <= idx < self.x.size or abs(self.x[idx] - position) > 1e-9 * max(
            self.dx, abs(position)
        ):
            raise DomainError(f"position {position} is not on the grid")
        return idx

    @classmethod
    def two_point_superposition(
        cls, x1: float, x2: float, n_points: int = 2, span_factor: float = 2.0
    ) -> "DensityMatrixGrid":
        """Equal superposition of position eigenstates at x1 and x2.

        The default 2-point grid is the exact reduced representation of this
        state; with more points the grid spans ``span_factor`` times the
        separation and both positions land exactly on nodes (use this with a
        kinetic term, which needs room to act).
        """
        if x2 <= x1:
            raise DomainError("need x2 > x1")
        if n_points < 2:
            raise DomainError("n_points must be >= 2")
        if span_factor < 1.0:
            raise DomainError("span_factor must be >= 1")
        sep = x2 - x1
        if n_points == 2:
            grid = np.array([x1, x2])
            i1, k = 0, 1
        else:
            dx_target = span_factor * sep / (n_points - 1)
            k = min(max(1, round(sep / dx_target)), n_points - 1)
            dx = sep / k
            i1 = (n_points - 1 - k) // 2
            grid = x1 + (np.arange(n_points) - i1) * dx
        psi = np.zeros(n_points, dtype=complex)
        psi[i1] = psi[i1 + k] = 1.0 / math.sqrt(2.0)
        return cls(x=grid, rho=np.outer(psi, psi.conj()), pair=(i1, i1 + k))


@dataclass(frozen=True)
class CMHamiltonianSpec:
    """Centre-of-mass Hamiltonian: nothing, free flight, or free + linear tilt.

    The kinetic term uses the bare mass; the gravitational tilt couples to
    the total weight, rest mass plus the mean internal energy over c^2 (a
    warm body weighs more than a cold one).
    """

    kind: str
    mass: float = 0.0
    g: float = 0.0
    internal_mean_energy: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in HAMILTONIAN_KINDS:
            raise DomainError(f"kind must be one of {HAMILTONIAN_KINDS}")
        if self.kind != "none" and self.mass <= 0:
            raise DomainError("mass must be > 0 for a dynamical centre of mass")
        if self.internal_mean_energy < 0:
            raise DomainError("internal_mean_energy must be >= 0")

    def gravitational_weight(self, consts: PhysicalConstants) -> float:
        """m + E_internal/c^2, the mass that couples to the linear potential."""
        return self.mass + self.internal_mean_energy / consts.c**2


@dataclass(frozen=True)
class EvolutionConfig:
    """Time stepping and dephasing strength for one evolution run."""

    dt: float
    t_final: float
    lambda_coefficient: float
    form: str = "markovian"
    store_every: int = 0  # 0: keep no snapshots, only the tracked pair

    def __post_init__(self) -> None:
        if self.dt <= 0 or self.t_final <= 0:
            raise DomainError("dt and t_final must be > 0")
        if self.t_final < self.dt:
            raise DomainError("t_final must be >= dt")
        if self.lambda_coefficient < 0:
            raise DomainError("lambda_coefficient must be >= 0")
        if self.form not in EVOLUTION_FORMS:
            raise DomainError(f"form must be one of {EVOLUTION_FORMS}")
        if self.store_every < 0:
            raise DomainError("store_every must be >= 0")

    @property
    def n_steps(self) -> int:
        n = round(self.t_final / self.dt)
        if n < 1 or abs(n * self.dt - self.t_final) > 1e-9 * self.t_final:
            raise DomainError("t_final must be an integer multiple of dt")
        return n


@dataclass(frozen=True)
class EvolutionResult:
    """Per-step coherence track plus optional stored snapshots."""

    x: np.ndarray
    times: np.ndarray
    coherence: np.ndarray
    form: str
    pair: tuple[int, int] | None
    snapshot_times: np.ndarray
    snapshots: np.ndarray


@dataclass(frozen=True)
class MemoryKernelCoefficients:
    """Drift and decoherence strengths of the general internal-state kernel.

    ``decoherence`` times g^2 is the Lambda of the master equation;
    ``drift`` times g is the force-like shift from the mean internal energy.
    """

    mean_energy: float
    energy_variance: float
    drift: float
    decoherence: float


def memory_kernel_coefficients(
    spec: InternalStateSpec, consts: PhysicalConstants
) -> MemoryKernelCoefficients:
    e0 = mean_internal_energy(spec, consts)
    var = internal_energy_variance(spec, consts)
    c2 = consts.c**2
    return MemoryKernelCoefficients(
        mean_energy=e0,
        energy_variance=var,
        drift=e0 / c2,
        decoherence=var / (consts.hbar * c2) ** 2,
    )


def dephasing_coefficient(
    n_modes: float, temperature: float, g: float, consts: PhysicalConstants
) -> float:
    """High-temperature Lambda = N (k_B T g / (hbar c^2))^2."""
    if n_modes < 0 or temperature < 0:
        raise DomainError("n_modes and temperature must be >= 0")
    return n_modes * (consts.k_B * temperature * g / (consts.hbar * consts.c**2)) ** 2


def _snapshot_plan(cfg: EvolutionConfig, m: int) -> list[int]:
    if cfg.store_every == 0:
        return []
    steps = list(range(0, cfg.n_steps + 1, cfg.store_every))
    if steps[-1] != cfg.n_steps:
        steps.append(cfg.n_steps)
    need = len(steps) * m * m * 16
    if need > MAX_SNAPSHOT_BYTES:
        min_every = math.ceil(cfg.n_steps * m * m * 16 / MAX_SNAPSHOT_BYTES)
        max_t = MAX_SNAPSHOT_BYTES // (m * m * 16) * cfg.store_every * cfg.dt
        raise DomainError(
            f"snapshot storage would need {need} bytes (> {MAX_SNAPSHOT_BYTES}); "
            f"raise store_every to >= {min_every} or keep t_final <= {max_t:.6g} s"
        )
    return steps


def _check_finite(rho: np.ndarray, step: int) -> None:
    if not np.all(np.isfinite(rho.view(float))):
        raise NumericalInstabilityError(
            f"non-finite density matrix at step {step}; reduce dt"
        )


def _hamiltonian_matrix(
    x: np.ndarray, ham: CMHamiltonianSpec, consts: PhysicalConstants
) -> np.ndarray | None:
    """Dense H on the grid (spectral kinetic term, periodic convention)."""
    if ham.kind == "none":
        return None
    m = x.size
    dx = float(x[1] - x[0])
    k = 2.0 * math.pi * np.fft.fftfreq(m, d=dx)
    kin_diag = (consts.hbar * k) ** 2 / (2.0 * ham.mass)
    h = np.fft.ifft(kin_diag[:, None] * np.fft.fft(np.eye(m), axis=0), axis=0)
    if ham.kind == "free_plus_linear":
        h = h + np.diag(ham.gravitational_weight(consts) * ham.g * x).astype(complex)
    return 0.5 * (h + h.conj().T)


def evolve_markovian(
    rho0: DensityMatrixGrid,
    ham: CMHamiltonianSpec,
    cfg: EvolutionConfig,
    consts: PhysicalConstants,
) -> EvolutionResult:
    """Strang-split integration of the time-local equation.

    Kinetic half-steps act by FFT on both indices; the potential phase and
    the dephasing factor are elementwise in the position basis. With
    kind="none" every step is exact regardless of dt.
    """
    x = rho0.x
    m = x.size
    dx = rho0.dx
    n_steps = cfg.n_steps
    snap_steps = _snapshot_plan(cfg, m)

    dsq = (x[:, None] - x[None, :]) ** 2
    if ham.kind in ("free", "free_plus_linear"):
        k = 2.0 * math.pi * np.fft.fftfreq(m, d=dx)
        half_kin = np.exp(-1j * consts.hbar * k**2 * cfg.dt / (4.0 * ham.mass))
    else:
        half_kin = None
    if ham.kind == "free_plus_linear":
        v = ham.gravitational_weight(consts) * ham.g * x
        pot_phase = np.exp(-1j * (v[:, None] - v[None, :]) * cfg.dt / consts.hbar)
    else:
        pot_phase = None

    rho = rho0.rho.copy()
    coherence = np.empty(n_steps + 1, dtype=complex)
    times = np.arange(n_steps + 1) * cfg.dt
    snaps: list[np.ndarray] = []
    snap_times: list[float] = []

    def record(step: int) -> None:
        if rho0.pair is not None:
            coherence[step] = rho[rho0.pair]
        else:
            coherence[step] = np.nan
        if step in plan_set:
            snaps.append(rho.copy())
            snap_times.append(times[step])

    plan_set = set(snap_steps)
    record(0)
    for step in range(n_steps):
        t_mid = (step + 0.5) * cfg.dt
        if half_kin is not None:
            rho = np.fft.ifft(half_kin[:, None] * np.fft.fft(rho, axis=0), axis=0)
            rho = np.fft.fft(half_kin.conj()[None, :] * np.fft.ifft(rho, axis=1), axis=1)
        if pot_phase is not None:
            rho = rho * pot_phase
        rho = rho * np.exp(-cfg.lambda_coefficient * dsq * t_mid * cfg.dt)
        if half_kin is not None:
            rho = np.fft.ifft(half_kin[:, None] * np.fft.fft(rho, axis=0), axis=0)
            rho = np.fft.fft(half_kin.conj()[None, :] * np.fft.ifft(rho, axis=1), axis=1)
        _check_finite(rho, step + 1)
        record(step + 1)

    return EvolutionResult(
        x=x,
        times=times,
        coherence=coherence,
        form="markovian",
        pair=rho0.pair,
        snapshot_times=np.array(snap_times),
        snapshots=np.array(snaps) if snaps else np.empty((0, m, m), dtype=complex),
    )


def evolve_full_memory(
    rho0: DensityMatrixGrid,
    ham: CMHamiltonianSpec,
    cfg: EvolutionConfig,
    consts: PhysicalConstants,
) -> EvolutionResult:
    """RK4 integration of the time-convolutionless kernel equation.

    The s-integral of the back-propagated coupling is done analytically in
    the eigenbasis of H: sandwiching by U_s is elementwise there, and
    int_0^t exp(-i w s) ds has closed form. With kind="none" the propagators
    are the identity and the right-hand side reduces to
    -Lambda t [x, [x, rho]] with no matrix products at all.
    """
    x = rho0.x
    m = x.size
    n_steps = cfg.n_steps
    snap_steps = _snapshot_plan(cfg, m)
    xdiff = x[:, None] - x[None, :]
    dsq = xdiff**2

    h = _hamiltonian_matrix(x, ham, consts)
    if h is not None:
        evals, q = np.linalg.eigh(h)
        omega = (evals[:, None] - evals[None, :]) / consts.hbar
        qh = q.conj().T

        def kernel_window(t: float) -> np.ndarray:
            wt = omega * t
            small = np.abs(wt) < 1e-8
            omega_safe = np.where(small, 1.0, omega)
            full = (1.0 - np.exp(-1j * wt)) / (1j * omega_safe)
            return np.where(small, t * (1.0 - 0.5j * wt), full)

        def rhs(t: float, rho: np.ndarray) -> np.ndarray:
            comm_h = h @ rho - rho @ h
            b = xdiff * rho  # [x, rho] is elementwise: x is diagonal here
            w = q @ (kernel_window(t) * (qh @ b @ q)) @ qh
            return -1j * comm_h / consts.hbar - cfg.lambda_coefficient * (xdiff * w)

    else:

        def rhs(t: float, rho: np.ndarray) -> np.ndarray:
            return -cfg.lambda_coefficient * t * dsq * rho

    rho = rho0.rho.copy()
    coherence = np.empty(n_steps + 1, dtype=complex)
    times = np.arange(n_steps + 1) * cfg.dt
    snaps: list[np.ndarray] = []
    snap_times: list[float] = []
    plan_set = set(snap_steps)

    def record(step: int) -> None:
        if rho0.pair is not None:
            coherence[step] = rho[rho0.pair]
        else:
            coherence[step] = np.nan
        if step in plan_set:
            snaps.append(rho.copy())
            snap_times.append(times[step])

    record(0)
    dt = cfg.dt
    for step in range(n_steps):
        t = step * dt
        k1 = rhs(t, rho)
        k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(rho, step + 1)
        record(step + 1)

    return EvolutionResult(
        x=x,
        times=times,
        coherence=coherence,
        form="full_memory",
        pair=rho0.pair,
        snapshot_times=np.array(snap_times),
        snapshots=np.array(snaps) if snaps else np.empty((0, m, m), dtype=complex),
    )


def evolve(
    rho0: DensityMatrixGrid,
    ham: CMHamiltonianSpec,
    cfg: EvolutionConfig,
    consts: PhysicalConstants,
) -> EvolutionResult:
    """Dispatch on ``cfg.form``."""
    if cfg.form == "markovian":
        return evolve_markovian(rho0, ham, cfg, consts)
    return evolve_full_memory(rho0, ham, cfg, consts)


def extract_visibility(result: EvolutionResult, x1: float | None = None,
                       x2: float | None = None):
    """Visibility V(t) = 2 |rho(x1, x2, t)| as a curve.

    With no positions given, the evolution's tracked pair is used and V(t)
    is available at every step. Explicit positions must lie on the grid; if
    they differ from the tracked pair the curve is read from the stored
    snapshots instead. Discretization can make V(0) differ from 1, in which
    case the curve is normalized by V(0).
    """
    from .visibility import VisibilityCurve

    if x1 is None and x2 is None:
        if result.pair is None:
            raise DomainError("evolution carried no tracked pair")
        times = result.times
        series = result.coherence
    else:
        if x1 is None or x2 is None:
            raise DomainError("give both positions or neither")
        dx = result.x[1] - result.x[0]
        idx = []
        for pos in (x1, x2):
            i = int(round((pos - result.x[0]) / dx))
            if not 0 <= i < result.x.size or abs(result.x[i] - pos) > 1e-9 * max(dx, abs(pos)):
                raise DomainError(f"position {pos} is not on the grid")
            idx.append(i)
        if result.pair is not None and tuple(idx) == result.pair:
            times = result.times
            series = result.coherence
        else:
            if result.snapshots.shape[0] == 0:
                raise DomainError(
                    "positions differ from the tracked pair and no snapshots were stored"
                )
            times = result.snapshot_times
            series = result.snapshots[:, idx[0], idx[1]]
    values = 2.0 * np.abs(series)
    if values[0] == 0:
        raise DomainError("initial coherence at the requested pair is zero")
    if abs(values[0] - 1.0) > 1e-12:
        values = values / values[0]
    return VisibilityCurve(times=times, values=np.clip(values, 0.0, 1.0),
                           law="master-equation")


def save_snapshots(path: str, times: np.ndarray, x: np.ndarray, snapshots: np.ndarray) -> None:
    """Write snapshots as little-endian binary.

    Layout: magic "GDSNAP01", int64 n_snapshots, int64 m, float64 xmin,
    float64 xmax, then per snapshot a float64 time followed by m*m
    complex128 values in row-major order.
    """
    times = np.asarray(times, dtype=float)
    snapshots = np.asarray(snapshots, dtype=complex)
    x = np.asarray(x, dtype=float)
    if snapshots.ndim != 3 or snapshots.shape[0] != times.size:
        raise DomainError("snapshots must be (n, m, m) matching times")
    n, m, m2 = snapshots.shape
    if m != m2 or m != x.size:
        raise DomainError("snapshot matrices must be square on the grid")
    with open(path, "wb") as fh:
        fh.write(_SNAPSHOT_MAGIC)
        fh.write(struct.pack("<qqdd", n, m, float(x[0]), float(x[-1])))
        for t, rho in zip(times, snapshots):
            fh.write(struct.pack("<d", float(t)))
            fh.write(rho.astype("<c16").tobytes(order="C"))


def load_snapshots(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`save_snapshots`; returns (times, x, snapshots)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_SNAPSHOT_MAGIC))
        if magic != _SNAPSHOT_MAGIC:
            raise DomainError(f"{path}: not a snapshot file")
        n, m, xmin, xmax = struct.unpack("<qqdd", fh.read(32))
        if n < 0 or m < 2:
            raise DomainError(f"{path}: corrupt snapshot header")
        times = np.empty(n)
        snaps = np.empty((n, m, m), dtype=complex)
        for i in range(n):
            (times[i],) = struct.unpack("<d", fh.read(8))
            buf = fh.read(16 * m * m)
            if len(buf) != 16 * m * m:
                raise DomainError(f"{path}: truncated snapshot {i}")
            snaps[i] = np.frombuffer(buf, dtype="<c16").reshape(m, m)
    return times, np.linspace(xmin, xmax, m), snaps
