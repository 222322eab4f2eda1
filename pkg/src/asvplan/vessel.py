"""3-DOF surface-vessel model: kinematics, dynamics, and integrators.

State is the pose eta = (x, y, psi) in the NED plane plus body-fixed
velocities nu = (u, v, r) (surge, sway, yaw rate).  The craft is driven
by a surge force X and a yaw moment N, mapped to the generalized force
tau = [X, 0, N].

The shipped default coefficients describe a generic ~10 m workboat and
are tuning placeholders, not measurements; everything is configurable
through a flat key-value parameter file (see ``load_params``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class State:
    """Pose + body velocity.  psi is stored unwrapped (plain float, rad)."""

    eta: np.ndarray  # (x [m], y [m], psi [rad])
    nu: np.ndarray   # (u [m/s], v [m/s], r [rad/s])

    def __post_init__(self):
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float).reshape(3))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float).reshape(3))
        if not (np.all(np.isfinite(self.eta)) and np.all(np.isfinite(self.nu))):
            raise InputError("non-finite state")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.eta, self.nu])

    @staticmethod
    def from_vector(s: np.ndarray) -> "State":
        s = np.asarray(s, dtype=float).reshape(6)
        return State(s[:3], s[3:])


@dataclass
class VesselParams:
    """Inertia, damping and actuator limits of the modeled craft.

    Coriolis/centripetal terms are generated from M in the standard
    skew-symmetric form, so no separate coefficients are stored.
    Quadratic damping is diagonal, proportional to |nu| per axis.
    """

    M: np.ndarray                       # 3x3 inertia incl. added mass
    D_lin: np.ndarray                   # 3x3 linear damping
    D_quad: np.ndarray                  # (3,) diagonal |nu|-proportional damping
    u_bounds: tuple[tuple[float, float], tuple[float, float]]  # (X, N) min/max
    nu_bounds: tuple[tuple[float, float], ...]                 # (u, v, r) min/max
    M_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float).reshape(3, 3)
        self.D_lin = np.asarray(self.D_lin, dtype=float).reshape(3, 3)
        self.D_quad = np.asarray(self.D_quad, dtype=float).reshape(3)
        if not np.allclose(self.M, self.M.T, atol=1e-9):
            raise InputError("inertia matrix must be symmetric")
        try:
            eigvals = np.linalg.eigvalsh(self.M)
        except np.linalg.LinAlgError as exc:
            raise InputError("inertia matrix is not diagonalizable") from exc
        if np.min(eigvals) <= 0:
            raise InputError("inertia matrix must be positive definite")
        if np.any(self.D_quad < 0):
            raise InputError("quadratic damping coefficients must be >= 0")
        # D(nu) = D_lin + diag(D_quad * |nu|) must stay PSD; check the
        # linear part (the quadratic part only adds nonnegative diagonal).
        sym = 0.5 * (self.D_lin + self.D_lin.T)
        if np.min(np.linalg.eigvalsh(sym)) < -1e-9:
            raise InputError("linear damping must be positive semi-definite")
        for name, (lo, hi) in (("X", self.u_bounds[0]), ("N", self.u_bounds[1])):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InputError(f"bad {name} bounds ({lo}, {hi})")
        for name, (lo, hi) in zip(("u", "v", "r"), self.nu_bounds):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InputError(f"bad {name} velocity bounds ({lo}, {hi})")
        self.M_inv = np.linalg.inv(self.M)


def default_params() -> VesselParams:
    """Placeholder coefficients for a generic ~10 m workboat."""
    return VesselParams(
        M=np.diag([4000.0, 6000.0, 20000.0]),
        D_lin=np.diag([200.0, 800.0, 3000.0]),
        D_quad=np.array([150.0, 1000.0, 5000.0]),
        u_bounds=((-4000.0, 8000.0), (-15000.0, 15000.0)),
        nu_bounds=((-2.0, 5.0), (-2.0, 2.0), (-0.3, 0.3)),
    )


_PARAM_KEYS = (
    ["m11", "m12", "m13", "m21", "m22", "m23", "m31", "m32", "m33"],
    ["d11", "d12", "d13", "d21", "d22", "d23", "d31", "d32", "d33"],
    ["dq_u", "dq_v", "dq_r"],
    ["x_min", "x_max", "n_min", "n_max"],
    ["u_min", "u_max", "v_min", "v_max", "r_min", "r_max"],
)


def load_params(path: str | Path) -> VesselParams:
    """Parse a flat ``key value`` vessel parameter file.

    Blank lines and ``#`` comments are ignored.  Required keys: m11..m33
    (row-major inertia), d11..d33 (linear damping), dq_u dq_v dq_r
    (quadratic damping), x_min x_max n_min n_max (actuator bounds),
    u_min u_max v_min v_max r_min r_max (velocity bounds).
    """
    values: dict[str, float] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"{path}:{line_no}: expected 'key value', got {raw!r}")
        key, text = parts
        try:
            values[key] = float(text)
        except ValueError as exc:
            raise InputError(f"{path}:{line_no}: bad number {text!r}") from exc
    missing = [k for group in _PARAM_KEYS for k in group if k not in values]
    if missing:
        raise InputError(f"{path}: missing keys {', '.join(missing)}")
    g = lambda *keys: [values[k] for k in keys]
    return VesselParams(
        M=np.array(g(*_PARAM_KEYS[0])).reshape(3, 3),
        D_lin=np.array(g(*_PARAM_KEYS[1])).reshape(3, 3),
        D_quad=np.array(g(*_PARAM_KEYS[2])),
        u_bounds=((values["x_min"], values["x_max"]),
                  (values["n_min"], values["n_max"])),
        nu_bounds=((values["u_min"], values["u_max"]),
                   (values["v_min"], values["v_max"]),
                   (values["r_min"], values["r_max"])),
    )


def save_params(params: VesselParams, path: str | Path) -> None:
    """Write a parameter file readable by load_params."""
    lines = ["# vessel model parameters"]
    flat = list(params.M.ravel()) + list(params.D_lin.ravel()) + list(params.D_quad)
    keys = _PARAM_KEYS[0] + _PARAM_KEYS[1] + _PARAM_KEYS[2]
    lines += [f"{k} {v:.10g}" for k, v in zip(keys, flat)]
    (x_lo, x_hi), (n_lo, n_hi) = params.u_bounds
    lines += [f"x_min {x_lo:.10g}", f"x_max {x_hi:.10g}",
              f"n_min {n_lo:.10g}", f"n_max {n_hi:.10g}"]
    for name, (lo, hi) in zip(("u", "v", "r"), params.nu_bounds):
        lines += [f"{name}_min {lo:.10g}", f"{name}_max {hi:.10g}"]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Model equations
# ---------------------------------------------------------------------------

def rotation(psi: float) -> np.ndarray:
    """Body-to-NED rotation about the z axis."""
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def coriolis(nu: np.ndarray, params: VesselParams) -> np.ndarray:
    """Skew-symmetric C(nu) built from the inertia matrix."""
    a1 = float(params.M[0] @ nu)
    a2 = float(params.M[1] @ nu)
    return np.array([[0.0, 0.0, -a2], [0.0, 0.0, a1], [a2, -a1, 0.0]])


def damping(nu: np.ndarray, params: VesselParams) -> np.ndarray:
    """D(nu) = D_lin + diag(D_quad * |nu|)."""
    return params.D_lin + np.diag(params.D_quad * np.abs(nu))


def dynamics(state: State, ctrl, params: VesselParams) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives (eta_dot, nu_dot) for control ctrl = (X, N)."""
    sdot = _dynamics_vec(state.as_vector(), np.asarray(ctrl, dtype=float), params)
    return sdot[:3], sdot[3:]


def _dynamics_vec(s: np.ndarray, ctrl: np.ndarray, params: VesselParams) -> np.ndarray:
    psi = s[2]
    nu = s[3:]
    tau = np.array([ctrl[0], 0.0, ctrl[1]])
    eta_dot = rotation(psi) @ nu
    nu_dot = params.M_inv @ (tau - coriolis(nu, params) @ nu - damping(nu, params) @ nu)
    return np.concatenate([eta_dot, nu_dot])


def dynamics_jacobians(s: np.ndarray, ctrl: np.ndarray,
                       params: VesselParams) -> tuple[np.ndarray, np.ndarray]:
    """Analytic (d sdot / d s, d sdot / d ctrl) at a state vector.

    The |nu| factors in the quadratic damping are differentiated with
    sign(nu), which is exact away from nu components at zero.
    """
    psi = s[2]
    nu = s[3:]
    u, v, r = nu
    A = np.zeros((6, 6))
    B = np.zeros((6, 2))

    c, si = math.cos(psi), math.sin(psi)
    R = rotation(psi)
    dR = np.array([[-si, -c, 0.0], [c, -si, 0.0], [0.0, 0.0, 0.0]])
    A[:3, 2] = dR @ nu
    A[:3, 3:] = R

    m = params.M
    a1 = float(m[0] @ nu)
    a2 = float(m[1] @ nu)
    # C(nu) nu = [-a2 r, a1 r, a2 u - a1 v]; rows of M are m[0], m[1].
    dCnu = np.array([
        [-m[1, 0] * r, -m[1, 1] * r, -a2 - m[1, 2] * r],
        [m[0, 0] * r, m[0, 1] * r, a1 + m[0, 2] * r],
        [a2 + m[1, 0] * u - m[0, 0] * v,
         m[1, 1] * u - a1 - m[0, 1] * v,
         m[1, 2] * u - m[0, 2] * v],
    ])
    dDnu = params.D_lin + np.diag(2.0 * params.D_quad * np.abs(nu) * np.sign(nu) * np.sign(nu))
    # diag term: d(dq*|x|*x)/dx = 2*dq*|x|
    dDnu = params.D_lin + np.diag(2.0 * params.D_quad * np.abs(nu))
    A[3:, 3:] = -params.M_inv @ (dCnu + dDnu)

    B[3:, 0] = params.M_inv[:, 0]
    B[3:, 1] = params.M_inv[:, 2]
    return A, B


# ---------------------------------------------------------------------------
# Integrators
# ---------------------------------------------------------------------------

def rk4(f, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta-4 step of y' = f(y)."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def heun(f, y: np.ndarray, dt: float) -> np.ndarray:
    """One improved-Euler (Heun) predictor-corrector step of y' = f(y)."""
    k1 = f(y)
    k2 = f(y + dt * k1)
    return y + 0.5 * dt * (k1 + k2)


def rk4_step(state: State, ctrl, params: VesselParams, dt: float) -> State:
    """RK4 step of the vessel dynamics with ctrl held constant."""
    if dt <= 0:
        raise InputError("dt must be > 0")
    ctrl = np.asarray(ctrl, dtype=float)
    s = rk4(lambda y: _dynamics_vec(y, ctrl, params), state.as_vector(), dt)
    return State.from_vector(s)


def heun_step(state: State, ctrl, params: VesselParams, dt: float) -> State:
    """Heun step of the vessel dynamics with ctrl held constant."""
    if dt <= 0:
        raise InputError("dt must be > 0")
    ctrl = np.asarray(ctrl, dtype=float)
    s = heun(lambda y: _dynamics_vec(y, ctrl, params), state.as_vector(), dt)
    return State.from_vector(s)


def rk4_step_with_jacobians(s: np.ndarray, ctrl: np.ndarray, params: VesselParams,
                            dt: float, substeps: int = 1
                            ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """RK4 flow map over dt with analytic sensitivities.

    Returns (s_next, d s_next / d s, d s_next / d ctrl) with the control
    held constant across all substeps.  Used by the multiple-shooting
    transcription, where continuity constraints need exact Jacobians.
    """
    h = dt / substeps
    Js = np.eye(6)
    Ju = np.zeros((6, 2))
    for _ in range(substeps):
        k1 = _dynamics_vec(s, ctrl, params)
        A1, B1 = dynamics_jacobians(s, ctrl, params)
        s2 = s + 0.5 * h * k1
        k2 = _dynamics_vec(s2, ctrl, params)
        A2, B2 = dynamics_jacobians(s2, ctrl, params)
        s3 = s + 0.5 * h * k2
        k3 = _dynamics_vec(s3, ctrl, params)
        A3, B3 = dynamics_jacobians(s3, ctrl, params)
        s4 = s + h * k3
        k4 = _dynamics_vec(s4, ctrl, params)
        A4, B4 = dynamics_jacobians(s4, ctrl, params)

        # Chain rule through the stage evaluations.
        K1s, K1u = A1, B1
        K2s = A2 @ (np.eye(6) + 0.5 * h * K1s)
        K2u = B2 + 0.5 * h * (A2 @ K1u)
        K3s = A3 @ (np.eye(6) + 0.5 * h * K2s)
        K3u = B3 + 0.5 * h * (A3 @ K2u)
        K4s = A4 @ (np.eye(6) + h * K3s)
        K4u = B4 + h * (A4 @ K3u)

        step_s = np.eye(6) + (h / 6.0) * (K1s + 2.0 * K2s + 2.0 * K3s + K4s)
        step_u = (h / 6.0) * (K1u + 2.0 * K2u + 2.0 * K3u + K4u)
        Ju = step_s @ Ju + step_u
        Js = step_s @ Js
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s, Js, Ju
