"""Non-Markovian dephasing / depolarizing channels and their random variants.

A single-qubit channel realization is a ``KrausSet``; ``apply_local_channel``
lifts per-qubit Kraus sets to the full register and applies them to the
designated sender qubits.

The channel weights are

* dephasing:    (1 - a*p)(1 - p) on I,  (1 + a*(1 - p))*p on Uz,
* depolarizing: (1 - 3*a*p)(1 - p) on I,  (1 + 3*a*(1 - p))*p/3 on each of
  Ux, Uy, Uz,

where ``a`` is the non-Markovianity strength.  With exact Pauli unitaries
these are the deterministic channels; the random variants replace the Paulis
by unitaries whose Euler parameters are drawn from Gaussians centered at the
Pauli triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .qmath import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, n_qubits

COMPLETENESS_TOL = 1e-10


class ChannelError(ValueError):
    """Invalid channel parameters or application targets."""


class ChannelKind(Enum):
    DEPHASING = "dephasing"
    DEPOLARIZING = "depolarizing"


class DrawPolicy(Enum):
    INDEPENDENT_PER_QUBIT = "per-qubit"
    SHARED_ACROSS_QUBITS = "shared"


@dataclass(frozen=True)
class UnitaryParams:
    """Euler-like parameters (omega, theta, delta) of a 2x2 unitary."""
    omega: float
    theta: float
    delta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.omega, self.theta, self.delta])


IDENTITY_PARAMS = UnitaryParams(0.0, 0.0, 0.0)

_PAULI_MEANS = {
    "x": UnitaryParams(2 * np.pi, np.pi, np.pi),
    "y": UnitaryParams(3 * np.pi, np.pi, np.pi),
    "z": UnitaryParams(2 * np.pi, 0.0, 3 * np.pi),
}


def pauli_means(which: str) -> UnitaryParams:
    """Parameter triple whose unitary equals the given Pauli up to phase."""
    try:
        return _PAULI_MEANS[which.lower()]
    except KeyError:
        raise ChannelError(f"unknown Pauli {which!r}, expected X, Y or Z") from None


def unitary_from_params(u: UnitaryParams) -> np.ndarray:
    """U = diag(e^{iw/2}, e^{-iw/2}) R_y(theta) diag(e^{id/2}, e^{-id/2}).

    The half-angle convention is used in the third factor as well: it is the
    one that maps the Pauli parameter triples onto the Pauli matrices (up to
    global phase).
    """
    left = np.diag([np.exp(1j * u.omega / 2), np.exp(-1j * u.omega / 2)])
    c, s = np.cos(u.theta / 2), np.sin(u.theta / 2)
    mid = np.array([[c, -s], [s, c]], dtype=complex)
    right = np.diag([np.exp(1j * u.delta / 2), np.exp(-1j * u.delta / 2)])
    return left @ mid @ right


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    alpha: float
    p: float
    epsilon: float = 0.0
    draw_policy: DrawPolicy = DrawPolicy.INDEPENDENT_PER_QUBIT

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ChannelError(f"alpha={self.alpha} outside [0, 1]")
        if self.epsilon < 0.0:
            raise ChannelError(f"epsilon={self.epsilon} must be >= 0")
        if self.kind is ChannelKind.DEPHASING:
            if not 0.0 <= self.p <= 0.5:
                raise ChannelError(f"dephasing p={self.p} outside [0, 1/2]")
        else:
            p_max = 1.0 if self.alpha == 0.0 else min(1.0, 1.0 / (3.0 * self.alpha))
            if not 0.0 <= self.p <= p_max + 1e-12:
                raise ChannelError(
                    f"depolarizing p={self.p} outside [0, {p_max}] for alpha={self.alpha}")

    @property
    def is_random(self) -> bool:
        return self.epsilon > 0.0

    @property
    def is_covariant(self) -> bool:
        """Deterministic depolarizing commutes with the full Pauli set."""
        return self.kind is ChannelKind.DEPOLARIZING and not self.is_random


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered single-qubit Kraus operators with sum K^dag K = I."""
    operators: tuple = field()

    def __post_init__(self):
        acc = np.zeros((2, 2), dtype=complex)
        for k in self.operators:
            if k.shape != (2, 2):
                raise ChannelError("Kraus operators must be 2x2")
            acc = acc + k.conj().T @ k
        if np.max(np.abs(acc - I2)) > COMPLETENESS_TOL:
            raise ChannelError("Kraus set violates completeness")


def kraus_dephasing(alpha: float, p: float, uz: np.ndarray = SIGMA_Z) -> KrausSet:
    """Dephasing Kraus pair {sqrt((1-ap)(1-p)) I, sqrt((1+a(1-p))p) Uz}."""
    if not 0.0 <= p <= 0.5:
        raise ChannelError(f"dephasing p={p} outside [0, 1/2]")
    w_id = (1.0 - alpha * p) * (1.0 - p)
    w_z = (1.0 + alpha * (1.0 - p)) * p
    return KrausSet((np.sqrt(w_id) * I2, np.sqrt(w_z) * np.asarray(uz, dtype=complex)))


def kraus_depolarizing(alpha: float, p: float,
                       ux: np.ndarray = SIGMA_X, uy: np.ndarray = SIGMA_Y,
                       uz: np.ndarray = SIGMA_Z) -> KrausSet:
    """Depolarizing Kraus quadruple per the non-Markovian weights."""
    w_id = (1.0 - 3.0 * alpha * p) * (1.0 - p)
    if w_id < -1e-15:
        raise ChannelError(f"depolarizing weight (1-3ap)(1-p) < 0 at alpha={alpha}, p={p}")
    w_id = max(0.0, w_id)
    w_p = (1.0 + 3.0 * alpha * (1.0 - p)) * p / 3.0
    mats = (I2, np.asarray(ux, dtype=complex), np.asarray(uy, dtype=complex),
            np.asarray(uz, dtype=complex))
    weights = (w_id, w_p, w_p, w_p)
    return KrausSet(tuple(np.sqrt(w) * m for w, m in zip(weights, mats)))


def _draw_params(mean: UnitaryParams, eps: float, rng: np.random.Generator) -> UnitaryParams:
    if eps == 0.0:
        return mean
    vals = rng.normal(mean.as_array(), eps)
    return UnitaryParams(*vals)


def _one_kraus_set(spec: ChannelSpec, rng: np.random.Generator) -> KrausSet:
    if spec.kind is ChannelKind.DEPHASING:
        uz = unitary_from_params(_draw_params(pauli_means("z"), spec.epsilon, rng))
        return kraus_dephasing(spec.alpha, spec.p, uz)
    us = [unitary_from_params(_draw_params(pauli_means(w), spec.epsilon, rng))
          for w in ("x", "y", "z")]
    return kraus_depolarizing(spec.alpha, spec.p, *us)


def sample_random_kraus(spec: ChannelSpec, rng: np.random.Generator) -> KrausSet:
    """Draw one single-qubit channel realization from the Gaussian ensemble."""
    return _one_kraus_set(spec, rng)


def sample_per_qubit_kraus(spec: ChannelSpec, n_targets: int,
                           rng: np.random.Generator) -> list[KrausSet]:
    """One KrausSet per target qubit, honoring the draw policy."""
    if spec.draw_policy is DrawPolicy.SHARED_ACROSS_QUBITS:
        ks = _one_kraus_set(spec, rng)
        return [ks] * n_targets
    return [_one_kraus_set(spec, rng) for _ in range(n_targets)]


def deterministic_kraus(spec: ChannelSpec) -> KrausSet:
    """The exact-Pauli channel for the given spec (epsilon ignored)."""
    if spec.kind is ChannelKind.DEPHASING:
        return kraus_dephasing(spec.alpha, spec.p)
    return kraus_depolarizing(spec.alpha, spec.p)


def _lift(op: np.ndarray, target: int, n: int) -> np.ndarray:
    """Embed a 2x2 operator on one qubit of an n-qubit register."""
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(out, op if q == target else I2)
    return out


def apply_local_channel(rho: np.ndarray, per_qubit_kraus: list[KrausSet],
                        targets: list[int]) -> np.ndarray:
    """Apply one single-qubit channel per target qubit, identity elsewhere."""
    n = n_qubits(rho)
    if len(per_qubit_kraus) != len(targets):
        raise ChannelError("need exactly one KrausSet per target")
    if len(set(targets)) != len(targets):
        raise ChannelError("targets must be distinct")
    out = rho
    for ks, t in zip(per_qubit_kraus, targets):
        if not 0 <= t < n:
            raise ChannelError(f"target {t} out of range for {n} qubits")
        lifted = [_lift(k, t, n) for k in ks.operators]
        out = sum(L @ out @ L.conj().T for L in lifted)
    return out


def apply_channel_statevector(psi: np.ndarray, per_qubit_kraus: list[KrausSet],
                              targets: list[int]) -> np.ndarray:
    """Channel output for a pure input, via Kraus combinations on the vector.

    Equivalent to ``apply_local_channel(|psi><psi|, ...)`` but cheaper: each
    of the prod(len(K_i)) Kraus combinations acts on the state vector and the
    rank-one terms are summed.
    """
    n = psi.size.bit_length() - 1
    if len(per_qubit_kraus) != len(targets):
        raise ChannelError("need exactly one KrausSet per target")
    shaped = psi.reshape([2] * n)
    out = np.zeros((psi.size, psi.size), dtype=complex)
    for combo in itertools.product(*(ks.operators for ks in per_qubit_kraus)):
        v = shaped
        for k, t in zip(combo, targets):
            v = np.moveaxis(np.tensordot(k, v, axes=([1], [t])), 0, t)
        v = v.reshape(-1)
        out += np.outer(v, v.conj())
    return out


def parse_channel(spec: str) -> ChannelSpec:
    """Parse a CLI channel specifier.

    Examples: ``dephasing:alpha=0.5,p=0.3``,
    ``depolarizing:alpha=0.3,p=0.1,eps=0.7,draw=per-qubit``.
    """
    name, _, rest = spec.strip().partition(":")
    name = name.lower()
    try:
        kind = ChannelKind(name)
    except ValueError:
        raise ChannelError(f"unknown channel kind {name!r}") from None
    kv: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            k, _, v = item.partition("=")
            if not v:
                raise ChannelError(f"malformed channel parameter {item!r} in {spec!r}")
            kv[k.strip()] = v.strip()
    try:
        draw = DrawPolicy(kv.pop("draw", "per-qubit"))
    except ValueError:
        raise ChannelError(f"unknown draw policy in {spec!r}") from None
    try:
        return ChannelSpec(kind, float(kv.pop("alpha", 0.0)), float(kv.pop("p")),
                           float(kv.pop("eps", 0.0)), draw)
    except KeyError as exc:
        raise ChannelError(f"channel {spec!r} is missing parameter {exc}") from None
