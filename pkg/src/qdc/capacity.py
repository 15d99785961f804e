"""Dense-coding capacity (one receiver) and the LOCC upper bound (two).

Conventions: qubit order is senders first, receivers last.  With N senders
the classical bound is N bits.  Noise acts on the transmitted sender qubits
only, so receiver marginals are always taken from the pre-channel state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .channels import (ChannelSpec, KrausSet, apply_local_channel,
                       deterministic_kraus, sample_per_qubit_kraus,
                       unitary_from_params)
from .optimizer import EncodingParams, OptimizerConfig, minimize
from .qmath import partial_trace, von_neumann_entropy

DENSE_CODEABLE_SLACK = 1e-9


class LayoutError(ValueError):
    """Inconsistent sender/receiver layout."""


@dataclass(frozen=True)
class PartyLayout:
    n_senders: int
    n_receivers: int = 1
    split: int | None = None   # two receivers: senders [0, split) talk to R1

    def __post_init__(self):
        if self.n_senders < 1:
            raise LayoutError("need at least one sender")
        if self.n_receivers not in (1, 2):
            raise LayoutError("layout supports one or two receivers")
        if self.n_qubits > 5:
            raise LayoutError(f"{self.n_qubits} qubits exceed the 5-qubit limit")
        if self.n_receivers == 2:
            if self.split is None or not 1 <= self.split < self.n_senders:
                raise LayoutError(f"two-receiver split {self.split} invalid "
                                  f"for {self.n_senders} senders")
        elif self.split is not None:
            raise LayoutError("split only applies to two-receiver layouts")

    @property
    def n_qubits(self) -> int:
        return self.n_senders + self.n_receivers

    @property
    def sender_indices(self) -> list[int]:
        return list(range(self.n_senders))

    @property
    def receiver_indices(self) -> list[int]:
        return list(range(self.n_senders, self.n_qubits))

    def check(self, rho: np.ndarray) -> None:
        if rho.shape[0] != 2**self.n_qubits:
            raise LayoutError(f"state dimension {rho.shape[0]} does not match "
                              f"{self.n_qubits}-qubit layout")


@dataclass(frozen=True)
class CapacityResult:
    capacity_bits: float
    classical_bound_bits: float
    receiver_entropy_terms: tuple[float, ...]
    channel_output_entropy: float
    encoding: EncodingParams
    dense_codeable: bool = field(default=False)

    @property
    def surplus_bits(self) -> float:
        """Quantum advantage before the classical-bound max is applied.

        Can be negative; ``capacity_bits`` clamps it at zero.
        """
        return sum(self.receiver_entropy_terms) - self.channel_output_entropy


def _result(n_senders: int, receiver_terms: list[float], output_entropy: float,
            encoding: EncodingParams) -> CapacityResult:
    classical = float(n_senders)
    raw = classical + sum(receiver_terms) - output_entropy
    cap = max(classical, raw)
    return CapacityResult(
        capacity_bits=cap,
        classical_bound_bits=classical,
        receiver_entropy_terms=tuple(receiver_terms),
        channel_output_entropy=output_entropy,
        encoding=encoding,
        dense_codeable=cap > classical + DENSE_CODEABLE_SLACK,
    )


def encode(rho: np.ndarray, encoding: EncodingParams, layout: PartyLayout) -> np.ndarray:
    """Apply one local unitary per sender (identity on receivers)."""
    mats = [unitary_from_params(u) for u in encoding.per_sender]
    u_full = qmath.tensor(*mats, *( [qmath.I2] * layout.n_receivers ))
    return u_full @ rho @ u_full.conj().T


def _receiver_entropies(rho: np.ndarray, layout: PartyLayout) -> list[float]:
    return [von_neumann_entropy(partial_trace(rho, {r}))
            for r in layout.receiver_indices]


def _sender_kraus(spec: ChannelSpec | None, layout: PartyLayout,
                  kraus_override: list[KrausSet] | None,
                  rng: np.random.Generator | None) -> list[KrausSet]:
    if kraus_override is not None:
        if len(kraus_override) != layout.n_senders:
            raise LayoutError("kraus_override must supply one KrausSet per sender")
        return list(kraus_override)
    assert spec is not None
    if spec.is_random:
        if rng is None:
            raise ValueError("random channel needs either kraus_override or an rng")
        return sample_per_qubit_kraus(spec, layout.n_senders, rng)
    ks = deterministic_kraus(spec)
    return [ks] * layout.n_senders


def capacity_noiseless(rho: np.ndarray, layout: PartyLayout) -> CapacityResult:
    """Capacity (one receiver) or LOCC upper bound (two) without channel noise."""
    layout.check(rho)
    identity = EncodingParams.identity(layout.n_senders)
    terms = _receiver_entropies(rho, layout)
    if layout.n_receivers == 1:
        return _result(layout.n_senders, terms, von_neumann_entropy(rho), identity)
    r = layout.split
    n, big_n = layout.n_qubits, layout.n_senders
    xi1 = partial_trace(rho, set(range(r)) | {big_n})
    xi2 = partial_trace(rho, set(range(r, big_n)) | {big_n + 1})
    out = max(von_neumann_entropy(xi1), von_neumann_entropy(xi2))
    return _result(big_n, terms, out, identity)


def _one_receiver_entropy(rho: np.ndarray, layout: PartyLayout,
                          kraus: list[KrausSet], encoding: EncodingParams) -> float:
    encoded = encode(rho, encoding, layout)
    noisy = apply_local_channel(encoded, kraus, layout.sender_indices)
    return von_neumann_entropy(noisy)


def capacity_one_receiver(rho: np.ndarray, layout: PartyLayout, spec: ChannelSpec | None,
                          kraus_override: list[KrausSet] | None = None,
                          opt: OptimizerConfig = OptimizerConfig(),
                          optimize: bool = True,
                          rng: np.random.Generator | None = None) -> CapacityResult:
    """Noisy capacity with N senders and a single receiver.

    The channel-output entropy is minimized over per-sender encoding
    unitaries, except when the channel is deterministic depolarizing
    (covariant, so encoding drops out) or ``optimize`` is False (identity
    encoding; this is the lower bound used by quenched runs).
    """
    layout.check(rho)
    if layout.n_receivers != 1:
        raise LayoutError("capacity_one_receiver needs a one-receiver layout")
    kraus = _sender_kraus(spec, layout, kraus_override, rng)
    terms = _receiver_entropies(rho, layout)
    identity = EncodingParams.identity(layout.n_senders)

    covariant = spec is not None and spec.is_covariant and kraus_override is None
    if not optimize or covariant:
        s_out = _one_receiver_entropy(rho, layout, kraus, identity)
        return _result(layout.n_senders, terms, s_out, identity)

    def objective(enc: EncodingParams) -> float:
        return _one_receiver_entropy(rho, layout, kraus, enc)

    s_out, best = minimize(objective, layout.n_senders, opt)
    return _result(layout.n_senders, terms, s_out, best)


def _block_entropy(rho: np.ndarray, layout: PartyLayout, kraus: list[KrausSet],
                   block: list[int], receiver: int,
                   block_encoding: EncodingParams) -> float:
    """Entropy of the reduced sender-block + receiver state after noise.

    Noise and encoding on the complementary block are traced out exactly, so
    only the block's own unitaries and Kraus sets enter.
    """
    keep = set(block) | {receiver}
    mats = {q: unitary_from_params(u) for q, u in zip(block, block_encoding.per_sender)}
    u_parts = [mats.get(q, qmath.I2) for q in range(layout.n_qubits)]
    u_full = qmath.tensor(*u_parts)
    encoded = u_full @ rho @ u_full.conj().T
    noisy = apply_local_channel(encoded, [kraus[q] for q in block], block)
    return von_neumann_entropy(partial_trace(noisy, keep))


def bound_two_receivers(rho: np.ndarray, layout: PartyLayout, spec: ChannelSpec | None,
                        kraus_override: list[KrausSet] | None = None,
                        opt: OptimizerConfig = OptimizerConfig(),
                        optimize: bool = True,
                        rng: np.random.Generator | None = None) -> CapacityResult:
    """Noisy LOCC upper bound with two receivers.

    The two block entropies S(xi~1), S(xi~2) are minimized independently over
    the unitaries of their own sender groups; the larger minimum enters the
    bound.
    """
    layout.check(rho)
    if layout.n_receivers != 2:
        raise LayoutError("bound_two_receivers needs a two-receiver layout")
    kraus = _sender_kraus(spec, layout, kraus_override, rng)
    terms = _receiver_entropies(rho, layout)
    r, big_n = layout.split, layout.n_senders
    blocks = [(list(range(r)), big_n), (list(range(r, big_n)), big_n + 1)]

    covariant = spec is not None and spec.is_covariant and kraus_override is None
    entropies = []
    encodings = []
    for block, receiver in blocks:
        if not optimize or covariant:
            enc = EncodingParams.identity(len(block))
            entropies.append(_block_entropy(rho, layout, kraus, block, receiver, enc))
            encodings.extend(enc.per_sender)
            continue

        def objective(enc: EncodingParams, _block=block, _recv=receiver) -> float:
            return _block_entropy(rho, layout, kraus, _block, _recv, enc)

        val, best = minimize(objective, len(block), opt)
        entropies.append(val)
        encodings.extend(best.per_sender)

    return _result(big_n, terms, max(entropies), EncodingParams(tuple(encodings)))


def evaluate(rho: np.ndarray, layout: PartyLayout, spec: ChannelSpec | None,
             **kwargs) -> CapacityResult:
    """Dispatch on the layout's receiver count (spec=None means noiseless)."""
    if spec is None:
        return capacity_noiseless(rho, layout)
    if layout.n_receivers == 1:
        return capacity_one_receiver(rho, layout, spec, **kwargs)
    return bound_two_receivers(rho, layout, spec, **kwargs)
