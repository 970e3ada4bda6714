"""Monte Carlo harness for the three-phase jammed-channel protocol.

Phase 1 transmits the entangled resource to build correlated sign bits
(u, v); phase 2 turns them into identical seed bits at both ends by
repetition coding over the XOR-corrected channel; phase 3 sends data with a
random codebook selected by the shared seed. Receivers decode by exact
likelihood against the candidate schedule set from the config (the realised
schedule stays hidden), which reduces to Hamming-distance decoding whenever
the candidate channel is binary symmetric. An exact small-instance error
evaluator covers the regimes where Monte Carlo is the wrong tool.

All randomness is counter-based: every (strategy, trial, phase) triple gets
its own Philox key derived from the master seed, so reports are bit-identical
for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bivariate import (
    BinaryJointDist,
    BivariateGaussian,
    quadrant_distribution,
    std_normal_cdf,
)
from .channels import ChannelTable, binary_entropy
from .gaussian import JammerGaussian

_MASK64 = (1 << 64) - 1

# phase tags for sub-seed derivation; values are arbitrary but frozen
_TAG_PHASE1 = 1
_TAG_SEED = 2
_TAG_PHASE2 = 3
_TAG_MESSAGE = 4
_TAG_PHASE3 = 5
_TAG_FREE_SEED = 6
_TAG_CODEBOOK = 7

CODE_MODES = ("deterministic", "common-randomness", "correlation-assisted")
SOURCES = ("tmsv", "thermal")

__all__ = [
    "JammerStrategy",
    "SimConfig",
    "SimReport",
    "canonical_schedules",
    "jammer_state_for_symbol",
    "sample_round",
    "run_correlation_phase",
    "run_cr_phase",
    "run_data_phase",
    "random_codebook",
    "hamming_decoder",
    "schedule_set_decoder",
    "evaluate_code_error_exact",
    "symmetrizing_attack_error",
    "simulate",
]


def jammer_state_for_symbol(s: int, alpha: float) -> JammerGaussian:
    """Gaussian state behind each jammer letter: +-alpha coherent, or thermal."""
    if s == 0:
        return JammerGaussian(A=0.5, B=0.5, a=math.sqrt(2.0) * alpha)
    if s == 1:
        return JammerGaussian(A=0.5, B=0.5, a=-math.sqrt(2.0) * alpha)
    if s == 2:
        half = 0.5 * (2.0 * alpha * alpha + 1.0)
        return JammerGaussian(A=half, B=half)
    raise ValueError(f"jammer symbol must be 0, 1 or 2, got {s}")


@dataclass(frozen=True)
class JammerStrategy:
    """Per-round jammer behaviour: a symbol schedule, a state list, or a worst-case set.

    Symbol and state schedules are tiled cyclically to the blocklength.
    `worst_of` evaluates every option and reports the maximum error.
    """

    kind: str
    symbols: tuple = ()
    states: tuple = ()
    options: tuple = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("symbols", "gaussian", "worst_of"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "symbols":
            if not self.symbols or any(s not in (0, 1, 2) for s in self.symbols):
                raise ValueError("symbol schedules need a nonempty tuple over {0,1,2}")
        if self.kind == "gaussian" and not self.states:
            raise ValueError("gaussian schedules need at least one state")
        if self.kind == "worst_of":
            if len(self.options) < 1:
                raise ValueError("worst_of needs at least one option")
            if any(o.kind == "worst_of" for o in self.options):
                raise ValueError("worst_of does not nest")
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self) -> str:
        if self.kind == "symbols":
            return "symbols-" + "".join(str(s) for s in self.symbols)
        if self.kind == "gaussian":
            return f"gaussian-{len(self.states)}"
        return "worst-of-" + ",".join(o.label for o in self.options)

    @classmethod
    def from_symbols(cls, symbols: Sequence[int], label: str = "") -> "JammerStrategy":
        return cls(kind="symbols", symbols=tuple(int(s) for s in symbols), label=label)

    @classmethod
    def from_states(cls, states: Sequence[JammerGaussian], label: str = "") -> "JammerStrategy":
        return cls(kind="gaussian", states=tuple(states), label=label)

    @classmethod
    def worst_of(cls, options: Sequence["JammerStrategy"], label: str = "") -> "JammerStrategy":
        return cls(kind="worst_of", options=tuple(options), label=label)

    def leaves(self) -> tuple["JammerStrategy", ...]:
        return self.options if self.kind == "worst_of" else (self,)

    def round_params(self, n_rounds: int, alpha: float,
                     offset: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """(A_i, a_i) of the jammer state for global rounds [offset, offset + n_rounds).

        The schedule is one sequence over the whole block; phases read their
        own slice of it, so a cyclic schedule keeps its global phase.
        """
        if self.kind == "worst_of":
            raise ValueError("round_params is defined on leaf strategies only")
        if self.kind == "symbols":
            plays = [jammer_state_for_symbol(s, alpha) for s in self.symbols]
        else:
            plays = list(self.states)
        idx = (offset + np.arange(n_rounds)) % len(plays)
        big_a = np.array([p.A for p in plays])[idx]
        disp = np.array([p.a for p in plays])[idx]
        return big_a, disp

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind, "label": self.label}
        if self.kind == "symbols":
            out["symbols"] = list(self.symbols)
        elif self.kind == "gaussian":
            out["states"] = [
                {"A": t.A, "B": t.B, "C": t.C, "a": t.a, "b": t.b} for t in self.states
            ]
        else:
            out["options"] = [o.to_json_dict() for o in self.options]
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "JammerStrategy":
        kind = data.get("kind")
        label = data.get("label", "")
        if kind == "symbols":
            return cls.from_symbols(data["symbols"], label)
        if kind == "gaussian":
            states = [JammerGaussian(**st) for st in data["states"]]
            return cls.from_states(states, label)
        if kind == "worst_of":
            return cls.worst_of(
                [cls.from_json_dict(o) for o in data["options"]], label
            )
        raise ValueError(f"unknown strategy kind {kind!r}")


def canonical_schedules() -> JammerStrategy:
    """The four standing schedules: each pure letter, plus cycling through all three."""
    return JammerStrategy.worst_of(
        [
            JammerStrategy.from_symbols((0,), "all-0"),
            JammerStrategy.from_symbols((1,), "all-1"),
            JammerStrategy.from_symbols((2,), "all-2"),
            JammerStrategy.from_symbols((0, 1, 2), "alternating"),
        ],
        label="canonical-4",
    )


@dataclass(frozen=True)
class SimConfig:
    """Run parameters for `simulate`.

    k side rounds split evenly between the correlation and seed phases; the
    remaining n - k rounds carry data at the given rate. `cr_seed_bits` fixes
    how many shared seed bits phase 2 transfers (plus one parity slot).
    """

    alpha: float
    n: int
    k: int
    rate: float
    jammer: JammerStrategy
    code_mode: str = "correlation-assisted"
    source: str = "tmsv"
    master_seed: int = 0
    trials: int = 1
    eta: float = 0.5
    r: Optional[float] = None
    cr_seed_bits: int = 8
    max_block_bits: int = 13

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.n < 1:
            raise ValueError("blocklength must be at least 1")
        if not 0 <= self.k < self.n:
            raise ValueError("side-phase length k must satisfy 0 <= k < n")
        if self.k % 2:
            raise ValueError("k must be even (split between two side phases)")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.code_mode not in CODE_MODES:
            raise ValueError(f"code_mode must be one of {CODE_MODES}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")
        if self.code_mode == "correlation-assisted" and self.k < 2:
            raise ValueError("correlation-assisted mode needs k >= 2 side rounds")
        if self.code_mode != "correlation-assisted" and self.k != 0:
            raise ValueError("only correlation-assisted mode uses side rounds (k > 0)")
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if self.r is not None and self.r <= 0:
            raise ValueError("squeezing r must be positive when given")
        if self.cr_seed_bits < 1:
            raise ValueError("cr_seed_bits must be at least 1")
        if not 1 <= self.max_block_bits <= 16:
            raise ValueError("max_block_bits must lie in [1, 16]")

    @property
    def squeezing(self) -> float:
        return math.asinh(self.alpha) if self.r is None else self.r

    @classmethod
    def defaults(cls, alpha: float, n: int, rate: float, jammer: JammerStrategy,
                 **kw) -> "SimConfig":
        """Side-phase length defaulting to the 2 log2 n scaling, rounded even.

        The seed width is clamped to what k/2 transfer rounds can carry
        (each of the cr_seed_bits + 1 frame slots needs both mask phases).
        """
        k = kw.pop("k", None)
        if k is None:
            k = 2 * math.ceil(math.log2(n)) if n > 1 else 0
        if "cr_seed_bits" not in kw:
            kw["cr_seed_bits"] = min(8, max(1, (k // 2) // 2 - 1))
        return cls(alpha=alpha, n=n, k=k, rate=rate, jammer=jammer, **kw)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "alpha": self.alpha,
            "n": self.n,
            "k": self.k,
            "rate": self.rate,
            "jammer": self.jammer.to_json_dict(),
            "code_mode": self.code_mode,
            "source": self.source,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "eta": self.eta,
            "r": self.r,
            "cr_seed_bits": self.cr_seed_bits,
            "max_block_bits": self.max_block_bits,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SimConfig":
        required = ("alpha", "n", "k", "rate", "jammer")
        for key in required:
            if key not in data:
                raise ValueError(f"config missing field '{key}'")
        kw = {key: data[key] for key in data
              if key in ("code_mode", "source", "master_seed", "trials", "eta",
                         "r", "cr_seed_bits", "max_block_bits")}
        return cls(
            alpha=data["alpha"], n=data["n"], k=data["k"], rate=data["rate"],
            jammer=JammerStrategy.from_json_dict(data["jammer"]), **kw,
        )


@dataclass(frozen=True)
class SimReport:
    """Aggregated simulation outcome; deterministic given the config."""

    config: SimConfig
    per_strategy: dict
    per_trial: tuple
    worst_error: float
    estimated_crossover: float
    capacity_estimate: float

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": self.config.to_json_dict(),
            "per_strategy": self.per_strategy,
            "per_trial": list(self.per_trial),
            "worst_error": self.worst_error,
            "estimated_crossover": self.estimated_crossover,
            "capacity_estimate": self.capacity_estimate,
            "seed_provenance": {
                "master_seed": self.config.master_seed,
                "scheme": "philox128(key = master_seed || strategy<<48 | trial<<16 | phase)",
            },
        }


# --- channel sampling -------------------------------------------------------


def _rng(master_seed: int, strategy_idx: int, trial: int, tag: int) -> np.random.Generator:
    lo = ((strategy_idx & 0xFFFF) << 48) | ((trial & 0xFFFFFFFF) << 16) | (tag & 0xFFFF)
    key = np.array([lo, master_seed & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _bpsk_outputs(x: np.ndarray, big_a: np.ndarray, disp: np.ndarray,
                  alpha: float, eta: float, rng: np.random.Generator) -> np.ndarray:
    """Receiver bit per round for BPSK inputs x (0 -> +alpha): 0 iff quadrature >= 0."""
    mean = math.sqrt(eta) * math.sqrt(2.0) * alpha * (1.0 - 2.0 * x)
    mean = mean + math.sqrt(1.0 - eta) * disp
    sd = np.sqrt(eta / 2.0 + (1.0 - eta) * big_a)
    quad = mean + sd * rng.standard_normal(x.shape)
    return (quad < 0.0).astype(np.int64)


def _pair_outputs(big_a: np.ndarray, disp: np.ndarray, r: float, eta: float,
                  rng: np.random.Generator, source: str) -> tuple[np.ndarray, np.ndarray]:
    """Sign bits (u, v), 1 for a nonnegative quadrature, for the entangled symbol."""
    c_r = math.cosh(2.0 * r)
    etap = 1.0 - eta
    n_rounds = big_a.shape[0]
    z1 = rng.standard_normal(n_rounds)
    z2 = rng.standard_normal(n_rounds)
    mean_b = math.sqrt(etap) * disp
    var_b = etap * big_a + eta * c_r / 2.0
    if source == "thermal":
        # unentangled substitute: same receiver marginal, sender tosses a coin
        u = rng.integers(0, 2, size=n_rounds, dtype=np.int64)
        quad_b = mean_b + np.sqrt(var_b) * z2
        return u, (quad_b >= 0.0).astype(np.int64)
    s_r = math.sinh(2.0 * r)
    sd_a = math.sqrt(c_r / 2.0)
    rho = math.sqrt(eta) * s_r / np.sqrt(2.0 * c_r * var_b)
    quad_a = sd_a * z1
    quad_b = mean_b + np.sqrt(var_b) * (rho * z1 + np.sqrt(1.0 - rho * rho) * z2)
    return (quad_a >= 0.0).astype(np.int64), (quad_b >= 0.0).astype(np.int64)


# --- receiver-side channel models --------------------------------------------
#
# The decoder knows the protocol and the candidate schedule set (the leaves of
# the configured strategy), never the realised schedule. Everything below is a
# deterministic function of the config, so decoding stays reproducible.


def _bpsk_flip_table(big_a: np.ndarray, disp: np.ndarray,
                     alpha: float, eta: float) -> np.ndarray:
    """p1[i, x] = P(y = 1 | x) per round, from the homodyne quadrature law."""
    sd = np.sqrt(eta / 2.0 + (1.0 - eta) * big_a)
    shift = math.sqrt(1.0 - eta) * disp
    p1 = np.empty((big_a.shape[0], 2))
    for xbit in (0, 1):
        mean = math.sqrt(2.0 * eta) * alpha * (1.0 - 2.0 * xbit) + shift
        p1[:, xbit] = [std_normal_cdf(z) for z in -mean / sd]
    return p1


def _pair_joint_table(big_a: np.ndarray, disp: np.ndarray,
                      config: SimConfig) -> np.ndarray:
    """qa[i, u, v] = joint law of the sign-bit pair under round i's jammer state.

    Only the x-quadrature moments (A, a) enter, so states are deduplicated on
    that pair. The thermal source keeps the receiver marginal but carries no
    correlation: the sender's bit is an independent coin.
    """
    c_r = math.cosh(2.0 * config.squeezing)
    s_r = math.sinh(2.0 * config.squeezing)
    etap = 1.0 - config.eta
    out = np.empty((big_a.shape[0], 2, 2))
    cache: dict[tuple[float, float], np.ndarray] = {}
    for i, (A, a) in enumerate(zip(big_a, disp)):
        key = (float(A), float(a))
        if key not in cache:
            mean_b = math.sqrt(etap) * a
            var_b = etap * A + config.eta * c_r / 2.0
            if config.source == "thermal":
                pv1 = std_normal_cdf(mean_b / math.sqrt(var_b))
                cache[key] = np.outer([0.5, 0.5], [1.0 - pv1, pv1])
            else:
                biv = BivariateGaussian(
                    np.array([0.0, mean_b]),
                    np.array([[c_r / 2.0, math.sqrt(config.eta) * s_r / 2.0],
                              [math.sqrt(config.eta) * s_r / 2.0, var_b]]),
                )
                cache[key] = quadrant_distribution(biv).as_array()
        out[i] = cache[key]
    return out


def _vote_model(leaf: JammerStrategy, rounds: int, masks: np.ndarray,
                config: SimConfig) -> np.ndarray:
    """vm[i, f, w] = P(vote_i = w | frame bit f) under one candidate schedule.

    Round i of the transfer phase is global round k/2 + i and consumes the
    sign-bit pair of global round i, so the two schedule slices differ for
    cyclic schedules. The public mask and the sender's XOR are folded in.
    """
    qa = _pair_joint_table(*leaf.round_params(rounds, config.alpha, 0), config)
    p1 = _bpsk_flip_table(*leaf.round_params(rounds, config.alpha, config.k // 2),
                          config.alpha, config.eta)
    idx = np.arange(rounds)
    vm = np.zeros((rounds, 2, 2))
    for f in (0, 1):
        for u in (0, 1):
            py1 = p1[idx, f ^ masks ^ u]
            for v in (0, 1):
                weight = qa[:, u, v]
                vm[idx, f, 1 ^ masks ^ v] += weight * py1
                vm[idx, f, masks ^ v] += weight * (1.0 - py1)
    return vm


def _logsumexp_rows(scores: np.ndarray) -> np.ndarray:
    top = scores.max(axis=1, keepdims=True)
    return top[:, 0] + np.log(np.exp(scores - top).sum(axis=1))


def sample_round(x: int, jammer, alpha: float, rng: np.random.Generator,
                 eta: float = 0.5, r: Optional[float] = None,
                 source: str = "tmsv") -> tuple[int, Optional[int]]:
    """One channel use: returns (y, u).

    For BPSK symbols x in {0, 1}, y is the receiver's symbol estimate
    (0 for a nonnegative quadrature) and u is None. For x = 2 the sender
    keeps one half of the entangled pair: both returned bits are sign bits
    (1 for nonnegative), so their joint law is the quadrant distribution.
    `jammer` is a letter in {0, 1, 2} or an explicit JammerGaussian.
    """
    tau = jammer_state_for_symbol(jammer, alpha) if isinstance(jammer, int) else jammer
    big_a = np.array([tau.A])
    disp = np.array([tau.a])
    if x in (0, 1):
        y = _bpsk_outputs(np.array([float(x)]), big_a, disp, alpha, eta, rng)
        return int(y[0]), None
    if x != 2:
        raise ValueError(f"sender symbol must be 0, 1 or 2, got {x}")
    r = math.asinh(alpha) if r is None else r
    u, v = _pair_outputs(big_a, disp, r, eta, rng, source)
    return int(v[0]), int(u[0])


# --- protocol phases --------------------------------------------------------


def run_correlation_phase(rounds: int, strategy: JammerStrategy, config: SimConfig,
                          rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Sign-bit pairs (u, v) from `rounds` uses of the entangled symbol."""
    if rounds == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    big_a, disp = strategy.round_params(rounds, config.alpha)
    return _pair_outputs(big_a, disp, config.squeezing, config.eta, rng, config.source)


def _slot_layout(rounds: int, n_slots: int) -> np.ndarray:
    return np.arange(rounds) % n_slots


def run_cr_phase(u_bits: np.ndarray, v_bits: np.ndarray, rounds: int,
                 strategy: JammerStrategy, config: SimConfig,
                 seed_bits: np.ndarray, rng: np.random.Generator) -> dict:
    """Transfer `seed_bits` by repetition over the XOR-corrected channel.

    Each round carries one frame slot (seed bits plus a final parity slot).
    The public mask flips every full frame pass, so every slot sees both row
    biases of the effective channel equally. The receiver decodes each slot
    from its votes by exact per-round likelihood, profiled over the candidate
    schedules in the config (rounds with a crossover above 1/2 then count as
    negative evidence, which plain majority voting would throw away); ties
    resolve to 0. Agreement is checked via the parity slot and reported, not
    enforced.
    """
    if rounds == 0:
        raise ValueError("seed transfer needs at least one round")
    if len(u_bits) < rounds or len(v_bits) < rounds:
        raise ValueError("not enough correlated bits for the requested rounds")
    n_slots = len(seed_bits) + 1
    if rounds < 2 * n_slots:
        raise ValueError(
            f"{rounds} rounds cannot carry {len(seed_bits)} seed bits with both mask phases"
        )
    frame = np.concatenate([seed_bits, [seed_bits.sum() % 2]])
    slots = _slot_layout(rounds, n_slots)
    masks = (np.arange(rounds) // n_slots) % 2
    x = frame[slots] ^ masks ^ u_bits[:rounds]
    big_a, disp = strategy.round_params(rounds, config.alpha, config.k // 2)
    y = _bpsk_outputs(x.astype(float), big_a, disp, config.alpha, config.eta, rng)
    votes = y ^ masks ^ v_bits[:rounds]
    idx = np.arange(rounds)
    best_total = -np.inf
    decoded = np.zeros(n_slots, dtype=np.int64)
    for leaf in config.jammer.leaves():
        ll = np.log(np.clip(_vote_model(leaf, rounds, masks, config), 1e-300, None))
        sums0 = np.bincount(slots, weights=ll[idx, 0, votes], minlength=n_slots)
        sums1 = np.bincount(slots, weights=ll[idx, 1, votes], minlength=n_slots)
        total = float(np.maximum(sums0, sums1).sum())
        if total > best_total:
            best_total = total
            decoded = (sums1 > sums0).astype(np.int64)  # tie -> 0
    received = decoded[:-1]
    parity_ok = bool(decoded[-1] == received.sum() % 2)
    # self-referential crossover estimate: votes against the decoded frame
    t_hat = float((votes != decoded[slots]).mean())
    return {
        "received": received,
        "parity_ok": parity_ok,
        "t_hat": t_hat,
        "agree": bool(np.array_equal(received, seed_bits)),
    }


def _block_plan(rounds: int, rate: float, max_block_bits: int) -> list[tuple[int, int]]:
    """(rounds, message bits) per sub-block, message bits capped at max_block_bits."""
    cap_rounds = int(max_block_bits / rate)
    plan = []
    done = 0
    while done < rounds:
        length = min(cap_rounds, rounds - done)
        bits = math.ceil(rate * length)
        if bits > 0:
            plan.append((length, bits))
        done += length
    return plan


def random_codebook(n_messages: int, length: int, master_seed: int, strategy_idx: int,
                    trial: int, seed_bits: np.ndarray, block: int) -> np.ndarray:
    """Random binary codebook selected by the shared seed bits (and public context)."""
    seed_int = 0
    for b in np.asarray(seed_bits, dtype=np.int64):
        seed_int = (seed_int << 1) | int(b)
    lo = ((strategy_idx & 0xFFFF) << 48) | ((trial & 0xFFFFFFFF) << 16) | _TAG_CODEBOOK
    hi = (master_seed ^ (seed_int * 0x9E3779B97F4A7C15) ^ (block << 1)) & _MASK64
    gen = np.random.Generator(np.random.Philox(key=np.array([lo, hi], dtype=np.uint64)))
    return gen.integers(0, 2, size=(n_messages, length), dtype=np.int64)


def hamming_decoder(codebook: np.ndarray, y: np.ndarray) -> int:
    """Index of the codeword nearest in Hamming distance; ties to the lowest index."""
    return int(np.argmin((codebook != y).sum(axis=1)))


def schedule_set_decoder(codebook: np.ndarray, y: np.ndarray,
                         p1: np.ndarray) -> int:
    """Exact likelihood decoding against a candidate set of per-round laws.

    p1[h, i, x] = P(y_i = 1 | x) under candidate schedule h; candidates get a
    uniform prior and the per-block likelihoods are mixed exactly. For a
    single candidate whose rounds form one binary symmetric channel with
    crossover below 1/2 the ranking reduces to Hamming distance. Ties go to
    the lowest message index.
    """
    p1 = np.clip(p1, 1e-300, 1.0 - 1e-16)
    ll = np.where(y[None, :, None] == 1, np.log(p1), np.log1p(-p1))
    base = ll[:, :, 0].sum(axis=1)
    delta = ll[:, :, 1] - ll[:, :, 0]
    scores = codebook @ delta.T + base[None, :]
    return int(np.argmax(_logsumexp_rows(scores)))


def run_data_phase(message_bits: np.ndarray, sender_seed: np.ndarray,
                   receiver_seed: np.ndarray, rounds: int, strategy: JammerStrategy,
                   config: SimConfig, strategy_idx: int, trial: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Send message_bits raw (no XOR layer) in seed-keyed random sub-blocks.

    The sender and receiver build their codebooks from their own seed copies;
    a seed mismatch yields independently wrong codebooks and hence garbage
    decoding, which is the honest failure mode. Decoding is exact likelihood
    against the candidate schedule set, which the receiver knows from the
    config; the realised schedule stays hidden.
    """
    plan = _block_plan(rounds, config.rate, config.max_block_bits)
    if sum(b for _, b in plan) != len(message_bits):
        raise ValueError("message length does not match the block plan")
    big_a, disp = strategy.round_params(rounds, config.alpha, config.k)
    leaves = config.jammer.leaves()
    p1 = np.empty((len(leaves), rounds, 2))
    for hi, leaf in enumerate(leaves):
        p1[hi] = _bpsk_flip_table(*leaf.round_params(rounds, config.alpha, config.k),
                                  config.alpha, config.eta)
    decoded = np.zeros_like(message_bits)
    pos_rounds = 0
    pos_bits = 0
    for block, (length, bits) in enumerate(plan):
        chunk = message_bits[pos_bits : pos_bits + bits]
        m = 0
        for b in chunk:
            m = (m << 1) | int(b)
        cb_send = random_codebook(1 << bits, length, config.master_seed, strategy_idx,
                                  trial, sender_seed, block)
        x = cb_send[m]
        y = _bpsk_outputs(
            x.astype(float),
            big_a[pos_rounds : pos_rounds + length],
            disp[pos_rounds : pos_rounds + length],
            config.alpha, config.eta, rng,
        )
        cb_recv = random_codebook(1 << bits, length, config.master_seed, strategy_idx,
                                  trial, receiver_seed, block)
        m_hat = schedule_set_decoder(cb_recv, y,
                                     p1[:, pos_rounds : pos_rounds + length, :])
        for j in range(bits - 1, -1, -1):
            decoded[pos_bits + j] = m_hat & 1
            m_hat >>= 1
        pos_rounds += length
        pos_bits += bits
    return decoded


# --- exact evaluation (desk scale) ------------------------------------------


def evaluate_code_error_exact(codebook: np.ndarray, decoder: np.ndarray,
                              q: BinaryJointDist, s_seq: Sequence, base: ChannelTable) -> float:
    """Exact average error of a correlated code against the state sequence s_seq.

    codebook[u, m] is the length-n word for message m given sender bit u;
    decoder[v, y_index] the decoded message given receiver bit v, with y^n
    indexed most-significant-bit first. Exhaustive over all y^n: n <= 12 and
    at most 16 messages.
    """
    codebook = np.asarray(codebook, dtype=np.int64)
    decoder = np.asarray(decoder, dtype=np.int64)
    if codebook.ndim != 3 or codebook.shape[0] not in (1, 2):
        raise ValueError("codebook must have shape (n_u, M, n) with n_u in {1, 2}")
    n_u, n_messages, n = codebook.shape
    if n > 12:
        raise ValueError(f"exhaustive evaluation is capped at n = 12, got {n}")
    if n_messages > 16:
        raise ValueError(f"exhaustive evaluation is capped at 16 messages, got {n_messages}")
    if decoder.ndim != 2 or decoder.shape[1] != 1 << n:
        raise ValueError("decoder must have shape (n_v, 2^n)")
    n_v = decoder.shape[0]
    if base.outputs != (0, 1):
        raise ValueError("exact evaluation needs a binary-output base channel")
    if len(s_seq) != n:
        raise ValueError("state sequence length must equal the blocklength")
    qa = q.as_array()
    if n_u == 1:
        qa = qa.sum(axis=0, keepdims=True)
    if n_v == 1:
        qa = qa.sum(axis=1, keepdims=True)
    s_idx = [base.states.index(s) for s in s_seq]
    p_correct = 0.0
    for u in range(n_u):
        for v in range(n_v):
            weight = float(qa[u, v])
            if weight == 0.0:
                continue
            for m in range(n_messages):
                joint = np.ones(1)
                for i in range(n):
                    xi = base.inputs.index(int(codebook[u, m, i]))
                    joint = np.kron(joint, base.w[s_idx[i], xi])
                p_correct += weight * float(joint[decoder[v] == m].sum())
    return 1.0 - p_correct / n_messages


def symmetrizing_attack_error(codebook: np.ndarray, decoder: np.ndarray,
                              q: BinaryJointDist, base: ChannelTable) -> float:
    """Average exact error when the jammer plays the codeword of a random message."""
    codebook = np.asarray(codebook, dtype=np.int64)
    n_u, n_messages, _ = codebook.shape
    total = 0.0
    for m_hat in range(n_messages):
        s_seq = [int(b) for b in codebook[n_u - 1, m_hat]]
        total += evaluate_code_error_exact(codebook, decoder, q, s_seq, base)
    return total / n_messages


# --- orchestration -----------------------------------------------------------


def _message_bit_count(config: SimConfig) -> int:
    return sum(b for _, b in _block_plan(config.n - config.k,
                                         config.rate, config.max_block_bits))


def _run_trial(config: SimConfig, strategy: JammerStrategy, strategy_idx: int,
               trial: int) -> dict:
    half = config.k // 2
    seed = config.master_seed
    if config.code_mode == "correlation-assisted":
        u_bits, v_bits = run_correlation_phase(
            half, strategy, config, _rng(seed, strategy_idx, trial, _TAG_PHASE1))
        sender_seed = _rng(seed, strategy_idx, trial, _TAG_SEED).integers(
            0, 2, size=config.cr_seed_bits, dtype=np.int64)
        cr = run_cr_phase(u_bits, v_bits, half, strategy, config, sender_seed,
                          _rng(seed, strategy_idx, trial, _TAG_PHASE2))
        receiver_seed = cr["received"]
        seed_ok = cr["agree"]
        parity_ok = cr["parity_ok"]
        t_hat = cr["t_hat"]
    elif config.code_mode == "common-randomness":
        shared = _rng(seed, strategy_idx, trial, _TAG_FREE_SEED).integers(
            0, 2, size=config.cr_seed_bits, dtype=np.int64)
        sender_seed = receiver_seed = shared
        seed_ok = parity_ok = True
        t_hat = 0.0
    else:
        sender_seed = receiver_seed = np.zeros(0, dtype=np.int64)
        seed_ok = parity_ok = True
        t_hat = 0.0
    message = _rng(seed, strategy_idx, trial, _TAG_MESSAGE).integers(
        0, 2, size=_message_bit_count(config), dtype=np.int64)
    decoded = run_data_phase(message, sender_seed, receiver_seed,
                             config.n - config.k, strategy, config, strategy_idx,
                             trial, _rng(seed, strategy_idx, trial, _TAG_PHASE3))
    return {
        "strategy": strategy.label,
        "trial": trial,
        "message_ok": bool(np.array_equal(message, decoded)),
        "bit_errors": int((message != decoded).sum()),
        "message_bits": int(len(message)),
        "seed_ok": bool(seed_ok),
        "parity_ok": bool(parity_ok),
        "t_hat": t_hat,
    }


def _run_task(args: tuple) -> tuple[int, int, dict]:
    config, strategy, strategy_idx, trial = args
    return strategy_idx, trial, _run_trial(config, strategy, strategy_idx, trial)


def simulate(config: SimConfig, workers: int = 1) -> SimReport:
    """Run all trials against every leaf strategy and aggregate the worst case.

    The report is a pure function of the config: trials draw from
    counter-based sub-streams and are merged in a fixed order, so any worker
    count produces the identical report.
    """
    leaves = config.jammer.leaves()
    tasks = [
        (config, leaf, si, t)
        for si, leaf in enumerate(leaves)
        for t in range(config.trials)
    ]
    records: list = [None] * len(tasks)
    if workers <= 1:
        results = map(_run_task, tasks)
        for si, t, rec in results:
            records[si * config.trials + t] = rec
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for si, t, rec in pool.map(_run_task, tasks, chunksize=8):
                records[si * config.trials + t] = rec
    ordered = records
    per_strategy = {}
    for si, leaf in enumerate(leaves):
        rows = ordered[si * config.trials : (si + 1) * config.trials]
        errs = [1.0 - float(row["message_ok"]) for row in rows]
        per_strategy[leaf.label] = {
            "empirical_error": sum(errs) / len(errs),
            "mean_crossover": sum(row["t_hat"] for row in rows) / len(rows),
            "seed_agreement_rate": sum(float(row["seed_ok"]) for row in rows) / len(rows),
            "parity_flag_rate": sum(1.0 - float(row["parity_ok"]) for row in rows) / len(rows),
            "trials": len(rows),
        }
    worst_error = max(v["empirical_error"] for v in per_strategy.values())
    t_worst = max(v["mean_crossover"] for v in per_strategy.values())
    capacity = 1.0 - binary_entropy(min(max(t_worst, 0.0), 0.5))
    return SimReport(
        config=config,
        per_strategy=per_strategy,
        per_trial=tuple(ordered),
        worst_error=worst_error,
        estimated_crossover=t_worst,
        capacity_estimate=capacity,
    )
