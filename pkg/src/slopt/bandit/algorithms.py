"""The bandit algorithms behind one select/reward interface.

Every instance is single-owner mutable state. ``select`` draws only from the
``RngStream`` it is handed and never touches reward statistics; ``reward``
consumes no randomness. Ties between equal indices or samples go to the
lowest arm index.
"""

from __future__ import annotations

import math
from typing import Any, ClassVar

from slopt.bandit.adwin import AdwinWindow
from slopt.bandit.config import UNIFORM, BanditConfig
from slopt.bandit.indices import klucb_upper_bound
from slopt.rng import RngStream


class BanditInstance:
    algorithm: ClassVar[str] = ""

    def __init__(self, config: BanditConfig, K: int) -> None:
        if int(K) != K or K < 1:
            raise ValueError(f"a bandit instance needs K >= 1 arms, got {K!r}")
        self.config = config
        self.K = int(K)
        self.t = 0
        self.pulls = [0] * self.K

    def select(self, rng: RngStream) -> int:
        raise NotImplementedError

    def reward(self, arm: int, r: float) -> None:
        self._check_arm(arm)
        self.t += 1
        self.pulls[arm] += 1
        self._update(arm, r)

    def _update(self, arm: int, r: float) -> None:
        raise NotImplementedError

    def _check_arm(self, arm: int) -> None:
        if not 0 <= arm < self.K:
            raise ValueError(f"arm {arm} out of range for K={self.K}")

    # -- serialisation -------------------------------------------------------
    _state_fields: ClassVar[tuple[str, ...]] = ()

    def to_state(self) -> dict[str, Any]:
        state: dict[str, Any] = {"algorithm": self.algorithm, "K": self.K, "t": self.t, "pulls": list(self.pulls)}
        for name in self._state_fields:
            state[name] = _copy(getattr(self, name))
        return state

    def load_state(self, state: dict[str, Any]) -> None:
        if state["algorithm"] != self.algorithm or int(state["K"]) != self.K:
            raise ValueError("bandit state does not match this instance")
        self.t = int(state["t"])
        self.pulls = [int(v) for v in state["pulls"]]
        for name in self._state_fields:
            setattr(self, name, _copy(state[name]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BanditInstance):
            return NotImplemented
        return self.config == other.config and self.to_state() == other.to_state()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(K={self.K}, t={self.t})"


def _copy(v: Any) -> Any:
    if isinstance(v, list):
        return [_copy(x) for x in v]
    if isinstance(v, tuple):
        return [_copy(x) for x in v]
    return v


def _argmax(values: list[float]) -> int:
    best = 0
    best_v = values[0]
    for i in range(1, len(values)):
        if values[i] > best_v:
            best, best_v = i, values[i]
    return best


def _sample_index(probs: list[float], u: float) -> int:
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    # u landed in the rounding slack above the cumulative sum
    for i in range(len(probs) - 1, -1, -1):
        if probs[i] > 0.0:
            return i
    return len(probs) - 1


def softmax(logits: list[float]) -> list[float]:
    m = max(logits)
    w = [math.exp(x - m) for x in logits]
    z = sum(w)
    return [x / z for x in w]


class Uniform(BanditInstance):
    algorithm = UNIFORM

    def select(self, rng: RngStream) -> int:
        return rng.below(self.K)

    def _update(self, arm: int, r: float) -> None:
        pass


class _Counting(BanditInstance):
    _state_fields = ("successes", "failures")

    def __init__(self, config: BanditConfig, K: int) -> None:
        super().__init__(config, K)
        self.successes = [0] * self.K
        self.failures = [0] * self.K

    def _update(self, arm: int, r: float) -> None:
        if r:
            self.successes[arm] += 1
        else:
            self.failures[arm] += 1

    def _first_unpulled(self) -> int:
        for i, n in enumerate(self.pulls):
            if n == 0:
                return i
        return -1


class UCB1(_Counting):
    algorithm = "UCB1"

    def indices(self) -> list[float]:
        c, t = self.config.c, self.t
        log_t = math.log(t)
        return [s / n + math.sqrt(c * log_t / n) for s, n in zip(self.successes, self.pulls)]

    def select(self, rng: RngStream) -> int:
        i = self._first_unpulled()
        return i if i >= 0 else _argmax(self.indices())


class KLUCB(_Counting):
    algorithm = "KL-UCB"

    def indices(self) -> list[float]:
        return [klucb_upper_bound(s, n, self.t) for s, n in zip(self.successes, self.pulls)]

    def select(self, rng: RngStream) -> int:
        i = self._first_unpulled()
        return i if i >= 0 else _argmax(self.indices())


class ThompsonSampling(_Counting):
    algorithm = "TS"

    def posterior(self, arm: int) -> tuple[float, float]:
        cfg = self.config
        return cfg.prior_alpha + self.successes[arm], cfg.prior_beta + self.failures[arm]

    def select(self, rng: RngStream) -> int:
        a0, b0 = self.config.prior_alpha, self.config.prior_beta
        beta = rng.betavariate
        return _argmax([beta(a0 + s, b0 + f) for s, f in zip(self.successes, self.failures)])


class DiscountedTS(ThompsonSampling):
    """TS whose success/failure counts decay by ``gamma`` every round."""

    algorithm = "dTS"

    def __init__(self, config: BanditConfig, K: int) -> None:
        super().__init__(config, K)
        self.successes = [0.0] * self.K
        self.failures = [0.0] * self.K

    def _update(self, arm: int, r: float) -> None:
        g = self.config.gamma
        S = self.successes
        F = self.failures
        for i in range(self.K):
            S[i] *= g
            F[i] *= g
        S[arm] += r
        F[arm] += 1.0 - r


class AdaptiveShrinkingTS(ThompsonSampling):
    """TS whose per-arm history is an ADWIN window that forgets on change."""

    algorithm = "ADS-TS"
    _state_fields = ()

    def __init__(self, config: BanditConfig, K: int) -> None:
        super().__init__(config, K)
        self.windows = [AdwinWindow(config.adwin_M, config.adwin_cut_delta, config.adwin_clock) for _ in range(self.K)]
        self.cuts = 0

    def posterior(self, arm: int) -> tuple[float, float]:
        w = self.windows[arm]
        return self.config.prior_alpha + w.total, self.config.prior_beta + w.count - w.total

    def select(self, rng: RngStream) -> int:
        a0, b0 = self.config.prior_alpha, self.config.prior_beta
        beta = rng.betavariate
        return _argmax([beta(a0 + w.total, b0 + w.count - w.total) for w in self.windows])

    def _update(self, arm: int, r: float) -> None:
        w = self.windows[arm]
        if w.insert(r):
            self.cuts += 1
        self.successes[arm] = w.total
        self.failures[arm] = w.count - w.total

    def to_state(self) -> dict[str, Any]:
        state = super().to_state()
        state["windows"] = [w.to_state() for w in self.windows]
        state["cuts"] = self.cuts
        return state

    def load_state(self, state: dict[str, Any]) -> None:
        super().load_state(state)
        self.windows = [AdwinWindow.from_state(s) for s in state["windows"]]
        self.cuts = int(state["cuts"])
        self.successes = [w.total for w in self.windows]
        self.failures = [w.count - w.total for w in self.windows]


class DiscountedBoltzmann(BanditInstance):
    """Softmax over gamma-discounted empirical means."""

    algorithm = "dBE"
    _state_fields = ("disc_sum", "disc_count")

    def __init__(self, config: BanditConfig, K: int) -> None:
        super().__init__(config, K)
        self.disc_sum = [0.0] * self.K
        self.disc_count = [0.0] * self.K

    def means(self) -> list[float]:
        return [s / n if n > 0.0 else 0.0 for s, n in zip(self.disc_sum, self.disc_count)]

    def probabilities(self) -> list[float]:
        tau = self.config.dbe_temperature
        return softmax([m / tau for m in self.means()])

    def select(self, rng: RngStream) -> int:
        return _sample_index(self.probabilities(), rng.random())

    def _update(self, arm: int, r: float) -> None:
        g = self.config.dbe_gamma
        S, N = self.disc_sum, self.disc_count
        for i in range(self.K):
            S[i] *= g
            N[i] *= g
        S[arm] += r
        N[arm] += 1.0


class _Exp3Family(BanditInstance):
    """Shared bookkeeping: cumulative importance-weighted loss estimates.

    Weights are kept implicitly as log-weights ``-eta * loss_estimates``. The
    probability vector used by ``select`` is remembered so the matching
    ``reward`` call can importance-weight the observed loss.
    """

    _state_fields = ("loss_estimates", "pending_arm", "pending_probs")

    def __init__(self, config: BanditConfig, K: int) -> None:
        super().__init__(config, K)
        self.loss_estimates = [0.0] * self.K
        self.pending_arm: int | None = None
        self.pending_probs: list[float] | None = None

    def probabilities(self) -> list[float]:
        raise NotImplementedError

    def select(self, rng: RngStream) -> int:
        probs = self.probabilities()
        arm = _sample_index(probs, rng.random())
        self.pending_arm = arm
        self.pending_probs = probs
        return arm

    def reward(self, arm: int, r: float) -> None:
        self._check_arm(arm)
        if self.pending_arm is None or self.pending_probs is None:
            raise ValueError(f"{self.algorithm}: reward without a preceding select")
        if arm != self.pending_arm:
            raise ValueError(f"{self.algorithm}: reward for arm {arm} but arm {self.pending_arm} was selected")
        super().reward(arm, r)
        self.pending_arm = None
        self.pending_probs = None


class EXP3IX(_Exp3Family):
    algorithm = "EXP3-IX"

    def learning_rate(self) -> float:
        K, tau = self.K, self.t + 1
        return math.sqrt(2.0 * math.log(K) / (K * tau))

    def probabilities(self) -> list[float]:
        eta = self.learning_rate()
        return softmax([-eta * loss for loss in self.loss_estimates])

    def _update(self, arm: int, r: float) -> None:
        # gamma_t = eta_t / 2 for the round in which the arm was drawn
        K, tau = self.K, self.t
        gamma = 0.5 * math.sqrt(2.0 * math.log(K) / (K * tau))
        p = self.pending_probs[arm]  # type: ignore[index]
        self.loss_estimates[arm] += (1.0 - r) / (p + gamma)


class EXP3PP(_Exp3Family):
    """EXP3++ with gap-driven exploration floors.

    ``xi(a) = beta * ln t / (t * gap(a)**2)`` where ``gap(a)`` is the
    confidence-adjusted empirical gap of arm ``a`` to the best arm; the
    confidence radius grows with ``alpha * ln(t * K**(1/alpha))``.
    """

    algorithm = "EXP3++"
    _state_fields = _Exp3Family._state_fields + ("observed_loss",)

    def __init__(self, config: BanditConfig, K: int) -> None:
        super().__init__(config, K)
        self.observed_loss = [0.0] * self.K

    def learning_rate(self) -> float:
        K, tau = self.K, self.t + 1
        return 0.5 * math.sqrt(math.log(K) / (K * tau))

    def gap_estimates(self) -> list[float]:
        K, tau = self.K, self.t + 1
        alpha = self.config.exp3pp_alpha
        conf = alpha * (math.log(tau) + math.log(K) / alpha)
        lcb, ucb = [], []
        for n, loss in zip(self.pulls, self.observed_loss):
            if n == 0:
                lcb.append(0.0)
                ucb.append(1.0)
                continue
            mean = loss / n
            rad = math.sqrt(conf / (2.0 * n))
            lcb.append(max(0.0, mean - rad))
            ucb.append(min(1.0, mean + rad))
        best_ucb = min(ucb)
        return [max(0.0, low - best_ucb) for low in lcb]

    def exploration_floors(self) -> list[float]:
        K, tau = self.K, self.t + 1
        beta = self.config.exp3pp_beta
        cap = min(1.0 / (2.0 * K), self.learning_rate())
        log_tau = math.log(tau)
        floors = []
        for gap in self.gap_estimates():
            if gap > 0.0:
                floors.append(min(cap, beta * log_tau / (tau * gap * gap)))
            else:
                floors.append(cap)
        return floors

    def probabilities(self) -> list[float]:
        eta = self.learning_rate()
        rho = softmax([-eta * loss for loss in self.loss_estimates])
        floors = self.exploration_floors()
        mass = 1.0 - sum(floors)
        return [mass * p + e for p, e in zip(rho, floors)]

    def _update(self, arm: int, r: float) -> None:
        p = self.pending_probs[arm]  # type: ignore[index]
        self.loss_estimates[arm] += (1.0 - r) / p
        self.observed_loss[arm] += 1.0 - r


_REGISTRY: dict[str, type[BanditInstance]] = {
    cls.algorithm: cls
    for cls in (UCB1, KLUCB, ThompsonSampling, DiscountedTS, DiscountedBoltzmann,
                AdaptiveShrinkingTS, EXP3IX, EXP3PP, Uniform)
}


def create_instance(config: BanditConfig, K: int) -> BanditInstance:
    """Fresh instance with ``t = 0`` and every arm at its initial state."""
    return _REGISTRY[config.algorithm](config, K)


def select_arm(instance: BanditInstance, rng: RngStream) -> int:
    return instance.select(rng)


def reward(instance: BanditInstance, arm: int, r: float) -> None:
    instance.reward(arm, r)


def instance_from_state(config: BanditConfig, state: dict[str, Any]) -> BanditInstance:
    inst = create_instance(config, int(state["K"]))
    inst.load_state(state)
    return inst


def dbe_probabilities(instance: BanditInstance) -> list[float]:
    if not isinstance(instance, DiscountedBoltzmann):
        raise TypeError("dbe_probabilities needs a dBE instance")
    return instance.probabilities()


def exp3pp_probabilities(instance: BanditInstance) -> list[float]:
    if not isinstance(instance, EXP3PP):
        raise TypeError("exp3pp_probabilities needs an EXP3++ instance")
    return instance.probabilities()
