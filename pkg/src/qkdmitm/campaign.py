"""Monte Carlo campaigns over independent sessions."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import kernels
from .adversary import classify_copies
from .channels import SessionConfig, run_session
from .estimators import bernoulli_stderr, mean_and_stderr
from .rng import SeededRng


def trial_seed(seed: int, index: int) -> int:
    state = np.random.SeedSequence(entropy=seed, spawn_key=(index,)).generate_state(
        2, dtype=np.uint32
    )
    return int(state[0]) << 32 | int(state[1])


@dataclass(frozen=True)
class TrialResult:
    aborted: bool
    keys_match: bool
    detected: bool
    qber: float | None
    sample_errors: int
    sample_size: int
    sifted: int
    length: int
    attack_success: bool
    exact_forgery: bool


def run_trial(config: SessionConfig) -> TrialResult:
    t = run_session(config)
    r = t.records
    att = t.attack
    if t.aborted:
        return TrialResult(True, False, False, None, 0, 0, 0, config.length, False, False)
    return TrialResult(
        aborted=False,
        keys_match=t.keys_match,
        detected=r.detected,
        qber=r.qber,
        sample_errors=r.sample.errors,
        sample_size=r.sample.size,
        sifted=len(r.alice_sifted),
        length=config.length,
        attack_success=bool(att and att.success),
        exact_forgery=bool(att and att.exact_forgery),
    )


def _run_chunk(args) -> list[TrialResult]:
    config, seed, indices = args
    return [run_trial(replace(config, seed=trial_seed(seed, i))) for i in indices]


@dataclass(frozen=True)
class StatsReport:
    scenario: str
    trials: int
    attack_success_rate: float
    attack_success_stderr: float
    mean_qber: float
    mean_qber_stderr: float
    pooled_qber: float
    sample_bits: int
    detection_rate: float
    sift_rate: float
    exact_forgery_rate: float
    keys_match_rate: float
    abort_rate: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary(self) -> str:
        return (
            f"{self.scenario or 'campaign'}: trials={self.trials} "
            f"success={self.attack_success_rate:.4f}±{self.attack_success_stderr:.4f} "
            f"qber={self.mean_qber:.4f}±{self.mean_qber_stderr:.4f} "
            f"detect={self.detection_rate:.4f} sift={self.sift_rate:.4f} "
            f"forge={self.exact_forgery_rate:.4f} abort={self.abort_rate:.4f}"
        )


STATS_FIELDS = [f.name for f in fields(StatsReport)]


def reports_to_csv(reports: list[StatsReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=STATS_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.to_dict())
    return buf.getvalue()


def aggregate(results: list[TrialResult], scenario: str = "") -> StatsReport:
    """Reduce trial results in order; serial and parallel runs agree exactly."""
    n = len(results)
    if n < 1:
        raise ValueError("need at least one trial")
    done = [r for r in results if not r.aborted]
    success = sum(r.attack_success for r in results) / n
    qbers = [r.qber for r in done if r.qber is not None]
    mean_q, se_q = mean_and_stderr(qbers)
    bits = sum(r.sample_size for r in done)
    errors = sum(r.sample_errors for r in done)
    m = len(done)
    return StatsReport(
        scenario=scenario,
        trials=n,
        attack_success_rate=success,
        attack_success_stderr=bernoulli_stderr(success, n),
        mean_qber=mean_q,
        mean_qber_stderr=se_q,
        pooled_qber=errors / bits if bits else 0.0,
        sample_bits=bits,
        detection_rate=sum(r.detected for r in done) / m if m else 0.0,
        sift_rate=sum(r.sifted / r.length for r in done) / m if m else 0.0,
        exact_forgery_rate=sum(r.exact_forgery for r in results) / n,
        keys_match_rate=sum(r.keys_match for r in done) / m if m else 0.0,
        abort_rate=(n - m) / n,
    )


def run_trials(config: SessionConfig, trials: int, seed: int, jobs: int = 1) -> list[TrialResult]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    config.validate()
    if jobs <= 1:
        return _run_chunk((config, seed, range(trials)))
    chunks = np.array_split(np.arange(trials), jobs * 4)
    work = [(config, seed, [int(i) for i in c]) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_run_chunk, work))
    return [r for part in parts for r in part]


def run_campaign(
    config: SessionConfig, trials: int, seed: int, jobs: int = 1, scenario: str = ""
) -> StatsReport:
    """Run ``trials`` independent sessions; deterministic in (config, trials, seed)."""
    return aggregate(run_trials(config, trials, seed, jobs), scenario)


def detection_curve(
    config: SessionConfig, sizes: list[int], trials: int, seed: int
) -> dict[int, float]:
    """Detection rate when exactly ``s`` sifted bits are publicly compared."""
    out = {}
    for s in sizes:
        cfg = replace(config, policy=replace(config.policy, sample_size=s))
        out[s] = run_campaign(cfg, trials, seed).detection_rate
    return out


def estimate_misidentification(copies: int, positions: int, seed: int) -> float:
    """Physical Attack 1: fraction of H-encoded qubits Eve tags as I-encoded.

    Each position is a fresh |U+> or |U->; Eve reads ``copies`` copies in the
    computational basis and ``copies`` in the Hadamard basis.
    """
    rng = SeededRng(seed)
    bits = rng.bits("alice.payload", positions)
    amps = kernels.prepare_amps(kernels.encode(bits, np.ones(positions, dtype=np.uint8)))

    def passes(basis: int, name: str) -> np.ndarray:
        bases = np.full(positions, basis, dtype=np.uint8)
        reads = np.empty((copies, positions), dtype=np.uint8)
        for j in range(copies):
            reads[j], _ = kernels.measure_physical(amps, bases, rng.uniforms(name, positions))
        return reads

    _, controls = classify_copies(passes(0, "eve.pass_i"), passes(1, "eve.pass_h"))
    return sum(1 for c in controls if c == 0) / positions
