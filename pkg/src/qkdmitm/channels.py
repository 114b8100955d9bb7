"""Quantum/classical channels, message orderings, defense policies, sessions.

A session is a single-threaded run of Alice, Bob and (optionally) Eve that
appends every wire message and a few role-internal milestones to a
:class:`SessionTranscript`. Enabled policies are checked each time an event
is appended; the first violation aborts the session at that event.
"""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any

from . import protocol
from .adversary import AttackReport, Eve, EveStrategy, StrategyKind
from .estimators import qber
from .protocol import KeySample, Mode, ProtocolError, QuantumSignal
from .quantum import Basis, Outcome
from .rng import SeededRng

QUANTUM = "quantum"
CLASSICAL = "classical"
INTERNAL = "internal"
ALICE_TO_BOB = "Alice->Bob"
BOB_TO_ALICE = "Bob->Alice"

SEED_MAX = 2**64 - 1


class ConfigurationError(ValueError):
    pass


class NoCloningError(RuntimeError):
    """A quantum payload was measured twice."""


class OrderingKind(str, enum.Enum):
    STANDARD = "standard"
    EARLY_BASIS = "early-basis"
    RETRANSMIT = "retransmit"


@dataclass(frozen=True)
class MessageOrdering:
    kind: OrderingKind = OrderingKind.STANDARD
    copies: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", OrderingKind(self.kind))
        if self.kind is OrderingKind.RETRANSMIT:
            if self.copies < 2:
                raise ConfigurationError(f"retransmit needs >= 2 copies, got {self.copies}")
        elif self.copies != 1:
            raise ConfigurationError(f"{self.kind.value} ordering sends exactly one copy")

    @classmethod
    def standard(cls) -> MessageOrdering:
        return cls()

    @classmethod
    def early_basis(cls) -> MessageOrdering:
        return cls(OrderingKind.EARLY_BASIS)

    @classmethod
    def retransmit(cls, k: int) -> MessageOrdering:
        return cls(OrderingKind.RETRANSMIT, k)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "copies": self.copies}

    @classmethod
    def from_dict(cls, d: dict) -> MessageOrdering:
        return cls(OrderingKind(d["kind"]), int(d.get("copies", 1)))


@dataclass(frozen=True)
class PolicyConfig:
    single_send: bool = False
    ordered_basis: bool = False
    sample_fraction: float = 0.5
    qber_threshold: float = 0.0
    sample_size: int | None = None

    def __post_init__(self):
        for name in ("sample_fraction", "qber_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1], got {v}")
        if self.sample_size is not None and self.sample_size < 0:
            raise ConfigurationError(f"sample_size must be >= 0, got {self.sample_size}")

    @classmethod
    def named(cls, name: str, **kw) -> PolicyConfig:
        flags = {
            "none": (False, False),
            "single-send": (True, False),
            "ordered-basis": (False, True),
            "both": (True, True),
        }
        if name not in flags:
            raise ConfigurationError(f"unknown policy {name!r}")
        single, ordered = flags[name]
        return cls(single_send=single, ordered_basis=ordered, **kw)

    def to_dict(self) -> dict:
        return {
            "single_send": self.single_send,
            "ordered_basis": self.ordered_basis,
            "sample_fraction": self.sample_fraction,
            "qber_threshold": self.qber_threshold,
            "sample_size": self.sample_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PolicyConfig:
        return cls(**d)


def load_fixture(name: str) -> dict:
    try:
        text = resources.files("qkdmitm").joinpath("fixtures", f"{name}.json").read_text()
    except FileNotFoundError:
        raise ConfigurationError(f"unknown fixture {name!r}") from None
    return json.loads(text)


def fixture_names() -> list[str]:
    root = resources.files("qkdmitm").joinpath("fixtures")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _bases(values) -> tuple[Basis, ...]:
    return tuple(v if isinstance(v, Basis) else Basis[v] for v in values)


@dataclass(frozen=True)
class SessionConfig:
    length: int = 8
    mode: Mode = Mode.SYMBOLIC
    ordering: MessageOrdering = field(default_factory=MessageOrdering)
    adversary: EveStrategy | None = None
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    seed: int = 0
    fixture: str | None = None
    payload: tuple[int, ...] | None = None
    alice_controls: tuple[Basis, ...] | None = None
    bob_controls: tuple[Basis, ...] | None = None
    eve_guesses: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("payload", "eve_guesses"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(int(b) for b in v))
        for name in ("alice_controls", "bob_controls"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _bases(v))

    @classmethod
    def from_fixture(cls, name: str, *, with_eve_guesses: bool = True, **kw) -> SessionConfig:
        fx = load_fixture(name)
        base = dict(
            length=fx["length"],
            fixture=name,
            payload=fx["payload"],
            alice_controls=fx["alice_controls"],
            bob_controls=fx["bob_controls"],
        )
        if with_eve_guesses and "eve_guesses" in fx:
            base["eve_guesses"] = fx["eve_guesses"]
        base.update(kw)
        return cls(**base)

    def validate(self) -> None:
        try:
            protocol.check_length(self.length)
        except ProtocolError as exc:
            raise ConfigurationError(str(exc)) from None
        if not 0 <= self.seed <= SEED_MAX:
            raise ConfigurationError(f"seed must fit in 64 bits, got {self.seed}")
        for name in ("payload", "alice_controls", "bob_controls"):
            v = getattr(self, name)
            if v is not None and len(v) != self.length:
                raise ConfigurationError(f"{name} has length {len(v)}, session has {self.length}")
        if self.payload is not None and any(b not in (0, 1) for b in self.payload):
            raise ConfigurationError("payload must contain only bits")
        adv = self.adversary
        if adv is None:
            return
        if adv.kind is StrategyKind.ATTACK1:
            want = MessageOrdering.retransmit(2 * adv.copies)
            if self.ordering != want:
                raise ConfigurationError(
                    f"attack1 with {adv.copies} copies per basis needs retransmit({2 * adv.copies})"
                )
        elif adv.kind is StrategyKind.ATTACK2:
            if self.ordering.kind is not OrderingKind.EARLY_BASIS:
                raise ConfigurationError("attack2 needs the early-basis ordering")

    def to_dict(self) -> dict:
        def opt(v, f=lambda x: x):
            return None if v is None else [f(x) for x in v]

        return {
            "length": self.length,
            "mode": self.mode.value,
            "ordering": self.ordering.to_dict(),
            "adversary": None if self.adversary is None else self.adversary.to_dict(),
            "policy": self.policy.to_dict(),
            "seed": self.seed,
            "fixture": self.fixture,
            "payload": opt(self.payload),
            "alice_controls": opt(self.alice_controls, lambda b: b.name),
            "bob_controls": opt(self.bob_controls, lambda b: b.name),
            "eve_guesses": opt(self.eve_guesses),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SessionConfig:
        d = dict(d)
        d["ordering"] = MessageOrdering.from_dict(d["ordering"])
        d["policy"] = PolicyConfig.from_dict(d["policy"])
        if d.get("adversary") is not None:
            d["adversary"] = EveStrategy.from_dict(d["adversary"])
        return cls(**d)


@dataclass
class ChannelEvent:
    seq: int
    channel: str
    direction: str
    payload_kind: str
    payload: Any
    tampered: bool = False
    origin: str = ""
    # sender-side (payload, controls) digest; never serialized
    fingerprint: str | None = field(default=None, repr=False, compare=False)

    def payload_json(self):
        p = self.payload
        if isinstance(p, QuantumSignal):
            if p.mode is Mode.SYMBOLIC:
                return list(p.symbols())
            return [[z.real, z.imag, w.real, w.imag] for z, w in p.data.tolist()]
        if self.payload_kind == "controls":
            return [b.name for b in p]
        if self.payload_kind == "matches":
            return list(p)
        return p

    def to_dict(self) -> dict:
        return {
            "record": "event",
            "seq": self.seq,
            "channel": self.channel,
            "direction": self.direction,
            "payload_kind": self.payload_kind,
            "payload": self.payload_json(),
            "tampered": self.tampered,
        }


@dataclass(frozen=True)
class PolicyVerdict:
    policy: str
    ok: bool
    seq: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"policy": self.policy, "ok": self.ok, "seq": self.seq, "detail": self.detail}


@dataclass
class RoleRecords:
    payload: tuple[int, ...] | None = None
    alice_controls: tuple[Basis, ...] | None = None
    signal: QuantumSignal | None = None
    bob_controls: tuple[Basis, ...] | None = None
    bob_outcomes: tuple[Outcome, ...] | None = None
    matches: tuple[int, ...] | None = None
    alice_sifted: tuple[int, ...] | None = None
    bob_sifted: tuple[int, ...] | None = None
    sample: KeySample | None = None
    qber: float | None = None
    detected: bool = False

    def to_dict(self) -> dict:
        def names(v):
            return None if v is None else [b.name for b in v]

        def lst(v):
            return None if v is None else list(v)

        s = self.sample
        return {
            "payload": lst(self.payload),
            "alice_controls": names(self.alice_controls),
            "signal": None if self.signal is None else list(self.signal.symbols()),
            "bob_controls": names(self.bob_controls),
            "bob_outcomes": (
                None
                if self.bob_outcomes is None
                else ["U" if o is Outcome.UNIFORM else str(int(o)) for o in self.bob_outcomes]
            ),
            "matches": lst(self.matches),
            "alice_sifted": lst(self.alice_sifted),
            "bob_sifted": lst(self.bob_sifted),
            "sample": None
            if s is None
            else {
                "positions": list(s.positions),
                "alice_bits": list(s.alice_bits),
                "bob_bits": list(s.bob_bits),
                "errors": s.errors,
            },
            "alice_key": None if s is None else list(s.alice_remaining),
            "bob_key": None if s is None else list(s.bob_remaining),
            "qber": self.qber,
            "detected": self.detected,
        }


@dataclass
class SessionTranscript:
    config: SessionConfig
    events: list[ChannelEvent] = field(default_factory=list)
    records: RoleRecords = field(default_factory=RoleRecords)
    attack: AttackReport | None = None
    verdicts: list[PolicyVerdict] = field(default_factory=list)
    status: str = "running"
    abort_seq: int | None = None
    _consumed: set = field(default_factory=set, repr=False)

    @property
    def aborted(self) -> bool:
        return self.status == "aborted"

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    @property
    def keys_match(self) -> bool:
        r = self.records
        return r.alice_sifted is not None and r.alice_sifted == r.bob_sifted

    @property
    def detected(self) -> bool:
        return self.records.detected

    def quantum_events(self) -> list[ChannelEvent]:
        return [e for e in self.events if e.channel == QUANTUM]

    def consume(self, event: ChannelEvent) -> QuantumSignal:
        """Hand a quantum payload to a measuring party, at most once."""
        if event.channel != QUANTUM:
            raise ValueError(f"event {event.seq} is not a quantum transmission")
        if event.seq in self._consumed:
            raise NoCloningError(f"quantum event {event.seq} was already measured")
        self._consumed.add(event.seq)
        return event.payload

    def summary_dict(self) -> dict:
        return {
            "record": "summary",
            "status": self.status,
            "abort_seq": self.abort_seq,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "roles": self.records.to_dict(),
            "attack": None if self.attack is None else self.attack.to_dict(),
        }

    def to_records(self) -> list[dict]:
        head = {"record": "config", **self.config.to_dict()}
        return [head, *(e.to_dict() for e in self.events), self.summary_dict()]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in self.to_records())


def read_jsonl(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def config_from_jsonl(text: str) -> SessionConfig:
    head = read_jsonl(text)[0]
    if head.get("record") != "config":
        raise ValueError("transcript does not start with a config record")
    d = {k: v for k, v in head.items() if k != "record"}
    return SessionConfig.from_dict(d)


def enforce_single_send(transcript: SessionTranscript) -> PolicyVerdict:
    """Violation at the first sender transmission that repeats an earlier (payload, controls)."""
    seen = set()
    for e in transcript.events:
        if e.channel != QUANTUM or e.tampered or e.fingerprint is None:
            continue
        if e.fingerprint in seen:
            return PolicyVerdict("single-send", False, e.seq, "quantum signal sent more than once")
        seen.add(e.fingerprint)
    return PolicyVerdict("single-send", True)


def enforce_basis_ordering(transcript: SessionTranscript) -> PolicyVerdict:
    """Violation if Bob announces his bases before his measurement is complete."""
    measured_at = None
    for e in transcript.events:
        if e.channel == INTERNAL and e.origin == "Bob" and e.payload_kind == "measurement_complete":
            measured_at = e.seq
        elif (
            e.channel == CLASSICAL
            and e.direction == BOB_TO_ALICE
            and e.payload_kind == "controls"
            and not e.tampered
            and measured_at is None
        ):
            return PolicyVerdict(
                "ordered-basis", False, e.seq, "receiver announced bases before measuring"
            )
    return PolicyVerdict("ordered-basis", True)


class _Abort(Exception):
    def __init__(self, verdict: PolicyVerdict):
        super().__init__(verdict.detail)
        self.verdict = verdict


def _fingerprint(payload, controls) -> str:
    raw = bytes(payload) + bytes(int(c) for c in controls)
    return hashlib.sha256(raw).hexdigest()


class _Session:
    def __init__(self, config: SessionConfig):
        self.cfg = config
        self.rng = SeededRng(config.seed)
        self.t = SessionTranscript(config)
        self.eve = (
            None
            if config.adversary is None
            else Eve(config.adversary, self.rng, config.eve_guesses)
        )
        if self.eve is not None:
            self.t.attack = self.eve.report

    def emit(self, channel, direction, kind, payload, *, tampered=False, origin="", fp=None):
        ev = ChannelEvent(
            len(self.t.events) + 1, channel, direction, kind, payload, tampered, origin, fp
        )
        self.t.events.append(ev)
        policy = self.cfg.policy
        for enabled, check in (
            (policy.single_send, enforce_single_send),
            (policy.ordered_basis, enforce_basis_ordering),
        ):
            if enabled:
                verdict = check(self.t)
                if not verdict.ok:
                    raise _Abort(verdict)
        if self.eve is not None and channel == CLASSICAL:
            self.eve.on_classical(kind, payload)
        return ev

    def run(self) -> SessionTranscript:
        try:
            self._run()
        except _Abort as abort:
            self.t.status = "aborted"
            self.t.abort_seq = abort.verdict.seq
            self.t.verdicts.append(abort.verdict)
            return self.t
        policy = self.cfg.policy
        if policy.single_send:
            self.t.verdicts.append(enforce_single_send(self.t))
        if policy.ordered_basis:
            self.t.verdicts.append(enforce_basis_ordering(self.t))
        self.t.status = "completed"
        return self.t

    def _run(self) -> None:
        cfg, rng, rec = self.cfg, self.rng, self.t.records
        n = cfg.length
        early = cfg.ordering.kind is OrderingKind.EARLY_BASIS

        rec.bob_controls = cfg.bob_controls or protocol.generate_controls(rng, n, "bob.controls")
        if early:
            self.emit(CLASSICAL, BOB_TO_ALICE, "controls", rec.bob_controls, origin="Bob")

        rec.payload = cfg.payload or protocol.generate_payload(rng, n, "alice.payload")
        rec.alice_controls = cfg.alice_controls or protocol.generate_controls(
            rng, n, "alice.controls"
        )
        rec.signal = protocol.encode(rec.payload, rec.alice_controls, cfg.mode)
        fp = _fingerprint(rec.payload, rec.alice_controls)

        copies = cfg.ordering.copies
        delivered = None
        for j in range(copies):
            ev = self.emit(QUANTUM, ALICE_TO_BOB, "signal", rec.signal, origin="Alice", fp=fp)
            delivered = ev
            if self.eve is not None:
                forged = self.eve.on_quantum(self.t.consume(ev), j, copies)
                delivered = None
                if forged is not None:
                    delivered = self.emit(
                        QUANTUM, ALICE_TO_BOB, "signal", forged, tampered=True, origin="Eve"
                    )

        outcomes, _ = protocol.measure_signal(
            self.t.consume(delivered), rec.bob_controls, rng, "bob.measure"
        )
        rec.bob_outcomes = outcomes
        self.emit(INTERNAL, "Bob", "measurement_complete", None, origin="Bob")
        if not early:
            self.emit(CLASSICAL, BOB_TO_ALICE, "controls", rec.bob_controls, origin="Bob")

        rec.matches = protocol.compare_controls(rec.alice_controls, rec.bob_controls)
        self.emit(CLASSICAL, ALICE_TO_BOB, "matches", rec.matches, origin="Alice")
        rec.alice_sifted = protocol.sift(rec.payload, rec.matches)
        rec.bob_sifted = protocol.sift(rec.bob_outcomes, rec.matches)

        sample = protocol.sample_key(
            rec.alice_sifted,
            rec.bob_sifted,
            rng,
            fraction=cfg.policy.sample_fraction,
            size=cfg.policy.sample_size,
        )
        rec.sample = sample
        self.emit(
            CLASSICAL,
            ALICE_TO_BOB,
            "key_sample",
            {"positions": list(sample.positions), "bits": list(sample.alice_bits)},
            origin="Alice",
        )
        if sample.size:
            rec.qber = qber(sample.alice_bits, sample.bob_bits)
            rec.detected = rec.qber > cfg.policy.qber_threshold
        self.emit(
            CLASSICAL,
            BOB_TO_ALICE,
            "sample_verdict",
            {"errors": sample.errors, "size": sample.size, "detected": rec.detected},
            origin="Bob",
        )
        if self.eve is not None:
            self._finish_attack()

    def _finish_attack(self) -> None:
        rep, rec = self.t.attack, self.t.records
        if rep.forged_signal is not None:
            rep.exact_forgery = rep.forged_signal.same_as(rec.signal)
        if rep.reconstructed_controls is not None:
            rep.basis_errors = sum(
                a != b for a, b in zip(rep.reconstructed_controls, rec.alice_controls)
            )
        if rep.eve_bits is not None:
            rep.eve_key = protocol.sift(rep.eve_bits, rec.matches)
        rep.keys_match = self.t.keys_match
        rep.detected = rec.detected
        rep.success = (
            rep.forged_signal is not None
            and rep.keys_match
            and not rep.detected
            and rep.eve_key == rec.alice_sifted
        )


def run_session(config: SessionConfig) -> SessionTranscript:
    """Run one BB84 session end to end; policy aborts are reported, not raised."""
    config.validate()
    return _Session(config).run()


def replay(transcript_text: str) -> SessionTranscript:
    return run_session(config_from_jsonl(transcript_text))


def with_seed(config: SessionConfig, seed: int) -> SessionConfig:
    return replace(config, seed=seed)
