import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkdmitm.protocol import (
    Mode,
    ProtocolCorruption,
    ProtocolError,
    QuantumSignal,
    compare_controls,
    encode,
    generate_controls,
    generate_payload,
    measure_signal,
    sample_key,
    sift,
)
from qkdmitm.quantum import Basis, Outcome
from qkdmitm.rng import SeededRng

H, I = Basis.H, Basis.I
U = Outcome.UNIFORM
QA = (1, 1, 0, 0, 1, 0, 0, 1)
A = (H, I, H, I, H, I, H, I)
B = (H, H, I, I, H, H, I, I)


def outcomes(*vals):
    return tuple(U if v == "U" else Outcome(v) for v in vals)


@pytest.mark.parametrize("bad", [0, 3, -2, 7])
def test_generate_rejects_bad_length(bad):
    with pytest.raises(ProtocolError):
        generate_payload(SeededRng(0), bad)
    with pytest.raises(ProtocolError):
        generate_controls(SeededRng(0), bad)


def test_generate_length_two():
    p = generate_payload(SeededRng(5), 2)
    assert len(p) == 2 and set(p) <= {0, 1}
    c = generate_controls(SeededRng(5), 2)
    assert len(c) == 2 and set(c) <= {I, H}


@pytest.mark.parametrize("gen", [generate_payload, generate_controls])
def test_per_position_frequency(gen):
    rng = SeededRng(2024)
    draws = np.array([[int(x) for x in gen(rng, 8)] for _ in range(100_000)])
    freq = draws.mean(axis=0)
    assert np.all(np.abs(freq - 0.5) <= 0.01), freq


def test_encode_table_row_c():
    assert encode(QA, A).symbols() == ("U-", "1", "U+", "0", "U-", "0", "U+", "1")


def test_encode_all_zero():
    assert encode((0,) * 6, (I,) * 6).symbols() == ("0",) * 6


def test_encode_length_mismatch():
    with pytest.raises(ProtocolError):
        encode((0, 1), (I,))


@given(st.integers(1, 32).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=2 * n, max_size=2 * n),
    st.lists(st.sampled_from([I, H]), min_size=2 * n, max_size=2 * n),
)), st.sampled_from(list(Mode)), st.integers(0, 2**32))
def test_round_trip_same_controls(pc, mode, seed):
    payload, controls = pc
    out, _ = measure_signal(encode(payload, controls, mode), controls, SeededRng(seed))
    assert [o.bit for o in out] == list(payload)


def test_measure_table_row_e():
    out, post = measure_signal(encode(QA, A), B)
    assert out == outcomes(1, "U", "U", 0, 1, "U", "U", 1)
    assert post.symbols() == ("U-", "U", "U", "0", "U-", "U", "U", "1")


def test_measure_physical_mismatched_frequency():
    sig = encode((1,), (H,), Mode.PHYSICAL)
    rng = SeededRng(8)
    ones = sum(measure_signal(sig, (I,), rng)[0][0].bit for _ in range(10_000))
    assert abs(ones / 10_000 - 0.5) <= 0.02


def test_measure_physical_needs_rng():
    with pytest.raises(ProtocolError):
        measure_signal(encode(QA, A, Mode.PHYSICAL), B)


def test_compare_controls():
    assert compare_controls(A, B) == (1, 0, 0, 1, 1, 0, 0, 1)
    assert compare_controls(A, A) == (1,) * 8
    assert compare_controls(A, tuple(b.other for b in A)) == (0,) * 8
    with pytest.raises(ProtocolError):
        compare_controls(A, B[:3])


def test_sift_table_row_g():
    c = compare_controls(A, B)
    assert sift(outcomes(1, "U", "U", 0, 1, "U", "U", 1), c) == (1, 0, 1, 1)
    assert sift(QA, c) == (1, 0, 1, 1)
    assert sift(QA, (0,) * 8) == ()


def test_sift_uniform_at_kept_position():
    with pytest.raises(ProtocolCorruption):
        sift(outcomes("U", 1), (1, 1))


@pytest.mark.parametrize("mode", list(Mode))
def test_alice_and_bob_sift_agree_exhaustive(mode):
    # every per-position combination of payload bit, Alice basis, Bob basis
    rng = SeededRng(99)
    for bit, a, b in itertools.product((0, 1), (I, H), (I, H)):
        sig = encode((bit,), (a,), mode)
        out, _ = measure_signal(sig, (b,), rng)
        c = compare_controls((a,), (b,))
        assert sift((bit,), c) == sift(out, c)


def test_signal_same_as_up_to_phase():
    a = QuantumSignal(Mode.PHYSICAL, np.array([[0.6, 0.8]]))
    b = QuantumSignal(Mode.PHYSICAL, np.array([[-0.6, -0.8]]))
    assert a.same_as(b)
    assert not a.same_as(QuantumSignal(Mode.PHYSICAL, np.array([[0.8, 0.6]])))
    assert a.symbols() == ("?",)


def test_signal_rejects_non_normalized():
    with pytest.raises(ProtocolError):
        QuantumSignal(Mode.PHYSICAL, np.array([[1.0, 1.0]]))


def test_signal_is_read_only():
    sig = encode(QA, A)
    with pytest.raises(ValueError):
        sig.data[0] = 0


def test_sample_key_partitions():
    alice = (1, 0, 1, 1, 0, 0, 1, 0)
    bob = (1, 0, 0, 1, 0, 0, 1, 1)
    s = sample_key(alice, bob, SeededRng(4), fraction=0.5)
    assert s.size == 4
    assert len(s.alice_remaining) == len(s.bob_remaining) == 4
    assert list(s.positions) == sorted(s.positions)
    assert s.errors == sum(alice[p] != bob[p] for p in s.positions)
    assert sample_key(alice, bob, SeededRng(4), size=3).size == 3
    assert sample_key(alice, bob, SeededRng(4), size=30).size == 8
    assert sample_key((), (), SeededRng(4)).size == 0
