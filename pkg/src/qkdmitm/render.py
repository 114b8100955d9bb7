"""Step-by-step table rendering of a session transcript."""
from __future__ import annotations

import csv
import io

from .adversary import StrategyKind
from .channels import OrderingKind, SessionTranscript
from .protocol import Mode
from .quantum import Outcome

_KETS = {"0": "|0⟩", "1": "|1⟩", "U+": "|U⁺⟩", "U-": "|U⁻⟩", "U": "|U⟩", "?": "?"}


def _outcomes(values) -> list[str]:
    return ["U" if o is Outcome.UNIFORM else str(int(o)) for o in values]


def _names(values) -> list[str]:
    return [b.name for b in values]


def table_rows(t: SessionTranscript, unicode: bool = False) -> list[tuple[str, list[str]]]:
    """(label, cells) pairs in protocol order, highest qubit index first."""
    r = t.records
    att = t.attack

    def sig(signal) -> list[str]:
        cells = list(signal.symbols())
        return [_KETS[c] for c in cells] if unicode else cells

    bob_first = t.config.ordering.kind is OrderingKind.EARLY_BASIS
    rows: list[tuple[str, list[str]]] = []
    if bob_first and r.bob_controls is not None:
        rows.append(("(d) Bob controls B", _names(r.bob_controls)))
    if r.payload is not None:
        rows.append(("(a) Alice payload Q_A", [str(b) for b in r.payload]))
        rows.append(("(b) Alice controls A", _names(r.alice_controls)))
        rows.append(("(c) Alice signal Q_T", sig(r.signal)))
    if att is not None:
        for j, rec in enumerate(att.records, 1):
            tag = f" #{j}" if len(att.records) > 1 else ""
            rows.append((f"Eve bases{tag}", _names(rec.bases)))
            rows.append((f"Eve record{tag}", _outcomes(rec.outcomes)))
        if att.reconstructed_payload is not None:
            rows.append(("Eve reconstructed Q_A", [str(b) for b in att.reconstructed_payload]))
            rows.append(("Eve reconstructed A", _names(att.reconstructed_controls)))
        if att.forged_signal is not None:
            label = "Eve forged Q_T''" if att.strategy.kind is StrategyKind.ATTACK2 else "Eve forged Q_T'"
            rows.append((label, sig(att.forged_signal)))
    if not bob_first and r.bob_controls is not None and r.bob_outcomes is not None:
        rows.append(("(d) Bob controls B", _names(r.bob_controls)))
    if r.bob_outcomes is not None:
        rows.append(("(e) Bob outcomes Q_B", _outcomes(r.bob_outcomes)))
    if r.matches is not None:
        rows.append(("(f) match C", [str(c) for c in r.matches]))
        kept = []
        for c, o in zip(r.matches, r.bob_outcomes):
            kept.append(str(o.bit) if c else "")
        rows.append(("(g) Bob sifted", kept))
    return rows


def _footer(t: SessionTranscript) -> list[str]:
    r = t.records
    lines = []
    if r.alice_sifted is not None:
        lines.append(f"Alice sifted key: {''.join(map(str, r.alice_sifted)) or '-'}")
        lines.append(f"Bob sifted key:   {''.join(map(str, r.bob_sifted)) or '-'}")
    if r.sample is not None:
        q = "n/a" if r.qber is None else f"{r.qber:.4f}"
        lines.append(
            f"sample: {r.sample.size} bits, {r.sample.errors} errors, QBER {q}, "
            f"detected={'yes' if r.detected else 'no'}"
        )
    if t.attack is not None and t.completed:
        a = t.attack
        lines.append(
            f"attack: exact_forgery={a.exact_forgery} keys_match={a.keys_match} "
            f"detected={a.detected} success={a.success}"
        )
    if t.aborted:
        v = t.verdicts[-1]
        lines.append(f"ABORTED at event {v.seq}: {v.policy} policy violated ({v.detail})")
    else:
        lines.append(f"status: {t.status}")
    return lines


def render_table(t: SessionTranscript, unicode: bool = False) -> str:
    rows = table_rows(t, unicode)
    n = t.config.length
    header = ["step"] + [f"q{i}" for i in range(n - 1, -1, -1)]
    width0 = max([len(header[0])] + [len(label) for label, _ in rows])
    widths = [max(3, *(len(cells[i]) for _, cells in rows)) if rows else 3 for i in range(n)]
    widths = [max(w, len(h)) for w, h in zip(widths, header[1:])]

    def line(label, cells):
        return "  ".join([label.ljust(width0)] + [c.ljust(w) for c, w in zip(cells, widths)]).rstrip()

    mode = "symbolic" if t.config.mode is Mode.SYMBOLIC else "physical"
    out = [f"# mode={mode} ordering={t.config.ordering.kind.value} seed={t.config.seed}"]
    out.append(line(header[0], header[1:]))
    out.extend(line(label, cells) for label, cells in rows)
    out.append("")
    out.extend(_footer(t))
    return "\n".join(out) + "\n"


def render_csv(t: SessionTranscript) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step"] + [f"q{i}" for i in range(t.config.length - 1, -1, -1)])
    for label, cells in table_rows(t):
        w.writerow([label, *cells])
    return buf.getvalue()
