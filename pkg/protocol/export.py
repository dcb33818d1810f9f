"""Writers for session records, sifting transcripts and sifting results."""

from __future__ import annotations

import csv
import json

from quantum_model import OUTCOMES, alice, bob


def to_json(data) -> str:
    """Stable JSON text: insertion-ordered keys, round-trip float repr, trailing newline."""
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def write_records_csv(records, handle):
    """CSV `round,a_setting,b_setting,outcome` with outcomes PP/PM/MP/MM."""
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["round", "a_setting", "b_setting", "outcome"])
    a_labels = {i: alice(i).label for i in range(1, 4)}
    b_labels = {i: bob(i).label for i in range(1, 4)}
    names = [o.name for o in OUTCOMES]
    columns = zip(records.a_index.tolist(), records.b_index.tolist(), records.outcome.tolist())
    for r, (i, j, k) in enumerate(columns):
        writer.writerow([r, a_labels[i], b_labels[j], names[k]])


def write_transcript_jsonl(transcript, handle):
    """One SiftMessage per line: {"kind", "round", "payload"}."""
    for message in transcript:
        handle.write(json.dumps(message.to_dict(), separators=(",", ":")))
        handle.write("\n")


def write_result_json(result, handle, include_keys=False):
    handle.write(to_json(result.to_dict(include_keys=include_keys)))
