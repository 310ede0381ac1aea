import json
import os
import random
import shutil
from pathlib import Path

import pytest

ENGLISH = "the and of to is in it that was for on with as this".split()
GERMAN = "der die und ist nicht das mit sich auf den ein eine".split()


def srt_time(seconds):
    ms = int(round(seconds * 1000))
    h, ms = divmod(ms, 3_600_000)
    m, ms = divmod(ms, 60_000)
    s, ms = divmod(ms, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def to_srt(lines):
    blocks = []
    for i, (start, end, text) in enumerate(lines, 1):
        blocks.append(f"{i}\n{srt_time(start)} --> {srt_time(end)}\n{text}\n")
    return "\n".join(blocks)


def make_pairs(n, seed):
    rng = random.Random(seed)
    vocab = [f"word{i}" for i in range(200)]
    pairs = []
    for i in range(n):
        duration = 20.0 + rng.randrange(6000) / 100.0
        nlines = 1 + rng.randrange(10)
        step = duration / (nlines + 1)
        stop = GERMAN if i % 7 == 3 else ENGLISH
        manual = []
        for k in range(nlines):
            words = [rng.choice(stop if j % 2 else vocab) for j in range(8)]
            manual.append((round(k * step, 3), round(k * step + step * 0.9, 3), " ".join(words)))
        if i % 5 == 1:
            manual = [(s, e, t.upper()) for s, e, t in manual]
        if i % 6 == 2 and len(manual) > 1:
            manual[1] = (manual[1][0], manual[1][1], manual[0][2])
        machine = None
        if i % 4 != 0:
            subs = rng.choice([0, 1, 5])
            machine = []
            for s, e, t in manual:
                words = t.split()
                for j in range(min(subs, len(words))):
                    words[j] = "zz" + str(j)
                machine.append((s, e, " ".join(words)))
        pair = {
            "doc_id": f"doc{i:03d}",
            "audio_duration": duration,
            "audio_lang": None if i % 11 == 5 else "en",
            "manual": {"doc_id": f"doc{i:03d}", "lines": manual},
            "machine": None if machine is None else {"doc_id": f"doc{i:03d}", "lines": machine},
        }
        pairs.append(pair)
    return pairs


def write_corpus(root, pairs):
    root = Path(root)
    (root / "transcripts").mkdir(parents=True, exist_ok=True)
    rows = []
    for p in pairs:
        manual = f"transcripts/{p['doc_id']}.manual.srt"
        (root / manual).write_text(to_srt(p["manual"]["lines"]), encoding="utf-8")
        row = {"doc_id": p["doc_id"], "audio_duration": p["audio_duration"], "manual_path": manual}
        if p["audio_lang"] is not None:
            row["audio_lang"] = p["audio_lang"]
        if p["machine"] is not None:
            machine = f"transcripts/{p['doc_id']}.machine.srt"
            (root / machine).write_text(to_srt(p["machine"]["lines"]), encoding="utf-8")
            row["machine_path"] = machine
        rows.append(json.dumps(row))
    (root / "manifest.jsonl").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return root / "manifest.jsonl"


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("ASRCURATE_CLI") or shutil.which("asrcurate")
    if not path:
        pytest.skip("asrcurate executable not available")
    return path


@pytest.fixture
def fixture_pairs():
    return make_pairs(50, 2024)
