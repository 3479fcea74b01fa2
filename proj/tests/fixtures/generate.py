#!/usr/bin/env python3
"""Regenerates the mock fixture sets under tests/fixtures.

table1/  20 scenarios whose raw-variant answers score
         risk 12, scene 19, what 18, which 19, where 16, proposed_action 14 correct.
gating/  4 no-hazard scenarios whose object-level stages have no fixtures.

Frames are small distinct PNGs so every request has its own cache key.
"""

import json
import pathlib
import struct
import zlib

ROOT = pathlib.Path(__file__).resolve().parent
FRAMES_PER_SCENARIO = 4
WIDTH, HEIGHT = 16, 12


def png(width, height, rgb):
    raw = b"".join(b"\x00" + bytes(rgb[y * width * 3:(y + 1) * width * 3]) for y in range(height))

    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header) + chunk(b"IDAT", zlib.compress(raw, 9))
            + chunk(b"IEND", b""))


def write_frames(directory, salt):
    directory.mkdir(parents=True, exist_ok=True)
    for k in range(FRAMES_PER_SCENARIO):
        rgb = []
        for y in range(HEIGHT):
            for x in range(WIDTH):
                rgb += [(x * 9 + salt * 37 + k * 11) & 0xFF, (y * 13 + salt * 5) & 0xFF, (x * y + k * 53 + salt) & 0xFF]
        (directory / f"frame_{k}.png").write_bytes(png(WIDTH, HEIGHT, rgb))


STOPWORDS = set((ROOT.parent.parent / "assets" / "stopwords.txt").read_text().split())


def tokens(text):
    cleaned = "".join(c.lower() if c.isalnum() else " " for c in text.replace("'", ""))
    return [t for t in cleaned.split() if t not in STOPWORDS]


SCENES = ["urban intersection", "divided highway", "residential street", "parking lot", "rural road"]
WHATS = ["pedestrian", "cyclist", "white sedan", "delivery truck", "motorcyclist"]
WHICHES = ["adult in red jacket", "child with yellow backpack", "silver hatchback",
           "box truck with open door", "rider without helmet"]
WHERES = ["crossing ahead from left", "merging from right lane", "stopped in ego lane",
          "approaching from oncoming lane", "pulling out from curb on right"]
ACTIONS = ["brake and yield", "slow down", "change lanes left", "stop", "keep safe distance"]

WRONG = {
    "scene": "underground tunnel",
    "what": "stray dog",
    "which": "bright green paint",
    "where": "behind us far back",
    "proposed_action": "accelerate through",
}

# Scenario indices answered incorrectly, per stage.
WRONG_AT = {
    "risk": {1, 4, 7, 10, 13, 16, 18, 19},
    "scene": {5},
    "what": {2, 11},
    "which": {14},
    "where": {0, 6, 12, 17},
    "proposed_action": {3, 6, 8, 9, 15, 19},
}


def correct_phrasing(stage, truth, i):
    # Alternate exact answers with paraphrases that still clear the F1 threshold.
    if i % 3 == 0:
        return truth
    if i % 3 == 1:
        return "The " + truth[0].upper() + truth[1:] + "."
    return truth + " area" if stage == "scene" else truth + ", clearly"


def table1():
    out = ROOT / "table1"
    manifest, fixtures = [], []
    for i in range(20):
        sid = f"t1-{i + 1:02d}"
        write_frames(out / "frames" / sid, salt=i + 1)
        hazard = i % 5 != 4
        truth = {
            "risk": "yes" if hazard else "no",
            "scene": SCENES[i % 5],
            "what": WHATS[(i + 1) % 5],
            "which": WHICHES[(i + 2) % 5],
            "where": WHERES[(i + 3) % 5],
            "proposed_action": ACTIONS[i % 5],
        }
        manifest.append({"id": sid, "source": f"frames/{sid}", "truth": truth})

        says_yes = hazard != (i in WRONG_AT["risk"])
        answers = {"risk": f"Yes, the {truth['what']} is a hazard." if says_yes else "No hazard in view."}
        for stage in ("scene", "what", "which", "where", "proposed_action"):
            if i in WRONG_AT[stage]:
                answer = WRONG[stage]
                assert not set(tokens(answer)) & set(tokens(truth[stage])), (sid, stage)
            else:
                answer = correct_phrasing(stage, truth[stage], i)
            answers[stage] = answer
        answers["context"] = f"Across the frames the {truth['what']} is {truth['where']}."
        for stage, text in answers.items():
            fixtures.append({"scenario": sid, "stage": stage, "text": text})

    write_jsonl(out / "manifest.jsonl", manifest)
    write_jsonl(out / "fixtures.jsonl", fixtures)
    write_config(out / "config.json", gate=False)


def gating():
    out = ROOT / "gating"
    manifest, fixtures = [], []
    for i in range(4):
        sid = f"gate-{i + 1:02d}"
        write_frames(out / "frames" / sid, salt=100 + i)
        truth = {"risk": "no", "scene": SCENES[i], "what": WHATS[i], "which": WHICHES[i],
                 "where": WHERES[i], "proposed_action": ACTIONS[i]}
        manifest.append({"id": sid, "source": f"frames/{sid}", "truth": truth})
        fixtures.append({"scenario": sid, "stage": "risk", "text": "No hazard"})
        fixtures.append({"scenario": sid, "stage": "scene", "text": SCENES[i]})
    write_jsonl(out / "manifest.jsonl", manifest)
    write_jsonl(out / "fixtures.jsonl", fixtures)
    write_config(out / "config.json", gate=True)


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))


def write_config(path, gate):
    config = {
        "manifest_path": "manifest.jsonl",
        "backend": {"kind": "mock", "name": "mock-vision", "fixtures_path": "fixtures.jsonl",
                    "rate_limit_rps": 1000.0, "max_retries": 0},
        "strategy": {"kind": "sliding_window", "n": 2, "gate_on_risk": gate, "k": 3, "variants": ["raw"]},
        "scoring": {"f1_threshold": 0.5},
        "seed": 2024,
        "workers": 4,
        "runs_dir": "runs",
        "cache_dir": "cache",
    }
    path.write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    table1()
    gating()
