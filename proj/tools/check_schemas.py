#!/usr/bin/env python3
"""Checks workbench outputs and service responses against data/schemas.

  check_schemas.py --ldwb BIN --acceptance BIN --schemas DIR --work DIR

1. Runs the acceptance dry run with --keep and validates every JSONL file,
   campaign file and sample layout it finds.
2. Mutates valid records and requires `ldwb validate` to accept a record only
   if the schema does. For judgments, every rule is expressible, so the two
   verdicts must be identical.
3. Drives `ldwb campaign serve` over HTTP and validates every task response.
"""

import argparse
import copy
import json
import random
import shutil
import subprocess
import sys
import urllib.error
import urllib.request
from pathlib import Path

import jsonschema

KINDS = ["corpus", "input_sequence", "knowledge", "generation", "scoring", "attribution", "judgment"]
CRITERIA = ["correctness", "appropriateness", "contextualization", "listening"]
VOTES = ["positive", "negative", "unsure"]
LABELS = ["generic", "hallucination", "incoherent", "other"]

failures = []


def fail(msg):
    failures.append(msg)
    print("FAIL", msg)


class Schemas:
    def __init__(self, root):
        self.raw = {p.name.split(".")[0]: json.loads(p.read_text()) for p in sorted(root.glob("*.schema.json"))}
        for s in self.raw.values():
            jsonschema.Draft202012Validator.check_schema(s)

    def validator(self, name, part=None):
        s = self.raw[name]
        if part:
            s = {**s, "$ref": f"#/$defs/{part}"}
        return jsonschema.Draft202012Validator(s)

    def ok(self, name, value, part=None):
        return self.validator(name, part).is_valid(value)


def validate_outputs(schemas, root):
    counts = {}
    for path in sorted(root.rglob("*.jsonl")):
        lines = [json.loads(l) for l in path.read_text().splitlines() if l.strip()]
        kind = lines[0]["schema"].removeprefix("ldwb.")
        if not schemas.ok(kind, lines[0], "header"):
            fail(f"{path}: header")
        v = schemas.validator(kind, "record")
        for i, rec in enumerate(lines[1:], start=2):
            for e in v.iter_errors(rec):
                fail(f"{path}:{i}: {e.message}")
        counts[kind] = counts.get(kind, 0) + len(lines) - 1
    for path in sorted(root.rglob("campaign.json")):
        for e in schemas.validator("campaign").iter_errors(json.loads(path.read_text())):
            fail(f"{path}: {e.message}")
        counts["campaign"] = counts.get("campaign", 0) + 1
    return counts


def cli_accepts(ldwb, kind, work, payload, is_lines=True):
    path = work / f"probe.{kind}"
    if is_lines:
        path.write_text(json.dumps({"schema": f"ldwb.{kind}", "version": 1}) + "\n" + json.dumps(payload) + "\n")
    else:
        path.write_text(json.dumps(payload))
    r = subprocess.run([str(ldwb), "validate", "--kind", kind, str(path)], capture_output=True, text=True)
    if r.returncode not in (0, 1):
        fail(f"validate --kind {kind} exited {r.returncode}: {r.stderr.strip()}")
    return r.returncode == 0


def paths_of(value, prefix=()):
    yield prefix
    if isinstance(value, dict):
        for k, v in value.items():
            yield from paths_of(v, prefix + (k,))
    elif isinstance(value, list):
        for i, v in enumerate(value[:3]):
            yield from paths_of(v, prefix + (i,))


def mutate(value, rng):
    v = copy.deepcopy(value)
    path = rng.choice([p for p in paths_of(v) if p])
    parent = v
    for k in path[:-1]:
        parent = parent[k]
    key = path[-1]
    op = rng.randrange(6)
    if op == 0 and isinstance(parent, dict):
        del parent[key]
    elif op == 1 and isinstance(parent, dict):
        parent["unexpected"] = 1
    elif op == 2:
        parent[key] = rng.choice([None, 7, -1, 2.5, "", "  ", [], {}, True, "x"])
    elif op == 3 and isinstance(parent[key], list):
        parent[key] = parent[key][:0] if rng.random() < 0.5 else parent[key] + parent[key][-1:]
    elif op == 4 and isinstance(parent[key], str):
        parent[key] = rng.choice(["", " ", "\t", "user", "agent", "knowledge", "history", "tag", "psg", "negative"])
    else:
        parent[key] = rng.choice([0, 1, "positive", "unknown", None])
    return v


def random_judgment(rng):
    rec = {"worker_id": rng.choice(["w1", "w 2"] * 8 + ["", " "]),
           "candidate_id": rng.choice(["c1", "x/y"] * 8 + ["", "\t"]),
           "votes": {c: rng.choice(VOTES) for c in CRITERIA},
           "timestamp": rng.choice(["2026-01-01T00:00:00Z", "t"] * 8 + ["", "\n"])}
    if rng.random() < 0.8:
        rec["error_labels"] = rng.sample(LABELS, rng.randrange(3))
    r = rng.random()
    if r < 0.05:
        del rec["votes"][rng.choice(CRITERIA)]
    elif r < 0.1:
        rec["votes"]["fluency"] = "positive"
    elif r < 0.15:
        rec["votes"][rng.choice(CRITERIA)] = rng.choice(["maybe", "", 1])
    elif r < 0.2 and rec.get("error_labels"):
        rec["error_labels"].append(rec["error_labels"][0])
    elif r < 0.25:
        rec["error_labels"] = rng.choice([["boring"], "generic", [1]])
    elif r < 0.3:
        rec[rng.choice(["note", "score"])] = "x"
    elif r < 0.35:
        del rec[rng.choice(["worker_id", "candidate_id", "timestamp", "votes"])]
    return rec


def contract(schemas, ldwb, work, samples, rng):
    judged = [0, 0]
    for _ in range(300):
        rec = random_judgment(rng)
        s = schemas.ok("judgment", rec, "record")
        c = cli_accepts(ldwb, "judgment", work, rec)
        judged[s] += 1
        if s != c:
            fail(f"judgment verdicts differ (schema {s}, reader {c}): {json.dumps(rec)}")
    mutated = 0
    for kind, base in samples.items():
        is_lines = kind != "campaign"
        for _ in range(60 if is_lines else 40):
            rec = mutate(base, rng)
            part = "record" if is_lines else None
            s = schemas.ok(kind, rec, part)
            c = cli_accepts(ldwb, kind, work, rec, is_lines)
            mutated += 1
            if c and not s:
                fail(f"{kind}: reader accepts a record the schema rejects: {json.dumps(rec)[:300]}")
    return judged, mutated


def http(method, url, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(url, data=data, method=method, headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=10) as r:
            return r.status, json.loads(r.read() or b"null")
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read() or b"null")


def drive_service(schemas, ldwb, work, campaign):
    cfg = work / "serve.json"
    cfg.write_text(json.dumps({"paths": {"output": str(work / "serve-out")},
                               "service": {"host": "127.0.0.1", "port": 0, "state_dir": "state"}}))
    camp = work / "serve-campaign.json"
    camp.write_text(json.dumps(campaign))
    proc = subprocess.Popen([str(ldwb), "--config", str(cfg), "campaign", "serve", "--campaign", str(camp), "--port", "0"],
                            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    tasks = 0
    try:
        line = proc.stdout.readline().strip()
        if not line.startswith("listening on "):
            fail(f"serve did not start: {line} {proc.stderr.read() if proc.poll() is not None else ''}")
            return 0
        base = "http://" + line.removeprefix("listening on ")
        task_v = schemas.validator("task")
        judgment_v = schemas.validator("judgment", "record")
        worker = campaign["workers"][0]
        gold = {q["candidate"]["candidate_id"]: q["gold"] for q in campaign["qualification"]}
        for _ in range(200):
            status, task = http("GET", f"{base}/task/next?worker={worker}")
            if status != 200:
                fail(f"GET /task/next returned {status}")
                break
            for e in task_v.iter_errors(task):
                fail(f"task response: {e.message}")
            tasks += 1
            if task["done"]:
                break
            votes = gold.get(task["candidate_id"], {c: "positive" for c in CRITERIA})
            body = {"worker_id": worker, "candidate_id": task["candidate_id"], "votes": votes,
                    "error_labels": ["generic"] if "negative" in (votes["appropriateness"], votes["contextualization"]) else [],
                    "timestamp": f"2026-01-01T00:00:{tasks % 60:02d}Z"}
            if not judgment_v.is_valid(body):
                fail("client judgment body violates the schema")
            status, _ = http("POST", f"{base}/judgment", body)
            if status not in (200, 201):
                fail(f"POST /judgment returned {status}")
                break
        else:
            fail("task loop did not finish")
    finally:
        proc.terminate()
        proc.wait(timeout=10)
    return tasks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ldwb", required=True, type=Path)
    ap.add_argument("--acceptance", required=True, type=Path)
    ap.add_argument("--schemas", required=True, type=Path)
    ap.add_argument("--work", required=True, type=Path)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    schemas = Schemas(args.schemas)
    shutil.rmtree(args.work, ignore_errors=True)
    args.work.mkdir(parents=True)
    keep = args.work / "acceptance"
    r = subprocess.run([str(args.acceptance), "--keep", str(keep)], capture_output=True, text=True)
    if r.returncode != 0:
        print(r.stdout, r.stderr)
        fail("acceptance dry run failed")
        return 1

    counts = validate_outputs(schemas, keep)
    for kind in KINDS + ["campaign"]:
        if not counts.get(kind):
            fail(f"no {kind} records produced")
    print("outputs:", ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))

    layout = json.loads((args.schemas.parent / "sample" / "layout.json").read_text())
    if not schemas.ok("layout", layout):
        fail("sample layout violates the schema")

    samples = {}
    for path in sorted(keep.rglob("*.jsonl")):
        lines = [json.loads(l) for l in path.read_text().splitlines() if l.strip()]
        kind = lines[0]["schema"].removeprefix("ldwb.")
        if kind not in samples and len(lines) > 1:
            samples[kind] = lines[1]
    campaign = json.loads(next(keep.rglob("runner/campaign.json")).read_text())
    small = copy.deepcopy(campaign)
    small["histories"] = small["histories"][:2]
    samples["campaign"] = small

    rng = random.Random(args.seed)
    judged, mutated = contract(schemas, args.ldwb, args.work, samples, rng)
    print(f"judgment contract: {judged[1]} valid, {judged[0]} invalid; {mutated} mutated records")

    tasks = drive_service(schemas, args.ldwb, args.work, campaign)
    print(f"service: {tasks} task responses")

    print("PASS" if not failures else f"FAIL ({len(failures)} problems)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
