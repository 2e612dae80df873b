import hashlib
import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from tqdm import tqdm

GREEN = "\033[32m"
END_COLOR = "\033[0m"


def print_timings(timings):
    for key, value in timings.items():
        print(f"{GREEN}{key.capitalize()}: {value:.3f}s{END_COLOR}")

    total = sum(timings.values())
    print(f"{GREEN}Total: {total:.3f}s{END_COLOR}")


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_hash(payload) -> str:
    """Short stable digest of a JSON-able config payload."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()[:12]


def atomic_write(path, writer, mode="wb"):
    """Write through a temp file in the target directory, then rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, mode) as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    return atomic_write(path, lambda fh: fh.write(text), mode="w")


def fan_out(fn, items, threads, desc=None):
    """Map fn over items on a thread pool; results come back in input order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, disable=desc is None)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, item) for item in items]
        return [f.result() for f in tqdm(futures, desc=desc, disable=desc is None)]
