"""Recorded randomness tape shared by the Gaussian and dense paths.

One record per event slot of the measurement sweep, in iteration order:

    step, site, kind, scheduled, branch, z

``kind`` is D or K, ``scheduled``/``branch`` are 0/1, and ``z`` is the raw
standard-normal pointer draw (readout x = (+lam if branch else -lam) +
delta*z).  Unscheduled slots carry branch = 0, z = 0.  The file format is
line-based text: comment/header lines start with '#', then a column header,
then one CSV record per line with z printed in round-trip precision.  A
header records the protocol parameters so a replay can verify it is reading a
compatible tape.
"""

from dataclasses import dataclass

from .errors import TapeError

_COLUMNS = "step,site,kind,scheduled,branch,z"


@dataclass
class TapeRecord:
    step: int
    site: int
    kind: str
    scheduled: int
    branch: int
    z: float


class RandomnessTape:
    def __init__(self, meta=None):
        self.meta = dict(meta or {})
        self.records = []

    def append(self, step, site, kind, scheduled, branch, z):
        self.records.append(TapeRecord(int(step), int(site), kind, int(scheduled), int(branch), float(z)))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write("# mchain-tape v1\n")
            for key in sorted(self.meta):
                fh.write(f"# {key}={self.meta[key]}\n")
            fh.write(_COLUMNS + "\n")
            for r in self.records:
                fh.write(f"{r.step},{r.site},{r.kind},{r.scheduled},{r.branch},{r.z!r}\n")

    @classmethod
    def load(cls, path):
        tape = cls()
        with open(path) as fh:
            lines = fh.read().splitlines()
        body_started = False
        for ln, line in enumerate(lines, 1):
            if not line.strip():
                continue
            if line.startswith("#"):
                text = line[1:].strip()
                if "=" in text:
                    key, _, val = text.partition("=")
                    tape.meta[key.strip()] = val.strip()
                continue
            if not body_started:
                if line.strip() != _COLUMNS:
                    raise TapeError(f"{path}:{ln}: unexpected header {line!r}")
                body_started = True
                continue
            parts = line.split(",")
            if len(parts) != 6:
                raise TapeError(f"{path}:{ln}: malformed record {line!r}")
            step, site, kind, sched, branch, z = parts
            if kind not in ("D", "K"):
                raise TapeError(f"{path}:{ln}: bad kind {kind!r}")
            if sched not in ("0", "1") or branch not in ("0", "1"):
                raise TapeError(f"{path}:{ln}: bits must be 0/1")
            tape.append(int(step), int(site), kind, int(sched), int(branch), float(z))
        return tape
