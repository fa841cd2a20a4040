"""Dataset construction: random-graph generation, Matrix Market ingestion,
splits, and a plain-text persistence format."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import (
    ConfigError,
    FormatError,
    MatrixMarketParseError,
    MatrixMarketRejectError,
)
from .graph import Graph, from_edge_list_text, to_edge_list_text
from .seeding import child_rng

DATASET_FORMAT_TAG = "chordelim-dataset-v1"

_MM_FIELDS = {"real": 3, "integer": 3, "complex": 4, "pattern": 2}
_MM_SYMMETRIES = {"general", "symmetric", "skew-symmetric", "hermitian"}


@dataclass(frozen=True)
class DatasetSpec:
    """Parameters of one dataset: either random graphs or a matrix directory."""

    kind: str  # "erdos_renyi" or "matrix_market"
    count: int = 0
    n_range: tuple[int, int] = (1, 1)
    p_range: tuple[float, float] = (0.0, 0.0)
    seed: int = 0
    source_dir: str | None = None

    def validate(self) -> None:
        if self.kind not in ("erdos_renyi", "matrix_market"):
            raise ConfigError(f"unknown dataset kind {self.kind!r}")
        n_min, n_max = self.n_range
        p_min, p_max = self.p_range
        if n_min < 1 or n_min > n_max:
            raise ConfigError(f"invalid n_range {self.n_range}: need 1 <= n_min <= n_max")
        if not (0.0 <= p_min <= p_max <= 1.0):
            raise ConfigError(
                f"invalid p_range {self.p_range}: need 0 <= p_min <= p_max <= 1"
            )
        if self.count < 0:
            raise ConfigError(f"count must be non-negative, got {self.count}")


@dataclass
class GraphRecord:
    id: str
    graph: Graph
    provenance: str


def generate_er(spec: DatasetSpec, rng: random.Random | None = None) -> list[GraphRecord]:
    """Sample ``spec.count`` graphs: n uniform over n_range, p uniform over
    p_range, each possible edge included independently with probability p.

    Each record draws from its own child stream, so generation is
    reproducible regardless of evaluation order.
    """
    spec.validate()
    if spec.kind != "erdos_renyi":
        raise ConfigError(f"generate_er needs kind 'erdos_renyi', got {spec.kind!r}")
    base = spec.seed if rng is None else rng.getrandbits(63)
    n_min, n_max = spec.n_range
    p_min, p_max = spec.p_range
    records = []
    for i in range(spec.count):
        r = child_rng(base, "er", i)
        n = r.randint(n_min, n_max)
        p = r.uniform(p_min, p_max)
        g = Graph(n)
        for u in range(n):
            for v in range(u + 1, n):
                if r.random() < p:
                    g.add_edge(u, v)
        records.append(
            GraphRecord(
                id=f"er-{i:04d}",
                graph=g,
                provenance=f"erdos_renyi n={n} p={p!r} seed={spec.seed} index={i}",
            )
        )
    return records


def load_matrix_market(path: str | Path) -> GraphRecord:
    """Build a graph from the sparsity pattern of a coordinate Matrix Market file.

    One vertex per row index; any stored off-diagonal entry (i, j) yields the
    undirected edge {i-1, j-1}, which symmetrizes non-symmetric matrices by
    construction. Stored values, including explicit zeros, are ignored;
    diagonal entries are skipped. Non-square matrices are rejected.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise MatrixMarketParseError("file is empty", line=1)
    header = lines[0].split()
    if len(header) < 4 or not header[0].lower().startswith("%%matrixmarket"):
        raise MatrixMarketParseError(
            f"expected '%%MatrixMarket matrix coordinate ...' header, got {lines[0]!r}",
            line=1,
        )
    tokens = [t.lower() for t in header[1:]]
    if tokens[0] != "matrix":
        raise MatrixMarketParseError(f"unsupported object {tokens[0]!r}", line=1)
    if tokens[1] != "coordinate":
        raise MatrixMarketParseError(
            f"unsupported format {tokens[1]!r} (only coordinate is handled)", line=1
        )
    if len(tokens) < 4:
        raise MatrixMarketParseError("header is missing field/symmetry qualifiers", line=1)
    field, symmetry = tokens[2], tokens[3]
    if field not in _MM_FIELDS:
        raise MatrixMarketParseError(f"unknown field type {field!r}", line=1)
    if symmetry not in _MM_SYMMETRIES:
        raise MatrixMarketParseError(f"unknown symmetry type {symmetry!r}", line=1)
    tokens_per_entry = _MM_FIELDS[field]

    lineno = 1
    size_line = None
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        size_line = (lineno, stripped)
        break
    if size_line is None:
        raise MatrixMarketParseError("missing size line", line=lineno)
    size_no, size_text = size_line
    parts = size_text.split()
    if len(parts) != 3:
        raise MatrixMarketParseError(
            f"expected 'rows cols nnz', got {size_text!r}", line=size_no
        )
    try:
        rows, cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise MatrixMarketParseError(
            f"size line must hold three integers, got {size_text!r}", line=size_no
        ) from None
    if rows < 0 or cols < 0 or nnz < 0:
        raise MatrixMarketParseError("sizes must be non-negative", line=size_no)
    if rows != cols:
        raise MatrixMarketRejectError(f"{path.name}: non-square matrix {rows}x{cols}")

    g = Graph(rows)
    remaining = nnz
    last_no = size_no
    for lineno, line in enumerate(lines[size_no:], start=size_no + 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if remaining == 0:
            raise MatrixMarketParseError(
                f"unexpected content after {nnz} entries: {stripped!r}", line=lineno
            )
        parts = stripped.split()
        if len(parts) != tokens_per_entry:
            raise MatrixMarketParseError(
                f"expected {tokens_per_entry} tokens for field {field!r}, "
                f"got {len(parts)}: {stripped!r}",
                line=lineno,
            )
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixMarketParseError(
                f"entry indices must be integers, got {stripped!r}", line=lineno
            ) from None
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixMarketParseError(
                f"entry ({i}, {j}) out of range for {rows}x{cols}", line=lineno
            )
        if i != j and not g.has_edge(i - 1, j - 1):
            g.add_edge(i - 1, j - 1)
        remaining -= 1
        last_no = lineno
    if remaining:
        raise MatrixMarketParseError(
            f"file ended after {nnz - remaining} of {nnz} entries", line=last_no
        )
    return GraphRecord(id=path.stem, graph=g, provenance=path.name)


def filter_square_sized(
    records: Sequence[GraphRecord], n_min: int, n_max: int
) -> list[GraphRecord]:
    """Keep records whose vertex count lies in [n_min, n_max] (inclusive)."""
    return [r for r in records if n_min <= r.graph.num_labels <= n_max]


def split(
    records: Sequence[GraphRecord], fractions: Sequence[float], seed: int
) -> list[list[GraphRecord]]:
    """Seeded shuffle followed by a contiguous partition per ``fractions``.

    Fractions must be non-negative and sum to one; the parts are disjoint and
    cover the input.
    """
    fracs = list(fractions)
    if not fracs or any(f < 0 for f in fracs):
        raise ConfigError(f"fractions must be non-negative, got {fracs}")
    if abs(sum(fracs) - 1.0) > 1e-9:
        raise ConfigError(f"fractions must sum to 1, got {sum(fracs)!r}")
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    parts: list[list[GraphRecord]] = []
    start = 0
    cum = 0.0
    for k, f in enumerate(fracs):
        cum += f
        end = len(shuffled) if k == len(fracs) - 1 else round(len(shuffled) * cum)
        parts.append(shuffled[start:end])
        start = end
    return parts


def save_dataset(records: Sequence[GraphRecord], path: str | Path) -> None:
    """Write records as a versioned text file of edge-list blocks."""
    chunks = [f"{DATASET_FORMAT_TAG} {len(records)}\n"]
    for rec in records:
        for name, value in (("id", rec.id), ("provenance", rec.provenance)):
            if "\n" in value:
                raise ConfigError(f"record {name} must be a single line: {value!r}")
        chunks.append(f"# id {rec.id}\n")
        chunks.append(f"# provenance {rec.provenance}\n")
        chunks.append(to_edge_list_text(rec.graph))
    Path(path).write_text("".join(chunks))


def load_dataset(path: str | Path) -> list[GraphRecord]:
    """Read a dataset written by :func:`save_dataset`; round-trips byte-exactly."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty dataset file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != DATASET_FORMAT_TAG:
        raise FormatError(
            f"{path}: unknown dataset version tag {lines[0]!r} "
            f"(expected {DATASET_FORMAT_TAG!r})"
        )
    try:
        count = int(head[1])
    except ValueError:
        raise FormatError(f"{path}: bad record count in header {lines[0]!r}") from None
    records: list[GraphRecord] = []
    pos = 1
    for _ in range(count):
        if pos + 1 >= len(lines):
            raise FormatError(f"{path}: truncated file, expected {count} records")
        id_line, prov_line = lines[pos], lines[pos + 1]
        if not id_line.startswith("# id ") or not prov_line.startswith("# provenance "):
            raise FormatError(
                f"{path}: malformed record header near line {pos + 1}"
            )
        rec_id = id_line[len("# id "):]
        provenance = prov_line[len("# provenance "):]
        pos += 2
        header = lines[pos].split()
        if len(header) != 2:
            raise FormatError(f"{path}: malformed edge-list header at line {pos + 1}")
        m = int(header[1])
        block = lines[pos : pos + 1 + m]
        graph = from_edge_list_text("\n".join(block) + "\n")
        pos += 1 + m
        records.append(GraphRecord(id=rec_id, graph=graph, provenance=provenance))
    if pos != len(lines):
        raise FormatError(f"{path}: trailing content after {count} records")
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise FormatError(f"{path}: duplicate record ids")
    return records
