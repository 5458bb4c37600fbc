"""Large-scale channel-knowledge tables and their CSV wire format.

Three tables describe a scene's average link strengths, keyed by grid
id ``n`` (1-based), candidate-site id ``i`` (1-based), height index
``j`` and orientation index ``k`` (both 1-based into the site's sorted
sets):

* ``direct``:        n -> (average base-station-to-grid power in mW,
                      path count).  Every grid has an entry; grids with
                      no surviving path carry the configured floor power
                      with a path count of 0.
* ``irs_incident``:  (i, j, k) -> (average power received at the panel
                      in mW, path count).  Absent means no usable path.
* ``irs_departing``: (i, j, k, n) -> (average panel-to-grid gain,
                      dimensionless, path count).  Absent means zero.

Missing entries always mean zero contributed gain.  Powers are stored
in files as dBm (or dB for the dimensionless gain) with 12 decimal
digits so a save/load round trip is lossless to within 1e-12 relative.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from .errors import KnowledgeFormatError, ValidationError
from .units import dbm_to_mw, mw_to_dbm, db_to_linear, linear_to_db

DIRECT_TABLE = "direct.csv"
INCIDENT_TABLE = "bs_irs.csv"
DEPARTING_TABLE = "irs_grid.csv"
TABLE_FILES = (DIRECT_TABLE, INCIDENT_TABLE, DEPARTING_TABLE)

_DIRECT_HEADER = ["grid_id", "beta_dbm", "L"]
_INCIDENT_HEADER = ["site_id", "height_idx", "orient_idx", "sigma_sq_dbm", "L0i"]
_DEPARTING_HEADER = ["site_id", "height_idx", "orient_idx", "grid_id", "omega_sq_db", "Lin"]

_FMT = "%.12f"


@dataclass(eq=False)
class ChannelKnowledge:
    """Container for the three link tables (values in linear units)."""

    direct: dict[int, tuple[float, int]] = field(default_factory=dict)
    irs_incident: dict[tuple[int, int, int], tuple[float, int]] = field(default_factory=dict)
    irs_departing: dict[tuple[int, int, int, int], tuple[float, int]] = field(default_factory=dict)

    @property
    def n_grids(self) -> int:
        return len(self.direct)


def validate_knowledge(knowledge: ChannelKnowledge) -> None:
    """Raise ValidationError on a table that breaks its invariants."""
    ids = sorted(knowledge.direct)
    if ids != list(range(1, len(ids) + 1)):
        raise ValidationError("direct table must cover grid ids 1..N contiguously")
    for n, (power, count) in knowledge.direct.items():
        if power < 0.0:
            raise ValidationError("negative direct power at grid %d" % n)
        if count < 0:
            raise ValidationError("negative path count at grid %d" % n)
    for key, (power, count) in knowledge.irs_incident.items():
        if power < 0.0:
            raise ValidationError("negative incident power at %r" % (key,))
        if power > 0.0 and count < 1:
            raise ValidationError("positive incident power with no paths at %r" % (key,))
    for key, (gain, count) in knowledge.irs_departing.items():
        if gain < 0.0:
            raise ValidationError("negative departing gain at %r" % (key,))
        if gain > 0.0 and count < 1:
            raise ValidationError("positive departing gain with no paths at %r" % (key,))


def save_knowledge(knowledge: ChannelKnowledge, directory: str | Path) -> None:
    """Write the three CSV tables (deterministic ordering and format)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_DIRECT_HEADER)
    for n in sorted(knowledge.direct):
        power, count = knowledge.direct[n]
        w.writerow([n, _FMT % mw_to_dbm(power), count])
    (directory / DIRECT_TABLE).write_text(buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_INCIDENT_HEADER)
    for key in sorted(knowledge.irs_incident):
        power, count = knowledge.irs_incident[key]
        w.writerow(list(key) + [_FMT % mw_to_dbm(power), count])
    (directory / INCIDENT_TABLE).write_text(buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_DEPARTING_HEADER)
    for key in sorted(knowledge.irs_departing):
        gain, count = knowledge.irs_departing[key]
        w.writerow(list(key) + [_FMT % linear_to_db(gain), count])
    (directory / DEPARTING_TABLE).write_text(buf.getvalue())


def _read_rows(path: Path, header: list[str]):
    if not path.is_file():
        raise KnowledgeFormatError("knowledge table not found: %s" % path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise KnowledgeFormatError("%s: empty file" % path.name) from None
        if first != header:
            raise KnowledgeFormatError(
                "%s: expected header %s, found %s" % (path.name, header, first))
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise KnowledgeFormatError(
                    "%s line %d: expected %d columns, found %d"
                    % (path.name, lineno, len(header), len(row)))
            yield lineno, row


def _parse_int(path_name: str, lineno: int, text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise KnowledgeFormatError(
            "%s line %d: non-integer %s %r" % (path_name, lineno, what, text)) from None


def _parse_float(path_name: str, lineno: int, text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise KnowledgeFormatError(
            "%s line %d: non-numeric %s %r" % (path_name, lineno, what, text)) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise KnowledgeFormatError(
            "%s line %d: non-finite %s" % (path_name, lineno, what))
    return value


def load_knowledge(directory: str | Path) -> ChannelKnowledge:
    """Load and validate the three CSV tables from ``directory``.

    Direct rows with a path count of 0 are floor markers for grids with
    no surviving path; in the panel tables a positive power always
    requires at least one path.
    """
    directory = Path(directory)
    knowledge = ChannelKnowledge()

    path = directory / DIRECT_TABLE
    for lineno, row in _read_rows(path, _DIRECT_HEADER):
        n = _parse_int(path.name, lineno, row[0], "grid id")
        dbm = _parse_float(path.name, lineno, row[1], "power")
        count = _parse_int(path.name, lineno, row[2], "path count")
        if count < 0:
            raise KnowledgeFormatError("%s line %d: negative path count" % (path.name, lineno))
        if n in knowledge.direct:
            raise KnowledgeFormatError("%s line %d: duplicate grid id %d" % (path.name, lineno, n))
        knowledge.direct[n] = (dbm_to_mw(dbm), count)

    path = directory / INCIDENT_TABLE
    for lineno, row in _read_rows(path, _INCIDENT_HEADER):
        key = tuple(_parse_int(path.name, lineno, row[c], "index") for c in range(3))
        dbm = _parse_float(path.name, lineno, row[3], "power")
        count = _parse_int(path.name, lineno, row[4], "path count")
        power = dbm_to_mw(dbm)
        if power > 0.0 and count < 1:
            raise KnowledgeFormatError(
                "%s line %d: positive power with path count %d" % (path.name, lineno, count))
        if key in knowledge.irs_incident:
            raise KnowledgeFormatError("%s line %d: duplicate key %r" % (path.name, lineno, key))
        knowledge.irs_incident[key] = (power, count)

    path = directory / DEPARTING_TABLE
    for lineno, row in _read_rows(path, _DEPARTING_HEADER):
        key = tuple(_parse_int(path.name, lineno, row[c], "index") for c in range(4))
        db = _parse_float(path.name, lineno, row[4], "gain")
        count = _parse_int(path.name, lineno, row[5], "path count")
        gain = db_to_linear(db)
        if gain > 0.0 and count < 1:
            raise KnowledgeFormatError(
                "%s line %d: positive gain with path count %d" % (path.name, lineno, count))
        if key in knowledge.irs_departing:
            raise KnowledgeFormatError("%s line %d: duplicate key %r" % (path.name, lineno, key))
        knowledge.irs_departing[key] = (gain, count)

    validate_knowledge(knowledge)
    return knowledge
