# Copyright 2025 The lacuna Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Verification report generation and CSV formatting.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import yaml

from .exceptions import ParseError
from .models import ExplorationTrace, SweepRecord, VerificationRecord

SWEEP_COLUMNS = ["n", "d", "u", "seed", "c_max", "c_sec", "vacant_count", "good_event", "wall_ms"]
TRACE_COLUMNS = [
    "start",
    "k",
    "vertex",
    "state",
    "q_k",
    "r_k",
    "free_count",
    "tied_count",
    "explored_vacant",
    "explored_occupied",
    "proper",
]
TREE_COLUMNS = ["u", "p_u", "m_u", "v_u", "q_ext", "survival_r"]


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays into JSON/YAML friendly values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


class VerificationReporter:
    """Generates verification reports in various formats."""

    def generate_report(
        self,
        records: Sequence[VerificationRecord],
        format: str = "text",  # pylint: disable=redefined-builtin
        title: str = "Verification Report",
        data: Optional[Mapping[str, Any]] = None,
    ) -> str:
        """Generate a report of `records` plus free-form `data` in the given format."""
        if format == "json":
            return json.dumps(self.generate_json_report(records, data), indent=2)
        if format == "yaml":
            return self.generate_yaml_report(records, data)
        return self._generate_text_report(records, title, data)

    @staticmethod
    def status(records: Iterable[VerificationRecord]) -> str:
        """Overall status: fail if any asserted record failed."""
        return "fail" if any(r.passed is False for r in records) else "pass"

    def _generate_text_report(
        self,
        records: Sequence[VerificationRecord],
        title: str,
        data: Optional[Mapping[str, Any]],
    ) -> str:
        lines = [title, "=" * len(title)]
        status = self.status(records)
        lines.append("Status: ✓ PASS" if status == "pass" else "Status: ✗ FAIL")
        lines.append("")

        if data:
            for key, value in data.items():
                lines.append(f"  {key}: {_plain(value)}")
            lines.append("")

        if records:
            lines.append("Checks:")
            for record in records:
                mark = {True: "✓", False: "✗", None: "·"}[record.passed]
                line = f"  {mark} {record.check}: {record.lhs:.10g} vs {record.rhs:.10g}"
                if record.note:
                    line += f" ({record.note})"
                lines.append(line)
            lines.append("")

        failed = sum(1 for r in records if r.passed is False)
        measured = sum(1 for r in records if r.passed is None)
        if failed:
            lines.append(f"✗ {failed} of {len(records)} checks failed")
        else:
            lines.append(f"✓ {len(records) - measured} checks passed, {measured} measured only")
        return "\n".join(lines)

    def generate_json_report(
        self, records: Sequence[VerificationRecord], data: Optional[Mapping[str, Any]] = None
    ) -> Dict[str, Any]:
        """Generate JSON format report."""
        report: Dict[str, Any] = {
            "status": self.status(records),
            "records": [_plain(r.to_dict()) for r in records],
        }
        if data:
            report.update(_plain(dict(data)))
        return report

    def generate_yaml_report(
        self, records: Sequence[VerificationRecord], data: Optional[Mapping[str, Any]] = None
    ) -> str:
        """Generate YAML format report."""
        return yaml.dump(self.generate_json_report(records, data), default_flow_style=False)


def _csv_text(columns: List[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def _format_bool(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def _parse_bool(text: str) -> Optional[bool]:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    raise ValueError(f"expected true, false or empty, got '{text}'")


def format_sweep_csv(records: Iterable[SweepRecord]) -> str:
    """CSV of sweep records; each record is validated before it is written."""
    rows = []
    for record in records:
        record.validate()
        rows.append(
            [
                record.n,
                record.d,
                repr(float(record.u)),
                record.seed,
                record.c_max,
                record.c_sec,
                record.vacant_count,
                _format_bool(record.good_event),
                f"{record.wall_ms:.3f}",
            ]
        )
    return _csv_text(SWEEP_COLUMNS, rows)


def parse_sweep_csv(text: str, source: str = "<string>") -> List[SweepRecord]:
    """
    Parse and re-validate a sweep CSV.

    Raises:
        ParseError: On a wrong header or malformed row
        ValidationError: If a row violates the record invariants
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != SWEEP_COLUMNS:
        raise ParseError(f"{source}:1: expected header {','.join(SWEEP_COLUMNS)}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(SWEEP_COLUMNS):
            raise ParseError(f"{source}:{lineno}: expected {len(SWEEP_COLUMNS)} fields")
        try:
            record = SweepRecord(
                n=int(row[0]),
                d=int(row[1]),
                u=float(row[2]),
                seed=int(row[3]),
                c_max=int(row[4]),
                c_sec=int(row[5]),
                vacant_count=int(row[6]),
                good_event=_parse_bool(row[7]),
                wall_ms=float(row[8]),
            )
        except ValueError as e:
            raise ParseError(f"{source}:{lineno}: {e}") from e
        record.validate()
        records.append(record)
    return records


def read_sweep_csv(path: Union[str, Path]) -> List[SweepRecord]:
    """Read a sweep CSV file; rows are re-validated."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    return parse_sweep_csv(text, str(path))


def format_trace_csv(traces: Iterable[ExplorationTrace]) -> str:
    """CSV with one row per exploration step."""
    rows = []
    for trace in traces:
        for step in trace.steps:
            rows.append(
                [
                    trace.start,
                    step.k,
                    step.vertex,
                    step.state.value,
                    step.q,
                    step.r,
                    step.free_count,
                    step.tied_count,
                    step.explored_vacant,
                    step.explored_occupied,
                    _format_bool(step.proper_future),
                ]
            )
    return _csv_text(TRACE_COLUMNS, rows)


def format_tree_csv(rows: Iterable[Mapping[str, float]]) -> str:
    """CSV of tree-parameter rows keyed by TREE_COLUMNS."""
    return _csv_text(
        TREE_COLUMNS, ([f"{row[c]:.12g}" for c in TREE_COLUMNS] for row in rows)
    )
