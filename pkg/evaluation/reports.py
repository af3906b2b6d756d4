"""
Evaluation reports and the cross-run comparison.

Every file written here depends only on the results and the config, never
on timestamps or paths, so reruns with the same config are byte-identical.
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import mm
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from core.exceptions import DataError, InvalidArgumentError
from core.models import CHANNEL_SET_ORDER, METHOD_ORDER

logger = logging.getLogger(__name__)

METRICS = {
    'accuracy': 'Classification accuracy',
    'ocid_error': 'Operating condition ID error (set identification error, higher is better)',
}
REWEIGHTED = 'reweighted'
FLOAT_FORMAT = '%.6f'

SUMMARY_FILE = 'summary.json'


@dataclass(frozen=True)
class CellResult:
    bearing_id: str
    label: str
    speed_rpm: float
    load_nm: float
    accuracy: float
    ocid_error: float
    k_star: int
    k_max: int
    n_train: int
    n_test: int

    @property
    def condition(self):
        return (self.speed_rpm, self.load_nm)

    @property
    def sort_key(self):
        return (self.bearing_id, self.speed_rpm, self.load_nm)


def bearing_means(cells, metric):
    """Mean of ``metric`` over each bearing's cells."""
    by_bearing = {}
    for cell in cells:
        by_bearing.setdefault(cell.bearing_id, []).append(getattr(cell, metric))
    return {b: float(np.mean(v)) for b, v in sorted(by_bearing.items())}


def aggregate(cells, metric):
    """Bearing-reweighted mean: every bearing counts once, whatever its cell count."""
    if not cells:
        raise InvalidArgumentError("Cannot aggregate an empty set of cells")
    return float(np.mean(list(bearing_means(cells, metric).values())))


def _pct(value):
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return '-'
    return f"{100 * value:.1f}%"


def markdown_table(frame, index_label):
    """Render a DataFrame of fractions as a GitHub markdown table."""
    header = [index_label] + [str(c) for c in frame.columns]
    lines = [
        '| ' + ' | '.join(header) + ' |',
        '|' + '|'.join(['---'] * len(header)) + '|',
    ]
    for index, row in frame.iterrows():
        lines.append('| ' + ' | '.join([str(index)] + [_pct(v) for v in row.tolist()]) + ' |')
    return '\n'.join(lines)


@dataclass
class EvalReport:
    method: str
    channel_set: str
    seed: int
    config_hash: str
    reweighting: str
    cells: list = field(default_factory=list)

    def __post_init__(self):
        self.cells = sorted(self.cells, key=lambda c: c.sort_key)

    @property
    def accuracy(self):
        return aggregate(self.cells, 'accuracy')

    @property
    def ocid_error(self):
        return aggregate(self.cells, 'ocid_error')

    def _row_label(self, cell, single_load):
        if single_load:
            return f"{cell.speed_rpm:g}"
        return f"{cell.speed_rpm:g}@{cell.load_nm:g}"

    def metric_table(self, metric):
        """
        Conditions down, bearings across, with a reweighted row and column.

        The bottom-right entry is the bearing-reweighted aggregate.
        """
        single_load = len({c.load_nm for c in self.cells}) == 1
        conditions = sorted({c.condition for c in self.cells})
        bearings = sorted({c.bearing_id for c in self.cells})

        rows = {}
        for speed, load in conditions:
            at = [c for c in self.cells if c.condition == (speed, load)]
            label = self._row_label(at[0], single_load)
            values = {c.bearing_id: getattr(c, metric) for c in at}
            row = [values.get(b, np.nan) for b in bearings]
            row.append(float(np.mean(list(values.values()))))
            rows[label] = row

        means = bearing_means(self.cells, metric)
        rows[REWEIGHTED] = [means[b] for b in bearings] + [aggregate(self.cells, metric)]
        return pd.DataFrame.from_dict(rows, orient='index', columns=bearings + [REWEIGHTED])

    def summary(self):
        return {
            'method': self.method,
            'channel_set': self.channel_set,
            'seed': self.seed,
            'config_hash': self.config_hash,
            'reweighting': self.reweighting,
            'n_cells': len(self.cells),
            'accuracy': self.accuracy,
            'ocid_error': self.ocid_error,
        }

    def log_lines(self):
        base = {'method': self.method, 'channel_set': self.channel_set,
                'seed': self.seed, 'config_hash': self.config_hash}
        for cell in self.cells:
            yield {'event': 'cell', **base, **asdict(cell)}
        yield {'event': 'aggregate', **base,
               'accuracy': self.accuracy, 'ocid_error': self.ocid_error}

    def to_markdown(self):
        index_label = 'RPM' if len({c.load_nm for c in self.cells}) == 1 else 'RPM@Nm'
        k_stars = ', '.join(
            f"{c.bearing_id} {c.speed_rpm:g}/{c.load_nm:g}: {c.k_star}" for c in self.cells
        )
        parts = [
            f"# {self.method} ({self.channel_set})",
            '',
            f"- Config hash: `{self.config_hash}`",
            f"- Method: {self.method}",
            f"- Channel set: {self.channel_set}",
            f"- Seed: {self.seed}",
            f"- k* reweighting: {self.reweighting}",
            f"- Classification accuracy: {_pct(self.accuracy)}",
            f"- Operating condition ID error: {_pct(self.ocid_error)}",
        ]
        for metric, title in METRICS.items():
            parts += ['', f"## {title}", '', markdown_table(self.metric_table(metric), index_label)]
        parts += ['', '## k* per cell', '', k_stars, '']
        return '\n'.join(parts)

    def write(self, run_dir):
        run_dir = Path(run_dir)
        try:
            run_dir.mkdir(parents=True, exist_ok=True)
            for metric in METRICS:
                self.metric_table(metric).to_csv(
                    run_dir / f"{metric}.csv", float_format=FLOAT_FORMAT, index_label='condition'
                )
            (run_dir / 'report.md').write_text(self.to_markdown(), encoding='utf-8')
            with open(run_dir / 'run_log.jsonl', 'w', encoding='utf-8') as f:
                for line in self.log_lines():
                    f.write(json.dumps(line, sort_keys=True) + '\n')
            (run_dir / SUMMARY_FILE).write_text(
                json.dumps(self.summary(), sort_keys=True, indent=2) + '\n', encoding='utf-8'
            )
        except OSError as e:
            raise DataError(f"Could not write report to {run_dir}: {e}") from e
        logger.info(f"Wrote {self.method} {self.channel_set} report to {run_dir}")
        return run_dir


def load_summary(run_dir):
    path = Path(run_dir) / SUMMARY_FILE
    try:
        summary = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError:
        raise DataError(f"Run {run_dir} has no {SUMMARY_FILE}; did eval finish?")
    except (OSError, ValueError) as e:
        raise DataError(f"Could not read {path}: {e}") from e

    missing = [k for k in ('method', 'channel_set', 'seed', *METRICS) if k not in summary]
    if missing:
        raise DataError(f"{path} is missing {', '.join(missing)}")
    return summary


class Comparison:
    """Methods down, channel sets across, one table per metric."""

    def __init__(self, summaries):
        if not summaries:
            raise InvalidArgumentError("Nothing to compare")
        self.runs = {}
        for s in summaries:
            key = (s['method'], s['channel_set'])
            if key in self.runs:
                logger.warning(f"Several runs for {key[0]} {key[1]}; keeping the last")
            self.runs[key] = s

    @property
    def seeds(self):
        return sorted({s['seed'] for s in self.runs.values()})

    @property
    def mixed_seeds(self):
        return len(self.seeds) > 1

    def table(self, metric):
        methods = [m for m in METHOD_ORDER if any(k[0] == m for k in self.runs)]
        channel_sets = [c for c in CHANNEL_SET_ORDER if any(k[1] == c for k in self.runs)]
        data = {
            m.value: [self.runs.get((m.value, c.value), {}).get(metric, np.nan) for c in channel_sets]
            for m in methods
        }
        return pd.DataFrame.from_dict(data, orient='index', columns=[c.value for c in channel_sets])

    def banner(self):
        if self.mixed_seeds:
            return f"WARNING: runs use different seeds ({', '.join(str(s) for s in self.seeds)})"
        return ''

    def to_markdown(self):
        parts = ['# Method comparison', '']
        if self.mixed_seeds:
            parts += [f"> **{self.banner()}**", '']
        else:
            parts += [f"Seed: {self.seeds[0]}", '']
        for metric, title in METRICS.items():
            parts += [f"## {title}", '', markdown_table(self.table(metric), 'Method'), '']
        return '\n'.join(parts)

    def write(self, out_dir, pdf=False):
        out_dir = Path(out_dir)
        written = []
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            for metric in METRICS:
                path = out_dir / f"comparison_{metric}.csv"
                self.table(metric).to_csv(path, float_format=FLOAT_FORMAT, index_label='method')
                written.append(path)
            path = out_dir / 'comparison.md'
            path.write_text(self.to_markdown(), encoding='utf-8')
            written.append(path)
        except OSError as e:
            raise DataError(f"Could not write comparison to {out_dir}: {e}") from e
        if pdf:
            written.append(self.write_pdf(out_dir / 'comparison.pdf'))
        return written

    def write_pdf(self, path):
        doc = SimpleDocTemplate(str(path), pagesize=A4, topMargin=20*mm, bottomMargin=20*mm)
        styles = getSampleStyleSheet()
        warning_style = ParagraphStyle(
            'Warning',
            parent=styles['Normal'],
            textColor=colors.red,
            spaceAfter=5*mm,
        )

        elements = [Paragraph('Method comparison', styles['Heading1'])]
        if self.mixed_seeds:
            elements.append(Paragraph(self.banner(), warning_style))
        else:
            elements.append(Paragraph(f"Seed: {self.seeds[0]}", styles['Normal']))
        elements.append(Spacer(1, 5*mm))

        for metric, title in METRICS.items():
            frame = self.table(metric)
            table_data = [['Method'] + list(frame.columns)]
            for method, row in frame.iterrows():
                table_data.append([method] + [_pct(v) for v in row.tolist()])

            table = Table(table_data, colWidths=[30*mm] + [30*mm] * len(frame.columns))
            table.setStyle(TableStyle([
                ('BACKGROUND', (0, 0), (-1, 0), colors.Color(0.25, 0.22, 0.19)),
                ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
                ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
                ('ALIGN', (1, 0), (-1, -1), 'CENTER'),
                ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
                ('BOTTOMPADDING', (0, 0), (-1, 0), 6),
            ]))
            elements.append(Paragraph(title, styles['Heading3']))
            elements.append(table)
            elements.append(Spacer(1, 8*mm))

        try:
            doc.build(elements)
        except OSError as e:
            raise DataError(f"Could not write {path}: {e}") from e
        return path
