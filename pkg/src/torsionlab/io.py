"""CSV/SVG artifact helpers.

CSV files start with ``#``-prefixed metadata lines carrying the tool version
and a hash of the configuration that produced them, followed by a header row.
SVG output is static and written by hand so it is byte-for-byte reproducible.
"""

import csv
import hashlib

import numpy as np

from . import __version__


def config_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def provenance(config_text="", extra=()):
    lines = [f"torsionlab {__version__}", f"config_sha256 {config_hash(config_text)}"]
    return lines + list(extra)


def fmt(value):
    """Stable text form of a number (shortest round-trip repr for floats)."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    try:
        return repr(float(value))
    except (TypeError, ValueError):
        return str(value)


def write_csv(path, header, rows, metadata=()):
    with open(path, "w", newline="") as fh:
        for line in metadata:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path):
    """Return ``(metadata lines, header, rows as lists of strings)``."""
    meta, body = [], []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                meta.append(line[1:].strip())
            else:
                body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0] if rows else [], rows[1:]


class SvgCanvas:
    """Tiny SVG builder mapping a data box onto a square canvas."""

    def __init__(self, xmin, xmax, ymin, ymax, size=480, margin=20):
        span = max(xmax - xmin, ymax - ymin, 1e-12)
        self.x0, self.y0 = xmin, ymin
        self.scale = (size - 2 * margin) / span
        self.size = size
        self.margin = margin
        self.items = []

    def _xy(self, x, y):
        px = self.margin + (x - self.x0) * self.scale
        py = self.size - self.margin - (y - self.y0) * self.scale
        return f"{px:.3f},{py:.3f}"

    def polygon(self, pts, stroke="black", fill="none", width=1.5):
        coords = " ".join(self._xy(x, y) for x, y in pts)
        tag = "polygon" if len(pts) > 2 else "polyline"
        self.items.append(f'<{tag} points="{coords}" stroke="{stroke}" fill="{fill}" '
                          f'stroke-width="{width}"/>')

    def polyline(self, pts, stroke="black", width=1.0):
        coords = " ".join(self._xy(x, y) for x, y in pts)
        self.items.append(f'<polyline points="{coords}" stroke="{stroke}" fill="none" '
                          f'stroke-width="{width}"/>')

    def points(self, pts, color="steelblue", radius=1.0):
        for x, y in pts:
            cx, cy = self._xy(x, y).split(",")
            self.items.append(f'<circle cx="{cx}" cy="{cy}" r="{radius}" fill="{color}"/>')

    def text(self, x, y, label, size=10):
        px, py = self._xy(x, y).split(",")
        self.items.append(f'<text x="{px}" y="{py}" font-size="{size}">{label}</text>')

    def render(self, comments=()):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" '
                f'height="{self.size}" viewBox="0 0 {self.size} {self.size}">')
        notes = [f"<!-- {c} -->" for c in comments]
        return "\n".join(notes + [head] + self.items + ["</svg>", ""])

    def save(self, path, comments=()):
        with open(path, "w") as fh:
            fh.write(self.render(comments))
