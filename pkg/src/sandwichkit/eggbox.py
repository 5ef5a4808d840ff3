"""Egg-box layout of a D-class and its text / DOT renderings.

Rows are R-classes, columns L-classes, cells H-classes; rows and columns are
ordered by their minimal member.  Group cells are marked with ``#`` in text
and shaded in DOT.  Optional row/column blocks (used for the hat relations of
a sandwich semigroup) are drawn as bold separators.
"""

from dataclasses import dataclass, field
from html import escape


@dataclass
class EggBox:
    rows: list
    cols: list
    cells: list          # cells[r][c] -> tuple of members
    groups: list         # groups[r][c] -> bool
    row_blocks: list = field(default_factory=list)   # block id per row
    col_blocks: list = field(default_factory=list)

    @classmethod
    def from_green(cls, green, x, members=None):
        d = set(green.cls("D", x))
        if members is not None:
            d &= set(members)
        rows = green.classes_within("R", d)
        cols = green.classes_within("L", d)
        cells, groups = [], []
        for r in rows:
            rs = set(r)
            crow, grow = [], []
            for c in cols:
                cell = tuple(sorted(rs & set(c)))
                crow.append(cell)
                grow.append(bool(cell) and green.is_group_h(cell[0]))
            cells.append(crow)
            groups.append(grow)
        return cls(rows, cols, cells, groups, [0] * len(rows), [0] * len(cols))

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def cell_size(self):
        sizes = {len(c) for row in self.cells for c in row}
        return sizes.pop() if len(sizes) == 1 else None

    def with_blocks(self, row_key, col_key):
        """Attach block ids computed from a representative of each row/col."""
        self.row_blocks = [row_key(r[0]) for r in self.rows]
        self.col_blocks = [col_key(c[0]) for c in self.cols]
        order_r = sorted(range(len(self.rows)), key=lambda k: (self.row_blocks[k], self.rows[k][0]))
        order_c = sorted(range(len(self.cols)), key=lambda k: (self.col_blocks[k], self.cols[k][0]))
        self.rows = [self.rows[k] for k in order_r]
        self.row_blocks = [self.row_blocks[k] for k in order_r]
        self.cols = [self.cols[k] for k in order_c]
        self.col_blocks = [self.col_blocks[k] for k in order_c]
        self.cells = [[self.cells[r][c] for c in order_c] for r in order_r]
        self.groups = [[self.groups[r][c] for c in order_c] for r in order_r]
        return self


def render_text(box, label=str):
    texts = [["{" + ",".join(label(m) for m in cell) + "}" + ("#" if g else "")
              for cell, g in zip(row, grow)] for row, grow in zip(box.cells, box.groups)]
    width = max((len(t) for row in texts for t in row), default=1)
    lines = []
    for r, row in enumerate(texts):
        if r and box.row_blocks and box.row_blocks[r] != box.row_blocks[r - 1]:
            lines.append("=" * len(lines[-1]))
        parts = []
        for c, t in enumerate(row):
            sep = " || " if c and box.col_blocks and box.col_blocks[c] != box.col_blocks[c - 1] else " | "
            parts.append((sep if c else "") + t.ljust(width))
        lines.append("".join(parts))
    return "\n".join(lines)


def _dot_table(box, label):
    out = ['<TABLE BORDER="0" CELLBORDER="1" CELLSPACING="0">']
    for r, row in enumerate(box.cells):
        out.append("<TR>")
        for c, cell in enumerate(row):
            attrs = []
            if box.groups[r][c]:
                attrs.append('BGCOLOR="gray80"')
            sides = ""
            if r + 1 < len(box.cells) and box.row_blocks and box.row_blocks[r] != box.row_blocks[r + 1]:
                sides += "B"
            if c + 1 < len(row) and box.col_blocks and box.col_blocks[c] != box.col_blocks[c + 1]:
                sides += "R"
            if sides:
                attrs.append('STYLE="bold"')
            text = escape(",".join(label(m) for m in cell))
            out.append(f"<TD {' '.join(attrs)}>{text}</TD>")
        out.append("</TR>")
    out.append("</TABLE>")
    return "".join(out)


def render_dot(boxes, label=str, name="eggbox"):
    """One cluster per D-class; ``boxes`` is a list of (title, EggBox)."""
    lines = [f"digraph {name} {{", "  node [shape=plaintext];"]
    for k, (title, box) in enumerate(boxes):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="{escape(str(title))}";')
        lines.append(f"    d{k} [label=<{_dot_table(box, label)}>];")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)
