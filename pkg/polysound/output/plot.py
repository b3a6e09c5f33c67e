import numpy as np

from polysound.exceptions import UsageError, DomainError
from polysound.output.table import Table
from polysound.utils import ModuleHandler, atomic_path, force_list, log


LINE_STYLES = {
    "solid": "-",
    "dashed": "--",
    "dotted": ":",
}


def default_style(column):
    """
    Sweep convention: numeric width solid, low-dimensional regime dashed, 3D regime dotted.
    """
    if "lowdim" in column:
        return "dashed"
    elif column.endswith("3d"):
        return "dotted"
    return "solid"


class Plot:
    """
    Class for rendering CSV columns as a standalone, deterministic SVG line plot.

    Examples:
    >>> Plot("sweep.csv").render("n_eq", ["cs_numeric", "cs_lowdim", "cs_3d"], "sweep.svg", log_x=True)
    """

    def __init__(self, csv_path):
        self.csv_path = csv_path
        try:
            self.mpl = ModuleHandler("matplotlib").please_import(who_is_calling="Plot")
            self.Figure = ModuleHandler("matplotlib.figure").please_import(
                "Figure", who_is_calling="Plot"
            )
        except ImportError as e:
            raise UsageError(f"Plotting is unavailable: {e}", key="matplotlib") from e

    def __repr__(self):
        return f"Plot({self.csv_path})"

    def _numeric(self, df, column):
        try:
            return df[column].to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise UsageError(f"Column {column!r} in {self.csv_path} is not numeric", key=column) from e

    def render(self, x_column, y_columns, out_path, styles=None, log_x=False):
        """
        Draw one line per y column against x_column.

        Args:
        - x_column (str): Column for the x-axis.
        - y_columns (str | list): Columns to draw, one series each.
        - out_path (str): SVG destination (written atomically).
        - styles (dict): Column -> "solid" | "dashed" | "dotted". Defaults to `default_style`.
        - log_x (bool): Logarithmic x-axis.

        Returns:
        - str: The path written.
        """
        df = Table(self.csv_path).read()
        y_columns = force_list(y_columns)
        for column in [x_column] + y_columns:
            if column not in df.columns:
                raise UsageError(f"Column {column!r} not found in {self.csv_path}", key=column)
        if len(df) < 2:
            raise DomainError(f"Need at least 2 data rows to draw a line (got {len(df)})")
        styles = styles or {}
        values = {column: self._numeric(df, column) for column in [x_column] + y_columns}

        with self.mpl.rc_context({"svg.hashsalt": "polysound", "svg.fonttype": "none"}):
            fig = self.Figure(figsize=(6.4, 4.8))
            ax = fig.add_subplot(1, 1, 1)
            x = values[x_column]
            for column in y_columns:
                style = styles.get(column, default_style(column))
                if style not in LINE_STYLES:
                    raise UsageError(f"Unknown line style {style!r} for {column!r}", key="styles")
                (line,) = ax.plot(x, values[column], LINE_STYLES[style], label=column)
                line.set_gid(f"series_{column}")
            if log_x:
                if np.any(x <= 0):
                    raise DomainError(f"Log x-axis needs positive {x_column!r} values")
                ax.set_xscale("log")
            ax.set_xlabel(x_column)
            ax.set_ylabel(", ".join(y_columns))
            ax.legend()
            with atomic_path(out_path) as tmp_path:
                fig.savefig(tmp_path, format="svg", metadata={"Date": None})
        log(f"Plot - Wrote {len(y_columns)} series to {out_path}")
        return out_path


def render_svg_plot(csv_path, x_column, y_columns, styles=None, out_path="plot.svg", log_x=False):
    return Plot(csv_path).render(x_column, y_columns, out_path, styles=styles, log_x=log_x)
