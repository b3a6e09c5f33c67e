from polysound.output.table import Table, write_csv, read_csv
from polysound.output.plot import Plot, render_svg_plot
from polysound.output.manifest import RunManifest, config_hash
