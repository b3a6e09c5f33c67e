import os

import pandas as pd

from polysound.config import CSV_SCHEMAS
from polysound.exceptions import UsageError
from polysound.utils import atomic_path, log


class Table:
    """
    Class for writing and reading the fixed-schema CSV outputs.

    Examples:
    >>> Table("sweep.csv").write(rows, schema="sweep")
    >>> Table("sweep.csv").read()
    """

    def __init__(self, path):
        self.path = path

    def __repr__(self):
        return f"Table({self.path})"

    @staticmethod
    def _schema(schema):
        if isinstance(schema, str):
            if schema not in CSV_SCHEMAS:
                raise UsageError(f"Unknown CSV schema: {schema!r}", key="schema")
            return CSV_SCHEMAS[schema]
        return list(schema)

    @staticmethod
    def _records(rows):
        records = []
        for row in rows:
            if hasattr(row, "to_dict"):
                row = row.to_dict()
            records.append(dict(row))
        return records

    def write(self, rows, schema):
        """
        Write rows atomically: header then one line per row, 17 significant digits, "\\n" line endings, UTF-8.

        Args:
        - rows (list): Dicts or objects with `to_dict`, each holding every schema column.
        - schema (str | list): Name in `CSV_SCHEMAS` or an explicit column list.

        Returns:
        - str: The path written.
        """
        columns = self._schema(schema)
        records = self._records(rows)
        for i, record in enumerate(records):
            missing = [c for c in columns if c not in record]
            if missing:
                raise UsageError(f"Row {i} is missing column(s) {missing}", key="schema")
        df = pd.DataFrame([[r[c] for c in columns] for r in records], columns=columns)
        try:
            with atomic_path(self.path) as tmp_path:
                df.to_csv(
                    tmp_path,
                    index=False,
                    float_format="%.17g",
                    lineterminator="\n",
                    encoding="utf-8",
                )
        except OSError as e:
            raise UsageError(f"Cannot write {self.path}: {e}", key="out") from e
        log(f"Table - Wrote {len(df)} row(s) to {self.path}")
        return self.path

    def read(self):
        """
        Read the CSV back with exact float round-tripping.

        Returns:
        - pd.DataFrame: The table.
        """
        if not os.path.exists(self.path):
            raise UsageError(f"CSV file not found: {self.path}", key="csv")
        try:
            return pd.read_csv(self.path, float_precision="round_trip", encoding="utf-8")
        except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError, ValueError) as e:
            raise UsageError(f"Cannot parse {self.path}: {e}", key="csv") from e


def write_csv(rows, schema, path):
    return Table(path).write(rows, schema)


def read_csv(path):
    return Table(path).read()
