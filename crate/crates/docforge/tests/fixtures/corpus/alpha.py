"""Table loading helpers used by the fixture corpus."""

import csv


def load_table(path, sep=','):
    """Load a table from disk.

    See https://tables.example.org/docs for the format.

    :param path: The input path. Must exist.
    :type path: str
    :param sep: Field separator. If None, sniff from the file.
    :type sep: str
    :returns: Parsed rows.

    >>> load_table("missing.csv")
    []
    """
    with open(path, newline='') as fh:
        return list(csv.reader(fh, delimiter=sep or ','))


def scale(values, factor=2.0):
    """Scale every value by a constant factor.

    Args:
        values (list): Numbers to scale.
        factor (float): Multiplier applied to each value. See
            https://scales.example.org for background.

    Returns:
        list: The scaled values.
    """
    return [v * factor for v in values]


def helper_print(msg):
    """Print a message to stdout."""
    print(msg)
