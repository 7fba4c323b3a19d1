"""Shared builders for the test suite."""

import numpy as np

from gapdecomp import GroupSample, MicrodataTable, encode_design


def make_table(outcome, group=None, **columns):
    """Table from keyword label columns, outcome named 'y'."""
    return MicrodataTable.from_columns("y", outcome, columns, group_name=group)


def first_bases(table):
    return {v.name: v.categories[0] for v in table.variables}


def make_design(table, base=None):
    return encode_design(table, base if base is not None else first_bases(table))


def make_group(label, outcome, base=None, **columns):
    table = make_table(outcome, **columns)
    return GroupSample(label, make_design(table, base), table.outcome)


def random_table(rng, n, spec):
    """Random table; spec = {name: (n_categories, probs or None)}."""
    columns = {}
    for name, (k, probs) in spec.items():
        cats = [f"{name}{i}" for i in range(k)]
        columns[name] = list(np.asarray(cats, dtype=object)[rng.choice(k, size=n, p=probs)])
    outcome = rng.integers(0, 2, size=n)
    return make_table(outcome, **columns)
