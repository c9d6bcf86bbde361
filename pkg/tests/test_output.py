import math

import numpy as np

from thermoporo_splitting.output import format_csv, format_table, format_value


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.float64(2.0)) == "2"
    assert format_value(math.inf) == "inf"
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(3) == "3"


def test_format_csv_keeps_column_order():
    text = format_csv(["b", "a"], [{"a": 1.5, "b": "x"}, {"a": None, "b": "y"}])
    assert text == "b,a\nx,1.5\ny,\n"


def test_format_table_aligns_columns():
    lines = format_table(["scheme", "e_T"], [{"scheme": "implicit_euler", "e_T": 1.23456789e-3}]).splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("scheme")
    assert lines[2].endswith("0.00123457")
    assert len({len(line) for line in lines}) == 1
