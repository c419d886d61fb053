#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The nbtrace Authors
"""Reviews the corpus annotations by executing the notebooks with pandas.

Each top-level statement runs on small synthetic datasets while the pandas
entry points behind every label are instrumented. An annotated statement
passes when a matching call was observed and some frame binding changed.
Unannotated statements that change a frame through a labeled method are
listed for review; the static analysis only records operations on frames it
can track, so those are expected exactly where the source says so.

Needs pandas, numpy, pyarrow and scikit-learn. Exit status 1 on any failure.
"""

import ast
import contextlib
import functools
import io
import json
import os
import re
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np
import pandas as pd

HERE = Path(__file__).resolve().parent
MARK = re.compile(r"#\s*(op|runtime):\s*([a-z_]+)\s*$")

LABEL_CALLS = {
    "as_type": {"astype"},
    "datetime": {"to_datetime"},
    "apply": {"apply", "applymap"},
    "map": {"map"},
    "fillna": {"fillna"},
    "read": {"read_csv", "read_json", "read_parquet", "DataFrame"},
    "drop": {"drop"},
    "rename": {"rename"},
    "merge": {"merge", "join"},
}


def write_datasets(root):
    rng = np.random.default_rng(7)
    n = 30
    titles = ["Mr", "Mrs", "Miss", "Master", "Dr"]
    titanic = pd.DataFrame({
        "PassengerId": range(1, n + 1),
        "Survived": rng.integers(0, 2, n),
        "Pclass": rng.integers(1, 4, n),
        "Name": [f"Last{i}, {titles[i % 5]}. First{i}" for i in range(n)],
        "Sex": rng.choice(["male", "female"], n),
        "Age": np.where(rng.random(n) < 0.2, np.nan, rng.integers(1, 80, n)),
        "SibSp": rng.integers(0, 3, n),
        "Parch": rng.integers(0, 3, n),
        "Ticket": [f"T{i}" for i in range(n)],
        "Fare": rng.uniform(5, 200, n).round(2),
        "Cabin": np.where(rng.random(n) < 0.6, None, [f"C{i}" for i in range(n)]),
        "Embarked": np.where(rng.random(n) < 0.1, None, rng.choice(["S", "C", "Q"], n)),
    })
    titanic.to_csv(root / "train.csv", index=False)
    test = titanic.drop(columns=["Survived"])
    test.loc[3, "Fare"] = np.nan
    test.to_csv(root / "test.csv", index=False)

    pd.DataFrame({
        "id": range(n),
        "price": rng.integers(100_000, 900_000, n),
        "sqft": rng.integers(500, 4000, n),
        "bedrooms": np.where(rng.random(n) < 0.2, np.nan, rng.integers(1, 6, n)),
        "date": [f"2014-{1 + i % 12:02d}-{1 + i % 28:02d}" for i in range(n)],
        "zipcode": rng.integers(98000, 98200, n).astype(float),
        "condition": rng.integers(1, 6, n),
    }).to_csv(root / "housing.csv", index=False)

    pd.DataFrame({
        "order_id": range(n),
        "customer_id": rng.integers(1, 8, n),
        "amount": rng.uniform(10, 500, n).round(2),
        "order_date": [f"2023-{1 + i % 12:02d}-15" for i in range(n)],
        "region": rng.choice(["north", "south", "east"], n),
        "status": rng.choice(["shipped", "pending", "cancelled", "returned"], n),
    }).to_csv(root / "sales.csv", index=False)

    pd.DataFrame({
        "customer_id": range(1, 7),
        "name": [" Ann ", "Bo", " Cy", "Di ", "Ed", "Flo"],
        "segment": ["Retail", None, "B2B", "Retail", None, "B2B"],
        "signup": ["2020-01-01", "2020-05-05", "2021-02-02", "2021-07-07", "2022-03-03", "2022-09-09"],
    }).to_csv(root / "customers.csv", index=False)

    pd.DataFrame({
        "day": [f"2022-03-{1 + i:02d}" for i in range(20)],
        "temp": rng.uniform(-5, 30, 20).round(1),
        "humidity": np.where(rng.random(20) < 0.2, np.nan, rng.uniform(20, 90, 20).round(1)),
        "city": rng.choice(["Oslo", "Lima"], 20),
    }).to_json(root / "weather.json", orient="records")

    genres = ["Drama|Comedy", "Action", "Horror|Thriller", "Comedy"]
    pd.DataFrame({
        "title": [f"Movie {i}" for i in range(n)],
        "genres": [genres[i % 4] for i in range(n)],
        "rating": np.where(rng.random(n) < 0.2, np.nan, rng.uniform(1, 10, n).round(1)),
        "votes": np.where(rng.random(n) < 0.2, np.nan, rng.integers(10, 10_000, n)),
        "year": rng.integers(1960, 2023, n),
        "duration": rng.integers(80, 180, n),
    }).to_csv(root / "movies.csv", index=False)

    pd.DataFrame({
        "id": range(n),
        "neighbourhood": rng.choice(["A", "B", "C"], n),
        "room_type": rng.choice(["Entire home/apt", "Private room", "Shared room"], n),
        "price": np.where(rng.random(n) < 0.1, 0, rng.integers(20, 400, n)),
        "minimum_nights": rng.integers(1, 10, n),
        "last_review": np.where(rng.random(n) < 0.2, None, "2019-05-21"),
        "reviews_per_month": np.where(rng.random(n) < 0.2, np.nan, rng.uniform(0, 5, n).round(2)),
    }).to_csv(root / "airbnb.csv", index=False)

    pd.DataFrame({
        "Pregnancies": rng.integers(0, 10, n),
        "Glucose": np.where(rng.random(n) < 0.2, 0, rng.integers(60, 200, n)),
        "BloodPressure": np.where(rng.random(n) < 0.2, 0, rng.integers(40, 120, n)),
        "BMI": np.where(rng.random(n) < 0.2, 0, rng.uniform(18, 45, n).round(1)),
        "Age": rng.integers(21, 80, n),
        "Outcome": rng.integers(0, 2, n),
    }).to_csv(root / "diabetes.csv", index=False)

    pd.DataFrame({
        "gender": rng.choice(["M", "F"], n),
        "score": rng.integers(0, 100, n),
        "hours": np.where(rng.random(n) < 0.2, np.nan, rng.uniform(0, 20, n).round(1)),
        "grade": rng.choice(["A", "B", "C"], n),
    }).to_parquet(root / "students.parquet")


class CallLog:
    def __init__(self):
        self.depth = 0
        self.calls = []

    def wrap(self, name, fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            if self.depth == 0:
                self.calls.append(name)
            self.depth += 1
            try:
                return fn(*args, **kwargs)
            finally:
                self.depth -= 1
        return inner


def instrument(log):
    for cls in (pd.DataFrame, pd.Series):
        for name in ("astype", "apply", "applymap", "map", "fillna", "drop", "rename", "merge", "join"):
            if hasattr(cls, name):
                setattr(cls, name, log.wrap(name, getattr(cls, name)))
    for name in ("read_csv", "read_json", "read_parquet", "to_datetime", "merge"):
        setattr(pd, name, log.wrap(name, getattr(pd, name)))


def snapshot(ns):
    return {k: (id(v), v.copy(deep=True)) for k, v in ns.items() if isinstance(v, (pd.DataFrame, pd.Series))}


def frames_changed(before, ns):
    for k, v in ns.items():
        if not isinstance(v, (pd.DataFrame, pd.Series)):
            continue
        if k not in before:
            return True
        ident, copy = before[k]
        if ident != id(v) or type(copy) is not type(v):
            return True
        if isinstance(v, pd.DataFrame) and list(copy.columns) != list(v.columns):
            return True
        if copy.shape != v.shape:
            return True
        if isinstance(v, pd.DataFrame) and not copy.dtypes.equals(v.dtypes):
            return True
        if isinstance(v, pd.Series) and copy.dtype != v.dtype:
            return True
        if not copy.equals(v):
            return True
    return False


def constructs_frame(stmt):
    value = getattr(stmt, "value", None)
    return isinstance(value, ast.Call) and ast.unparse(value.func).endswith("DataFrame")


def review(path, log):
    nb = json.loads(path.read_text())
    ns = {"__name__": "__main__"}
    failures, notes, checked = [], [], 0
    for idx, c in enumerate(nb["cells"]):
        if c["cell_type"] != "code":
            continue
        src = "".join(c["source"])
        marks = {}
        for lineno, line in enumerate(src.split("\n"), start=1):
            m = MARK.search(line)
            if m:
                marks[lineno] = (m.group(1), m.group(2))
        for stmt in ast.parse(src).body:
            expected = [marks[l] for l in range(stmt.lineno, stmt.end_lineno + 1) if l in marks]
            before = snapshot(ns)
            log.calls.clear()
            with contextlib.redirect_stdout(io.StringIO()):
                exec(compile(ast.Module([stmt], []), str(path), "exec"), ns)
            changed = frames_changed(before, ns)
            seen = set(log.calls)
            if constructs_frame(stmt):
                seen.add("DataFrame")
            text = ast.unparse(stmt).split("\n")[0]
            for kind, label in expected:
                checked += 1
                ok = bool(LABEL_CALLS[label] & seen) and changed
                if not ok:
                    failures.append(f"{path.name} cell {idx}: {kind} {label} not confirmed by `{text}` "
                                    f"(calls {sorted(seen)}, frames changed: {changed})")
            if not expected and changed:
                hit = [l for l, names in LABEL_CALLS.items() if names & seen]
                if hit:
                    notes.append(f"{path.name} cell {idx}: `{text}` changed a frame via {sorted(seen)}")
    return checked, failures, notes


def main():
    warnings.simplefilter("ignore")
    log = CallLog()
    instrument(log)
    corpus = sorted((HERE / "corpus").glob("*.ipynb"))
    total, failures, notes = 0, [], []
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        write_datasets(root)
        cwd = os.getcwd()
        os.chdir(root)
        try:
            for nb in corpus:
                checked, f, n = review(nb, log)
                total += checked
                failures += f
                notes += n
        finally:
            os.chdir(cwd)
    for n in notes:
        print("review:", n)
    for f in failures:
        print("FAIL:", f)
    print(f"{len(corpus)} notebooks, {total} annotated statements confirmed: {total - len(failures)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
