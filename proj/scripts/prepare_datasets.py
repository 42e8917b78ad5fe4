#!/usr/bin/env python3
# Copyright 2026 The lttr Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Rebuild the CSV files under data/ from PyPI packages that bundle them.

Only the package index is needed; no dataset host is contacted. Each source
wheel is downloaded with `pip download --no-deps` into a scratch directory and
read in place.
"""
import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

SOURCES = {
    "palmerpenguins": "palmerpenguins==0.1.6",
    "common_datasets": "common_datasets==0.3.10",
    "orange3": "Orange3==3.39.0",
}


def fetch(spec, workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", str(workdir), spec],
        check=True,
    )
    name = spec.split("==")[0].lower().replace("-", "_")
    for wheel in workdir.glob("*.whl"):
        if wheel.name.lower().startswith(name):
            return zipfile.ZipFile(wheel)
    raise RuntimeError(f"no wheel for {spec}")


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def sklearn_table(loader, target_names):
    bunch = loader()
    header = [n.replace(" ", "_").replace("(cm)", "").strip("_") for n in bunch.feature_names]
    rows = []
    for x, y in zip(bunch.data, bunch.target):
        rows.append([repr(float(v)) if not float(v).is_integer() else str(int(v)) for v in x] + [target_names[y]])
    return header, rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    from sklearn.datasets import load_iris, load_wine

    h, r = sklearn_table(load_iris, ["setosa", "versicolor", "virginica"])
    write(out / "iris.csv", h + ["species"], r)
    h, r = sklearn_table(load_wine, ["class_0", "class_1", "class_2"])
    write(out / "wine.csv", h + ["cultivar"], r)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)

        pz = fetch(SOURCES["palmerpenguins"], tmp)
        raw = list(csv.DictReader(io.StringIO(pz.read("palmerpenguins/data/penguins.csv").decode())))
        cols = ["bill_length_mm", "bill_depth_mm", "flipper_length_mm", "body_mass_g", "island", "sex", "year"]
        rows = [[d[c] for c in cols] + [d["species"]] for d in raw
                if all(d[c] not in ("", "NA") for c in cols + ["species"])]
        write(out / "penguins.csv", cols + ["species"], rows)

        cz = fetch(SOURCES["common_datasets"], tmp)
        base = "common_datasets/data/"
        text = cz.read(base + "classification/pima/pima.dat").decode()
        body = text.split("@data", 1)[1].strip().splitlines()
        rows = []
        for line in body:
            f = [s.strip() for s in line.split(",")]
            rows.append(f[:8] + ["1" if f[8] == "positive" else "0"])
        write(out / "diabetes.csv",
              ["Pregnancies", "Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI",
               "DiabetesPedigree", "Age", "Outcome"], rows)

        text = cz.read(base + "classification/abalone/abalone.data.txt").decode()
        rows = [line.split(",") for line in text.strip().splitlines()]
        write(out / "abalone.csv",
              ["Sex", "Length", "Diameter", "Height", "WholeWeight", "ShuckedWeight",
               "VisceraWeight", "ShellWeight", "Rings"], rows)

        rows = []
        header = None
        for colour in ("red", "white"):
            text = cz.read(base + f"regression/winequality_{colour}/winequality-{colour}.csv").decode()
            lines = text.strip().splitlines()
            header = [c.strip('"').replace(" ", "_") for c in lines[0].split(";")]
            rows += [line.split(";") for line in lines[1:]]
        write(out / "wine_reg.csv", header, rows)

        oz = fetch(SOURCES["orange3"], tmp)
        lines = oz.read("Orange/datasets/heart_disease.tab").decode().splitlines()[3:]
        chest = {"typical ang": "TA", "atypical ang": "ATA", "non-anginal": "NAP", "asymptomatic": "ASY"}
        ecg = {"normal": "Normal", "ST-T abnormal": "ST", "left vent hypertrophy": "LVH"}
        slope = {"upsloping": "Up", "flat": "Flat", "downsloping": "Down"}
        rows = []
        for line in lines:
            f = line.split("\t")
            if len(f) < 14:
                continue
            age, sex, cp, bp, chol, fbs, recg, hr, ang, oldpeak, sl = f[:11]
            if "" in (age, sex, cp, bp, chol, fbs, recg, hr, ang, oldpeak, sl, f[13]):
                continue
            rows.append([age, "M" if sex == "male" else "F", chest[cp], bp, chol, fbs, ecg[recg], hr,
                         "Y" if ang == "1" else "N", oldpeak, slope[sl], f[13]])
        write(out / "heart.csv",
              ["Age", "Sex", "ChestPainType", "RestingBP", "Cholesterol", "FastingBS", "RestingECG",
               "MaxHR", "ExerciseAngina", "Oldpeak", "ST_Slope", "HeartDisease"], rows)


if __name__ == "__main__":
    main()
