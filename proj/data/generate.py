# Copyright 2026 The qdap Authors.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the bundled synthetic quarterly series (1964Q1 to 2020Q4)."""

from pathlib import Path

import numpy as np

A, RHO, C, B = 0.01037, 0.64079, 0.01520, 0.03630
PD_LOW, PD_HIGH = 17.5, 87.5
SEED = 20260101


def quarters():
    return [f"{y}-{3 * q - 2:02d}-01" for y in range(1964, 2021) for q in range(1, 5)]


def write(path, dates, values):
    lines = ["date,value"] + [f"{d},{v:.10g}" for d, v in zip(dates, values)]
    path.write_text("\n".join(lines) + "\n")


def main():
    rng = np.random.default_rng(SEED)
    dates = quarters()
    n = len(dates)

    x = np.zeros(n)
    for t in range(1, n):
        x[t] = RHO * x[t - 1] + C * rng.standard_normal()
    growth = A + x + B * rng.standard_normal(n)

    riskfree = 0.011 + 0.3 * x + 0.002 * rng.standard_normal(n)

    z = np.zeros(n)
    for t in range(1, n):
        z[t] = 0.97 * z[t - 1] + rng.standard_normal()
    z = (z - z.min()) / (z.max() - z.min())
    pd = np.exp(np.log(PD_LOW) + z * (np.log(PD_HIGH) - np.log(PD_LOW)))

    out = Path(__file__).resolve().parent
    write(out / "dividend_growth.csv", dates, growth)
    write(out / "riskfree_log.csv", dates, riskfree)
    write(out / "price_dividend.csv", dates, pd)


if __name__ == "__main__":
    main()
