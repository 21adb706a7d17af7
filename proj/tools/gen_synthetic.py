#!/usr/bin/env python3
"""Generate the synthetic wind/demand fixtures shipped in data/synthetic.

Two correlated hourly wind-speed records (2013-2015) and an hourly demand
record in raw national-scale MW (2014-2015). The output is deterministic for a
given --seed; the committed files were produced with the defaults.

    python3 tools/gen_synthetic.py --out data/synthetic
"""

import argparse
import pathlib

import numpy as np
import pandas as pd
from scipy import stats


def latent_ar1(rng, n, phi):
    z = np.empty(n)
    z[0] = rng.standard_normal()
    eps = rng.standard_normal(n) * np.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        z[t] = phi * z[t - 1] + eps[t]
    return z


def wind_pair(rng, index, rho, phi):
    n = len(index)
    common = latent_ar1(rng, n, phi)
    own1 = latent_ar1(rng, n, phi)
    own2 = latent_ar1(rng, n, phi)
    z1 = np.sqrt(rho) * common + np.sqrt(1.0 - rho) * own1
    z2 = np.sqrt(rho) * common + np.sqrt(1.0 - rho) * own2

    # winter is windier
    doy = index.dayofyear.to_numpy()
    season = 1.0 + 0.18 * np.cos(2.0 * np.pi * (doy - 15) / 365.25)

    u1 = stats.norm.cdf(z1)
    u2 = stats.norm.cdf(z2)
    w1 = stats.weibull_min.ppf(u1, 2.1, scale=8.6) * season
    w2 = stats.weibull_min.ppf(u2, 2.0, scale=7.9) * season
    return np.round(w1, 1), np.round(w2, 1), common


def demand_series(rng, index, wind_latent):
    hour = index.hour.to_numpy()
    doy = index.dayofyear.to_numpy()
    weekday = index.dayofweek.to_numpy()
    daily = 0.16 * np.sin(2.0 * np.pi * (hour - 9) / 24.0) + 0.06 * np.sin(4.0 * np.pi * (hour - 3) / 24.0)
    seasonal = 0.14 * np.cos(2.0 * np.pi * (doy - 20) / 365.25)
    weekend = np.where(weekday >= 5, -0.08, 0.0)
    noise = latent_ar1(rng, len(index), 0.9) * 0.03
    # windy weather is usually cold weather
    chill = 0.02 * wind_latent
    level = 31500.0 * (1.0 + daily + seasonal + weekend + noise + chill)
    return np.round(level, 0)


def blank_out(rng, values, fraction):
    out = values.astype(object)
    holes = rng.random(len(values)) < fraction
    out[holes] = ""
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/synthetic", type=pathlib.Path)
    parser.add_argument("--seed", default=20170501, type=int)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    wind_index = pd.date_range("2013-01-01T00:00:00Z", "2015-12-31T23:00:00Z", freq="h")
    w1, w2, latent = wind_pair(rng, wind_index, rho=0.72, phi=0.97)

    demand_mask = wind_index >= pd.Timestamp("2014-01-01T00:00:00Z")
    demand_index = wind_index[demand_mask]
    demand = demand_series(rng, demand_index, latent[demand_mask])

    stamp = lambda idx: idx.strftime("%Y-%m-%dT%H:%M:%SZ")
    args.out.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"timestamp": stamp(wind_index), "wind_speed": blank_out(rng, w1, 0.002)}).to_csv(
        args.out / "wind_site1.csv", index=False)
    pd.DataFrame({"timestamp": stamp(wind_index), "wind_speed": blank_out(rng, w2, 0.002)}).to_csv(
        args.out / "wind_site2.csv", index=False)
    pd.DataFrame({"timestamp": stamp(demand_index), "demand": demand.astype(int)}).to_csv(
        args.out / "demand.csv", index=False)


if __name__ == "__main__":
    main()
