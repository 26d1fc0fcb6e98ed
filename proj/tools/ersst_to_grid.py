#!/usr/bin/env python3
"""Convert NOAA ERSST monthly netCDF files into the qesn grid CSV.

Needs xarray and netCDF4. Land cells (all-missing columns) are dropped.

  python tools/ersst_to_grid.py ersst.v5.*.nc -o runs/ersst/ersst_grid.csv
"""

import argparse
import sys

import numpy as np
import xarray as xr


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--lat", nargs=2, type=float, default=(-29.0, 29.0))
    p.add_argument("--lon", nargs=2, type=float, default=(124.0, 290.0))
    p.add_argument("--start", default="1970-01")
    p.add_argument("--end", default="2016-12")
    args = p.parse_args()

    sst = xr.concat([xr.open_dataset(f)["sst"] for f in args.files], dim="time").sortby("time")
    if "lev" in sst.dims:
        sst = sst.isel(lev=0)
    sst = sst.sel(time=slice(args.start, args.end))
    sst = sst.where((sst.lat >= args.lat[0]) & (sst.lat <= args.lat[1]), drop=True)
    sst = sst.where((sst.lon >= args.lon[0]) & (sst.lon <= args.lon[1]), drop=True)
    sst = sst.transpose("time", "lat", "lon").load()

    lat2, lon2 = np.meshgrid(sst.lat.values, sst.lon.values, indexing="ij")
    values = sst.values.reshape(sst.sizes["time"], -1)
    ocean = np.all(np.isfinite(values), axis=0)
    values, lats, lons = values[:, ocean], lat2.ravel()[ocean], lon2.ravel()[ocean]
    months = [f"{t.year:04d}-{t.month:02d}" for t in sst.indexes["time"]]
    print(f"{len(months)} months, {values.shape[1]} ocean cells", file=sys.stderr)

    with open(args.output, "w") as out:
        out.write("time," + ",".join(f"c{j}" for j in range(values.shape[1])) + "\n")
        out.write("lat," + ",".join(f"{v:.17e}" for v in lats) + "\n")
        out.write("lon," + ",".join(f"{v:.17e}" for v in lons) + "\n")
        for label, row in zip(months, values):
            out.write(label + "," + ",".join(f"{v:.17e}" for v in row) + "\n")


if __name__ == "__main__":
    main()
