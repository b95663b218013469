"""T_stat against the Hamming fraction, plus the occupancy round trip, as CSV."""

import argparse
import csv
import sys
from dataclasses import asdict, dataclass

from bitthermo import occupancy_from_temperature, temperature_curve
from bitthermo.thermo import OK, default_grid


@dataclass
class CurveConfig:
    points: int = 199
    lo: float = 0.005
    hi: float = 0.995
    out: str = "-"


def run(cfg: CurveConfig) -> list[dict]:
    rows = []
    for r in temperature_curve(default_grid(cfg.points, cfg.lo, cfg.hi)):
        back = occupancy_from_temperature(r.T_stat) if r.flag == OK else r.t
        rows.append({"t": r.t, "T_stat": r.T_stat, "inv_T_stat": r.inv_T_stat,
                     "flag": r.flag, "roundtrip_error": abs(back - r.t)})
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(CurveConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = CurveConfig(**vars(p.parse_args(argv)))
    rows = run(cfg)
    fh = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    fh.write(f"# {asdict(cfg)}\n")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
