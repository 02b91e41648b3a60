#!/usr/bin/env python3
"""Regenerate the synthetic measurement logs and calibration tables in data/.

The logs are committed artifacts; this script records their provenance and
makes them reproducible.  Each log is a straight south-bound GPS track away
from the configured base station, with path loss drawn from the Bullington
model plus Gaussian noise and converted back to raw RSSI through the link
budget and the example calibration table.
"""

from __future__ import annotations

import math
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from sealoss import CalibrationTable, bullington_loss, load_campaign

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "sealoss" / "data"

EXAMPLE_CALIBRATION = (
    (-140.0, 1.8), (-130.0, 1.2), (-120.0, 0.7), (-110.0, 0.9),
    (-100.0, 0.2), (-90.0, -0.3), (-80.0, -0.6), (-70.0, -0.9),
    (-60.0, -1.1), (-50.0, -1.2), (-40.0, -1.3),
)


def write_calibration_tables() -> None:
    identity = "reported_rssi_dbm,correction_db\n-150.0,0.0\n0.0,0.0\n"
    (DATA_DIR / "calibration_identity.csv").write_text(identity)
    rows = ["reported_rssi_dbm,correction_db"]
    rows += [f"{lv},{c}" for lv, c in EXAMPLE_CALIBRATION]
    (DATA_DIR / "calibration_example.csv").write_text("\n".join(rows) + "\n")


def raw_from_calibrated(cal: float, table: CalibrationTable) -> float:
    """Invert calibrated = raw + correction(raw) by fixed-point iteration."""
    raw = cal
    for _ in range(50):
        raw = cal - table.correction_at(raw)[0]
    return raw


def write_log(campaign: str, n_rows: int, d_min: float, d_max: float,
              noise_db: float, start_iso: str, seed: int) -> None:
    cfg = load_campaign(campaign)
    table = CalibrationTable(entries=EXAMPLE_CALIBRATION)
    rng = np.random.default_rng(seed)
    gains = (
        cfg.radio.tx_power + cfg.radio.tx_antenna_gain
        + cfg.radio.rx_antenna_gain - cfg.radio.polarization_loss
    )
    start = datetime.fromisoformat(start_iso).replace(tzinfo=timezone.utc)
    r_e = cfg.earth.true_radius

    lines = ["timestamp,lat,lon,rssi_dbm"]
    for i in range(n_rows):
        d = d_min + i * (d_max - d_min) / (n_rows - 1)
        # Due-south meridian track: the haversine distance is exactly r_e * dlat.
        lat = cfg.bs_position.latitude - math.degrees(d / r_e)
        loss = bullington_loss(cfg.model_context().geometry_at(d), cfg.radio.frequency)
        loss += rng.normal(0.0, noise_db)
        raw = raw_from_calibrated(gains - loss, table)
        ts = (start + timedelta(seconds=17 * i)).strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"{ts},{lat:.7f},{cfg.bs_position.longitude:.7f},{raw:.2f}")
    (DATA_DIR / f"synthetic_{campaign}_log.csv").write_text("\n".join(lines) + "\n")


def main() -> None:
    write_calibration_tables()
    write_log("campaign1", n_rows=315, d_min=100.0, d_max=3020.0,
              noise_db=2.5, start_iso="2020-07-20T10:00:00", seed=11)
    write_log("campaign2", n_rows=325, d_min=150.0, d_max=9790.0,
              noise_db=2.0, start_iso="2020-08-15T09:00:00", seed=22)
    print(f"wrote data files under {DATA_DIR}")


if __name__ == "__main__":
    main()
