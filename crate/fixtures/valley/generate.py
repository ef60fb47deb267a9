#!/usr/bin/env python3
"""Regenerates the synthetic valley scenario in this directory.

A 40 x 30 DEM of a V-shaped valley around a river in column 20, with a
ringed basin on the east bank. Two roads run north-south on the west bank:
Fayetteville Rd high up the slope (dry at both stages, but slow) and
Riverside Dr near the water (dry at 13 ft, flooded at 20 ft). A bridge
crosses the river on row 15 and is flooded at both stages.

Run from anywhere: python3 fixtures/valley/generate.py
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
COLS, ROWS = 40, 30
X0, Y0, CELL = -79.05, 34.60, 0.001
RIVER_COL = 20


def num(v):
    """Shortest text that round-trips, integers without a fraction."""
    return str(int(v)) if v == int(v) else repr(v)


def center(col, row):
    return [round(X0 + (col + 0.5) * CELL, 4), round(Y0 + (row + 0.5) * CELL, 4)]


def elevation(col, row):
    # ring of high ground around a low basin east of the river
    if 32 <= col <= 37 and 9 <= row <= 15:
        return 2.0 if (33 <= col <= 36 and 10 <= row <= 14) else 9.0
    return round(0.5 + 0.45 * abs(col - RIVER_COL) + 0.01 * row, 2)


def header(cols, rows, cell):
    return (
        f"ncols {cols}\nnrows {rows}\nxllcorner {num(X0)}\nyllcorner {num(Y0)}\n"
        f"cellsize {num(cell)}\nNODATA_value -9999\n"
    )


def write(name, text):
    with open(os.path.join(HERE, name), "w", newline="\n") as f:
        f.write(text)


def dem():
    lines = [" ".join(num(elevation(c, r)) for c in range(COLS)) for r in reversed(range(ROWS))]
    write("dem.asc", header(COLS, ROWS, CELL) + "\n".join(lines) + "\n")


def segmentation():
    # coarser imagery-derived grid: water seen on the far east bank
    cols, rows = COLS // 2, ROWS // 2
    codes = [[0] * cols for _ in range(rows)]
    for r in (1, 2):
        for c in (14, 15):
            codes[r][c] = 1
    for c in range(cols):
        codes[rows - 1][c] = 2 if c % 5 == 0 else codes[rows - 1][c]
    lines = [" ".join(str(v) for v in codes[r]) for r in reversed(range(rows))]
    write("segmentation.asc", header(cols, rows, 2 * CELL) + "\n".join(lines) + "\n")
    legend = {"0": "other", "1": "water", "2": "building", "3": "road"}
    write("segmentation.legend.json", json.dumps(legend, indent=2) + "\n")


def roads():
    nodes, edges = [], []

    def node(nid, col, row):
        lon, lat = center(col, row)
        nodes.append({"id": nid, "lon": lon, "lat": lat})
        return nid, col, row

    def edge(eid, a, b, name, strength=1.0):
        edges.append(
            {
                "id": eid,
                "from": a[0],
                "to": b[0],
                "polyline": [center(a[1], a[2]), center(b[1], b[2])],
                "strength": strength,
                "name": name,
            }
        )

    stops = [3, 9, 15, 21, 27]
    fay = {r: node(f"fay_{r:02}", 3, r) for r in stops}
    riv = {r: node(f"riv_{r:02}", 10, r) for r in stops}
    east = node("east_15", 30, 15)
    for a, b in zip(stops, stops[1:]):
        edge(f"fay_{a:02}_{b:02}", fay[a], fay[b], "Fayetteville Rd", 2.0)
        edge(f"riv_{a:02}_{b:02}", riv[a], riv[b], "Riverside Dr")
    for r in stops:
        edge(f"cross_{r:02}", fay[r], riv[r], f"Cross St {r}")
    edge("bridge_15", riv[15], east, "Bridge St")

    def poi(pid, kind, col, row, name):
        lon, lat = center(col, row)
        return {"id": pid, "kind": kind, "lon": lon, "lat": lat, "name": name}

    pois = [
        poi("home", "building", 3, 27, "Origin House"),
        poi("shelter_south", "shelter", 3, 3, "Evacuation Shelter"),
        poi("shelter_east", "shelter", 30, 16, "East Shelter"),
        poi("inn_fayetteville", "lodging", 2, 17, "Fayetteville Inn"),
        poi("motel_riverside", "lodging", 11, 12, "Riverside Motel"),
        poi("lodge_lumber", "lodging", 16, 20, "Lumber River Lodge"),
    ]
    write("roads.json", json.dumps({"nodes": nodes, "edges": edges, "pois": pois}, indent=2) + "\n")


def manifests():
    for ft in (13, 20):
        manifest = {
            "name": f"valley_{ft}ft",
            "dem_path": "dem.asc",
            "class_grid_paths": [
                {"path": "segmentation.asc", "legend_path": "segmentation.legend.json", "water_class": "water"}
            ],
            "roadnet_path": "roads.json",
            "params": {"water_level_ft": ft, "seed_fraction": 0.025, "snap_radius_m": 500.0},
        }
        write(f"valley_{ft}ft.json", json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    dem()
    segmentation()
    roads()
    manifests()
