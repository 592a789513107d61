#!/usr/bin/env python3
"""Generate the fixture osmAG maps under fixtures/.

Geometry is authored in local meters on a plain grid and converted to
lat/lon around a fixed origin so the files exercise the same projection
path as real maps. Node ids are deduplicated by coordinate so shared
walls literally share nodes. Rerunning the script is deterministic.
"""

import math
import os

R = 6371000.0
LAT0 = 31.0
LON0 = 121.0
M_PER_DEG_LAT = R * math.pi / 180.0
M_PER_DEG_LON = M_PER_DEG_LAT * math.cos(math.radians(LAT0))

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def to_latlon(x, y):
    return LAT0 + y / M_PER_DEG_LAT, LON0 + x / M_PER_DEG_LON


class MapBuilder:
    def __init__(self):
        self.nodes = {}  # (x, y) -> id
        self.node_rows = []
        self.ways = []
        self.next_node = 1000
        self.origin_node = None

    def node(self, x, y):
        key = (round(x, 6), round(y, 6))
        if key not in self.nodes:
            nid = self.next_node
            self.next_node += 1
            self.nodes[key] = nid
            lat, lon = to_latlon(x, y)
            self.node_rows.append((nid, lat, lon, key == (0.0, 0.0)))
        return self.nodes[key]

    def area(self, wid, name, area_type, level, ring, parent=None):
        nds = [self.node(x, y) for (x, y) in ring]
        nds.append(nds[0])
        tags = [
            ("osmAG:type", "area"),
            ("osmAG:areaType", area_type),
            ("name", name),
            ("level", str(level)),
        ]
        if parent is not None:
            tags.append(("osmAG:parent", str(parent)))
        self.ways.append((wid, nds, tags))

    def passage(self, wid, a, b, seg, door, level_a, level_b):
        nds = [self.node(x, y) for (x, y) in seg]
        tags = [
            ("osmAG:type", "passage"),
            ("osmAG:from", str(a)),
            ("osmAG:to", str(b)),
            ("osmAG:doorType", door),
            ("level", str(level_a) if level_a == level_b else f"{level_a};{level_b}"),
        ]
        self.ways.append((wid, nds, tags))

    def write(self, path):
        lines = ['<?xml version="1.0" encoding="UTF-8"?>']
        lines.append('<osm version="0.6" generator="agnav-fixtures">')
        for nid, lat, lon, is_origin in self.node_rows:
            if is_origin:
                lines.append(f'  <node id="{nid}" lat="{lat:.9f}" lon="{lon:.9f}">')
                lines.append('    <tag k="osmAG:origin" v="yes"/>')
                lines.append("  </node>")
            else:
                lines.append(f'  <node id="{nid}" lat="{lat:.9f}" lon="{lon:.9f}"/>')
        for wid, nds, tags in self.ways:
            lines.append(f'  <way id="{wid}">')
            for nd in nds:
                lines.append(f'    <nd ref="{nd}"/>')
            for k, v in tags:
                lines.append(f'    <tag k="{k}" v="{v}"/>')
            lines.append("  </way>")
        lines.append("</osm>")
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
        print(f"wrote {path}")


def rect(x0, y0, x1, y1, south=(), north=(), west=(), east=()):
    """CCW rectangle ring with door-endpoint nodes inserted on each wall."""
    ring = [(x0, y0)]
    ring += [(x, y0) for x in sorted(south)]
    ring.append((x1, y0))
    ring += [(x1, y) for y in sorted(east)]
    ring.append((x1, y1))
    ring += [(x, y1) for x in sorted(north, reverse=True)]
    ring.append((x0, y1))
    ring += [(x0, y) for y in sorted(west, reverse=True)]
    return ring


def campus_floor1():
    b = MapBuilder()
    b.node(0.0, 0.0)  # origin marker

    # middle band y in [4,14]: W corridor, B101, B102, Lobby, D101, D102, E corridor
    b.area(101, "Lobby", "lobby", 1, rect(18, 4, 26, 14, south=(21, 23), north=(21, 23), west=(8, 10), east=(8, 10)))
    b.area(102, "Corridor B", "corridor", 1,
           rect(0, 0, 46, 4, south=(14, 16), north=(1, 3, 7, 9, 14, 16, 21, 23, 37, 39, 43, 45)))
    b.area(103, "Corridor D", "corridor", 1,
           rect(0, 14, 46, 18, south=(1, 3, 21, 23, 27, 29, 37, 39, 43, 45)))
    b.area(104, "Corridor W", "corridor", 1, rect(0, 4, 4, 14, south=(1, 3), north=(1, 3), west=(8, 10)))
    b.area(105, "Corridor E", "corridor", 1, rect(42, 4, 46, 14, south=(43, 45), north=(43, 45), east=(8, 10)))
    b.area(106, "B101", "room", 1, rect(4, 4, 13, 14, south=(7, 9)))
    b.area(107, "B102", "room", 1, rect(13, 4, 18, 14, south=(14, 16), east=(8, 10)))
    b.area(108, "D101", "room", 1, rect(26, 4, 35, 14, north=(27, 29), west=(8, 10)))
    b.area(109, "D102", "room", 1, rect(35, 4, 42, 14, south=(37, 39), north=(37, 39)))
    b.area(110, "Storage W1", "room", 1, rect(-8, 4, 0, 14, east=(8, 10)))
    b.area(111, "Workshop S1", "room", 1, rect(10, -8, 20, 0, north=(14, 16)))
    b.area(112, "Robotics Training Lab", "room", 1, rect(46, 4, 58, 14, west=(8, 10)))

    b.passage(201, 104, 102, [(1, 4), (3, 4)], "open", 1, 1)          # W - Corridor B
    b.passage(202, 104, 103, [(1, 14), (3, 14)], "open", 1, 1)        # W - Corridor D
    b.passage(203, 110, 104, [(0, 8), (0, 10)], "automatic", 1, 1)    # Storage W1 - W
    b.passage(204, 106, 102, [(7, 4), (9, 4)], "handle", 1, 1)        # B101 - Corridor B
    b.passage(205, 107, 102, [(14, 4), (16, 4)], "automatic", 1, 1)   # B102 - Corridor B
    b.passage(206, 107, 101, [(18, 8), (18, 10)], "automatic", 1, 1)  # B102 - Lobby
    b.passage(207, 101, 102, [(21, 4), (23, 4)], "open", 1, 1)        # Lobby - Corridor B
    b.passage(208, 101, 103, [(21, 14), (23, 14)], "open", 1, 1)      # Lobby - Corridor D
    b.passage(209, 101, 108, [(26, 8), (26, 10)], "automatic", 1, 1)  # Lobby - D101
    b.passage(210, 108, 103, [(27, 14), (29, 14)], "handle", 1, 1)    # D101 - Corridor D
    b.passage(211, 109, 103, [(37, 14), (39, 14)], "automatic", 1, 1) # D102 - Corridor D
    b.passage(212, 109, 102, [(37, 4), (39, 4)], "automatic", 1, 1)      # D102 - Corridor B
    b.passage(213, 105, 102, [(43, 4), (45, 4)], "open", 1, 1)        # E - Corridor B
    b.passage(214, 105, 103, [(43, 14), (45, 14)], "open", 1, 1)      # E - Corridor D
    b.passage(215, 105, 112, [(46, 8), (46, 10)], "automatic", 1, 1)  # E - Lab
    b.passage(216, 111, 102, [(14, 0), (16, 0)], "handle", 1, 1)      # Workshop S1 - Corridor B

    b.write(os.path.join(OUT, "campus_floor1.osm"))


def campus_towers():
    b = MapBuilder()
    b.node(0.0, 0.0)

    # floor 1
    b.area(101, "Dock", "room", 1, rect(0, 0, 6, 6, east=(2, 4)))
    b.area(102, "Hall 1", "corridor", 1, rect(6, 0, 30, 6, north=(8, 10, 18, 20), west=(2, 4), south=(26, 28)))
    b.area(103, "Stairs S", "stairs", 1, rect(8, 6, 11, 9, south=(10,)))
    b.area(104, "Elevator A", "elevator", 1, rect(18, 6, 21, 9, south=(20,)))
    b.area(105, "Elevator B", "elevator", 1, rect(26, -3, 29, 0, north=(28,)))
    # floor 2 (same footprints; shared nodes)
    b.area(111, "Hall 2", "corridor", 2, rect(6, 0, 30, 6, north=(8, 10, 18, 20), east=(2, 4), south=(26, 28)))
    b.area(112, "Stairs S", "stairs", 2, rect(8, 6, 11, 9, south=(10,)))
    b.area(113, "Elevator A", "elevator", 2, rect(18, 6, 21, 9, south=(20,)))
    b.area(114, "Elevator B", "elevator", 2, rect(26, -3, 29, 0, north=(28,)))
    b.area(115, "Lab 2", "room", 2, rect(30, 0, 36, 6, west=(2, 4)))

    b.passage(201, 101, 102, [(6, 2), (6, 4)], "automatic", 1, 1)      # Dock - Hall 1
    b.passage(202, 102, 103, [(8, 6), (10, 6)], "open", 1, 1)          # Hall 1 - Stairs S
    b.passage(203, 102, 104, [(18, 6), (20, 6)], "automatic", 1, 1)    # Hall 1 - Elevator A
    b.passage(204, 102, 105, [(26, 0), (28, 0)], "automatic", 1, 1)    # Hall 1 - Elevator B
    b.passage(205, 103, 112, [(8, 9), (11, 9)], "open", 1, 2)          # stairs flight
    b.passage(206, 104, 113, [(18, 9), (21, 9)], "elevator_door", 1, 2)
    b.passage(207, 105, 114, [(26, -3), (29, -3)], "elevator_door", 1, 2)
    b.passage(208, 111, 112, [(8, 6), (10, 6)], "open", 2, 2)          # Hall 2 - Stairs S
    b.passage(209, 111, 113, [(18, 6), (20, 6)], "automatic", 2, 2)    # Hall 2 - Elevator A
    b.passage(210, 111, 114, [(26, 0), (28, 0)], "automatic", 2, 2)    # Hall 2 - Elevator B
    b.passage(211, 111, 115, [(30, 2), (30, 4)], "automatic", 2, 2)    # Hall 2 - Lab 2

    b.write(os.path.join(OUT, "campus_towers.osm"))


def two_routes():
    b = MapBuilder()
    b.node(0.0, 0.0)

    b.area(101, "Start Bay", "room", 1, rect(0, 0, 2, 10, east=(1, 3, 6, 8)))
    b.area(102, "North Run", "corridor", 1, rect(2, 5, 22, 10, west=(6, 8), east=(6, 8)))
    b.area(103, "South Drop", "corridor", 1, rect(2, 0, 6, 3, west=(1, 3), south=(3, 5)))
    b.area(104, "South Run", "corridor", 1, rect(2, -4, 22, 0, north=(3, 5, 19, 21)))
    b.area(105, "South Rise", "corridor", 1, rect(18, 0, 22, 3, south=(19, 21), east=(1, 3)))
    b.area(106, "Goal Bay", "room", 1, rect(22, 0, 24, 10, west=(1, 3, 6, 8)))

    b.passage(201, 101, 102, [(2, 6), (2, 8)], "automatic", 1, 1)  # north entry
    b.passage(202, 102, 106, [(22, 6), (22, 8)], "open", 1, 1)     # north exit
    b.passage(203, 101, 103, [(2, 1), (2, 3)], "handle", 1, 1)     # south entry
    b.passage(204, 103, 104, [(3, 0), (5, 0)], "open", 1, 1)
    b.passage(205, 104, 105, [(19, 0), (21, 0)], "open", 1, 1)
    b.passage(206, 105, 106, [(22, 1), (22, 3)], "open", 1, 1)     # south exit

    b.write(os.path.join(OUT, "two_routes.osm"))


def loops():
    b = MapBuilder()
    b.node(0.0, 0.0)

    b.area(101, "Ring South", "corridor", 1, rect(0, 0, 20, 4, west=(1, 3), north=(1, 3, 9, 11, 17, 19)))
    b.area(102, "Ring East", "corridor", 1, rect(16, 4, 20, 16, south=(17, 19), north=(17, 19), west=(9, 11), east=(9, 11)))
    b.area(103, "Ring North", "corridor", 1, rect(0, 16, 20, 20, south=(1, 3, 9, 11, 17, 19), north=(9, 11)))
    b.area(104, "Ring West", "corridor", 1, rect(0, 4, 4, 16, south=(1, 3), north=(1, 3), west=(5, 7), east=(9, 11)))
    b.area(105, "Atrium M", "lobby", 1, rect(4, 4, 16, 16, south=(9, 11), east=(9, 11), north=(9, 11), west=(9, 11)))
    b.area(106, "Depot", "room", 1, rect(-6, 0, 0, 8, east=(1, 3, 5, 7)))
    b.area(107, "Annex", "room", 1, rect(20, 8, 26, 16, west=(9, 11)))
    b.area(108, "Attic Stock", "room", 1, rect(6, 20, 14, 26, south=(9, 11)))

    b.passage(201, 106, 101, [(0, 1), (0, 3)], "open", 1, 1)        # Depot - Ring South
    b.passage(202, 106, 104, [(0, 5), (0, 7)], "handle", 1, 1)      # Depot - Ring West
    b.passage(203, 101, 104, [(1, 4), (3, 4)], "open", 1, 1)
    b.passage(204, 101, 102, [(17, 4), (19, 4)], "open", 1, 1)
    b.passage(205, 102, 103, [(17, 16), (19, 16)], "open", 1, 1)
    b.passage(206, 104, 103, [(1, 16), (3, 16)], "open", 1, 1)
    b.passage(207, 101, 105, [(9, 4), (11, 4)], "automatic", 1, 1)  # Atrium south door
    b.passage(208, 105, 102, [(16, 9), (16, 11)], "automatic", 1, 1)
    b.passage(209, 105, 103, [(9, 16), (11, 16)], "automatic", 1, 1)
    b.passage(210, 104, 105, [(4, 9), (4, 11)], "handle", 1, 1)
    b.passage(211, 102, 107, [(20, 9), (20, 11)], "automatic", 1, 1) # Annex
    b.passage(212, 103, 108, [(9, 20), (11, 20)], "handle", 1, 1)    # Attic Stock

    b.write(os.path.join(OUT, "loops.osm"))


def u_corridor():
    b = MapBuilder()
    b.node(0.0, 0.0)

    ring = [(0, 0), (14, 0), (14, 10), (13, 10), (11, 10), (10, 10), (10, 4), (4, 4), (4, 10), (3, 10), (1, 10), (0, 10)]
    b.area(101, "U Corridor", "corridor", 1, ring)
    b.area(102, "Tip West", "room", 1, rect(0, 10, 4, 14, south=(1, 3)))
    b.area(103, "Tip East", "room", 1, rect(10, 10, 14, 14, south=(11, 13)))

    b.passage(201, 102, 101, [(1, 10), (3, 10)], "open", 1, 1)
    b.passage(202, 103, 101, [(11, 10), (13, 10)], "open", 1, 1)

    b.write(os.path.join(OUT, "u_corridor.osm"))


if __name__ == "__main__":
    campus_floor1()
    campus_towers()
    two_routes()
    loops()
    u_corridor()
