"""Regenerate the bundled scenario files in src/kpump/data."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "kpump" / "data"


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def color(radius, starts, targets):
    return {"radius": radius, "starts": starts, "targets": targets}


def trivial_single():
    return {"workspace": {"boundary": rect(0, 0, 4, 4), "obstacles": []},
            "colors": [color(0.3, [[1, 1]], [[3, 3]])]}


def sealed_chamber():
    # pinwheel of four bars around the start; the slits between bars are far
    # narrower than a robot
    g, t = 0.1, 0.3
    walls = [rect(1 - t, 1 - t, 3 - g, 1), rect(3, 1 - t, 3 + t, 3 - g),
             rect(1 + g, 3, 3 + t, 3 + t), rect(1 - t, 1 + g, 1, 3 + t)]
    return {"workspace": {"boundary": rect(0, 0, 8, 4), "obstacles": walls},
            "colors": [color(0.3, [[2, 2]], [[6.5, 2]])]}


def a_unlabeled():
    starts = [[1.0 + 1.2 * (i % 2), 1.0 + 1.5 * (i // 2)] for i in range(10)]
    targets = [[9.8 + 1.2 * (i % 2), 1.0 + 1.5 * (i // 2)] for i in range(10)]
    return {"workspace": {"boundary": rect(0, 0, 12, 8),
                          "obstacles": [rect(5, 1.2, 7, 3), rect(5, 5, 7, 6.8)]},
            "colors": [color(0.4, starts, targets)]}


def b_two_color_swap():
    boundary = [[0, 0], [6, 0], [6, 2.4], [9, 2.4], [9, 0], [15, 0], [15, 6],
                [9, 6], [9, 3.6], [6, 3.6], [6, 6], [0, 6]]
    left = [[1.5, 1.5], [1.5, 4.5], [4.5, 1.5], [4.5, 4.5]]
    right = [[x + 9, y] for x, y in left]
    return {"workspace": {"boundary": boundary, "obstacles": []},
            "colors": [color(0.4, left, right), color(0.4, right, left)]}


def c_cluttered():
    obstacles = [rect(x, y, x + 1, y + 1) for x in (2, 4.5, 7) for y in (2, 4.5, 7)
                 if (x, y) != (4.5, 4.5)]
    corners = [[0.8, 0.8], [9.2, 0.8], [9.2, 9.2], [0.8, 9.2]]
    cols = []
    for i in range(4):
        cols.append(color(0.4, [corners[i]], [corners[(i + 2) % 4]]))
    return {"workspace": {"boundary": rect(0, 0, 10, 10), "obstacles": obstacles},
            "colors": cols}


def d_coupled():
    # ring around a block; only the bottom corridor is wide enough for two
    # robots to pass, so the swaps have to be sequenced through it
    slots = [[0.8, 0.8], [4, 0.8], [7.2, 0.8], [7.2, 5.2], [0.8, 5.2]]
    perm = [2, 1, 0, 4, 3]
    cols = [color(0.5, [slots[i]], [slots[perm[i]]]) for i in range(5)]
    return {"workspace": {"boundary": rect(0, 0, 8, 6), "obstacles": [rect(1.6, 2.6, 6.4, 4.4)]},
            "colors": cols}


def e_four_rooms():
    # plus-shaped free space: a central hub with one room per arm
    boundary = [[4, 0], [8, 0], [8, 4], [12, 4], [12, 8], [8, 8], [8, 12], [4, 12],
                [4, 8], [0, 8], [0, 4], [4, 4]]
    rooms = {
        "left": [[1.2, 5.2], [1.2, 6.8]],
        "top": [[5.2, 10.8], [6.8, 10.8]],
        "right": [[10.8, 6.8], [10.8, 5.2]],
        "bottom": [[6.8, 1.2], [5.2, 1.2]],
    }
    order = ["left", "top", "right", "bottom"]
    cols = [color(0.4, rooms[order[i]], rooms[order[(i + 1) % 4]]) for i in range(4)]
    return {"workspace": {"boundary": boundary, "obstacles": []}, "colors": cols}


SCENARIOS = [trivial_single, sealed_chamber, a_unlabeled, b_two_color_swap, c_cluttered,
             d_coupled, e_four_rooms]

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for fn in SCENARIOS:
        doc = {"name": fn.__name__, **fn()}
        (OUT / f"{fn.__name__}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print("wrote", fn.__name__)
