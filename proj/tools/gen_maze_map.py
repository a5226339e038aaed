#!/usr/bin/env python3
"""Write a deterministic Moving-AI style maze map with 2-cell corridors and walls."""

import argparse
import random
import sys


def maze(size: int, corridor: int, seed: int) -> list[list[str]]:
    units = size // corridor
    rooms = (units + 1) // 2
    grid = [["@"] * size for _ in range(size)]

    def carve(ur: int, uc: int) -> None:
        for r in range(ur * corridor, (ur + 1) * corridor):
            for c in range(uc * corridor, (uc + 1) * corridor):
                if r < size and c < size:
                    grid[r][c] = "."

    rng = random.Random(seed)
    seen = {(0, 0)}
    stack = [(0, 0)]
    carve(0, 0)
    while stack:
        r, c = stack[-1]
        options = [(r + dr, c + dc, dr, dc) for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0))
                   if 0 <= r + dr < rooms and 0 <= c + dc < rooms and (r + dr, c + dc) not in seen]
        if not options:
            stack.pop()
            continue
        nr, nc, dr, dc = options[rng.randrange(len(options))]
        carve(2 * r + dr, 2 * c + dc)
        carve(2 * nr, 2 * nc)
        seen.add((nr, nc))
        stack.append((nr, nc))
    return grid


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=32)
    parser.add_argument("--corridor", type=int, default=2)
    parser.add_argument("--seed", type=int, default=2)
    parser.add_argument("-o", "--out", default="-")
    args = parser.parse_args()
    grid = maze(args.size, args.corridor, args.seed)
    text = f"type octile\nheight {args.size}\nwidth {args.size}\nmap\n"
    text += "".join("".join(row) + "\n" for row in grid)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as f:
            f.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
