#pragma once

#include <string>
#include <utility>
#include <vector>

namespace readc {

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

// A grid board fixture. Boards load from a plain-text format with one
// character per cell:
//   .  empty      #  obstacle     K  key      L  lock
//   P  pit        S  start        0..9 flag (digit = capture order)
struct GridSpec {
    int width = 0;
    int height = 0;
    std::vector<Cell> keys;
    std::vector<Cell> locks;
    std::vector<Cell> flags;      // flags[k] must be captured k-th
    std::vector<Cell> pits;
    std::vector<Cell> obstacles;
    Cell default_start;

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    // Throws std::invalid_argument on malformed boards (shared cells,
    // start on a pit/obstacle, gap in flag digits, mixed key/flag domains).
    void validate() const;
};

GridSpec parse_board(const std::string& text);
GridSpec load_board(const std::string& path);

}  // namespace readc
