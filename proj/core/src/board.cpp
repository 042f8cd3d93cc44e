#include "readc/board.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace readc {

void GridSpec::validate() const {
    if (width <= 0 || height <= 0) throw std::invalid_argument("board: empty grid");
    std::map<std::pair<int, int>, int> occupancy;
    auto claim = [&](const Cell& c, const char* what) {
        if (!in_bounds(c.x, c.y)) throw std::invalid_argument(std::string("board: ") + what + " out of bounds");
        if (++occupancy[{c.x, c.y}] > 1)
            throw std::invalid_argument(std::string("board: two items share a cell at (") +
                                        std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    };
    for (const Cell& c : keys) claim(c, "key");
    for (const Cell& c : locks) claim(c, "lock");
    for (const Cell& c : flags) claim(c, "flag");
    for (const Cell& c : pits) claim(c, "pit");
    for (const Cell& c : obstacles) claim(c, "obstacle");

    if (!in_bounds(default_start.x, default_start.y))
        throw std::invalid_argument("board: start out of bounds");
    for (const Cell& c : pits)
        if (c == default_start) throw std::invalid_argument("board: start on a pit");
    for (const Cell& c : obstacles)
        if (c == default_start) throw std::invalid_argument("board: start on an obstacle");

    if (!flags.empty() && (!keys.empty() || !locks.empty()))
        throw std::invalid_argument("board: flags cannot be mixed with keys/locks");
    if (flags.empty() && keys.empty() && locks.empty())
        throw std::invalid_argument("board: no goal items");
    if (flags.empty() && (keys.empty() || locks.empty()))
        throw std::invalid_argument("board: key-lock boards need at least one key and one lock");
}

GridSpec parse_board(const std::string& text) {
    GridSpec spec;
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == ';') continue;  // ';' starts a comment line
        rows.push_back(line);
    }
    if (rows.empty()) throw std::invalid_argument("board: no rows");

    spec.height = static_cast<int>(rows.size());
    spec.width = static_cast<int>(rows[0].size());
    bool start_seen = false;
    std::map<int, Cell> flag_cells;

    for (int y = 0; y < spec.height; ++y) {
        if (static_cast<int>(rows[y].size()) != spec.width)
            throw std::invalid_argument("board: ragged rows");
        for (int x = 0; x < spec.width; ++x) {
            const char c = rows[y][x];
            const Cell cell{x, y};
            switch (c) {
                case '.': break;
                case '#': spec.obstacles.push_back(cell); break;
                case 'K': spec.keys.push_back(cell); break;
                case 'L': spec.locks.push_back(cell); break;
                case 'P': spec.pits.push_back(cell); break;
                case 'S':
                    if (start_seen) throw std::invalid_argument("board: multiple start cells");
                    spec.default_start = cell;
                    start_seen = true;
                    break;
                default:
                    if (c >= '0' && c <= '9') {
                        const int order = c - '0';
                        if (flag_cells.count(order))
                            throw std::invalid_argument("board: duplicate flag digit");
                        flag_cells[order] = cell;
                    } else {
                        throw std::invalid_argument(std::string("board: unknown cell character '") + c + "'");
                    }
            }
        }
    }
    if (!start_seen) throw std::invalid_argument("board: missing start cell");

    int expected = 0;
    for (const auto& [order, cell] : flag_cells) {
        if (order != expected++)
            throw std::invalid_argument("board: flag digits must be contiguous from 0");
        spec.flags.push_back(cell);
    }

    spec.validate();
    return spec;
}

GridSpec load_board(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("board: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_board(buf.str());
}

}  // namespace readc
