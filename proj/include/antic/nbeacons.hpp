#pragma once
// NBeacons grid world: an agent walks to beacons and activates them; wind
// blowing after an agent action can sweep the agent into a downwind sandpit
// where it stays stuck until it digs out (three actions) or climbs out with
// a packed grappling hook (one action).
//
// Cells are named c<column>-<row>, columns and rows starting at 1. North
// increases the row, east increases the column.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "antic/strips.hpp"

namespace antic::nbeacons {

struct Cell {
    int column = 1;
    int row = 1;

    auto operator<=>(const Cell&) const = default;
    bool operator==(const Cell&) const = default;
};

std::string cell_name(Cell c);

enum class Direction { north, south, east, west };

char to_char(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

struct GridConfig {
    int width = 10;
    int height = 10;
    std::vector<Cell> beacons;
    std::vector<Cell> sandpits;
    Cell agent_start;
    Direction wind_direction = Direction::west;
    int wind_speed = 5;
    double wind_probability = 0.0;

    /// Throws Error naming the first violated invariant.
    void validate() const;
};

/// The sandpit an agent at `from` is swept into: the first pit along the wind
/// direction within `wind_speed` cells, if any.
std::optional<Cell> downwind_sandpit(const GridConfig& config, Cell from);

struct GeneratedFiles {
    std::string domain;
    std::string problem;
};

/// Domain and problem text for the configuration. The domain text depends
/// only on the fixed schema set; the problem carries the grid.
GeneratedFiles generate(const GridConfig& config);

/// Random configuration: `sandpits` pits and one beacon placed uniformly at
/// random on distinct cells, wind direction and speed drawn too.
GridConfig random_config(int width, int height, int sandpits, std::uint64_t seed);

/// The shipped scenario: 10x10 grid, west wind at speed 5, agent at c6-1,
/// beacon at c6-9, sandpits at c2-2, c3-3, c1-4 and c4-5.
GridConfig canonical_config();

struct Scenario {
    GridConfig config;
    GeneratedFiles files;
    /// Eight moves north and the activation.
    std::string plan;
};

Scenario canonical_scenario();

}  // namespace antic::nbeacons
