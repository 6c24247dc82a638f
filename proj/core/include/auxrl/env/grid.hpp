#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "auxrl/ltl/trace.hpp"

namespace auxrl::env {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

/// The four movement actions. Up decreases y (toward row 0).
enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::array<Action, 4> kAllActions{Action::Up, Action::Down,
                                                   Action::Left, Action::Right};

const char* action_name(Action a);
std::optional<Action> action_from_name(std::string_view name);

struct ObjectPlacement {
  char letter = '?';
  std::string proposition;
  std::string display_name;
  std::string room;
  Cell cell;
};

/// Immutable grid world: walls, a start cell, labelled object cells and named
/// room regions.
///
/// Map text is an ASCII grid of rows of equal length ('X' wall, '.' floor,
/// 'S' start, any other letter an object), followed by a legend section with
/// one line per object letter:
///
///     <letter> <proposition> "<display name>" <room>
///
/// plus room extents, one rectangle (inclusive, may repeat per room) per line:
///
///     room <x0> <y0> <x1> <y1> <room name>
///
/// Lines starting with '#' are comments. When both sections live in one file
/// the first blank line separates them.
class GridMap {
 public:
  static GridMap parse(std::string_view map_text, std::string_view legend_text);
  static GridMap from_text(std::string_view full_text);
  static GridMap from_file(const std::filesystem::path& path);

  int width() const { return width_; }
  int height() const { return height_; }
  Cell start_cell() const { return start_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  bool is_wall(Cell c) const { return walls_[index(c)]; }
  bool walkable(Cell c) const { return in_bounds(c) && !is_wall(c); }

  /// Objects sorted by proposition identifier.
  const std::vector<ObjectPlacement>& objects() const { return objects_; }
  const ObjectPlacement* object_at(Cell c) const;

  const std::map<std::string, std::set<Cell>>& rooms() const { return rooms_; }
  std::optional<std::string> room_of(Cell c) const;

  std::set<std::string> propositions() const;

 private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * width_ + c.x;
  }

  int width_ = 0;
  int height_ = 0;
  Cell start_;
  std::vector<char> walls_;                 // width*height flags
  std::vector<ObjectPlacement> objects_;
  std::map<Cell, std::size_t> object_by_cell_;
  std::map<std::string, std::set<Cell>> rooms_;
};

struct EnvState {
  Cell agent_cell;
  int steps_taken = 0;
};

/// Agent at the start cell, step counter zeroed.
EnvState reset(const GridMap& map);

/// Deterministic move: one cell in direction a, or stay put when blocked by a
/// wall or the boundary. steps_taken increments either way.
EnvState step(const GridMap& map, const EnvState& s, Action a);

/// {p} when the agent's cell holds the object with proposition p, else {}.
ltl::TruthAssignment label(const GridMap& map, const EnvState& s);

/// Per-cell visit counts; serialises as a CSV matrix with row 0 = y=0.
class Heatmap {
 public:
  Heatmap(int width, int height)
      : width_(width), height_(height),
        counts_(static_cast<std::size_t>(width) * height, 0) {}
  explicit Heatmap(const GridMap& map) : Heatmap(map.width(), map.height()) {}

  int width() const { return width_; }
  int height() const { return height_; }
  long long at(int x, int y) const {
    return counts_[static_cast<std::size_t>(y) * width_ + x];
  }
  long long total() const;
  void record(Cell c) { ++counts_[static_cast<std::size_t>(c.y) * width_ + c.x]; }

  void write_csv(std::ostream& out) const;

  bool operator==(const Heatmap&) const = default;

 private:
  int width_;
  int height_;
  std::vector<long long> counts_;
};

/// Increments the count at the agent's cell. Throws MapError when the state
/// lies outside the heatmap's dimensions.
void record_visit(Heatmap& heatmap, const EnvState& s);

}  // namespace auxrl::env
