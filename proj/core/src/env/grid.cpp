#include "auxrl/env/grid.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "auxrl/util/errors.hpp"

namespace auxrl::env {

const char* action_name(Action a) {
  switch (a) {
    case Action::Up: return "Up";
    case Action::Down: return "Down";
    case Action::Left: return "Left";
    case Action::Right: return "Right";
  }
  return "?";
}

std::optional<Action> action_from_name(std::string_view name) {
  for (Action a : kAllActions) {
    if (name == action_name(a)) return a;
  }
  return std::nullopt;
}

namespace {

bool is_comment_or_empty(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> grid_rows(std::string_view map_text) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(map_text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_empty(line)) continue;
    rows.push_back(line);
  }
  return rows;
}

struct LegendEntry {
  char letter;
  std::string proposition;
  std::string display_name;
  std::string room;
};

// `<letter> <proposition> "<display name>" <room with spaces>`
LegendEntry parse_object_line(const std::string& line) {
  std::istringstream in(line);
  std::string letter_tok, proposition;
  in >> letter_tok >> proposition;
  if (letter_tok.size() != 1 || proposition.empty()) {
    throw MapError("legend: expected '<letter> <proposition> \"<name>\" <room>': " + line);
  }
  std::string rest;
  std::getline(in, rest);
  const std::size_t open = rest.find('"');
  const std::size_t close = rest.find('"', open == std::string::npos ? open : open + 1);
  if (open == std::string::npos || close == std::string::npos) {
    throw MapError("legend: display name must be double-quoted: " + line);
  }
  LegendEntry e;
  e.letter = letter_tok[0];
  e.proposition = proposition;
  e.display_name = rest.substr(open + 1, close - open - 1);
  std::string room = rest.substr(close + 1);
  const auto first = room.find_first_not_of(" \t");
  const auto last = room.find_last_not_of(" \t");
  if (first == std::string::npos) throw MapError("legend: missing room name: " + line);
  e.room = room.substr(first, last - first + 1);
  return e;
}

bool valid_proposition(const std::string& p) {
  if (p.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(p[0])) && p[0] != '_') return false;
  for (char c : p) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return p != "true" && p != "false" && p != "U";
}

}  // namespace

GridMap GridMap::parse(std::string_view map_text, std::string_view legend_text) {
  GridMap m;

  const std::vector<std::string> rows = grid_rows(map_text);
  if (rows.empty()) throw MapError("map: no grid rows");
  m.height_ = static_cast<int>(rows.size());
  m.width_ = static_cast<int>(rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != m.width_) {
      throw MapError("map: rows must all have the same length");
    }
  }
  m.walls_.assign(static_cast<std::size_t>(m.width_) * m.height_, 0);

  // Legend before grid scan so object letters can be resolved in one pass.
  std::map<char, LegendEntry> legend;
  std::istringstream legend_in{std::string(legend_text)};
  std::string line;
  while (std::getline(legend_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_empty(line)) continue;
    std::istringstream probe(line);
    std::string first_tok;
    probe >> first_tok;
    if (first_tok == "room") {
      int x0, y0, x1, y1;
      if (!(probe >> x0 >> y0 >> x1 >> y1)) {
        throw MapError("legend: expected 'room <x0> <y0> <x1> <y1> <name>': " + line);
      }
      std::string name;
      std::getline(probe, name);
      const auto start = name.find_first_not_of(" \t");
      if (start == std::string::npos) throw MapError("legend: missing room name: " + line);
      name = name.substr(start);
      auto& cells = m.rooms_[name];
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) cells.insert(Cell{x, y});
      }
      continue;
    }
    LegendEntry e = parse_object_line(line);
    if (!valid_proposition(e.proposition)) {
      throw MapError("legend: proposition '" + e.proposition +
                     "' is not a valid formula atom");
    }
    if (legend.count(e.letter)) {
      throw MapError(std::string("legend: duplicate object letter '") + e.letter + "'");
    }
    for (const auto& [c, other] : legend) {
      if (other.proposition == e.proposition) {
        throw MapError("legend: duplicate proposition '" + e.proposition + "'");
      }
    }
    legend.emplace(e.letter, e);
  }

  bool start_seen = false;
  std::set<char> letters_seen;
  for (int y = 0; y < m.height_; ++y) {
    for (int x = 0; x < m.width_; ++x) {
      const char c = rows[y][static_cast<std::size_t>(x)];
      const Cell cell{x, y};
      if (c == '.') continue;
      if (c == 'X') {
        m.walls_[m.index(cell)] = 1;
        continue;
      }
      if (c == 'S') {
        if (start_seen) throw MapError("map: more than one start cell");
        start_seen = true;
        m.start_ = cell;
        continue;
      }
      auto it = legend.find(c);
      if (it == legend.end()) {
        throw MapError(std::string("map: unknown map symbol '") + c + "' at (" +
                       std::to_string(x) + "," + std::to_string(y) + ")");
      }
      if (letters_seen.count(c)) {
        throw MapError(std::string("map: object letter '") + c +
                       "' appears more than once");
      }
      letters_seen.insert(c);
      ObjectPlacement p;
      p.letter = c;
      p.proposition = it->second.proposition;
      p.display_name = it->second.display_name;
      p.room = it->second.room;
      p.cell = cell;
      m.objects_.push_back(std::move(p));
    }
  }
  if (!start_seen) throw MapError("map: missing start cell 'S'");
  for (const auto& [letter, entry] : legend) {
    if (!letters_seen.count(letter)) {
      throw MapError(std::string("legend: letter '") + letter +
                     "' does not appear in the map");
    }
  }

  std::sort(m.objects_.begin(), m.objects_.end(),
            [](const ObjectPlacement& a, const ObjectPlacement& b) {
              return a.proposition < b.proposition;
            });
  for (std::size_t i = 0; i < m.objects_.size(); ++i) {
    m.object_by_cell_.emplace(m.objects_[i].cell, i);
  }
  return m;
}

GridMap GridMap::from_text(std::string_view full_text) {
  // The first blank line splits grid rows from the legend.
  const std::string text(full_text);
  std::istringstream in(text);
  std::string line, grid_part, legend_part;
  bool in_grid = true;
  while (std::getline(in, line)) {
    std::string stripped = line;
    if (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
    if (in_grid && stripped.find_first_not_of(" \t") == std::string::npos) {
      in_grid = false;
      continue;
    }
    (in_grid ? grid_part : legend_part) += stripped + "\n";
  }
  return parse(grid_part, legend_part);
}

GridMap GridMap::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MapError("map: cannot open file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

const ObjectPlacement* GridMap::object_at(Cell c) const {
  auto it = object_by_cell_.find(c);
  return it == object_by_cell_.end() ? nullptr : &objects_[it->second];
}

std::optional<std::string> GridMap::room_of(Cell c) const {
  for (const auto& [name, cells] : rooms_) {
    if (cells.count(c)) return name;
  }
  return std::nullopt;
}

std::set<std::string> GridMap::propositions() const {
  std::set<std::string> props;
  for (const auto& o : objects_) props.insert(o.proposition);
  return props;
}

EnvState reset(const GridMap& map) { return EnvState{map.start_cell(), 0}; }

EnvState step(const GridMap& map, const EnvState& s, Action a) {
  Cell next = s.agent_cell;
  switch (a) {
    case Action::Up: next.y -= 1; break;
    case Action::Down: next.y += 1; break;
    case Action::Left: next.x -= 1; break;
    case Action::Right: next.x += 1; break;
  }
  if (!map.walkable(next)) next = s.agent_cell;
  return EnvState{next, s.steps_taken + 1};
}

ltl::TruthAssignment label(const GridMap& map, const EnvState& s) {
  ltl::TruthAssignment sigma;
  if (const ObjectPlacement* obj = map.object_at(s.agent_cell)) {
    sigma.insert(obj->proposition);
  }
  return sigma;
}

long long Heatmap::total() const {
  long long sum = 0;
  for (long long c : counts_) sum += c;
  return sum;
}

void Heatmap::write_csv(std::ostream& out) const {
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (x > 0) out << ',';
      out << at(x, y);
    }
    out << '\n';
  }
}

void record_visit(Heatmap& heatmap, const EnvState& s) {
  const Cell c = s.agent_cell;
  if (c.x < 0 || c.x >= heatmap.width() || c.y < 0 || c.y >= heatmap.height()) {
    throw MapError("record_visit: state outside heatmap dimensions");
  }
  heatmap.record(c);
}

}  // namespace auxrl::env
