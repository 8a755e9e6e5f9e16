#include "dyadlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dyadlab {

std::string format_double(double v) {
  char buf[40];
  // %.17g round-trips every double; shorten when fewer digits already do
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] static void fail(const std::string& path, const std::string& why) {
  throw std::runtime_error(path + ": " + why);
}

static std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void save_step_function(const std::string& path, const StepFunction& f,
                        const std::vector<std::pair<std::string, std::string>>& meta) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (const auto& kv : meta) out << "# " << kv.first << " = " << kv.second << "\n";
  out << f.grid.d << " " << f.grid.L << "\n";
  for (double v : f.cells) out << format_double(v) << "\n";
  if (!out) fail(path, "write failed");
}

// shared scanner: collects "# key = value" metadata, grid header, payload lines
struct ParsedFile {
  std::vector<std::pair<std::string, std::string>> meta;
  bool has_grid = false;
  GridSpec grid;
  std::vector<std::string> payload;
};

static ParsedFile scan_file(const std::string& path) {
  ParsedFile pf;
  for (const std::string& raw : read_lines(path)) {
    std::string line = trimmed(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trimmed(line.substr(1));
      size_t eq = body.find('=');
      if (eq != std::string::npos)
        pf.meta.emplace_back(trimmed(body.substr(0, eq)), trimmed(body.substr(eq + 1)));
      continue;
    }
    if (!pf.has_grid && pf.payload.empty()) {
      std::istringstream hdr(line);
      int d = 0, L = 0;
      if (hdr >> d >> L) {
        std::string rest;
        if (!(hdr >> rest)) {
          pf.grid = make_grid(d, L);
          pf.has_grid = true;
          continue;
        }
      }
    }
    pf.payload.push_back(line);
  }
  return pf;
}

StepFunction load_step_function(const std::string& path) {
  ParsedFile pf = scan_file(path);
  if (!pf.has_grid) fail(path, "missing grid header line \"d L\"");
  StepFunction f = constant_function(pf.grid, 0.0);
  if (int64_t(pf.payload.size()) != pf.grid.cell_count())
    fail(path, "expected " + std::to_string(pf.grid.cell_count()) + " cell lines, got " +
                   std::to_string(pf.payload.size()));
  for (size_t i = 0; i < pf.payload.size(); ++i) {
    const std::string& s = pf.payload[i];
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      fail(path, "bad cell value on line: " + s);
    f.cells[i] = v;
  }
  return f;
}

void save_weight(const std::string& path, const Weight& w) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("id", w.recipe.id);
  meta.emplace_back("family", w.recipe.family);
  meta.emplace_back("param", format_double(w.recipe.param));
  meta.emplace_back("seed", std::to_string(w.recipe.seed));
  meta.emplace_back("a2", format_double(w.a2));
  save_step_function(path, w.w, meta);
}

Weight load_weight(const std::string& path) {
  ParsedFile pf = scan_file(path);
  WeightRecipe r;
  for (const auto& kv : pf.meta) {
    if (kv.first == "id") r.id = kv.second;
    if (kv.first == "family") r.family = kv.second;
    if (kv.first == "param") r.param = std::stod(kv.second);
    if (kv.first == "seed") r.seed = std::stoull(kv.second);
  }
  StepFunction cells = load_step_function(path);
  try {
    return make_weight(cells, r);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

void save_symbols(const std::string& path, const SymbolSequence& s) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  const std::vector<double>& v = s.values();
  bool constant = true;
  for (double x : v)
    if (x != v[0]) {
      constant = false;
      break;
    }
  if (constant && !v.empty()) {
    out << "constant " << format_double(v[0]) << "\n";
    if (!out) fail(path, "write failed");
    return;
  }
  const GridSpec& g = s.grid();
  const GridTables& t = grid_tables(g);
  out << g.d << " " << g.L << "\n";
  for (int l = 0; l < g.L; ++l)
    for (int64_t m = 0; m < g.cubes_at(l); ++m) {
      Cube c = cube_from_morton(g, l, uint64_t(m));
      for (AlphaIndex a = 1; a < AlphaIndex(g.fanout()); ++a) {
        double x = s.at(pair_index(t, l, uint64_t(m), a));
        if (x == 0.0) continue;
        out << l;
        for (int i = 0; i < g.d; ++i) out << " " << c.coord[size_t(i)];
        out << " " << a << " " << format_double(x) << "\n";
      }
    }
  if (!out) fail(path, "write failed");
}

SymbolSequence load_symbols(const std::string& path, const GridSpec& g) {
  ParsedFile pf = scan_file(path);
  if (pf.has_grid && pf.grid != g)
    fail(path, "symbol grid does not match the requested grid");
  const GridTables& t = grid_tables(g);
  SymbolSequence s = constant_symbol(g, 0.0);
  for (const std::string& line : pf.payload) {
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "constant") {
      double v = 0.0;
      if (!(ls >> v)) fail(path, "bad constant line: " + line);
      if (pf.payload.size() != 1) fail(path, "constant form must be the only entry");
      return constant_symbol(g, v);
    }
    Cube c;
    try {
      c.level = std::stoi(head);
    } catch (const std::exception&) {
      fail(path, "bad symbol line: " + line);
    }
    if (c.level < 0 || c.level >= g.L) fail(path, "pair level out of range: " + line);
    for (int i = 0; i < g.d; ++i)
      if (!(ls >> c.coord[size_t(i)]) || c.coord[size_t(i)] < 0 ||
          c.coord[size_t(i)] >= (int32_t(1) << c.level))
        fail(path, "bad cube coordinate: " + line);
    uint32_t alpha = 0;
    double v = 0.0;
    if (!(ls >> alpha >> v) || alpha < 1 || alpha >= uint32_t(g.fanout()))
      fail(path, "bad symbol entry: " + line);
    s.set(pair_index(t, c.level, morton_from_cube(g, c), alpha), v);
  }
  return s;
}

bool ConfigMap::has(const std::string& key) const {
  for (const auto& kv : entries)
    if (kv.first == key) return true;
  return false;
}

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
  std::string out = fallback;
  for (const auto& kv : entries)
    if (kv.first == key) out = kv.second;
  return out;
}

double ConfigMap::get_num(const std::string& key, double fallback) const {
  std::string s = get(key);
  if (s.empty()) return fallback;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw std::runtime_error("config value for '" + key + "' is not a number: " + s);
  }
}

int64_t ConfigMap::get_int(const std::string& key, int64_t fallback) const {
  std::string s = get(key);
  if (s.empty()) return fallback;
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    throw std::runtime_error("config value for '" + key + "' is not an integer: " + s);
  }
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cm;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string s = trimmed(line);
    if (s.empty() || s[0] == '#') continue;
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = trimmed(s.substr(0, hash));
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line has no '=': " + s);
    cm.set(trimmed(s.substr(0, eq)), trimmed(s.substr(eq + 1)));
  }
  return cm;
}

ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

}  // namespace dyadlab
