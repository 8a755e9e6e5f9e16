#include "dyadlab/io.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "oracles.hpp"

using namespace dyadlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "dyadlab_io_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("format_double round trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5, 0.0, 1e-300, 123456789.123456789,
                   0x1.fffffffffffffp-2}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-4.0) == "-4");
}

TEST_CASE("step function files round trip bit for bit") {
  GridSpec g = make_grid(2, 2);
  StepFunction f = oracle::random_cells(g, 701, -3.0, 3.0);
  f.cells[3] = 1.0 / 3.0;
  fs::path p = scratch() / "f.txt";
  save_step_function(p.string(), f, {{"note", "round trip"}});
  StepFunction back = load_step_function(p.string());
  CHECK(back.grid == g);
  REQUIRE(back.cells.size() == f.cells.size());
  for (size_t i = 0; i < f.cells.size(); ++i) CHECK(back.cells[i] == f.cells[i]);
}

TEST_CASE("malformed step function files carry the path in the error") {
  fs::path p = scratch() / "broken.txt";
  spill(p, "2 2\n1.0\n");  // too few cells
  try {
    load_step_function(p.string());
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(p.string()) != std::string::npos);
  }
  spill(p, "1 1\nhello\nworld\n");
  CHECK_THROWS_AS(load_step_function(p.string()), std::runtime_error);
  spill(p, "9 1\n1\n");  // parses, but names an unsupported grid
  CHECK_THROWS_AS(load_step_function(p.string()), std::invalid_argument);
  CHECK_THROWS_AS(load_step_function((scratch() / "missing.txt").string()),
                  std::runtime_error);
}

TEST_CASE("weight files keep the recipe and the characteristic") {
  GridSpec g = make_grid(1, 5);
  Weight w = generate_weight(g, {"w007", "cascade", 2.5, 707});
  fs::path p = scratch() / "w.txt";
  save_weight(p.string(), w);
  Weight back = load_weight(p.string());
  CHECK(back.recipe.id == "w007");
  CHECK(back.recipe.family == "cascade");
  CHECK(back.recipe.param == 2.5);
  CHECK(back.recipe.seed == 707);
  CHECK(back.a2 == w.a2);
  CHECK(oracle::max_abs_diff(back.w.cells, w.w.cells) == 0.0);
  CHECK(oracle::max_abs_diff(back.inv_root.cells, w.inv_root.cells) == 0.0);

  fs::path bad = scratch() / "wbad.txt";
  spill(bad, "1 1\n1.0\n-2.0\n");
  CHECK_THROWS_AS(load_weight(bad.string()), std::runtime_error);
}

TEST_CASE("symbol files in entry and constant form") {
  GridSpec g = make_grid(1, 2);
  SymbolSequence s = constant_symbol(g, 0.0);
  s.set(0, 1.5);
  s.set(2, -2.0);
  fs::path p = scratch() / "sym.txt";
  save_symbols(p.string(), s);
  SymbolSequence back = load_symbols(p.string(), g);
  for (int64_t i = 0; i < g.pair_count(); ++i) CHECK(back.at(i) == s.at(i));

  SymbolSequence c = constant_symbol(g, 0.75);
  fs::path pc = scratch() / "symc.txt";
  save_symbols(pc.string(), c);
  CHECK(slurp(pc).find("constant 0.75") != std::string::npos);
  SymbolSequence cback = load_symbols(pc.string(), g);
  for (int64_t i = 0; i < g.pair_count(); ++i) CHECK(cback.at(i) == 0.75);

  fs::path bad = scratch() / "symbad.txt";
  spill(bad, "1 2\n0 0 9 1.0\n");  // alpha out of range
  CHECK_THROWS_AS(load_symbols(bad.string(), g), std::runtime_error);
  spill(bad, "1 3\n0 0 1 1.0\n");  // wrong grid
  CHECK_THROWS_AS(load_symbols(bad.string(), g), std::runtime_error);
}

TEST_CASE("config text parsing") {
  ConfigMap cm = parse_config_text(
      "# a comment\n"
      "d = 2\n"
      "L=3\n"
      "\n"
      "sigma = random  # trailing comment\n"
      "d = 1\n");
  CHECK(cm.has("d"));
  CHECK(cm.get("d") == "1");  // later keys win on lookup
  CHECK(cm.get_int("L", 0) == 3);
  CHECK(cm.get("sigma") == "random");
  CHECK(cm.get("missing", "fallback") == "fallback");
  CHECK(cm.get_num("missing", 2.5) == 2.5);
  // file order survives for verbatim embedding
  REQUIRE(cm.entries.size() == 4);
  CHECK(cm.entries[0].first == "d");
  CHECK(cm.entries[0].second == "2");
  CHECK(cm.entries[3].second == "1");

  CHECK_THROWS_AS(parse_config_text("novalue\n"), std::runtime_error);

  fs::path p = scratch() / "cfg.txt";
  spill(p, "d = 1\nL = 4\n");
  ConfigMap fromfile = load_config(p.string());
  CHECK(fromfile.get_int("L", 0) == 4);
  CHECK_THROWS_AS(load_config((scratch() / "nope.cfg").string()), std::runtime_error);

  cm.set("L", "9");
  CHECK(cm.get_int("L", 0) == 9);
}
