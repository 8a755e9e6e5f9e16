#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dyadlab/grid.hpp"
#include "dyadlab/symbols.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

// Step-function files: optional "# key = value" metadata lines, a "d L"
// header, then one cell value per line in row-major order, printed with
// enough digits to round-trip doubles exactly.  All loaders throw
// std::runtime_error carrying the path on malformed input.
void save_step_function(const std::string& path, const StepFunction& f,
                        const std::vector<std::pair<std::string, std::string>>& meta = {});
StepFunction load_step_function(const std::string& path);

// Weight files are step-function files whose metadata carries the recipe
// (id, family, param, seed); loading rebuilds the caches and characteristic.
void save_weight(const std::string& path, const Weight& w);
Weight load_weight(const std::string& path);

// Symbol files: either entry form ("d L" header then lines
// "level k0 .. k_{d-1} alpha value"; unlisted pairs are 0) or a constant
// form, the single line "constant v", accepted with or without the header.
// The writer emits the bare constant form when every entry agrees.
void save_symbols(const std::string& path, const SymbolSequence& s);
SymbolSequence load_symbols(const std::string& path, const GridSpec& g);

// Line-oriented "key = value" text; '#' starts a comment, blank lines are
// skipped, later keys override earlier ones on lookup but file order is kept
// for verbatim embedding in output headers.
struct ConfigMap {
  std::vector<std::pair<std::string, std::string>> entries;

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_num(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  void set(const std::string& key, const std::string& value);
};
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config(const std::string& path);

std::string format_double(double v);  // shortest exact round-trip decimal

}  // namespace dyadlab
