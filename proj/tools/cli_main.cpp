#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyadlab.h"

namespace {

void print_line(const char* line, void*) { std::puts(line); }

struct Override {
  const char* key;
  std::string value;
  CLI::Option* opt = nullptr;
};

int die(const char* prefix) {
  std::fprintf(stderr, "%s: %s\n", prefix, dyadlab_last_error());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic weighted-multiplier laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".";
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out_dir, "output directory (created if missing)");

  std::vector<Override> ov;
  ov.reserve(16);
  auto add = [&](const char* flag, const char* key, const char* desc) {
    ov.push_back({key, "", nullptr});
    ov.back().opt = app.add_option(flag, ov.back().value, desc);
  };
  add("--d", "d", "dimension, 1..4");
  add("--L", "L", "dyadic depth, 2^(d L) cells");
  add("--seed", "seed", "master seed");
  add("--tol", "tol", "spectral relative tolerance");
  add("--corpus-count", "corpus_count", "number of generated weights");
  add("--corpus-a2-max", "corpus_a2_max", "top of the characteristic span");
  add("--sigma", "sigma", "multiplier: random | constant:V | file:PATH");
  add("--weight", "weight", "weight: family:NAME[,param=V][,seed=N] | file:PATH");
  add("--inequalities", "inequalities", "comma-separated audit id filter");
  add("--cases", "cases", "verify suite repetitions");
  add("--svg", "svg", "write sweep.svg (1 or 0)");

  app.add_subcommand("verify", "run the exact-identity suite");
  app.add_subcommand("generate", "write a weight corpus and its manifest");
  app.add_subcommand("audit", "evaluate every tracked inequality on a corpus");
  app.add_subcommand("norms", "nine-term norms for one weight and multiplier");
  app.add_subcommand("sweep", "norm growth across a corpus, with fits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  dyadlab_config* cfg = nullptr;
  dyadlab_status st = config_path.empty() ? dyadlab_config_create(&cfg)
                                          : dyadlab_config_load(config_path.c_str(), &cfg);
  if (st != DYADLAB_OK) return die("config");
  for (const Override& o : ov)
    if (o.opt->count() > 0 &&
        dyadlab_config_set(cfg, o.key, o.value.c_str()) != DYADLAB_OK) {
      int code = die(o.key);
      dyadlab_config_free(cfg);
      return code;
    }

  const std::string command = app.get_subcommands().front()->get_name();
  int exit_code = 0;
  st = dyadlab_run(cfg, command.c_str(), out_dir.c_str(), print_line, nullptr,
                   &exit_code);
  dyadlab_config_free(cfg);
  if (st != DYADLAB_OK) return die(command.c_str());
  return exit_code;
}
