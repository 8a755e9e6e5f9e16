#include "dyadlab/audit.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

using namespace dyadlab;

namespace {

std::map<std::string, AuditRecord> by_id(const AuditReport& report) {
  std::map<std::string, AuditRecord> m;
  for (const AuditRecord& r : report) m[r.inequality_id] = r;
  return m;
}

bool is_pointwise(const std::string& id) {
  return id.rfind("disbalance_sq_vs_setavg", 0) == 0 ||
         id.rfind("setavg_vs_cubeavg", 0) == 0 || id == "set_a2_product";
}

}  // namespace

TEST_CASE("lemma audit emits one record per inequality, deterministically") {
  GridSpec g = make_grid(1, 4);
  Weight w = generate_weight(g, {"c", "cascade", 3.0, 601});
  AuditReport a = audit_lemma_sums(w);
  AuditReport b = audit_lemma_sums(w);
  REQUIRE(a.size() == 23);
  REQUIRE(b.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].inequality_id == b[i].inequality_id);
    CHECK(a[i].ratio == b[i].ratio);
    CHECK(a[i].weight_id == "c");
    CHECK(a[i].d == 1);
    CHECK(a[i].L == 4);
    CHECK(a[i].a2 == w.a2);
    CHECK(std::isfinite(a[i].ratio));
    CHECK(a[i].ratio >= 0.0);
    CHECK(!a[i].witness_cube.empty());
    if (a[i].rhs_base > 0.0)
      CHECK(a[i].ratio == doctest::Approx(a[i].lhs_max / a[i].rhs_base).epsilon(1e-12));
  }
  auto m = by_id(a);
  CHECK(m.size() == 23);  // no duplicate ids
  for (const char* id : {"sq_invroot_cubeavg", "sq_invroot_setavg_swap",
                         "sq_inverse_over_avg3", "prod_w_inverse_over_avg_swap",
                         "prod_root_invroot", "prod_w_inverse", "set_a2_product"})
    CHECK(m.count(id) == 1);
}

TEST_CASE("unit weight collapses the coefficient sums") {
  GridSpec g = make_grid(2, 2);
  Weight w = make_weight(constant_function(g, 1.0), {"unit", "constant", 1.0, 0});
  for (const AuditRecord& r : audit_lemma_sums(w)) {
    if (r.inequality_id.rfind("sq_", 0) == 0 || r.inequality_id.rfind("prod_", 0) == 0)
      CHECK(r.ratio < 1e-14);  // every coefficient of a constant vanishes
    if (r.inequality_id.rfind("disbalance_sq_vs_setavg", 0) == 0)
      CHECK(r.ratio == doctest::Approx(0.25).epsilon(1e-12));
    if (r.inequality_id.rfind("setavg_vs_cubeavg", 0) == 0)
      CHECK(r.ratio == doctest::Approx(0.5).epsilon(1e-12));
    if (r.inequality_id == "set_a2_product")
      CHECK(r.ratio == doctest::Approx(1.0 / 16).epsilon(1e-12));
  }
}

TEST_CASE("pointwise bounds hold exactly on random weights") {
  for (int d : {1, 2}) {
    GridSpec g = make_grid(d, d == 1 ? 6 : 3);
    for (uint64_t s : {611u, 612u, 613u}) {
      Weight w = make_weight(oracle::random_cells(g, s + uint64_t(d), 0.1, 10.0));
      for (const AuditRecord& r : audit_lemma_sums(w)) {
        CHECK(std::isfinite(r.ratio));
        if (is_pointwise(r.inequality_id)) CHECK(r.ratio <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("nested sums stay inside the growth envelope on a small corpus") {
  GridSpec g = make_grid(1, 6);
  CorpusResult corpus = weight_corpus(g, 6, 30.0, 617);
  for (const CorpusEntry& e : corpus.entries) {
    Weight w = generate_weight(g, e.recipe);
    for (const AuditRecord& r : audit_lemma_sums(w)) CHECK(r.ratio <= 64.0);
  }
}

TEST_CASE("one nested sum against the quadratic oracle") {
  GridSpec g = make_grid(1, 3);
  Weight w = make_weight(oracle::random_cells(g, 621, 0.25, 4.0));
  HaarSpectrum hir = analyze(w.cinv_root);
  auto pairs = oracle::all_pairs(g);
  std::vector<double> q(pairs.size());
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto& [cube, alpha] = pairs[p];
    double aw = w.cw.set_sum(cube.level, morton_from_cube(g, cube), alpha) /
                double(set_cell_count(g, cube.level, alpha));
    q[p] = hir.coeffs[p] * hir.coeffs[p] * aw;
  }
  std::vector<double> inc = oracle::brute_nested_inclusive(g, q);
  double want = 0.0;
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto& [cube, alpha] = pairs[p];
    double rhs = w.a2 * w.a2 * oracle::set_abs_measure(g, cube.level, alpha);
    want = std::max(want, inc[p] / rhs);
  }
  auto m = by_id(audit_lemma_sums(w));
  CHECK(m["sq_invroot_setavg"].ratio == doctest::Approx(want).epsilon(1e-11));
}

TEST_CASE("carleson constants: vacuous, exact, and validated cases") {
  GridSpec g = make_grid(1, 4);
  Weight unit = make_weight(constant_function(g, 1.0));
  // the corpus sequence of a constant weight vanishes identically
  CarlesonInput zero = corpus_carleson_sequence(unit);
  for (double v : zero.a) CHECK(v == 0.0);
  CarlesonResult rz = carleson_constants(unit, zero);
  CHECK(rz.testing_A == 0.0);
  CHECK(rz.embedding_B < 1e-12);
  CHECK(rz.ratio == 0.0);

  // unit mass on the root pair: both constants are exactly 1 for w = 1
  CarlesonInput root;
  root.a.assign(size_t(g.pair_count()), 0.0);
  root.a[0] = 1.0;
  CarlesonResult r1 = carleson_constants(unit, root);
  CHECK(r1.testing_A == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1.embedding_B == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r1.ratio == doctest::Approx(1.0).epsilon(1e-9));

  CarlesonInput bad;
  bad.a.assign(3, 1.0);
  CHECK_THROWS_AS(carleson_constants(unit, bad), std::invalid_argument);
  CarlesonInput neg;
  neg.a.assign(size_t(g.pair_count()), 0.0);
  neg.a[2] = -1.0;
  CHECK_THROWS_AS(carleson_constants(unit, neg), std::invalid_argument);
}

TEST_CASE("carleson embedding dominates its testing constant") {
  GridSpec g = make_grid(1, 6);
  for (uint64_t s : {631u, 632u}) {
    Weight w = generate_weight(g, {"c", "cascade", 5.0, s});
    CarlesonInput in = corpus_carleson_sequence(w);
    bool vacuous = true;
    for (double v : in.a) vacuous = vacuous && v == 0.0;
    REQUIRE(!vacuous);
    CarlesonResult r = carleson_constants(w, in);
    CHECK(r.testing_A > 0.0);
    CHECK(r.embedding_B >= r.testing_A * (1.0 - 1e-9));
    CHECK(r.ratio == doctest::Approx(r.embedding_B / r.testing_A).epsilon(1e-12));
    CHECK(r.ratio <= 16.0);
    CHECK(!r.witness_cube.empty());
  }
}

TEST_CASE("square function constants") {
  GridSpec g = make_grid(1, 5);
  Weight unit = make_weight(constant_function(g, 1.0));
  SquareFunctionResult ru = square_function_constants(unit);
  CHECK(ru.c_plus == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ru.c_minus == doctest::Approx(1.0).epsilon(1e-8));

  for (uint64_t s : {641u, 642u}) {
    Weight w = generate_weight(g, {"c", "cascade", 4.0, s});
    SquareFunctionResult r = square_function_constants(w);
    CHECK(r.c_plus > 0.0);
    CHECK(r.c_minus > 0.0);
    CHECK(r.c_plus <= 16.0 * w.a2 * w.a2 * (1.0 + 1e-9));
    CHECK(r.c_minus <= 16.0 * w.a2 * (1.0 + 1e-9));
  }
}

TEST_CASE("weighted parseval across random functions") {
  for (int d : {1, 2}) {
    GridSpec g = make_grid(d, d == 1 ? 6 : 3);
    Weight w = generate_weight(g, {"c", "cascade", 3.0, 651 + uint64_t(d)});
    CHECK(audit_weighted_haar_parseval(w, 10, 652) < 1e-10);
  }
}
