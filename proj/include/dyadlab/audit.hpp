#pragma once

#include <string>
#include <vector>

#include "dyadlab/haar.hpp"
#include "dyadlab/spectral.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

// One audited inequality: ratio = max over root pairs (I,alpha) of LHS/RHS,
// lhs_max / rhs_base are the two sides at the maximizing pair.
struct AuditRecord {
  std::string inequality_id;
  std::string weight_id;
  int d = 1, L = 1;
  double a2 = 1.0;
  double lhs_max = 0.0;
  double rhs_base = 0.0;
  double ratio = 0.0;
  std::string witness_cube;
  AlphaIndex witness_alpha = 1;
};
using AuditReport = std::vector<AuditRecord>;

// Nested-sum bounds over E_{beta,J} subset-of E_{alpha,I} (inclusive), their
// w <-> 1/w mirrors, and the pointwise disbalance / set-average /
// set-characteristic checks.  One record per inequality id, deterministic
// order.  Sums are aggregated bottom-up in one pass per inequality.
AuditReport audit_lemma_sums(const Weight& w);

// Nonnegative pair-indexed sequence for the embedding theorem.
struct CarlesonInput {
  std::vector<double> a;
};

// The sequence driving the square-function estimate: a_p =
// |(1/sqrt w)-hat(p)|^2 <w>_{J(p)} / ([w]^2 <w>_{E_p}^2); identically zero
// for constant weights.
CarlesonInput corpus_carleson_sequence(const Weight& w);

// testing_A: best constant with
//   sum_{(J,beta): E subset-of E_{alpha,I}} a <w>^2_{E_{beta,J}}
//     <= A |E_{alpha,I}| <w>_{E_{alpha,I}}   for all (I, alpha),
// top pair included.  embedding_B: the norm of the embedding
//   sum a_p <w^{1/2} f>^2_{E_p} <= B ||f||^2,
// computed as the top eigenvalue of the induced nonnegative form.  Testing
// functions w^{1/2} 1_{E_p} force B >= A, so ratio = B/A >= 1 whenever the
// sequence is not identically zero; ratio is 0 in the vacuous all-zero case.
struct CarlesonResult {
  double testing_A = 0.0;
  double embedding_B = 0.0;
  double ratio = 0.0;
  std::string witness_cube;
  AlphaIndex witness_alpha = 1;
};
CarlesonResult carleson_constants(const Weight& w, const CarlesonInput& input,
                                  const NormOptions& opt = {});

// Best constants in the two-sided square-function estimate on the mean-zero
// span: <D_w f, f> <= c_plus <w f, f> and <w f, f> <= c_minus <D_w f, f>,
// where D_w is the Haar diagonal <w>_I.  Both are 1 for the unit weight.
struct SquareFunctionResult {
  double c_plus = 0.0;
  double c_minus = 0.0;
};
SquareFunctionResult square_function_constants(const Weight& w,
                                               const NormOptions& opt = {});

// Parseval in L2(w) for the weight-adapted system over `cases` seeded random
// step functions; returns the max relative error of
// ||f||^2_w = <f>_w^2 w([0,1)^d) + sum of squared weighted coefficients.
double audit_weighted_haar_parseval(const Weight& w, int cases, uint64_t seed);

}  // namespace dyadlab
