#pragma once
// Harmonic functions on annuli written as  u = d log|z| + Re sum_k a_k z^k,
// with closed-form (Parseval) energies and brute-force checks of the annulus
// estimates.

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace wspectra::harmonics {

using cplx = std::complex<double>;

struct LaurentHarmonic {
  double d = 0.0;
  std::map<int, cplx> coeffs;  // k in [-K, K], K <= 64

  int K() const;  // largest |k| carried
  double value(cplx z) const;
  void validate() const;
};

struct AnnulusSpec {
  double a = 0.0;  // 0 means the full disk
  double b = 1.0;
  void validate() const;
};

struct CheckReport {
  double max_ratio = 0.0;  // left side / right side, maximized over the tested range
  bool pass = false;
};

double dirichlet_energy(const LaurentHarmonic& h, const AnnulusSpec& ann);
// 2 d_z u = d/z + sum k a_k z^{k-1}; its modulus is |grad u|.
cplx gradient_at(const LaurentHarmonic& h, cplx z);

CheckReport check_pointwise_bound(const LaurentHarmonic& h, const AnnulusSpec& ann, int circles = 64,
                                  int angles = 256);
CheckReport check_average_bound(const LaurentHarmonic& h, const AnnulusSpec& ann, int radii = 33);
CheckReport monotonicity_report(const LaurentHarmonic& h, const AnnulusSpec& ann, double t);
bool check_monotonicity(const LaurentHarmonic& h, const AnnulusSpec& ann, double t);
CheckReport ball_decay_report(const LaurentHarmonic& h);
bool check_ball_decay(const LaurentHarmonic& h);

struct SequenceReport {
  bool hypothesis_holds = false;
  bool conclusion_holds = false;
  double max_ratio = 0.0;   // LHS / RHS of the conclusion over k in [N1, N2]
  double constant = 0.0;    // 2 Gamma (1/(1-st) + 1/(1-s/t))
  int first_bad_k = -1;
};

// Sequences are indexed from 0 and finitely supported (zero past the end).
SequenceReport check_sequence_lemma(const std::vector<double>& a, const std::vector<double>& b, double s, double t,
                                    double Gamma, int N1, int N2);

// Discretized L^{2,1} norm of |grad u| on Omega_t against 64 sqrt(pi/15) t/(1-t) ||grad u||_{L^2(Omega)}.
CheckReport check_improved_regularity(const LaurentHarmonic& h, const AnnulusSpec& ann, double t,
                                      int radial = 512, int angular = 256);

enum class CorpusKind { zero_flux, positive_modes };
LaurentHarmonic random_harmonic(std::mt19937_64& rng, int K, CorpusKind kind);

// Random instance built to satisfy the hypothesis: b_k absorbs whatever part
// of a_k the s-weighted tail does not cover.
struct SequenceInstance {
  std::vector<double> a, b;
  double s = 0.25, t = 0.5, Gamma = 1.0;
  int N1 = 0, N2 = 0;
};
SequenceInstance random_sequence_instance(std::mt19937_64& rng, int length = 24);

struct SuiteReport {
  int count = 0;
  int pointwise_fail = 0, average_fail = 0, mono_fail = 0, ball_fail = 0, sequence_fail = 0;
  double pointwise_max = 0.0, average_max = 0.0, mono_max = 0.0, ball_max = 0.0, sequence_max = 0.0;
  double equality_ratio = 0.0;  // monotonicity ratio of Re z on the unit disk at t = 1/2
  bool pass() const;
};
// `count` random zero-flux harmonics on (a, b) (pointwise, average and
// monotonicity at four t values) plus `count` positive-mode ones (ball decay),
// seeded deterministically.
SuiteReport verify_harmonic_suite(std::uint64_t seed, int count, const AnnulusSpec& ann, int K = 8);
// `count` random sequence-lemma instances.
SuiteReport verify_sequence_suite(std::uint64_t seed, int count);

std::string to_json(const LaurentHarmonic& h);
LaurentHarmonic from_json(const std::string& text);

}  // namespace wspectra::harmonics
