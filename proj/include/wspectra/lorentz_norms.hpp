#pragma once
// Rearrangement-invariant norms of sampled fields: each sample is a value
// |f_i| attached to a cell of measure mu_i, so the distribution function is
// an exact step function.

#include <string>
#include <vector>

namespace wspectra::lorentz {

struct SampledField {
  std::vector<double> values;    // |f| >= 0
  std::vector<double> measures;  // > 0
  void validate() const;
};

double norm_l2(const SampledField& f);
// sup_s s^{-1/2} \int_0^s f^*, evaluated at every breakpoint of f^*.
double norm_l2_weak(const SampledField& f);
// 4 \int_0^\infty lambda_f(t)^{1/2} dt.
double norm_l21(const SampledField& f);

struct DualityReport {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool pass = false;
};
DualityReport duality_pairing_check(const SampledField& f, const SampledField& g);

// 1/|x| on the annulus a < |x| < b, log-uniform radial cells x uniform angles.
SampledField inverse_radius_field(double a, double b, int radial, int angular);

SampledField read_csv(const std::string& path);

}  // namespace wspectra::lorentz
