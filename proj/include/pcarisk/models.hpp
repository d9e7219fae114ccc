#pragma once

#include "pcarisk/rng.hpp"
#include "pcarisk/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcarisk {

// Positive, non-increasing eigenvalue list. Index arguments named j, k, r, s
// throughout the library are 1-based spectral ranks.
class Spectrum {
public:
  explicit Spectrum(std::vector<double> values);

  int dim() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double lambda(int j) const;  // 1-based
  double trace() const;
  // Sum over j > r (strict) or j >= r.
  double partial_trace(int r, bool strict) const;
  double tr_gt(int r) const { return partial_trace(r, true); }
  double tr_geq(int r) const { return partial_trace(r, false); }
  double effective_rank() const;
  bool is_constant() const;

private:
  std::vector<double> values_;
};

enum class ModelKind { exponential, polynomial, spiked, isotropic, custom };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelParams {
  double alpha = 1.0;   // exponential / polynomial decay rate
  double x = 1.0;       // spiked gap
  double kappa = 1.0;   // spiked width
  int d = 1;            // number of spikes
  double sigma2 = 1.0;  // isotropic level
  // Explicit spike profile in [1+x, 1+kappa*x]; empty means all spikes at 1+x.
  std::vector<double> top_profile;
};

class CovModel {
public:
  CovModel(Spectrum spectrum, Matrix basis, ModelKind kind, ModelParams params);

  const Spectrum& spectrum() const { return spectrum_; }
  const Matrix& basis() const { return basis_; }
  ModelKind kind() const { return kind_; }
  const ModelParams& params() const { return params_; }
  int dim() const { return spectrum_.dim(); }
  double lambda(int j) const { return spectrum_.lambda(j); }
  const SymMatrix& covariance() const { return sigma_; }
  bool identity_basis() const { return identity_basis_; }

  CovModel with_basis(Matrix basis) const;

private:
  Spectrum spectrum_;
  Matrix basis_;
  ModelKind kind_;
  ModelParams params_;
  SymMatrix sigma_;
  bool identity_basis_;
};

CovModel make_model(ModelKind kind, const ModelParams& params, int p);
CovModel make_custom_model(const Spectrum& spectrum, std::optional<Matrix> basis = std::nullopt);

// Haar-distributed orthonormal p x p frame from QR of a Gaussian matrix.
Matrix random_orthonormal_frame(int p, RngStream& rng);

Spectrum read_spectrum(std::istream& in);
Spectrum read_spectrum_file(const std::string& path);
void write_spectrum(std::ostream& out, const Spectrum& spec);

}  // namespace pcarisk
