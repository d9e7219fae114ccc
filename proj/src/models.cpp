#include "pcarisk/models.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace pcarisk {

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Spectrum: empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] <= 0.0)
      throw std::invalid_argument("Spectrum: eigenvalues must be finite and positive");
    if (i > 0 && values_[i] > values_[i - 1])
      throw std::invalid_argument("Spectrum: eigenvalues must be non-increasing");
  }
}

double Spectrum::lambda(int j) const {
  if (j < 1 || j > dim()) throw std::out_of_range("Spectrum: index out of range");
  return values_[static_cast<std::size_t>(j - 1)];
}

double Spectrum::trace() const { return partial_trace(0, true); }

double Spectrum::partial_trace(int r, bool strict) const {
  if (r < 0 || r > dim()) throw std::out_of_range("partial_trace: index out of range");
  const int first = strict ? r + 1 : std::max(r, 1);
  double sum = 0.0;
  // Smallest first: the tail of a decaying spectrum keeps its digits.
  for (int j = dim(); j >= first; --j) sum += values_[static_cast<std::size_t>(j - 1)];
  return sum;
}

double Spectrum::effective_rank() const { return trace() / values_.front(); }

bool Spectrum::is_constant() const { return values_.front() == values_.back(); }

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::exponential: return "exponential";
    case ModelKind::polynomial: return "polynomial";
    case ModelKind::spiked: return "spiked";
    case ModelKind::isotropic: return "isotropic";
    case ModelKind::custom: return "custom";
  }
  return "custom";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::exponential, ModelKind::polynomial, ModelKind::spiked,
                 ModelKind::isotropic, ModelKind::custom})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown model kind: " + std::string(name));
}

CovModel::CovModel(Spectrum spectrum, Matrix basis, ModelKind kind, ModelParams params)
    : spectrum_(std::move(spectrum)), basis_(std::move(basis)), kind_(kind), params_(std::move(params)) {
  const int p = spectrum_.dim();
  if (basis_.rows() != p || basis_.cols() != p)
    throw std::invalid_argument("CovModel: basis has wrong shape");
  const Matrix gram = basis_.transpose() * basis_;
  if ((gram - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("CovModel: basis is not orthonormal");
  identity_basis_ = basis_ == Matrix::Identity(p, p);
  const Vector lam = Eigen::Map<const Vector>(spectrum_.values().data(), p);
  if (identity_basis_) {
    sigma_ = SymMatrix::diagonal(lam);
  } else {
    sigma_ = SymMatrix(Matrix(basis_ * lam.asDiagonal() * basis_.transpose()));
  }
}

CovModel CovModel::with_basis(Matrix basis) const {
  return CovModel(spectrum_, std::move(basis), kind_, params_);
}

CovModel make_model(ModelKind kind, const ModelParams& prm, int p) {
  if (p < 1) throw std::invalid_argument("make_model: p must be positive");
  std::vector<double> v(static_cast<std::size_t>(p));
  switch (kind) {
    case ModelKind::exponential:
      if (!(prm.alpha > 0.0)) throw std::invalid_argument("exponential model needs alpha > 0");
      for (int j = 1; j <= p; ++j) v[static_cast<std::size_t>(j - 1)] = std::exp(-prm.alpha * j);
      break;
    case ModelKind::polynomial:
      if (!(prm.alpha > 1.0)) throw std::invalid_argument("polynomial model needs alpha > 1");
      for (int j = 1; j <= p; ++j) v[static_cast<std::size_t>(j - 1)] = std::pow(double(j), -prm.alpha);
      break;
    case ModelKind::spiked: {
      if (!(prm.x >= 0.0)) throw std::invalid_argument("spiked model needs x >= 0");
      if (!(prm.kappa >= 1.0)) throw std::invalid_argument("spiked model needs kappa >= 1");
      if (prm.d < 1 || prm.d >= p) throw std::invalid_argument("spiked model needs 1 <= d < p");
      const double lo = 1.0 + prm.x;
      const double hi = 1.0 + prm.kappa * prm.x;
      if (!prm.top_profile.empty() && static_cast<int>(prm.top_profile.size()) != prm.d)
        throw std::invalid_argument("spiked model: top profile must have d entries");
      for (int j = 0; j < p; ++j) {
        double val = 1.0;
        if (j < prm.d) {
          val = prm.top_profile.empty() ? lo : prm.top_profile[static_cast<std::size_t>(j)];
          if (val < lo || val > hi)
            throw std::invalid_argument("spiked model: profile value outside [1+x, 1+kappa*x]");
        }
        v[static_cast<std::size_t>(j)] = val;
      }
      break;
    }
    case ModelKind::isotropic:
      if (!(prm.sigma2 > 0.0)) throw std::invalid_argument("isotropic model needs sigma2 > 0");
      std::fill(v.begin(), v.end(), prm.sigma2);
      break;
    case ModelKind::custom:
      throw std::invalid_argument("make_model: use make_custom_model for custom spectra");
  }
  return CovModel(Spectrum(std::move(v)), Matrix::Identity(p, p), kind, prm);
}

CovModel make_custom_model(const Spectrum& spectrum, std::optional<Matrix> basis) {
  const int p = spectrum.dim();
  return CovModel(spectrum, basis ? *basis : Matrix::Identity(p, p), ModelKind::custom, {});
}

Matrix random_orthonormal_frame(int p, RngStream& rng) {
  Matrix g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign fix so that the distribution is Haar rather than QR-biased.
  for (int j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Spectrum read_spectrum(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double v;
    if (ls >> v) values.push_back(v);
  }
  return Spectrum(std::move(values));
}

Spectrum read_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file: " + path);
  return read_spectrum(in);
}

void write_spectrum(std::ostream& out, const Spectrum& spec) {
  for (double v : spec.values()) out << std::setprecision(17) << v << '\n';
}

}  // namespace pcarisk
