#include "vvkrr/estimator.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "vvkrr/errors.hpp"
#include "vvkrr/textio.hpp"

namespace vvkrr {

namespace {

constexpr std::string_view kModelMagic = "vvkrr-model";
constexpr int kModelVersion = 1;

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("regularization lambda must be positive and finite");
  }
}

}  // namespace

void Dataset::validate(const KernelSpec& kernel) const {
  if (x.size() == 0) throw std::invalid_argument("dataset is empty");
  if (y.rows() != x.size()) throw DimensionError("dataset has mismatched x and y row counts");
  if (y.cols() == 0) throw DimensionError("dataset responses have zero dimension");
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("dataset contains non-finite entries");
  for (Eigen::Index t = 0; t < x.size(); ++t) kernel.check_domain(x[t]);
}

FittedModel::FittedModel(KernelSpec kernel, Eigen::VectorXd train_x, Eigen::MatrixXd weights, double lambda,
                         std::optional<Eigen::MatrixXd> output_sqrt)
    : kernel_(std::move(kernel)),
      train_x_(std::move(train_x)),
      weights_(std::move(weights)),
      lambda_(lambda),
      output_sqrt_(std::move(output_sqrt)) {
  check_lambda(lambda_);
  if (weights_.rows() != train_x_.size()) throw DimensionError("weights rows must match training points");
}

double fit_residual(const FittedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  Eigen::MatrixXd k = gram_matrix(model.kernel(), model.train_x());
  const double shift = static_cast<double>(model.size()) * model.lambda();
  k.diagonal().array() += shift;
  return (k * model.weights() - y).cwiseAbs().maxCoeff();
}

FittedModel fit(const KernelSpec& kernel, const Dataset& data, double lambda) {
  check_lambda(lambda);
  data.validate(kernel);
  const double n = static_cast<double>(data.size());
  Eigen::MatrixXd system = gram_matrix(kernel, data.x);
  system.diagonal().array() += n * lambda;

  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("fit: Cholesky factorization of K + n*lambda*I failed");
  }
  Eigen::MatrixXd w = llt.solve(data.y);

  // One refinement step keeps the residual at working precision when the
  // system is poorly conditioned (tiny lambda).
  Eigen::MatrixXd residual = system * w - data.y;
  const double scale = (kernel.kappa_sq() + n * lambda) * data.y.cwiseAbs().maxCoeff();
  if (residual.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    w -= llt.solve(residual);
    residual = system * w - data.y;
  }
  if (!w.allFinite() || residual.cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw NumericalError("fit: solution residual exceeds tolerance");
  }
  return FittedModel(kernel, data.x, std::move(w), lambda);
}

FittedModel fit_with_output_factor(const KernelSpec& kernel, const OutputFactorSpec& factor, const Dataset& data,
                                   double lambda) {
  Dataset transformed{data.x, apply_output_factor_sqrt_rows(factor, data.y)};
  FittedModel plain = fit(kernel, transformed, lambda);
  return FittedModel(kernel, plain.train_x(), plain.weights(), lambda, factor.sqrt_matrix());
}

Eigen::VectorXd predict(const FittedModel& model, double x) {
  const Eigen::VectorXd k = cross_vector(model.kernel(), model.train_x(), x);
  return model.weights().transpose() * k;
}

Eigen::MatrixXd predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& xs) {
  constexpr Eigen::Index kBlock = 2048;
  Eigen::MatrixXd out(xs.size(), model.weights().cols());
  for (Eigen::Index start = 0; start < xs.size(); start += kBlock) {
    const Eigen::Index len = std::min(kBlock, xs.size() - start);
    const Eigen::MatrixXd k = cross_matrix(model.kernel(), model.train_x(), xs.segment(start, len));
    out.middleRows(start, len).noalias() = k * model.weights();
  }
  return out;
}

CoefficientMatrix feature_ridge_oracle(const SpectralModel& model, const Dataset& data, double lambda) {
  check_lambda(lambda);
  if (data.x.size() == 0 || data.y.rows() != data.x.size()) throw DimensionError("feature_ridge_oracle: bad dataset");
  for (Eigen::Index t = 0; t < data.x.size(); ++t) {
    if (!(data.x[t] >= 0.0 && data.x[t] <= 1.0)) throw DomainError("feature_ridge_oracle: input outside [0, 1]");
  }
  const double n = static_cast<double>(data.size());
  const Eigen::VectorXd root_mu = model.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd phi = model.basis_matrix(data.x) * root_mu.asDiagonal();

  Eigen::MatrixXd normal = phi.transpose() * phi / n;
  normal.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = phi.transpose() * data.y / n;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) throw NumericalError("feature_ridge_oracle: normal equations not PD");
  const Eigen::MatrixXd ct = llt.solve(rhs);
  return CoefficientMatrix(root_mu.asDiagonal() * ct);
}

void save_model(const FittedModel& model, std::ostream& out) {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "lambda = " << text::format_double(model.lambda()) << '\n';
  out << "n = " << model.size() << '\n';
  out << "d_y = " << model.output_dim() << '\n';
  // Nested sections are re-rooted under [kernel].
  std::string kernel_text = model.kernel().to_text();
  for (std::size_t pos = 0; (pos = kernel_text.find("\n[", pos)) != std::string::npos; pos += 9) {
    kernel_text.insert(pos + 2, "kernel.");
  }
  if (kernel_text.starts_with("[")) kernel_text.insert(1, "kernel.");
  out << "[kernel]\n" << kernel_text;
  out << "[output_sqrt]\n";
  if (const auto& s = model.output_sqrt()) {
    for (Eigen::Index r = 0; r < s->rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(s->cols()));
      for (Eigen::Index c = 0; c < s->cols(); ++c) row[static_cast<std::size_t>(c)] = (*s)(r, c);
      out << "row = " << text::format_double_list(row) << '\n';
    }
  }
  out << "[data]\n";
  for (Eigen::Index t = 0; t < model.train_x().size(); ++t) {
    std::vector<double> row{model.train_x()[t]};
    for (Eigen::Index j = 0; j < model.weights().cols(); ++j) row.push_back(model.weights()(t, j));
    out << "row = " << text::format_double_list(row) << '\n';
  }
}

FittedModel load_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("model artifact is empty");
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  hs >> magic >> version;
  if (magic != kModelMagic) throw std::invalid_argument("not a vvkrr model artifact");
  if (version != kModelVersion) {
    throw std::invalid_argument("unsupported model artifact version " + std::to_string(version));
  }
  std::stringstream rest;
  rest << in.rdbuf();
  const auto entries = text::parse_key_values(rest.str());

  double lambda = 0.0;
  long long n = -1, d_y = -1;
  std::string kernel_text;
  std::vector<std::vector<double>> sqrt_rows, data_rows;
  for (const auto& kv : entries) {
    if (kv.key == "lambda") {
      lambda = text::parse_double(kv.value);
    } else if (kv.key == "n") {
      n = text::parse_integer(kv.value);
    } else if (kv.key == "d_y") {
      d_y = text::parse_integer(kv.value);
    } else if (kv.key.starts_with("kernel.")) {
      kernel_text += kv.key.substr(7) + " = " + kv.value + "\n";
    } else if (kv.key == "output_sqrt.row") {
      sqrt_rows.push_back(text::parse_double_list(kv.value));
    } else if (kv.key == "data.row") {
      data_rows.push_back(text::parse_double_list(kv.value));
    } else {
      throw std::invalid_argument("model artifact line " + std::to_string(kv.line + 1) + ": unknown key '" + kv.key + "'");
    }
  }
  if (n < 1 || d_y < 1 || static_cast<long long>(data_rows.size()) != n) {
    throw std::invalid_argument("model artifact has inconsistent sizes");
  }
  KernelSpec kernel = KernelSpec::from_text(kernel_text);
  Eigen::VectorXd x(n);
  Eigen::MatrixXd w(n, d_y);
  for (long long t = 0; t < n; ++t) {
    const auto& row = data_rows[static_cast<std::size_t>(t)];
    if (static_cast<long long>(row.size()) != d_y + 1) throw std::invalid_argument("model artifact row width mismatch");
    x[t] = row[0];
    for (long long j = 0; j < d_y; ++j) w(t, j) = row[static_cast<std::size_t>(j + 1)];
  }
  std::optional<Eigen::MatrixXd> output_sqrt;
  if (!sqrt_rows.empty()) {
    const auto d = static_cast<Eigen::Index>(sqrt_rows.size());
    Eigen::MatrixXd s(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto& row = sqrt_rows[static_cast<std::size_t>(r)];
      if (static_cast<Eigen::Index>(row.size()) != d) throw std::invalid_argument("output_sqrt is not square");
      for (Eigen::Index c = 0; c < d; ++c) s(r, c) = row[static_cast<std::size_t>(c)];
    }
    output_sqrt = std::move(s);
  }
  return FittedModel(std::move(kernel), std::move(x), std::move(w), lambda, std::move(output_sqrt));
}

}  // namespace vvkrr
