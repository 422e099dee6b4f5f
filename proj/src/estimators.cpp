#include "dppss/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dppss/quadrature.hpp"

namespace dppss {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double gamma_integral(double g) { return std::pow(0.5, g) / (g + 1.0); }

double mixcos_integral() { return 0.2 / M_PI + 1.0 / 12.0; }

double bump_integral() {
  static const double value = integrate_adaptive(bump_factor, 0.0, 1.0, 1e-14);
  return value;
}

double diagonal_or_throw(const Eigen::VectorXd& phi) {
  const double diag = phi.squaredNorm();
  if (!(diag > 0.0)) throw std::domain_error("quadrature: zero kernel diagonal at a sample point");
  return diag;
}

}  // namespace

double gamma_factor(double t, double gamma) { return std::pow(std::abs(t - 0.5), gamma); }

double mixcos_factor(double t) {
  const double c = t - 0.5;
  return 0.1 * std::abs(std::cos(5.0 * M_PI * c)) + c * c;
}

double bump_factor(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-0.1 / (t * (1.0 - t)));
}

TestFunction test_function_library(std::string_view name, const TestFunctionParams& params) {
  TestFunction f;
  f.name = std::string(name);
  if (name == "gamma") {
    const double g = params.gamma;
    if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("gamma: exponent must lie in (0,1]");
    const double norm = gamma_integral(g);
    f.eval = [g, norm](std::span<const double> x) {
      double acc = 0.0;
      for (double t : x) acc += gamma_factor(t, g);
      return acc / (norm * static_cast<double>(x.size()));
    };
    f.holder_exponent = g;
    f.breakpoints = {0.5};
    f.name = "gamma" + std::to_string(g).substr(0, 4);
  } else if (name == "mixcos") {
    const double norm = mixcos_integral();
    f.eval = [norm](std::span<const double> x) {
      double acc = 0.0;
      for (double t : x) acc += mixcos_factor(t);
      return acc / (norm * static_cast<double>(x.size()));
    };
    f.holder_exponent = 1.0;
    f.breakpoints = {0.1, 0.3, 0.5, 0.7, 0.9};
  } else if (name == "bump") {
    const double norm = bump_integral();
    f.eval = [norm](std::span<const double> x) {
      double acc = 1.0;
      for (double t : x) acc *= bump_factor(t) / norm;
      return acc;
    };
    f.vanishes_on_boundary = true;
  } else if (name == "kmeans_loss") {
    if (params.centers.rows() == 0) throw std::invalid_argument("kmeans_loss: no centers");
    const Eigen::MatrixXd centers = params.centers;
    f.eval = [centers](std::span<const double> x) {
      const Eigen::Map<const Eigen::RowVectorXd> p(x.data(), static_cast<Eigen::Index>(x.size()));
      return (centers.rowwise() - p).rowwise().squaredNorm().minCoeff();
    };
    f.holder_exponent = 1.0;
  } else if (name == "hinge_loss") {
    if (params.theta.size() == 0) throw std::invalid_argument("hinge_loss: empty theta");
    const Eigen::VectorXd theta = params.theta;
    f.eval = [theta](std::span<const double> x) {
      if (static_cast<Eigen::Index>(x.size()) != theta.size() + 1)
        throw std::invalid_argument("hinge_loss: expected (x, label)");
      const Eigen::Map<const Eigen::VectorXd> p(x.data(), theta.size());
      return std::max(0.0, 1.0 - x.back() * theta.dot(p));
    };
    f.holder_exponent = 1.0;
  } else {
    throw std::invalid_argument("test_function_library: unknown function '" + std::string(name) + "'");
  }
  return f;
}

TestFunction unit_weight() {
  TestFunction w;
  w.name = "one";
  w.eval = [](std::span<const double>) { return 1.0; };
  return w;
}

TestFunction bump_weight() {
  constexpr double r = 0.4;
  TestFunction w;
  w.name = "biweight";
  w.eval = [](std::span<const double> x) {
    double acc = 1.0;
    for (double t : x) {
      const double u = (t - 0.5) / r;
      if (std::abs(u) >= 1.0) return 0.0;
      acc *= 15.0 / (16.0 * r) * (1.0 - u * u) * (1.0 - u * u);
    }
    return acc;
  };
  w.holder_exponent = 1.0;
  w.vanishes_on_boundary = true;
  w.breakpoints = {0.1, 0.9};
  return w;
}

double linear_statistic(const Eigen::MatrixXd& points, const TestFunction& f) {
  double acc = 0.0;
  Eigen::VectorXd row(points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    row = points.row(i).transpose();
    acc += f(row);
  }
  return acc;
}

double quadrature_basic(const Eigen::MatrixXd& points, const ProjectionKernel& kernel,
                        const TestFunction& f, const TestFunction& weight) {
  double acc = 0.0;
  Eigen::VectorXd row(points.cols());
  Eigen::VectorXd phi(kernel.rank());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    row = points.row(i).transpose();
    kernel.features(as_span(row), phi);
    acc += f(row) * weight(row) / diagonal_or_throw(phi);
  }
  return acc;
}

double quadrature_adjusted(const Eigen::MatrixXd& points, const ProjectionKernel& kernel,
                           const TestFunction& f, const TestFunction& weight,
                           const Eigen::MatrixXd& design) {
  if (kernel.family() != KernelFamily::wavelet)
    throw std::invalid_argument("quadrature_adjusted: wavelet kernels only");
  if (design.rows() != kernel.rank() || design.cols() != kernel.dim())
    throw std::invalid_argument("quadrature_adjusted: design does not match the kernel's index set");

  const int d = kernel.dim();
  const double inv_n = std::ldexp(1.0, -d * kernel.scale());  // 2^{-dj}
  Eigen::VectorXd node_values(kernel.rank());
  Eigen::VectorXd row(d);
  for (Eigen::Index k = 0; k < design.rows(); ++k) {
    row = design.row(k).transpose();
    node_values[k] = f(row) * weight(row);
  }

  double basic = 0.0;
  double correction = 0.0;
  Eigen::VectorXd phi(kernel.rank());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    row = points.row(i).transpose();
    kernel.features(as_span(row), phi);
    const double diag = diagonal_or_throw(phi);
    basic += f(row) * weight(row) / diag;
    correction += phi.dot(node_values) / diag;
  }
  return basic - std::sqrt(inv_n) * correction + inv_n * node_values.sum();
}

double coreset_estimate(const std::vector<Eigen::Index>& subset, const DiscreteDPP& dpp,
                        const Eigen::VectorXd& f_values) {
  if (f_values.size() != dpp.size()) throw std::invalid_argument("coreset_estimate: size mismatch");
  double acc = 0.0;
  for (auto i : subset) {
    const double p = dpp.inclusion_probability(i);
    if (!(p > 0.0)) throw std::domain_error("coreset_estimate: zero inclusion probability");
    acc += f_values[i] / p;
  }
  return acc;
}

double coreset_estimate(const std::vector<Eigen::Index>& subset, const DiscreteDPP& dpp,
                        const TestFunction& f, const Eigen::MatrixXd& data) {
  Eigen::VectorXd values(data.rows());
  Eigen::VectorXd row(data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    row = data.row(i).transpose();
    values[i] = f(row);
  }
  return coreset_estimate(subset, dpp, values);
}

DiscreteControlVariate discrete_control_variate(const Eigen::MatrixXd& psi, int scale, int dim,
                                                const Eigen::VectorXd& f_at_design) {
  if (psi.cols() != f_at_design.size())
    throw std::invalid_argument("discrete_control_variate: design size mismatch");
  DiscreteControlVariate cv;
  cv.values = std::sqrt(std::ldexp(1.0, -dim * scale)) * (psi * f_at_design);
  cv.total = cv.values.sum();
  return cv;
}

double coreset_estimate_adjusted(const std::vector<Eigen::Index>& subset, const DiscreteDPP& dpp,
                                 const Eigen::VectorXd& f_values,
                                 const DiscreteControlVariate& control) {
  if (control.values.size() != f_values.size())
    throw std::invalid_argument("coreset_estimate_adjusted: size mismatch");
  return coreset_estimate(subset, dpp, f_values - control.values) + control.total;
}

double continuous_variance_exact(const ProjectionKernel& kernel,
                                 const std::function<double(std::span<const double>)>& f,
                                 int resolution) {
  const int d = kernel.dim();
  if (d > 2) throw std::invalid_argument("continuous_variance_exact: d <= 2 only");
  if (resolution <= 0) resolution = d == 1 ? kVarianceGrid1d : kVarianceGrid2d;
  const int n = kernel.rank();
  long nodes = resolution;
  if (d == 2) nodes *= resolution;
  const double w = 1.0 / static_cast<double>(nodes);

  Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(n, n);
  double diag_term = 0.0;
  Eigen::VectorXd x(d), phi(n);
  for (long node = 0; node < nodes; ++node) {
    x[0] = (static_cast<double>(node % resolution) + 0.5) / resolution;
    if (d == 2) x[1] = (static_cast<double>(node / resolution) + 0.5) / resolution;
    const double fx = f(as_span(x));
    if (fx == 0.0) continue;
    kernel.features(as_span(x), phi);
    diag_term += w * fx * fx * phi.squaredNorm();
    weighted.selfadjointView<Eigen::Lower>().rankUpdate(phi, w * fx);
  }
  weighted.triangularView<Eigen::StrictlyUpper>() = weighted.transpose();
  return diag_term - weighted.squaredNorm();
}

double discrete_variance_exact(const DiscreteDPP& dpp, const Eigen::VectorXd& f_values,
                               const Eigen::VectorXd* weights) {
  const Eigen::Index n_items = dpp.size();
  if (n_items > kDiscreteVarianceMaxItems)
    throw std::length_error("discrete_variance_exact: N exceeds the O(N^2 m) cost guard");
  if (f_values.size() != n_items) throw std::invalid_argument("discrete_variance_exact: size mismatch");
  Eigen::VectorXd g = f_values;
  if (weights) {
    if (weights->size() != n_items) throw std::invalid_argument("discrete_variance_exact: weight size mismatch");
    g = g.cwiseProduct(*weights);
  }

  constexpr Eigen::Index kBlock = 512;
  double total = 0.0;
  for (Eigen::Index r0 = 0; r0 < n_items; r0 += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n_items - r0);
    const Eigen::MatrixXd k2 = dpp.kernel_block(r0, rows).array().square();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double gi = g[r0 + r];
      total += (k2.row(r).transpose().array() * (g.array() - gi).square()).sum();
    }
  }
  return 0.5 * total;
}

}  // namespace dppss
