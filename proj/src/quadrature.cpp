#include "dppss/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dppss {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (7-point rule).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double kronrod;
  double error;
};

Estimate gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             int depth) {
  const auto est = gauss_kronrod(f, a, b);
  if (est.error <= tol || depth >= 60 || b - a < 1e-14) return est.kronrod;
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * tol, depth + 1) + adapt(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, const std::vector<double>& breakpoints) {
  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const double share = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += adapt(f, cuts[i], cuts[i + 1], share, 0);
  return total;
}

double integrate_adaptive_2d(const std::function<double(double, double)>& f, double abs_tol,
                             const std::vector<double>& breakpoints) {
  const auto inner = [&](double x) {
    return integrate_adaptive([&](double y) { return f(x, y); }, 0.0, 1.0, abs_tol, breakpoints);
  };
  return integrate_adaptive(inner, 0.0, 1.0, abs_tol, breakpoints);
}

}  // namespace dppss
