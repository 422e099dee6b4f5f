#include "dppss/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dppss/random.hpp"

namespace dppss {

void validate_dataset(const Dataset& data) {
  if ((data.points.array() < 0.0).any() || (data.points.array() > 1.0).any())
    throw std::domain_error("dataset: coordinate outside [0,1]");
  std::vector<Eigen::Index> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& p = data.points;
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (p(a, j) != p(b, j)) return p(a, j) < p(b, j);
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!less(order[i - 1], order[i])) throw std::domain_error("dataset: duplicate points");
}

AffineRescale minmax_rescale(const Eigen::MatrixXd& raw, double lo, double hi) {
  const Eigen::RowVectorXd mn = raw.colwise().minCoeff();
  const Eigen::RowVectorXd mx = raw.colwise().maxCoeff();
  if (((mx - mn).array() <= 0.0).any()) throw std::invalid_argument("minmax_rescale: constant coordinate");
  AffineRescale r;
  r.scale = (hi - lo) / (mx - mn).array();
  r.offset = mn.array() - lo / r.scale.array();
  return r;
}

Dataset gen_gmm_trimodal(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_gmm_trimodal: need N >= 1");
  const double c = std::sqrt(2.0) / 2.0;
  const double centers[3][2] = {{c, c}, {-c, -c}, {0.0, 0.0}};
  constexpr double kStd = 0.2;
  Rng rng(seed);
  Eigen::MatrixXd raw(n, 2);
  Dataset out;
  out.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int comp = static_cast<int>(i % 3);
    double x, y;
    do {
      x = centers[comp][0] + kStd * standard_normal(rng);
      y = centers[comp][1] + kStd * standard_normal(rng);
    } while (!(std::abs(x) < 1.0 && std::abs(y) < 1.0));
    raw(i, 0) = x;
    raw(i, 1) = y;
    out.labels[i] = comp;
  }
  out.provenance = Provenance::gmm;
  out.rescale.offset = Eigen::RowVectorXd::Constant(2, -1.0);
  out.rescale.scale = Eigen::RowVectorXd::Constant(2, 0.5);
  out.points = out.rescale.forward(raw);
  return out;
}

Dataset gen_two_class_gaussian(Eigen::Index n_per_class, std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("gen_two_class_gaussian: need at least one point per class");
  Rng rng(seed);
  Eigen::MatrixXd raw(2 * n_per_class, 2);
  Dataset out;
  out.labels.resize(2 * n_per_class);
  for (Eigen::Index i = 0; i < 2 * n_per_class; ++i) {
    const int label = static_cast<int>(i % 2);
    const double sign = label == 0 ? -1.0 : 1.0;
    raw(i, 0) = sign * 0.6 + 0.5 * standard_normal(rng);
    raw(i, 1) = sign * 0.3 + 0.5 * standard_normal(rng);
    out.labels[i] = label;
  }
  out.rescale = minmax_rescale(raw);
  out.points = out.rescale.forward(raw);
  out.points = out.points.cwiseMax(0.02).cwiseMin(0.98);
  return out;
}

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t at) {
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) |
         (std::uint32_t{bytes[at + 2]} << 8) | std::uint32_t{bytes[at + 3]};
}

}  // namespace

IdxFile read_idx(const std::filesystem::path& path, std::uint32_t expected_magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_idx: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4) throw std::runtime_error("read_idx: truncated header in " + path.string());
  IdxFile idx;
  idx.magic = read_be32(bytes, 0);
  if (idx.magic != expected_magic) {
    std::ostringstream msg;
    msg << "read_idx: bad magic 0x" << std::hex << idx.magic << " in " << path.string();
    throw std::runtime_error(msg.str());
  }
  const std::size_t ndim = idx.magic & 0xFF;
  if (bytes.size() < 4 + 4 * ndim) throw std::runtime_error("read_idx: truncated header in " + path.string());
  std::size_t payload = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    idx.dims.push_back(read_be32(bytes, 4 + 4 * i));
    payload *= idx.dims.back();
  }
  const std::size_t start = 4 + 4 * ndim;
  if (bytes.size() < start + payload) throw std::runtime_error("read_idx: truncated payload in " + path.string());
  idx.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                  bytes.begin() + static_cast<std::ptrdiff_t>(start + payload));
  return idx;
}

Dataset load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                       const std::vector<int>& digits, Eigen::Index limit) {
  if (digits.empty()) throw std::invalid_argument("load_mnist_idx: empty digit filter");
  if (limit < static_cast<Eigen::Index>(digits.size()))
    throw std::invalid_argument("load_mnist_idx: limit smaller than the number of digits");
  const auto img = read_idx(images, kIdxImageMagic);
  const auto lab = read_idx(labels, kIdxLabelMagic);
  if (img.dims.size() != 3 || lab.dims.size() != 1) throw std::runtime_error("load_mnist_idx: unexpected IDX rank");
  if (img.dims[0] != lab.dims[0]) throw std::runtime_error("load_mnist_idx: label/image count mismatch");

  const std::size_t pixels = std::size_t{img.dims[1]} * img.dims[2];
  const Eigen::Index quota = limit / static_cast<Eigen::Index>(digits.size());
  std::vector<Eigen::Index> taken(digits.size(), 0);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < lab.data.size(); ++i) {
    const auto it = std::find(digits.begin(), digits.end(), static_cast<int>(lab.data[i]));
    if (it == digits.end()) continue;
    auto& count = taken[static_cast<std::size_t>(it - digits.begin())];
    if (count >= quota) continue;
    ++count;
    rows.push_back(i);
  }
  for (auto count : taken)
    if (count < quota) throw std::runtime_error("load_mnist_idx: not enough images for a balanced selection");

  Dataset out;
  out.provenance = Provenance::mnist_idx;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pixels));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t base = rows[r] * pixels;
    for (std::size_t p = 0; p < pixels; ++p)
      out.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p)) = img.data[base + p] / 255.0;
    out.labels.push_back(lab.data[rows[r]]);
  }
  out.rescale.offset = Eigen::RowVectorXd::Zero(out.points.cols());
  out.rescale.scale = Eigen::RowVectorXd::Ones(out.points.cols());
  return out;
}

Dataset pca_project(const Dataset& data, int target_dim) {
  if (target_dim < 1 || target_dim > data.dim())
    throw std::invalid_argument("pca_project: target dimension exceeds ambient dimension");
  if (data.size() < 2) throw std::invalid_argument("pca_project: need at least two points");
  const Eigen::RowVectorXd mean = data.points.colwise().mean();
  const Eigen::MatrixXd centered = data.points.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca_project: eigensolver failed");
  const auto& values = eig.eigenvalues();  // increasing
  const Eigen::Index p = values.size();
  const double top = values[p - 1];
  if (!(top > 0.0) || values[p - target_dim] <= 1e-12 * top)
    throw std::runtime_error("pca_project: covariance rank below target dimension");

  Eigen::MatrixXd axes(p, target_dim);
  for (int c = 0; c < target_dim; ++c) axes.col(c) = eig.eigenvectors().col(p - 1 - c);
  const Eigen::MatrixXd projected = centered * axes;

  Dataset out;
  out.labels = data.labels;
  out.provenance = data.provenance;
  out.rescale = minmax_rescale(projected);
  out.points = out.rescale.forward(projected);
  return out;
}

Dataset load_csv_dataset(const std::filesystem::path& path, bool label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv_dataset: cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) numeric = false;
      values.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("load_csv_dataset: non-numeric row in " + path.string());
    }
    first = false;
    if (label_column) {
      labels.push_back(static_cast<int>(values.back()));
      values.pop_back();
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw std::runtime_error("load_csv_dataset: ragged rows in " + path.string());
    rows.push_back(std::move(values));
  }
  if (rows.empty() || rows.front().empty()) throw std::runtime_error("load_csv_dataset: no data in " + path.string());
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  Dataset out;
  out.provenance = Provenance::csv;
  out.labels = std::move(labels);
  out.rescale = minmax_rescale(raw);
  out.points = out.rescale.forward(raw);
  return out;
}

std::filesystem::path resolve_data_path(const std::string& name) {
  std::filesystem::path p(name);
  if (std::filesystem::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv("DPPSS_DATA_DIR")) return std::filesystem::path(dir) / p;
  return p;
}

}  // namespace dppss
