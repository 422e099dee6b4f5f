#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dppss {

enum class Provenance { gmm, mnist_idx, csv, synthetic };

/// Per-dimension affine map rescaled = (raw - offset) * scale.
struct AffineRescale {
  Eigen::RowVectorXd offset;
  Eigen::RowVectorXd scale;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& raw) const {
    return (raw.rowwise() - offset).array().rowwise() * scale.array();
  }
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& rescaled) const {
    return (rescaled.array().rowwise() / scale.array()).matrix().rowwise() + offset;
  }
};

/// N points in [0,1]^d (after rescaling), optional labels.
struct Dataset {
  Eigen::MatrixXd points;
  std::vector<int> labels;
  Provenance provenance = Provenance::synthetic;
  AffineRescale rescale;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

/// Throws if some coordinate leaves [0,1] or two points coincide.
void validate_dataset(const Dataset& data);

/// Balanced three-component Gaussian mixture with centers (sqrt2/2, sqrt2/2),
/// (-sqrt2/2, -sqrt2/2) and the origin, component std 0.2, truncated to
/// (-1,1)^2 by rejection and mapped to [0,1]^2 by x -> (x+1)/2. Point i comes
/// from component i mod 3; labels are component ids.
Dataset gen_gmm_trimodal(Eigen::Index n, std::uint64_t seed);

/// Two Gaussian classes in the plane (labels 0 and 1, n_per_class each,
/// means (-0.6,-0.3) and (0.6,0.3), unit-free std 0.5), min-max rescaled into
/// [0.02, 0.98]^2.
Dataset gen_two_class_gaussian(Eigen::Index n_per_class, std::uint64_t seed);

/// Raw IDX content: magic, dimension sizes and unsigned-byte payload.
struct IdxFile {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Parses a big-endian IDX file of unsigned bytes. Throws on an unexpected
/// magic number or a truncated payload.
IdxFile read_idx(const std::filesystem::path& path, std::uint32_t expected_magic);

/// MNIST images as 784-d rows scaled to [0,1]; keeps only `digits`, at most
/// limit / |digits| per digit in file order. Throws on an empty filter, bad
/// files, label/image count mismatch, or too few images of some digit.
Dataset load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                       const std::vector<int>& digits, Eigen::Index limit);

/// Centers, projects on the top `target_dim` eigenvectors of the sample
/// covariance (decreasing variance) and min-max rescales every coordinate into
/// [0.02, 0.98]. The rescale record maps PCA coordinates to the stored points.
/// Throws if target_dim exceeds the ambient dimension or the covariance rank.
Dataset pca_project(const Dataset& data, int target_dim);

/// Numeric CSV, one point per row; an optional header row is skipped. With
/// `label_column` the last column is read as an integer label. Coordinates are
/// min-max rescaled into [0.02, 0.98].
Dataset load_csv_dataset(const std::filesystem::path& path, bool label_column = false);

/// Min-max rescale of raw rows into [lo, hi]^d; returns the rescale record.
AffineRescale minmax_rescale(const Eigen::MatrixXd& raw, double lo = 0.02, double hi = 0.98);

/// `name` itself if it exists, otherwise $DPPSS_DATA_DIR/name.
std::filesystem::path resolve_data_path(const std::string& name);

}  // namespace dppss
