#include "rpld/data.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "rpld/solver.hpp"

namespace rpld {

void ClassStats::validate() const {
  const auto p = mu0.size();
  if (mu1.size() != p || sigma.rows() != p || sigma.cols() != p) {
    fail(ErrorCode::bad_dimensions, "class statistics dimensions disagree");
  }
  if (!(pi0 > 0.0 && pi0 < 1.0) || std::abs(pi0 + pi1 - 1.0) > 1e-12) {
    fail(ErrorCode::bad_dimensions, "priors must lie in (0,1) and sum to 1");
  }
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    fail(ErrorCode::not_psd, "covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                    Eigen::EigenvaluesOnly);
  const double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(lam_max, 1.0)) {
    fail(ErrorCode::not_psd, "covariance has a significantly negative eigenvalue");
  }
}

ClassStats synthetic_preset(int p, PresetKind kind) {
  const int ones = static_cast<int>(std::ceil(std::sqrt(double(p))));
  if (p < 9 || ones + 2 > p) {
    fail(ErrorCode::dimension_too_small,
         "preset needs ceil(sqrt(p)) + 2 <= p and p >= 9, got p=" +
             std::to_string(p));
  }
  ClassStats stats;
  stats.mu0 = Eigen::VectorXd::Zero(p);
  stats.mu0.head(ones).setOnes();
  stats.mu0(p - 2) = 2.0;
  stats.mu0(p - 1) = 2.0;
  stats.mu0 *= std::pow(double(p), -0.25);
  stats.mu1 = Eigen::VectorXd::Zero(p);
  if (kind == PresetKind::identity_cov) {
    stats.sigma = Eigen::MatrixXd::Identity(p, p);
  } else {
    stats.sigma = Eigen::MatrixXd::Constant(p, p, 10.0 / p);
    stats.sigma.diagonal().array() += 0.1;
  }
  return stats;
}

namespace {

// Symmetric PSD square-root factor A with A * A^T = sigma. Negative
// eigenvalues below the PSD tolerance are an error; tiny ones are clamped.
Eigen::MatrixXd psd_sqrt_factor(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  Eigen::VectorXd lam = es.eigenvalues();
  const double lam_max = std::max(0.0, lam.maxCoeff());
  if (lam.minCoeff() < -1e-8 * std::max(lam_max, 1.0)) {
    fail(ErrorCode::not_psd, "covariance is not positive semi-definite");
  }
  Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Eigen::MatrixXd standard_normal_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

LabeledDataset generate_synthetic(const ClassStats& stats, int n0, int n1,
                                  uint64_t seed) {
  if (n0 < 2 || n1 < 2) {
    fail(ErrorCode::class_too_small, "need at least 2 samples per class");
  }
  const int p = stats.dim();
  const Eigen::MatrixXd factor = psd_sqrt_factor(stats.sigma);

  std::mt19937_64 rng(derive_seed(seed, 0xDA7A));
  Eigen::MatrixXd block(p, n0 + n1);
  block.leftCols(n0) =
      (factor * standard_normal_matrix(p, n0, rng)).colwise() + stats.mu0;
  block.rightCols(n1) =
      (factor * standard_normal_matrix(p, n1, rng)).colwise() + stats.mu1;

  std::vector<int> order(n0 + n1);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(derive_seed(seed, 0x50FF));
  std::shuffle(order.begin(), order.end(), shuffle_rng);

  LabeledDataset out;
  out.samples.resize(p, n0 + n1);
  out.labels.resize(n0 + n1);
  for (int j = 0; j < n0 + n1; ++j) {
    out.samples.col(j) = block.col(order[j]);
    out.labels[j] = order[j] < n0 ? 0 : 1;
  }
  out.n0 = n0;
  out.n1 = n1;
  return out;
}

ClassStats estimate_stats(const LabeledDataset& data,
                          std::optional<std::pair<double, double>> priors) {
  if (data.n0 < 2 || data.n1 < 2) {
    fail(ErrorCode::class_too_small,
         "covariance estimation needs at least 2 samples in each class");
  }
  const int p = data.dim();
  const int n = data.size();

  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < n; ++j) {
    (data.labels[j] == 0 ? mu0 : mu1) += data.samples.col(j);
  }
  mu0 /= data.n0;
  mu1 /= data.n1;

  Eigen::MatrixXd centered(p, n);
  for (int j = 0; j < n; ++j) {
    centered.col(j) = data.samples.col(j) - (data.labels[j] == 0 ? mu0 : mu1);
  }
  // (n0-1) Sighat0 + (n1-1) Sighat1 collapses to one centered Gram matrix.
  Eigen::MatrixXd pooled =
      centered * centered.transpose() / double(data.n0 + data.n1 - 2);

  ClassStats stats;
  stats.mu0 = std::move(mu0);
  stats.mu1 = std::move(mu1);
  stats.sigma = std::move(pooled);
  if (priors) {
    stats.pi0 = priors->first;
    stats.pi1 = priors->second;
  } else {
    stats.pi0 = double(data.n0) / n;
    stats.pi1 = double(data.n1) / n;
  }
  return stats;
}

int covariance_rank(const Eigen::MatrixXd& sigma_hat,
                    std::optional<int> n_hint) {
  const int p = static_cast<int>(sigma_hat.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_hat,
                                                    Eigen::EigenvaluesOnly);
  const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
  const double cutoff = std::max(p, n_hint.value_or(p)) *
                        std::numeric_limits<double>::epsilon() * lam_max;
  int rank = 0;
  for (int i = 0; i < p; ++i) {
    if (es.eigenvalues()(i) > cutoff) ++rank;
  }
  return rank;
}

FoldPlan kfold_plan(int n, const std::vector<int>& labels, int k,
                    uint64_t shuffle_seed, bool stratified) {
  int n0 = 0, n1 = 0;
  for (int lab : labels) (lab == 0 ? n0 : n1)++;
  if (k < 2 || k > std::min(n0, n1)) {
    fail(ErrorCode::k_too_large,
         "k must satisfy 2 <= k <= min(n0, n1), got k=" + std::to_string(k));
  }

  FoldPlan plan;
  plan.k = k;
  plan.shuffle_seed = shuffle_seed;
  plan.assignments.assign(n, -1);

  auto assign_block = [&](std::vector<int>& idx) {
    std::mt19937_64 rng(derive_seed(shuffle_seed, idx.size()));
    std::shuffle(idx.begin(), idx.end(), rng);
    // First n%k folds get the extra element.
    const int m = static_cast<int>(idx.size());
    const int base = m / k, extra = m % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
      const int sz = base + (f < extra ? 1 : 0);
      for (int j = 0; j < sz; ++j) plan.assignments[idx[pos++]] = f;
    }
  };

  if (stratified) {
    std::vector<int> idx0, idx1;
    for (int j = 0; j < n; ++j) (labels[j] == 0 ? idx0 : idx1).push_back(j);
    assign_block(idx0);
    assign_block(idx1);
  } else {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    assign_block(idx);
  }
  return plan;
}

LabeledDataset fold_subset(const LabeledDataset& data, const FoldPlan& plan,
                           int fold, bool held_out) {
  std::vector<int> keep;
  for (int j = 0; j < data.size(); ++j) {
    if ((plan.assignments[j] == fold) == held_out) keep.push_back(j);
  }
  LabeledDataset out;
  out.samples.resize(data.dim(), keep.size());
  out.labels.resize(keep.size());
  for (size_t j = 0; j < keep.size(); ++j) {
    out.samples.col(j) = data.samples.col(keep[j]);
    out.labels[j] = data.labels[keep[j]];
    (out.labels[j] == 0 ? out.n0 : out.n1)++;
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

LabeledDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const std::string& positive_label) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::malformed_csv, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  int label_idx = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_idx = static_cast<int>(i);
  }
  if (label_idx < 0) {
    fail(ErrorCode::malformed_csv,
         "label column '" + label_column + "' not in header");
  }
  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) fail(ErrorCode::malformed_csv, "no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> tokens;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::malformed_csv,
           "row " + std::to_string(lineno) + " has " +
               std::to_string(fields.size()) + " fields, expected " +
               std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(p);
    for (size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == label_idx) {
        tokens.push_back(fields[i]);
        continue;
      }
      double v = 0.0;
      const char* begin = fields[i].data();
      const char* end = begin + fields[i].size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        fail(ErrorCode::non_numeric_feature,
             "row " + std::to_string(lineno) + ", column '" + header[i] +
                 "': cannot parse '" + fields[i] + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::malformed_csv, "no data rows");

  std::string negative_label;
  bool have_negative = false;
  for (const auto& tok : tokens) {
    if (tok == positive_label) continue;
    if (!have_negative) {
      negative_label = tok;
      have_negative = true;
    } else if (tok != negative_label) {
      fail(ErrorCode::more_than_two_labels,
           "label column holds more than two distinct tokens");
    }
  }

  LabeledDataset out;
  out.samples.resize(p, rows.size());
  out.labels.resize(rows.size());
  for (size_t j = 0; j < rows.size(); ++j) {
    for (int i = 0; i < p; ++i) out.samples(i, j) = rows[j][i];
    out.labels[j] = tokens[j] == positive_label ? 1 : 0;
    (out.labels[j] == 0 ? out.n0 : out.n1)++;
  }
  return out;
}

void save_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  out.precision(17);
  for (int i = 0; i < data.dim(); ++i) out << 'f' << i << ',';
  out << "label\n";
  for (int j = 0; j < data.size(); ++j) {
    for (int i = 0; i < data.dim(); ++i) out << data.samples(i, j) << ',';
    out << data.labels[j] << '\n';
  }
  if (!out) fail(ErrorCode::io_error, "write failed for " + path);
}

}  // namespace rpld
