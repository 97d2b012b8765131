#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shotbound/errors.hpp"

namespace shotbound {

inline constexpr double kWeightSumTol = 1e-10;

// Weighted classical points with integer labels in [0, num_labels).
class LabeledDataset {
 public:
  LabeledDataset(int d, std::vector<std::vector<double>> points, std::vector<std::size_t> labels,
                 std::vector<double> weights = {})
      : d_(d), points_(std::move(points)), labels_(std::move(labels)), weights_(std::move(weights)) {
    if (d_ < 0) throw InputError("dataset: negative dimension");
    if (points_.empty()) throw InputError("dataset: no points");
    if (labels_.size() != points_.size()) throw ShapeError("dataset: label count differs from point count");
    for (const auto& x : points_) {
      if (x.size() != static_cast<std::size_t>(d_)) throw ShapeError("dataset: ragged point");
      for (double v : x)
        if (!std::isfinite(v)) throw InputError("dataset: non-finite feature");
    }
    if (weights_.empty()) {
      weights_.assign(points_.size(), 1.0 / static_cast<double>(points_.size()));
    } else {
      if (weights_.size() != points_.size()) throw ShapeError("dataset: weight count differs from point count");
      double sum = 0.0;
      for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("dataset: weights must be finite and nonnegative");
        sum += w;
      }
      if (std::abs(sum - 1.0) > kWeightSumTol)
        throw InputError("dataset: weights sum to " + std::to_string(sum));
    }
  }

  // Rescales nonnegative weights to sum to one.
  static LabeledDataset normalized(int d, std::vector<std::vector<double>> points,
                                   std::vector<std::size_t> labels, std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("dataset: weights must be finite and nonnegative");
      sum += w;
    }
    if (!(sum > 0.0)) throw InputError("dataset: weights sum to zero");
    // Weights already normalized are kept bit-for-bit so files round-trip.
    if (std::abs(sum - 1.0) > kWeightSumTol)
      for (double& w : weights) w /= sum;
    return LabeledDataset(d, std::move(points), std::move(labels), std::move(weights));
  }

  int d() const { return d_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& point(std::size_t k) const { return points_.at(k); }
  const std::vector<std::size_t>& labels() const { return labels_; }
  std::size_t label(std::size_t k) const { return labels_.at(k); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t k) const { return weights_.at(k); }

  std::size_t num_labels() const { return *std::max_element(labels_.begin(), labels_.end()) + 1; }

  // Total weight per label.
  std::vector<double> class_priors() const {
    std::vector<double> p(num_labels(), 0.0);
    for (std::size_t k = 0; k < size(); ++k) p[labels_[k]] += weights_[k];
    return p;
  }

 private:
  int d_;
  std::vector<std::vector<double>> points_;
  std::vector<std::size_t> labels_;
  std::vector<double> weights_;
};

namespace data_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, std::size_t line, const std::string& column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError("column '" + column + "': not a finite number: '" + s + "'", line);
  return v;
}

inline std::size_t parse_label(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("label must be a nonnegative integer, got '" + s + "'", line);
  return static_cast<std::size_t>(v);
}

}  // namespace data_detail

// Header: x1,...,xd,label[,weight]. A weight column is normalized to sum to one.
inline LabeledDataset parse_csv(std::istream& in) {
  using namespace data_detail;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw ParseError("empty dataset file", std::max<std::size_t>(line_no, 1));

  const auto label_it = std::find(header.begin(), header.end(), "label");
  if (label_it == header.end()) throw ParseError("header has no 'label' column", line_no);
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());
  for (std::size_t k = 0; k < label_col; ++k)
    if (header[k] != "x" + std::to_string(k + 1))
      throw ParseError("expected feature column 'x" + std::to_string(k + 1) + "', got '" + header[k] + "'",
                       line_no);
  bool has_weight = false;
  if (header.size() == label_col + 2 && header.back() == "weight") has_weight = true;
  else if (header.size() != label_col + 1)
    throw ParseError("unknown column after 'label': '" + header[label_col + 1] + "'", line_no);

  const int d = static_cast<int>(label_col);
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> labels;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(cells.size()),
                       line_no);
    std::vector<double> x;
    for (std::size_t k = 0; k < label_col; ++k) x.push_back(parse_double(cells[k], line_no, header[k]));
    points.push_back(std::move(x));
    labels.push_back(parse_label(cells[label_col], line_no));
    if (has_weight) {
      const double w = parse_double(cells.back(), line_no, "weight");
      if (w < 0.0) throw ParseError("negative weight", line_no);
      weights.push_back(w);
    }
  }
  if (points.empty()) throw ParseError("dataset has a header but no rows", line_no);
  if (has_weight) {
    try {
      return LabeledDataset::normalized(d, std::move(points), std::move(labels), std::move(weights));
    } catch (const InputError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return LabeledDataset(d, std::move(points), std::move(labels));
}

inline LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  return parse_csv(in);
}

// Writes shortest round-trip representations, so save then load reproduces
// every value exactly.
inline void write_csv(std::ostream& out, const LabeledDataset& ds, bool with_weights = true) {
  auto fmt = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  for (int k = 0; k < ds.d(); ++k) out << 'x' << k + 1 << ',';
  out << "label";
  if (with_weights) out << ",weight";
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.point(i)) out << fmt(v) << ',';
    out << ds.label(i);
    if (with_weights) out << ',' << fmt(ds.weight(i));
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const LabeledDataset& ds, bool with_weights = true) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write dataset '" + path + "'");
  write_csv(out, ds, with_weights);
}

// Isotropic Gaussian clusters: counts[c] points around centers[c] with
// standard deviation spreads[c], all labelled c, uniform weights.
inline LabeledDataset gen_blobs(const std::vector<std::vector<double>>& centers,
                                const std::vector<double>& spreads, const std::vector<std::size_t>& counts,
                                std::uint64_t seed) {
  if (centers.empty()) throw InputError("gen_blobs: no centers");
  if (spreads.size() != centers.size() || counts.size() != centers.size())
    throw ShapeError("gen_blobs: centers, spreads and counts differ in length");
  const std::size_t d = centers.front().size();
  for (const auto& c : centers)
    if (c.size() != d) throw ShapeError("gen_blobs: centers differ in dimension");
  for (double s : spreads)
    if (!(s >= 0.0)) throw InputError("gen_blobs: spreads must be nonnegative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t k = 0; k < counts[c]; ++k) {
      std::vector<double> x = centers[c];
      for (double& v : x) v += spreads[c] * normal(rng);
      points.push_back(std::move(x));
      labels.push_back(c);
    }
  }
  if (points.empty()) throw InputError("gen_blobs: all counts are zero");
  return LabeledDataset(static_cast<int>(d), std::move(points), std::move(labels));
}

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

// Pairwise class distances over the labels with positive weight.
struct ClassDistances {
  std::vector<std::size_t> labels;    // included labels, ascending
  std::vector<std::size_t> excluded;  // labels in [0, num_labels) with zero weight
  std::vector<double> priors;         // indexed like `labels`
  Eigen::MatrixXd davg;               // symmetric, zero diagonal
};

// d^{ij} = (p_i + p_j) sum_{x in X_i} sum_{x' in X_j} (w(x)/p_i)(w(x')/p_j) |x - x'|_1
inline ClassDistances davg_matrix(const LabeledDataset& ds) {
  const auto all = ds.class_priors();
  ClassDistances out;
  for (std::size_t y = 0; y < all.size(); ++y) (all[y] > 0.0 ? out.labels : out.excluded).push_back(y);
  if (out.labels.size() < 2) throw InputError("davg_matrix: at least two nonempty classes required");
  std::vector<std::vector<std::size_t>> members(all.size());
  for (std::size_t k = 0; k < ds.size(); ++k) members[ds.label(k)].push_back(k);

  const auto r = static_cast<Eigen::Index>(out.labels.size());
  out.davg = Eigen::MatrixXd::Zero(r, r);
  for (auto y : out.labels) out.priors.push_back(all[y]);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i + 1; j < r; ++j) {
      const auto yi = out.labels[i], yj = out.labels[j];
      double s = 0.0;
      for (auto a : members[yi])
        for (auto b : members[yj])
          s += (ds.weight(a) / all[yi]) * (ds.weight(b) / all[yj]) * l1_distance(ds.point(a), ds.point(b));
      out.davg(i, j) = out.davg(j, i) = (all[yi] + all[yj]) * s;
    }
  }
  return out;
}

// max_i min_{j != i} d^{ij}: with equal priors the floor is
// (1/2)(1 - L spread d / 2) at this d, which gives the depth condition.
inline double davg_scalar(const Eigen::MatrixXd& davg) {
  const auto r = davg.rows();
  if (r < 2) throw InputError("davg_scalar: at least two classes required");
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < r; ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < r; ++j)
      if (j != i) m = std::min(m, davg(i, j));
    best = std::max(best, m);
  }
  return best;
}

}  // namespace shotbound
