#include "cpsep/grid_distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace cpsep {

namespace {

GridMatrix validated(GridMatrix mass) {
  const auto d = mass.rows();
  if (d < 1) throw std::invalid_argument("GridDistribution: d must be >= 1");
  if (d > GridDistribution::kMaxSide) {
    throw std::invalid_argument("GridDistribution: d exceeds configured cap 4096");
  }
  if (mass.cols() != d) throw std::invalid_argument("GridDistribution: matrix must be square");
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double& v = mass(i, j);
      if (v < -GridDistribution::kNegativeTolerance) {
        throw std::invalid_argument("GridDistribution: negative entry beyond tolerance");
      }
      if (v < 0.0) v = 0.0;
      if (!std::isfinite(v)) throw std::invalid_argument("GridDistribution: non-finite entry");
    }
  }
  if (std::abs(mass.sum() - 1.0) > GridDistribution::kSumTolerance) {
    throw std::invalid_argument("GridDistribution: entries must sum to 1 within 1e-9");
  }
  return mass;
}

}  // namespace

GridDistribution::GridDistribution(GridMatrix mass) : mass_(validated(std::move(mass))) {
  const double total = mass_.sum();
  if (total != 1.0) mass_ /= total;
}

GridDistribution GridDistribution::trusted(GridMatrix mass) {
  GridDistribution g;
  g.mass_ = validated(std::move(mass));
  return g;
}

std::string GridDistribution::to_json() const {
  nlohmann::json j;
  j["d"] = d();
  auto rows = nlohmann::json::array();
  for (int i = 0; i < d(); ++i) {
    auto row = nlohmann::json::array();
    for (int k = 0; k < d(); ++k) row.push_back(mass_(i, k));
    rows.push_back(std::move(row));
  }
  j["mass"] = std::move(rows);
  return j.dump();
}

GridDistribution GridDistribution::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int d = j.at("d").get<int>();
  if (d < 1) throw std::invalid_argument("GridDistribution: d must be >= 1");
  const auto& rows = j.at("mass");
  if (static_cast<int>(rows.size()) != d) {
    throw std::invalid_argument("GridDistribution: mass has wrong row count");
  }
  GridMatrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<int>(row.size()) != d) {
      throw std::invalid_argument("GridDistribution: mass has wrong column count");
    }
    for (int k = 0; k < d; ++k) m(i, k) = row.at(k).get<double>();
  }
  return GridDistribution::trusted(std::move(m));
}

std::string GridDistribution::to_csv() const {
  std::string out = "i,j,p\n";
  for (int i = 0; i < d(); ++i) {
    for (int j = 0; j < d(); ++j) {
      out += std::to_string(i + 1);
      out += ',';
      out += std::to_string(j + 1);
      out += ',';
      out += nlohmann::json(mass_(i, j)).dump();
      out += '\n';
    }
  }
  return out;
}

GridDistribution GridDistribution::from_csv(const std::string& text) {
  std::vector<std::array<double, 3>> records;
  std::size_t pos = 0;
  bool header = true;
  int dmax = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line != "i,j,p") throw std::invalid_argument("GridDistribution CSV: expected header i,j,p");
      header = false;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw std::invalid_argument("GridDistribution CSV: malformed row");
    }
    const int i = std::stoi(line.substr(0, c1));
    const int j = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
    const double p = std::stod(line.substr(c2 + 1));
    records.push_back({static_cast<double>(i), static_cast<double>(j), p});
    dmax = std::max({dmax, i, j});
  }
  if (records.empty()) throw std::invalid_argument("GridDistribution CSV: no rows");
  GridMatrix m = GridMatrix::Zero(dmax, dmax);
  for (const auto& r : records) {
    m(static_cast<int>(r[0]) - 1, static_cast<int>(r[1]) - 1) = r[2];
  }
  return GridDistribution::trusted(std::move(m));
}

GridDistribution uniform_grid(int d) {
  if (d < 1) throw std::invalid_argument("uniform_grid: d must be >= 1");
  GridMatrix m = GridMatrix::Constant(d, d, 1.0 / (static_cast<double>(d) * d));
  return GridDistribution(std::move(m));
}

GridDistribution point_mass(int d, int i, int j) {
  if (d < 1 || i < 0 || j < 0 || i >= d || j >= d) {
    throw std::invalid_argument("point_mass: index out of range");
  }
  GridMatrix m = GridMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return GridDistribution(std::move(m));
}

CdfSampler::CdfSampler(const GridDistribution& p) : d_(p.d()) {
  cdf_.resize(static_cast<std::size_t>(d_) * d_);
  double acc = 0.0;
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j < d_; ++j) {
      acc += p.at(i, j);
      cdf_[static_cast<std::size_t>(i) * d_ + j] = acc;
    }
  }
  cdf_.back() = 1.0;
}

GridPoint CdfSampler::draw(RandomStream& rng) const {
  const double u = rng.next_double();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto cell = static_cast<int>(it - cdf_.begin());
  return GridPoint{cell / d_, cell % d_};
}

SampleSeq sample(const GridDistribution& p, std::size_t n, RandomStream& rng) {
  SampleSeq seq;
  seq.d = p.d();
  seq.items.reserve(n);
  const CdfSampler sampler(p);
  for (std::size_t t = 0; t < n; ++t) seq.items.push_back(sampler.draw(rng));
  return seq;
}

}  // namespace cpsep
