// Copyright 2026 The bsdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bsdp/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <json.hpp>

#include "bsdp/errors.hpp"

namespace bsdp {
namespace {

// Plain complex product; avoids the NaN-recovery path of operator*.
inline Complex mul(Complex a, Complex b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw ValidationError(std::string(what) + " requires a square matrix, got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

}  // namespace

double unitarity_error(const ComplexMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) return std::numeric_limits<double>::infinity();
  const ComplexMatrix gram = matrix * matrix.adjoint();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
      worst = std::max(worst, std::abs(gram(i, j) - Complex(i == j ? 1.0 : 0.0)));
  return worst;
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix matrix,
                             std::optional<std::uint64_t> haar_seed, std::string tag)
    : matrix_(std::move(matrix)), haar_seed_(haar_seed), tag_(std::move(tag)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
    throw ValidationError("a unitary must be a non-empty square matrix");
  for (Eigen::Index i = 0; i < matrix_.size(); ++i) {
    const Complex z = matrix_.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ValidationError("unitary holds a non-finite entry");
  }
  const double err = unitarity_error(matrix_);
  if (err > kUnitarityTolerance)
    throw ValidationError("matrix is not unitary: max |UU^dagger - I| = " +
                          std::to_string(err));
  if (tag_.empty()) {
    tag_ = haar_seed_ ? "haar:" + std::to_string(*haar_seed_)
                      : "matrix:" + std::to_string(matrix_.rows());
  }
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t modes) {
  const auto m = static_cast<Eigen::Index>(modes);
  return UnitaryMatrix(ComplexMatrix::Identity(m, m), std::nullopt,
                       "identity:" + std::to_string(modes));
}

std::string UnitaryMatrix::to_json() const {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["M"] = dimension();
  auto& entries = doc["entries"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < matrix_.size(); ++i) {
    const Complex z = matrix_.data()[i];
    entries.push_back({z.real(), z.imag()});
  }
  doc["haar_seed"] = haar_seed_ ? nlohmann::json(*haar_seed_) : nlohmann::json();
  doc["tag"] = tag_;
  return doc.dump();
}

UnitaryMatrix UnitaryMatrix::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("unitary JSON: ") + e.what());
  }
  try {
    const auto m = doc.at("M").get<std::size_t>();
    const auto& entries = doc.at("entries");
    if (m == 0 || entries.size() != m * m)
      throw ValidationError("unitary JSON: expected M*M entries");
    const auto dim = static_cast<Eigen::Index>(m);
    ComplexMatrix matrix(dim, dim);
    for (std::size_t i = 0; i < m * m; ++i) {
      const auto& e = entries.at(i);
      if (e.size() != 2) throw ValidationError("unitary JSON: entry is not [re, im]");
      matrix.data()[i] = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
    std::optional<std::uint64_t> seed;
    if (doc.contains("haar_seed") && !doc["haar_seed"].is_null())
      seed = doc["haar_seed"].get<std::uint64_t>();
    std::string tag = doc.value("tag", std::string{});
    return UnitaryMatrix(std::move(matrix), seed, std::move(tag));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("unitary JSON: ") + e.what());
  }
}

UnitaryMatrix haar_unitary(std::size_t modes, Rng& rng) {
  if (modes < 1) throw ValidationError("haar_unitary requires M >= 1");
  const auto m = static_cast<Eigen::Index>(modes);
  const std::string tag = "haar:" + rng.tag();
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd ginibre(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      ginibre(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    q.col(j) *= mag > 0.0 ? diag / mag : Complex(1.0);
  }
  return UnitaryMatrix(ComplexMatrix(q), std::nullopt, tag);
}

UnitaryMatrix haar_unitary(std::size_t modes, std::uint64_t haar_seed) {
  Rng rng(haar_seed);
  UnitaryMatrix u = haar_unitary(modes, rng);
  return UnitaryMatrix(u.matrix(), haar_seed);
}

Complex permanent_ryser(const ComplexMatrix& a, std::size_t max_dimension) {
  require_square(a, "permanent");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > max_dimension || n > 62)
    throw CapacityError("permanent dimension " + std::to_string(n) +
                        " exceeds the ceiling of " + std::to_string(max_dimension));
  if (n == 0) return 1.0;

  // Row sums over the current column subset; the subset walks a Gray code so
  // each step adds or removes exactly one column.
  std::vector<Complex> row_sums(n, Complex(0.0));
  Complex total(0.0);
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const auto col = static_cast<Eigen::Index>(std::countr_zero(k));
    const std::uint64_t bit = std::uint64_t{1} << col;
    gray ^= bit;
    if (gray & bit) {
      for (std::size_t i = 0; i < n; ++i)
        row_sums[i] += a(static_cast<Eigen::Index>(i), col);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        row_sums[i] -= a(static_cast<Eigen::Index>(i), col);
    }
    Complex product = row_sums[0];
    for (std::size_t i = 1; i < n; ++i) product = mul(product, row_sums[i]);
    if (std::popcount(gray) & 1) total -= product;
    else total += product;
  }
  return (n & 1) ? -total : total;
}

Complex detail::permanent_ryser_plain(const ComplexMatrix& a) {
  require_square(a, "permanent");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > 20) throw CapacityError("plain Ryser variant is limited to n <= 20");
  if (n == 0) return 1.0;
  Complex total(0.0);
  for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << n); ++subset) {
    Complex product(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      Complex sum(0.0);
      for (std::size_t j = 0; j < n; ++j)
        if (subset >> j & 1)
          sum += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      product = mul(product, sum);
    }
    if (std::popcount(subset) & 1) total -= product;
    else total += product;
  }
  return (n & 1) ? -total : total;
}

Complex permanent_naive(const ComplexMatrix& a) {
  require_square(a, "permanent");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > 9) throw CapacityError("naive permanent refuses n > 9");
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Complex total(0.0);
  do {
    Complex product(1.0);
    for (std::size_t i = 0; i < n; ++i)
      product *= a(static_cast<Eigen::Index>(i), perm[i]);
    total += product;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Complex detail::lu_determinant_inplace(std::span<Complex> a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> Complex& { return a[i * n + j]; };
  Complex det(1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double mag = std::abs(at(i, k));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(at(k, j), at(pivot, j));
      det = -det;
    }
    const Complex diag = at(k, k);
    det = mul(det, diag);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex factor = at(i, k) / diag;
      for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= mul(factor, at(k, j));
    }
  }
  return det;
}

Complex determinant(const ComplexMatrix& a) {
  require_square(a, "determinant");
  ComplexMatrix lu = a;
  return detail::lu_determinant_inplace(std::span<Complex>(lu.data(), lu.size()),
                                        static_cast<std::size_t>(lu.rows()));
}

ComplexMatrix submatrix(const UnitaryMatrix& u, const Configuration& input,
                        const Configuration& output) {
  const unsigned n = input.photons();
  input.validate(u.dimension(), n);
  output.validate(u.dimension(), n);
  const auto rows = output.photon_modes();
  const auto cols = input.photon_modes();
  ComplexMatrix sub(n, n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) sub(i, j) = u(rows[i], cols[j]);
  return sub;
}

}  // namespace bsdp
