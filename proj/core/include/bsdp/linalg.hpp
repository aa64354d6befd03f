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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "bsdp/fock.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// max_{ij} |(A A^dagger - I)_{ij}|.
double unitarity_error(const ComplexMatrix& matrix);

/// An M x M matrix checked to be unitary at construction.
class UnitaryMatrix {
 public:
  static constexpr double kUnitarityTolerance = 1e-10;

  /// Throws ValidationError if `matrix` is not square, holds non-finite
  /// entries, or misses unitarity by more than kUnitarityTolerance.
  explicit UnitaryMatrix(ComplexMatrix matrix,
                         std::optional<std::uint64_t> haar_seed = std::nullopt,
                         std::string tag = {});

  static UnitaryMatrix identity(std::size_t modes);

  [[nodiscard]] std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(matrix_.rows());
  }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] const std::optional<std::uint64_t>& haar_seed() const noexcept {
    return haar_seed_;
  }
  /// Short identifier of where this unitary came from ("haar:7", "identity:4").
  [[nodiscard]] const std::string& tag() const noexcept { return tag_; }

  Complex operator()(std::size_t row, std::size_t col) const {
    return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  /// {"schema_version", "M", "entries": [[re, im], ...] row-major,
  /// "haar_seed", "tag"}; doubles round-trip exactly.
  [[nodiscard]] std::string to_json() const;
  static UnitaryMatrix from_json(std::string_view text);

 private:
  ComplexMatrix matrix_;
  std::optional<std::uint64_t> haar_seed_;
  std::string tag_;
};

/// Haar-distributed unitary: complex Ginibre matrix, Householder QR, and the
/// phases of diag(R) folded back into Q.
UnitaryMatrix haar_unitary(std::size_t modes, Rng& rng);

/// As above with a fresh generator seeded by `haar_seed`, recorded on the result.
UnitaryMatrix haar_unitary(std::size_t modes, std::uint64_t haar_seed);

inline constexpr std::size_t kMaxPermanentDimension = 30;

/// Ryser's formula with Gray-code subset order: O(n) work per subset.
Complex permanent_ryser(const ComplexMatrix& a,
                        std::size_t max_dimension = kMaxPermanentDimension);

/// Sum over all n! permutations. Test oracle; refuses n > 9.
Complex permanent_naive(const ComplexMatrix& a);

/// Determinant by LU factorization with partial pivoting.
Complex determinant(const ComplexMatrix& a);

/// N x N matrix whose rows repeat row i of U r_i times and whose columns
/// repeat column j of U s_j times.
ComplexMatrix submatrix(const UnitaryMatrix& u, const Configuration& input,
                        const Configuration& output);

namespace detail {
/// Ryser's formula re-summing every subset from scratch (O(n) per entry of
/// each subset). Second oracle for the Gray-code variant.
Complex permanent_ryser_plain(const ComplexMatrix& a);

/// Determinant of the row-major n x n matrix in `a`, destroying it.
Complex lu_determinant_inplace(std::span<Complex> a, std::size_t n);
}  // namespace detail

}  // namespace bsdp
