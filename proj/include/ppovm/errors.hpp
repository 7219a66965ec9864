// Copyright 2026 The ppovm Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppovm {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of the operands do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An SVD or eigensolver did not converge.
class DecompositionError : public Error {
 public:
  DecompositionError(std::size_t rows, std::size_t cols)
      : Error("decomposition failed for a " + std::to_string(rows) + "x" +
              std::to_string(cols) + " matrix"),
        rows_(rows),
        cols_(cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
};

class NotHermitianError : public Error {
 public:
  explicit NotHermitianError(double residual)
      : Error("matrix is not Hermitian (residual " + std::to_string(residual) +
              ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A matrix expected to be positive semidefinite has a negative eigenvalue.
class NegativeEigenvalueError : public Error {
 public:
  explicit NegativeEigenvalueError(double eigenvalue)
      : Error("matrix has negative eigenvalue " + std::to_string(eigenvalue)),
        eigenvalue_(eigenvalue) {}

  /// Most negative eigenvalue found.
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// An object violates one of its defining invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotTracePreservingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class WeightSumError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SplitInconsistencyError : public Error {
 public:
  using Error::Error;
};

class NotEquivalentError : public Error {
 public:
  using Error::Error;
};

class NonMinimalError : public Error {
 public:
  using Error::Error;
};

class NotInSubalgebraError : public Error {
 public:
  using Error::Error;
};

/// A witness direction produced no usable decomposition.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

class NotInLmError : public Error {
 public:
  using Error::Error;
};

class NotPvmError : public Error {
 public:
  using Error::Error;
};

class NotInCommutantError : public Error {
 public:
  using Error::Error;
};

class ZeroWeightError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppovm
