// Copyright 2026 The qrom Authors
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

#include <stdexcept>
#include <string>

namespace qrom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (bad index, length mismatch, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested object would exceed a memory guard.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A basis column vanished after ancilla postselection.
class DegenerateBasisError : public Error {
public:
    using Error::Error;
};

/// Input field is (numerically) zero and cannot be amplitude encoded.
class DegenerateFieldError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Grid dimensions incompatible with a qubit register.
class ShapeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Sampled estimator retained no shots.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Linear system is singular at the requested regularization.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Non-finite value or violated numerical post-condition.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// LCU postselection succeeded with (numerically) zero probability.
class DegenerateReconstructionError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated file.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace qrom
