/**
 * Copyright 2026 The heraldswap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace heraldswap {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix violates Hermiticity, unit trace or positivity.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// A link or policy parameter is outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The heralding probability is zero, so there is no conditional state.
class NoHerald : public Error {
 public:
  using Error::Error;
};

/// A root-finder found no sign change in its scan range.
class NoRoot : public Error {
 public:
  using Error::Error;
};

/// A fidelity target cannot be met at the requested operating point.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Distillation success probability underflowed.
class DegenerateDistillation : public Error {
 public:
  using Error::Error;
};

/// A closed-form table was asked for parameters outside its validity.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

/// Photon number in some mode exceeded the Fock cutoff.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A detector click pattern is not a heralding pattern for the encoding.
class PatternError : public Error {
 public:
  using Error::Error;
};

}  // namespace heraldswap
