/*
 * Copyright 2026 MVRAG Authors
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

namespace mvrag {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};
class FormatError : public Error {
 public:
  using Error::Error;
};
class DuplicateIdError : public Error {
 public:
  using Error::Error;
};
class EmptyVocabularyError : public Error {
 public:
  using Error::Error;
};
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};
class ProviderError : public Error {
 public:
  using Error::Error;
};
class DimMismatchError : public Error {
 public:
  using Error::Error;
};
class ZeroVectorError : public Error {
 public:
  using Error::Error;
};
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};
class InvalidRankError : public Error {
 public:
  using Error::Error;
};
class InsufficientTermsError : public Error {
 public:
  using Error::Error;
};
class FingerprintMismatchError : public Error {
 public:
  using Error::Error;
};
class TooFewQueriesError : public Error {
 public:
  using Error::Error;
};
class ZeroWeightError : public Error {
 public:
  using Error::Error;
};
class EmptyRelevantError : public Error {
 public:
  using Error::Error;
};
class UnknownPerspectiveError : public Error {
 public:
  using Error::Error;
};
class ScorerFailureError : public Error {
 public:
  using Error::Error;
};

/// Violated call precondition (bad argument rather than bad data).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Error raised by a pipeline stage, tagged with the stage name.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& stage, const std::string& msg)
      : Error(stage + ": " + msg), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace mvrag
