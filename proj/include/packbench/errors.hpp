// Copyright 2026 The PackBench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PACKBENCH_ERRORS_HPP
#define PACKBENCH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace packbench {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A window or anchor reaches outside the grid.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// A placement would push the stack above the bin ceiling.
class PlacementRejected : public Error {
 public:
  using Error::Error;
};

/// An item exceeds the bin in every orientation.
class ItemRejected : public Error {
 public:
  using Error::Error;
};

/// An action is not accepted by the stability checker (or is out of bounds).
/// The environment state is left untouched when this is thrown.
class RejectedAction : public Error {
 public:
  using Error::Error;
};

/// Contact extraction found two boxes sharing volume.
class ModelCorruption : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Header declares a different sequence kind than the caller asked for.
class KindMismatch : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Peer sent a malformed or out-of-order message.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Peer went away (EOF, broken pipe, failed spawn).
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace packbench

#endif  // PACKBENCH_ERRORS_HPP
