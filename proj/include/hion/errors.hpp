/*
 Copyright 2026 The Hion Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace hion {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, arguments or file schemas. Maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, singular operations and other numeric failures.
/// Maps to CLI exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures (unreadable checkpoint, unwritable outdir).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hion
