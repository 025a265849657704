/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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

namespace ddf {

/// Base error for all engine failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or precondition violation detected before any work.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Malformed serialized payload (bad magic, size mismatch, unknown tags).
class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& msg) : Error(msg) {}
};

/// Transport-level failure (peer disconnect, short read, timeout).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& msg) : Error(msg) {}
};

/// File I/O failure; message names the offending path.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace ddf
