// Copyright 2026 The isingchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace isingchaos {

// Exception hierarchy. The CLI maps each kind onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad parameters, size mismatches, corrupt files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A solver refused an instance (size or width guard).
class SolverGuardError : public Error {
 public:
  using Error::Error;
};

// A randomized construction gave up after its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// A requested quantity is not bracketed by the available data.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace isingchaos
