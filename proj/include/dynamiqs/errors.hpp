#pragma once

#include <stdexcept>
#include <string>

namespace dynamiqs {

// Base of every error the library throws. Protocol-level rejections are not
// exceptions; see protocol/result.hpp.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class ParamsMismatch : public Error {
 public:
  ParamsMismatch() : Error("ring parameter mismatch") {}
};

class NotInvertible : public Error {
 public:
  NotInvertible() : Error("element is not invertible in R_q") {}
};

class ResampleExhausted : public Error {
 public:
  using Error::Error;
};

class SamplerFailure : public Error {
 public:
  using Error::Error;
};

class AuthenticationFailure : public Error {
 public:
  AuthenticationFailure() : Error("AEAD authentication failed") {}
};

class LengthError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DuplicateRegistration : public Error {
 public:
  explicit DuplicateRegistration(const std::string& id)
      : Error("identity already registered: " + id) {}
};

class EmptyRegistry : public Error {
 public:
  EmptyRegistry() : Error("no vehicle registered") {}
};

}  // namespace dynamiqs
