#pragma once

#include <string_view>
#include <utility>
#include <variant>

namespace dynamiqs::protocol {

enum class Rejection {
  UnknownPseudonym,
  PseudonymReuse,
  StaleTimestamp,
  SecretMismatch,
  DecryptFailure,
  DuplicatePending,
  NonceMismatch,
  ChainMismatch,
  AlreadyConsumed,
  NotProvisioned,
  WrongState,
  NoUnusedPseudonym,
  MalformedMessage,
};

inline std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::UnknownPseudonym: return "UnknownPseudonym";
    case Rejection::PseudonymReuse: return "PseudonymReuse";
    case Rejection::StaleTimestamp: return "StaleTimestamp";
    case Rejection::SecretMismatch: return "SecretMismatch";
    case Rejection::DecryptFailure: return "DecryptFailure";
    case Rejection::DuplicatePending: return "DuplicatePending";
    case Rejection::NonceMismatch: return "NonceMismatch";
    case Rejection::ChainMismatch: return "ChainMismatch";
    case Rejection::AlreadyConsumed: return "AlreadyConsumed";
    case Rejection::NotProvisioned: return "NotProvisioned";
    case Rejection::WrongState: return "WrongState";
    case Rejection::NoUnusedPseudonym: return "NoUnusedPseudonym";
    case Rejection::MalformedMessage: return "MalformedMessage";
  }
  return "Unknown";
}

struct Accepted {};

// Outcome of handling one message: a value or the reason it was refused.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Rejection r) : v_(r) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }
  T& value() { return std::get<0>(v_); }
  const T& value() const { return std::get<0>(v_); }
  T* operator->() { return &value(); }
  Rejection rejection() const { return std::get<1>(v_); }

 private:
  std::variant<T, Rejection> v_;
};

}  // namespace dynamiqs::protocol
