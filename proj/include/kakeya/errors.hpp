#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kakeya {

// Base of every error the library throws. Callers that only need a message
// catch this; the CLI maps the concrete subclasses onto exit codes.
class KakeyaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRing : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class DigitOutOfRange : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class BadDepth : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class RingMismatch : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class NegativeValuation : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class BadIndex : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class NotInSk : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class RankDeficient : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

class ParseError : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

// An enumeration would exceed the configured cell or pair budget. The
// message carries the exact counts.
class BudgetExceeded : public KakeyaError {
 public:
  using KakeyaError::KakeyaError;
};

// An input was not known to enough digits. Carries the depth that would
// have been sufficient so front ends can report it.
class InsufficientDepth : public KakeyaError {
 public:
  InsufficientDepth(const std::string& what, int required, int available)
      : KakeyaError(what + " (required depth " + std::to_string(required) +
                    ", available " + std::to_string(available) + ")"),
        required_(required),
        available_(available) {}

  int required() const noexcept { return required_; }
  int available() const noexcept { return available_; }

 private:
  int required_;
  int available_;
};

}  // namespace kakeya
