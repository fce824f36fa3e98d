#pragma once

#include <stdexcept>
#include <string>

namespace gpc {

// Error taxonomy shared by the wire codec, the kernels and the service layer.
// The server maps these onto the closed set of ERR:<CODE> response statuses;
// everything else treats them as ordinary exceptions.
enum class Errc {
  // wire / header codec
  FieldTooLong,
  InvalidCharacter,
  BadMarker,
  MalformedPadding,
  DuplicateKey,
  BadToken,
  MissingParam,
  BadValue,
  Overflow,
  Truncated,
  PayloadMismatch,
  // task registry / dispatch
  UnknownTask,
  DuplicateFlag,
  TaskFailed,
  // demosaic
  BadImage,
  // least squares
  InsufficientPoints,
  Singular,
  OrderTooHigh,
  // transport
  ConnectFailed,
  BindFailed,
  TimedOut,
  IoError,
  // client-side file handling
  UnsafeName,
  SizeMismatch,
  BadFormat,
  // misc
  TooLarge,
  ServerError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gpc
