#include "gpc/error.hpp"

namespace gpc {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::FieldTooLong: return "FieldTooLong";
    case Errc::InvalidCharacter: return "InvalidCharacter";
    case Errc::BadMarker: return "BadMarker";
    case Errc::MalformedPadding: return "MalformedPadding";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::BadToken: return "BadToken";
    case Errc::MissingParam: return "MissingParam";
    case Errc::BadValue: return "BadValue";
    case Errc::Overflow: return "Overflow";
    case Errc::Truncated: return "Truncated";
    case Errc::PayloadMismatch: return "PayloadMismatch";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::DuplicateFlag: return "DuplicateFlag";
    case Errc::TaskFailed: return "TaskFailed";
    case Errc::BadImage: return "BadImage";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::Singular: return "Singular";
    case Errc::OrderTooHigh: return "OrderTooHigh";
    case Errc::ConnectFailed: return "ConnectFailed";
    case Errc::BindFailed: return "BindFailed";
    case Errc::TimedOut: return "TimedOut";
    case Errc::IoError: return "IoError";
    case Errc::UnsafeName: return "UnsafeName";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::BadFormat: return "BadFormat";
    case Errc::TooLarge: return "TooLarge";
    case Errc::ServerError: return "ServerError";
  }
  return "Unknown";
}

}  // namespace gpc
