#include "stegseg/error.hpp"

namespace stegseg {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptySecret: return "EmptySecret";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::InvalidImage: return "InvalidImage";
    case Errc::NoPayload: return "NoPayload";
    case Errc::WrongPassword: return "WrongPassword";
    case Errc::TagMismatch: return "TagMismatch";
    case Errc::TruncatedImage: return "TruncatedImage";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EmptySide: return "EmptySide";
    case Errc::DegenerateVector: return "DegenerateVector";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::CoverageError: return "CoverageError";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::MalformedRuns: return "MalformedRuns";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::Truncated: return "Truncated";
    case Errc::MissingSegment: return "MissingSegment";
    case Errc::OverlapError: return "OverlapError";
    case Errc::UnknownSegment: return "UnknownSegment";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::FeatureMismatch: return "FeatureMismatch";
    case Errc::ConnectionFailed: return "ConnectionFailed";
    case Errc::BadRecord: return "BadRecord";
    case Errc::DuplicateRecord: return "DuplicateRecord";
    case Errc::IoError: return "IoError";
    case Errc::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {

std::string describe_missing(const std::vector<std::uint16_t>& ids) {
  std::string s = "segments not received:";
  for (auto id : ids) s += " " + std::to_string(id);
  return s;
}

}  // namespace

MissingSegmentError::MissingSegmentError(std::vector<std::uint16_t> missing)
    : Error(Errc::MissingSegment, describe_missing(missing)), missing_(std::move(missing)) {}

}  // namespace stegseg
