#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stegseg {

enum class Errc {
  EmptySecret,
  LengthMismatch,
  CapacityExceeded,
  InvalidImage,
  NoPayload,
  WrongPassword,
  TagMismatch,
  TruncatedImage,
  ImageTooSmall,
  InvalidParams,
  NoConvergence,
  EmptySide,
  DegenerateVector,
  DimensionMismatch,
  CoverageError,
  BadMagic,
  BadVersion,
  MalformedRuns,
  ChecksumMismatch,
  Truncated,
  MissingSegment,
  OverlapError,
  UnknownSegment,
  CountMismatch,
  FeatureMismatch,
  ConnectionFailed,
  BadRecord,
  DuplicateRecord,
  IoError,
  FormatError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
/// Messages never contain key or password material.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by reassembly when packets are absent; lists the table ids that
/// never arrived.
class MissingSegmentError : public Error {
 public:
  explicit MissingSegmentError(std::vector<std::uint16_t> missing);

  const std::vector<std::uint16_t>& missing_ids() const noexcept { return missing_; }

 private:
  std::vector<std::uint16_t> missing_;
};

}  // namespace stegseg
