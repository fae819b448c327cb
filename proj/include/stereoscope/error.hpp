#pragma once

#include <stdexcept>
#include <string>

namespace stereoscope {

// Failure categories. The CLI maps these onto process exit codes:
// 2 = usage/input error, 3 = domain error, 4 = I/O error.
enum class ErrorKind {
  InvalidArgument,
  NonPositiveDepth,
  NonPositiveDisparity,
  BehindCamera,
  NotConverged,
  FormatMismatch,
  LengthMismatch,
  SizeMismatch,
  EmptyMask,
  EmptyOverlap,
  TooSmall,
  RangeTooLarge,
  EmptyClip,
  InsufficientValidPixels,
  NoMirror,
  OddWidth,
  AllBlack,
  ManifestMismatch,
  UnreadableFrame,
  MissingFrame,
  DimMismatch,
  StepOverflow,
  NegativeTerm,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorKind::NonPositiveDisparity: return "NonPositiveDisparity";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::FormatMismatch: return "FormatMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::EmptyOverlap: return "EmptyOverlap";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::RangeTooLarge: return "RangeTooLarge";
    case ErrorKind::EmptyClip: return "EmptyClip";
    case ErrorKind::InsufficientValidPixels: return "InsufficientValidPixels";
    case ErrorKind::NoMirror: return "NoMirror";
    case ErrorKind::OddWidth: return "OddWidth";
    case ErrorKind::AllBlack: return "AllBlack";
    case ErrorKind::ManifestMismatch: return "ManifestMismatch";
    case ErrorKind::UnreadableFrame: return "UnreadableFrame";
    case ErrorKind::MissingFrame: return "MissingFrame";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::StepOverflow: return "StepOverflow";
    case ErrorKind::NegativeTerm: return "NegativeTerm";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::InvalidArgument:
      case ErrorKind::ManifestMismatch:
      case ErrorKind::MissingFrame:
        return 2;
      case ErrorKind::Io:
      case ErrorKind::UnreadableFrame:
        return 4;
      default:
        return 3;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace stereoscope
