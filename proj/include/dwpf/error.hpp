#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dwpf {

enum class ErrorKind {
  InvalidContext,
  SeriesDivergence,
  SizeLimit,
  GenericPositionViolation,
  DynamicalPole,
  BoundaryPole,
  ReflectionPole,
  PoleAtEvaluation,
  MissingParameter,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidContext: return "InvalidContext";
    case ErrorKind::SeriesDivergence: return "SeriesDivergence";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::GenericPositionViolation: return "GenericPositionViolation";
    case ErrorKind::DynamicalPole: return "DynamicalPole";
    case ErrorKind::BoundaryPole: return "BoundaryPole";
    case ErrorKind::ReflectionPole: return "ReflectionPole";
    case ErrorKind::PoleAtEvaluation: return "PoleAtEvaluation";
    case ErrorKind::MissingParameter: return "MissingParameter";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

  // True for guard violations (bad numeric point), false for misuse.
  bool is_numeric_guard() const noexcept {
    return kind_ != ErrorKind::InvalidContext && kind_ != ErrorKind::SizeLimit &&
           kind_ != ErrorKind::MissingParameter;
  }

 private:
  ErrorKind kind_;
};

}  // namespace dwpf
