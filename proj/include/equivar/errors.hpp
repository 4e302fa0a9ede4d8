#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace equivar {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EQUIVAR_DEFINE_ERROR(Name)        \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

EQUIVAR_DEFINE_ERROR(InvalidModel);
EQUIVAR_DEFINE_ERROR(InvalidArgument);
EQUIVAR_DEFINE_ERROR(InvalidAction);
EQUIVAR_DEFINE_ERROR(StateSpaceTooLarge);
EQUIVAR_DEFINE_ERROR(ZeroProbabilityEvidence);
EQUIVAR_DEFINE_ERROR(EmptySubset);
EQUIVAR_DEFINE_ERROR(SystemMismatch);
EQUIVAR_DEFINE_ERROR(AmbiguousTranslation);
EQUIVAR_DEFINE_ERROR(UnknownVariable);
EQUIVAR_DEFINE_ERROR(UnknownValue);
EQUIVAR_DEFINE_ERROR(StructureInconsistent);
EQUIVAR_DEFINE_ERROR(UnknownSelectorValue);
EQUIVAR_DEFINE_ERROR(DimensionMismatch);
EQUIVAR_DEFINE_ERROR(IndexOutOfRange);
EQUIVAR_DEFINE_ERROR(UnknownScenario);
EQUIVAR_DEFINE_ERROR(SessionClosed);

#undef EQUIVAR_DEFINE_ERROR

// Training produced a non-finite loss. The per-epoch trace up to the failure is kept.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

// Malformed input. `field` is a JSON pointer into the document (empty when the
// document itself failed to parse), `line` is 1-based or 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::string field, std::size_t line, const std::string& message)
      : Error(format(field, line, message)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& field, std::size_t line, const std::string& message) {
    std::string out = "parse error";
    if (line != 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " in field '" + field + "'";
    return out + ": " + message;
  }

  std::string field_;
  std::size_t line_ = 0;
};

struct Diagnostic {
  std::string field;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics)
      : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& diagnostics) {
    std::string out = std::to_string(diagnostics.size()) + " validation diagnostic(s)";
    for (const auto& d : diagnostics) out += "; " + d.field + ": " + d.message;
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

}  // namespace equivar
